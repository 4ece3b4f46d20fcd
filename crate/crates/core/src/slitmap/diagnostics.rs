use num_complex::Complex64;
use rayon::prelude::*;

use crate::bm_kernels::HarmonicEvaluator;

/// Gradient magnitudes below this are flagged.
pub const GRADIENT_FLAG: f64 = 1e-8;

/// Rectangular evaluation grid. Nodes closer than `margin` (fraction of the
/// diameter) to the boundary or to a singular point are skipped.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub lower: Complex64,
    pub upper: Complex64,
    pub margin: f64,
    /// Levels `r` at which the sublevel set `{field ≤ r}` is flood-filled.
    pub levels: Vec<f64>,
}

impl GridSpec {
    pub fn square(n: usize, lower: Complex64, upper: Complex64) -> Self {
        Self { nx: n, ny: n, lower, upper, margin: 1e-3, levels: Vec::new() }
    }

    pub fn with_levels(mut self, levels: Vec<f64>) -> Self {
        self.levels = levels;
        self
    }

    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        let fx = if self.nx > 1 { i as f64 / (self.nx - 1) as f64 } else { 0.5 };
        let fy = if self.ny > 1 { j as f64 / (self.ny - 1) as f64 } else { 0.5 };
        Complex64::new(self.lower.re + fx * (self.upper.re - self.lower.re), self.lower.im + fy * (self.upper.im - self.lower.im))
    }
}

#[derive(Debug, Clone)]
pub struct FieldDiagnostics {
    /// Interior nodes where the field was evaluated.
    pub evaluated: usize,
    pub min_gradient: f64,
    pub min_gradient_at: Complex64,
    /// `min_gradient < GRADIENT_FLAG`.
    pub flagged: bool,
    /// `(r, number of connected components of {field ≤ r})`.
    pub sublevel_components: Vec<(f64, usize)>,
}

#[derive(Clone, Copy)]
enum Node {
    /// Outside the domain or inside the boundary margin of component `c`.
    Band(usize),
    Excluded,
    Interior(f64, f64),
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Minimum gradient magnitude over the interior grid and the number of
/// connected components of each sampled sublevel set.
///
/// Sublevel nodes next to the boundary band of a component are joined through
/// that component: the outer curve minus the field's boundary poles is an arc,
/// and each hole acts as a single point.
pub fn field_diagnostics<F: HarmonicEvaluator + ?Sized>(field: &F, spec: &GridSpec) -> FieldDiagnostics {
    let domain = field.domain();
    let scale = domain.map_or(1.0, |d| d.diameter());
    let margin = spec.margin * scale;
    let spacing = ((spec.upper.re - spec.lower.re) / spec.nx.max(2) as f64).max((spec.upper.im - spec.lower.im) / spec.ny.max(2) as f64);
    let singular = field.singular_points();
    let nodes: Vec<Node> = (0..spec.nx * spec.ny)
        .into_par_iter()
        .map(|k| {
            let z = spec.node(k % spec.nx, k / spec.nx);
            if let Some(d) = domain {
                let (c, _, dist) = d.nearest_boundary(z);
                if !d.contains(z) || dist < margin {
                    return Node::Band(c);
                }
            }
            if singular.iter().any(|p| (z - p).norm() < margin.max(2.0 * spacing)) {
                return Node::Excluded;
            }
            let (v, g) = field.value_gradient(z);
            if v.is_finite() && g.norm().is_finite() {
                Node::Interior(v, g.norm())
            } else {
                Node::Excluded
            }
        })
        .collect();

    let mut evaluated = 0;
    let (mut min_gradient, mut min_gradient_at) = (f64::INFINITY, Complex64::new(f64::NAN, f64::NAN));
    for (k, n) in nodes.iter().enumerate() {
        if let Node::Interior(_, g) = *n {
            evaluated += 1;
            if g < min_gradient {
                min_gradient = g;
                min_gradient_at = spec.node(k % spec.nx, k / spec.nx);
            }
        }
    }

    let components = domain.map_or(0, |d| d.component_count());
    let sublevel_components = spec
        .levels
        .iter()
        .map(|&r| {
            let total = spec.nx * spec.ny;
            let mut uf = UnionFind((0..total + components).collect());
            let active = |k: usize| matches!(nodes[k], Node::Interior(v, _) if v <= r);
            for k in 0..total {
                if !active(k) {
                    continue;
                }
                let (i, j) = (k % spec.nx, k / spec.nx);
                let mut neighbours = Vec::with_capacity(4);
                if i + 1 < spec.nx {
                    neighbours.push(k + 1);
                }
                if i > 0 {
                    neighbours.push(k - 1);
                }
                if j + 1 < spec.ny {
                    neighbours.push(k + spec.nx);
                }
                if j > 0 {
                    neighbours.push(k - spec.nx);
                }
                for m in neighbours {
                    match nodes[m] {
                        Node::Band(c) => uf.union(k, total + c),
                        _ if active(m) => uf.union(k, m),
                        _ => {}
                    }
                }
            }
            let mut roots: Vec<usize> = (0..total).filter(|&k| active(k)).map(|k| uf.find(k)).collect();
            roots.sort_unstable();
            roots.dedup();
            (r, roots.len())
        })
        .collect();

    FieldDiagnostics {
        evaluated,
        min_gradient,
        min_gradient_at,
        flagged: !(min_gradient >= GRADIENT_FLAG),
        sublevel_components,
    }
}
