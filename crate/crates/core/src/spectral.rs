//! Trigonometric interpolation on equispaced periodic grids.
//!
//! Samples are taken at `t_j = 2πj/N`. The interpolant keeps modes
//! `|k| ≤ N/2`, with the Nyquist mode split evenly between `±N/2` so that
//! real data stays real.

use std::cell::RefCell;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

fn inverse(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// Equispaced parameter nodes on `[0, 2π)`.
pub fn nodes(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| TAU * j as f64 / n as f64)
}

/// Trigonometric polynomial `Σ_{k=-K}^{K} c_k e^{ikt}`.
#[derive(Debug, Clone)]
pub struct TrigSeries {
    /// `coeffs[k + K]` is the coefficient of `e^{ikt}`.
    coeffs: Vec<Complex64>,
}

impl TrigSeries {
    pub fn from_samples(samples: &[Complex64]) -> Self {
        let n = samples.len();
        assert!(n > 0, "empty sample set");
        let mut buf = samples.to_vec();
        forward(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        let half = n / 2;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * half + 1];
        for (m, c) in buf.iter().enumerate() {
            let c = c * scale;
            let k = if m <= half { m as i64 } else { m as i64 - n as i64 };
            if n.is_multiple_of(2) && m == half {
                coeffs[0] += c * 0.5;
                coeffs[2 * half] += c * 0.5;
            } else {
                coeffs[(k + half as i64) as usize] += c;
            }
        }
        Self { coeffs }
    }

    pub fn from_real_samples(samples: &[f64]) -> Self {
        let c: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_samples(&c)
    }

    pub fn from_coefficients(coeffs: Vec<Complex64>) -> Self {
        assert!(coeffs.len() % 2 == 1, "coefficient vector must have odd length");
        Self { coeffs }
    }

    pub fn max_mode(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        let half = self.max_mode() as i64;
        if k.abs() > half {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + half) as usize]
        }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let half = self.max_mode();
        let e = Complex64::from_polar(1.0, t);
        let mut acc = self.coeffs[half];
        let mut pos = Complex64::new(1.0, 0.0);
        for k in 1..=half {
            // Re-anchor the power every 32 modes to bound the drift of repeated products.
            pos = if k % 32 == 0 { Complex64::from_polar(1.0, k as f64 * t) } else { pos * e };
            acc += self.coeffs[half + k] * pos + self.coeffs[half - k] * pos.conj();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let half = self.max_mode() as i64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * Complex64::new(0.0, (m as i64 - half) as f64))
            .collect();
        Self { coeffs }
    }

    /// Values on `m ≥ 2K+1` equispaced nodes, by zero-padded inverse FFT.
    pub fn resample(&self, m: usize) -> Vec<Complex64> {
        let half = self.max_mode();
        assert!(m > 2 * half, "resampling below the band limit");
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (idx, c) in self.coeffs.iter().enumerate() {
            let k = idx as i64 - half as i64;
            buf[k.rem_euclid(m as i64) as usize] += c;
        }
        inverse(m).process(&mut buf);
        buf
    }

    /// Exact integral of the interpolant over `[a, b]` (any real `a`, `b`).
    pub fn integrate(&self, a: f64, b: f64) -> Complex64 {
        let half = self.max_mode() as i64;
        let mut acc = self.coeffs[half as usize] * (b - a);
        for k in 1..=half {
            let kf = k as f64;
            let ik = Complex64::new(0.0, kf);
            let eb = Complex64::from_polar(1.0, kf * b);
            let ea = Complex64::from_polar(1.0, kf * a);
            acc += self.coeffs[(half + k) as usize] * (eb - ea) / ik;
            acc += self.coeffs[(half - k) as usize] * (eb.conj() - ea.conj()) / (-ik);
        }
        acc
    }
}

/// Spectral derivative `d/dt` of periodic samples, returned on the same nodes.
pub fn differentiate(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    forward(n).process(&mut buf);
    let half = n / 2;
    for (m, c) in buf.iter_mut().enumerate() {
        let k = if m < half || (m == half && n % 2 == 1) {
            m as f64
        } else if m == half {
            0.0
        } else {
            m as f64 - n as f64
        };
        *c *= Complex64::new(0.0, k);
    }
    inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter().map(|c| c * scale).collect()
}

pub fn differentiate_real(samples: &[f64]) -> Vec<f64> {
    let c: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    differentiate(&c).into_iter().map(|c| c.re).collect()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(n: usize, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        nodes(n).map(f).collect()
    }

    #[test]
    fn interpolates_band_limited_exactly() {
        let f = |t: f64| Complex64::new(1.0 + (3.0 * t).cos() - 0.5 * (7.0 * t).sin(), (2.0 * t).cos());
        let s = TrigSeries::from_samples(&samples(32, f));
        for &t in &[0.1, 1.3, 2.9, 5.5] {
            assert!((s.eval(t) - f(t)).norm() < 1e-13);
        }
    }

    #[test]
    fn resample_matches_pointwise_eval() {
        let f = |t: f64| Complex64::new((2.0 * t).sin(), t.cos().exp());
        let s = TrigSeries::from_samples(&samples(32, f));
        let fine = s.resample(128);
        for (j, t) in nodes(128).enumerate() {
            assert!((fine[j] - s.eval(t)).norm() < 1e-13);
        }
    }

    #[test]
    fn nyquist_mode_stays_real() {
        let f = |t: f64| Complex64::new((4.0 * t).cos(), 0.0);
        let s = TrigSeries::from_samples(&samples(8, f));
        for &t in &[0.3, 1.7] {
            let v = s.eval(t);
            assert!(v.im.abs() < 1e-14);
            assert!((v.re - (4.0 * t).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_and_integral_of_analytic_function() {
        // exp(cos t) is entire in t; 64 modes resolve it to round-off.
        let f = |t: f64| Complex64::new(t.cos().exp(), 0.0);
        let s = TrigSeries::from_samples(&samples(64, f));
        let d = differentiate(&samples(64, f));
        for (j, t) in nodes(64).enumerate() {
            let exact = -t.sin() * t.cos().exp();
            assert!((d[j].re - exact).abs() < 1e-12);
            assert!((s.derivative().eval(t).re - exact).abs() < 1e-12);
        }
        // ∫_0^{2π} e^{cos t} dt = 2π I_0(1)
        let i0 = 1.266_065_877_752_008_4;
        assert!((s.integrate(0.0, TAU).re - TAU * i0).abs() < 1e-12);
        let part = s.integrate(0.4, 2.0).re + s.integrate(2.0, 0.4 + TAU).re;
        assert!((part - TAU * i0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((integral - 2.0 / 15.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let (x1, w1) = gauss_legendre(1);
        assert!(x1[0].abs() < 1e-15 && (w1[0] - 2.0).abs() < 1e-15);
    }
}
