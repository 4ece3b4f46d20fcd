//! Command-line front end.
//!
//! Every command loads one domain file (or a bundled domain named
//! `bundled/NAME.dom`), prints a [`Report`](crate::report::Report) to standard
//! output and, with `--output DIR`, writes CSV grids and SVG figures. Exit codes:
//! 0 on success, 1 when a computation fails or a check does not hold, 2 for
//! usage and domain-file errors.

mod commands;
mod validate;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::error::Error;
use crate::geometry::{parse_domain, Domain, DomainFileError};
use crate::report::Report;
use crate::sampler::{RunConfig, DEFAULT_PATHS, DEFAULT_SEED};

/// Domain files shipped with the crate, addressable as `bundled/NAME`.
pub const BUNDLED: [(&str, &str); 3] = [
    ("disk.dom", include_str!("../../bundled/disk.dom")),
    ("annulus.dom", include_str!("../../bundled/annulus.dom")),
    ("mirror.dom", include_str!("../../bundled/mirror.dom")),
];

#[derive(Debug, Parser)]
#[command(name = "erbm", version, about = "Kernels, ER fields, slit maps and ERBM sampling on planar domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Domain file, or `bundled/disk.dom`, `bundled/annulus.dom`, `bundled/mirror.dom`.
    #[arg(long, global = true, value_name = "FILE")]
    domain: Option<String>,
    /// Directory for CSV grids and SVG figures.
    #[arg(long, global = true, value_name = "DIR")]
    output: Option<PathBuf>,
    /// Collocation nodes per boundary curve.
    #[arg(long, global = true, default_value_t = 256)]
    nodes: usize,
    /// Collar offset as a fraction of the hole clearance.
    #[arg(long, global = true, default_value_t = 0.5)]
    collar: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_PATHS)]
    paths: usize,
    /// Worker threads for sampling (default: available cores); results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Tolerance for deterministic checks.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Omit the timestamp and elapsed time so reruns are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Debug, Clone, Args)]
struct PointArgs {
    /// Interior point `x,y`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    z: Option<Complex64>,
    /// Parameter `t` of a point on the outer boundary curve.
    #[arg(long, allow_hyphen_values = true)]
    w: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Poisson kernel H_D(z, w) and component harmonic measures.
    Pk(PointArgs),
    /// ER Poisson kernel H^ER(z, w), hole constants and fluxes.
    ErPk(PointArgs),
    /// Green's function with pole z: conformal radius and symmetry.
    Green(PointArgs),
    /// ER Green's function with pole z: hole constants and occupation.
    ErGreen(PointArgs),
    /// Boundary hit chain q and jump probabilities p̃.
    Chain,
    /// Chordal slit map with boundary pole w.
    MapChordal(PointArgs),
    /// Bilateral slit map for a hole.
    MapBilateral {
        #[arg(long, default_value_t = 1)]
        hole: usize,
    },
    /// Radial slit map with zero at z.
    MapRadial(PointArgs),
    /// Level curve of H^ER(·, w), or of G^ER(z, ·) when --z is given.
    Trace {
        #[command(flatten)]
        at: PointArgs,
        #[arg(long, allow_hyphen_values = true)]
        level: f64,
    },
    /// Monte Carlo ERBM exit distribution and hit chain.
    Sample {
        #[command(flatten)]
        at: PointArgs,
        /// Start on this hole instead of at --z.
        #[arg(long, conflicts_with = "z")]
        hole: Option<usize>,
        #[arg(long, default_value_t = 16)]
        bins: usize,
    },
    /// Invariant suites on the bundled domains (or on --domain).
    Validate,
}

fn parse_point(s: &str) -> std::result::Result<Complex64, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let x: f64 = x.trim().parse().map_err(|e| format!("bad x in `{s}`: {e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("bad y in `{s}`: {e}"))?;
    Ok(Complex64::new(x, y))
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Compute(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::OutsideDomain { .. } => CliError::Usage(e.to_string()),
            other => CliError::Compute(other),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Resolved inputs shared by every command.
struct Context {
    common: Common,
    domain_name: String,
    domain: Domain,
    output: Option<PathBuf>,
}

impl Context {
    fn report(&self, command: &str) -> Report {
        let mut r = Report::new(command, !self.common.no_timestamp);
        r.text("domain", &self.domain_name);
        r.input("nodes", self.common.nodes);
        r.input("collar", self.common.collar);
        r.count("holes", self.domain.hole_count());
        r
    }

    fn run_config(&self) -> RunConfig {
        let mut c = RunConfig::default().with_paths(self.common.paths).with_seed(self.common.seed);
        let workers = self.common.workers.or_else(|| std::thread::available_parallelism().ok().map(|n| n.get()));
        if let Some(k) = workers {
            c = c.with_workers(k);
        }
        c
    }

    fn write(&self, name: &str, contents: &str) -> CliResult<()> {
        if let Some(dir) = &self.output {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    }
}

/// Text of a domain file path, falling back to the bundled copies.
pub fn domain_text(path: &str) -> Option<String> {
    if let Ok(text) = fs::read_to_string(path) {
        return Some(text);
    }
    let name = path.strip_prefix("bundled/")?;
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| t.to_string())
}

fn load_domain(path: &str, nodes: usize) -> CliResult<Domain> {
    let text = domain_text(path).ok_or_else(|| CliError::Usage(format!("cannot read domain file {path}")))?;
    parse_domain(&text, Some(nodes)).map_err(|e: DomainFileError| CliError::Usage(format!("{path}: {e}")))
}

fn prepare_output(dir: &Option<PathBuf>) -> CliResult<Option<PathBuf>> {
    let Some(dir) = dir else { return Ok(None) };
    fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    Ok(Some(dir.clone()))
}

fn check_common(c: &Common) -> CliResult<()> {
    if c.nodes < 16 {
        return Err(CliError::Usage(format!("--nodes must be at least 16, got {}", c.nodes)));
    }
    if !(c.collar > 0.0 && c.collar < 1.0) {
        return Err(CliError::Usage(format!("--collar must lie in (0, 1), got {}", c.collar)));
    }
    if !(c.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", c.tol)));
    }
    if c.paths == 0 || c.workers == Some(0) {
        return Err(CliError::Usage("--paths and --workers must be positive".into()));
    }
    Ok(())
}

fn context(common: &Common, path: &str) -> CliResult<Context> {
    Ok(Context {
        domain: load_domain(path, common.nodes)?,
        domain_name: path.to_string(),
        output: prepare_output(&common.output)?,
        common: common.clone(),
    })
}

/// Rendered report and its number of failed checks.
fn dispatch(cli: Cli) -> CliResult<(String, usize)> {
    let common = &cli.common;
    check_common(common)?;
    if let Command::Validate = cli.command {
        let paths: Vec<String> = match &common.domain {
            Some(p) => vec![p.clone()],
            None => BUNDLED.iter().map(|(n, _)| format!("bundled/{n}")).collect(),
        };
        let mut contexts = Vec::new();
        for p in &paths {
            contexts.push(context(common, p)?);
        }
        return validate::run(common, &contexts);
    }
    let path = common.domain.as_deref().ok_or_else(|| CliError::Usage("--domain is required".into()))?;
    let ctx = context(common, path)?;
    let report = match cli.command {
        Command::Pk(p) => commands::pk(&ctx, &p)?,
        Command::ErPk(p) => commands::er_pk(&ctx, &p)?,
        Command::Green(p) => commands::green(&ctx, &p)?,
        Command::ErGreen(p) => commands::er_green(&ctx, &p)?,
        Command::Chain => commands::chain(&ctx)?,
        Command::MapChordal(p) => commands::map_chordal(&ctx, &p)?,
        Command::MapBilateral { hole } => commands::map_bilateral(&ctx, hole)?,
        Command::MapRadial(p) => commands::map_radial(&ctx, &p)?,
        Command::Trace { at, level } => commands::trace(&ctx, &at, level)?,
        Command::Sample { at, hole, bins } => commands::sample(&ctx, &at, hole, bins)?,
        Command::Validate => unreachable!(),
    };
    Ok((report.render(), report.failures()))
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run(args: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok((text, failures)) => {
            print!("{text}");
            if failures > 0 {
                eprintln!("error: {failures} check(s) failed");
                1
            } else {
                0
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Compute(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_domains_parse() {
        for (name, text) in BUNDLED {
            let d = parse_domain(text, None).unwrap();
            assert!(d.validate().is_empty(), "{name}");
        }
        assert!(domain_text("bundled/annulus.dom").is_some());
        assert!(domain_text("bundled/missing.dom").is_none());
    }

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("0.5,-0.25").unwrap(), Complex64::new(0.5, -0.25));
        assert!(parse_point("0.5").is_err());
        assert!(parse_point("a,1").is_err());
    }
}
