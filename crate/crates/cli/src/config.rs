//! Flags, JSON config files and their resolution into a [`RunConfig`]:
//! flags override the config file, which overrides built-in defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, ValueEnum};
use laxforge_core::calogero::Anchor;
use laxforge_core::fields::Grid2D;
use laxforge_core::fields::DEFAULT_EXCLUSION_RADIUS;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

type C = Complex64;

#[derive(Parser, Debug)]
#[command(
    name = "laxforge",
    version,
    about = "Calogero dynamics, explicit Lax pairs and identity checks for quantum Painleve II at even beta"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Integrate the particle system and export the trajectory.
    Simulate,
    /// Export the polynomial Lax pair at one time.
    BuildLax,
    /// Check every identity along a trajectory; JSON report.
    Verify,
    /// Compare the particle construction with the Hastings–McLeod cases κ=1,2.
    CrosscheckHm,
    /// `verify` plus the eigenvector / Fokker–Planck chain.
    Report,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

/// Command-line flags; every one is optional so that unset flags fall
/// through to the config file.
#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// Number of particles κ = β/2
    #[arg(long)]
    pub kappa: Option<usize>,
    /// Initial coordinates, comma separated (complex as `a+bi`)
    #[arg(long, allow_hyphen_values = true)]
    pub q0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    /// Integrator relative tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// `tmin,tmax,xmin,xmax,nt,nx`
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Gauge φ(t), a constant or an expression in t
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// `sumP`, `sumP:value` or `U:value`
    #[arg(long)]
    pub anchor: Option<String>,
    /// Perturbs the default coordinates reproducibly
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Trajectory CSV to verify (re-integrated from its first row)
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// JSON state snapshot to start from
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Hastings–McLeod table `t,q,qprime,u` to use instead of solving
    #[arg(long)]
    pub hm_table: Option<PathBuf>,
}

/// The JSON config file: the same keys as the flags, in flag syntax.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub kappa: Option<usize>,
    pub q0: Option<String>,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub tol: Option<f64>,
    pub grid: Option<String>,
    pub phi: Option<String>,
    pub anchor: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub trajectory: Option<PathBuf>,
    pub state: Option<PathBuf>,
    pub hm_table: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("bad config {}: {e}", path.display())))
    }
}

/// `tmin,tmax,xmin,xmax,nt,nx`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t: (f64, f64),
    pub x: (f64, f64),
    pub nt: usize,
    pub nx: usize,
}

impl GridSpec {
    pub fn grid(&self) -> CliResult<Grid2D> {
        Ok(Grid2D::uniform((self.t.0, self.t.1, self.nt), (self.x.0, self.x.1, self.nx), DEFAULT_EXCLUSION_RADIUS)?)
    }
}

impl FromStr for GridSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(CliError::usage(format!("grid needs tmin,tmax,xmin,xmax,nt,nx, got {s:?}")));
        }
        let f = |i: usize| -> CliResult<f64> {
            parts[i].parse().map_err(|_| CliError::usage(format!("bad grid number {:?}", parts[i])))
        };
        let n = |i: usize| -> CliResult<usize> {
            parts[i].parse().map_err(|_| CliError::usage(format!("bad grid count {:?}", parts[i])))
        };
        let g = GridSpec { t: (f(0)?, f(1)?), x: (f(2)?, f(3)?), nt: n(4)?, nx: n(5)? };
        g.grid()?;
        Ok(g)
    }
}

pub fn parse_complex(s: &str) -> CliResult<C> {
    let s = s.trim();
    C::from_str(s).map_err(|_| CliError::usage(format!("bad complex number {s:?}")))
}

pub fn parse_q0(s: &str) -> CliResult<Vec<C>> {
    s.split(',').map(parse_complex).collect()
}

pub fn parse_anchor(s: &str) -> CliResult<Anchor> {
    let (name, value) = match s.split_once(':') {
        Some((n, v)) => (n, Some(parse_complex(v)?)),
        None => (s, None),
    };
    match (name.trim(), value) {
        ("sumP", v) => Ok(Anchor::SumP(v.unwrap_or_default())),
        ("U", Some(v)) => Ok(Anchor::U(v)),
        _ => Err(CliError::usage(format!("anchor must be sumP, sumP:value or U:value, got {s:?}"))),
    }
}

pub fn format_anchor(a: &Anchor) -> String {
    match a {
        Anchor::SumP(v) if *v == C::default() => "sumP".into(),
        Anchor::SumP(v) => format!("sumP:{v}"),
        Anchor::U(v) => format!("U:{v}"),
    }
}

/// Fully resolved settings of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub kappa: usize,
    pub q0: Vec<C>,
    pub t0: f64,
    pub t1: f64,
    pub tol: f64,
    pub grid: GridSpec,
    pub phi: String,
    pub anchor: String,
    pub seed: Option<u64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
    pub state: Option<PathBuf>,
    pub hm_table: Option<PathBuf>,
    /// Whether `t1` / the grid were given explicitly (a trajectory file or
    /// state snapshot otherwise supplies them).
    #[serde(skip)]
    pub t1_set: bool,
    #[serde(skip)]
    pub grid_set: bool,
}

pub const DEFAULT_TOL: f64 = 1e-10;
/// Spread of the seeded perturbation of the default coordinates.
pub const SEED_JITTER: f64 = 0.05;

/// Built-in initial data per κ: `(Q0, t0)`. Real data in the quartic
/// potential escapes in finite time unless the confining `-2tQ` term is
/// large enough, hence the later start for κ ≥ 4.
/// The seeded jitter moves real parts only.
pub fn default_initial(kappa: usize) -> (Vec<C>, f64) {
    let r = |v: &[f64]| v.iter().map(|x| C::new(*x, 0.0)).collect();
    match kappa {
        1 => (r(&[0.4]), 0.0),
        2 => (r(&[1.0, -1.0]), 0.0),
        // off the real axis, so the unit window at the origin is pole-free
        3 => (vec![C::new(-1.2, 0.4), C::new(0.0, -0.8), C::new(1.2, 0.4)], 0.0),
        4 => (r(&[-1.2, -0.4, 0.4, 1.2]), 3.0),
        // a zigzag straddling the real axis
        k => {
            let z = (0..k).map(|i| {
                let im = if i % 2 == 0 { 0.5 } else { -0.5 };
                C::new(0.6 * (i as f64 - (k - 1) as f64 / 2.0), im)
            });
            (z.collect(), 0.0)
        }
    }
}

/// At κ=2 the difference `c₁ - c₂` is free of the momenta once `ΣP` is
/// fixed, so a `ΣP` anchor only works for `Q₁² = Q₂²`; `U` is fixed instead
/// (`U = 1` is the symmetric state at `Q = [1, -1]`, `t = 0`).
pub fn default_anchor(kappa: usize) -> &'static str {
    if kappa == 2 {
        "U:1"
    } else {
        "sumP"
    }
}

/// Default time span of particle runs.
pub const DEFAULT_SPAN: f64 = 2.0;
/// Default window of the Hastings–McLeod cross-check.
pub const CROSSCHECK_WINDOW: (f64, f64) = (-2.0, 4.0);
pub const DEFAULT_X_WINDOW: (f64, f64) = (-3.0, 3.0);

fn jitter(q: &mut [C], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for z in q.iter_mut() {
        z.re += rng.gen_range(-SEED_JITTER..SEED_JITTER);
    }
}

impl RunConfig {
    /// Merges flags over the config file (if any) over defaults.
    pub fn resolve(command: Command, flags: &Flags) -> CliResult<Self> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        macro_rules! pick {
            ($f:ident) => {
                flags.$f.clone().or(file.$f.clone())
            };
        }
        let kappa = pick!(kappa).unwrap_or(3);
        if kappa < 1 {
            return Err(CliError::usage("kappa must be an integer >= 1"));
        }
        let (default_q0, default_t0) = default_initial(kappa);
        let seed = pick!(seed);
        let q0 = match pick!(q0) {
            Some(s) => parse_q0(&s)?,
            None => {
                let mut q = default_q0;
                if let Some(seed) = seed {
                    jitter(&mut q, seed);
                }
                q
            }
        };
        if q0.len() != kappa && command != Command::CrosscheckHm {
            return Err(CliError::usage(format!("q0 has {} entries, kappa is {kappa}", q0.len())));
        }
        let crosscheck = command == Command::CrosscheckHm;
        let t0 = pick!(t0).unwrap_or(if crosscheck { CROSSCHECK_WINDOW.0 } else { default_t0 });
        let t1 = pick!(t1).unwrap_or(if crosscheck { CROSSCHECK_WINDOW.1 } else { t0 + DEFAULT_SPAN });
        if !t0.is_finite() || !t1.is_finite() {
            return Err(CliError::usage("t0 and t1 must be finite"));
        }
        if crosscheck && !(t0 < t1) {
            return Err(CliError::usage("crosscheck-hm needs t0 < t1"));
        }
        let tol = pick!(tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::usage(format!("tolerance must be positive, got {tol}")));
        }
        let grid = match pick!(grid) {
            Some(s) => s.parse()?,
            None => {
                let (lo, hi) = (t0.min(t1), t0.max(t1));
                match command {
                    // 20 × 10 = 200 field comparison points
                    Command::CrosscheckHm => GridSpec { t: (lo, hi), x: DEFAULT_X_WINDOW, nt: 20, nx: 10 },
                    _ => Self::default_grid(lo, hi),
                }
            }
        };
        let phi = pick!(phi).unwrap_or_else(|| "1".into());
        laxforge_core::laxbuild::BuilderConfig::with_phi(&phi)?;
        let anchor = format_anchor(&parse_anchor(&pick!(anchor).unwrap_or_else(|| default_anchor(kappa).into()))?);
        Ok(RunConfig {
            command,
            kappa,
            q0,
            t0,
            t1,
            tol,
            grid,
            phi,
            anchor,
            seed,
            format: pick!(format).unwrap_or_default(),
            out: pick!(out),
            trajectory: pick!(trajectory),
            state: pick!(state),
            hm_table: pick!(hm_table),
            t1_set: pick!(t1).is_some(),
            grid_set: pick!(grid).is_some(),
        })
    }

    /// The default sampling grid over `[lo, hi]`.
    pub fn default_grid(lo: f64, hi: f64) -> GridSpec {
        let n = if lo == hi { 1 } else { 40 };
        GridSpec { t: (lo, hi), x: DEFAULT_X_WINDOW, nt: n, nx: 40 }
    }

    pub fn anchor(&self) -> Anchor {
        parse_anchor(&self.anchor).expect("validated in resolve")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_lists() {
        let q = parse_q0("1, -0.5+2i,-3i").unwrap();
        assert_eq!(q, vec![C::new(1.0, 0.0), C::new(-0.5, 2.0), C::new(0.0, -3.0)]);
        assert!(parse_q0("1,,2").is_err());
    }

    #[test]
    fn anchors() {
        assert_eq!(parse_anchor("sumP").unwrap(), Anchor::SumP(C::default()));
        assert_eq!(parse_anchor("U:1.5").unwrap(), Anchor::U(C::new(1.5, 0.0)));
        assert!(parse_anchor("U").is_err() && parse_anchor("P:1").is_err());
        assert_eq!(format_anchor(&parse_anchor("U:2").unwrap()), "U:2+0i");
    }

    #[test]
    fn grids() {
        let g: GridSpec = "0,1,-3,3,5,7".parse().unwrap();
        assert_eq!((g.nt, g.nx, g.x), (5, 7, (-3.0, 3.0)));
        assert!("0,1,2".parse::<GridSpec>().is_err());
        assert!("1,0,-3,3,5,7".parse::<GridSpec>().is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"kappa": 2, "t1": 1.5, "tol": 1e-9}"#).unwrap();
        let flags = Flags { config: Some(path), tol: Some(1e-11), ..Flags::default() };
        let cfg = RunConfig::resolve(Command::Simulate, &flags).unwrap();
        assert_eq!((cfg.kappa, cfg.t1, cfg.tol), (2, 1.5, 1e-11));
        assert_eq!(cfg.q0, default_initial(2).0);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"kapa": 2}"#).unwrap();
        let flags = Flags { config: Some(path), ..Flags::default() };
        assert!(matches!(RunConfig::resolve(Command::Verify, &flags), Err(CliError::Usage(_))));
    }

    #[test]
    fn seed_is_reproducible_and_ignored_with_explicit_q0() {
        let flags = Flags { seed: Some(7), ..Flags::default() };
        let a = RunConfig::resolve(Command::Simulate, &flags).unwrap();
        let b = RunConfig::resolve(Command::Simulate, &flags).unwrap();
        assert_eq!(a.q0, b.q0);
        assert_ne!(a.q0, default_initial(3).0);
        assert!(a.q0.iter().zip(&default_initial(3).0).all(|(x, y)| (x - y).norm() < SEED_JITTER));
        let flags = Flags { seed: Some(7), q0: Some("-1,0,1".into()), ..Flags::default() };
        assert_eq!(RunConfig::resolve(Command::Simulate, &flags).unwrap().q0.len(), 3);
    }

    #[test]
    fn validation() {
        let bad = |f: Flags| matches!(RunConfig::resolve(Command::Simulate, &f), Err(CliError::Usage(_)));
        assert!(bad(Flags { kappa: Some(0), ..Flags::default() }));
        assert!(bad(Flags { tol: Some(-1.0), ..Flags::default() }));
        assert!(bad(Flags { kappa: Some(2), q0: Some("1".into()), ..Flags::default() }));
        assert!(bad(Flags { phi: Some("x".into()), ..Flags::default() }));
    }
}
