use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use sdroots_core::spectra::{load_hyperbolic_spectrum, CrossSectionSpec, GroupAction, SpectraError};
use std::path::PathBuf;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "sdroots", version, about = "Indicial roots and verification suites for cylindrical ends")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate indicial roots of a cross-section.
    Roots {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long = "jmax", default_value_t = 6)]
        j_max: usize,
        /// Keep roots with a <= Re <= b.
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true, value_name = "a,b")]
        window: Option<(f64, f64)>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Spectral gap and gluing window.
    Gap {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long = "jmax", default_value_t = 10)]
        j_max: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// H²₊ predicate and cokernel dimension at 0 for a hyperbolic cross-section.
    Ks {
        #[arg(long, value_name = "FILE")]
        hyperbolic: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Scalar multiplicities on a lens space S³/Z_p.
    Lens {
        #[arg(long, value_parser = parse_lens, value_name = "p,q1,q2")]
        lens: GroupAction,
        #[arg(long = "jmax", default_value_t = 10)]
        j_max: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Band limit for identities, grid size for linearization.
        #[arg(long = "N", default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[arg(long = "jmax", default_value_t = 10)]
        j_max: usize,
        /// Torus lattice for the identity suite.
        #[arg(long, value_parser = parse_lattice, value_name = "L1,L2,L3")]
        torus: Option<[f64; 3]>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Linearization,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(skip)]
#[command(group(ArgGroup::new("geometry").required(true).multiple(false).args(["sphere", "torus", "hyperbolic"])))]
pub struct GeometryArgs {
    #[arg(long)]
    sphere: bool,
    #[arg(long, value_parser = parse_lattice, value_name = "L1,L2,L3")]
    torus: Option<[f64; 3]>,
    #[arg(long, value_name = "FILE")]
    hyperbolic: Option<PathBuf>,
    #[arg(long, value_parser = parse_lens, value_name = "p,q1,q2", requires = "sphere")]
    lens: Option<GroupAction>,
}

impl GeometryArgs {
    pub fn hyperbolic_only(path: PathBuf) -> Self {
        GeometryArgs { sphere: false, torus: None, hyperbolic: Some(path), lens: None }
    }

    /// The cross-section and a short label for it.
    pub fn resolve(&self) -> Result<(CrossSectionSpec, String), CliError> {
        if let Some(path) = &self.hyperbolic {
            let spec = load_hyperbolic_spectrum(path).map_err(|e| match e {
                SpectraError::Io { .. } | SpectraError::Parse { .. } => CliError::File(e.to_string()),
                other => CliError::File(format!("{}: {other}", path.display())),
            })?;
            return Ok((CrossSectionSpec::hyperbolic(spec), format!("hyperbolic:{}", path.display())));
        }
        if let Some(l) = self.torus {
            let cs = CrossSectionSpec::torus(l).map_err(|e| CliError::Usage(e.to_string()))?;
            return Ok((cs, format!("torus:{},{},{}", l[0], l[1], l[2])));
        }
        match self.lens {
            Some(g) => {
                let (q1, q2) = g.q();
                Ok((CrossSectionSpec::lens(g), format!("lens:{},{},{}", g.p(), q1, q2)))
            }
            None => Ok((CrossSectionSpec::sphere(), "sphere".to_string())),
        }
    }
}

fn parse_length(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let v = match t.strip_suffix("pi") {
        Some(head) => {
            let head = head.trim_end_matches('*');
            let c = if head.is_empty() { 1.0 } else { head.parse::<f64>().map_err(|_| format!("bad length {s:?}"))? };
            c * std::f64::consts::PI
        }
        None => t.parse::<f64>().map_err(|_| format!("bad length {s:?}"))?,
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("length must be positive and finite, got {s:?}"))
    }
}

pub fn parse_lattice(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected three lengths L1,L2,L3".into());
    }
    Ok([parse_length(parts[0])?, parse_length(parts[1])?, parse_length(parts[2])?])
}

fn parse_lens(s: &str) -> Result<GroupAction, String> {
    let v: Vec<u32> = s
        .split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| format!("bad integer {x:?}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [p, q1, q2] => GroupAction::new(p, q1, q2).map_err(|e| e.to_string()),
        _ => Err("expected p,q1,q2".into()),
    }
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number {x:?}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [a, b] if a <= b && !a.is_nan() && !b.is_nan() => Ok((a, b)),
        [_, _] => Err("window needs a <= b".into()),
        _ => Err("expected a,b".into()),
    }
}
