//! Command-line flags and their validation.

use clap::{Args, Parser, Subcommand};
use nf3::Method;

#[derive(Debug, Parser)]
#[command(name = "nf3", version, about = "Convergence studies for Neumann-Filon integrators; writes CSV")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One run per method at a single ω and h.
    Solve(CommonArgs),
    /// Error against step size at fixed ω.
    SweepH(CommonArgs),
    /// Error against ω at fixed step size.
    SweepOmega(CommonArgs),
    /// Several methods on the same ω and h.
    Compare(CommonArgs),
}

#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// Example id 1 to 4, or `scalar`.
    #[arg(long)]
    pub problem: String,
    #[arg(long)]
    pub omega: Option<f64>,
    /// Comma list or `start:stop:factor` geometric range.
    #[arg(long)]
    pub omega_list: Option<String>,
    #[arg(long)]
    pub h: Option<f64>,
    /// Comma list or `start:stop:factor` geometric range.
    #[arg(long)]
    pub h_list: Option<String>,
    /// Comma list of nf3, nf3-resonance, m2, m4.
    #[arg(long)]
    pub method: Option<String>,
    /// Points per dimension (defaults: 100, or 20 for example 2).
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub t_final: f64,
    /// Output file, `-` for standard output.
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Parallel runs (defaults to the number of cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Linear coefficient `a` of the scalar problem.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub a: f64,
    /// Amplitude `ε` of the scalar problem.
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemId {
    Example(u8),
    Scalar { a: f64, epsilon: f64 },
}

impl ProblemId {
    pub fn label(&self) -> String {
        match self {
            ProblemId::Example(id) => id.to_string(),
            ProblemId::Scalar { .. } => "scalar".into(),
        }
    }
}

/// Validated run description: the cartesian product `omegas × hs × methods`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemId,
    pub omegas: Vec<f64>,
    pub hs: Vec<f64>,
    pub methods: Vec<Method>,
    pub grid_points: Option<usize>,
    pub t_final: f64,
    pub out: String,
    pub jobs: Option<usize>,
}

/// Expands `a,b,c` or `start:stop:factor`.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range '{s}' must be start:stop:factor"));
        }
        let v: Vec<f64> = parts.iter().map(|p| parse_num(p)).collect::<Result<_, _>>()?;
        let (start, stop, factor) = (v[0], v[1], v[2]);
        if !(start > 0.0 && stop > 0.0 && factor > 1.0) {
            return Err(format!("range '{s}' needs positive ends and a factor above 1"));
        }
        let step = if stop >= start { factor } else { 1.0 / factor };
        let (lo, hi) = (start.min(stop), start.max(stop));
        let mut out = Vec::new();
        let mut x = start;
        while x >= lo * (1.0 - 1e-12) && x <= hi * (1.0 + 1e-12) {
            out.push(x);
            x *= step;
            if out.len() > 10_000 {
                return Err(format!("range '{s}' is too long"));
            }
        }
        Ok(out)
    } else {
        let out: Vec<f64> = s.split(',').map(parse_num).collect::<Result<_, _>>()?;
        if out.is_empty() {
            return Err("empty list".into());
        }
        Ok(out)
    }
}

fn parse_num(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("'{s}' is not a number"))
}

fn single_or_list(single: Option<f64>, list: Option<&str>, name: &str) -> Result<Vec<f64>, String> {
    match (single, list) {
        (Some(_), Some(_)) => Err(format!("give either --{name} or --{name}-list, not both")),
        (Some(x), None) => Ok(vec![x]),
        (None, Some(l)) => parse_list(l),
        (None, None) => Err(format!("missing --{name} or --{name}-list")),
    }
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, String> {
        let (args, default_methods): (&CommonArgs, &[Method]) = match &cli.command {
            Command::Solve(a) | Command::SweepH(a) | Command::SweepOmega(a) => (a, &[Method::Nf3]),
            Command::Compare(a) => (a, &[Method::Nf3, Method::M2, Method::M4]),
        };
        let problem = match args.problem.as_str() {
            "scalar" => ProblemId::Scalar { a: args.a, epsilon: args.epsilon },
            s => match s.parse::<u8>() {
                Ok(id @ 1..=4) => ProblemId::Example(id),
                _ => return Err(format!("unknown problem '{s}' (expected 1, 2, 3, 4 or scalar)")),
            },
        };
        let omegas = single_or_list(args.omega, args.omega_list.as_deref(), "omega")?;
        let hs = single_or_list(args.h, args.h_list.as_deref(), "h")?;
        match &cli.command {
            Command::Solve(_) | Command::Compare(_) if omegas.len() != 1 || hs.len() != 1 => {
                return Err("solve and compare take a single --omega and --h".into());
            }
            Command::SweepH(_) if omegas.len() != 1 => return Err("sweep-h takes a single --omega".into()),
            Command::SweepOmega(_) if hs.len() != 1 => return Err("sweep-omega takes a single --h".into()),
            _ => {}
        }
        if omegas.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err("ω must be positive".into());
        }
        if hs.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err("h must be positive".into());
        }
        if !(args.t_final > 0.0) || !args.t_final.is_finite() {
            return Err("--t-final must be positive".into());
        }
        let methods = match &args.method {
            Some(m) => m
                .split(',')
                .map(|s| s.trim().parse::<Method>().map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?,
            None => default_methods.to_vec(),
        };
        if methods.contains(&Method::Nf3Resonance) && problem != ProblemId::Example(4) {
            return Err("nf3-resonance needs a symmetric potential (example 4)".into());
        }
        if let Some(m) = args.grid_points {
            if m < 4 {
                return Err("--grid-points must be at least 4".into());
            }
        }
        if args.jobs == Some(0) {
            return Err("--jobs must be at least 1".into());
        }
        Ok(Self {
            problem,
            omegas,
            hs,
            methods,
            grid_points: args.grid_points,
            t_final: args.t_final,
            out: args.out.clone(),
            jobs: args.jobs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_range_descending() {
        assert_eq!(parse_list("0.25:0.015625:2").unwrap(), vec![0.25, 0.125, 0.0625, 0.03125, 0.015625]);
    }

    #[test]
    fn geometric_range_ascending() {
        assert_eq!(parse_list("50:800:2").unwrap(), vec![50.0, 100.0, 200.0, 400.0, 800.0]);
    }

    #[test]
    fn comma_list_and_errors() {
        assert_eq!(parse_list("1, 2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_list("1:2").is_err());
        assert!(parse_list("1:2:1").is_err());
        assert!(parse_list("x").is_err());
    }

    #[test]
    fn method_list() {
        let cli = Cli::parse_from(["nf3", "compare", "--problem", "1", "--omega", "5", "--h", "0.5", "--method", "nf3,m4"]);
        let cfg = RunConfig::from_cli(&cli).unwrap();
        assert_eq!(cfg.methods, vec![Method::Nf3, Method::M4]);
    }

    #[test]
    fn resonance_requires_example_four() {
        let cli = Cli::parse_from(["nf3", "solve", "--problem", "1", "--omega", "5", "--h", "0.5", "--method", "nf3-resonance"]);
        assert!(RunConfig::from_cli(&cli).is_err());
    }
}
