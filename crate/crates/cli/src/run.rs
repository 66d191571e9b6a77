//! Executes a [`RunConfig`] and writes CSV rows.

use std::io::Write;
use std::time::Instant;

use nf3::examples::{default_grid_points, example_problem, scalar_problem, scalar_solution};
use nf3::norms::error_l2;
use nf3::{integrate, Error, Method};
use rayon::prelude::*;

use crate::config::{ProblemId, RunConfig};

pub const HEADER: [&str; 8] = ["problem", "method", "omega", "h", "M", "t_final", "l2_error", "wall_seconds"];

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub problem: String,
    pub method: Method,
    pub omega: f64,
    pub h: f64,
    pub grid_points: usize,
    pub t_final: f64,
    pub l2_error: f64,
    pub wall_seconds: f64,
}

/// 17 significant digits, locale free.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl CsvRow {
    fn record(&self) -> [String; 8] {
        [
            self.problem.clone(),
            self.method.to_string(),
            num(self.omega),
            num(self.h),
            self.grid_points.to_string(),
            num(self.t_final),
            num(self.l2_error),
            num(self.wall_seconds),
        ]
    }
}

fn run_one(cfg: &RunConfig, omega: f64, h: f64, method: Method) -> Result<CsvRow, Error> {
    let (prob, exact, m) = match cfg.problem {
        ProblemId::Example(id) => {
            let m = cfg.grid_points.unwrap_or_else(|| default_grid_points(id));
            let (p, e) = example_problem(id, omega, m)?;
            (p, e, m)
        }
        ProblemId::Scalar { a, epsilon } => (scalar_problem(a, epsilon, omega, 1.0)?, scalar_solution(a, epsilon, omega), 1),
    };
    let prob = prob.with_horizon(cfg.t_final)?;
    let start = Instant::now();
    let tr = integrate(&prob, h, method)?;
    let wall_seconds = start.elapsed().as_secs_f64();
    let l2_error = error_l2(tr.final_state(), &exact, tr.final_time())?;
    Ok(CsvRow {
        problem: cfg.problem.label(),
        method,
        omega,
        h,
        grid_points: m,
        t_final: cfg.t_final,
        l2_error,
        wall_seconds,
    })
}

/// All runs of the configuration, in the order `omega`, then `h`, then method.
pub fn execute(cfg: &RunConfig) -> Result<Vec<CsvRow>, Error> {
    let tasks: Vec<(usize, f64, f64, Method)> = cfg
        .omegas
        .iter()
        .flat_map(|&w| cfg.hs.iter().flat_map(move |&h| cfg.methods.iter().map(move |&m| (w, h, m))))
        .enumerate()
        .map(|(i, (w, h, m))| (i, w, h, m))
        .collect();
    let work = || {
        tasks
            .par_iter()
            .map(|&(i, w, h, m)| run_one(cfg, w, h, m).map(|r| (i, r)))
            .collect::<Result<Vec<_>, _>>()
    };
    let mut rows = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    rows.sort_by_key(|(i, _)| *i);
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

pub fn write_csv<W: Write>(out: W, rows: &[CsvRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}
