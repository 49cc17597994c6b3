use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use super::{derive_seed, EfficiencyEstimator, EfficiencyProblem, QuadratureConfig};
use crate::error::{Error, Result};
use crate::qkd::{accept_interval, Attack, SymmetricStdState};

pub const CSV_HEADER: &str = "lambda,c_x,c_p,log_negativity,purity,param,efficiency,attack";
pub const SKIPPED_HEADER: &str = "lambda,c_x,c_p,reason";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub lambda: f64,
    pub c_x: f64,
    pub c_p: f64,
    pub log_negativity: f64,
    pub purity: f64,
    /// `alpha` for individual attacks, `beta` for coherent ones.
    pub param: f64,
    pub efficiency: f64,
    pub attack: Attack,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPoint {
    pub lambda: f64,
    pub c_x: f64,
    pub c_p: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub skipped: Vec<SkippedPoint>,
}

enum PointResult {
    Kept(SweepRecord),
    Skipped(SkippedPoint),
}

fn evaluate(
    index: usize,
    (lambda, c_x, c_p): (f64, f64, f64),
    attack: Attack,
    config: &QuadratureConfig,
    estimator: &dyn EfficiencyEstimator,
) -> Result<PointResult> {
    let skip = |reason: String| {
        Ok(PointResult::Skipped(SkippedPoint {
            lambda,
            c_x,
            c_p,
            reason,
        }))
    };
    let state = match SymmetricStdState::new(lambda, c_x, c_p) {
        Ok(s) => s,
        Err(e) => return skip(e.to_string()),
    };
    let interval = match accept_interval(&state, attack) {
        Ok(iv) => iv,
        Err(e @ (Error::NotNppt(_) | Error::NotCoherentSecure(_))) => return skip(e.to_string()),
        Err(e) => return Err(e),
    };
    let problem = EfficiencyProblem::secure(&state, attack)?;
    let est = estimator.estimate(&problem, config, derive_seed(config.rng_seed, index as u64))?;
    Ok(PointResult::Kept(SweepRecord {
        lambda,
        c_x,
        c_p,
        log_negativity: state.log_negativity(),
        purity: state.purity(),
        param: interval.param,
        efficiency: est.value,
        attack,
    }))
}

/// Evaluates every grid point in parallel on the current rayon pool.
/// Output order follows the grid regardless of scheduling.
pub fn sweep(
    grid: &[(f64, f64, f64)],
    attack: Attack,
    config: &QuadratureConfig,
    estimator: &dyn EfficiencyEstimator,
) -> Result<SweepOutput> {
    let results: Vec<Result<PointResult>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &p)| evaluate(i, p, attack, config, estimator))
        .collect();
    let mut out = SweepOutput::default();
    for r in results {
        match r? {
            PointResult::Kept(rec) => out.records.push(rec),
            PointResult::Skipped(s) => out.skipped.push(s),
        }
    }
    if out.records.is_empty() {
        return Err(Error::EmptySweep {
            skipped: out.skipped.len(),
        });
    }
    Ok(out)
}

/// [`sweep`] on a dedicated pool of `threads` workers (all cores if `None`).
pub fn sweep_with_threads(
    grid: &[(f64, f64, f64)],
    attack: Attack,
    config: &QuadratureConfig,
    estimator: &dyn EfficiencyEstimator,
    threads: Option<usize>,
) -> Result<SweepOutput> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    pool.install(|| sweep(grid, attack, config, estimator))
}

/// Rectangular grid: `lambda` in `1.1..=3.0` by 0.1, `c_x` in `(0, lambda)`
/// and `c_p` in `[-c_x, c_x]`, both by 0.05. Most points are unphysical or
/// PPT and end up in the skipped list.
pub fn default_grid() -> Vec<(f64, f64, f64)> {
    let mut grid = Vec::new();
    for li in 11..=30 {
        let lambda = li as f64 / 10.0;
        let mut xi = 1;
        while (xi as f64) / 20.0 < lambda {
            let c_x = xi as f64 / 20.0;
            for pi in -xi..=xi {
                grid.push((lambda, c_x, pi as f64 / 20.0));
            }
            xi += 1;
        }
    }
    grid
}

/// Parses `lambda,c_x,c_p` rows. Blank lines, `#` comments and a
/// non-numeric header line are ignored.
pub fn parse_grid_csv(text: &str) -> Result<Vec<(f64, f64, f64)>> {
    let mut grid = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Vec<std::result::Result<f64, _>> = fields.iter().map(|f| f.parse::<f64>()).collect();
        if grid.is_empty() && lineno == first_data_line(text) && parsed.iter().all(|p| p.is_err()) {
            continue;
        }
        if fields.len() != 3 {
            return Err(Error::Parse(format!(
                "grid line {}: expected 3 fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let mut vals = [0.0; 3];
        for (k, p) in parsed.into_iter().enumerate() {
            vals[k] = p.map_err(|_| {
                Error::Parse(format!("grid line {}: `{}` is not a number", lineno + 1, fields[k]))
            })?;
            if !vals[k].is_finite() {
                return Err(Error::Parse(format!("grid line {}: non-finite value", lineno + 1)));
            }
        }
        grid.push((vals[0], vals[1], vals[2]));
    }
    if grid.is_empty() {
        return Err(Error::Parse("grid contains no points".into()));
    }
    Ok(grid)
}

fn first_data_line(text: &str) -> usize {
    text.lines()
        .position(|l| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .unwrap_or(0)
}

/// Shortest rendering with `sig` significant digits, trailing zeros removed.
pub fn format_sig(v: f64, sig: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{:.*e}", sig - 1, v);
        let (mant, e) = s.split_once('e').expect("exponent form");
        let mant = if mant.contains('.') {
            mant.trim_end_matches('0').trim_end_matches('.')
        } else {
            mant
        };
        format!("{mant}e{e}")
    }
}

pub fn write_records_csv<W: Write>(mut w: W, records: &[SweepRecord]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            format_sig(r.lambda, 12),
            format_sig(r.c_x, 12),
            format_sig(r.c_p, 12),
            format_sig(r.log_negativity, 12),
            format_sig(r.purity, 12),
            format_sig(r.param, 12),
            format_sig(r.efficiency, 12),
            r.attack
        )?;
    }
    Ok(())
}

pub fn write_skipped_csv<W: Write>(mut w: W, skipped: &[SkippedPoint]) -> io::Result<()> {
    writeln!(w, "{SKIPPED_HEADER}")?;
    for s in skipped {
        let reason = s.reason.replace('"', "'");
        writeln!(
            w,
            "{},{},{},\"{}\"",
            format_sig(s.lambda, 12),
            format_sig(s.c_x, 12),
            format_sig(s.c_p, 12),
            reason
        )?;
    }
    Ok(())
}
