//! Log-log rate estimation: ordinary least squares on (log x, log ȳ(x)),
//! where ȳ averages the metric over replicates at each grid value before
//! the log transform (the rate statements bound expected loss).

use std::collections::BTreeMap;

use crate::error::{CliError, Result};
use crate::record::ResultRecord;

#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
}

fn x_value(r: &ResultRecord, field: &str) -> Result<f64> {
    match field {
        "n" => Ok(r.n as f64),
        "k" => Ok(r.k as f64),
        "beta" => Ok(r.beta),
        "omega_fraction" => Ok(r.omega_fraction),
        other => Err(CliError::Config(format!("unknown x field `{other}`"))),
    }
}

fn y_value(r: &ResultRecord, field: &str) -> Result<f64> {
    match field {
        "mse" => Ok(r.mse),
        "op_norm_sq" => Ok(r.op_norm_sq),
        "objective" => Ok(r.objective),
        other => Err(CliError::Config(format!("unknown y field `{other}`"))),
    }
}

pub fn rate_fit(records: &[ResultRecord], x_field: &str, y_field: &str) -> Result<RateFit> {
    let mut groups: BTreeMap<u64, (f64, Vec<f64>)> = BTreeMap::new();
    for (idx, r) in records.iter().enumerate() {
        let x = x_value(r, x_field)?;
        let y = y_value(r, y_field)?;
        if !(y > 0.0) || !y.is_finite() {
            return Err(CliError::Numerical(format!(
                "record {idx} (seed {}) has nonpositive {y_field} = {y}; cannot take logs",
                r.seed
            )));
        }
        groups.entry(x.to_bits()).or_insert_with(|| (x, Vec::new())).1.push(y);
    }
    if groups.len() < 2 {
        return Err(CliError::Config(format!(
            "rate fit needs at least 2 distinct {x_field} values, found {}",
            groups.len()
        )));
    }

    let points: Vec<(f64, f64)> = groups
        .values()
        .map(|(x, ys)| (x.ln(), (ys.iter().sum::<f64>() / ys.len() as f64).ln()))
        .collect();
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if points.len() > 2 {
        let rss: f64 = points
            .iter()
            .map(|p| {
                let r = p.1 - (intercept + slope * p.0);
                r * r
            })
            .sum();
        (rss / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(RateFit { slope, intercept, stderr })
}
