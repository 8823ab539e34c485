//! The sweep output schema: one CSV row per (grid point, replicate).
//! Floats are printed with 17 significant digits; failed replicates carry
//! NaN metrics and are never dropped. The wall-time column is excluded
//! from determinism comparisons.

use std::io::{BufRead, Write};

use crate::error::{CliError, Result};

pub const CSV_HEADER: &str =
    "scenario,n,k,graphon,beta,omega_fraction,replicate,seed,mse,op_norm_sq,objective,wall_time_s";

/// Zero-based position of the wall-time column.
pub const WALL_TIME_COLUMN: usize = 11;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub scenario: String,
    pub n: usize,
    pub k: usize,
    pub graphon: String,
    pub beta: f64,
    pub omega_fraction: f64,
    pub replicate: usize,
    pub seed: u64,
    pub mse: f64,
    pub op_norm_sq: f64,
    pub objective: f64,
    pub wall_time_s: f64,
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl ResultRecord {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.scenario,
            self.n,
            self.k,
            self.graphon,
            fmt_float(self.beta),
            fmt_float(self.omega_fraction),
            self.replicate,
            self.seed,
            fmt_float(self.mse),
            fmt_float(self.op_norm_sq),
            fmt_float(self.objective),
            fmt_float(self.wall_time_s),
        )
    }

    pub fn from_csv_line(line: &str, lineno: usize) -> Result<Self> {
        let tok: Vec<&str> = line.split(',').collect();
        if tok.len() != 12 {
            return Err(CliError::Config(format!(
                "line {}: expected 12 columns, found {}",
                lineno + 1,
                tok.len()
            )));
        }
        let err = |what: &str| CliError::Config(format!("line {}: bad {what}", lineno + 1));
        Ok(ResultRecord {
            scenario: tok[0].to_string(),
            n: tok[1].parse().map_err(|_| err("n"))?,
            k: tok[2].parse().map_err(|_| err("k"))?,
            graphon: tok[3].to_string(),
            beta: tok[4].parse().map_err(|_| err("beta"))?,
            omega_fraction: tok[5].parse().map_err(|_| err("omega_fraction"))?,
            replicate: tok[6].parse().map_err(|_| err("replicate"))?,
            seed: tok[7].parse().map_err(|_| err("seed"))?,
            mse: tok[8].parse().map_err(|_| err("mse"))?,
            op_norm_sq: tok[9].parse().map_err(|_| err("op_norm_sq"))?,
            objective: tok[10].parse().map_err(|_| err("objective"))?,
            wall_time_s: tok[11].parse().map_err(|_| err("wall_time_s"))?,
        })
    }
}

pub fn write_csv<W: Write>(records: &[ResultRecord], mut w: W) -> Result<()> {
    let io = |e| CliError::io("writing records", e);
    writeln!(w, "{CSV_HEADER}").map_err(io)?;
    for r in records {
        writeln!(w, "{}", r.to_csv_line()).map_err(io)?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(r: R) -> Result<Vec<ResultRecord>> {
    let mut records = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line.map_err(|e| CliError::io("reading records", e))?;
        if lineno == 0 {
            if line.trim() != CSV_HEADER {
                return Err(CliError::Config(format!(
                    "unexpected CSV header `{}`",
                    line.trim()
                )));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        records.push(ResultRecord::from_csv_line(&line, lineno)?);
    }
    Ok(records)
}

/// Strip the wall-time column, for byte-level determinism comparisons.
pub fn strip_wall_time(csv_text: &str) -> String {
    csv_text
        .lines()
        .map(|line| {
            let mut cols: Vec<&str> = line.split(',').collect();
            if cols.len() == 12 {
                cols.remove(WALL_TIME_COLUMN);
            }
            cols.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultRecord {
        ResultRecord {
            scenario: "opnorm".into(),
            n: 64,
            k: 2,
            graphon: "constant:0.5".into(),
            beta: 1.0,
            omega_fraction: 1.0,
            replicate: 3,
            seed: 42,
            mse: 0.25,
            op_norm_sq: 61.2,
            objective: f64::NAN,
            wall_time_s: 0.125,
        }
    }

    #[test]
    fn csv_round_trip_with_nan() {
        let records = vec![sample()];
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        let back = read_csv(text.as_bytes()).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].seed, 42);
        assert!(back[0].objective.is_nan());
        assert_eq!(back[0].mse, 0.25);
    }

    #[test]
    fn wall_time_stripping() {
        let records = vec![sample()];
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let stripped = strip_wall_time(&text);
        assert!(!stripped.contains("wall_time_s"));
        assert_eq!(stripped.lines().count(), 2);
        assert_eq!(stripped.lines().next().unwrap().split(',').count(), 11);
    }
}
