//! Wire formats.
//!
//! Matrices travel as dense CSV (one row per line, 17 significant digits)
//! or as the compact binary form: magic bytes "GRL1", little-endian u32 n,
//! then n² row-major little-endian f64 entries. Adjacency matrices also
//! serialize as a whitespace-separated edge list with 1-based indices,
//! one "i j" per line. Observation multisets are "i j multiplicity"
//! lines, 1-based. Fit results serialize as self-describing JSON.

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::completion::ObservationSet;
use crate::error::{Error, Result};
use crate::estim::{FitMethod, FitResult};
use crate::matrix::MatrixView;
use crate::model::{theta_from_blocks, Adjacency, Assignment, BlockMatrix, ProbMatrix};

pub const BINARY_MAGIC: &[u8; 4] = b"GRL1";

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

// ---------------------------------------------------------------------------
// Dense CSV
// ---------------------------------------------------------------------------

pub fn write_matrix_csv<W: Write>(m: &impl MatrixView, mut w: W) -> Result<()> {
    let n = m.size();
    let mut line = String::new();
    for i in 0..n {
        line.clear();
        for j in 0..n {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&fmt_float(m.entry(i, j)));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Raw rows of a dense CSV matrix; emptiness and squareness are left to
/// the typed constructors.
pub fn read_matrix_rows_csv<R: BufRead>(r: R) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad float `{tok}`", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_prob_matrix_csv<R: BufRead>(r: R) -> Result<ProbMatrix> {
    ProbMatrix::from_rows(read_matrix_rows_csv(r)?)
}

pub fn read_adjacency_csv<R: BufRead>(r: R) -> Result<Adjacency> {
    Adjacency::from_rows(read_matrix_rows_csv(r)?)
}

// ---------------------------------------------------------------------------
// GRL1 binary
// ---------------------------------------------------------------------------

pub fn write_matrix_binary<W: Write>(m: &impl MatrixView, mut w: W) -> Result<()> {
    let n = m.size();
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&(n as u32).to_le_bytes())?;
    for i in 0..n {
        for j in 0..n {
            w.write_all(&m.entry(i, j).to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_matrix_rows_binary<R: Read>(mut r: R) -> Result<Vec<Vec<f64>>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(Error::Parse(format!(
            "bad magic bytes {magic:?}, expected {BINARY_MAGIC:?}"
        )));
    }
    let mut nbuf = [0u8; 4];
    r.read_exact(&mut nbuf)?;
    let n = u32::from_le_bytes(nbuf) as usize;
    let mut rows = Vec::with_capacity(n);
    let mut buf = [0u8; 8];
    for _ in 0..n {
        let mut row = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut buf)?;
            row.push(f64::from_le_bytes(buf));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_prob_matrix_binary<R: Read>(r: R) -> Result<ProbMatrix> {
    ProbMatrix::from_rows(read_matrix_rows_binary(r)?)
}

pub fn read_adjacency_binary<R: Read>(r: R) -> Result<Adjacency> {
    Adjacency::from_rows(read_matrix_rows_binary(r)?)
}

// ---------------------------------------------------------------------------
// Edge lists (1-based) and observation multisets
// ---------------------------------------------------------------------------

pub fn write_edge_list<W: Write>(a: &Adjacency, mut w: W) -> Result<()> {
    for (i, j) in a.edges() {
        writeln!(w, "{} {}", i + 1, j + 1)?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(r: R, n: usize) -> Result<Adjacency> {
    let mut edges = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        let (i, j) = match (it.next(), it.next(), it.next()) {
            (Some(i), Some(j), None) => (parse_index(i, lineno)?, parse_index(j, lineno)?),
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: expected `i j`, got `{trimmed}`",
                    lineno + 1
                )))
            }
        };
        edges.push((i, j));
    }
    Adjacency::from_edges(n, &edges)
}

fn parse_index(tok: &str, lineno: usize) -> Result<usize> {
    let v: usize = tok
        .parse()
        .map_err(|_| Error::Parse(format!("line {}: bad index `{tok}`", lineno + 1)))?;
    if v == 0 {
        return Err(Error::Parse(format!(
            "line {}: indices are 1-based, found 0",
            lineno + 1
        )));
    }
    Ok(v - 1)
}

/// "i j multiplicity" lines, 1-based, sorted by pair.
pub fn write_observations<W: Write>(omega: &ObservationSet, mut w: W) -> Result<()> {
    for ((i, j), mult) in omega.multiplicities() {
        writeln!(w, "{} {} {}", i + 1, j + 1, mult)?;
    }
    Ok(())
}

pub fn read_observations<R: BufRead>(r: R) -> Result<ObservationSet> {
    let mut pairs = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::Parse(format!(
                "line {}: expected `i j multiplicity`, got `{trimmed}`",
                lineno + 1
            )));
        }
        let i = parse_index(toks[0], lineno)?;
        let j = parse_index(toks[1], lineno)?;
        let mult: usize = toks[2]
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad multiplicity `{}`", lineno + 1, toks[2])))?;
        for _ in 0..mult {
            pairs.push((i, j));
        }
    }
    ObservationSet::new(pairs)
}

// ---------------------------------------------------------------------------
// Fit results
// ---------------------------------------------------------------------------

/// Self-describing fit document; labels are 0-based cluster indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResultDoc {
    pub method: String,
    pub n: usize,
    pub k: usize,
    pub objective: f64,
    pub labels: Vec<usize>,
    pub q: Vec<Vec<f64>>,
    pub iterations: usize,
    pub restarts_used: usize,
    pub unused_blocks: usize,
    pub spectral_fallback: bool,
}

impl From<&FitResult> for FitResultDoc {
    fn from(fit: &FitResult) -> Self {
        FitResultDoc {
            method: fit.method.to_string(),
            n: fit.z_hat.n(),
            k: fit.z_hat.k(),
            objective: fit.objective,
            labels: fit.z_hat.labels().to_vec(),
            q: fit.q_hat.to_rows(),
            iterations: fit.iterations,
            restarts_used: fit.restarts_used,
            unused_blocks: fit.diagnostics.unused_blocks,
            spectral_fallback: fit.diagnostics.spectral_fallback,
        }
    }
}

impl FitResultDoc {
    pub fn method(&self) -> Result<FitMethod> {
        FitMethod::parse(&self.method)
    }

    pub fn assignment(&self) -> Result<Assignment> {
        Assignment::new(self.labels.clone(), self.k)
    }

    /// Reassemble θ̂ from the stored Q and labels.
    pub fn theta(&self) -> Result<ProbMatrix> {
        let q = BlockMatrix::symmetric_from_rows(self.q.clone())?;
        let z = self.assignment()?;
        Ok(theta_from_blocks(&q, &z))
    }
}

pub fn write_fit_result_json<W: Write>(fit: &FitResult, mut w: W) -> Result<()> {
    let doc = FitResultDoc::from(fit);
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Parse(format!("fit result serialization failed: {e}")))?;
    w.write_all(text.as_bytes())?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read_fit_result_json<R: Read>(mut r: R) -> Result<FitResultDoc> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad fit result JSON: {e}")))
}
