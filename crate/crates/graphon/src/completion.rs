//! Link prediction / network completion from a partially observed graph.
//!
//! Observations are a multiset Ω of ordered off-diagonal pairs, sampled
//! uniformly with replacement. The fitted program is the constrained
//! least squares
//!
//!   min ‖θ‖² − (2n²/|Ω|) Σ_{(i,j)∈Ω} A_ij θ_ij,  θ block-structured with
//!   entries in [0,1],
//!
//! solved by alternating a blockwise closed-form Q step with node-wise
//! reassignment. When Ω covers every ordered pair exactly once the
//! objective equals ‖θ − cA‖² − c²‖A‖² with c = n²/|Ω|, so the program
//! reduces to the full-observation least squares up to that scaling.

use crate::error::{Error, Result};
use crate::estim::{spectral_init, FitDiagnostics, FitMethod, FitOptions, FitResult, InitStrategy};
use crate::model::{theta_from_blocks, Adjacency, Assignment, BlockMatrix, ProbMatrix};
use crate::rng::{derive_seed, seeded_rng, uniform_below};
use std::collections::BTreeMap;

/// The observation multiset Ω: ordered off-diagonal pairs, repeats allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationSet {
    pairs: Vec<(usize, usize)>,
}

impl ObservationSet {
    /// Build from ordered pairs; diagonal pairs are rejected. An empty set
    /// is representable but rejected by the fitting routines.
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(i, _)) = pairs.iter().find(|&&(i, j)| i == j) {
            return Err(Error::Domain(format!("diagonal pair ({i},{i}) not allowed in Ω")));
        }
        Ok(ObservationSet { pairs })
    }

    /// Every ordered off-diagonal pair exactly once.
    pub fn full(n: usize) -> Self {
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(1));
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    pairs.push((i, j));
                }
            }
        }
        ObservationSet { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Collapse the multiset to (pair, multiplicity) in sorted order.
    pub fn multiplicities(&self) -> BTreeMap<(usize, usize), usize> {
        let mut map = BTreeMap::new();
        for &p in &self.pairs {
            *map.entry(p).or_insert(0) += 1;
        }
        map
    }

    pub fn max_index(&self) -> Option<usize> {
        self.pairs.iter().map(|&(i, j)| i.max(j)).max()
    }
}

/// Draw `m_count` pairs uniformly with replacement from the n(n−1) ordered
/// off-diagonal pairs.
pub fn sample_omega(n: usize, m_count: usize, seed: u64) -> ObservationSet {
    assert!(n >= 2, "sample_omega needs n >= 2");
    let mut rng = seeded_rng(seed);
    let pair_count = n * (n - 1);
    let pairs = (0..m_count)
        .map(|_| {
            let idx = uniform_below(&mut rng, pair_count);
            let i = idx / (n - 1);
            let r = idx % (n - 1);
            let j = if r >= i { r + 1 } else { r };
            (i, j)
        })
        .collect();
    ObservationSet { pairs }
}

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

fn theta_norm_sq(q: &BlockMatrix, z: &Assignment) -> f64 {
    let k = z.k();
    let sizes = z.cluster_sizes();
    let mut total = 0.0;
    for a in 0..k {
        for b in 0..k {
            let pairs = if a == b {
                sizes[a] * sizes[a].saturating_sub(1)
            } else {
                sizes[a] * sizes[b]
            };
            total += pairs as f64 * q.get(a, b) * q.get(a, b);
        }
    }
    total
}

fn objective_from_values(
    values: &[bool],
    omega: &ObservationSet,
    q: &BlockMatrix,
    z: &Assignment,
) -> f64 {
    let n = z.n() as f64;
    let mut dot = 0.0;
    for (&(i, j), &v) in omega.pairs().iter().zip(values) {
        if v {
            dot += q.get(z.label(i), z.label(j));
        }
    }
    theta_norm_sq(q, z) - (2.0 * n * n / omega.len() as f64) * dot
}

/// ‖θ‖² − (2n²/|Ω|) Σ_Ω A_ij θ_ij with θ = Q looked up through z; the sum
/// runs over the multiset, multiplicities included.
pub fn completion_objective(
    a: &Adjacency,
    omega: &ObservationSet,
    q: &BlockMatrix,
    z: &Assignment,
) -> Result<f64> {
    if omega.is_empty() {
        return Err(Error::EmptyObservations);
    }
    assert_eq!(a.n(), z.n());
    assert!(q.rows() == z.k() && q.cols() == z.k());
    if let Some(max) = omega.max_index() {
        if max >= a.n() {
            return Err(Error::Dimension(format!("Ω index {max} outside 0..{}", a.n())));
        }
    }
    let values: Vec<bool> = omega.pairs().iter().map(|&(i, j)| a.get(i, j) == 1).collect();
    Ok(objective_from_values(&values, omega, q, z))
}

// ---------------------------------------------------------------------------
// Closed-form Q step
// ---------------------------------------------------------------------------

/// Minimizer of the completion objective for fixed z, subject to Q ∈ [0,1]
/// symmetric: per unordered block, clamp(n² S / (|Ω| N)) where S sums the
/// observed values landing in the block (both directions, multiplicities
/// included) and N counts its ordered off-diagonal index pairs. Blocks with
/// N = 0 fall back to 0.
fn q_step(values: &[bool], omega: &ObservationSet, z: &Assignment) -> BlockMatrix {
    let k = z.k();
    let n = z.n() as f64;
    let sizes = z.cluster_sizes();
    let mut s = vec![0.0f64; k * k];
    for (&(i, j), &v) in omega.pairs().iter().zip(values) {
        if v {
            s[z.label(i) * k + z.label(j)] += 1.0;
        }
    }
    let scale = n * n / omega.len() as f64;
    let mut q = BlockMatrix::zeros_symmetric(k);
    for a in 0..k {
        for b in a..k {
            let (pooled_s, pooled_n) = if a == b {
                (s[a * k + a], sizes[a] * sizes[a].saturating_sub(1))
            } else {
                (s[a * k + b] + s[b * k + a], 2 * sizes[a] * sizes[b])
            };
            if pooled_n > 0 {
                let v = (scale * pooled_s / pooled_n as f64).clamp(0.0, 1.0);
                q.set(a, b, v);
            }
        }
    }
    q
}

/// The Q step evaluated against a fully stored adjacency matrix: values are
/// read off A on the pairs of Ω.
pub fn q_from_assignment_completion(
    a: &Adjacency,
    omega: &ObservationSet,
    z: &Assignment,
) -> Result<BlockMatrix> {
    if omega.is_empty() {
        return Err(Error::EmptyObservations);
    }
    assert_eq!(a.n(), z.n());
    if let Some(max) = omega.max_index() {
        if max >= a.n() {
            return Err(Error::Dimension(format!("Ω index {max} outside 0..{}", a.n())));
        }
    }
    let values: Vec<bool> = omega.pairs().iter().map(|&(i, j)| a.get(i, j) == 1).collect();
    Ok(q_step(&values, omega, z))
}

// ---------------------------------------------------------------------------
// Alternating fit
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CompletionOptions {
    pub fit: FitOptions,
    /// Refuse to fit when |Ω| / n² falls below this.
    pub coverage_floor: f64,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        CompletionOptions { fit: FitOptions::default(), coverage_floor: DEFAULT_COVERAGE_FLOOR }
    }
}

pub const DEFAULT_COVERAGE_FLOOR: f64 = 0.05;

/// Node sweep against fixed Q under the completion objective. `touch[i]`
/// lists, per neighbor, the total observed weight of Ω pairs joining i and
/// that neighbor (both directions, multiplicities included).
fn reassign_sweep(
    q: &BlockMatrix,
    z: &mut Assignment,
    touch: &[Vec<(usize, f64)>],
    omega_len: usize,
) {
    let n = z.n();
    let k = z.k();
    let scale = 2.0 * (n * n) as f64 / omega_len as f64;
    let mut members = vec![0.0f64; k];
    for i in 0..n {
        members.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..n {
            if j != i {
                members[z.label(j)] += 1.0;
            }
        }
        let mut best_c = 0usize;
        let mut best_cost = f64::INFINITY;
        for c in 0..k {
            // quadratic part: both ordered directions of every pair at i
            let mut cost = 0.0;
            for d in 0..k {
                let qcd = q.get(c, d);
                cost += 2.0 * members[d] * qcd * qcd;
            }
            for &(other, w) in &touch[i] {
                cost -= scale * w * q.get(c, z.label(other));
            }
            if cost < best_cost {
                best_cost = cost;
                best_c = c;
            }
        }
        z.set_label(i, best_c);
    }
}

fn random_assignment(n: usize, k: usize, seed: u64) -> Assignment {
    let mut rng = seeded_rng(seed);
    let labels: Vec<usize> = (0..n).map(|_| uniform_below(&mut rng, k)).collect();
    Assignment::new(labels, k).unwrap()
}

/// Graph of the pairs observed as edges (value 1), used for spectral
/// initialization when only partial observations exist.
fn observed_graph(values: &[bool], omega: &ObservationSet, n: usize) -> Adjacency {
    let edges: Vec<(usize, usize)> = omega
        .pairs()
        .iter()
        .zip(values)
        .filter(|&(_, &v)| v)
        .map(|(&(i, j), _)| (i, j))
        .collect();
    Adjacency::from_edges(n, &edges).expect("Ω pairs are off-diagonal and in range")
}

/// Fit the completion program to the observed values of A on Ω.
/// `observed[t]` is the value of A at `omega.pairs()[t]`.
pub fn fit_completion(
    observed: &[bool],
    n: usize,
    k: usize,
    omega: &ObservationSet,
    opts: &CompletionOptions,
    seed: u64,
) -> Result<FitResult> {
    opts.fit.validate();
    if omega.is_empty() {
        return Err(Error::EmptyObservations);
    }
    assert_eq!(observed.len(), omega.len(), "one observed value per Ω pair");
    assert!(k >= 1 && n >= k, "fit_completion needs n >= k >= 1");
    if let Some(max) = omega.max_index() {
        if max >= n {
            return Err(Error::Dimension(format!("Ω index {max} outside 0..{n}")));
        }
    }
    let coverage = omega.len() as f64 / (n * n) as f64;
    if coverage < opts.coverage_floor {
        return Err(Error::Domain(format!(
            "coverage |Ω|/n² = {coverage:.4} below the configured floor {}",
            opts.coverage_floor
        )));
    }

    let mut touch: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    {
        let mut weights: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (&(i, j), &v) in omega.pairs().iter().zip(observed) {
            if v {
                let key = (i.min(j), i.max(j));
                *weights.entry(key).or_insert(0.0) += 1.0;
            }
        }
        for (&(i, j), &w) in &weights {
            touch[i].push((j, w));
            touch[j].push((i, w));
        }
    }

    let mut best: Option<(Assignment, f64, Vec<f64>, usize, bool)> = None;
    let mut restarts_used = 0usize;
    for r in 0..opts.fit.restarts {
        restarts_used += 1;
        let rseed = derive_seed(seed, &[r as u64]);
        let (mut z, fell_back) = if r == 0 {
            match &opts.fit.init {
                InitStrategy::Spectral => {
                    let graph = observed_graph(observed, omega, n);
                    let s = spectral_init(&graph, k, rseed);
                    (s.assignment, s.used_fallback)
                }
                InitStrategy::Random => (random_assignment(n, k, rseed), false),
                InitStrategy::Given(z0) => {
                    assert_eq!(z0.n(), n, "given assignment length must match n");
                    assert_eq!(z0.k(), k, "given assignment k must match fit k");
                    (z0.clone(), false)
                }
            }
        } else {
            (random_assignment(n, k, rseed), false)
        };

        let mut q = q_step(observed, omega, &z);
        let mut obj = objective_from_values(observed, omega, &q, &z);
        let mut trace = vec![obj];
        let mut iterations = 0usize;
        for _ in 0..opts.fit.max_iterations {
            iterations += 1;
            reassign_sweep(&q, &mut z, &touch, omega.len());
            q = q_step(observed, omega, &z);
            let new_obj = objective_from_values(observed, omega, &q, &z);
            trace.push(new_obj);
            let decrease = obj - new_obj;
            obj = new_obj;
            if decrease < opts.fit.tolerance {
                break;
            }
        }
        let better = best.as_ref().map_or(true, |b| obj < b.1);
        if better {
            best = Some((z, obj, trace, iterations, fell_back));
        }
    }
    let (z, _, trace, iterations, fell_back) = best.unwrap();

    let (z_hat, _) = z.canonicalized();
    let q_hat = q_step(observed, omega, &z_hat);
    let objective = objective_from_values(observed, omega, &q_hat, &z_hat);
    let theta_hat = theta_from_blocks(&q_hat, &z_hat);
    let sizes = z_hat.cluster_sizes();
    let mut unused_blocks = 0usize;
    for a in 0..k {
        for b in a..k {
            let pairs =
                if a == b { sizes[a] * sizes[a].saturating_sub(1) } else { sizes[a] * sizes[b] };
            if pairs == 0 {
                unused_blocks += 1;
            }
        }
    }
    Ok(FitResult {
        q_hat,
        z_hat,
        theta_hat,
        objective,
        iterations,
        restarts_used,
        method: FitMethod::Completion,
        diagnostics: FitDiagnostics {
            objective_trace: trace,
            unused_blocks,
            spectral_fallback: fell_back,
        },
    })
}

/// Read θ̂ off the fitted matrix for the queried pairs.
pub fn predict(theta_hat: &ProbMatrix, pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
    let n = theta_hat.n();
    pairs
        .iter()
        .map(|&(i, j)| {
            if i == j {
                return Err(Error::Domain(format!(
                    "diagonal pair ({i},{i}) has no edge to predict"
                )));
            }
            if i >= n || j >= n {
                return Err(Error::Dimension(format!("pair ({i},{j}) outside 0..{n}")));
            }
            Ok(theta_hat.get(i, j))
        })
        .collect()
}
