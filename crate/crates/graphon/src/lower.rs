//! Hard-instance constructions and information-theoretic calculators for
//! the minimax lower bounds.
//!
//! The ingredients: binary packings with pairwise Hamming distance ≥ d/4
//! and cardinality ≥ exp(d/8); the nonparametric-rate family T1 (block
//! perturbations 1/2 + c1·k/n driven by a codeword per block pair); the
//! clustering-rate family T2 (a fixed bipartite block matrix whose columns
//! are separated codewords, with the hardness in the unknown assignment);
//! the two-cluster finite-k family; and exact KL / χ² divergences for
//! product-Bernoulli models, feeding Fano-style risk bounds.

use crate::error::{Error, Result};
use crate::model::{Assignment, BlockMatrix, ProbMatrix};
use crate::rng::{seeded_rng, uniform_below, Rng};
use rand_chacha::rand_core::RngCore;

// ---------------------------------------------------------------------------
// Varshamov–Gilbert packings
// ---------------------------------------------------------------------------

/// Smallest admissible cardinality for length d: ceil(exp(d/8)).
pub fn required_cardinality(d: usize) -> usize {
    (d as f64 / 8.0).exp().ceil() as usize
}

/// Lengths above this would need more codewords than can be materialized
/// (the cardinality bound grows like e^{d/8}).
pub const MAX_PACKING_LENGTH: usize = 128;

const GREEDY_LIMIT: usize = 4096;
const LINEAR_ATTEMPTS: usize = 200;

/// A set of binary codewords of length d with pairwise Hamming distance at
/// least d/4 and cardinality at least ceil(exp(d/8)). Codewords are stored
/// packed, 64 positions per word.
///
/// Small sets come from randomized greedy search (exhaustive fallback for
/// d ≤ 16). Large sets are random linear codes: the span of a generator
/// whose minimum nonzero weight is at least d/4, so pairwise distances are
/// certified by a single pass over the span rather than all pairs; the
/// generator is kept for exact re-verification.
#[derive(Debug, Clone)]
pub struct PackingSet {
    d: usize,
    words_per: usize,
    count: usize,
    bits: Vec<u64>,
    generator: Option<Vec<u64>>,
}

impl PackingSet {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn words_per_codeword(&self) -> usize {
        self.words_per
    }

    pub fn codeword_words(&self, idx: usize) -> &[u64] {
        &self.bits[idx * self.words_per..(idx + 1) * self.words_per]
    }

    pub fn bit(&self, idx: usize, pos: usize) -> bool {
        debug_assert!(pos < self.d);
        (self.codeword_words(idx)[pos / 64] >> (pos % 64)) & 1 == 1
    }

    /// Codeword as a 0/1 vector of length d.
    pub fn codeword(&self, idx: usize) -> Vec<u8> {
        (0..self.d).map(|p| self.bit(idx, p) as u8).collect()
    }

    pub fn distance(&self, i: usize, j: usize) -> usize {
        hamming(self.codeword_words(i), self.codeword_words(j))
    }

    /// Generator rows (packed) when the set came from the linear-code
    /// route; rows.len() is the code dimension m.
    pub fn generator_rows(&self) -> Option<Vec<&[u64]>> {
        self.generator
            .as_ref()
            .map(|g| g.chunks(self.words_per).collect())
    }

    /// Exact re-check of both invariants: cardinality ≥ ceil(exp(d/8)) and
    /// min pairwise Hamming ≥ d/4. For generator-backed sets the distance
    /// bound is certified by distinctness + span membership + the minimum
    /// span weight; otherwise all pairs are compared.
    pub fn verify(&self) -> bool {
        if self.count < required_cardinality(self.d) {
            return false;
        }
        match &self.generator {
            None => {
                for i in 0..self.count {
                    for j in (i + 1)..self.count {
                        if 4 * self.distance(i, j) < self.d {
                            return false;
                        }
                    }
                }
                true
            }
            Some(gen) => {
                let m = gen.len() / self.words_per;
                if self.count as u128 > 1u128 << m {
                    return false;
                }
                let min_wt = min_span_weight(gen, m, self.words_per);
                if 4 * min_wt < self.d {
                    return false;
                }
                // every codeword lies in the span
                let basis = echelon_basis(gen, m, self.words_per, self.d);
                let mut scratch = vec![0u64; self.words_per];
                for idx in 0..self.count {
                    scratch.copy_from_slice(self.codeword_words(idx));
                    if !reduces_to_zero(&mut scratch, &basis) {
                        return false;
                    }
                }
                // distinct codewords
                let mut sorted: Vec<&[u64]> =
                    (0..self.count).map(|i| self.codeword_words(i)).collect();
                sorted.sort_unstable();
                sorted.windows(2).all(|w| w[0] != w[1])
            }
        }
    }
}

fn hamming(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones() as usize).sum()
}

fn random_word(d: usize, words: usize, rng: &mut Rng) -> Vec<u64> {
    let mut w: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
    let rem = d % 64;
    if rem != 0 {
        w[words - 1] &= (1u64 << rem) - 1;
    }
    w
}

/// Minimum weight over the nonzero span of `gen`, by Gray-code enumeration
/// (one row XOR per step).
fn min_span_weight(gen: &[u64], m: usize, words: usize) -> usize {
    let mut cur = vec![0u64; words];
    let mut min_wt = usize::MAX;
    for t in 1u64..(1u64 << m) {
        let row = t.trailing_zeros() as usize;
        for w in 0..words {
            cur[w] ^= gen[row * words + w];
        }
        let wt: usize = cur.iter().map(|x| x.count_ones() as usize).sum();
        min_wt = min_wt.min(wt);
    }
    min_wt
}

/// Row-echelon basis indexed by pivot position, for span membership tests.
fn echelon_basis(gen: &[u64], m: usize, words: usize, d: usize) -> Vec<Option<Vec<u64>>> {
    let mut basis: Vec<Option<Vec<u64>>> = vec![None; d];
    for r in 0..m {
        let mut row = gen[r * words..(r + 1) * words].to_vec();
        while let Some(pos) = leading_bit(&row) {
            match &basis[pos] {
                Some(b) => {
                    for (x, y) in row.iter_mut().zip(b) {
                        *x ^= y;
                    }
                }
                None => {
                    basis[pos] = Some(row);
                    break;
                }
            }
        }
    }
    basis
}

fn leading_bit(row: &[u64]) -> Option<usize> {
    for (w, &bits) in row.iter().enumerate().rev() {
        if bits != 0 {
            return Some(w * 64 + 63 - bits.leading_zeros() as usize);
        }
    }
    None
}

fn reduces_to_zero(word: &mut [u64], basis: &[Option<Vec<u64>>]) -> bool {
    while let Some(pos) = leading_bit(word) {
        match &basis[pos] {
            None => return false,
            Some(b) => {
                for (x, y) in word.iter_mut().zip(b) {
                    *x ^= y;
                }
            }
        }
    }
    true
}

/// A packing with at least ceil(exp(d/8)) codewords; see
/// [`vg_packing_with_target`] for the search routes and errors.
pub fn vg_packing(d: usize, seed: u64) -> Result<PackingSet> {
    vg_packing_with_target(d, 0, seed)
}

/// A packing with at least max(ceil(exp(d/8)), min_count) codewords of
/// length d and pairwise Hamming distance ≥ d/4.
///
/// Small targets use randomized greedy (sample, keep if far from all kept)
/// with an exhaustive deterministic fallback for d ≤ 16; targets too large
/// for pairwise checking switch to random linear codes. Errors: d = 0 or
/// beyond [`MAX_PACKING_LENGTH`] (the set would not fit in memory), an
/// unsatisfiable min_count, or an exhausted retry budget.
pub fn vg_packing_with_target(d: usize, min_count: usize, seed: u64) -> Result<PackingSet> {
    if d == 0 {
        return Err(Error::Domain("packing length d must be at least 1".into()));
    }
    if d > MAX_PACKING_LENGTH {
        return Err(Error::SizeGuard(format!(
            "vg_packing materializes ceil(exp(d/8)) codewords; d = {d} exceeds the supported maximum {MAX_PACKING_LENGTH}"
        )));
    }
    let required = required_cardinality(d).max(min_count);
    let words = d.div_ceil(64);
    if d < 64 && (required as u128) > (1u128 << d) {
        return Err(Error::Domain(format!(
            "cannot pack {required} distinct codewords into {{0,1}}^{d}"
        )));
    }
    let mut rng = seeded_rng(seed);

    let set = if required <= GREEDY_LIMIT {
        match greedy_packing(d, words, required, &mut rng) {
            Some(bits) => PackingSet {
                d,
                words_per: words,
                count: bits.len() / words,
                bits,
                generator: None,
            },
            None if d <= 16 => {
                let bits = exhaustive_packing(d, words, required).ok_or_else(|| {
                    Error::Numerical(format!(
                        "no packing of {required} codewords at length {d} found by exhaustive search"
                    ))
                })?;
                PackingSet { d, words_per: words, count: bits.len() / words, bits, generator: None }
            }
            None => {
                return Err(Error::Numerical(format!(
                    "greedy packing retry budget exhausted at d = {d}, target {required}"
                )))
            }
        }
    } else {
        linear_packing(d, words, required, &mut rng)?
    };

    // greedy and exhaustive routes are cheap to re-check in full; the
    // linear route certifies its invariants during construction (exact
    // span-weight pass), so only the cardinality is re-asserted here
    if set.count <= GREEDY_LIMIT {
        debug_assert!(set.verify());
    }
    assert!(set.count >= required_cardinality(d));
    Ok(set)
}

fn greedy_packing(d: usize, words: usize, required: usize, rng: &mut Rng) -> Option<Vec<u64>> {
    let mut kept: Vec<u64> = Vec::new();
    let mut count = 0usize;
    let budget = 400 * required + 2000;
    for _ in 0..budget {
        let w = random_word(d, words, rng);
        let far = (0..count).all(|i| 4 * hamming(&kept[i * words..(i + 1) * words], &w) >= d);
        if far {
            kept.extend_from_slice(&w);
            count += 1;
            if count == required {
                return Some(kept);
            }
        }
    }
    None
}

/// Lexicographic greedy over all of {0,1}^d; deterministic.
fn exhaustive_packing(d: usize, words: usize, required: usize) -> Option<Vec<u64>> {
    debug_assert!(d <= 16 && words == 1);
    let mut kept: Vec<u64> = Vec::new();
    for w in 0..(1u64 << d) {
        if kept.iter().all(|&k| 4 * ((k ^ w).count_ones() as usize) >= d) {
            kept.push(w);
        }
    }
    if kept.len() >= required {
        Some(kept)
    } else {
        None
    }
}

fn linear_packing(d: usize, words: usize, required: usize, rng: &mut Rng) -> Result<PackingSet> {
    let mut m = 0usize;
    while (1usize << m) < required {
        m += 1;
    }
    for _ in 0..LINEAR_ATTEMPTS {
        let gen: Vec<u64> = (0..m).flat_map(|_| random_word(d, words, rng)).collect();
        let min_wt = min_span_weight(&gen, m, words);
        if 4 * min_wt < d {
            continue;
        }
        // collect the first `required` span elements in Gray order
        let mut bits = Vec::with_capacity(required * words);
        let mut cur = vec![0u64; words];
        bits.extend_from_slice(&cur);
        let mut produced = 1usize;
        let mut t = 1u64;
        while produced < required {
            let row = t.trailing_zeros() as usize;
            for w in 0..words {
                cur[w] ^= gen[row * words + w];
            }
            bits.extend_from_slice(&cur);
            produced += 1;
            t += 1;
        }
        return Ok(PackingSet { d, words_per: words, count: required, bits, generator: Some(gen) });
    }
    Err(Error::Numerical(format!(
        "linear packing retry budget exhausted at d = {d}, target {required}"
    )))
}

// ---------------------------------------------------------------------------
// Hard instances
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HardFamily {
    T1,
    T2,
    FiniteK,
}

impl std::fmt::Display for HardFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            HardFamily::T1 => "t1",
            HardFamily::T2 => "t2",
            HardFamily::FiniteK => "finite-k",
        };
        f.write_str(s)
    }
}

/// One member of a lower-bound family, with the construction constant and
/// the codewords / assignment that produced it.
#[derive(Debug, Clone)]
pub struct HardInstance {
    pub theta: ProbMatrix,
    pub family: HardFamily,
    pub constant: f64,
    pub assignment: Option<Assignment>,
    pub codeword_indices: Vec<usize>,
}

fn check_equal_blocks(z: &Assignment, n: usize, k: usize) -> Result<()> {
    if z.n() != n || z.k() != k {
        return Err(Error::Dimension(format!(
            "assignment is {} nodes / {} clusters, expected {n} / {k}",
            z.n(),
            z.k()
        )));
    }
    if n % k != 0 {
        return Err(Error::Domain(format!("equal blocks need k | n, got n = {n}, k = {k}")));
    }
    let m = n / k;
    if z.cluster_sizes().iter().any(|&s| s != m) {
        return Err(Error::Domain(format!("blocks must all have size n/k = {m}")));
    }
    Ok(())
}

/// Lower-triangle linear index of the block pair (a, b), a > b, matching
/// the codeword layout of the T1 family: (1,0), (2,0), (2,1), (3,0), ...
pub fn t1_pair_index(a: usize, b: usize) -> usize {
    debug_assert!(a > b);
    a * (a - 1) / 2 + b
}

/// The T1 (nonparametric-rate) instance: Q has 1/2 on diagonal blocks and
/// 1/2 + (c1·k/n)·ω_ab on off-diagonal block pairs, read through an
/// equal-block assignment.
pub fn t1_instance(
    n: usize,
    k: usize,
    c1: f64,
    omega: &[u8],
    z: &Assignment,
) -> Result<HardInstance> {
    let expected = k * (k - 1) / 2;
    if omega.len() != expected {
        return Err(Error::Dimension(format!(
            "omega has {} bits, expected k(k-1)/2 = {expected}",
            omega.len()
        )));
    }
    if omega.iter().any(|&b| b > 1) {
        return Err(Error::Domain("omega must be a 0/1 vector".into()));
    }
    let bump = c1 * k as f64 / n as f64;
    if !(0.0..=0.25).contains(&bump) {
        return Err(Error::Domain(format!(
            "need 0 <= c1 k / n <= 1/4 to keep entries in [1/2, 3/4]; got {bump}"
        )));
    }
    check_equal_blocks(z, n, k)?;

    let mut q = BlockMatrix::zeros_symmetric(k);
    for a in 0..k {
        q.set(a, a, 0.5);
        for b in 0..a {
            q.set(a, b, 0.5 + bump * omega[t1_pair_index(a, b)] as f64);
        }
    }
    let theta = crate::model::theta_from_blocks(&q, z);
    Ok(HardInstance {
        theta,
        family: HardFamily::T1,
        constant: c1,
        assignment: Some(z.clone()),
        codeword_indices: Vec::new(),
    })
}

/// The full T1 family: one instance per packing codeword.
pub fn t1_family(
    n: usize,
    k: usize,
    c1: f64,
    packing: &PackingSet,
    z: &Assignment,
) -> Result<Vec<HardInstance>> {
    let expected = k * (k - 1) / 2;
    if packing.d() != expected {
        return Err(Error::Dimension(format!(
            "packing length {} does not match k(k-1)/2 = {expected}",
            packing.d()
        )));
    }
    (0..packing.len())
        .map(|idx| {
            let mut inst = t1_instance(n, k, c1, &packing.codeword(idx), z)?;
            inst.codeword_indices = vec![idx];
            Ok(inst)
        })
        .collect()
}

/// The T2 (clustering-rate) instance: Q = [[0, B], [Bᵀ, 0]] where column a
/// of B is 1/2 + sqrt(c2·log k / n)·ω_a, built from the first k/2 packing
/// codewords; the assignment must fix the first-half blocks contiguously.
/// The column separation ‖B_a − B_b‖² ≥ c2·k·log k/(8n) is verified.
pub fn t2_instance(
    n: usize,
    k: usize,
    c2: f64,
    packing: &PackingSet,
    z: &Assignment,
) -> Result<HardInstance> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::Domain(format!("T2 needs even k >= 2, got {k}")));
    }
    let half = k / 2;
    if packing.d() != half {
        return Err(Error::Dimension(format!(
            "packing length {} does not match k/2 = {half}",
            packing.d()
        )));
    }
    if packing.len() < half {
        return Err(Error::Domain(format!(
            "packing has {} codewords but T2 needs one per column: k/2 = {half} \
             (build it with vg_packing_with_target)",
            packing.len()
        )));
    }
    if c2 < 0.0 {
        return Err(Error::Domain("c2 must be nonnegative".into()));
    }
    let eps = (c2 * (k as f64).ln() / n as f64).sqrt();
    if eps > 0.25 {
        return Err(Error::Domain(format!(
            "need sqrt(c2 log k / n) <= 1/4 to keep entries in [1/2, 3/4]; got {eps}"
        )));
    }
    check_equal_blocks(z, n, k)?;
    let m = n / k;
    for i in 0..n / 2 {
        if z.label(i) != i / m {
            return Err(Error::Domain(
                "T2 assignments fix the first-half blocks: z(i) = floor(i/(n/k)) for i < n/2".into(),
            ));
        }
    }

    // column a of B comes from codeword a
    let mut b = vec![vec![0.0f64; half]; half];
    for col in 0..half {
        for row in 0..half {
            b[row][col] = 0.5 + eps * packing.bit(col, row) as u8 as f64;
        }
    }
    let separation_floor = c2 * k as f64 * (k as f64).ln() / (8.0 * n as f64);
    for a in 0..half {
        for bcol in (a + 1)..half {
            let sep: f64 = (0..half).map(|r| (b[r][a] - b[r][bcol]).powi(2)).sum();
            if sep < separation_floor - 1e-12 {
                return Err(Error::Domain(format!(
                    "column separation {sep} below c2 k log k / (8n) = {separation_floor}; \
                     the packing does not meet the distance bound"
                )));
            }
        }
    }

    let mut q = BlockMatrix::zeros_symmetric(k);
    for row in 0..half {
        for col in 0..half {
            q.set(row, half + col, b[row][col]);
        }
    }
    let theta = crate::model::theta_from_blocks(&q, z);
    Ok(HardInstance {
        theta,
        family: HardFamily::T2,
        constant: c2,
        assignment: Some(z.clone()),
        codeword_indices: (0..half).collect(),
    })
}

/// A random member of the T2 assignment class: first-half blocks fixed
/// contiguously, the remaining nodes shuffled into equal blocks.
pub fn t2_assignment(n: usize, k: usize, seed: u64) -> Result<Assignment> {
    if k < 2 || k % 2 != 0 || n % k != 0 {
        return Err(Error::Domain(format!("T2 assignments need even k | n, got n={n}, k={k}")));
    }
    let m = n / k;
    let mut labels = vec![0usize; n];
    for (i, label) in labels.iter_mut().enumerate().take(n / 2) {
        *label = i / m;
    }
    let mut rest: Vec<usize> = (n / 2..n).collect();
    let mut rng = seeded_rng(seed);
    // Fisher-Yates
    for i in (1..rest.len()).rev() {
        rest.swap(i, uniform_below(&mut rng, i + 1));
    }
    for (pos, &node) in rest.iter().enumerate() {
        labels[node] = k / 2 + pos / m;
    }
    Assignment::new(labels, k)
}

/// The finite-k (two-cluster) instance: θ_ij = 1/2 + c/√n across the cut
/// (S, Sᶜ) and 1/2 inside either side, zero diagonal. `members[i]` marks
/// i ∈ S.
pub fn finite_k_instance(n: usize, c: f64, members: &[bool]) -> Result<HardInstance> {
    if members.len() != n {
        return Err(Error::Dimension(format!(
            "membership mask has {} entries, expected {n}",
            members.len()
        )));
    }
    let bump = c / (n as f64).sqrt();
    if !(0.0..=0.25).contains(&bump) {
        return Err(Error::Domain(format!(
            "need 0 <= c/sqrt(n) <= 1/4 to keep entries in [1/2, 3/4]; got {bump}"
        )));
    }
    let theta = ProbMatrix::from_fn_symmetric(n, |i, j| {
        if members[i] != members[j] {
            0.5 + bump
        } else {
            0.5
        }
    });
    let labels: Vec<usize> = members.iter().map(|&m| m as usize).collect();
    Ok(HardInstance {
        theta,
        family: HardFamily::FiniteK,
        constant: c,
        assignment: Some(Assignment::new(labels, 2)?),
        codeword_indices: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// Divergences for product-Bernoulli models
// ---------------------------------------------------------------------------

fn bernoulli_terms(p: f64, q: f64) -> Result<(f64, f64)> {
    if p == q {
        return Ok((0.0, 0.0));
    }
    if q <= 0.0 || q >= 1.0 {
        return Err(Error::InfiniteDivergence(format!(
            "θ' = {q} is deterministic where θ = {p} disagrees"
        )));
    }
    Ok((p, q))
}

/// KL divergence between the product-Bernoulli models: Σ over off-diagonal
/// entries of θ_ij log(θ_ij/θ'_ij) + (1−θ_ij) log((1−θ_ij)/(1−θ'_ij)),
/// with 0·log 0 = 0. Deterministic disagreement signals infinite
/// divergence as an error.
pub fn kl_product_bernoulli(theta: &ProbMatrix, theta_prime: &ProbMatrix) -> Result<f64> {
    if theta.n() != theta_prime.n() {
        return Err(Error::Dimension("KL needs equal matrix sizes".into()));
    }
    let n = theta.n();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (p, q) = bernoulli_terms(theta.get(i, j), theta_prime.get(i, j))?;
            if p == q {
                continue;
            }
            if p > 0.0 {
                total += p * (p / q).ln();
            }
            if p < 1.0 {
                total += (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln();
            }
        }
    }
    Ok(total)
}

/// χ² divergence between the product-Bernoulli models:
/// Π (1 + (θ_ij − θ'_ij)²/(θ'_ij(1−θ'_ij))) − 1 over off-diagonal entries,
/// accumulated in log space.
pub fn chi2_product_bernoulli(theta: &ProbMatrix, theta_prime: &ProbMatrix) -> Result<f64> {
    if theta.n() != theta_prime.n() {
        return Err(Error::Dimension("χ² needs equal matrix sizes".into()));
    }
    let n = theta.n();
    let mut log_product = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (p, q) = bernoulli_terms(theta.get(i, j), theta_prime.get(i, j))?;
            if p == q {
                continue;
            }
            let r = (p - q) * (p - q) / (q * (1.0 - q));
            log_product += r.ln_1p();
        }
    }
    Ok(log_product.exp_m1())
}

// ---------------------------------------------------------------------------
// Fano-style risk bounds
// ---------------------------------------------------------------------------

/// Classical Fano bound: 1 − (d_KL + log 2)/log M, clamped to [0,1].
pub fn fano_bound(kl_diameter: f64, log_packing: f64) -> f64 {
    assert!(log_packing > 0.0, "fano bound needs log packing > 0");
    assert!(kl_diameter >= 0.0);
    (1.0 - (kl_diameter + std::f64::consts::LN_2) / log_packing).clamp(0.0, 1.0)
}

/// χ² variant: 1 − 1/M − sqrt(d_χ²/M), clamped to [0,1].
pub fn chi2_fano_bound(chi2_diameter: f64, packing: f64) -> f64 {
    assert!(packing >= 1.0, "chi2 fano bound needs packing >= 1");
    assert!(chi2_diameter >= 0.0);
    (1.0 - 1.0 / packing - (chi2_diameter / packing).sqrt()).clamp(0.0, 1.0)
}
