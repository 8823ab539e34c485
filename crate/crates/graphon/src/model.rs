//! Domain types and generators: graphons, latent designs, block-model
//! parameters, probability matrices, adjacency sampling, and block
//! averaging.
//!
//! The generating model: latent positions ξ_1..ξ_n in [0,1], edge
//! probabilities θ_ij = f(ξ_i, ξ_j) for i ≠ j with zero diagonal, and
//! edges A_ij = A_ji ~ Bernoulli(θ_ij) drawn independently on the lower
//! triangle.

use crate::error::{Error, Result};
use crate::matrix::{KahanSum, MatrixView};
use crate::rng::{seeded_rng, uniform01};

/// Index of the half-open interval U_a = [(a-1)/k, a/k) containing x,
/// 0-based; x = 1 maps to the top interval.
pub fn interval_index(x: f64, k: usize) -> usize {
    debug_assert!((0.0..=1.0).contains(&x));
    ((x * k as f64).floor() as usize).min(k - 1)
}

// ---------------------------------------------------------------------------
// Graphons
// ---------------------------------------------------------------------------

/// Built-in graphon families. Each is symmetric with range inside [0,1].
#[derive(Debug, Clone, PartialEq)]
pub enum GraphonKind {
    /// f ≡ c
    Constant(f64),
    /// f(x,y) = xy
    Product,
    /// f(x,y) = min(x,y)
    Min,
    /// f(x,y) = (x+y)/2
    Additive,
    /// f(x,y) = (1 + cos(πx)cos(πy))/2, a C^∞ graphon for the smooth regime
    SmoothCosine,
    /// f(x,y) = |x-y|^alpha, Hölder-continuous with exponent alpha ∈ (0,1]
    Holder(f64),
    /// Piecewise-constant block graphon: `within` on the diagonal blocks of
    /// the k-interval partition, `between` elsewhere
    Sbm { k: usize, within: f64, between: f64 },
}

/// A graphon together with its declared smoothness metadata (α, M).
///
/// Piecewise-constant and constant kinds carry `alpha = f64::INFINITY`,
/// marking them as exactly block-representable / arbitrarily smooth; the
/// Hölder spot check only applies to kinds with alpha ≤ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphonSpec {
    kind: GraphonKind,
    alpha: f64,
    holder_bound: f64,
}

impl GraphonSpec {
    pub fn constant(c: f64) -> Self {
        assert!((0.0..=1.0).contains(&c), "constant graphon level must be in [0,1]");
        GraphonSpec { kind: GraphonKind::Constant(c), alpha: f64::INFINITY, holder_bound: 1.0 }
    }

    pub fn product() -> Self {
        GraphonSpec { kind: GraphonKind::Product, alpha: 1.0, holder_bound: 1.0 }
    }

    pub fn min() -> Self {
        GraphonSpec { kind: GraphonKind::Min, alpha: 1.0, holder_bound: 1.0 }
    }

    pub fn additive() -> Self {
        GraphonSpec { kind: GraphonKind::Additive, alpha: 1.0, holder_bound: 0.5 }
    }

    pub fn smooth_cosine() -> Self {
        GraphonSpec { kind: GraphonKind::SmoothCosine, alpha: 2.0, holder_bound: 6.0 }
    }

    pub fn holder(alpha: f64) -> Self {
        assert!(alpha > 0.0 && alpha <= 1.0, "holder exponent must be in (0,1]");
        GraphonSpec { kind: GraphonKind::Holder(alpha), alpha, holder_bound: 2.0 }
    }

    pub fn sbm(k: usize, within: f64, between: f64) -> Self {
        assert!(k >= 1, "sbm graphon needs at least one block");
        assert!((0.0..=1.0).contains(&within) && (0.0..=1.0).contains(&between));
        GraphonSpec { kind: GraphonKind::Sbm { k, within, between }, alpha: f64::INFINITY, holder_bound: 1.0 }
    }

    /// Parse a gallery id: `constant:c`, `product`, `min`, `additive`,
    /// `smooth`, `holder:a`, `sbm:k:within:between`.
    pub fn parse(id: &str) -> Result<Self> {
        let parts: Vec<&str> = id.split(':').collect();
        let bad = || Error::Parse(format!("unknown graphon id `{id}`"));
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        match parts.as_slice() {
            ["constant", c] => {
                let c = num(c)?;
                if !(0.0..=1.0).contains(&c) {
                    return Err(Error::Domain(format!("constant level {c} outside [0,1]")));
                }
                Ok(GraphonSpec::constant(c))
            }
            ["product"] => Ok(GraphonSpec::product()),
            ["min"] => Ok(GraphonSpec::min()),
            ["additive"] => Ok(GraphonSpec::additive()),
            ["smooth"] => Ok(GraphonSpec::smooth_cosine()),
            ["holder", a] => {
                let a = num(a)?;
                if !(a > 0.0 && a <= 1.0) {
                    return Err(Error::Domain(format!("holder exponent {a} outside (0,1]")));
                }
                Ok(GraphonSpec::holder(a))
            }
            ["sbm", k, w, b] => {
                let k: usize = k.parse().map_err(|_| bad())?;
                let (w, b) = (num(w)?, num(b)?);
                if k == 0 {
                    return Err(Error::Domain("sbm graphon needs k >= 1".into()));
                }
                if !(0.0..=1.0).contains(&w) || !(0.0..=1.0).contains(&b) {
                    return Err(Error::Domain("sbm levels must be in [0,1]".into()));
                }
                Ok(GraphonSpec::sbm(k, w, b))
            }
            _ => Err(bad()),
        }
    }

    pub fn id(&self) -> String {
        match &self.kind {
            GraphonKind::Constant(c) => format!("constant:{c}"),
            GraphonKind::Product => "product".into(),
            GraphonKind::Min => "min".into(),
            GraphonKind::Additive => "additive".into(),
            GraphonKind::SmoothCosine => "smooth".into(),
            GraphonKind::Holder(a) => format!("holder:{a}"),
            GraphonKind::Sbm { k, within, between } => format!("sbm:{k}:{within}:{between}"),
        }
    }

    pub fn kind(&self) -> &GraphonKind {
        &self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn holder_bound(&self) -> f64 {
        self.holder_bound
    }

    /// The whole built-in gallery with default parameters.
    pub fn gallery() -> Vec<GraphonSpec> {
        vec![
            GraphonSpec::constant(0.3),
            GraphonSpec::product(),
            GraphonSpec::min(),
            GraphonSpec::additive(),
            GraphonSpec::smooth_cosine(),
            GraphonSpec::holder(0.5),
            GraphonSpec::sbm(4, 0.7, 0.3),
        ]
    }

    /// Evaluate f(x,y); errors if (x,y) leaves the unit square.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::Domain(format!("graphon arguments ({x}, {y}) outside [0,1]^2")));
        }
        Ok(self.eval_unchecked(x, y))
    }

    fn eval_unchecked(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            GraphonKind::Constant(c) => *c,
            GraphonKind::Product => x * y,
            GraphonKind::Min => x.min(y),
            GraphonKind::Additive => (x + y) / 2.0,
            GraphonKind::SmoothCosine => {
                (1.0 + (std::f64::consts::PI * x).cos() * (std::f64::consts::PI * y).cos()) / 2.0
            }
            GraphonKind::Holder(a) => (x - y).abs().powf(*a),
            GraphonKind::Sbm { k, within, between } => {
                if interval_index(x, *k) == interval_index(y, *k) {
                    *within
                } else {
                    *between
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Latent designs
// ---------------------------------------------------------------------------

/// The latent positions ξ_1..ξ_n, each in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct LatentDesign {
    xi: Vec<f64>,
}

/// How a design is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum DesignDist {
    IidUniform,
    FixedGrid,
    Given(Vec<f64>),
}

impl LatentDesign {
    pub fn from_values(xi: Vec<f64>) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::Domain("design must have at least one point".into()));
        }
        if let Some(bad) = xi.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("design value {bad} outside [0,1]")));
        }
        Ok(LatentDesign { xi })
    }

    /// ξ_i = (i-1)/(n-1) in 1-based terms; the single point 0 when n = 1.
    pub fn grid(n: usize) -> Self {
        assert!(n >= 1);
        if n == 1 {
            return LatentDesign { xi: vec![0.0] };
        }
        LatentDesign {
            xi: (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
        }
    }

    pub fn iid_uniform(n: usize, seed: u64) -> Self {
        assert!(n >= 1);
        let mut rng = seeded_rng(seed);
        LatentDesign { xi: (0..n).map(|_| uniform01(&mut rng)).collect() }
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }
}

pub fn sample_design(dist: &DesignDist, n: usize, seed: u64) -> Result<LatentDesign> {
    match dist {
        DesignDist::IidUniform => Ok(LatentDesign::iid_uniform(n, seed)),
        DesignDist::FixedGrid => Ok(LatentDesign::grid(n)),
        DesignDist::Given(values) => {
            if values.len() != n {
                return Err(Error::Dimension(format!(
                    "given design has {} points, expected {n}",
                    values.len()
                )));
            }
            LatentDesign::from_values(values.clone())
        }
    }
}

/// True iff every interval U_a contains between λ1·n/k and λ2·n/k design
/// points. ξ = 1 counts toward the top interval, matching the oracle
/// assignment rule.
pub fn check_design_regularity(design: &LatentDesign, k: usize, lambda1: f64, lambda2: f64) -> bool {
    assert!(k >= 1);
    assert!(lambda1 > 0.0 && lambda1 <= lambda2);
    let mut counts = vec![0usize; k];
    for &x in design.xi() {
        counts[interval_index(x, k)] += 1;
    }
    let per = design.len() as f64 / k as f64;
    counts
        .iter()
        .all(|&c| c as f64 >= lambda1 * per && c as f64 <= lambda2 * per)
}

pub const DEFAULT_LAMBDA1: f64 = 0.5;
pub const DEFAULT_LAMBDA2: f64 = 1.5;

// ---------------------------------------------------------------------------
// Assignments and block matrices
// ---------------------------------------------------------------------------

/// A cluster map z: [n] -> [k], stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    labels: Vec<usize>,
    k: usize,
}

impl Assignment {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Domain("assignment must cover at least one node".into()));
        }
        if k == 0 {
            return Err(Error::Domain("assignment needs k >= 1".into()));
        }
        if let Some(bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::Domain(format!("label {bad} outside 0..{k}")));
        }
        Ok(Assignment { labels, k })
    }

    /// All nodes in one cluster.
    pub fn trivial(n: usize) -> Self {
        Assignment { labels: vec![0; n], k: 1 }
    }

    /// Contiguous equal blocks: nodes (a·n/k)..((a+1)·n/k) get label a.
    /// Requires k to divide n.
    pub fn contiguous(n: usize, k: usize) -> Self {
        assert!(k >= 1 && n % k == 0, "contiguous assignment needs k | n");
        let m = n / k;
        Assignment { labels: (0..n).map(|i| i / m).collect(), k }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub(crate) fn set_label(&mut self, i: usize, l: usize) {
        debug_assert!(l < self.k);
        self.labels[i] = l;
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Renumber clusters by first occurrence in node order. The result uses
    /// the same k; clusters that never occur keep no nodes.
    pub fn canonicalized(&self) -> (Assignment, Vec<Option<usize>>) {
        let mut map: Vec<Option<usize>> = vec![None; self.k];
        let mut next = 0usize;
        let mut labels = Vec::with_capacity(self.labels.len());
        for &l in &self.labels {
            let new = *map[l].get_or_insert_with(|| {
                let v = next;
                next += 1;
                v
            });
            labels.push(new);
        }
        (Assignment { labels, k: self.k }, map)
    }
}

/// A k×l matrix of block intensities; symmetric square in the undirected
/// model, rectangular for the biclustering variant.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    symmetric: bool,
}

impl BlockMatrix {
    pub fn zeros_symmetric(k: usize) -> Self {
        BlockMatrix { rows: k, cols: k, data: vec![0.0; k * k], symmetric: true }
    }

    pub fn zeros_rect(rows: usize, cols: usize) -> Self {
        BlockMatrix { rows, cols, data: vec![0.0; rows * cols], symmetric: false }
    }

    /// Build a symmetric block matrix from rows; validates shape, symmetry
    /// and the [0,1] range.
    pub fn symmetric_from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::Dimension("block matrix must be square".into()));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        let m = BlockMatrix { rows: k, cols: k, data, symmetric: true };
        for a in 0..k {
            for b in 0..a {
                if m.get(a, b) != m.get(b, a) {
                    return Err(Error::Domain(format!("block matrix not symmetric at ({a},{b})")));
                }
            }
        }
        if let Some(bad) = m.data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("block intensity {bad} outside [0,1]")));
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.cols + b]
    }

    pub fn set(&mut self, a: usize, b: usize, v: f64) {
        self.data[a * self.cols + b] = v;
        if self.symmetric && a != b {
            self.data[b * self.cols + a] = v;
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|a| (0..self.cols).map(|b| self.get(a, b)).collect())
            .collect()
    }

    /// Apply a cluster relabeling (as produced by `Assignment::canonicalized`)
    /// to both axes of a symmetric block matrix.
    pub fn relabeled_symmetric(&self, map: &[Option<usize>]) -> BlockMatrix {
        assert!(self.symmetric);
        let mut out = BlockMatrix::zeros_symmetric(self.rows);
        for a in 0..self.rows {
            for b in 0..self.cols {
                if let (Some(na), Some(nb)) = (map[a], map[b]) {
                    out.set(na, nb, self.get(a, b));
                }
            }
        }
        out
    }

    /// Apply independent row and column relabelings to a rectangular block
    /// matrix.
    pub fn relabeled_rect(&self, row_map: &[Option<usize>], col_map: &[Option<usize>]) -> BlockMatrix {
        let mut out = BlockMatrix::zeros_rect(self.rows, self.cols);
        for a in 0..self.rows {
            for b in 0..self.cols {
                if let (Some(na), Some(nb)) = (row_map[a], col_map[b]) {
                    out.set(na, nb, self.get(a, b));
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Probability matrices and adjacency matrices
// ---------------------------------------------------------------------------

/// The edge-probability matrix θ: symmetric, zero diagonal, entries in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMatrix {
    n: usize,
    data: Vec<f64>,
}

impl ProbMatrix {
    pub fn zeros(n: usize) -> Self {
        ProbMatrix { n, data: vec![0.0; n * n] }
    }

    /// Build from a symmetric off-diagonal rule; the diagonal is zero.
    /// Evaluates f once per unordered pair and mirrors it.
    pub fn from_fn_symmetric(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = ProbMatrix::zeros(n);
        for i in 0..n {
            for j in 0..i {
                let v = f(i, j);
                debug_assert!((0.0..=1.0).contains(&v));
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Validate raw rows as a probability matrix (symmetric, zero diagonal,
    /// entries in [0,1]).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("probability matrix must be square".into()));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        let m = ProbMatrix { n, data };
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(Error::Domain(format!("diagonal entry ({i},{i}) must be zero")));
            }
            for j in 0..i {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::Domain(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        if let Some(bad) = m.data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("probability {bad} outside [0,1]")));
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().cloned().fold(0.0, f64::max)
    }
}

impl MatrixView for ProbMatrix {
    fn size(&self) -> usize {
        self.n
    }
    fn entry(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

/// The observed 0/1 graph: symmetric with zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    data: Vec<u8>,
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        Adjacency { n, data: vec![0; n * n] }
    }

    /// Validate raw rows as an adjacency matrix: square, symmetric, zero
    /// diagonal, entries exactly 0 or 1.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("adjacency matrix must be square".into()));
        }
        let mut a = Adjacency::empty(n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 && v != 1.0 {
                    return Err(Error::Domain(format!("entry ({i},{j}) = {v} is not 0/1")));
                }
                a.data[i * n + j] = v as u8;
            }
        }
        for i in 0..n {
            if a.get(i, i) != 0 {
                return Err(Error::Domain(format!("diagonal entry ({i},{i}) must be zero")));
            }
            for j in 0..i {
                if a.get(i, j) != a.get(j, i) {
                    return Err(Error::Domain(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(a)
    }

    /// Build from undirected edges (0-based); diagonal and out-of-range
    /// pairs are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut a = Adjacency::empty(n);
        for &(i, j) in edges {
            if i == j {
                return Err(Error::Domain(format!("self-loop ({i},{i}) not allowed")));
            }
            if i >= n || j >= n {
                return Err(Error::Domain(format!("edge ({i},{j}) outside 0..{n}")));
            }
            a.data[i * n + j] = 1;
            a.data[j * n + i] = 1;
        }
        Ok(a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.n + j]
    }

    fn set_sym(&mut self, i: usize, j: usize, v: u8) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.n).map(|j| self.get(i, j) as usize).sum()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        let total: usize = self.data.iter().map(|&v| v as usize).sum();
        total / 2
    }

    /// Undirected edges as 0-based (i, j) pairs with i < j.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.get(i, j) == 1 {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

impl MatrixView for Adjacency {
    fn size(&self) -> usize {
        self.n
    }
    fn entry(&self, i: usize, j: usize) -> f64 {
        self.get(i, j) as f64
    }
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// θ_ij = f(ξ_i, ξ_j) off the diagonal, zero on it.
pub fn theta_from_graphon(spec: &GraphonSpec, design: &LatentDesign) -> ProbMatrix {
    let xi = design.xi();
    ProbMatrix::from_fn_symmetric(design.len(), |i, j| spec.eval_unchecked(xi[i], xi[j]))
}

/// θ_ij = Q_{z(i) z(j)} off the diagonal, zero on it.
pub fn theta_from_blocks(q: &BlockMatrix, z: &Assignment) -> ProbMatrix {
    assert!(q.is_symmetric(), "theta_from_blocks needs a symmetric block matrix");
    assert_eq!(q.rows(), z.k(), "block matrix size must match assignment k");
    ProbMatrix::from_fn_symmetric(z.n(), |i, j| q.get(z.label(i), z.label(j)))
}

/// Rescale θ into the sparsity class Θ(β): if the largest entry exceeds β,
/// every entry is multiplied by β / max; otherwise θ is returned unchanged.
pub fn scale_to_sparsity(theta: &ProbMatrix, beta: f64) -> ProbMatrix {
    assert!((0.0..=1.0).contains(&beta), "beta must be in [0,1]");
    let max = theta.max_entry();
    if max <= beta || max == 0.0 {
        return theta.clone();
    }
    let scale = beta / max;
    ProbMatrix::from_fn_symmetric(theta.n(), |i, j| theta.get(i, j) * scale)
}

/// Independent Bernoulli(θ_ij) draws on the lower triangle, mirrored to the
/// upper one. Draw order is row-major over (i, j) with j < i.
pub fn sample_adjacency(theta: &ProbMatrix, seed: u64) -> Adjacency {
    let n = theta.n();
    let mut rng = seeded_rng(seed);
    let mut a = Adjacency::empty(n);
    for i in 1..n {
        for j in 0..i {
            let edge = uniform01(&mut rng) < theta.get(i, j);
            a.set_sym(i, j, edge as u8);
        }
    }
    a
}

// ---------------------------------------------------------------------------
// Block averages
// ---------------------------------------------------------------------------

/// A block mean together with the number of off-diagonal index pairs it
/// averaged over; `pairs == 0` marks the defined fallback value 0 for
/// blocks with no usable pair (empty cross block, or diagonal block of a
/// singleton cluster).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockAverage {
    pub value: f64,
    pub pairs: usize,
}

impl BlockAverage {
    pub fn is_used(&self) -> bool {
        self.pairs > 0
    }
}

/// Mean of M over the block z^{-1}(a) × z^{-1}(b): all ordered pairs for
/// a ≠ b, the i ≠ j pairs for a = b.
pub fn block_average(m: &impl MatrixView, z: &Assignment, a: usize, b: usize) -> BlockAverage {
    assert_eq!(m.size(), z.n(), "matrix size must match assignment length");
    assert!(a < z.k() && b < z.k());
    let mut sum = KahanSum::default();
    let mut pairs = 0usize;
    let nodes_a: Vec<usize> = (0..z.n()).filter(|&i| z.label(i) == a).collect();
    if a == b {
        for (idx, &i) in nodes_a.iter().enumerate() {
            for &j in &nodes_a[idx + 1..] {
                sum.add(m.entry(i, j));
                sum.add(m.entry(j, i));
                pairs += 2;
            }
        }
    } else {
        let nodes_b: Vec<usize> = (0..z.n()).filter(|&j| z.label(j) == b).collect();
        for &i in &nodes_a {
            for &j in &nodes_b {
                sum.add(m.entry(i, j));
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        return BlockAverage { value: 0.0, pairs: 0 };
    }
    BlockAverage { value: sum.value() / pairs as f64, pairs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_seed;

    #[test]
    fn eval_product_and_min() {
        let p = GraphonSpec::product();
        assert_eq!(p.eval(0.5, 1.0).unwrap(), 0.5);
        let m = GraphonSpec::min();
        assert_eq!(m.eval(0.3, 0.7).unwrap(), 0.3);
    }

    #[test]
    fn eval_is_symmetric_on_random_points() {
        let mut rng = seeded_rng(11);
        for spec in GraphonSpec::gallery() {
            for _ in 0..200 {
                let (x, y) = (uniform01(&mut rng), uniform01(&mut rng));
                assert_eq!(spec.eval(x, y).unwrap(), spec.eval(y, x).unwrap(), "{}", spec.id());
            }
        }
    }

    #[test]
    fn eval_rejects_out_of_domain() {
        let spec = GraphonSpec::additive();
        assert!(matches!(spec.eval(-0.1, 0.5), Err(Error::Domain(_))));
        assert!(matches!(spec.eval(0.5, 1.1), Err(Error::Domain(_))));
    }

    #[test]
    fn gallery_range_and_symmetry_on_grid() {
        for spec in GraphonSpec::gallery() {
            for i in 0..=20 {
                for j in 0..=20 {
                    let (x, y) = (i as f64 / 20.0, j as f64 / 20.0);
                    let v = spec.eval(x, y).unwrap();
                    assert!((0.0..=1.0).contains(&v), "{} at ({x},{y}) -> {v}", spec.id());
                }
            }
        }
    }

    #[test]
    fn gallery_lipschitz_holds_for_declared_alpha_at_most_one() {
        // |f(x,y) - f(x',y')| <= M (|x-x'| + |y-y'|)^alpha on sampled pairs
        let mut rng = seeded_rng(99);
        for spec in GraphonSpec::gallery() {
            if spec.alpha() > 1.0 {
                continue;
            }
            let (alpha, m) = (spec.alpha(), spec.holder_bound());
            for _ in 0..100_000 {
                let (x, y) = (uniform01(&mut rng), uniform01(&mut rng));
                let (x2, y2) = (uniform01(&mut rng), uniform01(&mut rng));
                let lhs = (spec.eval(x, y).unwrap() - spec.eval(x2, y2).unwrap()).abs();
                let rhs = m * ((x - x2).abs() + (y - y2).abs()).powf(alpha);
                assert!(lhs <= rhs + 1e-12, "{} violates Hölder bound", spec.id());
            }
        }
    }

    #[test]
    fn graphon_id_round_trips() {
        for spec in GraphonSpec::gallery() {
            let back = GraphonSpec::parse(&spec.id()).unwrap();
            assert_eq!(spec, back);
        }
        assert!(GraphonSpec::parse("nope").is_err());
        assert!(GraphonSpec::parse("holder:1.5").is_err());
    }

    #[test]
    fn grid_design_matches_rule() {
        let d = LatentDesign::grid(3);
        assert_eq!(d.xi(), &[0.0, 0.5, 1.0]);
        assert_eq!(LatentDesign::grid(1).xi(), &[0.0]);
    }

    #[test]
    fn design_same_seed_identical() {
        let a = LatentDesign::iid_uniform(1000, 7);
        let b = LatentDesign::iid_uniform(1000, 7);
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_design_is_usually_regular() {
        // interval counts each within [0.5, 1.5] n/k for nearly all seeds
        let (n, k) = (1000, 10);
        let hits = (0..100)
            .filter(|&s| {
                let d = LatentDesign::iid_uniform(n, derive_seed(123, &[s]));
                check_design_regularity(&d, k, DEFAULT_LAMBDA1, DEFAULT_LAMBDA2)
            })
            .count();
        assert!(hits >= 95, "only {hits}/100 seeds were regular");
    }

    #[test]
    fn regularity_examples() {
        let grid = LatentDesign::grid(10);
        assert!(check_design_regularity(&grid, 2, 0.5, 1.5));
        let degenerate = LatentDesign::from_values(vec![0.0; 8]).unwrap();
        assert!(!check_design_regularity(&degenerate, 2, 0.5, 1.5));
        assert!(check_design_regularity(&degenerate, 1, 0.5, 1.5));
    }

    #[test]
    fn theta_from_graphon_product_example() {
        let design = LatentDesign::from_values(vec![0.0, 0.5, 1.0]).unwrap();
        let theta = theta_from_graphon(&GraphonSpec::product(), &design);
        assert_eq!(theta.get(1, 2), 0.5);
        assert_eq!(theta.get(0, 1), 0.0);
        assert_eq!(theta.get(0, 2), 0.0);
        for i in 0..3 {
            assert_eq!(theta.get(i, i), 0.0);
        }
    }

    #[test]
    fn theta_from_constant_graphon() {
        let design = LatentDesign::grid(5);
        let theta = theta_from_graphon(&GraphonSpec::constant(0.3), &design);
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { 0.0 } else { 0.3 };
                assert_eq!(theta.get(i, j), expect);
            }
        }
    }

    #[test]
    fn theta_from_blocks_two_cliques() {
        let q = BlockMatrix::symmetric_from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let z = Assignment::new(vec![0, 0, 1, 1], 2).unwrap();
        let theta = theta_from_blocks(&q, &z);
        assert_eq!(theta.get(0, 1), 1.0);
        assert_eq!(theta.get(2, 3), 1.0);
        for &(i, j) in &[(0, 2), (0, 3), (1, 2), (1, 3)] {
            assert_eq!(theta.get(i, j), 0.0);
        }
    }

    #[test]
    fn theta_from_blocks_label_permutation_invariant() {
        let q = BlockMatrix::symmetric_from_rows(vec![vec![0.8, 0.2], vec![0.2, 0.4]]).unwrap();
        let z = Assignment::new(vec![0, 1, 0, 1, 1], 2).unwrap();
        // swap labels and permute Q accordingly
        let q_swapped =
            BlockMatrix::symmetric_from_rows(vec![vec![0.4, 0.2], vec![0.2, 0.8]]).unwrap();
        let z_swapped = Assignment::new(vec![1, 0, 1, 0, 0], 2).unwrap();
        assert_eq!(theta_from_blocks(&q, &z), theta_from_blocks(&q_swapped, &z_swapped));
    }

    #[test]
    fn sparsity_scaling() {
        let q = BlockMatrix::symmetric_from_rows(vec![vec![0.8, 0.4], vec![0.4, 0.8]]).unwrap();
        let z = Assignment::contiguous(4, 2);
        let theta = theta_from_blocks(&q, &z);
        let halved = scale_to_sparsity(&theta, 0.4);
        assert_eq!(halved.get(0, 1), 0.4);
        assert_eq!(halved.get(0, 2), 0.2);
        assert_eq!(scale_to_sparsity(&theta, 1.0), theta);
        assert_eq!(scale_to_sparsity(&theta, 0.0).max_entry(), 0.0);
        let zero = ProbMatrix::zeros(4);
        assert_eq!(scale_to_sparsity(&zero, 0.5), zero);
    }

    #[test]
    fn adjacency_extremes() {
        let zeros = ProbMatrix::zeros(6);
        assert_eq!(sample_adjacency(&zeros, 1).edge_count(), 0);
        let ones = ProbMatrix::from_fn_symmetric(6, |_, _| 1.0);
        assert_eq!(sample_adjacency(&ones, 1).edge_count(), 15);
    }

    #[test]
    fn adjacency_density_concentrates() {
        // theta = 1/2, n = 200: edge density within 0.05 of 1/2 for nearly
        // every seed (binomial sd ~ 0.0035, so 0.05 is a 14-sigma band)
        let theta = ProbMatrix::from_fn_symmetric(200, |_, _| 0.5);
        let pairs = 200.0 * 199.0 / 2.0;
        let good = (0..1000)
            .filter(|&s| {
                let a = sample_adjacency(&theta, derive_seed(9, &[s]));
                let density = a.edge_count() as f64 / pairs;
                (density - 0.5).abs() <= 0.05
            })
            .count();
        assert!(good >= 990, "{good}/1000 within band");
    }

    #[test]
    fn adjacency_same_seed_bit_identical() {
        let theta = theta_from_graphon(&GraphonSpec::additive(), &LatentDesign::grid(40));
        assert_eq!(sample_adjacency(&theta, 5), sample_adjacency(&theta, 5));
    }

    #[test]
    fn block_average_worked_example() {
        // n=4, z=(1,1,2,2): within-block means 1 and 6, cross mean 3.5
        let z = Assignment::new(vec![0, 0, 1, 1], 2).unwrap();
        let rows = vec![
            vec![0.0, 1.0, 2.0, 3.0],
            vec![1.0, 0.0, 4.0, 5.0],
            vec![2.0, 4.0, 0.0, 6.0],
            vec![3.0, 5.0, 6.0, 0.0],
        ];
        let m = crate::matrix::DenseMatrix::from_rows(rows);
        assert_eq!(block_average(&m, &z, 0, 0).value, 1.0);
        assert_eq!(block_average(&m, &z, 0, 1).value, 3.5);
        assert_eq!(block_average(&m, &z, 1, 1).value, 6.0);
        assert_eq!(block_average(&m, &z, 0, 1).pairs, 4);
    }

    #[test]
    fn block_average_constant_and_symmetry() {
        let theta = ProbMatrix::from_fn_symmetric(7, |_, _| 0.42);
        let z = Assignment::new(vec![0, 1, 0, 2, 1, 2, 0], 3).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let ab = block_average(&theta, &z, a, b);
                let ba = block_average(&theta, &z, b, a);
                assert!((ab.value - 0.42).abs() < 1e-12);
                assert_eq!(ab.value, ba.value);
            }
        }
    }

    #[test]
    fn block_average_degenerate_blocks_fall_back() {
        let theta = ProbMatrix::from_fn_symmetric(3, |_, _| 0.9);
        // cluster 2 empty, cluster 1 a singleton
        let z = Assignment::new(vec![0, 0, 1], 3).unwrap();
        let empty_cross = block_average(&theta, &z, 0, 2);
        assert_eq!(empty_cross.value, 0.0);
        assert!(!empty_cross.is_used());
        let singleton = block_average(&theta, &z, 1, 1);
        assert_eq!(singleton.value, 0.0);
        assert!(!singleton.is_used());
    }

    #[test]
    fn block_average_reconstructs_block_matrix_exactly() {
        let q = BlockMatrix::symmetric_from_rows(vec![
            vec![0.1, 0.7, 0.3],
            vec![0.7, 0.5, 0.9],
            vec![0.3, 0.9, 0.2],
        ])
        .unwrap();
        let labels: Vec<usize> = (0..90).map(|i| (i * 7 + i / 13) % 3).collect();
        let z = Assignment::new(labels, 3).unwrap();
        let theta = theta_from_blocks(&q, &z);
        for a in 0..3 {
            for b in 0..3 {
                let avg = block_average(&theta, &z, a, b);
                assert!(avg.is_used());
                assert!(
                    (avg.value - q.get(a, b)).abs() <= 1e-12,
                    "block ({a},{b}): {} vs {}",
                    avg.value,
                    q.get(a, b)
                );
            }
        }
    }

    #[test]
    fn interval_index_boundaries() {
        assert_eq!(interval_index(0.0, 4), 0);
        assert_eq!(interval_index(0.25, 4), 1);
        assert_eq!(interval_index(1.0, 4), 3);
        assert_eq!(interval_index(0.999, 1), 0);
    }
}
