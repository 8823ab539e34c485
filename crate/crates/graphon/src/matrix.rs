//! Plain dense matrix storage shared by the domain types.

/// Read-only view of a square real matrix; implemented by the domain
/// matrix types so block averaging and norms work on any of them.
pub trait MatrixView {
    fn size(&self) -> usize;
    fn entry(&self, i: usize, j: usize) -> f64;
}

/// Dense square matrix of reals, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must form a square matrix");
        DenseMatrix { n, data: rows.into_iter().flatten().collect() }
    }

    /// Entrywise difference a - b of two equally sized views.
    pub fn difference(a: &impl MatrixView, b: &impl MatrixView) -> Self {
        assert_eq!(a.size(), b.size(), "difference requires equal sizes");
        DenseMatrix::from_fn(a.size(), |i, j| a.entry(i, j) - b.entry(i, j))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.n {
            for j in 0..i {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// y = M x
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

impl MatrixView for DenseMatrix {
    fn size(&self) -> usize {
        self.n
    }
    fn entry(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

/// Rectangular 0/1 matrix; input of the biclustering estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct RectBinary {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl RectBinary {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RectBinary { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = RectBinary::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j) as u8;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.data[i * self.cols + j] = v as u8;
    }

    pub fn transposed(&self) -> Self {
        RectBinary::from_fn(self.cols, self.rows, |i, j| self.get(j, i) == 1)
    }
}

/// Compensated (Kahan) summation; keeps block means exact to a few ulps
/// independent of how many entries a block has.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_and_frobenius() {
        let a = DenseMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let b = DenseMatrix::from_rows(vec![vec![0.0, 2.0], vec![3.0, 2.0]]);
        let d = DenseMatrix::difference(&a, &b);
        assert_eq!(d.get(0, 0), 1.0);
        assert_eq!(d.get(1, 1), 2.0);
        assert_eq!(d.frobenius_sq(), 5.0);
    }

    #[test]
    fn kahan_mean_of_equal_values_is_tight() {
        let q = 0.1_f64;
        let count = 100_000;
        let mut s = KahanSum::default();
        for _ in 0..count {
            s.add(q);
        }
        let mean = s.value() / count as f64;
        assert!((mean - q).abs() < 1e-15);
    }

    #[test]
    fn rect_transpose() {
        let m = RectBinary::from_fn(2, 3, |i, j| (i + j) % 2 == 0);
        let t = m.transposed();
        assert_eq!(t.rows(), 3);
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), t.get(j, i));
            }
        }
    }
}
