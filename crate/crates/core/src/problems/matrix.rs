use crate::error::{Error, Result};
use crate::space::{euclidean_norm, RngStream};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if r == 0 || c == 0 {
            return Err(Error::InvalidParameter("matrix must be non-empty".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::InvalidParameter(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_vec(r, c, data)
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index,
                value: data[index],
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Entries drawn i.i.d. uniform on `[-1, 1]`, row by row.
    pub fn random_uniform(rows: usize, cols: usize, rng: &mut RngStream) -> Self {
        let data = (0..rows * cols)
            .map(|_| rng.uniform_in(-1.0, 1.0))
            .collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// `out = K x`.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// `out = K^T y`.
    pub fn matvec_t(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.fill(0.0);
        for (i, &yi) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
    }
}

pub const POWER_ITERATION_MAX: usize = 10_000;

/// Spectral norm `||K||_2` by power iteration on `K^T K`.
///
/// Stops once the eigen-residual `||K^T K v - lambda v||` falls below
/// `tol * lambda`, which bounds the relative error of `lambda` by `tol` and of
/// the returned norm by `tol / 2`. The start vector is fixed, so the result is
/// deterministic.
pub fn estimate_operator_norm(k: &Matrix, tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tol must be > 0, got {tol}"
        )));
    }
    let n = k.cols();
    let mut start = RngStream::new(0x005E_ED0F_5EED, 0);
    let mut v: Vec<f64> = (0..n).map(|_| start.uniform_in(0.5, 1.5)).collect();
    let nv = euclidean_norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut kv = vec![0.0; k.rows()];
    let mut w = vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERATION_MAX {
        k.matvec(&v, &mut kv);
        k.matvec_t(&kv, &mut w);
        lambda = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        let wn = euclidean_norm(&w);
        if wn == 0.0 {
            return Ok(0.0);
        }
        let resid: Vec<f64> = w.iter().zip(&v).map(|(a, b)| a - lambda * b).collect();
        if euclidean_norm(&resid) <= tol * lambda {
            return Ok(lambda.max(0.0).sqrt());
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
    }
    Err(Error::NoConvergence {
        iterations: POWER_ITERATION_MAX,
        estimate: lambda.max(0.0).sqrt(),
    })
}

/// [`estimate_operator_norm`] inflated by `(1 + tol)`, an upper bound on `||K||_2`.
pub fn certified_operator_norm(k: &Matrix, tol: f64) -> Result<f64> {
    Ok(estimate_operator_norm(k, tol)? * (1.0 + tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        let i3 = Matrix::identity(3);
        assert!((estimate_operator_norm(&i3, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        let d = Matrix::from_rows(&[vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((estimate_operator_norm(&d, 1e-12).unwrap() - 3.0).abs() < 1e-11);
        let rot = Matrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        assert!((estimate_operator_norm(&rot, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            estimate_operator_norm(&Matrix::zeros(2, 3), 1e-9).unwrap(),
            0.0
        );
        assert!(estimate_operator_norm(&i3, 0.0).is_err());
    }

    #[test]
    fn certified_bound_is_above_estimate() {
        let d = Matrix::from_rows(&[vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(certified_operator_norm(&d, 1e-6).unwrap() >= 3.0);
    }

    #[test]
    fn transposed_product_matches_definition() {
        let k = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let mut out = [0.0; 2];
        k.matvec(&[1.0, 0.0, -1.0], &mut out);
        assert_eq!(out, [-2.0, -2.0]);
        let mut out = [0.0; 3];
        k.matvec_t(&[1.0, -1.0], &mut out);
        assert_eq!(out, [-3.0, -3.0, -3.0]);
        assert!(Matrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
