//! Flat metrics on R^n: the Euclidean dot product and the Minkowski
//! product with signature diag(-1, +1, ..., +1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Euclidean,
    /// First coordinate is the timelike axis.
    Lorentzian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Metric {
    pub signature: Signature,
    pub dim: usize,
}

impl Metric {
    pub fn new(signature: Signature, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::BadParameters(format!(
                "dimension must be at least 2, got {dim}"
            )));
        }
        Ok(Self { signature, dim })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(Signature::Euclidean, dim).expect("dimension >= 2")
    }

    pub fn lorentzian(dim: usize) -> Self {
        Self::new(Signature::Lorentzian, dim).expect("dimension >= 2")
    }

    pub fn is_lorentzian(&self) -> bool {
        self.signature == Signature::Lorentzian
    }

    /// Diagonal entry of the metric tensor on coordinate axis `k` (0-based).
    ///
    /// For a Frenet frame of a timelike curve the same pattern gives the
    /// causal sign of `V_{k+1}`: only the tangent is timelike.
    #[inline]
    pub fn sign(&self, k: usize) -> f64 {
        match self.signature {
            Signature::Lorentzian if k == 0 => -1.0,
            _ => 1.0,
        }
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.dot(x, y))
    }

    /// Inner product without the dimension check.
    #[inline]
    pub fn dot(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (k, (a, b)) in x.iter().zip(y).enumerate() {
            acc += self.sign(k) * a * b;
        }
        acc
    }

    /// `sqrt(|<x, x>|)`.
    #[inline]
    pub fn norm(&self, x: &[f64]) -> f64 {
        self.dot(x, x).abs().sqrt()
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }
}

/// Plain Euclidean length of a coordinate vector, regardless of metric.
#[inline]
pub fn euclidean_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Determinant of a small dense matrix given as rows, by partial-pivot LU.
pub fn determinant(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_unit_vector() {
        let m = Metric::euclidean(3);
        assert_eq!(m.inner(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn lorentzian_time_axis_is_negative() {
        let m = Metric::lorentzian(3);
        assert_eq!(m.inner(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap(), -1.0);
    }

    #[test]
    fn plain_arithmetic() {
        let m = Metric::euclidean(2);
        assert_eq!(m.inner(&[1.0, 2.0], &[3.0, -1.0]).unwrap(), 1.0);
    }

    #[test]
    fn mismatch_is_reported() {
        let m = Metric::euclidean(3);
        assert_eq!(
            m.inner(&[1.0, 2.0], &[3.0, -1.0, 0.0]),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        );
    }

    #[test]
    fn dimension_one_rejected() {
        assert!(Metric::new(Signature::Euclidean, 1).is_err());
        assert!(Metric::new(Signature::Lorentzian, 1).is_err());
    }

    #[test]
    fn determinant_of_permutation() {
        let rows = vec![
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ];
        assert!((determinant(&rows) + 2.0).abs() < 1e-15);
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn symmetric_and_bilinear(
            x in prop::collection::vec(-10.0..10.0f64, 4),
            y in prop::collection::vec(-10.0..10.0f64, 4),
            z in prop::collection::vec(-10.0..10.0f64, 4),
            a in -3.0..3.0f64,
            lorentz in any::<bool>(),
        ) {
            let m = if lorentz { Metric::lorentzian(4) } else { Metric::euclidean(4) };
            prop_assert!((m.dot(&x, &y) - m.dot(&y, &x)).abs() < 1e-12);
            let ax_z: Vec<f64> = x.iter().zip(&z).map(|(p, q)| a * p + q).collect();
            let lhs = m.dot(&ax_z, &y);
            let rhs = a * m.dot(&x, &y) + m.dot(&z, &y);
            prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
            if !lorentz {
                prop_assert!(m.dot(&x, &x) >= 0.0);
            }
        }
    }
}
