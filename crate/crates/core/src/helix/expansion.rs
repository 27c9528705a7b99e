//! `G_j = sum_i A_ji G_3^(i)`: the curvature functions expanded over the
//! derivatives of `G_3 = k1/k2`, and the characterizations written in
//! that basis.

use serde::Serialize;

use crate::diff::Differentiator;
use crate::error::Result;
use crate::frenet::FrenetData;
use crate::helix::gfun::{checked_curvatures, GProfile};
use crate::stats;

/// Per-node coefficient table `A_ji`, `3 <= j <= n`, `0 <= i <= j - 3`.
#[derive(Debug, Clone, Serialize)]
pub struct ACoefficients {
    pub dim: usize,
    /// `table[j - 3][i][node]`.
    table: Vec<Vec<Vec<f64>>>,
    /// `g3_derivatives[i][node] = G_3^(i)`, `0 <= i <= n - 2`.
    pub g3_derivatives: Vec<Vec<f64>>,
    /// Masked curvatures `k_1..k_{n-1}`.
    #[serde(skip)]
    kappa: Vec<Vec<f64>>,
    #[serde(skip)]
    differentiator: Differentiator,
    /// Largest relative gap between the recursion and the closed forms for
    /// `A_j(j-3)` and `A_j(j-4)`.
    pub closed_form_defect: f64,
}

impl ACoefficients {
    /// `A_ji`, or `None` outside the declared range (identically zero).
    pub fn get(&self, j: usize, i: usize) -> Option<&[f64]> {
        if j < 3 || j > self.dim || i + 3 > j {
            return None;
        }
        Some(&self.table[j - 3][i])
    }

    /// Derivative of `A_ji`; `None` when the coefficient is identically
    /// constant (zero outside the range, and `A_30 = 1`).
    fn derivative(&self, j: usize, i: usize) -> Option<Vec<f64>> {
        if j == 3 {
            return None;
        }
        self.get(j, i).map(|a| self.differentiator.derivative(a))
    }

    fn len(&self) -> usize {
        self.g3_derivatives[0].len()
    }
}

fn add_scaled(acc: &mut [f64], f: &[f64], w: &[f64]) {
    for ((a, x), y) in acc.iter_mut().zip(f).zip(w) {
        *a += x * y;
    }
}

pub fn a_coefficients(fd: &FrenetData) -> Result<ACoefficients> {
    let n = fd.dim();
    let kappa = checked_curvatures(fd)?;
    let d = fd.differentiator;
    let len = fd.len();
    // k_m with 1-based m
    let k = |m: usize| &kappa[m - 1];

    let mut table: Vec<Vec<Vec<f64>>> = vec![vec![vec![1.0; len]]];
    for j in 4..=n {
        let mut row = Vec::with_capacity(j - 2);
        for i in 0..=j - 3 {
            let mut acc = vec![0.0; len];
            // k_{j-2} A_(j-2)i
            if j >= 5 && i + 3 <= j - 2 {
                add_scaled(&mut acc, k(j - 2), &table[j - 5][i]);
            }
            // A_(j-1)i'
            if j - 1 > 3 && i + 3 <= j - 1 {
                let da = d.derivative(&table[j - 4][i]);
                for (a, v) in acc.iter_mut().zip(&da) {
                    *a += v;
                }
            }
            // A_(j-1)(i-1)
            if i >= 1 {
                for (a, v) in acc.iter_mut().zip(&table[j - 4][i - 1]) {
                    *a += v;
                }
            }
            for (a, kj) in acc.iter_mut().zip(k(j - 1)) {
                *a /= kj;
            }
            row.push(acc);
        }
        table.push(row);
    }

    let g3: Vec<f64> = k(1).iter().zip(k(2)).map(|(a, b)| a / b).collect();
    let mut g3_derivatives = vec![g3];
    for _ in 1..=n - 2 {
        let next = d.derivative(g3_derivatives.last().unwrap());
        g3_derivatives.push(next);
    }

    let mut defect: f64 = 0.0;
    let mut compare = |a: &[f64], b: &[f64]| {
        let scale = stats::max_abs(b).max(1e-300);
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let r = stats::max_abs(&diff) / scale.max(1.0);
        if r.is_finite() {
            defect = defect.max(r);
        }
    };
    // P_q = prod_{m=3}^{q} k_m^{-1}
    let product = |from: usize, to: usize| -> Vec<f64> {
        (0..len)
            .map(|t| (from..=to).map(|m| 1.0 / k(m)[t]).product())
            .collect()
    };
    for j in 4..=n {
        compare(&table[j - 3][j - 3], &product(3, j - 1));
        if j >= 5 {
            let mut sum = vec![0.0; len];
            for q in 3..=j - 2 {
                let dp = d.derivative(&product(3, q));
                let outer = product(q + 1, j - 1);
                add_scaled(&mut sum, &outer, &dp);
            }
            compare(&table[j - 3][j - 4], &sum);
        }
    }

    Ok(ACoefficients {
        dim: n,
        table,
        g3_derivatives,
        kappa,
        differentiator: d,
        closed_form_defect: defect,
    })
}

/// `G_j` assembled from the expansion; derivatives by the same stencil.
pub fn g_from_a_expansion(ac: &ACoefficients, fd: &FrenetData) -> GProfile {
    let n = ac.dim;
    let len = ac.len();
    let mut values = vec![vec![1.0; len], vec![0.0; len]];
    for j in 3..=n {
        let mut acc = vec![0.0; len];
        for i in 0..=j - 3 {
            add_scaled(&mut acc, ac.get(j, i).unwrap(), &ac.g3_derivatives[i]);
        }
        values.push(acc);
    }
    let mut derivatives = vec![vec![0.0; len], vec![0.0; len]];
    for v in &values[2..] {
        derivatives.push(fd.differentiator.derivative(v));
    }
    GProfile {
        s: fd.s.clone(),
        values,
        derivatives,
    }
}

/// Residual of the linear ODE in `G_3` equivalent to
/// `G_n' + k_{n-1} G_{n-1} = 0`:
/// `sum_i [A_ni' + A_n(i-1) + k_{n-1} A_(n-1)i] G_3^(i)` over `0 <= i <= n-2`.
pub fn corollary_ode_residual(ac: &ACoefficients) -> Vec<f64> {
    let n = ac.dim;
    let len = ac.len();
    let k_last = &ac.kappa[n - 2];
    let mut out = vec![0.0; len];
    for i in 0..=n - 2 {
        let mut coeff = vec![0.0; len];
        if let Some(da) = ac.derivative(n, i) {
            add_scaled(&mut coeff, &da, &vec![1.0; len]);
        }
        if i >= 1 {
            if let Some(a) = ac.get(n, i - 1) {
                add_scaled(&mut coeff, a, &vec![1.0; len]);
            }
        }
        if let Some(a) = ac.get(n - 1, i) {
            add_scaled(&mut coeff, a, k_last);
        }
        add_scaled(&mut out, &coeff, &ac.g3_derivatives[i]);
    }
    out
}

/// `sum_j sum_i sum_k A_ji A_jk G_3^(i) G_3^(k)`, which is `sum G_j^2`.
pub fn corollary_quadratic_form(ac: &ACoefficients) -> Vec<f64> {
    let n = ac.dim;
    (0..ac.len())
        .map(|t| {
            let mut total = 0.0;
            for j in 3..=n {
                for i in 0..=j - 3 {
                    for k in 0..=j - 3 {
                        total += ac.get(j, i).unwrap()[t]
                            * ac.get(j, k).unwrap()[t]
                            * ac.g3_derivatives[i][t]
                            * ac.g3_derivatives[k][t];
                    }
                }
            }
            total
        })
        .collect()
}
