//! Interpolation and quadrature used by arc-length reparameterization.

/// Clamped cubic spline through `(x_k, y_k)` with strictly increasing `x`.
/// End slopes come from the derivative of the interpolating polynomial
/// through the first (last) five knots, which keeps the end error at the
/// same order as the interior.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

/// Derivative at `x[at]` of the Lagrange polynomial through all of `x, y`.
fn lagrange_slope(x: &[f64], y: &[f64], at: usize) -> f64 {
    let t = x[at];
    let mut total = 0.0;
    for i in 0..x.len() {
        // d/dt of the i-th basis polynomial at t
        let mut deriv = 0.0;
        for k in 0..x.len() {
            if k == i {
                continue;
            }
            let mut term = 1.0 / (x[i] - x[k]);
            for l in 0..x.len() {
                if l != i && l != k {
                    term *= (t - x[l]) / (x[i] - x[l]);
                }
            }
            deriv += term;
        }
        total += y[i] * deriv;
    }
    total
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let k = n.min(5);
        let slope0 = lagrange_slope(&x[..k], &y[..k], 0);
        let slope1 = lagrange_slope(&x[n - k..], &y[n - k..], k - 1);
        // tridiagonal system a_i m_{i-1} + b_i m_i + c_i m_{i+1} = r_i
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut r = vec![0.0; n];
        let h0 = x[1] - x[0];
        b[0] = h0 / 3.0;
        c[0] = h0 / 6.0;
        r[0] = (y[1] - y[0]) / h0 - slope0;
        let hl = x[n - 1] - x[n - 2];
        a[n - 1] = hl / 6.0;
        b[n - 1] = hl / 3.0;
        r[n - 1] = slope1 - (y[n - 1] - y[n - 2]) / hl;
        for i in 1..n - 1 {
            let hp = x[i] - x[i - 1];
            let hn = x[i + 1] - x[i];
            a[i] = hp / 6.0;
            b[i] = (hp + hn) / 3.0;
            c[i] = hn / 6.0;
            r[i] = (y[i + 1] - y[i]) / hn - (y[i] - y[i - 1]) / hp;
        }
        for i in 1..n {
            let w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            r[i] -= w * r[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = r[n - 1] / b[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (r[i] - c[i] * m[i + 1]) / b[i];
        }
        Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        }
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0
    }
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let secant: Vec<f64> = (0..n - 1)
            .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
            .collect();
        let mut slope = vec![0.0; n];
        slope[0] = secant[0];
        slope[n - 1] = secant[n - 2];
        for i in 1..n - 1 {
            slope[i] = if secant[i - 1] * secant[i] <= 0.0 {
                0.0
            } else {
                0.5 * (secant[i - 1] + secant[i])
            };
        }
        for i in 0..n - 1 {
            if secant[i] == 0.0 {
                slope[i] = 0.0;
                slope[i + 1] = 0.0;
                continue;
            }
            let a = slope[i] / secant[i];
            let b = slope[i + 1] / secant[i];
            let r = a * a + b * b;
            if r > 9.0 {
                let t = 3.0 / r.sqrt();
                slope[i] = t * a * secant[i];
                slope[i + 1] = t * b * secant[i];
            }
        }
        Self {
            x: x.to_vec(),
            y: y.to_vec(),
            slope,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let u = (t - self.x[i]) / h;
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        h00 * self.y[i] + h10 * h * self.slope[i] + h01 * self.y[i + 1] + h11 * h * self.slope[i + 1]
    }
}

const GL_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_08,
    0.236_926_885_056_189_08,
];

/// Five-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS)
        .map(|(x, w)| w * f(c + r * x))
        .sum::<f64>()
        * r
}

/// Adaptive bisection of the Gauss–Legendre rule until the two halves
/// agree with the whole within `rel_tol` (relative to the running total).
pub fn adaptive_integral<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = gauss_legendre(f, a, m);
        let right = gauss_legendre(f, m, b);
        let refined = left + right;
        if depth == 0 || (refined - whole).abs() <= tol * refined.abs().max(1e-300) {
            refined
        } else {
            recurse(f, a, m, left, tol, depth - 1) + recurse(f, m, b, right, tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    recurse(f, a, b, gauss_legendre(f, a, b), rel_tol, 30)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_cubic_interior() {
        let x: Vec<f64> = (0..200).map(|i| i as f64 * 0.01).collect();
        let y: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let s = CubicSpline::new(&x, &y);
        for t in [0.003, 0.5, 0.777, 1.2345, 1.987] {
            assert!((s.eval(t) - f64::sin(t)).abs() < 1e-9);
            assert!((s.derivative(t) - f64::cos(t)).abs() < 1e-6);
        }
    }

    #[test]
    fn spline_is_exact_on_cubics() {
        let x: Vec<f64> = (0..12).map(|i| (i as f64).powf(1.3)).collect();
        let f = |t: f64| 2.0 * t * t * t - t * t + 0.5;
        let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let s = CubicSpline::new(&x, &y);
        for t in [0.1, 1.7, 5.5, 20.0] {
            assert!((s.eval(t) - f(t)).abs() < 1e-9 * (1.0 + f(t).abs()));
        }
    }

    #[test]
    fn monotone_cubic_preserves_linear() {
        let x = [0.0, 1.0, 2.5, 4.0];
        let y = [1.0, 3.0, 6.0, 9.0];
        let m = MonotoneCubic::new(&x, &y);
        for t in [0.3, 1.7, 3.9] {
            assert!((m.eval(t) - (1.0 + 2.0 * t)).abs() < 1e-14);
        }
    }

    #[test]
    fn adaptive_integral_of_oscillation() {
        let v = adaptive_integral(&|x: f64| x.cos() * x.cos(), 0.0, 10.0, 1e-12);
        let exact = 5.0 + (20.0f64).sin() / 4.0;
        assert!((v - exact).abs() < 1e-11);
    }
}
