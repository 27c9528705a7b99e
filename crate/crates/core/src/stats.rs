//! Reductions over node series that skip non-finite entries.
//! All of them iterate in index order.

pub fn finite(values: &[f64]) -> impl Iterator<Item = f64> + '_ {
    values.iter().copied().filter(|v| v.is_finite())
}

pub fn count_finite(values: &[f64]) -> usize {
    finite(values).count()
}

pub fn mean(values: &[f64]) -> f64 {
    let (sum, n) = finite(values).fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

pub fn max_abs(values: &[f64]) -> f64 {
    finite(values).fold(f64::NAN, |m, v| if m.is_nan() { v.abs() } else { m.max(v.abs()) })
}

pub fn min_max(values: &[f64]) -> Option<(f64, f64)> {
    finite(values).fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

/// Constancy statistic `(max - min) / (1 + |mean|)`.
pub fn relative_dispersion(values: &[f64]) -> f64 {
    match min_max(values) {
        None => f64::NAN,
        Some((lo, hi)) => (hi - lo) / (1.0 + mean(values).abs()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skips_nan() {
        let v = [f64::NAN, 1.0, 3.0, f64::NAN];
        assert_eq!(count_finite(&v), 2);
        assert_eq!(mean(&v), 2.0);
        assert_eq!(max_abs(&v), 3.0);
        assert_eq!(relative_dispersion(&v), 2.0 / 3.0);
    }

    #[test]
    fn empty_is_nan() {
        assert!(mean(&[]).is_nan());
        assert!(relative_dispersion(&[f64::NAN]).is_nan());
    }
}
