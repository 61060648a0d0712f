//! Small dense least-squares fits used by the decay and rate diagnostics.

/// Result of an ordinary least-squares fit y ≈ Σ_j β_j X_j.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub coefficients: Vec<f64>,
    /// Root-mean-square residual.
    pub rms: f64,
    /// Largest absolute residual.
    pub max_abs: f64,
}

/// Solves min ‖y − Xβ‖₂ by modified Gram–Schmidt QR.
///
/// `columns` are the columns of X. Returns `None` when there are fewer rows
/// than columns or X is numerically rank deficient.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Option<LinearFit> {
    let p = columns.len();
    let n = y.len();
    if p == 0 || n < p || columns.iter().any(|c| c.len() != n) {
        return None;
    }
    let mut q: Vec<Vec<f64>> = columns.to_vec();
    let mut r = vec![vec![0.0; p]; p];
    for j in 0..p {
        let original: f64 = columns[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        for i in 0..j {
            let dot: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[i][j] = dot;
            let (lo, hi) = q.split_at_mut(j);
            let (qi, qj) = (&lo[i], &mut hi[0]);
            for (b, a) in qj.iter_mut().zip(qi) {
                *b -= dot * a;
            }
        }
        let norm: f64 = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-12 * original.max(f64::MIN_POSITIVE)) {
            return None;
        }
        r[j][j] = norm;
        for v in q[j].iter_mut() {
            *v /= norm;
        }
    }
    let qty: Vec<f64> = q.iter().map(|qj| qj.iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    let mut beta = vec![0.0; p];
    for j in (0..p).rev() {
        let s: f64 = (j + 1..p).map(|k| r[j][k] * beta[k]).sum();
        beta[j] = (qty[j] - s) / r[j][j];
    }
    let residuals: Vec<f64> = (0..n)
        .map(|i| y[i] - (0..p).map(|j| beta[j] * columns[j][i]).sum::<f64>())
        .collect();
    let rms = (residuals.iter().map(|e| e * e).sum::<f64>() / n as f64).sqrt();
    let max_abs = residuals.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    Some(LinearFit { coefficients: beta, rms, max_abs })
}

/// Slope and intercept of y ≈ a + b x.
pub fn line(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let fit = least_squares(&[vec![1.0; x.len()], x.to_vec()], y)?;
    Some((fit.coefficients[0], fit.coefficients[1], fit.rms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_quadratic() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.5 - 2.0 * v + 0.25 * v * v).collect();
        let fit = least_squares(&[vec![1.0; 10], x.clone(), x.iter().map(|v| v * v).collect()], &y).unwrap();
        assert!((fit.coefficients[0] - 1.5).abs() < 1e-12);
        assert!((fit.coefficients[1] + 2.0).abs() < 1e-12);
        assert!((fit.coefficients[2] - 0.25).abs() < 1e-12);
        assert!(fit.rms < 1e-12);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let x = vec![1.0, 2.0, 3.0];
        assert!(least_squares(&[x.clone(), x.iter().map(|v| 2.0 * v).collect()], &[1.0, 2.0, 3.0]).is_none());
        assert!(line(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_none());
    }

    #[test]
    fn underdetermined_is_rejected() {
        assert!(least_squares(&[vec![1.0], vec![2.0]], &[1.0]).is_none());
    }
}
