//! Least squares by Householder QR.

use super::EconError;

/// Relative size below which a pivot of R marks a collinear column.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub beta: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    pub n: usize,
    pub k: usize,
    /// `n ln(rss / n) + 2k`
    pub aic: f64,
    /// Diagonal of (X'X)^-1.
    unscaled_var: Vec<f64>,
}

impl OlsFit {
    /// Residual variance estimate rss / (n - k).
    pub fn sigma2(&self) -> f64 {
        self.rss / (self.n - self.k) as f64
    }

    pub fn std_error(&self, j: usize) -> f64 {
        (self.sigma2() * self.unscaled_var[j]).sqrt()
    }

    pub fn t_stat(&self, j: usize) -> f64 {
        self.beta[j] / self.std_error(j)
    }
}

pub fn aic(rss: f64, n: usize, k: usize) -> f64 {
    let n = n as f64;
    n * (rss / n).ln() + 2.0 * k as f64
}

/// Regresses `y` on the given regressor columns (no implicit intercept).
pub fn ols(y: &[f64], columns: &[Vec<f64>]) -> Result<OlsFit, EconError> {
    let n = y.len();
    let k = columns.len();
    if k == 0 || n <= k {
        return Err(EconError::Underdetermined { n, k });
    }
    if let Some(bad) = columns.iter().position(|c| c.len() != n) {
        return Err(EconError::DimensionMismatch {
            expected: n,
            found: columns[bad].len(),
        });
    }
    if y.iter()
        .chain(columns.iter().flatten())
        .any(|v| !v.is_finite())
    {
        return Err(EconError::NonFinite);
    }

    // column-major working copy, reduced in place to R (upper part) and Q'y
    let mut a: Vec<Vec<f64>> = columns.to_vec();
    let mut qty = y.to_vec();
    let norms: Vec<f64> = columns.iter().map(|c| norm(c)).collect();
    let mut diag = vec![0.0; k];

    for j in 0..k {
        let alpha = norm(&a[j][j..]);
        if norms[j] == 0.0 || alpha <= RANK_TOL * norms[j] {
            return Err(EconError::SingularDesign { column: j });
        }
        let alpha = if a[j][j] > 0.0 { -alpha } else { alpha };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        diag[j] = alpha;
        a[j][j] = alpha;
        for x in &mut a[j][j + 1..] {
            *x = 0.0;
        }
        if vnorm2 == 0.0 {
            continue;
        }
        for col in a.iter_mut().skip(j + 1) {
            reflect(&mut col[j..], &v, vnorm2);
        }
        reflect(&mut qty[j..], &v, vnorm2);
    }

    // back substitution R beta = (Q'y)[..k]
    let r = |i: usize, j: usize| if i == j { diag[i] } else { a[j][i] };
    let mut beta = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| r(i, j) * beta[j]).sum();
        beta[i] = (qty[i] - s) / r(i, i);
    }

    // R^-1 by columns, then diag((X'X)^-1) = row norms of R^-1
    let mut rinv = vec![vec![0.0; k]; k];
    #[allow(clippy::needless_range_loop)]
    for col in 0..k {
        for i in (0..=col).rev() {
            let target = if i == col { 1.0 } else { 0.0 };
            let s: f64 = (i + 1..=col).map(|j| r(i, j) * rinv[j][col]).sum();
            rinv[i][col] = (target - s) / r(i, i);
        }
    }
    let unscaled_var = rinv
        .iter()
        .map(|row| row.iter().map(|x| x * x).sum())
        .collect();

    let residuals: Vec<f64> = (0..n)
        .map(|t| {
            y[t] - columns
                .iter()
                .zip(&beta)
                .map(|(c, b)| c[t] * b)
                .sum::<f64>()
        })
        .collect();
    let rss = residuals.iter().map(|e| e * e).sum();

    Ok(OlsFit {
        aic: aic(rss, n, k),
        beta,
        residuals,
        rss,
        n,
        k,
        unscaled_var,
    })
}

fn norm(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}

fn reflect(target: &mut [f64], v: &[f64], vnorm2: f64) {
    let dot: f64 = target.iter().zip(v).map(|(t, v)| t * v).sum();
    let f = 2.0 * dot / vnorm2;
    for (t, v) in target.iter_mut().zip(v) {
        *t -= f * v;
    }
}
