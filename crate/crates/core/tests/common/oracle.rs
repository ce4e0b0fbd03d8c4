//! Brute-force reference computations used only by tests.
//!
//! Everything here is written against explicit textbook formulas (normal
//! equations, explicitly assembled design matrices, direct quadrature of the
//! F density) and shares no code with the library.

#![allow(dead_code, clippy::too_many_arguments, clippy::manual_is_multiple_of)]

pub struct Reference {
    pub beta: Vec<f64>,
    pub rss: f64,
    pub se: Vec<f64>,
}

/// Solves (X'X) b = X'y by Gauss-Jordan elimination with partial pivoting,
/// returning b and (X'X)^-1.
fn solve_with_inverse(xtx: Vec<Vec<f64>>, xty: Vec<f64>) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    let k = xty.len();
    let mut aug: Vec<Vec<f64>> = xtx
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.push(xty[i]);
            row.extend((0..k).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| aug[a][col].abs().total_cmp(&aug[b][col].abs()))?;
        if aug[piv][col].abs() < 1e-300 {
            return None;
        }
        aug.swap(col, piv);
        let d = aug[col][col];
        for v in aug[col].iter_mut() {
            *v /= d;
        }
        for r in 0..k {
            if r != col {
                let f = aug[r][col];
                if f != 0.0 {
                    let pivot_row = aug[col].clone();
                    for (v, p) in aug[r].iter_mut().zip(pivot_row) {
                        *v -= f * p;
                    }
                }
            }
        }
    }
    let beta = aug.iter().map(|row| row[k]).collect();
    let inv = aug.iter().map(|row| row[k + 1..].to_vec()).collect();
    Some((beta, inv))
}

pub fn normal_equations(y: &[f64], cols: &[Vec<f64>]) -> Option<Reference> {
    let k = cols.len();
    let n = y.len();
    let xtx: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| (0..n).map(|t| cols[i][t] * cols[j][t]).sum())
                .collect()
        })
        .collect();
    let xty: Vec<f64> = (0..k)
        .map(|i| (0..n).map(|t| cols[i][t] * y[t]).sum())
        .collect();
    let (beta, inv) = solve_with_inverse(xtx, xty)?;
    let rss: f64 = (0..n)
        .map(|t| {
            let fitted: f64 = (0..k).map(|j| cols[j][t] * beta[j]).sum();
            (y[t] - fitted).powi(2)
        })
        .sum();
    let s2 = rss / (n - k) as f64;
    let se = (0..k).map(|j| (s2 * inv[j][j]).sqrt()).collect();
    Some(Reference { beta, rss, se })
}

/// Dickey-Fuller tau for lag m: regress dY_t on Y_{t-1}, dY_{t-1..t-m}, no constant.
pub fn adf_tau(y: &[f64], m: usize) -> Option<f64> {
    let n = y.len();
    let dy: Vec<f64> = (1..n).map(|t| y[t] - y[t - 1]).collect();
    let mut target = Vec::new();
    let mut cols = vec![Vec::new(); m + 1];
    for i in m..dy.len() {
        target.push(dy[i]);
        cols[0].push(y[i]);
        for l in 1..=m {
            cols[l].push(dy[i - l]);
        }
    }
    let r = normal_equations(&target, &cols)?;
    Some(r.beta[0] / r.se[0])
}

/// Wald F for "x does not Granger-cause y" at lag p, with both regressions
/// containing an intercept. Returns (F, rss_restricted, rss_unrestricted, df_den).
pub fn granger_f(y: &[f64], x: &[f64], p: usize) -> Option<(f64, f64, f64, usize)> {
    let n = y.len();
    let rows: Vec<usize> = (p..n).collect();
    let target: Vec<f64> = rows.iter().map(|&t| y[t]).collect();
    let mut restricted = vec![rows.iter().map(|_| 1.0).collect::<Vec<f64>>()];
    for l in 1..=p {
        restricted.push(rows.iter().map(|&t| y[t - l]).collect());
    }
    let mut unrestricted = restricted.clone();
    for l in 1..=p {
        unrestricted.push(rows.iter().map(|&t| x[t - l]).collect());
    }
    let rr = normal_equations(&target, &restricted)?.rss;
    let ru = normal_equations(&target, &unrestricted)?.rss;
    let df_den = rows.len() - (2 * p + 1);
    let f = ((rr - ru) / p as f64) / (ru / df_den as f64);
    Some((f, rr, ru, df_den))
}

/// AIC = n ln(rss/n) + 2k of the intercept + p own lags (+ p lags of x) model
/// fitted on the rows t >= max_p.
pub fn lag_aic(y: &[f64], x: Option<&[f64]>, p: usize, max_p: usize) -> Option<f64> {
    let n = y.len();
    let rows: Vec<usize> = (max_p..n).collect();
    let target: Vec<f64> = rows.iter().map(|&t| y[t]).collect();
    let mut cols = vec![rows.iter().map(|_| 1.0).collect::<Vec<f64>>()];
    for l in 1..=p {
        cols.push(rows.iter().map(|&t| y[t - l]).collect());
    }
    if let Some(x) = x {
        for l in 1..=p {
            cols.push(rows.iter().map(|&t| x[t - l]).collect());
        }
    }
    let r = normal_equations(&target, &cols)?;
    let m = rows.len() as f64;
    Some(m * (r.rss / m).ln() + 2.0 * cols.len() as f64)
}

/// Gamma(k / 2) for a positive integer k, from the factorial and half-integer
/// product formulas.
fn gamma_half(k: u32) -> f64 {
    if k % 2 == 0 {
        (1..k / 2).map(f64::from).product()
    } else {
        let mut g = std::f64::consts::PI.sqrt();
        let mut z = 0.5;
        while z < k as f64 / 2.0 - 0.25 {
            g *= z;
            z += 1.0;
        }
        g
    }
}

pub fn f_density(x: f64, d1: u32, d2: u32) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let (a, b) = (d1 as f64, d2 as f64);
    let beta = gamma_half(d1) * gamma_half(d2) / gamma_half(d1 + d2);
    (a / b).powf(a / 2.0) * x.powf(a / 2.0 - 1.0) * (1.0 + a * x / b).powf(-(a + b) / 2.0) / beta
}

fn simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            simpson(f, lo, hi, fa, fm, fb, whole, tol / pieces as f64, 40)
        })
        .sum()
}

/// P(F > f) by quadrature of the density over [f, inf), mapped onto s = 1/x.
pub fn f_tail_by_quadrature(f: f64, d1: u32, d2: u32) -> f64 {
    let g = |s: f64| {
        if s <= 0.0 {
            0.0
        } else {
            f_density(1.0 / s, d1, d2) / (s * s)
        }
    };
    integrate(&g, 0.0, 1.0 / f, 1e-12)
}
