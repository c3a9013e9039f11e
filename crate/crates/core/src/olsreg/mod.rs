//! Bivariate OLS in closed form, with standard errors, the F test, and the
//! attached diagnostic battery (Durbin-Watson, RESET, Shapiro-Wilk).
//!
//! Sample sizes here are tiny (tens of months), so everything favors
//! determinism and auditability over speed: compensated summation for every
//! sum of squares, no matrix library, and explicit formulas.

pub mod dist;
pub mod report;
mod swilk;

pub use swilk::shapiro_wilk;

use crate::error::Error;

/// A fitted bivariate regression y = intercept + slope * x.
#[derive(Clone, Debug)]
pub struct OlsFit {
    pub intercept: f64,
    pub slope: f64,
    pub se_intercept: f64,
    pub se_slope: f64,
    pub resid_se: f64,
    pub adj_r2: f64,
    pub f_stat: f64,
    pub f_p: f64,
    pub n: usize,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
}

impl OlsFit {
    /// Denominator degrees of freedom of the slope F test.
    pub fn dof(&self) -> (usize, usize) {
        (1, self.n - 2)
    }

    pub fn rss(&self) -> f64 {
        kahan_sum(self.residuals.iter().map(|e| e * e))
    }
}

/// The diagnostics the fit reports carry alongside the coefficients.
#[derive(Clone, Copy, Debug)]
pub struct DiagnosticsReport {
    pub dw: f64,
    pub reset_f: f64,
    pub reset_dof: (usize, usize),
    pub reset_p: f64,
    pub sw_w: f64,
    pub sw_p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficient {
    Intercept,
    Slope,
}

/// Neumaier-style compensated summation; deterministic for a fixed order.
pub(crate) fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

fn t_ratio(diff: f64, se: f64) -> f64 {
    if se == 0.0 {
        // An exact fit: the statistic degenerates rather than dividing by 0.
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    } else {
        diff / se
    }
}

/// Closed-form least squares of y on x with an intercept.
pub fn fit_ols(x: &[f64], y: &[f64]) -> Result<OlsFit, Error> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { x: x.len(), y: y.len() });
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::NotEnoughData { what: "regression sample", have: n, need: 3 });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteData("x"));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteData("y"));
    }
    let nf = n as f64;
    let x_mean = kahan_sum(x.iter().copied()) / nf;
    let y_mean = kahan_sum(y.iter().copied()) / nf;
    let sxx = kahan_sum(x.iter().map(|&v| (v - x_mean) * (v - x_mean)));
    if sxx == 0.0 {
        return Err(Error::ConstantPredictor);
    }
    let sxy = kahan_sum(x.iter().zip(y).map(|(&xv, &yv)| (xv - x_mean) * (yv - y_mean)));
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let fitted: Vec<f64> = x.iter().map(|&v| intercept + slope * v).collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(&yv, &fv)| yv - fv).collect();
    let rss = kahan_sum(residuals.iter().map(|&e| e * e));
    let tss = kahan_sum(y.iter().map(|&v| (v - y_mean) * (v - y_mean)));
    let dof = nf - 2.0;
    let resid_se = (rss / dof).sqrt();
    let se_slope = resid_se / sxx.sqrt();
    let se_intercept = resid_se * (1.0 / nf + x_mean * x_mean / sxx).sqrt();
    // A constant y is a perfect fit by convention (slope 0 explains it all).
    let r2 = if tss == 0.0 { 1.0 } else { 1.0 - rss / tss };
    let adj_r2 = 1.0 - (1.0 - r2) * (nf - 1.0) / dof;
    let t_slope = t_ratio(slope, se_slope);
    let f_stat = t_slope * t_slope;
    let f_p = dist::f_upper_tail(f_stat, 1.0, dof);
    Ok(OlsFit {
        intercept,
        slope,
        se_intercept,
        se_slope,
        resid_se,
        adj_r2,
        f_stat,
        f_p,
        n,
        residuals,
        fitted,
    })
}

pub fn predict(fit: &OlsFit, x: f64) -> f64 {
    fit.intercept + fit.slope * x
}

/// First-order residual autocorrelation statistic, in [0, 4].
pub fn durbin_watson(residuals: &[f64]) -> Result<f64, Error> {
    if residuals.len() < 2 {
        return Err(Error::NotEnoughData { what: "residuals", have: residuals.len(), need: 2 });
    }
    let den = kahan_sum(residuals.iter().map(|&e| e * e));
    if den == 0.0 {
        return Err(Error::DegenerateResiduals);
    }
    let num = kahan_sum(residuals.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])));
    Ok(num / den)
}

/// RESET specification test: augments the fit with the 2nd..4th powers of
/// the fitted values and F-tests their joint significance.
#[derive(Clone, Copy, Debug)]
pub struct ResetTest {
    pub f: f64,
    pub dof: (usize, usize),
    pub p: f64,
}

pub fn reset_test(fit: &OlsFit, x: &[f64], y: &[f64]) -> Result<ResetTest, Error> {
    let n = y.len();
    if x.len() != n || fit.n != n {
        return Err(Error::LengthMismatch { x: x.len(), y: n });
    }
    // Three added regressors need n - 5 residual degrees of freedom.
    if n < 8 {
        return Err(Error::NotEnoughData { what: "specification-test sample", have: n, need: 8 });
    }
    let ones = vec![1.0; n];
    let f2: Vec<f64> = fit.fitted.iter().map(|&v| v * v).collect();
    let f3: Vec<f64> = fit.fitted.iter().map(|&v| v * v * v).collect();
    let f4: Vec<f64> = fit.fitted.iter().map(|&v| v * v * v * v).collect();
    let cols: Vec<&[f64]> = vec![&ones, x, &f2, &f3, &f4];
    let beta = qr_least_squares(&cols, y)?;
    let rss1 = kahan_sum((0..n).map(|i| {
        let fit_i: f64 = cols.iter().zip(&beta).map(|(c, b)| c[i] * b).sum();
        let e = y[i] - fit_i;
        e * e
    }));
    let rss0 = fit.rss();
    let d2 = n - 5;
    let f = if rss1 == 0.0 {
        if rss0 == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (((rss0 - rss1) / 3.0) / (rss1 / d2 as f64)).max(0.0)
    };
    Ok(ResetTest { f, dof: (3, d2), p: dist::f_upper_tail(f, 3.0, d2 as f64) })
}

/// Least squares via modified Gram-Schmidt QR; rejects numerically rank-
/// deficient designs instead of returning garbage coefficients.
fn qr_least_squares(cols: &[&[f64]], y: &[f64]) -> Result<Vec<f64>, Error> {
    let n = y.len();
    let k = cols.len();
    let dot = |a: &[f64], b: &[f64]| kahan_sum(a.iter().zip(b).map(|(&u, &v)| u * v));
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut r = vec![vec![0.0_f64; k]; k];
    for (j, col) in cols.iter().enumerate() {
        debug_assert_eq!(col.len(), n);
        let mut v = col.to_vec();
        let col_norm = dot(col, col).sqrt();
        for (i, qi) in q.iter().enumerate() {
            let rij = dot(qi, &v);
            r[i][j] = rij;
            for (vt, qt) in v.iter_mut().zip(qi) {
                *vt -= rij * qt;
            }
        }
        let rjj = dot(&v, &v).sqrt();
        if rjj <= 1e-10 * col_norm {
            return Err(Error::CollinearAugmentation);
        }
        r[j][j] = rjj;
        for vt in &mut v {
            *vt /= rjj;
        }
        q.push(v);
    }
    let qty: Vec<f64> = q.iter().map(|qi| dot(qi, y)).collect();
    let mut beta = vec![0.0; k];
    for j in (0..k).rev() {
        let tail: f64 = (j + 1..k).map(|i| r[j][i] * beta[i]).sum();
        beta[j] = (qty[j] - tail) / r[j][j];
    }
    Ok(beta)
}

/// Two-sided t test of one coefficient against a null value.
pub fn coeff_t_test(fit: &OlsFit, which: Coefficient, null_value: f64) -> (f64, f64) {
    let (estimate, se) = match which {
        Coefficient::Intercept => (fit.intercept, fit.se_intercept),
        Coefficient::Slope => (fit.slope, fit.se_slope),
    };
    let t = t_ratio(estimate - null_value, se);
    (t, dist::student_t_two_sided(t, (fit.n - 2) as f64))
}

/// Runs the full diagnostic battery on a fit.
pub fn diagnostics(fit: &OlsFit, x: &[f64], y: &[f64]) -> Result<DiagnosticsReport, Error> {
    let dw = durbin_watson(&fit.residuals)?;
    let reset = reset_test(fit, x, y)?;
    let (sw_w, sw_p) = shapiro_wilk(&fit.residuals)?;
    Ok(DiagnosticsReport {
        dw,
        reset_f: reset.f,
        reset_dof: reset.dof,
        reset_p: reset.p,
        sw_w,
        sw_p,
    })
}
