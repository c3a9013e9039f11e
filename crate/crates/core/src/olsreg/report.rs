//! Plain-text fit reports: coefficients over bracketed standard errors,
//! residual SE and adjusted R-squared, the F line, and a one-line diagnostic
//! summary. The layout is fixed so reports are diffable.

use crate::numfmt;

use super::{DiagnosticsReport, OlsFit};

/// Four-line fit block:
///
/// ```text
/// Y = -0.877 + 0.681 * X
/// (0.766) (0.261)
/// Residual standard error: 3.486 Adjusted R-squared 0.225
/// F-statistic: 6.815 on 1 and 19 degrees of freedom, p-value: 0.01719
/// ```
pub fn format_fit(fit: &OlsFit, target_label: &str, predictor_label: &str) -> String {
    let sign = if fit.slope < 0.0 { '-' } else { '+' };
    let (_, d2) = fit.dof();
    format!(
        "{target_label} = {:.3} {sign} {:.3} * {predictor_label}\n\
         ({:.3}) ({:.3})\n\
         Residual standard error: {:.3} Adjusted R-squared {:.3}\n\
         F-statistic: {} on 1 and {d2} degrees of freedom, p-value: {}\n",
        fit.intercept,
        fit.slope.abs(),
        fit.se_intercept,
        fit.se_slope,
        fit.resid_se,
        fit.adj_r2,
        numfmt::sig(fit.f_stat, 4),
        numfmt::sig(fit.f_p, 4),
    )
}

/// One-line diagnostic summary:
///
/// ```text
/// DW = 1.92; Ramsey F (3,30) = 0.69; W = 0.96
/// ```
pub fn format_diagnostics(d: &DiagnosticsReport) -> String {
    format!(
        "DW = {:.2}; Ramsey F ({},{}) = {:.2}; W = {:.2}\n",
        d.dw, d.reset_dof.0, d.reset_dof.1, d.reset_f, d.sw_w,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(intercept: f64, slope: f64) -> OlsFit {
        OlsFit {
            intercept,
            slope,
            se_intercept: 0.766,
            se_slope: 0.261,
            resid_se: 3.486,
            adj_r2: 0.225,
            f_stat: 6.815,
            f_p: 0.0171933,
            n: 21,
            residuals: Vec::new(),
            fitted: Vec::new(),
        }
    }

    #[test]
    fn fit_block_layout_is_pinned() {
        let text = format_fit(&fit(-0.877, 0.681), "DIFFPRELIM", "DIFFBROKER");
        assert_eq!(
            text,
            "DIFFPRELIM = -0.877 + 0.681 * DIFFBROKER\n\
             (0.766) (0.261)\n\
             Residual standard error: 3.486 Adjusted R-squared 0.225\n\
             F-statistic: 6.815 on 1 and 19 degrees of freedom, p-value: 0.01719\n",
        );
    }

    #[test]
    fn negative_slope_renders_as_subtraction() {
        let text = format_fit(&fit(1.25, -0.681), "Y", "X");
        assert!(text.starts_with("Y = 1.250 - 0.681 * X\n"));
    }

    #[test]
    fn diagnostics_line_is_pinned() {
        let d = DiagnosticsReport {
            dw: 1.92,
            reset_f: 0.69,
            reset_dof: (3, 30),
            reset_p: 0.56,
            sw_w: 0.96,
            sw_p: 0.41,
        };
        assert_eq!(format_diagnostics(&d), "DW = 1.92; Ramsey F (3,30) = 0.69; W = 0.96\n");
    }
}
