//! Log-log rate regression and the slopes of the theoretical lower bounds.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::config::ExperimentConfig;
use crate::experiment::ResultRow;
use crate::model::lambda_star;
use crate::{McError, Result};

/// OLS fit of `log(error) = intercept + slope · log n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRegression {
    pub slope: f64,
    /// Half-width of the two-sided 95% confidence interval for the slope,
    /// from the residual standard error and the t-quantile at
    /// `n_points − 2` degrees of freedom (0 when `n_points = 2`).
    pub ci_halfwidth_95: f64,
    pub intercept: f64,
    pub n_points: usize,
}

impl RateRegression {
    /// Whether two 95% intervals intersect.
    pub fn overlaps(&self, other: &RateRegression) -> bool {
        (self.slope - other.slope).abs() <= self.ci_halfwidth_95 + other.ci_halfwidth_95
    }
}

/// Which error a bound or slope refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Latent,
    Subspace,
}

/// Regress `log(errors)` on `log(ns)`.
pub fn loglog_slope(ns: &[f64], errors: &[f64]) -> Result<RateRegression> {
    if ns.len() != errors.len() {
        return Err(McError::Regression(format!("{} sizes vs {} errors", ns.len(), errors.len())));
    }
    if ns.len() < 3 {
        return Err(McError::Regression(format!("need at least 3 points, got {}", ns.len())));
    }
    if let Some((i, v)) = ns.iter().chain(errors).enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
        return Err(McError::Regression(format!("value {v} at position {i} is not a positive finite number")));
    }
    fit_line(&ns.iter().map(|v| v.ln()).collect::<Vec<_>>(), &errors.iter().map(|v| v.ln()).collect::<Vec<_>>())
}

fn fit_line(x: &[f64], y: &[f64]) -> Result<RateRegression> {
    let m = x.len();
    let mf = m as f64;
    let (mx, my) = (x.iter().sum::<f64>() / mf, y.iter().sum::<f64>() / mf);
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if !(sxx > 0.0) {
        return Err(McError::Regression("all sizes are equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ci_halfwidth_95 = if m > 2 {
        let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        let se = (sse / (mf - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, mf - 2.0).map_err(|e| McError::Regression(e.to_string()))?.inverse_cdf(0.975);
        t * se
    } else {
        0.0
    };
    Ok(RateRegression { slope, ci_halfwidth_95, intercept, n_points: m })
}

/// Minimax lower bound at `(n, ρ, κ)`, with `λ⋆ = ρn/(3κ)`:
/// latent `√(κ(λ⋆∧log n)/n)`, subspace `√(κ(λ⋆∧log n)/(λ⋆ n))`.
pub fn lower_bound(n: usize, rho: f64, kappa: f64, kind: ErrorKind) -> f64 {
    let nf = n as f64;
    let ls = lambda_star(n, rho, kappa);
    let core = kappa * ls.min(nf.ln()) / nf;
    match kind {
        ErrorKind::Latent => core.sqrt(),
        ErrorKind::Subspace => (core / ls).sqrt(),
    }
}

/// Slope of the log lower bound against `log n` over the configuration's
/// grid, one fit per setting (in setting order).
pub fn theoretical_lower_slope(config: &ExperimentConfig, kind: ErrorKind) -> Result<Vec<RateRegression>> {
    let ns: Vec<f64> = config.n_grid.iter().map(|&n| n as f64).collect();
    config
        .settings()
        .iter()
        .map(|s| {
            let bounds: Vec<f64> = config.n_grid.iter().map(|&n| lower_bound(n, s.rho.at(n), s.kappa.at(n), kind)).collect();
            loglog_slope(&ns, &bounds)
        })
        .collect()
}

/// Fitted and theoretical slopes of one setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingRates {
    pub setting: String,
    pub latent: RateRegression,
    pub subspace: RateRegression,
    pub latent_lower: RateRegression,
    pub subspace_lower: RateRegression,
}

/// Group rows by setting (first-appearance order) and fit both error kinds
/// and both lower bounds, the latter evaluated at each row's `(n, ρ, κ)`.
pub fn rates_from_rows(rows: &[ResultRow]) -> Result<Vec<SettingRates>> {
    let mut order: Vec<&str> = Vec::new();
    for r in rows {
        if !order.contains(&r.setting.as_str()) {
            order.push(&r.setting);
        }
    }
    order
        .into_iter()
        .map(|label| {
            let group: Vec<&ResultRow> = rows.iter().filter(|r| r.setting == label).collect();
            let ns: Vec<f64> = group.iter().map(|r| r.n as f64).collect();
            let col = |f: &dyn Fn(&ResultRow) -> f64| group.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let fit = |v: Vec<f64>| loglog_slope(&ns, &v).map_err(|e| McError::Regression(format!("setting {label}: {e}")));
            Ok(SettingRates {
                setting: label.to_string(),
                latent: fit(col(&|r| r.mean_latent))?,
                subspace: fit(col(&|r| r.mean_subspace))?,
                latent_lower: fit(col(&|r| lower_bound(r.n, r.rho, r.kappa, ErrorKind::Latent)))?,
                subspace_lower: fit(col(&|r| lower_bound(r.n, r.rho, r.kappa, ErrorKind::Subspace)))?,
            })
        })
        .collect()
}
