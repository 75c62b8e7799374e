//! Least-squares fitting of impact functions to warming/impact observations
//! and the likelihood weights derived from fit quality.
//!
//! Forms that are linear in their coefficients are solved by ordinary least
//! squares on their basis expansions. The two forms with nonlinear shape
//! parameters (threshold location/exponent, kink positions) run a
//! Nelder-Mead search over the shape parameters with the remaining
//! coefficients profiled out by OLS at every candidate. The three fixed
//! published parameterizations are scored on the data but never refitted.
//!
//! All fitting happens in percent-of-GDP space, the units of the observation
//! files and the coefficient tables.

use rayon::prelude::*;

use super::{BmaImpact, ImpactForm, ImpactFunction, MetaDataset, SSR_FLOOR};
use crate::error::{EngineError, Result};

/// One scored parameterization.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedForm {
    pub function: ImpactFunction,
    /// Sum of squared residuals in percent-of-GDP units.
    pub ssr: f64,
    /// False for the fixed published parameterizations.
    pub fitted: bool,
}

/// Outcome of fitting the whole family: successful fits in canonical order,
/// plus the forms whose optimizer failed to converge.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub fits: Vec<FittedForm>,
    pub failures: Vec<(ImpactForm, String)>,
}

fn predict_pct(f: &ImpactFunction, t: f64) -> f64 {
    100.0 * f.evaluate_unchecked(t)
}

fn ssr_of(f: &ImpactFunction, data: &MetaDataset) -> f64 {
    data.observations()
        .iter()
        .map(|&(t, y)| {
            let r = y - predict_pct(f, t);
            r * r
        })
        .sum()
}

/// Solve the normal equations X'X b = X'y for a small column count via
/// Gaussian elimination with partial pivoting. Returns None when X'X is
/// singular to working precision.
fn ols(columns: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let k = columns.len();
    let mut ata = vec![vec![0.0_f64; k]; k];
    let mut aty = vec![0.0_f64; k];
    for i in 0..k {
        for j in 0..k {
            ata[i][j] = columns[i].iter().zip(&columns[j]).map(|(a, b)| a * b).sum();
        }
        aty[i] = columns[i].iter().zip(y).map(|(a, b)| a * b).sum();
    }
    // Scale-aware singularity threshold.
    let scale = ata
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let eps = scale * 1e-13;
    let mut b = aty;
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| {
            ata[i][col].abs().partial_cmp(&ata[j][col].abs()).unwrap()
        })?;
        if ata[pivot][col].abs() < eps {
            return None;
        }
        ata.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..k {
            let f = ata[row][col] / ata[col][col];
            for j in col..k {
                ata[row][j] -= f * ata[col][j];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..k).rev() {
        for j in col + 1..k {
            b[col] -= ata[col][j] * b[j];
        }
        b[col] /= ata[col][col];
    }
    Some(b)
}

/// Basis expansion for forms linear in their coefficients.
fn linear_basis(form: ImpactForm, t: &[f64]) -> Option<Vec<Vec<f64>>> {
    let col = |f: fn(f64) -> f64| t.iter().map(|&x| f(x)).collect::<Vec<f64>>();
    let cols = match form {
        ImpactForm::Linear => vec![col(|x| x)],
        ImpactForm::Quadratic => vec![col(|x| x * x)],
        ImpactForm::Cubic => vec![col(|x| x.powi(3))],
        ImpactForm::Quartic => vec![col(|x| x.powi(4))],
        ImpactForm::Exponential => vec![col(|x| 1.0 - x.exp())],
        ImpactForm::Parabolic => vec![col(|x| x), col(|x| x * x)],
        ImpactForm::HazardT6 => vec![col(|x| x * x), col(|x| x.powi(6))],
        ImpactForm::HazardT7 => vec![col(|x| x * x), col(|x| x.powi(7))],
        _ => return None,
    };
    Some(cols)
}

/// Minimize a 2-d objective with the Nelder-Mead simplex. The objective may
/// return infinity to reject out-of-bounds candidates. Deterministic: no
/// randomness anywhere, so repeated runs agree bitwise.
fn nelder_mead_2d(
    objective: impl Fn(f64, f64) -> f64,
    start: (f64, f64),
    step: (f64, f64),
    max_iter: usize,
) -> std::result::Result<(f64, f64, f64), String> {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink
    const FTOL: f64 = 1e-14;
    const XTOL: f64 = 1e-10;

    let mut simplex = [
        (start.0, start.1),
        (start.0 + step.0, start.1),
        (start.0, start.1 + step.1),
    ];
    let mut values = [
        objective(simplex[0].0, simplex[0].1),
        objective(simplex[1].0, simplex[1].1),
        objective(simplex[2].0, simplex[2].1),
    ];
    if !values.iter().any(|v| v.is_finite()) {
        return Err("initial simplex entirely infeasible".into());
    }

    for _ in 0..max_iter {
        // Order best to worst.
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = [simplex[idx[0]], simplex[idx[1]], simplex[idx[2]]];
        values = [values[idx[0]], values[idx[1]], values[idx[2]]];

        let spread = (values[2] - values[0]).abs();
        let diam = simplex[1..]
            .iter()
            .map(|p| ((p.0 - simplex[0].0).abs()).max((p.1 - simplex[0].1).abs()))
            .fold(0.0_f64, f64::max);
        if values[0].is_finite() && spread <= FTOL * (1.0 + values[0].abs()) && diam <= XTOL {
            return Ok((simplex[0].0, simplex[0].1, values[0]));
        }

        let centroid = (
            (simplex[0].0 + simplex[1].0) / 2.0,
            (simplex[0].1 + simplex[1].1) / 2.0,
        );
        let reflect = (
            centroid.0 + ALPHA * (centroid.0 - simplex[2].0),
            centroid.1 + ALPHA * (centroid.1 - simplex[2].1),
        );
        let f_reflect = objective(reflect.0, reflect.1);

        if f_reflect < values[0] {
            let expand = (
                centroid.0 + GAMMA * (reflect.0 - centroid.0),
                centroid.1 + GAMMA * (reflect.1 - centroid.1),
            );
            let f_expand = objective(expand.0, expand.1);
            if f_expand < f_reflect {
                simplex[2] = expand;
                values[2] = f_expand;
            } else {
                simplex[2] = reflect;
                values[2] = f_reflect;
            }
        } else if f_reflect < values[1] {
            simplex[2] = reflect;
            values[2] = f_reflect;
        } else {
            let contract = (
                centroid.0 + RHO * (simplex[2].0 - centroid.0),
                centroid.1 + RHO * (simplex[2].1 - centroid.1),
            );
            let f_contract = objective(contract.0, contract.1);
            if f_contract < values[2] {
                simplex[2] = contract;
                values[2] = f_contract;
            } else {
                for i in 1..3 {
                    simplex[i] = (
                        simplex[0].0 + SIGMA * (simplex[i].0 - simplex[0].0),
                        simplex[0].1 + SIGMA * (simplex[i].1 - simplex[0].1),
                    );
                    values[i] = objective(simplex[i].0, simplex[i].1);
                }
            }
        }
    }
    Err(format!("no convergence after {max_iter} iterations"))
}

/// Profile objective for the threshold form: given (threshold offset c,
/// exponent p), the amplitude has a closed-form OLS solution.
fn threshold_profile(c: f64, p: f64, data: &MetaDataset) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    for &(t, y) in data.observations() {
        let basis = if t <= -c { 0.0 } else { (t + c).powf(p) };
        num += basis * y;
        den += basis * basis;
    }
    let a = if den > 0.0 { num / den } else { 0.0 };
    let ssr = data
        .observations()
        .iter()
        .map(|&(t, y)| {
            let basis = if t <= -c { 0.0 } else { (t + c).powf(p) };
            let r = y - a * basis;
            r * r
        })
        .sum();
    (a, ssr)
}

fn fit_threshold(data: &MetaDataset) -> Result<FittedForm> {
    let objective = |c: f64, p: f64| {
        if !(-0.9..=5.0).contains(&c) || !(0.05..=8.0).contains(&p) {
            return f64::INFINITY;
        }
        threshold_profile(c, p, data).1
    };
    let defaults = ImpactForm::Threshold.table_parameters();
    let (c, p, _) = nelder_mead_2d(objective, (defaults[1], defaults[2]), (0.1, 0.1), 4000)
        .map_err(|message| EngineError::FitNonConvergence {
            form: ImpactForm::Threshold.name().into(),
            message,
        })?;
    let (a, ssr) = threshold_profile(c, p, data);
    Ok(FittedForm {
        function: ImpactFunction::new(ImpactForm::Threshold, vec![a, c, p])?,
        ssr,
        fitted: true,
    })
}

/// Profile objective for the piecewise-linear form: given (knot, switch),
/// slope and post-switch slope come from a 2-column OLS. A switch past the
/// last observation leaves the second column empty; the fit degrades to a
/// single line through the origin.
fn piecewise_profile(knot: f64, switch: f64, data: &MetaDataset) -> (f64, f64, f64) {
    let obs = data.observations();
    let col_a: Vec<f64> = obs
        .iter()
        .map(|&(t, _)| if t <= switch { t } else { knot })
        .collect();
    let col_b: Vec<f64> = obs
        .iter()
        .map(|&(t, _)| if t <= switch { 0.0 } else { -t })
        .collect();
    let y: Vec<f64> = obs.iter().map(|&(_, y)| y).collect();
    let any_above = col_b.iter().any(|&v| v != 0.0);
    let (a, b) = if any_above {
        match ols(&[col_a.clone(), col_b.clone()], &y) {
            Some(beta) => (beta[0], beta[1]),
            None => match ols(&[col_a.clone()], &y) {
                Some(beta) => (beta[0], 0.0),
                None => (0.0, 0.0),
            },
        }
    } else {
        match ols(&[col_a.clone()], &y) {
            Some(beta) => (beta[0], 0.0),
            None => (0.0, 0.0),
        }
    };
    let ssr = obs
        .iter()
        .zip(col_a.iter().zip(&col_b))
        .map(|(&(_, y), (&ca, &cb))| {
            let r = y - a * ca - b * cb;
            r * r
        })
        .sum();
    (a, b, ssr)
}

fn fit_piecewise(data: &MetaDataset) -> Result<FittedForm> {
    let (t_min, t_max) = data
        .observations()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(t, _)| {
            (lo.min(t), hi.max(t))
        });
    let objective = |knot: f64, switch: f64| {
        if !(-10.0..=10.0).contains(&knot) || switch < t_min || switch > t_max {
            return f64::INFINITY;
        }
        piecewise_profile(knot, switch, data).2
    };
    let defaults = ImpactForm::PiecewiseLinear.table_parameters();
    let start = (
        defaults[1],
        defaults[3].clamp(t_min, t_max),
    );
    let (knot, switch, _) = nelder_mead_2d(objective, start, (0.1, 0.1), 4000).map_err(
        |message| EngineError::FitNonConvergence {
            form: ImpactForm::PiecewiseLinear.name().into(),
            message,
        },
    )?;
    let (a, b, ssr) = piecewise_profile(knot, switch, data);
    Ok(FittedForm {
        function: ImpactFunction::new(ImpactForm::PiecewiseLinear, vec![a, knot, b, switch])?,
        ssr,
        fitted: true,
    })
}

/// Fit one form to the data, or score it unchanged if it is a fixed
/// published parameterization.
pub fn fit_single(form: ImpactForm, data: &MetaDataset) -> Result<FittedForm> {
    if form.is_fixed() {
        let function = ImpactFunction::table_default(form);
        let ssr = ssr_of(&function, data);
        return Ok(FittedForm {
            function,
            ssr,
            fitted: false,
        });
    }
    if data.len() <= form.param_count() {
        return Err(EngineError::Data(format!(
            "cannot fit {} with {} parameters to {} observations",
            form.name(),
            form.param_count(),
            data.len()
        )));
    }
    match form {
        ImpactForm::Threshold => fit_threshold(data),
        ImpactForm::PiecewiseLinear => fit_piecewise(data),
        _ => {
            let t: Vec<f64> = data.observations().iter().map(|&(t, _)| t).collect();
            let y: Vec<f64> = data.observations().iter().map(|&(_, y)| y).collect();
            let columns = linear_basis(form, &t).expect("all remaining forms are coefficient-linear");
            let beta = ols(&columns, &y).ok_or_else(|| EngineError::FitNonConvergence {
                form: form.name().into(),
                message: "normal equations are singular for this dataset".into(),
            })?;
            let function = ImpactFunction::new(form, beta)?;
            let ssr = ssr_of(&function, data);
            Ok(FittedForm {
                function,
                ssr,
                fitted: true,
            })
        }
    }
}

/// Fit every fitted form and score the fixed ones, in canonical order.
/// Individual non-convergence is reported, not fatal.
pub fn fit_functions(data: &MetaDataset) -> Result<FitReport> {
    let max_params = ImpactForm::ALL
        .iter()
        .filter(|f| !f.is_fixed())
        .map(|f| f.param_count())
        .max()
        .unwrap();
    if data.len() <= max_params {
        return Err(EngineError::Data(format!(
            "fitting the full family needs more than {max_params} observations (got {})",
            data.len()
        )));
    }
    let outcomes: Vec<(ImpactForm, Result<FittedForm>)> = ImpactForm::ALL
        .par_iter()
        .map(|&form| (form, fit_single(form, data)))
        .collect();
    let mut fits = Vec::new();
    let mut failures = Vec::new();
    for (form, outcome) in outcomes {
        match outcome {
            Ok(fit) => fits.push(fit),
            Err(e) => failures.push((form, e.to_string())),
        }
    }
    Ok(FitReport { fits, failures })
}

/// Likelihood weights from fit quality: weight proportional to
/// SSR^(-n/2), the concentrated Gaussian likelihood with per-model error
/// variance SSR/n. Computed in log space; exact fits are floored so the
/// weights stay finite.
pub fn bma_weights(fits: &[FittedForm], n: usize) -> Result<BmaImpact> {
    if fits.is_empty() {
        return Err(EngineError::Data(
            "likelihood weighting needs at least one fitted form".into(),
        ));
    }
    if n == 0 {
        return Err(EngineError::Data(
            "likelihood weighting needs a positive observation count".into(),
        ));
    }
    let log_w: Vec<f64> = fits
        .iter()
        .map(|f| -(n as f64) / 2.0 * f.ssr.max(SSR_FLOOR).ln())
        .collect();
    let max = log_w.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let unnorm: Vec<f64> = log_w.iter().map(|&lw| (lw - max).exp()).collect();
    let total: f64 = unnorm.iter().sum();
    let members = fits
        .iter()
        .zip(&unnorm)
        .map(|(f, &w)| (f.function.clone(), w / total))
        .collect();
    BmaImpact::new(members, 1.0)
}
