//! Social cost of carbon by marginal pulse perturbation.
//!
//! A pulse run adds a small emission burst in one year; the difference in
//! dollar damages against the baseline, discounted at country-specific
//! Ramsey rates and divided by the pulse mass in tonnes, is the national
//! social cost of carbon. The global value is the sum over countries: each
//! country bears its own damages, so the world total is the total of the
//! national burdens.

use rayon::prelude::*;

use crate::economy::EconomyPath;
use crate::error::{EngineError, Result};
use crate::impact::BmaImpact;
use crate::climate::{ClimateInit, ClimateParams};
use crate::scenario::{CountryId, Scenario};
use crate::trajectory::{run_trajectory, Pulse, WorldTrajectory};
use crate::units::TC_PER_MTC;

/// Country-specific annual discount rates from the Ramsey rule:
/// rate = time preference + aversion * per-capita income growth.
#[derive(Debug, Clone)]
pub struct DiscountSchedule {
    /// rates[c][t]: rate applying to the step from year t-1 to year t.
    rates: Vec<Vec<f64>>,
}

impl DiscountSchedule {
    pub fn rate(&self, c: usize, t: usize) -> f64 {
        self.rates[c][t]
    }

    /// Discount factor from year index `to` back to year index `from`:
    /// the product of 1/(1+r) over the steps after `from` through `to`.
    pub fn discount_factor(&self, c: usize, from: usize, to: usize) -> f64 {
        let mut f = 1.0;
        for t in from + 1..=to {
            f /= 1.0 + self.rates[c][t];
        }
        f
    }

    /// Compounding factor from year index `from` forward to `to`: the
    /// reciprocal of the discount factor, used to charge interest.
    pub fn compound_factor(&self, c: usize, from: usize, to: usize) -> f64 {
        let mut f = 1.0;
        for t in from + 1..=to {
            f *= 1.0 + self.rates[c][t];
        }
        f
    }
}

/// Build the per-country discount schedule from gross scenario income
/// growth. Growth comes from the scenario, not the damaged economy, so base
/// and pulse runs discount identically.
pub fn ramsey_rates(economy: &EconomyPath, prtp: f64, emuc: f64) -> Result<DiscountSchedule> {
    let nc = economy.num_countries();
    let ny = economy.num_years();
    let mut rates = Vec::with_capacity(nc);
    for c in 0..nc {
        let mut row = Vec::with_capacity(ny);
        for t in 0..ny {
            let r = prtp + emuc * economy.growth_rate(c, t);
            if !(1.0 + r > 0.0) {
                return Err(EngineError::Numerical(format!(
                    "discount rate {r} at year index {t} implies a nonpositive discount base"
                )));
            }
            row.push(r);
        }
        rates.push(row);
    }
    Ok(DiscountSchedule { rates })
}

/// Everything the pulse experiment needs beyond the physical model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SccSettings {
    pub prtp: f64,
    pub emuc: f64,
    pub income_elasticity: f64,
    pub pulse_year: i32,
    pub pulse_size_mtc: f64,
    pub horizon_year: i32,
}

impl SccSettings {
    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        if !(0.0..=0.10).contains(&self.prtp) {
            return Err(EngineError::Config(format!(
                "pure rate of time preference must lie in [0, 0.10] (got {})",
                self.prtp
            )));
        }
        if !(self.emuc > 0.0) || self.emuc > 5.0 {
            return Err(EngineError::Config(format!(
                "marginal utility elasticity must lie in (0, 5] (got {})",
                self.emuc
            )));
        }
        if !self.income_elasticity.is_finite() || self.income_elasticity.abs() > 5.0 {
            return Err(EngineError::Config(format!(
                "income elasticity must be finite and within [-5, 5] (got {})",
                self.income_elasticity
            )));
        }
        if !(self.pulse_size_mtc > 0.0) {
            return Err(EngineError::Config(format!(
                "pulse size must be positive (got {} MtC)",
                self.pulse_size_mtc
            )));
        }
        if self.pulse_year <= scenario.start_year() {
            return Err(EngineError::Config(format!(
                "pulse year {} must come after the scenario start {}",
                self.pulse_year,
                scenario.start_year()
            )));
        }
        if self.pulse_year >= self.horizon_year {
            return Err(EngineError::Config(format!(
                "pulse year {} must precede the horizon year {}",
                self.pulse_year, self.horizon_year
            )));
        }
        if self.horizon_year > scenario.end_year() {
            return Err(EngineError::Config(format!(
                "horizon year {} exceeds the scenario end {}",
                self.horizon_year,
                scenario.end_year()
            )));
        }
        Ok(())
    }
}

/// Convergence diagnostics of the damage NPV sum.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SccDiagnostics {
    /// Share of the global NPV contributed by the last ten horizon years.
    /// Large values mean the horizon truncates a still-growing tail.
    pub truncation_last_decade_npv_share: f64,
}

/// National and global social costs of carbon for one pulse year,
/// in USD-2005 per tonne of carbon.
#[derive(Debug, Clone)]
pub struct SccTable {
    pub pulse_year: i32,
    countries: Vec<CountryId>,
    scc: Vec<f64>,
    global_scc: f64,
    pub diagnostics: SccDiagnostics,
}

impl SccTable {
    /// Assemble a table from externally supplied national values, e.g. to
    /// run the liability attribution on published estimates. The global
    /// value is their sum.
    pub fn from_national_values(
        pulse_year: i32,
        countries: Vec<CountryId>,
        scc: Vec<f64>,
    ) -> Result<SccTable> {
        if countries.len() != scc.len() || countries.is_empty() {
            return Err(EngineError::Data(
                "SCC table needs one value per country".into(),
            ));
        }
        let global_scc = scc.iter().sum();
        Ok(SccTable {
            pulse_year,
            countries,
            scc,
            global_scc,
            diagnostics: SccDiagnostics {
                truncation_last_decade_npv_share: 0.0,
            },
        })
    }

    pub fn countries(&self) -> &[CountryId] {
        &self.countries
    }

    pub fn scc(&self, c: usize) -> f64 {
        self.scc[c]
    }

    pub fn scc_values(&self) -> &[f64] {
        &self.scc
    }

    pub fn global_scc(&self) -> f64 {
        self.global_scc
    }

    pub fn num_countries(&self) -> usize {
        self.countries.len()
    }
}

/// Inputs shared by every pulse year: the scenario, its precomputed economy,
/// the climate and impact models, and the baseline trajectory.
pub struct SccContext<'a> {
    pub scenario: &'a Scenario,
    pub economy: &'a EconomyPath,
    pub climate: &'a ClimateParams,
    pub init: &'a ClimateInit,
    pub impact: &'a BmaImpact,
}

impl<'a> SccContext<'a> {
    pub fn baseline(&self, income_elasticity: f64) -> Result<WorldTrajectory> {
        run_trajectory(
            self.scenario,
            self.economy,
            self.climate,
            self.init,
            self.impact,
            income_elasticity,
            None,
        )
    }
}

fn scc_from_runs(
    base: &WorldTrajectory,
    pulsed: &WorldTrajectory,
    discount: &DiscountSchedule,
    settings: &SccSettings,
) -> SccTable {
    let start = base.start_year();
    let p = (settings.pulse_year - start) as usize;
    let horizon = (settings.horizon_year - start) as usize;
    let pulse_tc = settings.pulse_size_mtc * TC_PER_MTC;
    let nc = base.num_countries();

    let mut scc = Vec::with_capacity(nc);
    let mut tail = 0.0;
    let mut total = 0.0;
    let tail_start = horizon.saturating_sub(9);
    for c in 0..nc {
        let mut npv = 0.0;
        let mut factor = 1.0;
        for s in p + 1..=horizon {
            factor /= 1.0 + discount.rate(c, s);
            let marginal = (pulsed.damages_usd(c, s) - base.damages_usd(c, s)) * factor;
            npv += marginal;
            total += marginal;
            if s >= tail_start {
                tail += marginal;
            }
        }
        scc.push(npv / pulse_tc);
    }
    let global_scc: f64 = scc.iter().sum();
    let truncation = if total != 0.0 { tail / total } else { 0.0 };
    SccTable {
        pulse_year: settings.pulse_year,
        countries: base.countries().to_vec(),
        scc,
        global_scc,
        diagnostics: SccDiagnostics {
            truncation_last_decade_npv_share: truncation,
        },
    }
}

/// Compute the SCC table for one pulse year.
pub fn compute_scc(ctx: &SccContext<'_>, settings: &SccSettings) -> Result<SccTable> {
    let tables = scc_path(ctx, settings, &[settings.pulse_year])?;
    Ok(tables.into_iter().next().unwrap())
}

/// Compute SCC tables for several pulse years against one shared baseline.
/// Pulse runs are independent and execute in parallel; results come back in
/// the order of `pulse_years`.
pub fn scc_path(
    ctx: &SccContext<'_>,
    settings: &SccSettings,
    pulse_years: &[i32],
) -> Result<Vec<SccTable>> {
    if pulse_years.is_empty() {
        return Err(EngineError::Config("no pulse years requested".into()));
    }
    for &year in pulse_years {
        let s = SccSettings {
            pulse_year: year,
            ..*settings
        };
        s.validate(ctx.scenario)?;
    }
    let base = ctx.baseline(settings.income_elasticity)?;
    let discount = ramsey_rates(ctx.economy, settings.prtp, settings.emuc)?;

    pulse_years
        .par_iter()
        .map(|&year| {
            let s = SccSettings {
                pulse_year: year,
                ..*settings
            };
            let pulsed = run_trajectory(
                ctx.scenario,
                ctx.economy,
                ctx.climate,
                ctx.init,
                ctx.impact,
                s.income_elasticity,
                Some(Pulse {
                    year,
                    size_mtc: s.pulse_size_mtc,
                }),
            )?;
            Ok(scc_from_runs(&base, &pulsed, &discount, &s))
        })
        .collect()
}
