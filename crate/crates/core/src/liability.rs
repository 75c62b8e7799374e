//! Liability accounting: who owes whom for emitted carbon.
//!
//! Harm done is a country's emissions priced at everyone else's social cost;
//! damage suffered is the country's own social cost applied to everyone
//! else's emissions. Net liability is their difference, and sums to zero
//! across the world because every self-term cancels.
//!
//! Historical debt extends the same attribution backward: each past emission
//! year is perturbed by a pulse, the marginal damages are followed to the
//! evaluation year, and interest is charged on the unpaid balance at the
//! country-specific discount rate. Past damages are not discounted; they
//! accrue interest instead.

use rayon::prelude::*;

use crate::climate::{ClimateInit, ClimateParams};
use crate::economy::EconomyPath;
use crate::error::{EngineError, Result};
use crate::impact::BmaImpact;
use crate::scc::{ramsey_rates, SccTable};
use crate::scenario::{CountryId, HistoricalEmissions, Scenario, HISTORY_END_YEAR, HISTORY_START_YEAR};
use crate::trajectory::{run_trajectory, Pulse};
use crate::units::TC_PER_MTC;

/// Per-country liability position for one evaluation year, USD/yr.
#[derive(Debug, Clone)]
pub struct LiabilityReport {
    pub evaluation_year: i32,
    countries: Vec<CountryId>,
    harm_done: Vec<f64>,
    damage_suffered: Vec<f64>,
    net_liability: Vec<f64>,
    gdp: Vec<f64>,
}

impl LiabilityReport {
    pub fn countries(&self) -> &[CountryId] {
        &self.countries
    }

    pub fn num_countries(&self) -> usize {
        self.countries.len()
    }

    /// Externality this country imposes on the rest of the world, USD/yr.
    pub fn harm_done(&self, c: usize) -> f64 {
        self.harm_done[c]
    }

    /// Externality the rest of the world imposes on this country, USD/yr.
    pub fn damage_suffered(&self, c: usize) -> f64 {
        self.damage_suffered[c]
    }

    pub fn net_liability(&self, c: usize) -> f64 {
        self.net_liability[c]
    }

    pub fn gdp(&self, c: usize) -> f64 {
        self.gdp[c]
    }

    pub fn net_over_gdp(&self, c: usize) -> f64 {
        self.net_liability[c] / self.gdp[c]
    }

    /// Largest gross burden relative to output, a reported diagnostic.
    pub fn max_gross_share(&self) -> f64 {
        (0..self.num_countries())
            .map(|c| self.harm_done[c] / self.gdp[c])
            .fold(0.0, f64::max)
    }

    /// Net liabilities cancel worldwide; the residual is pure rounding.
    pub fn zero_sum_residual(&self) -> f64 {
        let total: f64 = self.net_liability.iter().sum();
        let scale: f64 = self.net_liability.iter().map(|v| v.abs()).sum();
        if scale == 0.0 {
            0.0
        } else {
            total / scale
        }
    }
}

/// Price each country's emissions at the others' social costs.
///
/// `emissions_tc` is the evaluation year's emissions in tonnes of carbon,
/// `gdp` the same year's gross output in USD. Country order must match the
/// SCC table.
pub fn blame_matrix(
    scc: &SccTable,
    emissions_tc: &[f64],
    gdp: &[f64],
    evaluation_year: i32,
) -> Result<LiabilityReport> {
    let nc = scc.num_countries();
    if emissions_tc.len() != nc || gdp.len() != nc {
        return Err(EngineError::Data(format!(
            "liability inputs disagree on country count: scc {nc}, emissions {}, gdp {}",
            emissions_tc.len(),
            gdp.len()
        )));
    }
    if gdp.iter().any(|&y| !(y > 0.0)) {
        return Err(EngineError::Data(
            "liability normalization needs positive GDP for every country".into(),
        ));
    }
    let total_scc: f64 = scc.scc_values().iter().sum();
    let total_emissions: f64 = emissions_tc.iter().sum();
    let mut harm_done = Vec::with_capacity(nc);
    let mut damage_suffered = Vec::with_capacity(nc);
    let mut net_liability = Vec::with_capacity(nc);
    for c in 0..nc {
        let h = emissions_tc[c] * (total_scc - scc.scc(c));
        let d = scc.scc(c) * (total_emissions - emissions_tc[c]);
        harm_done.push(h);
        damage_suffered.push(d);
        net_liability.push(h - d);
    }
    Ok(LiabilityReport {
        evaluation_year,
        countries: scc.countries().to_vec(),
        harm_done,
        damage_suffered,
        net_liability,
        gdp: gdp.to_vec(),
    })
}

/// Share decomposition: a country owes on net exactly when its share of
/// world emissions exceeds its share of the world social cost.
pub fn share_gap(scc: &SccTable, emissions_tc: &[f64], c: usize) -> f64 {
    let total_scc: f64 = scc.scc_values().iter().sum();
    let total_emissions: f64 = emissions_tc.iter().sum();
    emissions_tc[c] / total_emissions - scc.scc(c) / total_scc
}

/// Settings for the historical debt computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DebtSettings {
    pub prtp: f64,
    pub emuc: f64,
    pub income_elasticity: f64,
    pub pulse_size_mtc: f64,
    /// Damages and interest are followed through this year. The emission
    /// window itself is fixed by the history data.
    pub evaluation_year: i32,
}

impl Default for DebtSettings {
    fn default() -> Self {
        DebtSettings {
            prtp: 0.015,
            emuc: 1.5,
            income_elasticity: -0.36,
            pulse_size_mtc: 10.0,
            evaluation_year: HISTORY_END_YEAR,
        }
    }
}

/// Accumulated climate debt per country, and the marginal debt of one tonne
/// by emission year.
#[derive(Debug, Clone)]
pub struct DebtLedger {
    pub evaluation_year: i32,
    countries: Vec<CountryId>,
    /// Owed for harm done to others over the window, USD.
    gross_debt: Vec<f64>,
    /// Suffered from others' emissions over the window, USD.
    damage_suffered: Vec<f64>,
    net_debt: Vec<f64>,
    /// marginal_debt[t - first_emission_year]: USD per tC emitted in t,
    /// interest included.
    marginal_debt: Vec<f64>,
    first_emission_year: i32,
}

impl DebtLedger {
    pub fn countries(&self) -> &[CountryId] {
        &self.countries
    }

    pub fn num_countries(&self) -> usize {
        self.countries.len()
    }

    pub fn gross_debt(&self, c: usize) -> f64 {
        self.gross_debt[c]
    }

    pub fn damage_suffered(&self, c: usize) -> f64 {
        self.damage_suffered[c]
    }

    pub fn net_debt(&self, c: usize) -> f64 {
        self.net_debt[c]
    }

    pub fn first_emission_year(&self) -> i32 {
        self.first_emission_year
    }

    pub fn emission_years(&self) -> impl Iterator<Item = i32> + '_ {
        self.first_emission_year..=self.evaluation_year
    }

    /// Debt per tonne emitted in `year`, compounded to the evaluation year.
    pub fn marginal_debt_per_tc(&self, year: i32) -> f64 {
        self.marginal_debt[(year - self.first_emission_year) as usize]
    }

    pub fn zero_sum_residual(&self) -> f64 {
        let total: f64 = self.net_debt.iter().sum();
        let scale: f64 = self.net_debt.iter().map(|v| v.abs()).sum();
        if scale == 0.0 {
            0.0
        } else {
            total / scale
        }
    }
}

/// Compute climate debt accumulated over the historical emission window.
///
/// For each emission year, a pulse perturbs that year's global emissions;
/// the per-country marginal damages through the evaluation year, compounded
/// forward at each country's Ramsey rate, give that year's marginal debt per
/// tonne. Countries are then charged for their recorded emissions priced at
/// the others' marginal debts, mirroring the liability attribution.
pub fn historical_debt(
    scenario: &Scenario,
    economy: &EconomyPath,
    climate: &ClimateParams,
    init: &ClimateInit,
    impact: &BmaImpact,
    history: &HistoricalEmissions,
    settings: &DebtSettings,
) -> Result<DebtLedger> {
    let eval_year = settings.evaluation_year;
    if eval_year < HISTORY_START_YEAR || eval_year > HISTORY_END_YEAR {
        return Err(EngineError::Config(format!(
            "debt evaluation year {eval_year} outside the history window \
             {HISTORY_START_YEAR}-{HISTORY_END_YEAR}"
        )));
    }
    if !scenario.contains_year(HISTORY_START_YEAR) || !scenario.contains_year(eval_year) {
        return Err(EngineError::Data(format!(
            "scenario {} does not cover the emission window {HISTORY_START_YEAR}-{eval_year}",
            scenario.id()
        )));
    }
    for country in history.countries() {
        if scenario.countries().binary_search(country).is_err() {
            return Err(EngineError::Data(format!(
                "historical emissions name {country}, which the scenario does not contain"
            )));
        }
    }

    let nc = scenario.num_countries();
    let discount = ramsey_rates(economy, settings.prtp, settings.emuc)?;
    let base = run_trajectory(
        scenario,
        economy,
        climate,
        init,
        impact,
        settings.income_elasticity,
        None,
    )?;
    let eval_idx = scenario.year_index(eval_year)?;
    let pulse_tc = settings.pulse_size_mtc * TC_PER_MTC;

    // Marginal country debt per tonne emitted in each year: md[t][c].
    let emission_years: Vec<i32> = (HISTORY_START_YEAR..=eval_year).collect();
    let md: Vec<Vec<f64>> = emission_years
        .par_iter()
        .map(|&year| {
            let pulsed = run_trajectory(
                scenario,
                economy,
                climate,
                init,
                impact,
                settings.income_elasticity,
                Some(Pulse {
                    year,
                    size_mtc: settings.pulse_size_mtc,
                }),
            )?;
            let start_idx = scenario.year_index(year)?;
            let mut per_country = vec![0.0_f64; nc];
            for c in 0..nc {
                // Walk backward from the evaluation year so the interest
                // product grows one factor per step.
                let mut acc = 0.0;
                let mut interest = 1.0;
                for s in (start_idx..=eval_idx).rev() {
                    let marginal = (pulsed.damages_usd(c, s) - base.damages_usd(c, s)) / pulse_tc;
                    acc += marginal * interest;
                    if s > start_idx {
                        interest *= 1.0 + discount.rate(c, s);
                    }
                }
                per_country[c] = acc;
            }
            Ok(per_country)
        })
        .collect::<Result<Vec<_>>>()?;

    let marginal_debt: Vec<f64> = md.iter().map(|per_country| per_country.iter().sum()).collect();

    // Attribution: a country's gross debt prices its own recorded emissions
    // at the marginal debts of everyone else, year by year.
    let mut gross_debt = vec![0.0_f64; nc];
    let mut damage_suffered = vec![0.0_f64; nc];
    for (yi, &year) in emission_years.iter().enumerate() {
        let emissions_tc: Vec<f64> = scenario
            .countries()
            .iter()
            .map(|&country| history.emissions_mtc(country, year) * TC_PER_MTC)
            .collect();
        let total_emissions: f64 = emissions_tc.iter().sum();
        let total_md: f64 = marginal_debt[yi];
        for c in 0..nc {
            gross_debt[c] += emissions_tc[c] * (total_md - md[yi][c]);
            damage_suffered[c] += md[yi][c] * (total_emissions - emissions_tc[c]);
        }
    }
    let net_debt: Vec<f64> = gross_debt
        .iter()
        .zip(&damage_suffered)
        .map(|(g, d)| g - d)
        .collect();

    Ok(DebtLedger {
        evaluation_year: eval_year,
        countries: scenario.countries().to_vec(),
        gross_debt,
        damage_suffered,
        net_debt,
        marginal_debt,
        first_emission_year: HISTORY_START_YEAR,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::CountryTrack;
    use approx::assert_relative_eq;

    fn toy_scc(values: &[f64]) -> SccTable {
        let countries = (0..values.len())
            .map(|i| {
                let c = (b'A' + i as u8) as char;
                CountryId::new(&format!("A{c}{c}")).unwrap()
            })
            .collect();
        SccTable::from_national_values(2015, countries, values.to_vec()).unwrap()
    }

    #[test]
    fn two_country_blame_arithmetic() {
        let scc = toy_scc(&[1.0, 3.0]);
        let emissions = [10.0, 5.0];
        let gdp = [100.0, 100.0];
        let report = blame_matrix(&scc, &emissions, &gdp, 2015).unwrap();
        assert_eq!(report.harm_done(0), 30.0);
        assert_eq!(report.damage_suffered(0), 5.0);
        assert_eq!(report.net_liability(0), 25.0);
        assert_eq!(report.net_liability(1), -25.0);
        assert_eq!(
            report.net_liability(0) + report.net_liability(1),
            0.0
        );
    }

    #[test]
    fn one_country_world_has_no_externalities() {
        let scc = toy_scc(&[5.0]);
        let report = blame_matrix(&scc, &[100.0], &[1.0e9], 2015).unwrap();
        assert_eq!(report.harm_done(0), 0.0);
        assert_eq!(report.damage_suffered(0), 0.0);
        assert_eq!(report.net_liability(0), 0.0);
        assert_eq!(report.zero_sum_residual(), 0.0);
    }

    #[test]
    fn liability_scales_linearly_with_scc() {
        let emissions = [12.0, 7.0, 31.0, 2.0];
        let gdp = [1.0e9, 2.0e9, 3.0e9, 4.0e9];
        let base = blame_matrix(&toy_scc(&[1.0, 2.0, 0.5, 4.0]), &emissions, &gdp, 2015).unwrap();
        let tripled =
            blame_matrix(&toy_scc(&[3.0, 6.0, 1.5, 12.0]), &emissions, &gdp, 2015).unwrap();
        for c in 0..4 {
            assert_relative_eq!(
                tripled.harm_done(c),
                3.0 * base.harm_done(c),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                tripled.net_liability(c),
                3.0 * base.net_liability(c),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn sign_matches_share_gap() {
        let scc = toy_scc(&[1.0, 2.0, 0.5, 4.0]);
        let emissions = [12.0, 7.0, 31.0, 2.0];
        let gdp = [1.0e9; 4];
        let report = blame_matrix(&scc, &emissions, &gdp, 2015).unwrap();
        for c in 0..4 {
            let gap = share_gap(&scc, &emissions, c);
            assert_eq!(
                report.net_liability(c) > 0.0,
                gap > 0.0,
                "country {c}: L {} gap {gap}",
                report.net_liability(c)
            );
        }
    }

    #[test]
    fn zero_sum_on_generic_inputs() {
        let scc = toy_scc(&[1.3, 2.7, 0.4, 4.9, 2.2]);
        let emissions = [12.5, 7.25, 31.0, 2.125, 19.5];
        let gdp = [1.0e9; 5];
        let report = blame_matrix(&scc, &emissions, &gdp, 2015).unwrap();
        assert!(report.zero_sum_residual().abs() < 1e-12);
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let scc = toy_scc(&[1.0, 2.0]);
        assert!(blame_matrix(&scc, &[1.0], &[1.0, 2.0], 2015).is_err());
        assert!(blame_matrix(&scc, &[1.0, 2.0], &[1.0, 0.0], 2015).is_err());
    }

    fn debt_fixture() -> (Scenario, HistoricalEmissions) {
        let a = CountryTrack {
            population: vec![800.0; 151],
            income: (0..151).map(|t| 1200.0 * 1.02_f64.powi(t)).collect(),
            intensity: vec![4.0e-4; 151],
        };
        let b = CountryTrack {
            population: vec![120.0; 151],
            income: (0..151).map(|t| 25000.0 * 1.015_f64.powi(t)).collect(),
            intensity: vec![1.5e-4; 151],
        };
        let z = CountryTrack {
            population: vec![40.0; 151],
            income: (0..151).map(|t| 8000.0 * 1.018_f64.powi(t)).collect(),
            intensity: vec![0.0; 151],
        };
        let scenario = Scenario::from_parts(
            "debt-fixture",
            1950,
            2100,
            false,
            vec![
                (CountryId::new("AAA").unwrap(), "A".into()),
                (CountryId::new("BBB").unwrap(), "B".into()),
                (CountryId::new("ZZZ").unwrap(), "Z".into()),
            ],
            vec![a, b, z],
        )
        .unwrap();
        // History mirrors the scenario's own emissions for AAA and BBB; ZZZ
        // appears with zero emissions.
        let economy = EconomyPath::from_scenario(&scenario);
        let mut series = vec![Vec::new(), Vec::new(), Vec::new()];
        for year in HISTORY_START_YEAR..=HISTORY_END_YEAR {
            let t = (year - 1950) as usize;
            series[0].push(economy.state(0, t).emissions_mtc);
            series[1].push(economy.state(1, t).emissions_mtc);
            series[2].push(0.0);
        }
        let history = HistoricalEmissions::from_parts(
            vec![
                CountryId::new("AAA").unwrap(),
                CountryId::new("BBB").unwrap(),
                CountryId::new("ZZZ").unwrap(),
            ],
            series,
        )
        .unwrap();
        (scenario, history)
    }

    fn run_debt(settings: &DebtSettings) -> (DebtLedger, Scenario) {
        let (scenario, history) = debt_fixture();
        let economy = EconomyPath::from_scenario(&scenario);
        let ledger = historical_debt(
            &scenario,
            &economy,
            &ClimateParams::default(),
            &ClimateInit::default(),
            &BmaImpact::table_average(1.0).unwrap(),
            &history,
            settings,
        )
        .unwrap();
        (ledger, scenario)
    }

    #[test]
    fn marginal_debt_grows_as_the_emission_year_recedes() {
        let (ledger, _) = run_debt(&DebtSettings::default());
        let mut last = f64::INFINITY;
        for year in ledger.emission_years() {
            let v = ledger.marginal_debt_per_tc(year);
            assert!(
                v < last,
                "marginal debt not strictly decreasing toward the present at {year}: {v} vs {last}"
            );
            assert!(v > 0.0, "marginal debt nonpositive at {year}");
            last = v;
        }
    }

    #[test]
    fn final_year_marginal_debt_is_the_single_year_damage() {
        let settings = DebtSettings::default();
        let (ledger, scenario) = run_debt(&settings);
        // Independent recomputation: one pulse run at the evaluation year,
        // same-year damage difference only, no interest.
        let economy = EconomyPath::from_scenario(&scenario);
        let impact = BmaImpact::table_average(1.0).unwrap();
        let base = run_trajectory(
            &scenario,
            &economy,
            &ClimateParams::default(),
            &ClimateInit::default(),
            &impact,
            settings.income_elasticity,
            None,
        )
        .unwrap();
        let pulsed = run_trajectory(
            &scenario,
            &economy,
            &ClimateParams::default(),
            &ClimateInit::default(),
            &impact,
            settings.income_elasticity,
            Some(Pulse {
                year: settings.evaluation_year,
                size_mtc: settings.pulse_size_mtc,
            }),
        )
        .unwrap();
        let t = scenario.year_index(settings.evaluation_year).unwrap();
        let expected: f64 = (0..3)
            .map(|c| {
                (pulsed.damages_usd(c, t) - base.damages_usd(c, t))
                    / (settings.pulse_size_mtc * TC_PER_MTC)
            })
            .sum();
        assert_relative_eq!(
            ledger.marginal_debt_per_tc(settings.evaluation_year),
            expected,
            max_relative = 1e-12
        );
        assert!(expected > 0.0);
        // The same-year damage of one tonne is tiny next to older vintages.
        assert!(expected < ledger.marginal_debt_per_tc(HISTORY_START_YEAR) / 10.0);
    }

    #[test]
    fn zero_emitter_has_zero_gross_debt_and_negative_net() {
        let (ledger, _) = run_debt(&DebtSettings::default());
        assert_eq!(ledger.gross_debt(2), 0.0);
        assert!(ledger.damage_suffered(2) > 0.0);
        assert!(ledger.net_debt(2) < 0.0);
    }

    #[test]
    fn net_debt_is_zero_sum() {
        let (ledger, _) = run_debt(&DebtSettings::default());
        assert!(
            ledger.zero_sum_residual().abs() < 1e-9,
            "residual {}",
            ledger.zero_sum_residual()
        );
    }

    #[test]
    fn unknown_history_country_rejected() {
        let (scenario, _) = debt_fixture();
        let economy = EconomyPath::from_scenario(&scenario);
        let rogue = HistoricalEmissions::from_parts(
            vec![CountryId::new("QQQ").unwrap()],
            vec![vec![1.0; 56]],
        )
        .unwrap();
        let err = historical_debt(
            &scenario,
            &economy,
            &ClimateParams::default(),
            &ClimateInit::default(),
            &BmaImpact::table_average(1.0).unwrap(),
            &rogue,
            &DebtSettings::default(),
        );
        assert!(err.is_err());
    }
}
