//! Scenario economy: gross output, emissions, and growth paths.
//!
//! Climate damage does not feed back on output or emissions here. Gross GDP
//! and emissions are functions of the scenario alone, so they are computed
//! once per scenario and shared read-only across every pulse run. This is
//! what makes marginal damages exactly linear in the pulse bookkeeping and
//! keeps discount schedules identical between base and pulse runs.

use crate::scenario::Scenario;
use crate::units::{PERSONS_PER_MILLION, TC_PER_MTC};

/// One country-year of the gross (pre-damage) economy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountryYearState {
    /// Population, millions of persons.
    pub population_millions: f64,
    /// Per-capita income, USD per person per year.
    pub income_per_capita: f64,
    /// Gross output, USD per year.
    pub gdp_gross: f64,
    /// Industrial emissions, MtC per year.
    pub emissions_mtc: f64,
}

/// Precomputed gross economy for a scenario: per-country GDP, emissions and
/// income growth over the full grid.
#[derive(Debug, Clone)]
pub struct EconomyPath {
    num_years: usize,
    /// states[c][t]
    states: Vec<Vec<CountryYearState>>,
    /// World emissions per year, MtC.
    global_emissions_mtc: Vec<f64>,
    /// World gross output per year, USD.
    global_gdp: Vec<f64>,
    /// growth[c][t]: per-capita income growth from year t-1 to t; zero at t=0.
    growth: Vec<Vec<f64>>,
}

impl EconomyPath {
    pub fn from_scenario(scenario: &Scenario) -> EconomyPath {
        let nc = scenario.num_countries();
        let ny = scenario.num_years();
        let mut states = Vec::with_capacity(nc);
        let mut growth = Vec::with_capacity(nc);
        for c in 0..nc {
            let mut row = Vec::with_capacity(ny);
            let mut g = Vec::with_capacity(ny);
            for t in 0..ny {
                let population_millions = scenario.population(c, t);
                let income_per_capita = scenario.income(c, t);
                let gdp_gross = population_millions * PERSONS_PER_MILLION * income_per_capita;
                let emissions_mtc = gdp_gross * scenario.intensity(c, t) / TC_PER_MTC;
                row.push(CountryYearState {
                    population_millions,
                    income_per_capita,
                    gdp_gross,
                    emissions_mtc,
                });
                g.push(if t == 0 {
                    0.0
                } else {
                    scenario.income(c, t) / scenario.income(c, t - 1) - 1.0
                });
            }
            states.push(row);
            growth.push(g);
        }
        let mut global_emissions_mtc = Vec::with_capacity(ny);
        let mut global_gdp = Vec::with_capacity(ny);
        for t in 0..ny {
            global_emissions_mtc.push((0..nc).map(|c| states[c][t].emissions_mtc).sum());
            global_gdp.push((0..nc).map(|c| states[c][t].gdp_gross).sum());
        }
        EconomyPath {
            num_years: ny,
            states,
            global_emissions_mtc,
            global_gdp,
            growth,
        }
    }

    pub fn num_years(&self) -> usize {
        self.num_years
    }

    pub fn num_countries(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, c: usize, t: usize) -> &CountryYearState {
        &self.states[c][t]
    }

    pub fn global_emissions_mtc(&self, t: usize) -> f64 {
        self.global_emissions_mtc[t]
    }

    pub fn global_gdp(&self, t: usize) -> f64 {
        self.global_gdp[t]
    }

    /// Per-capita income growth rate from year t-1 to t (zero at t = 0).
    /// Computed from gross scenario income, so it is identical in base and
    /// pulse runs.
    pub fn growth_rate(&self, c: usize, t: usize) -> f64 {
        self.growth[c][t]
    }
}
