//! Deterministic synthetic world generator.
//!
//! Twenty countries ("XAA" through "XAT") spanning 1950 to 2300, with a
//! geometric income ladder, catch-up growth that decays toward a common
//! floor, a hump-shaped carbon intensity in income with autonomous
//! decarbonization, and one zero-carbon country. The world is calibrated so
//! that 2010 gross product is 60 trillion USD and 2010 emissions are
//! 10 GtC. Everything is a closed-form function of country index and year;
//! regeneration is bit-identical on every platform.

use crate::economy::EconomyPath;
use crate::error::Result;
use crate::impact::MetaDataset;
use crate::scenario::{
    CountryId, CountryTrack, HistoricalEmissions, Scenario, HISTORY_END_YEAR, HISTORY_START_YEAR,
};

pub const SYNTHETIC_START_YEAR: i32 = 1950;
pub const SYNTHETIC_END_YEAR: i32 = 2300;
pub const SYNTHETIC_COUNTRY_COUNT: usize = 20;
/// Calibration anchors: world gross product and emissions in 2010.
pub const CALIBRATION_YEAR: i32 = 2010;
pub const CALIBRATION_WORLD_GDP_USD: f64 = 60e12;
pub const CALIBRATION_WORLD_EMISSIONS_MTC: f64 = 10_000.0;

/// The scenario family: the central path and high/low growth variants
/// shifting every country's initial growth rate by 0.8 percentage points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthVariant {
    Central,
    High,
    Low,
}

impl GrowthVariant {
    fn id(self) -> &'static str {
        match self {
            GrowthVariant::Central => "synthetic20",
            GrowthVariant::High => "synthetic20_high",
            GrowthVariant::Low => "synthetic20_low",
        }
    }

    fn growth_shift(self) -> f64 {
        match self {
            GrowthVariant::Central => 0.0,
            GrowthVariant::High => 0.008,
            GrowthVariant::Low => -0.008,
        }
    }
}

fn country_code(i: usize) -> CountryId {
    let code = format!("XA{}", (b'A' + i as u8) as char);
    CountryId::new(&code).unwrap()
}

fn country_name(i: usize) -> String {
    format!("Synthetica {}", (b'A' + i as u8) as char)
}

/// Initial per-capita growth rate by income rank: poor countries catch up
/// fast, rich ones grow slowly, and one poor country stagnates.
fn initial_growth(i: usize) -> f64 {
    if i == 1 {
        0.008
    } else {
        0.035 - 0.020 * i as f64 / 19.0
    }
}

/// Growth decays from its initial rate toward a common 1.5 percent floor.
fn growth_rate(i: usize, k: usize, shift: f64) -> f64 {
    0.015 + (initial_growth(i) + shift - 0.015) * 0.99f64.powi(k as i32)
}

/// Population growth fades toward zero everywhere; poor countries start
/// faster.
fn population_growth(i: usize, k: usize) -> f64 {
    let initial = 0.025 - 0.018 * i as f64 / 19.0;
    initial * 0.985f64.powi(k as i32)
}

fn initial_population_millions(i: usize) -> f64 {
    200.0 - 160.0 * i as f64 / 19.0
}

/// Carbon intensity of output peaks for middle-income countries and falls
/// on both sides of the hump.
fn intensity_shape(income: f64) -> f64 {
    let y = income / 6_000.0;
    4.0 * y.powf(1.2) / (1.0 + y.powf(2.4))
}

/// Autonomous decarbonization: a steady 1 percent per year. Output growth
/// outpaces it until mid-century, so world emissions peak around 2060 and
/// decline thereafter while cumulative emissions keep inching up, keeping
/// warming close to proportional to the cumulative total.
fn decarbonization(year: i32) -> f64 {
    0.99f64.powi(year - CALIBRATION_YEAR)
}

/// Per-country fuel-mix spread, decoupled from income rank; the eleventh
/// country runs on carbon-free energy.
fn intensity_multiplier(i: usize) -> f64 {
    if i == 10 {
        0.0
    } else {
        0.7 + 0.6 * ((i * 7 + 3) % 19) as f64 / 18.0
    }
}

fn build_world(variant: GrowthVariant) -> Scenario {
    let n_years = (SYNTHETIC_END_YEAR - SYNTHETIC_START_YEAR + 1) as usize;
    let anchor = (CALIBRATION_YEAR - SYNTHETIC_START_YEAR) as usize;
    let shift = variant.growth_shift();

    let mut populations = Vec::with_capacity(SYNTHETIC_COUNTRY_COUNT);
    let mut incomes = Vec::with_capacity(SYNTHETIC_COUNTRY_COUNT);
    for i in 0..SYNTHETIC_COUNTRY_COUNT {
        let mut pop = Vec::with_capacity(n_years);
        let mut value = initial_population_millions(i);
        for k in 0..n_years {
            pop.push(value);
            value *= 1.0 + population_growth(i, k);
        }
        populations.push(pop);

        let mut income = Vec::with_capacity(n_years);
        let mut level = 1.0f64;
        for k in 0..n_years {
            income.push(level);
            level *= 1.0 + growth_rate(i, k, shift);
        }
        // Anchor each country to the 2010 income ladder: 500 to 45000
        // dollars across the twenty ranks.
        let ladder = 500.0 * 90f64.powf(i as f64 / 19.0);
        let anchor_scale = ladder / income[anchor];
        for y in income.iter_mut() {
            *y *= anchor_scale;
        }
        incomes.push(income);
    }

    // One multiplicative rescale hits the world-GDP anchor exactly while
    // preserving every growth rate and income ratio.
    let raw_world_gdp: f64 = (0..SYNTHETIC_COUNTRY_COUNT)
        .map(|i| populations[i][anchor] * 1e6 * incomes[i][anchor])
        .sum();
    let gdp_scale = CALIBRATION_WORLD_GDP_USD / raw_world_gdp;
    for income in incomes.iter_mut() {
        for y in income.iter_mut() {
            *y *= gdp_scale;
        }
    }

    // Same trick for emissions, via a common intensity prefactor.
    let raw_emissions_tc: f64 = (0..SYNTHETIC_COUNTRY_COUNT)
        .map(|i| {
            let gdp = populations[i][anchor] * 1e6 * incomes[i][anchor];
            gdp * intensity_multiplier(i) * intensity_shape(incomes[i][anchor])
        })
        .sum();
    let intensity_scale = CALIBRATION_WORLD_EMISSIONS_MTC * 1e6 / raw_emissions_tc;

    let mut countries = Vec::with_capacity(SYNTHETIC_COUNTRY_COUNT);
    let mut tracks = Vec::with_capacity(SYNTHETIC_COUNTRY_COUNT);
    for i in 0..SYNTHETIC_COUNTRY_COUNT {
        let intensity: Vec<f64> = (0..n_years)
            .map(|k| {
                let year = SYNTHETIC_START_YEAR + k as i32;
                intensity_scale
                    * intensity_multiplier(i)
                    * intensity_shape(incomes[i][k])
                    * decarbonization(year)
            })
            .collect();
        countries.push((country_code(i), country_name(i)));
        tracks.push(CountryTrack {
            population: populations[i].clone(),
            income: incomes[i].clone(),
            intensity,
        });
    }
    Scenario::from_parts(
        variant.id(),
        SYNTHETIC_START_YEAR,
        SYNTHETIC_END_YEAR,
        false,
        countries,
        tracks,
    )
    .expect("synthetic world must validate")
}

/// The central twenty-country scenario.
pub fn synthetic_world() -> Scenario {
    build_world(GrowthVariant::Central)
}

pub fn synthetic_world_variant(variant: GrowthVariant) -> Scenario {
    build_world(variant)
}

/// A two-country miniature (1950 to 2150) for quick runs and worked
/// examples: one populous middle-income emitter, one small rich economy.
pub fn toy_world() -> Scenario {
    let start = 1950;
    let end = 2150;
    let n_years = (end - start + 1) as usize;
    let mut countries = Vec::new();
    let mut tracks = Vec::new();
    let specs: [(&str, &str, f64, f64, f64, f64); 2] = [
        ("XAA", "Toyland A", 1_000.0, 2_000.0, 0.025, 3.0e-4),
        ("XAB", "Toyland B", 100.0, 30_000.0, 0.015, 1.2e-4),
    ];
    for (code, name, pop0, income0, growth, intensity0) in specs {
        let income: Vec<f64> = (0..n_years)
            .map(|k| income0 * (1.0 + growth).powi(k as i32 - 60))
            .collect();
        let intensity: Vec<f64> = (0..n_years)
            .map(|k| intensity0 * decarbonization(start + k as i32))
            .collect();
        countries.push((code.parse().unwrap(), name.to_string()));
        tracks.push(CountryTrack {
            population: vec![pop0; n_years],
            income,
            intensity,
        });
    }
    Scenario::from_parts("toy2", start, end, false, countries, tracks)
        .expect("toy world must validate")
}

/// Historical emissions for 1960 to 2015, read off the central scenario's
/// own economy so the attribution inputs and the damage model agree.
pub fn synthetic_history() -> Result<HistoricalEmissions> {
    let scenario = synthetic_world();
    let economy = EconomyPath::from_scenario(&scenario);
    let countries = scenario.countries().to_vec();
    let emissions: Vec<Vec<f64>> = (0..scenario.num_countries())
        .map(|c| {
            (HISTORY_START_YEAR..=HISTORY_END_YEAR)
                .map(|year| {
                    let t = (year - SYNTHETIC_START_YEAR) as usize;
                    economy.state(c, t).emissions_mtc
                })
                .collect()
        })
        .collect();
    HistoricalEmissions::from_parts(countries, emissions)
}

/// Synthetic warming/impact observations: a gently concave damage curve
/// with deterministic integer-hash jitter standing in for study scatter.
pub fn synthetic_meta() -> MetaDataset {
    let observations: Vec<(f64, f64)> = (0..24)
        .map(|k| {
            let t = 0.25 * (k + 1) as f64;
            // Weyl-style multiplicative hash, exact in u64 arithmetic.
            let h = ((k as u64 + 1) * 2654435761) % (1u64 << 32);
            let jitter = 0.25 * (h as f64 / (1u64 << 32) as f64 - 0.5);
            (t, -0.30 * t - 0.12 * t * t + jitter)
        })
        .collect();
    MetaDataset::new(observations).expect("synthetic meta data must validate")
}
