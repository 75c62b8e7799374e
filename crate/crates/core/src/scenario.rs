//! Scenario ingestion: per-country exogenous trajectories and historical
//! emissions.
//!
//! A scenario is a contiguous annual grid of population, per-capita income
//! and carbon intensity for a fixed set of countries. Scenarios are immutable
//! once loaded; model runs share them read-only.
//!
//! File format (see the repository README for the full schema):
//! - `<name>.csv` with header
//!   `country,year,population_millions,income_per_capita_usd2005,carbon_intensity_tc_per_usd`
//! - `<name>.toml` sidecar with `id`, `convergence`, optional `notes` and a
//!   `[names]` table mapping country codes to display names.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};

/// Minimum scenario span in years. Social-cost horizons need long
/// trajectories, so short scenarios are rejected outright.
pub const MIN_SPAN_YEARS: i32 = 100;

/// Historical emissions cover exactly this window.
pub const HISTORY_START_YEAR: i32 = 1960;
pub const HISTORY_END_YEAR: i32 = 2015;

/// ISO3-style country code: exactly three uppercase ASCII letters.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountryId([u8; 3]);

impl CountryId {
    pub fn new(code: &str) -> Result<Self> {
        let bytes = code.as_bytes();
        if bytes.len() != 3 || !bytes.iter().all(|b| b.is_ascii_uppercase()) {
            return Err(EngineError::Data(format!(
                "invalid country code {code:?}: expected exactly 3 uppercase ASCII letters"
            )));
        }
        Ok(CountryId([bytes[0], bytes[1], bytes[2]]))
    }

    pub fn as_str(&self) -> &str {
        // Constructor guarantees ASCII.
        std::str::from_utf8(&self.0).unwrap()
    }
}

impl fmt::Display for CountryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for CountryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CountryId({})", self.as_str())
    }
}

impl FromStr for CountryId {
    type Err = EngineError;
    fn from_str(s: &str) -> Result<Self> {
        CountryId::new(s)
    }
}

impl Serialize for CountryId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for CountryId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CountryId::new(&s).map_err(serde::de::Error::custom)
    }
}

/// One country's annual series, indexed by `year - start_year`.
#[derive(Debug, Clone)]
pub struct CountryTrack {
    /// Population in millions of persons.
    pub population: Vec<f64>,
    /// Per-capita income, USD per person per year.
    pub income: Vec<f64>,
    /// Carbon intensity of output, tC per USD.
    pub intensity: Vec<f64>,
}

/// A validated scenario: contiguous annual data for every country over the
/// same `[start_year, end_year]` grid.
#[derive(Debug, Clone)]
pub struct Scenario {
    id: String,
    start_year: i32,
    end_year: i32,
    convergence: bool,
    notes: String,
    countries: Vec<CountryId>,
    names: Vec<String>,
    tracks: Vec<CountryTrack>,
}

impl Scenario {
    /// Assemble a scenario from in-memory parts, enforcing every invariant.
    ///
    /// `tracks` must be parallel to `countries` and each series must span
    /// `end_year - start_year + 1` entries. Countries are re-sorted by code.
    pub fn from_parts(
        id: impl Into<String>,
        start_year: i32,
        end_year: i32,
        convergence: bool,
        countries: Vec<(CountryId, String)>,
        tracks: Vec<CountryTrack>,
    ) -> Result<Self> {
        if countries.len() != tracks.len() {
            return Err(EngineError::Data(
                "country list and track list have different lengths".into(),
            ));
        }
        let mut order: Vec<usize> = (0..countries.len()).collect();
        order.sort_by_key(|&i| countries[i].0);
        let mut s = Scenario {
            id: id.into(),
            start_year,
            end_year,
            convergence,
            notes: String::new(),
            countries: order.iter().map(|&i| countries[i].0).collect(),
            names: order.iter().map(|&i| countries[i].1.clone()).collect(),
            tracks: order.iter().map(|&i| tracks[i].clone()).collect(),
        };
        s.validate()?;
        s.notes = String::new();
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if self.end_year - self.start_year < MIN_SPAN_YEARS {
            return Err(EngineError::Data(format!(
                "scenario {}: span {}..{} is shorter than {MIN_SPAN_YEARS} years",
                self.id, self.start_year, self.end_year
            )));
        }
        if self.countries.is_empty() {
            return Err(EngineError::Data(format!(
                "scenario {}: no countries",
                self.id
            )));
        }
        for w in self.countries.windows(2) {
            if w[0] == w[1] {
                return Err(EngineError::Data(format!(
                    "scenario {}: duplicate country {}",
                    self.id, w[0]
                )));
            }
        }
        let span = self.num_years();
        for (c, track) in self.countries.iter().zip(&self.tracks) {
            if track.population.len() != span
                || track.income.len() != span
                || track.intensity.len() != span
            {
                return Err(EngineError::Data(format!(
                    "scenario {}: country {c} does not cover every year in {}..{}",
                    self.id, self.start_year, self.end_year
                )));
            }
            for i in 0..span {
                let year = self.start_year + i as i32;
                let (p, y, m) = (track.population[i], track.income[i], track.intensity[i]);
                if !(p > 0.0) || !p.is_finite() {
                    return Err(EngineError::Data(format!(
                        "scenario {}: population must be > 0 for {c} in {year} (got {p})",
                        self.id
                    )));
                }
                if !(y > 0.0) || !y.is_finite() {
                    return Err(EngineError::Data(format!(
                        "scenario {}: per-capita income must be > 0 for {c} in {year} (got {y})",
                        self.id
                    )));
                }
                if !(m >= 0.0) || !m.is_finite() {
                    return Err(EngineError::Data(format!(
                        "scenario {}: carbon intensity must be >= 0 for {c} in {year} (got {m})",
                        self.id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn end_year(&self) -> i32 {
        self.end_year
    }

    /// Number of years on the grid, inclusive of both endpoints.
    pub fn num_years(&self) -> usize {
        (self.end_year - self.start_year + 1) as usize
    }

    /// Scenario-level income-convergence toggle from the sidecar.
    pub fn convergence(&self) -> bool {
        self.convergence
    }

    pub fn notes(&self) -> &str {
        &self.notes
    }

    /// Countries in canonical (code-ascending) order.
    pub fn countries(&self) -> &[CountryId] {
        &self.countries
    }

    pub fn country_name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn num_countries(&self) -> usize {
        self.countries.len()
    }

    pub fn contains_year(&self, year: i32) -> bool {
        year >= self.start_year && year <= self.end_year
    }

    /// Index of `year` on the grid; error if outside the scenario span.
    pub fn year_index(&self, year: i32) -> Result<usize> {
        if !self.contains_year(year) {
            return Err(EngineError::Data(format!(
                "year {year} outside scenario {} span {}..{}",
                self.id, self.start_year, self.end_year
            )));
        }
        Ok((year - self.start_year) as usize)
    }

    pub fn track(&self, country_idx: usize) -> &CountryTrack {
        &self.tracks[country_idx]
    }

    /// Population in millions for country index `c` at year index `t`.
    pub fn population(&self, c: usize, t: usize) -> f64 {
        self.tracks[c].population[t]
    }

    /// Per-capita income (USD/person/yr) for country index `c` at year index `t`.
    pub fn income(&self, c: usize, t: usize) -> f64 {
        self.tracks[c].income[t]
    }

    /// Carbon intensity (tC/USD) for country index `c` at year index `t`.
    pub fn intensity(&self, c: usize, t: usize) -> f64 {
        self.tracks[c].intensity[t]
    }

    /// Gross output in USD/yr for country index `c` at year index `t`.
    pub fn gross_gdp(&self, c: usize, t: usize) -> f64 {
        self.tracks[c].population[t] * crate::units::PERSONS_PER_MILLION * self.tracks[c].income[t]
    }

    /// World gross output in USD/yr at year index `t`.
    pub fn global_gdp(&self, t: usize) -> f64 {
        (0..self.num_countries()).map(|c| self.gross_gdp(c, t)).sum()
    }

    /// Return a copy with the convergence flag replaced.
    pub fn with_convergence_flag(&self, convergence: bool) -> Scenario {
        let mut s = self.clone();
        s.convergence = convergence;
        s
    }

    /// Blend per-capita income growth toward the output-weighted global
    /// average over `horizon_years`, then rescale each year so world output
    /// matches the input scenario exactly. Population and carbon intensity
    /// are untouched.
    ///
    /// The blend weight for the growth step from year `t` to `t+1` is
    /// `min(1, (t - start) / horizon_years)`: the first step keeps each
    /// country's own rate, and from `start + horizon_years` on every country
    /// grows at the (input-scenario) global average rate before rescaling.
    pub fn apply_convergence(&self, horizon_years: i32) -> Result<Scenario> {
        if horizon_years <= 0 {
            return Err(EngineError::Config(format!(
                "convergence horizon must be positive (got {horizon_years})"
            )));
        }
        let span = self.num_years();
        let nc = self.num_countries();

        // Input growth rates g[c][t]: growth from year t to t+1.
        let mut growth = vec![vec![0.0_f64; span - 1]; nc];
        for c in 0..nc {
            for t in 0..span - 1 {
                growth[c][t] = self.income(c, t + 1) / self.income(c, t) - 1.0;
            }
        }
        // Output-weighted global average growth rate per step, using the
        // input scenario's output shares at the step's starting year.
        let mut avg_growth = vec![0.0_f64; span - 1];
        for t in 0..span - 1 {
            let total: f64 = (0..nc).map(|c| self.gross_gdp(c, t)).sum();
            avg_growth[t] = (0..nc)
                .map(|c| self.gross_gdp(c, t) / total * growth[c][t])
                .sum();
        }

        // Blended income paths, then a per-year rescale to the input world
        // output. Rescaling is exact for output because population is shared.
        let mut new_income = vec![vec![0.0_f64; span]; nc];
        for c in 0..nc {
            new_income[c][0] = self.income(c, 0);
        }
        for t in 0..span - 1 {
            let lambda = (t as f64 / horizon_years as f64).min(1.0);
            for c in 0..nc {
                let g = (1.0 - lambda) * growth[c][t] + lambda * avg_growth[t];
                new_income[c][t + 1] = new_income[c][t] * (1.0 + g);
            }
        }
        for t in 0..span {
            let target = self.global_gdp(t);
            let actual: f64 = (0..nc)
                .map(|c| self.population(c, t) * crate::units::PERSONS_PER_MILLION * new_income[c][t])
                .sum();
            let factor = target / actual;
            for c in 0..nc {
                new_income[c][t] *= factor;
            }
        }

        let mut out = self.clone();
        for c in 0..nc {
            out.tracks[c].income = new_income[c].clone();
        }
        out.validate()?;
        Ok(out)
    }
}

/// Sidecar metadata next to a scenario CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSidecar {
    pub id: String,
    pub convergence: bool,
    #[serde(default)]
    pub notes: String,
    /// Optional display names keyed by country code.
    #[serde(default)]
    pub names: BTreeMap<String, String>,
}

/// Path of the sidecar belonging to a scenario CSV: same stem, `.toml`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("toml")
}

#[derive(Debug, Deserialize)]
struct ScenarioRow {
    country: String,
    year: i32,
    population_millions: f64,
    income_per_capita_usd2005: f64,
    carbon_intensity_tc_per_usd: f64,
}

/// Load and validate a scenario from `path` plus its `.toml` sidecar.
///
/// Missing interior years are an error, never interpolated. Errors name the
/// offending line, country, or year.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let sidecar = load_sidecar(&sidecar_path(path))?;
    let display = path.display().to_string();

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| EngineError::Data(format!("{display}: {e}")))?;

    // (country, year) -> row, rejecting duplicates as we go.
    let mut per_country: BTreeMap<CountryId, BTreeMap<i32, (f64, f64, f64)>> = BTreeMap::new();
    for record in reader.deserialize::<ScenarioRow>() {
        let row = record.map_err(|e| {
            let line = e
                .position()
                .map(|p| p.line())
                .unwrap_or(0);
            EngineError::Parse {
                path: display.clone(),
                line,
                message: format!("malformed scenario row: {e}"),
            }
        })?;
        let country = CountryId::new(&row.country)?;
        let prev = per_country.entry(country).or_default().insert(
            row.year,
            (
                row.population_millions,
                row.income_per_capita_usd2005,
                row.carbon_intensity_tc_per_usd,
            ),
        );
        if prev.is_some() {
            return Err(EngineError::Data(format!(
                "{display}: duplicate row for country {country}, year {}",
                row.year
            )));
        }
    }
    if per_country.is_empty() {
        return Err(EngineError::Data(format!("{display}: no data rows")));
    }

    // The grid is defined by the file's overall min and max year; every
    // country must cover it contiguously.
    let start_year = per_country
        .values()
        .flat_map(|m| m.keys())
        .min()
        .copied()
        .unwrap();
    let end_year = per_country
        .values()
        .flat_map(|m| m.keys())
        .max()
        .copied()
        .unwrap();

    let mut countries = Vec::new();
    let mut tracks = Vec::new();
    for (country, years) in &per_country {
        let mut track = CountryTrack {
            population: Vec::with_capacity((end_year - start_year + 1) as usize),
            income: Vec::new(),
            intensity: Vec::new(),
        };
        for year in start_year..=end_year {
            match years.get(&year) {
                Some(&(p, y, m)) => {
                    track.population.push(p);
                    track.income.push(y);
                    track.intensity.push(m);
                }
                None => {
                    return Err(EngineError::Data(format!(
                        "{display}: country {country} is missing year {year} \
                         (years must be contiguous from {start_year} to {end_year})"
                    )))
                }
            }
        }
        let name = sidecar
            .names
            .get(country.as_str())
            .cloned()
            .unwrap_or_else(|| country.as_str().to_string());
        countries.push((*country, name));
        tracks.push(track);
    }

    let mut scenario = Scenario::from_parts(
        sidecar.id.clone(),
        start_year,
        end_year,
        sidecar.convergence,
        countries,
        tracks,
    )?;
    scenario.notes = sidecar.notes;
    Ok(scenario)
}

fn load_sidecar(path: &Path) -> Result<ScenarioSidecar> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| EngineError::io(path.display().to_string(), e))?;
    toml::from_str(&text).map_err(|e| {
        EngineError::Data(format!("{}: invalid scenario sidecar: {e}", path.display()))
    })
}

/// Canonical number formatting for scenario and report CSVs: Rust's shortest
/// round-trip decimal. Files written by this crate load back bit-identically.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Serialize a scenario to canonical CSV bytes: header, then rows sorted by
/// country code and year, LF line endings, shortest round-trip decimals.
pub fn scenario_to_csv(s: &Scenario) -> String {
    let mut out = String::from(
        "country,year,population_millions,income_per_capita_usd2005,carbon_intensity_tc_per_usd\n",
    );
    for (c, country) in s.countries().iter().enumerate() {
        for t in 0..s.num_years() {
            let year = s.start_year + t as i32;
            out.push_str(&format!(
                "{country},{year},{},{},{}\n",
                fmt_f64(s.population(c, t)),
                fmt_f64(s.income(c, t)),
                fmt_f64(s.intensity(c, t)),
            ));
        }
    }
    out
}

/// Serialize the sidecar to canonical TOML.
pub fn sidecar_to_toml(s: &Scenario) -> String {
    let mut out = String::new();
    out.push_str(&format!("id = {:?}\n", s.id()));
    out.push_str(&format!("convergence = {}\n", s.convergence()));
    if !s.notes().is_empty() {
        out.push_str(&format!("notes = {:?}\n", s.notes()));
    }
    out.push_str("\n[names]\n");
    for (i, c) in s.countries().iter().enumerate() {
        out.push_str(&format!("{c} = {:?}\n", s.country_name(i)));
    }
    out
}

/// Per-country annual emissions over the fixed 1960-2015 history window,
/// in MtC per year.
#[derive(Debug, Clone)]
pub struct HistoricalEmissions {
    countries: Vec<CountryId>,
    /// emissions[c][t]: MtC/yr for country c at year HISTORY_START_YEAR + t.
    emissions: Vec<Vec<f64>>,
}

impl HistoricalEmissions {
    pub fn from_parts(countries: Vec<CountryId>, emissions: Vec<Vec<f64>>) -> Result<Self> {
        let span = (HISTORY_END_YEAR - HISTORY_START_YEAR + 1) as usize;
        if countries.len() != emissions.len() {
            return Err(EngineError::Data(
                "history country list and emission series differ in length".into(),
            ));
        }
        let mut order: Vec<usize> = (0..countries.len()).collect();
        order.sort_by_key(|&i| countries[i]);
        let h = HistoricalEmissions {
            countries: order.iter().map(|&i| countries[i]).collect(),
            emissions: order.iter().map(|&i| emissions[i].clone()).collect(),
        };
        for w in h.countries.windows(2) {
            if w[0] == w[1] {
                return Err(EngineError::Data(format!(
                    "historical emissions: duplicate country {}",
                    w[0]
                )));
            }
        }
        for (c, series) in h.countries.iter().zip(&h.emissions) {
            if series.len() != span {
                return Err(EngineError::Data(format!(
                    "historical emissions: country {c} must cover every year \
                     {HISTORY_START_YEAR}..{HISTORY_END_YEAR} contiguously"
                )));
            }
            for (t, &e) in series.iter().enumerate() {
                if !(e >= 0.0) || !e.is_finite() {
                    return Err(EngineError::Data(format!(
                        "historical emissions: emissions must be >= 0 for {c} in {} (got {e})",
                        HISTORY_START_YEAR + t as i32
                    )));
                }
            }
        }
        Ok(h)
    }

    pub fn countries(&self) -> &[CountryId] {
        &self.countries
    }

    /// Emissions in MtC/yr for `country` at `year`; countries absent from the
    /// file count as zero emitters.
    pub fn emissions_mtc(&self, country: CountryId, year: i32) -> f64 {
        if year < HISTORY_START_YEAR || year > HISTORY_END_YEAR {
            return 0.0;
        }
        match self.countries.binary_search(&country) {
            Ok(c) => self.emissions[c][(year - HISTORY_START_YEAR) as usize],
            Err(_) => 0.0,
        }
    }
}

#[derive(Debug, Deserialize)]
struct HistoryRow {
    country: String,
    year: i32,
    emissions_mtc: f64,
}

/// Load historical emissions (`country,year,emissions_mtc`), requiring the
/// full contiguous 1960-2015 window for every listed country.
pub fn load_history(path: impl AsRef<Path>) -> Result<HistoricalEmissions> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| EngineError::Data(format!("{display}: {e}")))?;

    let mut per_country: BTreeMap<CountryId, BTreeMap<i32, f64>> = BTreeMap::new();
    for record in reader.deserialize::<HistoryRow>() {
        let row = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            EngineError::Parse {
                path: display.clone(),
                line,
                message: format!("malformed emissions row: {e}"),
            }
        })?;
        let country = CountryId::new(&row.country)?;
        if row.year < HISTORY_START_YEAR || row.year > HISTORY_END_YEAR {
            return Err(EngineError::Data(format!(
                "{display}: year {} for {country} outside the \
                 {HISTORY_START_YEAR}-{HISTORY_END_YEAR} history window",
                row.year
            )));
        }
        let prev = per_country
            .entry(country)
            .or_default()
            .insert(row.year, row.emissions_mtc);
        if prev.is_some() {
            return Err(EngineError::Data(format!(
                "{display}: duplicate row for country {country}, year {}",
                row.year
            )));
        }
    }
    if per_country.is_empty() {
        return Err(EngineError::Data(format!("{display}: no data rows")));
    }

    let mut countries = Vec::new();
    let mut series = Vec::new();
    for (country, years) in &per_country {
        let mut v = Vec::with_capacity((HISTORY_END_YEAR - HISTORY_START_YEAR + 1) as usize);
        for year in HISTORY_START_YEAR..=HISTORY_END_YEAR {
            match years.get(&year) {
                Some(&e) => v.push(e),
                None => {
                    return Err(EngineError::Data(format!(
                        "{display}: country {country} is missing year {year} \
                         (history must cover {HISTORY_START_YEAR}-{HISTORY_END_YEAR} contiguously)"
                    )))
                }
            }
        }
        countries.push(*country);
        series.push(v);
    }
    HistoricalEmissions::from_parts(countries, series)
}

/// Serialize historical emissions to canonical CSV.
pub fn history_to_csv(h: &HistoricalEmissions) -> String {
    let mut out = String::from("country,year,emissions_mtc\n");
    for country in h.countries() {
        for year in HISTORY_START_YEAR..=HISTORY_END_YEAR {
            out.push_str(&format!(
                "{country},{year},{}\n",
                fmt_f64(h.emissions_mtc(*country, year))
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_files(dir: &Path, csv: &str, sidecar: &str) -> PathBuf {
        let csv_path = dir.join("s.csv");
        std::fs::File::create(&csv_path)
            .unwrap()
            .write_all(csv.as_bytes())
            .unwrap();
        std::fs::File::create(dir.join("s.toml"))
            .unwrap()
            .write_all(sidecar.as_bytes())
            .unwrap();
        csv_path
    }

    fn two_country_csv(mutate: impl Fn(&mut Vec<String>)) -> String {
        let mut rows = Vec::new();
        for country in ["AAA", "BBB"] {
            for year in 1950..=2300 {
                let income = if country == "AAA" { 1000.0 } else { 20000.0 };
                rows.push(format!("{country},{year},10,{income},0.0002"));
            }
        }
        mutate(&mut rows);
        let mut csv = String::from(
            "country,year,population_millions,income_per_capita_usd2005,carbon_intensity_tc_per_usd\n",
        );
        for r in rows {
            csv.push_str(&r);
            csv.push('\n');
        }
        csv
    }

    const SIDECAR: &str = "id = \"toy\"\nconvergence = false\n";

    #[test]
    fn loads_well_formed_two_country_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_files(dir.path(), &two_country_csv(|_| {}), SIDECAR);
        let s = load_scenario(&path).unwrap();
        assert_eq!(s.num_countries(), 2);
        assert_eq!(s.num_years(), 351);
        assert_eq!(s.start_year(), 1950);
        assert_eq!(s.end_year(), 2300);
        assert_eq!(s.id(), "toy");
    }

    #[test]
    fn zero_population_names_country_and_year() {
        let dir = tempfile::tempdir().unwrap();
        let csv = two_country_csv(|rows| {
            let idx = rows.iter().position(|r| r.starts_with("BBB,2000")).unwrap();
            rows[idx] = "BBB,2000,0,20000,0.0002".into();
        });
        let path = write_files(dir.path(), &csv, SIDECAR);
        let err = load_scenario(&path).unwrap_err().to_string();
        assert!(err.contains("BBB"), "{err}");
        assert!(err.contains("2000"), "{err}");
        assert!(err.contains("population"), "{err}");
    }

    #[test]
    fn missing_interior_year_is_contiguity_error() {
        let dir = tempfile::tempdir().unwrap();
        let csv = two_country_csv(|rows| {
            rows.retain(|r| !r.starts_with("AAA,2071"));
        });
        let path = write_files(dir.path(), &csv, SIDECAR);
        let err = load_scenario(&path).unwrap_err().to_string();
        assert!(err.contains("AAA"), "{err}");
        assert!(err.contains("2071"), "{err}");
        assert!(err.contains("contiguous"), "{err}");
    }

    #[test]
    fn duplicate_country_year_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let csv = two_country_csv(|rows| {
            rows.push("AAA,2000,10,1000,0.0002".into());
        });
        let path = write_files(dir.path(), &csv, SIDECAR);
        let err = load_scenario(&path).unwrap_err().to_string();
        assert!(err.contains("duplicate"), "{err}");
    }

    #[test]
    fn short_span_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut csv = String::from(
            "country,year,population_millions,income_per_capita_usd2005,carbon_intensity_tc_per_usd\n",
        );
        for year in 2000..=2050 {
            csv.push_str(&format!("AAA,{year},10,1000,0.0002\n"));
        }
        let path = write_files(dir.path(), &csv, SIDECAR);
        let err = load_scenario(&path).unwrap_err().to_string();
        assert!(err.contains("shorter"), "{err}");
    }

    #[test]
    fn malformed_row_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let csv = two_country_csv(|rows| {
            rows[4] = "AAA,1954,ten,1000,0.0002".into();
        });
        let path = write_files(dir.path(), &csv, SIDECAR);
        let err = load_scenario(&path).unwrap_err();
        match err {
            EngineError::Parse { line, .. } => assert_eq!(line, 6), // header + 5 rows
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn bad_country_code_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let csv = two_country_csv(|rows| {
            rows[0] = "aaa,1950,10,1000,0.0002".into();
        });
        let path = write_files(dir.path(), &csv, SIDECAR);
        assert!(load_scenario(&path).is_err());
    }

    #[test]
    fn round_trip_is_byte_identical_modulo_row_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_files(dir.path(), &two_country_csv(|_| {}), SIDECAR);
        let s = load_scenario(&path).unwrap();
        let canonical = scenario_to_csv(&s);

        // Shuffle rows deterministically, reload, reserialize.
        let mut lines: Vec<&str> = canonical.trim_end().lines().skip(1).collect();
        lines.reverse();
        let mut shuffled = String::from(
            "country,year,population_millions,income_per_capita_usd2005,carbon_intensity_tc_per_usd\n",
        );
        for l in lines {
            shuffled.push_str(l);
            shuffled.push('\n');
        }
        let dir2 = tempfile::tempdir().unwrap();
        let path2 = write_files(dir2.path(), &shuffled, SIDECAR);
        let s2 = load_scenario(&path2).unwrap();
        assert_eq!(scenario_to_csv(&s2), canonical);
    }

    fn uniform_scenario() -> Scenario {
        let track = CountryTrack {
            population: vec![10.0; 151],
            income: (0..151).map(|t| 1000.0 * 1.02_f64.powi(t)).collect(),
            intensity: vec![2.0e-4; 151],
        };
        Scenario::from_parts(
            "u",
            1950,
            2100,
            false,
            vec![
                (CountryId::new("AAA").unwrap(), "A".into()),
                (CountryId::new("BBB").unwrap(), "B".into()),
            ],
            vec![track.clone(), track],
        )
        .unwrap()
    }

    #[test]
    fn convergence_identity_for_identical_countries() {
        let s = uniform_scenario();
        let out = s.apply_convergence(150).unwrap();
        for c in 0..2 {
            for t in 0..s.num_years() {
                let rel = (out.income(c, t) - s.income(c, t)).abs() / s.income(c, t);
                assert!(rel < 1e-12, "c={c} t={t} rel={rel}");
            }
        }
    }

    #[test]
    fn convergence_preserves_global_gdp_population_and_intensity() {
        let mut s = uniform_scenario();
        // Make the countries differ: BBB richer and slower-growing.
        s.tracks[1].income = (0..151).map(|t| 30000.0 * 1.005_f64.powi(t)).collect();
        let out = s.apply_convergence(150).unwrap();
        for t in 0..s.num_years() {
            let rel = (out.global_gdp(t) - s.global_gdp(t)).abs() / s.global_gdp(t);
            assert!(rel <= 1e-9, "t={t} rel={rel}");
            for c in 0..2 {
                assert_eq!(out.population(c, t), s.population(c, t));
                assert_eq!(out.intensity(c, t), s.intensity(c, t));
            }
        }
    }

    #[test]
    fn convergence_lifts_late_growth_of_slow_poor_country() {
        let mut s = uniform_scenario();
        // AAA: poor and slow (0.5%/yr); BBB: rich and fast (2.5%/yr).
        s.tracks[0].income = (0..151).map(|t| 800.0 * 1.005_f64.powi(t)).collect();
        s.tracks[1].income = (0..151).map(|t| 30000.0 * 1.025_f64.powi(t)).collect();
        let out = s.apply_convergence(150).unwrap();
        // Independent check on raw income arrays: late-horizon growth of the
        // poor country must exceed its original rate.
        let t = s.num_years() - 2;
        let g_orig = s.income(0, t + 1) / s.income(0, t) - 1.0;
        let g_conv = out.income(0, t + 1) / out.income(0, t) - 1.0;
        assert!(
            g_conv > g_orig,
            "expected convergence to raise late growth: {g_conv} <= {g_orig}"
        );
    }

    #[test]
    fn convergence_rejects_nonpositive_horizon() {
        let s = uniform_scenario();
        assert!(s.apply_convergence(0).is_err());
        assert!(s.apply_convergence(-5).is_err());
    }

    #[test]
    fn history_requires_full_window() {
        let dir = tempfile::tempdir().unwrap();
        let mut csv = String::from("country,year,emissions_mtc\n");
        for year in 1960..=2014 {
            csv.push_str(&format!("AAA,{year},5\n"));
        }
        let path = dir.path().join("h.csv");
        std::fs::write(&path, csv).unwrap();
        let err = load_history(&path).unwrap_err().to_string();
        assert!(err.contains("2015"), "{err}");
    }

    #[test]
    fn history_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut csv = String::from("country,year,emissions_mtc\n");
        for country in ["AAA", "BBB"] {
            for year in 1960..=2015 {
                csv.push_str(&format!("{country},{year},5.5\n"));
            }
        }
        let path = dir.path().join("h.csv");
        std::fs::write(&path, &csv).unwrap();
        let h = load_history(&path).unwrap();
        assert_eq!(history_to_csv(&h), csv);
        assert_eq!(h.emissions_mtc(CountryId::new("AAA").unwrap(), 1999), 5.5);
        assert_eq!(h.emissions_mtc(CountryId::new("ZZZ").unwrap(), 1999), 0.0);
    }

    #[test]
    fn negative_history_rejected() {
        let countries = vec![CountryId::new("AAA").unwrap()];
        let mut series = vec![vec![1.0; 56]];
        series[0][10] = -0.5;
        assert!(HistoricalEmissions::from_parts(countries, series).is_err());
    }
}
