//! One handler per subcommand: compute, write artifacts, record notes and
//! diagnostics on the manifest. Handlers stay thin; all modeling lives in
//! the core crate.

use std::path::Path;

use scc_core::economy::EconomyPath;
use scc_core::impact::fit::{bma_weights, fit_functions};
use scc_core::impact::MetaDataset;
use scc_core::liability::{blame_matrix, historical_debt};
use scc_core::scc::{compute_scc, SccContext, SccTable};
use scc_core::scenario::{load_history, Scenario};
use scc_core::sensitivity::load_world;
use scc_core::trajectory::run_trajectory;
use scc_core::units::TC_PER_MTC;
use scc_core::{io, BmaImpact, EngineError, Result, RunConfig};

use crate::manifest::Manifest;

/// Everything a single-scenario computation needs, loaded once.
pub struct World {
    pub scenario: Scenario,
    pub economy: EconomyPath,
    pub impact: BmaImpact,
}

pub fn load(config: &RunConfig, manifest: &mut Manifest) -> Result<World> {
    let (scenario, economy, convergence) = load_world(config)?;
    if convergence {
        manifest.note("income convergence applied to the scenario");
    }
    Ok(World {
        scenario,
        economy,
        impact: config.resolve_impact()?,
    })
}

impl World {
    pub fn scc_context<'a>(&'a self, config: &'a RunConfig) -> SccContext<'a> {
        SccContext {
            scenario: &self.scenario,
            economy: &self.economy,
            climate: &config.climate,
            init: &config.initial,
            impact: &self.impact,
        }
    }

    /// Emissions (tC) and gross GDP (USD) for every country in one year.
    pub fn emissions_and_gdp(&self, year: i32) -> Result<(Vec<f64>, Vec<f64>)> {
        let t = self.scenario.year_index(year)?;
        let n = self.scenario.num_countries();
        let emissions = (0..n)
            .map(|c| self.economy.state(c, t).emissions_mtc * TC_PER_MTC)
            .collect();
        let gdp = (0..n).map(|c| self.economy.state(c, t).gdp_gross).collect();
        Ok((emissions, gdp))
    }
}

pub fn run(config: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<()> {
    let world = load(config, manifest)?;
    let traj = run_trajectory(
        &world.scenario,
        &world.economy,
        &config.climate,
        &config.initial,
        &world.impact,
        config.income_elasticity,
        None,
    )?;
    io::write_text(&out.join("trajectory.csv"), &io::trajectory_csv(&traj))?;
    io::write_text(&out.join("damages.csv"), &io::damages_csv(&traj))?;
    let peak = (0..traj.num_years())
        .map(|t| traj.temperature_c(t))
        .fold(f64::MIN, f64::max);
    manifest.diagnostic("peak_warming_c", peak);
    manifest.diagnostic("matthews_r_squared", traj.matthews_r_squared());
    Ok(())
}

pub fn scc(config: &RunConfig, out: &Path, hash: &str, manifest: &mut Manifest) -> Result<()> {
    let world = load(config, manifest)?;
    let table = compute_scc(&world.scc_context(config), &config.scc_settings())?;
    io::write_text(&out.join("scc.csv"), &io::scc_csv(&table, hash))?;
    record_scc_diagnostics(manifest, &table);
    Ok(())
}

fn record_scc_diagnostics(manifest: &mut Manifest, table: &SccTable) {
    manifest.diagnostic("global_scc_usd2005_per_tc", table.global_scc());
    manifest.diagnostic(
        "truncation_last_decade_npv_share",
        table.diagnostics.truncation_last_decade_npv_share,
    );
}

/// Pulse years for the path command: the configured pulse year and then
/// five-year steps out to forty years, kept within scenario and horizon.
fn pulse_ladder(config: &RunConfig, scenario: &Scenario) -> Vec<i32> {
    (0..=8)
        .map(|k| config.pulse_year + 5 * k)
        .filter(|&y| y <= scenario.end_year() && y < config.horizon_year)
        .collect()
}

pub fn scc_path(config: &RunConfig, out: &Path, hash: &str, manifest: &mut Manifest) -> Result<()> {
    let world = load(config, manifest)?;
    let years = pulse_ladder(config, &world.scenario);
    let tables = scc_core::scc::scc_path(&world.scc_context(config), &config.scc_settings(), &years)?;
    io::write_text(&out.join("scc_path.csv"), &io::scc_path_csv(&tables, hash))?;
    manifest.diagnostic("pulse_years", &years);
    Ok(())
}

pub fn liability(config: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<()> {
    let world = load(config, manifest)?;
    let table = compute_scc(&world.scc_context(config), &config.scc_settings())?;
    let (emissions, gdp) = world.emissions_and_gdp(config.pulse_year)?;
    let report = blame_matrix(&table, &emissions, &gdp, config.pulse_year)?;
    io::write_text(&out.join("liability.csv"), &io::liability_csv(&report))?;
    record_scc_diagnostics(manifest, &table);
    manifest.diagnostic("zero_sum_residual", report.zero_sum_residual());
    manifest.diagnostic("max_gross_share_of_gdp", report.max_gross_share());
    Ok(())
}

pub fn debt(config: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<()> {
    let history_path = config.history.as_ref().ok_or_else(|| {
        EngineError::Data("debt needs a historical emissions file: set `history` in the config".into())
    })?;
    let world = load(config, manifest)?;
    let history = load_history(history_path)?;
    let ledger = historical_debt(
        &world.scenario,
        &world.economy,
        &config.climate,
        &config.initial,
        &world.impact,
        &history,
        &config.debt_settings(),
    )?;
    io::write_text(&out.join("debt.csv"), &io::debt_csv(&ledger))?;
    io::write_text(
        &out.join("marginal_debt.csv"),
        &io::marginal_debt_csv(&ledger),
    )?;
    manifest.diagnostic(
        "oldest_marginal_debt_usd_per_tc",
        ledger.marginal_debt_per_tc(ledger.first_emission_year()),
    );
    manifest.diagnostic("zero_sum_residual", ledger.zero_sum_residual());
    Ok(())
}

pub fn fit(config: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<()> {
    let meta_path = config.meta.as_ref().ok_or_else(|| {
        EngineError::Data("fit needs a warming-impact observation file: set `meta` in the config".into())
    })?;
    let data = MetaDataset::load(meta_path)?;
    let report = fit_functions(&data)?;
    for (form, message) in &report.failures {
        manifest.note(format!("fit failed for {}: {message}", form.name()));
    }
    let weights = bma_weights(&report.fits, data.len())?;
    io::write_text(&out.join("fit.csv"), &io::fit_csv(&report, &weights)?)?;
    let best = weights
        .members()
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty fit family");
    manifest.diagnostic("observations", data.len());
    manifest.diagnostic("top_weight_form", best.0.form().name());
    manifest.diagnostic("top_weight", best.1);
    Ok(())
}

pub fn sensitivity(config: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<()> {
    let result = scc_core::run_grid(config)?;
    io::write_text(&out.join("sensitivity.csv"), &io::sensitivity_csv(&result))?;
    io::write_text(
        &out.join("grid_summary.csv"),
        &io::grid_summary_csv(&result),
    )?;
    for skipped in &result.skipped {
        manifest.note(format!("skipped {}: {}", skipped.label, skipped.reason));
    }
    manifest.diagnostic("grid_rows", result.rows.len());
    manifest.diagnostic("skipped_points", result.skipped.len());
    Ok(())
}
