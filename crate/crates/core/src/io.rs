//! CSV emission for every result type. Each writer returns the complete
//! file as a string: header row, LF line endings, country-ascending then
//! year-ascending row order, and shortest round-trip decimals, so repeated
//! runs produce byte-identical files.

use std::path::Path;

use crate::error::{EngineError, Result};
use crate::impact::BmaImpact;
use crate::impact::fit::FitReport;
use crate::liability::{DebtLedger, LiabilityReport};
use crate::scc::SccTable;
use crate::scenario::fmt_f64;
use crate::sensitivity::GridResult;
use crate::trajectory::WorldTrajectory;

/// Write a text artifact, creating parent directories as needed.
pub fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| EngineError::io(parent.display().to_string(), e))?;
    }
    std::fs::write(path, content).map_err(|e| EngineError::io(path.display().to_string(), e))
}

pub const SCC_HEADER: &str = "country,scc_usd2005_per_tc,pulse_year,global_scc,config_hash";

/// National and global carbon prices for one pulse year.
pub fn scc_csv(table: &SccTable, config_hash: &str) -> String {
    scc_path_csv(std::slice::from_ref(table), config_hash)
}

/// Carbon prices for a sequence of pulse years, stacked under one header.
pub fn scc_path_csv(tables: &[SccTable], config_hash: &str) -> String {
    let mut out = String::from(SCC_HEADER);
    out.push('\n');
    for table in tables {
        for (c, country) in table.countries().iter().enumerate() {
            out.push_str(&format!(
                "{country},{},{},{},{config_hash}\n",
                fmt_f64(table.scc(c)),
                table.pulse_year,
                fmt_f64(table.global_scc()),
            ));
        }
    }
    out
}

pub const LIABILITY_HEADER: &str =
    "country,harm_done_usd,damage_suffered_usd,net_liability_usd,net_liability_over_gdp";

pub fn liability_csv(report: &LiabilityReport) -> String {
    let mut out = String::from(LIABILITY_HEADER);
    out.push('\n');
    for (c, country) in report.countries().iter().enumerate() {
        out.push_str(&format!(
            "{country},{},{},{},{}\n",
            fmt_f64(report.harm_done(c)),
            fmt_f64(report.damage_suffered(c)),
            fmt_f64(report.net_liability(c)),
            fmt_f64(report.net_over_gdp(c)),
        ));
    }
    out
}

pub const DEBT_HEADER: &str = "country,gross_debt_usd,net_debt_usd";

pub fn debt_csv(ledger: &DebtLedger) -> String {
    let mut out = String::from(DEBT_HEADER);
    out.push('\n');
    for (c, country) in ledger.countries().iter().enumerate() {
        out.push_str(&format!(
            "{country},{},{}\n",
            fmt_f64(ledger.gross_debt(c)),
            fmt_f64(ledger.net_debt(c)),
        ));
    }
    out
}

pub const MARGINAL_DEBT_HEADER: &str = "emission_year,marginal_debt_usd_per_tc";

/// Per-tonne debt by emission year, the decay profile of old emissions.
pub fn marginal_debt_csv(ledger: &DebtLedger) -> String {
    let mut out = String::from(MARGINAL_DEBT_HEADER);
    out.push('\n');
    for year in ledger.emission_years() {
        out.push_str(&format!(
            "{year},{}\n",
            fmt_f64(ledger.marginal_debt_per_tc(year))
        ));
    }
    out
}

pub const FIT_HEADER: &str = "form,param1,param2,param3,param4,ssr,weight";

/// Fitted coefficients, residuals, and model weights, one row per form that
/// fit. Forms with fewer than four coefficients leave cells empty.
pub fn fit_csv(report: &FitReport, weights: &BmaImpact) -> Result<String> {
    if weights.members().len() != report.fits.len() {
        return Err(EngineError::Data(
            "fit report and weight vector differ in length".into(),
        ));
    }
    let mut out = String::from(FIT_HEADER);
    out.push('\n');
    for (fit, (_, weight)) in report.fits.iter().zip(weights.members()) {
        let mut cells = [const { String::new() }; 4];
        for (i, p) in fit.function.params().iter().enumerate() {
            cells[i] = fmt_f64(*p);
        }
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fit.function.form().name(),
            cells[0],
            cells[1],
            cells[2],
            cells[3],
            fmt_f64(fit.ssr),
            fmt_f64(*weight),
        ));
    }
    Ok(out)
}

pub const META_HEADER: &str = "warming_c,impact_pct_gdp";

/// Warming/impact observation pairs in the fitting input format.
pub fn meta_to_csv(data: &crate::impact::MetaDataset) -> String {
    let mut out = String::from(META_HEADER);
    out.push('\n');
    for &(t, pct) in data.observations() {
        out.push_str(&format!("{},{}\n", fmt_f64(t), fmt_f64(pct)));
    }
    out
}

pub const TRAJECTORY_HEADER: &str = "year,concentration_ppm,temperature_c,\
global_emissions_mtc,cumulative_emissions_gtc,global_impact_fraction";

/// The global state path: carbon, warming, emissions, and world impact.
pub fn trajectory_csv(traj: &WorldTrajectory) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for t in 0..traj.num_years() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            traj.start_year() + t as i32,
            fmt_f64(traj.concentration_ppm(t)),
            fmt_f64(traj.temperature_c(t)),
            fmt_f64(traj.global_emissions_mtc(t)),
            fmt_f64(traj.cumulative_emissions_gtc(t)),
            fmt_f64(traj.global_impact_fraction(t)),
        ));
    }
    out
}

pub const DAMAGES_HEADER: &str = "country,year,impact_fraction,damages_usd";

/// Country-level impact rates and dollar damages per year.
pub fn damages_csv(traj: &WorldTrajectory) -> String {
    let mut out = String::from(DAMAGES_HEADER);
    out.push('\n');
    for (c, country) in traj.countries().iter().enumerate() {
        for t in 0..traj.num_years() {
            out.push_str(&format!(
                "{country},{},{},{}\n",
                traj.start_year() + t as i32,
                fmt_f64(traj.impact_fraction(c, t)),
                fmt_f64(traj.damages_usd(c, t)),
            ));
        }
    }
    out
}

pub const SENSITIVITY_HEADER: &str = "point,config_hash,country,scc_usd2005_per_tc,\
harm_done_usd,damage_suffered_usd,net_liability_usd";

/// Grid results at country resolution, one block per grid point in
/// enumeration order.
pub fn sensitivity_csv(result: &GridResult) -> String {
    let mut out = String::from(SENSITIVITY_HEADER);
    out.push('\n');
    for row in &result.rows {
        for (c, country) in row.scc.countries().iter().enumerate() {
            out.push_str(&format!(
                "{},{},{country},{},{},{},{}\n",
                row.label,
                row.config_hash,
                fmt_f64(row.scc.scc(c)),
                fmt_f64(row.liability.harm_done(c)),
                fmt_f64(row.liability.damage_suffered(c)),
                fmt_f64(row.liability.net_liability(c)),
            ));
        }
    }
    out
}

pub const GRID_SUMMARY_HEADER: &str =
    "point,config_hash,convergence,global_scc_usd2005_per_tc,truncation_last_decade_npv_share";

/// Global aggregates per grid point.
pub fn grid_summary_csv(result: &GridResult) -> String {
    let mut out = String::from(GRID_SUMMARY_HEADER);
    out.push('\n');
    for row in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.label,
            row.config_hash,
            row.convergence,
            fmt_f64(row.scc.global_scc()),
            fmt_f64(row.scc.diagnostics.truncation_last_decade_npv_share),
        ));
    }
    out
}
