//! The `emit-figures` subcommand: one tidy CSV per figure, plot-ready and
//! deterministic. Files that need the historical emissions record are
//! skipped with a manifest note when no history is configured.

use std::path::Path;

use scc_core::liability::{blame_matrix, historical_debt, LiabilityReport};
use scc_core::scc::{compute_scc, SccSettings, SccTable};
use scc_core::scenario::{fmt_f64, load_history};
use scc_core::{io, Result, RunConfig};

use crate::commands::{load, World};
use crate::manifest::Manifest;

/// Fixed strike years for the early-versus-late liability comparison and
/// the SCC growth rate derived from it.
const EARLY_YEAR: i32 = 2015;
const LATE_YEAR: i32 = 2055;

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

struct Figures<'a> {
    config: &'a RunConfig,
    world: World,
    out: &'a Path,
    written: usize,
}

impl Figures<'_> {
    fn write(&mut self, name: &str, content: &str) -> Result<()> {
        io::write_text(&self.out.join(name), content)?;
        self.written += 1;
        Ok(())
    }

    fn codes(&self) -> impl Iterator<Item = (usize, String)> + '_ {
        self.world
            .scenario
            .countries()
            .iter()
            .enumerate()
            .map(|(c, code)| (c, code.to_string()))
    }

    fn scc_at(&self, pulse_year: i32, income_elasticity: f64) -> Result<SccTable> {
        let settings = SccSettings {
            pulse_year,
            income_elasticity,
            ..self.config.scc_settings()
        };
        compute_scc(&self.world.scc_context(self.config), &settings)
    }

    fn blame_at(&self, table: &SccTable, year: i32) -> Result<LiabilityReport> {
        let (emissions, gdp) = self.world.emissions_and_gdp(year)?;
        blame_matrix(table, &emissions, &gdp, year)
    }

    /// A strike year usable for both the pulse and the liability accounting.
    fn strikeable(&self, year: i32) -> bool {
        year > self.world.scenario.start_year()
            && year <= self.world.scenario.end_year()
            && year < self.config.horizon_year
    }
}

pub fn emit(config: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<()> {
    let world = load(config, manifest)?;
    let mut fig = Figures {
        config,
        world,
        out,
        written: 0,
    };

    let pulse_year = config.pulse_year;
    let base_scc = fig.scc_at(pulse_year, config.income_elasticity)?;
    let base_blame = fig.blame_at(&base_scc, pulse_year)?;
    let t = fig.world.scenario.year_index(pulse_year)?;

    // SCC against country size.
    fig.write(
        "scc_vs_population.csv",
        &csv(
            "country,population_millions,scc_usd2005_per_tc",
            fig.codes().map(|(c, code)| {
                format!(
                    "{code},{},{}",
                    fmt_f64(fig.world.economy.state(c, t).population_millions),
                    fmt_f64(base_scc.scc(c)),
                )
            }),
        ),
    )?;

    // SCC against income under three vulnerability elasticities.
    let scc_minus = fig.scc_at(pulse_year, -0.36)?;
    let scc_zero = fig.scc_at(pulse_year, 0.0)?;
    let scc_plus = fig.scc_at(pulse_year, 0.36)?;
    fig.write(
        "scc_vs_income_by_elasticity.csv",
        &csv(
            "country,income_per_capita_usd2005,scc_elasticity_minus036,\
             scc_elasticity_zero,scc_elasticity_plus036",
            fig.codes().map(|(c, code)| {
                format!(
                    "{code},{},{},{},{}",
                    fmt_f64(fig.world.economy.state(c, t).income_per_capita),
                    fmt_f64(scc_minus.scc(c)),
                    fmt_f64(scc_zero.scc(c)),
                    fmt_f64(scc_plus.scc(c)),
                )
            }),
        ),
    )?;

    // Value added per tonne emitted, next to the national SCC. Countries
    // without emissions have no efficiency and are left out.
    let (emissions_tc, gdp) = fig.world.emissions_and_gdp(pulse_year)?;
    let mut omitted = Vec::new();
    let mut violations = 0usize;
    let mut efficiency_rows = Vec::new();
    for (c, code) in fig.codes() {
        if emissions_tc[c] == 0.0 {
            omitted.push(code);
            continue;
        }
        let efficiency = gdp[c] / emissions_tc[c];
        if base_scc.scc(c) > efficiency {
            violations += 1;
        }
        efficiency_rows.push(format!(
            "{code},{},{}",
            fmt_f64(efficiency),
            fmt_f64(base_scc.scc(c)),
        ));
    }
    fig.write(
        "scc_vs_carbon_efficiency.csv",
        &csv(
            "country,carbon_efficiency_usd_per_tc,scc_usd2005_per_tc",
            efficiency_rows,
        ),
    )?;
    if !omitted.is_empty() {
        manifest.note(format!(
            "scc_vs_carbon_efficiency.csv omits zero-emission countries: {}",
            omitted.join(" ")
        ));
    }
    manifest.diagnostic("carbon_efficiency_violations", violations);

    // Gross positions: what each country owes the world and is owed.
    fig.write(
        "blame_scatter.csv",
        &csv(
            "country,harm_done_usd,damage_suffered_usd",
            fig.codes().map(|(c, code)| {
                format!(
                    "{code},{},{}",
                    fmt_f64(base_blame.harm_done(c)),
                    fmt_f64(base_blame.damage_suffered(c)),
                )
            }),
        ),
    )?;

    fig.write(
        "net_liability_vs_income.csv",
        &csv(
            "country,income_per_capita_usd2005,net_liability_usd,net_liability_over_gdp",
            fig.codes().map(|(c, code)| {
                format!(
                    "{code},{},{},{}",
                    fmt_f64(fig.world.economy.state(c, t).income_per_capita),
                    fmt_f64(base_blame.net_liability(c)),
                    fmt_f64(base_blame.net_over_gdp(c)),
                )
            }),
        ),
    )?;

    // Net liabilities across the whole parameter grid, one panel per point.
    let grid = scc_core::run_grid(config)?;
    for skipped in &grid.skipped {
        manifest.note(format!("grid skipped {}: {}", skipped.label, skipped.reason));
    }
    fig.write(
        "liability_sensitivity_panels.csv",
        &csv(
            "point,config_hash,country,net_liability_usd",
            grid.rows.iter().flat_map(|row| {
                let label = &row.label;
                let hash = &row.config_hash;
                fig.world
                    .scenario
                    .countries()
                    .iter()
                    .enumerate()
                    .map(move |(c, code)| {
                        format!(
                            "{label},{hash},{code},{}",
                            fmt_f64(row.liability.net_liability(c))
                        )
                    })
                    .collect::<Vec<String>>()
            }),
        ),
    )?;

    // Early versus late strike years, and the implied SCC growth rate.
    if fig.strikeable(EARLY_YEAR) && fig.strikeable(LATE_YEAR) {
        let early_scc = fig.scc_at(EARLY_YEAR, config.income_elasticity)?;
        let late_scc = fig.scc_at(LATE_YEAR, config.income_elasticity)?;
        let early = fig.blame_at(&early_scc, EARLY_YEAR)?;
        let late = fig.blame_at(&late_scc, LATE_YEAR)?;
        fig.write(
            "liability_by_evaluation_year.csv",
            &csv(
                &format!("country,net_liability_{EARLY_YEAR}_usd,net_liability_{LATE_YEAR}_usd"),
                fig.codes().map(|(c, code)| {
                    format!(
                        "{code},{},{}",
                        fmt_f64(early.net_liability(c)),
                        fmt_f64(late.net_liability(c)),
                    )
                }),
            ),
        )?;
        let span = f64::from(LATE_YEAR - EARLY_YEAR);
        fig.write(
            "scc_growth_by_income.csv",
            &csv(
                "country,income_per_capita_usd2005,scc_annual_growth_rate",
                fig.codes().map(|(c, code)| {
                    let growth = (late_scc.scc(c) / early_scc.scc(c)).powf(1.0 / span) - 1.0;
                    format!(
                        "{code},{},{}",
                        fmt_f64(fig.world.economy.state(c, t).income_per_capita),
                        fmt_f64(growth),
                    )
                }),
            ),
        )?;
    } else {
        manifest.note(format!(
            "liability_by_evaluation_year.csv and scc_growth_by_income.csv skipped: \
             strike years {EARLY_YEAR} and {LATE_YEAR} not inside the scenario"
        ));
    }

    // Who emits versus who bears the social cost.
    let total_emissions: f64 = emissions_tc.iter().sum();
    let total_scc: f64 = base_scc.scc_values().iter().sum();
    fig.write(
        "shares_vs_income.csv",
        &csv(
            "country,income_per_capita_usd2005,emission_share,scc_share",
            fig.codes().map(|(c, code)| {
                format!(
                    "{code},{},{},{}",
                    fmt_f64(fig.world.economy.state(c, t).income_per_capita),
                    fmt_f64(emissions_tc[c] / total_emissions),
                    fmt_f64(base_scc.scc(c) / total_scc),
                )
            }),
        ),
    )?;

    // The same world with and without income convergence. Their loads get a
    // throwaway manifest: the convergence note describes these variants, not
    // the run itself.
    let mut scratch = Manifest::new("emit-figures", "");
    let mut without = config.clone();
    without.convergence = Some(false);
    let mut with = config.clone();
    with.convergence = Some(true);
    let world_without = load(&without, &mut scratch)?;
    let world_with = load(&with, &mut scratch)?;
    let settings = config.scc_settings();
    let scc_without = compute_scc(&world_without.scc_context(&without), &settings)?;
    let scc_with = compute_scc(&world_with.scc_context(&with), &settings)?;
    fig.write(
        "convergence_scc_delta.csv",
        &csv(
            "country,scc_no_convergence_usd_per_tc,scc_convergence_usd_per_tc,delta_usd_per_tc",
            fig.codes().map(|(c, code)| {
                format!(
                    "{code},{},{},{}",
                    fmt_f64(scc_without.scc(c)),
                    fmt_f64(scc_with.scc(c)),
                    fmt_f64(scc_with.scc(c) - scc_without.scc(c)),
                )
            }),
        ),
    )?;

    // Debt figures need the historical record.
    match &config.history {
        None => manifest.note(
            "marginal_debt_by_emission_year.csv and debt_vs_liability_scatter.csv skipped: \
             no history file configured",
        ),
        Some(path) => {
            let history = load_history(path)?;
            let ledger = historical_debt(
                &fig.world.scenario,
                &fig.world.economy,
                &config.climate,
                &config.initial,
                &fig.world.impact,
                &history,
                &config.debt_settings(),
            )?;
            fig.write(
                "marginal_debt_by_emission_year.csv",
                &io::marginal_debt_csv(&ledger),
            )?;
            fig.write(
                "debt_vs_liability_scatter.csv",
                &csv(
                    "country,net_debt_usd,net_liability_usd",
                    fig.codes().map(|(c, code)| {
                        format!(
                            "{code},{},{}",
                            fmt_f64(ledger.net_debt(c)),
                            fmt_f64(base_blame.net_liability(c)),
                        )
                    }),
                ),
            )?;
        }
    }

    manifest.diagnostic("figure_files_written", fig.written);
    Ok(())
}
