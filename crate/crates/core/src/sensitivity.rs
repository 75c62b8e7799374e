//! Parameter sweep harness: expand a grid spec into concrete run
//! configurations, execute them, and collect per-point pricing and
//! liability summaries.
//!
//! One-at-a-time mode varies a single axis while holding the rest at the
//! base config, so k axes of sizes n_i yield 1 + sum(n_i - 1) rows when
//! each value list includes the base value. Cartesian mode crosses all
//! listed values. The base point is always row zero, and a rerun of the
//! same grid reproduces every row bit for bit.

use std::collections::HashMap;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::config::{GridMode, GridSpec, RunConfig};
use crate::economy::EconomyPath;
use crate::error::Result;
use crate::impact::ImpactSelection;
use crate::liability::{blame_matrix, LiabilityReport};
use crate::scc::{compute_scc, SccContext, SccTable};
use crate::scenario::{fmt_f64, Scenario};
use crate::units::TC_PER_MTC;

/// The grid dimensions, in enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensitivityAxis {
    Scenario,
    Convergence,
    Prtp,
    Emuc,
    IncomeElasticity,
    ClimateSensitivity,
    ImpactFunction,
    ImpactScale,
}

impl SensitivityAxis {
    pub const ALL: [SensitivityAxis; 8] = [
        SensitivityAxis::Scenario,
        SensitivityAxis::Convergence,
        SensitivityAxis::Prtp,
        SensitivityAxis::Emuc,
        SensitivityAxis::IncomeElasticity,
        SensitivityAxis::ClimateSensitivity,
        SensitivityAxis::ImpactFunction,
        SensitivityAxis::ImpactScale,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SensitivityAxis::Scenario => "scenario",
            SensitivityAxis::Convergence => "convergence",
            SensitivityAxis::Prtp => "prtp",
            SensitivityAxis::Emuc => "emuc",
            SensitivityAxis::IncomeElasticity => "income_elasticity",
            SensitivityAxis::ClimateSensitivity => "climate_sensitivity",
            SensitivityAxis::ImpactFunction => "impact_function",
            SensitivityAxis::ImpactScale => "impact_scale",
        }
    }
}

/// One concrete parameter combination, ready to run.
#[derive(Debug, Clone)]
pub struct GridPoint {
    /// "default", or comma-joined `axis=value` parts for the varied axes.
    pub label: String,
    pub config: RunConfig,
}

/// A grid point that could not be built or run, with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedPoint {
    pub label: String,
    pub reason: String,
}

/// Results for one executed grid point.
#[derive(Debug, Clone)]
pub struct GridRow {
    pub label: String,
    pub config_hash: String,
    /// Effective income-convergence flag for this point.
    pub convergence: bool,
    pub scc: SccTable,
    pub liability: LiabilityReport,
}

#[derive(Debug, Clone)]
pub struct GridResult {
    pub rows: Vec<GridRow>,
    pub skipped: Vec<SkippedPoint>,
}

fn scenario_label(path: &PathBuf) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// One axis coordinate: the label fragment, whether it equals the base
/// value, and how to imprint it on a config.
struct Coordinate {
    fragment: String,
    is_default: bool,
    apply: Box<dyn Fn(&mut RunConfig) + Send + Sync>,
}

fn axis_coordinates(
    axis: SensitivityAxis,
    spec: &GridSpec,
    base: &RunConfig,
    default_convergence: bool,
) -> Vec<Coordinate> {
    let name = axis.name();
    match axis {
        SensitivityAxis::Scenario => spec
            .scenario
            .iter()
            .map(|path| {
                let path = path.clone();
                Coordinate {
                    fragment: format!("{name}={}", scenario_label(&path)),
                    is_default: path == base.scenario,
                    apply: Box::new(move |c| c.scenario = path.clone()),
                }
            })
            .collect(),
        SensitivityAxis::Convergence => spec
            .convergence
            .iter()
            .map(|&flag| Coordinate {
                fragment: format!("{name}={flag}"),
                is_default: flag == default_convergence,
                apply: Box::new(move |c| c.convergence = Some(flag)),
            })
            .collect(),
        SensitivityAxis::Prtp => float_coordinates(name, &spec.prtp, base.prtp, |c, v| {
            c.prtp = v;
        }),
        SensitivityAxis::Emuc => float_coordinates(name, &spec.emuc, base.emuc, |c, v| {
            c.emuc = v;
        }),
        SensitivityAxis::IncomeElasticity => float_coordinates(
            name,
            &spec.income_elasticity,
            base.income_elasticity,
            |c, v| c.income_elasticity = v,
        ),
        SensitivityAxis::ClimateSensitivity => float_coordinates(
            name,
            &spec.climate_sensitivity,
            base.climate.climate_sensitivity_c,
            |c, v| c.climate.climate_sensitivity_c = v,
        ),
        // Names that fail to parse are excluded here; enumerate_grid
        // records them as skipped points.
        SensitivityAxis::ImpactFunction => spec
            .impact_function
            .iter()
            .filter_map(|raw| {
                let selection = raw.parse::<ImpactSelection>().ok()?;
                Some(Coordinate {
                    fragment: format!("{name}={raw}"),
                    is_default: selection == base.impact,
                    apply: Box::new(move |c| c.impact = selection.clone()),
                })
            })
            .collect(),
        SensitivityAxis::ImpactScale => {
            float_coordinates(name, &spec.impact_scale, base.impact_scale, |c, v| {
                c.impact_scale = v;
            })
        }
    }
}

fn float_coordinates(
    name: &str,
    values: &[f64],
    default: f64,
    set: impl Fn(&mut RunConfig, f64) + Send + Sync + Copy + 'static,
) -> Vec<Coordinate> {
    values
        .iter()
        .map(|&v| Coordinate {
            fragment: format!("{name}={}", fmt_f64(v)),
            is_default: v == default,
            apply: Box::new(move |c| set(c, v)),
        })
        .collect()
}

/// Expand the grid into runnable points plus records for values that fail
/// validation. `default_convergence` is the effective flag of the base run
/// (needed to recognize the no-op value on the convergence axis).
pub fn enumerate_grid(
    base: &RunConfig,
    spec: &GridSpec,
    default_convergence: bool,
) -> (Vec<GridPoint>, Vec<SkippedPoint>) {
    let mut points = vec![GridPoint {
        label: "default".into(),
        config: base.clone(),
    }];
    let mut skipped = Vec::new();

    // Impact-function names that fail to parse never make it into a
    // Coordinate's apply closure; collect them up front.
    let mut bad_impacts = Vec::new();
    for raw in &spec.impact_function {
        if raw.parse::<ImpactSelection>().is_err() {
            bad_impacts.push(raw.clone());
        }
    }

    let mut push_candidate = |label: String, config: RunConfig, skipped: &mut Vec<SkippedPoint>| {
        match config.validate() {
            Ok(()) => points.push(GridPoint { label, config }),
            Err(err) => skipped.push(SkippedPoint {
                label,
                reason: err.to_string(),
            }),
        }
    };

    match spec.mode {
        GridMode::OneAtATime => {
            for axis in SensitivityAxis::ALL {
                if axis == SensitivityAxis::ImpactFunction && !bad_impacts.is_empty() {
                    for raw in &bad_impacts {
                        skipped.push(SkippedPoint {
                            label: format!("impact_function={raw}"),
                            reason: format!("unknown impact function {raw:?}"),
                        });
                    }
                }
                for coord in axis_coordinates(axis, spec, base, default_convergence) {
                    if coord.is_default {
                        continue;
                    }
                    let mut config = base.clone();
                    (coord.apply)(&mut config);
                    push_candidate(coord.fragment, config, &mut skipped);
                }
            }
        }
        GridMode::Cartesian => {
            for raw in &bad_impacts {
                skipped.push(SkippedPoint {
                    label: format!("impact_function={raw}"),
                    reason: format!("unknown impact function {raw:?}"),
                });
            }
            let axes: Vec<Vec<Coordinate>> = SensitivityAxis::ALL
                .iter()
                .map(|&axis| axis_coordinates(axis, spec, base, default_convergence))
                .filter(|coords| !coords.is_empty())
                .collect();
            let mut index = vec![0usize; axes.len()];
            loop {
                let combo: Vec<&Coordinate> = axes
                    .iter()
                    .zip(&index)
                    .map(|(coords, &i)| &coords[i])
                    .collect();
                // The all-default combination is the base point itself.
                if !combo.iter().all(|c| c.is_default) {
                    let label = combo
                        .iter()
                        .map(|c| c.fragment.clone())
                        .collect::<Vec<_>>()
                        .join(",");
                    let mut config = base.clone();
                    for coord in &combo {
                        (coord.apply)(&mut config);
                    }
                    push_candidate(label, config, &mut skipped);
                }
                // Odometer increment over the axis index vector.
                let mut pos = axes.len();
                loop {
                    if pos == 0 {
                        return (points, skipped);
                    }
                    pos -= 1;
                    index[pos] += 1;
                    if index[pos] < axes[pos].len() {
                        break;
                    }
                    index[pos] = 0;
                }
            }
        }
    }
    (points, skipped)
}

fn run_point(point: &GridPoint) -> Result<GridRow> {
    let config = &point.config;
    let (scenario, convergence) = config.load_scenario_effective()?;
    let economy = EconomyPath::from_scenario(&scenario);
    let impact = config.resolve_impact()?;
    let ctx = SccContext {
        scenario: &scenario,
        economy: &economy,
        climate: &config.climate,
        init: &config.initial,
        impact: &impact,
    };
    let scc = compute_scc(&ctx, &config.scc_settings())?;
    let pulse_idx = scenario.year_index(config.pulse_year)?;
    let n = scenario.countries().len();
    let emissions_tc: Vec<f64> = (0..n)
        .map(|c| economy.state(c, pulse_idx).emissions_mtc * TC_PER_MTC)
        .collect();
    let gdp: Vec<f64> = (0..n)
        .map(|c| economy.state(c, pulse_idx).gdp_gross)
        .collect();
    let liability = blame_matrix(&scc, &emissions_tc, &gdp, config.pulse_year)?;
    Ok(GridRow {
        label: point.label.clone(),
        config_hash: config.effective_hash()?,
        convergence,
        scc,
        liability,
    })
}

/// Execute the grid from `base.grid` (the standard sweep when absent).
/// Points run in parallel; rows come back in enumeration order. A variant
/// point that fails moves to the skip list with its error; a failing base
/// point aborts the whole grid.
pub fn run_grid(base: &RunConfig) -> Result<GridResult> {
    let spec = base.grid.clone().unwrap_or_else(GridSpec::standard);
    let (_, default_convergence) = base.load_scenario_effective()?;
    let (points, mut skipped) = enumerate_grid(base, &spec, default_convergence);

    let outcomes: Vec<(usize, Result<GridRow>)> = points
        .par_iter()
        .enumerate()
        .map(|(i, point)| (i, run_point(point)))
        .collect();

    let mut rows = Vec::with_capacity(points.len());
    // Indexed collection preserves enumeration order regardless of which
    // worker finished first.
    let mut by_index: HashMap<usize, Result<GridRow>> = outcomes.into_iter().collect();
    for (i, point) in points.iter().enumerate() {
        match by_index.remove(&i).unwrap() {
            Ok(row) => rows.push(row),
            Err(err) if i == 0 => return Err(err),
            Err(err) => skipped.push(SkippedPoint {
                label: point.label.clone(),
                reason: err.to_string(),
            }),
        }
    }
    Ok(GridResult { rows, skipped })
}

/// Load a scenario and derive its gross economy, applying convergence per
/// the config override or the sidecar flag.
pub fn load_world(config: &RunConfig) -> Result<(Scenario, EconomyPath, bool)> {
    let (scenario, convergence) = config.load_scenario_effective()?;
    let economy = EconomyPath::from_scenario(&scenario);
    Ok((scenario, economy, convergence))
}
