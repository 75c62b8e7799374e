//! Carbon cycle and temperature response.
//!
//! Atmospheric CO2 is a sum of decay boxes with fixed airborne shares and
//! lifetimes; temperature relaxes toward the equilibrium implied by the
//! current concentration with a first-order lag. Both steps are annual.

use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::units::GTC_PER_PPM;

/// Number of decay boxes in the atmospheric carbon stock.
pub const NUM_BOXES: usize = 5;

/// Climate response parameters. All fields have physically meaningful
/// defaults; configs override them selectively.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClimateParams {
    /// Fraction of an emission pulse entering each box. Must sum to 1.
    pub box_shares: [f64; NUM_BOXES],
    /// Box lifetimes in years; `inf` marks the permanent airborne fraction.
    pub box_lifetimes_yr: [f64; NUM_BOXES],
    /// Equilibrium warming for a doubling of CO2, degrees C.
    pub climate_sensitivity_c: f64,
    /// E-folding time of the temperature lag, years.
    pub temperature_efolding_yr: f64,
    /// Preindustrial CO2 concentration, ppm.
    pub preindustrial_ppm: f64,
}

impl Default for ClimateParams {
    fn default() -> Self {
        ClimateParams {
            box_shares: [0.13, 0.20, 0.32, 0.25, 0.10],
            box_lifetimes_yr: [f64::INFINITY, 363.0, 74.0, 17.0, 2.0],
            climate_sensitivity_c: 3.0,
            temperature_efolding_yr: 40.0,
            preindustrial_ppm: 275.0,
        }
    }
}

impl ClimateParams {
    pub fn validate(&self) -> Result<()> {
        let share_sum: f64 = self.box_shares.iter().sum();
        if (share_sum - 1.0).abs() > 1e-9 {
            return Err(EngineError::Config(format!(
                "carbon box shares must sum to 1 (got {share_sum})"
            )));
        }
        for (i, &s) in self.box_shares.iter().enumerate() {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(EngineError::Config(format!(
                    "carbon box share {i} must be >= 0 (got {s})"
                )));
            }
        }
        for (i, &tau) in self.box_lifetimes_yr.iter().enumerate() {
            if !(tau > 0.0) {
                return Err(EngineError::Config(format!(
                    "carbon box lifetime {i} must be positive (got {tau})"
                )));
            }
        }
        if !(self.climate_sensitivity_c > 0.0) || !self.climate_sensitivity_c.is_finite() {
            return Err(EngineError::Config(format!(
                "climate sensitivity must be positive (got {})",
                self.climate_sensitivity_c
            )));
        }
        if !(self.temperature_efolding_yr >= 1.0) || !self.temperature_efolding_yr.is_finite() {
            return Err(EngineError::Config(format!(
                "temperature e-folding time must be >= 1 year (got {})",
                self.temperature_efolding_yr
            )));
        }
        if !(self.preindustrial_ppm > 0.0) || !self.preindustrial_ppm.is_finite() {
            return Err(EngineError::Config(format!(
                "preindustrial concentration must be positive (got {})",
                self.preindustrial_ppm
            )));
        }
        Ok(())
    }

    /// Per-year retention factor of box `j`: exp(-1/tau). The infinite
    /// lifetime box retains everything (exp(-0) = 1).
    fn retention(&self, j: usize) -> f64 {
        (-1.0 / self.box_lifetimes_yr[j]).exp()
    }
}

/// Initial climate state at the scenario start year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClimateInit {
    /// Atmospheric CO2 at the start year, ppm.
    pub concentration_ppm: f64,
    /// Warming above preindustrial at the start year, degrees C.
    pub temperature_c: f64,
}

impl Default for ClimateInit {
    fn default() -> Self {
        // Roughly observed mid-20th-century values.
        ClimateInit {
            concentration_ppm: 311.0,
            temperature_c: 0.25,
        }
    }
}

impl ClimateInit {
    pub fn validate(&self, params: &ClimateParams) -> Result<()> {
        if !(self.concentration_ppm >= params.preindustrial_ppm) {
            return Err(EngineError::Config(format!(
                "initial concentration {} ppm is below preindustrial {} ppm",
                self.concentration_ppm, params.preindustrial_ppm
            )));
        }
        if !self.temperature_c.is_finite() {
            return Err(EngineError::Config(format!(
                "initial temperature must be finite (got {})",
                self.temperature_c
            )));
        }
        Ok(())
    }
}

/// Atmospheric carbon stock split across decay boxes, in GtC above
/// preindustrial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarbonCycleState {
    pub boxes_gtc: [f64; NUM_BOXES],
}

impl CarbonCycleState {
    /// State with no excess carbon: concentration equals preindustrial.
    pub fn preindustrial() -> Self {
        CarbonCycleState {
            boxes_gtc: [0.0; NUM_BOXES],
        }
    }

    /// Seed the configured initial excess into the permanent box. The
    /// excess stands for emissions old enough to have cleared the fast
    /// exchange boxes already; parking it there keeps the start year an
    /// actual initial condition instead of an instant outgassing transient.
    /// Marginal pulse responses are unaffected: the cycle is linear, so a
    /// pulse-minus-base difference never sees the initial allocation.
    pub fn from_initial_concentration(init: &ClimateInit, params: &ClimateParams) -> Self {
        let excess_gtc = (init.concentration_ppm - params.preindustrial_ppm) * GTC_PER_PPM;
        let mut boxes = [0.0; NUM_BOXES];
        boxes[0] = excess_gtc;
        CarbonCycleState { boxes_gtc: boxes }
    }

    /// Total excess carbon above preindustrial, GtC.
    pub fn excess_gtc(&self) -> f64 {
        self.boxes_gtc.iter().sum()
    }

    /// Atmospheric concentration in ppm.
    pub fn concentration_ppm(&self, params: &ClimateParams) -> f64 {
        params.preindustrial_ppm + self.excess_gtc() / GTC_PER_PPM
    }
}

/// Advance the carbon stock by one year: existing box contents decay with
/// their lifetimes, then the year's emissions enter undecayed, split by the
/// airborne shares.
pub fn step_carbon(
    state: &CarbonCycleState,
    emissions_gtc: f64,
    params: &ClimateParams,
) -> CarbonCycleState {
    let mut boxes = [0.0; NUM_BOXES];
    for j in 0..NUM_BOXES {
        boxes[j] = state.boxes_gtc[j] * params.retention(j) + params.box_shares[j] * emissions_gtc;
    }
    CarbonCycleState { boxes_gtc: boxes }
}

/// Warming above preindustrial, degrees C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureState {
    pub temperature_c: f64,
}

/// Equilibrium warming for a given concentration: climate sensitivity scaled
/// by the log concentration ratio relative to a doubling.
pub fn equilibrium_temperature(concentration_ppm: f64, params: &ClimateParams) -> f64 {
    params.climate_sensitivity_c * (concentration_ppm / params.preindustrial_ppm).ln()
        / std::f64::consts::LN_2
}

/// Advance temperature by one year: relax toward the equilibrium implied by
/// the current concentration at rate 1/efolding per year.
pub fn step_temperature(
    state: &TemperatureState,
    concentration_ppm: f64,
    params: &ClimateParams,
) -> TemperatureState {
    let t_eq = equilibrium_temperature(concentration_ppm, params);
    let t = state.temperature_c;
    TemperatureState {
        temperature_c: t + (t_eq - t) / params.temperature_efolding_yr,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_params_validate() {
        ClimateParams::default().validate().unwrap();
        ClimateInit::default()
            .validate(&ClimateParams::default())
            .unwrap();
    }

    #[test]
    fn share_sum_enforced() {
        let mut p = ClimateParams::default();
        p.box_shares[0] = 0.5;
        assert!(p.validate().is_err());
    }

    #[test]
    fn zero_emissions_decay_toward_permanent_fraction() {
        // With no further emissions, every finite-lifetime box drains and the
        // infinite box alone remains.
        let params = ClimateParams::default();
        let mut state = CarbonCycleState {
            boxes_gtc: [13.0, 20.0, 32.0, 25.0, 10.0],
        };
        let permanent = state.boxes_gtc[0];
        for _ in 0..20_000 {
            state = step_carbon(&state, 0.0, &params);
        }
        assert_relative_eq!(state.excess_gtc(), permanent, max_relative = 1e-6);
    }

    #[test]
    fn single_pulse_splits_by_shares() {
        let params = ClimateParams::default();
        let state = step_carbon(&CarbonCycleState::preindustrial(), 100.0, &params);
        for j in 0..NUM_BOXES {
            assert_relative_eq!(state.boxes_gtc[j], 100.0 * params.box_shares[j]);
        }
        assert_relative_eq!(state.excess_gtc(), 100.0, max_relative = 1e-12);
    }

    #[test]
    fn carbon_step_is_linear_in_state_and_emissions() {
        let params = ClimateParams::default();
        let a = CarbonCycleState {
            boxes_gtc: [1.0, 2.0, 3.0, 4.0, 5.0],
        };
        let b = CarbonCycleState {
            boxes_gtc: [0.5, 0.25, 8.0, 1.0, 0.0],
        };
        let sum = CarbonCycleState {
            boxes_gtc: [1.5, 2.25, 11.0, 5.0, 5.0],
        };
        let step_a = step_carbon(&a, 3.0, &params);
        let step_b = step_carbon(&b, 7.0, &params);
        let step_sum = step_carbon(&sum, 10.0, &params);
        for j in 0..NUM_BOXES {
            assert_relative_eq!(
                step_sum.boxes_gtc[j],
                step_a.boxes_gtc[j] + step_b.boxes_gtc[j],
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn concentration_from_initial_state_round_trips() {
        let params = ClimateParams::default();
        let init = ClimateInit {
            concentration_ppm: 311.0,
            temperature_c: 0.25,
        };
        let state = CarbonCycleState::from_initial_concentration(&init, &params);
        assert_relative_eq!(state.concentration_ppm(&params), 311.0, max_relative = 1e-12);
    }

    #[test]
    fn equilibrium_at_doubling_equals_sensitivity() {
        let params = ClimateParams::default();
        let t = equilibrium_temperature(2.0 * params.preindustrial_ppm, &params);
        assert_relative_eq!(t, params.climate_sensitivity_c, max_relative = 1e-12);
    }

    #[test]
    fn held_doubling_approaches_sensitivity_geometrically() {
        // Hold concentration at twice preindustrial from a cold start. After
        // n years the gap to equilibrium shrinks by (1 - 1/phi)^n, so
        // T_n = CS * (1 - (39/40)^n) exactly.
        let params = ClimateParams::default();
        let c2 = 2.0 * params.preindustrial_ppm;
        let mut state = TemperatureState { temperature_c: 0.0 };
        for _ in 0..40 {
            state = step_temperature(&state, c2, &params);
        }
        let expected = 3.0 * (1.0 - (39.0_f64 / 40.0).powi(40));
        assert_relative_eq!(state.temperature_c, expected, max_relative = 1e-12);
        assert!(
            state.temperature_c > 1.90 && state.temperature_c < 1.92,
            "40-year response {} outside [1.90, 1.92]",
            state.temperature_c
        );
    }

    #[test]
    fn temperature_step_moves_toward_equilibrium_monotonically() {
        let params = ClimateParams::default();
        let c = 400.0;
        let t_eq = equilibrium_temperature(c, &params);
        let mut below = TemperatureState { temperature_c: 0.0 };
        let mut above = TemperatureState {
            temperature_c: t_eq + 2.0,
        };
        for _ in 0..500 {
            let next_below = step_temperature(&below, c, &params);
            let next_above = step_temperature(&above, c, &params);
            assert!(next_below.temperature_c >= below.temperature_c);
            assert!(next_below.temperature_c <= t_eq);
            assert!(next_above.temperature_c <= above.temperature_c);
            assert!(next_above.temperature_c >= t_eq);
            below = next_below;
            above = next_above;
        }
        assert_relative_eq!(below.temperature_c, t_eq, max_relative = 1e-5);
        assert_relative_eq!(above.temperature_c, t_eq, max_relative = 1e-5);
    }
}
