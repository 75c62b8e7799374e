//! Deterministic climate-economy engine for national social costs of carbon.
//!
//! The crate chains four small models: exogenous country scenarios drive a
//! scenario economy, global emissions feed a five-box carbon cycle, atmospheric
//! concentration feeds a lagged temperature response, and temperature feeds a
//! likelihood-weighted set of impact functions that is downscaled to countries
//! by income elasticity. On top of that chain sit the marginal-pulse social
//! cost of carbon, blame-matrix liability accounting, historical climate debt,
//! and a one-at-a-time sensitivity harness.
//!
//! All dollar figures are 2005 USD and all carbon is metric tonnes of carbon
//! (tC), never CO2; the conversion constants live in [`units`].

pub mod climate;
pub mod config;
pub mod economy;
pub mod error;
pub mod impact;
pub mod io;
pub mod liability;
pub mod scc;
pub mod scenario;
pub mod sensitivity;
pub mod synthetic;
pub mod trajectory;
pub mod units;

pub use climate::{CarbonCycleState, ClimateInit, ClimateParams, TemperatureState};
pub use config::{load_config, GridMode, GridSpec, RunConfig};
pub use economy::{CountryYearState, EconomyPath};
pub use error::{EngineError, ErrorCategory, Result};
pub use impact::{downscale, BmaImpact, ImpactForm, ImpactFunction, ImpactSelection, MetaDataset};
pub use liability::{blame_matrix, historical_debt, DebtLedger, DebtSettings, LiabilityReport};
pub use scc::{compute_scc, scc_path, DiscountSchedule, SccContext, SccSettings, SccTable};
pub use scenario::{CountryId, HistoricalEmissions, Scenario};
pub use sensitivity::{run_grid, GridResult, GridRow, SensitivityAxis};
pub use trajectory::{run_trajectory, Pulse, WorldTrajectory};
