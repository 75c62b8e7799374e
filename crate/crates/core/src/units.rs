//! Unit conventions and conversion constants.
//!
//! Every dollar in this crate is a 2005 US dollar and every tonne of carbon is
//! a metric tonne of elemental carbon (tC), never CO2. All conversions go
//! through the constants below so that no other module hard-codes a factor.
//!
//! Working units by quantity:
//! - population: millions of persons (scenario files) or persons (derived)
//! - income: USD per person per year
//! - GDP: USD per year
//! - country emissions: MtC per year
//! - global emissions: GtC per year
//! - atmospheric carbon: GtC per box, ppm for concentration
//! - prices and marginal damages: USD per tC

/// Atmospheric CO2 concentration change per unit airborne carbon, GtC per ppm.
pub const GTC_PER_PPM: f64 = 2.13;

/// Tonnes of carbon per megatonne.
pub const TC_PER_MTC: f64 = 1.0e6;

/// Megatonnes of carbon per gigatonne.
pub const MTC_PER_GTC: f64 = 1.0e3;

/// Persons per scenario population unit (millions).
pub const PERSONS_PER_MILLION: f64 = 1.0e6;

/// Convert country emissions in MtC to GtC.
pub fn mtc_to_gtc(mtc: f64) -> f64 {
    mtc / MTC_PER_GTC
}

/// Convert country emissions in MtC to tC.
pub fn mtc_to_tc(mtc: f64) -> f64 {
    mtc * TC_PER_MTC
}
