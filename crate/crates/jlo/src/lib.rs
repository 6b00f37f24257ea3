//! JLO heat-kernel cochains with exact simplex integrals, the transgression
//! cochain of the rescaling path, and finite-part extraction.

mod cochain;
mod divided;
mod finite_part;
mod heat;

pub use cochain::{
    holder_stats, jlo_cochain, jlo_cochain_windowed, jlo_entire_cochain, jlo_pairing_even,
    jlo_pairing_odd, transgression_cochain, transgression_cochain_windowed, HolderStats,
    DEFAULT_WINDOW, EVEN_DEGREE_CAP, ODD_DEGREE_CAP,
};
pub use divided::{heat_divided_difference, TAYLOR_SPREAD};
pub use finite_part::{
    densify, finite_part, AsymptoticSampleSet, FinitePart, MAX_CONDITION, MIN_EPSILON,
};
pub use heat::{simplex_heat_trace, HeatEngine, HeatSliceProduct, MAX_SIMPLEX_DEGREE};
