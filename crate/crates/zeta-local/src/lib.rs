//! Zeta functions of lattice and finite triples, the Laurent functionals
//! `tau_l`, and the local index cocycles with exact coefficients.

mod cocycle;
mod coefficients;
mod derivation;
mod hurwitz;
mod laurent;
mod sampler;

pub use cocycle::{
    laurent_csv, local_cocycle, local_degrees, local_pairing_even, local_pairing_odd,
    local_prefactor, local_terms, local_value, terms_csv, LocalTerm, LocalVariant, DEFAULT_M_CAP,
};
pub use coefficients::{
    coefficient_c, compositions, gamma_laurent_at_zero, gamma_taylor, sigma_coefficients,
    EULER_GAMMA,
};
pub use derivation::{abs_d, conjugation_expansion_check, derivation, ConjugationDefect, DerivationKind};
pub use hurwitz::{hurwitz_zeta, hurwitz_zeta_with_error};
pub use laurent::{laurent_extract, laurent_extract_with, LaurentData, CONSISTENCY_TOL, CONTOUR_POINTS, MAX_RADIUS};
pub use sampler::{zeta_index, zeta_sampler, zeta_sampler_windowed, MeromorphicSampler, Pole, SAMPLER_WINDOW};
