//! Operator arithmetic on finite dense matrices and banded operators on the
//! integer lattice, with certified traces, functional calculus and kernel
//! counting.

pub mod asymptotic;
pub mod band;
pub mod certified;
pub mod dense;
pub mod error;
pub mod function;
pub mod operator;

pub use asymptotic::{Asymptotics, Decay, Envelope, Series};
pub use band::{BandOperator, Diagonal};
pub use certified::CertifiedValue;
pub use dense::{hermitian_spectrum, kernel_basis, kernel_dimension, DenseOperator};
pub use error::{Error, Result};
pub use function::{operator_function, ScalarFn};
pub use operator::{Backend, Operator};

pub type C64 = num_complex::Complex64;

/// Calibration constant: the odd index equals the pairing divided by `KAPPA`.
pub const KAPPA: f64 = -1.0;

/// Default relative threshold for kernel counting.
pub const KERNEL_TOL_DEFAULT: f64 = 1e-8;

/// Certified trace of a lattice operator (exact trace on dense).
pub fn certified_trace(t: &Operator, window: usize) -> Result<CertifiedValue> {
    t.trace(window)
}

/// Product of two operators on the same backend.
pub fn compose(a: &Operator, b: &Operator) -> Result<Operator> {
    a.compose(b)
}

/// Parity of a triple, module or cochain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_degree(k: usize) -> Parity {
        if k % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}
