use ncg_operator_core::{BandOperator, Diagonal, Error, Operator, Result, C64};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Trigonometric polynomial `u(theta) = sum_k c_k e^{i k theta}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindingSymbol {
    coefficients: BTreeMap<i64, C64>,
}

impl WindingSymbol {
    pub fn new<I: IntoIterator<Item = (i64, C64)>>(coeffs: I) -> Result<Self> {
        let mut coefficients = BTreeMap::new();
        for (k, c) in coeffs {
            *coefficients.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
        }
        coefficients.retain(|_, c| *c != C64::new(0.0, 0.0));
        if coefficients.is_empty() {
            return Err(Error::EmptySymbol);
        }
        Ok(Self { coefficients })
    }

    /// `c e^{i k theta}`.
    pub fn monomial(k: i64, c: C64) -> Self {
        Self::new([(k, c)]).expect("nonzero coefficient")
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coefficients.iter().map(|(k, c)| (*k, *c))
    }

    pub fn eval(&self, theta: f64) -> C64 {
        self.coefficients().map(|(k, c)| c * C64::from_polar(1.0, k as f64 * theta)).sum()
    }

    pub fn derivative(&self, theta: f64) -> C64 {
        self.coefficients()
            .map(|(k, c)| c * C64::new(0.0, k as f64) * C64::from_polar(1.0, k as f64 * theta))
            .sum()
    }

    /// Pointwise conjugate, the symbol of the adjoint.
    pub fn conj(&self) -> Self {
        Self { coefficients: self.coefficients().map(|(k, c)| (-k, c.conj())).collect() }
    }

    /// Fourier convolution, the symbol of the product.
    pub fn mul(&self, other: &WindingSymbol) -> Self {
        let mut out = BTreeMap::new();
        for (a, x) in self.coefficients() {
            for (b, y) in other.coefficients() {
                *out.entry(a + b).or_insert(C64::new(0.0, 0.0)) += x * y;
            }
        }
        out.retain(|_, c: &mut C64| c.norm() > 1e-15);
        Self { coefficients: out }
    }

    /// Largest deviation of `|u|` from 1 over 256 equispaced points.
    pub fn unitarity_defect(&self) -> f64 {
        (0..256)
            .map(|j| (self.eval(2.0 * PI * j as f64 / 256.0).norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= 1e-9
    }

    /// Operator of the inverse symbol, available when `u` is unitary.
    pub fn inverse_operator(&self) -> Result<Operator> {
        if !self.is_unitary() {
            return Err(Error::Singular("inverse symbol is not a trigonometric polynomial".into()));
        }
        multiplication_operator(&self.conj())
    }
}

/// Band operator whose offset-`k` diagonal is constantly `c_k`.
pub fn multiplication_operator(s: &WindingSymbol) -> Result<Operator> {
    if s.coefficients.is_empty() {
        return Err(Error::EmptySymbol);
    }
    Ok(BandOperator::from_diagonals(s.coefficients().map(|(k, c)| (k, Diagonal::constant(c)))).into())
}
