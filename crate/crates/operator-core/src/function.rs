//! Functional calculus for self-adjoint operators.

use crate::asymptotic::{Asymptotics, Decay, Series};
use crate::band::{BandOperator, Diagonal};
use crate::dense::{hermitian_spectrum, DenseOperator};
use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::C64;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Number of terms kept in the built-in large-`x` expansions.
const EXPANSION_TERMS: i32 = 4;

/// Window on which lattice functional calculus checks definedness.
const CHECK_WINDOW: i64 = 1024;

/// Below this, an eigenvalue counts as a kernel point.
pub const KERNEL_TOL: f64 = 1e-12;

/// Scalar function with an optional description of `n -> f(n)` at large `|n|`.
#[derive(Clone)]
pub struct ScalarFn {
    f: Arc<dyn Fn(f64) -> Option<C64> + Send + Sync>,
    at_infinity: Option<Asymptotics>,
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl ScalarFn {
    pub fn new(f: impl Fn(f64) -> Option<C64> + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), at_infinity: None }
    }

    pub fn real(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(move |x| Some(re(f(x))))
    }

    pub fn with_asymptotics(mut self, a: Asymptotics) -> Self {
        self.at_infinity = Some(a);
        self
    }

    pub fn apply(&self, x: f64) -> Option<C64> {
        (self.f)(x)
    }

    pub fn asymptotics(&self) -> Option<&Asymptotics> {
        self.at_infinity.as_ref()
    }

    /// Pointwise product; asymptotics multiply when both are known.
    pub fn times(&self, other: &ScalarFn) -> ScalarFn {
        let (f, g) = (self.f.clone(), other.f.clone());
        let asym = match (&self.at_infinity, &other.at_infinity) {
            (Some(a), Some(b)) => Some(a.mul(b)),
            _ => None,
        };
        ScalarFn { f: Arc::new(move |x| Some(f(x)? * g(x)?)), at_infinity: asym }
    }

    pub fn identity() -> Self {
        Self::real(|x| x).with_asymptotics(Asymptotics::exact(
            Series::monomial(1, re(1.0)),
            Series::monomial(1, re(1.0)),
        ))
    }

    pub fn square() -> Self {
        Self::real(|x| x * x).with_asymptotics(Asymptotics::exact(
            Series::monomial(2, re(1.0)),
            Series::monomial(2, re(1.0)),
        ))
    }

    /// `x -> exp(-t x^2)`.
    pub fn heat(t: f64) -> Self {
        Self::real(move |x| (-t * x * x).exp()).with_asymptotics(Asymptotics::decaying(Decay::gaussian(1.0, t), 1))
    }

    /// `x -> x (1 + x^2)^{-1/2}`.
    pub fn bounded_transform() -> Self {
        // sign(x) sum_j binom(-1/2, j) x^{-2j}, alternating with decreasing terms for |x| >= 1
        let mut terms = Vec::new();
        let mut b = 1.0;
        for j in 0..=EXPANSION_TERMS {
            terms.push((-2 * j, re(b)));
            b *= (-0.5 - j as f64) / (j + 1) as f64;
        }
        let plus = Series::from_terms(terms.iter().cloned());
        let minus = plus.scale(re(-1.0));
        let rest = Decay::power(b.abs(), (2 * EXPANSION_TERMS + 2) as f64);
        Self::real(|x| x / (1.0 + x * x).sqrt()).with_asymptotics(Asymptotics::new(plus, minus, rest, 1))
    }

    /// `x -> (1 + x^2)^{-1}`.
    pub fn defect() -> Self {
        let series = Series::from_terms((1..=EXPANSION_TERMS).map(|j| (-2 * j, re(if j % 2 == 1 { 1.0 } else { -1.0 }))));
        let rest = Decay::power(1.0, (2 * EXPANSION_TERMS + 2) as f64);
        Self::real(|x| 1.0 / (1.0 + x * x)).with_asymptotics(Asymptotics::symmetric(series, rest, 1))
    }

    /// `x -> |x|^k` with the kernel sent to 1.
    pub fn abs_power(k: i32) -> Self {
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Self::real(move |x| if x.abs() < KERNEL_TOL { 1.0 } else { x.abs().powi(k) }).with_asymptotics(
            Asymptotics::exact(Series::monomial(k, re(1.0)), Series::monomial(k, re(sign))),
        )
    }

    /// `x -> |x|^{s}` for complex `s`, kernel sent to 1; no lattice asymptotics.
    pub fn abs_complex_power(s: C64) -> Self {
        Self::new(move |x| Some(if x.abs() < KERNEL_TOL { re(1.0) } else { re(x.abs()).powc(s) }))
    }

    /// Sign function with a chosen value at 0.
    pub fn sign(at_zero: f64) -> Self {
        Self::real(move |x| if x.abs() < KERNEL_TOL { at_zero } else { x.signum() }).with_asymptotics(
            Asymptotics::exact(Series::constant(re(1.0)), Series::constant(re(-1.0))),
        )
    }

    /// `x -> log(|x|^2)` with the kernel sent to 0.
    pub fn log_abs_sq() -> Self {
        Self::real(|x| if x.abs() < KERNEL_TOL { 0.0 } else { (x * x).ln() })
    }
}

/// True when the lattice diagonal is exactly `n -> n` at both ends.
pub fn is_lattice_coordinate(d: &Diagonal) -> bool {
    let id = Series::monomial(1, re(1.0));
    matches!(d.asymptotics(), Some(a) if a.plus == id && a.minus == id && a.decay == Decay::Exact)
}

/// Applies `f` on the spectrum of a self-adjoint operator.
pub fn operator_function(d: &Operator, f: &ScalarFn) -> Result<Operator> {
    match d {
        Operator::Dense(h) => {
            let (ev, v) = hermitian_spectrum(h)?;
            let mut vals = Vec::with_capacity(ev.len());
            for x in &ev {
                vals.push(f.apply(*x).ok_or(Error::FunctionUndefined(*x))?);
            }
            let m = v.matrix() * DMatrix::from_diagonal(&DVector::from_vec(vals)) * v.matrix().adjoint();
            Ok(DenseOperator::from_matrix(m).into())
        }
        Operator::Band(b) => {
            let diag = lattice_diagonal(b)?;
            for n in -CHECK_WINDOW..=CHECK_WINDOW {
                let x = diag.at(n);
                if x.im.abs() > 1e-12 * (1.0 + x.re.abs()) {
                    return Err(Error::NotHermitian(x.im.abs()));
                }
                if f.apply(x.re).is_none() {
                    return Err(Error::FunctionUndefined(x.re));
                }
            }
            let asym = if is_lattice_coordinate(&diag) { f.asymptotics().cloned() } else { None };
            let g = f.clone();
            Ok(BandOperator::diagonal(diag.map(move |x| g.apply(x.re).unwrap_or(re(f64::NAN)), asym)).into())
        }
    }
}

/// The offset-0 diagonal of a diagonal lattice operator.
pub fn lattice_diagonal(b: &BandOperator) -> Result<Diagonal> {
    if !b.is_diagonal() {
        return Err(Error::NotDiagonal("functional calculus on the lattice".into()));
    }
    Ok(b.diag(0).cloned().unwrap_or_else(|| Diagonal::constant(re(0.0))))
}
