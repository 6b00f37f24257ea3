//! Zeta functions `zeta_P(s) = Tr P |D|^{-s}` continued by asymptotic subtraction.

use crate::hurwitz::hurwitz_zeta_with_error;
use ncg_model_triples::SpectralTriple;
use ncg_operator_core::function::{is_lattice_coordinate, lattice_diagonal, KERNEL_TOL};
use ncg_operator_core::{
    hermitian_spectrum, operator_function, Asymptotics, CertifiedValue, Decay, Diagonal, Error,
    Operator, Result, ScalarFn, C64,
};
use std::sync::Arc;

/// Largest lattice index summed explicitly for the remainder.
pub const SAMPLER_WINDOW: i64 = 1 << 14;

/// Target size of the remainder truncation before the window cap applies.
const REMAINDER_TOL: f64 = 1e-15;

type Eval = Arc<dyn Fn(C64) -> Result<CertifiedValue> + Send + Sync>;

/// A declared pole of the sampler in the `s` variable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pole {
    pub at: f64,
    pub order: u32,
    pub residue: C64,
}

/// Meromorphic function known on `Re s > s_conv` and on a punctured disc
/// of radius `r0` around 0, with its declared poles.
#[derive(Clone)]
pub struct MeromorphicSampler {
    eval: Eval,
    poles: Vec<Pole>,
    q_max: u32,
    s_conv: f64,
    r0: f64,
}

impl std::fmt::Debug for MeromorphicSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MeromorphicSampler")
            .field("poles", &self.poles)
            .field("q_max", &self.q_max)
            .field("s_conv", &self.s_conv)
            .field("r0", &self.r0)
            .finish()
    }
}

impl MeromorphicSampler {
    pub fn new(
        eval: impl Fn(C64) -> Result<CertifiedValue> + Send + Sync + 'static,
        poles: Vec<Pole>,
        q_max: u32,
        s_conv: f64,
        r0: f64,
    ) -> Self {
        Self { eval: Arc::new(eval), poles, q_max, s_conv, r0 }
    }

    pub fn evaluate(&self, s: C64) -> Result<CertifiedValue> {
        (self.eval)(s)
    }

    pub fn declared_poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn q_max(&self) -> u32 {
        self.q_max
    }

    /// Abscissa of absolute convergence of the defining sum.
    pub fn s_conv(&self) -> f64 {
        self.s_conv
    }

    /// Radius of the punctured disc around 0 where `evaluate` is valid.
    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// Order of the pole at `s = 0`, 0 when regular.
    pub fn order_at_zero(&self) -> u32 {
        self.poles.iter().filter(|p| p.at == 0.0).map(|p| p.order).max().unwrap_or(0)
    }

    /// Distance from 0 to the nearest declared pole away from 0.
    pub fn pole_distance(&self) -> f64 {
        self.poles.iter().filter(|p| p.at != 0.0).map(|p| p.at.abs()).fold(f64::INFINITY, f64::min)
    }
}

/// `zeta_P` on the triple's Dirac operator.
pub fn zeta_sampler(p: &Operator, t: &SpectralTriple) -> Result<MeromorphicSampler> {
    zeta_sampler_windowed(p, &t.dirac, SAMPLER_WINDOW)
}

/// `zeta_P` with the remainder summed over at most `|n| <= window`.
pub fn zeta_sampler_windowed(p: &Operator, dirac: &Operator, window: i64) -> Result<MeromorphicSampler> {
    match (p, dirac) {
        (Operator::Dense(pd), Operator::Dense(dd)) => {
            let (ev, v) = hermitian_spectrum(dd)?;
            let conj = v.adjoint().compose(pd)?.compose(&v)?;
            let terms: Vec<(f64, C64)> = ev
                .iter()
                .enumerate()
                .map(|(i, &x)| (if x.abs() < KERNEL_TOL { 1.0 } else { x.abs() }, conj.entry(i, i)))
                .collect();
            Ok(MeromorphicSampler::new(
                move |s| {
                    let v = terms.iter().map(|(a, c)| c * C64::new(*a, 0.0).powc(-s)).sum();
                    Ok(CertifiedValue::exact(v))
                },
                vec![],
                0,
                f64::NEG_INFINITY,
                f64::INFINITY,
            ))
        }
        (Operator::Band(pb), Operator::Band(db)) => {
            if !is_lattice_coordinate(&lattice_diagonal(db)?) {
                return Err(Error::InvalidArgument(
                    "lattice zeta functions need D e_n = n e_n".into(),
                ));
            }
            let diag = pb.diag(0).cloned().unwrap_or_else(|| Diagonal::constant(C64::new(0.0, 0.0)));
            let asym = diag
                .asymptotics()
                .cloned()
                .ok_or_else(|| Error::MissingAsymptotics("diagonal of a zeta argument".into()))?;
            Ok(lattice_sampler(diag, asym, window))
        }
        _ => Err(Error::MixedBackend),
    }
}

/// `|n|` with the kernel sent to 1.
fn abs_n(n: i64) -> f64 {
    if n == 0 {
        1.0
    } else {
        n.unsigned_abs() as f64
    }
}

fn lattice_sampler(diag: Diagonal, asym: Asymptotics, window: i64) -> MeromorphicSampler {
    // combined coefficient of m^e over both ends: c+ + (-1)^e c-
    let mut exps: Vec<i32> = asym.plus.terms().map(|(e, _)| e).chain(asym.minus.terms().map(|(e, _)| e)).collect();
    exps.sort_unstable();
    exps.dedup();
    let coeffs: Vec<(i32, C64, C64)> = exps
        .iter()
        .map(|&e| {
            let sign = if e.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            (e, asym.plus.coefficient(e), asym.minus.coefficient(e) * sign)
        })
        .collect();
    let poles: Vec<Pole> = coeffs
        .iter()
        .filter_map(|&(e, cp, cm)| {
            let residue = cp + cm;
            (residue.norm() > 0.0).then_some(Pole { at: 1.0 + e as f64, order: 1, residue })
        })
        .collect();
    let s_conv = exps.iter().map(|&e| 1.0 + e as f64).fold(1.0 - asym.decay.alpha(), f64::max);
    let alpha = asym.decay.alpha();
    let r0 = {
        let by_pole = poles.iter().filter(|p| p.at != 0.0).map(|p| p.at.abs()).fold(f64::INFINITY, f64::min);
        by_pole.min(alpha - 1.0)
    };
    let q_max = poles.iter().map(|p| p.order).max().unwrap_or(0);
    let start = asym.n0.max(1);
    let decay = asym.decay;
    let eval = move |s: C64| -> Result<CertifiedValue> {
        let mut value = C64::new(0.0, 0.0);
        let mut tail = 0.0;
        for n in (1 - start)..start {
            value += diag.at(n) * C64::new(abs_n(n), 0.0).powc(-s);
        }
        let a = start as f64;
        for &(e, cp, cm) in &coeffs {
            let c = cp + cm;
            if c.norm() == 0.0 {
                continue;
            }
            let (z, err) = hurwitz_zeta_with_error(s - e as f64, a)?;
            value += c * z;
            tail += c.norm() * err;
        }
        if decay != Decay::Exact {
            let sigma = s.re;
            let w = remainder_window(decay, sigma, start, window)?;
            for n in start..=w {
                let w_s = C64::new(n as f64, 0.0).powc(-s);
                let nf = n as f64;
                let rp = diag.at(n) - asym.plus.eval(nf);
                let rm = diag.at(-n) - asym.minus.eval(-nf);
                value += (rp + rm) * w_s;
            }
            tail += remainder_tail(decay, sigma, w)?;
        }
        Ok(CertifiedValue::new(value, tail))
    };
    MeromorphicSampler::new(eval, poles, q_max, s_conv, r0)
}

/// Bound on `2 sum_{n > w} bound(n) n^{-sigma}`.
fn remainder_tail(decay: Decay, sigma: f64, w: i64) -> Result<f64> {
    let x = w as f64 + 0.5;
    match decay {
        Decay::Exact => Ok(0.0),
        Decay::Power { c, alpha } => {
            let beta = alpha + sigma;
            if beta <= 1.0 {
                return Err(Error::NotTraceClass(format!("remainder sum diverges at Re s = {sigma}")));
            }
            Ok(2.0 * c * x.powf(1.0 - beta) / (beta - 1.0))
        }
        Decay::Gaussian { c, beta } => {
            let n = w as f64 + 1.0;
            let first = c * (-beta * n * n).exp() * n.powf(-sigma).max(1.0);
            let ratio = (-beta * (2.0 * n + 1.0)).exp() * (1.0 + 1.0 / n).powf(sigma.abs());
            Ok(2.0 * first / (1.0 - ratio).max(1e-300))
        }
    }
}

/// Smallest cutoff whose remainder tail is below the target, capped at `cap`.
fn remainder_window(decay: Decay, sigma: f64, start: i64, cap: i64) -> Result<i64> {
    let mut w = (2 * start).max(64);
    while w < cap && remainder_tail(decay, sigma, w)? > REMAINDER_TOL {
        w *= 2;
    }
    Ok(w.min(cap).max(start))
}

/// `Tr gamma (1 + D^2)^{-s}`, which equals the index of `P` for every `s`
/// on a finite even triple with `D = [[0, P*], [P, 0]]`.
pub fn zeta_index(t: &SpectralTriple, s: C64) -> Result<C64> {
    let gamma = t
        .grading
        .as_ref()
        .ok_or_else(|| Error::ParityMismatch("zeta index needs a graded triple".into()))?;
    if !matches!(t.dirac, Operator::Dense(_)) {
        return Err(Error::InvalidArgument("zeta index is computed on finite triples".into()));
    }
    let f = ScalarFn::new(move |x| Some(C64::new(1.0 + x * x, 0.0).powc(-s)));
    let w = operator_function(&t.dirac, &f)?;
    Ok(gamma.compose(&w)?.trace(0)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ncg_model_triples::{build_circle_dirac, build_finite_even};
    use ncg_operator_core::{BandOperator, DenseOperator, Series};

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn identity_on_circle_matches_direct_sum() {
        let t = build_circle_dirac();
        let m = zeta_sampler(&t.identity(), &t).unwrap();
        assert_eq!(m.declared_poles().len(), 1);
        assert_eq!(m.declared_poles()[0].at, 1.0);
        assert_eq!(m.s_conv(), 1.0);
        let s = C64::new(3.0, 0.5);
        let v = m.evaluate(s).unwrap();
        let direct: C64 = (1..200000).map(|n| 2.0 * re(n as f64).powc(-s)).sum::<C64>() + 1.0;
        assert!((v.value - direct).norm() < 1e-9);
    }

    #[test]
    fn remainder_is_summed() {
        let t = build_circle_dirac();
        // a(n) = 1/n^2 + 1/(n^2 (1 + n^2)) at large |n|
        let a = Asymptotics::symmetric(Series::monomial(-2, re(1.0)), Decay::power(1.0, 4.0), 1);
        let d = Diagonal::new(
            |n| {
                let x = n as f64;
                if n == 0 {
                    re(3.0)
                } else {
                    re(1.0 / (x * x) + 1.0 / (x * x * (1.0 + x * x)))
                }
            },
            Some(a),
        );
        let p: Operator = BandOperator::diagonal(d.clone()).into();
        let m = zeta_sampler(&p, &t).unwrap();
        let s = C64::new(1.5, -0.3);
        let v = m.evaluate(s).unwrap();
        let direct: C64 = (1..400000i64)
            .map(|n| (d.at(n) + d.at(-n)) * re(n as f64).powc(-s))
            .sum::<C64>()
            + 3.0;
        assert!((v.value - direct).norm() < 1e-9, "{v:?} {direct}");
    }

    #[test]
    fn missing_asymptotics_is_reported() {
        let t = build_circle_dirac();
        let p: Operator = BandOperator::diagonal(Diagonal::new(|_| re(1.0), None)).into();
        assert!(matches!(zeta_sampler(&p, &t), Err(Error::MissingAsymptotics(_))));
    }

    #[test]
    fn finite_zeta_index() {
        let p = DenseOperator::new(1, 2, vec![re(1.0), re(2.0)]).unwrap();
        let t = build_finite_even(2, 1, &p, vec![]).unwrap();
        for s in [0.0, 1.0, 2.5] {
            assert!((zeta_index(&t, re(s)).unwrap() - re(1.0)).norm() < 1e-12);
        }
    }
}
