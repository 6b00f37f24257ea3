//! Hurwitz zeta `zeta(s, a) = sum_{k >= 0} (k + a)^{-s}` by Euler-Maclaurin summation.

use ncg_operator_core::{Error, Result, C64};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::sync::OnceLock;

/// Number of Bernoulli correction terms.
const BERNOULLI_TERMS: usize = 14;

/// `B_{2j} / (2j)!` for `j = 1..=BERNOULLI_TERMS`.
fn bernoulli_weights() -> &'static [f64] {
    static CELL: OnceLock<Vec<f64>> = OnceLock::new();
    CELL.get_or_init(|| {
        let n = 2 * BERNOULLI_TERMS;
        let mut b: Vec<BigRational> = vec![BigRational::from_integer(BigInt::from(1))];
        // sum_{k < m} binom(m + 1, k) B_k = -(m + 1) B_m
        for m in 1..=n {
            let mut acc = BigRational::zero();
            let mut binom = BigInt::from(1);
            for (k, bk) in b.iter().enumerate() {
                acc += BigRational::from_integer(binom.clone()) * bk;
                binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
            }
            b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
        }
        let mut fact = BigInt::from(1);
        let mut out = Vec::with_capacity(BERNOULLI_TERMS);
        for k in 1..=n {
            fact *= BigInt::from(k);
            if k % 2 == 0 {
                let w = &b[k] / BigRational::from_integer(fact.clone());
                out.push(w.to_f64().expect("finite"));
            }
        }
        out
    })
}

/// `zeta(s, a)` for real `a > 0` and complex `s != 1`, with a bound on the
/// first omitted correction term.
pub fn hurwitz_zeta_with_error(s: C64, a: f64) -> Result<(C64, f64)> {
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("Hurwitz parameter {a} must be positive")));
    }
    if (s - 1.0).norm() == 0.0 {
        return Err(Error::InvalidArgument("zeta(s, a) has a pole at s = 1".into()));
    }
    let shift = (20.0 + s.norm() - a).ceil().max(0.0) as usize;
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..shift {
        sum += C64::new(a + k as f64, 0.0).powc(-s);
    }
    let x = a + shift as f64;
    let lx = x.ln();
    let xs = (-s * lx).exp();
    sum += xs * x / (s - 1.0) + xs * 0.5;
    // rising factorial s (s+1) ... (s+2j-2) against x^{-s-2j+1}
    let mut rising = s;
    let mut power = xs / x;
    let weights = bernoulli_weights();
    for (j, w) in weights.iter().enumerate() {
        sum += rising * power * *w;
        let m = (2 * j + 1) as f64;
        rising = rising * (s + m) * (s + m + 1.0);
        power /= x * x;
    }
    // the next term, enlarged by the usual remainder factor
    let next = 2.0 * rising.norm() * power.norm() / (2.0 * std::f64::consts::PI).powi(2 * BERNOULLI_TERMS as i32 + 2);
    let factor = (s + (2 * BERNOULLI_TERMS + 1) as f64).norm() / (s.re + (2 * BERNOULLI_TERMS + 1) as f64).max(1.0);
    Ok((sum, next * factor))
}

/// `zeta(s, a)`.
pub fn hurwitz_zeta(s: C64, a: f64) -> Result<C64> {
    hurwitz_zeta_with_error(s, a).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn bernoulli_weights_match_known_values() {
        let w = bernoulli_weights();
        assert!((w[0] - 1.0 / 12.0).abs() < 1e-16);
        assert!((w[1] + 1.0 / 720.0).abs() < 1e-18);
        assert!((w[2] - 1.0 / 30240.0).abs() < 1e-19);
    }

    #[test]
    fn riemann_values() {
        assert!((hurwitz_zeta(re(2.0), 1.0).unwrap() - re(PI * PI / 6.0)).norm() < 1e-14);
        assert!((hurwitz_zeta(re(0.0), 1.0).unwrap() - re(-0.5)).norm() < 1e-14);
        assert!((hurwitz_zeta(re(-1.0), 1.0).unwrap() - re(-1.0 / 12.0)).norm() < 1e-13);
        assert!((hurwitz_zeta(re(4.0), 1.0).unwrap() - re(PI.powi(4) / 90.0)).norm() < 1e-14);
    }

    #[test]
    fn shift_relation() {
        let s = C64::new(0.3, 1.7);
        let a = 2.5;
        let lhs = hurwitz_zeta(s, a).unwrap() - hurwitz_zeta(s, a + 1.0).unwrap();
        assert!((lhs - re(a).powc(-s)).norm() < 1e-13);
    }

    #[test]
    fn half_integer_parameter() {
        // zeta(s, 1/2) = (2^s - 1) zeta(s)
        let s = C64::new(-0.4, 0.2);
        let lhs = hurwitz_zeta(s, 0.5).unwrap();
        let rhs = (re(2.0).powc(s) - 1.0) * hurwitz_zeta(s, 1.0).unwrap();
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn pole_is_rejected() {
        assert!(hurwitz_zeta(re(1.0), 1.0).is_err());
        assert!(hurwitz_zeta(re(2.0), 0.0).is_err());
    }
}
