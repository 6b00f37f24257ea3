//! Banded operators on `l^2(Z)`.
//!
//! Entry `(m, n)` lives on the diagonal with offset `d = m - n` and equals
//! `diag_d(n)`. Diagonals are lazy evaluators, so products never truncate.

use crate::asymptotic::{Asymptotics, Decay, Series};
use crate::certified::CertifiedValue;
use crate::error::{Error, Result};
use crate::C64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

type Eval = Arc<dyn Fn(i64) -> C64 + Send + Sync>;

/// One diagonal: an evaluator plus optional asymptotic metadata.
#[derive(Clone)]
pub struct Diagonal {
    eval: Eval,
    asymptotics: Option<Asymptotics>,
}

impl fmt::Debug for Diagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Diagonal").field("asymptotics", &self.asymptotics).finish()
    }
}

impl Diagonal {
    pub fn new(eval: impl Fn(i64) -> C64 + Send + Sync + 'static, asymptotics: Option<Asymptotics>) -> Self {
        Self { eval: Arc::new(eval), asymptotics }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(move |_| c, Some(Asymptotics::constant(c)))
    }

    /// Polynomial `n -> sum_j coeffs[j] n^j`.
    pub fn polynomial(coeffs: Vec<C64>) -> Self {
        let series = Series::from_terms(coeffs.iter().enumerate().map(|(j, c)| (j as i32, *c)));
        let minus = series.clone();
        Self::new(
            move |n| coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * n as f64 + c),
            Some(Asymptotics::exact(series, minus)),
        )
    }

    #[inline]
    pub fn at(&self, n: i64) -> C64 {
        (self.eval)(n)
    }

    pub fn asymptotics(&self) -> Option<&Asymptotics> {
        self.asymptotics.as_ref()
    }

    pub fn with_asymptotics(mut self, a: Option<Asymptotics>) -> Self {
        self.asymptotics = a;
        self
    }

    pub fn shifted(&self, s: i64) -> Diagonal {
        if s == 0 {
            return self.clone();
        }
        let e = self.eval.clone();
        Diagonal::new(move |n| e(n + s), self.asymptotics.as_ref().map(|a| a.shift(s)))
    }

    pub fn add(&self, other: &Diagonal) -> Diagonal {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let asym = match (&self.asymptotics, &other.asymptotics) {
            (Some(x), Some(y)) => Some(x.add(y)),
            _ => None,
        };
        Diagonal::new(move |n| a(n) + b(n), asym)
    }

    pub fn mul(&self, other: &Diagonal) -> Diagonal {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let asym = match (&self.asymptotics, &other.asymptotics) {
            (Some(x), Some(y)) => Some(x.mul(y)),
            _ => None,
        };
        Diagonal::new(move |n| a(n) * b(n), asym)
    }

    pub fn scale(&self, k: C64) -> Diagonal {
        let a = self.eval.clone();
        Diagonal::new(move |n| a(n) * k, self.asymptotics.as_ref().map(|x| x.scale(k)))
    }

    pub fn conj(&self) -> Diagonal {
        let a = self.eval.clone();
        Diagonal::new(move |n| a(n).conj(), self.asymptotics.as_ref().map(|x| x.conj()))
    }

    /// Applies a pointwise map with a caller-supplied asymptotic description.
    pub fn map(&self, f: impl Fn(C64) -> C64 + Send + Sync + 'static, asymptotics: Option<Asymptotics>) -> Diagonal {
        let a = self.eval.clone();
        Diagonal::new(move |n| f(a(n)), asymptotics)
    }
}

/// Banded bi-infinite lattice operator.
#[derive(Clone, Debug, Default)]
pub struct BandOperator {
    diagonals: BTreeMap<i64, Diagonal>,
}

/// Summation chunk for certified traces; fixed so results do not depend on thread count.
const CHUNK: i64 = 512;

impl BandOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::shift(0)
    }

    /// Bilateral shift `e_n -> e_{n+k}`: band `{k}` with unit entries.
    pub fn shift(k: i64) -> Self {
        Self::from_diagonals([(k, Diagonal::constant(C64::new(1.0, 0.0)))])
    }

    pub fn diagonal(d: Diagonal) -> Self {
        Self::from_diagonals([(0, d)])
    }

    pub fn from_diagonals<I: IntoIterator<Item = (i64, Diagonal)>>(diags: I) -> Self {
        let mut diagonals: BTreeMap<i64, Diagonal> = BTreeMap::new();
        for (k, d) in diags {
            let merged = match diagonals.remove(&k) {
                Some(prev) => prev.add(&d),
                None => d,
            };
            diagonals.insert(k, merged);
        }
        Self { diagonals }
    }

    pub fn offsets(&self) -> impl Iterator<Item = i64> + '_ {
        self.diagonals.keys().copied()
    }

    pub fn diagonals(&self) -> impl Iterator<Item = (i64, &Diagonal)> + '_ {
        self.diagonals.iter().map(|(k, d)| (*k, d))
    }

    pub fn diag(&self, offset: i64) -> Option<&Diagonal> {
        self.diagonals.get(&offset)
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonals.keys().all(|k| *k == 0)
    }

    pub fn max_offset(&self) -> i64 {
        self.diagonals.keys().map(|k| k.abs()).max().unwrap_or(0)
    }

    pub fn entry(&self, m: i64, n: i64) -> C64 {
        self.diagonals.get(&(m - n)).map(|d| d.at(n)).unwrap_or_default()
    }

    pub fn add(&self, other: &BandOperator) -> BandOperator {
        Self::from_diagonals(self.diagonals.iter().chain(other.diagonals.iter()).map(|(k, d)| (*k, d.clone())))
    }

    pub fn scale(&self, k: C64) -> BandOperator {
        Self::from_diagonals(self.diagonals.iter().map(|(o, d)| (*o, d.scale(k))))
    }

    pub fn sub(&self, other: &BandOperator) -> BandOperator {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Band convolution `(AB)_d(n) = sum_{dA + dB = d} a_{dA}(n + dB) b_{dB}(n)`.
    pub fn compose(&self, other: &BandOperator) -> BandOperator {
        let mut terms = Vec::new();
        for (da, a) in &self.diagonals {
            for (db, b) in &other.diagonals {
                terms.push((da + db, a.shifted(*db).mul(b)));
            }
        }
        Self::from_diagonals(terms)
    }

    /// Adjoint: offset `-d` carries `n -> conj(a_d(n - d))`.
    pub fn adjoint(&self) -> BandOperator {
        Self::from_diagonals(self.diagonals.iter().map(|(d, a)| (-d, a.shifted(-d).conj())))
    }

    pub fn commutator(&self, other: &BandOperator) -> BandOperator {
        self.compose(other).sub(&other.compose(self))
    }

    /// Dense window `[lo, hi]^2` of the matrix, for brute-force checks.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<Vec<C64>> {
        (lo..=hi).map(|m| (lo..=hi).map(|n| self.entry(m, n)).collect()).collect()
    }

    /// Sup of `|diag_d|`, summed over offsets; an upper bound for the operator norm.
    pub fn band_sup_norm(&self, window: i64) -> f64 {
        self.diagonals
            .values()
            .map(|d| {
                let inner = (-window..=window).map(|n| d.at(n).norm()).fold(0.0, f64::max);
                let outer = d.asymptotics().map(|a| a.sup_bound(window as f64 + 1.0)).unwrap_or(0.0);
                inner.max(outer)
            })
            .sum()
    }

    /// Sum of `entry(n, n)` over `|n| <= window` with a closed-form tail majorant.
    pub fn certified_trace(&self, window: usize) -> Result<CertifiedValue> {
        let Some(d) = self.diagonals.get(&0) else {
            return Ok(CertifiedValue::zero());
        };
        let w = window as i64;
        let asym = d
            .asymptotics()
            .ok_or_else(|| Error::MissingAsymptotics("diagonal of a trace argument".into()))?;
        let tail = summable_tail(asym, w, |n| d.at(n))?;
        let value = chunked_sum(-w, w, |n| d.at(n));
        Ok(CertifiedValue::new(value, tail))
    }
}

/// Deterministic parallel sum over `lo..=hi`: fixed chunks, ordered reduction.
pub fn chunked_sum(lo: i64, hi: i64, f: impl Fn(i64) -> C64 + Sync) -> C64 {
    if hi < lo {
        return C64::new(0.0, 0.0);
    }
    let chunks: Vec<i64> = (lo..=hi).step_by(CHUNK as usize).collect();
    let partial: Vec<C64> = chunks
        .par_iter()
        .map(|&start| {
            let end = (start + CHUNK - 1).min(hi);
            let mut s = C64::new(0.0, 0.0);
            for n in start..=end {
                s += f(n);
            }
            s
        })
        .collect();
    partial.into_iter().fold(C64::new(0.0, 0.0), |a, b| a + b)
}

/// `sum_{n >= s} n^{-alpha}` bounded by the midpoint integral (convexity).
fn power_tail(alpha: f64, s: f64) -> f64 {
    (s - 0.5).powf(1.0 - alpha) / (alpha - 1.0)
}

/// Majorant of `sum_{|n| > w} |a(n)|` from the asymptotic description.
pub fn summable_tail(asym: &Asymptotics, w: i64, f: impl Fn(i64) -> C64) -> Result<f64> {
    let mut tail = 0.0;
    // explicit terms between the window and the validity threshold
    for n in (w + 1)..asym.n0 {
        tail += f(n).norm() + f(-n).norm();
    }
    let start = (w + 1).max(asym.n0) as f64;
    for (side, series) in [("+", &asym.plus), ("-", &asym.minus)] {
        for (e, c) in series.terms() {
            if e >= -1 {
                return Err(Error::NotTraceClass(format!("term {c} n^{e} at {side}infinity")));
            }
            tail += c.norm() * power_tail(-e as f64, start);
        }
    }
    tail += 2.0
        * match asym.decay {
            Decay::Exact => 0.0,
            Decay::Power { c, alpha } => {
                if alpha <= 1.0 {
                    return Err(Error::NotTraceClass(format!("decay exponent {alpha} <= 1")));
                }
                c * power_tail(alpha, start)
            }
            Decay::Gaussian { c, beta } => {
                let first = (-beta * start * start).exp();
                let ratio = (-beta * (2.0 * start + 1.0)).exp();
                c * first / (1.0 - ratio)
            }
        };
    Ok(tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn inverse_shifts_compose_to_identity() {
        let p = BandOperator::shift(1).compose(&BandOperator::shift(-1));
        assert_eq!(p.offsets().collect::<Vec<_>>(), vec![0]);
        for n in -5..5 {
            assert_eq!(p.entry(n, n), re(1.0));
        }
    }

    #[test]
    fn diagonal_times_shift() {
        let f = Diagonal::new(|n| re((n * n) as f64 + 0.5), None);
        let p = BandOperator::diagonal(f).compose(&BandOperator::shift(1));
        for m in -8..=8 {
            for n in -8..=8 {
                let expect = if m == n + 1 { re(((n + 1) * (n + 1)) as f64 + 0.5) } else { re(0.0) };
                assert_eq!(p.entry(m, n), expect);
            }
        }
    }

    #[test]
    fn gaussian_trace() {
        let d = Diagonal::new(|n| re((-(n * n) as f64).exp()), Some(Asymptotics::decaying(Decay::gaussian(1.0, 1.0), 1)));
        let t = BandOperator::diagonal(d).certified_trace(6).unwrap();
        let oracle: f64 = (-50..=50).map(|n: i64| (-(n * n) as f64).exp()).sum();
        assert!((t.value.re - oracle).abs() <= t.tail_bound);
        assert!(t.tail_bound <= 2.0 * (-49f64).exp() / (1.0 - (-13f64).exp()) * (1.0 + 1e-12));
    }

    #[test]
    fn zero_has_zero_trace() {
        let t = BandOperator::zero().certified_trace(10).unwrap();
        assert_eq!(t, CertifiedValue::zero());
    }

    #[test]
    fn nonzero_limit_is_rejected() {
        assert!(matches!(BandOperator::identity().certified_trace(10), Err(Error::NotTraceClass(_))));
    }

    #[test]
    fn adjoint_of_weighted_shift() {
        let f = Diagonal::new(|n| C64::new(n as f64, 1.0), None);
        let a = BandOperator::diagonal(f).compose(&BandOperator::shift(2));
        let b = a.adjoint();
        for m in -6..=6 {
            for n in -6..=6 {
                assert_eq!(b.entry(m, n), a.entry(n, m).conj());
            }
        }
    }
}
