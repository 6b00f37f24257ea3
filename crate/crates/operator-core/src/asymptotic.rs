//! Asymptotic metadata for lattice diagonals.
//!
//! A diagonal `a(n)` is described at each end of the lattice by a finite
//! Laurent series in integer powers of `n` plus a remainder majorant, valid
//! for `|n| >= n0`. The algebra below propagates this description through
//! sums, products and index shifts so that traces can be certified.

use crate::C64;
use std::collections::BTreeMap;

/// Lowest exponent kept in a series; lower terms are folded into the remainder.
pub const SERIES_DEPTH: i32 = 10;

/// Relative threshold below which series coefficients are treated as rounding noise.
const PRUNE: f64 = 1e-14;

/// Remainder majorant `|a(n) - S(n)| <= bound(|n|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decay {
    Exact,
    /// `c |n|^{-alpha}`; a negative `alpha` records polynomial growth.
    Power { c: f64, alpha: f64 },
    /// `c exp(-beta n^2)`.
    Gaussian { c: f64, beta: f64 },
}

impl Decay {
    pub fn power(c: f64, alpha: f64) -> Self {
        if c == 0.0 {
            Decay::Exact
        } else {
            Decay::Power { c, alpha }
        }
    }

    pub fn gaussian(c: f64, beta: f64) -> Self {
        if c == 0.0 {
            Decay::Exact
        } else {
            Decay::Gaussian { c, beta }
        }
    }

    pub fn bound(&self, n: f64) -> f64 {
        let n = n.abs();
        match *self {
            Decay::Exact => 0.0,
            Decay::Power { c, alpha } => c * n.powf(-alpha),
            Decay::Gaussian { c, beta } => c * (-beta * n * n).exp(),
        }
    }

    /// Power-law exponent of the majorant, infinite for exact and Gaussian tails.
    pub fn alpha(&self) -> f64 {
        match *self {
            Decay::Power { alpha, .. } => alpha,
            _ => f64::INFINITY,
        }
    }

    pub fn scaled(self, k: f64) -> Self {
        let k = k.abs();
        match self {
            Decay::Exact => Decay::Exact,
            Decay::Power { c, alpha } => Decay::power(c * k, alpha),
            Decay::Gaussian { c, beta } => Decay::gaussian(c * k, beta),
        }
    }

    /// Majorant of the sum, valid for `|n| >= n0 >= 1`.
    pub fn plus(self, other: Decay, n0: f64) -> Decay {
        let n0 = n0.max(1.0);
        match (self, other) {
            (Decay::Exact, x) | (x, Decay::Exact) => x,
            (Decay::Power { c: c1, alpha: a1 }, Decay::Power { c: c2, alpha: a2 }) => {
                let a = a1.min(a2);
                let c = c1 * n0.powf(a - a1) + c2 * n0.powf(a - a2);
                Decay::power(c, a)
            }
            (Decay::Power { c, alpha }, Decay::Gaussian { c: cg, beta })
            | (Decay::Gaussian { c: cg, beta }, Decay::Power { c, alpha }) => {
                Decay::power(c + cg * sup_power_gaussian(alpha, beta, n0), alpha)
            }
            (Decay::Gaussian { c: c1, beta: b1 }, Decay::Gaussian { c: c2, beta: b2 }) => {
                Decay::gaussian(c1 + c2, b1.min(b2))
            }
        }
    }

    /// Majorant of the product of two remainders.
    pub fn times(self, other: Decay, n0: f64) -> Decay {
        let n0 = n0.max(1.0);
        match (self, other) {
            (Decay::Exact, _) | (_, Decay::Exact) => Decay::Exact,
            (Decay::Power { c: c1, alpha: a1 }, Decay::Power { c: c2, alpha: a2 }) => {
                Decay::power(c1 * c2, a1 + a2)
            }
            (Decay::Power { c, alpha }, Decay::Gaussian { c: cg, beta })
            | (Decay::Gaussian { c: cg, beta }, Decay::Power { c, alpha }) => {
                Decay::Gaussian { c: c * cg, beta }.times_growth(1.0, -alpha, n0)
            }
            (Decay::Gaussian { c: c1, beta: b1 }, Decay::Gaussian { c: c2, beta: b2 }) => {
                Decay::gaussian(c1 * c2, b1 + b2)
            }
        }
    }

    /// Majorant after multiplication by a function bounded by `m |n|^g`.
    pub fn times_growth(self, m: f64, g: f64, n0: f64) -> Decay {
        let n0 = n0.max(1.0);
        if m == 0.0 {
            return Decay::Exact;
        }
        match self {
            Decay::Exact => Decay::Exact,
            Decay::Power { c, alpha } => Decay::power(c * m, alpha - g),
            Decay::Gaussian { c, beta } => {
                if g <= 0.0 {
                    Decay::gaussian(c * m * n0.powf(g), beta)
                } else {
                    let half = beta / 2.0;
                    Decay::gaussian(c * m * sup_power_gaussian(g, half, n0), half)
                }
            }
        }
    }

    /// Majorant of `n -> bound(n + s)`, valid for `|n| >= 2|s|`.
    pub fn shifted(self, s: i64) -> Decay {
        if s == 0 {
            return self;
        }
        let s = s as f64;
        match self {
            Decay::Exact => Decay::Exact,
            Decay::Power { c, alpha } => Decay::power(c * 2f64.powf(alpha.abs()), alpha),
            Decay::Gaussian { c, beta } => Decay::gaussian(c * (beta * s * s).exp(), beta / 2.0),
        }
    }
}

/// `sup_{x >= n0} x^alpha exp(-beta x^2)`.
fn sup_power_gaussian(alpha: f64, beta: f64, n0: f64) -> f64 {
    if alpha <= 0.0 {
        return n0.powf(alpha) * (-beta * n0 * n0).exp();
    }
    let x_star = (alpha / (2.0 * beta)).sqrt();
    let x = x_star.max(n0);
    x.powf(alpha) * (-beta * x * x).exp()
}

/// Finite Laurent series `sum_e c_e n^e` in integer powers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Series {
    terms: BTreeMap<i32, C64>,
}

impl Series {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(exponent: i32, c: C64) -> Self {
        Self::from_terms([(exponent, c)])
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, C64)>>(terms: I) -> Self {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            *map.entry(e).or_insert(C64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| *c != C64::new(0.0, 0.0));
        Self { terms: map }
    }

    pub fn coefficient(&self, exponent: i32) -> C64 {
        self.terms.get(&exponent).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn abs_sum(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn eval(&self, n: f64) -> C64 {
        self.terms.iter().map(|(e, c)| c * n.powi(*e)).sum()
    }

    pub fn scale(&self, k: C64) -> Series {
        Series::from_terms(self.terms().map(|(e, c)| (e, c * k)))
    }

    pub fn conj(&self) -> Series {
        Series::from_terms(self.terms().map(|(e, c)| (e, c.conj())))
    }

    fn scale_hint(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Removes rounding noise and terms below the kept depth, returning their majorant.
    fn pruned(map: BTreeMap<i32, C64>, scale: f64) -> (Series, Decay) {
        let mut kept = BTreeMap::new();
        let mut rest = Decay::Exact;
        for (e, c) in map {
            let small = c.norm() <= PRUNE * scale;
            if e < -SERIES_DEPTH || (small && e < 0) {
                rest = rest.plus(Decay::power(c.norm(), -e as f64), 1.0);
            } else if !small && c != C64::new(0.0, 0.0) {
                kept.insert(e, c);
            }
        }
        (Series { terms: kept }, rest)
    }

    pub fn add(&self, other: &Series) -> (Series, Decay) {
        let mut map = self.terms.clone();
        for (e, c) in other.terms() {
            *map.entry(e).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Series::pruned(map, self.scale_hint().max(other.scale_hint()))
    }

    pub fn mul(&self, other: &Series) -> (Series, Decay) {
        let mut map = BTreeMap::new();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                *map.entry(e1 + e2).or_insert(C64::new(0.0, 0.0)) += c1 * c2;
            }
        }
        Series::pruned(map, self.scale_hint() * other.scale_hint())
    }

    /// Re-expansion of `S(n + s)`; the remainder is valid for `|n| >= 4|s|`.
    pub fn shifted(&self, s: i64) -> (Series, Decay) {
        if s == 0 {
            return (self.clone(), Decay::Exact);
        }
        let sf = s as f64;
        let mut map = BTreeMap::new();
        let mut rest = Decay::Exact;
        for (e, c) in self.terms() {
            if e >= 0 {
                let mut binom = 1.0;
                for r in 0..=e {
                    *map.entry(e - r).or_insert(C64::new(0.0, 0.0)) += c * binom * sf.powi(r);
                    binom = binom * (e - r) as f64 / (r + 1) as f64;
                }
            } else {
                let q = -e;
                let keep = (SERIES_DEPTH - q).max(0);
                let mut binom = 1.0;
                for r in 0..=keep {
                    *map.entry(e - r).or_insert(C64::new(0.0, 0.0)) += c * binom * sf.powi(r);
                    binom = binom * (-(q as f64) - r as f64) / (r + 1) as f64;
                }
                let tail = c.norm() * 2f64.powi(q) * (2.0 * sf.abs()).powi(keep + 1);
                rest = rest.plus(Decay::power(tail, (q + keep + 1) as f64), 1.0);
            }
        }
        let (series, dropped) = Series::pruned(map, self.scale_hint());
        (series, rest.plus(dropped, 1.0))
    }
}

/// Two-sided asymptotic description of a diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct Asymptotics {
    pub plus: Series,
    pub minus: Series,
    pub decay: Decay,
    pub n0: i64,
}

/// Limits at both ends plus a remainder majorant, in the `(c, alpha)` form.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    pub limit_plus: Option<C64>,
    pub limit_minus: Option<C64>,
    pub decay: Decay,
    pub n0: i64,
}

impl Asymptotics {
    pub fn new(plus: Series, minus: Series, decay: Decay, n0: i64) -> Self {
        Self { plus, minus, decay, n0: n0.max(1) }
    }

    pub fn exact(plus: Series, minus: Series) -> Self {
        Self::new(plus, minus, Decay::Exact, 1)
    }

    pub fn constant(c: C64) -> Self {
        Self::exact(Series::constant(c), Series::constant(c))
    }

    pub fn zero() -> Self {
        Self::exact(Series::zero(), Series::zero())
    }

    /// Same series on both ends.
    pub fn symmetric(series: Series, decay: Decay, n0: i64) -> Self {
        Self::new(series.clone(), series, decay, n0)
    }

    /// Remainder-only description, e.g. for rapidly decaying diagonals.
    pub fn decaying(decay: Decay, n0: i64) -> Self {
        Self::new(Series::zero(), Series::zero(), decay, n0)
    }

    fn side(&self, n: i64) -> &Series {
        if n >= 0 {
            &self.plus
        } else {
            &self.minus
        }
    }

    /// `(M, g)` with `|S(n)| <= M |n|^g` for `|n| >= 1` on both ends.
    pub fn growth(&self) -> (f64, f64) {
        let m = self.plus.abs_sum().max(self.minus.abs_sum());
        let g = self
            .plus
            .max_exponent()
            .into_iter()
            .chain(self.minus.max_exponent())
            .max()
            .unwrap_or(0);
        (m, g as f64)
    }

    /// Pointwise majorant `|a(n)| <= sup_bound(|n|)` for `|n| >= n0`.
    pub fn sup_bound(&self, n: f64) -> f64 {
        let (m, g) = self.growth();
        m * n.abs().max(1.0).powf(g) + self.decay.bound(n)
    }

    pub fn scale(&self, k: C64) -> Self {
        Self::new(self.plus.scale(k), self.minus.scale(k), self.decay.scaled(k.norm()), self.n0)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.plus.conj(), self.minus.conj(), self.decay, self.n0)
    }

    pub fn add(&self, other: &Asymptotics) -> Self {
        let n0 = self.n0.max(other.n0);
        let (plus, r1) = self.plus.add(&other.plus);
        let (minus, r2) = self.minus.add(&other.minus);
        let nf = n0 as f64;
        let decay = self.decay.plus(other.decay, nf).plus(r1, nf).plus(r2, nf);
        Self::new(plus, minus, decay, n0)
    }

    pub fn sub(&self, other: &Asymptotics) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Asymptotics) -> Self {
        let n0 = self.n0.max(other.n0);
        let nf = n0 as f64;
        let (plus, r1) = self.plus.mul(&other.plus);
        let (minus, r2) = self.minus.mul(&other.minus);
        let (ma, ga) = self.growth();
        let (mb, gb) = other.growth();
        let decay = other
            .decay
            .times_growth(ma, ga, nf)
            .plus(self.decay.times_growth(mb, gb, nf), nf)
            .plus(self.decay.times(other.decay, nf), nf)
            .plus(r1, nf)
            .plus(r2, nf);
        Self::new(plus, minus, decay, n0)
    }

    /// Description of `n -> a(n + s)`.
    pub fn shift(&self, s: i64) -> Self {
        if s == 0 {
            return self.clone();
        }
        let (plus, r1) = self.plus.shifted(s);
        let (minus, r2) = self.minus.shifted(s);
        let n0 = (self.n0 + s.abs()).max(4 * s.abs() + 1);
        let nf = n0 as f64;
        let decay = self.decay.shifted(s).plus(r1, nf).plus(r2, nf);
        Self::new(plus, minus, decay, n0)
    }

    pub fn envelope(&self) -> Envelope {
        let limit = |s: &Series| match s.max_exponent() {
            Some(e) if e > 0 => None,
            _ => Some(s.coefficient(0)),
        };
        let nf = self.n0 as f64;
        let mut decay = self.decay;
        for s in [&self.plus, &self.minus] {
            for (e, c) in s.terms().filter(|(e, _)| *e < 0) {
                decay = decay.plus(Decay::power(c.norm(), -e as f64), nf);
            }
        }
        Envelope { limit_plus: limit(&self.plus), limit_minus: limit(&self.minus), decay, n0: self.n0 }
    }

    /// Amount by which `f(n)` violates the declaration at `n` (0 when it holds).
    pub fn violation(&self, f: impl Fn(i64) -> C64, n: i64) -> f64 {
        if n.abs() < self.n0 {
            return 0.0;
        }
        let nf = n as f64;
        let s = self.side(n);
        let dev = (f(n) - s.eval(nf)).norm();
        let slack = 1e-12 * (1.0 + s.abs_sum() * nf.abs().powf(self.growth().1));
        (dev - self.decay.bound(nf) - slack).max(0.0)
    }

    /// Spot check at `|n| in {n0, 2 n0, 4 n0}` on both ends.
    pub fn spot_check(&self, f: impl Fn(i64) -> C64) -> f64 {
        let mut worst: f64 = 0.0;
        for mult in [1, 2, 4] {
            for sign in [1, -1] {
                worst = worst.max(self.violation(&f, sign * mult * self.n0));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn shift_of_reciprocal_square_is_sound() {
        let a = Asymptotics::symmetric(Series::monomial(-2, c(1.0)), Decay::Exact, 1);
        let b = a.shift(3);
        for n in [b.n0, 2 * b.n0, 50, 400, -b.n0, -77] {
            let v = b.violation(|n| c(1.0 / ((n + 3) as f64).powi(2)), n);
            assert_eq!(v, 0.0, "n = {n}");
        }
    }

    #[test]
    fn product_of_linear_and_decaying() {
        let lin = Asymptotics::exact(Series::monomial(1, c(1.0)), Series::monomial(1, c(1.0)));
        let dec = Asymptotics::symmetric(Series::monomial(-2, c(1.0)), Decay::power(1.0, 4.0), 1);
        let p = lin.mul(&dec);
        assert_eq!(p.plus.coefficient(-1), c(1.0));
        assert_eq!(p.decay.alpha(), 3.0);
    }

    #[test]
    fn gaussian_absorbs_growth() {
        let d = Decay::gaussian(1.0, 1.0).times_growth(1.0, 2.0, 1.0);
        for n in 1..30 {
            let n = n as f64;
            assert!(n * n * (-n * n as f64).exp() <= d.bound(n) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn envelope_reads_limits() {
        let a = Asymptotics::new(
            Series::from_terms([(0, c(1.0)), (-2, c(0.5))]),
            Series::from_terms([(0, c(-1.0))]),
            Decay::power(0.1, 4.0),
            1,
        );
        let env = a.envelope();
        assert_eq!(env.limit_plus, Some(c(1.0)));
        assert_eq!(env.limit_minus, Some(c(-1.0)));
        assert_eq!(env.decay.alpha(), 2.0);
    }
}
