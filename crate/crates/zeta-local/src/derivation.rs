//! `|D|`, the derivations `delta`, `nabla`, `L`, and the conjugation expansion check.

use ncg_operator_core::function::{is_lattice_coordinate, lattice_diagonal};
use ncg_operator_core::{
    operator_function, Asymptotics, BandOperator, Decay, Error, Operator, Result,
    ScalarFn, Series, C64,
};

/// Terms kept in the large-`n` expansion of `log((n+d)^2/n^2)`.
const LOG_TERMS: i32 = 8;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `|D| = sqrt(D^2) + P_ker`, so kernel vectors get eigenvalue 1.
pub fn abs_d(d: &Operator) -> Result<Operator> {
    operator_function(d, &ScalarFn::abs_power(1))
}

/// Which commutator a derivation takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DerivationKind {
    /// `[|D|, T]`
    Delta,
    /// `[D^2, T]`
    Nabla,
    /// `[log |D|^2, T]`
    Log,
}

impl DerivationKind {
    fn function(self) -> ScalarFn {
        match self {
            DerivationKind::Delta => ScalarFn::abs_power(1),
            DerivationKind::Nabla => ScalarFn::square(),
            DerivationKind::Log => ScalarFn::log_abs_sq(),
        }
    }
}

/// Asymptotics of `n -> log((n+d)^2) - log(n^2)` for `|n| > 2|d|`.
fn log_difference_asymptotics(d: i64) -> Asymptotics {
    if d == 0 {
        return Asymptotics::zero();
    }
    let df = d as f64;
    let series = Series::from_terms((1..=LOG_TERMS).map(|j| {
        let sign = if j % 2 == 1 { 2.0 } else { -2.0 };
        (-j, re(sign * df.powi(j) / j as f64))
    }));
    // geometric tail of 2 sum_{j > J} |d/n|^j / j with |d/n| <= 1/2
    let c = 4.0 * df.abs().powi(LOG_TERMS + 1) / (LOG_TERMS + 1) as f64;
    Asymptotics::symmetric(series, Decay::power(c, (LOG_TERMS + 1) as f64), 2 * d.abs() + 1)
}

/// The commutator `[f(D), T]` for the chosen kind.
pub fn derivation(t: &Operator, d: &Operator, kind: DerivationKind) -> Result<Operator> {
    let fd = operator_function(d, &kind.function())?;
    match (t, &fd) {
        (Operator::Band(tb), Operator::Band(fb)) => {
            let coordinate = is_lattice_coordinate(&lattice_diagonal(d.as_band().expect("band"))?);
            let f = lattice_diagonal(fb)?;
            let diags = tb.diagonals().map(|(off, td)| {
                let mut g = f.shifted(off).add(&f.scale(re(-1.0)));
                if kind == DerivationKind::Log {
                    let asym = coordinate.then(|| log_difference_asymptotics(off));
                    g = g.with_asymptotics(asym);
                }
                (off, g.mul(td))
            });
            Ok(BandOperator::from_diagonals(diags.collect::<Vec<_>>()).into())
        }
        (Operator::Dense(_), Operator::Dense(_)) => fd.commutator(t),
        _ => Err(Error::MixedBackend),
    }
}

/// Maximum entrywise defects of the two expansions of `|D|^{2z} T |D|^{-2z}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjugationDefect {
    /// `sum_{k <= N} z^k/k! L^k(T)` against the conjugation.
    pub l_series: f64,
    /// `sum_{k <= N} binom(z, k) nabla^k(T) |D|^{-2k}` against the conjugation,
    /// over entries where `|nabla| |D|^{-2} <= 1/2`.
    pub binomial: f64,
}

/// Compares both expansions with the direct conjugation on `|n| <= window`.
pub fn conjugation_expansion_check(
    t: &Operator,
    d: &Operator,
    z: C64,
    order: usize,
    window: i64,
) -> Result<ConjugationDefect> {
    if z.norm() > 0.5 {
        return Err(Error::InvalidArgument(format!("|z| = {} exceeds 1/2", z.norm())));
    }
    let (Operator::Band(tb), Operator::Band(db)) = (t, d) else {
        return Err(Error::InvalidArgument("conjugation check needs lattice operators".into()));
    };
    let dd = lattice_diagonal(db)?;
    let abs = |n: i64| {
        let x = dd.at(n).re.abs();
        if x < ncg_operator_core::function::KERNEL_TOL {
            1.0
        } else {
            x
        }
    };
    let sq = |n: i64| dd.at(n).re.powi(2);
    let mut out = ConjugationDefect { l_series: 0.0, binomial: 0.0 };
    for (off, td) in tb.diagonals() {
        for n in -window..=window {
            let entry = td.at(n);
            let (a1, a0) = (abs(n + off), abs(n));
            let exact = entry * (re(a1 * a1).powc(z) / re(a0 * a0).powc(z));
            let ell = (a1 * a1).ln() - (a0 * a0).ln();
            let mut l_sum = C64::new(0.0, 0.0);
            let mut term = entry;
            for k in 0..=order {
                if k > 0 {
                    term = term * z * ell / k as f64;
                }
                l_sum += term;
            }
            out.l_series = out.l_series.max((l_sum - exact).norm());
            let ratio = (sq(n + off) - sq(n)) / (a0 * a0);
            if ratio.abs() <= 0.5 {
                let mut b_sum = C64::new(0.0, 0.0);
                let mut binom = re(1.0);
                for k in 0..=order {
                    if k > 0 {
                        binom = binom * (z - (k - 1) as f64) / k as f64;
                    }
                    b_sum += entry * binom * ratio.powi(k as i32);
                }
                out.binomial = out.binomial.max((b_sum - exact).norm());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ncg_operator_core::{DenseOperator, Diagonal};

    fn lattice_d() -> Operator {
        BandOperator::diagonal(Diagonal::polynomial(vec![re(0.0), re(1.0)])).into()
    }

    #[test]
    fn abs_of_dense_diagonal() {
        let d: Operator = DenseOperator::from_real_diagonal(&[0.0, 2.0, -3.0]).into();
        let a = abs_d(&d).unwrap();
        let want: Operator = DenseOperator::from_real_diagonal(&[1.0, 2.0, 3.0]).into();
        assert!(a.distance(&want, 0).unwrap() < 1e-14);
    }

    #[test]
    fn abs_on_circle_shifts_kernel() {
        let a = abs_d(&lattice_d()).unwrap();
        assert_eq!(a.entry(0, 0), re(1.0));
        for n in [-5i64, -1, 1, 7] {
            assert_eq!(a.entry(n, n), re(n.abs() as f64));
        }
    }

    #[test]
    fn nabla_of_shift() {
        let u: Operator = BandOperator::shift(1).into();
        let g = derivation(&u, &lattice_d(), DerivationKind::Nabla).unwrap();
        for n in -6..=6 {
            assert_eq!(g.entry(n + 1, n), re((2 * n + 1) as f64));
        }
    }

    #[test]
    fn commuting_operator_is_annihilated() {
        let t: Operator = BandOperator::diagonal(Diagonal::polynomial(vec![re(2.0), re(-1.0)])).into();
        for kind in [DerivationKind::Delta, DerivationKind::Nabla, DerivationKind::Log] {
            let g = derivation(&t, &lattice_d(), kind).unwrap();
            assert!(g.distance(&t.zero_like(), 32).unwrap() == 0.0);
        }
    }

    #[test]
    fn log_asymptotics_hold() {
        let u: Operator = BandOperator::shift(3).into();
        let g = derivation(&u, &lattice_d(), DerivationKind::Log).unwrap();
        let diag = g.as_band().unwrap().diag(3).unwrap().clone();
        let a = diag.asymptotics().unwrap().clone();
        for n in (7..400).chain([5000, 100000]) {
            for m in [n, -n] {
                assert_eq!(a.violation(|k| diag.at(k), m), 0.0, "n = {m}");
            }
        }
    }

    #[test]
    fn diagonal_and_zero_exponent_conjugations_are_exact() {
        let t: Operator = BandOperator::diagonal(Diagonal::polynomial(vec![re(1.0), re(0.5)])).into();
        let r = conjugation_expansion_check(&t, &lattice_d(), C64::new(0.3, 0.1), 4, 16).unwrap();
        assert_eq!(r.l_series, 0.0);
        assert_eq!(r.binomial, 0.0);
        let u: Operator = BandOperator::shift(1).into();
        let r = conjugation_expansion_check(&u, &lattice_d(), C64::new(0.0, 0.0), 0, 16).unwrap();
        assert_eq!(r.l_series, 0.0);
        assert!(conjugation_expansion_check(&u, &lattice_d(), C64::new(0.6, 0.0), 4, 16).is_err());
    }
}
