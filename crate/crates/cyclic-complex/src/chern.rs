//! Chern characters of idempotents and invertibles as formal cyclic chains.

use crate::alphabet::MultiplicationOracle;
use crate::chain::{CyclicChain, Word, UNIT};
use crate::coeff::{factorial, Coeff};
use ncg_operator_core::{Error, Result, C64};
use num_bigint::BigInt;
use std::collections::BTreeMap;

/// Linear combination of labels, an entry of a [`LabelMatrix`].
#[derive(Clone, Debug, PartialEq)]
pub struct LinComb<K: Coeff> {
    terms: BTreeMap<String, K>,
}

impl<K: Coeff> LinComb<K> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn label(l: &str) -> Self {
        Self::from_terms([(K::one(), l.to_string())])
    }

    pub fn from_terms<I: IntoIterator<Item = (K, String)>>(terms: I) -> Self {
        let mut s = Self::zero();
        for (k, l) in terms {
            s.push(k, l);
        }
        s
    }

    fn push(&mut self, k: K, l: String) {
        let v = match self.terms.remove(&l) {
            Some(old) => old + k,
            None => k,
        };
        if !v.is_negligible() {
            self.terms.insert(l, v);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&String, &K)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for (l, k) in other.terms() {
            s.push(k.clone(), l.clone());
        }
        s
    }

    pub fn scale(&self, c: &K) -> Self {
        Self::from_terms(self.terms().map(|(l, k)| (k.clone() * c.clone(), l.clone())))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn max_magnitude(&self) -> f64 {
        self.terms.values().map(|k| k.magnitude()).fold(0.0, f64::max)
    }
}

/// Square matrix over the label algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelMatrix<K: Coeff> {
    n: usize,
    entries: Vec<LinComb<K>>,
}

impl<K: Coeff> LabelMatrix<K> {
    /// Row-major entries.
    pub fn new(n: usize, entries: Vec<LinComb<K>>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!("{} entries for a {n}x{n} label matrix", entries.len())));
        }
        Ok(Self { n, entries })
    }

    /// `1x1` matrix holding a single label.
    pub fn scalar(label: &str) -> Self {
        Self { n: 1, entries: vec![LinComb::label(label)] }
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n * n).map(|i| if i / n == i % n { LinComb::label(UNIT) } else { LinComb::zero() }).collect();
        Self { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &LinComb<K> {
        &self.entries[i * self.n + j]
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        let minus = -K::one();
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(&b.scale(&minus))).collect();
        Ok(Self { n: self.n, entries })
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{}x{} vs {}x{}", self.n, self.n, other.n, other.n)));
        }
        Ok(())
    }

    /// Matrix product with entries multiplied through the oracle.
    pub fn mul<M: MultiplicationOracle<K> + ?Sized>(&self, other: &Self, oracle: &M) -> Result<Self> {
        self.check_size(other)?;
        let n = self.n;
        let mut entries = vec![LinComb::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = LinComb::zero();
                for m in 0..n {
                    for (la, ka) in self.entry(i, m).terms() {
                        for (lb, kb) in other.entry(m, j).terms() {
                            for (kp, lp) in oracle.multiply(la, lb)? {
                                acc.push(ka.clone() * kb.clone() * kp, lp);
                            }
                        }
                    }
                }
                entries[i * n + j] = acc;
            }
        }
        Ok(Self { n, entries })
    }

    fn max_magnitude(&self) -> f64 {
        self.entries.iter().map(LinComb::max_magnitude).fold(0.0, f64::max)
    }

    /// `e - 1/2` with the unit on the diagonal.
    fn minus_half(&self) -> Self {
        let half = K::from_ratio(-1, 2);
        let mut out = self.clone();
        for i in 0..self.n {
            out.entries[i * self.n + i] = out.entries[i * self.n + i].add(&LinComb::from_terms([(half.clone(), UNIT.to_string())]));
        }
        out
    }

    fn trace(&self) -> CyclicChain<K> {
        let mut c = CyclicChain::zero();
        for i in 0..self.n {
            for (l, k) in self.entry(i, i).terms() {
                c.add_term(k.clone(), vec![l.clone()]);
            }
        }
        c
    }
}

/// `sum_{i_0..i_k} M0_{i0 i1} (x) M1_{i1 i2} (x) ... (x) Mk_{ik i0}`.
fn cyclic_tensor<K: Coeff>(factors: &[&LabelMatrix<K>]) -> CyclicChain<K> {
    let n = factors[0].n;
    let mut out = CyclicChain::zero();
    for i0 in 0..n {
        // partial words keyed by the current row index
        let mut partial: Vec<(usize, K, Word)> = vec![(i0, K::one(), Vec::new())];
        for (j, f) in factors.iter().enumerate() {
            let last = j + 1 == factors.len();
            let mut next = Vec::new();
            for (row, coeff, word) in &partial {
                let cols: Vec<usize> = if last { vec![i0] } else { (0..n).collect() };
                for col in cols {
                    for (l, k) in f.entry(*row, col).terms() {
                        if j > 0 && l == UNIT {
                            continue;
                        }
                        let mut w = word.clone();
                        w.push(l.clone());
                        next.push((col, coeff.clone() * k.clone(), w));
                    }
                }
            }
            partial = next;
        }
        for (_, k, w) in partial {
            out.add_term(k, w);
        }
    }
    out
}

fn sign<K: Coeff>(l: usize) -> K {
    if l % 2 == 0 {
        K::one()
    } else {
        -K::one()
    }
}

/// Even Chern character truncated at `degree_cap`, without an idempotence check.
pub fn chern_idempotent_unchecked<K: Coeff>(e: &LabelMatrix<K>, degree_cap: usize) -> CyclicChain<K> {
    let mut chain = e.trace();
    let shifted = e.minus_half();
    let mut l = 1;
    while 2 * l <= degree_cap {
        let c: BigInt = factorial(2 * l as u64) / factorial(l as u64);
        let coeff = sign::<K>(l) * K::from_integer(&c);
        let mut factors = vec![&shifted];
        factors.extend(std::iter::repeat(e).take(2 * l));
        chain = chain.add(&cyclic_tensor(&factors).scale(&coeff));
        l += 1;
    }
    chain
}

/// Even Chern character `Ch(e)` truncated at `degree_cap`; `e` must be idempotent
/// under the oracle.
pub fn chern_idempotent<K: Coeff, M: MultiplicationOracle<K> + ?Sized>(
    e: &LabelMatrix<K>,
    oracle: &M,
    degree_cap: usize,
) -> Result<CyclicChain<K>> {
    let defect = e.mul(e, oracle)?.sub(e)?.max_magnitude();
    if defect > 1e-10 {
        return Err(Error::NotIdempotent(defect));
    }
    Ok(chern_idempotent_unchecked(e, degree_cap))
}

/// Odd Chern character of `u` with integer coefficients `(-1)^l l!`, no prefactor.
pub fn chern_invertible_unnormalized<K: Coeff>(u: &LabelMatrix<K>, u_inv: &LabelMatrix<K>, degree_cap: usize) -> CyclicChain<K> {
    let mut chain = CyclicChain::zero();
    let mut l = 0;
    while 2 * l + 1 <= degree_cap {
        let coeff = sign::<K>(l) * K::from_integer(&factorial(l as u64));
        let factors: Vec<&LabelMatrix<K>> = (0..2 * l + 2).map(|j| if j % 2 == 0 { u_inv } else { u }).collect();
        chain = chain.add(&cyclic_tensor(&factors).scale(&coeff));
        l += 1;
    }
    chain
}

/// `1/sqrt(2 pi i)`, the normalization of the odd character.
pub fn odd_prefactor() -> C64 {
    C64::new(0.0, 2.0 * std::f64::consts::PI).sqrt().inv()
}

/// Checks `u u_inv = u_inv u = 1` under the oracle.
pub fn check_inverse<K: Coeff, M: MultiplicationOracle<K> + ?Sized>(
    u: &LabelMatrix<K>,
    u_inv: &LabelMatrix<K>,
    oracle: &M,
) -> Result<()> {
    let one = LabelMatrix::identity(u.size());
    let d1 = u.mul(u_inv, oracle)?.sub(&one)?.max_magnitude();
    let d2 = u_inv.mul(u, oracle)?.sub(&one)?.max_magnitude();
    if d1.max(d2) > 1e-10 {
        return Err(Error::Singular(format!("u_inv is not a two-sided inverse (defect {:.3e})", d1.max(d2))));
    }
    Ok(())
}

/// Odd Chern character `Ch(u)` with the `1/sqrt(2 pi i)` prefactor.
pub fn chern_invertible<K: Coeff, M: MultiplicationOracle<K> + ?Sized>(
    u: &LabelMatrix<K>,
    u_inv: &LabelMatrix<K>,
    oracle: &M,
    degree_cap: usize,
) -> Result<CyclicChain<C64>> {
    check_inverse(u, u_inv, oracle)?;
    let pre = odd_prefactor();
    Ok(chern_invertible_unnormalized(u, u_inv, degree_cap).to_complex().scale(&pre))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{GroupAlphabet, MonomialAlphabet};
    use crate::chain::{boundary_B, boundary_b};
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn half_projection() -> LabelMatrix<Q> {
        // e = (1/2) [[1, U], [U*, 1]] in canonical labels
        let h = |l: &str| LinComb::from_terms([(q(1, 2), l.to_string())]);
        LabelMatrix::new(2, vec![h("1"), h("U^1"), h("U^-1"), h("1")]).unwrap()
    }

    #[test]
    fn degree_zero_and_two() {
        let m = MonomialAlphabet::new(8);
        let e = LabelMatrix::<Q>::identity(1);
        let c = chern_idempotent(&e, &m, 4).unwrap();
        assert_eq!(c, CyclicChain::word(&["1"]));
        let ch = chern_idempotent(&half_projection(), &m, 2).unwrap();
        assert_eq!(ch.component(0), CyclicChain::from_terms([(q(1, 1), vec!["1".to_string()])]));
        // three pairwise distinct indices are needed in a 2x2 matrix, so the
        // normalized degree-2 part vanishes
        assert!(ch.component(2).is_empty());
        let g = crate::alphabet::GroupAlphabet::cyclic(2);
        let h = |l: &str| LinComb::from_terms([(q(1, 2), l.to_string())]);
        let e = LabelMatrix::new(1, vec![h("1").add(&h("g"))]).unwrap();
        let ch = chern_idempotent(&e, &g, 2).unwrap();
        assert_eq!(ch.component(2), CyclicChain::from_terms([(q(-1, 4), vec!["g".to_string(); 3])]));
    }

    #[test]
    fn even_character_is_a_cycle() {
        let m = MonomialAlphabet::new(8);
        let ch = chern_idempotent(&half_projection(), &m, 6).unwrap();
        for l in (0..=4).step_by(2) {
            let lhs = boundary_b(&ch.component(l + 2), &m).unwrap().add(&boundary_B(&ch.component(l)));
            assert!(lhs.is_empty(), "degree {l}: {lhs:?}");
        }
    }

    #[test]
    fn odd_character_is_a_cycle() {
        let m = MonomialAlphabet::new(8);
        let u = LabelMatrix::scalar("U");
        let ui = LabelMatrix::scalar("U*");
        let ch: CyclicChain<Q> = chern_invertible_unnormalized(&u, &ui, 7);
        assert_eq!(ch.component(1), CyclicChain::word(&["U*", "U"]));
        for l in (1..=5).step_by(2) {
            let lhs = boundary_b(&ch.component(l + 2), &m).unwrap().add(&boundary_B(&ch.component(l)));
            assert!(lhs.is_empty(), "degree {l}");
        }
    }

    #[test]
    fn group_idempotent_cycle() {
        let g = GroupAlphabet::symmetric3();
        let h = |l: &str| LinComb::from_terms([(q(1, 2), l.to_string())]);
        let e = LabelMatrix::new(1, vec![h("1").add(&h("p102"))]).unwrap();
        let ch = chern_idempotent(&e, &g, 6).unwrap();
        for l in (0..=4).step_by(2) {
            let lhs = boundary_b(&ch.component(l + 2), &g).unwrap().add(&boundary_B(&ch.component(l)));
            assert!(lhs.is_empty());
        }
    }

    #[test]
    fn rejects_non_idempotent_and_non_invertible() {
        let m = MonomialAlphabet::new(8);
        let e = LabelMatrix::<Q>::scalar("U");
        assert!(matches!(chern_idempotent(&e, &m, 2), Err(Error::NotIdempotent(_))));
        let u = LabelMatrix::<Q>::scalar("U");
        assert!(matches!(chern_invertible(&u, &u, &m, 3), Err(Error::Singular(_))));
    }

    #[test]
    fn odd_prefactor_value() {
        let p = odd_prefactor();
        let back = (p * p).inv();
        assert!((back - C64::new(0.0, 2.0 * std::f64::consts::PI)).norm() < 1e-12);
    }
}
