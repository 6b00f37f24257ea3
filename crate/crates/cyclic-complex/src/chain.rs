//! Formal normalized cyclic chains and the `b`, `B` differentials.

use crate::alphabet::MultiplicationOracle;
use crate::coeff::Coeff;
use ncg_operator_core::{Error, Result, C64};
use std::collections::BTreeMap;

/// Label of the unit element; words carrying it in a position `>= 1` vanish.
pub const UNIT: &str = "1";

pub type Word = Vec<String>;

/// Finite linear combination of words `a0 (x) a1 (x) ... (x) al`, graded by `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicChain<K: Coeff = C64> {
    terms: BTreeMap<Word, K>,
}

impl<K: Coeff> Default for CyclicChain<K> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

fn is_degenerate(word: &[String]) -> bool {
    word.is_empty() || word[1..].iter().any(|l| l == UNIT)
}

impl<K: Coeff> CyclicChain<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (K, Word)>>(terms: I) -> Self {
        let mut c = Self::zero();
        for (k, w) in terms {
            c.add_term(k, w);
        }
        c
    }

    /// Single word with coefficient one.
    pub fn word<S: AsRef<str>>(labels: &[S]) -> Self {
        Self::from_terms([(K::one(), labels.iter().map(|s| s.as_ref().to_string()).collect())])
    }

    pub fn add_term(&mut self, coeff: K, word: Word) {
        if is_degenerate(&word) {
            return;
        }
        let entry = self.terms.entry(word);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get().clone() + coeff;
                if v.is_negligible() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                if !coeff.is_negligible() {
                    v.insert(coeff);
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &K)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degrees `l` present in the chain.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|w| w.len() - 1).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn component(&self, degree: usize) -> Self {
        Self { terms: self.terms.iter().filter(|(w, _)| w.len() == degree + 1).map(|(w, k)| (w.clone(), k.clone())).collect() }
    }

    pub fn truncate(&self, max_degree: usize) -> Self {
        Self { terms: self.terms.iter().filter(|(w, _)| w.len() <= max_degree + 1).map(|(w, k)| (w.clone(), k.clone())).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut c = self.clone();
        for (w, k) in other.terms() {
            c.add_term(k.clone(), w.clone());
        }
        c
    }

    pub fn scale(&self, s: &K) -> Self {
        Self::from_terms(self.terms().map(|(w, k)| (k.clone() * s.clone(), w.clone())))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&(-K::one())))
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(|k| k.magnitude()).fold(0.0, f64::max)
    }

    pub fn to_complex(&self) -> CyclicChain<C64> {
        CyclicChain::from_terms(self.terms().map(|(w, k)| (k.to_c64(), w.clone())))
    }
}

/// Hochschild boundary with the wrap term `(-1)^l a_l a_0 (x) a_1 ... a_{l-1}`.
pub fn boundary_b<K: Coeff, M: MultiplicationOracle<K> + ?Sized>(c: &CyclicChain<K>, mult: &M) -> Result<CyclicChain<K>> {
    let mut out = CyclicChain::zero();
    for (w, k) in c.terms() {
        let l = w.len() - 1;
        if l == 0 {
            continue;
        }
        for i in 0..l {
            let sign = if i % 2 == 0 { K::one() } else { -K::one() };
            for (pc, p) in mult.multiply(&w[i], &w[i + 1])? {
                let mut nw: Word = Vec::with_capacity(l);
                nw.extend_from_slice(&w[..i]);
                nw.push(p);
                nw.extend_from_slice(&w[i + 2..]);
                out.add_term(k.clone() * sign.clone() * pc, nw);
            }
        }
        let sign = if l % 2 == 0 { K::one() } else { -K::one() };
        for (pc, p) in mult.multiply(&w[l], &w[0])? {
            let mut nw: Word = Vec::with_capacity(l);
            nw.push(p);
            nw.extend_from_slice(&w[1..l]);
            out.add_term(k.clone() * sign.clone() * pc, nw);
        }
    }
    Ok(out)
}

/// Connes boundary `sum_i (-1)^{l i} 1 (x) a_i (x) ... (x) a_{i-1}`.
#[allow(non_snake_case)]
pub fn boundary_B<K: Coeff>(c: &CyclicChain<K>) -> CyclicChain<K> {
    let mut out = CyclicChain::zero();
    for (w, k) in c.terms() {
        let len = w.len();
        let l = len - 1;
        for i in 0..len {
            let sign = if (l * i) % 2 == 0 { K::one() } else { -K::one() };
            let mut nw: Word = Vec::with_capacity(len + 1);
            nw.push(UNIT.to_string());
            nw.extend_from_slice(&w[i..]);
            nw.extend_from_slice(&w[..i]);
            out.add_term(k.clone() * sign, nw);
        }
    }
    out
}

/// JSON text form `[{"coeff":[re,im],"word":[..]}, ...]`.
pub fn chain_to_json(c: &CyclicChain<C64>) -> String {
    let items: Vec<serde_json::Value> = c
        .terms()
        .map(|(w, k)| serde_json::json!({"coeff": [k.re, k.im], "word": w}))
        .collect();
    serde_json::Value::Array(items).to_string()
}

pub fn chain_from_json(text: &str) -> Result<CyclicChain<C64>> {
    let bad = |m: String| Error::InvalidArgument(format!("chain json: {m}"));
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let arr = v.as_array().ok_or_else(|| bad("expected an array".into()))?;
    let mut c = CyclicChain::zero();
    for item in arr {
        let coeff = item
            .get("coeff")
            .and_then(|x| x.as_array())
            .filter(|a| a.len() == 2)
            .ok_or_else(|| bad("coeff must be [re, im]".into()))?;
        let re = coeff[0].as_f64().ok_or_else(|| bad("coeff re".into()))?;
        let im = coeff[1].as_f64().ok_or_else(|| bad("coeff im".into()))?;
        let word = item
            .get("word")
            .and_then(|x| x.as_array())
            .ok_or_else(|| bad("word must be an array".into()))?
            .iter()
            .map(|l| l.as_str().map(str::to_string).ok_or_else(|| bad("labels must be strings".into())))
            .collect::<Result<Word>>()?;
        if word.is_empty() {
            return Err(bad("empty word".into()));
        }
        c.add_term(C64::new(re, im), word);
    }
    Ok(c)
}
