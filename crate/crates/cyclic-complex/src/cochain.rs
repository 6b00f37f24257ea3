//! Cochains evaluated on operators, their transposed differentials and the
//! pairing with formal chains.

use crate::chain::CyclicChain;
use ncg_operator_core::{CertifiedValue, Error, Operator, Parity, Result, C64};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// One component `phi_k(a_0, ..., a_k)`.
pub type CochainFn = Arc<dyn Fn(&[Operator]) -> Result<CertifiedValue> + Send + Sync>;

/// Finite family of components of a fixed parity.
#[derive(Clone)]
pub struct CyclicCochain {
    parity: Parity,
    components: BTreeMap<usize, CochainFn>,
}

impl std::fmt::Debug for CyclicCochain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CyclicCochain")
            .field("parity", &self.parity)
            .field("degrees", &self.components.keys().collect::<Vec<_>>())
            .finish()
    }
}

fn sign(k: usize) -> C64 {
    if k % 2 == 0 {
        C64::new(1.0, 0.0)
    } else {
        C64::new(-1.0, 0.0)
    }
}

impl CyclicCochain {
    pub fn new(parity: Parity) -> Self {
        Self { parity, components: BTreeMap::new() }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn with_component<F>(mut self, degree: usize, f: F) -> Result<Self>
    where
        F: Fn(&[Operator]) -> Result<CertifiedValue> + Send + Sync + 'static,
    {
        self.insert(degree, Arc::new(f))?;
        Ok(self)
    }

    fn insert(&mut self, degree: usize, f: CochainFn) -> Result<()> {
        if Parity::of_degree(degree) != self.parity {
            return Err(Error::ParityMismatch(format!("degree {degree} in a {} cochain", self.parity.name())));
        }
        self.components.insert(degree, f);
        Ok(())
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.components.keys().copied().collect()
    }

    pub fn component(&self, degree: usize) -> Option<&CochainFn> {
        self.components.get(&degree)
    }

    /// `phi_k(args)` with `k = args.len() - 1`; absent components are zero.
    pub fn evaluate(&self, args: &[Operator]) -> Result<CertifiedValue> {
        if args.is_empty() {
            return Err(Error::InvalidArgument("a cochain needs at least one argument".into()));
        }
        let k = args.len() - 1;
        if Parity::of_degree(k) != self.parity {
            return Err(Error::ParityMismatch(format!("{} arguments for a {} cochain", args.len(), self.parity.name())));
        }
        match self.components.get(&k) {
            Some(f) => f(args),
            None => Ok(CertifiedValue::zero()),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let components = self
            .components
            .iter()
            .map(|(&k, f)| {
                let f = f.clone();
                let g: CochainFn = Arc::new(move |a: &[Operator]| Ok(f(a)? * c));
                (k, g)
            })
            .collect();
        Self { parity: self.parity, components }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.parity != other.parity {
            return Err(Error::ParityMismatch("adding cochains of different parity".into()));
        }
        let mut out = self.clone();
        for (&k, g) in &other.components {
            let merged: CochainFn = match self.components.get(&k) {
                Some(f) => {
                    let (f, g) = (f.clone(), g.clone());
                    Arc::new(move |a: &[Operator]| Ok(f(a)? + g(a)?))
                }
                None => g.clone(),
            };
            out.components.insert(k, merged);
        }
        Ok(out)
    }

    /// Transpose of `b`: `(b phi)(a_0..a_{k+1}) = sum_{i<=k} (-1)^i phi(.., a_i a_{i+1}, ..)
    /// + (-1)^{k+1} phi(a_{k+1} a_0, a_1, .., a_k)`.
    pub fn b_transpose(&self) -> Self {
        let mut out = Self::new(self.parity.flip());
        for (&k, f) in &self.components {
            let f = f.clone();
            let g: CochainFn = Arc::new(move |a: &[Operator]| {
                let mut total = CertifiedValue::zero();
                for i in 0..=k {
                    let mut args: Vec<Operator> = Vec::with_capacity(k + 1);
                    args.extend_from_slice(&a[..i]);
                    args.push(a[i].compose(&a[i + 1])?);
                    args.extend_from_slice(&a[i + 2..]);
                    total = total + f(&args)? * sign(i);
                }
                let mut args = vec![a[k + 1].compose(&a[0])?];
                args.extend_from_slice(&a[1..=k]);
                Ok(total + f(&args)? * sign(k + 1))
            });
            out.components.insert(k + 1, g);
        }
        out
    }

    /// Transpose of `B`: `(B phi)(a_0..a_{k-1}) = sum_i (-1)^{(k-1) i} phi(1, a_i, .., a_{i-1})`.
    #[allow(non_snake_case)]
    pub fn B_transpose(&self) -> Self {
        let mut out = Self::new(self.parity.flip());
        for (&k, f) in &self.components {
            if k == 0 {
                continue;
            }
            let f = f.clone();
            let g: CochainFn = Arc::new(move |a: &[Operator]| {
                let mut total = CertifiedValue::zero();
                for i in 0..k {
                    let mut args = Vec::with_capacity(k + 1);
                    args.push(a[0].identity_like());
                    args.extend_from_slice(&a[i..]);
                    args.extend_from_slice(&a[..i]);
                    total = total + f(&args)? * sign((k - 1) * i);
                }
                Ok(total)
            });
            out.components.insert(k - 1, g);
        }
        out
    }

    /// `(b + B)^t phi`.
    pub fn coboundary(&self) -> Self {
        self.b_transpose().add(&self.B_transpose()).expect("same parity")
    }
}

/// `<phi, c> = sum_w c_w phi(w)` with labels bound by `resolve`.
pub fn pair(phi: &CyclicCochain, chain: &CyclicChain<C64>, resolve: &dyn Fn(&str) -> Option<Operator>) -> Result<CertifiedValue> {
    if let Some(d) = chain.degrees().into_iter().find(|&d| Parity::of_degree(d) != phi.parity()) {
        return Err(Error::ParityMismatch(format!("chain has degree {d}, cochain is {}", phi.parity().name())));
    }
    let mut cache: HashMap<&str, Operator> = HashMap::new();
    let mut total = CertifiedValue::zero();
    for (word, coeff) in chain.terms() {
        if phi.component(word.len() - 1).is_none() {
            continue;
        }
        let mut args = Vec::with_capacity(word.len());
        for l in word {
            if !cache.contains_key(l.as_str()) {
                let op = resolve(l).ok_or_else(|| Error::UnboundLabel(l.clone()))?;
                cache.insert(l.as_str(), op);
            }
            args.push(cache[l.as_str()].clone());
        }
        total = total + phi.evaluate(&args)? * *coeff;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ncg_operator_core::DenseOperator;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn trace_cochain() -> CyclicCochain {
        CyclicCochain::new(Parity::Even)
            .with_component(0, |a: &[Operator]| a[0].trace(0))
            .unwrap()
    }

    fn mat(v: [f64; 4]) -> Operator {
        DenseOperator::new(2, 2, v.iter().map(|&x| re(x)).collect()).unwrap().into()
    }

    #[test]
    fn trace_is_a_cocycle() {
        let b = trace_cochain().b_transpose();
        let a = [mat([1.0, 2.0, 3.0, 4.0]), mat([0.0, 1.0, -1.0, 5.0])];
        assert!(b.evaluate(&a).unwrap().value.norm() < 1e-12);
        assert!(trace_cochain().B_transpose().degrees().is_empty());
    }

    #[test]
    fn parity_is_enforced() {
        assert!(CyclicCochain::new(Parity::Odd).with_component(0, |_: &[Operator]| Ok(CertifiedValue::zero())).is_err());
        let chain = CyclicChain::word(&["a", "b"]);
        let r = pair(&trace_cochain(), &chain, &|_| Some(mat([1.0, 0.0, 0.0, 1.0])));
        assert!(matches!(r, Err(Error::ParityMismatch(_))));
    }

    #[test]
    fn pairing_is_linear() {
        let mut chain = CyclicChain::zero();
        chain.add_term(re(2.0), vec!["a".into()]);
        chain.add_term(re(-1.0), vec!["b".into()]);
        let resolve = |l: &str| match l {
            "a" => Some(mat([1.0, 0.0, 0.0, 1.0])),
            "b" => Some(mat([3.0, 0.0, 0.0, 0.0])),
            _ => None,
        };
        let v = pair(&trace_cochain(), &chain, &resolve).unwrap();
        assert!((v.value - re(1.0)).norm() < 1e-14);
        let bad = CyclicChain::word(&["zz"]);
        assert!(matches!(pair(&trace_cochain(), &bad, &resolve), Err(Error::UnboundLabel(_))));
    }
}
