//! Multiplication oracles resolving `a_i a_{i+1}` on labels.

use crate::chain::UNIT;
use crate::coeff::Coeff;
use ncg_operator_core::{Error, Result};
use std::collections::HashMap;

/// Product of two labels as a linear combination of labels.
pub trait MultiplicationOracle<K: Coeff> {
    fn multiply(&self, a: &str, b: &str) -> Result<Vec<(K, String)>>;
}

/// Laurent monomials `U^k`, `|k| <= cutoff`, with `U = U^1`, `U* = U^-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonomialAlphabet {
    pub cutoff: i64,
}

impl MonomialAlphabet {
    pub fn new(cutoff: i64) -> Self {
        Self { cutoff }
    }

    pub fn parse(label: &str) -> Option<i64> {
        match label {
            UNIT => Some(0),
            "U" => Some(1),
            "U*" => Some(-1),
            _ => label.strip_prefix("U^")?.parse().ok(),
        }
    }

    pub fn label(k: i64) -> String {
        if k == 0 {
            UNIT.to_string()
        } else {
            format!("U^{k}")
        }
    }
}

impl<K: Coeff> MultiplicationOracle<K> for MonomialAlphabet {
    fn multiply(&self, a: &str, b: &str) -> Result<Vec<(K, String)>> {
        let x = Self::parse(a).ok_or_else(|| Error::UnboundLabel(a.to_string()))?;
        let y = Self::parse(b).ok_or_else(|| Error::UnboundLabel(b.to_string()))?;
        let k = x + y;
        if k.abs() > self.cutoff {
            return Err(Error::Closure(a.to_string(), b.to_string()));
        }
        Ok(vec![(K::one(), Self::label(k))])
    }
}

/// Finite group with a Cayley table; the identity is labelled `1`.
#[derive(Clone, Debug)]
pub struct GroupAlphabet {
    names: Vec<String>,
    index: HashMap<String, usize>,
    table: Vec<Vec<usize>>,
}

impl GroupAlphabet {
    /// `table[i][j]` is the index of `names[i] * names[j]`; `names[0]` must be `1`.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 || names[0] != UNIT {
            return Err(Error::InvalidArgument("group identity must come first and be labelled 1".into()));
        }
        if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&k| k >= n)) {
            return Err(Error::InvalidArgument("malformed Cayley table".into()));
        }
        let index = names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect::<HashMap<_, _>>();
        if index.len() != n {
            return Err(Error::InvalidArgument("duplicate group labels".into()));
        }
        Ok(Self { names, index, table })
    }

    /// Cyclic group `Z/n` with labels `1, g, g^2, ...`.
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n)
            .map(|k| match k {
                0 => UNIT.to_string(),
                1 => "g".to_string(),
                _ => format!("g^{k}"),
            })
            .collect();
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::new(names, table).expect("valid cyclic group")
    }

    /// Symmetric group on three letters, elements labelled by one-line notation.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let names: Vec<String> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| if i == 0 { UNIT.to_string() } else { format!("p{}{}{}", p[0], p[1], p[2]) })
            .collect();
        let find = |q: [usize; 3]| perms.iter().position(|p| *p == q).expect("closed");
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| find([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        Self::new(names, table).expect("valid S3")
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn inverse(&self, label: &str) -> Option<&str> {
        let i = *self.index.get(label)?;
        (0..self.names.len()).find(|&j| self.table[i][j] == 0).map(|j| self.names[j].as_str())
    }
}

impl<K: Coeff> MultiplicationOracle<K> for GroupAlphabet {
    fn multiply(&self, a: &str, b: &str) -> Result<Vec<(K, String)>> {
        let i = *self.index.get(a).ok_or_else(|| Error::UnboundLabel(a.to_string()))?;
        let j = *self.index.get(b).ok_or_else(|| Error::UnboundLabel(b.to_string()))?;
        Ok(vec![(K::one(), self.names[self.table[i][j]].clone())])
    }
}
