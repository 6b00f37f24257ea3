use crate::band::BandOperator;
use crate::certified::CertifiedValue;
use crate::dense::DenseOperator;
use crate::error::{Error, Result};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Dense,
    Banded,
}

/// Operator handle over either backend.
#[derive(Clone, Debug)]
pub enum Operator {
    Dense(DenseOperator),
    Band(BandOperator),
}

impl From<DenseOperator> for Operator {
    fn from(d: DenseOperator) -> Self {
        Operator::Dense(d)
    }
}

impl From<BandOperator> for Operator {
    fn from(b: BandOperator) -> Self {
        Operator::Band(b)
    }
}

impl Operator {
    pub fn backend(&self) -> Backend {
        match self {
            Operator::Dense(_) => Backend::Dense,
            Operator::Band(_) => Backend::Banded,
        }
    }

    pub fn as_dense(&self) -> Option<&DenseOperator> {
        match self {
            Operator::Dense(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_band(&self) -> Option<&BandOperator> {
        match self {
            Operator::Band(b) => Some(b),
            _ => None,
        }
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        match (self, other) {
            (Operator::Dense(a), Operator::Dense(b)) => Ok(a.compose(b)?.into()),
            (Operator::Band(a), Operator::Band(b)) => Ok(a.compose(b).into()),
            _ => Err(Error::MixedBackend),
        }
    }

    /// Left-to-right product of a non-empty list.
    pub fn product(factors: &[&Operator]) -> Result<Operator> {
        let (first, rest) = factors
            .split_first()
            .ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
        rest.iter().try_fold((*first).clone(), |acc, f| acc.compose(f))
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        match (self, other) {
            (Operator::Dense(a), Operator::Dense(b)) => Ok(a.add(b)?.into()),
            (Operator::Band(a), Operator::Band(b)) => Ok(a.add(b).into()),
            _ => Err(Error::MixedBackend),
        }
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, k: C64) -> Operator {
        match self {
            Operator::Dense(a) => a.scale(k).into(),
            Operator::Band(a) => a.scale(k).into(),
        }
    }

    pub fn adjoint(&self) -> Operator {
        match self {
            Operator::Dense(a) => a.adjoint().into(),
            Operator::Band(a) => a.adjoint().into(),
        }
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Operator) -> Result<Operator> {
        self.compose(other)?.add(&other.compose(self)?)
    }

    /// Identity on the same carrier.
    pub fn identity_like(&self) -> Operator {
        match self {
            Operator::Dense(a) => DenseOperator::identity(a.rows()).into(),
            Operator::Band(_) => BandOperator::identity().into(),
        }
    }

    pub fn zero_like(&self) -> Operator {
        match self {
            Operator::Dense(a) => DenseOperator::zeros(a.rows(), a.cols()).into(),
            Operator::Band(_) => BandOperator::zero().into(),
        }
    }

    /// Exact trace on dense, certified window trace on banded.
    pub fn trace(&self, window: usize) -> Result<CertifiedValue> {
        match self {
            Operator::Dense(a) => Ok(CertifiedValue::exact(a.trace()?)),
            Operator::Band(b) => b.certified_trace(window),
        }
    }

    /// Operator-norm bound: largest singular value on dense, summed band sups on banded.
    pub fn norm_bound(&self, window: usize) -> f64 {
        match self {
            Operator::Dense(a) => a.operator_norm(),
            Operator::Band(b) => b.band_sup_norm(window as i64),
        }
    }

    pub fn entry(&self, m: i64, n: i64) -> C64 {
        match self {
            Operator::Dense(a) => a.entry(m as usize, n as usize),
            Operator::Band(b) => b.entry(m, n),
        }
    }

    /// Max entrywise distance on a window (the whole matrix on dense).
    pub fn distance(&self, other: &Operator, window: i64) -> Result<f64> {
        match (self, other) {
            (Operator::Dense(a), Operator::Dense(b)) => Ok(a.sub(b)?.max_abs()),
            (Operator::Band(a), Operator::Band(b)) => {
                let span = a.max_offset().max(b.max_offset());
                let mut worst: f64 = 0.0;
                for n in -window..=window {
                    for d in -span..=span {
                        worst = worst.max((a.entry(n + d, n) - b.entry(n + d, n)).norm());
                    }
                }
                Ok(worst)
            }
            _ => Err(Error::MixedBackend),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_composes_trivially() {
        let t = DenseOperator::new(2, 2, vec![C64::new(1.0, 2.0), C64::new(0.0, 1.0), C64::new(3.0, 0.0), C64::new(-1.0, 0.0)]).unwrap();
        let op: Operator = t.clone().into();
        let p = op.identity_like().compose(&op).unwrap();
        assert_eq!(p.as_dense().unwrap(), &t);
    }

    #[test]
    fn mixed_backends_rejected() {
        let a: Operator = DenseOperator::identity(2).into();
        let b: Operator = BandOperator::identity().into();
        assert_eq!(a.compose(&b).unwrap_err(), Error::MixedBackend);
    }

    #[test]
    fn dimension_mismatch_reported() {
        let a: Operator = DenseOperator::zeros(2, 3).into();
        assert!(matches!(a.compose(&a), Err(Error::DimensionMismatch(_))));
    }
}
