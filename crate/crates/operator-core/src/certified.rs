use crate::C64;
use std::ops::{Add, Mul, Neg, Sub};

/// A complex number together with a rigorous bound on the neglected tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifiedValue {
    pub value: C64,
    pub tail_bound: f64,
}

impl CertifiedValue {
    pub fn new(value: C64, tail_bound: f64) -> Self {
        Self { value, tail_bound }
    }

    pub fn exact(value: C64) -> Self {
        Self { value, tail_bound: 0.0 }
    }

    pub fn zero() -> Self {
        Self::exact(C64::new(0.0, 0.0))
    }

    pub fn scale(self, c: C64) -> Self {
        Self { value: self.value * c, tail_bound: self.tail_bound * c.norm() }
    }

    /// Distance between two values, discounted by both tails.
    pub fn agrees_with(&self, other: &CertifiedValue, slack: f64) -> bool {
        (self.value - other.value).norm() <= self.tail_bound + other.tail_bound + slack
    }
}

impl Add for CertifiedValue {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { value: self.value + o.value, tail_bound: self.tail_bound + o.tail_bound }
    }
}

impl Sub for CertifiedValue {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { value: self.value - o.value, tail_bound: self.tail_bound + o.tail_bound }
    }
}

impl Neg for CertifiedValue {
    type Output = Self;
    fn neg(self) -> Self {
        Self { value: -self.value, tail_bound: self.tail_bound }
    }
}

impl Mul<C64> for CertifiedValue {
    type Output = Self;
    fn mul(self, c: C64) -> Self {
        self.scale(c)
    }
}

impl std::iter::Sum for CertifiedValue {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}
