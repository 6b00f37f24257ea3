//! Exact coefficients `C_m`, `sigma_l(n)` and Gamma-function Taylor data.

use crate::hurwitz::hurwitz_zeta;
use ncg_operator_core::{Parity, Result, C64};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::f64::consts::{LN_2, PI};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `C_m = (-1)^m / ((m_1 + 1)(m_1 + m_2 + 2)...(m_1 + ... + m_k + k) m_1! ... m_k!)`.
pub fn coefficient_c(m: &[u32]) -> BigRational {
    let mut denom = BigInt::one();
    let mut partial = 0u64;
    for (j, &mj) in m.iter().enumerate() {
        partial += mj as u64;
        denom *= BigInt::from(partial + j as u64 + 1) * factorial(mj as u64);
    }
    let total: u64 = m.iter().map(|&x| x as u64).sum();
    let sign = if total % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    BigRational::new(sign, denom)
}

/// Coefficients in `s` of `prod (j - 1/2 + s), j = 1..n` (odd) or
/// `prod (j + s), j = 1..n-1` (even), lowest degree first.
pub fn sigma_coefficients(n: usize, parity: Parity) -> Vec<BigRational> {
    let roots: Vec<BigRational> = match parity {
        Parity::Odd => (1..=n as u64).map(|j| int(j) - BigRational::new(BigInt::one(), BigInt::from(2))).collect(),
        Parity::Even => (1..n as u64).map(int).collect(),
    };
    let mut poly = vec![BigRational::one()];
    for a in roots {
        let mut next = vec![BigRational::zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] += c * &a;
            next[i + 1] += c;
        }
        poly = next;
    }
    poly
}

/// Tuples `(m_1, ..., m_k)` of nonnegative integers with sum at most `cap`,
/// ordered by total then lexicographically.
pub fn compositions(k: usize, cap: u32) -> Vec<Vec<u32>> {
    fn fill(prefix: &mut Vec<u32>, k: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == k {
            if remaining == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for v in (0..=remaining).rev() {
            prefix.push(v);
            fill(prefix, k, remaining - v, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=cap {
        let mut level = Vec::new();
        fill(&mut Vec::with_capacity(k), k, total, &mut level);
        level.reverse();
        out.extend(level);
        if k == 0 {
            break;
        }
    }
    out
}

fn riemann_zeta(s: u32) -> Result<f64> {
    if s == 2 {
        return Ok(PI * PI / 6.0);
    }
    Ok(hurwitz_zeta(C64::new(s as f64, 0.0), 1.0)?.re)
}

/// `psi^{(k)}(x)` at `x = twice_x / 2 > 0` from the values at 1/2 or 1 and the recurrence.
fn polygamma(k: u32, twice_x: u32) -> Result<f64> {
    let half = twice_x % 2 == 1;
    let mut value = if k == 0 {
        if half {
            -EULER_GAMMA - 2.0 * LN_2
        } else {
            -EULER_GAMMA
        }
    } else {
        let fact: f64 = (1..=k).map(|j| j as f64).product();
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let scale = if half { 2f64.powi(k as i32 + 1) - 1.0 } else { 1.0 };
        sign * fact * scale * riemann_zeta(k + 1)?
    };
    let mut x = if half { 0.5 } else { 1.0 };
    let fact: f64 = (1..=k).map(|j| j as f64).product();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    while 2.0 * x < twice_x as f64 {
        value += sign * fact / x.powi(k as i32 + 1);
        x += 1.0;
    }
    Ok(value)
}

/// `Gamma(x)` at `x = twice_x / 2 > 0`.
fn gamma_at(twice_x: u32) -> f64 {
    let (mut g, mut x) = if twice_x % 2 == 1 { (PI.sqrt(), 0.5) } else { (1.0, 1.0) };
    while 2.0 * x < twice_x as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

/// `Gamma^{(l)}(x) / l!` for `l < terms` at `x = twice_x / 2 > 0`.
pub fn gamma_taylor(twice_x: u32, terms: usize) -> Result<Vec<f64>> {
    if twice_x == 0 {
        return Err(ncg_operator_core::Error::InvalidArgument("Gamma has a pole at 0".into()));
    }
    // log Gamma(x + s) - log Gamma(x) = sum_{j >= 1} psi^{(j-1)}(x) s^j / j!
    let mut p = vec![0.0; terms];
    let mut fact = 1.0;
    for (j, pj) in p.iter_mut().enumerate().skip(1) {
        fact *= j as f64;
        *pj = polygamma(j as u32 - 1, twice_x)? / fact;
    }
    // e = exp(p) from e' = p' e
    let mut e = vec![0.0; terms];
    if terms > 0 {
        e[0] = 1.0;
    }
    for n in 1..terms {
        e[n] = (1..=n).map(|k| k as f64 * p[k] * e[n - k]).sum::<f64>() / n as f64;
    }
    let g = gamma_at(twice_x);
    Ok(e.into_iter().map(|c| c * g).collect())
}

/// Regular part of `Gamma(s) = 1/s + sum_l g_l s^l` at 0, for `l < terms`.
pub fn gamma_laurent_at_zero(terms: usize) -> Result<Vec<f64>> {
    let t = gamma_taylor(2, terms + 1)?;
    Ok(t[1..].to_vec())
}
