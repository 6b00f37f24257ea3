//! Finite part `PF(g)` of a small-`eps` expansion by weighted least squares.

use nalgebra::{DMatrix, DVector};
use ncg_model_triples::BasisTerm;
use ncg_operator_core::{CertifiedValue, Error, Result, C64};

/// Smallest admissible sample point.
pub const MIN_EPSILON: f64 = 1e-4;

/// Design matrices with a larger condition number are rejected.
pub const MAX_CONDITION: f64 = 1e10;

/// Floor added to tail bounds when forming weights.
const WEIGHT_FLOOR: f64 = 1e-10;

/// Samples `g(eps_i)` and the singular part of the declared ansatz.
#[derive(Clone, Debug)]
pub struct AsymptoticSampleSet {
    epsilons: Vec<f64>,
    values: Vec<CertifiedValue>,
    basis: Vec<BasisTerm>,
}

impl AsymptoticSampleSet {
    pub fn new(
        epsilons: Vec<f64>,
        values: Vec<CertifiedValue>,
        basis: Vec<BasisTerm>,
    ) -> Result<Self> {
        if epsilons.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} epsilons for {} values",
                epsilons.len(),
                values.len()
            )));
        }
        if epsilons.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(Error::InvalidArgument(
                "epsilons must be strictly decreasing".into(),
            ));
        }
        if epsilons.iter().any(|&e| !(e >= MIN_EPSILON)) {
            return Err(Error::InvalidArgument(format!(
                "epsilons must be at least {MIN_EPSILON}"
            )));
        }
        Ok(Self {
            epsilons,
            values,
            basis,
        })
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    /// Declared terms followed by `1, eps, eps^2`, without repeats.
    pub fn full_basis(&self) -> Vec<BasisTerm> {
        let mut out: Vec<BasisTerm> = Vec::new();
        for b in self
            .basis
            .iter()
            .copied()
            .chain([0.0, -1.0, -2.0].map(|lambda| BasisTerm {
                lambda,
                log_power: 0,
            }))
        {
            if !out.contains(&b) {
                out.push(b);
            }
        }
        out
    }
}

/// Fitted constant term with its propagated tail and the fit residual.
#[derive(Clone, Copy, Debug)]
pub struct FinitePart {
    pub value: C64,
    pub tail_bound: f64,
    pub residual: f64,
    pub condition: f64,
}

impl FinitePart {
    pub fn certified(&self) -> CertifiedValue {
        CertifiedValue::new(self.value, self.tail_bound)
    }
}

fn basis_value(b: &BasisTerm, eps: f64) -> f64 {
    eps.powf(-b.lambda) * eps.ln().powi(b.log_power as i32)
}

/// Coefficient of `1` in the weighted least-squares fit against the full basis.
pub fn finite_part(s: &AsymptoticSampleSet) -> Result<FinitePart> {
    let basis = s.full_basis();
    let needed = basis.len() + 2;
    if s.epsilons.len() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            got: s.epsilons.len(),
        });
    }
    let rows = s.epsilons.len();
    let weights: Vec<f64> = s
        .values
        .iter()
        .map(|v| 1.0 / (v.tail_bound + WEIGHT_FLOOR))
        .collect();
    let mut a = DMatrix::<f64>::from_fn(rows, basis.len(), |i, j| {
        weights[i] * basis_value(&basis[j], s.epsilons[i])
    });
    // equilibrate columns before measuring conditioning
    let scales: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    for (j, sc) in scales.iter().enumerate() {
        if *sc == 0.0 {
            return Err(Error::BasisInadequate(f64::INFINITY));
        }
        a.column_mut(j).scale_mut(1.0 / sc);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::BasisInadequate(condition));
    }
    let pinv = svd
        .pseudo_inverse(0.0)
        .map_err(|e| Error::Singular(e.to_string()))?;
    let one = basis
        .iter()
        .position(|b| b.lambda == 0.0 && b.log_power == 0)
        .expect("constant in basis");
    let row = pinv.row(one) / scales[one];
    let rhs_re = DVector::from_fn(rows, |i, _| weights[i] * s.values[i].value.re);
    let rhs_im = DVector::from_fn(rows, |i, _| weights[i] * s.values[i].value.im);
    let value = C64::new((&row * &rhs_re)[0], (&row * &rhs_im)[0]);
    let tail_bound = (0..rows)
        .map(|i| row[i].abs() * weights[i] * s.values[i].tail_bound)
        .sum();
    // unweighted residual of the full fit
    let coef_re = &pinv * &rhs_re;
    let coef_im = &pinv * &rhs_im;
    let mut residual: f64 = 0.0;
    for i in 0..rows {
        let mut fit = C64::new(0.0, 0.0);
        for (j, b) in basis.iter().enumerate() {
            fit += C64::new(coef_re[j], coef_im[j]) * (basis_value(b, s.epsilons[i]) / scales[j]);
        }
        residual = residual.max((fit - s.values[i].value).norm());
    }
    Ok(FinitePart {
        value,
        tail_bound,
        residual,
        condition,
    })
}

/// Adds geometric midpoints to a decreasing sample grid until it has `needed` points.
pub fn densify(eps: &[f64], needed: usize) -> Vec<f64> {
    let mut out = eps.to_vec();
    while out.len() < needed && out.len() >= 2 {
        let (i, _) = out
            .windows(2)
            .enumerate()
            .map(|(i, w)| (i, w[0] / w[1]))
            .fold(
                (0, 0.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        let mid = (out[i] * out[i + 1]).sqrt();
        out.insert(i + 1, mid);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(eps: &[f64], g: impl Fn(f64) -> f64, basis: Vec<BasisTerm>) -> AsymptoticSampleSet {
        let values = eps
            .iter()
            .map(|&e| CertifiedValue::exact(C64::new(g(e), 0.0)))
            .collect();
        AsymptoticSampleSet::new(eps.to_vec(), values, basis).unwrap()
    }

    #[test]
    fn recovers_constant_with_singular_terms() {
        let basis = vec![
            BasisTerm {
                lambda: 1.0,
                log_power: 0,
            },
            BasisTerm {
                lambda: 0.0,
                log_power: 1,
            },
        ];
        let eps = densify(&[1.0, 0.5, 0.25, 0.125], 9);
        let s = samples(&eps, |e| 3.0 / e + 2.0 * e.ln() + 5.0 + e, basis);
        let pf = finite_part(&s).unwrap();
        assert!((pf.value.re - 5.0).abs() < 1e-9, "{pf:?}");
        assert!(pf.residual < 1e-9);
    }

    #[test]
    fn constant_is_returned() {
        let s = samples(&[1.0, 0.8, 0.6, 0.4, 0.2], |_| -2.5, vec![]);
        let pf = finite_part(&s).unwrap();
        assert!((pf.value.re + 2.5).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let s = samples(&[1.0, 0.5, 0.25], |_| 1.0, vec![]);
        assert!(matches!(
            finite_part(&s),
            Err(Error::InsufficientSamples { needed: 5, got: 3 })
        ));
        let dup = vec![
            BasisTerm {
                lambda: 1.0,
                log_power: 0,
            },
            BasisTerm {
                lambda: 1.0 + 1e-13,
                log_power: 0,
            },
        ];
        let s = samples(&[1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4], |_| 1.0, dup);
        assert!(matches!(finite_part(&s), Err(Error::BasisInadequate(_))));
        assert!(
            AsymptoticSampleSet::new(vec![0.5, 1.0], vec![CertifiedValue::zero(); 2], vec![])
                .is_err()
        );
        assert!(
            AsymptoticSampleSet::new(vec![1e-5], vec![CertifiedValue::zero()], vec![]).is_err()
        );
    }

    #[test]
    fn densify_is_geometric_and_decreasing() {
        let e = densify(&[1.0, 0.25], 3);
        assert_eq!(e.len(), 3);
        assert!((e[1] - 0.5).abs() < 1e-15);
        let e = densify(&[1.0, 0.5, 0.25], 7);
        assert!(e.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(e.len(), 7);
    }
}
