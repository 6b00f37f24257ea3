//! Spectral triples used by the index pipelines: the circle Dirac operator on
//! the Fourier lattice (odd) and finite-dimensional graded triples (even).

mod symbol;
mod validate;

pub use symbol::{multiplication_operator, WindingSymbol};
pub use validate::{validate_triple, Check, ValidationReport};

use ncg_operator_core::{
    operator_function, Backend, BandOperator, DenseOperator, Diagonal, Error, Operator, Parity, Result, ScalarFn, C64,
};
use std::collections::BTreeMap;

/// One term `eps^{-lambda} (log eps)^j` of a finite-part ansatz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisTerm {
    pub lambda: f64,
    pub log_power: u32,
}

/// Algebra generators, Dirac operator, grading and declared summability.
#[derive(Clone, Debug)]
pub struct SpectralTriple {
    pub name: String,
    generators: BTreeMap<String, Operator>,
    pub dirac: Operator,
    pub grading: Option<Operator>,
    pub parity: Parity,
    pub p: f64,
    /// Singular terms expected in small-`eps` expansions of heat quantities.
    pub finite_part_basis: Vec<BasisTerm>,
    /// Cutoff `K` of the monomial alphabet `U^k`, `|k| <= K`, on lattice models.
    pub monomial_cutoff: Option<i64>,
}

/// Declared summability of the circle model.
pub const CIRCLE_P: f64 = 1.5;

/// Default cutoff of the circle's monomial alphabet.
pub const CIRCLE_CUTOFF: i64 = 8;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl SpectralTriple {
    pub fn backend(&self) -> Backend {
        self.dirac.backend()
    }

    pub fn generators(&self) -> impl Iterator<Item = (&str, &Operator)> {
        self.generators.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn generator(&self, name: &str) -> Option<&Operator> {
        self.generators.get(name)
    }

    pub fn identity(&self) -> Operator {
        self.dirac.identity_like()
    }

    /// Operator bound to a chain label: named generators, the unit `1`, and
    /// monomials `U^k` on lattice models.
    pub fn resolve(&self, label: &str) -> Option<Operator> {
        if label == "1" {
            return Some(self.identity());
        }
        if let Some(op) = self.generators.get(label) {
            return Some(op.clone());
        }
        let k = parse_monomial(label)?;
        match self.monomial_cutoff {
            Some(_) => Some(BandOperator::shift(k).into()),
            None => None,
        }
    }

    /// Adds or replaces a named generator.
    pub fn with_generator(mut self, name: &str, op: Operator) -> Self {
        self.generators.insert(name.to_string(), op);
        self
    }
}

/// Parses `U`, `U*` and `U^k`.
pub fn parse_monomial(label: &str) -> Option<i64> {
    match label {
        "1" => Some(0),
        "U" => Some(1),
        "U*" => Some(-1),
        _ => label.strip_prefix("U^")?.parse().ok(),
    }
}

/// Canonical label of `U^k`.
pub fn monomial_label(k: i64) -> String {
    if k == 0 {
        "1".into()
    } else {
        format!("U^{k}")
    }
}

/// Circle Dirac model: `D e_n = n e_n` on `l^2(Z)`, generators `U` and `U*`.
pub fn build_circle_dirac() -> SpectralTriple {
    let d = BandOperator::diagonal(Diagonal::polynomial(vec![re(0.0), re(1.0)]));
    let mut generators = BTreeMap::new();
    generators.insert("U".to_string(), BandOperator::shift(1).into());
    generators.insert("U*".to_string(), BandOperator::shift(-1).into());
    SpectralTriple {
        name: "circle".into(),
        generators,
        dirac: d.into(),
        grading: None,
        parity: Parity::Odd,
        p: CIRCLE_P,
        finite_part_basis: vec![BasisTerm { lambda: 1.0, log_power: 0 }, BasisTerm { lambda: 0.0, log_power: 1 }],
        monomial_cutoff: Some(CIRCLE_CUTOFF),
    }
}

fn check_even_block(name: &str, g: &DenseOperator, dim_plus: usize) -> Result<()> {
    let n = g.rows();
    let mut off = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if (i < dim_plus) != (j < dim_plus) {
                off = off.max(g.entry(i, j).norm());
            }
        }
    }
    if off > 1e-12 {
        return Err(Error::InvalidArgument(format!("generator {name} is not even (off-block {off:.3e})")));
    }
    Ok(())
}

/// Graded finite triple with `D = [[0, P*], [P, 0]]` and `gamma = diag(1, -1)`.
///
/// `p` maps the `+` space (dimension `dim_plus`) to the `-` space.
pub fn build_finite_even(
    dim_plus: usize,
    dim_minus: usize,
    p: &DenseOperator,
    generators: Vec<(String, DenseOperator)>,
) -> Result<SpectralTriple> {
    if p.rows() != dim_minus || p.cols() != dim_plus {
        return Err(Error::DimensionMismatch(format!(
            "P is {}x{}, expected {dim_minus}x{dim_plus}",
            p.rows(),
            p.cols()
        )));
    }
    let n = dim_plus + dim_minus;
    let mut d = nalgebra::DMatrix::<C64>::zeros(n, n);
    d.view_mut((dim_plus, 0), (dim_minus, dim_plus)).copy_from(p.matrix());
    d.view_mut((0, dim_plus), (dim_plus, dim_minus)).copy_from(&p.matrix().adjoint());
    let gamma: Vec<f64> = (0..n).map(|i| if i < dim_plus { 1.0 } else { -1.0 }).collect();
    let mut map = BTreeMap::new();
    for (name, g) in generators {
        if g.rows() != n || g.cols() != n {
            return Err(Error::DimensionMismatch(format!("generator {name} is {}x{}, expected {n}x{n}", g.rows(), g.cols())));
        }
        check_even_block(&name, &g, dim_plus)?;
        map.insert(name, Operator::from(g));
    }
    Ok(SpectralTriple {
        name: "finite-even".into(),
        generators: map,
        dirac: DenseOperator::from_matrix(d).into(),
        grading: Some(DenseOperator::from_real_diagonal(&gamma).into()),
        parity: Parity::Even,
        p: 1.0,
        finite_part_basis: vec![],
        monomial_cutoff: None,
    })
}

/// Ungraded finite triple with a given Hermitian `D`.
pub fn build_finite_odd(d: &DenseOperator, generators: Vec<(String, DenseOperator)>) -> Result<SpectralTriple> {
    let defect = d.hermitian_defect();
    if defect > 1e-12 * d.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let n = d.rows();
    let mut map = BTreeMap::new();
    for (name, g) in generators {
        if g.rows() != n || g.cols() != n {
            return Err(Error::DimensionMismatch(format!("generator {name} has the wrong size")));
        }
        map.insert(name, Operator::from(g));
    }
    Ok(SpectralTriple {
        name: "finite-odd".into(),
        generators: map,
        dirac: d.clone().into(),
        grading: None,
        parity: Parity::Odd,
        p: 1.0,
        finite_part_basis: vec![],
        monomial_cutoff: None,
    })
}

/// `F = D (1 + D^2)^{-1/2}`.
pub fn bounded_transform_of(t: &SpectralTriple) -> Result<Operator> {
    operator_function(&t.dirac, &ScalarFn::bounded_transform())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ncg_operator_core::kernel_dimension;

    #[test]
    fn circle_entries() {
        let t = build_circle_dirac();
        assert_eq!(t.dirac.entry(5, 5), re(5.0));
        let u = t.generator("U").unwrap();
        let c = t.dirac.commutator(u).unwrap();
        for n in -20..20 {
            assert_eq!(c.entry(n + 1, n), re(1.0));
        }
        let uu = t.generator("U*").unwrap().compose(u).unwrap();
        assert!(uu.distance(&t.identity(), 32).unwrap() == 0.0);
    }

    #[test]
    fn finite_even_index_examples() {
        let p = DenseOperator::new(1, 2, vec![re(1.0), re(0.0)]).unwrap();
        build_finite_even(2, 1, &p, vec![]).unwrap();
        let ind = kernel_dimension(&p, 1e-8) as i64 - kernel_dimension(&p.adjoint(), 1e-8) as i64;
        assert_eq!(ind, 1);
        let z = DenseOperator::zeros(1, 1);
        assert_eq!(kernel_dimension(&z, 1e-8) as i64 - kernel_dimension(&z.adjoint(), 1e-8) as i64, 0);
        let inv = DenseOperator::new(2, 2, vec![re(1.0), re(2.0), re(0.0), re(1.0)]).unwrap();
        assert_eq!(kernel_dimension(&inv, 1e-8) as i64 - kernel_dimension(&inv.adjoint(), 1e-8) as i64, 0);
    }

    #[test]
    fn finite_even_rejects_bad_input() {
        let p = DenseOperator::new(1, 2, vec![re(1.0), re(0.0)]).unwrap();
        assert!(build_finite_even(1, 2, &p, vec![]).is_err());
        let odd_gen = DenseOperator::new(3, 3, vec![re(0.0), re(0.0), re(1.0), re(0.0), re(0.0), re(0.0), re(0.0), re(0.0), re(0.0)]).unwrap();
        assert!(build_finite_even(2, 1, &p, vec![("a".into(), odd_gen)]).is_err());
    }

    #[test]
    fn monomial_labels_round_trip() {
        for k in -5..=5 {
            assert_eq!(parse_monomial(&monomial_label(k)), Some(k));
        }
        assert_eq!(parse_monomial("U"), Some(1));
        assert_eq!(parse_monomial("V"), None);
    }
}
