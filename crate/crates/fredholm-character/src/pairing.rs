use crate::{character_chn, FredholmModule, KAPPA};
use nalgebra::DMatrix;
use ncg_cyclic_complex::{chern_idempotent_unchecked, chern_invertible_unnormalized, odd_prefactor, pair, LabelMatrix};
use ncg_model_triples::WindingSymbol;
use ncg_operator_core::{
    hermitian_spectrum, kernel_basis, kernel_dimension, CertifiedValue, DenseOperator, Error, Operator, Parity, Result,
    C64, KERNEL_TOL_DEFAULT,
};
use num_rational::BigRational;
use std::f64::consts::PI;

/// How an odd index is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OddMethod {
    /// Kernel count of the compressed Toeplitz operator.
    Direct,
    /// Pairing of `Ch_n(F)` with `Ch(u)`, divided by [`KAPPA`].
    Tau(usize),
}

/// How an even index is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvenMethod {
    Direct,
    Tau(usize),
}

const WINDING_SAMPLES: usize = 4096;
const VANISHING_SAMPLES: usize = 1024;
const EDGE_MASS: f64 = 1e-8;
const INVERSE_TOL: f64 = 1e-9;
const IDEMPOTENT_TOL: f64 = 1e-10;

/// `(1/2 pi i) \oint u'/u` by the trapezoid rule, rounded.
pub fn winding_number(s: &WindingSymbol) -> Result<i64> {
    let min = (0..VANISHING_SAMPLES)
        .map(|j| s.eval(2.0 * PI * j as f64 / VANISHING_SAMPLES as f64).norm())
        .fold(f64::INFINITY, f64::min);
    if min <= 1e-6 {
        return Err(Error::SymbolVanishes(min));
    }
    let h = 2.0 * PI / WINDING_SAMPLES as f64;
    let g: Vec<C64> = (0..WINDING_SAMPLES)
        .map(|j| {
            let theta = j as f64 * h;
            s.derivative(theta) / s.eval(theta)
        })
        .collect();
    let integral: C64 = g.iter().sum::<C64>() * h;
    let w = integral / C64::new(0.0, 2.0 * PI);
    // h/2 max|g'| with g' estimated from consecutive samples
    let bound = (0..WINDING_SAMPLES)
        .map(|j| (g[(j + 1) % WINDING_SAMPLES] - g[j]).norm() / 2.0)
        .fold(0.0, f64::max);
    if bound >= 0.5 {
        return Err(Error::WindingBound(bound));
    }
    Ok(w.re.round() as i64)
}

fn check_inverse(u: &Operator, u_inv: &Operator) -> Result<()> {
    let one = u.identity_like();
    let d = u.compose(u_inv)?.distance(&one, 64)?.max(u_inv.compose(u)?.distance(&one, 64)?);
    if d > INVERSE_TOL {
        return Err(Error::Singular(format!("u_inv is not an inverse of u (defect {d:.3e})")));
    }
    Ok(())
}

/// Rows `s0..=s0+rows-1`, columns `s0..=s0+cols-1` of a lattice operator.
fn section(op: &Operator, s0: i64, rows: usize, cols: usize) -> DenseOperator {
    let m = DMatrix::from_fn(rows, cols, |i, j| op.entry(s0 + i as i64, s0 + j as i64));
    DenseOperator::from_matrix(m)
}

/// First index of the nonnegative half of a diagonal `F` inside `[-w, w]`.
fn positive_start(f: &Operator, w: i64) -> Result<i64> {
    let band = f.as_band().ok_or_else(|| Error::InvalidArgument("lattice module expected".into()))?;
    if !band.is_diagonal() {
        return Err(Error::NotDiagonal("direct index needs a diagonal F".into()));
    }
    let s0 = (-w..=w).find(|&n| f.entry(n, n).re >= 0.0).ok_or_else(|| Error::InvalidArgument("F has no positive part in the window".into()))?;
    if (s0..=w).any(|n| f.entry(n, n).re < 0.0) {
        return Err(Error::InvalidArgument("positive part of F is not a half-line".into()));
    }
    Ok(s0)
}

/// Kernel dimension of the compression of `op` to the half-line, with the
/// stabilization and edge-decay checks.
fn half_line_kernel(op: &Operator, s0: i64, window: usize, band: usize) -> Result<usize> {
    let half = kernel_dimension(&section(op, s0, window / 2 + 1 + band, window / 2 + 1), KERNEL_TOL_DEFAULT);
    let basis = kernel_basis(&section(op, s0, window + 1 + band, window + 1), KERNEL_TOL_DEFAULT);
    let full = basis.ncols();
    if half != full {
        return Err(Error::WindowTooSmall(format!("kernel dimension {half} at half window vs {full} at full")));
    }
    let edge = 3 * window / 4;
    let mass: f64 = (edge..=window).map(|i| basis.row(i).norm_squared()).sum::<f64>().sqrt();
    if mass >= EDGE_MASS {
        return Err(Error::WindowTooSmall(format!("kernel vectors carry mass {mass:.3e} at the window edge")));
    }
    Ok(full)
}

/// `dim ker T_u - dim ker T_u*` with `T_u = P u P`, `P` the projection onto `F >= 0`.
pub fn direct_index_odd(m: &FredholmModule, u: &Operator) -> Result<i64> {
    match (&m.f, u) {
        (Operator::Dense(f), Operator::Dense(ud)) => {
            let (vals, vecs) = hermitian_spectrum(f)?;
            let cols: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > -ncg_operator_core::function::KERNEL_TOL).collect();
            let v = vecs.matrix().select_columns(&cols);
            let t = DenseOperator::from_matrix(v.adjoint() * ud.matrix() * &v);
            Ok(kernel_dimension(&t, KERNEL_TOL_DEFAULT) as i64 - kernel_dimension(&t.adjoint(), KERNEL_TOL_DEFAULT) as i64)
        }
        (Operator::Band(_), Operator::Band(ub)) => {
            let band = ub.max_offset().unsigned_abs() as usize;
            let floor = 4 * (band + 1);
            if m.window < floor {
                return Err(Error::WindowTooSmall(format!("window {} below the floor {floor}", m.window)));
            }
            let s0 = positive_start(&m.f, m.window as i64)?;
            let k = half_line_kernel(u, s0, m.window, band)?;
            let k_adj = half_line_kernel(&u.adjoint(), s0, m.window, band)?;
            Ok(k as i64 - k_adj as i64)
        }
        _ => Err(Error::MixedBackend),
    }
}

/// Index of `F_e = e F e` from the `+` to the `-` eigenspace of the grading.
pub fn direct_index_even(m: &FredholmModule, e: &Operator) -> Result<i64> {
    let gamma = m.grading.as_ref().ok_or_else(|| Error::ParityMismatch("even index needs a grading".into()))?;
    let (Operator::Dense(g), Operator::Dense(f), Operator::Dense(ed)) = (gamma, &m.f, e) else {
        return Err(Error::InvalidArgument("direct even index is implemented on the dense backend".into()));
    };
    let (vals, vecs) = hermitian_spectrum(g)?;
    let pick = |sign: f64| -> DMatrix<C64> {
        let cols: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] * sign > 0.0).collect();
        vecs.matrix().select_columns(&cols)
    };
    let (wp, wm) = (pick(1.0), pick(-1.0));
    let e_plus = wp.adjoint() * ed.matrix() * &wp;
    let e_minus = wm.adjoint() * ed.matrix() * &wm;
    let f21 = wm.adjoint() * f.matrix() * &wp;
    let range = |p: &DMatrix<C64>| {
        let one = DMatrix::<C64>::identity(p.nrows(), p.ncols());
        kernel_basis(&DenseOperator::from_matrix(one - p), KERNEL_TOL_DEFAULT)
    };
    let (qp, qm) = (range(&e_plus), range(&e_minus));
    let mm = DenseOperator::from_matrix(qm.adjoint() * &e_minus * f21 * qp);
    Ok(kernel_dimension(&mm, KERNEL_TOL_DEFAULT) as i64 - kernel_dimension(&mm.adjoint(), KERNEL_TOL_DEFAULT) as i64)
}

fn resolver<'a>(m: &'a FredholmModule, bound: &'a [(&'a str, &'a Operator)]) -> impl Fn(&str) -> Option<Operator> + 'a {
    move |l: &str| {
        if l == ncg_cyclic_complex::UNIT {
            return Some(m.identity());
        }
        bound.iter().find(|(name, _)| *name == l).map(|(_, op)| (*op).clone())
    }
}

/// Odd index pairing; `u_inv` must be a two-sided inverse of `u`.
pub fn index_pairing_odd(m: &FredholmModule, u: &Operator, u_inv: &Operator, method: OddMethod) -> Result<CertifiedValue> {
    if m.parity != Parity::Odd {
        return Err(Error::ParityMismatch("odd pairing on an even module".into()));
    }
    check_inverse(u, u_inv)?;
    match method {
        OddMethod::Direct => Ok(CertifiedValue::exact(C64::new(direct_index_odd(m, u)? as f64, 0.0))),
        OddMethod::Tau(n) => {
            let phi = character_chn(m, n)?;
            let ch = chern_invertible_unnormalized::<BigRational>(&LabelMatrix::scalar("u"), &LabelMatrix::scalar("u^-1"), n)
                .to_complex()
                .scale(&odd_prefactor());
            let bound = [("u", u), ("u^-1", u_inv)];
            let v = pair(&phi, &ch, &resolver(m, &bound))?;
            Ok(v * C64::new(1.0 / KAPPA, 0.0))
        }
    }
}

/// Even index pairing; `e` must be idempotent.
pub fn index_pairing_even(m: &FredholmModule, e: &Operator, method: EvenMethod) -> Result<CertifiedValue> {
    if m.parity != Parity::Even {
        return Err(Error::ParityMismatch("even pairing on an odd module".into()));
    }
    let defect = e.compose(e)?.distance(e, 64)?;
    if defect > IDEMPOTENT_TOL {
        return Err(Error::NotIdempotent(defect));
    }
    match method {
        EvenMethod::Direct => Ok(CertifiedValue::exact(C64::new(direct_index_even(m, e)? as f64, 0.0))),
        EvenMethod::Tau(n) => {
            let phi = character_chn(m, n)?;
            let ch = chern_idempotent_unchecked::<BigRational>(&LabelMatrix::scalar("e"), n).to_complex();
            let bound = [("e", e)];
            let v = pair(&phi, &ch, &resolver(m, &bound))?;
            Ok(v)
        }
    }
}
