use crate::error::{Error, Result};
use crate::C64;
use nalgebra::DMatrix;

/// Finite complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    m: DMatrix<C64>,
}

impl DenseOperator {
    /// Builds from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { m: DMatrix::from_row_slice(rows, cols, &entries) })
    }

    pub fn from_matrix(m: DMatrix<C64>) -> Self {
        Self { m }
    }

    pub fn identity(n: usize) -> Self {
        Self { m: DMatrix::identity(n, n) }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { m: DMatrix::zeros(rows, cols) }
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let v: Vec<C64> = d.iter().map(|x| C64::new(*x, 0.0)).collect();
        Self { m: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(v)) }
    }

    pub fn rows(&self) -> usize {
        self.m.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    pub fn compose(&self, other: &DenseOperator) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} composed with {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self { m: &self.m * &other.m })
    }

    fn same_shape(&self, other: &DenseOperator) -> Result<()> {
        if self.m.shape() != other.m.shape() {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", self.m.shape(), other.m.shape())));
        }
        Ok(())
    }

    pub fn add(&self, other: &DenseOperator) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self { m: &self.m + &other.m })
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self { m: &self.m - &other.m })
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { m: &self.m * k }
    }

    pub fn trace(&self) -> Result<C64> {
        if self.rows() != self.cols() {
            return Err(Error::DimensionMismatch("trace of a non-square matrix".into()));
        }
        Ok(self.m.trace())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        if self.m.is_empty() {
            return 0.0;
        }
        self.m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        if self.rows() != self.cols() {
            return f64::INFINITY;
        }
        (&self.m - self.m.adjoint()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &DenseOperator) -> Self {
        let (r1, c1) = self.m.shape();
        let (r2, c2) = other.m.shape();
        let mut m = DMatrix::zeros(r1 + r2, c1 + c2);
        m.view_mut((0, 0), (r1, c1)).copy_from(&self.m);
        m.view_mut((r1, c1), (r2, c2)).copy_from(&other.m);
        Self { m }
    }
}

/// Eigen-decomposition `H = V diag(lambda) V*` of a Hermitian matrix.
pub fn hermitian_spectrum(h: &DenseOperator) -> Result<(Vec<f64>, DenseOperator)> {
    let scale = h.frobenius_norm().max(1.0);
    let defect = h.hermitian_defect();
    if defect > 1e-12 * scale {
        return Err(Error::NotHermitian(defect));
    }
    if h.rows() == 0 {
        return Ok((vec![], DenseOperator::zeros(0, 0)));
    }
    let sym = (h.matrix() + h.matrix().adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    Ok((eig.eigenvalues.iter().cloned().collect(), DenseOperator::from_matrix(eig.eigenvectors)))
}

/// Dimension of the kernel: columns minus the numerical rank.
///
/// Singular values below `tol` times the largest one (or `tol` for the zero
/// map) count as zero.
pub fn kernel_dimension(t: &DenseOperator, tol: f64) -> usize {
    let (r, c) = (t.rows(), t.cols());
    if r == 0 || c == 0 {
        return c;
    }
    let sv = t.matrix().clone().singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let cut = tol * if top > 0.0 { top } else { 1.0 };
    let rank = sv.iter().filter(|s| **s >= cut && **s > 0.0).count();
    c - rank
}

/// Orthonormal basis of the kernel (columns), using the same threshold as [`kernel_dimension`].
pub fn kernel_basis(t: &DenseOperator, tol: f64) -> DMatrix<C64> {
    let (r, c) = (t.rows(), t.cols());
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    if r == 0 {
        return DMatrix::identity(c, c);
    }
    // pad with zero rows so the thin decomposition yields a full right basis
    let mut a = DMatrix::zeros(r.max(c), c);
    a.view_mut((0, 0), (r, c)).copy_from(t.matrix());
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol * if top > 0.0 { top } else { 1.0 };
    let cols: Vec<_> = (0..c)
        .filter(|&j| svd.singular_values[j] < cut || svd.singular_values[j] == 0.0)
        .map(|j| vt.row(j).adjoint())
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(c, 0);
    }
    DMatrix::from_columns(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn entries_length_checked() {
        assert!(DenseOperator::new(2, 2, vec![re(1.0); 3]).is_err());
    }

    #[test]
    fn pauli_spectrum() {
        let h = DenseOperator::new(2, 2, vec![re(0.0), re(1.0), re(1.0), re(0.0)]).unwrap();
        let (mut ev, _) = hermitian_spectrum(&h).unwrap();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_spectrum_is_a_permutation() {
        let h = DenseOperator::from_real_diagonal(&[3.0, 1.0]);
        let (ev, v) = hermitian_spectrum(&h).unwrap();
        let mut s = ev.clone();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(s, vec![1.0, 3.0]);
        for z in v.matrix().iter() {
            assert!(z.norm() < 1e-14 || (z.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = DMatrix::from_fn(8, 8, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let h = DenseOperator::from_matrix(&a + a.adjoint());
        let (ev, v) = hermitian_spectrum(&h).unwrap();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(8, ev.iter().map(|x| re(*x))));
        let rec = v.matrix() * d * v.matrix().adjoint();
        assert!((rec - h.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10);
        let unit = v.matrix().adjoint() * v.matrix() - DMatrix::<C64>::identity(8, 8);
        assert!(unit.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10);
    }

    #[test]
    fn non_hermitian_rejected() {
        let h = DenseOperator::new(2, 2, vec![re(0.0), re(1.0), re(0.0), re(0.0)]).unwrap();
        assert!(matches!(hermitian_spectrum(&h), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn kernel_dimensions() {
        assert_eq!(kernel_dimension(&DenseOperator::zeros(2, 3), 1e-8), 3);
        assert_eq!(kernel_dimension(&DenseOperator::identity(4), 1e-8), 0);
        let v = [re(1.0), re(2.0), re(-1.0)];
        let p = DMatrix::from_fn(3, 3, |i, j| v[i] * v[j].conj() / re(6.0));
        assert_eq!(kernel_dimension(&DenseOperator::from_matrix(p), 1e-8), 2);
        assert_eq!(kernel_dimension(&DenseOperator::zeros(0, 5), 1e-8), 5);
    }

    #[test]
    fn kernel_basis_matches_dimension() {
        let p = DenseOperator::new(1, 2, vec![re(1.0), re(0.0)]).unwrap();
        let k = kernel_basis(&p, 1e-8);
        assert_eq!(k.ncols(), 1);
        assert!((k[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }
}
