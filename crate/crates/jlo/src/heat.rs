//! Exact simplex integrals `int Tr A_0 e^{-t_0 X} A_1 ... A_k e^{-t_k X}` with `X = D^2`.

use crate::divided::heat_divided_difference;
use nalgebra::DMatrix;
use ncg_operator_core::band::chunked_sum;
use ncg_operator_core::{
    hermitian_spectrum, BandOperator, CertifiedValue, Diagonal, Error, Operator, Result, C64,
};
use std::sync::Arc;

/// Largest supported simplex dimension.
pub const MAX_SIMPLEX_DEGREE: usize = 12;

/// Above this many index paths the dense evaluator switches to a block exponential.
const PATH_LIMIT: usize = 50_000;

/// Factors `A_0, ..., A_k` of a heat-slice product, optionally with a bare `D`
/// inserted after factor `l`.
#[derive(Clone, Debug)]
pub struct HeatSliceProduct {
    pub factors: Vec<Operator>,
    pub dirac: Operator,
    pub insertion: Option<usize>,
}

impl HeatSliceProduct {
    pub fn new(factors: Vec<Operator>, dirac: Operator, insertion: Option<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument(
                "a heat-slice product needs a factor".into(),
            ));
        }
        if factors.iter().any(|f| f.backend() != dirac.backend()) {
            return Err(Error::MixedBackend);
        }
        if matches!(insertion, Some(l) if l >= factors.len()) {
            return Err(Error::InvalidArgument(
                "insertion position out of range".into(),
            ));
        }
        Ok(Self {
            factors,
            dirac,
            insertion,
        })
    }

    /// Factor list with the insertion expanded.
    pub fn expanded(&self, bare: &Operator) -> Vec<Operator> {
        let mut out = self.factors.clone();
        if let Some(l) = self.insertion {
            out.insert(l + 1, bare.clone());
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.factors.len() - 1 + usize::from(self.insertion.is_some())
    }
}

/// Spectral data of `D` prepared once and reused across evaluations.
#[derive(Clone, Debug)]
pub enum HeatEngine {
    /// Eigenvalues and eigenvectors of a Hermitian matrix.
    Dense {
        lambda: Arc<Vec<f64>>,
        basis: Arc<DMatrix<C64>>,
    },
    /// `D e_n = (a n + b) e_n` on the lattice.
    Lattice { a: f64, b: f64 },
}

impl HeatEngine {
    pub fn new(d: &Operator) -> Result<Self> {
        match d {
            Operator::Dense(h) => {
                let (vals, vecs) = hermitian_spectrum(h)?;
                Ok(HeatEngine::Dense {
                    lambda: Arc::new(vals),
                    basis: Arc::new(vecs.into_matrix()),
                })
            }
            Operator::Band(b) => {
                let (a, b0) = affine_diagonal(b)?;
                Ok(HeatEngine::Lattice { a, b: b0 })
            }
        }
    }

    /// Engine of `eps D`.
    pub fn scaled(&self, eps: f64) -> Self {
        match self {
            HeatEngine::Dense { lambda, basis } => HeatEngine::Dense {
                lambda: Arc::new(lambda.iter().map(|l| eps * l).collect()),
                basis: basis.clone(),
            },
            HeatEngine::Lattice { a, b } => HeatEngine::Lattice {
                a: eps * a,
                b: eps * b,
            },
        }
    }

    /// `Tr e^{-t D^2}`.
    pub fn heat_trace(&self, t: f64, window: usize) -> CertifiedValue {
        match self {
            HeatEngine::Dense { lambda, .. } => CertifiedValue::exact(C64::new(
                lambda.iter().map(|l| (-t * l * l).exp()).sum(),
                0.0,
            )),
            HeatEngine::Lattice { a, b } => {
                let w = window as i64;
                let value = chunked_sum(-w, w, |n| {
                    C64::new((-t * (a * n as f64 + b).powi(2)).exp(), 0.0)
                });
                let tail = gaussian_tail(t, *a, lattice_floor(*a, *b, w + 1, 0));
                CertifiedValue::new(value, 2.0 * tail)
            }
        }
    }

    /// `int_{sum t = t_total} Tr A_0 e^{-t_0 D^2} A_1 ... A_k e^{-t_k D^2}`.
    pub fn simplex_trace(
        &self,
        factors: &[Operator],
        t_total: f64,
        window: usize,
    ) -> Result<CertifiedValue> {
        let k = factors.len() - 1;
        if k > MAX_SIMPLEX_DEGREE {
            return Err(Error::DegreeTooLarge(k));
        }
        match self {
            HeatEngine::Dense { lambda, basis } => {
                let mats = factors
                    .iter()
                    .map(|f| {
                        f.as_dense()
                            .map(|d| basis.adjoint() * d.matrix() * basis.as_ref())
                            .ok_or(Error::MixedBackend)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mu: Vec<f64> = lambda.iter().map(|l| l * l).collect();
                let dim = mu.len();
                let paths = dim.checked_pow(k as u32 + 1).unwrap_or(usize::MAX);
                let v = if paths <= PATH_LIMIT {
                    dense_path_sum(&mats, &mu, t_total)
                } else {
                    dense_block_exp(&mats, &mu, t_total)
                };
                Ok(CertifiedValue::exact(v))
            }
            HeatEngine::Lattice { a, b } => {
                let bands = factors
                    .iter()
                    .map(|f| f.as_band().cloned().ok_or(Error::MixedBackend))
                    .collect::<Result<Vec<_>>>()?;
                lattice_simplex_trace(&bands, *a, *b, t_total, window)
            }
        }
    }
}

/// `int_{sum t = t_total}` of the heat-slice product.
pub fn simplex_heat_trace(
    h: &HeatSliceProduct,
    t_total: f64,
    window: usize,
) -> Result<CertifiedValue> {
    if h.degree() > MAX_SIMPLEX_DEGREE {
        return Err(Error::DegreeTooLarge(h.degree()));
    }
    let engine = HeatEngine::new(&h.dirac)?;
    engine.simplex_trace(&h.expanded(&h.dirac), t_total, window)
}

fn affine_diagonal(b: &BandOperator) -> Result<(f64, f64)> {
    if !b.is_diagonal() {
        return Err(Error::NotDiagonal(
            "heat traces on the lattice need a diagonal D".into(),
        ));
    }
    let d = |n: i64| b.entry(n, n);
    let (b0, a) = (d(0).re, d(1).re - d(0).re);
    for n in [-1024i64, -37, -1, 2, 5, 64, 1024] {
        let v = d(n);
        if (v.re - (a * n as f64 + b0)).abs() > 1e-12 * (1.0 + v.norm()) || v.im.abs() > 1e-12 {
            return Err(Error::InvalidArgument(
                "lattice heat traces need an affine real D".into(),
            ));
        }
    }
    Ok((a, b0))
}

/// Lower bound of `|a i + b|` over `|i| >= m - span`.
fn lattice_floor(a: f64, b: f64, m: i64, span: i64) -> f64 {
    (a.abs() * (m - span) as f64 - b.abs()).max(0.0)
}

/// `sum_{j >= 0} exp(-t (x + j |a|)^2)`, bounded using `(x + j|a|)^2 >= x^2 + j |a| (2x + |a|)`.
fn gaussian_tail(t: f64, a: f64, x: f64) -> f64 {
    let ratio = (-t * a.abs() * (2.0 * x + a.abs())).exp();
    if ratio >= 1.0 {
        f64::INFINITY
    } else {
        (-t * x * x).exp() / (1.0 - ratio)
    }
}

fn dense_path_sum(mats: &[DMatrix<C64>], mu: &[f64], t: f64) -> C64 {
    let k = mats.len() - 1;
    let dim = mu.len();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut total = C64::new(0.0, 0.0);
    let mut idx = vec![0usize; k + 1];
    let mut pts = vec![0.0; k + 1];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        j: usize,
        prod: C64,
        mats: &[DMatrix<C64>],
        mu: &[f64],
        t: f64,
        idx: &mut Vec<usize>,
        pts: &mut Vec<f64>,
        total: &mut C64,
        sign: f64,
    ) {
        let k = mats.len() - 1;
        let dim = mu.len();
        if j == k {
            let e = mats[k][(idx[k], idx[0])];
            if e == C64::new(0.0, 0.0) {
                return;
            }
            pts[k] = mu[idx[0]];
            *total += prod * e * sign * heat_divided_difference(pts, t);
            return;
        }
        for next in 0..dim {
            let e = mats[j][(idx[j], next)];
            if e == C64::new(0.0, 0.0) {
                continue;
            }
            idx[j + 1] = next;
            pts[j] = mu[next];
            rec(j + 1, prod * e, mats, mu, t, idx, pts, total, sign);
        }
    }
    for i0 in 0..dim {
        idx[0] = i0;
        if k == 0 {
            total += mats[0][(i0, i0)] * (-t * mu[i0]).exp();
            continue;
        }
        rec(
            0,
            C64::new(1.0, 0.0),
            mats,
            mu,
            t,
            &mut idx,
            &mut pts,
            &mut total,
            sign,
        );
    }
    total
}

/// Block upper-bidiagonal exponential: block `(0, k)` of `exp(t M)` with `-X`
/// on the diagonal and `A_1..A_k` above it.
fn dense_block_exp(mats: &[DMatrix<C64>], mu: &[f64], t: f64) -> C64 {
    let k = mats.len() - 1;
    let d = mu.len();
    let size = d * (k + 1);
    let mut m = DMatrix::<C64>::zeros(size, size);
    for blk in 0..=k {
        for i in 0..d {
            m[(blk * d + i, blk * d + i)] = C64::new(-t * mu[i], 0.0);
        }
        if blk < k {
            let a = &mats[blk + 1] * C64::new(t, 0.0);
            m.view_mut((blk * d, (blk + 1) * d), (d, d)).copy_from(&a);
        }
    }
    let e = m.exp();
    let corner = e.view((0, k * d), (d, d)).into_owned();
    (&mats[0] * corner).trace()
}

/// Offset tuples `(o_0, ..., o_k)`, one per factor, summing to zero.
fn closed_offset_paths(offsets: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let k = offsets.len();
    // reachable partial sums from the end, to prune
    let mut suffix: Vec<(i64, i64)> = vec![(0, 0); k + 1];
    for j in (0..k).rev() {
        let lo = offsets[j].iter().min().copied().unwrap_or(0);
        let hi = offsets[j].iter().max().copied().unwrap_or(0);
        suffix[j] = (suffix[j + 1].0 + lo, suffix[j + 1].1 + hi);
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(
        j: usize,
        sum: i64,
        offsets: &[Vec<i64>],
        suffix: &[(i64, i64)],
        cur: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if j == offsets.len() {
            if sum == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for &o in &offsets[j] {
            let s = sum + o;
            if -s < suffix[j + 1].0 || -s > suffix[j + 1].1 {
                continue;
            }
            cur.push(o);
            rec(j + 1, s, offsets, suffix, cur, out);
            cur.pop();
        }
    }
    rec(0, 0, offsets, &suffix, &mut cur, &mut out);
    out
}

fn lattice_simplex_trace(
    bands: &[BandOperator],
    a: f64,
    b: f64,
    t: f64,
    window: usize,
) -> Result<CertifiedValue> {
    let k = bands.len() - 1;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let offsets: Vec<Vec<i64>> = bands.iter().map(|f| f.offsets().collect()).collect();
    let paths = closed_offset_paths(&offsets);
    let w = window as i64;
    let mu = |i: i64| (a * i as f64 + b).powi(2);
    let mut value = C64::new(0.0, 0.0);
    let mut tail = 0.0;
    for path in &paths {
        let diags: Vec<_> = path
            .iter()
            .zip(bands)
            .map(|(o, f)| f.diag(*o).expect("offset present").clone())
            .collect();
        // i_{j+1} = i_j - o_j, factor j evaluated at column i_{j+1}
        let positions: Vec<i64> = path
            .iter()
            .scan(0i64, |acc, o| {
                *acc -= o;
                Some(*acc)
            })
            .collect();
        let term = |n: i64| -> C64 {
            let mut prod = C64::new(1.0, 0.0);
            let mut pts = Vec::with_capacity(k + 1);
            for (j, d) in diags.iter().enumerate() {
                let i = n + positions[j];
                prod *= d.at(i);
                pts.push(mu(i));
            }
            if prod == C64::new(0.0, 0.0) {
                return prod;
            }
            prod * sign * heat_divided_difference(&pts, t)
        };
        value += chunked_sum(-w, w, term);
        tail += path_tail(&diags, &positions, a, b, t, w)?;
    }
    Ok(CertifiedValue::new(value, tail))
}

/// `sum_{|n| > w}` of a path term, from `|g[x]| <= t^k e^{-t min x} / k!` and
/// majorants of the factors; explicit below the asymptotic threshold, then a ratio test.
fn path_tail(diags: &[Diagonal], positions: &[i64], a: f64, b: f64, t: f64, w: i64) -> Result<f64> {
    let k = diags.len() - 1;
    let span = positions.iter().map(|p| p.abs()).max().unwrap_or(0);
    let kfact: f64 = (1..=k).map(|j| j as f64).product();
    let asyms = diags
        .iter()
        .map(|d| {
            d.asymptotics()
                .ok_or_else(|| Error::MissingAsymptotics("heat-slice factor".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let n0 = asyms.iter().map(|s| s.n0).max().unwrap_or(1);
    let weight = |m: i64| {
        let floor = lattice_floor(a, b, m, span);
        t.powi(k as i32) / kfact * (-t * floor * floor).exp()
    };
    let explicit = |m: i64| -> f64 {
        let mut prod = 1.0;
        for d in diags {
            let sup = (m - span..=m + span)
                .flat_map(|i| [d.at(i).norm(), d.at(-i).norm()])
                .fold(0.0, f64::max);
            prod *= sup;
        }
        prod * weight(m)
    };
    let asymptotic = |m: i64| -> f64 {
        let (lo, hi) = ((m - span) as f64, (m + span) as f64);
        asyms
            .iter()
            .map(|s| s.sup_bound(lo).max(s.sup_bound(hi)))
            .product::<f64>()
            * weight(m)
    };
    let mut tail = 0.0;
    let mut m = w + 1;
    while m - span < n0.max(1) {
        tail += 2.0 * explicit(m);
        m += 1;
    }
    let first = asymptotic(m);
    if first == 0.0 {
        return Ok(tail);
    }
    let ratio = asymptotic(m + 1) / first;
    let later = asymptotic(2 * m + 1) / asymptotic(2 * m).max(f64::MIN_POSITIVE);
    if !(ratio < 1.0) || later > ratio * (1.0 + 1e-12) {
        return Err(Error::NotTraceClass(
            "heat-slice tail does not decay geometrically past the window".into(),
        ));
    }
    Ok(tail + 2.0 * first / (1.0 - ratio))
}
