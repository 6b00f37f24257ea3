//! JLO cochains of `eps D`, their transgression cochains and Chern pairings.

use crate::heat::{HeatEngine, MAX_SIMPLEX_DEGREE};
use ncg_cyclic_complex::{
    chern_idempotent_unchecked, chern_invertible_unnormalized, odd_prefactor, pair, CyclicCochain,
    LabelMatrix, UNIT,
};
use ncg_model_triples::SpectralTriple;
use ncg_operator_core::{CertifiedValue, Error, Operator, Parity, Result, C64};
use num_rational::BigRational;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Window for lattice traces unless given explicitly.
pub const DEFAULT_WINDOW: usize = 256;

/// Highest odd and even degrees used by the entire pairings.
pub const ODD_DEGREE_CAP: usize = 11;
pub const EVEN_DEGREE_CAP: usize = 12;

static HOLDER_CHECKED: AtomicU64 = AtomicU64::new(0);
static HOLDER_VIOLATED: AtomicU64 = AtomicU64::new(0);

/// Running count of Hölder-bound checks made by JLO evaluations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HolderStats {
    pub checked: u64,
    pub violated: u64,
}

/// Counts of Hölder checks performed so far in this process.
pub fn holder_stats() -> HolderStats {
    HolderStats {
        checked: HOLDER_CHECKED.load(Ordering::SeqCst),
        violated: HOLDER_VIOLATED.load(Ordering::SeqCst),
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn prefactor(parity: Parity) -> C64 {
    match parity {
        Parity::Even => C64::new(1.0, 0.0),
        Parity::Odd => C64::new(0.0, 2.0).sqrt(),
    }
}

/// Heat data of `eps D` shared by the components of one cochain.
#[derive(Clone)]
struct Scaled {
    grading: Option<Operator>,
    dirac: Operator,
    scaled: Operator,
    engine: HeatEngine,
    window: usize,
}

impl Scaled {
    fn new(t: &SpectralTriple, eps: f64, window: usize) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "eps must be positive, got {eps}"
            )));
        }
        let engine = HeatEngine::new(&t.dirac)?.scaled(eps);
        Ok(Self {
            grading: t.grading.clone(),
            dirac: t.dirac.clone(),
            scaled: t.dirac.scale(C64::new(eps, 0.0)),
            engine,
            window,
        })
    }

    /// `[gamma a_0, [eps D, a_1], ..., [eps D, a_k]]`.
    fn factors(&self, args: &[Operator]) -> Result<Vec<Operator>> {
        let mut out = Vec::with_capacity(args.len() + 1);
        out.push(match &self.grading {
            Some(g) => g.compose(&args[0])?,
            None => args[0].clone(),
        });
        for a in &args[1..] {
            out.push(self.scaled.commutator(a)?);
        }
        Ok(out)
    }

    /// `(1/k!) |a_0| prod |[eps D, a_i]| Tr e^{-eps^2 D^2}` times `|pre|`.
    fn holder_bound(&self, factors: &[Operator], pre: C64) -> f64 {
        let k = factors.len() - 1;
        let norms: f64 = factors.iter().map(|f| f.norm_bound(self.window)).product();
        let heat = self.engine.heat_trace(1.0, self.window);
        pre.norm() / factorial(k) * norms * (heat.value.re + heat.tail_bound)
    }
}

fn check_parity(k: usize, want: Parity) -> Result<()> {
    if Parity::of_degree(k) != want {
        return Err(Error::ParityMismatch(format!(
            "degree {k} for a {} cochain",
            want.name()
        )));
    }
    if k > MAX_SIMPLEX_DEGREE {
        return Err(Error::DegreeTooLarge(k));
    }
    Ok(())
}

fn jlo_component(
    s: Arc<Scaled>,
    pre: C64,
) -> impl Fn(&[Operator]) -> Result<CertifiedValue> + Send + Sync {
    move |args: &[Operator]| {
        let factors = s.factors(args)?;
        let v = s.engine.simplex_trace(&factors, 1.0, s.window)? * pre;
        let bound = s.holder_bound(&factors, pre);
        HOLDER_CHECKED.fetch_add(1, Ordering::SeqCst);
        if v.value.norm() > bound * (1.0 + 1e-12) + v.tail_bound {
            HOLDER_VIOLATED.fetch_add(1, Ordering::SeqCst);
        }
        Ok(v)
    }
}

fn transgression_component(
    s: Arc<Scaled>,
    pre: C64,
) -> impl Fn(&[Operator]) -> Result<CertifiedValue> + Send + Sync {
    move |args: &[Operator]| {
        let factors = s.factors(args)?;
        let mut total = CertifiedValue::zero();
        for l in 0..factors.len() {
            let mut with_d = factors.clone();
            with_d.insert(l + 1, s.dirac.clone());
            let v = s.engine.simplex_trace(&with_d, 1.0, s.window)?;
            total = total
                + if l % 2 == 0 {
                    v
                } else {
                    v * C64::new(-1.0, 0.0)
                };
        }
        Ok(total * pre)
    }
}

/// Component `k` of the JLO cochain of `eps D`.
pub fn jlo_cochain(t: &SpectralTriple, k: usize, eps: f64) -> Result<CyclicCochain> {
    jlo_cochain_windowed(t, k, eps, DEFAULT_WINDOW)
}

pub fn jlo_cochain_windowed(
    t: &SpectralTriple,
    k: usize,
    eps: f64,
    window: usize,
) -> Result<CyclicCochain> {
    check_parity(k, t.parity)?;
    let s = Arc::new(Scaled::new(t, eps, window)?);
    CyclicCochain::new(t.parity).with_component(k, jlo_component(s, prefactor(t.parity)))
}

/// All components of the JLO cochain of `eps D` up to `max_degree`.
pub fn jlo_entire_cochain(
    t: &SpectralTriple,
    eps: f64,
    max_degree: usize,
    window: usize,
) -> Result<CyclicCochain> {
    if max_degree > MAX_SIMPLEX_DEGREE {
        return Err(Error::DegreeTooLarge(max_degree));
    }
    let s = Arc::new(Scaled::new(t, eps, window)?);
    let pre = prefactor(t.parity);
    let mut c = CyclicCochain::new(t.parity);
    for k in (0..=max_degree).filter(|k| Parity::of_degree(*k) == t.parity) {
        c = c.with_component(k, jlo_component(s.clone(), pre))?;
    }
    Ok(c)
}

/// Component `k` of the transgression cochain of the path `eps -> eps D`.
pub fn transgression_cochain(t: &SpectralTriple, k: usize, eps: f64) -> Result<CyclicCochain> {
    transgression_cochain_windowed(t, k, eps, DEFAULT_WINDOW)
}

pub fn transgression_cochain_windowed(
    t: &SpectralTriple,
    k: usize,
    eps: f64,
    window: usize,
) -> Result<CyclicCochain> {
    if k + 1 > MAX_SIMPLEX_DEGREE {
        return Err(Error::DegreeTooLarge(k + 1));
    }
    check_parity(k, t.parity.flip())?;
    let s = Arc::new(Scaled::new(t, eps, window)?);
    CyclicCochain::new(t.parity.flip())
        .with_component(k, transgression_component(s, prefactor(t.parity)))
}

fn check_operator_inverse(u: &Operator, u_inv: &Operator) -> Result<()> {
    let one = u.identity_like();
    let d = u
        .compose(u_inv)?
        .distance(&one, 64)?
        .max(u_inv.compose(u)?.distance(&one, 64)?);
    if d > 1e-10 {
        return Err(Error::Singular(format!(
            "u_inv is not an inverse of u (defect {d:.3e})"
        )));
    }
    Ok(())
}

/// Majorant of the omitted terms `sum_{j >= 0} first * r_j` where the ratios
/// `r_j` are nonincreasing, given the first ratio.
fn geometric_tail(first: f64, ratio: f64) -> f64 {
    if first == 0.0 {
        0.0
    } else if ratio < 1.0 {
        first / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

/// Entire pairing `<Ch(eps D), Ch(u)>` over odd degrees up to [`ODD_DEGREE_CAP`].
/// The tail bound adds the Hölder majorants of the omitted degrees.
pub fn jlo_pairing_odd(
    t: &SpectralTriple,
    u: &Operator,
    u_inv: &Operator,
    eps: f64,
    window: usize,
) -> Result<CertifiedValue> {
    if t.parity != Parity::Odd {
        return Err(Error::ParityMismatch(
            "odd pairing on an even triple".into(),
        ));
    }
    check_operator_inverse(u, u_inv)?;
    let phi = jlo_entire_cochain(t, eps, ODD_DEGREE_CAP, window)?;
    let ch = chern_invertible_unnormalized::<BigRational>(
        &LabelMatrix::scalar("u"),
        &LabelMatrix::scalar("u^-1"),
        ODD_DEGREE_CAP,
    )
    .to_complex()
    .scale(&odd_prefactor());
    let resolve = |l: &str| match l {
        UNIT => Some(t.identity()),
        "u" => Some(u.clone()),
        "u^-1" => Some(u_inv.clone()),
        _ => None,
    };
    let v = pair(&phi, &ch, &resolve)?;
    // degree 2l+1 term: |odd pre| l! |sqrt(2i)| / (2l+1)! |u^-1| (|[D,u^-1]| |[D,u]|)^l |[D,u]| Tr e^{-eps^2 D^2}
    let s = Scaled::new(t, eps, window)?;
    let du = s.scaled.commutator(u)?.norm_bound(window);
    let dv = s.scaled.commutator(u_inv)?.norm_bound(window);
    let heat = s.engine.heat_trace(1.0, window);
    let base = odd_prefactor().norm()
        * 2f64.sqrt()
        * u_inv.norm_bound(window)
        * du
        * (heat.value.re + heat.tail_bound);
    let term = |l: usize| base * factorial(l) / factorial(2 * l + 1) * (du * dv).powi(l as i32);
    let l0 = ODD_DEGREE_CAP / 2 + 1;
    let ratio = (l0 + 1) as f64 / ((2 * l0 + 2) * (2 * l0 + 3)) as f64 * du * dv;
    Ok(CertifiedValue::new(
        v.value,
        v.tail_bound + geometric_tail(term(l0), ratio),
    ))
}

/// Entire pairing `<Ch(eps D), Ch(e)>` over even degrees up to [`EVEN_DEGREE_CAP`].
pub fn jlo_pairing_even(
    t: &SpectralTriple,
    e: &Operator,
    eps: f64,
    window: usize,
) -> Result<CertifiedValue> {
    if t.parity != Parity::Even {
        return Err(Error::ParityMismatch(
            "even pairing on an odd triple".into(),
        ));
    }
    let defect = e.compose(e)?.distance(e, 64)?;
    if defect > 1e-10 {
        return Err(Error::NotIdempotent(defect));
    }
    let phi = jlo_entire_cochain(t, eps, EVEN_DEGREE_CAP, window)?;
    let ch = chern_idempotent_unchecked::<BigRational>(&LabelMatrix::scalar("e"), EVEN_DEGREE_CAP)
        .to_complex();
    let resolve = |l: &str| match l {
        UNIT => Some(t.identity()),
        "e" => Some(e.clone()),
        _ => None,
    };
    let v = pair(&phi, &ch, &resolve)?;
    // degree 2l term: (2l)!/l! / (2l)! |gamma (e - 1/2)| |[D,e]|^{2l} Tr e^{-eps^2 D^2}
    let s = Scaled::new(t, eps, window)?;
    let de = s.scaled.commutator(e)?.norm_bound(window);
    let half = e.sub(&e.identity_like().scale(C64::new(0.5, 0.0)))?;
    let a0 = match &t.grading {
        Some(g) => g.compose(&half)?.norm_bound(window),
        None => half.norm_bound(window),
    };
    let heat = s.engine.heat_trace(1.0, window);
    let term =
        |l: usize| a0 * de.powi(2 * l as i32) / factorial(l) * (heat.value.re + heat.tail_bound);
    let l0 = EVEN_DEGREE_CAP / 2 + 1;
    let ratio = de * de / (l0 + 1) as f64;
    Ok(CertifiedValue::new(
        v.value,
        v.tail_bound + geometric_tail(term(l0), ratio),
    ))
}
