//! The local index cocycles `psi_k` (raw) and `psi'_k` (renormalized).

use crate::coefficients::{coefficient_c, compositions, gamma_laurent_at_zero, gamma_taylor, sigma_coefficients};
use crate::derivation::{derivation, DerivationKind};
use crate::laurent::{laurent_extract, LaurentData};
use crate::sampler::zeta_sampler;
use ncg_cyclic_complex::{chern_idempotent_unchecked, chern_invertible_unnormalized, odd_prefactor, pair, CyclicCochain, LabelMatrix, UNIT};
use ncg_model_triples::SpectralTriple;
use ncg_operator_core::{operator_function, CertifiedValue, Error, Operator, Parity, Result, ScalarFn, C64, KAPPA};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use std::sync::Arc;

/// Default bound on `m_1 + ... + m_k`.
pub const DEFAULT_M_CAP: u32 = 3;

/// Window used for the idempotent and inverse checks of the pairings.
const CHECK_WINDOW: i64 = 64;

/// Which form of the local cocycle to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LocalVariant {
    /// Taylor coefficients of `Gamma(s + k/2 + m)` against `tau_l`.
    Raw,
    /// `sigma_l` coefficients of the `Gamma(1/2) / Gamma(1/2 + s)` (odd) or
    /// `1 / Gamma(1 + s)` (even) renormalization.
    Renormalized,
}

impl LocalVariant {
    pub fn name(self) -> &'static str {
        match self {
            LocalVariant::Raw => "raw",
            LocalVariant::Renormalized => "renormalized",
        }
    }
}

/// One contribution `coefficient * tau_l(A_m)` before the parity prefactor.
#[derive(Clone, Debug)]
pub struct LocalTerm {
    pub k: usize,
    pub m: Vec<u32>,
    pub l: i32,
    pub coefficient: f64,
    pub tau: CertifiedValue,
}

/// `sqrt(2i) KAPPA` for odd cochains, 1 for even ones.
pub fn local_prefactor(parity: Parity) -> C64 {
    match parity {
        Parity::Odd => C64::new(0.0, 2.0).sqrt() * KAPPA,
        Parity::Even => C64::new(1.0, 0.0),
    }
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().expect("finite rational")
}

fn laurent_of(a: &Operator, t: &SpectralTriple) -> Result<LaurentData> {
    let sampler = zeta_sampler(a, t)?;
    laurent_extract(&sampler, sampler.order_at_zero().max(1) as usize)
}

/// Coefficients multiplying `tau_l` for `l = 0..q` in the `(k, m)` term.
fn gamma_weights(parity: Parity, k: usize, total: u32, variant: LocalVariant, q: usize) -> Result<Vec<f64>> {
    let twice = k as u32 + 2 * total;
    match variant {
        LocalVariant::Raw => gamma_taylor(twice, q),
        LocalVariant::Renormalized => {
            let (n, scale) = match parity {
                Parity::Odd => ((twice as usize - 1) / 2, std::f64::consts::PI.sqrt()),
                Parity::Even => (twice as usize / 2, 1.0),
            };
            let sigma = sigma_coefficients(n, parity);
            Ok((0..q).map(|l| sigma.get(l).map(|c| scale * to_f64(c)).unwrap_or(0.0)).collect())
        }
    }
}

/// All contributions to `psi_k(a_0, ..., a_k)` with `k = args.len() - 1`.
pub fn local_terms(t: &SpectralTriple, variant: LocalVariant, m_cap: u32, args: &[Operator]) -> Result<Vec<LocalTerm>> {
    if args.is_empty() {
        return Err(Error::InvalidArgument("a cochain needs at least one argument".into()));
    }
    let k = args.len() - 1;
    if Parity::of_degree(k) != t.parity {
        return Err(Error::ParityMismatch(format!("degree {k} on a {} triple", t.parity.name())));
    }
    let a0 = match (&t.grading, t.parity) {
        (Some(g), Parity::Even) => g.compose(&args[0])?,
        (None, Parity::Even) => return Err(Error::InvalidArgument("even triple without a grading".into())),
        _ => args[0].clone(),
    };
    if k == 0 {
        let data = laurent_of(&a0, t)?;
        let mut terms = vec![LocalTerm { k, m: vec![], l: -1, coefficient: 1.0, tau: data.tau(-1) }];
        if variant == LocalVariant::Raw {
            let g = gamma_laurent_at_zero(data.q())?;
            for (l, c) in g.into_iter().enumerate() {
                terms.push(LocalTerm { k, m: vec![], l: l as i32, coefficient: c, tau: data.tau(l as i32) });
            }
        }
        return Ok(terms);
    }
    // nabla^j([D, a_i]) for j <= m_cap
    let mut powers: Vec<Vec<Operator>> = Vec::with_capacity(k);
    for a in &args[1..] {
        let mut chain = vec![t.dirac.commutator(a)?];
        for _ in 0..m_cap {
            let next = derivation(chain.last().expect("nonempty"), &t.dirac, DerivationKind::Nabla)?;
            chain.push(next);
        }
        powers.push(chain);
    }
    let comps: Vec<Vec<u32>> = compositions(k, m_cap)
        .into_iter()
        .filter(|m| variant == LocalVariant::Raw || ((k as u32 + m.iter().sum::<u32>()) as f64) < t.p)
        .collect();
    let per_m: Vec<Vec<LocalTerm>> = comps
        .par_iter()
        .map(|m| -> Result<Vec<LocalTerm>> {
            let total: u32 = m.iter().sum();
            let c_m = coefficient_c(m);
            if c_m.is_zero() {
                return Ok(vec![]);
            }
            let weight = operator_function(&t.dirac, &ScalarFn::abs_power(-(k as i32) - 2 * total as i32))?;
            let mut factors: Vec<&Operator> = vec![&a0];
            for (i, &mi) in m.iter().enumerate() {
                factors.push(&powers[i][mi as usize]);
            }
            factors.push(&weight);
            let a = Operator::product(&factors)?;
            let data = laurent_of(&a, t)?;
            let weights = gamma_weights(t.parity, k, total, variant, data.q())?;
            let cm = to_f64(&c_m);
            Ok(weights
                .into_iter()
                .enumerate()
                .filter(|(_, w)| *w != 0.0)
                .map(|(l, w)| LocalTerm { k, m: m.clone(), l: l as i32, coefficient: cm * w, tau: data.tau(l as i32) })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_m.into_iter().flatten().collect())
}

/// `prefactor * sum coefficient * tau` with the propagated tail.
pub fn local_value(terms: &[LocalTerm], parity: Parity) -> CertifiedValue {
    let pre = local_prefactor(parity);
    terms.iter().map(|t| t.tau.scale(C64::new(t.coefficient, 0.0))).sum::<CertifiedValue>() * pre
}

/// The degree-`k` component of the local cocycle as a cochain.
pub fn local_cocycle(t: &SpectralTriple, k: usize, variant: LocalVariant, m_cap: u32) -> Result<CyclicCochain> {
    if Parity::of_degree(k) != t.parity {
        return Err(Error::ParityMismatch(format!("degree {k} on a {} triple", t.parity.name())));
    }
    let triple = Arc::new(t.clone());
    let parity = t.parity;
    CyclicCochain::new(parity).with_component(k, move |args: &[Operator]| {
        Ok(local_value(&local_terms(&triple, variant, m_cap, args)?, parity))
    })
}

/// Degrees whose local components can be nonzero: those not above `p`,
/// and always the lowest one.
pub fn local_degrees(parity: Parity, p: f64) -> Vec<usize> {
    let start = if parity == Parity::Odd { 1 } else { 0 };
    let mut out = vec![start];
    let mut k = start + 2;
    while (k as f64) <= p {
        out.push(k);
        k += 2;
    }
    out
}

fn local_cochain(t: &SpectralTriple, variant: LocalVariant, m_cap: u32) -> Result<(CyclicCochain, usize)> {
    let degrees = local_degrees(t.parity, t.p);
    let mut phi = CyclicCochain::new(t.parity);
    for &k in &degrees {
        phi = phi.add(&local_cocycle(t, k, variant, m_cap)?)?;
    }
    Ok((phi, *degrees.last().expect("nonempty")))
}

/// `<psi, Ch(u)>`, which equals the index because the prefactor carries `KAPPA`.
pub fn local_pairing_odd(
    t: &SpectralTriple,
    u: &Operator,
    u_inv: &Operator,
    variant: LocalVariant,
    m_cap: u32,
) -> Result<CertifiedValue> {
    if t.parity != Parity::Odd {
        return Err(Error::ParityMismatch("odd pairing on an even triple".into()));
    }
    let one = u.identity_like();
    let defect = u.compose(u_inv)?.distance(&one, CHECK_WINDOW)?.max(u_inv.compose(u)?.distance(&one, CHECK_WINDOW)?);
    if defect > 1e-10 {
        return Err(Error::Singular(format!("u_inv is not a two-sided inverse (defect {defect:.3e})")));
    }
    let (phi, cap) = local_cochain(t, variant, m_cap)?;
    let ch = chern_invertible_unnormalized::<BigRational>(&LabelMatrix::scalar("u"), &LabelMatrix::scalar("u^-1"), cap)
        .to_complex()
        .scale(&odd_prefactor());
    let resolve = |l: &str| match l {
        UNIT => Some(t.identity()),
        "u" => Some(u.clone()),
        "u^-1" => Some(u_inv.clone()),
        _ => None,
    };
    pair(&phi, &ch, &resolve)
}

/// `<psi, Ch(e)>` for an idempotent `e`.
pub fn local_pairing_even(t: &SpectralTriple, e: &Operator, variant: LocalVariant, m_cap: u32) -> Result<CertifiedValue> {
    if t.parity != Parity::Even {
        return Err(Error::ParityMismatch("even pairing on an odd triple".into()));
    }
    let defect = e.compose(e)?.distance(e, CHECK_WINDOW)?;
    if defect > 1e-10 {
        return Err(Error::NotIdempotent(defect));
    }
    let (phi, cap) = local_cochain(t, variant, m_cap)?;
    let ch = chern_idempotent_unchecked::<BigRational>(&LabelMatrix::scalar("e"), cap).to_complex();
    let resolve = |l: &str| match l {
        UNIT => Some(t.identity()),
        "e" => Some(e.clone()),
        _ => None,
    };
    pair(&phi, &ch, &resolve)
}

/// CSV with columns `k, m-tuple, l, coefficient, tau_value_re, tau_value_im, tail_bound`.
pub fn terms_csv(terms: &[LocalTerm]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "m-tuple", "l", "coefficient", "tau_value_re", "tau_value_im", "tail_bound"])
        .expect("in-memory write");
    for t in terms {
        let m = format!("({})", t.m.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
        w.write_record([
            t.k.to_string(),
            m,
            t.l.to_string(),
            format!("{:e}", t.coefficient),
            format!("{:e}", t.tau.value.re),
            format!("{:e}", t.tau.value.im),
            format!("{:e}", t.tau.tail_bound),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Laurent data as CSV rows with an empty `k` and `m-tuple` and unit coefficients.
pub fn laurent_csv(data: &LaurentData) -> String {
    let terms: Vec<LocalTerm> = (-1..data.q() as i32)
        .map(|l| LocalTerm { k: 0, m: vec![], l, coefficient: 1.0, tau: data.tau(l) })
        .collect();
    let text = terms_csv(&terms);
    let mut lines = text.lines();
    let mut out = format!("{}\n", lines.next().expect("header"));
    for line in lines {
        // drop the k and m-tuple fields
        let rest = line.splitn(3, ',').nth(2).expect("fields");
        out.push_str(&format!(",,{rest}\n"));
    }
    out
}
