use crate::{FredholmModule, TraceKind};
use ncg_cyclic_complex::CyclicCochain;
use ncg_operator_core::{Error, Operator, Parity, Result, C64};
use std::sync::Arc;

/// All `(i_0, ..., i_{parts-1})` of nonnegative integers summing to `total`.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for i in 0..=total {
            prefix.push(i);
            rec(total - i, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `Gamma(n/2 + 1)` for integer `n`.
fn gamma_half_plus_one(n: usize) -> f64 {
    if n % 2 == 0 {
        factorial(n / 2)
    } else {
        // Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!) with m = (n + 1) / 2
        let m = (n + 1) / 2;
        factorial(2 * m) * std::f64::consts::PI.sqrt() / (4f64.powi(m as i32) * factorial(m))
    }
}

fn sqrt_2i() -> C64 {
    C64::new(0.0, 2.0).sqrt()
}

fn check_degree(m: &FredholmModule, n: usize) -> Result<()> {
    if Parity::of_degree(n) != m.parity {
        return Err(Error::ParityMismatch(format!("degree {n} for a {} module", m.parity.name())));
    }
    if (n as f64) <= m.p - 1.0 {
        return Err(Error::DegreeTooLow { degree: n, p: m.p });
    }
    Ok(())
}

/// `gamma a_0 X_0 [F, a_1] X_1 ... [F, a_k] X_k` with `X_j` given by `between(j)`.
fn word_operator(m: &FredholmModule, args: &[Operator], between: &dyn Fn(usize) -> Option<Operator>) -> Result<Operator> {
    let mut acc = match &m.grading {
        Some(g) => g.compose(&args[0])?,
        None => args[0].clone(),
    };
    if let Some(x) = between(0) {
        acc = acc.compose(&x)?;
    }
    for (j, a) in args.iter().enumerate().skip(1) {
        acc = acc.compose(&m.f.commutator(a)?)?;
        if let Some(x) = between(j) {
            acc = acc.compose(&x)?;
        }
    }
    Ok(acc)
}

/// Connes character `tau_n(F)`, a single component in degree `n` using `Tr'`.
pub fn character_tau(m: &FredholmModule, n: usize) -> Result<CyclicCochain> {
    check_degree(m, n)?;
    let pre = match m.parity {
        Parity::Even => C64::new(factorial(n / 2) / factorial(n), 0.0),
        Parity::Odd => sqrt_2i() * gamma_half_plus_one(n) / factorial(n),
    };
    let module = m.clone();
    CyclicCochain::new(m.parity).with_component(n, move |args: &[Operator]| {
        let t = word_operator(&module, args, &|_| None)?;
        Ok(module.trace_with(&t, TraceKind::Symmetrized)? * pre)
    })
}

/// Character `Ch_n(F)` with components `Ch^k_n`, `k = n mod 2, ..., n`, summing over
/// powers of the defect `1 - F^2`. Uses `Tr` for `n > p` and the extended `Tr'` otherwise.
pub fn character_chn(m: &FredholmModule, n: usize) -> Result<CyclicCochain> {
    check_degree(m, n)?;
    let kind = if (n as f64) > m.p { TraceKind::Plain } else { TraceKind::Extended };
    let mut powers = vec![m.identity()];
    for _ in 0..n / 2 {
        let next = powers.last().expect("nonempty").compose(m.defect())?;
        powers.push(next);
    }
    let powers = Arc::new(powers);
    let mut cochain = CyclicCochain::new(m.parity);
    let mut k = n % 2;
    while k <= n {
        let top = factorial((n + k) / 2);
        let pre = match m.parity {
            Parity::Even => C64::new(factorial(n / 2) / top, 0.0),
            Parity::Odd => sqrt_2i() * gamma_half_plus_one(n) / top,
        };
        let comps = compositions((n - k) / 2, k + 1);
        let (module, powers) = (m.clone(), powers.clone());
        cochain = cochain.with_component(k, move |args: &[Operator]| {
            let mut total = ncg_operator_core::CertifiedValue::zero();
            for c in &comps {
                let between = |j: usize| if c[j] == 0 { None } else { Some(powers[c[j]].clone()) };
                let t = word_operator(&module, args, &between)?;
                total = total + module.trace_with(&t, kind)?;
            }
            Ok(total * pre)
        })?;
        k += 2;
    }
    Ok(cochain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{bounded_transform, phase_module};
    use ncg_model_triples::build_circle_dirac;

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(2, 2).len(), 3);
        assert_eq!(compositions(0, 4), vec![vec![0, 0, 0, 0]]);
        assert_eq!(compositions(3, 3).len(), 10);
        assert!(compositions(2, 3).iter().all(|c| c.iter().sum::<usize>() == 2));
    }

    #[test]
    fn gamma_values() {
        assert!((gamma_half_plus_one(1) - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-15);
        assert!((gamma_half_plus_one(3) - 0.75 * std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half_plus_one(4), 2.0);
    }

    #[test]
    fn degree_checks() {
        let m = bounded_transform(&build_circle_dirac()).unwrap();
        assert!(matches!(character_tau(&m, 2), Err(Error::ParityMismatch(_))));
        assert!(character_chn(&m, 1).is_ok());
        let mut high = m.clone();
        high.p = 4.0;
        assert!(matches!(character_tau(&high, 1), Err(Error::DegreeTooLow { .. })));
    }

    #[test]
    fn identity_argument_is_killed() {
        let t = build_circle_dirac();
        let m = phase_module(&t).unwrap();
        let tau = character_tau(&m, 1).unwrap();
        let u = t.generator("U").unwrap().clone();
        let v = tau.evaluate(&[u, t.identity()]).unwrap();
        assert_eq!(v.value, C64::new(0.0, 0.0));
    }

    #[test]
    fn circle_tau_one_value() {
        let t = build_circle_dirac();
        let m = phase_module(&t).unwrap();
        let tau = character_tau(&m, 1).unwrap();
        let u = t.generator("U").unwrap().clone();
        let v = tau.evaluate(&[u.adjoint(), u]).unwrap();
        // sqrt(2i) Gamma(3/2) Tr(U*[F,U]) with the trace equal to 2
        let expected = sqrt_2i() * std::f64::consts::PI.sqrt();
        assert!((v.value - expected).norm() < 1e-12, "{v:?}");
    }
}
