//! Task execution.

use crate::config::{dense_from_rows, ElementSpec, JobConfig, Method, TaskConfig};
use crate::report::{ReportRow, Rounded};
use ncg_cyclic_complex::{
    boundary_B, boundary_b, chern_idempotent, chern_invertible_unnormalized, CyclicChain, CyclicCochain, LabelMatrix,
    LinComb, MonomialAlphabet,
};
use ncg_fredholm_character::{
    bounded_transform, index_pairing_even, index_pairing_odd, winding_number, EvenMethod, OddMethod, KAPPA,
};
use ncg_jlo::{densify, finite_part, jlo_entire_cochain, jlo_pairing_even, jlo_pairing_odd, transgression_cochain_windowed, AsymptoticSampleSet};
use ncg_model_triples::{multiplication_operator, validate_triple, SpectralTriple};
use ncg_operator_core::{
    operator_function, BandOperator, CertifiedValue, DenseOperator, Error, Operator, Parity, Result, ScalarFn, C64,
};
use ncg_zeta_local::{
    derivation, laurent_extract, local_pairing_even, local_pairing_odd, zeta_index, zeta_sampler, DerivationKind,
    LocalVariant,
};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

type Q = BigRational;

/// Degree cap of random chains in the cyclic identity suite.
const CHAIN_DEGREE: usize = 5;

/// Step of the central difference in the transgression suite.
const TRANSGRESSION_STEP: f64 = 1e-3;

/// Samples needed by the finite-part fit with no singular terms.
const FINITE_PART_SAMPLES: usize = 5;

/// One computed value before it becomes a row.
struct Outcome {
    suffix: Option<String>,
    k: Option<usize>,
    value: CertifiedValue,
}

impl Outcome {
    fn new(k: Option<usize>, value: CertifiedValue) -> Self {
        Self { suffix: None, k, value }
    }
}

fn odd_pair(model: &SpectralTriple, task: &TaskConfig) -> Result<(Operator, Operator)> {
    if let Some(s) = &task.symbol {
        return Ok((multiplication_operator(s)?, s.inverse_operator()?));
    }
    let name = task.generator.as_deref().ok_or_else(|| Error::InvalidArgument("no unitary given".into()))?;
    let u = model.resolve(name).ok_or_else(|| Error::UnboundLabel(name.into()))?;
    let inv = u.adjoint();
    Ok((u, inv))
}

fn even_element(model: &SpectralTriple, task: &TaskConfig) -> Result<Operator> {
    match &task.element {
        None => Ok(model.identity()),
        Some(ElementSpec::Name(n)) => model.resolve(n).ok_or_else(|| Error::UnboundLabel(n.clone())),
        Some(ElementSpec::Matrix(rows)) => Ok(dense_from_rows(rows).map_err(|e| Error::InvalidArgument(e.to_string()))?.into()),
    }
}

fn decreasing(eps: &[f64]) -> Vec<f64> {
    let mut v = eps.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v.dedup();
    v
}

fn jlo_finite_part(model: &SpectralTriple, task: &TaskConfig) -> Result<CertifiedValue> {
    let mut grid = decreasing(&task.eps);
    if grid.len() < FINITE_PART_SAMPLES {
        grid = densify(&grid, FINITE_PART_SAMPLES);
    }
    let values = match model.parity {
        Parity::Odd => {
            let (u, ui) = odd_pair(model, task)?;
            grid.par_iter().map(|&e| jlo_pairing_odd(model, &u, &ui, e, task.window)).collect::<Result<Vec<_>>>()?
        }
        Parity::Even => {
            let e = even_element(model, task)?;
            grid.par_iter().map(|&x| jlo_pairing_even(model, &e, x, task.window)).collect::<Result<Vec<_>>>()?
        }
    };
    let pf = finite_part(&AsymptoticSampleSet::new(grid, values, vec![])?)?.certified();
    Ok(match model.parity {
        Parity::Odd => pf * C64::new(1.0 / KAPPA, 0.0),
        Parity::Even => pf,
    })
}

fn random_chain(rng: &mut ChaCha8Rng) -> CyclicChain<Q> {
    let terms = (0..rng.gen_range(1..6)).map(|_| {
        let len = rng.gen_range(1..=CHAIN_DEGREE + 1);
        let word: Vec<String> = (0..len).map(|_| MonomialAlphabet::label(rng.gen_range(-2..=2))).collect();
        (Q::from_integer(rng.gen_range(-5i64..=5).into()), word)
    });
    CyclicChain::from_terms(terms.collect::<Vec<_>>())
}

fn cyclic_identities(task: &TaskConfig) -> Result<f64> {
    let m = MonomialAlphabet::new(16);
    let mut rng = ChaCha8Rng::seed_from_u64(task.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..task.count {
        let c = random_chain(&mut rng);
        let bb = boundary_b(&boundary_b(&c, &m)?, &m)?;
        let big = boundary_B(&boundary_B(&c));
        let mixed = boundary_b(&boundary_B(&c), &m)?.add(&boundary_B(&boundary_b(&c, &m)?));
        worst = worst.max(bb.max_coefficient()).max(big.max_coefficient()).max(mixed.max_coefficient());
    }
    Ok(worst)
}

/// `(b + B) Ch = 0` for `e = (1/2)[[1, U], [U*, 1]]` and `u = U^k`, through the degree cap.
fn chern_cycle(task: &TaskConfig) -> Result<f64> {
    let m = MonomialAlphabet::new(16);
    let cap = task.k.unwrap_or(CHAIN_DEGREE);
    let half = |l: &str| LinComb::from_terms([(Q::new(1.into(), 2.into()), l.to_string())]);
    let e = LabelMatrix::new(2, vec![half("1"), half("U^1"), half("U^-1"), half("1")])?;
    let even = chern_idempotent(&e, &m, cap + 1)?;
    let mut worst: f64 = 0.0;
    for l in (0..cap).step_by(2) {
        let r = boundary_b(&even.component(l + 2), &m)?.add(&boundary_B(&even.component(l)));
        worst = worst.max(r.max_coefficient());
    }
    for k in 1..=2 {
        let u = LabelMatrix::scalar(&MonomialAlphabet::label(k));
        let ui = LabelMatrix::scalar(&MonomialAlphabet::label(-k));
        let odd: CyclicChain<Q> = chern_invertible_unnormalized(&u, &ui, cap + 2);
        for l in (1..cap).step_by(2) {
            let r = boundary_b(&odd.component(l + 2), &m)?.add(&boundary_B(&odd.component(l)));
            worst = worst.max(r.max_coefficient());
        }
    }
    Ok(worst)
}

fn random_dense(rng: &mut ChaCha8Rng, n: usize) -> DenseOperator {
    let entries = (0..n * n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    DenseOperator::new(n, n, entries).expect("square entries")
}

/// Random word of algebra elements; even elements commute with the grading.
fn random_word(model: &SpectralTriple, rng: &mut ChaCha8Rng, len: usize) -> Result<Vec<Operator>> {
    (0..len)
        .map(|_| match (&model.dirac, &model.grading) {
            (Operator::Band(_), _) => Ok(BandOperator::shift(rng.gen_range(-2..=2)).into()),
            (Operator::Dense(_), Some(Operator::Dense(g))) => {
                let plus = (0..g.rows()).filter(|&i| g.entry(i, i).re > 0.0).count();
                Ok(random_dense(rng, plus).direct_sum(&random_dense(rng, g.rows() - plus)).into())
            }
            (Operator::Dense(d), _) => Ok(random_dense(rng, d.rows()).into()),
        })
        .collect()
}

fn default_degree(model: &SpectralTriple) -> usize {
    match model.parity {
        Parity::Odd => 1,
        Parity::Even => 0,
    }
}

fn jlo_cocycle(model: &SpectralTriple, task: &TaskConfig) -> Result<f64> {
    let k = task.k.unwrap_or_else(|| default_degree(model));
    let mut rng = ChaCha8Rng::seed_from_u64(task.seed);
    let mut worst: f64 = 0.0;
    for &eps in &task.eps {
        let d = jlo_entire_cochain(model, eps, k + 2, task.window)?.coboundary();
        for _ in 0..task.count {
            let word = random_word(model, &mut rng, k + 2)?;
            worst = worst.max(d.evaluate(&word)?.value.norm());
        }
    }
    Ok(worst)
}

fn transgression(model: &SpectralTriple, task: &TaskConfig) -> Result<f64> {
    let k = task.k.unwrap_or_else(|| default_degree(model));
    let h = TRANSGRESSION_STEP;
    let mut rng = ChaCha8Rng::seed_from_u64(task.seed);
    let mut worst: f64 = 0.0;
    for &eps in &task.eps {
        if eps <= h {
            return Err(Error::InvalidArgument(format!("eps {eps} is below the difference step {h}")));
        }
        let plus = jlo_entire_cochain(model, eps + h, k, task.window)?;
        let minus = jlo_entire_cochain(model, eps - h, k, task.window)?;
        let mut tg = CyclicCochain::new(model.parity.flip());
        if k >= 1 {
            tg = tg.add(&transgression_cochain_windowed(model, k - 1, eps, task.window)?)?;
        }
        tg = tg.add(&transgression_cochain_windowed(model, k + 1, eps, task.window)?)?;
        let rhs = tg.coboundary();
        for _ in 0..task.count {
            let word = random_word(model, &mut rng, k + 1)?;
            let diff = (plus.evaluate(&word)?.value - minus.evaluate(&word)?.value) / (2.0 * h);
            worst = worst.max((diff + rhs.evaluate(&word)?.value).norm());
        }
    }
    Ok(worst)
}

fn tau(model: &SpectralTriple, p: &Operator, j: i32) -> Result<CertifiedValue> {
    let m = zeta_sampler(p, model)?;
    Ok(laurent_extract(&m, m.order_at_zero().max(1) as usize)?.tau(j))
}

/// `tau_{-1}(P1 P2) - tau_{-1}(P2 P1) + tau_0(P2 L(P1))` for `P1 = U`, `P2 = U* sign D`.
fn trace_defect(model: &SpectralTriple) -> Result<CertifiedValue> {
    let p1: Operator = BandOperator::shift(1).into();
    let sign = operator_function(&model.dirac, &ScalarFn::sign(0.0))?;
    let p2 = p1.adjoint().compose(&sign)?;
    let l = derivation(&p1, &model.dirac, DerivationKind::Log)?;
    let a = tau(model, &p1.compose(&p2)?, -1)?;
    let b = tau(model, &p2.compose(&p1)?, -1)?;
    let c = tau(model, &p2.compose(&l)?, 0)?;
    Ok(a + b * C64::new(-1.0, 0.0) + c)
}

fn exact(x: f64) -> CertifiedValue {
    CertifiedValue::exact(C64::new(x, 0.0))
}

fn execute(model: &SpectralTriple, task: &TaskConfig) -> Result<Vec<Outcome>> {
    let variant = if task.raw_variant { LocalVariant::Raw } else { LocalVariant::Renormalized };
    let single = |k: Option<usize>, v: CertifiedValue| Ok(vec![Outcome::new(k, v)]);
    match task.method {
        Method::Winding => {
            let s = task.symbol.as_ref().ok_or_else(|| Error::InvalidArgument("no symbol".into()))?;
            single(None, exact(winding_number(s)? as f64))
        }
        Method::Direct | Method::Tau => {
            let m = bounded_transform(model)?.with_window(task.window);
            let n = task.k.unwrap_or(match model.parity {
                Parity::Odd => 1,
                Parity::Even => 2,
            });
            let k = (task.method == Method::Tau).then_some(n);
            let v = match model.parity {
                Parity::Odd => {
                    let (u, ui) = odd_pair(model, task)?;
                    let method = if task.method == Method::Tau { OddMethod::Tau(n) } else { OddMethod::Direct };
                    index_pairing_odd(&m, &u, &ui, method)?
                }
                Parity::Even => {
                    let e = even_element(model, task)?;
                    let method = if task.method == Method::Tau { EvenMethod::Tau(n) } else { EvenMethod::Direct };
                    index_pairing_even(&m, &e, method)?
                }
            };
            single(k, v)
        }
        Method::Jlo => single(None, jlo_finite_part(model, task)?),
        Method::Local => {
            let v = match model.parity {
                Parity::Odd => {
                    let (u, ui) = odd_pair(model, task)?;
                    local_pairing_odd(model, &u, &ui, variant, task.m_cap)?
                }
                Parity::Even => local_pairing_even(model, &even_element(model, task)?, variant, task.m_cap)?,
            };
            single(None, v)
        }
        Method::McKeanSinger => {
            let gamma = model.grading.as_ref().ok_or_else(|| Error::ParityMismatch("no grading".into()))?;
            task.t
                .iter()
                .map(|&t| {
                    let heat = operator_function(&model.dirac, &ScalarFn::heat(t))?;
                    let v = gamma.compose(&heat)?.trace(task.window)?;
                    Ok(Outcome { suffix: Some(format!("t={t}")), k: None, value: v })
                })
                .collect()
        }
        Method::ZetaIndex => task
            .s
            .iter()
            .map(|&s| {
                let v = zeta_index(model, C64::new(s, 0.0))?;
                Ok(Outcome { suffix: Some(format!("s={s}")), k: None, value: CertifiedValue::exact(v) })
            })
            .collect(),
        Method::CyclicIdentities => single(None, exact(cyclic_identities(task)?)),
        Method::ChernCycle => single(None, exact(chern_cycle(task)?)),
        Method::JloCocycle => {
            let k = task.k.unwrap_or_else(|| default_degree(model));
            single(Some(k), exact(jlo_cocycle(model, task)?))
        }
        Method::Transgression => {
            let k = task.k.unwrap_or_else(|| default_degree(model));
            single(Some(k), exact(transgression(model, task)?))
        }
        Method::TraceDefect => single(None, trace_defect(model)?),
        Method::Validate => {
            let failed = validate_triple(model).checks.iter().filter(|c| !c.passed).count();
            single(None, exact(failed as f64))
        }
    }
}

fn to_row(task: &TaskConfig, o: Outcome, seconds: f64) -> ReportRow {
    let v = o.value.value;
    let nearest = v.re.round();
    let defect = (v - C64::new(nearest, 0.0)).norm();
    let (rounded, passed) = if task.method.is_index() {
        let passed = match task.expected {
            Some(x) => (v - C64::new(x, 0.0)).norm() <= task.tolerance,
            None => defect <= task.tolerance,
        };
        (Rounded::Integer(nearest as i64), passed)
    } else {
        let target = task.expected.unwrap_or(0.0);
        (Rounded::NotApplicable, (v - C64::new(target, 0.0)).norm() <= task.tolerance)
    };
    let name = match o.suffix {
        Some(s) => format!("{}@{s}", task.id),
        None => task.id.clone(),
    };
    ReportRow {
        task: name,
        method: task.method.name().into(),
        k: o.k,
        re: v.re,
        im: v.im,
        tail_bound: o.value.tail_bound,
        rounded,
        defect,
        seconds,
        passed,
    }
}

/// Rows of one task; failures become a single error row.
pub fn run_task(model: &SpectralTriple, task: &TaskConfig) -> Vec<ReportRow> {
    let start = Instant::now();
    let result = execute(model, task);
    let seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(outcomes) => outcomes.into_iter().map(|o| to_row(task, o, seconds)).collect(),
        Err(e) => vec![ReportRow::failure(&task.id, task.method.name(), task.k, e.to_string(), seconds)],
    }
}

/// Runs every task, possibly concurrently; rows keep declaration order.
/// The exit code is 0 iff every row meets its tolerance.
pub fn run(job: &JobConfig, verbose: bool) -> (Vec<ReportRow>, i32) {
    let per_task: Vec<Vec<ReportRow>> = job
        .tasks
        .par_iter()
        .map(|t| {
            let rows = run_task(&job.model, t);
            if verbose {
                for r in &rows {
                    let status = if r.passed { "pass" } else { "FAIL" };
                    eprintln!("[{status}] {} {} = {} + {}i ({:.3}s)", r.task, r.method, r.re, r.im, r.seconds);
                }
            }
            rows
        })
        .collect();
    let rows: Vec<ReportRow> = per_task.into_iter().flatten().collect();
    let code = if rows.iter().all(|r| r.passed) { 0 } else { 1 };
    (rows, code)
}
