use crate::SpectralTriple;
use ncg_operator_core::{Operator, Parity};

/// Outcome of one invariant check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub defect: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: impl Into<String>, defect: f64, tol: f64) {
        self.checks.push(Check { name: name.into(), passed: defect <= tol, defect });
    }
}

const WINDOW: i64 = 64;
const TOL: f64 = 1e-10;

/// Size of an operator expression: operator norm on dense, window sup on the lattice.
fn size(op: &Operator) -> f64 {
    match op {
        Operator::Dense(d) => d.operator_norm(),
        Operator::Band(b) => {
            let zero = b.scale(num_complex::Complex64::new(0.0, 0.0));
            Operator::Band(b.clone()).distance(&Operator::Band(zero), WINDOW).unwrap_or(f64::INFINITY)
        }
    }
}

/// Sup of the entries of a lattice operator over `|n| <= w`.
fn window_sup(op: &Operator, w: i64) -> f64 {
    match op {
        Operator::Dense(d) => d.max_abs(),
        Operator::Band(b) => b
            .diagonals()
            .map(|(_, d)| (-w..=w).map(|n| d.at(n).norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max),
    }
}

fn measured(r: ncg_operator_core::Result<Operator>) -> f64 {
    r.map(|op| size(&op)).unwrap_or(f64::INFINITY)
}

/// Checks every structural invariant of the triple, reporting rather than failing.
pub fn validate_triple(t: &SpectralTriple) -> ValidationReport {
    let mut report = ValidationReport::default();
    let d = &t.dirac;
    let self_adjoint = measured(d.sub(&d.adjoint()));
    report.push("D self-adjoint", self_adjoint, TOL * (1.0 + window_sup(d, WINDOW)));

    if t.parity == Parity::Even {
        match &t.grading {
            None => report.push("grading present", f64::INFINITY, 0.0),
            Some(g) => {
                let one = g.identity_like();
                report.push("grading squares to 1", measured(g.compose(g).and_then(|x| x.sub(&one))), TOL);
                report.push("grading anticommutes with D", measured(g.anticommutator(d)), TOL * (1.0 + size(d)));
                let worst = t
                    .generators()
                    .map(|(_, a)| measured(g.commutator(a)))
                    .fold(0.0, f64::max);
                report.push("generators are even", worst, TOL);
            }
        }
    }

    let mut worst_growth: f64 = 0.0;
    let mut worst_size: f64 = 0.0;
    for (_, a) in t.generators() {
        let Ok(c) = d.commutator(a) else {
            worst_growth = f64::INFINITY;
            continue;
        };
        match &c {
            Operator::Dense(m) => worst_size = worst_size.max(m.operator_norm()),
            Operator::Band(b) => {
                let small = window_sup(&c, WINDOW);
                let large = window_sup(&c, 4 * WINDOW);
                worst_size = worst_size.max(large);
                let declared_growth = b
                    .diagonals()
                    .filter_map(|(_, diag)| diag.asymptotics().map(|a| a.growth()))
                    .any(|(m, g)| m > 0.0 && g > 0.0);
                if declared_growth || large > 2.0 * small + TOL {
                    worst_growth = worst_growth.max(large);
                }
            }
        }
    }
    report.checks.push(Check {
        name: "bounded commutators".into(),
        passed: worst_growth == 0.0,
        defect: if worst_growth > 0.0 { worst_growth } else { worst_size },
    });
    report
}
