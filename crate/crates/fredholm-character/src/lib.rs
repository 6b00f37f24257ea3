//! Fredholm modules from spectral triples, Connes characters `tau_n` and
//! `Ch_n(F)`, index pairings, and the winding and kernel-count oracles.

mod character;
mod pairing;

pub use character::{character_chn, character_tau, compositions};
pub use pairing::{
    direct_index_even, direct_index_odd, index_pairing_even, index_pairing_odd, winding_number, EvenMethod, OddMethod,
};

use ncg_model_triples::{build_circle_dirac, SpectralTriple};
use ncg_operator_core::{
    operator_function, CertifiedValue, Error, Operator, Parity, Result, ScalarFn, C64,
};

pub use ncg_operator_core::KAPPA;

/// Window used for traces on the lattice unless a module overrides it.
pub const DEFAULT_WINDOW: usize = 256;

/// Which trace a character component uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceKind {
    /// `Tr T`.
    Plain,
    /// `1/2 Tr F(FT + TF)`.
    Symmetrized,
    /// `1/2 Tr F(FT + TF) + Tr (1 - F^2) T`.
    Extended,
}

/// Bounded Fredholm module `(H, F, gamma)` with its defect `1 - F^2`.
#[derive(Clone, Debug)]
pub struct FredholmModule {
    pub f: Operator,
    pub grading: Option<Operator>,
    pub parity: Parity,
    pub p: f64,
    defect: Operator,
    pub window: usize,
}

impl FredholmModule {
    /// Checks `F = F*` and computes `1 - F^2`.
    pub fn new(f: Operator, grading: Option<Operator>, parity: Parity, p: f64) -> Result<Self> {
        let sa = f.distance(&f.adjoint(), 64)?;
        if sa > 1e-10 {
            return Err(Error::NotHermitian(sa));
        }
        let defect = f.identity_like().sub(&f.compose(&f)?)?;
        Self::with_defect(f, grading, parity, p, defect)
    }

    fn with_defect(f: Operator, grading: Option<Operator>, parity: Parity, p: f64, defect: Operator) -> Result<Self> {
        if (parity == Parity::Even) != grading.is_some() {
            return Err(Error::ParityMismatch("grading must be present exactly for even modules".into()));
        }
        Ok(Self { f, grading, parity, p, defect, window: DEFAULT_WINDOW })
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }

    /// `1 - F^2`.
    pub fn defect(&self) -> &Operator {
        &self.defect
    }

    pub fn identity(&self) -> Operator {
        self.f.identity_like()
    }

    /// `Tr T`, `Tr'(T)` or the extended `Tr'(T)`.
    pub fn trace_with(&self, t: &Operator, kind: TraceKind) -> Result<CertifiedValue> {
        match kind {
            TraceKind::Plain => t.trace(self.window),
            TraceKind::Symmetrized | TraceKind::Extended => {
                let anti = self.f.compose(t)?.add(&t.compose(&self.f)?)?;
                let sym = self.f.compose(&anti)?.scale(C64::new(0.5, 0.0));
                let total = if kind == TraceKind::Extended { sym.add(&self.defect.compose(t)?)? } else { sym };
                total.trace(self.window)
            }
        }
    }

    /// `Tr'(T) = 1/2 Tr F(FT + TF)`, plus `Tr (1 - F^2) T` when `extended`.
    pub fn trace_prime(&self, t: &Operator, extended: bool) -> Result<CertifiedValue> {
        self.trace_with(t, if extended { TraceKind::Extended } else { TraceKind::Symmetrized })
    }
}

/// `F = D (1 + D^2)^{-1/2}` with defect `(1 + D^2)^{-1}`.
pub fn bounded_transform(t: &SpectralTriple) -> Result<FredholmModule> {
    let f = operator_function(&t.dirac, &ScalarFn::bounded_transform())?;
    let defect = operator_function(&t.dirac, &ScalarFn::defect())?;
    FredholmModule::with_defect(f, t.grading.clone(), t.parity, t.p, defect)
}

/// Odd module with `F = sign(D)`, `sign(0) = +1`, so that `F^2 = 1`.
pub fn phase_module(t: &SpectralTriple) -> Result<FredholmModule> {
    if t.parity != Parity::Odd {
        return Err(Error::ParityMismatch("the phase of D is only an involution without a grading".into()));
    }
    let f = operator_function(&t.dirac, &ScalarFn::sign(1.0))?;
    let defect = f.zero_like();
    FredholmModule::with_defect(f, None, Parity::Odd, t.p, defect)
}

/// `-<tau_1(sign D), Ch(U)>` on the circle, which fixes [`KAPPA`].
pub fn calibrate_kappa() -> Result<f64> {
    let t = build_circle_dirac();
    let m = phase_module(&t)?;
    let u = t.generator("U").expect("circle generator").clone();
    let v = index_pairing_odd(&m, &u, &u.adjoint(), OddMethod::Tau(1))?;
    // index_pairing_odd already divides by KAPPA
    Ok(-(v.value.re * KAPPA))
}
