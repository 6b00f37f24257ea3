//! Laurent functionals `tau_j` from `zeta_P(2z) = sum_j tau_j z^{-j-1} + O(|z|)`.

use crate::sampler::MeromorphicSampler;
use ncg_operator_core::{CertifiedValue, Error, Result, C64};
use rayon::prelude::*;

/// Trapezoid nodes on each contour.
pub const CONTOUR_POINTS: usize = 256;

/// Largest default contour radius in the `z` variable.
pub const MAX_RADIUS: f64 = 0.25;

/// Ratio between the primary and the consistency radius.
const SECOND_RADIUS: f64 = 0.7;

/// Relative tolerance of the two-radius consistency check.
pub const CONSISTENCY_TOL: f64 = 1e-6;

/// Taylor coefficients of the regular part kept for reconstruction.
const REGULAR_TERMS: usize = 48;

/// `tau_{q-1}, ..., tau_0, tau_{-1}` with the regular part on the contour.
#[derive(Clone, Debug)]
pub struct LaurentData {
    /// `taus[j + 1] = tau_j` for `j = -1..q-1`.
    taus: Vec<CertifiedValue>,
    /// Taylor coefficients `c_1, c_2, ...` of the regular part beyond `tau_{-1}`.
    regular: Vec<C64>,
    pub radius: f64,
    /// Max of `|zeta_P(2z) - sum_j tau_j z^{-j-1}|` on the contour.
    pub remainder_norm: f64,
}

impl LaurentData {
    pub fn q(&self) -> usize {
        self.taus.len() - 1
    }

    /// `tau_j`, zero beyond the extracted range.
    pub fn tau(&self, j: i32) -> CertifiedValue {
        usize::try_from(j + 1).ok().and_then(|i| self.taus.get(i).copied()).unwrap_or_else(CertifiedValue::zero)
    }

    /// Principal part plus truncated regular part at `z`.
    pub fn reconstruct(&self, z: C64) -> C64 {
        let mut v = C64::new(0.0, 0.0);
        for (i, t) in self.taus.iter().enumerate() {
            v += t.value * z.powi(-(i as i32));
        }
        let mut zk = z;
        for c in &self.regular {
            v += c * zk;
            zk *= z;
        }
        v
    }
}

struct Contour {
    taus: Vec<CertifiedValue>,
    higher: C64,
    regular: Vec<C64>,
    values: Vec<(C64, C64)>,
}

fn contour(m: &MeromorphicSampler, q: usize, r: f64) -> Result<Contour> {
    let n = CONTOUR_POINTS;
    let nodes: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let samples: Vec<CertifiedValue> = nodes.par_iter().map(|z| m.evaluate(*z * 2.0)).collect::<Result<_>>()?;
    let max_tail = samples.iter().map(|v| v.tail_bound).fold(0.0, f64::max);
    // coefficient of z^p is (1/N) sum g(z_k) z_k^{-p}
    let coefficient = |p: i32| -> C64 {
        let s: C64 = nodes.iter().zip(&samples).map(|(z, g)| g.value * z.powi(-p)).sum();
        s / n as f64
    };
    let taus = (0..=q)
        .map(|i| {
            // tau_j with j = i - 1 multiplies z^{-i}
            let p = -(i as i32);
            CertifiedValue::new(coefficient(p), max_tail * r.powi(-p))
        })
        .collect();
    let higher = coefficient(-(q as i32) - 1);
    let regular = (1..=REGULAR_TERMS as i32).map(coefficient).collect();
    let values = nodes.into_iter().zip(samples.into_iter().map(|v| v.value)).collect();
    Ok(Contour { taus, higher, regular, values })
}

/// Extracts `tau_{-1}..tau_{q-1}` on the default radius.
pub fn laurent_extract(m: &MeromorphicSampler, q: usize) -> Result<LaurentData> {
    laurent_extract_with(m, q, None)
}

/// Extracts `tau_{-1}..tau_{q-1}`; the radius defaults to
/// `min(0.25, half the distance to the nearest other singularity)` in `z`.
pub fn laurent_extract_with(m: &MeromorphicSampler, q: usize, radius: Option<f64>) -> Result<LaurentData> {
    if q < m.order_at_zero() as usize {
        return Err(Error::InvalidArgument(format!(
            "q = {q} is below the declared pole order {}",
            m.order_at_zero()
        )));
    }
    // singularities of zeta_P(2z) sit at half the s-plane distance
    let limit = 0.5 * m.pole_distance().min(m.r0());
    let r = radius.unwrap_or_else(|| MAX_RADIUS.min(0.5 * limit));
    if !(r > 0.0) || r >= limit {
        return Err(Error::InvalidArgument(format!("contour radius {r} reaches a singularity at {limit}")));
    }
    let main = contour(m, q, r)?;
    let check = contour(m, q, SECOND_RADIUS * r)?;
    let scale = main.taus.iter().map(|t| t.value.norm()).fold(1.0, f64::max);
    let mut discrepancy: f64 = (main.higher.norm() * r.powi(q as i32 + 1)).max(check.higher.norm() * (SECOND_RADIUS * r).powi(q as i32 + 1));
    for (a, b) in main.taus.iter().zip(&check.taus) {
        discrepancy = discrepancy.max((a.value - b.value).norm());
    }
    if discrepancy > CONSISTENCY_TOL * scale {
        return Err(Error::PoleMisdeclared(discrepancy / scale));
    }
    let taus: Vec<CertifiedValue> = main
        .taus
        .iter()
        .zip(&check.taus)
        .map(|(a, b)| CertifiedValue::new(a.value, a.tail_bound.max(b.tail_bound) + (a.value - b.value).norm()))
        .collect();
    let remainder_norm = main
        .values
        .iter()
        .map(|(z, g)| {
            let principal: C64 = taus.iter().enumerate().map(|(i, t)| t.value * z.powi(-(i as i32))).sum();
            (g - principal).norm()
        })
        .fold(0.0, f64::max);
    Ok(LaurentData { taus, regular: main.regular, radius: r, remainder_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::Pole;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn sampler(f: impl Fn(C64) -> C64 + Send + Sync + 'static, poles: Vec<Pole>) -> MeromorphicSampler {
        let q = poles.iter().map(|p| p.order).max().unwrap_or(0);
        MeromorphicSampler::new(move |s| Ok(CertifiedValue::exact(f(s))), poles, q, 1.0, f64::INFINITY)
    }

    #[test]
    fn simple_pole_in_z() {
        // m(s) = 2/s, so m(2z) = 1/z
        let m = sampler(|s| 2.0 / s, vec![Pole { at: 0.0, order: 1, residue: re(2.0) }]);
        let l = laurent_extract(&m, 1).unwrap();
        assert!((l.tau(0).value - re(1.0)).norm() < 1e-14);
        assert!(l.tau(-1).value.norm() < 1e-14);
        assert!(l.remainder_norm < 1e-14);
    }

    #[test]
    fn entire_sampler() {
        let m = sampler(|s| (s * 0.5).exp() + 3.0, vec![]);
        let l = laurent_extract(&m, 2).unwrap();
        assert!((l.tau(-1).value - re(4.0)).norm() < 1e-13);
        assert!(l.tau(0).value.norm() < 1e-14);
        assert!(l.tau(1).value.norm() < 1e-14);
        let z = C64::from_polar(0.2, 0.7);
        assert!((l.reconstruct(z) - m.evaluate(z * 2.0).unwrap().value).norm() < 1e-12);
    }

    #[test]
    fn undeclared_pole_is_detected() {
        // z = 0.2 lies between the two contour radii
        let m = sampler(|s| 1.0 / (s - 0.4), vec![]);
        assert!(matches!(laurent_extract(&m, 1), Err(Error::PoleMisdeclared(_))));
        // a double pole at 0 declared as simple
        let m = sampler(|s| 4.0 / (s * s), vec![Pole { at: 0.0, order: 1, residue: re(0.0) }]);
        assert!(matches!(laurent_extract(&m, 1), Err(Error::PoleMisdeclared(_))));
        let l = laurent_extract(&m, 2).unwrap();
        assert!((l.tau(1).value - re(1.0)).norm() < 1e-13);
    }

    #[test]
    fn radius_respects_other_poles() {
        let m = sampler(|s| 1.0 / (s - 0.4), vec![Pole { at: 0.4, order: 1, residue: re(1.0) }]);
        let l = laurent_extract(&m, 1).unwrap();
        assert!((l.radius - 0.1).abs() < 1e-15);
        assert!((l.tau(-1).value + re(2.5)).norm() < 1e-12);
    }
}
