use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::state::{ReducedState, SkewMatrix};

pub const THRESHOLD_TOL: f64 = 1e-12;
const X_LIMIT: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Bounded,
    Unbounded,
    Threshold,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Bounded => "Bounded",
            Verdict::Unbounded => "Unbounded",
            Verdict::Threshold => "Threshold",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarClassification {
    pub verdict: Verdict,
    pub m: f64,
    pub n_coupling: f64,
    /// `(x₋, x₊)` with `V_eff(x±) = E` for a bounded orbit of energy `E`.
    pub turning_points: Option<(f64, f64)>,
}

/// `V_eff(x) = m²/(16A sh²(x/2)) − n²/(16A ch²(x/2))`.
pub fn planar_effective_potential(m: f64, n_coupling: f64, a_const: f64, x: f64) -> Result<f64> {
    if a_const == 0.0 || !a_const.is_finite() {
        return Err(Error::Domain("A must be non-zero and finite".into()));
    }
    let sh = (0.5 * x).sinh();
    let repulsive = if m == 0.0 {
        0.0
    } else if sh.abs() < 1e-12 {
        return Err(Error::DegenerateInertia("x = 0 with m ≠ 0".into()));
    } else {
        m * m / (sh * sh)
    };
    let ch = (0.5 * x).cosh();
    Ok((repulsive - n_coupling * n_coupling / (ch * ch)) / (16.0 * a_const))
}

fn verdict(m: f64, n_coupling: f64) -> Verdict {
    let (am, an) = (m.abs(), n_coupling.abs());
    if (am - an).abs() <= THRESHOLD_TOL {
        Verdict::Threshold
    } else if am < an {
        Verdict::Bounded
    } else {
        Verdict::Unbounded
    }
}

pub fn classify_planar(m: f64, n_coupling: f64) -> PlanarClassification {
    PlanarClassification { verdict: verdict(m, n_coupling), m, n_coupling, turning_points: None }
}

/// Minimiser `x > 0` of the effective potential for a bounded pair `|m| < |n|`.
pub fn planar_minimum(m: f64, n_coupling: f64) -> Result<f64> {
    if verdict(m, n_coupling) != Verdict::Bounded {
        return Err(Error::Domain("no potential well unless |m| < |n|".into()));
    }
    Ok(2.0 * (m.abs() / n_coupling.abs()).sqrt().atanh())
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut f_lo = f(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = f(mid)?;
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Classification plus turning points on `x > 0` (or `±x_t` when `m = 0`) for a bounded orbit
/// of energy `E` with `min V_eff < E < 0`.
pub fn classify_planar_with_energy(
    m: f64,
    n_coupling: f64,
    a_const: f64,
    energy: f64,
) -> Result<PlanarClassification> {
    let mut c = classify_planar(m, n_coupling);
    if c.verdict != Verdict::Bounded {
        return Ok(c);
    }
    if !(a_const > 0.0) {
        return Err(Error::Domain("turning points need A > 0".into()));
    }
    let x_min = planar_minimum(m, n_coupling)?;
    let v_min = planar_effective_potential(m, n_coupling, a_const, x_min)?;
    if !(energy > v_min && energy < 0.0) {
        return Err(Error::Domain(format!("bounded orbit needs {v_min} < E < 0, got {energy}")));
    }
    let g = |x: f64| planar_effective_potential(m, n_coupling, a_const, x).map(|v| v - energy);
    let mut x_max = (2.0 * x_min).max(1.0);
    while g(x_max)? < 0.0 {
        x_max *= 2.0;
        if x_max > X_LIMIT {
            return Err(Error::ConvergenceFailure("no outer turning point below x = 1e3".into()));
        }
    }
    let outer = bisect(g, x_min, x_max)?;
    let inner = if m == 0.0 {
        -outer
    } else {
        // V_eff → +∞ as x → 0⁺
        let mut lo = 0.5 * x_min;
        while g(lo)? < 0.0 {
            lo *= 0.5;
        }
        bisect(g, lo, x_min)?
    };
    c.turning_points = Some((inner, outer));
    Ok(c)
}

/// Period of the bounded relative motion. With `ẋ = 2 sqrt((E − V_eff)/A)` this is
/// `T = ∫ sqrt(A/(E − V_eff)) dx` between the turning points, evaluated with `x = c + h sin θ`.
pub fn planar_period(m: f64, n_coupling: f64, a_const: f64, energy: f64) -> Result<f64> {
    let c = classify_planar_with_energy(m, n_coupling, a_const, energy)?;
    let Some((x0, x1)) = c.turning_points else {
        return Err(Error::Domain("period is defined for bounded orbits only".into()));
    };
    let centre = 0.5 * (x0 + x1);
    let half = 0.5 * (x1 - x0);
    let nodes = 4000;
    let dth = std::f64::consts::PI / nodes as f64;
    let mut sum = 0.0;
    for k in 0..nodes {
        let th = -0.5 * std::f64::consts::PI + (k as f64 + 0.5) * dth;
        let x = centre + half * th.sin();
        let gap = energy - planar_effective_potential(m, n_coupling, a_const, x)?;
        if gap > 0.0 {
            sum += half * th.cos() * (a_const / gap).sqrt() * dth;
        }
    }
    Ok(sum)
}

/// Two-body reduced state with `q¹ − q² = x`, `p = (pₓ, −pₓ)`, `M¹₂ = m`, `N¹₂ = n`.
/// For AffAff its energy is `pₓ²/A + V_eff(x)`.
pub fn planar_state(x: f64, p_x: f64, m: f64, n_coupling: f64) -> ReducedState {
    let mm = SkewMatrix::from_upper(2, vec![m]).expect("one pair");
    let nn = SkewMatrix::from_upper(2, vec![n_coupling]).expect("one pair");
    ReducedState { q: vec![0.5 * x, -0.5 * x], p: vec![p_x, -p_x], m: mm, n: nn }
}

/// Relative coordinate `q¹ − q²` of a two-body state.
pub fn relative_coordinate(state: &ReducedState) -> f64 {
    state.q[0] - state.q[1]
}

/// Planar constants `(m, n)` read off a two-body AffAff-type state.
pub fn planar_couplings(state: &ReducedState) -> Result<(f64, f64)> {
    if state.dim() != 2 {
        return Err(Error::ShapeMismatch("planar couplings need n = 2".into()));
    }
    Ok((state.m.get(0, 1), state.n.get(0, 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::hamiltonian::hamiltonian;
    use crate::phase::model::ModelSpec;
    use crate::phase::potential::PotentialSpec;
    use proptest::prelude::*;

    #[test]
    fn zero_couplings_vanish() {
        for x in [-3.0, 0.0, 0.5, 10.0] {
            assert_eq!(planar_effective_potential(0.0, 0.0, 1.0, x).unwrap(), 0.0);
        }
    }

    #[test]
    fn unit_value() {
        let v = planar_effective_potential(4.0, 0.0, 1.0, 2.0 * 1f64.asinh()).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coincidence_is_degenerate() {
        assert!(matches!(planar_effective_potential(1.0, 2.0, 1.0, 0.0), Err(Error::DegenerateInertia(_))));
        assert!(planar_effective_potential(0.0, 2.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn verdicts() {
        assert_eq!(classify_planar(1.0, 2.0).verdict, Verdict::Bounded);
        assert_eq!(classify_planar(2.0, 1.0).verdict, Verdict::Unbounded);
        assert_eq!(classify_planar(1.0, 1.0).verdict, Verdict::Threshold);
        assert_eq!(classify_planar(-1.0, 1.0 + 1e-13).verdict, Verdict::Threshold);
    }

    #[test]
    fn minimum_is_stationary() {
        let (m, n, a) = (1.0, 2.0, 1.3);
        let x = planar_minimum(m, n).unwrap();
        let h = 1e-5;
        let d = (planar_effective_potential(m, n, a, x + h).unwrap()
            - planar_effective_potential(m, n, a, x - h).unwrap())
            / (2.0 * h);
        assert!(d.abs() < 1e-9);
    }

    #[test]
    fn turning_points_hit_the_energy() {
        let (m, n, a) = (0.5, 2.0, 1.0);
        let x = planar_minimum(m, n).unwrap();
        let e = 0.5 * planar_effective_potential(m, n, a, x).unwrap();
        let c = classify_planar_with_energy(m, n, a, e).unwrap();
        let (lo, hi) = c.turning_points.unwrap();
        assert!(lo < x && x < hi);
        for t in [lo, hi] {
            assert!((planar_effective_potential(m, n, a, t).unwrap() - e).abs() < 1e-12);
        }
        let c0 = classify_planar_with_energy(0.0, n, a, -0.05).unwrap();
        let (lo, hi) = c0.turning_points.unwrap();
        assert_eq!(lo, -hi);
    }

    #[test]
    fn small_oscillation_period() {
        // harmonic limit: T = 2π sqrt(μ/V''), with reduced mass A/2 for the relative coordinate
        let (m, n, a) = (1.0, 2.0, 1.0);
        let x = planar_minimum(m, n).unwrap();
        let v = |y: f64| planar_effective_potential(m, n, a, y).unwrap();
        let h = 1e-4;
        let curv = (v(x + h) - 2.0 * v(x) + v(x - h)) / (h * h);
        let e = v(x) + 1e-8;
        let period = planar_period(m, n, a, e).unwrap();
        let expected = 2.0 * std::f64::consts::PI * (0.5 * a / curv).sqrt();
        assert!((period - expected).abs() / expected < 1e-3, "{period} vs {expected}");
    }

    #[test]
    fn aff_aff_hamiltonian_reduces_to_effective_potential() {
        let model = ModelSpec::aff_aff(1.7, 0.3);
        for x in [0.3, 1.0, 2.5] {
            let s = planar_state(x, 0.0, 0.7, 1.9);
            let h = hamiltonian(&model, &PotentialSpec::none(), &s).unwrap();
            let v = planar_effective_potential(0.7, 1.9, 1.7, x).unwrap();
            assert!((h - v).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn even_in_x(m in -3.0..3.0f64, n in -3.0..3.0f64, a in 0.1..5.0f64, x in 0.01..6.0f64) {
            let l = planar_effective_potential(m, n, a, x).unwrap();
            let r = planar_effective_potential(m, n, a, -x).unwrap();
            prop_assert!((l - r).abs() <= 1e-14 * (1.0 + l.abs()));
        }
    }
}
