use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::phase::legendre::DEGENERACY_TOL;
use crate::phase::model::{Coefficients, ModelKind, ModelSpec};
use crate::phase::potential::PotentialSpec;
use crate::phase::state::{pair_index, pairs, ReducedState, SkewMatrix};

/// Partial derivatives of a function of `(q, p, M, N)`; `dm`, `dn` are taken
/// with respect to the strictly-upper entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub dq: Vec<f64>,
    pub dp: Vec<f64>,
    pub dm: Vec<f64>,
    pub dn: Vec<f64>,
}

impl Gradient {
    pub fn zeros(n: usize) -> Self {
        let k = crate::phase::state::pair_count(n);
        Self { dq: vec![0.0; n], dp: vec![0.0; n], dm: vec![0.0; k], dn: vec![0.0; k] }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut g = Vec::with_capacity(2 * self.dq.len() + 2 * self.dm.len());
        g.extend_from_slice(&self.dq);
        g.extend_from_slice(&self.dp);
        g.extend_from_slice(&self.dm);
        g.extend_from_slice(&self.dn);
        g
    }

    /// `∂H/∂ρ̂ = −∂H/∂M + ∂H/∂N`, i.e. `χ̂`.
    pub fn d_rho(&self) -> SkewMatrix {
        let n = self.dq.len();
        let upper = self.dm.iter().zip(&self.dn).map(|(m, nn)| nn - m).collect();
        SkewMatrix::from_upper(n, upper).expect("gradient sizes are consistent")
    }

    /// `∂H/∂τ̂ = −∂H/∂M − ∂H/∂N`, i.e. `ϑ̂`.
    pub fn d_tau(&self) -> SkewMatrix {
        let n = self.dq.len();
        let upper = self.dm.iter().zip(&self.dn).map(|(m, nn)| -m - nn).collect();
        SkewMatrix::from_upper(n, upper).expect("gradient sizes are consistent")
    }
}

/// Maps an angle to `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

fn in_circle_range(x: f64) -> bool {
    x > -PI && x <= PI
}

fn degenerate(a: usize, b: usize, what: &str) -> Error {
    Error::DegenerateInertia(format!(
        "invariants {} and {} coincide with nonzero {what} coupling",
        a + 1,
        b + 1
    ))
}

/// Per-pair coupling profile: value factors `f(x)`, `g(x)` and derivatives, with
/// the pair energy `(κ_C/8)(M² f − N² g)`.
struct Profile {
    f: f64,
    df: f64,
    g: f64,
    dg: f64,
}

fn hyperbolic_profile(x: f64, m: f64, a: usize, b: usize) -> Result<Profile> {
    let h = 0.5 * x;
    let (f, df) = if m == 0.0 {
        (0.0, 0.0)
    } else if x.abs() < DEGENERACY_TOL {
        return Err(degenerate(a, b, "M"));
    } else {
        let sh = h.sinh();
        (1.0 / (sh * sh), -h.cosh() / (sh * sh * sh))
    };
    let ch = h.cosh();
    Ok(Profile { f, df, g: 1.0 / (ch * ch), dg: -h.sinh() / (ch * ch * ch) })
}

fn trig_profile(x: f64, m: f64, nn: f64, a: usize, b: usize) -> Result<Profile> {
    let w = wrap_angle(x);
    let h = 0.5 * w;
    let (f, df) = if m == 0.0 {
        (0.0, 0.0)
    } else if w.abs() < DEGENERACY_TOL {
        return Err(degenerate(a, b, "M"));
    } else {
        let s = h.sin();
        (1.0 / (s * s), -h.cos() / (s * s * s))
    };
    // the N term enters with a positive sign; g is stored negated
    let (g, dg) = if nn == 0.0 {
        (0.0, 0.0)
    } else if (PI - w.abs()) < DEGENERACY_TOL {
        return Err(degenerate(a, b, "N"));
    } else {
        let c = h.cos();
        (-1.0 / (c * c), -h.sin() / (c * c * c))
    };
    Ok(Profile { f, df, g, dg })
}

fn check_trig_domain(state: &ReducedState) -> Result<()> {
    if let Some(bad) = state.q.iter().find(|x| !in_circle_range(**x)) {
        return Err(Error::Domain(format!(
            "trigonometric invariant {bad} outside (−π, π]"
        )));
    }
    Ok(())
}

/// Kinetic energy and its gradient, without any potential.
pub fn kinetic_with_gradient(model: &ModelSpec, state: &ReducedState) -> Result<(f64, Gradient)> {
    let n = state.dim();
    let coeffs = model.coefficients(n)?;
    let mut grad = Gradient::zeros(n);
    let mut energy = 0.0;
    match coeffs {
        Coefficients::DAlembert { inertia } => {
            for a in 0..n {
                let e2 = (-2.0 * state.q[a]).exp();
                let p = state.p[a];
                energy += p * p * e2 / (2.0 * inertia);
                grad.dp[a] = p * e2 / inertia;
                grad.dq[a] = -p * p * e2 / inertia;
            }
            for (a, b) in pairs(n) {
                let k = pair_index(n, a, b);
                let m = state.m.get(a, b);
                let nn = state.n.get(a, b);
                let qa = state.q[a].exp();
                let qb = state.q[b].exp();
                if m != 0.0 {
                    if (state.q[a] - state.q[b]).abs() < DEGENERACY_TOL {
                        return Err(degenerate(a, b, "M"));
                    }
                    let d = qa - qb;
                    energy += m * m / (4.0 * inertia * d * d);
                    grad.dm[k] = m / (2.0 * inertia * d * d);
                    let dd = -m * m / (2.0 * inertia * d * d * d);
                    grad.dq[a] += dd * qa;
                    grad.dq[b] -= dd * qb;
                }
                let s = qa + qb;
                energy += nn * nn / (4.0 * inertia * s * s);
                grad.dn[k] = nn / (2.0 * inertia * s * s);
                let ds = -nn * nn / (2.0 * inertia * s * s * s);
                grad.dq[a] += ds * qa;
                grad.dq[b] += ds * qb;
            }
        }
        Coefficients::Invariant { kappa_c, kappa_p, kappa_s, kappa_v, trig } => {
            if trig {
                check_trig_domain(state)?;
            }
            let p_bar = state.p_bar();
            let sum_sq: f64 = state.p.iter().map(|p| p * p).sum();
            let nf = n as f64;
            energy += kappa_c * (sum_sq - p_bar * p_bar / nf) + kappa_p * p_bar * p_bar;
            for a in 0..n {
                grad.dp[a] = 2.0 * kappa_c * state.p[a] + 2.0 * (kappa_p - kappa_c / nf) * p_bar;
            }
            for (a, b) in pairs(n) {
                let k = pair_index(n, a, b);
                let m = state.m.get(a, b);
                let nn = state.n.get(a, b);
                let x = state.q[a] - state.q[b];
                let pr = if trig { trig_profile(x, m, nn, a, b)? } else { hyperbolic_profile(x, m, a, b)? };
                let c8 = kappa_c / 8.0;
                energy += c8 * (m * m * pr.f - nn * nn * pr.g);
                let dx = c8 * (m * m * pr.df - nn * nn * pr.dg);
                grad.dq[a] += dx;
                grad.dq[b] -= dx;
                let rho = 0.5 * (nn - m);
                let tau = -0.5 * (m + nn);
                energy += kappa_s * rho * rho + kappa_v * tau * tau;
                grad.dm[k] = 2.0 * c8 * m * pr.f - kappa_s * rho - kappa_v * tau;
                grad.dn[k] = -2.0 * c8 * nn * pr.g + kappa_s * rho - kappa_v * tau;
            }
        }
    }
    Ok((energy, grad))
}

pub fn hamiltonian_with_gradient(
    model: &ModelSpec,
    potential: &PotentialSpec,
    state: &ReducedState,
) -> Result<(f64, Gradient)> {
    let (kinetic, mut grad) = kinetic_with_gradient(model, state)?;
    let v = potential.value(&state.q);
    for (g, dv) in grad.dq.iter_mut().zip(potential.gradient(&state.q)) {
        *g += dv;
    }
    Ok((kinetic + v, grad))
}

pub fn hamiltonian(model: &ModelSpec, potential: &PotentialSpec, state: &ReducedState) -> Result<f64> {
    Ok(hamiltonian_with_gradient(model, potential, state)?.0)
}

pub fn gradient(model: &ModelSpec, potential: &PotentialSpec, state: &ReducedState) -> Result<Gradient> {
    Ok(hamiltonian_with_gradient(model, potential, state)?.1)
}

/// `C_SL(n)(2) = (1/2n)Σ_{a≠b}(pₐ−p_b)² + (1/16)Σ_{a≠b} M²/sh² − (1/16)Σ_{a≠b} N²/ch²`.
pub fn casimir_csl2(state: &ReducedState) -> Result<f64> {
    let n = state.dim();
    let mut c = 0.0;
    for (a, b) in pairs(n) {
        let dp = state.p[a] - state.p[b];
        let m = state.m.get(a, b);
        let nn = state.n.get(a, b);
        let x = state.q[a] - state.q[b];
        let pr = hyperbolic_profile(x, m, a, b)?;
        c += dp * dp / n as f64 + (m * m * pr.f - nn * nn * pr.g) / 8.0;
    }
    Ok(c)
}

/// Trigonometric counterpart `C_SU(n)(2)` with `sin²`/`cos²` couplings, both positive.
pub fn casimir_csu2(state: &ReducedState) -> Result<f64> {
    check_trig_domain(state)?;
    let n = state.dim();
    let mut c = 0.0;
    for (a, b) in pairs(n) {
        let dp = state.p[a] - state.p[b];
        let m = state.m.get(a, b);
        let nn = state.n.get(a, b);
        let pr = trig_profile(state.q[a] - state.q[b], m, nn, a, b)?;
        c += dp * dp / n as f64 + (m * m * pr.f - nn * nn * pr.g) / 8.0;
    }
    Ok(c)
}

/// The Casimir monitored along trajectories of `kind`, if any.
pub fn model_casimir(kind: ModelKind, state: &ReducedState) -> Result<Option<f64>> {
    match kind {
        ModelKind::TrigUn => casimir_csu2(state).map(Some),
        k if k.conserves_csl2() => casimir_csl2(state).map(Some),
        _ => Ok(None),
    }
}

/// `‖S‖² = ‖ρ̂‖²`
pub fn spin_norm_squared(state: &ReducedState) -> f64 {
    state.rho().norm_squared()
}

/// `‖V‖² = ‖τ̂‖²`
pub fn vorticity_norm_squared(state: &ReducedState) -> f64 {
    state.tau().norm_squared()
}
