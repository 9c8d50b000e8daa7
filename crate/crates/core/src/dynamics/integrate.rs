use serde::{Deserialize, Serialize};

use crate::dynamics::eom::eom_flat;
use crate::error::{Error, Result};
use crate::kinematics::Matrix;
use crate::phase::hamiltonian::{casimir_csl2, hamiltonian, model_casimir, wrap_angle};
use crate::phase::model::{ModelKind, ModelSpec};
use crate::phase::potential::PotentialSpec;
use crate::phase::state::ReducedState;

/// Step control of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", deny_unknown_fields)]
pub enum StepControl {
    /// Classical RK4 with a fixed step; every `record_every`-th step is sampled.
    Rk4 { step: f64, #[serde(default = "one")] record_every: usize },
    /// Embedded Dormand–Prince 5(4) pair with error control.
    Adaptive {
        rtol: f64,
        #[serde(default = "default_atol")]
        atol: f64,
        initial_step: f64,
        min_step: f64,
        max_step: f64,
    },
}

fn one() -> usize {
    1
}

fn default_atol() -> f64 {
    1e-12
}

impl StepControl {
    pub fn rk4(step: f64) -> Self {
        StepControl::Rk4 { step, record_every: 1 }
    }

    pub fn adaptive(rtol: f64) -> Self {
        StepControl::Adaptive { rtol, atol: 1e-12, initial_step: 1e-3, min_step: 1e-12, max_step: 0.1 }
    }
}

/// Sampled solution of the reduced equations of motion.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: ModelKind,
    pub times: Vec<f64>,
    pub states: Vec<ReducedState>,
    pub energy: Vec<f64>,
    /// `C_SU(n)(2)` for trigonometric models, `C_SL(n)(2)` otherwise (NaN where undefined).
    pub casimir: Vec<f64>,
    /// `(L, R)` per sample once reconstructed.
    pub attitudes: Option<Vec<(Matrix, Matrix)>>,
}

fn max_relative_drift(values: &[f64]) -> f64 {
    let Some(&first) = values.first() else { return 0.0 };
    let scale = first.abs().max(f64::MIN_POSITIVE);
    values.iter().map(|v| (v - first).abs()).fold(0.0, f64::max) / scale.max(1e-300)
}

fn max_absolute_drift(values: &[f64]) -> f64 {
    let Some(&first) = values.first() else { return 0.0 };
    values.iter().map(|v| (v - first).abs()).fold(0.0, f64::max)
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, ReducedState::dim)
    }

    pub fn last(&self) -> Option<&ReducedState> {
        self.states.last()
    }

    /// `max |E(t) − E(0)| / |E(0)|`; absolute drift when `E(0) = 0`.
    pub fn energy_drift(&self) -> f64 {
        match self.energy.first() {
            Some(e0) if *e0 != 0.0 => max_relative_drift(&self.energy),
            _ => max_absolute_drift(&self.energy),
        }
    }

    pub fn casimir_drift(&self) -> f64 {
        match self.casimir.first() {
            Some(c0) if *c0 != 0.0 && c0.is_finite() => max_relative_drift(&self.casimir),
            _ => max_absolute_drift(&self.casimir),
        }
    }

    /// Maximal absolute drift of an arbitrary function of the state.
    pub fn drift_of(&self, f: impl Fn(&ReducedState) -> f64) -> f64 {
        let values: Vec<f64> = self.states.iter().map(f).collect();
        max_absolute_drift(&values)
    }

    pub fn is_conforming(&self, energy_tolerance: f64) -> bool {
        self.energy_drift() <= energy_tolerance
    }
}

fn sample_casimir(kind: ModelKind, state: &ReducedState) -> f64 {
    match model_casimir(kind, state) {
        Ok(Some(c)) => c,
        Ok(None) => casimir_csl2(state).unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    }
}

struct Recorder<'a> {
    model: &'a ModelSpec,
    potential: &'a PotentialSpec,
    traj: Trajectory,
}

impl Recorder<'_> {
    fn push(&mut self, t: f64, state: ReducedState) -> Result<()> {
        let e = hamiltonian(self.model, self.potential, &state)?;
        self.traj.casimir.push(sample_casimir(self.model.kind, &state));
        self.traj.energy.push(e);
        self.traj.times.push(t);
        self.traj.states.push(state);
        Ok(())
    }
}

fn axpy(z: &[f64], k: &[f64], h: f64) -> Vec<f64> {
    z.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn normalize(kind: ModelKind, n: usize, z: &mut [f64]) {
    if kind == ModelKind::TrigUn {
        for q in z.iter_mut().take(n) {
            *q = wrap_angle(*q);
        }
    }
}

fn check_finite(z: &[f64], t: f64) -> Result<()> {
    if z.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::StepFailure(format!("non-finite state at t = {t}")))
    }
}

/// One classical RK4 step of the reduced system.
pub fn rk4_step(model: &ModelSpec, potential: &PotentialSpec, n: usize, z: &[f64], h: f64) -> Result<Vec<f64>> {
    let f = |y: &[f64]| eom_flat(model, potential, y, n);
    let k1 = f(z)?;
    let k2 = f(&axpy(z, &k1, 0.5 * h))?;
    let k3 = f(&axpy(z, &k2, 0.5 * h))?;
    let k4 = f(&axpy(z, &k3, h))?;
    let mut out: Vec<f64> = (0..z.len())
        .map(|i| z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    normalize(model.kind, n, &mut out);
    Ok(out)
}

// Dormand–Prince 5(4) tableau
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dopri_step(
    model: &ModelSpec,
    potential: &PotentialSpec,
    n: usize,
    z: &[f64],
    h: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    for s in 0..7 {
        let mut y = z.to_vec();
        for (j, kj) in k.iter().enumerate() {
            let a = A[s][j];
            if a != 0.0 {
                for (yi, ki) in y.iter_mut().zip(kj) {
                    *yi += h * a * ki;
                }
            }
        }
        k.push(eom_flat(model, potential, &y, n)?);
    }
    let mut high = z.to_vec();
    let mut err = vec![0.0; z.len()];
    for s in 0..7 {
        for i in 0..z.len() {
            high[i] += h * B5[s] * k[s][i];
            err[i] += h * (B5[s] - B4[s]) * k[s][i];
        }
    }
    Ok((high, err))
}

/// Integrates the reduced equations of motion from `state0` over `[0, t_end]`.
pub fn integrate(
    model: &ModelSpec,
    potential: &PotentialSpec,
    state0: &ReducedState,
    t_end: f64,
    control: &StepControl,
) -> Result<Trajectory> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Domain("t_end must be positive and finite".into()));
    }
    let n = state0.dim();
    let mut z0 = state0.to_flat();
    check_finite(&z0, 0.0)?;
    normalize(model.kind, n, &mut z0);
    let mut rec = Recorder {
        model,
        potential,
        traj: Trajectory {
            kind: model.kind,
            times: Vec::new(),
            states: Vec::new(),
            energy: Vec::new(),
            casimir: Vec::new(),
            attitudes: None,
        },
    };
    rec.push(0.0, ReducedState::from_flat(n, &z0)?)?;
    match *control {
        StepControl::Rk4 { step, record_every } => {
            if !(step > 0.0 && step.is_finite()) || record_every == 0 {
                return Err(Error::Domain("RK4 needs a positive step and record_every ≥ 1".into()));
            }
            let steps = (t_end / step - 1e-9).ceil().max(1.0) as usize;
            let h = t_end / steps as f64;
            let mut z = z0;
            for i in 1..=steps {
                z = rk4_step(model, potential, n, &z, h)?;
                let t = i as f64 * h;
                check_finite(&z, t)?;
                if i % record_every == 0 || i == steps {
                    rec.push(t, ReducedState::from_flat(n, &z)?)?;
                }
            }
        }
        StepControl::Adaptive { rtol, atol, initial_step, min_step, max_step } => {
            if !(rtol > 0.0 && atol >= 0.0 && min_step > 0.0 && max_step >= min_step && initial_step > 0.0) {
                return Err(Error::Domain("invalid adaptive step parameters".into()));
            }
            let mut z = z0;
            let mut t = 0.0;
            let mut h = initial_step.clamp(min_step, max_step);
            while t < t_end {
                let h_try = h.min(t_end - t);
                let (mut cand, err) = match dopri_step(model, potential, n, &z, h_try) {
                    Ok(v) => v,
                    Err(Error::DegenerateInertia(_)) if h_try > min_step => {
                        h = (0.25 * h_try).max(min_step);
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let norm = err
                    .iter()
                    .zip(z.iter().zip(&cand))
                    .map(|(e, (a, b))| {
                        let sc = atol + rtol * a.abs().max(b.abs());
                        (e / sc).powi(2)
                    })
                    .sum::<f64>()
                    .sqrt()
                    / (z.len() as f64).sqrt();
                if norm.is_finite() && norm <= 1.0 {
                    normalize(model.kind, n, &mut cand);
                    t += h_try;
                    if t_end - t < 1e-12 * t_end {
                        t = t_end;
                    }
                    z = cand;
                    rec.push(t, ReducedState::from_flat(n, &z)?)?;
                    let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
                    h = (h_try * factor).clamp(min_step, max_step);
                } else {
                    if h_try <= min_step {
                        return Err(Error::StepFailure(format!(
                            "step size underflow at t = {t} (error norm {norm:e})"
                        )));
                    }
                    let factor = if norm.is_finite() { (0.9 * norm.powf(-0.25)).clamp(0.1, 0.5) } else { 0.1 };
                    h = (h_try * factor).max(min_step);
                }
            }
        }
    }
    Ok(rec.traj)
}
