//! Poisson structure on `(q, p, M, N)`.
//!
//! Canonical pairs `{qᵃ, p_b} = δᵃ_b`; the co-moving spins satisfy
//! `{ρ̂_ab, ρ̂_cd} = σ f(ρ̂)_abcd`, `{τ̂_ab, τ̂_cd} = σ f(τ̂)_abcd`, `{ρ̂, τ̂} = 0` with
//! `f(X)_abcd = X_ad δ_cb − X_cb δ_ad + X_db δ_ac − X_ac δ_db`, hence
//! `{M, M} = {N, N} = −σ f(M)` and `{M, N} = −σ f(N)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::phase::state::{pair_count, pair_index, pairs, ReducedState, SkewMatrix};

/// Sign `σ` of the co-moving Lie-Poisson structure. With `ρ̂ = ∂T/∂χ̂` and
/// `χ̂ = LᵀL̇` the body-frame equations `dρ̂/dt = [ρ̂, χ̂]` require `σ = −1`.
pub const LIE_POISSON_SIGN: f64 = -1.0;

/// `f(X)_abcd` evaluated on a skew matrix.
pub fn structure(x: &SkewMatrix, a: usize, b: usize, c: usize, d: usize) -> f64 {
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    x.get(a, d) * delta(c, b) - x.get(c, b) * delta(a, d) + x.get(d, b) * delta(a, c)
        - x.get(a, c) * delta(d, b)
}

type ValueFn = dyn Fn(&ReducedState) -> Result<f64> + Send + Sync;
type GradientFn = dyn Fn(&ReducedState) -> Result<Vec<f64>> + Send + Sync;

/// Function on the reduced phase space. Indices are zero-based.
#[derive(Clone)]
pub enum Observable {
    Q(usize),
    P(usize),
    M(usize, usize),
    N(usize, usize),
    Rho(usize, usize),
    Tau(usize, usize),
    Constant(f64),
    /// `c · z` over the flat coordinates `(q, p, M_upper, N_upper)`.
    Linear(Vec<f64>),
    Sum(Box<Observable>, Box<Observable>),
    Product(Box<Observable>, Box<Observable>),
    /// Arbitrary smooth function with a user-supplied gradient in flat coordinates.
    Smooth { name: String, value: Arc<ValueFn>, gradient: Arc<GradientFn> },
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Q(a) => write!(f, "q{}", a + 1),
            Observable::P(a) => write!(f, "p{}", a + 1),
            Observable::M(a, b) => write!(f, "M{}{}", a + 1, b + 1),
            Observable::N(a, b) => write!(f, "N{}{}", a + 1, b + 1),
            Observable::Rho(a, b) => write!(f, "rho{}{}", a + 1, b + 1),
            Observable::Tau(a, b) => write!(f, "tau{}{}", a + 1, b + 1),
            Observable::Constant(c) => write!(f, "{c}"),
            Observable::Linear(c) => write!(f, "Linear({c:?})"),
            Observable::Sum(x, y) => write!(f, "({x:?} + {y:?})"),
            Observable::Product(x, y) => write!(f, "({x:?} * {y:?})"),
            Observable::Smooth { name, .. } => write!(f, "{name}"),
        }
    }
}

impl Observable {
    pub fn sum(a: Observable, b: Observable) -> Self {
        Observable::Sum(Box::new(a), Box::new(b))
    }

    pub fn product(a: Observable, b: Observable) -> Self {
        Observable::Product(Box::new(a), Box::new(b))
    }

    pub fn smooth<V, G>(name: impl Into<String>, value: V, gradient: G) -> Self
    where
        V: Fn(&ReducedState) -> Result<f64> + Send + Sync + 'static,
        G: Fn(&ReducedState) -> Result<Vec<f64>> + Send + Sync + 'static,
    {
        Observable::Smooth { name: name.into(), value: Arc::new(value), gradient: Arc::new(gradient) }
    }

    fn pair(n: usize, a: usize, b: usize, what: &str) -> Result<(usize, f64)> {
        if a >= n || b >= n || a == b {
            return Err(Error::UnknownObservable(format!(
                "{what}{}{} is not an off-diagonal entry for n = {n}",
                a + 1,
                b + 1
            )));
        }
        Ok(if a < b { (pair_index(n, a, b), 1.0) } else { (pair_index(n, b, a), -1.0) })
    }

    fn index(n: usize, a: usize, what: &str) -> Result<usize> {
        if a >= n {
            return Err(Error::UnknownObservable(format!("{what}{} out of range for n = {n}", a + 1)));
        }
        Ok(a)
    }

    pub fn value(&self, state: &ReducedState) -> Result<f64> {
        let n = state.dim();
        Ok(match self {
            Observable::Q(a) => state.q[Self::index(n, *a, "q")?],
            Observable::P(a) => state.p[Self::index(n, *a, "p")?],
            Observable::M(a, b) => {
                Self::pair(n, *a, *b, "M")?;
                state.m.get(*a, *b)
            }
            Observable::N(a, b) => {
                Self::pair(n, *a, *b, "N")?;
                state.n.get(*a, *b)
            }
            Observable::Rho(a, b) => {
                Self::pair(n, *a, *b, "rho")?;
                0.5 * (state.n.get(*a, *b) - state.m.get(*a, *b))
            }
            Observable::Tau(a, b) => {
                Self::pair(n, *a, *b, "tau")?;
                -0.5 * (state.m.get(*a, *b) + state.n.get(*a, *b))
            }
            Observable::Constant(c) => *c,
            Observable::Linear(c) => {
                let z = state.to_flat();
                if c.len() != z.len() {
                    return Err(Error::UnknownObservable(format!(
                        "linear observable has {} coefficients, state has {}",
                        c.len(),
                        z.len()
                    )));
                }
                c.iter().zip(&z).map(|(x, y)| x * y).sum()
            }
            Observable::Sum(x, y) => x.value(state)? + y.value(state)?,
            Observable::Product(x, y) => x.value(state)? * y.value(state)?,
            Observable::Smooth { value, .. } => value(state)?,
        })
    }

    /// Gradient in flat coordinates.
    pub fn gradient(&self, state: &ReducedState) -> Result<Vec<f64>> {
        let n = state.dim();
        let k = pair_count(n);
        let len = ReducedState::flat_len(n);
        let mut g = vec![0.0; len];
        match self {
            Observable::Q(a) => g[Self::index(n, *a, "q")?] = 1.0,
            Observable::P(a) => g[n + Self::index(n, *a, "p")?] = 1.0,
            Observable::M(a, b) => {
                let (i, s) = Self::pair(n, *a, *b, "M")?;
                g[2 * n + i] = s;
            }
            Observable::N(a, b) => {
                let (i, s) = Self::pair(n, *a, *b, "N")?;
                g[2 * n + k + i] = s;
            }
            Observable::Rho(a, b) => {
                let (i, s) = Self::pair(n, *a, *b, "rho")?;
                g[2 * n + i] = -0.5 * s;
                g[2 * n + k + i] = 0.5 * s;
            }
            Observable::Tau(a, b) => {
                let (i, s) = Self::pair(n, *a, *b, "tau")?;
                g[2 * n + i] = -0.5 * s;
                g[2 * n + k + i] = -0.5 * s;
            }
            Observable::Constant(_) => {}
            Observable::Linear(c) => {
                if c.len() != len {
                    return Err(Error::UnknownObservable(format!(
                        "linear observable has {} coefficients, state has {len}",
                        c.len()
                    )));
                }
                g.copy_from_slice(c);
            }
            Observable::Sum(x, y) => {
                for (gi, (a, b)) in g.iter_mut().zip(x.gradient(state)?.into_iter().zip(y.gradient(state)?)) {
                    *gi = a + b;
                }
            }
            Observable::Product(x, y) => {
                let (vx, vy) = (x.value(state)?, y.value(state)?);
                for (gi, (a, b)) in g.iter_mut().zip(x.gradient(state)?.into_iter().zip(y.gradient(state)?)) {
                    *gi = a * vy + vx * b;
                }
            }
            Observable::Smooth { name, gradient, .. } => {
                let gs = gradient(state)?;
                if gs.len() != len {
                    return Err(Error::UnknownObservable(format!(
                        "gradient of {name} has length {}, expected {len}",
                        gs.len()
                    )));
                }
                g = gs;
            }
        }
        Ok(g)
    }
}

/// Poisson tensor `J(z)` with `{F, G} = ∇Fᵀ J ∇G`.
pub fn poisson_tensor(state: &ReducedState) -> DMatrix<f64> {
    let n = state.dim();
    let layout = ReducedState::offsets(n);
    let dim = layout.len();
    let mut j = DMatrix::zeros(dim, dim);
    for a in 0..n {
        j[(layout.q + a, layout.p + a)] = 1.0;
        j[(layout.p + a, layout.q + a)] = -1.0;
    }
    let s = -LIE_POISSON_SIGN;
    for (k, (a, b)) in pairs(n).enumerate() {
        for (l, (c, d)) in pairs(n).enumerate() {
            let fm = s * structure(&state.m, a, b, c, d);
            let fn_ = s * structure(&state.n, a, b, c, d);
            j[(layout.m + k, layout.m + l)] = fm;
            j[(layout.nn + k, layout.nn + l)] = fm;
            j[(layout.m + k, layout.nn + l)] = fn_;
            j[(layout.nn + k, layout.m + l)] = fn_;
        }
    }
    j
}

/// `∂J/∂z_k`; constant because `J` is affine in `z`.
pub fn poisson_tensor_derivative(n: usize, k: usize) -> DMatrix<f64> {
    let len = ReducedState::flat_len(n);
    let mut e = vec![0.0; len];
    let zero = ReducedState::zeros(n);
    if k < len {
        e[k] = 1.0;
    }
    let unit = ReducedState::from_flat(n, &e).expect("flat length is consistent");
    poisson_tensor(&unit) - poisson_tensor(&zero)
}

fn contract(lhs: &[f64], j: &DMatrix<f64>, rhs: &[f64]) -> f64 {
    let mut total = 0.0;
    for (r, &l) in lhs.iter().enumerate() {
        if l == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for (c, &g) in rhs.iter().enumerate() {
            row += j[(r, c)] * g;
        }
        total += l * row;
    }
    total
}

pub fn bracket_of_gradients(df: &[f64], dg: &[f64], state: &ReducedState) -> Result<f64> {
    let len = ReducedState::flat_len(state.dim());
    if df.len() != len || dg.len() != len {
        return Err(Error::ShapeMismatch("gradient length does not match state".into()));
    }
    Ok(contract(df, &poisson_tensor(state), dg))
}

pub fn poisson_bracket(f: &Observable, g: &Observable, state: &ReducedState) -> Result<f64> {
    bracket_of_gradients(&f.gradient(state)?, &g.gradient(state)?, state)
}

/// `∇{F, G}` for observables with constant gradients (linear ones).
pub fn linear_bracket_gradient(df: &[f64], dg: &[f64], n: usize) -> Vec<f64> {
    (0..ReducedState::flat_len(n))
        .map(|k| contract(df, &poisson_tensor_derivative(n, k), dg))
        .collect()
}

/// `{{F,G},H} + {{G,H},F} + {{H,F},G}` for linear `F, G, H` given by coefficients.
pub fn jacobi_residual_linear(f: &[f64], g: &[f64], h: &[f64], state: &ReducedState) -> Result<f64> {
    let n = state.dim();
    let fg = linear_bracket_gradient(f, g, n);
    let gh = linear_bracket_gradient(g, h, n);
    let hf = linear_bracket_gradient(h, f, n);
    Ok(bracket_of_gradients(&fg, h, state)?
        + bracket_of_gradients(&gh, f, state)?
        + bracket_of_gradients(&hf, g, state)?)
}

/// Equations of motion `ż = J(z)∇H` in flat coordinates.
pub fn hamiltonian_vector_field(grad_h: &[f64], state: &ReducedState) -> Result<Vec<f64>> {
    let len = ReducedState::flat_len(state.dim());
    if grad_h.len() != len {
        return Err(Error::ShapeMismatch("gradient length does not match state".into()));
    }
    let j = poisson_tensor(state);
    Ok((0..len).map(|r| (0..len).map(|c| j[(r, c)] * grad_h[c]).sum()).collect())
}
