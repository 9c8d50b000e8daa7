use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::grid::Grid;
use crate::quantum::measure::{haar_weight, lebesgue_weight, trig_weight};
use crate::quantum::problem::Sector;
use crate::quantum::spin::CMatrix;

/// Density used in the discrete inner product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    /// Amended variables or the dilatation sector.
    Unit,
    Haar,
    Lebesgue,
    Trig,
}

/// `(h^d / N(α)N(β)) Σₖ w(xₖ) Tr(f₁ₖ† f₂ₖ)` over the grid nodes.
///
/// Retained nodes are interior, so the trapezoidal rule reduces to a plain sum.
pub fn inner_product(f1: &[CMatrix], f2: &[CMatrix], weight: Weight, grid: &Grid) -> Result<Complex64> {
    if f1.len() != grid.len() || f2.len() != grid.len() {
        return Err(Error::ShapeMismatch(format!(
            "amplitudes of length {} and {} on a grid of {} nodes",
            f1.len(),
            f2.len(),
            grid.len()
        )));
    }
    let shape = f1.first().map(|m| m.shape()).unwrap_or((0, 0));
    if f1.iter().chain(f2).any(|m| m.shape() != shape) {
        return Err(Error::ShapeMismatch("amplitude blocks differ in shape".into()));
    }
    if weight != Weight::Unit && grid.sector == Sector::Dilatation {
        return Err(Error::Domain("measure weights need the shape or cartesian sector".into()));
    }
    let block = (shape.0 * shape.1).max(1) as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for ((a, b), coords) in f1.iter().zip(f2).zip(&grid.nodes) {
        let w = match weight {
            Weight::Unit => 1.0,
            Weight::Haar => haar_weight(&grid.invariants(coords)),
            Weight::Lebesgue => lebesgue_weight(&grid.invariants(coords)),
            Weight::Trig => trig_weight(&grid.invariants(coords)),
        };
        let tr: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
        sum += tr * w;
    }
    Ok(sum * (grid.cell_volume() / block))
}
