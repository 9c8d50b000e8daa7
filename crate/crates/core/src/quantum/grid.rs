use crate::error::{Error, Result};
use crate::quantum::measure::{haar_weight, lebesgue_weight, trig_weight};
use crate::quantum::problem::{Axis, Boundary, Sector};

/// Relative distance below which a node counts as lying on a coincidence hyperplane.
pub const WALL_TOL: f64 = 1e-12;

/// Orthonormal basis of the traceless invariant directions.
pub fn shape_basis(n: usize) -> Vec<Vec<f64>> {
    let r2 = 2f64.sqrt().recip();
    let r6 = 6f64.sqrt().recip();
    match n {
        2 => vec![vec![r2, -r2]],
        3 => vec![vec![r2, -r2, 0.0], vec![r6, r6, -2.0 * r6]],
        _ => Vec::new(),
    }
}

/// Which singular set a node touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeStatus {
    Inside,
    Outside,
    /// On `qᵃ = qᵇ` (`m_wall`) or, for the unitary model, on `qᵃ − qᵇ = π` (`n_wall`).
    OnWall { m_wall: bool, n_wall: bool },
}

/// Measure attached to the grid coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Unit,
    Haar,
    Trig,
    Lebesgue,
}

/// Tensor grid of one sector, with the nodes outside the open chamber removed.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub sector: Sector,
    pub n: usize,
    pub boundary: Boundary,
    pub axes: Vec<Axis>,
    pub steps: Vec<f64>,
    pub measure: Measure,
    trig: bool,
    /// Coordinates of the retained nodes.
    pub nodes: Vec<Vec<f64>>,
    multi: Vec<Vec<usize>>,
    slot: Vec<Option<usize>>,
}

impl Grid {
    /// Builds the grid; `keep` decides for each in-chamber node whether it stays
    /// (used to drop nodes where the potential is infinite).
    pub fn build(
        sector: Sector,
        n: usize,
        boundary: Boundary,
        axes: &[Axis],
        trig: bool,
        mut on_wall: impl FnMut(NodeStatus) -> Result<()>,
        keep: impl Fn(&Grid, &[f64]) -> bool,
    ) -> Result<Grid> {
        let measure = match sector {
            Sector::Dilatation => Measure::Unit,
            Sector::Shape if trig => Measure::Trig,
            Sector::Shape => Measure::Haar,
            Sector::Cartesian => Measure::Lebesgue,
        };
        let mut grid = Grid {
            sector,
            n,
            boundary,
            axes: axes.to_vec(),
            steps: axes.iter().map(|a| a.step(boundary)).collect(),
            measure,
            trig,
            nodes: Vec::new(),
            multi: Vec::new(),
            slot: Vec::new(),
        };
        let total: usize = axes.iter().map(|a| a.points).product();
        grid.slot = vec![None; total];
        for flat in 0..total {
            let idx = grid.unflatten(flat);
            let coords: Vec<f64> = idx.iter().zip(axes).map(|(&i, a)| a.node(i, boundary)).collect();
            match grid.status(&coords) {
                NodeStatus::Inside => {}
                NodeStatus::Outside => continue,
                wall @ NodeStatus::OnWall { .. } => {
                    on_wall(wall)?;
                    continue;
                }
            }
            if !keep(&grid, &coords) {
                continue;
            }
            grid.slot[flat] = Some(grid.nodes.len());
            grid.nodes.push(coords);
            grid.multi.push(idx);
        }
        if grid.nodes.is_empty() {
            return Err(Error::Domain("no grid node lies inside the admissible region".into()));
        }
        Ok(grid)
    }

    fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            idx[k] = flat % axis.points;
            flat /= axis.points;
        }
        idx
    }

    fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.axes).fold(0, |acc, (&i, a)| acc * a.points + i)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn cell_volume(&self) -> f64 {
        self.steps.iter().product()
    }

    /// Retained neighbour of node `k` one step along `axis` in direction `dir = ±1`.
    pub fn neighbor(&self, k: usize, axis: usize, dir: i64) -> Option<usize> {
        let mut idx = self.multi[k].clone();
        let points = self.axes[axis].points as i64;
        let mut i = idx[axis] as i64 + dir;
        if i < 0 || i >= points {
            match self.boundary {
                Boundary::Dirichlet => return None,
                Boundary::Periodic => i = i.rem_euclid(points),
            }
        }
        idx[axis] = i as usize;
        self.slot[self.flatten(&idx)]
    }

    /// Invariants at grid coordinates: `q` for the dilatation and shape sectors, `Q` for cartesian.
    pub fn invariants(&self, coords: &[f64]) -> Vec<f64> {
        match self.sector {
            Sector::Dilatation => vec![coords[0]; self.n],
            Sector::Shape => {
                let mut q = vec![0.0; self.n];
                for (y, e) in coords.iter().zip(shape_basis(self.n)) {
                    for (qa, ea) in q.iter_mut().zip(e) {
                        *qa += y * ea;
                    }
                }
                q
            }
            Sector::Cartesian => coords.to_vec(),
        }
    }

    /// Measure density at arbitrary coordinates.
    pub fn weight_at(&self, coords: &[f64]) -> f64 {
        let v = self.invariants(coords);
        match self.measure {
            Measure::Unit => 1.0,
            Measure::Haar => haar_weight(&v),
            Measure::Trig => trig_weight(&v),
            Measure::Lebesgue => lebesgue_weight(&v),
        }
    }

    pub fn status(&self, coords: &[f64]) -> NodeStatus {
        if self.sector == Sector::Dilatation {
            return NodeStatus::Inside;
        }
        let v = self.invariants(coords);
        let scale = 1.0 + v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tol = WALL_TOL * scale;
        if self.sector == Sector::Cartesian && v.iter().any(|x| *x <= tol) {
            return NodeStatus::Outside;
        }
        let (mut m_wall, mut n_wall) = (false, false);
        for a in 0..v.len() {
            for b in (a + 1)..v.len() {
                let x = v[a] - v[b];
                if x < -tol {
                    return NodeStatus::Outside;
                }
                if x.abs() <= tol {
                    m_wall = true;
                }
                if self.trig {
                    let gap = x - std::f64::consts::PI;
                    if gap > tol {
                        return NodeStatus::Outside;
                    }
                    if gap.abs() <= tol {
                        n_wall = true;
                    }
                }
            }
        }
        if m_wall || n_wall {
            NodeStatus::OnWall { m_wall, n_wall }
        } else {
            NodeStatus::Inside
        }
    }
}
