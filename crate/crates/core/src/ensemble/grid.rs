use crate::error::{Error, Result};

/// Uniform Cartesian mesh in one or two dimensions.
///
/// Cells are the half-open boxes `[x_j - dx/2, x_j + dx/2)`, so the domain
/// itself is `[lower, upper)` along each axis. Two-dimensional cells are
/// numbered with `x` varying fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    dim: usize,
    lower: [f64; 2],
    upper: [f64; 2],
    cells: [usize; 2],
    spacing: [f64; 2],
}

impl SpatialGrid {
    pub fn new_1d(lower: f64, upper: f64, cells: usize) -> Result<Self> {
        Self::build(1, [lower, 0.0], [upper, 1.0], [cells, 1])
    }

    pub fn new_2d(lower: [f64; 2], upper: [f64; 2], cells: [usize; 2]) -> Result<Self> {
        Self::build(2, lower, upper, cells)
    }

    fn build(dim: usize, lower: [f64; 2], upper: [f64; 2], cells: [usize; 2]) -> Result<Self> {
        for axis in 0..2 {
            if !(lower[axis].is_finite() && upper[axis].is_finite()) {
                return Err(Error::InvalidGrid("bounds must be finite"));
            }
            if upper[axis] <= lower[axis] {
                return Err(Error::InvalidGrid("upper bound must exceed lower bound"));
            }
            if cells[axis] == 0 {
                return Err(Error::InvalidGrid("at least one cell per axis is required"));
            }
        }
        let spacing = [
            (upper[0] - lower[0]) / cells[0] as f64,
            (upper[1] - lower[1]) / cells[1] as f64,
        ];
        Ok(Self { dim, lower, upper, cells, spacing })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> [f64; 2] {
        self.lower
    }

    pub fn upper(&self) -> [f64; 2] {
        self.upper
    }

    pub fn cells(&self) -> [usize; 2] {
        self.cells
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    pub fn dx(&self) -> f64 {
        self.spacing[0]
    }

    pub fn num_cells(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    /// Length (1D) or area (2D) of one cell.
    pub fn cell_volume(&self) -> f64 {
        match self.dim {
            1 => self.spacing[0],
            _ => self.spacing[0] * self.spacing[1],
        }
    }

    pub fn domain_volume(&self) -> f64 {
        self.cell_volume() * self.num_cells() as f64
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.cells[0] + i
    }

    pub fn center(&self, cell: usize) -> [f64; 2] {
        let i = cell % self.cells[0];
        let j = cell / self.cells[0];
        let x = self.lower[0] + (i as f64 + 0.5) * self.spacing[0];
        match self.dim {
            1 => [x, 0.0],
            _ => [x, self.lower[1] + (j as f64 + 0.5) * self.spacing[1]],
        }
    }

    /// Lower corner of a cell.
    pub fn cell_origin(&self, cell: usize) -> [f64; 2] {
        let i = cell % self.cells[0];
        let j = cell / self.cells[0];
        [
            self.lower[0] + i as f64 * self.spacing[0],
            self.lower[1] + j as f64 * self.spacing[1],
        ]
    }

    pub fn locate_axis(&self, axis: usize, x: f64) -> Option<usize> {
        if !(x >= self.lower[axis] && x < self.upper[axis]) {
            return None;
        }
        let i = ((x - self.lower[axis]) / self.spacing[axis]) as usize;
        // rounding can push a point just below `upper` into cell n
        Some(i.min(self.cells[axis] - 1))
    }

    pub fn locate(&self, pos: [f64; 2]) -> Option<usize> {
        let i = self.locate_axis(0, pos[0])?;
        let j = if self.dim == 1 { 0 } else { self.locate_axis(1, pos[1])? };
        Some(self.index(i, j))
    }

    pub fn contains(&self, pos: [f64; 2]) -> bool {
        self.locate(pos).is_some()
    }

    /// Cell containing `pos` after clamping it into the domain.
    pub fn locate_clamped(&self, pos: [f64; 2]) -> usize {
        let clamp = |axis: usize, x: f64| -> usize {
            let t = libm::floor((x - self.lower[axis]) / self.spacing[axis]);
            if t.is_nan() || t < 0.0 {
                0
            } else {
                (t as usize).min(self.cells[axis] - 1)
            }
        };
        let i = clamp(0, pos[0]);
        let j = if self.dim == 1 { 0 } else { clamp(1, pos[1]) };
        self.index(i, j)
    }

    /// Same domain with every cell split `factor` times per axis.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidGrid("refinement factor must be positive"));
        }
        let cells = match self.dim {
            1 => [self.cells[0] * factor, 1],
            _ => [self.cells[0] * factor, self.cells[1] * factor],
        };
        Self::build(self.dim, self.lower, self.upper, cells)
    }

    /// Whether two grids describe the same mesh.
    pub fn same_mesh(&self, other: &Self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
        self.dim == other.dim
            && self.cells == other.cells
            && (0..2).all(|a| close(self.lower[a], other.lower[a]) && close(self.upper[a], other.upper[a]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_open_cells() {
        let g = SpatialGrid::new_1d(0.0, 1.0, 10).unwrap();
        assert_eq!(g.locate([0.0, 0.0]), Some(0));
        assert_eq!(g.locate([0.1, 0.0]), Some(1));
        assert_eq!(g.locate([1.0, 0.0]), None);
        assert_eq!(g.locate([-1e-300, 0.0]), None);
        assert_eq!(g.locate([1.0 - 1e-16, 0.0]), Some(9));
        assert!((g.center(3)[0] - 0.35).abs() < 1e-15);
    }

    #[test]
    fn two_dimensional_indexing() {
        let g = SpatialGrid::new_2d([0.0, 0.0], [2.0, 1.0], [4, 2]).unwrap();
        assert_eq!(g.num_cells(), 8);
        assert_eq!(g.locate([1.6, 0.7]), Some(g.index(3, 1)));
        assert!((g.cell_volume() - 0.25).abs() < 1e-15);
        let c = g.center(g.index(3, 1));
        assert!((c[0] - 1.75).abs() < 1e-15 && (c[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(SpatialGrid::new_1d(1.0, 1.0, 3).is_err());
        assert!(SpatialGrid::new_1d(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn clamped_lookup() {
        let g = SpatialGrid::new_1d(0.0, 1.0, 4).unwrap();
        assert_eq!(g.locate_clamped([-3.0, 0.0]), 0);
        assert_eq!(g.locate_clamped([7.0, 0.0]), 3);
    }
}
