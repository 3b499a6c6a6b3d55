//! Deterministic solvers used as oracles for the particle schemes.
//!
//! * [`kinetic_upwind_solve`]: explicit discrete-velocity upwind scheme for
//!   the Goldstein–Taylor system and the slab transport equation at resolved
//!   `eps`.
//! * [`heat_fd_solve`]: finite differences for the limiting
//!   diffusion–reaction equation, in one or two dimensions.
//! * [`steady_slab_solve`]: direct solve of the stationary slab transport
//!   equation in even-parity form, usable at any `eps` including thin layers.

use alloc::vec;
use alloc::vec::Vec;

use crate::ensemble::{BoundaryCondition, CellStats, SpatialGrid};
use crate::error::{Error, Result};

mod heat;
mod kinetic;
mod linalg;
pub mod quadrature;
mod steady;

pub use heat::{heat_fd_solve, HeatMode, HeatParams};
pub use kinetic::{kinetic_upwind_solve, KineticModel, KineticParams};
pub use steady::{steady_slab_solve, SteadyParams};

/// Cell values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: SpatialGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: SpatialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_cells() {
            return Err(Error::GridMismatch);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDensity("grid function values must be finite"));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at the cell centres.
    pub fn from_fn(grid: SpatialGrid, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = (0..grid.num_cells()).map(|c| f(grid.center(c))).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: SpatialGrid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.num_cells()])
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Integral over the domain.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Cell averages onto `coarse`, which must refine to this grid.
    pub fn restrict(&self, coarse: &SpatialGrid) -> Result<Self> {
        Ok(Self { grid: *coarse, values: restrict_values(&self.grid, &self.values, coarse)? })
    }
}

fn refinement_factor(fine: &SpatialGrid, coarse: &SpatialGrid) -> Result<usize> {
    let k = fine.cells()[0] / coarse.cells()[0];
    if k == 0 || !fine.cells()[0].is_multiple_of(coarse.cells()[0]) || !coarse.refine(k)?.same_mesh(fine) {
        return Err(Error::GridMismatch);
    }
    Ok(k)
}

fn restrict_values(fine: &SpatialGrid, values: &[f64], coarse: &SpatialGrid) -> Result<Vec<f64>> {
    let k = refinement_factor(fine, coarse)?;
    let mut out = vec![0.0; coarse.num_cells()];
    let [nx, ny] = fine.cells();
    for j in 0..ny {
        for i in 0..nx {
            let c = if coarse.dim() == 1 { i / k } else { coarse.index(i / k, j / k) };
            out[c] += values[fine.index(i, j)];
        }
    }
    let per = if coarse.dim() == 1 { k } else { k * k } as f64;
    out.iter_mut().for_each(|v| *v /= per);
    Ok(out)
}

/// Density and flux produced by a reference solver.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub rho: GridFunction,
    /// Flux per cell; the second component is zero in one dimension.
    pub flux: Vec<[f64; 2]>,
}

impl Moments {
    pub fn grid(&self) -> &SpatialGrid {
        self.rho.grid()
    }

    pub fn restrict(&self, coarse: &SpatialGrid) -> Result<Self> {
        let fine = self.rho.grid();
        let fx: Vec<f64> = self.flux.iter().map(|f| f[0]).collect();
        let fy: Vec<f64> = self.flux.iter().map(|f| f[1]).collect();
        let fx = restrict_values(fine, &fx, coarse)?;
        let fy = restrict_values(fine, &fy, coarse)?;
        Ok(Self { rho: self.rho.restrict(coarse)?, flux: fx.into_iter().zip(fy).map(|(a, b)| [a, b]).collect() })
    }

    pub fn into_stats(self) -> CellStats {
        CellStats { rho: self.rho.into_values(), flux: self.flux, samples: 1 }
    }
}

/// Boundary condition for the deterministic solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceBoundary {
    Periodic,
    /// Prescribed density; for kinetic solvers, isotropic inflow at that density.
    Dirichlet(f64),
    /// Zero flux (specular reflection for kinetic solvers).
    Reflecting,
}

impl From<BoundaryCondition> for ReferenceBoundary {
    fn from(bc: BoundaryCondition) -> Self {
        match bc {
            BoundaryCondition::Periodic => Self::Periodic,
            BoundaryCondition::Dirichlet { density } => Self::Dirichlet(density),
        }
    }
}

pub(crate) fn check_pair(lo: ReferenceBoundary, hi: ReferenceBoundary) -> Result<()> {
    let periodic = |b| b == ReferenceBoundary::Periodic;
    if periodic(lo) != periodic(hi) {
        return Err(Error::InvalidParameter {
            name: "boundaries",
            value: 0.0,
            reason: "periodic boundaries must be paired",
        });
    }
    for b in [lo, hi] {
        if let ReferenceBoundary::Dirichlet(v) = b {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidDensity("boundary density must be finite and nonnegative"));
            }
        }
    }
    Ok(())
}

/// Splits `final_time` into steps of at most `dt`, the last one shortened.
pub(crate) fn steps(final_time: f64, dt: f64) -> Result<Vec<f64>> {
    crate::simulation::step_schedule(final_time, dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restriction_averages() {
        let coarse = SpatialGrid::new_1d(0.0, 1.0, 4).unwrap();
        let fine = coarse.refine(3).unwrap();
        let f = GridFunction::from_fn(fine, |x| x[0]).unwrap();
        let r = f.restrict(&coarse).unwrap();
        for (c, v) in r.values().iter().enumerate() {
            assert!((v - coarse.center(c)[0]).abs() < 1e-14);
        }
        assert!((r.integral() - f.integral()).abs() < 1e-14);
        assert_eq!(f.restrict(&SpatialGrid::new_1d(0.0, 1.0, 5).unwrap()), Err(Error::GridMismatch));
    }

    #[test]
    fn restriction_in_two_dimensions() {
        let coarse = SpatialGrid::new_2d([0.0; 2], [1.0; 2], [2, 3]).unwrap();
        let fine = coarse.refine(2).unwrap();
        let f = GridFunction::from_fn(fine, |x| x[0] + 2.0 * x[1]).unwrap();
        let r = f.restrict(&coarse).unwrap();
        for (c, v) in r.values().iter().enumerate() {
            let x = coarse.center(c);
            assert!((v - (x[0] + 2.0 * x[1])).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_values() {
        let g = SpatialGrid::new_1d(0.0, 1.0, 2).unwrap();
        assert!(GridFunction::new(g, vec![1.0]).is_err());
        assert!(GridFunction::new(g, vec![1.0, f64::NAN]).is_err());
    }
}
