use alloc::vec;
use alloc::vec::Vec;

use super::quadrature::gauss_legendre;
use super::{check_pair, steps, GridFunction, Moments, ReferenceBoundary};
use crate::coefficients::CoefficientField;
use crate::error::{require, Error, Result};

/// Velocity set of the discrete-velocity solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KineticModel {
    /// Two velocities `+-1` with weight 1/2 each. With `sigma_s = 1` this is
    /// the Goldstein–Taylor system written for `g_+- = 2 f_+-`.
    GoldsteinTaylor,
    /// Gauss–Legendre directions on `[-1, 1]` (at least 16).
    Slab { nodes: usize },
}

impl KineticModel {
    fn velocities(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        match *self {
            KineticModel::GoldsteinTaylor => Ok((vec![-1.0, 1.0], vec![0.5, 0.5])),
            KineticModel::Slab { nodes } => {
                require(nodes >= 16, "nodes", nodes as f64, "at least 16 velocity nodes are required")?;
                let (x, w) = gauss_legendre(nodes);
                Ok((x, w.into_iter().map(|w| 0.5 * w).collect()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KineticParams {
    pub model: KineticModel,
    /// Coefficients, evaluated at cell centres.
    pub field: CoefficientField,
    pub left: ReferenceBoundary,
    pub right: ReferenceBoundary,
    pub dt: f64,
}

/// Explicit first-order upwind transport at speed `v/eps`, followed by
/// explicit relaxation towards the velocity average and exact absorption.
///
/// Starts from the isotropic equilibrium with density `initial` and returns
/// `rho = sum_m w_m f_m` and `j = sum_m w_m v_m f_m / eps` at `final_time`.
/// The last step is shortened so that `final_time` is hit exactly.
pub fn kinetic_upwind_solve(initial: &GridFunction, params: &KineticParams, final_time: f64) -> Result<Moments> {
    let grid = *initial.grid();
    if grid.dim() != 1 {
        return Err(Error::Unsupported("the kinetic reference solver is one-dimensional"));
    }
    check_pair(params.left, params.right)?;
    let (v, w) = params.model.velocities()?;
    let coeffs = params.field.on_grid(&grid);
    let dx = grid.dx();
    let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for c in &coeffs {
        require(c.eps > 0.0, "eps", c.eps, "the kinetic reference needs eps > 0")?;
        let limit = c.eps * dx / vmax;
        if params.dt > limit * (1.0 + 1e-12) {
            return Err(Error::Unstable { dt: params.dt, limit, constraint: "transport CFL (dt <= eps dx / |v|)" });
        }
        if c.sigma_s > 0.0 {
            let limit = c.eps * c.eps / c.sigma_s;
            if params.dt > limit * (1.0 + 1e-12) {
                return Err(Error::Unstable { dt: params.dt, limit, constraint: "explicit relaxation (dt <= eps^2/sigma_s)" });
            }
        }
    }

    let nv = v.len();
    let nx = grid.num_cells();
    // f[m * nx + j]
    let mut f: Vec<f64> = (0..nv).flat_map(|_| initial.values().iter().copied()).collect();
    let mut flux = vec![0.0; nx + 1];
    let mut old = f.clone();
    for dt in steps(final_time, params.dt)? {
        old.copy_from_slice(&f);
        for m in 0..nv {
            let vm = v[m];
            let mirror = nv - 1 - m;
            let row = &old[m * nx..(m + 1) * nx];
            let inflow = |b: ReferenceBoundary, cell: usize, wrap: usize| match b {
                ReferenceBoundary::Dirichlet(rho) => rho,
                ReferenceBoundary::Periodic => row[wrap],
                ReferenceBoundary::Reflecting => old[mirror * nx + cell],
            };
            for (face, slot) in flux.iter_mut().enumerate() {
                *slot = if vm > 0.0 {
                    if face == 0 {
                        vm / coeffs[0].eps * inflow(params.left, 0, nx - 1)
                    } else {
                        vm / coeffs[face - 1].eps * row[face - 1]
                    }
                } else if face == nx {
                    vm / coeffs[nx - 1].eps * inflow(params.right, nx - 1, 0)
                } else {
                    vm / coeffs[face].eps * row[face]
                };
            }
            for j in 0..nx {
                f[m * nx + j] -= dt / dx * (flux[j + 1] - flux[j]);
            }
        }
        for j in 0..nx {
            let c = &coeffs[j];
            let rho: f64 = (0..nv).map(|m| w[m] * f[m * nx + j]).sum();
            let relax = dt * c.sigma_s / (c.eps * c.eps);
            let decay = libm::exp(-c.sigma_a * dt);
            for m in 0..nv {
                let fm = &mut f[m * nx + j];
                *fm = (*fm + relax * (rho - *fm)) * decay;
            }
        }
    }

    let rho: Vec<f64> = (0..nx).map(|j| (0..nv).map(|m| w[m] * f[m * nx + j]).sum()).collect();
    let j: Vec<[f64; 2]> = (0..nx)
        .map(|j| [(0..nv).map(|m| w[m] * v[m] * f[m * nx + j]).sum::<f64>() / coeffs[j].eps, 0.0])
        .collect();
    Ok(Moments { rho: GridFunction::new(grid, rho)?, flux: j })
}
