use alloc::vec;
use alloc::vec::Vec;

use super::linalg::solve_tridiagonal;
use super::{check_pair, steps, GridFunction, Moments, ReferenceBoundary};
use crate::coefficients::CoefficientField;
use crate::error::{require, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeatMode {
    /// Forward Euler; the time step must satisfy the stability bound.
    #[default]
    Explicit,
    /// Backward Euler, one-dimensional non-periodic problems only.
    Implicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatParams {
    /// The constant `D` in `d_t rho = D div(grad rho / sigma_s) - sigma_a rho`.
    pub diffusivity: f64,
    /// `sigma_s` and `sigma_a`, evaluated at cell centres; `eps` is ignored.
    pub field: CoefficientField,
    /// Left, right, bottom, top. The last two are ignored in one dimension.
    pub boundaries: [ReferenceBoundary; 4],
    pub dt: f64,
    pub mode: HeatMode,
}

#[derive(Debug, Clone, Copy)]
enum Link {
    /// Neighbour cell and face coefficient over `h^2`.
    Cell(usize, f64),
    /// Boundary value at half a cell and coefficient over `h^2`.
    Fixed(f64, f64),
    Wall,
}

impl Link {
    fn rate(&self) -> f64 {
        match *self {
            Link::Cell(_, k) | Link::Fixed(_, k) => k,
            Link::Wall => 0.0,
        }
    }
}

fn harmonic(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

/// `[minus x, plus x, minus y, plus y]` links per cell.
fn build_links(grid: &crate::ensemble::SpatialGrid, a: &[f64], bcs: &[ReferenceBoundary; 4]) -> Vec<[Link; 4]> {
    let [nx, ny] = grid.cells();
    let mut links = vec![[Link::Wall; 4]; grid.num_cells()];
    for j in 0..ny {
        for i in 0..nx {
            let c = grid.index(i, j);
            for axis in 0..grid.dim() {
                let h2 = grid.spacing(axis) * grid.spacing(axis);
                let (pos, n) = if axis == 0 { (i, nx) } else { (j, ny) };
                let at = |p: usize| if axis == 0 { grid.index(p, j) } else { grid.index(i, p) };
                for (side, bc) in [(0usize, bcs[2 * axis]), (1, bcs[2 * axis + 1])] {
                    let inner = if side == 0 { pos.checked_sub(1) } else { Some(pos + 1).filter(|&p| p < n) };
                    links[c][2 * axis + side] = match (inner, bc) {
                        (Some(p), _) => Link::Cell(at(p), harmonic(a[c], a[at(p)]) / h2),
                        (None, ReferenceBoundary::Periodic) => {
                            let p = if side == 0 { n - 1 } else { 0 };
                            Link::Cell(at(p), harmonic(a[c], a[at(p)]) / h2)
                        }
                        (None, ReferenceBoundary::Dirichlet(v)) => Link::Fixed(v, 2.0 * a[c] / h2),
                        (None, ReferenceBoundary::Reflecting) => Link::Wall,
                    };
                }
            }
        }
    }
    links
}

/// Central finite differences for the diffusion–reaction equation
/// `d_t rho = D div(grad rho / sigma_s) - sigma_a rho` on cell centres.
///
/// Face diffusivities are harmonic means of `D/sigma_s`; Dirichlet values sit
/// on the boundary face, half a cell from the first centre. Absorption is
/// applied after each diffusion step as the exact factor `exp(-sigma_a dt)`.
/// The returned flux is Fick's law `-(D/sigma_s) grad rho` averaged from the
/// two faces of each cell.
pub fn heat_fd_solve(rho0: &GridFunction, params: &HeatParams, final_time: f64) -> Result<Moments> {
    let grid = *rho0.grid();
    require(params.diffusivity > 0.0, "diffusivity", params.diffusivity, "must be positive")?;
    require(params.dt > 0.0, "dt", params.dt, "must be positive")?;
    let bcs = params.boundaries;
    check_pair(bcs[0], bcs[1])?;
    if grid.dim() == 2 {
        check_pair(bcs[2], bcs[3])?;
    }
    let coeffs = params.field.on_grid(&grid);
    for c in &coeffs {
        require(c.sigma_s > 0.0, "sigma_s", c.sigma_s, "the diffusion limit needs sigma_s > 0")?;
    }
    let a: Vec<f64> = coeffs.iter().map(|c| params.diffusivity / c.sigma_s).collect();
    let links = build_links(&grid, &a, &bcs);
    let n = grid.num_cells();

    let mut rho = rho0.values().to_vec();
    match params.mode {
        HeatMode::Explicit => {
            // Gershgorin bound on the spectrum of the discrete operator
            let bound = links
                .iter()
                .map(|l| {
                    l.iter()
                        .map(|l| match l {
                            Link::Cell(..) => 2.0 * l.rate(),
                            _ => l.rate(),
                        })
                        .sum::<f64>()
                })
                .fold(0.0, f64::max);
            let limit = 2.0 / bound;
            if params.dt > limit * (1.0 + 1e-12) {
                return Err(Error::Unstable { dt: params.dt, limit, constraint: "explicit diffusion" });
            }
            let mut next = vec![0.0; n];
            for dt in steps(final_time, params.dt)? {
                for c in 0..n {
                    let mut lap = 0.0;
                    for l in &links[c] {
                        lap += match *l {
                            Link::Cell(p, k) => k * (rho[p] - rho[c]),
                            Link::Fixed(v, k) => k * (v - rho[c]),
                            Link::Wall => 0.0,
                        };
                    }
                    next[c] = (rho[c] + dt * lap) * libm::exp(-coeffs[c].sigma_a * dt);
                }
                core::mem::swap(&mut rho, &mut next);
            }
        }
        HeatMode::Implicit => {
            if grid.dim() != 1 || bcs[0] == ReferenceBoundary::Periodic {
                return Err(Error::Unsupported("implicit diffusion needs a non-periodic one-dimensional grid"));
            }
            for dt in steps(final_time, params.dt)? {
                let mut lower = vec![0.0; n];
                let mut diag = vec![1.0; n];
                let mut upper = vec![0.0; n];
                for c in 0..n {
                    for (side, l) in links[c][..2].iter().enumerate() {
                        match *l {
                            Link::Cell(_, k) => {
                                diag[c] += dt * k;
                                if side == 0 {
                                    lower[c] = -dt * k;
                                } else {
                                    upper[c] = -dt * k;
                                }
                            }
                            Link::Fixed(v, k) => {
                                diag[c] += dt * k;
                                rho[c] += dt * k * v;
                            }
                            Link::Wall => {}
                        }
                    }
                }
                solve_tridiagonal(&lower, &diag, &upper, &mut rho)?;
                for (r, c) in rho.iter_mut().zip(&coeffs) {
                    *r *= libm::exp(-c.sigma_a * dt);
                }
            }
        }
    }

    let mut flux = vec![[0.0; 2]; n];
    for c in 0..n {
        for axis in 0..grid.dim() {
            let h = grid.spacing(axis);
            let face = |l: &Link, outward: f64| match *l {
                Link::Cell(p, k) => -k * h * (rho[p] - rho[c]) * outward,
                Link::Fixed(v, k) => -k * h * (v - rho[c]) * outward,
                Link::Wall => 0.0,
            };
            flux[c][axis] = 0.5 * (face(&links[c][2 * axis], -1.0) + face(&links[c][2 * axis + 1], 1.0));
        }
    }
    Ok(Moments { rho: GridFunction::new(grid, rho)?, flux })
}
