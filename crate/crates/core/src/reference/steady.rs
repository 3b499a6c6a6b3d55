use alloc::vec;
use alloc::vec::Vec;

use super::linalg::Lu;
use super::quadrature::half_range_gauss_legendre;
use super::{GridFunction, Moments};
use crate::coefficients::CoefficientField;
use crate::ensemble::SpatialGrid;
use crate::error::{require, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyParams {
    /// Coefficients, evaluated at cell centres.
    pub field: CoefficientField,
    /// Isotropic incoming intensity at `x = lower`.
    pub inflow_left: f64,
    /// Isotropic incoming intensity at `x = upper`.
    pub inflow_right: f64,
    /// Gauss–Legendre nodes on `(0, 1)`.
    pub nodes: usize,
}

/// Stationary slab transport
/// `(mu/eps) d_x f = (sigma_s/eps^2)(rho - f) - sigma_a f`
/// with isotropic inflow on both ends, solved directly.
///
/// Uses the even-parity form `-d_x((mu^2/S_t) d_x psi) + S_t psi = S_s rho`
/// with `S_t = sigma_s/eps + eps sigma_a`, `S_s = sigma_s/eps`, which stays
/// well conditioned for small `eps`. Face fluxes combine the two half cells
/// in series; inflow enters through a half-cell Marshak closure. The block
/// tridiagonal system is solved by block elimination.
pub fn steady_slab_solve(grid: &SpatialGrid, params: &SteadyParams) -> Result<Moments> {
    if grid.dim() != 1 {
        return Err(Error::Unsupported("the steady transport solver is one-dimensional"));
    }
    require(params.nodes >= 2, "nodes", params.nodes as f64, "at least two nodes are required")?;
    for v in [params.inflow_left, params.inflow_right] {
        require(v.is_finite() && v >= 0.0, "inflow", v, "must be finite and nonnegative")?;
    }
    let coeffs = params.field.on_grid(grid);
    let mut st = Vec::with_capacity(coeffs.len());
    let mut ss = Vec::with_capacity(coeffs.len());
    for c in &coeffs {
        require(c.eps > 0.0, "eps", c.eps, "the steady solver needs eps > 0")?;
        let t = c.sigma_s / c.eps + c.eps * c.sigma_a;
        require(t > 0.0, "sigma", t, "total cross-section must be positive")?;
        st.push(t);
        ss.push(c.sigma_s / c.eps);
    }
    let (mu, w) = half_range_gauss_legendre(params.nodes);
    let m = mu.len();
    let nx = grid.num_cells();
    let dx = grid.dx();

    // face conductances mu^2 / (resistance) per node; index f in 0..=nx
    let mut cond = vec![0.0; (nx + 1) * m];
    for f in 0..=nx {
        for k in 0..m {
            cond[f * m + k] = if f == 0 {
                let r = 2.0 * mu[k] / (st[0] * dx);
                mu[k] * r / (1.0 + r)
            } else if f == nx {
                let r = 2.0 * mu[k] / (st[nx - 1] * dx);
                mu[k] * r / (1.0 + r)
            } else {
                mu[k] * mu[k] / (0.5 * dx * (st[f - 1] + st[f]))
            };
        }
    }

    // forward elimination: M_j = B_j - A_j X_{j-1}, X_j = M_j^{-1} C_j, y_j = M_j^{-1}(d_j - A_j y_{j-1})
    let mut xs: Vec<f64> = vec![0.0; nx * m * m];
    let mut ys: Vec<f64> = vec![0.0; nx * m];
    for j in 0..nx {
        let lo = &cond[j * m..(j + 1) * m];
        let hi = &cond[(j + 1) * m..(j + 2) * m];
        let mut b = vec![0.0; m * m];
        let mut d = vec![0.0; m];
        for r in 0..m {
            for c in 0..m {
                b[r * m + c] = -ss[j] * w[c];
            }
            b[r * m + r] += (lo[r] + hi[r]) / dx + st[j];
            if j == 0 {
                d[r] += lo[r] * params.inflow_left / dx;
            }
            if j == nx - 1 {
                d[r] += hi[r] * params.inflow_right / dx;
            }
        }
        if j > 0 {
            // A_j = -diag(lo)/dx
            let xp = &xs[(j - 1) * m * m..j * m * m];
            let yp = &ys[(j - 1) * m..j * m];
            for r in 0..m {
                let a = -lo[r] / dx;
                for c in 0..m {
                    b[r * m + c] -= a * xp[r * m + c];
                }
                d[r] -= a * yp[r];
            }
        }
        let lu = Lu::factor(m, b)?;
        lu.solve(&mut d);
        ys[j * m..(j + 1) * m].copy_from_slice(&d);
        if j + 1 < nx {
            // columns of M_j^{-1} C_j with C_j = -diag(hi)/dx
            let x = &mut xs[j * m * m..(j + 1) * m * m];
            let mut col = vec![0.0; m];
            for c in 0..m {
                col.iter_mut().for_each(|v| *v = 0.0);
                col[c] = -hi[c] / dx;
                lu.solve(&mut col);
                for r in 0..m {
                    x[r * m + c] = col[r];
                }
            }
        }
    }
    let mut psi = ys;
    for j in (0..nx.saturating_sub(1)).rev() {
        let (head, tail) = psi.split_at_mut((j + 1) * m);
        let next = &tail[..m];
        let x = &xs[j * m * m..(j + 1) * m * m];
        let cur = &mut head[j * m..];
        for r in 0..m {
            let s: f64 = (0..m).map(|c| x[r * m + c] * next[c]).sum();
            cur[r] -= s;
        }
    }

    // F_{j-1/2} per node, with the boundary faces using the inflow data
    let face_current = |f: usize| -> f64 {
        (0..m)
            .map(|k| {
                let g = cond[f * m + k];
                let flux = if f == 0 {
                    g * (psi[k] - params.inflow_left)
                } else if f == nx {
                    g * (params.inflow_right - psi[(nx - 1) * m + k])
                } else {
                    g * (psi[f * m + k] - psi[(f - 1) * m + k])
                };
                w[k] * flux
            })
            .sum()
    };
    let faces: Vec<f64> = (0..=nx).map(face_current).collect();
    let rho: Vec<f64> = (0..nx).map(|j| (0..m).map(|k| w[k] * psi[j * m + k]).sum()).collect();
    let flux = (0..nx).map(|j| [-0.5 * (faces[j] + faces[j + 1]) / coeffs[j].eps, 0.0]).collect();
    Ok(Moments { rho: GridFunction::new(*grid, rho)?, flux })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{Coefficients, Region};

    /// `1/2 int_0^1 exp(-x/mu) dmu` by composite Simpson in `s = mu^2`-free form.
    fn half_e2(x: f64) -> f64 {
        // substitute mu = u^2 to tame the endpoint: dmu = 2u du
        let n = 20_000;
        let h = 1.0 / n as f64;
        let g = |u: f64| if u == 0.0 { 0.0 } else { 2.0 * u * libm::exp(-x / (u * u)) };
        let mut s = g(0.0) + g(1.0);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
        }
        0.5 * s * h / 3.0
    }

    #[test]
    fn pure_absorber_matches_exponential_integral() {
        let g = SpatialGrid::new_1d(0.0, 2.0, 400).unwrap();
        let p = SteadyParams {
            field: CoefficientField::uniform(Coefficients::new(1.0, 0.0, 1.0)).unwrap(),
            inflow_left: 1.0,
            inflow_right: 0.0,
            nodes: 16,
        };
        let out = steady_slab_solve(&g, &p).unwrap();
        let l1: f64 = (0..g.num_cells())
            .map(|c| (out.rho.values()[c] - half_e2(g.center(c)[0])).abs())
            .sum::<f64>()
            * g.dx();
        assert!(l1 < 2e-3, "L1 {l1}");
        assert!(out.rho.values().windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn thick_medium_is_linear_with_constant_flux() {
        let g = SpatialGrid::new_1d(0.0, 1.0, 200).unwrap();
        let p = SteadyParams {
            field: CoefficientField::uniform(Coefficients::new(1e-3, 1.0, 0.0)).unwrap(),
            inflow_left: 1.0,
            inflow_right: 0.0,
            nodes: 16,
        };
        let out = steady_slab_solve(&g, &p).unwrap();
        for c in 0..g.num_cells() {
            let x = g.center(c)[0];
            assert!((out.rho.values()[c] - (1.0 - x)).abs() < 5e-3, "x {x}: {}", out.rho.values()[c]);
        }
        let j0 = out.flux[0][0];
        assert!((j0 - 1.0 / 3.0).abs() < 5e-3, "flux {j0}");
        assert!(out.flux.iter().all(|j| (j[0] - j0).abs() < 1e-9 * j0));
    }

    #[test]
    fn isotropic_inflow_on_both_sides_is_equilibrium() {
        let g = SpatialGrid::new_1d(0.0, 3.0, 30).unwrap();
        let field = CoefficientField::uniform(Coefficients::new(0.5, 1.0, 0.0))
            .unwrap()
            .with_region(Region::Interval { lo: 1.0, hi: 2.0 }, Coefficients::new(0.01, 4.0, 0.0))
            .unwrap();
        let p = SteadyParams { field, inflow_left: 2.5, inflow_right: 2.5, nodes: 16 };
        let out = steady_slab_solve(&g, &p).unwrap();
        let worst = out.rho.values().iter().fold(0.0f64, |m, r| m.max((r - 2.5).abs()));
        assert!(worst < 1e-9, "{worst}");
        assert!(out.flux.iter().all(|j| j[0].abs() < 1e-10));
    }

    #[test]
    fn rejects_void() {
        let g = SpatialGrid::new_1d(0.0, 1.0, 4).unwrap();
        let p = SteadyParams {
            field: CoefficientField::uniform(Coefficients::new(1.0, 0.0, 0.0)).unwrap(),
            inflow_left: 1.0,
            inflow_right: 0.0,
            nodes: 8,
        };
        assert!(steady_slab_solve(&g, &p).is_err());
    }
}
