use super::{Particle, ParticleEnsemble, SpatialGrid};
use crate::error::{Error, Result};
use crate::stochastics::{Phase, StepKey, AUXILIARY_STREAM_BASE};

/// Upper bound on the ghost layer thickness, in cells.
pub const MAX_GHOST_LAYERS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Periodic,
    /// Isotropic equilibrium inflow at the given density. Zero density is an
    /// absorbing (vacuum) boundary.
    Dirichlet { density: f64 },
}

/// Boundary conditions on the four sides; one-dimensional runs ignore
/// `bottom` and `top`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundaries {
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
    pub bottom: BoundaryCondition,
    pub top: BoundaryCondition,
}

impl Boundaries {
    pub fn periodic() -> Self {
        let p = BoundaryCondition::Periodic;
        Self { left: p, right: p, bottom: p, top: p }
    }

    /// Dirichlet data on the two ends of a 1D domain.
    pub fn dirichlet(left: f64, right: f64) -> Self {
        Self {
            left: BoundaryCondition::Dirichlet { density: left },
            right: BoundaryCondition::Dirichlet { density: right },
            bottom: BoundaryCondition::Periodic,
            top: BoundaryCondition::Periodic,
        }
    }

    fn sides(&self, axis: usize) -> (BoundaryCondition, BoundaryCondition) {
        if axis == 0 {
            (self.left, self.right)
        } else {
            (self.bottom, self.top)
        }
    }

    pub fn is_periodic(&self, axis: usize) -> bool {
        matches!(self.sides(axis).0, BoundaryCondition::Periodic)
    }

    pub fn validate(&self, grid: &SpatialGrid) -> Result<()> {
        for axis in 0..grid.dim() {
            let (lo, hi) = self.sides(axis);
            let periodic = |b: BoundaryCondition| matches!(b, BoundaryCondition::Periodic);
            if periodic(lo) != periodic(hi) {
                return Err(Error::Unsupported("periodic boundaries must be paired on an axis"));
            }
            for b in [lo, hi] {
                if let BoundaryCondition::Dirichlet { density } = b {
                    if !(density.is_finite() && density >= 0.0) {
                        return Err(Error::InvalidDensity("prescribed boundary density must be finite and >= 0"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// What a boundary update did.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BoundaryReport {
    /// Live particles that left through a Dirichlet side.
    pub deleted: usize,
    /// Ghost particles that moved into the domain.
    pub entered: usize,
    /// Fresh ghost particles created by the refill.
    pub injected: usize,
}

/// Ghost layers needed to cover a per-step displacement of `reach`.
pub fn ghost_layers_for_reach(grid: &SpatialGrid, reach: f64) -> usize {
    let h = (0..grid.dim()).map(|a| grid.spacing(a)).fold(f64::INFINITY, f64::min);
    let layers = libm::ceil(reach / h);
    if !(layers >= 1.0) {
        1
    } else if layers >= MAX_GHOST_LAYERS as f64 {
        MAX_GHOST_LAYERS
    } else {
        layers as usize
    }
}

fn wrap(x: f64, lo: f64, hi: f64) -> f64 {
    if x >= lo && x < hi {
        return x;
    }
    let len = hi - lo;
    let y = lo + (x - lo) - len * libm::floor((x - lo) / len);
    if y >= hi || y < lo {
        lo
    } else {
        y
    }
}

fn inside_dirichlet_axes(grid: &SpatialGrid, bcs: &Boundaries, pos: [f64; 2]) -> bool {
    (0..grid.dim()).all(|a| bcs.is_periodic(a) || (pos[a] >= grid.lower()[a] && pos[a] < grid.upper()[a]))
}

/// Enforces the boundary conditions after a transport step.
///
/// Periodic axes wrap positions. On Dirichlet sides, live particles that left
/// the domain are deleted, ghosts that entered become live, and the ghost
/// layers are refilled to the prescribed density.
pub fn apply_boundaries(
    ensemble: &mut ParticleEnsemble,
    grid: &SpatialGrid,
    bcs: &Boundaries,
    ghost_layers: usize,
    key: StepKey,
) -> Result<BoundaryReport> {
    bcs.validate(grid)?;
    let mut report = BoundaryReport::default();
    let (particles, ghosts) = ensemble.storage_mut();
    for p in particles.iter_mut().chain(ghosts.iter_mut()) {
        for axis in 0..grid.dim() {
            if bcs.is_periodic(axis) {
                p.position[axis] = wrap(p.position[axis], grid.lower()[axis], grid.upper()[axis]);
            }
        }
    }
    let before = particles.len();
    particles.retain(|p| inside_dirichlet_axes(grid, bcs, p.position));
    report.deleted = before - particles.len();
    for g in ghosts.drain(..) {
        if g.alive && inside_dirichlet_axes(grid, bcs, g.position) {
            particles.push(g);
            report.entered += 1;
        }
    }
    report.injected = refill_ghosts(ensemble, grid, bcs, ghost_layers, key, Phase::Boundary)?;
    Ok(report)
}

/// Replaces the ghost population with fresh equilibrium particles.
///
/// Every ghost cell receives `density * |cell| / m_p` particles on average
/// (stochastic rounding of the fractional part), uniformly placed, with
/// velocities drawn from the isotropic equilibrium.
pub fn refill_ghosts(
    ensemble: &mut ParticleEnsemble,
    grid: &SpatialGrid,
    bcs: &Boundaries,
    ghost_layers: usize,
    key: StepKey,
    phase: Phase,
) -> Result<usize> {
    bcs.validate(grid)?;
    ensemble.storage_mut().1.clear();
    let m_p = ensemble.particle_mass();
    let space = ensemble.velocity_space();
    let h = [grid.spacing(0), grid.spacing(1)];
    let vol = grid.cell_volume();
    let mut injected = 0;

    let mut cells: alloc::vec::Vec<([f64; 2], f64)> = alloc::vec::Vec::new();
    for axis in 0..grid.dim() {
        let (lo_bc, hi_bc) = bcs.sides(axis);
        let other = 1 - axis;
        // bands on the first axis also cover the corners
        let (start, end) = if grid.dim() == 1 {
            (0i64, 1i64)
        } else if axis == 0 && !bcs.is_periodic(other) {
            (-(ghost_layers as i64), (grid.cells()[other] + ghost_layers) as i64)
        } else {
            (0, grid.cells()[other] as i64)
        };
        for (bc, upper) in [(lo_bc, false), (hi_bc, true)] {
            let BoundaryCondition::Dirichlet { density } = bc else { continue };
            for layer in 0..ghost_layers {
                let coord = if upper {
                    grid.upper()[axis] + layer as f64 * h[axis]
                } else {
                    grid.lower()[axis] - (layer + 1) as f64 * h[axis]
                };
                for k in start..end {
                    let mut origin = [0.0; 2];
                    origin[axis] = coord;
                    origin[other] = grid.lower()[other] + k as f64 * h[other];
                    cells.push((origin, density));
                }
            }
        }
    }

    for (index, (origin, density)) in cells.into_iter().enumerate() {
        let expected = density * vol / m_p;
        let rounded = libm::round(expected);
        let count = if (expected - rounded).abs() <= 1e-9 * expected.max(1.0) {
            rounded as usize
        } else {
            let mut s = key.stream(AUXILIARY_STREAM_BASE + index as u64, phase);
            libm::floor(expected + s.uniform_unit()) as usize
        };
        for _ in 0..count {
            let id = ensemble.allocate_id();
            let mut s = key.stream(id, phase);
            let mut position = [0.0; 2];
            for axis in 0..grid.dim() {
                position[axis] = (origin[axis] + s.uniform_unit() * h[axis]).min((origin[axis] + h[axis]).next_down());
            }
            let velocity = space.sample(&mut s);
            ensemble.storage_mut().1.push(Particle::new(id, position, velocity));
        }
        injected += count;
    }
    Ok(injected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{VelocitySpace, histogram_density};

    #[test]
    fn refill_count_matches_arithmetic() {
        let g = SpatialGrid::new_1d(0.0, 1.0, 100).unwrap();
        let mut e = ParticleEnsemble::new(1e-4, VelocitySpace::TwoSpeed).unwrap();
        let n = refill_ghosts(&mut e, &g, &Boundaries::dirichlet(1.0, 0.0), 1, StepKey::new(0, 0), Phase::Initial)
            .unwrap();
        assert_eq!(n, 100);
        assert!(e.ghosts().iter().all(|p| p.position[0] >= -0.01 && p.position[0] < 0.0));
    }

    #[test]
    fn zero_density_injects_nothing() {
        let g = SpatialGrid::new_1d(0.0, 1.0, 10).unwrap();
        let mut e = ParticleEnsemble::new(1e-3, VelocitySpace::TwoSpeed).unwrap();
        refill_ghosts(&mut e, &g, &Boundaries::dirichlet(0.0, 0.0), 3, StepKey::new(0, 0), Phase::Initial).unwrap();
        assert!(e.ghosts().is_empty());
    }

    #[test]
    fn negative_density_rejected() {
        let g = SpatialGrid::new_1d(0.0, 1.0, 10).unwrap();
        let mut e = ParticleEnsemble::new(1e-3, VelocitySpace::TwoSpeed).unwrap();
        let r = refill_ghosts(&mut e, &g, &Boundaries::dirichlet(-1.0, 0.0), 1, StepKey::new(0, 0), Phase::Initial);
        assert!(matches!(r, Err(Error::InvalidDensity(_))));
    }

    #[test]
    fn leavers_deleted_and_ghosts_enter() {
        let g = SpatialGrid::new_1d(0.0, 1.0, 10).unwrap();
        let mut e = ParticleEnsemble::from_particles(
            0.01,
            VelocitySpace::TwoSpeed,
            [([1.02, 0.0], [1.0, 0.0]), ([0.5, 0.0], [1.0, 0.0]), ([-0.3, 0.0], [-1.0, 0.0])],
        )
        .unwrap();
        refill_ghosts(&mut e, &g, &Boundaries::dirichlet(1.0, 0.0), 1, StepKey::new(0, 0), Phase::Initial).unwrap();
        assert_eq!(e.ghosts().len(), 10);
        // move every ghost into the first cell
        for p in e.ghosts_mut() {
            p.position[0] += 0.1;
        }
        let r = apply_boundaries(&mut e, &g, &Boundaries::dirichlet(1.0, 0.0), 1, StepKey::new(0, 0)).unwrap();
        assert_eq!(r.deleted, 2);
        assert_eq!(r.entered, 10);
        assert_eq!(r.injected, 10);
        assert_eq!(e.live_count(), 11);
        assert!(histogram_density(&e, &g).is_ok());
    }

    #[test]
    fn periodic_wrap_preserves_count() {
        let g = SpatialGrid::new_1d(0.0, 2.0, 10).unwrap();
        let mut e = ParticleEnsemble::from_particles(
            0.01,
            VelocitySpace::TwoSpeed,
            [([2.5, 0.0], [1.0, 0.0]), ([-0.25, 0.0], [1.0, 0.0]), ([2.0, 0.0], [1.0, 0.0])],
        )
        .unwrap();
        apply_boundaries(&mut e, &g, &Boundaries::periodic(), 1, StepKey::new(0, 0)).unwrap();
        let xs: alloc::vec::Vec<f64> = e.particles().iter().map(|p| p.position[0]).collect();
        assert!((xs[0] - 0.5).abs() < 1e-15);
        assert!((xs[1] - 1.75).abs() < 1e-15);
        assert_eq!(xs[2], 0.0);
        assert!(e.ghosts().is_empty());
    }

    #[test]
    fn unpaired_periodic_rejected() {
        let g = SpatialGrid::new_1d(0.0, 1.0, 10).unwrap();
        let bcs = Boundaries {
            left: BoundaryCondition::Periodic,
            right: BoundaryCondition::Dirichlet { density: 1.0 },
            ..Boundaries::periodic()
        };
        assert!(bcs.validate(&g).is_err());
    }

    #[test]
    fn two_dimensional_bands_cover_corners() {
        let g = SpatialGrid::new_2d([0.0; 2], [1.0; 2], [4, 4]).unwrap();
        let d = BoundaryCondition::Dirichlet { density: 1.0 };
        let bcs = Boundaries { left: d, right: d, bottom: d, top: d };
        let mut e = ParticleEnsemble::new(0.0625 / 8.0, VelocitySpace::TwoSpeed).unwrap();
        let n = refill_ghosts(&mut e, &g, &bcs, 1, StepKey::new(0, 0), Phase::Initial).unwrap();
        // ring of 6*6 - 4*4 = 20 ghost cells with 8 particles each
        assert_eq!(n, 160);
        assert!(e.ghosts().iter().all(|p| !g.contains(p.position)));
    }

    #[test]
    fn layers_from_reach() {
        let g = SpatialGrid::new_1d(0.0, 1.0, 100).unwrap();
        assert_eq!(ghost_layers_for_reach(&g, 0.0), 1);
        assert_eq!(ghost_layers_for_reach(&g, 0.025), 3);
        assert_eq!(ghost_layers_for_reach(&g, 1e9), MAX_GHOST_LAYERS);
    }
}
