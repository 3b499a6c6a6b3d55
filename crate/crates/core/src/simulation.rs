//! Time-stepping driver shared by every particle scheme.

use crate::ensemble::{
    apply_boundaries, cell_stats, ghost_layers_for_reach, refill_ghosts, Boundaries, BoundaryReport, CellStats,
    Particle, ParticleEnsemble, SpatialGrid, VelocitySpace,
};
use crate::error::{require, Error, Result};
use crate::executor::Executor;
use crate::stochastics::{Phase, StepKey};

/// A particle scheme: everything that happens to one particle in one step.
pub trait Scheme: Sync {
    /// Advances one particle over `dt`, drawing only from the particle's own
    /// stream at `key`. Absorption clears `alive`.
    fn advance(&self, particle: &mut Particle, dt: f64, key: &StepKey);

    /// Upper bound on the displacement in one step, used to size the ghost
    /// layers. Gaussian increments are bounded at six standard deviations.
    fn reach(&self, dt: f64) -> f64;

    fn velocity_space(&self) -> VelocitySpace;

    /// Rejects time steps the scheme cannot resolve on `grid`.
    fn check_time_step(&self, _dt: f64, _grid: &SpatialGrid) -> Result<()> {
        Ok(())
    }
}

/// Ensemble, mesh, boundary data and a scheme, advanced step by step.
///
/// Each step maps the scheme over live and ghost particles, removes absorbed
/// particles and then applies the boundary conditions.
#[derive(Debug, Clone)]
pub struct Simulation<S> {
    grid: SpatialGrid,
    boundaries: Boundaries,
    scheme: S,
    ensemble: ParticleEnsemble,
    seed: u64,
    step: u64,
    time: f64,
    ghost_layers: usize,
}

impl<S: Scheme> Simulation<S> {
    /// `nominal_dt` sizes the ghost layers and is checked against the scheme.
    pub fn new(
        grid: SpatialGrid,
        boundaries: Boundaries,
        scheme: S,
        mut ensemble: ParticleEnsemble,
        seed: u64,
        nominal_dt: f64,
    ) -> Result<Self> {
        require(nominal_dt.is_finite() && nominal_dt > 0.0, "dt", nominal_dt, "must be finite and positive")?;
        boundaries.validate(&grid)?;
        scheme.check_time_step(nominal_dt, &grid)?;
        if ensemble.velocity_space() != scheme.velocity_space() {
            return Err(Error::Unsupported("ensemble velocities do not match the scheme"));
        }
        if let Some(p) = ensemble.particles().iter().find(|p| !grid.contains(p.position)) {
            return Err(Error::ParticleOutsideDomain { id: p.id, position: p.position });
        }
        let ghost_layers = ghost_layers_for_reach(&grid, scheme.reach(nominal_dt));
        refill_ghosts(&mut ensemble, &grid, &boundaries, ghost_layers, StepKey::new(seed, 0), Phase::Initial)?;
        Ok(Self { grid, boundaries, scheme, ensemble, seed, step: 0, time: 0.0, ghost_layers })
    }

    /// One full step of length `dt` (may be shorter than the nominal step).
    pub fn step<E: Executor>(&mut self, dt: f64, executor: &E) -> Result<BoundaryReport> {
        require(dt.is_finite() && dt > 0.0, "dt", dt, "must be finite and positive")?;
        let key = StepKey::new(self.seed, self.step);
        let scheme = &self.scheme;
        let kernel = |p: &mut Particle| {
            if p.alive {
                scheme.advance(p, dt, &key);
            }
        };
        executor.for_each(self.ensemble.particles_mut(), kernel);
        executor.for_each(self.ensemble.ghosts_mut(), kernel);
        self.ensemble.remove_dead();
        let report = apply_boundaries(&mut self.ensemble, &self.grid, &self.boundaries, self.ghost_layers, key)?;
        self.step += 1;
        self.time += dt;
        Ok(report)
    }

    pub fn stats(&self, eps: Option<&[f64]>) -> Result<CellStats> {
        cell_stats(&self.ensemble, &self.grid, eps)
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn scheme(&self) -> &S {
        &self.scheme
    }

    pub fn ensemble(&self) -> &ParticleEnsemble {
        &self.ensemble
    }

    pub fn ensemble_mut(&mut self) -> &mut ParticleEnsemble {
        &mut self.ensemble
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn ghost_layers(&self) -> usize {
        self.ghost_layers
    }
}

/// Step lengths reaching exactly `final_time`: full steps of `dt` followed by
/// a shortened last step when `final_time` is not a multiple of `dt`.
pub fn step_schedule(final_time: f64, dt: f64) -> Result<alloc::vec::Vec<f64>> {
    require(dt.is_finite() && dt > 0.0, "dt", dt, "must be finite and positive")?;
    require(final_time.is_finite() && final_time >= 0.0, "final_time", final_time, "must be finite and >= 0")?;
    let ratio = final_time / dt;
    let full = libm::floor(ratio + 1e-9) as usize;
    let mut steps = alloc::vec![dt; full];
    let rest = final_time - full as f64 * dt;
    if rest > 1e-9 * dt {
        steps.push(rest);
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_hits_final_time() {
        let s = step_schedule(0.03, 1.6e-4).unwrap();
        assert_eq!(s.len(), 188);
        let total: f64 = s.iter().sum();
        assert!((total - 0.03).abs() < 1e-12);
        assert_eq!(step_schedule(1.0, 0.25).unwrap().len(), 4);
        assert_eq!(step_schedule(0.1, 0.01).unwrap().len(), 10);
        assert!(step_schedule(0.0, 0.1).unwrap().is_empty());
    }
}
