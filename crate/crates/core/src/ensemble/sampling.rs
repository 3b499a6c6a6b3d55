use alloc::vec::Vec;

use super::{ParticleEnsemble, SpatialGrid, VelocitySpace};
use crate::error::{Error, Result};
use crate::stochastics::{Phase, StepKey};

fn cell_masses(grid: &SpatialGrid, density: &[f64]) -> Result<(Vec<f64>, f64)> {
    if density.len() != grid.num_cells() {
        return Err(Error::GridMismatch);
    }
    if density.iter().any(|d| !d.is_finite() || *d < 0.0) {
        return Err(Error::InvalidDensity("density must be finite and nonnegative"));
    }
    let vol = grid.cell_volume();
    let mut cdf = Vec::with_capacity(density.len());
    let mut acc = 0.0;
    for d in density {
        acc += d * vol;
        cdf.push(acc);
    }
    Ok((cdf, acc))
}

/// Samples `n` particles with positions distributed like `density` and
/// velocities from the isotropic equilibrium.
///
/// Each particle independently picks a cell with probability proportional to
/// the cell mass and a uniform position inside it, using its own stream, so
/// the per-cell counts are multinomial. The particle mass is the total mass
/// divided by `n`.
pub fn sample_from_density(
    grid: &SpatialGrid,
    density: &[f64],
    n: usize,
    velocity_space: VelocitySpace,
    seed: u64,
) -> Result<ParticleEnsemble> {
    if n == 0 {
        return Err(Error::InvalidParameter { name: "n", value: 0.0, reason: "at least one particle is required" });
    }
    let (cdf, total) = cell_masses(grid, density)?;
    if !(total > 0.0) {
        return Err(Error::InvalidDensity("density carries no mass"));
    }
    let mut ensemble = ParticleEnsemble::new(total / n as f64, velocity_space)?;
    fill(&mut ensemble, grid, &cdf, total, n, seed);
    Ok(ensemble)
}

/// Samples `round(mass / particle_mass)` particles; an all-zero density
/// yields an empty ensemble.
pub fn sample_with_particle_mass(
    grid: &SpatialGrid,
    density: &[f64],
    particle_mass: f64,
    velocity_space: VelocitySpace,
    seed: u64,
) -> Result<ParticleEnsemble> {
    let (cdf, total) = cell_masses(grid, density)?;
    let mut ensemble = ParticleEnsemble::new(particle_mass, velocity_space)?;
    let n = libm::round(total / particle_mass) as usize;
    if n > 0 {
        fill(&mut ensemble, grid, &cdf, total, n, seed);
    }
    Ok(ensemble)
}

fn fill(ensemble: &mut ParticleEnsemble, grid: &SpatialGrid, cdf: &[f64], total: f64, n: usize, seed: u64) {
    let key = StepKey::new(seed, 0);
    let space = ensemble.velocity_space();
    for _ in 0..n {
        let id = ensemble.allocate_id();
        let mut s = key.stream(id, Phase::Initial);
        let target = s.uniform_unit() * total;
        // first cell whose cumulative mass exceeds the target; never a massless cell
        let cell = cdf.partition_point(|&c| c <= target).min(cdf.len() - 1);
        let origin = grid.cell_origin(cell);
        let mut position = [0.0; 2];
        for axis in 0..grid.dim() {
            let h = grid.spacing(axis);
            let x = origin[axis] + s.uniform_unit() * h;
            position[axis] = x.min((origin[axis] + h).next_down());
        }
        let velocity = space.sample(&mut s);
        ensemble.particles.push(super::Particle::new(id, position, velocity));
    }
}
