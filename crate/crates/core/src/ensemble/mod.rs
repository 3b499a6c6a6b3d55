//! Particle storage, empirical-measure estimators, initial sampling and
//! boundary handling shared by both kinetic models.

mod boundary;
mod estimators;
mod grid;
mod sampling;

use alloc::vec::Vec;

pub use boundary::{apply_boundaries, refill_ghosts, ghost_layers_for_reach, BoundaryCondition, BoundaryReport, Boundaries};
pub use estimators::{cell_counts, cell_stats, flux_estimate, histogram_density, CellStats, TimeAverage};
pub use grid::SpatialGrid;
pub use sampling::{sample_from_density, sample_with_particle_mass};

use crate::error::{require, Result};
use crate::stochastics::{Geometry, RngStream};

/// One computational particle of the empirical measure.
///
/// `velocity` holds the unscaled direction: `[+1, 0]` or `[-1, 0]` for the
/// two-speed model, `[v, 0]` with `v` in `[-1, 1]` for the slab, and a unit
/// vector for the circle. The physical speed is applied by the scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub id: u64,
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    pub alive: bool,
}

impl Particle {
    pub fn new(id: u64, position: [f64; 2], velocity: [f64; 2]) -> Self {
        Self { id, position, velocity, alive: true }
    }
}

/// Set of admissible velocity labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocitySpace {
    /// Goldstein–Taylor labels `+1` / `-1`.
    TwoSpeed,
    /// Radiative transport directions.
    Directions(Geometry),
}

impl VelocitySpace {
    /// Draws from the isotropic equilibrium. Consumes one counter.
    pub fn sample(&self, stream: &mut RngStream) -> [f64; 2] {
        match self {
            VelocitySpace::TwoSpeed => {
                if stream.uniform_unit() < 0.5 {
                    [1.0, 0.0]
                } else {
                    [-1.0, 0.0]
                }
            }
            VelocitySpace::Directions(g) => stream.uniform_direction(*g),
        }
    }

    /// Whether `v` is a legal label in this space.
    pub fn admits(&self, v: [f64; 2]) -> bool {
        match self {
            VelocitySpace::TwoSpeed => (v[0] == 1.0 || v[0] == -1.0) && v[1] == 0.0,
            VelocitySpace::Directions(Geometry::Slab1d) => (-1.0..=1.0).contains(&v[0]) && v[1] == 0.0,
            VelocitySpace::Directions(Geometry::Circle2d) => (libm::hypot(v[0], v[1]) - 1.0).abs() < 1e-12,
        }
    }
}

/// Fixed-mass particle collection.
///
/// Live particles lie inside the domain. Ghost particles sit in the boundary
/// layers outside the domain; they are transported with everything else and
/// become live when they enter the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    particles: Vec<Particle>,
    ghosts: Vec<Particle>,
    particle_mass: f64,
    next_id: u64,
    velocity_space: VelocitySpace,
}

impl ParticleEnsemble {
    pub fn new(particle_mass: f64, velocity_space: VelocitySpace) -> Result<Self> {
        require(
            particle_mass.is_finite() && particle_mass > 0.0,
            "particle_mass",
            particle_mass,
            "must be finite and positive",
        )?;
        Ok(Self { particles: Vec::new(), ghosts: Vec::new(), particle_mass, next_id: 0, velocity_space })
    }

    /// Builds an ensemble from explicit particles; ids are reassigned `0..n`.
    pub fn from_particles(
        particle_mass: f64,
        velocity_space: VelocitySpace,
        particles: impl IntoIterator<Item = ([f64; 2], [f64; 2])>,
    ) -> Result<Self> {
        let mut e = Self::new(particle_mass, velocity_space)?;
        for (x, v) in particles {
            e.push(x, v);
        }
        Ok(e)
    }

    /// Adds a live particle and returns its id.
    pub fn push(&mut self, position: [f64; 2], velocity: [f64; 2]) -> u64 {
        let id = self.allocate_id();
        self.particles.push(Particle::new(id, position, velocity));
        id
    }

    pub(crate) fn allocate_id(&mut self) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn particles_mut(&mut self) -> &mut [Particle] {
        &mut self.particles
    }

    pub fn ghosts(&self) -> &[Particle] {
        &self.ghosts
    }

    pub fn ghosts_mut(&mut self) -> &mut [Particle] {
        &mut self.ghosts
    }

    pub(crate) fn storage_mut(&mut self) -> (&mut Vec<Particle>, &mut Vec<Particle>) {
        (&mut self.particles, &mut self.ghosts)
    }

    pub fn particle_mass(&self) -> f64 {
        self.particle_mass
    }

    pub fn velocity_space(&self) -> VelocitySpace {
        self.velocity_space
    }

    pub fn live_count(&self) -> usize {
        self.particles.iter().filter(|p| p.alive).count()
    }

    pub fn total_mass(&self) -> f64 {
        self.particle_mass * self.live_count() as f64
    }

    /// Drops particles flagged dead (absorbed); returns how many were removed.
    pub fn remove_dead(&mut self) -> usize {
        let before = self.particles.len() + self.ghosts.len();
        self.particles.retain(|p| p.alive);
        self.ghosts.retain(|p| p.alive);
        before - self.particles.len() - self.ghosts.len()
    }
}
