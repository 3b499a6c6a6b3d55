//! Particle schemes for the linear radiative transport equation in the
//! diffusive scaling,
//!
//! ```text
//! d_t f + (v/eps) . grad_x f = (sigma_s/eps^2) (rho - f) - sigma_a f,
//! ```
//!
//! with directions `v` uniform on `[-1, 1]` (slab) or on the unit circle.
//! As `eps -> 0` the density solves `d_t rho = D div(grad rho / sigma_s) - sigma_a rho`
//! with `D = <v_x^2>` (1/3 for the slab, 1/2 for the circle).
//!
//! Coefficients are looked up at the particle's position at the start of the
//! step and held for the whole step, so a particle crossing a material
//! interface uses the data of the side it started on.

use crate::coefficients::{CoefficientField, Coefficients};
use crate::ensemble::{Particle, SpatialGrid, VelocitySpace};
use crate::error::{require, Error, Result};
use crate::executor::Executor;
use crate::goldstein_taylor::NOISE_REACH;
use crate::simulation::Scheme;
use crate::stochastics::{Geometry, Phase, StepKey};

/// `D = <v_x^2>` over the velocity space.
pub fn diffusion_coefficient(geometry: Geometry) -> f64 {
    match geometry {
        Geometry::Slab1d => 1.0 / 3.0,
        Geometry::Circle2d => 0.5,
    }
}

/// Which velocity enters the diffusive increment of the AP transport step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseSpeed {
    /// Unscaled direction `v`: variance `2 dt^2 v^2/(eps^2 + sigma_s dt)`.
    /// This reproduces the `v (x) v` diffusion of the reformulated equation and
    /// the limiting walk `sqrt(2 dt v^2/sigma_s) xi`.
    #[default]
    Unscaled,
    /// Scaled velocity `eps v/(eps^2 + sigma_s dt)` in place of `v`. The
    /// increment then vanishes as `eps -> 0`; kept only for comparison.
    Scaled,
}

fn relaxation_denominator(c: &Coefficients, dt: f64) -> f64 {
    c.eps * c.eps + c.sigma_s * dt
}

/// Drift speed factor `eps/(eps^2 + sigma_s dt)`.
pub fn apmc_drift_speed(c: &Coefficients, dt: f64) -> f64 {
    c.eps / relaxation_denominator(c, dt)
}

/// `(keep, redraw)` = `(eps^2, sigma_s dt) / (eps^2 + sigma_s dt)`.
pub fn apmc_collision_weights(c: &Coefficients, dt: f64) -> (f64, f64) {
    let denom = relaxation_denominator(c, dt);
    if denom == 0.0 {
        return (1.0, 0.0);
    }
    (c.eps * c.eps / denom, c.sigma_s * dt / denom)
}

/// Removal probability of the implicit absorption step, `sigma_a dt/(1 + sigma_a dt)`.
pub fn apmc_absorption_probability(sigma_a: f64, dt: f64) -> f64 {
    sigma_a * dt / (1.0 + sigma_a * dt)
}

/// Redraw probability of the exact relaxation, `1 - exp(-sigma_s dt/eps^2)`.
pub fn standard_collision_probability(c: &Coefficients, dt: f64) -> f64 {
    -libm::expm1(-c.sigma_s * dt / (c.eps * c.eps))
}

/// Absorption probability of the exact decay, `1 - exp(-sigma_a dt)`.
pub fn standard_absorption_probability(sigma_a: f64, dt: f64) -> f64 {
    -libm::expm1(-sigma_a * dt)
}

fn check_relaxation(c: &Coefficients) -> Result<()> {
    if c.eps == 0.0 && c.sigma_s == 0.0 {
        return Err(Error::InvalidParameter {
            name: "sigma_s",
            value: 0.0,
            reason: "eps and sigma_s cannot both vanish for the AP scheme",
        });
    }
    Ok(())
}

/// Standard deviation of the AP diffusive increment per unit `|v|`.
fn apmc_noise_scale(c: &Coefficients, dt: f64, noise: NoiseSpeed) -> f64 {
    let base = libm::sqrt(2.0 * dt * (dt / relaxation_denominator(c, dt)));
    match noise {
        NoiseSpeed::Unscaled => base,
        NoiseSpeed::Scaled => base * apmc_drift_speed(c, dt),
    }
}

/// Transport-diffusion displacement of the AP scheme for direction `v`.
///
/// The diffusive increment acts along `v` only, with one normal draw `xi`:
/// the diffusion tensor `v (x) v` has rank one.
pub fn apmc_displacement(v: [f64; 2], c: &Coefficients, dt: f64, noise: NoiseSpeed, xi: f64) -> Result<[f64; 2]> {
    check_relaxation(c)?;
    let drift = dt * apmc_drift_speed(c, dt);
    let kick = apmc_noise_scale(c, dt, noise) * xi;
    Ok([drift * v[0] + kick * v[0], drift * v[1] + kick * v[1]])
}

/// Micro–macro variant: same drift, isotropic increment with the averaged
/// coefficient `D` instead of the particle's own `v^2`.
pub fn micro_macro_displacement(v: [f64; 2], c: &Coefficients, dt: f64, d: f64, xi: [f64; 2], dim: usize) -> Result<[f64; 2]> {
    check_relaxation(c)?;
    let drift = dt * apmc_drift_speed(c, dt);
    let amp = libm::sqrt(2.0 * d * dt * (dt / relaxation_denominator(c, dt)));
    let mut out = [drift * v[0] + amp * xi[0], drift * v[1]];
    if dim == 2 {
        out[1] += amp * xi[1];
    }
    Ok(out)
}

fn collide(p: &mut Particle, probability: f64, geometry: Geometry, key: &StepKey) {
    let mut s = key.stream(p.id, Phase::Collision);
    if s.uniform_unit() < probability {
        p.velocity = s.uniform_direction(geometry);
    }
}

fn absorb(p: &mut Particle, probability: f64, key: &StepKey) {
    if probability > 0.0 && key.stream(p.id, Phase::Absorption).uniform_unit() < probability {
        p.alive = false;
    }
}

fn geometry_dim(g: Geometry) -> usize {
    match g {
        Geometry::Slab1d => 1,
        Geometry::Circle2d => 2,
    }
}

fn max_over<F: Fn(&Coefficients) -> f64>(field: &CoefficientField, f: F) -> f64 {
    field.all().map(f).fold(0.0, f64::max)
}

/// Standard splitting: transport at `v/eps`, exact relaxation, exact absorption.
#[derive(Debug, Clone, PartialEq)]
pub struct RtStandard {
    field: CoefficientField,
    geometry: Geometry,
}

impl RtStandard {
    pub fn new(field: CoefficientField, geometry: Geometry) -> Result<Self> {
        for c in field.all() {
            require(c.eps > 0.0, "eps", c.eps, "the standard scheme needs eps > 0")?;
        }
        Ok(Self { field, geometry })
    }
}

impl Scheme for RtStandard {
    fn advance(&self, p: &mut Particle, dt: f64, key: &StepKey) {
        let c = self.field.at(p.position);
        p.position[0] += p.velocity[0] * dt / c.eps;
        p.position[1] += p.velocity[1] * dt / c.eps;
        collide(p, standard_collision_probability(&c, dt), self.geometry, key);
        absorb(p, standard_absorption_probability(c.sigma_a, dt), key);
    }

    fn reach(&self, dt: f64) -> f64 {
        max_over(&self.field, |c| dt / c.eps)
    }

    fn velocity_space(&self) -> VelocitySpace {
        VelocitySpace::Directions(self.geometry)
    }

    fn check_time_step(&self, dt: f64, grid: &SpatialGrid) -> Result<()> {
        let h = (0..grid.dim()).map(|a| grid.spacing(a)).fold(f64::INFINITY, f64::min);
        let limit = self.field.all().map(|c| c.eps * h).fold(f64::INFINITY, f64::min);
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::Unstable { dt, limit, constraint: "standard Monte Carlo transport (dt <= eps dx)" });
        }
        Ok(())
    }
}

/// Asymptotic-preserving scheme built on the even–odd reformulation.
#[derive(Debug, Clone, PartialEq)]
pub struct RtApmc {
    field: CoefficientField,
    geometry: Geometry,
    noise: NoiseSpeed,
}

impl RtApmc {
    pub fn new(field: CoefficientField, geometry: Geometry, noise: NoiseSpeed) -> Result<Self> {
        for c in field.all() {
            check_relaxation(c)?;
        }
        Ok(Self { field, geometry, noise })
    }

    pub fn transport_diffusion(&self, p: &mut Particle, c: &Coefficients, dt: f64, key: &StepKey) {
        let xi = key.stream(p.id, Phase::Transport).standard_normal();
        // coefficients were validated in `new`
        if let Ok(d) = apmc_displacement(p.velocity, c, dt, self.noise, xi) {
            p.position[0] += d[0];
            p.position[1] += d[1];
        }
    }

    pub fn collide(&self, p: &mut Particle, c: &Coefficients, dt: f64, key: &StepKey) {
        collide(p, apmc_collision_weights(c, dt).1, self.geometry, key);
    }

    pub fn absorb(&self, p: &mut Particle, c: &Coefficients, dt: f64, key: &StepKey) {
        absorb(p, apmc_absorption_probability(c.sigma_a, dt), key);
    }

    pub fn field(&self) -> &CoefficientField {
        &self.field
    }
}

impl Scheme for RtApmc {
    fn advance(&self, p: &mut Particle, dt: f64, key: &StepKey) {
        let c = self.field.at(p.position);
        self.transport_diffusion(p, &c, dt, key);
        self.collide(p, &c, dt, key);
        self.absorb(p, &c, dt, key);
    }

    fn reach(&self, dt: f64) -> f64 {
        max_over(&self.field, |c| dt * apmc_drift_speed(c, dt) + NOISE_REACH * apmc_noise_scale(c, dt, self.noise))
    }

    fn velocity_space(&self) -> VelocitySpace {
        VelocitySpace::Directions(self.geometry)
    }
}

/// AP scheme derived from the micro–macro decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct RtMicroMacro {
    field: CoefficientField,
    geometry: Geometry,
}

impl RtMicroMacro {
    pub fn new(field: CoefficientField, geometry: Geometry) -> Result<Self> {
        for c in field.all() {
            check_relaxation(c)?;
        }
        Ok(Self { field, geometry })
    }

    pub fn transport_diffusion(&self, p: &mut Particle, c: &Coefficients, dt: f64, key: &StepKey) {
        let mut s = key.stream(p.id, Phase::Transport);
        let dim = geometry_dim(self.geometry);
        let xi = [s.standard_normal(), if dim == 2 { s.standard_normal() } else { 0.0 }];
        if let Ok(d) = micro_macro_displacement(p.velocity, c, dt, diffusion_coefficient(self.geometry), xi, dim) {
            p.position[0] += d[0];
            p.position[1] += d[1];
        }
    }
}

impl Scheme for RtMicroMacro {
    fn advance(&self, p: &mut Particle, dt: f64, key: &StepKey) {
        let c = self.field.at(p.position);
        self.transport_diffusion(p, &c, dt, key);
        collide(p, apmc_collision_weights(&c, dt).1, self.geometry, key);
        absorb(p, apmc_absorption_probability(c.sigma_a, dt), key);
    }

    fn reach(&self, dt: f64) -> f64 {
        let d = diffusion_coefficient(self.geometry);
        max_over(&self.field, |c| {
            dt * apmc_drift_speed(c, dt) + NOISE_REACH * libm::sqrt(2.0 * d * dt * (dt / relaxation_denominator(c, dt)))
        })
    }

    fn velocity_space(&self) -> VelocitySpace {
        VelocitySpace::Directions(self.geometry)
    }
}

/// Random walk for the limiting diffusion–reaction equation:
/// `X += sqrt(2 D dt/sigma_s) xi` per component, removal with probability
/// `1 - exp(-sigma_a dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RtHeatWalk {
    field: CoefficientField,
    geometry: Geometry,
}

impl RtHeatWalk {
    pub fn new(field: CoefficientField, geometry: Geometry) -> Result<Self> {
        for c in field.all() {
            require(c.sigma_s > 0.0, "sigma_s", c.sigma_s, "the diffusion limit needs sigma_s > 0")?;
        }
        Ok(Self { field, geometry })
    }
}

impl Scheme for RtHeatWalk {
    fn advance(&self, p: &mut Particle, dt: f64, key: &StepKey) {
        let c = self.field.at(p.position);
        let amp = libm::sqrt(2.0 * diffusion_coefficient(self.geometry) / c.sigma_s * dt);
        let mut s = key.stream(p.id, Phase::Transport);
        p.position[0] += amp * s.standard_normal();
        if geometry_dim(self.geometry) == 2 {
            p.position[1] += amp * s.standard_normal();
        }
        absorb(p, standard_absorption_probability(c.sigma_a, dt), key);
    }

    fn reach(&self, dt: f64) -> f64 {
        let d = diffusion_coefficient(self.geometry);
        max_over(&self.field, |c| NOISE_REACH * libm::sqrt(2.0 * d / c.sigma_s * dt))
    }

    fn velocity_space(&self) -> VelocitySpace {
        VelocitySpace::Directions(self.geometry)
    }
}

/// Applies one full scheme step to every live particle without touching
/// boundaries. Absorbed particles are flagged, not removed.
pub fn advance_all<S: Scheme, E: Executor>(scheme: &S, particles: &mut [Particle], dt: f64, key: &StepKey, exec: &E) {
    exec.for_each(particles, |p| {
        if p.alive {
            scheme.advance(p, dt, key)
        }
    });
}
