//! Particle schemes for the two-speed Goldstein–Taylor model
//!
//! ```text
//! d_t f+ + (1/eps) d_x f+ = (f- - f+) / (2 eps^2)
//! d_t f- - (1/eps) d_x f- = (f+ - f-) / (2 eps^2)
//! ```
//!
//! whose density `rho = f+ + f-` tends to the heat equation `d_t rho = d_xx rho`
//! as `eps -> 0`.
//!
//! * [`GtStandard`]: free transport at speed `+-1/eps` followed by the exact
//!   relaxation, which redraws a label with probability `1 - exp(-dt/eps^2)`.
//! * [`GtApmc`]: the asymptotic-preserving scheme. Particles drift at the
//!   bounded speed `+-eps/(eps^2 + dt)` and receive a Brownian increment of
//!   variance `2 dt^2/(eps^2 + dt)`; labels are redrawn with probability
//!   `dt/(eps^2 + dt)`. At `eps = 0` this is exactly the heat random walk.
//! * [`HeatWalk`]: `X += sqrt(2 D dt) xi`.

use crate::ensemble::{Particle, SpatialGrid, VelocitySpace};
use crate::error::{require, Error, Result};
use crate::executor::Executor;
use crate::simulation::Scheme;
use crate::stochastics::{Phase, StepKey};

/// Gaussian increments are treated as bounded by this many deviations.
pub(crate) const NOISE_REACH: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtParams {
    pub eps: f64,
    pub dt: f64,
}

impl GtParams {
    pub fn new(eps: f64, dt: f64) -> Result<Self> {
        require(eps.is_finite() && eps >= 0.0, "eps", eps, "must be finite and >= 0")?;
        require(dt.is_finite() && dt > 0.0, "dt", dt, "must be finite and positive")?;
        Ok(Self { eps, dt })
    }
}

/// Characteristic speeds `+-eps/(eps^2 + dt)` of the reformulated system.
pub fn char_speeds(eps: f64, dt: f64) -> Result<(f64, f64)> {
    require(eps.is_finite() && eps >= 0.0, "eps", eps, "must be finite and >= 0")?;
    require(dt.is_finite() && dt >= 0.0, "dt", dt, "must be finite and >= 0")?;
    if eps == 0.0 && dt == 0.0 {
        return Err(Error::InvalidParameter { name: "eps", value: eps, reason: "eps and dt cannot both vanish" });
    }
    let lambda = eps / (eps * eps + dt);
    Ok((lambda, -lambda))
}

/// `(keep, redraw)` = `(eps^2, dt) / (eps^2 + dt)`.
pub fn apmc_collision_weights(eps: f64, dt: f64) -> (f64, f64) {
    let denom = eps * eps + dt;
    (eps * eps / denom, dt / denom)
}

/// Redraw probability of the exact relaxation, `1 - exp(-dt/eps^2)`.
pub fn standard_redraw_probability(eps: f64, dt: f64) -> f64 {
    -libm::expm1(-dt / (eps * eps))
}

pub fn standard_displacement(label: f64, eps: f64, dt: f64) -> f64 {
    label * dt / eps
}

/// Standard deviation `sqrt(2 dt^2/(eps^2 + dt))` of the diffusive increment.
///
/// Written so that `eps = 0` gives exactly `sqrt(2 dt)`.
pub fn apmc_noise_amplitude(eps: f64, dt: f64) -> f64 {
    libm::sqrt(2.0 * dt * (dt / (eps * eps + dt)))
}

/// One transport-diffusion displacement for label `+-1` and normal draw `xi`.
pub fn apmc_displacement(label: f64, eps: f64, dt: f64, xi: f64) -> f64 {
    let drift = dt * label * (eps / (eps * eps + dt));
    drift + apmc_noise_amplitude(eps, dt) * xi
}

/// Heat-equation increment `sqrt(2 D dt) xi`.
pub fn heat_displacement(diffusivity: f64, dt: f64, xi: f64) -> f64 {
    libm::sqrt(2.0 * diffusivity * dt) * xi
}

fn redraw_label(p: &mut Particle, probability: f64, key: &StepKey) {
    let mut s = key.stream(p.id, Phase::Collision);
    if s.uniform_unit() < probability {
        p.velocity = VelocitySpace::TwoSpeed.sample(&mut s);
    }
}

/// Standard splitting scheme; requires `eps > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtStandard {
    eps: f64,
}

impl GtStandard {
    pub fn new(eps: f64) -> Result<Self> {
        require(eps.is_finite() && eps > 0.0, "eps", eps, "the standard scheme needs eps > 0")?;
        Ok(Self { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn transport(&self, p: &mut Particle, dt: f64) {
        p.position[0] += standard_displacement(p.velocity[0], self.eps, dt);
    }

    pub fn collide(&self, p: &mut Particle, dt: f64, key: &StepKey) {
        redraw_label(p, standard_redraw_probability(self.eps, dt), key);
    }
}

impl Scheme for GtStandard {
    fn advance(&self, p: &mut Particle, dt: f64, key: &StepKey) {
        self.transport(p, dt);
        self.collide(p, dt, key);
    }

    fn reach(&self, dt: f64) -> f64 {
        dt / self.eps
    }

    fn velocity_space(&self) -> VelocitySpace {
        VelocitySpace::TwoSpeed
    }

    /// The transport speed `1/eps` must not carry a particle across more
    /// than one cell per step, i.e. `dt <= eps * dx`.
    fn check_time_step(&self, dt: f64, grid: &SpatialGrid) -> Result<()> {
        let limit = self.eps * grid.dx();
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::Unstable { dt, limit, constraint: "standard Monte Carlo transport (dt <= eps dx)" });
        }
        Ok(())
    }
}

/// Asymptotic-preserving scheme; accepts `eps = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtApmc {
    eps: f64,
}

impl GtApmc {
    pub fn new(eps: f64) -> Result<Self> {
        require(eps.is_finite() && eps >= 0.0, "eps", eps, "must be finite and >= 0")?;
        Ok(Self { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn transport_diffusion(&self, p: &mut Particle, dt: f64, key: &StepKey) {
        let xi = key.stream(p.id, Phase::Transport).standard_normal();
        p.position[0] += apmc_displacement(p.velocity[0], self.eps, dt, xi);
    }

    pub fn collide(&self, p: &mut Particle, dt: f64, key: &StepKey) {
        redraw_label(p, apmc_collision_weights(self.eps, dt).1, key);
    }
}

impl Scheme for GtApmc {
    fn advance(&self, p: &mut Particle, dt: f64, key: &StepKey) {
        self.transport_diffusion(p, dt, key);
        self.collide(p, dt, key);
    }

    fn reach(&self, dt: f64) -> f64 {
        dt * self.eps / (self.eps * self.eps + dt) + NOISE_REACH * apmc_noise_amplitude(self.eps, dt)
    }

    fn velocity_space(&self) -> VelocitySpace {
        VelocitySpace::TwoSpeed
    }
}

/// Brownian motion for `d_t rho = D d_xx rho`; labels are carried along untouched.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatWalk {
    diffusivity: f64,
}

impl HeatWalk {
    pub fn new(diffusivity: f64) -> Result<Self> {
        require(
            diffusivity.is_finite() && diffusivity >= 0.0,
            "diffusivity",
            diffusivity,
            "must be finite and >= 0",
        )?;
        Ok(Self { diffusivity })
    }
}

impl Default for HeatWalk {
    fn default() -> Self {
        Self { diffusivity: 1.0 }
    }
}

impl Scheme for HeatWalk {
    fn advance(&self, p: &mut Particle, dt: f64, key: &StepKey) {
        let xi = key.stream(p.id, Phase::Transport).standard_normal();
        p.position[0] += heat_displacement(self.diffusivity, dt, xi);
    }

    fn reach(&self, dt: f64) -> f64 {
        NOISE_REACH * libm::sqrt(2.0 * self.diffusivity * dt)
    }

    fn velocity_space(&self) -> VelocitySpace {
        VelocitySpace::TwoSpeed
    }
}

/// Standard transport followed by exact relaxation, applied to every live particle.
pub fn gt_standard_step<E: Executor>(particles: &mut [Particle], params: GtParams, key: &StepKey, exec: &E) -> Result<()> {
    let scheme = GtStandard::new(params.eps)?;
    exec.for_each(particles, |p| {
        if p.alive {
            scheme.advance(p, params.dt, key)
        }
    });
    Ok(())
}

pub fn gt_apmc_transport_diffusion<E: Executor>(particles: &mut [Particle], params: GtParams, key: &StepKey, exec: &E) {
    let scheme = GtApmc { eps: params.eps };
    exec.for_each(particles, |p| {
        if p.alive {
            scheme.transport_diffusion(p, params.dt, key)
        }
    });
}

pub fn gt_apmc_collision<E: Executor>(particles: &mut [Particle], params: GtParams, key: &StepKey, exec: &E) {
    let scheme = GtApmc { eps: params.eps };
    exec.for_each(particles, |p| {
        if p.alive {
            scheme.collide(p, params.dt, key)
        }
    });
}

pub fn heat_random_walk_step<E: Executor>(particles: &mut [Particle], dt: f64, key: &StepKey, exec: &E) {
    let walk = HeatWalk::default();
    exec.for_each(particles, |p| {
        if p.alive {
            walk.advance(p, dt, key)
        }
    });
}
