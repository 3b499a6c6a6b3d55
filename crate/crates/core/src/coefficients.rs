//! Piecewise-constant material data: scaling parameter `eps`, scattering
//! coefficient `sigma_s` and absorption coefficient `sigma_a`.

use alloc::vec::Vec;

use crate::ensemble::SpatialGrid;
use crate::error::{require, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub eps: f64,
    pub sigma_s: f64,
    pub sigma_a: f64,
}

impl Coefficients {
    pub const fn new(eps: f64, sigma_s: f64, sigma_a: f64) -> Self {
        Self { eps, sigma_s, sigma_a }
    }

    pub fn validate(&self) -> Result<()> {
        require(self.eps.is_finite() && self.eps >= 0.0, "eps", self.eps, "must be finite and >= 0")?;
        require(
            self.sigma_s.is_finite() && self.sigma_s >= 0.0,
            "sigma_s",
            self.sigma_s,
            "must be finite and >= 0",
        )?;
        require(
            self.sigma_a.is_finite() && self.sigma_a >= 0.0,
            "sigma_a",
            self.sigma_a,
            "must be finite and >= 0",
        )
    }

    /// Total transport coefficient `sigma_s + eps^2 sigma_a`.
    pub fn total(&self) -> f64 {
        self.sigma_s + self.eps * self.eps * self.sigma_a
    }
}

/// Subset of the spatial domain. Bounds are half-open, `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Interval { lo: f64, hi: f64 },
    Rect { x: [f64; 2], y: [f64; 2] },
    Disk { center: [f64; 2], radius: f64 },
}

impl Region {
    pub fn contains(&self, pos: [f64; 2]) -> bool {
        match *self {
            Region::Interval { lo, hi } => pos[0] >= lo && pos[0] < hi,
            Region::Rect { x, y } => pos[0] >= x[0] && pos[0] < x[1] && pos[1] >= y[0] && pos[1] < y[1],
            Region::Disk { center, radius } => {
                let dx = pos[0] - center[0];
                let dy = pos[1] - center[1];
                dx * dx + dy * dy < radius * radius
            }
        }
    }
}

/// Background coefficients overridden region by region; later regions win.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    background: Coefficients,
    regions: Vec<(Region, Coefficients)>,
    clamp: Option<SpatialGrid>,
}

impl CoefficientField {
    pub fn uniform(c: Coefficients) -> Result<Self> {
        c.validate()?;
        Ok(Self { background: c, regions: Vec::new(), clamp: None })
    }

    pub fn with_region(mut self, region: Region, c: Coefficients) -> Result<Self> {
        c.validate()?;
        self.regions.push((region, c));
        Ok(self)
    }

    /// Positions outside `grid` take the coefficients of the nearest point
    /// of the domain, so ghost particles see the medium next to the boundary.
    pub fn clamped_to(mut self, grid: &SpatialGrid) -> Self {
        self.clamp = Some(*grid);
        self
    }

    pub fn background(&self) -> Coefficients {
        self.background
    }

    pub fn regions(&self) -> &[(Region, Coefficients)] {
        &self.regions
    }

    /// Every distinct coefficient set that can be returned by [`Self::at`].
    pub fn all(&self) -> impl Iterator<Item = &Coefficients> {
        core::iter::once(&self.background).chain(self.regions.iter().map(|(_, c)| c))
    }

    pub fn at(&self, mut pos: [f64; 2]) -> Coefficients {
        if let Some(g) = &self.clamp {
            for (axis, x) in pos.iter_mut().enumerate().take(g.dim()) {
                *x = x.max(g.lower()[axis]).min(g.upper()[axis].next_down());
            }
        }
        self.regions
            .iter()
            .rev()
            .find(|(r, _)| r.contains(pos))
            .map_or(self.background, |(_, c)| *c)
    }

    /// Coefficients sampled at the cell centres of `grid`.
    pub fn on_grid(&self, grid: &SpatialGrid) -> Vec<Coefficients> {
        (0..grid.num_cells()).map(|c| self.at(grid.center(c))).collect()
    }
}
