//! Named scenarios for the standard test problems.
//!
//! Particle counts quoted per cell are converted to totals: `cells × per-cell`.

use crate::scenario::{
    BoundariesSpec, BoundarySpec, CoefficientRegion, CoefficientSpec, CoefficientValues, DensityRegion, DensitySpec,
    DtRule, GridSpec, Model, ReferenceSpec, RegionSpec, Scenario, SchemeName, TimeAverageSpec, NoiseSpeedName,
};

pub const NAMES: [&str; 5] =
    ["gt-riemann-diffusive", "gt-riemann-hyperbolic", "rt-slab-ingress", "rt-two-region", "rt-2d-circle"];

pub fn builtin(name: &str) -> Option<Scenario> {
    match name {
        "gt-riemann-diffusive" => Some(gt_riemann(
            name,
            1e-5,
            DtRule::Dx2 { factor: 0.4 },
            0.03,
            ReferenceSpec::new(SchemeName::DiffusionRef, 4),
        )),
        "gt-riemann-hyperbolic" => Some(gt_riemann(
            name,
            0.7,
            DtRule::Dx { factor: 0.5 },
            0.25,
            ReferenceSpec::new(SchemeName::KineticRef, 8),
        )),
        "rt-slab-ingress" => Some(rt_slab_ingress()),
        "rt-two-region" => Some(rt_two_region()),
        "rt-2d-circle" => Some(rt_2d_circle()),
        _ => None,
    }
}

pub fn all() -> Vec<Scenario> {
    NAMES.iter().filter_map(|n| builtin(n)).collect()
}

fn gt_riemann(name: &str, eps: f64, dt: DtRule, t: f64, reference: ReferenceSpec) -> Scenario {
    Scenario {
        name: name.into(),
        description: format!("Goldstein–Taylor Riemann problem, rho = 2 | 1 on (0, 2), eps = {eps}"),
        model: Model::Gt,
        scheme: SchemeName::Apmc,
        grid: GridSpec { lower: vec![0.0], upper: vec![2.0], cells: vec![100] },
        dt,
        final_time: t,
        output_times: vec![],
        particles: 200_000,
        particle_mass: None,
        seed: 20_170_419,
        coefficients: CoefficientSpec::uniform(eps, 1.0, 0.0),
        initial: DensitySpec {
            background: 1.0,
            regions: vec![DensityRegion { region: RegionSpec::Interval { lo: 0.0, hi: 1.0 }, density: 2.0 }],
        },
        boundaries: BoundariesSpec {
            left: BoundarySpec::Dirichlet(2.0),
            right: BoundarySpec::Dirichlet(1.0),
            bottom: None,
            top: None,
        },
        replicates: 1,
        time_average: None,
        noise_speed: NoiseSpeedName::Unscaled,
        reference: Some(reference),
    }
}

fn rt_slab_ingress() -> Scenario {
    Scenario {
        name: "rt-slab-ingress".into(),
        description: "Slab ingress into an empty diffusive medium, f = 1 at x = 0, vacuum at x = 1".into(),
        model: Model::Rt1d,
        scheme: SchemeName::Apmc,
        grid: GridSpec { lower: vec![0.0], upper: vec![1.0], cells: vec![80] },
        dt: DtRule::Dx2 { factor: 0.5 },
        final_time: 0.15,
        output_times: vec![0.01, 0.05, 0.15],
        // 1000 particles per cell at unit density
        particles: 80_000,
        particle_mass: None,
        seed: 20_170_420,
        coefficients: CoefficientSpec::uniform(1e-8, 1.0, 0.0),
        initial: DensitySpec { background: 0.0, regions: vec![] },
        boundaries: BoundariesSpec {
            left: BoundarySpec::Dirichlet(1.0),
            right: BoundarySpec::Dirichlet(0.0),
            bottom: None,
            top: None,
        },
        replicates: 1,
        time_average: None,
        noise_speed: NoiseSpeedName::Unscaled,
        reference: Some(ReferenceSpec::new(SchemeName::DiffusionRef, 4)),
    }
}

fn rt_two_region() -> Scenario {
    Scenario {
        name: "rt-two-region".into(),
        description: "Absorbing layer [0, 1] (eps = 1) next to a diffusive region [1, 11] (eps = 0.01), f = 5 at x = 0"
            .into(),
        model: Model::Rt1d,
        scheme: SchemeName::Apmc,
        grid: GridSpec { lower: vec![0.0], upper: vec![11.0], cells: vec![80] },
        dt: DtRule::Dx2 { factor: 0.5 },
        final_time: 400.0,
        output_times: vec![],
        particles: 8_000,
        // about 100 particles per cell in the steady state
        particle_mass: Some(6.25e-4),
        seed: 20_170_421,
        // the background also covers the ghost layer left of x = 0
        coefficients: CoefficientSpec {
            background: CoefficientValues { eps: 1.0, sigma_s: 0.0, sigma_a: 1.0 },
            regions: vec![CoefficientRegion {
                region: RegionSpec::Interval { lo: 1.0, hi: 11.0 },
                eps: 0.01,
                sigma_s: 1.0,
                sigma_a: 0.0,
            }],
        },
        initial: DensitySpec { background: 0.0, regions: vec![] },
        boundaries: BoundariesSpec {
            left: BoundarySpec::Dirichlet(5.0),
            right: BoundarySpec::Dirichlet(0.0),
            bottom: None,
            top: None,
        },
        replicates: 1,
        time_average: Some(TimeAverageSpec { start: 200.0 }),
        noise_speed: NoiseSpeedName::Unscaled,
        reference: Some(ReferenceSpec::new(SchemeName::SteadyRef, 88)),
    }
}

fn rt_2d_circle() -> Scenario {
    Scenario {
        name: "rt-2d-circle".into(),
        description: "Disk of density 1 in a background of 0.125 on [0, 2]^2, eps = 0.1 (x < 1) and 0.01 (x >= 1)".into(),
        model: Model::Rt2d,
        scheme: SchemeName::Apmc,
        grid: GridSpec { lower: vec![0.0, 0.0], upper: vec![2.0, 2.0], cells: vec![80, 80] },
        dt: DtRule::Dx2 { factor: 1.0 },
        final_time: 0.025,
        output_times: vec![],
        // 2000 particles per cell on average
        particles: 12_800_000,
        particle_mass: None,
        seed: 20_170_422,
        coefficients: CoefficientSpec {
            background: CoefficientValues { eps: 0.1, sigma_s: 1.0, sigma_a: 0.0 },
            regions: vec![CoefficientRegion {
                region: RegionSpec::Rect { x: [1.0, 2.0], y: [0.0, 2.0] },
                eps: 0.01,
                sigma_s: 1.0,
                sigma_a: 0.0,
            }],
        },
        initial: DensitySpec {
            background: 0.125,
            regions: vec![DensityRegion { region: RegionSpec::Disk { center: [1.0, 1.0], radius: 0.2 }, density: 1.0 }],
        },
        boundaries: BoundariesSpec {
            left: BoundarySpec::Dirichlet(0.125),
            right: BoundarySpec::Dirichlet(0.125),
            bottom: Some(BoundarySpec::Dirichlet(0.125)),
            top: Some(BoundarySpec::Dirichlet(0.125)),
        },
        replicates: 1,
        time_average: None,
        noise_speed: NoiseSpeedName::Unscaled,
        reference: Some(ReferenceSpec::new(SchemeName::DiffusionRef, 1)),
    }
}
