use apmc_sim::builtins;
use apmc_sim::scenario::{
    BoundariesSpec, BoundarySpec, CoefficientSpec, DensityRegion, DensitySpec, DtRule, GridSpec, Model, NoiseSpeedName,
    ReferenceSpec, RegionSpec, TimeAverageSpec,
};
use apmc_sim::{Scenario, SchemeName, SimError};
use proptest::prelude::*;

#[test]
fn builtins_validate_and_round_trip() {
    for s in builtins::all() {
        s.validate().unwrap();
        let back = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }
    assert_eq!(builtins::all().len(), builtins::NAMES.len());
}

#[test]
fn unknown_keys_are_rejected() {
    let mut v: serde_json::Value = serde_json::from_str(&builtins::builtin("rt-slab-ingress").unwrap().to_json()).unwrap();
    v["particels"] = 10.into();
    let err = Scenario::from_json(&v.to_string()).unwrap_err();
    assert!(matches!(err, SimError::Json(_)), "{err}");
    assert!(err.to_string().contains("particels"));
}

#[test]
fn errors_name_the_field() {
    let mut s = builtins::builtin("gt-riemann-diffusive").unwrap();
    s.particles = 0;
    assert!(matches!(s.validate(), Err(SimError::Field { field, .. }) if field == "particles"));

    let mut s = builtins::builtin("gt-riemann-diffusive").unwrap();
    s.output_times = vec![0.01, 0.02];
    assert!(matches!(s.validate(), Err(SimError::Field { field, .. }) if field == "output_times"));

    let mut s = builtins::builtin("rt-2d-circle").unwrap();
    s.boundaries.top = None;
    assert!(matches!(s.validate(), Err(SimError::Field { field, .. }) if field == "boundaries"));

    let mut s = builtins::builtin("rt-slab-ingress").unwrap();
    s.coefficients.background.eps = 0.0;
    s.scheme = SchemeName::StandardMc;
    assert!(matches!(s.validate(), Err(SimError::Field { field, .. }) if field == "scheme"));

    let mut s = builtins::builtin("gt-riemann-hyperbolic").unwrap();
    s.reference = Some(ReferenceSpec::new(SchemeName::SteadyRef, 1));
    assert!(matches!(s.validate(), Err(SimError::Field { field, .. }) if field == "reference.scheme"));
}

fn dt_rule() -> impl Strategy<Value = DtRule> {
    prop_oneof![
        (1e-6f64..1e-2).prop_map(|value| DtRule::Absolute { value }),
        (0.01f64..1.0).prop_map(|factor| DtRule::Dx { factor }),
        (0.01f64..1.0).prop_map(|factor| DtRule::Dx2 { factor }),
    ]
}

prop_compose! {
    fn slab_scenario()(
        cells in 2usize..200,
        upper in 0.5f64..20.0,
        dt in dt_rule(),
        final_time in 0.01f64..10.0,
        extra in proptest::collection::vec(0.05f64..0.95, 0..3),
        particles in 1u64..1_000_000,
        mass in proptest::option::of(1e-6f64..1.0),
        seed in any::<u64>(),
        eps in 0.0f64..2.0,
        rho in 0.0f64..5.0,
        left in 0.1f64..5.0,
        replicates in 1u32..5,
        average in proptest::option::of(0.0f64..0.9),
        scaled in any::<bool>(),
        reference in proptest::option::of((1usize..8, 2usize..32)),
    ) -> Scenario {
        let mut times: Vec<f64> = extra.iter().map(|f| f * final_time).collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        if !times.is_empty() {
            times.push(final_time);
        }
        Scenario {
            name: format!("slab-{seed}"),
            description: String::new(),
            model: Model::Rt1d,
            scheme: SchemeName::Apmc,
            grid: GridSpec { lower: vec![0.0], upper: vec![upper], cells: vec![cells] },
            dt,
            final_time,
            output_times: times,
            particles,
            particle_mass: mass,
            seed,
            coefficients: CoefficientSpec::uniform(eps, 1.0, 0.0),
            initial: DensitySpec {
                background: rho,
                regions: vec![DensityRegion { region: RegionSpec::Interval { lo: 0.0, hi: upper / 2.0 }, density: 2.0 * rho }],
            },
            boundaries: BoundariesSpec { left: BoundarySpec::Dirichlet(left), right: BoundarySpec::Dirichlet(0.0), bottom: None, top: None },
            replicates,
            time_average: average.map(|f| TimeAverageSpec { start: f * final_time }),
            noise_speed: if scaled { NoiseSpeedName::Scaled } else { NoiseSpeedName::Unscaled },
            reference: reference.map(|(refine, nodes)| ReferenceSpec {
                velocity_nodes: nodes,
                ..ReferenceSpec::new(SchemeName::DiffusionRef, refine)
            }),
        }
    }
}

proptest! {
    #[test]
    fn json_round_trip_is_identity(s in slab_scenario()) {
        s.validate().unwrap();
        let text = s.to_json();
        let back = Scenario::from_json(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_json(), text);
    }
}
