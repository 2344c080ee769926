use concealed_core::analytic::{FreeGaussian, PolarFreeMotion};
use concealed_core::coupled::{Coupled, ReferenceSpec};
use concealed_core::integrate::Scheme;
use concealed_core::routh::{integrate_full, integrate_reduced, reduce, PolarFreeParticle};
use concealed_core::{DiscreteState, ExternalPotential, GridSpec, InitialProfile, PhysicalParams};

#[test]
fn lockstep_free_gaussian() {
    let g = FreeGaussian {
        center: 0.5,
        sigma0: 1.0,
        momentum: 0.0,
        hbar: 1.0,
        mass: 1.0,
    };
    let params = PhysicalParams::natural(2e-3, 0.5);
    let spec = ReferenceSpec {
        m_points: 1201,
        half_width: 12.0,
        continuity: true,
    };
    let mut run = Coupled::new(
        params,
        &GridSpec::with_labels(256),
        &InitialProfile::gaussian(0.5, 1.0, 0.0),
        Some(spec),
    )
    .unwrap();
    let e0 = run.energy();
    assert!((e0.h_lagrangian - g.energy()).abs() < 1e-6);
    for _ in 0..params.n_steps() {
        run.step().unwrap();
    }
    let e = run.energy();
    assert_eq!(run.t(), 0.5);
    assert!(e.max_disagreement() < 1e-5, "{e:?}");
    assert!((e.t_concealed + e.t_visible - e0.h_lagrangian).abs() < 1e-6);

    let lag = &run.lag;
    for (k, &a) in lag.fluid.grid.a.iter().enumerate() {
        assert!((lag.traj.q[k] - g.trajectory(a, 0.5)).abs() < 1e-5);
    }
    assert!(run.density_l2().unwrap().unwrap() < 1e-3);
    assert!(run.continuity_invariance_error().unwrap() < 2e-2);
    assert!(run.concealed_velocity_discrepancy().unwrap().unwrap() < 2e-2);
}

#[test]
fn trap_without_reference() {
    let mut params = PhysicalParams::natural(1e-3, 0.3);
    params.external_potential = ExternalPotential::harmonic(1.0, 2.0, 0.0);
    let sigma = 0.5;
    let mut run = Coupled::new(
        params,
        &GridSpec::with_labels(256),
        &InitialProfile::gaussian(0.3, sigma, 0.0),
        None,
    )
    .unwrap();
    assert!(run.density_l2().is_none());
    let h0 = run.energy().h_lagrangian;
    for _ in 0..params.n_steps() {
        run.step().unwrap();
    }
    let e = run.energy();
    assert!(e.h_eulerian.is_none());
    assert!(((e.h_lagrangian - h0) / h0).abs() < 1e-6);
    // coherent width: the packet centre follows x₀ cos ωt
    let lag = &run.lag;
    let mid = lag.fluid.grid.len() / 2;
    let shift = lag.traj.q[mid] - lag.fluid.grid.a[mid];
    assert!((shift - 0.3 * ((0.6f64).cos() - 1.0)).abs() < 1e-5, "{shift}");
}

#[test]
fn polar_particle_both_ways() {
    let s0 = DiscreteState {
        q: vec![2.0],
        qdot: vec![0.0],
        conc: vec![0.3],
        conc_dot: vec![0.75],
        t: 0.0,
    };
    let exact = PolarFreeMotion {
        r0: 2.0,
        angular_momentum: 3.0,
    };
    let full = integrate_full(&PolarFreeParticle, &s0, 1e-3, 2000, Scheme::Rk4).unwrap();
    let red = reduce(PolarFreeParticle, &s0).unwrap();
    assert!((red.momentum[0] - 3.0).abs() < 1e-15);
    let reduced = integrate_reduced(&red, &s0.q, &s0.qdot, 0.0, 1e-3, 2000, Scheme::Rk4).unwrap();
    let (f, r) = (full.last().unwrap(), reduced.last().unwrap());
    assert!((f.x[0] - r.x[0]).abs() < 1e-12);
    assert!((f.x[0] - exact.radius(2.0)).abs() < 1e-10);
    assert!((f.x[1] - 0.3 - exact.angle(2.0)).abs() < 1e-10);
}

#[test]
fn bad_setups_are_rejected() {
    let params = PhysicalParams::natural(1e-3, 1.0);
    let profile = InitialProfile::gaussian(0.0, 1.0, 0.0);
    assert!(Coupled::new(params, &GridSpec::with_labels(4), &profile, None).is_err());
    let tiny = ReferenceSpec {
        m_points: 8,
        half_width: 10.0,
        continuity: false,
    };
    assert!(Coupled::new(params, &GridSpec::with_labels(128), &profile, Some(tiny)).is_err());
    let narrow = ReferenceSpec {
        m_points: 400,
        half_width: 1.0,
        continuity: false,
    };
    assert!(Coupled::new(params, &GridSpec::with_labels(128), &profile, Some(narrow)).is_err());
}
