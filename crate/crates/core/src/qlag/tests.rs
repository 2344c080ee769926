use super::*;
use crate::analytic::{CoherentState, FreeGaussian};

fn gaussian(n: usize, dt: f64, momentum: f64) -> Scenario<f64> {
    init_scenario(
        PhysicalParams::natural(dt, 2.0),
        &GridSpec::with_labels(n),
        &InitialProfile::gaussian(0.0, 1.0, momentum),
    )
    .unwrap()
}

fn at_label(s: &Scenario<f64>, a: f64) -> usize {
    let k = s.fluid.grid.a.iter().position(|&x| (x - a).abs() < 1e-12);
    k.expect("label on grid")
}

fn sup_error(s: &Scenario<f64>, exact: impl Fn(f64) -> f64) -> f64 {
    s.fluid
        .grid
        .a
        .iter()
        .zip(&s.traj.q)
        .map(|(&a, &q)| (q - exact(a)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn initial_fields_of_gaussian() {
    let s = gaussian(256, 1e-3, 0.0);
    let g = &s.fluid.grid;
    assert!((g.total_mass() - 1.0).abs() < 1e-8);
    assert!(g.rho0[0] / g.rho0[128] >= 0.99e-8);
    for k in 0..g.len() {
        assert!((s.traj.u0[k] + g.a[k]).abs() < 1e-8, "u0 at {k}");
        assert!((s.traj.jac[k] - 1.0).abs() < 1e-10);
        assert!((s.conc.qdot0[k].abs() - 0.5 * g.a[k].abs()).abs() < 1e-8);
        let lhs = s.conc.qdot0[k].powi(2) - 0.25 * s.traj.u0[k].powi(2);
        assert!(lhs.abs() <= 1e-15 * (1.0 + s.traj.u0[k].powi(2)));
        if !s.conc.masked[k] {
            let r = s.conc.ratio[k] * s.traj.u0[k] * s.traj.u0[k];
            assert!((r - s.conc.qdot0[k]).abs() <= 1e-14 * s.conc.qdot0[k].abs().max(1e-300));
        }
    }
    let (gl, gr) = s.fluid.ghost_counts();
    assert!(gl > 0 && gl == gr);
}

#[test]
fn concealed_velocity_at_examples() {
    let n = 241;
    let s = init_scenario(
        PhysicalParams::natural(1e-3, 1.0),
        &GridSpec {
            n_labels: n,
            half_width: Some(6.0),
            ..GridSpec::default()
        },
        &InitialProfile::gaussian(0.0, 1.0, 0.0),
    )
    .unwrap();
    let k1 = at_label(&s, 1.0);
    let k0 = at_label(&s, 0.0);
    assert!((s.conc.qdot0[k1] + 0.5).abs() < 1e-9);
    assert!(s.conc.qdot0[k0].abs() < 1e-12);
    assert!((s.conc.momentum[k1] + 0.12098536225957168).abs() < 1e-9);
    assert!(s.conc.momentum[k0].abs() < 1e-12);

    let sigma0 = 0.5f64.sqrt();
    let c = init_scenario(
        PhysicalParams::natural(1e-3, 1.0),
        &GridSpec {
            n_labels: n,
            half_width: Some(6.0 * sigma0),
            ..GridSpec::default()
        },
        &InitialProfile::gaussian(1.0, sigma0, 0.0),
    )
    .unwrap();
    let k = c.fluid.grid.a.iter().position(|&x| x >= 1.5).unwrap();
    let a = c.fluid.grid.a[k];
    assert!((c.traj.u0[k] + (a - 1.0) / 0.5).abs() < 1e-8);
    assert!((c.conc.qdot0[k] + (a - 1.0)).abs() < 1e-8);
}

#[test]
fn boosted_and_uniform_initial_state() {
    let s = gaussian(256, 1e-3, 10.0);
    assert!(s.traj.qdot.iter().all(|&v| v == 10.0));
    let l = s.fluid.modified_lagrangian_value(&s.traj);
    assert!((l.t_visible - 50.0).abs() < 1e-7);
    assert!((l.u_quantum - 0.125).abs() < 1e-7);
    assert!((l.value - (50.0 - 0.125)).abs() < 1e-7);
    let c = s.fluid.classicality(&s.traj, 1e-12);
    let k = s.fluid.grid.a.iter().position(|&a| a >= 1.0).unwrap();
    let a = s.fluid.grid.a[k];
    assert!((c.ratio[k] - 0.5 * a / 10.0).abs() < 1e-8);
    assert!((c.energy_ratio - 0.0025).abs() < 1e-8);

    let u = init_scenario(
        PhysicalParams::natural(1e-2, 1.0),
        &GridSpec::with_labels(64),
        &InitialProfile::Uniform {
            lo: -1.0f64,
            hi: 1.0,
            velocity: 1.0,
        },
    )
    .unwrap();
    assert!(u.traj.u0.iter().all(|&x| x == 0.0));
    assert!(u.conc.qdot0.iter().all(|&x| x == 0.0));
    assert!(u.conc.momentum.iter().all(|&x| x == 0.0));
    let l = u.fluid.modified_lagrangian_value(&u.traj);
    assert!((l.t_visible - 0.5).abs() < 1e-12);
    assert_eq!(l.u_quantum, 0.0);
    let c = u.fluid.classicality(&u.traj, 1e-12);
    assert!(c.ratio.iter().all(|&r| r == 0.0));
    assert!(u.fluid.quantum_force(&u.traj).unwrap().iter().all(|f| f.abs() < 1e-8));
}

#[test]
fn fully_quantum_ratio_saturates() {
    let s = gaussian(128, 1e-3, 0.0);
    let c = s.fluid.classicality(&s.traj, 1e-12);
    let k = s.fluid.grid.len() - 1;
    assert!(c.ratio[k] > 1e11);
    assert!(c.energy_ratio.is_infinite());
}

#[test]
fn jacobian_of_dilation() {
    let mut s = gaussian(256, 1e-3, 0.0);
    s.traj.q.iter_mut().for_each(|q| *q *= 2.0);
    s.fluid.jacobian_and_u(&mut s.traj).unwrap();
    for (k, &a) in s.fluid.grid.a.iter().enumerate() {
        assert!((s.traj.jac[k] - 2.0).abs() < 1e-10);
        assert!((s.traj.u[k] + a / 2.0).abs() < 1e-8);
    }
    let rho = s.fluid.mapped_density(&s.traj);
    let k = at_label(&s, s.fluid.grid.a[100]);
    let x = s.traj.q[k];
    let expected = InitialProfile::gaussian(0.0, 1.0, 0.0).density(x / 2.0) / 2.0;
    assert!((rho[k] - expected).abs() < 1e-12);
}

#[test]
fn spreading_snapshot_gradient() {
    let mut s = gaussian(256, 1e-3, 0.0);
    let g = FreeGaussian {
        center: 0.0,
        sigma0: 1.0,
        momentum: 0.0,
        hbar: 1.0,
        mass: 1.0,
    };
    let t = 1.3;
    for (q, &a) in s.traj.q.iter_mut().zip(&s.fluid.grid.a) {
        *q = g.trajectory(a, t);
    }
    s.fluid.jacobian_and_u(&mut s.traj).unwrap();
    for (k, &a) in s.fluid.grid.a.iter().enumerate() {
        assert!((s.traj.u[k] - g.log_density_gradient(a, t)).abs() < 1e-8);
    }
}

#[test]
fn crossing_is_reported() {
    let mut s = gaussian(64, 1e-3, 0.0);
    s.traj.q[31] = s.traj.q[25];
    let err = s.fluid.jacobian_and_u(&mut s.traj).unwrap_err();
    assert!(matches!(err, Error::TrajectoryCrossing { .. }));
}

#[test]
fn force_matches_gaussian_closed_form() {
    let s = gaussian(512, 1e-3, 0.0);
    let f = s.fluid.quantum_force(&s.traj).unwrap();
    let direct = s.fluid.bohm_force_direct(&s.traj).unwrap();
    for (k, &a) in s.fluid.grid.a.iter().enumerate() {
        assert!((f[k] - a / 4.0).abs() < 1e-6, "label {k}: {} vs {}", f[k], a / 4.0);
        if a.abs() < 4.0 {
            assert!((direct[k] - a / 4.0).abs() < 1e-6);
        }
    }
}

#[test]
fn free_gaussian_short_run() {
    let mut s = gaussian(256, 2e-3, 0.0);
    let g = FreeGaussian {
        center: 0.0,
        sigma0: 1.0,
        momentum: 0.0,
        hbar: 1.0,
        mass: 1.0,
    };
    for _ in 0..250 {
        s.fluid.step(&mut s.traj, &mut s.conc).unwrap();
    }
    let t = s.traj.t;
    assert!((t - 0.5).abs() < 1e-12);
    assert!(sup_error(&s, |a| g.trajectory(a, t)) < 1e-5);
    for (k, &a) in s.fluid.grid.a.iter().enumerate() {
        let dq = s.conc.q[k] - s.conc.q0[k];
        assert!((dq - g.concealed_displacement(a, t)).abs() < 1e-5, "label {k}");
    }
    let p = s.conc.momentum_check(&s.fluid, &s.traj);
    for (k, pk) in p.iter().enumerate() {
        if !s.conc.masked[k] {
            assert!((pk - s.conc.momentum[k]).abs() < 1e-12);
        }
    }
    let (_, t_conc) = crate::energy::energy_lagrangian(&s.fluid, &s.traj, &s.conc);
    assert!((t_conc - s.fluid.quantum_potential_energy(&s.traj)).abs() < 1e-6);
    let rho = s.fluid.mapped_density(&s.traj);
    let x = &s.traj.q;
    let mass: f64 = (1..x.len())
        .map(|k| 0.5 * (rho[k] + rho[k - 1]) * (x[k] - x[k - 1]))
        .sum();
    assert!((mass - 1.0).abs() < 1e-4);
}

#[test]
fn time_reversal_returns_to_labels() {
    let mut s = gaussian(128, 5e-3, 0.0);
    for _ in 0..100 {
        s.fluid.step_visible(&mut s.traj).unwrap();
    }
    let g = FreeGaussian {
        center: 0.0,
        sigma0: 1.0,
        momentum: 0.0,
        hbar: 1.0,
        mass: 1.0,
    };
    let forward = sup_error(&s, |a| g.trajectory(a, 0.5));
    s.traj.reverse();
    for _ in 0..100 {
        s.fluid.step_visible(&mut s.traj).unwrap();
    }
    let back = sup_error(&s, |a| a);
    assert!(back <= 10.0 * forward.max(1e-12), "{back} vs {forward}");
}

#[test]
fn uniform_flow_translates_exactly() {
    let mut u = init_scenario(
        PhysicalParams::natural(1e-2, 1.0),
        &GridSpec::with_labels(64),
        &InitialProfile::Uniform {
            lo: -1.0f64,
            hi: 1.0,
            velocity: 0.7,
        },
    )
    .unwrap();
    for _ in 0..100 {
        u.fluid.step(&mut u.traj, &mut u.conc).unwrap();
    }
    for (k, &a) in u.fluid.grid.a.iter().enumerate() {
        assert!((u.traj.q[k] - (a + 0.7)).abs() < 1e-10);
        assert_eq!(u.conc.q[k], u.conc.q0[k]);
    }
}

#[test]
fn coherent_state_translates_rigidly() {
    let c = CoherentState {
        x0: 1.0f64,
        p0: 0.0,
        omega: 1.0,
        hbar: 1.0,
        mass: 1.0,
    };
    let mut params = PhysicalParams::natural(2e-3, 1.0);
    params.external_potential = ExternalPotential::harmonic(1.0, 1.0, 0.0);
    let mut s = init_scenario(
        params,
        &GridSpec::with_labels(256),
        &InitialProfile::gaussian(1.0, c.sigma0(), 0.0),
    )
    .unwrap();
    let f0 = s.fluid.quantum_force(&s.traj).unwrap();
    let worst = f0.iter().map(|f| (f + 1.0).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-5, "{worst}");
    for _ in 0..500 {
        s.fluid.step(&mut s.traj, &mut s.conc).unwrap();
    }
    let t = s.traj.t;
    assert!(sup_error(&s, |a| c.trajectory(a, t)) < 1e-5);
    assert!(s.traj.jac.iter().all(|j| (j - 1.0).abs() < 1e-6));
    for (k, &a) in s.fluid.grid.a.iter().enumerate() {
        let dq = s.conc.q[k] - s.conc.q0[k];
        assert!((dq - c.concealed_displacement(a, t)).abs() < 1e-5);
    }
}

#[test]
fn configuration_errors() {
    let p = PhysicalParams::natural(1e-3, 1.0);
    let g = InitialProfile::gaussian(0.0, 1.0, 0.0);
    let narrow = GridSpec {
        n_labels: 64,
        half_width: Some(2.0),
        ..GridSpec::default()
    };
    assert!(matches!(
        init_scenario(p, &narrow, &g),
        Err(Error::DomainTooSmall { .. })
    ));
    assert!(init_scenario(p, &GridSpec::with_labels(4), &g).is_err());
    let mut bad = p;
    bad.hbar = 0.0;
    assert!(init_scenario(bad, &GridSpec::with_labels(64), &g).is_err());
}

#[test]
fn single_precision_short_run() {
    let mut s = init_scenario(
        PhysicalParams::<f32>::natural(5e-3, 1.0),
        &GridSpec::with_labels(128),
        &InitialProfile::gaussian(0.0f32, 1.0, 0.0),
    )
    .unwrap();
    for _ in 0..100 {
        s.fluid.step(&mut s.traj, &mut s.conc).unwrap();
    }
    let sig = (1.0f32 + 0.0625).sqrt();
    for (k, &a) in s.fluid.grid.a.iter().enumerate() {
        assert!((s.traj.q[k] - a * sig).abs() < 2e-3, "label {k}");
    }
}
