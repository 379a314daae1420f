// SPDX-License-Identifier: Apache-2.0

//! Locks the conjugation direction, gate order, and angle convention of
//! the sparse kernel to the dense-matrix and state-vector oracles.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use spd_core::evolution::{self, EvolutionConfig, PauliRotation, Schedule};
use spd_core::models;
use spd_core::observables;
use spd_core::oracle;
use spd_core::{Complex64, Pauli, PauliSum, PauliTerm};

fn random_sum(n: usize, terms: usize, rng: &mut ChaCha8Rng) -> PauliSum {
    let mask = (1u64 << n) - 1;
    let mut batch = Vec::with_capacity(terms);
    for _ in 0..terms {
        let z = rng.next_u64() & mask;
        let x = rng.next_u64() & mask;
        let coeff = Complex64::new((rng.next_u64() as f64 / u64::MAX as f64) * 2.0 - 1.0, 0.0);
        batch.push(
            PauliTerm::from_raw_parts(n, vec![z], vec![x], 0, coeff)
                .unwrap()
                .canonicalized(),
        );
    }
    PauliSum::from_terms(n, batch).unwrap()
}

#[test]
fn rotation_matches_dense_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let n = 3;
        let sum = random_sum(n, 6, &mut rng);
        let mask = (1u64 << n) - 1;
        let (z, x) = (rng.next_u64() & mask, rng.next_u64() & mask);
        let axis = PauliTerm::from_raw_parts(n, vec![z], vec![x], 0, Complex64::new(1.0, 0.0))
            .unwrap()
            .canonicalized()
            .with_coeff(Complex64::new(1.0, 0.0));
        let angle = (rng.next_u64() as f64 / u64::MAX as f64) * 6.0 - 3.0;
        let rotation = PauliRotation::new(axis.clone(), angle).unwrap();

        let sparse = evolution::apply_rotation(&sum, &rotation, 0.0).unwrap();
        let dense = oracle::conjugate_by_rotation(&oracle::dense_sum(&sum).unwrap(), &axis, angle)
            .unwrap();
        let dev = oracle::dense_sum(&sparse).unwrap().max_abs_diff(&dense).unwrap();
        assert!(dev <= 1e-12, "rotation deviates by {dev}");
    }
}

#[test]
fn trotter_step_matches_dense_on_tilted_ising() {
    let h = models::build_tilted_ising(3).unwrap();
    let q = models::local_energy(2, 3).unwrap();
    let dt = 0.02;
    let stepped = evolution::trotter_step(&q, &h, dt, 0.0).unwrap();
    let schedule = Schedule::first_order(&h, dt).unwrap();
    let dense = oracle::conjugate_by_step(&oracle::dense_sum(&q).unwrap(), &schedule).unwrap();
    let dev = oracle::dense_sum(&stepped).unwrap().max_abs_diff(&dense).unwrap();
    assert!(dev <= 1e-12, "single step deviates by {dev}");
}

#[test]
fn exact_evolution_reproduces_dense_profile_l5() {
    // L=5 tilted-field Ising, delta = 0, dt = 0.02, t = 1.
    let l = 5usize;
    let h = models::build_tilted_ising(l).unwrap();
    let q_c = models::local_energy(3, l).unwrap();
    let densities: Vec<PauliSum> = (1..=l).map(|j| models::local_energy(j, l).unwrap()).collect();
    let dt = 0.02;
    let steps = 50usize;
    let schedule = Schedule::first_order(&h, dt).unwrap();

    let mut dense = oracle::dense_sum(&q_c).unwrap();
    let dense_densities: Vec<_> =
        densities.iter().map(|q| oracle::dense_sum(q).unwrap()).collect();

    let mut sparse = q_c.clone();
    for step in 1..=steps {
        sparse = evolution::apply_step(&sparse, &schedule, 0.0).unwrap();
        dense = oracle::conjugate_by_step(&dense, &schedule).unwrap();
        if step % 10 == 0 || step == steps {
            for (q, dq) in densities.iter().zip(&dense_densities) {
                let got = q.overlap(&sparse).unwrap();
                let want = dq.hs_overlap(&dense).unwrap();
                assert!((got - want).norm() <= 1e-10, "step {step}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn magnetization_matches_state_vector_2x2_and_3x3() {
    for (extents, site, h_field, steps) in
        [(vec![2usize, 2], 0usize, 3.04438f64, 25usize), (vec![3, 3], 4, 3.04438, 23)]
    {
        let lattice = models::LatticeSpec::new(&extents).unwrap();
        let n = lattice.site_count();
        let ham = models::build_tfim(&lattice, h_field).unwrap();
        let dt = 0.04;
        let schedule = Schedule::first_order(&ham, dt).unwrap();
        let reference = oracle::exact_expectation_series(&schedule, site, steps).unwrap();

        let z0 =
            PauliSum::from_terms(n, [PauliTerm::single(n, site, Pauli::Z).unwrap()]).unwrap();
        let cfg = EvolutionConfig::new(0.0, dt, steps as f64 * dt);
        let mut series = Vec::new();
        let traj = evolution::evolve(&z0, &ham, &cfg, |_, s| {
            series.push(observables::magnetization(s));
        })
        .unwrap();
        assert!(traj.completed());
        assert_eq!(series.len(), reference.len());
        for (k, (got, want)) in series.iter().zip(&reference).enumerate() {
            assert!(
                (got - want).abs() <= 1e-10,
                "{extents:?} step {k}: sparse {got} vs state vector {want}"
            );
        }
    }
}

#[test]
fn heisenberg_and_schrodinger_agree_on_tilted_ising() {
    // <0|q_c(t)|0> both ways on the L=5 chain.
    let l = 5usize;
    let h = models::build_tilted_ising(l).unwrap();
    let q_c = models::local_energy(3, l).unwrap();
    let dt = 0.02;
    let steps = 30usize;
    let schedule = Schedule::first_order(&h, dt).unwrap();

    let mut state = oracle::StateVector::zero_state(l).unwrap();
    let cfg = EvolutionConfig::new(0.0, dt, steps as f64 * dt);
    let mut sparse_values = Vec::new();
    evolution::evolve(&q_c, &h, &cfg, |_, s| sparse_values.push(s.expectation_zero())).unwrap();

    let mut reference = Vec::new();
    reference.push(state.apply_sum(&q_c).unwrap().dot(&state).unwrap().re);
    for _ in 0..steps {
        state.apply_step(&schedule).unwrap();
        reference.push(state.apply_sum(&q_c).unwrap().dot(&state).unwrap().re);
    }
    // dot is <phi|psi>; expectation needs conj symmetry, q_c Hermitian.
    for (k, (got, want)) in sparse_values.iter().zip(&reference).enumerate() {
        assert!((got - want).abs() <= 1e-10, "step {k}: {got} vs {want}");
    }
}

#[test]
fn trotter_orders_agree_on_small_tfim() {
    let lattice = models::LatticeSpec::new(&[2, 2]).unwrap();
    let n = lattice.site_count();
    let h_field = 3.04438;
    let ham = models::build_tfim(&lattice, h_field).unwrap();
    let (bonds, fields) = models::tfim_layers(&lattice, h_field).unwrap();
    let dt = 0.04;
    let steps = 25usize;

    let first = Schedule::first_order(&ham, dt).unwrap();
    let symmetrized = Schedule::symmetrized(n, &fields, &bonds, dt).unwrap();

    let z0 = PauliSum::from_terms(n, [PauliTerm::single(n, 0, Pauli::Z).unwrap()]).unwrap();
    // Splitting the field layer in half moves terms across the
    // truncation boundary, so the orders match to rounding only at
    // delta = 0; at finite delta they differ at the truncation scale.
    for (delta, tol) in [(0.0, 1e-12), (1.0 / 1024.0, 10.0 / 1024.0)] {
        let cfg = EvolutionConfig::new(delta, dt, steps as f64 * dt);
        let mut mag_first = Vec::new();
        let mut mag_symm = Vec::new();
        evolution::evolve_schedule(&z0, &first, &cfg, |_, s| {
            mag_first.push(observables::magnetization(s))
        })
        .unwrap();
        evolution::evolve_schedule(&z0, &symmetrized, &cfg, |_, s| {
            mag_symm.push(observables::magnetization(s))
        })
        .unwrap();
        for (k, (a, b)) in mag_first.iter().zip(&mag_symm).enumerate() {
            assert!((a - b).abs() <= tol, "delta {delta}, step {k}: {a} vs {b}");
        }
    }
}

#[test]
fn tfim_quench_keeps_even_x_weight() {
    let lattice = models::LatticeSpec::new(&[3, 3]).unwrap();
    let n = lattice.site_count();
    let ham = models::build_tfim(&lattice, 3.04438).unwrap();
    let z0 = PauliSum::from_terms(
        n,
        [PauliTerm::single(n, lattice.central_site().unwrap(), Pauli::Z).unwrap()],
    )
    .unwrap();
    let cfg = EvolutionConfig::new(1e-6, 0.04, 0.4);
    let traj = evolution::evolve(&z0, &ham, &cfg, |_, s| {
        for term in s.terms() {
            assert_eq!(term.x_weight() % 2, 0, "odd X-weight term appeared");
        }
    })
    .unwrap();
    assert!(traj.completed());
}

#[test]
fn commuting_sector_is_inert() {
    let n = 3usize;
    let xx = PauliTerm::from_sites(n, &[(0, Pauli::X), (1, Pauli::X)]).unwrap();
    let ham = models::Hamiltonian::new(n, vec![(0.9, xx)]).unwrap();
    let z2 = PauliTerm::single(n, 2, Pauli::Z).unwrap().scaled(0.7);
    let x0 = PauliTerm::single(n, 0, Pauli::X).unwrap().scaled(0.3);
    let z0 = PauliTerm::single(n, 0, Pauli::Z).unwrap().scaled(0.5);
    let sum = PauliSum::from_terms(n, [z2.clone(), x0.clone(), z0]).unwrap();

    let stepped = evolution::trotter_step(&sum, &ham, 0.05, 0.0).unwrap();
    for probe in [z2, x0] {
        let before = sum.coeff(sum.find(probe.key()).unwrap());
        let after = stepped.coeff(stepped.find(probe.key()).unwrap());
        assert_eq!(before, after, "commuting term changed");
    }
}

#[test]
fn delta_dt_ratio_collapse_shrinks_on_l9() {
    // Runs at (delta, 0.01) and (2 delta, 0.02) share the ratio; their
    // msd curves must approach each other as delta decreases.
    let l = 9usize;
    let h = models::build_tilted_ising(l).unwrap();
    let c = (l + 1) / 2;
    let q_c = models::local_energy(c, l).unwrap();
    let densities: Vec<PauliSum> = (1..=l).map(|j| models::local_energy(j, l).unwrap()).collect();
    let t_max = 3.0;

    let msd_series = |delta: f64, dt: f64| -> Vec<(f64, f64)> {
        let cfg = EvolutionConfig::new(delta, dt, t_max);
        let mut series = Vec::new();
        evolution::evolve(&q_c, &h, &cfg, |rec, s| {
            let profile = observables::correlation_profile(s, &densities, rec.time).unwrap();
            series.push((rec.time, observables::msd(&profile)));
        })
        .unwrap();
        series
    };

    let mut max_diffs = Vec::new();
    for k in [9, 10, 11] {
        let fine = msd_series((2f64).powi(-k), 0.01);
        let coarse = msd_series((2f64).powi(-(k - 1)), 0.02);
        let mut max_diff = 0.0f64;
        for (t, d2) in &coarse {
            if let Some((_, fine_d2)) =
                fine.iter().find(|(tf, _)| (tf - t).abs() < 1e-9)
            {
                max_diff = max_diff.max((d2 - fine_d2).abs());
            }
        }
        max_diffs.push(max_diff);
    }
    assert!(
        max_diffs[0] > max_diffs[1] && max_diffs[1] > max_diffs[2],
        "collapse differences must shrink: {max_diffs:?}"
    );
}
