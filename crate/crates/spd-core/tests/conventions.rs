// SPDX-License-Identifier: Apache-2.0

//! Pins the bitstring algebra to the dense matrix oracle: products,
//! phases, commutation, and the Hermitian-canonical gauge. Everything
//! else in the crate leans on these conventions.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use spd_core::oracle::{dense_term, DenseOperator};
use spd_core::{Complex64, Pauli, PauliTerm};

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

fn single(p: Pauli) -> PauliTerm {
    PauliTerm::single(1, 0, p).unwrap()
}

fn product_matches_dense(a: &PauliTerm, b: &PauliTerm) -> f64 {
    let product = a.multiply(b).unwrap();
    let dense_product = dense_term(&product).unwrap();
    let dense_a = dense_term(a).unwrap();
    let dense_b = dense_term(b).unwrap();
    let reference = dense_a.matmul(&dense_b).unwrap();
    dense_product.max_abs_diff(&reference).unwrap()
}

fn random_term(n: usize, rng: &mut ChaCha8Rng) -> PauliTerm {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let z = rng.next_u64() & mask;
    let x = rng.next_u64() & mask;
    let phase = (rng.next_u64() & 3) as u8;
    let coeff = Complex64::new(
        (rng.next_u64() as f64 / u64::MAX as f64) * 2.0 - 1.0,
        (rng.next_u64() as f64 / u64::MAX as f64) * 2.0 - 1.0,
    );
    PauliTerm::from_raw_parts(n, vec![z], vec![x], phase, coeff).unwrap()
}

#[test]
fn product_phase_convention_all_sixteen_single_site_pairs() {
    for &a in &PAULIS {
        for &b in &PAULIS {
            let dev = product_matches_dense(&single(a), &single(b));
            assert!(dev <= 1e-14, "{a:?}·{b:?} deviates by {dev}");
        }
    }
}

#[test]
fn product_phase_convention_exhaustive_two_sites() {
    // All 256 two-site string pairs, all canonical phases.
    let mut labels = Vec::new();
    for &a in &PAULIS {
        for &b in &PAULIS {
            let mut s = String::new();
            s.push(match a {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            });
            s.push(match b {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            });
            labels.push(s);
        }
    }
    for la in &labels {
        for lb in &labels {
            let a: PauliTerm = la.parse().unwrap();
            let b: PauliTerm = lb.parse().unwrap();
            let dev = product_matches_dense(&a, &b);
            assert!(dev <= 1e-14, "{la}·{lb} deviates by {dev}");
        }
    }
}

#[test]
fn product_phase_convention_random_three_site_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5D0_CAFE);
    for _ in 0..500 {
        let a = random_term(3, &mut rng);
        let b = random_term(3, &mut rng);
        let dev = product_matches_dense(&a, &b);
        assert!(dev <= 1e-14, "random pair deviates by {dev}");
    }
}

#[test]
fn multiplication_is_associative() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..200 {
        let a = random_term(3, &mut rng);
        let b = random_term(3, &mut rng);
        let c = random_term(3, &mut rng);
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        let dl = dense_term(&left).unwrap();
        let dr = dense_term(&right).unwrap();
        assert!(dl.max_abs_diff(&dr).unwrap() <= 1e-14);
    }
}

#[test]
fn anticommutation_matches_dense_anticommutator() {
    // Exhaustive over two-site pairs.
    for za in 0..4u64 {
        for xa in 0..4u64 {
            for zb in 0..4u64 {
                for xb in 0..4u64 {
                    let one = Complex64::new(1.0, 0.0);
                    let a = PauliTerm::from_raw_parts(2, vec![za], vec![xa], 0, one).unwrap();
                    let b = PauliTerm::from_raw_parts(2, vec![zb], vec![xb], 0, one).unwrap();
                    let claimed = a.anticommutes(&b).unwrap();
                    let da = dense_term(&a).unwrap();
                    let db = dense_term(&b).unwrap();
                    let anti = da.anticommutator_max(&db).unwrap() <= 1e-14;
                    assert_eq!(claimed, anti, "pair z={za:b},x={xa:b} / z={zb:b},x={xb:b}");
                }
            }
        }
    }
}

#[test]
fn canonical_gauge_makes_terms_hermitian() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let t = random_term(3, &mut rng).canonicalized().with_coeff(Complex64::new(1.0, 0.0));
        let d = dense_term(&t).unwrap();
        assert!(d.is_hermitian(1e-14));
    }
    // The spelled-out cases: pure Z has phase 0, Y has 1, YY has 2.
    assert_eq!("ZZ".parse::<PauliTerm>().unwrap().phase(), 0);
    let y: PauliTerm = "Y".parse().unwrap();
    assert_eq!(y.phase(), 1);
    assert_eq!("YY".parse::<PauliTerm>().unwrap().phase(), 2);
    // (-i) Z X literally equals Y.
    let zx = PauliTerm::from_raw_parts(1, vec![1], vec![1], 1, Complex64::new(1.0, 0.0)).unwrap();
    let dy = dense_term(&y).unwrap();
    assert!(dense_term(&zx).unwrap().max_abs_diff(&dy).unwrap() <= 1e-15);
}

#[test]
fn weights_ignore_coefficient_and_phase_and_add_over_disjoint_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let t = random_term(3, &mut rng);
        let recolored = t.clone().with_coeff(Complex64::new(-7.25, 0.5)).canonicalized();
        assert_eq!(t.weight(), recolored.weight());
        assert_eq!(t.x_weight(), recolored.x_weight());
    }
    // Disjoint supports: weights add under multiplication.
    let left = PauliTerm::from_sites(6, &[(0, Pauli::X), (1, Pauli::Y)]).unwrap();
    let right = PauliTerm::from_sites(6, &[(3, Pauli::Z), (5, Pauli::Y)]).unwrap();
    let product = left.multiply(&right).unwrap();
    assert_eq!(product.weight(), left.weight() + right.weight());
    assert_eq!(product.x_weight(), left.x_weight() + right.x_weight());
}

#[test]
fn identity_is_key_minimum_and_dense_identity() {
    let id = PauliTerm::identity(2).unwrap();
    let d = dense_term(&id).unwrap();
    let eye = DenseOperator::identity(2).unwrap();
    assert!(d.max_abs_diff(&eye).unwrap() == 0.0);
}
