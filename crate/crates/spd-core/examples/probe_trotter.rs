use spd_core::evolution::{self, EvolutionConfig, Schedule};
use spd_core::{models, observables, Pauli, PauliSum, PauliTerm};
fn main() {
    let lattice = models::LatticeSpec::new(&[2, 2]).unwrap();
    let n = lattice.site_count();
    let h_field = 3.04438;
    let ham = models::build_tfim(&lattice, h_field).unwrap();
    let (bonds, fields) = models::tfim_layers(&lattice, h_field).unwrap();
    let dt = 0.04;
    let steps = 25usize;
    let first = Schedule::first_order(&ham, dt).unwrap();
    let symm = Schedule::symmetrized(n, &fields, &bonds, dt).unwrap();
    let z0 = PauliSum::from_terms(n, [PauliTerm::single(n, 0, Pauli::Z).unwrap()]).unwrap();
    for delta in [1.0/1024.0, 1.0/4096.0, 1.0/16384.0] {
        let cfg = EvolutionConfig::new(delta, dt, steps as f64 * dt);
        let mut a = Vec::new(); let mut b = Vec::new();
        evolution::evolve_schedule(&z0, &first, &cfg, |_, s| a.push(observables::magnetization(s))).unwrap();
        evolution::evolve_schedule(&z0, &symm, &cfg, |_, s| b.push(observables::magnetization(s))).unwrap();
        let maxd = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0f64, f64::max);
        println!("delta {delta:.3e}: max |diff| = {maxd:.3e}  (delta^2 = {:.3e})", delta*delta);
    }
}
