use std::time::Instant;
use spd_core::evolution::{self, EvolutionConfig};
use spd_core::models;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let l: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(51);
    let k: i32 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(11);
    let t_max: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(4.0);
    let dt: f64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(0.02);
    let h = models::build_tilted_ising(l).unwrap();
    let c = (l + 1) / 2;
    let q = models::local_energy(c, l).unwrap();
    let delta = (2f64).powi(-k);
    let cfg = EvolutionConfig::new(delta, dt, t_max).with_record_every(25);
    let start = Instant::now();
    let mut peak = 0usize;
    let traj = evolution::evolve(&q, &h, &cfg, |rec, _| {
        peak = peak.max(rec.n_terms);
        eprintln!("t={:.2} N={} N_Z={} elapsed={:.1}s", rec.time, rec.n_terms, rec.n_ztype, start.elapsed().as_secs_f64());
    }).unwrap();
    println!("L={l} delta=2^-{k} t={t_max}: final N={} peak N={} wall={:.1}s status={:?}",
        traj.sum.len(), peak, start.elapsed().as_secs_f64(), traj.status);
}
