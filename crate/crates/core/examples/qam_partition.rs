//! Builds 2^l-QAM, prints the per-level distances and dumps `index,I,Q,level-path`.
//!
//! cargo run --example qam_partition -- 5 > qam32.csv

use qamic::constellation::{build_psk, build_qam, dmin_formula, min_distance_sq};
use qamic::report::Provenance;

fn main() -> qamic::Result<()> {
    let l: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let qam = build_qam(l)?;

    eprintln!("{}-QAM, mean energy {:.6}", qam.len(), qam.mean_energy());
    for k in 0..l {
        eprintln!("  level {k}: {:>3} subsets, delta^2 = {:.6}", qam.level(k).len(), qam.delta_sq(k));
    }
    eprintln!("closed form d_min^2 = {:.6}", dmin_formula(l).powi(2));
    eprintln!("{}-PSK at the same energy: d_min^2 = {:.6}", 1 << l, min_distance_sq(&build_psk(l)?));

    qam.write_csv(std::io::stdout().lock(), &Provenance::new().with("bits", l))
}
