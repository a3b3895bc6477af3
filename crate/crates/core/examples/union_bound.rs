//! Pairwise union bound next to a short simulation, per receiver.

use qamic::sim::{n0_from_snr_db, simulate, union_bound, Scheme, SimConfig};
use qamic::{fixtures, map_codewords, MappingOptions};

fn main() -> qamic::Result<()> {
    let code = fixtures::example1();
    let mapping = map_codewords(&code, &MappingOptions::default())?;
    let labeled = mapping.codeword_points();
    let snr = vec![6.0, 10.0, 14.0];
    let sim = simulate(&code, Some(&mapping), &SimConfig::new(Scheme::QamMapped, snr.clone(), 100_000, 5))?;

    println!("{:>6} {:>4} {:>11} {:>11} {:>10}", "snr", "rx", "bound", "simulated", "stderr");
    for row in &sim.rows {
        let n0 = n0_from_snr_db(code.length(), row.snr_db);
        println!(
            "{:>6.1} R{:<3} {:>11.3e} {:>11.3e} {:>10.1e}",
            row.snr_db,
            row.receiver + 1,
            union_bound(&labeled, &code, row.receiver, n0)?,
            row.error_rate(),
            row.stderr()
        );
    }
    Ok(())
}
