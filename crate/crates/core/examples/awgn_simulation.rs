//! Error rates for the 7-receiver problem under mapped 16-QAM, 16-PSK and
//! four binary transmissions, written as the results CSV.
//!
//! cargo run --release --example awgn_simulation -- 200000 > results.csv

use qamic::problem_file::Instance;
use qamic::sim::{results_provenance, simulate, snr_range, write_results, Scheme, SimConfig};
use qamic::{fixtures, map_codewords, MappingOptions};

fn main() -> qamic::Result<()> {
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50_000);
    let code = fixtures::example1();
    let mapping = map_codewords(&code, &MappingOptions::default())?;
    let snr = snr_range(0.0, 20.0, 2.0)?;
    let seed = 2024;

    let mut results = Vec::new();
    for scheme in Scheme::ALL {
        let m = (scheme == Scheme::QamMapped).then_some(&mapping);
        let result = simulate(&code, m, &SimConfig::new(scheme, snr.clone(), trials, seed))?;
        // quick look at 14 dB on stderr
        let at14: Vec<String> = result
            .rows
            .iter()
            .filter(|r| r.snr_db == 14.0)
            .map(|r| format!("{:.1e}", r.error_rate()))
            .collect();
        eprintln!("{scheme:>13} @14 dB: {}", at14.join(" "));
        results.push(result);
    }

    let hash = Instance::from_code(&code).hash();
    write_results(&results, std::io::stdout().lock(), &results_provenance(&hash, &code, Some(&mapping), seed))
}
