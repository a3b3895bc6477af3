//! The 7-receiver, length-4 code on 16-QAM: mapping, per-receiver distances,
//! and the 16-PSK and binary baselines.

use qamic::constellation::build_psk;
use qamic::receiver::{binary_receiver_dmin_sq, receiver_dmin_sq};
use qamic::{fixtures, map_codewords, verify_mapping, MappingOptions};

fn main() -> qamic::Result<()> {
    let code = fixtures::example1();
    let mapping = map_codewords(&code, &MappingOptions::default())?;
    let report = verify_mapping(&mapping, &code)?;
    let psk = build_psk(code.length())?;

    println!("threshold T = {}, processing order {:?}", mapping.threshold(), one_based(mapping.receiver_order()));
    println!("{:<4} {:>3} {:>9} {:>9} {:>7} {:>15}", "rx", "eta", "16-QAM", "16-PSK", "binary", "bracket");
    for r in &report.receivers {
        println!(
            "R{:<3} {:>3} {:>9.4} {:>9.4} {:>7.1}   [{:.2}, {:.2}] {}",
            r.receiver + 1,
            r.eta,
            r.dmin_sq,
            receiver_dmin_sq(&psk, &code, r.receiver)?,
            binary_receiver_dmin_sq(&code, r.receiver)?,
            r.bracket_lo_sq,
            r.bracket_hi_sq,
            if r.pass { "ok" } else { "outside" }
        );
    }

    println!("\ncodeword -> point");
    for c in 0..mapping.len() as u64 {
        let p = mapping.signal_point(c);
        println!("  {} -> {:>2} ({:+.4}, {:+.4})", qamic::mapper::codeword_bits(c, 4), p.index, p.i, p.q);
    }
    Ok(())
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|r| r + 1).collect()
}
