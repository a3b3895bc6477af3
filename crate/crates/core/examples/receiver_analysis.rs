//! What one receiver sees: its effective constellation for each side-information
//! realization, the distance spectrum, and nearest-point decisions.

use qamic::receiver::{effective_constellation, format_spectrum, ml_decode, receiver_distances};
use qamic::{fixtures, map_codewords, MappingOptions};

fn main() -> qamic::Result<()> {
    let code = fixtures::example2_l2();
    let mapping = map_codewords(&code, &MappingOptions::default())?;
    let labeled = mapping.codeword_points();
    let receiver = 1; // R2: knows x1, x3, x5

    let d = receiver_distances(&labeled, &code, receiver)?;
    println!("R{} eta = {}, worst-case d_min^2 = {:.4}", receiver + 1, d.eta, d.dmin_sq);
    println!("spectrum (d^2:pairs) {}", format_spectrum(&d.spectrum));

    for &(a, dmin) in d.per_realization.iter().take(4) {
        let eff = effective_constellation(&labeled, &code, receiver, a)?;
        println!("\nrealization {a:03b}: {} points, d_min^2 = {dmin:.4}", eff.points.len());
        for (p, label) in eff.points.iter().zip(&eff.labels) {
            println!("  point {:>2} ({:+.3}, {:+.3}) carries x2 = {label}", p.index, p.i, p.q);
        }
        let p = eff.points[0];
        let nudged = (p.i + 0.3, p.q - 0.2);
        println!("  sample near point {} decodes to x2 = {}", p.index, ml_decode(&eff, nudged));
    }
    Ok(())
}
