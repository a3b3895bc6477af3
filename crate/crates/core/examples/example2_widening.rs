//! One problem, three codes of length 3, 4 and 5: the receiver with the most
//! side information gains while the one with none loses.

use qamic::{fixtures, map_codewords, minrank, verify_mapping, MappingOptions};

fn main() -> qamic::Result<()> {
    let problem = fixtures::example2_problem();
    println!("minrank N = {}", minrank(&problem)?.length);

    for code in [fixtures::example2_l1(), fixtures::example2_l2(), fixtures::example2_l3()] {
        let mapping = map_codewords(&code, &MappingOptions::default())?;
        let report = verify_mapping(&mapping, &code)?;
        let row: Vec<String> = report.dmin_sq().iter().map(|d| format!("{d:7.4}")).collect();
        let etas: Vec<usize> = report.receivers.iter().map(|r| r.eta).collect();
        println!("{:>2}-QAM  eta {:?}  d_min^2 {}", 1 << code.length(), etas, row.join(" "));
    }

    // the no-threshold variant: every receiver with eta < l gets priority
    let code = fixtures::example2_l3();
    let opts = MappingOptions { threshold: qamic::Threshold::CodeLength, ..Default::default() };
    let report = verify_mapping(&map_codewords(&code, &opts)?, &code)?;
    println!("32-QAM with T = l: {:?}", report.dmin_sq().iter().map(|d| (d * 1e4).round() / 1e4).collect::<Vec<_>>());
    Ok(())
}
