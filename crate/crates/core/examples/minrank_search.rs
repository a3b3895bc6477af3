//! Optimal linear index code for a problem file (default: the 7-receiver fixture).
//!
//! cargo run --example minrank_search -- path/to/problem.json

use qamic::{fixtures, load_instance, minrank, IndexCodingProblem};

fn main() -> qamic::Result<()> {
    let problem: IndexCodingProblem = match std::env::args().nth(1) {
        Some(path) => load_instance(path)?.problem,
        None => fixtures::example1().problem().clone(),
    };
    let start = std::time::Instant::now();
    let result = minrank(&problem)?;
    println!("n = {}, minrank = {} ({:.3} s)", problem.messages(), result.length, start.elapsed().as_secs_f64());

    let code = result.code(&problem);
    println!("witness L (rows = messages):");
    for row in code.matrix().to_rows() {
        println!("  {}", row.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" "));
    }
    for a in code.analyze_all() {
        let known: Vec<usize> = a.known_bits.iter().map(|j| j + 1).collect();
        println!("R{}: known codeword bits {:?}, eta = {}", a.receiver + 1, known, a.eta);
    }
    Ok(())
}
