//! The two worked instances shipped with the crate.
//!
//! Example 1: seven single-unicast receivers, optimal code of length 4 (16-QAM).
//! Example 2: five receivers, codes of length 3, 4 and 5 (8-, 16- and 32-QAM).

use crate::code::IndexCode;
use crate::problem::IndexCodingProblem;
use crate::problem_file::parse_instance;

pub const EXAMPLE1_JSON: &str = include_str!("../fixtures/example1.json");
pub const EXAMPLE2_JSON: &str = include_str!("../fixtures/example2.json");
pub const EXAMPLE2_L1_JSON: &str = include_str!("../fixtures/example2_l1.json");
pub const EXAMPLE2_L2_JSON: &str = include_str!("../fixtures/example2_l2.json");
pub const EXAMPLE2_L3_JSON: &str = include_str!("../fixtures/example2_l3.json");

fn code_from(text: &str, name: &str) -> IndexCode {
    parse_instance(text, name)
        .and_then(|i| i.code().expect("fixture carries L"))
        .expect("bundled fixture is valid")
}

/// Example 1 with its length-4 code.
pub fn example1() -> IndexCode {
    code_from(EXAMPLE1_JSON, "example1.json")
}

/// Example 2 without a code.
pub fn example2_problem() -> IndexCodingProblem {
    parse_instance(EXAMPLE2_JSON, "example2.json")
        .expect("bundled fixture is valid")
        .problem
}

/// Example 2 with the optimal length-3 code.
pub fn example2_l1() -> IndexCode {
    code_from(EXAMPLE2_L1_JSON, "example2_l1.json")
}

/// Example 2 with a length-4 code.
pub fn example2_l2() -> IndexCode {
    code_from(EXAMPLE2_L2_JSON, "example2_l2.json")
}

/// Example 2 sent uncoded, `L = I_5`.
pub fn example2_l3() -> IndexCode {
    code_from(EXAMPLE2_L3_JSON, "example2_l3.json")
}
