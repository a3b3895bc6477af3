//! Index coding over noisy broadcast channels with QAM.
//!
//! A linear index code `y = xL` over GF(2) is transmitted as a single
//! `2^l`-QAM symbol. Receivers that already know some messages see only a
//! subset of the constellation; [`mapper::map_codewords`] places codewords so
//! that those subsets are spread out, using the Ungerboeck partition of the
//! constellation.
//!
//! ```
//! use qamic::{fixtures, mapper::{map_codewords, MappingOptions}};
//!
//! let code = fixtures::example1();
//! let mapping = map_codewords(&code, &MappingOptions::default()).unwrap();
//! assert_eq!(mapping.len(), 16);
//! ```

pub mod cli;
pub mod code;
pub mod constellation;
pub mod error;
pub mod fixtures;
pub mod gf2;
pub mod mapper;
pub mod minrank;
pub mod problem;
pub mod problem_file;
pub mod receiver;
pub mod report;
pub mod sim;

pub use code::{IndexCode, ReceiverAnalysis};
pub use constellation::{build_psk, build_qam, dmin_formula, PartitionedConstellation, SignalPoint};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use mapper::{map_codewords, verify_mapping, CodewordMapping, MappingOptions, Threshold};
pub use minrank::{minrank, Minrank};
pub use problem::{IndexCodingProblem, Receiver};
pub use problem_file::{load_instance, parse_instance, save_instance, Instance};
