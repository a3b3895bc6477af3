//! Command-line front end. Exit codes: 0 ok, 2 invalid input, 3 runtime failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::code::IndexCode;
use crate::constellation::{dmin_formula, MAX_QAM_BITS, MIN_QAM_BITS};
use crate::error::{Error, Result};
use crate::mapper::{map_codewords, verify_mapping, CodewordMapping, MappingOptions};
use crate::minrank::minrank;
use crate::problem_file::{load_instance, Instance};
use crate::receiver::{distance_rows, write_distance_report};
use crate::report::{sig6, Provenance, TOOL_VERSION};
use crate::sim::{results_provenance, simulate, snr_range, write_results, Scheme, SimConfig, DEFAULT_LANES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qamic", version, about = "Index coding over AWGN broadcast channels with set-partitioned QAM")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a problem file and report its shape.
    Validate(InputArgs),
    /// Optimal linear code length and an encoding matrix achieving it.
    Minrank(InputArgs),
    /// Known codeword bits and eta for every receiver.
    Analyze(InputArgs),
    /// Label codewords with QAM points.
    Map {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        mapping: MappingArgs,
        #[arg(long, value_enum, default_value_t = MapFormat::Csv)]
        format: MapFormat,
    },
    /// Per-receiver minimum distances under the QAM mapping.
    Distances {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        mapping: MappingArgs,
    },
    /// Monte Carlo wanted-message error rates.
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        mapping: MappingArgs,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        snr_start: f64,
        #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
        snr_stop: f64,
        #[arg(long, default_value_t = 2.0)]
        snr_step: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Noise and message RNG seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// One or more of qam-mapped, psk-arbitrary, binary.
        #[arg(long, value_delimiter = ',', default_value = "qam-mapped")]
        scheme: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_LANES)]
        lanes: usize,
    },
    /// Closed-form QAM minimum distance over a range of l.
    Formula {
        #[arg(long, default_value_t = MIN_QAM_BITS)]
        from: usize,
        #[arg(long, default_value_t = 8)]
        to: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Problem file (JSON, one-based indices, optional "L").
    pub problem: PathBuf,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MappingArgs {
    /// Priority threshold: minrank, length, or an integer.
    #[arg(long, default_value = "minrank")]
    pub threshold: String,
    /// Tie-break seed for the mapper; 0 takes the lowest candidate.
    #[arg(long, default_value_t = 0)]
    pub mapping_seed: u64,
    /// Comma-separated one-based receiver order for equal-eta ties.
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<usize>>,
}

impl MappingArgs {
    fn options(&self) -> Result<MappingOptions> {
        let receiver_order = match &self.order {
            None => None,
            Some(order) => Some(
                order
                    .iter()
                    .map(|&r| {
                        r.checked_sub(1)
                            .ok_or_else(|| Error::Config("receiver order is one-based".into()))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(MappingOptions {
            threshold: self.threshold.parse()?,
            seed: self.mapping_seed,
            receiver_order,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapFormat {
    Csv,
    Json,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let code = if e.is_validation() { EXIT_VALIDATION } else { EXIT_RUNTIME };
            let report = json!({ "error": e.kind(), "message": e.to_string(), "exit_code": code });
            eprintln!("{report}");
            code
        }
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(out: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    let mut w = open_out(out)?;
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

/// The file's `L`, or the minrank witness when it has none.
fn resolve_code(instance: &Instance) -> Result<(IndexCode, &'static str)> {
    match instance.code() {
        Some(code) => Ok((code?, "file")),
        None => Ok((minrank(&instance.problem)?.code(&instance.problem), "minrank witness")),
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|k| k + 1).collect()
}

/// Rows of `L` as bit strings.
fn matrix_rows(code: &IndexCode) -> Vec<String> {
    code.matrix()
        .to_rows()
        .iter()
        .map(|r| r.iter().map(u8::to_string).collect())
        .collect()
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Validate(input) => {
            let instance = load_instance(&input.problem)?;
            let report = instance.problem.report();
            let encoding = instance.encoding.as_ref().map(|m| json!({ "rows": m.rows(), "cols": m.cols() }));
            write_json(
                input.out.as_deref(),
                &json!({
                    "tool": TOOL_VERSION,
                    "problem_hash": instance.hash(),
                    "valid": true,
                    "messages": report.messages,
                    "receivers": report.receivers,
                    "single_unicast": report.single_unicast,
                    "encoding": encoding,
                }),
            )
        }
        Command::Minrank(input) => {
            let instance = load_instance(&input.problem)?;
            let result = minrank(&instance.problem)?;
            let code = result.code(&instance.problem);
            write_json(
                input.out.as_deref(),
                &json!({
                    "tool": TOOL_VERSION,
                    "problem_hash": instance.hash(),
                    "minrank": result.length,
                    "L": matrix_rows(&code),
                    "all_decodable": code.all_decodable(),
                }),
            )
        }
        Command::Analyze(input) => {
            let instance = load_instance(&input.problem)?;
            let (code, source) = resolve_code(&instance)?;
            let n_opt = minrank(&instance.problem)?.length;
            let l = code.length();
            let receivers: Vec<_> = code
                .analyze_all()
                .into_iter()
                .map(|a| {
                    let rx = &instance.problem.receivers()[a.receiver];
                    json!({
                        "receiver": a.receiver + 1,
                        "wants": one_based(rx.wants()),
                        "knows": one_based(rx.knows()),
                        "known_bits": one_based(&a.known_bits),
                        "eta": a.eta,
                        "decodable": code.decodable(a.receiver).unwrap_or(false),
                        "prioritized_below_minrank": a.eta < n_opt,
                        "prioritized_below_length": a.eta < l,
                    })
                })
                .collect();
            write_json(
                input.out.as_deref(),
                &json!({
                    "tool": TOOL_VERSION,
                    "problem_hash": instance.hash(),
                    "code_source": source,
                    "L": matrix_rows(&code),
                    "length": l,
                    "rank": code.rank(),
                    "minrank": n_opt,
                    "bandwidth_gain": code.bandwidth_gain(),
                    "receivers": receivers,
                }),
            )
        }
        Command::Map { input, mapping, format } => {
            let instance = load_instance(&input.problem)?;
            let (code, _) = resolve_code(&instance)?;
            let result = map_codewords(&code, &mapping.options()?)?;
            match format {
                MapFormat::Json => write_json(input.out.as_deref(), &result.to_json(&instance)),
                MapFormat::Csv => {
                    let mut w = open_out(input.out.as_deref())?;
                    result.write_csv(&mut w, &mapping_provenance(&instance, &result))?;
                    w.flush()?;
                    Ok(())
                }
            }
        }
        Command::Distances { input, mapping } => {
            let instance = load_instance(&input.problem)?;
            let (code, _) = resolve_code(&instance)?;
            let result = map_codewords(&code, &mapping.options()?)?;
            let rows = distance_rows(&result.codeword_points(), result.constellation(), &code)?;
            let report = verify_mapping(&result, &code)?;
            let mut prov = mapping_provenance(&instance, &result);
            prov.push("bracket_check", if report.all_pass() { "pass" } else { "fail" });
            let mut w = open_out(input.out.as_deref())?;
            write_distance_report(&rows, &mut w, &prov)?;
            w.flush()?;
            Ok(())
        }
        Command::Simulate {
            input,
            mapping,
            snr_start,
            snr_stop,
            snr_step,
            trials,
            seed,
            scheme,
            lanes,
        } => {
            let instance = load_instance(&input.problem)?;
            let (code, _) = resolve_code(&instance)?;
            let schemes: Vec<Scheme> = scheme.iter().map(|s| s.parse()).collect::<Result<_>>()?;
            let snr = snr_range(*snr_start, *snr_stop, *snr_step)?;
            let qam = if schemes.contains(&Scheme::QamMapped) {
                Some(map_codewords(&code, &mapping.options()?)?)
            } else {
                None
            };
            let mut results = Vec::with_capacity(schemes.len());
            for &s in &schemes {
                let config = SimConfig {
                    lanes: *lanes,
                    ..SimConfig::new(s, snr.clone(), *trials, *seed)
                };
                let m = qam.as_ref().filter(|_| s == Scheme::QamMapped);
                results.push(simulate(&code, m, &config)?);
            }
            let prov = results_provenance(&instance.hash(), &code, qam.as_ref(), *seed)
                .with("mapping_seed", mapping.mapping_seed)
                .with("lanes", lanes);
            let mut w = open_out(input.out.as_deref())?;
            write_results(&results, &mut w, &prov)?;
            w.flush()?;
            Ok(())
        }
        Command::Formula { from, to, out } => {
            if from > to || *from < MIN_QAM_BITS || *to > 64 {
                return Err(Error::Config(format!(
                    "need {MIN_QAM_BITS} <= --from <= --to <= 64, got {from}..{to}"
                )));
            }
            let mut w = open_out(out.as_deref())?;
            Provenance::new()
                .with("constructed_range", format!("{MIN_QAM_BITS}..={MAX_QAM_BITS}"))
                .write_comments(&mut w)?;
            writeln!(w, "l,dmin,dmin_sq")?;
            for l in *from..=*to {
                let d = dmin_formula(l);
                writeln!(w, "{l},{},{}", sig6(d), sig6(d * d))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn mapping_provenance(instance: &Instance, mapping: &CodewordMapping) -> Provenance {
    Provenance::new()
        .with("problem_hash", instance.hash())
        .with("threshold", mapping.threshold())
        .with("mapping_seed", mapping.seed())
        .with("mapping_hash", mapping.hash())
}
