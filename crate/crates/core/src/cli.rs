//! The `chemtext` command line, kept in the library so it can be driven
//! in-process with arbitrary standard streams.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::dataset::{equal_mix, read_jsonl, write_jsonl, TaskKind};
use crate::eval::{
    evaluate, read_predictions, thread_pool_from_env, FpConfig, ForwardOracle, LookupOracle,
    SmilesBleuTokens, Text2MolConfig,
};
use crate::fingerprints::{
    key_fingerprint, morgan_fingerprint, path_fingerprint, tanimoto, BitFingerprint, KeyTable,
    DEFAULT_MORGAN_RADIUS, DEFAULT_NBITS, DEFAULT_PATH_LENGTH,
};
use crate::merge::{grad_check, merge, Combine, Matrix, MergeOp, MergeParams};
use crate::smiles::{canonicalize, check_smiles, Molecule};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Usage = 1,
    Data = 2,
    Internal = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

type CliResult = Result<ExitStatus, CliError>;

#[derive(Parser, Debug)]
#[command(name = "chemtext", version, about = "Chemistry/text model data and evaluation tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Equal-mix several task JSONL files into one training file.
    BuildDataset {
        /// `<task>=<path>`; repeat once per task.
        #[arg(long = "task-file", required = true, value_name = "KIND=PATH")]
        task_files: Vec<String>,
        #[arg(long)]
        per_task: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a predictions JSONL file and print a JSON report.
    Evaluate {
        #[arg(long)]
        task: String,
        #[arg(long)]
        predictions: PathBuf,
        /// Forward oracle for retro, e.g. `lookup:reactions.tsv`.
        #[arg(long)]
        oracle: Option<String>,
        #[arg(long, default_value_t = DEFAULT_NBITS)]
        fp_bits: usize,
        #[arg(long, default_value_t = DEFAULT_MORGAN_RADIUS)]
        fp_radius: usize,
        #[arg(long, default_value_t = DEFAULT_PATH_LENGTH)]
        fp_path_length: usize,
        #[arg(long, value_enum, default_value_t = BleuTokens::Chars)]
        smiles_bleu: BleuTokens,
    },
    /// Canonicalize SMILES read line by line from standard input.
    Canonicalize,
    /// Fingerprint SMILES read line by line from standard input.
    Fingerprint {
        #[command(flatten)]
        fp: FpArgs,
    },
    /// Tanimoto similarity of two SMILES.
    Similarity {
        a: String,
        b: String,
        #[command(flatten)]
        fp: FpArgs,
    },
    /// Run the cross-attention merge on matrix files and grad-check it.
    MergeDemo {
        h_t: PathBuf,
        h_m: PathBuf,
        params: PathBuf,
        /// Defaults to the variant implied by the params file.
        #[arg(long, value_enum)]
        op: Option<OpArg>,
        #[arg(long, default_value_t = 1e-5)]
        epsilon: f64,
    },
}

#[derive(clap::Args, Debug, Clone)]
struct FpArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::Morgan)]
    scheme: SchemeArg,
    #[arg(long, default_value_t = DEFAULT_NBITS)]
    bits: usize,
    #[arg(long, default_value_t = DEFAULT_MORGAN_RADIUS)]
    radius: usize,
    #[arg(long, default_value_t = DEFAULT_PATH_LENGTH)]
    path_length: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SchemeArg {
    Morgan,
    Path,
    Keys,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum BleuTokens {
    Chars,
    Smiles,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum OpArg {
    Cross,
    Hierarchical,
    Bidirectional,
    Mean,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T, R, W, E>(args: I, stdin: R, stdout: &mut W, stderr: &mut E) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    R: BufRead,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    ExitStatus::Success
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    ExitStatus::Usage
                }
            };
        }
    };
    let result = match cli.command {
        Command::BuildDataset { task_files, per_task, seed, out } => {
            build_dataset(&task_files, per_task, seed, &out, stdout)
        }
        Command::Evaluate { task, predictions, oracle, fp_bits, fp_radius, fp_path_length, smiles_bleu } => {
            let config = Text2MolConfig {
                fp: FpConfig { nbits: fp_bits, radius: fp_radius, path_length: fp_path_length },
                bleu_tokens: match smiles_bleu {
                    BleuTokens::Chars => SmilesBleuTokens::Characters,
                    BleuTokens::Smiles => SmilesBleuTokens::Smiles,
                },
            };
            evaluate_cmd(&task, &predictions, oracle.as_deref(), &config, stdout)
        }
        Command::Canonicalize => canonicalize_cmd(stdin, stdout),
        Command::Fingerprint { fp } => fingerprint_cmd(&fp, stdin, stdout),
        Command::Similarity { a, b, fp } => similarity_cmd(&a, &b, &fp, stdout),
        Command::MergeDemo { h_t, h_m, params, op, epsilon } => merge_demo(&h_t, &h_m, &params, op, epsilon, stdout),
    };
    match result {
        Ok(status) => status,
        Err(e) => {
            let (status, msg) = match e {
                CliError::Usage(m) => (ExitStatus::Usage, m),
                CliError::Data(m) => (ExitStatus::Data, m),
                CliError::Internal(m) => (ExitStatus::Internal, m),
            };
            let _ = writeln!(stderr, "error: {msg}");
            status
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn build_dataset<W: Write>(task_files: &[String], per_task: usize, seed: u64, out: &Path, stdout: &mut W) -> CliResult {
    let mut streams = BTreeMap::new();
    for spec in task_files {
        let (kind, path) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--task-file expects KIND=PATH, got `{spec}`")))?;
        let task: TaskKind = kind.parse().map_err(|e: crate::dataset::DatasetError| CliError::Usage(e.to_string()))?;
        let records = read_jsonl(open(Path::new(path))?).map_err(|e| CliError::Data(format!("{path}: {e}")))?;
        if let Some(r) = records.iter().find(|r| r.task != task) {
            return Err(CliError::Data(format!("{path}: record with task {} in a {task} file", r.task)));
        }
        if streams.insert(task, records).is_some() {
            return Err(CliError::Usage(format!("task {task} given twice")));
        }
    }
    if per_task == 0 {
        return Err(CliError::Usage("--per-task must be positive".into()));
    }
    let mixed = equal_mix(&streams, per_task, seed).map_err(|e| CliError::Data(e.to_string()))?;
    let file = File::create(out).map_err(|e| CliError::Data(format!("{}: {e}", out.display())))?;
    write_jsonl(std::io::BufWriter::new(file), &mixed).map_err(|e| CliError::Data(e.to_string()))?;
    for task in streams.keys() {
        let n = mixed.iter().filter(|r| r.task == *task).count();
        writeln!(stdout, "{task}\t{n}")?;
    }
    Ok(ExitStatus::Success)
}

fn evaluate_cmd<W: Write>(
    task: &str,
    predictions: &Path,
    oracle: Option<&str>,
    config: &Text2MolConfig,
    stdout: &mut W,
) -> CliResult {
    let task: TaskKind = task.parse().map_err(|e: crate::dataset::DatasetError| CliError::Usage(e.to_string()))?;
    let lookup = match oracle {
        None if task == TaskKind::Retro => {
            return Err(CliError::Usage("retro evaluation needs --oracle lookup:PATH".into()))
        }
        None => None,
        Some(spec) => {
            let path = spec
                .strip_prefix("lookup:")
                .ok_or_else(|| CliError::Usage(format!("unsupported oracle `{spec}`; use lookup:PATH")))?;
            Some(LookupOracle::from_tsv(open(Path::new(path))?).map_err(|e| CliError::Data(format!("{path}: {e}")))?)
        }
    };
    let pairs = read_predictions(open(predictions)?)
        .map_err(|e| CliError::Data(format!("{}: {e}", predictions.display())))?;
    let pool = thread_pool_from_env();
    let report = pool
        .install(|| evaluate(task, &pairs, config, lookup.as_ref().map(|o| o as &dyn ForwardOracle)))
        .map_err(|e| CliError::Data(e.to_string()))?;
    writeln!(stdout, "{}", report.to_canonical_json())?;
    Ok(ExitStatus::Success)
}

/// Writes one output line per input line; exit 2 when no line succeeded.
fn per_line<R: BufRead, W: Write>(
    stdin: R,
    stdout: &mut W,
    mut f: impl FnMut(&str) -> Result<String, String>,
) -> CliResult {
    let (mut seen, mut ok) = (0usize, 0usize);
    for line in stdin.lines() {
        let line = line?;
        let input = line.trim();
        seen += 1;
        match f(input) {
            Ok(s) => {
                ok += 1;
                writeln!(stdout, "{s}")?;
            }
            Err(reason) => writeln!(stdout, "INVALID {reason}")?,
        }
    }
    if seen > 0 && ok == 0 {
        return Ok(ExitStatus::Data);
    }
    Ok(ExitStatus::Success)
}

fn valid_molecule(smiles: &str) -> Result<Molecule, String> {
    if smiles.is_empty() {
        return Err("empty input".into());
    }
    match check_smiles(smiles) {
        (r, Some(m)) if r.valid => Ok(m),
        (r, _) => Err(r.to_string()),
    }
}

fn canonicalize_cmd<R: BufRead, W: Write>(stdin: R, stdout: &mut W) -> CliResult {
    per_line(stdin, stdout, |s| {
        let m = valid_molecule(s)?;
        canonicalize(&m).map_err(|e| e.to_string())
    })
}

fn fingerprint_of(m: &Molecule, fp: &FpArgs, keys: &KeyTable) -> Result<BitFingerprint, String> {
    match fp.scheme {
        SchemeArg::Morgan => morgan_fingerprint(m, fp.radius, fp.bits),
        SchemeArg::Path => path_fingerprint(m, fp.path_length, fp.bits),
        SchemeArg::Keys => key_fingerprint(m, keys),
    }
    .map_err(|e| e.to_string())
}

fn fingerprint_cmd<R: BufRead, W: Write>(fp: &FpArgs, stdin: R, stdout: &mut W) -> CliResult {
    let keys = KeyTable::default_table();
    per_line(stdin, stdout, |s| {
        let m = valid_molecule(s)?;
        fingerprint_of(&m, fp, &keys).map(|f| f.to_string())
    })
}

fn similarity_cmd<W: Write>(a: &str, b: &str, fp: &FpArgs, stdout: &mut W) -> CliResult {
    let keys = KeyTable::default_table();
    let get = |s: &str| -> Result<BitFingerprint, CliError> {
        let m = valid_molecule(s).map_err(|r| CliError::Data(format!("`{s}`: {r}")))?;
        fingerprint_of(&m, fp, &keys).map_err(CliError::Data)
    };
    let t = tanimoto(&get(a)?, &get(b)?).map_err(|e| CliError::Internal(e.to_string()))?;
    writeln!(stdout, "{t:.6}")?;
    Ok(ExitStatus::Success)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn merge_demo<W: Write>(h_t: &Path, h_m: &Path, params: &Path, op: Option<OpArg>, epsilon: f64, stdout: &mut W) -> CliResult {
    let data = |p: &Path, e: crate::merge::MergeError| CliError::Data(format!("{}: {e}", p.display()));
    let ht = Matrix::parse(&read_text(h_t)?).map_err(|e| data(h_t, e))?;
    let hm = Matrix::parse(&read_text(h_m)?).map_err(|e| data(h_m, e))?;
    let p = MergeParams::parse(&read_text(params)?).map_err(|e| data(params, e))?;
    let op = match op {
        Some(OpArg::Cross) => MergeOp::CrossAttend,
        Some(OpArg::Hierarchical) => MergeOp::Hierarchical,
        Some(OpArg::Bidirectional) => MergeOp::Bidirectional,
        Some(OpArg::Mean) => MergeOp::MeanAggregate,
        None if p.combine != Combine::BaseOnly => MergeOp::Bidirectional,
        None if p.depth > 1 => MergeOp::Hierarchical,
        None => MergeOp::CrossAttend,
    };
    if !(epsilon > 0.0 && epsilon <= 1e-3) {
        return Err(CliError::Usage(format!("--epsilon {epsilon} outside (0, 1e-3]")));
    }
    let out = merge(op, &ht, &hm, &p).map_err(|e| CliError::Data(e.to_string()))?;
    let report = grad_check(op, &ht, &hm, &p, epsilon).map_err(|e| CliError::Data(e.to_string()))?;
    writeln!(stdout, "# {}", op.name())?;
    write!(stdout, "{out}")?;
    writeln!(
        stdout,
        "grad_check max_rel_error={:.3e} checked={} epsilon={:e}",
        report.max_rel_error, report.checked, report.epsilon
    )?;
    Ok(ExitStatus::Success)
}
