//! The `fsmkit` command line.
//!
//! Exit status: 0 on success, 1 on domain errors and (without
//! `--allow-reject`) rejected runs, 2 on usage errors. Machine inputs are
//! read from stdin when the path is `-` or omitted; outputs go to stdout
//! unless `-o` is given.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{self, in_minus_out, zero_weight};
use crate::automata;
use crate::digits::{binary_digits, eval_expansion, CaseStudies, Expansion};
use crate::error::{FsmError, Result};
use crate::export::{export, Format, LetterFormat, TikzOptions};
use crate::io::{from_json, to_json};
use crate::machine::{Machine, Transition};
use crate::symbol::{Symbol, Word};
use crate::transducer::{self, DEFAULT_STATE_CAP};
use crate::Rational;

pub const STATE_CAP_VAR: &str = "FSMKIT_STATE_CAP";

#[derive(Debug, Parser)]
#[command(name = "fsmkit", version, about = "Finite state automata and transducers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Unary {
    /// Machine file, `-` for stdin.
    file: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Binary {
    first: PathBuf,
    second: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a named machine.
    Build {
        preset: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a deterministic machine on an input word.
    Run {
        file: Option<PathBuf>,
        /// Comma-separated symbols, e.g. `0,1,-1,~,0|1`.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "digits_of")]
        input: Option<String>,
        /// Use the binary digits of N, least significant first.
        #[arg(long)]
        digits_of: Option<i64>,
        /// Print the value of the output with digit i weighing 2^(i+E).
        #[arg(long, allow_hyphen_values = true)]
        eval_offset: Option<i64>,
        /// Exit 0 even if the input is rejected.
        #[arg(long)]
        allow_reject: bool,
    },
    Minimize(Unary),
    Determinize(Unary),
    Complement(Unary),
    Trim(Unary),
    Star(Unary),
    Simplify(Unary),
    ProjectOutput(Unary),
    Intersect(Binary),
    Union(Binary),
    Concat(Binary),
    Product(Binary),
    Compose {
        #[arg(long)]
        outer: PathBuf,
        #[arg(long)]
        inner: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    FinalWordOut {
        file: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        letter: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Counting, equivalence, shortest paths and moments.
    #[command(subcommand)]
    Analyze(Analyze),
    /// Graphviz or TikZ text.
    Export {
        file: Option<PathBuf>,
        #[arg(long)]
        format: String,
        /// JSON object mapping state labels to `[x, y]`.
        #[arg(long)]
        coords: Option<PathBuf>,
        /// Write negative digits as overlined digits.
        #[arg(long)]
        overline_negative: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WeightFn {
    InMinusOut,
    Zero,
}

impl WeightFn {
    fn apply(self, t: &Transition) -> Rational {
        match self {
            WeightFn::InMinusOut => in_minus_out(t),
            WeightFn::Zero => zero_weight(t),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Analyze {
    Count {
        file: Option<PathBuf>,
        #[arg(long)]
        length: usize,
    },
    /// Accepted words up to a length, one per line.
    Words {
        file: Option<PathBuf>,
        #[arg(long)]
        max_length: usize,
    },
    Recurrence {
        file: Option<PathBuf>,
    },
    Equivalent {
        first: PathBuf,
        second: PathBuf,
    },
    ShortestPaths {
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "in-minus-out")]
        weight: WeightFn,
    },
    CheckMinimality {
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "in-minus-out")]
        weight: WeightFn,
    },
    Stationary {
        file: Option<PathBuf>,
    },
    Density {
        file: Option<PathBuf>,
    },
    Moments {
        file: Option<PathBuf>,
    },
}

/// Failure of a command: exit status plus message.
struct Failure {
    code: i32,
    message: String,
}

impl From<FsmError> for Failure {
    fn from(e: FsmError) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

struct Context<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
    state_cap: usize,
}

impl Context<'_> {
    fn read_machine(&mut self, path: Option<&Path>) -> Result<Machine> {
        match path {
            Some(p) if p != Path::new("-") => crate::io::read_file(p),
            _ => {
                let mut text = String::new();
                self.stdin
                    .read_to_string(&mut text)
                    .map_err(|e| FsmError::Format(format!("stdin: {e}")))?;
                from_json(&text)
            }
        }
    }

    fn emit(&mut self, text: &str, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) if p != Path::new("-") => {
                std::fs::write(p, text).map_err(|e| FsmError::Format(format!("{}: {e}", p.display())))
            }
            _ => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|e| FsmError::Format(format!("stdout: {e}"))),
        }
    }

    fn emit_machine(&mut self, m: &Machine, path: Option<&Path>) -> Result<()> {
        self.emit(&to_json(m), path)
    }

    fn unary(&mut self, args: &Unary, op: fn(&Machine) -> Result<Machine>) -> Result<()> {
        let m = self.read_machine(args.file.as_deref())?;
        self.emit_machine(&op(&m)?, args.output.as_deref())
    }

    fn binary(&mut self, args: &Binary, op: fn(&Machine, &Machine) -> Result<Machine>) -> Result<()> {
        let a = self.read_machine(Some(&args.first))?;
        let b = self.read_machine(Some(&args.second))?;
        self.emit_machine(&op(&a, &b)?, args.output.as_deref())
    }
}

fn state_cap_from_env() -> std::result::Result<usize, Failure> {
    match std::env::var(STATE_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{STATE_CAP_VAR} must be a nonnegative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_STATE_CAP),
    }
}

fn load_coordinates(path: &Path) -> Result<BTreeMap<String, (f64, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| FsmError::Format(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| FsmError::Format(format!("{}: {e}", path.display())))
}

fn execute(command: Command, ctx: &mut Context<'_>) -> std::result::Result<(), Failure> {
    match command {
        Command::Build { preset, output } => {
            let m = CaseStudies::new(ctx.state_cap).preset(&preset)?;
            ctx.emit_machine(&m, output.as_deref())?;
            let _ = writeln!(ctx.stderr, "{preset}: {} states, {} transitions", m.len(), m.transitions().len());
        }
        Command::Run {
            file,
            input,
            digits_of,
            eval_offset,
            allow_reject,
        } => {
            let word = match (input, digits_of) {
                (Some(tokens), None) => Word::parse_tokens(&tokens).map_err(|e| usage(e.to_string()))?,
                (None, Some(n)) => binary_digits(n)?,
                (None, None) => Word::empty(),
                (Some(_), Some(_)) => return Err(usage("--input conflicts with --digits-of")),
            };
            let m = ctx.read_machine(file.as_deref())?;
            let result = m.process(&word)?;
            let mut report = format!(
                "accepted: {}\nstate: {}\noutput: {}\n",
                result.accepted,
                result.stop_label,
                result.output.to_tokens()
            );
            if let Some(offset) = eval_offset {
                if result.accepted {
                    let value = eval_expansion(&Expansion::new(result.output.clone(), offset))?;
                    report.push_str(&format!("value: {value}\n"));
                }
            }
            ctx.emit(&report, None)?;
            if !result.accepted && !allow_reject {
                return Err(Failure {
                    code: 1,
                    message: format!("input rejected in state {}", result.stop_label),
                });
            }
        }
        Command::Minimize(a) => ctx.unary(&a, automata::minimize)?,
        Command::Determinize(a) => ctx.unary(&a, automata::determinize)?,
        Command::Complement(a) => ctx.unary(&a, automata::complement)?,
        Command::Trim(a) => ctx.unary(&a, |m| Ok(m.trim()))?,
        Command::Star(a) => ctx.unary(&a, automata::kleene_star)?,
        Command::Simplify(a) => ctx.unary(&a, transducer::simplify)?,
        Command::ProjectOutput(a) => ctx.unary(&a, transducer::output_projection)?,
        Command::Intersect(a) => ctx.binary(&a, automata::intersection)?,
        Command::Union(a) => ctx.binary(&a, automata::union)?,
        Command::Concat(a) => ctx.binary(&a, automata::concat)?,
        Command::Product(a) => ctx.binary(&a, transducer::cartesian_product)?,
        Command::Compose { outer, inner, output } => {
            let outer = ctx.read_machine(Some(&outer))?;
            let inner = ctx.read_machine(Some(&inner))?;
            ctx.emit_machine(&transducer::compose(&outer, &inner)?, output.as_deref())?;
        }
        Command::FinalWordOut { file, letter, output } => {
            let letter: Symbol = letter.parse().map_err(|e: crate::symbol::ParseSymbolError| usage(e.to_string()))?;
            let m = ctx.read_machine(file.as_deref())?;
            ctx.emit_machine(&transducer::with_final_word_out(&m, &letter)?, output.as_deref())?;
        }
        Command::Analyze(a) => analyze(a, ctx)?,
        Command::Export {
            file,
            format,
            coords,
            overline_negative,
            output,
        } => {
            let format: Format = format.parse().map_err(|e: FsmError| usage(e.to_string()))?;
            let m = ctx.read_machine(file.as_deref())?;
            let mut options = TikzOptions::default();
            if let Some(path) = coords {
                options.coordinates = load_coordinates(&path)?;
            }
            if overline_negative {
                options.letter_format = LetterFormat::NegativeOverline;
            }
            ctx.emit(&export(&m, format, &options), output.as_deref())?;
        }
    }
    Ok(())
}

fn analyze(command: Analyze, ctx: &mut Context<'_>) -> Result<()> {
    let report = match command {
        Analyze::Count { file, length } => {
            let m = ctx.read_machine(file.as_deref())?;
            format!("{}\n", automata::count_words(&m, length)?)
        }
        Analyze::Words { file, max_length } => {
            let m = ctx.read_machine(file.as_deref())?;
            automata::language(&m, max_length)?.map(|w| format!("{}\n", w.to_tokens())).collect()
        }
        Analyze::Recurrence { file } => {
            let m = ctx.read_machine(file.as_deref())?;
            let r = automata::word_count_recurrence(&m)?;
            let terms: Vec<String> = r
                .coefficients
                .iter()
                .enumerate()
                .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
                .map(|(i, c)| format!("{c}*a(n-{})", i + 1))
                .collect();
            let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            let initial: Vec<String> = r.initial_terms.iter().map(ToString::to_string).collect();
            let roots: Vec<String> = r.rational_roots().iter().map(ToString::to_string).collect();
            format!(
                "order: {}\na(n) = {rhs}\ninitial: {}\nrational roots: {}\n",
                r.order(),
                initial.join(", "),
                roots.join(", ")
            )
        }
        Analyze::Equivalent { first, second } => {
            let a = ctx.read_machine(Some(&first))?;
            let b = ctx.read_machine(Some(&second))?;
            format!("equivalent: {}\n", automata::is_equivalent(&a, &b)?)
        }
        Analyze::ShortestPaths { file, weight } => {
            let m = ctx.read_machine(file.as_deref())?;
            let (_, paths) = analysis::check_minimality(&m, |t| weight.apply(t))?;
            paths.to_string()
        }
        Analyze::CheckMinimality { file, weight } => {
            let m = ctx.read_machine(file.as_deref())?;
            let (ok, paths) = analysis::check_minimality(&m, |t| weight.apply(t))?;
            format!("minimal: {ok}\n{paths}")
        }
        Analyze::Stationary { file } => {
            let m = ctx.read_machine(file.as_deref())?;
            let v = analysis::stationary_distribution(&m)?;
            m.states().iter().zip(&v).map(|(s, p)| format!("{}: {p}\n", s.label)).collect()
        }
        Analyze::Density { file } => {
            let m = ctx.read_machine(file.as_deref())?;
            format!("density: {}\n", analysis::expected_density(&m)?)
        }
        Analyze::Moments { file } => {
            let m = ctx.read_machine(file.as_deref())?;
            analysis::asymptotic_moments(&m)?.to_string()
        }
    };
    ctx.emit(&report, None)
}

/// Runs the command line against the given streams and returns the exit
/// status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return e.exit_code();
        }
    };
    let result = state_cap_from_env().and_then(|state_cap| {
        let mut ctx = Context {
            stdin,
            stdout,
            stderr,
            state_cap,
        };
        execute(cli.command, &mut ctx)
    });
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run(args, &mut stdin.lock(), &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}
