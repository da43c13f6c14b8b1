use clap::{Args, Parser, Subcommand, ValueEnum};
use sorted_fmf::encode::Mode;
use sorted_fmf::logic::{DomainSizes, Signature, SymbolOrigin};
use sorted_fmf::model::{print_model, restrict};
use sorted_fmf::pipeline::{load, prepare, Config};
use sorted_fmf::search::{search, Extras, Outcome, SearchReport};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

/// Finite model finder for multi-sorted first-order problems in TPTP syntax.
#[derive(Parser, Debug)]
#[command(name = "sfmf", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    opts: Opts,
    /// Problem file (FOF, CNF or TFF).
    file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run both search modes and report how many assignments each checked.
    Compare {
        #[command(flatten)]
        opts: Opts,
        file: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Pointwise,
    Contour,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    #[arg(long, value_enum, default_value = "pointwise")]
    mode: ModeArg,
    /// Search without learned or detected constraints.
    #[arg(long)]
    no_constraints: bool,
    #[arg(long)]
    no_collapse: bool,
    #[arg(long)]
    no_expand: bool,
    /// Skip injectivity and surjectivity bounds.
    #[arg(long)]
    no_bounds: bool,
    #[arg(long)]
    no_symmetry: bool,
    #[arg(long)]
    no_definitions: bool,
    /// Split clauses with more variables than N (0 disables splitting).
    #[arg(long, value_name = "N", default_value_t = 3)]
    split_max_vars: usize,
    /// Wall-clock budget in seconds.
    #[arg(long, value_name = "S", default_value_t = 60.0, value_parser = positive_f64)]
    time_limit: f64,
    /// Largest encoding, in clauses, to build.
    #[arg(long, value_name = "N", default_value_t = 50_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    clause_cap: u64,
    /// Do not explore assignments whose sizes sum past N.
    #[arg(long, value_name = "N", default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_total_size: u64,
    /// Write one line per visited assignment to PATH.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Print search and encoding statistics.
    #[arg(long)]
    stats: bool,
    /// Write the last encoding to PATH in DIMACS format.
    #[arg(long, value_name = "PATH")]
    dimacs: Option<PathBuf>,
    /// Skip checking the model against the input clauses.
    #[arg(long)]
    no_verify: bool,
    /// Treat conjectures as axioms instead of negating them.
    #[arg(long)]
    keep_conjecture: bool,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number of seconds, got `{s}`")),
    }
}

impl Opts {
    fn config(&self) -> Config {
        Config {
            mode: match self.mode {
                ModeArg::Pointwise => Mode::Pointwise,
                ModeArg::Contour => Mode::Contour,
            },
            constraints: !self.no_constraints,
            collapse: !self.no_collapse,
            expand: !self.no_expand,
            bounds: !self.no_bounds,
            symmetry: !self.no_symmetry,
            definitions: !self.no_definitions,
            split_max_vars: (self.split_max_vars > 0).then_some(self.split_max_vars),
            verify: !self.no_verify,
            keep_conjecture: self.keep_conjecture,
            time_limit: Duration::from_secs_f64(self.time_limit),
            clause_cap: self.clause_cap,
            max_total_size: self.max_total_size,
        }
    }
}

fn status(o: &Outcome) -> &'static str {
    match o {
        Outcome::Satisfiable { .. } => "Satisfiable",
        Outcome::Unsatisfiable => "Unsatisfiable",
        Outcome::ResourceOut(_) => "ResourceOut",
        Outcome::Error(_) => "Error",
    }
}

fn named_sizes(sizes: &DomainSizes, sig: &Signature) -> String {
    let parts: Vec<String> = sizes.sorts().map(|s| format!("{}={}", sig.sort_name(s), sizes.get(s))).collect();
    parts.join(" ")
}

fn read_problem(path: &Path, opts: &Opts) -> Result<sorted_fmf::logic::Problem, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    load(&text, opts.keep_conjecture).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn run(opts: &Opts, path: &Path) -> Result<ExitCode, (String, u8)> {
    let problem = read_problem(path, opts).map_err(|e| (e, 1))?;
    let cfg = opts.config();
    let prep = prepare(problem, &cfg);
    let report = search(&prep, &cfg, Extras { keep_dimacs: opts.dimacs.is_some() });

    let mut out = String::new();
    if let Outcome::Error(msg) = &report.outcome {
        return Err((format!("internal error: {msg}"), 2));
    }
    let _ = writeln!(out, "% SZS status {} for {}", status(&report.outcome), file_label(path));
    match &report.outcome {
        Outcome::Satisfiable { model, .. } => {
            let sig = &prep.original.signature;
            let (shown, shown_sig) = restrict(model, sig, |o| o == SymbolOrigin::Input);
            let _ = writeln!(out, "% sizes {}", named_sizes(&model.sizes, sig));
            let _ = writeln!(out, "% SZS output start FiniteModel");
            out.push_str(&print_model(&shown, &shown_sig));
            let _ = writeln!(out, "% SZS output end FiniteModel");
        }
        Outcome::ResourceOut(why) => {
            let _ = writeln!(out, "% reason: {why}");
        }
        _ => {}
    }
    if opts.stats {
        out.push_str(&stats(&report, &prep.flat.signature));
    }
    if let Some(p) = &opts.trace {
        write_file(p, &trace(&report)).map_err(|e| (e, 2))?;
    }
    if let Some(p) = &opts.dimacs {
        write_file(p, report.dimacs.as_deref().unwrap_or("")).map_err(|e| (e, 2))?;
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn file_label(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn trace(report: &SearchReport) -> String {
    report.trace.iter().map(|l| format!("{l}\n")).collect()
}

fn stats(report: &SearchReport, sig: &Signature) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "% sorts {}", sig.sorts.join(" "));
    let _ = writeln!(out, "% checked {}", report.checked);
    let _ = writeln!(out, "% visited {}", report.trace.len());
    if let Some(e) = &report.last_encoding {
        let _ = writeln!(out, "% last encoding {e}");
    }
    let s = &report.solver;
    let _ = writeln!(out, "% solver conflicts={} decisions={} propagations={}", s.conflicts, s.decisions, s.propagations);
    out
}

fn compare(opts: &Opts, path: &Path) -> Result<ExitCode, (String, u8)> {
    let problem = read_problem(path, opts).map_err(|e| (e, 1))?;
    let mut verdicts = Vec::new();
    let mut out = String::new();
    for (name, mode) in [("pointwise", Mode::Pointwise), ("contour", Mode::Contour)] {
        let cfg = Config { mode, ..opts.config() };
        let prep = prepare(problem.clone(), &cfg);
        let report = search(&prep, &cfg, Extras::default());
        if let Outcome::Error(msg) = &report.outcome {
            return Err((format!("internal error in {name} mode: {msg}"), 2));
        }
        let sizes = match &report.outcome {
            Outcome::Satisfiable { model, .. } => format!(" sizes {}", named_sizes(&model.sizes, &problem.signature)),
            _ => String::new(),
        };
        let _ = writeln!(
            out,
            "% {name}: {} checked={} visited={}{sizes}",
            status(&report.outcome),
            report.checked,
            report.trace.len()
        );
        verdicts.push(status(&report.outcome));
    }
    let decided = |v: &&str| *v != "ResourceOut";
    let agree = verdicts[0] == verdicts[1] || !decided(&verdicts[0]) || !decided(&verdicts[1]);
    let _ = writeln!(out, "% verdicts {}", if agree { "agree" } else { "DISAGREE" });
    print!("{out}");
    Ok(if agree { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match (&cli.command, &cli.file) {
        (Some(Command::Compare { opts, file }), _) => compare(opts, file),
        (None, Some(file)) => run(&cli.opts, file),
        (None, None) => Err(("no input file given (try --help)".into(), 1)),
    };
    match result {
        Ok(code) => code,
        Err((msg, code)) => {
            eprintln!("sfmf: {msg}");
            ExitCode::from(code)
        }
    }
}
