//! Command-line front end. Exit codes: 0 success, 1 domain error, 2 I/O or usage error.

pub mod config;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use indalign_core::format::AlignmentReader;
use indalign_core::network::{enumerate_paths, Repository};
use indalign_core::{
    compose_alignments, evaluate, invert_alignment, run_scenarios, serialize_alignment, trim,
    validate, Alignment, Error, ParseMode, RelationSetPolicy, ScenarioSpec,
};

use crate::config::{ConfigError, RunConfig, Settings, StrategyChoice};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "indalign",
    version,
    about = "Compose ontology alignments through pivot ontologies"
)]
struct Cli {
    /// Directory of alignment files
    #[arg(long, global = true, value_name = "DIR")]
    repo: Option<PathBuf>,
    /// Flat key=value config file
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Reject out-of-range confidences and incomplete cells (default)
    #[arg(long, global = true, conflicts_with = "lenient")]
    strict: bool,
    /// Clamp out-of-range confidences and skip incomplete cells
    #[arg(long, global = true)]
    lenient: bool,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Stopword file used by label normalization
    #[arg(long, global = true, value_name = "FILE")]
    stopwords: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct PolicyArgs {
    /// mult, norm, max, min or all
    #[arg(long)]
    strategy: Option<StrategyChoice>,
    /// singleton, drop-gamma or keep-all
    #[arg(long)]
    relations: Option<RelationSetPolicy>,
    #[arg(long, value_name = "FLOAT")]
    sim_threshold: Option<f64>,
    /// Synonym lexicon (label<TAB>label per line)
    #[arg(long, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    /// Drop composed cells below this confidence
    #[arg(long, value_name = "FLOAT")]
    trim: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check alignment files and print diagnostics
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// List ontologies, alignments and composition paths of a repository
    Network {
        /// Repository directory (alternative to --repo)
        dir: Option<PathBuf>,
        /// Print only the number of paths
        #[arg(long)]
        count: bool,
    },
    /// Compose alignments from --source to --target through every pivot
    Compose {
        #[arg(long, value_name = "URI")]
        source: String,
        #[arg(long, value_name = "URI")]
        target: String,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Swap the two ontologies of an alignment
    Invert { file: PathBuf },
    /// Keep the cells whose confidence is at least THRESHOLD
    Trim { file: PathBuf, threshold: f64 },
    /// Precision and recall of FOUND against REFERENCE
    Eval {
        found: PathBuf,
        reference: PathBuf,
        /// Print a CSV row instead of the text report
        #[arg(long)]
        csv: bool,
    },
    /// Run a scenario file and report precision/recall per row and strategy
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        policy: PolicyArgs,
    },
}

/// A failed command: exit code plus message for standard error.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn domain(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_DOMAIN,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

fn is_io_like(e: &Error) -> bool {
    match e {
        Error::Io { .. } | Error::Argument(_) | Error::Config(_) => true,
        Error::InFile { source, .. } => is_io_like(source),
        _ => false,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if is_io_like(&e) { EXIT_IO } else { EXIT_DOMAIN },
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::io(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs the tool with `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn flag_settings(cli: &Cli, policy: Option<&PolicyArgs>) -> Settings {
    let mode = match (cli.strict, cli.lenient) {
        (_, true) => Some(ParseMode::Lenient),
        (true, _) => Some(ParseMode::Strict),
        _ => None,
    };
    let p = policy.map_or_else(PolicyArgs::default, |p| PolicyArgs {
        strategy: p.strategy,
        relations: p.relations,
        sim_threshold: p.sim_threshold,
        lexicon: p.lexicon.clone(),
        trim: p.trim,
    });
    Settings {
        repo: cli.repo.clone(),
        strategy: p.strategy,
        relations: p.relations,
        sim_threshold: p.sim_threshold,
        lexicon: p.lexicon,
        stopwords: cli.stopwords.clone(),
        trim: p.trim,
        mode,
        out: cli.out.clone(),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let policy_args = match &cli.command {
        Command::Compose { policy, .. } | Command::Run { policy, .. } => Some(policy),
        _ => None,
    };
    let flags = flag_settings(&cli, policy_args);
    let file = match &cli.config {
        Some(path) => Settings::load_config(path).map_err(|e| match e {
            ConfigError::Io(m) | ConfigError::Invalid(m) => Failure::io(m),
        })?,
        None => Settings::default(),
    };
    let cfg = RunConfig::resolve(flags, file);
    for (name, v) in [
        ("--sim-threshold", Some(cfg.sim_threshold)),
        ("--trim", cfg.trim),
    ] {
        if let Some(v) = v {
            if !(0.0..=1.0).contains(&v) {
                return Err(Failure::io(format!("{name} {v} outside [0,1]")));
            }
        }
    }

    match cli.command {
        Command::Validate { files } => cmd_validate(&files, out, err),
        Command::Network { dir, count } => {
            let repo = dir.or_else(|| cfg.repo.clone());
            cmd_network(repo.as_deref(), count, &cfg, out, err)
        }
        Command::Compose { source, target, .. } => cmd_compose(&source, &target, &cfg, out, err),
        Command::Invert { file } => cmd_invert(&file, &cfg, out),
        Command::Trim { file, threshold } => cmd_trim(&file, threshold, &cfg, out),
        Command::Eval {
            found,
            reference,
            csv,
        } => cmd_eval(&found, &reference, csv, &cfg, out),
        Command::Run { scenario, .. } => cmd_run(&scenario, &cfg, out, err),
    }
}

fn cmd_validate(files: &[PathBuf], _out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let mut code = EXIT_OK;
    for path in files {
        let bytes = match fs::read(path) {
            Ok(b) => b,
            Err(e) => {
                writeln!(err, "error: {}: {e}", path.display())?;
                code = EXIT_IO;
                continue;
            }
        };
        let diags = validate(&bytes);
        for d in &diags {
            writeln!(err, "{}", d.render(&path.display().to_string()))?;
        }
        if diags
            .iter()
            .any(|d| d.severity == indalign_core::Severity::Error)
        {
            code = code.max(EXIT_DOMAIN);
        }
    }
    Ok(code)
}

fn load_repository(
    dir: Option<&Path>,
    cfg: &RunConfig,
    err: &mut dyn Write,
) -> Result<Repository, Failure> {
    let dir = dir.ok_or_else(|| Failure::io("no repository given (use --repo DIR)"))?;
    if !dir.is_dir() {
        return Err(Failure::io(format!("{}: not a directory", dir.display())));
    }
    let repo = Repository::load(dir, &cfg.parse_options())?;
    for (path, warning) in &repo.warnings {
        writeln!(err, "warning: {}: {warning}", path.display())?;
    }
    Ok(repo)
}

fn cmd_network(
    dir: Option<&Path>,
    count: bool,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let repo = load_repository(dir, cfg, err)?;
    let net = repo.network()?;
    let paths = enumerate_paths(&net, None);
    if count {
        writeln!(out, "{}", paths.len())?;
        return Ok(EXIT_OK);
    }
    writeln!(
        out,
        "{} ontologies, {} alignments, {} paths",
        net.node_count(),
        net.edges().len(),
        paths.len()
    )?;
    if net.node_count() > 0 {
        writeln!(out, "ontologies:")?;
        for o in net.nodes() {
            match o.language_hint() {
                Some(lang) => writeln!(out, "  {o} [{lang}]")?,
                None => writeln!(out, "  {o}")?,
            }
        }
    }
    if !net.edges().is_empty() {
        writeln!(out, "alignments:")?;
        for e in net.edges() {
            writeln!(out, "  {}: {} -- {}", e.alignment, e.onto1, e.onto2)?;
        }
    }
    if !paths.is_empty() {
        writeln!(out, "paths:")?;
        for p in &paths {
            writeln!(
                out,
                "  {} -> {} -> {} via {}, {} (direct: {})",
                p.source,
                p.pivot,
                p.target,
                base_id(&p.first.id),
                base_id(&p.second.id),
                if p.has_direct { "yes" } else { "no" }
            )?;
        }
    }
    Ok(EXIT_OK)
}

/// Stored alignment id without the inversion marker.
fn base_id(id: &str) -> &str {
    id.strip_suffix("^-1").unwrap_or(id)
}

fn output_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| Failure::io(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, bytes).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn cmd_compose(
    source: &str,
    target: &str,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let repo = load_repository(cfg.repo.as_deref(), cfg, err)?;
    let net = repo.network()?;
    let (Some(src), Some(tgt)) = (net.resolve(source), net.resolve(target)) else {
        return Err(Failure::domain(format!(
            "no composition path from {source} to {target}"
        )));
    };
    let paths = enumerate_paths(&net, Some((src.uri(), tgt.uri())));
    if paths.is_empty() {
        return Err(Failure::domain(format!(
            "no composition path from {source} to {target}"
        )));
    }

    let lexicon = match &cfg.lexicon {
        Some(path) => Some(indalign_core::load_lexicon(path)?),
        None => None,
    };
    let dir = output_dir(cfg);
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for path in &paths {
        let pivot_tag = path.pivot.tag();
        let n = seen.entry(pivot_tag.clone()).or_default();
        *n += 1;
        let pivot_tag = if *n == 1 {
            pivot_tag
        } else {
            format!("{pivot_tag}-{n}")
        };
        for strategy in cfg.strategy.strategies() {
            let mut composed = compose_alignments(path, &cfg.policy(strategy), lexicon.as_ref())?;
            if let Some(t) = cfg.trim {
                composed = trim(&composed, t)?;
            }
            let name = format!(
                "{}-{}.via.{}.{}.rdf",
                path.source.tag(),
                path.target.tag(),
                pivot_tag,
                strategy
            );
            let file = dir.join(name);
            write_file(&file, &serialize_alignment(&composed))?;
            writeln!(
                out,
                "wrote {} ({} cells)",
                file.display(),
                composed.cells.len()
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn read_alignment(path: &Path, cfg: &RunConfig) -> Result<Alignment, Failure> {
    let reader = AlignmentReader::new(cfg.parse_options())?;
    reader.parse_file(path).map_err(|e| match e {
        Error::Io { .. } => Failure::from(e),
        e => Failure::domain(format!("{}: {e}", path.display())),
    })
}

fn emit_alignment(
    a: &Alignment,
    source: &Path,
    suffix: &str,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> CmdResult {
    let bytes = serialize_alignment(a);
    match &cfg.out {
        Some(dir) => {
            let stem = source
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "alignment".into());
            let file = dir.join(format!("{stem}.{suffix}.rdf"));
            write_file(&file, &bytes)?;
            writeln!(out, "wrote {} ({} cells)", file.display(), a.cells.len())?;
        }
        None => out.write_all(&bytes)?,
    }
    Ok(EXIT_OK)
}

fn cmd_invert(file: &Path, cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let a = read_alignment(file, cfg)?;
    emit_alignment(&invert_alignment(&a), file, "inv", cfg, out)
}

fn cmd_trim(file: &Path, threshold: f64, cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Failure::io(format!("threshold {threshold} outside [0,1]")));
    }
    let a = read_alignment(file, cfg)?;
    emit_alignment(&trim(&a, threshold)?, file, "trim", cfg, out)
}

fn cmd_eval(
    found: &Path,
    reference: &Path,
    csv: bool,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> CmdResult {
    let found_al = read_alignment(found, cfg)?;
    let reference_al = read_alignment(reference, cfg)?;
    let report = evaluate(&found_al, &reference_al).map_err(|e| Failure::domain(e.to_string()))?;
    if csv {
        writeln!(out, "{}", indalign_core::evaluator::CSV_HEADER)?;
        writeln!(
            out,
            "1,-,{:.2},{:.2},{},{},{}",
            report.precision, report.recall, report.n_found, report.n_expected, report.n_correct
        )?;
        return Ok(EXIT_OK);
    }
    writeln!(out, "{}", report.summary())?;
    writeln!(
        out,
        "found={} expected={} correct={}",
        report.n_found, report.n_expected, report.n_correct
    )?;
    for c in &report.missing {
        writeln!(
            out,
            "missing: {} {} {}",
            c.entity1.uri(),
            c.relation,
            c.entity2.uri()
        )?;
    }
    for c in &report.spurious {
        writeln!(
            out,
            "spurious: {} {} {}",
            c.entity1.uri(),
            c.relation,
            c.entity2.uri()
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_run(
    scenario: &Path,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let text = fs::read_to_string(scenario)
        .map_err(|e| Failure::io(format!("{}: {e}", scenario.display())))?;
    let spec = ScenarioSpec::parse(&text).map_err(|e| Failure::domain(e.to_string()))?;
    let repo = if spec.rows.is_empty() {
        Repository::default()
    } else {
        load_repository(cfg.repo.as_deref(), cfg, err)?
    };
    let policy = cfg.policy(indalign_core::ConfidenceStrategy::default());
    let table = run_scenarios(&spec, &repo, &policy, None).map_err(|e| match e {
        Error::Scenario { .. } => Failure::domain(e.to_string()),
        e => Failure::from(e),
    })?;

    let text = table.to_text();
    let csv = table.to_csv();
    out.write_all(text.as_bytes())?;
    match &cfg.out {
        Some(dir) => {
            let stem = scenario
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into());
            let csv_path = dir.join(format!("{stem}.csv"));
            write_file(&dir.join(format!("{stem}.txt")), text.as_bytes())?;
            write_file(&csv_path, csv.as_bytes())?;
            writeln!(out, "wrote {}", csv_path.display())?;
        }
        None => {
            writeln!(out)?;
            out.write_all(csv.as_bytes())?;
        }
    }
    Ok(EXIT_OK)
}
