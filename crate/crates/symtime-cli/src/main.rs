//! Batch command-line front end: parses circuit, schedule, model, and
//! binding files, runs symbolic propagation, and exposes the numeric and
//! formal consumers of the resulting time expressions.
//!
//! Exit codes are a stable contract: 0 success (or verdict `consistent`),
//! 1 verdict `violated`, 2 any error.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use symtime::analysis::{
    assert_physical, check_consistency, export_smt, ordering_constraints, parse_bindings,
    parse_rational, sensitivity, sweep, sweep_csv, Binding, ConsistencyReport, ValidityWarning,
    Verdict, Violation,
};
use symtime::engine::{propagate, DelayKind, TimingSolution};
use symtime::expr::Symbol;
use symtime::model::{Direction, ModelLibrary};
use symtime::netlist::Netlist;
use symtime::schedule::{Schedule, TransitionEvent};

#[derive(Parser)]
#[command(
    name = "symtime",
    version,
    about = "Symbolic timing analysis of gate-level circuits",
    long_about = "Given a netlist, a declared total order of signal transitions, and a \
                  library of analytic delay templates, computes a closed-form symbolic \
                  expression for every gate-output transition time. The expressions can \
                  be instantiated numerically, checked against the declared order, \
                  differentiated, swept over grids, and exported as SMT-LIB2 constraints."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute and print the symbolic time expression of every event
    Analyze(AnalyzeArgs),
    /// Instantiate the times numerically and verify the declared order
    Check(CheckArgs),
    /// Differentiate an event's time with respect to one symbol
    Sens(SensArgs),
    /// Evaluate an event's time over a grid of values for one symbol
    Sweep(SweepArgs),
    /// Export the ordering region as SMT-LIB2 (QF_NRA) constraints
    ExportSmt(ExportSmtArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Circuit netlist file
    netlist: PathBuf,
    /// Transition schedule file
    schedule: PathBuf,
    /// Delay-model library file (defaults to the built-in library)
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Treat the netlist file as ISCAS .bench text (2-input NAND/NOR only)
    #[arg(long)]
    from_bench: bool,
    /// Accept gate-output events whose cause does not logically flip the
    /// output; they receive opaque d_nl_* delay symbols
    #[arg(long)]
    allow_nonlogical: bool,
    /// Output format (csv applies to sweep only)
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the primary output to a file instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Print a derivation trace for an event (repeatable)
    #[arg(long, value_name = "SIGNAL:OCCURRENCE")]
    explain: Vec<String>,
    /// Render the declared schedule as an ASCII waveform
    #[arg(long)]
    text_waveform: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Numeric binding file (`name = value` lines)
    #[arg(long, value_name = "FILE")]
    bind: PathBuf,
    /// Reject non-positive values for gate parameters and opaque delays
    #[arg(long)]
    strict_physical: bool,
}

#[derive(Args)]
struct SensArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Event to differentiate
    #[arg(long, value_name = "SIGNAL:OCCURRENCE")]
    event: String,
    /// Symbol to differentiate with respect to
    #[arg(long, value_name = "SYMBOL")]
    wrt: String,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Event whose time is evaluated
    #[arg(long, value_name = "SIGNAL:OCCURRENCE")]
    event: String,
    /// Symbol stepped over the grid
    #[arg(long, value_name = "SYMBOL")]
    wrt: String,
    /// Comma-separated exact values (integers, p/q rationals, or decimals)
    #[arg(long, value_name = "V1,V2,...")]
    grid: String,
    /// Binding file for the remaining symbols
    #[arg(long, value_name = "FILE")]
    bind: Option<PathBuf>,
}

#[derive(Args)]
struct ExportSmtArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Also pin symbols to the values from this binding file
    #[arg(long, value_name = "FILE")]
    bind: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
    Csv,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Check(args) => cmd_check(args),
        Command::Sens(args) => cmd_sens(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::ExportSmt(args) => cmd_export_smt(args),
    }
}

// ----- shared plumbing -------------------------------------------------------

struct Session {
    netlist: Netlist,
    solution: TimingSolution,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(common: &CommonArgs) -> Result<Session> {
    let netlist_text = read(&common.netlist)?;
    let netlist = if common.from_bench {
        Netlist::import_bench(&netlist_text)
    } else {
        Netlist::parse(&netlist_text)
    }
    .with_context(|| format!("parsing netlist {}", common.netlist.display()))?;

    let library = match &common.model {
        Some(path) => ModelLibrary::parse(&read(path)?)
            .with_context(|| format!("parsing model {}", path.display()))?,
        None => ModelLibrary::load_default(),
    };

    let schedule = Schedule::parse(&read(&common.schedule)?, &netlist)
        .with_context(|| format!("parsing schedule {}", common.schedule.display()))?;

    let solution = propagate(&netlist, &schedule, &library, common.allow_nonlogical)
        .context("propagating transition times")?;
    Ok(Session { netlist, solution })
}

fn load_bindings(path: &Path) -> Result<Binding> {
    parse_bindings(&read(path)?).with_context(|| format!("parsing bindings {}", path.display()))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn events(session: &Session) -> &[TransitionEvent] {
    &session.solution.attributed.schedule.events
}

/// Resolves `SIGNAL:OCCURRENCE` (1-based occurrence) to an event index.
fn resolve_event(session: &Session, spec: &str) -> Result<usize> {
    let (signal, occurrence) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("expected SIGNAL:OCCURRENCE (e.g. o1:1), got `{spec}`"))?;
    let occurrence: usize = occurrence
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| anyhow!("occurrence in `{spec}` must be a positive integer"))?;
    session
        .solution
        .attributed
        .schedule
        .occurrence(signal, occurrence)
        .ok_or_else(|| anyhow!("the schedule has no occurrence {occurrence} of signal `{signal}`"))
}

fn parse_symbol(name: &str) -> Result<Symbol> {
    Symbol::new(name).map_err(|e| anyhow!("{e}"))
}

fn reject_csv(format: Format, command: &str) -> Result<()> {
    if format == Format::Csv {
        bail!("csv format applies to sweep only, not {command}");
    }
    Ok(())
}

// ----- analyze ---------------------------------------------------------------

fn cmd_analyze(args: AnalyzeArgs) -> Result<i32> {
    reject_csv(args.common.format, "analyze")?;
    let session = load(&args.common)?;

    let mut explain_indices = Vec::new();
    for spec in &args.explain {
        explain_indices.push(resolve_event(&session, spec)?);
    }

    let text = match args.common.format {
        Format::Text => {
            let mut out = analyze_text(&session);
            for &idx in &explain_indices {
                out.push('\n');
                out.push_str(&explain_text(&session, idx));
            }
            if args.text_waveform {
                out.push('\n');
                out.push_str(&waveform_text(&session));
            }
            out
        }
        Format::Structured => analyze_json(&session),
        Format::Csv => unreachable!(),
    };
    emit(&args.common.out, &text)?;
    Ok(0)
}

fn analyze_text(session: &Session) -> String {
    let solution = &session.solution;
    let mut out = String::from("events:\n");
    for (i, event) in events(session).iter().enumerate() {
        let marker = if solution.details[i].is_some() { '=' } else { '@' };
        let _ = writeln!(
            out,
            "{:>4}  {} {:<4} {} {}",
            i + 1,
            event.signal,
            event.direction.to_string(),
            marker,
            solution.times[i]
        );
    }
    if !solution.records.is_empty() {
        out.push_str("\ninput-pair records:\n");
        for rec in &solution.records {
            let gate = &session.netlist.gates[rec.gate];
            let t = match &rec.t {
                Some(t) => t.to_string(),
                None => "-".to_string(),
            };
            let _ = writeln!(
                out,
                "  {} {} at event {}: T = {}, DELTA = {}",
                gate.id,
                rec.pair,
                rec.at_event + 1,
                t,
                rec.delta
            );
            for (direction, value) in &rec.instantiated {
                let _ = writeln!(out, "    {direction} template = {value}");
            }
        }
    }
    let symbols: Vec<String> = solution
        .free_symbols()
        .iter()
        .map(|s| s.name().to_string())
        .collect();
    let _ = writeln!(out, "\nfree symbols: {}", symbols.join(", "));
    out
}

fn explain_text(session: &Session, idx: usize) -> String {
    let solution = &session.solution;
    let event = &events(session)[idx];
    let occurrence = solution.attributed.schedule.occurrence_of(idx);
    let mut out = format!(
        "{}:{} = {}\n",
        event.signal, occurrence, solution.times[idx]
    );
    let _ = writeln!(
        out,
        "  event {}: {} {}",
        idx + 1,
        event.signal,
        event.direction
    );

    let Some(detail) = &solution.details[idx] else {
        let _ = writeln!(out, "  primary input; declared time");
        return out;
    };
    let gate = &session.netlist.gates[detail.gate];
    let cause = &events(session)[detail.cause];
    let _ = writeln!(out, "  gate {} ({})", gate.id, gate.gate_type);
    let _ = writeln!(
        out,
        "  cause: event {} ({} {}) at {}",
        detail.cause + 1,
        cause.signal,
        cause.direction,
        solution.times[detail.cause]
    );
    match &detail.kind {
        DelayKind::Cold { case } => {
            let _ = writeln!(
                out,
                "  first output transition: cold case {case}, {}",
                event.direction
            );
        }
        DelayKind::Pair { pair, t, delta } => {
            let _ = writeln!(out, "  input pair {pair}: T = {t}, DELTA = {delta}");
        }
    }
    if detail.nonlogical {
        let _ = writeln!(
            out,
            "  nonlogical: the cause does not flip the output level; opaque delay"
        );
    }
    match &detail.opaque {
        Some(name) => {
            let _ = writeln!(out, "  delay: {} (opaque symbol {name})", detail.delay);
        }
        None => {
            let _ = writeln!(out, "  delay: {} (analytic template)", detail.delay);
        }
    }
    let _ = writeln!(
        out,
        "  time = ({}) + ({}) = {}",
        solution.times[detail.cause], detail.delay, solution.times[idx]
    );
    out
}

fn waveform_text(session: &Session) -> String {
    let netlist = &session.netlist;
    let attributed = &session.solution.attributed;
    let schedule_events = &attributed.schedule.events;

    let mut signals: Vec<&str> = netlist.primary_inputs.iter().map(String::as_str).collect();
    signals.extend(netlist.gates.iter().map(|g| g.output.as_str()));
    let width = signals.iter().map(|s| s.len()).max().unwrap_or(0);

    let level_char = |level: bool| if level { '~' } else { '_' };
    let mut out = String::new();

    // Ruler: one digit (event ordinal mod 10) per two-column event slot.
    let mut ruler = " ".repeat(width + 3);
    for k in 0..schedule_events.len() {
        let _ = write!(ruler, "{} ", (k + 1) % 10);
    }
    out.push_str(ruler.trim_end());
    out.push('\n');

    for signal in signals {
        let mut level = attributed
            .initial_values
            .get(signal)
            .copied()
            .unwrap_or(false);
        let _ = write!(out, "{signal:<width$}  ");
        out.push(level_char(level));
        for event in schedule_events {
            if event.signal == signal {
                level = event.direction == Direction::Rise;
                out.push(if level { '/' } else { '\\' });
            } else {
                out.push(level_char(level));
            }
            out.push(level_char(level));
        }
        out.push('\n');
    }
    out
}

fn analyze_json(session: &Session) -> String {
    let solution = &session.solution;
    let events_json: Vec<serde_json::Value> = events(session)
        .iter()
        .enumerate()
        .map(|(i, event)| {
            let mut obj = json!({
                "index": i,
                "signal": event.signal,
                "direction": event.direction.to_string(),
                "time": solution.times[i].to_string(),
            });
            if let Some(detail) = &solution.details[i] {
                let gate = &session.netlist.gates[detail.gate];
                obj["gate"] = json!(gate.id);
                obj["cause"] = json!(detail.cause);
                obj["delay"] = json!(detail.delay.to_string());
                obj["opaque"] = json!(detail.opaque);
                obj["nonlogical"] = json!(detail.nonlogical);
                match &detail.kind {
                    DelayKind::Cold { case } => {
                        obj["kind"] = json!("cold");
                        obj["case"] = json!(case.to_string());
                    }
                    DelayKind::Pair { pair, t, delta } => {
                        obj["kind"] = json!("pair");
                        obj["pair"] = json!(pair.to_string());
                        obj["T"] = json!(t.to_string());
                        obj["DELTA"] = json!(delta.to_string());
                    }
                }
            } else {
                obj["kind"] = json!("input");
            }
            obj
        })
        .collect();

    let records_json: Vec<serde_json::Value> = solution
        .records
        .iter()
        .map(|rec| {
            json!({
                "gate": session.netlist.gates[rec.gate].id,
                "pair": rec.pair.to_string(),
                "at_event": rec.at_event,
                "T": rec.t.as_ref().map(|t| t.to_string()),
                "DELTA": rec.delta.to_string(),
                "instantiated": rec.instantiated.iter().map(|(d, e)| {
                    json!({"direction": d.to_string(), "value": e.to_string()})
                }).collect::<Vec<_>>(),
            })
        })
        .collect();

    let symbols: Vec<String> = solution
        .free_symbols()
        .iter()
        .map(|s| s.name().to_string())
        .collect();
    let doc = json!({
        "events": events_json,
        "records": records_json,
        "free_symbols": symbols,
    });
    format!("{}\n", serde_json::to_string_pretty(&doc).expect("valid json"))
}

// ----- check -----------------------------------------------------------------

fn cmd_check(args: CheckArgs) -> Result<i32> {
    reject_csv(args.common.format, "check")?;
    let session = load(&args.common)?;
    let binding = load_bindings(&args.bind)?;
    if args.strict_physical {
        assert_physical(&session.solution, &binding)?;
    }
    let report = check_consistency(&session.solution, &binding)?;

    for warning in &report.validity_warnings {
        eprintln!("{}", warning_text(&session, warning));
    }

    let text = match args.common.format {
        Format::Text => check_text(&session, &report),
        Format::Structured => check_json(&session, &report),
        Format::Csv => unreachable!(),
    };
    emit(&args.common.out, &text)?;
    Ok(match report.verdict {
        Verdict::Consistent => 0,
        Verdict::Violated => 1,
    })
}

fn warning_text(session: &Session, warning: &ValidityWarning) -> String {
    match warning {
        ValidityWarning::NonPositiveEventDelay { event, delay } => {
            let e = &events(session)[*event];
            format!(
                "warning: event {} ({} {}): instantiated delay {} <= 0",
                event + 1,
                e.signal,
                e.direction,
                delay
            )
        }
        ValidityWarning::NonPositiveTemplateValue {
            record,
            direction,
            value,
        } => {
            let rec = &session.solution.records[*record];
            let gate = &session.netlist.gates[rec.gate];
            format!(
                "warning: pair record {} of gate {} at event {}: {} template instantiates to {} <= 0",
                rec.pair,
                gate.id,
                rec.at_event + 1,
                direction,
                value
            )
        }
    }
}

fn violation_text(session: &Session, violation: &Violation) -> String {
    let earlier = &events(session)[violation.earlier];
    let later = &events(session)[violation.later];
    if violation.tie {
        format!(
            "first violation: event {} ({} {}) ties event {} ({} {}) at t = {}",
            violation.later + 1,
            later.signal,
            later.direction,
            violation.earlier + 1,
            earlier.signal,
            earlier.direction,
            violation.later_time
        )
    } else {
        format!(
            "first violation: event {} ({} {}) at t = {} does not strictly follow event {} ({} {}) at t = {}",
            violation.later + 1,
            later.signal,
            later.direction,
            violation.later_time,
            violation.earlier + 1,
            earlier.signal,
            earlier.direction,
            violation.earlier_time
        )
    }
}

fn check_text(session: &Session, report: &ConsistencyReport) -> String {
    let mut out = format!("verdict: {}\n", report.verdict);
    if let Some(violation) = &report.first_violation {
        let _ = writeln!(out, "{}", violation_text(session, violation));
    }
    out.push_str("times:\n");
    for (i, event) in events(session).iter().enumerate() {
        let _ = writeln!(
            out,
            "{:>4}  {} {:<4} t = {}",
            i + 1,
            event.signal,
            event.direction.to_string(),
            report.times[i]
        );
    }
    out
}

fn check_json(session: &Session, report: &ConsistencyReport) -> String {
    let warnings: Vec<serde_json::Value> = report
        .validity_warnings
        .iter()
        .map(|w| match w {
            ValidityWarning::NonPositiveEventDelay { event, delay } => json!({
                "kind": "event_delay",
                "event": event,
                "delay": delay.to_string(),
            }),
            ValidityWarning::NonPositiveTemplateValue {
                record,
                direction,
                value,
            } => {
                let rec = &session.solution.records[*record];
                json!({
                    "kind": "template_value",
                    "record": record,
                    "gate": session.netlist.gates[rec.gate].id,
                    "pair": rec.pair.to_string(),
                    "direction": direction.to_string(),
                    "value": value.to_string(),
                })
            }
        })
        .collect();
    let doc = json!({
        "verdict": report.verdict.to_string(),
        "times": report.times.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "first_violation": report.first_violation.as_ref().map(|v| json!({
            "earlier": v.earlier,
            "later": v.later,
            "earlier_time": v.earlier_time.to_string(),
            "later_time": v.later_time.to_string(),
            "tie": v.tie,
        })),
        "validity_warnings": warnings,
    });
    format!("{}\n", serde_json::to_string_pretty(&doc).expect("valid json"))
}

// ----- sens ------------------------------------------------------------------

fn cmd_sens(args: SensArgs) -> Result<i32> {
    reject_csv(args.common.format, "sens")?;
    let session = load(&args.common)?;
    let event = resolve_event(&session, &args.event)?;
    let wrt = parse_symbol(&args.wrt)?;
    let derivative = sensitivity(&session.solution, event, &wrt)?;

    let text = match args.common.format {
        Format::Text => format!("{derivative}\n"),
        Format::Structured => {
            let e = &events(&session)[event];
            let doc = json!({
                "event": event,
                "signal": e.signal,
                "occurrence": session.solution.attributed.schedule.occurrence_of(event),
                "wrt": wrt.name(),
                "derivative": derivative.to_string(),
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("valid json"))
        }
        Format::Csv => unreachable!(),
    };
    emit(&args.common.out, &text)?;
    Ok(0)
}

// ----- sweep -----------------------------------------------------------------

fn cmd_sweep(args: SweepArgs) -> Result<i32> {
    let session = load(&args.common)?;
    let event = resolve_event(&session, &args.event)?;
    let wrt = parse_symbol(&args.wrt)?;
    let grid = args
        .grid
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse_rational(t).map_err(|e| anyhow!("--grid: {e}")))
        .collect::<Result<Vec<_>>>()?;
    let base = match &args.bind {
        Some(path) => load_bindings(path)?,
        None => Binding::new(),
    };
    let rows = sweep(&session.solution, event, &wrt, &grid, &base)?;

    let text = match args.common.format {
        Format::Csv => sweep_csv(&rows),
        Format::Text => {
            let width = rows
                .iter()
                .map(|(v, _)| v.to_string().len())
                .max()
                .unwrap_or(0)
                .max("value".len());
            let mut out = format!("{:<width$}  time\n", "value");
            for (value, time) in &rows {
                let _ = writeln!(out, "{:<width$}  {}", value.to_string(), time);
            }
            out
        }
        Format::Structured => {
            let doc = json!({
                "event": event,
                "wrt": wrt.name(),
                "rows": rows.iter().map(|(v, t)| json!({
                    "value": v.to_string(),
                    "time": t.to_string(),
                })).collect::<Vec<_>>(),
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("valid json"))
        }
    };
    emit(&args.common.out, &text)?;
    Ok(0)
}

// ----- export-smt ------------------------------------------------------------

fn cmd_export_smt(args: ExportSmtArgs) -> Result<i32> {
    if args.common.format != Format::Text {
        bail!("export-smt always writes SMT-LIB2 text; --format is not supported");
    }
    let session = load(&args.common)?;
    let binding = match &args.bind {
        Some(path) => Some(load_bindings(path)?),
        None => None,
    };
    let constraints = ordering_constraints(&session.solution);
    let script = export_smt(&constraints, binding.as_ref())?;
    emit(&args.common.out, &script)?;
    Ok(0)
}
