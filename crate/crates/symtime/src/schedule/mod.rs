//! Transition schedules: the user-declared total order of signal
//! transitions, cause attribution for gate-output events, and per-gate
//! input-case sequences.
//!
//! Schedule files are line-oriented: optional `init <signal>=<0|1>` header
//! lines, then one event per line in global order,
//! `<signal> <rise|fall> [@ <expr>] [cause=<k>]`, with `#` comments.
//! Primary-input events carry symbolic occurrence times (declared after `@`
//! or minted as `t_<signal>_<n>`); gate-output event times are computed by
//! the engine, so declaring them is an error. `cause=<k>` points at the
//! 1-based ordinal of an earlier event on one of the gate's input signals
//! and overrides automatic attribution.
//!
//! Automatic attribution assigns each gate-output event to the most recent
//! earlier input-pin event across which the gate's Boolean function flips
//! to the event's direction. Output events whose function does not flip at
//! their cause are rejected unless nonlogical events are explicitly
//! allowed, in which case they are flagged and analyzed with opaque delays.


use crate::expr::Expr;
use crate::model::{toggle, CaseLabel, CaseMap, Direction, InputState, Pin};
use crate::netlist::{Driver, Netlist};
use std::collections::BTreeMap;

/// Errors from parsing or attributing a schedule.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("schedule parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: unknown signal `{name}`")]
    UnknownSignal { name: String, line: usize },
    #[error("event {event}: `{signal}` transitions in the same direction twice in a row")]
    NonAlternatingDirections { signal: String, event: usize },
    #[error("event {event}: first transition of `{signal}` does not flip its initial value")]
    InconsistentInitialState { signal: String, event: usize },
    #[error("event {event}: no earlier input event explains the {signal} transition")]
    NoFeasibleCause { event: usize, signal: String },
    #[error("event {event}: the gate driving `{signal}` does not flip at the attributed cause (pass --allow-nonlogical to accept)")]
    NonlogicalEvent { event: usize, signal: String },
    #[error("event {event}: invalid cause: {reason}")]
    InvalidCause { event: usize, reason: String },
}

/// One transition in the declared global order.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionEvent {
    pub signal: String,
    pub direction: Direction,
    /// Occurrence time: always `Some` for primary-input events, always
    /// `None` for gate-output events (the engine computes those).
    pub time: Option<Expr>,
    /// Explicit cause from the file, as a 0-based event index.
    pub explicit_cause: Option<usize>,
}

/// A parsed schedule: the declared event order plus explicit initial values.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub events: Vec<TransitionEvent>,
    /// Explicit `init` declarations. Signals not listed get their value
    /// from topological derivation or the all-zero default; see
    /// [`resolve_initial_values`].
    pub declared_init: BTreeMap<String, bool>,
}

/// One input-pin transition as seen by a particular gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputStep {
    /// Global index of the event.
    pub event: usize,
    pub pin: Pin,
    pub before: InputState,
    pub after: InputState,
}

/// A schedule with every gate-output event's cause resolved and per-gate
/// input trajectories precomputed. Immutable; produced by
/// [`attribute_causes`].
#[derive(Debug, Clone, PartialEq)]
pub struct AttributedSchedule {
    pub schedule: Schedule,
    /// For each event: the causing event index (gate-output events), or
    /// `None` (primary-input events).
    pub causes: Vec<Option<usize>>,
    /// Output events accepted only because nonlogical events were allowed:
    /// the gate function does not flip at the attributed cause.
    pub nonlogical: Vec<bool>,
    /// Resolved initial value of every signal.
    pub initial_values: BTreeMap<String, bool>,
    /// For each gate index: its input-pin transitions in schedule order.
    pub input_walks: Vec<Vec<InputStep>>,
}

impl Schedule {
    /// Parses a schedule against a netlist.
    pub fn parse(text: &str, netlist: &Netlist) -> Result<Schedule, ScheduleError> {
        let mut declared_init: BTreeMap<String, bool> = BTreeMap::new();
        let mut events: Vec<TransitionEvent> = Vec::new();
        let mut last_direction: BTreeMap<String, Direction> = BTreeMap::new();
        let mut occurrences: BTreeMap<String, usize> = BTreeMap::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |reason: String| ScheduleError::Parse { line: line_no, reason };

            if let Some(rest) = line.strip_prefix("init") {
                if rest.starts_with(char::is_whitespace) {
                    if !events.is_empty() {
                        return Err(perr("init lines must precede all events".to_string()));
                    }
                    let (name, bit) = rest
                        .trim()
                        .split_once('=')
                        .map(|(n, b)| (n.trim(), b.trim()))
                        .ok_or_else(|| perr("expected `init <signal>=<0|1>`".to_string()))?;
                    if netlist.driver(name).is_none() {
                        return Err(ScheduleError::UnknownSignal {
                            name: name.to_string(),
                            line: line_no,
                        });
                    }
                    let value = match bit {
                        "0" => false,
                        "1" => true,
                        other => return Err(perr(format!("initial value must be 0 or 1, got `{other}`"))),
                    };
                    if declared_init.insert(name.to_string(), value).is_some() {
                        return Err(perr(format!("duplicate init for `{name}`")));
                    }
                    continue;
                }
            }

            // Event line: <signal> <rise|fall> [@ <expr>] [cause=<k>]
            let mut head = line.split_whitespace();
            let signal = head.next().unwrap();
            let dir_tok = head
                .next()
                .ok_or_else(|| perr("expected `<signal> <rise|fall> ...`".to_string()))?;
            let direction = Direction::from_token(dir_tok)
                .ok_or_else(|| perr(format!("invalid direction `{dir_tok}` (expected rise or fall)")))?;
            let driver = netlist.driver(signal).ok_or_else(|| ScheduleError::UnknownSignal {
                name: signal.to_string(),
                line: line_no,
            })?;

            if let Some(prev) = last_direction.insert(signal.to_string(), direction) {
                if prev == direction {
                    return Err(ScheduleError::NonAlternatingDirections {
                        signal: signal.to_string(),
                        event: events.len() + 1,
                    });
                }
            }

            // Split the remainder into the optional time part and the
            // optional trailing cause token. Expressions never contain '=',
            // so a `cause=` token is unambiguous.
            let rest = line[signal.len()..].trim_start()[dir_tok.len()..].trim();
            let (time_part, cause_part) = match rest.find("cause=") {
                Some(pos) => (rest[..pos].trim(), Some(rest[pos..].trim())),
                None => (rest, None),
            };

            let explicit_cause = match cause_part {
                None => None,
                Some(tok) => {
                    let value = tok.strip_prefix("cause=").unwrap();
                    if value.split_whitespace().count() != 1 {
                        return Err(perr("cause= must be the last token on the line".to_string()));
                    }
                    let k: usize = value
                        .trim()
                        .parse()
                        .map_err(|_| perr(format!("invalid cause ordinal `{value}`")))?;
                    if k == 0 || k > events.len() {
                        return Err(ScheduleError::InvalidCause {
                            event: events.len() + 1,
                            reason: format!("ordinal {k} does not name an earlier event"),
                        });
                    }
                    Some(k - 1)
                }
            };

            let time = match (driver, time_part) {
                (Driver::PrimaryInput, "") => {
                    let occ = occurrences.entry(signal.to_string()).or_insert(0);
                    let minted = format!("t_{signal}_{occ}");
                    *occ += 1;
                    Some(Expr::sym(&minted).expect("minted names are valid symbols"))
                }
                (Driver::PrimaryInput, t) => {
                    let body = t.strip_prefix('@').ok_or_else(|| {
                        perr(format!("unexpected `{t}` (expected `@ <expr>` or `cause=<k>`)"))
                    })?;
                    *occurrences.entry(signal.to_string()).or_insert(0) += 1;
                    Some(Expr::parse(body).map_err(|e| perr(format!("occurrence time: {e}")))?)
                }
                (Driver::Gate(_), "") => None,
                (Driver::Gate(_), t) => {
                    let what = if t.starts_with('@') { "declared" } else { "given" };
                    return Err(perr(format!(
                        "gate-output times are computed, not {what} (`{signal}` is driven by a gate)"
                    )));
                }
            };
            if matches!(driver, Driver::PrimaryInput) && explicit_cause.is_some() {
                return Err(perr(format!("primary input `{signal}` cannot have a cause")));
            }

            events.push(TransitionEvent {
                signal: signal.to_string(),
                direction,
                time,
                explicit_cause,
            });
        }

        Ok(Schedule { events, declared_init })
    }

    /// The global index of the `occ`-th (1-based) event on `signal`.
    pub fn occurrence(&self, signal: &str, occ: usize) -> Option<usize> {
        self.events
            .iter()
            .enumerate()
            .filter(|(_, e)| e.signal == signal)
            .map(|(i, _)| i)
            .nth(occ.checked_sub(1)?)
    }

    /// The 1-based occurrence number of event `idx` among its signal's events.
    pub fn occurrence_of(&self, idx: usize) -> usize {
        self.events[..idx]
            .iter()
            .filter(|e| e.signal == self.events[idx].signal)
            .count()
            + 1
    }
}

/// Resolves the initial value of every signal: explicit `init` declarations
/// win; outputs of acyclic combinational gates derive from their inputs
/// topologically; everything else (primary inputs, cycle members, the
/// state-holding C element) defaults to 0.
pub fn resolve_initial_values(schedule: &Schedule, netlist: &Netlist) -> BTreeMap<String, bool> {
    let mut values: BTreeMap<String, bool> = BTreeMap::new();
    for pi in &netlist.primary_inputs {
        values.insert(pi.clone(), *schedule.declared_init.get(pi).unwrap_or(&false));
    }
    for g in &netlist.gates {
        if let Some(v) = schedule.declared_init.get(&g.output) {
            values.insert(g.output.clone(), *v);
        }
    }
    loop {
        let mut progressed = false;
        for g in &netlist.gates {
            if values.contains_key(&g.output) || !g.gate_type.is_combinational() {
                continue;
            }
            if let (Some(&a), Some(&b)) = (values.get(&g.input_a), values.get(&g.input_b)) {
                values.insert(g.output.clone(), g.gate_type.eval(a, b, false));
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    for g in &netlist.gates {
        values.entry(g.output.clone()).or_insert(false);
    }
    values
}

/// Resolves a cause for every gate-output event. Pure: repeated calls on
/// the same inputs return identical attributions.
pub fn attribute_causes(
    schedule: &Schedule,
    netlist: &Netlist,
    allow_nonlogical: bool,
) -> Result<AttributedSchedule, ScheduleError> {
    let initial_values = resolve_initial_values(schedule, netlist);
    let events = &schedule.events;

    // First transition of each signal must flip its initial value.
    let mut seen: BTreeMap<&str, ()> = BTreeMap::new();
    for (i, e) in events.iter().enumerate() {
        if seen.insert(&e.signal, ()).is_none()
            && e.direction.target_value() == initial_values[&e.signal]
        {
            return Err(ScheduleError::InconsistentInitialState {
                signal: e.signal.clone(),
                event: i + 1,
            });
        }
    }

    // Per-gate input trajectories.
    let mut input_walks: Vec<Vec<InputStep>> = vec![Vec::new(); netlist.gates.len()];
    {
        let mut values = initial_values.clone();
        for (i, e) in events.iter().enumerate() {
            for (gi, pin) in netlist.readers(&e.signal) {
                let g = &netlist.gates[gi];
                let before = (values[&g.input_a], values[&g.input_b]);
                input_walks[gi].push(InputStep {
                    event: i,
                    pin,
                    before,
                    after: toggle(before, pin),
                });
            }
            values.insert(e.signal.clone(), e.direction.target_value());
        }
    }

    // Attribution walk.
    let mut causes: Vec<Option<usize>> = vec![None; events.len()];
    let mut nonlogical = vec![false; events.len()];
    let mut out_value: Vec<bool> = netlist
        .gates
        .iter()
        .map(|g| initial_values[&g.output])
        .collect();

    for (i, e) in events.iter().enumerate() {
        let Some(Driver::Gate(gi)) = netlist.driver(&e.signal) else {
            continue;
        };
        let gt = netlist.gates[gi].gate_type;
        let target = e.direction.target_value();
        let prev_out = out_value[gi];
        let flips = |step: &InputStep| {
            let fb = gt.eval(step.before.0, step.before.1, prev_out);
            let fa = gt.eval(step.after.0, step.after.1, prev_out);
            fb != fa && fa == target
        };

        let chosen: Option<(usize, bool)> = match e.explicit_cause {
            Some(k) => {
                if k >= i {
                    return Err(ScheduleError::InvalidCause {
                        event: i + 1,
                        reason: format!("event {} is not earlier", k + 1),
                    });
                }
                let step = input_walks[gi]
                    .iter()
                    .find(|s| s.event == k)
                    .ok_or_else(|| ScheduleError::InvalidCause {
                        event: i + 1,
                        reason: format!(
                            "event {} is not on an input of the gate driving `{}`",
                            k + 1,
                            e.signal
                        ),
                    })?;
                Some((k, !flips(step)))
            }
            None => input_walks[gi]
                .iter()
                .rev()
                .filter(|s| s.event < i)
                .find(|s| flips(s))
                .map(|s| (s.event, false)),
        };

        let (cause, is_nonlogical) = match chosen {
            Some(pair) => pair,
            None => {
                // No flipping candidate. Lenient mode anchors to the most
                // recent input event; strict mode distinguishes "no input
                // events at all" from "none that flips".
                let most_recent = input_walks[gi].iter().rev().find(|s| s.event < i);
                match (most_recent, allow_nonlogical) {
                    (Some(s), true) => (s.event, true),
                    (Some(_), false) => {
                        return Err(ScheduleError::NonlogicalEvent {
                            event: i + 1,
                            signal: e.signal.clone(),
                        })
                    }
                    (None, _) => {
                        return Err(ScheduleError::NoFeasibleCause {
                            event: i + 1,
                            signal: e.signal.clone(),
                        })
                    }
                }
            }
        };
        if is_nonlogical && !allow_nonlogical {
            return Err(ScheduleError::NonlogicalEvent {
                event: i + 1,
                signal: e.signal.clone(),
            });
        }
        causes[i] = Some(cause);
        nonlogical[i] = is_nonlogical;
        out_value[gi] = target;
    }

    Ok(AttributedSchedule {
        schedule: schedule.clone(),
        causes,
        nonlogical,
        initial_values,
        input_walks,
    })
}

impl AttributedSchedule {
    /// The case label of each input transition of a gate, with the global
    /// event index it classifies. Composing the labeled edges reproduces
    /// the gate's input-state trajectory.
    pub fn case_sequence(&self, case_map: &CaseMap, gate_idx: usize) -> Vec<(CaseLabel, usize)> {
        self.input_walks[gate_idx]
            .iter()
            .map(|s| (case_map.classify(s.before, s.pin), s.event))
            .collect()
    }

    /// Convenience accessor for the underlying events.
    pub fn events(&self) -> &[TransitionEvent] {
        &self.schedule.events
    }
}
