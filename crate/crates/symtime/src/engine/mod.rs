//! Symbolic propagation: assigns a closed-form occurrence-time expression
//! to every event of a schedule, composing delay templates through
//! arbitrary — including cyclic — topologies in declared order.
//!
//! For a gate-output event `e` with cause `c`:
//! * if `e` is the gate's first output transition, `time(e) = time(c) +
//!   cold_delay(case(c))`;
//! * otherwise, with `(x, y)` the gate's two most recent input cases up to
//!   and including `c`, `T = time(c) − time(previous output transition)`,
//!   `Δ = time(c) − time(x's event)`, and `time(e) = time(c) +
//!   template(x, y, direction)(T, Δ)`.
//!
//! Non-flipping input events still consume pair slots: the `x` position
//! reflects the raw input history, whether or not the output reacted.
//! Events accepted as nonlogical never use analytic templates (those model
//! logical transitions) and get dedicated opaque symbols instead.
//!
//! Feedback needs no fixpoint machinery: the finite schedule unrolls the
//! recursion, each output occurrence being a fresh event whose expression
//! nests its predecessors'.


use crate::expr::{Expr, Symbol};
use crate::model::{
    instantiate_delay, CaseLabel, CasePair, DelayForm, Direction, ModelError, ModelLibrary,
    RESERVED_DELTA, RESERVED_T,
};
use crate::netlist::{Driver, Gate, Netlist};
use crate::schedule::{attribute_causes, AttributedSchedule, Schedule, ScheduleError};
use std::collections::{BTreeMap, BTreeSet};

/// Errors from symbolic propagation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("gate `{gate}` pins parameter `{name}`, which its model does not declare")]
    UnknownParameter { gate: String, name: String },
}

/// How a gate-output event's delay was selected.
#[derive(Debug, Clone, PartialEq)]
pub enum DelayKind {
    /// First output transition (or no usable input history): keyed by the
    /// cause's case alone.
    Cold { case: CaseLabel },
    /// Subsequent transition: keyed by the two most recent input cases,
    /// with the drafting time `T` and input separation `Δ` as expressions.
    Pair { pair: CasePair, t: Expr, delta: Expr },
}

/// Derivation record for one gate-output event.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayDetail {
    /// Index into the netlist's gate list.
    pub gate: usize,
    /// Global index of the causing event.
    pub cause: usize,
    pub kind: DelayKind,
    /// The instantiated delay expression added to the cause time.
    pub delay: Expr,
    /// Name of the opaque fallback symbol, when no analytic template applied.
    pub opaque: Option<String>,
    /// True when the event was accepted without a logical output flip.
    pub nonlogical: bool,
}

/// One consecutive input-case pair observed at a gate, with the quantities
/// a pair template would consume at the later event. These records exist
/// for every second-and-later input transition regardless of whether any
/// output event used them, and feed validity diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub gate: usize,
    pub pair: CasePair,
    /// Global index of the later input event (the record's anchor).
    pub at_event: usize,
    /// Time since the gate's previous output transition at the anchor;
    /// `None` when the gate has not produced an output yet.
    pub t: Option<Expr>,
    /// Separation between the two input events.
    pub delta: Expr,
    /// Analytic templates matching this pair (either direction),
    /// instantiated with this record's `T`/`Δ`. Templates needing `T` are
    /// skipped when `t` is `None`.
    pub instantiated: Vec<(Direction, Expr)>,
}

/// The result of propagation: one closed-form time per event plus full
/// derivation records. Immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingSolution {
    pub attributed: AttributedSchedule,
    /// One expression per event, index-aligned with the schedule.
    pub times: Vec<Expr>,
    /// Derivation details, `Some` exactly for gate-output events.
    pub details: Vec<Option<DelayDetail>>,
    /// Consecutive input-pair records across all gates, in schedule order
    /// of their anchor events.
    pub records: Vec<PairRecord>,
    /// Per gate: every parameter name resolved during propagation and the
    /// expression it resolved to (pinned value or default symbol).
    pub params_used: Vec<BTreeMap<String, Expr>>,
}

impl TimingSolution {
    /// Union of free symbols over all event times, event delays, and
    /// instantiated record delays — everything a numeric binding must cover
    /// for a full consistency check.
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut set = BTreeSet::new();
        for t in &self.times {
            set.extend(t.free_symbols());
        }
        for d in self.details.iter().flatten() {
            set.extend(d.delay.free_symbols());
        }
        for r in &self.records {
            for (_, e) in &r.instantiated {
                set.extend(e.free_symbols());
            }
        }
        set
    }
}

/// True for names following the opaque-delay conventions `d_<y>`,
/// `d_<xy>`, `d_nl_<y>`, `d_nl_<xy>`; such names may be pinned on a gate
/// even though no model declares them.
fn is_opaque_shaped(name: &str) -> bool {
    let Some(suffix) = name.strip_prefix("d_") else {
        return false;
    };
    let suffix = suffix.strip_prefix("nl_").unwrap_or(suffix);
    (1..=2).contains(&suffix.len()) && suffix.chars().all(|c| ('a'..='h').contains(&c))
}

/// A pinned parameter value, or the per-gate default symbol
/// `<name>_<gate id>`. Every resolution is recorded in `used`.
fn resolve_param(gate: &Gate, name: &str, used: &mut BTreeMap<String, Expr>) -> Expr {
    let value = gate.params.get(name).cloned().unwrap_or_else(|| {
        Expr::sym(&format!("{name}_{}", gate.id))
            .expect("gate ids and parameter names are valid symbol names")
    });
    used.insert(name.to_string(), value.clone());
    value
}

/// Resolves every non-reserved free symbol of a template body.
fn resolve_template_params(
    gate: &Gate,
    body: &Expr,
    used: &mut BTreeMap<String, Expr>,
) -> BTreeMap<String, Expr> {
    let mut map = BTreeMap::new();
    for sym in body.free_symbols() {
        let name = sym.name();
        if name == RESERVED_T || name == RESERVED_DELTA {
            continue;
        }
        map.insert(name.to_string(), resolve_param(gate, name, used));
    }
    map
}

/// Computes a closed-form occurrence time for every event.
pub fn propagate(
    netlist: &Netlist,
    schedule: &Schedule,
    library: &ModelLibrary,
    allow_nonlogical: bool,
) -> Result<TimingSolution, EngineError> {
    // Upfront validation: gate types must have model sections (unless the
    // library is empty, which is fully permissive), and pinned parameter
    // names must be declared or opaque-shaped.
    for g in &netlist.gates {
        match library.gate_model(g.gate_type) {
            Some(m) => {
                for name in g.params.keys() {
                    if !m.params.contains(name) && !is_opaque_shaped(name) {
                        return Err(EngineError::UnknownParameter {
                            gate: g.id.clone(),
                            name: name.clone(),
                        });
                    }
                }
            }
            None if !library.is_empty() => {
                return Err(ModelError::UnknownGateType(g.gate_type.name().to_string()).into());
            }
            None => {}
        }
    }

    let attributed = attribute_causes(schedule, netlist, allow_nonlogical)?;
    let map = library.case_map();
    let events = &attributed.schedule.events;
    let n = events.len();

    let mut times: Vec<Expr> = Vec::with_capacity(n);
    let mut details: Vec<Option<DelayDetail>> = vec![None; n];
    let mut params_used: Vec<BTreeMap<String, Expr>> = vec![BTreeMap::new(); netlist.gates.len()];
    let mut last_output: Vec<Option<usize>> = vec![None; netlist.gates.len()];
    let zero = Expr::int(0);

    for i in 0..n {
        let e = &events[i];
        let time = match netlist.driver(&e.signal).expect("schedule parse validated signals") {
            Driver::PrimaryInput => e
                .time
                .clone()
                .expect("primary-input events always carry a time"),
            Driver::Gate(gi) => {
                let gate = &netlist.gates[gi];
                let cause = attributed.causes[i].expect("gate-output events are attributed");
                debug_assert!(cause < i, "causal closure: cause precedes its event");
                let walk = &attributed.input_walks[gi];
                let pos = walk
                    .iter()
                    .position(|s| s.event == cause)
                    .expect("the cause is an input event of the gate");
                let y = map.classify(walk[pos].before, walk[pos].pin);
                let cause_time = times[cause].clone();
                let used = &mut params_used[gi];

                let pair_context = |times: &[Expr]| -> (CasePair, Expr, Expr) {
                    let prev = &walk[pos - 1];
                    let x = map.classify(prev.before, prev.pin);
                    let pair = CasePair::new(map, x, y)
                        .expect("consecutive steps of one gate's input walk chain");
                    let prev_out = last_output[gi].expect("pair context requires a prior output");
                    let t = Expr::sub(cause_time.clone(), times[prev_out].clone());
                    let delta = Expr::sub(cause_time.clone(), times[prev.event].clone());
                    (pair, t, delta)
                };

                let (kind, delay, opaque) = if attributed.nonlogical[i] {
                    // Nonlogical events never use analytic templates; they
                    // get dedicated opaque symbols keyed by the same input
                    // history a logical lookup would have used.
                    if last_output[gi].is_some() && pos >= 1 {
                        let (pair, t, delta) = pair_context(&times);
                        let name = format!("d_nl_{}{}", pair.previous, pair.current);
                        let d = resolve_param(gate, &name, used);
                        (DelayKind::Pair { pair, t, delta }, d, Some(name))
                    } else {
                        let name = format!("d_nl_{y}");
                        let d = resolve_param(gate, &name, used);
                        (DelayKind::Cold { case: y }, d, Some(name))
                    }
                } else if last_output[gi].is_none() {
                    match library.lookup_cold(gate.gate_type, y, e.direction)? {
                        DelayForm::Analytic(body) => {
                            // Cold bodies cannot reference T/Δ (the model
                            // parser rejects them), so placeholders suffice.
                            let params = resolve_template_params(gate, body, used);
                            let d = instantiate_delay(body, &zero, &zero, &params)?;
                            (DelayKind::Cold { case: y }, d, None)
                        }
                        DelayForm::Opaque(name) => {
                            let d = resolve_param(gate, &name, used);
                            (DelayKind::Cold { case: y }, d, Some(name))
                        }
                    }
                } else {
                    // A logical non-first output transition always has an
                    // input event preceding its cause: flipping to both
                    // directions from one candidate is impossible for the
                    // supported gate functions.
                    assert!(pos >= 1, "logical repeat transition with a first-input cause");
                    let (pair, t, delta) = pair_context(&times);
                    match library.lookup_pair(gate.gate_type, pair, e.direction)? {
                        DelayForm::Analytic(body) => {
                            let params = resolve_template_params(gate, body, used);
                            let d = instantiate_delay(body, &t, &delta, &params)?;
                            (DelayKind::Pair { pair, t, delta }, d, None)
                        }
                        DelayForm::Opaque(name) => {
                            let d = resolve_param(gate, &name, used);
                            (DelayKind::Pair { pair, t, delta }, d, Some(name))
                        }
                    }
                };

                details[i] = Some(DelayDetail {
                    gate: gi,
                    cause,
                    kind,
                    delay: delay.clone(),
                    opaque,
                    nonlogical: attributed.nonlogical[i],
                });
                last_output[gi] = Some(i);
                Expr::sum(vec![cause_time, delay])
            }
        };
        times.push(time);
    }

    // Pair records: every consecutive input-case pair at every gate, with
    // matching analytic templates instantiated for validity diagnostics.
    let mut records = Vec::new();
    for (gi, gate) in netlist.gates.iter().enumerate() {
        let walk = &attributed.input_walks[gi];
        let outputs: Vec<usize> = (0..n).filter(|&k| events[k].signal == gate.output).collect();
        for w in 1..walk.len() {
            let (prev, cur) = (&walk[w - 1], &walk[w]);
            let x = map.classify(prev.before, prev.pin);
            let y = map.classify(cur.before, cur.pin);
            let pair =
                CasePair::new(map, x, y).expect("consecutive steps of one gate's input walk chain");
            let delta = Expr::sub(times[cur.event].clone(), times[prev.event].clone());
            let prev_out = outputs.iter().rev().find(|&&o| o < cur.event).copied();
            let t = prev_out.map(|o| Expr::sub(times[cur.event].clone(), times[o].clone()));

            let mut instantiated = Vec::new();
            if let Some(m) = library.gate_model(gate.gate_type) {
                for dir in [Direction::Rise, Direction::Fall] {
                    let Some(body) = m.pairs.get(&(x, y, dir)) else {
                        continue;
                    };
                    let needs_t = body.free_symbols().iter().any(|s| s.name() == RESERVED_T);
                    if needs_t && t.is_none() {
                        continue;
                    }
                    let params = resolve_template_params(gate, body, &mut params_used[gi]);
                    let t_arg = t.clone().unwrap_or_else(|| zero.clone());
                    instantiated.push((dir, instantiate_delay(body, &t_arg, &delta, &params)?));
                }
            }
            records.push(PairRecord { gate: gi, pair, at_event: cur.event, t, delta, instantiated });
        }
    }
    records.sort_by_key(|r| r.at_event);

    Ok(TimingSolution { attributed, times, details, records, params_used })
}
