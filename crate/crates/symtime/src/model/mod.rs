//! Delay models: the input-transition case taxonomy and per-gate-type
//! delay templates, loaded from a line-oriented model file.
//!
//! A 2-input gate's inputs walk the state graph `{(0,0),(1,0),(1,1),(0,1)}`;
//! each single-input toggle is one of eight labeled edges (cases `a`–`h`).
//! A gate's first output transition uses a *cold* delay keyed by the causing
//! input's case; every later transition uses a *pair* template `δ(T, Δ)`
//! keyed by the gate's two most recent input cases, where the reserved
//! symbol `T` is the time since the gate's previous output transition and
//! `DELTA` is the spacing of its two most recent input transitions. Case
//! pairs without a template fall back to opaque per-gate delay symbols,
//! keeping composed results honest about what is and is not modeled.


use crate::expr::{Expr, ExprError, Symbol};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Reserved template symbol: time since the gate's previous output transition.
pub const RESERVED_T: &str = "T";
/// Reserved template symbol: time between the gate's two most recent input
/// transitions.
pub const RESERVED_DELTA: &str = "DELTA";

/// The text of the shipped default model library.
pub const DEFAULT_MODEL_TEXT: &str = include_str!("default.model");

/// Errors from loading or querying a model library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("model parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("model validation error: {0}")]
    Validation(String),
    #[error("gate type {0} is not declared in the model file")]
    UnknownGateType(String),
    #[error("{gate_type} {entry}: requested direction {wanted} but the model declares {found}")]
    DirectionMismatch {
        gate_type: String,
        entry: String,
        wanted: Direction,
        found: Direction,
    },
    #[error("template parameter `{0}` is not bound")]
    MissingParameter(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

// ----- pins, states, directions --------------------------------------------

/// The two ordered input pins of a gate. Case classification depends on
/// which pin toggles, so pin order is significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pin {
    A,
    B,
}

impl fmt::Display for Pin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pin::A => "A",
            Pin::B => "B",
        })
    }
}

/// A joint logic state of a gate's two inputs, as `(A, B)`.
pub type InputState = (bool, bool);

/// Flips the given pin's bit of a state.
pub fn toggle(state: InputState, pin: Pin) -> InputState {
    match pin {
        Pin::A => (!state.0, state.1),
        Pin::B => (state.0, !state.1),
    }
}

fn fmt_state(s: InputState) -> String {
    format!("({},{})", s.0 as u8, s.1 as u8)
}

/// A signal transition direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Rise,
    Fall,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Rise => Direction::Fall,
            Direction::Fall => Direction::Rise,
        }
    }

    /// The logic value a signal holds after transitioning this way.
    pub fn target_value(self) -> bool {
        self == Direction::Rise
    }

    /// Parses the keyword used by model, schedule, and CLI inputs.
    pub fn from_token(tok: &str) -> Option<Direction> {
        match tok {
            "rise" => Some(Direction::Rise),
            "fall" => Some(Direction::Fall),
            _ => None,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Rise => "rise",
            Direction::Fall => "fall",
        })
    }
}

// ----- case labels and the label/edge bijection -----------------------------

/// One of the eight labels `a`–`h` naming the single-input-toggle edges of
/// the 2-input state graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CaseLabel(u8);

impl CaseLabel {
    pub const ALL: [CaseLabel; 8] = [
        CaseLabel(0),
        CaseLabel(1),
        CaseLabel(2),
        CaseLabel(3),
        CaseLabel(4),
        CaseLabel(5),
        CaseLabel(6),
        CaseLabel(7),
    ];

    pub fn from_char(c: char) -> Option<CaseLabel> {
        if ('a'..='h').contains(&c) {
            Some(CaseLabel(c as u8 - b'a'))
        } else {
            None
        }
    }

    pub fn as_char(self) -> char {
        (b'a' + self.0) as char
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// The bijection between the eight case labels and the eight edges. An edge
/// is identified by its source state plus the toggled pin; the target state
/// follows by toggling that pin's bit.
///
/// The default assignment anchors `a: (0,0)→(1,0)`, `c: (1,0)→(1,1)`,
/// `e: (1,1)→(0,1)`, `g: (0,1)→(0,0)` and fills the remaining four edges as
/// `b: (0,0)→(0,1)`, `d: (0,1)→(1,1)`, `f: (1,1)→(1,0)`, `h: (1,0)→(0,0)`.
/// Model files may reassign labels with `edge` lines as long as the map
/// stays bijective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseMap {
    /// Indexed by label: (source state, toggled pin).
    edges: [(InputState, Pin); 8],
}

impl Default for CaseMap {
    fn default() -> CaseMap {
        use Pin::{A, B};
        CaseMap {
            edges: [
                ((false, false), A), // a
                ((false, false), B), // b
                ((true, false), B),  // c
                ((false, true), A),  // d
                ((true, true), A),   // e
                ((true, true), B),   // f
                ((false, true), B),  // g
                ((true, false), A),  // h
            ],
        }
    }
}

impl CaseMap {
    /// The label of the edge leaving `source` by toggling `pin`. Total for
    /// a validated (bijective) map.
    pub fn classify(&self, source: InputState, pin: Pin) -> CaseLabel {
        for (i, e) in self.edges.iter().enumerate() {
            if *e == (source, pin) {
                return CaseLabel(i as u8);
            }
        }
        unreachable!("case map is validated to be a bijection over all 8 edges")
    }

    /// The (source state, toggled pin) edge assigned to a label.
    pub fn edge(&self, label: CaseLabel) -> (InputState, Pin) {
        self.edges[label.0 as usize]
    }

    pub fn source(&self, label: CaseLabel) -> InputState {
        self.edge(label).0
    }

    pub fn target(&self, label: CaseLabel) -> InputState {
        let (s, p) = self.edge(label);
        toggle(s, p)
    }

    /// True when `x`'s target state equals `y`'s source state, i.e. the
    /// two cases can occur back to back.
    pub fn chains(&self, x: CaseLabel, y: CaseLabel) -> bool {
        self.target(x) == self.source(y)
    }

    fn remap(&mut self, label: CaseLabel, source: InputState, target: InputState) -> Result<(), String> {
        let pin = match (source.0 != target.0, source.1 != target.1) {
            (true, false) => Pin::A,
            (false, true) => Pin::B,
            _ => {
                return Err(format!(
                    "edge {}->{} must toggle exactly one input",
                    fmt_state(source),
                    fmt_state(target)
                ))
            }
        };
        self.edges[label.0 as usize] = (source, pin);
        Ok(())
    }

    fn validate(&self) -> Result<(), String> {
        let mut seen: BTreeMap<(InputState, Pin), CaseLabel> = BTreeMap::new();
        for label in CaseLabel::ALL {
            let e = self.edge(label);
            if let Some(prev) = seen.insert(e, label) {
                let (s, p) = e;
                return Err(format!(
                    "labels {prev} and {label} both name the edge {} toggling {p}",
                    fmt_state(s),
                ));
            }
        }
        Ok(())
    }
}

/// An ordered pair of consecutive input-transition cases at one gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CasePair {
    pub previous: CaseLabel,
    pub current: CaseLabel,
}

impl CasePair {
    /// Builds a pair, checking that the cases chain under `map`.
    pub fn new(map: &CaseMap, previous: CaseLabel, current: CaseLabel) -> Result<CasePair, ModelError> {
        if map.chains(previous, current) {
            Ok(CasePair { previous, current })
        } else {
            Err(ModelError::Validation(format!(
                "pair ({previous},{current}) does not chain: case {previous} ends in state {} but case {current} starts from {}",
                fmt_state(map.target(previous)),
                fmt_state(map.source(current)),
            )))
        }
    }
}

impl fmt::Display for CasePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.previous, self.current)
    }
}

// ----- gate types -----------------------------------------------------------

/// Supported 2-input gate types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateType {
    Nor2,
    Nand2,
    C2,
}

impl GateType {
    pub fn from_token(tok: &str) -> Option<GateType> {
        match tok {
            "NOR2" => Some(GateType::Nor2),
            "NAND2" => Some(GateType::Nand2),
            "C2" => Some(GateType::C2),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateType::Nor2 => "NOR2",
            GateType::Nand2 => "NAND2",
            GateType::C2 => "C2",
        }
    }

    /// Output logic. `prev` is the current output value; only the
    /// state-holding C element reads it (its output changes only when both
    /// inputs agree).
    pub fn eval(self, a: bool, b: bool, prev: bool) -> bool {
        match self {
            GateType::Nor2 => !(a || b),
            GateType::Nand2 => !(a && b),
            GateType::C2 => {
                if a == b {
                    a
                } else {
                    prev
                }
            }
        }
    }

    /// Whether the output is a pure function of the inputs (false for the
    /// state-holding C element).
    pub fn is_combinational(self) -> bool {
        !matches!(self, GateType::C2)
    }
}

impl fmt::Display for GateType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

// ----- the library ----------------------------------------------------------

/// The model-file section for one gate type.
#[derive(Debug, Clone, Default)]
pub struct GateModel {
    /// Parameter names the templates of this section may reference.
    pub params: BTreeSet<String>,
    /// Cold delays for first output transitions, keyed by causing case and
    /// output direction.
    pub cold: BTreeMap<(CaseLabel, Direction), Expr>,
    /// Pair templates for subsequent output transitions, keyed by the two
    /// most recent input cases and output direction. Bodies may reference
    /// the reserved symbols `T` and `DELTA`.
    pub pairs: BTreeMap<(CaseLabel, CaseLabel, Direction), Expr>,
}

/// A delay lookup result: an analytic body from the model file, or the
/// conventional name of the opaque fallback symbol when no entry exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DelayForm<'a> {
    Analytic(&'a Expr),
    Opaque(String),
}

/// A loaded, validated delay-model library. Immutable after load.
#[derive(Debug, Clone)]
pub struct ModelLibrary {
    case_map: CaseMap,
    gates: BTreeMap<GateType, GateModel>,
}

/// The conventional opaque symbol name for a missing cold entry.
pub fn opaque_cold_name(case: CaseLabel) -> String {
    format!("d_{case}")
}

/// The conventional opaque symbol name for a missing pair entry.
pub fn opaque_pair_name(pair: CasePair) -> String {
    format!("d_{}{}", pair.previous, pair.current)
}

impl ModelLibrary {
    /// An empty library: every lookup degrades to an opaque symbol.
    pub fn empty() -> ModelLibrary {
        ModelLibrary {
            case_map: CaseMap::default(),
            gates: BTreeMap::new(),
        }
    }

    /// Loads the shipped default library.
    pub fn load_default() -> ModelLibrary {
        ModelLibrary::parse(DEFAULT_MODEL_TEXT)
            .expect("the shipped default model text is valid")
    }

    pub fn case_map(&self) -> &CaseMap {
        &self.case_map
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// The section for a gate type, if declared.
    pub fn gate_model(&self, gt: GateType) -> Option<&GateModel> {
        self.gates.get(&gt)
    }

    /// Resolves the section for a gate type. An entirely empty library is
    /// permissive (every lookup is opaque); once any section is declared,
    /// analyzing an undeclared gate type is an error.
    fn section(&self, gt: GateType) -> Result<Option<&GateModel>, ModelError> {
        if self.gates.is_empty() {
            return Ok(None);
        }
        match self.gates.get(&gt) {
            Some(m) => Ok(Some(m)),
            None => Err(ModelError::UnknownGateType(gt.name().to_string())),
        }
    }

    /// Looks up the cold delay for a first output transition.
    pub fn lookup_cold(
        &self,
        gt: GateType,
        case: CaseLabel,
        dir: Direction,
    ) -> Result<DelayForm<'_>, ModelError> {
        let Some(m) = self.section(gt)? else {
            return Ok(DelayForm::Opaque(opaque_cold_name(case)));
        };
        if let Some(body) = m.cold.get(&(case, dir)) {
            return Ok(DelayForm::Analytic(body));
        }
        if m.cold.contains_key(&(case, dir.flip())) {
            return Err(ModelError::DirectionMismatch {
                gate_type: gt.name().to_string(),
                entry: format!("cold {case}"),
                wanted: dir,
                found: dir.flip(),
            });
        }
        Ok(DelayForm::Opaque(opaque_cold_name(case)))
    }

    /// Looks up the pair template for a subsequent output transition.
    pub fn lookup_pair(
        &self,
        gt: GateType,
        pair: CasePair,
        dir: Direction,
    ) -> Result<DelayForm<'_>, ModelError> {
        let Some(m) = self.section(gt)? else {
            return Ok(DelayForm::Opaque(opaque_pair_name(pair)));
        };
        let key = (pair.previous, pair.current, dir);
        if let Some(body) = m.pairs.get(&key) {
            return Ok(DelayForm::Analytic(body));
        }
        if m.pairs.contains_key(&(pair.previous, pair.current, dir.flip())) {
            return Err(ModelError::DirectionMismatch {
                gate_type: gt.name().to_string(),
                entry: format!("pair {pair}"),
                wanted: dir,
                found: dir.flip(),
            });
        }
        Ok(DelayForm::Opaque(opaque_pair_name(pair)))
    }

    /// Parses and validates a model file.
    pub fn parse(text: &str) -> Result<ModelLibrary, ModelError> {
        let mut gates: BTreeMap<GateType, GateModel> = BTreeMap::new();
        let mut current: Option<GateType> = None;
        let mut remaps: Vec<(usize, CaseLabel, InputState, InputState)> = Vec::new();

        let perr = |line: usize, reason: String| ModelError::Parse { line, reason };

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let keyword = line.split_whitespace().next().unwrap_or("");
            match keyword {
                "gate" => {
                    let rest = line["gate".len()..].trim();
                    let gt = GateType::from_token(rest).ok_or_else(|| {
                        perr(line_no, format!("unknown gate type `{rest}` (expected NOR2, NAND2, or C2)"))
                    })?;
                    if gates.contains_key(&gt) {
                        return Err(perr(line_no, format!("duplicate section for gate type {gt}")));
                    }
                    gates.insert(gt, GateModel::default());
                    current = Some(gt);
                }
                "params" => {
                    let gt = current
                        .ok_or_else(|| perr(line_no, "params outside a gate section".to_string()))?;
                    for name in line["params".len()..].split_whitespace() {
                        if name == RESERVED_T || name == RESERVED_DELTA {
                            return Err(perr(
                                line_no,
                                format!("`{name}` is a reserved template symbol, not a parameter"),
                            ));
                        }
                        Symbol::new(name).map_err(|_| {
                            perr(line_no, format!("invalid parameter name `{name}`"))
                        })?;
                        gates.get_mut(&gt).unwrap().params.insert(name.to_string());
                    }
                }
                "cold" => {
                    let gt = current
                        .ok_or_else(|| perr(line_no, "cold entry outside a gate section".to_string()))?;
                    let (head, body) = split_entry(line, line_no)?;
                    let mut toks = head.split_whitespace().skip(1);
                    let case = parse_case_token(toks.next(), line_no)?;
                    let dir = parse_direction_token(toks.next(), line_no)?;
                    if toks.next().is_some() {
                        return Err(perr(line_no, "trailing tokens after cold direction".to_string()));
                    }
                    let expr = parse_body(body, line_no)?;
                    let model = gates.get_mut(&gt).unwrap();
                    if model.cold.insert((case, dir), expr).is_some() {
                        return Err(perr(line_no, format!("duplicate cold entry for case {case} {dir}")));
                    }
                }
                "pair" => {
                    let gt = current
                        .ok_or_else(|| perr(line_no, "pair entry outside a gate section".to_string()))?;
                    let (head, body) = split_entry(line, line_no)?;
                    let rest = head["pair".len()..].trim();
                    let open = rest.find('(');
                    let close = rest.find(')');
                    let (Some(open), Some(close)) = (open, close) else {
                        return Err(perr(line_no, "expected `pair (<x>,<y>) <rise|fall> = <expr>`".to_string()));
                    };
                    if open != 0 || close < open {
                        return Err(perr(line_no, "expected `pair (<x>,<y>) <rise|fall> = <expr>`".to_string()));
                    }
                    let labels: Vec<&str> = rest[open + 1..close].split(',').map(str::trim).collect();
                    if labels.len() != 2 {
                        return Err(perr(line_no, "a pair names exactly two cases".to_string()));
                    }
                    let x = parse_case_token(Some(labels[0]), line_no)?;
                    let y = parse_case_token(Some(labels[1]), line_no)?;
                    let dir = parse_direction_token(Some(rest[close + 1..].trim()), line_no)?;
                    let expr = parse_body(body, line_no)?;
                    let model = gates.get_mut(&gt).unwrap();
                    if model.pairs.insert((x, y, dir), expr).is_some() {
                        return Err(perr(line_no, format!("duplicate pair entry for ({x},{y}) {dir}")));
                    }
                }
                "edge" => {
                    let rest = line["edge".len()..].trim();
                    let (label_tok, spec) = rest
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| perr(line_no, "expected `edge <label> (a,b)->(a,b)`".to_string()))?;
                    let label = parse_case_token(Some(label_tok), line_no)?;
                    let compact: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
                    let (src_tok, dst_tok) = compact.split_once("->").ok_or_else(|| {
                        perr(line_no, "expected `edge <label> (a,b)->(a,b)`".to_string())
                    })?;
                    let src = parse_state_token(src_tok)
                        .ok_or_else(|| perr(line_no, format!("invalid state `{src_tok}`")))?;
                    let dst = parse_state_token(dst_tok)
                        .ok_or_else(|| perr(line_no, format!("invalid state `{dst_tok}`")))?;
                    if remaps.iter().any(|(_, l, _, _)| *l == label) {
                        return Err(perr(line_no, format!("duplicate edge declaration for label {label}")));
                    }
                    remaps.push((line_no, label, src, dst));
                }
                other => {
                    return Err(perr(
                        line_no,
                        format!("unknown directive `{other}` (expected gate, params, cold, pair, or edge)"),
                    ));
                }
            }
        }

        let mut case_map = CaseMap::default();
        for (line_no, label, src, dst) in remaps {
            case_map
                .remap(label, src, dst)
                .map_err(|reason| perr(line_no, reason))?;
        }
        case_map.validate().map_err(ModelError::Validation)?;

        for (gt, model) in &gates {
            for ((case, dir), body) in &model.cold {
                for sym in body.free_symbols() {
                    let name = sym.name();
                    if name == RESERVED_T || name == RESERVED_DELTA {
                        return Err(ModelError::Validation(format!(
                            "{gt} cold {case} {dir}: `{name}` is only meaningful in pair templates"
                        )));
                    }
                    if !model.params.contains(name) {
                        return Err(ModelError::Validation(format!(
                            "{gt} cold {case} {dir}: undeclared symbol `{name}`"
                        )));
                    }
                }
            }
            for ((x, y, dir), body) in &model.pairs {
                CasePair::new(&case_map, *x, *y)?;
                for sym in body.free_symbols() {
                    let name = sym.name();
                    if name == RESERVED_T || name == RESERVED_DELTA {
                        continue;
                    }
                    if !model.params.contains(name) {
                        return Err(ModelError::Validation(format!(
                            "{gt} pair ({x},{y}) {dir}: undeclared symbol `{name}`"
                        )));
                    }
                }
            }
        }

        Ok(ModelLibrary { case_map, gates })
    }
}

/// Substitutes `T`, `DELTA`, and the gate parameters into a template body.
/// Substitution is simultaneous and the result is canonical.
pub fn instantiate_delay(
    body: &Expr,
    t_expr: &Expr,
    delta_expr: &Expr,
    params: &BTreeMap<String, Expr>,
) -> Result<Expr, ModelError> {
    let mut map: BTreeMap<Symbol, Expr> = BTreeMap::new();
    for sym in body.free_symbols() {
        let value = if sym.name() == RESERVED_T {
            t_expr.clone()
        } else if sym.name() == RESERVED_DELTA {
            delta_expr.clone()
        } else {
            params
                .get(sym.name())
                .ok_or_else(|| ModelError::MissingParameter(sym.name().to_string()))?
                .clone()
        };
        map.insert(sym, value);
    }
    Ok(body.substitute(&map)?)
}

// ----- line parsing helpers -------------------------------------------------

/// Splits `<head> = <body>` at the first `=`.
fn split_entry(line: &str, line_no: usize) -> Result<(&str, &str), ModelError> {
    line.split_once('=')
        .map(|(h, b)| (h.trim(), b.trim()))
        .ok_or_else(|| ModelError::Parse {
            line: line_no,
            reason: "expected `= <expr>`".to_string(),
        })
}

fn parse_case_token(tok: Option<&str>, line_no: usize) -> Result<CaseLabel, ModelError> {
    let tok = tok.unwrap_or("");
    let mut chars = tok.chars();
    match (chars.next().and_then(CaseLabel::from_char), chars.next()) {
        (Some(label), None) => Ok(label),
        _ => Err(ModelError::Parse {
            line: line_no,
            reason: format!("invalid case label `{tok}` (expected a single letter a-h)"),
        }),
    }
}

fn parse_direction_token(tok: Option<&str>, line_no: usize) -> Result<Direction, ModelError> {
    let tok = tok.unwrap_or("");
    Direction::from_token(tok).ok_or_else(|| ModelError::Parse {
        line: line_no,
        reason: format!("invalid direction `{tok}` (expected rise or fall)"),
    })
}

/// Parses a `(x,y)` state token with bits 0/1 (whitespace already removed).
fn parse_state_token(tok: &str) -> Option<InputState> {
    let inner = tok.strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    let bit = |s: &str| match s {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    };
    Some((bit(a)?, bit(b)?))
}

fn parse_body(body: &str, line_no: usize) -> Result<Expr, ModelError> {
    Expr::parse(body).map_err(|e| ModelError::Parse {
        line: line_no,
        reason: e.to_string(),
    })
}
