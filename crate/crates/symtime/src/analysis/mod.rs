//! Consumers of a timing solution: exact numeric instantiation,
//! ordering-consistency checking, sensitivity differentiation, parameter
//! sweeps, and SMT-LIB2 (QF_NRA) export of ordering constraints.
//!
//! The engine composes event-time expressions *under the assumption* that
//! the declared schedule order holds; this module validates that assumption
//! against numbers ([`check_consistency`]) or hands it to an external
//! reasoner ([`export_smt`]).


use crate::engine::TimingSolution;
use crate::expr::{evaluate_exact, Expr, ExprError, ExprView, Symbol, Value};
use crate::model::Direction;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

/// A numeric assignment for the free symbols of a solution: gate
/// parameters, opaque delays, and primary-input times.
pub type Binding = BTreeMap<Symbol, BigRational>;

/// Errors from the numeric and export layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("symbol `{0}` is not bound to a value")]
    UnboundSymbol(String),
    #[error("event index {index} is out of range ({count} events in the schedule)")]
    UnknownEvent { index: usize, count: usize },
    #[error("`{operator}` has no QF_NRA encoding; only rational-function expressions can be exported")]
    UnsupportedOperator { operator: &'static str },
    #[error("`{text}` is not an integer, a rational `p/q`, or a decimal number")]
    InvalidNumber { text: String },
    #[error("binding line {line}: {reason}")]
    InvalidBinding { line: usize, reason: String },
    #[error("physical parameter `{name}` must be positive, got {value}")]
    NonPhysicalParameter { name: String, value: BigRational },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Outcome of checking the declared order against instantiated times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Violated,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Consistent => write!(f, "consistent"),
            Verdict::Violated => write!(f, "violated"),
        }
    }
}

/// The first adjacent event pair whose instantiated times do not strictly
/// increase. `tie` distinguishes equal times from an outright reversal.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub earlier: usize,
    pub later: usize,
    pub earlier_time: Value,
    pub later_time: Value,
    pub tie: bool,
}

/// A model-validity concern that does not by itself decide the verdict:
/// the delay model was applied outside the region where its value is a
/// plausible physical delay.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidityWarning {
    /// The instantiated delay of a gate-output event is `<= 0`.
    NonPositiveEventDelay { event: usize, delay: Value },
    /// An instantiated pair-record template value is `<= 0` (the template
    /// was evaluated at this operating point even if no output event used
    /// it).
    NonPositiveTemplateValue {
        record: usize,
        direction: Direction,
        value: Value,
    },
}

/// Result of [`check_consistency`]: the verdict, the exact per-event
/// times it was decided on, and any model-validity warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub verdict: Verdict,
    pub times: Vec<Value>,
    pub first_violation: Option<Violation>,
    pub validity_warnings: Vec<ValidityWarning>,
}

fn non_positive(v: &Value) -> bool {
    match v {
        Value::Rational(r) => !r.is_positive(),
        Value::Real(x) => *x <= 0.0,
    }
}

/// `(a < b, a == b)` — exact when both sides are rational, double
/// precision once a transcendental template is involved.
fn compare(a: &Value, b: &Value) -> (bool, bool) {
    match (a, b) {
        (Value::Rational(x), Value::Rational(y)) => (x < y, x == y),
        _ => {
            let (x, y) = (a.to_f64(), b.to_f64());
            (x < y, x == y)
        }
    }
}

/// Evaluates every event time under `binding` and verifies that the times
/// strictly increase along the declared order. Ties are violations: the
/// schedule claims a total order. Instantiated delays and pair-template
/// values `<= 0` are reported as validity warnings without affecting the
/// verdict.
///
/// Errors with [`AnalysisError::UnboundSymbol`] (naming the first missing
/// symbol in lexicographic order) unless `binding` covers every free
/// symbol of the event times and their delays. Pair-record templates are
/// diagnostics, not inputs to the verdict: a record whose parameters the
/// binding does not cover is skipped rather than reported as an error.
pub fn check_consistency(
    solution: &TimingSolution,
    binding: &Binding,
) -> Result<ConsistencyReport, AnalysisError> {
    let mut needed = BTreeSet::new();
    for time in &solution.times {
        needed.extend(time.free_symbols());
    }
    for detail in solution.details.iter().flatten() {
        needed.extend(detail.delay.free_symbols());
    }
    for sym in needed {
        if !binding.contains_key(&sym) {
            return Err(AnalysisError::UnboundSymbol(sym.name().to_string()));
        }
    }

    let times = solution
        .times
        .iter()
        .map(|t| evaluate_exact(t, binding))
        .collect::<Result<Vec<_>, _>>()?;

    let mut first_violation = None;
    for k in 0..times.len().saturating_sub(1) {
        let (increasing, tie) = compare(&times[k], &times[k + 1]);
        if !increasing {
            first_violation = Some(Violation {
                earlier: k,
                later: k + 1,
                earlier_time: times[k].clone(),
                later_time: times[k + 1].clone(),
                tie,
            });
            break;
        }
    }

    let mut validity_warnings = Vec::new();
    for (event, detail) in solution.details.iter().enumerate() {
        let Some(detail) = detail else { continue };
        let delay = evaluate_exact(&detail.delay, binding)?;
        if non_positive(&delay) {
            validity_warnings.push(ValidityWarning::NonPositiveEventDelay { event, delay });
        }
    }
    for (record, rec) in solution.records.iter().enumerate() {
        for (direction, body) in &rec.instantiated {
            if body.free_symbols().iter().any(|s| !binding.contains_key(s)) {
                continue;
            }
            let value = evaluate_exact(body, binding)?;
            if non_positive(&value) {
                validity_warnings.push(ValidityWarning::NonPositiveTemplateValue {
                    record,
                    direction: *direction,
                    value,
                });
            }
        }
    }

    Ok(ConsistencyReport {
        verdict: if first_violation.is_none() {
            Verdict::Consistent
        } else {
            Verdict::Violated
        },
        times,
        first_violation,
        validity_warnings,
    })
}

/// Rejects non-positive values for symbols used as gate parameters or
/// opaque delays (primary-input times may be zero or negative; delays and
/// electrical parameters may not). Symbols absent from `binding` are
/// skipped — coverage is [`check_consistency`]'s concern.
pub fn assert_physical(
    solution: &TimingSolution,
    binding: &Binding,
) -> Result<(), AnalysisError> {
    let mut physical = BTreeSet::new();
    for params in &solution.params_used {
        for expr in params.values() {
            physical.extend(expr.free_symbols());
        }
    }
    for sym in physical {
        if let Some(value) = binding.get(&sym) {
            if !value.is_positive() {
                return Err(AnalysisError::NonPhysicalParameter {
                    name: sym.name().to_string(),
                    value: value.clone(),
                });
            }
        }
    }
    Ok(())
}

/// `∂ time(event) / ∂ wrt`, canonical. Differentiating with respect to a
/// symbol absent from the event's cone yields zero.
pub fn sensitivity(
    solution: &TimingSolution,
    event: usize,
    wrt: &Symbol,
) -> Result<Expr, AnalysisError> {
    let count = solution.times.len();
    let time = solution
        .times
        .get(event)
        .ok_or(AnalysisError::UnknownEvent {
            index: event,
            count,
        })?;
    Ok(time.differentiate(wrt))
}

/// The symbolic region in which the declared order actually holds: one
/// difference `time(e_{k+1}) − time(e_k)` per consecutive event pair, each
/// to be read as `> 0`. No closed-form solving is attempted — the
/// conjunction is meant for an external solver ([`export_smt`]) or manual
/// inspection.
pub fn ordering_constraints(solution: &TimingSolution) -> Vec<Expr> {
    solution
        .times
        .windows(2)
        .map(|pair| Expr::sub(pair[1].clone(), pair[0].clone()))
        .collect()
}

/// Evaluates `expr` at every grid point, binding `wrt` to the point value
/// on top of `base`. Errors with [`AnalysisError::UnboundSymbol`] if
/// `base` misses any other free symbol of `expr`.
pub fn sweep_expr(
    expr: &Expr,
    wrt: &Symbol,
    grid: &[BigRational],
    base: &Binding,
) -> Result<Vec<(BigRational, Value)>, AnalysisError> {
    for sym in expr.free_symbols() {
        if sym != *wrt && !base.contains_key(&sym) {
            return Err(AnalysisError::UnboundSymbol(sym.name().to_string()));
        }
    }
    let mut bound = base.clone();
    grid.iter()
        .map(|point| {
            bound.insert(wrt.clone(), point.clone());
            Ok((point.clone(), evaluate_exact(expr, &bound)?))
        })
        .collect()
}

/// [`sweep_expr`] applied to an event's time expression.
pub fn sweep(
    solution: &TimingSolution,
    event: usize,
    wrt: &Symbol,
    grid: &[BigRational],
    base: &Binding,
) -> Result<Vec<(BigRational, Value)>, AnalysisError> {
    let count = solution.times.len();
    let time = solution
        .times
        .get(event)
        .ok_or(AnalysisError::UnknownEvent {
            index: event,
            count,
        })?;
    sweep_expr(time, wrt, grid, base)
}

/// Renders sweep rows as CSV with a `value,time` header. Exact values
/// print as rationals (`3/2`), double-precision ones as floats.
pub fn sweep_csv(rows: &[(BigRational, Value)]) -> String {
    let mut out = String::from("value,time\n");
    for (value, time) in rows {
        let _ = writeln!(out, "{value},{time}");
    }
    out
}

/// Splits `e` into `(numerator, denominator)` with `e ≡ N/D` and no
/// negative powers anywhere in `N` or `D`. Rational constants stay in the
/// numerator (cleared later by integer scaling); only *symbolic* division
/// — `Power` with a negative exponent — moves factors across the bar.
fn split_fraction(e: &Expr) -> Result<(Expr, Expr), AnalysisError> {
    match e.view() {
        ExprView::Rational(_) | ExprView::Symbol(_) => Ok((e.clone(), Expr::int(1))),
        ExprView::Sum(terms) => {
            let mut num = Expr::int(0);
            let mut den = Expr::int(1);
            for term in terms {
                let (tn, td) = split_fraction(term)?;
                num = Expr::sum([
                    Expr::product([num, td.clone()]),
                    Expr::product([tn, den.clone()]),
                ]);
                den = Expr::product([den, td]);
            }
            Ok((num, den))
        }
        ExprView::Product(factors) => {
            let mut num = Expr::int(1);
            let mut den = Expr::int(1);
            for factor in factors {
                let (fn_, fd) = split_fraction(factor)?;
                num = Expr::product([num, fn_]);
                den = Expr::product([den, fd]);
            }
            Ok((num, den))
        }
        ExprView::Power(base, k) => {
            let (bn, bd) = split_fraction(base)?;
            let (n, d) = if k >= 0 { (bn, bd) } else { (bd, bn) };
            let k = k.unsigned_abs() as i32;
            Ok((Expr::power(n, k)?, Expr::power(d, k)?))
        }
        ExprView::Exp(_) => Err(AnalysisError::UnsupportedOperator { operator: "exp" }),
        ExprView::Ln(_) => Err(AnalysisError::UnsupportedOperator { operator: "ln" }),
    }
}

/// The LCM of the denominators of all rational constants in coefficient
/// position. Sums in factor or power-base position are content-free
/// (integer coefficients) by the canonical-form invariants, so after
/// multiplying by this LCM every rational constant in the expression is
/// an integer.
fn denominator_lcm(e: &Expr) -> BigInt {
    match e.view() {
        ExprView::Rational(r) => r.denom().clone(),
        ExprView::Symbol(_) => BigInt::one(),
        ExprView::Sum(terms) => terms
            .iter()
            .fold(BigInt::one(), |acc, t| acc.lcm(&denominator_lcm(t))),
        ExprView::Product(factors) => factors
            .iter()
            .fold(BigInt::one(), |acc, f| acc.lcm(&denominator_lcm(f))),
        ExprView::Power(base, _) => denominator_lcm(base),
        ExprView::Exp(arg) | ExprView::Ln(arg) => denominator_lcm(arg),
    }
}

fn smt_integer(n: &BigInt, out: &mut String) {
    if n.is_negative() {
        let _ = write!(out, "(- {})", -n);
    } else {
        let _ = write!(out, "{n}");
    }
}

/// Prints a division-free, integer-coefficient expression as an SMT-LIB2
/// term. Powers are expanded to repeated multiplication (QF_NRA has no
/// exponentiation operator).
fn smt_term(e: &Expr, out: &mut String) {
    match e.view() {
        ExprView::Rational(r) => {
            debug_assert!(r.is_integer(), "fraction survived integer scaling: {r}");
            smt_integer(r.numer(), out);
        }
        ExprView::Symbol(s) => out.push_str(s.name()),
        ExprView::Sum(terms) => {
            out.push_str("(+");
            for t in terms {
                out.push(' ');
                smt_term(t, out);
            }
            out.push(')');
        }
        ExprView::Product(factors) => {
            out.push_str("(*");
            for f in factors {
                out.push(' ');
                smt_term(f, out);
            }
            out.push(')');
        }
        ExprView::Power(base, k) => {
            debug_assert!(k >= 2, "negative power survived fraction clearing");
            out.push_str("(*");
            for _ in 0..k {
                out.push(' ');
                smt_term(base, out);
            }
            out.push(')');
        }
        ExprView::Exp(_) | ExprView::Ln(_) => {
            unreachable!("transcendentals are rejected before printing")
        }
    }
}

/// Rewrites `e > 0` as an equivalent polynomial constraint and prints it.
///
/// With `e = N/D`, the sign of `e` equals the sign of `N·D` wherever `D ≠ 0`,
/// so `e > 0` becomes `L·N·D > 0` with `L` the positive integer that clears
/// all rational coefficients. (Where `D = 0` the original expression is
/// undefined and the rewritten constraint is simply false.)
fn smt_positivity(e: &Expr, out: &mut String) -> Result<(), AnalysisError> {
    let (num, den) = split_fraction(e)?;
    let cleared = Expr::product([num, den]);
    let scale = denominator_lcm(&cleared);
    let scaled = Expr::product([
        Expr::rational(BigRational::from_integer(scale)),
        cleared,
    ]);
    out.push_str("(assert (> ");
    smt_term(&scaled, out);
    out.push_str(" 0))\n");
    Ok(())
}

/// Emits an SMT-LIB2 (QF_NRA) script asserting `ineq > 0` for every given
/// expression, with one `declare-const … Real` per symbol appearing in the
/// inequalities or the binding. `binding` values are pinned with exact
/// division-free equalities (`(= (* q x) p)` for `x = p/q`), so the script
/// is satisfiable precisely when the declared order holds at that point.
/// Expressions containing `exp`/`ln` are rejected: the export guarantees
/// nonlinear *rational* arithmetic only.
pub fn export_smt(
    inequalities: &[Expr],
    binding: Option<&Binding>,
) -> Result<String, AnalysisError> {
    let mut symbols: BTreeSet<Symbol> = BTreeSet::new();
    for ineq in inequalities {
        symbols.extend(ineq.free_symbols());
    }
    if let Some(binding) = binding {
        symbols.extend(binding.keys().cloned());
    }

    let mut out = String::from("(set-logic QF_NRA)\n");
    for sym in &symbols {
        let _ = writeln!(out, "(declare-const {} Real)", sym.name());
    }
    if let Some(binding) = binding {
        for (sym, value) in binding {
            out.push_str("(assert (= ");
            if value.denom().is_one() {
                out.push_str(sym.name());
            } else {
                let _ = write!(out, "(* {} {})", value.denom(), sym.name());
            }
            out.push(' ');
            smt_integer(value.numer(), &mut out);
            out.push_str("))\n");
        }
    }
    for ineq in inequalities {
        smt_positivity(ineq, &mut out)?;
    }
    out.push_str("(check-sat)\n");
    Ok(out)
}

/// Parses an exact rational from `5`, `-3`, `7/2`, or decimal (`1.5`)
/// notation.
pub fn parse_rational(text: &str) -> Result<BigRational, AnalysisError> {
    let t = text.trim();
    let invalid = || AnalysisError::InvalidNumber {
        text: t.to_string(),
    };
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| invalid())?;
        let q: BigInt = q.trim().parse().map_err(|_| invalid())?;
        if q.is_zero() {
            return Err(invalid());
        }
        return Ok(BigRational::new(p, q));
    }
    let (negative, magnitude) = match t.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = magnitude.split_once('.').unwrap_or((magnitude, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(invalid());
    }
    let numer: BigInt = digits.parse().expect("digit-checked");
    let numer = if negative { -numer } else { numer };
    let denom = BigInt::from(10).pow(frac_part.len() as u32);
    Ok(BigRational::new(numer, denom))
}

/// Parses a binding file: one `name = value` per line, `#` starts a
/// comment, blank lines are skipped. Values accept the [`parse_rational`]
/// notations; duplicate names are rejected.
pub fn parse_bindings(text: &str) -> Result<Binding, AnalysisError> {
    let mut binding = Binding::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let invalid = |reason: String| AnalysisError::InvalidBinding { line, reason };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((name, value)) = content.split_once('=') else {
            return Err(invalid(format!(
                "expected `name = value`, got `{content}`"
            )));
        };
        let sym = Symbol::new(name.trim()).map_err(|e| invalid(e.to_string()))?;
        let value = parse_rational(value).map_err(|e| invalid(e.to_string()))?;
        if binding.insert(sym, value).is_some() {
            return Err(invalid(format!(
                "duplicate binding for `{}`",
                name.trim()
            )));
        }
    }
    Ok(binding)
}
