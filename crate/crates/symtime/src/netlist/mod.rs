//! Circuit representation: gates, signals, fan-in/fan-out topology.
//!
//! The native text format is line-oriented: `input <name>`,
//! `output <name>`, and `gate <id> <type> A=<sig> B=<sig> Y=<sig>
//! [param <name>=<expr>]...`, with `#` comments. Parameter values are
//! expressions (numbers or symbols), which is why a custom format exists at
//! all — ISCAS `.bench` cannot carry them. A `.bench` import (2-input
//! NAND/NOR only, parameters left to their per-gate defaults) is provided
//! for convenience.
//!
//! Cycles (feedback) are legal; [`Netlist::topology`] reports strongly
//! connected components informationally.

#[cfg(test)]
mod tests;

use crate::expr::{Expr, Symbol};
use crate::model::{GateType, Pin};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Errors from parsing or validating a netlist.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetlistError {
    #[error("netlist parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("signal `{signal}` has multiple drivers")]
    MultipleDrivers { signal: String },
    #[error("line {line}: signal `{name}` is not driven by any input or gate output")]
    UndeclaredSignal { name: String, line: usize },
}

/// A 2-input gate instance. Pins are ordered: case classification depends
/// on whether A or B toggles, so `input_a`/`input_b` are not interchangeable.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub id: String,
    pub gate_type: GateType,
    pub input_a: String,
    pub input_b: String,
    pub output: String,
    /// Pinned parameter values; parameters not listed here default to fresh
    /// per-gate symbols at analysis time.
    pub params: BTreeMap<String, Expr>,
}

impl Gate {
    /// The pin (if any) that `signal` feeds.
    pub fn pin_of(&self, signal: &str) -> Option<Pin> {
        if self.input_a == signal {
            Some(Pin::A)
        } else if self.input_b == signal {
            Some(Pin::B)
        } else {
            None
        }
    }

    pub fn input(&self, pin: Pin) -> &str {
        match pin {
            Pin::A => &self.input_a,
            Pin::B => &self.input_b,
        }
    }
}

/// What drives a signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    PrimaryInput,
    /// Index into [`Netlist::gates`].
    Gate(usize),
}

/// A validated netlist. Immutable after parse.
#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    /// Primary inputs in declaration order.
    pub primary_inputs: Vec<String>,
    /// Primary outputs in declaration order.
    pub primary_outputs: Vec<String>,
    /// Gates in declaration order.
    pub gates: Vec<Gate>,
}

/// Gate-level dependency structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    /// For each gate index, the indices of the gates driving its inputs.
    pub fanin: Vec<BTreeSet<usize>>,
    /// For each gate index, the indices of the gates it drives.
    pub fanout: Vec<BTreeSet<usize>>,
    /// Cyclic components: strongly connected components of size >= 2, plus
    /// self-loops, each sorted; the list sorted by first member.
    pub cycles: Vec<Vec<usize>>,
}

impl Netlist {
    /// Every signal in the circuit (each is driven by exactly one primary
    /// input or gate output).
    pub fn signals(&self) -> BTreeSet<&str> {
        let mut s: BTreeSet<&str> = self.primary_inputs.iter().map(String::as_str).collect();
        s.extend(self.gates.iter().map(|g| g.output.as_str()));
        s
    }

    /// The driver of a signal, if the signal exists.
    pub fn driver(&self, signal: &str) -> Option<Driver> {
        if self.primary_inputs.iter().any(|s| s == signal) {
            return Some(Driver::PrimaryInput);
        }
        self.gates
            .iter()
            .position(|g| g.output == signal)
            .map(Driver::Gate)
    }

    /// Gate indices (with the pin fed) that read a signal.
    pub fn readers(&self, signal: &str) -> Vec<(usize, Pin)> {
        let mut out = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            if g.input_a == signal {
                out.push((i, Pin::A));
            }
            if g.input_b == signal {
                out.push((i, Pin::B));
            }
        }
        out
    }

    /// Fan-in/fan-out maps and cycle report.
    pub fn topology(&self) -> Topology {
        let mut fanin = vec![BTreeSet::new(); self.gates.len()];
        let mut fanout = vec![BTreeSet::new(); self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            for pin in [Pin::A, Pin::B] {
                if let Some(Driver::Gate(j)) = self.driver(g.input(pin)) {
                    fanin[i].insert(j);
                    fanout[j].insert(i);
                }
            }
        }

        let mut graph: DiGraph<usize, ()> = DiGraph::new();
        let nodes: Vec<_> = (0..self.gates.len()).map(|i| graph.add_node(i)).collect();
        for (i, ins) in fanin.iter().enumerate() {
            for &j in ins {
                graph.add_edge(nodes[j], nodes[i], ());
            }
        }
        let mut cycles: Vec<Vec<usize>> = tarjan_scc(&graph)
            .into_iter()
            .map(|comp| {
                let mut ids: Vec<usize> = comp.iter().map(|n| graph[*n]).collect();
                ids.sort_unstable();
                ids
            })
            .filter(|ids| ids.len() >= 2 || fanin[ids[0]].contains(&ids[0]))
            .collect();
        cycles.sort();

        Topology {
            fanin,
            fanout,
            cycles,
        }
    }

    /// Parses the native text format.
    pub fn parse(text: &str) -> Result<Netlist, NetlistError> {
        let mut inputs: Vec<(String, usize)> = Vec::new();
        let mut outputs: Vec<(String, usize)> = Vec::new();
        let mut gates: Vec<(Gate, usize)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let keyword = line.split_whitespace().next().unwrap();
            match keyword {
                "input" | "output" => {
                    let name = line[keyword.len()..].trim();
                    check_name(name, "signal", line_no)?;
                    let list = if keyword == "input" { &mut inputs } else { &mut outputs };
                    if list.iter().any(|(n, _)| n == name) {
                        return Err(NetlistError::Parse {
                            line: line_no,
                            reason: format!("duplicate {keyword} declaration for `{name}`"),
                        });
                    }
                    list.push((name.to_string(), line_no));
                }
                "gate" => {
                    let gate = parse_gate_line(line, line_no)?;
                    if gates.iter().any(|(g, _)| g.id == gate.id) {
                        return Err(NetlistError::Parse {
                            line: line_no,
                            reason: format!("duplicate gate id `{}`", gate.id),
                        });
                    }
                    gates.push((gate, line_no));
                }
                other => {
                    return Err(NetlistError::Parse {
                        line: line_no,
                        reason: format!("unknown directive `{other}` (expected input, output, or gate)"),
                    });
                }
            }
        }

        assemble(inputs, outputs, gates)
    }

    /// Imports an ISCAS `.bench` circuit. Only 2-input NAND/NOR gates are
    /// supported; parameters are left to their per-gate defaults. Signal
    /// names are sanitized into identifier shape (`10` becomes `n10`).
    pub fn import_bench(text: &str) -> Result<Netlist, NetlistError> {
        let mut inputs: Vec<(String, usize)> = Vec::new();
        let mut outputs: Vec<(String, usize)> = Vec::new();
        let mut gates: Vec<(Gate, usize)> = Vec::new();
        let mut sanitized: BTreeMap<String, String> = BTreeMap::new();

        let mut rename = |raw: &str, line_no: usize| -> Result<String, NetlistError> {
            let clean = sanitize_bench_name(raw);
            if let Some(prev) = sanitized.get(&clean) {
                if prev != raw {
                    return Err(NetlistError::Parse {
                        line: line_no,
                        reason: format!("names `{prev}` and `{raw}` both sanitize to `{clean}`"),
                    });
                }
            } else {
                sanitized.insert(clean.clone(), raw.to_string());
            }
            Ok(clean)
        };

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("INPUT") {
                let name = strip_parens(rest, line_no)?;
                inputs.push((rename(name, line_no)?, line_no));
            } else if let Some(rest) = line.strip_prefix("OUTPUT") {
                let name = strip_parens(rest, line_no)?;
                outputs.push((rename(name, line_no)?, line_no));
            } else if let Some((lhs, rhs)) = line.split_once('=') {
                let out_raw = lhs.trim();
                let rhs = rhs.trim();
                let open = rhs.find('(').ok_or_else(|| NetlistError::Parse {
                    line: line_no,
                    reason: "expected `<name> = <OP>(<a>, <b>)`".to_string(),
                })?;
                let op = rhs[..open].trim().to_ascii_uppercase();
                let gate_type = match op.as_str() {
                    "NAND" => GateType::Nand2,
                    "NOR" => GateType::Nor2,
                    other => {
                        return Err(NetlistError::Parse {
                            line: line_no,
                            reason: format!("unsupported gate `{other}` (only 2-input NAND/NOR can be imported)"),
                        });
                    }
                };
                let args = strip_parens(&rhs[open..], line_no)?;
                let parts: Vec<&str> = args.split(',').map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(NetlistError::Parse {
                        line: line_no,
                        reason: format!("{op} takes exactly 2 inputs, got {}", parts.len()),
                    });
                }
                let output = rename(out_raw, line_no)?;
                let input_a = rename(parts[0], line_no)?;
                let input_b = rename(parts[1], line_no)?;
                if input_a == input_b {
                    return Err(NetlistError::Parse {
                        line: line_no,
                        reason: "pins A and B must connect different signals".to_string(),
                    });
                }
                gates.push((
                    Gate {
                        id: format!("g_{output}"),
                        gate_type,
                        input_a,
                        input_b,
                        output,
                        params: BTreeMap::new(),
                    },
                    line_no,
                ));
            } else {
                return Err(NetlistError::Parse {
                    line: line_no,
                    reason: "expected INPUT(...), OUTPUT(...), or `<name> = <OP>(...)`".to_string(),
                });
            }
        }

        assemble(inputs, outputs, gates)
    }
}

impl fmt::Display for Netlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.primary_inputs {
            writeln!(f, "input {i}")?;
        }
        for o in &self.primary_outputs {
            writeln!(f, "output {o}")?;
        }
        for g in &self.gates {
            write!(
                f,
                "gate {} {} A={} B={} Y={}",
                g.id, g.gate_type, g.input_a, g.input_b, g.output
            )?;
            for (k, v) in &g.params {
                write!(f, " param {k}={v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

// ----- construction helpers --------------------------------------------------

/// Validates driver uniqueness and pin references, producing the netlist.
fn assemble(
    inputs: Vec<(String, usize)>,
    outputs: Vec<(String, usize)>,
    gates: Vec<(Gate, usize)>,
) -> Result<Netlist, NetlistError> {
    let mut driven: BTreeSet<&str> = BTreeSet::new();
    for (name, _) in &inputs {
        if !driven.insert(name) {
            return Err(NetlistError::MultipleDrivers { signal: name.clone() });
        }
    }
    for (gate, _) in &gates {
        if !driven.insert(&gate.output) {
            return Err(NetlistError::MultipleDrivers {
                signal: gate.output.clone(),
            });
        }
    }

    for (gate, line) in &gates {
        for pin in [&gate.input_a, &gate.input_b] {
            if !driven.contains(pin.as_str()) {
                return Err(NetlistError::UndeclaredSignal {
                    name: pin.clone(),
                    line: *line,
                });
            }
        }
    }
    for (name, line) in &outputs {
        if !driven.contains(name.as_str()) {
            return Err(NetlistError::UndeclaredSignal {
                name: name.clone(),
                line: *line,
            });
        }
    }

    Ok(Netlist {
        primary_inputs: inputs.into_iter().map(|(n, _)| n).collect(),
        primary_outputs: outputs.into_iter().map(|(n, _)| n).collect(),
        gates: gates.into_iter().map(|(g, _)| g).collect(),
    })
}

fn check_name(name: &str, what: &str, line: usize) -> Result<(), NetlistError> {
    Symbol::new(name).map(|_| ()).map_err(|_| NetlistError::Parse {
        line,
        reason: format!("invalid {what} name `{name}`"),
    })
}

fn parse_gate_line(line: &str, line_no: usize) -> Result<Gate, NetlistError> {
    let perr = |reason: String| NetlistError::Parse { line: line_no, reason };
    let mut toks = line.split_whitespace().peekable();
    toks.next(); // "gate"

    let id = toks
        .next()
        .ok_or_else(|| perr("missing gate id".to_string()))?;
    check_name(id, "gate id", line_no)?;

    let ty_tok = toks
        .next()
        .ok_or_else(|| perr("missing gate type".to_string()))?;
    let gate_type = GateType::from_token(ty_tok)
        .ok_or_else(|| perr(format!("unknown gate type `{ty_tok}` (expected NOR2, NAND2, or C2)")))?;

    let mut pins: BTreeMap<&str, String> = BTreeMap::new();
    while let Some(&tok) = toks.peek() {
        if tok == "param" {
            break;
        }
        toks.next();
        let (pin, sig) = tok
            .split_once('=')
            .filter(|(p, _)| matches!(*p, "A" | "B" | "Y"))
            .ok_or_else(|| perr(format!("expected A=/B=/Y= assignment, got `{tok}`")))?;
        check_name(sig, "signal", line_no)?;
        if pins.insert(pin, sig.to_string()).is_some() {
            return Err(perr(format!("pin {pin} assigned twice")));
        }
    }
    let (Some(input_a), Some(input_b), Some(output)) =
        (pins.remove("A"), pins.remove("B"), pins.remove("Y"))
    else {
        return Err(perr("gate needs all three pins A=, B=, Y=".to_string()));
    };
    if input_a == input_b {
        return Err(perr("pins A and B must connect different signals".to_string()));
    }

    // Parameters: `param <name>=<expr>`, where the expression runs until the
    // next `param` keyword or the end of the line.
    let mut params: BTreeMap<String, Expr> = BTreeMap::new();
    while toks.next().is_some() {
        // The consumed token was the `param` keyword.
        let mut value_toks: Vec<&str> = Vec::new();
        while let Some(&tok) = toks.peek() {
            if tok == "param" {
                break;
            }
            value_toks.push(tok);
            toks.next();
        }
        let assignment = value_toks.join(" ");
        let (name, value_text) = assignment
            .split_once('=')
            .ok_or_else(|| perr("expected `param <name>=<expr>`".to_string()))?;
        let name = name.trim();
        check_name(name, "parameter", line_no)?;
        let value = Expr::parse(value_text)
            .map_err(|e| perr(format!("parameter `{name}`: {e}")))?;
        if params.insert(name.to_string(), value).is_some() {
            return Err(perr(format!("parameter `{name}` pinned twice")));
        }
    }

    Ok(Gate {
        id: id.to_string(),
        gate_type,
        input_a,
        input_b,
        output,
        params,
    })
}

/// Extracts `inner` from a `(inner)` token.
fn strip_parens(tok: &str, line_no: usize) -> Result<&str, NetlistError> {
    tok.trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .map(str::trim)
        .ok_or_else(|| NetlistError::Parse {
            line: line_no,
            reason: format!("expected a parenthesized name, got `{tok}`"),
        })
}

/// Rewrites an arbitrary `.bench` name into identifier shape.
fn sanitize_bench_name(raw: &str) -> String {
    let mut out = String::new();
    for c in raw.chars() {
        if c.is_ascii_alphanumeric() || c == '_' {
            out.push(c);
        } else {
            out.push('_');
        }
    }
    let starts_ok = out
        .chars()
        .next()
        .map(|c| c.is_ascii_alphabetic() || c == '_')
        .unwrap_or(false);
    if starts_ok {
        out
    } else {
        format!("n{out}")
    }
}
