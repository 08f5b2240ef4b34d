//! End-to-end acceptance checks. Each test is one advertised guarantee of
//! the analyzer and prints exactly one pass/fail line through the harness:
//!
//! 1. the shipped NOR2 (a,c) falling pair template evaluates, at exact
//!    rational points, to the same value as independently coded arithmetic;
//! 2. the single-NOR walk produces the expected closed forms for the first
//!    output time and the recorded drafting time `T`;
//! 3. the NOR-form C17 fixture analyzes end to end: the CLI emits an
//!    expression per gate output, the bundled binding checks consistent,
//!    and every adjacent swap of the schedule is caught at the swapped pair;
//! 4. symbolic event times and the consistency verdict agree with a
//!    step-by-step numeric forward simulation on random circuits;
//! 5. symbolic sensitivities agree with central finite differences;
//! 6. unrolled feedback nests each output-time expression in its successor;
//! 7. exported SMT-LIB2 ordering regions agree with the checker under an
//!    external solver;
//! 8. consecutive-pair time differences are invariant under a global shift
//!    of all input times.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symtime::expr::{evaluate_exact, Expr, Symbol, Value};
use symtime::model::{
    toggle, CaseLabel, CasePair, DelayForm, Direction, GateType, InputState, ModelLibrary, Pin,
    RESERVED_DELTA, RESERVED_T,
};
use symtime::netlist::{Gate, Netlist};
use symtime::schedule::Schedule;
use symtime::{
    check_consistency, export_smt, ordering_constraints, parse_bindings, propagate, sensitivity,
    Binding, Verdict,
};

// ----- shared helpers --------------------------------------------------------

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).expect("fixture file is readable")
}

fn load(ckt: &str, sched: &str) -> (Netlist, Schedule) {
    let netlist = Netlist::parse(&read_fixture(ckt)).expect("fixture netlist parses");
    let schedule = Schedule::parse(&read_fixture(sched), &netlist).expect("fixture schedule parses");
    (netlist, schedule)
}

fn sym(name: &str) -> Symbol {
    Symbol::new(name).expect("valid symbol name")
}

fn br(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat(v: Value) -> BigRational {
    match v {
        Value::Rational(r) => r,
        Value::Real(x) => panic!("expected an exact rational, got {x}"),
    }
}

fn eval_rat(e: &Expr, binding: &Binding) -> BigRational {
    rat(evaluate_exact(e, binding).expect("expression evaluates under the binding"))
}

fn random_positive_rational(rng: &mut ChaCha8Rng) -> BigRational {
    br(rng.gen_range(1..=24), rng.gen_range(1..=4))
}

/// The sensitivity fixtures also run against a library that realizes the
/// single-NOR rising output analytically, so a template with `T`/`DELTA`
/// dependence lands inside an event-time expression.
fn analytic_rise_library() -> ModelLibrary {
    ModelLibrary::parse(
        "gate NOR2\n\
         params C1 C2 R_nA R_nB d_min\n\
         pair (e,g) rise = -C2*R_nB*(T + d_min)/(C1*(R_nA + R_nB)) + d_min\n",
    )
    .expect("library parses")
}

// ----- 1. template fidelity --------------------------------------------------

#[test]
fn criterion_1_shipped_pair_template_matches_direct_rational_arithmetic() {
    let start = Instant::now();
    let lib = ModelLibrary::load_default();
    let pair = CasePair::new(
        lib.case_map(),
        CaseLabel::from_char('a').unwrap(),
        CaseLabel::from_char('c').unwrap(),
    )
    .expect("(a,c) is a consecutive case pair");
    let form = lib
        .lookup_pair(GateType::Nor2, pair, Direction::Fall)
        .expect("lookup succeeds");
    let DelayForm::Analytic(body) = form else {
        panic!("the shipped NOR2 (a,c) falling entry must be analytic");
    };

    // Six positive-rational axes; points are read off the lattice in
    // mixed-radix order, so every axis varies within the first 100 points.
    let axes: [(&str, Vec<BigRational>); 6] = [
        ("T", vec![br(1, 3), br(5, 2), br(9, 1)]),
        ("C1", vec![br(1, 2), br(3, 1), br(7, 4)]),
        ("C2", vec![br(2, 7), br(4, 1), br(1, 1)]),
        ("R_nA", vec![br(1, 1), br(8, 3), br(5, 6)]),
        ("R_nB", vec![br(2, 1), br(3, 5), br(11, 2)]),
        ("d_min", vec![br(1, 4), br(6, 1)]),
    ];
    for point in 0..100usize {
        let mut binding: Binding = BTreeMap::new();
        let mut idx = point;
        for (name, values) in &axes {
            binding.insert(sym(name), values[idx % values.len()].clone());
            idx /= values.len();
        }
        let got = eval_rat(body, &binding);

        // Independently coded arithmetic for the falling-output delay:
        // d_min - C2*R_nB*(T + d_min) / (C1*(R_nA + R_nB)).
        let v = |name: &str| binding[&sym(name)].clone();
        let want = v("d_min")
            - v("C2") * v("R_nB") * (v("T") + v("d_min")) / (v("C1") * (v("R_nA") + v("R_nB")));
        assert_eq!(got, want, "lattice point {point}");
    }
    assert!(
        start.elapsed() < Duration::from_secs(1),
        "took {:?}",
        start.elapsed()
    );
}

// ----- 2. single-NOR closed forms ---------------------------------------------

#[test]
fn criterion_2_single_nor_walk_reproduces_the_expected_closed_forms() {
    let start = Instant::now();
    let lib = ModelLibrary::load_default();
    let (netlist, schedule) = load("single_nor.ckt", "single_nor.sched");
    let sol = propagate(&netlist, &schedule, &lib, false).expect("propagation succeeds");

    // First output transition: the cold case-a delay after the first rise.
    assert_eq!(sol.times[1], Expr::parse("d_a + t0").unwrap());

    // The (a,c) pair recorded at the second input rise measures its
    // drafting time from the output event in between.
    let rec = &sol.records[0];
    assert_eq!(rec.pair.to_string(), "(a,c)");
    assert_eq!(rec.t, Some(Expr::parse("t1 - d_a - t0").unwrap()));
    assert!(
        start.elapsed() < Duration::from_secs(1),
        "took {:?}",
        start.elapsed()
    );
}

// ----- 3. C17 end to end -------------------------------------------------------

#[test]
fn criterion_3_c17_analyzes_checks_and_flags_any_adjacent_swap() {
    let start = Instant::now();

    // The CLI emits a closed-form expression for every gate output.
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_symtime"))
        .arg("analyze")
        .arg(fixture("c17_nor.ckt"))
        .arg(fixture("c17_nor.sched"))
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "analyze failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8(output.stdout).expect("utf-8 output");
    for signal in ["o0", "o1", "o2", "o3", "o4", "o5"] {
        let line = stdout
            .lines()
            .find(|l| l.split_whitespace().nth(1) == Some(signal))
            .unwrap_or_else(|| panic!("no event line for {signal}:\n{stdout}"));
        let (_, expr_text) = line
            .split_once(" = ")
            .unwrap_or_else(|| panic!("no expression for {signal}: {line}"));
        Expr::parse(expr_text)
            .unwrap_or_else(|e| panic!("unparsable expression for {signal}: {e}"));
    }

    // The bundled binding is consistent.
    let lib = ModelLibrary::load_default();
    let (netlist, schedule) = load("c17_nor.ckt", "c17_nor.sched");
    let sol = propagate(&netlist, &schedule, &lib, false).expect("propagation succeeds");
    let binding = parse_bindings(&read_fixture("c17_nor.bind")).expect("binding parses");
    let report = check_consistency(&sol, &binding).expect("binding covers the solution");
    assert_eq!(report.verdict, Verdict::Consistent);

    // Swapping any two adjacent events (all adjacent pairs involve
    // different signals) flips the verdict, and the first violation lands
    // exactly on the swapped positions. A swap can re-key a delay — a
    // different input gets blamed for an output flip — so the binding is
    // extended with a default for any symbol the swap mints.
    let sched_text = read_fixture("c17_nor.sched");
    let event_lines: Vec<&str> = sched_text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    assert_eq!(event_lines.len(), 11);
    for k in 0..event_lines.len() - 1 {
        fn signal_of(line: &str) -> &str {
            line.split_whitespace().next().unwrap()
        }
        assert_ne!(signal_of(event_lines[k]), signal_of(event_lines[k + 1]));

        let mut swapped = event_lines.clone();
        swapped.swap(k, k + 1);
        let text = swapped.join("\n");
        let schedule = Schedule::parse(&text, &netlist).expect("swapped schedule parses");
        let sol = propagate(&netlist, &schedule, &lib, false).expect("swapped schedule propagates");
        let mut extended = binding.clone();
        for s in sol.free_symbols() {
            extended.entry(s).or_insert_with(BigRational::one);
        }
        let report = check_consistency(&sol, &extended).expect("extended binding covers");
        assert_eq!(
            report.verdict,
            Verdict::Violated,
            "swap at positions ({k},{})",
            k + 1
        );
        let v = report.first_violation.expect("violation details");
        assert_eq!(
            (v.earlier, v.later),
            (k, k + 1),
            "violation must land on the swapped pair"
        );
    }
    assert!(
        start.elapsed() < Duration::from_secs(1),
        "took {:?}",
        start.elapsed()
    );
}

// ----- 4. numeric forward-simulation oracle ------------------------------------

/// A library whose pair templates cover every consecutive case pair of
/// every gate type, so random walks exercise analytic `T`/`DELTA`
/// instantiation instead of opaque fallbacks.
fn pair_rich_library() -> ModelLibrary {
    let base = ModelLibrary::load_default();
    let map = base.case_map();
    let mut text = String::new();
    for gt in [GateType::Nor2, GateType::Nand2, GateType::C2] {
        text.push_str(&format!("gate {}\nparams q r\n", gt.name()));
        for prev in CaseLabel::ALL {
            let mid = map.target(prev);
            for pin in [Pin::A, Pin::B] {
                let cur = map.classify(mid, pin);
                for dir in ["rise", "fall"] {
                    text.push_str(&format!("pair ({prev},{cur}) {dir} = q*(T + DELTA) + r\n"));
                }
            }
        }
    }
    ModelLibrary::parse(&text).expect("generated library parses")
}

/// Emits a random acyclic circuit (1..=4 gates, 2..=4 inputs) and a
/// causally valid walk of 3..=8 events over it, as netlist and schedule
/// text. Inputs rest low; C-element outputs get explicit `init` lines at
/// their stable level so no gate starts out of equilibrium. Every input
/// event carries an explicit time symbol `p<step>`.
fn random_instance(rng: &mut ChaCha8Rng) -> (String, String) {
    let n_inputs = rng.gen_range(2..=4usize);
    let n_gates = rng.gen_range(1..=4usize);
    let types = [GateType::Nor2, GateType::Nand2, GateType::C2];

    let mut ckt = String::new();
    for i in 0..n_inputs {
        ckt.push_str(&format!("input x{i}\n"));
    }
    ckt.push_str(&format!("output y{}\n", n_gates - 1));

    let mut gate_types = Vec::new();
    let mut wiring: Vec<(String, String)> = Vec::new();
    for g in 0..n_gates {
        let gt = types[rng.gen_range(0..types.len())];
        // Gate g reads inputs or earlier outputs only: acyclic, so initial
        // values derive topologically.
        let pool: Vec<String> = (0..n_inputs)
            .map(|i| format!("x{i}"))
            .chain((0..g).map(|p| format!("y{p}")))
            .collect();
        let a = pool[rng.gen_range(0..pool.len())].clone();
        let b = loop {
            let cand = pool[rng.gen_range(0..pool.len())].clone();
            if cand != a {
                break cand;
            }
        };
        ckt.push_str(&format!("gate g{g} {} A={a} B={b} Y=y{g}\n", gt.name()));
        gate_types.push(gt);
        wiring.push((a, b));
    }

    let mut level: BTreeMap<String, bool> = (0..n_inputs).map(|i| (format!("x{i}"), false)).collect();
    let mut sched = String::new();
    for g in 0..n_gates {
        let (a, b) = (level[&wiring[g].0], level[&wiring[g].1]);
        let v = match gate_types[g] {
            GateType::C2 => {
                let v = a && b;
                sched.push_str(&format!("init y{g}={}\n", v as u8));
                v
            }
            gt => gt.eval(a, b, false),
        };
        level.insert(format!("y{g}"), v);
    }

    // The walk length skews high and the input choice skews low, so gates
    // often flip twice within one schedule — the second flip is the warm
    // case a pair template serves.
    let n_events = 3 + rng.gen_range(0..=5usize).max(rng.gen_range(0..=5usize));
    for step in 0..n_events {
        let pending: Vec<usize> = (0..n_gates)
            .filter(|&g| {
                let (a, b) = (level[&wiring[g].0], level[&wiring[g].1]);
                let out = level[&format!("y{g}")];
                gate_types[g].eval(a, b, out) != out
            })
            .collect();
        let name = if !pending.is_empty() && rng.gen_bool(0.7) {
            format!("y{}", pending[rng.gen_range(0..pending.len())])
        } else {
            let i = rng.gen_range(0..n_inputs).min(rng.gen_range(0..n_inputs));
            format!("x{i}")
        };
        let dir = if level[&name] { "fall" } else { "rise" };
        if name.starts_with('x') {
            sched.push_str(&format!("{name} {dir} @ p{step}\n"));
        } else {
            sched.push_str(&format!("{name} {dir}\n"));
        }
        let e = level.get_mut(&name).unwrap();
        *e = !*e;
    }
    (ckt, sched)
}

struct InputRec {
    time: BigRational,
    case: CaseLabel,
    before: InputState,
    after: InputState,
}

struct GateRun {
    inputs: Vec<InputRec>,
    last_output: Option<BigRational>,
    level: bool,
}

fn param_value(gate: &Gate, name: &str, binding: &Binding) -> BigRational {
    match gate.params.get(name) {
        Some(pinned) => eval_rat(pinned, binding),
        None => binding
            .get(&sym(&format!("{name}_{}", gate.id)))
            .cloned()
            .unwrap_or_else(|| panic!("binding covers {name}_{}", gate.id)),
    }
}

fn eval_template(
    body: &Expr,
    t: Option<&BigRational>,
    delta: Option<&BigRational>,
    gate: &Gate,
    binding: &Binding,
) -> BigRational {
    let mut values: Binding = BTreeMap::new();
    for s in body.free_symbols() {
        let v = if s.name() == RESERVED_T {
            t.expect("T is defined after a previous output").clone()
        } else if s.name() == RESERVED_DELTA {
            delta.expect("DELTA is defined at a pair event").clone()
        } else {
            param_value(gate, s.name(), binding)
        };
        values.insert(s, v);
    }
    eval_rat(body, &values)
}

/// Step-by-step numeric forward simulation: walks the schedule once,
/// looking delay templates up exactly like the symbolic engine would but
/// substituting numbers at every step instead of composing expressions.
fn simulate_numeric(
    netlist: &Netlist,
    schedule: &Schedule,
    lib: &ModelLibrary,
    initial: &BTreeMap<String, bool>,
    binding: &Binding,
) -> Vec<BigRational> {
    let map = lib.case_map();
    let mut level = initial.clone();
    let mut gates: Vec<GateRun> = netlist
        .gates
        .iter()
        .map(|g| GateRun {
            inputs: Vec::new(),
            last_output: None,
            level: initial[&g.output],
        })
        .collect();
    let mut times = Vec::new();

    for event in &schedule.events {
        let target = event.direction.target_value();
        let driver = netlist.gates.iter().position(|g| g.output == event.signal);
        let t = match driver {
            None => eval_rat(
                event
                    .time
                    .as_ref()
                    .expect("generated input events carry explicit times"),
                binding,
            ),
            Some(gi) => {
                let gate = &netlist.gates[gi];
                let run = &gates[gi];
                assert_eq!(run.level, !target, "generated output events alternate");
                let gt = gate.gate_type;
                let cause_pos = run
                    .inputs
                    .iter()
                    .rposition(|rec| {
                        gt.eval(rec.after.0, rec.after.1, run.level) == target
                            && gt.eval(rec.before.0, rec.before.1, run.level) != target
                    })
                    .expect("a generated output event always has a flipping input");
                let cause = &run.inputs[cause_pos];
                let delay = match &run.last_output {
                    None => match lib
                        .lookup_cold(gt, cause.case, event.direction)
                        .expect("cold lookup")
                    {
                        DelayForm::Analytic(body) => {
                            eval_template(body, None, None, gate, binding)
                        }
                        DelayForm::Opaque(name) => param_value(gate, &name, binding),
                    },
                    Some(prev_time) => {
                        assert!(cause_pos >= 1, "warm output events have two input events");
                        let earlier = &run.inputs[cause_pos - 1];
                        let pair =
                            CasePair::new(map, earlier.case, cause.case).expect("consecutive");
                        let t_num = cause.time.clone() - prev_time.clone();
                        let d_num = cause.time.clone() - earlier.time.clone();
                        match lib
                            .lookup_pair(gt, pair, event.direction)
                            .expect("pair lookup")
                        {
                            DelayForm::Analytic(body) => {
                                eval_template(body, Some(&t_num), Some(&d_num), gate, binding)
                            }
                            DelayForm::Opaque(name) => param_value(gate, &name, binding),
                        }
                    }
                };
                let t = cause.time.clone() + delay;
                gates[gi].last_output = Some(t.clone());
                gates[gi].level = target;
                t
            }
        };

        // Record the transition at every gate reading this signal, then
        // commit the new level.
        for (gi, gate) in netlist.gates.iter().enumerate() {
            if let Some(pin) = gate.pin_of(&event.signal) {
                let before: InputState = (level[gate.input(Pin::A)], level[gate.input(Pin::B)]);
                let after = toggle(before, pin);
                gates[gi].inputs.push(InputRec {
                    time: t.clone(),
                    case: map.classify(before, pin),
                    before,
                    after,
                });
            }
        }
        level.insert(event.signal.clone(), target);
        times.push(t);
    }
    times
}

#[test]
fn criterion_4_symbolic_times_and_verdicts_match_numeric_forward_simulation() {
    let start = Instant::now();
    let default_lib = ModelLibrary::load_default();
    let pair_lib = pair_rich_library();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let instances = 240usize;
    let mut output_events = 0usize;
    let mut analytic_pair_delays = 0usize;
    for instance in 0..instances {
        let lib = if instance % 2 == 0 { &default_lib } else { &pair_lib };
        let (ckt, sched) = random_instance(&mut rng);
        let netlist =
            Netlist::parse(&ckt).unwrap_or_else(|e| panic!("netlist parses: {e}\n{ckt}"));
        let schedule = Schedule::parse(&sched, &netlist)
            .unwrap_or_else(|e| panic!("schedule parses: {e}\n{ckt}\n{sched}"));
        let sol = propagate(&netlist, &schedule, lib, false)
            .unwrap_or_else(|e| panic!("schedule propagates: {e}\n{ckt}\n{sched}"));
        for detail in sol.details.iter().flatten() {
            output_events += 1;
            if matches!(detail.kind, symtime::DelayKind::Pair { .. }) && detail.opaque.is_none() {
                analytic_pair_delays += 1;
            }
        }

        let mut binding: Binding = BTreeMap::new();
        for s in sol.free_symbols() {
            binding.insert(s, random_positive_rational(&mut rng));
        }

        let simulated =
            simulate_numeric(&netlist, &schedule, lib, &sol.attributed.initial_values, &binding);
        assert_eq!(simulated.len(), sol.times.len());
        for (i, want) in simulated.iter().enumerate() {
            let got = eval_rat(&sol.times[i], &binding);
            assert_eq!(got, *want, "event {i} of instance {instance}\n{ckt}\n{sched}");
        }

        // The verdict agrees with brute force. In a total order the
        // adjacent-pair and all-pairs scans must agree too.
        let report = check_consistency(&sol, &binding).expect("binding covers the solution");
        let adjacent = simulated.windows(2).position(|w| w[0] >= w[1]);
        let mut all_pairs = None;
        'scan: for i in 0..simulated.len() {
            for j in i + 1..simulated.len() {
                if simulated[i] >= simulated[j] {
                    all_pairs = Some((i, j));
                    break 'scan;
                }
            }
        }
        assert_eq!(adjacent.is_none(), all_pairs.is_none(), "instance {instance}");
        match adjacent {
            None => assert_eq!(report.verdict, Verdict::Consistent, "instance {instance}"),
            Some(k) => {
                assert_eq!(report.verdict, Verdict::Violated, "instance {instance}");
                let v = report.first_violation.as_ref().expect("violation details");
                assert_eq!((v.earlier, v.later), (k, k + 1), "instance {instance}");
                assert_eq!(v.tie, simulated[k] == simulated[k + 1], "instance {instance}");
            }
        }
    }
    // The walks must actually exercise the engine: plenty of gate-output
    // events overall, including warm ones that instantiate an analytic
    // pair template with concrete T and DELTA.
    assert!(output_events >= 200, "only {output_events} output events");
    assert!(
        analytic_pair_delays >= 25,
        "only {analytic_pair_delays} analytic pair delays"
    );
    assert!(
        start.elapsed() < Duration::from_secs(30),
        "took {:?}",
        start.elapsed()
    );
}

// ----- 5. sensitivity vs finite differences ------------------------------------

#[test]
fn criterion_5_sensitivities_match_central_finite_differences() {
    let default_lib = ModelLibrary::load_default();
    let analytic_lib = analytic_rise_library();
    let h = br(1, 1_000_000);
    let tolerance = br(1, 1_000_000);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);

    let cases: [(&str, &str, &ModelLibrary); 3] = [
        ("single_nor.ckt", "single_nor.sched", &default_lib),
        ("c17_nor.ckt", "c17_nor.sched", &default_lib),
        ("single_nor.ckt", "single_nor.sched", &analytic_lib),
    ];
    for (ckt, sched, lib) in cases {
        let (netlist, schedule) = load(ckt, sched);
        let sol = propagate(&netlist, &schedule, lib, false).expect("propagation succeeds");
        let symbols: Vec<Symbol> = sol.free_symbols().into_iter().collect();
        for _point in 0..5 {
            // Values in [5/4, 25]: every template denominator stays far
            // from zero under the +-h probes.
            let binding: Binding = symbols
                .iter()
                .map(|s| (s.clone(), random_positive_rational(&mut rng) + BigRational::one()))
                .collect();
            for (event, time) in sol.times.iter().enumerate() {
                for s in &symbols {
                    let derivative = sensitivity(&sol, event, s).expect("sensitivity");
                    let got = eval_rat(&derivative, &binding);
                    let mut hi = binding.clone();
                    hi.insert(s.clone(), binding[s].clone() + h.clone());
                    let mut lo = binding.clone();
                    lo.insert(s.clone(), binding[s].clone() - h.clone());
                    let fd = (eval_rat(time, &hi) - eval_rat(time, &lo)) / (h.clone() + h.clone());
                    let scale = if got.abs() > BigRational::one() {
                        got.abs()
                    } else {
                        BigRational::one()
                    };
                    let rel = (fd - got).abs() / scale;
                    assert!(
                        rel <= tolerance,
                        "{ckt} event {event}, d/d{}: relative error {rel}",
                        s.name()
                    );
                }
            }
        }
    }
}

// ----- 6. feedback unrolling ----------------------------------------------------

#[test]
fn criterion_6_feedback_unrolling_nests_each_output_time_in_its_successor() {
    let lib = ModelLibrary::load_default();
    let (netlist, schedule) = load("ring3.ckt", "ring3.sched");
    let sol = propagate(&netlist, &schedule, &lib, false).expect("propagation succeeds");
    assert_eq!(
        sol.times.len(),
        11,
        "one enable event plus ten unrolled output events"
    );
    // Events 1..=10 are the unrolled output transitions; each time
    // expression contains its predecessor's as a subexpression, and never
    // the other way around.
    for k in 2..=10 {
        assert!(
            sol.times[k].contains(&sol.times[k - 1]),
            "event {k} time {} does not contain {}",
            sol.times[k],
            sol.times[k - 1]
        );
        assert!(!sol.times[k - 1].contains(&sol.times[k]));
    }
}

// ----- 7. SMT round trip ---------------------------------------------------------

fn run_script(text: &str) -> Vec<oxiz::SolverResult> {
    use oxiz::core::smtlib::{parse_script, Command};
    let mut ctx = oxiz::solver::Context::new();
    let commands = parse_script(text, &mut ctx.terms).expect("solver front end accepts the script");
    let real = ctx.terms.sorts.real_sort;
    let mut results = Vec::new();
    for command in commands {
        match command {
            Command::SetLogic(logic) => ctx.set_logic(&logic),
            Command::DeclareConst(name, sort) => {
                assert_eq!(sort, "Real");
                ctx.declare_const(&name, real);
            }
            Command::Assert(term) => ctx.assert(term),
            Command::CheckSat => results.push(ctx.check_sat()),
            other => panic!("exported scripts contain no other commands: {other:?}"),
        }
    }
    results
}

#[test]
fn criterion_7_exported_smt_regions_agree_with_the_checker() {
    let lib = ModelLibrary::load_default();
    let (netlist, schedule) = load("single_nor.ckt", "single_nor.sched");
    let sol = propagate(&netlist, &schedule, &lib, false).expect("propagation succeeds");
    let constraints = ordering_constraints(&sol);
    let symbols: Vec<Symbol> = sol.free_symbols().into_iter().collect();

    let dir = tempfile::tempdir().expect("temp dir");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut sat = 0usize;
    let mut unsat = 0usize;
    for case in 0..24 {
        let mut binding: Binding = BTreeMap::new();
        for s in &symbols {
            binding.insert(s.clone(), random_positive_rational(&mut rng));
        }
        if case % 2 == 0 {
            // Rebuild the input times so the declared order holds:
            // consecutive times separated by more than the gate delays.
            let t0 = random_positive_rational(&mut rng);
            let t1 = t0.clone() + binding[&sym("d_a")].clone() + random_positive_rational(&mut rng);
            let t2 = t1.clone() + random_positive_rational(&mut rng);
            let t3 = t2.clone() + random_positive_rational(&mut rng);
            binding.insert(sym("t0"), t0);
            binding.insert(sym("t1"), t1);
            binding.insert(sym("t2"), t2);
            binding.insert(sym("t3"), t3);
        }

        let report = check_consistency(&sol, &binding).expect("binding covers the solution");
        let script = export_smt(&constraints, Some(&binding)).expect("export succeeds");
        let path = dir.path().join(format!("ordering_{case}.smt2"));
        std::fs::write(&path, &script).expect("script written");
        let text = std::fs::read_to_string(&path).expect("script read back");
        assert!(text.starts_with("(set-logic QF_NRA)"));

        let results = run_script(&text);
        assert_eq!(results.len(), 1, "one check-sat per script");
        let expected = match report.verdict {
            Verdict::Consistent => oxiz::SolverResult::Sat,
            Verdict::Violated => oxiz::SolverResult::Unsat,
        };
        assert_eq!(results[0], expected, "case {case}:\n{text}");
        match report.verdict {
            Verdict::Consistent => sat += 1,
            Verdict::Violated => unsat += 1,
        }
    }
    assert!(
        sat >= 1 && unsat >= 1,
        "both outcomes exercised: sat={sat} unsat={unsat}"
    );
}

// ----- 8. translation invariance -------------------------------------------------

#[test]
fn criterion_8_consecutive_differences_are_invariant_under_input_time_shift() {
    let default_lib = ModelLibrary::load_default();
    let analytic_lib = analytic_rise_library();
    let cases: [(&str, &str, &ModelLibrary); 4] = [
        ("single_nor.ckt", "single_nor.sched", &default_lib),
        ("c17_nor.ckt", "c17_nor.sched", &default_lib),
        ("ring3.ckt", "ring3.sched", &default_lib),
        ("single_nor.ckt", "single_nor.sched", &analytic_lib),
    ];
    let shift_sym = sym("c_shift");
    let shift = Expr::symbol(&shift_sym);
    for (ckt, sched, lib) in cases {
        let (netlist, schedule) = load(ckt, sched);
        let sol = propagate(&netlist, &schedule, lib, false).expect("propagation succeeds");
        assert!(
            !sol.free_symbols().contains(&shift_sym),
            "the shift constant is fresh"
        );

        // Shift the declared time symbol of every primary-input event.
        let mut map: BTreeMap<Symbol, Expr> = BTreeMap::new();
        for (i, _) in sol.attributed.schedule.events.iter().enumerate() {
            if sol.details[i].is_none() {
                for s in sol.times[i].free_symbols() {
                    map.insert(s.clone(), Expr::symbol(&s) + shift.clone());
                }
            }
        }
        assert!(!map.is_empty());

        let diffs = ordering_constraints(&sol);
        assert_eq!(diffs.len(), sol.times.len() - 1);
        for (k, d) in diffs.iter().enumerate() {
            assert_eq!(
                d.substitute(&map).expect("substitution succeeds"),
                *d,
                "difference {k} of {ckt}"
            );
        }
        // The shift itself is not a no-op: absolute times do move.
        assert_eq!(
            sol.times[0].substitute(&map).unwrap(),
            sol.times[0].clone() + shift.clone()
        );
    }
}
