use std::collections::HashSet;

use proptest::prelude::*;

use exfl_core::dataflow::backward_defs_traced;
use exfl_core::eval::{position, probability, FaultLocation};
use exfl_core::ranking::{assign_suspiciousness, merge, suspiciousness_at};
use exfl_core::sbfl::{ochiai, CoverageSpectrum, Outcome, TestRun};
use exfl_core::source_model::parse_expression;
use exfl_core::source_model::print::{expr_to_sexpr, expr_to_string};
use exfl_core::stacktrace::{parse_exception_chain, Frame, ParsedStackTrace};
use exfl_core::{GuessedFault, Origin, Ranking, RepairTarget, SourceModel, StatementId, SuspiciousLocation};

fn ident() -> impl Strategy<Value = String> {
    "[a-z][a-zA-Z0-9]{0,6}".prop_filter("keyword", |s| {
        !matches!(
            s.as_str(),
            "do" | "if" | "for" | "new" | "int" | "try" | "this" | "null" | "true" | "case" | "char" | "else"
                | "long" | "byte" | "void" | "goto" | "enum" | "false" | "super" | "final" | "float" | "short"
                | "while" | "break" | "catch" | "class" | "const" | "throw" | "return" | "static" | "double"
                | "import" | "public" | "switch" | "throws" | "native"
        )
    })
}

fn class_name() -> impl Strategy<Value = String> {
    (prop::collection::vec("[a-z]{1,5}", 0..3), "[A-Z][a-zA-Z0-9]{0,6}").prop_map(|(pkg, c)| {
        let mut parts = pkg;
        parts.push(c);
        parts.join(".")
    })
}

fn frame() -> impl Strategy<Value = Frame> {
    (class_name(), ident(), prop::option::of(("[A-Z][a-zA-Z]{0,6}", prop::option::of(1u32..5000)))).prop_map(
        |(class_name, method_name, loc)| {
            let (file_name, line) = match loc {
                Some((f, l)) => (Some(format!("{f}.java")), l),
                None => (None, None),
            };
            Frame {
                class_name,
                method_name,
                file_name,
                line,
            }
        },
    )
}

fn section() -> impl Strategy<Value = ParsedStackTrace> {
    (
        (class_name(), prop::sample::select(vec!["Exception", "Error"])).prop_map(|(c, s)| format!("java.{c}{s}")),
        prop::option::of("[a-zA-Z0-9][a-zA-Z0-9 =<>]{0,20}[a-zA-Z0-9]"),
        prop::collection::vec(frame(), 1..8),
    )
        .prop_map(|(exception_type, message, frames)| ParsedStackTrace {
            exception_type,
            message,
            frames,
            cause: None,
            skipped_frames: 0,
        })
}

fn chain() -> impl Strategy<Value = ParsedStackTrace> {
    prop::collection::vec(section(), 1..4).prop_map(|sections| {
        let mut it = sections.into_iter().rev();
        let mut t = it.next().unwrap();
        for mut outer in it {
            outer.cause = Some(Box::new(t));
            t = outer;
        }
        t
    })
}

proptest! {
    #[test]
    fn trace_text_round_trip(t in chain()) {
        let text = t.to_text();
        let back = parse_exception_chain(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(back.to_text(), text);
    }
}

fn expr_source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        ident(),
        (0u32..1000).prop_map(|n| n.to_string()),
        Just("this".to_string()),
        Just("null".to_string()),
        Just("\"s\"".to_string()),
        Just("'c'".to_string()),
        Just("true".to_string()),
    ];
    leaf.prop_recursive(4, 32, 3, |inner| {
        let op = prop::sample::select(vec!["+", "-", "*", "/", "%", "<", ">=", "==", "!=", "&&", "||", "&", "<<"]);
        prop_oneof![
            (inner.clone(), op, inner.clone()).prop_map(|(l, o, r)| format!("({l} {o} {r})")),
            inner.clone().prop_map(|e| format!("-({e})")),
            inner.clone().prop_map(|e| format!("!({e})")),
            (inner.clone(), ident()).prop_map(|(e, f)| format!("({e}).{f}")),
            (inner.clone(), ident(), prop::collection::vec(inner.clone(), 0..3))
                .prop_map(|(e, m, a)| format!("({e}).{m}({})", a.join(", "))),
            (ident(), prop::collection::vec(inner.clone(), 0..3)).prop_map(|(m, a)| format!("{m}({})", a.join(", "))),
            ("[A-Z][a-z]{0,4}", prop::collection::vec(inner.clone(), 0..3))
                .prop_map(|(t, a)| format!("new {t}({})", a.join(", "))),
            (inner.clone(), inner.clone()).prop_map(|(a, i)| format!("({a})[{i}]")),
            inner.clone().prop_map(|n| format!("new int[{n}]")),
            ("[A-Z][a-z]{0,4}", inner.clone()).prop_map(|(t, e)| format!("(({t}) ({e}))")),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(c, a, b)| format!("(({c}) ? ({a}) : ({b}))")),
            (ident(), inner).prop_map(|(v, e)| format!("({v} = {e})")),
        ]
    })
}

proptest! {
    #[test]
    fn expression_print_reparse(src in expr_source()) {
        let e = parse_expression("E.java", &src).unwrap();
        let printed = expr_to_string(&e);
        let again = parse_expression("E.java", &printed)
            .map_err(|m| TestCaseError::fail(format!("{printed}: {m}")))?;
        prop_assert_eq!(expr_to_sexpr(&again), expr_to_sexpr(&e));
        prop_assert_eq!(expr_to_string(&again), printed);
    }
}

#[derive(Debug, Clone)]
enum Line {
    Decl(usize, Vec<usize>),
    Assign(usize, Vec<usize>),
    Loop(usize, Vec<usize>),
}

const VARS: [&str; 6] = ["p", "q", "f", "a", "b", "c"];

fn rhs(uses: &[usize]) -> String {
    if uses.is_empty() {
        "1".into()
    } else {
        uses.iter().map(|&u| VARS[u]).collect::<Vec<_>>().join(" + ")
    }
}

fn method_source(body: &[Line]) -> String {
    let mut s = String::from("class C {\n    int f = 1;\n    int m(int p, int q) {\n");
    let mut declared: HashSet<usize> = HashSet::new();
    for l in body {
        match l {
            Line::Decl(v, u) if declared.insert(*v) => s.push_str(&format!("        int {} = {};\n", VARS[*v], rhs(u))),
            Line::Decl(v, u) | Line::Assign(v, u) => s.push_str(&format!("        {} = {};\n", VARS[*v], rhs(u))),
            Line::Loop(v, u) => s.push_str(&format!(
                "        for (int i = 0; i < {}; i++) {{ {} = {}; }}\n",
                rhs(u),
                VARS[*v],
                rhs(u)
            )),
        }
    }
    s.push_str("        return a + b + c + p + q + f;\n    }\n}\n");
    s
}

fn body() -> impl Strategy<Value = Vec<Line>> {
    let var = 0usize..VARS.len();
    let uses = prop::collection::vec(0usize..VARS.len(), 0..3);
    let line = prop_oneof![
        (3usize..6, uses.clone()).prop_map(|(v, u)| Line::Decl(v, u)),
        (var.clone(), uses.clone()).prop_map(|(v, u)| Line::Assign(v, u)),
        (var, uses).prop_map(|(v, u)| Line::Loop(v, u)),
    ];
    prop::collection::vec(line, 0..15)
}

proptest! {
    #[test]
    fn dataflow_visits_are_bounded(body in body(), var in 0usize..VARS.len(), depth in 1u32..5) {
        let src = method_source(&body);
        let model = SourceModel::from_sources([("C.java", src.as_str())]);
        let unit = model.unit("C.java").unwrap();
        let class = &unit.classes[0];
        let method = &class.methods[0];
        let mut statements = 0;
        method.walk(&mut |_| statements += 1);
        let m = statements + method.params.len() + class.fields.len();
        let use_line = 4 + body.len() as u32;
        let t = backward_defs_traced(&model, &StatementId::new("C.java", use_line, 0), VARS[var], true, depth);
        prop_assert!(t.visits <= m * depth as usize, "{} visits > {m} * {depth}", t.visits);
        let mut seen = HashSet::new();
        for s in &t.sites {
            prop_assert!(s.depth < depth);
            prop_assert!(s.statement.line < use_line || s.statement.line <= 3);
            prop_assert!(seen.insert((s.statement.clone(), s.defined_var.clone())), "site reported twice");
        }
        let flat = backward_defs_traced(&model, &StatementId::new("C.java", use_line, 0), VARS[var], false, depth);
        prop_assert!(flat.sites.iter().all(|s| s.depth == 0 && s.defined_var == VARS[var]));
    }
}

fn location(k: usize) -> SuspiciousLocation {
    SuspiciousLocation {
        statement: StatementId::new("A.java", k as u32 + 1, 0),
        expression: parse_expression("A.java", "x").unwrap(),
        guessed_faults: vec![GuessedFault::WrongValue],
        source_relevant_statement_depth: 0,
    }
}

proptest! {
    #[test]
    fn schedule_is_strictly_decreasing(n in 0usize..=40) {
        let locs: Vec<SuspiciousLocation> = (0..n).map(location).collect();
        let t = assign_suspiciousness(&locs);
        prop_assert_eq!(t.len(), n.min(20));
        for (k, w) in t.windows(2).enumerate() {
            prop_assert!(w[0].suspiciousness.value() > w[1].suspiciousness.value(), "{k}");
        }
        for (k, e) in t.iter().enumerate() {
            prop_assert!(e.suspiciousness.value().unwrap() > 1.0);
            prop_assert_eq!(e.suspiciousness.value(), suspiciousness_at(k));
        }
    }
}

fn merge_inputs() -> impl Strategy<Value = (Vec<RepairTarget>, Vec<RepairTarget>)> {
    (
        prop::collection::vec((1u32..15, 0u8..3), 0..12),
        prop::collection::vec((1u32..25, 0.0f64..=1.0), 0..25),
    )
        .prop_map(|(e, s)| {
            let locs: Vec<SuspiciousLocation> = e
                .iter()
                .map(|(l, x)| SuspiciousLocation {
                    statement: StatementId::new("A.java", *l, 0),
                    expression: parse_expression("A.java", &format!("x{x}")).unwrap(),
                    guessed_faults: vec![GuessedFault::ALL[(*l as usize + *x as usize) % GuessedFault::ALL.len()]],
                    source_relevant_statement_depth: 0,
                })
                .collect();
            let sbfl = s
                .iter()
                .map(|(l, v)| RepairTarget::sbfl(StatementId::new("A.java", *l, 0), *v))
                .collect();
            (assign_suspiciousness(&locs), sbfl)
        })
}

proptest! {
    #[test]
    fn merge_is_idempotent((except, sbfl) in merge_inputs()) {
        let once = merge(&except, &sbfl).unwrap();
        let (e, s) = once.split();
        let twice = merge(&e, &s).unwrap();
        prop_assert_eq!(twice, once.clone());
        prop_assert_eq!(once.entries.iter().filter(|x| x.origin == Origin::Except).count() <= except.len(), true);
    }

    #[test]
    fn merge_with_empty_sbfl_keeps_only_except((except, _) in merge_inputs()) {
        let r = merge(&except, &[]).unwrap();
        prop_assert!(r.entries.iter().all(|e| e.origin == Origin::Except));
    }

    #[test]
    fn probability_of_merged_rankings_matches_oracle((except, sbfl) in merge_inputs()) {
        let r = merge(&except, &sbfl).unwrap();
        let total: f64 = r.entries.iter().map(|e| e.suspiciousness.value().unwrap()).sum();
        let lines: HashSet<u32> = r.entries.iter().map(|e| e.location.line).collect();
        let mut sum = 0.0;
        for line in lines {
            let here: f64 = r.entries.iter().filter(|e| e.location.line == line).map(|e| e.suspiciousness.value().unwrap()).sum();
            let p = probability(&r, &FaultLocation { file: "A.java".into(), line }).unwrap();
            let want = if total > 0.0 { here / total } else { 0.0 };
            prop_assert!((p - want).abs() < 1e-12, "line {}: {} vs {}", line, p, want);
            sum += p;
        }
        if total > 0.0 {
            prop_assert!((sum - 1.0).abs() < 1e-9);
        }
    }
}

fn spectrum() -> impl Strategy<Value = CoverageSpectrum> {
    (1usize..=8, 1usize..=6).prop_flat_map(|(m, n)| {
        prop::collection::vec((any::<bool>(), prop::collection::vec(any::<bool>(), m)), n).prop_map(move |tests| {
            let statements = (0..m).map(|i| StatementId::new("S.java", i as u32 + 1, 0)).collect();
            let tests = tests
                .into_iter()
                .enumerate()
                .map(|(k, (f, cov))| TestRun {
                    id: format!("t{k}"),
                    outcome: if f { Outcome::Fail } else { Outcome::Pass },
                    covered: (0..m).filter(|&i| cov[i]).collect(),
                })
                .collect();
            CoverageSpectrum::new(statements, tests).unwrap()
        })
    })
}

fn scores(r: &Ranking) -> Vec<(StatementId, f64)> {
    let mut v: Vec<_> = r
        .entries
        .iter()
        .map(|e| (e.location.clone(), e.suspiciousness.value().unwrap()))
        .collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

proptest! {
    #[test]
    fn ochiai_is_invariant_under_test_replication(s in spectrum(), k in 2usize..4) {
        let mut tests = Vec::new();
        for c in 0..k {
            tests.extend(s.tests.iter().map(|t| TestRun { id: format!("{}#{c}", t.id), ..t.clone() }));
        }
        let bigger = CoverageSpectrum::new(s.statements.clone(), tests).unwrap();
        let a = scores(&ochiai(&s).unwrap());
        let b = scores(&ochiai(&bigger).unwrap());
        for ((ia, va), (ib, vb)) in a.iter().zip(&b) {
            prop_assert_eq!(ia, ib);
            prop_assert!((va - vb).abs() < 1e-12);
        }
    }

    #[test]
    fn ochiai_scores_lie_in_unit_interval(s in spectrum()) {
        for (_, v) in scores(&ochiai(&s).unwrap()) {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn spectrum_text_round_trip(s in spectrum()) {
        prop_assert_eq!(CoverageSpectrum::parse(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn position_depends_on_rank_only(vals in prop::collection::vec(0u8..6, 1..20), scale in 0.1f64..10.0, shift in 0.0f64..5.0) {
        let build = |f: &dyn Fn(f64) -> f64| {
            Ranking::sorted(
                vals.iter()
                    .enumerate()
                    .map(|(i, v)| RepairTarget::sbfl(StatementId::new("R.java", i as u32 + 1, 0), f(f64::from(*v) / 10.0)))
                    .collect(),
            )
        };
        let base = build(&|x| x);
        let rescaled = build(&|x| scale * x.powi(3) + shift);
        for line in 1..=vals.len() as u32 {
            let at = FaultLocation { file: "R.java".into(), line };
            prop_assert_eq!(position(&base, &at), position(&rescaled, &at));
        }
    }
}
