use std::path::PathBuf;

use exfl_core::source_model::print::{dump_method, dump_unit, method_to_string};
use exfl_core::source_model::*;
use exfl_core::stacktrace::RelevantStatement;

const FIXTURES: [&str; 4] = ["math98", "lang45", "chart4", "chart17"];

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn model(name: &str) -> SourceModel {
    parse_sources(&[fixture(name).join("src")]).unwrap()
}

#[test]
fn fixtures_parse_without_diagnostics() {
    for name in FIXTURES {
        let m = model(name);
        assert_eq!(m.len(), 1, "{name}");
        assert!(m.diagnostics().is_empty(), "{name}: {:?}", m.diagnostics());
    }
}

#[test]
fn unit_paths_are_root_relative() {
    let m = model("math98");
    let u = m.units().next().unwrap();
    assert_eq!(u.path, "org/apache/commons/math/linear/BigMatrixImpl.java");
    assert_eq!(u.package.as_deref(), Some("org.apache.commons.math.linear"));
    assert!(m.find_unit("org.apache.commons.math.linear.BigMatrixImpl", "BigMatrixImpl.java").is_some());
}

#[test]
fn dump_matches_golden() {
    let rel = "math98/src/org/apache/commons/math/linear/BigMatrixImpl.java";
    let text = std::fs::read_to_string(fixture("").join(rel)).unwrap();
    let golden = std::fs::read_to_string(fixture("math98").join("ast.golden")).unwrap();
    assert_eq!(dump_unit(&parse_source_text(rel, &text).unit, true), golden);
}

#[test]
fn methods_print_and_reparse() {
    for name in FIXTURES {
        let m = model(name);
        let unit = m.units().next().unwrap();
        let class = &unit.classes[0];
        for method in &class.methods {
            let src = format!("class {} {{\n{}}}\n", class.name, method_to_string(method));
            let out = parse_source_text("R.java", &src);
            assert!(out.diagnostics.is_empty(), "{name}/{}: {:?}\n{src}", method.name, out.diagnostics);
            let again = &out.unit.classes[0].methods[0];
            assert_eq!(dump_method(again, false), dump_method(method, false), "{name}/{}", method.name);
        }
    }
}

fn rs(class: &str, method: &str, file: &str, line: u32) -> RelevantStatement {
    RelevantStatement {
        line,
        class_name: class.into(),
        method_name: method.into(),
        file_name: file.into(),
        stack_depth: 0,
    }
}

#[test]
fn resolves_fixture_frames() {
    let cases = [
        ("math98", "org.apache.commons.math.linear.BigMatrixImpl", "operate", "BigMatrixImpl.java", 38, "out[row] = sum;"),
        ("lang45", "org.apache.commons.lang.WordUtils", "abbreviate", "WordUtils.java", 34, "result.append(str.substring(0, upper));"),
        ("chart4", "org.jfree.chart.plot.XYPlot", "getDataRange", "XYPlot.java", 58, "Collection c = r.getAnnotations();"),
        ("chart17", "org.jfree.data.time.TimeSeries", "clone", "TimeSeries.java", 23, "Object clone = createCopy(0, getItemCount() - 1);"),
    ];
    for (name, class, method, file, line, text) in cases {
        let m = model(name);
        let ctx = resolve_statement(&m, &rs(class, method, file, line), &|_| true).unwrap();
        assert_eq!(print::stmt_to_string(ctx.stmt).trim(), text, "{name}");
        assert!(!ctx.ambiguous);
        assert_eq!(ctx.stmt.id.line, line);
    }
}

#[test]
fn unresolvable_frames() {
    let m = model("math98");
    let cls = "org.apache.commons.math.linear.BigMatrixImpl";
    assert!(matches!(
        resolve_statement(&m, &rs(cls, "operate", "BigMatrixImpl.java", 2), &|_| true),
        Err(UnresolvedStatement::NoMethod { .. })
    ));
    assert!(matches!(
        resolve_statement(&m, &rs("x.Y", "f", "Y.java", 3), &|_| true),
        Err(UnresolvedStatement::NoUnit { .. })
    ));
}

#[test]
fn locate_by_statement_id() {
    let m = model("math98");
    let file = "org/apache/commons/math/linear/BigMatrixImpl.java";
    let ctx = m.locate(&StatementId::new(file, 32, 0)).unwrap();
    assert_eq!(ctx.method.method.name, "operate");
    assert!(m.locate(&StatementId::new(file, 32, 5)).is_none());
    let (mc, p) = m.locate_param(&StatementId::new(file, 26, 0)).unwrap();
    assert_eq!((mc.method.name.as_str(), p.name.as_str()), ("operate", "v"));
}
