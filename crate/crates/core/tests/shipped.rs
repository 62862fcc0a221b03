use std::fs;
use std::path::PathBuf;

use qca_core::designs::{document, DesignId};
use qca_core::format::{parse, serialize};
use qca_core::layout::validate;
use qca_core::metrics::ComparisonManifest;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn qca(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = qca_core::cli::run(
        std::iter::once("qca").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn design_files_match_the_builders() {
    for id in DesignId::SHIPPED {
        let path = root().join("designs").join(format!("{}.qcal", id.stem()));
        let text = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(
            text,
            serialize(&document(id)),
            "{} is stale; regenerate with `qca gen {id}`",
            path.display()
        );
        let doc = parse(&text).unwrap();
        assert!(validate(&doc.layout).is_empty(), "{id}");
        assert_eq!(qca(&["gen", &id.to_string()]).1, text);
        assert_eq!(
            qca(&["validate", path.to_str().unwrap()]),
            (0, "ok\n".to_string(), String::new())
        );
    }
}

#[test]
fn manifests_resolve() {
    for name in [
        "xor3_published",
        "xor3_computed",
        "full_adder_published",
        "full_adder_computed",
    ] {
        let path = root().join("manifests").join(format!("{name}.csv"));
        let m = ComparisonManifest::from_csv(fs::File::open(&path).unwrap()).unwrap();
        let (code, out, err) = qca(&["compare", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(
            out.lines().filter(|l| !l.starts_with('#')).count(),
            m.rows.len() + 1
        );
        assert!(out.contains("# cell-count improvement of "));
    }
}

#[test]
fn computed_rows_come_from_the_layouts() {
    let path = root().join("manifests/xor3_computed.csv");
    let (_, out, _) = qca(&["compare", path.to_str().unwrap()]);
    assert!(
        out.lines().any(|l| l.contains(",xor3_v2,8,0.006084,0.5,")),
        "{out}"
    );
}

#[test]
fn simulate_reports_every_cell() {
    let path = root().join("designs/inverter.qcal");
    let (code, out, _) = qca(&["simulate", path.to_str().unwrap(), "--inputs", "A=1"]);
    assert_eq!(code, 0);
    let y = out.lines().find(|l| l.contains(",output,Y,")).unwrap();
    assert!(y.ends_with(",-1"), "{y}");
    assert!(out.contains("# converged true tie false"));

    let (code, out, _) = qca(&[
        "--solver",
        "sweep",
        "simulate",
        path.to_str().unwrap(),
        "--inputs",
        "A=1",
    ]);
    assert_eq!(code, 0);
    assert!(out
        .lines()
        .find(|l| l.contains(",output,Y,"))
        .unwrap()
        .ends_with(",-1"));
}

#[test]
fn energy_breakdown_has_footers() {
    let path = root().join("designs/xor3_v2.qcal");
    let (code, out, _) = qca(&[
        "energy",
        path.to_str().unwrap(),
        "--output",
        "XOR",
        "--candidate",
        "-1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        out.lines().next(),
        Some("source_cell,electron,distance_nm,energy_J")
    );
    assert!(out.lines().any(|l| l.starts_with("U,")));
}
