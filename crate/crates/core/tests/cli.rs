use std::path::PathBuf;
use std::process::{Command, Output};

use proptest::prelude::*;

use phgscat::algebra::{gr, rat, BoundaryFunction, BoundaryTensor, GaussianRational};
use phgscat::geometry::{Correction, MetricExpansion};
use phgscat::io::{canonicalize, emit_metric_spec, parse_metric_json};

fn phgscat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phgscat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(format!("{name}.json"))
        .display()
        .to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn expand_writes_both_reports() {
    let prefix = scratch("expand-flat-n2");
    let out = phgscat(&[
        "expand",
        "--metric",
        &corpus("flat-n2"),
        "--truncation",
        "4",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(prefix.with_extension("json")).unwrap()).unwrap();
    assert_eq!(json["command"], "expand");
    assert_eq!(json["passed"], true);
    assert!(std::fs::read_to_string(prefix.with_extension("txt"))
        .unwrap()
        .starts_with("expand flat-n2"));
}

#[test]
fn text_report_goes_to_stdout_without_out() {
    let out = phgscat(&[
        "expand",
        "--metric",
        &corpus("flat-n1"),
        "--zeta",
        "0.75,1.25,3",
        "--truncation",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("5/4"), "{text}");
}

#[test]
fn usage_errors_exit_with_two() {
    let cases: Vec<Vec<String>> = vec![
        vec!["expand".into()],
        vec!["bogus".into()],
        vec![
            "expand".into(),
            "--metric".into(),
            corpus("flat-n2"),
            "--zeta".into(),
            "1,2".into(),
        ],
        vec![
            "expand".into(),
            "--metric".into(),
            corpus("flat-n2"),
            "--source".into(),
            "1,0,0=1".into(),
        ],
        vec![
            "mode-scatter".into(),
            "--metric".into(),
            corpus("flat-n2"),
            "--tol".into(),
            "-1".into(),
        ],
        vec!["perturb".into(), "--metric".into(), corpus("flat-n3")],
        vec!["expand".into(), "--metric".into(), "/nonexistent/metric.json".into()],
    ];
    for args in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = phgscat(&refs);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn malformed_metric_reports_the_offending_path() {
    let path = scratch("asymmetric.json");
    std::fs::write(
        &path,
        r#"{"n": 2, "h0": [["1","1/2"],["0","1"]], "corrections": [], "truncation": 4}"#,
    )
    .unwrap();
    let out = phgscat(&["expand", "--metric", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not symmetric"));

    std::fs::write(
        &path,
        r#"{"n": 2, "h0": [["1","0"],["0","x"]], "corrections": [], "truncation": 4}"#,
    )
    .unwrap();
    let out = phgscat(&["expand", "--metric", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("$.h0[1][1]"));

    std::fs::write(
        &path,
        r#"{"n": 2, "h0": [["1","2"],["2","1"]], "corrections": [], "truncation": 4}"#,
    )
    .unwrap();
    assert_eq!(
        phgscat(&["expand", "--metric", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn help_exits_cleanly() {
    let out = phgscat(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("check-all"));
}

/// A real symmetric tensor: every entry is a + b cos(ξ·y).
fn tensor(n: usize, entries: &[(i64, i64)], xi: &[i64]) -> BoundaryTensor<GaussianRational> {
    let mut k = 0;
    let mut rows = vec![vec![BoundaryFunction::zero(n); n]; n];
    for i in 0..n {
        for j in i..n {
            let (a, b) = entries[k % entries.len()];
            k += 1;
            let neg: Vec<i64> = xi.iter().map(|v| -v).collect();
            let f = BoundaryFunction::from_terms(n, [(vec![0; n], gr(a, 3)), (xi.to_vec(), gr(b, 2)), (neg, gr(b, 2))]);
            rows[i][j] = f.clone();
            rows[j][i] = f;
        }
    }
    BoundaryTensor::new(rows).unwrap()
}

fn metric() -> impl Strategy<Value = MetricExpansion> {
    (
        1usize..=3,
        prop::collection::vec((-3i64..=3, -3i64..=3), 1..7),
        prop::collection::vec((1usize..=4, 0usize..=2), 0..3),
        -2i64..=2,
    )
        .prop_map(|(n, entries, shape, f)| {
            let h0: Vec<Vec<_>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { rat(2 + i as i64, 1) } else { rat(1, 4) })
                        .collect()
                })
                .collect();
            let mut xi = vec![0; n];
            xi[0] = f;
            let corrections = shape
                .into_iter()
                .map(|(j, l)| Correction {
                    j,
                    l,
                    tensor: tensor(n, &entries, &xi),
                })
                .collect();
            MetricExpansion::new(h0, corrections, 6).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_spec_round_trips(g in metric()) {
        let text = emit_metric_spec("sample", &g);
        let back = parse_metric_json(&text).unwrap();
        prop_assert_eq!(&back.name, "sample");
        prop_assert_eq!(&back.metric, &g);
        let canon = canonicalize(&text).unwrap();
        prop_assert_eq!(canonicalize(&canon).unwrap(), canon.clone());
        prop_assert_eq!(canon, text);
    }
}
