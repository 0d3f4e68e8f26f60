use std::path::Path;
use std::process::Command;

use rootcover::bench;
use tempfile::tempdir;

fn rootcover(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_rootcover")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn solve_to(path: &Path, extra: &[&str]) -> Vec<u8> {
    let mut args = vec!["solve", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let (code, _, err) = rootcover(&args);
    assert_eq!(code, 0, "{err}");
    std::fs::read(path).unwrap()
}

#[test]
fn expression_and_registry_paths_agree() {
    let dir = tempdir().unwrap();
    let a = solve_to(
        &dir.path().join("expr.csv"),
        &["--expr", "x1^2+x2^2-0.5", "--dim", "2", "--domain", "-1,1;-1,1", "--tol", "0.01", "--N", "10", "--seed", "1"],
    );
    let b = solve_to(&dir.path().join("bench.csv"), &["--bench", "ex1", "--N", "10", "--seed", "1"]);
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 11);
}

#[test]
fn same_flags_give_identical_files() {
    let dir = tempdir().unwrap();
    for format in ["csv", "json"] {
        let first = solve_to(&dir.path().join("a"), &["--bench", "ex4", "--N", "50", "--seed", "9", "--format", format]);
        let second = solve_to(&dir.path().join("b"), &["--bench", "ex4", "--N", "50", "--seed", "9", "--format", format]);
        if format == "csv" {
            assert_eq!(first, second);
            let threaded = solve_to(
                &dir.path().join("c"),
                &["--bench", "ex4", "--N", "50", "--seed", "9", "--threads", "4"],
            );
            assert_eq!(first, threaded);
        } else {
            let strip = |bytes: &[u8]| {
                let mut v: serde_json::Value = serde_json::from_slice(bytes).unwrap();
                v["metadata"].as_object_mut().unwrap().remove("time_seconds");
                v
            };
            assert_eq!(strip(&first), strip(&second));
        }
    }
}

/// Re-evaluates every exported point with the registry fields.
#[test]
fn exported_residuals_match_reevaluation() {
    let dir = tempdir().unwrap();
    for case in bench::registry() {
        let path = dir.path().join(format!("{}.json", case.name));
        let bytes = solve_to(&path, &["--bench", &case.name, "--N", "20", "--seed", "2", "--format", "json"]);
        let doc: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        let scales: Vec<f64> = doc["metadata"]["field_scales"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        let sols = doc["solutions"].as_array().unwrap();
        assert_eq!(sols.len(), 20, "{}", case.name);
        for s in sols {
            let x: Vec<f64> = s["point"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
            let mut agg: f64 = 0.0;
            for (j, field) in case.problem.fields().iter().enumerate() {
                let r = (field.value(&x) / scales[j]).abs();
                let exported = s["residuals"][j].as_f64().unwrap();
                assert!((r - exported).abs() <= 1e-12, "{}: {r} vs {exported}", case.name);
                agg = agg.max(r);
            }
            assert!((agg - s["agg"].as_f64().unwrap()).abs() <= 1e-12);
            assert!(agg <= case.config.tol);
        }
    }
}

#[test]
fn csv_export_round_trip() {
    let dir = tempdir().unwrap();
    let case = bench::case("sphere3").unwrap();
    let bytes = solve_to(&dir.path().join("s.csv"), &["--bench", "sphere3", "--N", "30", "--seed", "8"]);
    let text = String::from_utf8(bytes).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x1,x2,x3,res_1,agg,chain_id,steps");
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let x: Vec<f64> = cols[..3].iter().map(|c| c.parse().unwrap()).collect();
        let agg: f64 = cols[4].parse().unwrap();
        let r = case.problem.fields()[0].value(&x).abs();
        assert!((r - agg).abs() <= 1e-12);
        assert!(agg <= 0.1);
    }
}

#[test]
fn multi1_points_satisfy_both_circles() {
    let dir = tempdir().unwrap();
    let bytes = solve_to(&dir.path().join("m.csv"), &["--bench", "multi1", "--N", "10"]);
    let text = String::from_utf8(bytes).unwrap();
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').take(2).map(|c| c.parse().unwrap()).collect();
        let f = v[0] * v[0] + v[1] * v[1] - 0.5;
        let g = (v[0] - 0.2).powi(2) + (v[1] + 0.2).powi(2) - 0.5;
        assert!(f.abs() <= 0.01 && g.abs() <= 0.01, "{v:?}");
    }
}

#[test]
fn trace_and_genealogy_files() {
    let dir = tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let (code, _, err) = rootcover(&["solve", "--bench", "ex1", "--N", "5", "--trace", trace.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(text.lines().next().unwrap(), "chain_id,step,x1,x2,residual,R");
    assert!(text.lines().count() > 5);

    let tree = dir.path().join("tree.csv");
    let (code, _, err) = rootcover(&[
        "solve", "--bench", "ex1", "--N", "5", "--algo", "enhanced", "--genealogy", tree.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(std::fs::read_to_string(&tree).unwrap().starts_with("id,parent_id,generation,residual\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(rootcover(&["solve", "--bench", "ex1", "--N", "3"]).0, 0);
    assert_eq!(rootcover(&["solve", "--bench", "ex1", "--budget", "40"]).0, 2);
    let (code, _, err) = rootcover(&["solve", "--bench", "nope"]);
    assert_eq!(code, 1);
    assert!(err.contains("nope"));
    let (code, _, err) = rootcover(&["solve", "--bench", "ex1", "--k=-1"]);
    assert_eq!(code, 1);
    assert!(err.contains('k'), "{err}");
    assert_eq!(rootcover(&["solve", "--expr", "x1+", "--dim", "1", "--domain", "0,1"]).0, 1);
    assert_eq!(rootcover(&["bench", "--suite", "nope"]).0, 1);
}

#[test]
fn bench_suite_prints_seed_and_median_rows() {
    let (code, out, err) = rootcover(&["bench", "--suite", "multi", "--seeds", "0,1,2"]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    // header, then 3 seeds + median per case
    assert_eq!(lines.len(), 1 + 3 * 4);
    assert!(lines[0].starts_with("case\tseed\tn\ttol\tN\tC\tk\tp\tTime\tEC\tfill"));
    assert!(lines[4].starts_with("multi1\tmedian\t20\t0.01\t10\t"));
}

#[test]
fn sweep_single_value_matches_solve() {
    let (_, solve_out, _) = rootcover(&["solve", "--bench", "ex2", "--N", "30", "--seed", "6"]);
    let (code, sweep_out, _) = rootcover(&["sweep", "--bench", "ex2", "--N", "30", "--param", "seed", "--values", "6"]);
    assert_eq!(code, 0);
    let without_time = |line: &str| {
        let mut cols: Vec<String> = line.split('\t').map(String::from).collect();
        cols.remove(6);
        cols
    };
    let solve_row = solve_out.lines().nth(1).unwrap();
    let sweep_row = sweep_out.lines().nth(1).unwrap().splitn(3, '\t').nth(2).unwrap();
    assert_eq!(without_time(solve_row), without_time(sweep_row));
}
