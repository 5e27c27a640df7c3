use serde::Deserialize;
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn sdroots(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdroots")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[derive(Debug, Clone, PartialEq, Deserialize, serde::Serialize)]
struct Row {
    re: f64,
    im: f64,
    case: u8,
    origin_kind: String,
    j: usize,
    eigenvalue: f64,
    side: String,
    solution_form: String,
    jordan: bool,
    conformal_killing: bool,
    multiplicity: usize,
}

fn key(r: &Row) -> String {
    serde_json::to_string(r).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn sphere_low_roots() {
    let v = json(&sdroots(&["roots", "--sphere", "--jmax", "4"]));
    assert_eq!(v["schema"], 1);
    let mut low: Vec<f64> = v["roots"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["re"].as_f64().unwrap().abs() < 2.0)
        .map(|r| r["re"].as_f64().unwrap())
        .collect();
    low.sort_by(f64::total_cmp);
    low.dedup();
    assert_eq!(low, vec![-1.0, 0.0, 1.0]);
}

#[test]
fn torus_zero_dimensions() {
    let v = json(&sdroots(&["roots", "--torus", "2pi,2pi,2pi", "--jmax", "2"]));
    assert_eq!(v["kernel_dim_at_zero"], 14);
    assert_eq!(v["cokernel_dim_at_zero"], 14);
    assert!(v["roots"].as_array().unwrap().iter().any(|r| r["re"] == 0.0 && r["im"] == 0.0));
}

#[test]
fn window_filters_real_parts() {
    let v = json(&sdroots(&["roots", "--sphere", "--jmax", "6", "--window", "-2.5,0.5"]));
    let roots = v["roots"].as_array().unwrap();
    assert!(!roots.is_empty());
    for r in roots {
        let re = r["re"].as_f64().unwrap();
        assert!((-2.5..=0.5).contains(&re), "{re}");
    }
    assert_eq!(v["window"], serde_json::json!([-2.5, 0.5]));
}

#[test]
fn csv_and_json_carry_the_same_records() {
    for args in [vec!["roots", "--sphere", "--jmax", "5"], vec!["roots", "--torus", "1,1.7,2.3", "--jmax", "2"]] {
        let v = json(&sdroots(&args));
        let mut from_json: Vec<Row> = serde_json::from_value(v["roots"].clone()).unwrap();
        let mut csv_args = args.clone();
        csv_args.extend(["--format", "csv"]);
        let o = sdroots(&csv_args);
        assert_eq!(code(&o), 0);
        let mut from_csv: Vec<Row> = csv::Reader::from_reader(&o.stdout[..]).deserialize().collect::<Result<_, _>>().unwrap();
        from_json.sort_by_key(key);
        from_csv.sort_by_key(key);
        assert_eq!(from_json, from_csv);
    }
}

#[test]
fn records_round_trip_through_json() {
    let v = json(&sdroots(&["roots", "--sphere", "--lens", "3,1,1", "--jmax", "4"]));
    let rows: Vec<Row> = serde_json::from_value(v["roots"].clone()).unwrap();
    let again = serde_json::to_value(&rows).unwrap();
    assert_eq!(again, v["roots"]);
}

#[test]
fn identical_flags_give_identical_bytes() {
    for args in [
        vec!["roots", "--torus", "2pi,3,1.5", "--jmax", "3"],
        vec!["verify", "identities", "--N", "8", "--seed", "11"],
        vec!["lens", "--lens", "5,1,2", "--jmax", "6"],
    ] {
        let a = sdroots(&args);
        let b = sdroots(&args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn gap_on_spherical_cross_sections() {
    for args in [vec!["gap", "--sphere"], vec!["gap", "--sphere", "--lens", "2,1,1"], vec!["gap", "--sphere", "--lens", "5,1,2"]] {
        let v = json(&sdroots(&args));
        assert_eq!(v["window"], serde_json::json!([0.0, 2.0]), "{args:?}");
    }
    let v = json(&sdroots(&["gap", "--torus", "1,1,1"]));
    assert!(v["window"].is_null());
}

#[test]
fn ks_predicate() {
    let dir = tempfile::tempdir().unwrap();
    let with = write(dir.path(), "with.txt", "b1 1\ncodazzi 2\nscalar 0 0 1\noneform 0 0 1\ntt 0 3 2 # Codazzi\ntt 1 8 4\n");
    let without = write(dir.path(), "without.txt", "b1 0\ncodazzi 0\nscalar 0 0 1\nscalar 1 4.5 1\ntt 1 8 4\n");
    let v = json(&sdroots(&["ks", "--hyperbolic", &with]));
    assert_eq!(v["h2plus_vanishes"], false);
    assert_eq!(v["cokernel_dim_at_zero"], 1 + 1 + 2 * 2);
    assert_eq!(v["catalog_cokernel_dim_at_zero"], 6);
    assert!(v["summary"].as_str().unwrap().starts_with("H2+ nonzero"));
    let v = json(&sdroots(&["ks", "--hyperbolic", &without]));
    assert_eq!(v["h2plus_vanishes"], true);
    assert_eq!(v["summary"], "H2+ = 0");
    assert_eq!(v["cokernel_dim_at_zero"], 1);
}

#[test]
fn hyperbolic_roots_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.txt", "b1 0\ncodazzi 0\nscalar 0 0 1\nscalar 1 5 1\ntt 1 7 2\n");
    let v = json(&sdroots(&["roots", "--hyperbolic", &f]));
    assert_eq!(v["kappa"], -1);
    assert!(v["complete_below"].is_null());
    assert!(v["roots"].as_array().unwrap().iter().any(|r| r["origin_kind"] == "tt"));
}

#[test]
fn lens_table() {
    let v = json(&sdroots(&["lens", "--lens", "2,1,1", "--jmax", "6"]));
    for row in v["multiplicities"].as_array().unwrap() {
        let j = row["j"].as_u64().unwrap();
        let want = if j % 2 == 1 { 0 } else { (j + 1) * (j + 1) };
        assert_eq!(row["multiplicity"].as_u64().unwrap(), want);
    }
}

#[test]
fn verify_suites_pass() {
    let v = json(&sdroots(&["verify", "identities", "--N", "8", "--seed", "7"]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["results"].as_array().unwrap().len(), 11);
    let v = json(&sdroots(&["verify", "oracle", "--jmax", "10"]));
    assert_eq!(v["pass"], true);
    let v = json(&sdroots(&["verify", "linearization", "--N", "8", "--eps", "1e-4"]));
    assert_eq!(v["pass"], true);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let p = path.display().to_string();
    let o = sdroots(&["roots", "--sphere", "--jmax", "3", "--format", "csv", "--out", &p]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let s = sdroots(&["roots", "--sphere", "--jmax", "3", "--format", "csv"]);
    assert_eq!(std::fs::read(&path).unwrap(), s.stdout);
}

#[test]
fn exit_codes() {
    // bad arguments
    assert_eq!(code(&sdroots(&["roots"])), 2);
    assert_eq!(code(&sdroots(&["roots", "--sphere", "--torus", "1,1,1"])), 2);
    assert_eq!(code(&sdroots(&["roots", "--torus", "1,0,1"])), 2);
    assert_eq!(code(&sdroots(&["roots", "--sphere", "--lens", "4,2,1"])), 2);
    assert_eq!(code(&sdroots(&["verify", "identities", "--N", "6"])), 2);
    assert_eq!(code(&sdroots(&["verify", "linearization", "--eps", "0.1"])), 2);
    assert_eq!(code(&sdroots(&["frobnicate"])), 2);
    // file errors
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.txt").display().to_string();
    assert_eq!(code(&sdroots(&["ks", "--hyperbolic", &missing])), 3);
    let bad = write(dir.path(), "bad.txt", "tt 0 2.5 1\n");
    assert_eq!(code(&sdroots(&["roots", "--hyperbolic", &bad])), 3);
    let garbled = write(dir.path(), "garbled.txt", "scalar zero\n");
    let o = sdroots(&["ks", "--hyperbolic", &garbled]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    // verification failure: at N = 2 every sampled mode sits on the dropped Nyquist frequency
    let o = sdroots(&["verify", "linearization", "--N", "2"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL linearization h00"));
    assert_eq!(code(&sdroots(&["--help"])), 0);
}
