use std::path::PathBuf;

use assert_cmd::Command;
use tempfile::TempDir;

fn cdpp() -> Command {
    Command::cargo_bin("cdpp").unwrap()
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn csv_rows(out: &[u8]) -> Vec<Vec<String>> {
    let text = String::from_utf8(out.to_vec()).unwrap();
    let (first, rest) = text.split_once('\n').unwrap();
    assert!(first.starts_with("# cdpp ") && first.ends_with(" v1"), "{first}");
    let mut r = csv::Reader::from_reader(rest.as_bytes());
    r.records().map(|x| x.unwrap().iter().map(str::to_owned).collect()).collect()
}

#[test]
fn eval_grid_is_symmetric_and_repeatable() {
    let out = cdpp().arg("eval").arg(config("eval-bessel.json")).assert().success().get_output().stdout.clone();
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 9);
    let get = |x: &str, y: &str| rows.iter().find(|r| r[0] == x && r[1] == y).unwrap()[2].clone();
    assert_eq!(get("-1e0", "1e0"), get("1e0", "-1e0"));
    assert!(String::from_utf8_lossy(&out).contains("\r\n"));

    let again = cdpp().arg("eval").arg(config("eval-bessel.json")).assert().success().get_output().stdout.clone();
    assert_eq!(out, again);
}

#[test]
fn eval_writes_to_out_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("k.csv");
    cdpp().arg("--out").arg(&out).arg("eval").arg(config("eval-deformed-bessel.json")).assert().success();
    assert_eq!(csv_rows(&std::fs::read(&out).unwrap()).len(), 25);
}

#[test]
fn eval_ndjson() {
    let out = cdpp()
        .args(["--format", "ndjson", "eval"])
        .arg(config("eval-bessel.json"))
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let lines: Vec<serde_json::Value> = String::from_utf8(out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 9);
}

#[test]
fn bad_configs_exit_2() {
    let dir = TempDir::new().unwrap();
    let unknown = write(&dir, "a.json", r#"{"kernel":"bessel","alpha":1.0,"bogus":1}"#);
    cdpp().arg("eval").arg(unknown).assert().code(2);
    let missing = write(&dir, "b.json", r#"{"kernel":"bessel","points":[0]}"#);
    cdpp().arg("eval").arg(missing).assert().code(2);
    let bad_param = write(&dir, "c.json", r#"{"kernel":"bessel","alpha":-1.0,"points":[0]}"#);
    cdpp().arg("eval").arg(bad_param).assert().code(2);
    cdpp().arg("eval").arg(dir.path().join("none.json")).assert().code(2);
    cdpp().args(["verify", "--suite", "nonsense"]).assert().code(2);
}

#[test]
fn verify_specfun_passes_and_fuzzing_is_caught() {
    let out = cdpp().args(["verify", "--suite", "specfun"]).assert().success().get_output().stdout.clone();
    for l in String::from_utf8(out).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert_eq!(v["pass"], true);
    }
    cdpp().args(["--fuzz-bits", "20", "verify", "--suite", "specfun"]).assert().code(1);
}

#[test]
fn sample_is_seeded() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "s.json", r#"{"kernel":"charlier","a":2.0,"n":3,"u":[1.5],"samples":50,"truncation":40}"#);
    let run = |seed: &str| cdpp().args(["--seed", seed, "sample"]).arg(&cfg).assert().success().get_output().stdout.clone();
    let a = run("5");
    assert_eq!(a, run("5"));
    assert_ne!(a, run("6"));
    for l in String::from_utf8(a).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert_eq!(v["points"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn sample_histogram() {
    let dir = TempDir::new().unwrap();
    let hist = dir.path().join("h.csv");
    let body = format!(
        r#"{{"kernel":"meixner","beta":1.5,"xi":0.3,"n":2,"samples":2000,"truncation":30,"seed":1,"hist":{:?}}}"#,
        hist.to_str().unwrap()
    );
    let cfg = write(&dir, "s.json", &body);
    cdpp().arg("sample").arg(&cfg).assert().success();
    let rows = csv_rows(&std::fs::read(&hist).unwrap());
    assert_eq!(rows.len(), 31);
    let total: usize = rows.iter().map(|r| r[1].parse::<usize>().unwrap()).sum();
    assert_eq!(total, 4000);
}

#[test]
fn oracle_compare_within_bounds() {
    for c in ["oracle-plancherel.json", "oracle-ope.json", "oracle-zmeasure.json"] {
        let out = cdpp().arg("oracle-compare").arg(config(c)).assert().success().get_output().stdout.clone();
        for r in csv_rows(&out) {
            let d: f64 = r[3].parse().unwrap();
            let b: f64 = r[4].parse().unwrap();
            assert!(d <= b, "{c}: {r:?}");
        }
    }
}

#[test]
fn converge_thm1_ratios_near_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "t.json", r#"{"alpha":1.0,"u":[0.3],"n_list":[20,40,80],"pairs":[[0,0],[1,3]]}"#);
    let out = cdpp().args(["--bits", "192", "converge-thm1"]).arg(&cfg).assert().success().get_output().stdout.clone();
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 6);
    for r in rows.iter().filter(|r| !r[6].is_empty()) {
        let q: f64 = r[6].parse().unwrap();
        assert!((1.5..2.5).contains(&q), "{r:?}");
    }
}
