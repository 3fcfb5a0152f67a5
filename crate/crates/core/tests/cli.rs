use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn extham(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_extham"));
    cmd.args(args).env_remove("EXTHAM_SEED");
    if let Some(s) = env_seed {
        cmd.env("EXTHAM_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const TTW_DEF: &str = "\
# angular TTW seed
[chart]
phi, pphi, periodic
[metric]
1
[potential]
(c1 + c2*cos(phi))/sin(phi)^2
[G]
sin(phi)*pphi
[constants]
c = 1
c0 = 0
c1 = 3/5
c2 = 1/5
";

fn write_def(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn catalog_list_names_every_entry() {
    let o = extham(&["catalog-list"], None);
    assert_eq!(code(&o), 0);
    let names = String::from_utf8(o.stdout).unwrap();
    for n in ["ttw", "pw", "kepler", "jacobi-calogero", "aniso"] {
        assert!(names.lines().any(|l| l == n), "{n}");
    }
}

#[test]
fn extend_writes_h_k_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ttw32");
    let o = extham(&["extend", "--catalog", "ttw", "--m", "3", "--n", "2", "--out", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["route"], "recursive-k");
    assert_eq!(meta["momentum_degree"], 6);
    assert!(fs::read_to_string(out.join("K.txt")).unwrap().contains("pphi"));

    let o = extham(&["extend", "--catalog", "ttw", "--m", "3", "--n", "2", "--omega", "1", "--out", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 0);
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["route"], "recursive-kbar");
}

#[test]
fn definition_file_matches_catalog_seed() {
    let dir = tempfile::tempdir().unwrap();
    let def = write_def(dir.path(), "ttw.def", TTW_DEF);
    let out = dir.path().join("o");
    let o = extham(&["extend", "--def", &def, "--m", "1", "--n", "2", "--out", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn usage_and_parse_errors_exit_one() {
    assert_eq!(code(&extham(&["extend"], None)), 1);
    assert_eq!(code(&extham(&["frobnicate"], None)), 1);
    assert_eq!(code(&extham(&["extend", "--catalog", "nope"], None)), 1);
    let dir = tempfile::tempdir().unwrap();
    let def = write_def(dir.path(), "broken.def", &TTW_DEF.replace("sin(phi)*pphi", "sin(phi)*"));
    let o = extham(&["extend", "--def", &def], None);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 9"));
    assert_eq!(code(&extham(&["verify", "--catalog", "ttw"], Some("not-a-seed"))), 1);
}

#[test]
fn invalid_seed_exits_two_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let def = write_def(dir.path(), "bad.def", &TTW_DEF.replace("sin(phi)*pphi", "cos(phi)*pphi"));
    let o = extham(&["extend", "--def", &def, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(code(&o), 2);
    let rep: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(rep["checks"][0]["name"], "extension-condition");
    assert!(rep["checks"][0]["witness"].is_object());
}

#[test]
fn corrupted_integral_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("K.txt");
    fs::write(&k, "pphi*pu^3 + sin(phi)*u").unwrap();
    let report = dir.path().join("r.json");
    let o = extham(
        &["verify", "--catalog", "ttw", "--m", "3", "--n", "2", "--integral", k.to_str().unwrap(), "--out", report.to_str().unwrap()],
        None,
    );
    assert_eq!(code(&o), 3);
    let rep: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let hk = rep["checks"].as_array().unwrap().iter().find(|c| c["name"] == "bracket:H,K").unwrap();
    assert_eq!(hk["passed"], false);
    assert!(hk["witness"].is_object());
}

#[test]
fn verify_sweep_passes_and_is_deterministic() {
    let args = ["verify", "--catalog", "ttw", "--sweep-k", "1/2,1,3/2", "--t-end", "5"];
    let a = extham(&args, Some("0x5EED"));
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let b = extham(&args, Some("0x5EED"));
    assert_eq!(a.stdout, b.stdout);
    let rep: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(rep["sub_reports"].as_array().unwrap().len(), 3);
    let c = extham(&args, Some("7"));
    assert_eq!(rep["seed"], 0x5EED);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn orbit_emits_csv_and_flags_closure() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("o.csv");
    let rep = dir.path().join("o.json");
    let o = extham(
        &["orbit", "--catalog", "ttw", "--m", "2", "--n", "1", "--omega", "1", "--t-end", "10",
          "--out", csv.to_str().unwrap(), "--report", rep.to_str().unwrap()],
        None,
    );
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,phi,u,pphi,pu,H"));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(summary["closure"]["closed"], true);
}

#[test]
fn quantum_unsupported_and_invalid() {
    assert_eq!(code(&extham(&["quantum", "--catalog", "sphere", "--omega", "1"], None)), 4);
    assert_eq!(code(&extham(&["quantum", "--catalog", "circle", "--omega", "0"], None)), 1);
}

#[test]
fn quantum_report_on_small_grids() {
    let o = extham(&["quantum", "--catalog", "circle", "--omega", "9/8", "--pairs", "1", "--grids", "64,128"], None);
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let pair = &rep["sub_reports"][0];
    let ratio = pair["checks"].as_array().unwrap().iter().find(|c| c["name"] == "refinement:64→128").unwrap();
    assert!((3.5..4.5).contains(&ratio["value"].as_f64().unwrap()));
    assert_eq!(code(&o), 0, "{}", rep);
}
