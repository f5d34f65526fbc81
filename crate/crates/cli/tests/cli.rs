use std::path::Path;
use std::process::{Command, Output};

use grdpg_cli::commands::parse_mat2;
use grdpg_cli::output::{hash_value, sidecar_path};
use serde_json::Value;
use tempfile::TempDir;

fn grdpg(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_grdpg"));
    cmd.args(args).env_remove("GRDPG_SEED");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = grdpg(args, &[]);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_file(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn path<'a>(dir: &'a TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

/// Hash reported on the banner line of a run.
fn banner_hash(o: &Output) -> String {
    let err = stderr(o);
    let line = err.lines().find(|l| l.starts_with("grdpg ")).expect("banner");
    line.split("config_hash=").nth(1).unwrap().trim().to_string()
}

#[test]
fn hadamard_prints_matrix() {
    let out = ok(&["hadamard", "--k", "2"]);
    assert_eq!(stdout(&out), "1,1,1,1\n1,-1,1,-1\n1,1,-1,-1\n1,-1,-1,1\n");
    let err = stderr(&out);
    assert!(err.starts_with(&format!("grdpg {} seed=0 config_hash=", env!("CARGO_PKG_VERSION"))), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    for args in [vec!["bogus"], vec!["hadamard"], vec!["hadamard", "--k", "2", "--nope"], vec![]] {
        let out = grdpg(&args, &[]);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(stderr(&out).contains("Usage"), "{args:?}: {}", stderr(&out));
    }
    assert_eq!(grdpg(&["--help"], &[]).status.code(), Some(0));
    assert_eq!(grdpg(&["hadamard", "--k", "40"], &[]).status.code(), Some(1));
}

#[test]
fn seed_falls_back_to_environment() {
    let from_env = grdpg(&["hadamard", "--k", "1"], &[("GRDPG_SEED", "77")]);
    assert!(stderr(&from_env).contains("seed=77"));
    let flag = grdpg(&["hadamard", "--k", "1", "--seed", "5"], &[("GRDPG_SEED", "77")]);
    assert!(stderr(&flag).contains("seed=5"));
    let bad = grdpg(&["hadamard", "--k", "1"], &[("GRDPG_SEED", "x")]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn sample_embed_align_pipeline() {
    let dir = TempDir::new().unwrap();
    let (a, x, e) = (path(&dir, "a.csv"), path(&dir, "x.csv"), path(&dir, "edges.txt"));
    let s = ok(&["sample", "--n", "240", "--rho", "0.5", "--out", &a, "--truth", &x, "--edges", &e, "--seed", "3"]);
    let hash = banner_hash(&s);
    let summary: Value = serde_json::from_str(&stdout(&s)).unwrap();
    assert_eq!(summary["config_hash"], hash.as_str());
    assert_eq!(summary["n"], 240);
    for f in [&a, &x, &e] {
        let text = std::fs::read_to_string(f).unwrap();
        assert_eq!(text.lines().next().unwrap(), format!("# config_hash={hash} seed=3"));
    }
    let edges = std::fs::read_to_string(&e).unwrap().lines().count() - 1;
    assert_eq!(summary["edges"].as_u64().unwrap() as usize, edges);

    let emb = path(&dir, "emb");
    ok(&["embed", "--in", &a, "--p", "2", "--q", "1", "--out-dir", &emb]);
    let meta = json_file(&dir.path().join("emb/embed.json"));
    assert_eq!(meta["eigenvalues"].as_array().unwrap().len(), 3);
    assert!(meta["eigenvalues"][2].as_f64().unwrap() < 0.0);

    let latent = path(&dir, "emb/latent.csv");
    let al = ok(&["align", "--xhat", &latent, "--x", &x, "--p", "2", "--q", "1"]);
    let body: Value = serde_json::from_str(&stdout(&al)).unwrap();
    let tti = body["two_to_infinity"].as_f64().unwrap();
    assert!(tti > 0.0 && tti < 1.0, "{tti}");
    assert!(body["frobenius"].as_f64().unwrap() >= tti);
    assert_eq!(body["w_p"].as_array().unwrap().len(), 2);

    // Aligning the truth with itself is exact.
    let same = ok(&["align", "--xhat", &x, "--x", &x, "--p", "2", "--q", "1"]);
    let body: Value = serde_json::from_str(&stdout(&same)).unwrap();
    assert!(body["frobenius"].as_f64().unwrap() < 1e-12);
}

#[test]
fn sampling_is_reproducible_and_thread_independent() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, threads: &str, trial: &str| {
        let p = path(&dir, name);
        ok(&["sample", "--n", "200", "--out", &p, "--threads", threads, "--trial", trial]);
        std::fs::read(p).unwrap()
    };
    let a = run("a.csv", "1", "0");
    assert_eq!(a, run("b.csv", "4", "0"));
    assert_ne!(a, run("c.csv", "1", "1"));
}

#[test]
fn binary_matrices_get_a_provenance_sidecar() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "h.bin");
    let run = ok(&["hadamard", "--k", "3", "--out", &out]);
    let m = matrixkit::io::read_matrix(Path::new(&out)).unwrap();
    assert_eq!(m.shape(), (8, 8));
    let side = json_file(&sidecar_path(Path::new(&out)));
    assert_eq!(side["config_hash"], banner_hash(&run).as_str());
    assert_eq!(side["rows"], 8);
}

#[test]
fn sample_from_latent_file_and_bad_inputs() {
    let dir = TempDir::new().unwrap();
    let x = path(&dir, "x.csv");
    std::fs::write(&x, "0.5,0.1\n0.4,0.2\n0.6,0.0\n0.3,0.3\n").unwrap();
    let a = path(&dir, "a.csv");
    ok(&["sample", "--latent", &x, "--p", "2", "--q", "0", "--rho", "1", "--out", &a]);
    let m = matrixkit::io::read_matrix(Path::new(&a)).unwrap();
    assert_eq!(m.shape(), (4, 4));
    // Wrong column count, missing file, malformed matrix.
    assert_eq!(grdpg(&["sample", "--latent", &x, "--p", "2", "--q", "1", "--out", &a], &[]).status.code(), Some(1));
    assert_eq!(grdpg(&["embed", "--in", &path(&dir, "none.csv"), "--p", "1", "--q", "0", "--out-dir", &path(&dir, "e")], &[]).status.code(), Some(1));
    let bad = path(&dir, "bad.csv");
    std::fs::write(&bad, "0,1\n1,x\n").unwrap();
    let out = grdpg(&["embed", "--in", &bad, "--p", "1", "--q", "0", "--out-dir", &path(&dir, "e")], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn pack_build_and_verify() {
    let dir = TempDir::new().unwrap();
    let report = path(&dir, "report.json");
    let v = ok(&["pack", "verify", "--regime", "constant", "--n", "256", "--kappa", "9", "--out", &report]);
    let r = json_file(Path::new(&report));
    assert_eq!(r["pass"], true);
    assert_eq!(r["config_hash"], banner_hash(&v).as_str());
    assert_eq!(r["checks"].as_array().unwrap().len(), 6);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| !c["entries"].as_array().unwrap().is_empty()));

    // Config file plus flag override.
    let cfg = path(&dir, "params.json");
    std::fs::write(&cfg, serde_json::to_string(&r["params"]).unwrap()).unwrap();
    let summary = path(&dir, "family.json");
    ok(&["pack", "build", "--config", &cfg, "--out", &summary, "--frames-dir", &path(&dir, "frames")]);
    let s = json_file(Path::new(&summary));
    assert_eq!(s["params"], r["params"]);
    let members = s["member_count"].as_u64().unwrap() as usize;
    assert!(members > 0);
    assert!(dir.path().join(format!("frames/member_{members:04}.csv")).exists());
    ok(&["pack", "build", "--config", &cfg, "--kappa", "12", "--out", &summary]);
    assert_eq!(json_file(Path::new(&summary))["params"]["kappa"], 12.0);

    // Outside the construction's regime: validation error.
    let small = grdpg(&["pack", "build", "--regime", "growing", "--n", "12"], &[]);
    assert_eq!(small.status.code(), Some(1), "{}", stderr(&small));
    let kappa = grdpg(&["pack", "verify", "--kappa", "2"], &[]);
    assert_eq!(kappa.status.code(), Some(1));
}

#[test]
fn experiment_run_and_rates() {
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "cfg.json");
    std::fs::write(
        &cfg,
        r#"{"n_grid":[150,200,300],"p":2,"q":1,"trials":3,"seed":11,
            "regime":{"fixed_kappa":{"kappa":6.0,"rho_specs":[{"coef":0.5,"exponent":0.0}]}}}"#,
    )
    .unwrap();
    let run = |name: &str, threads: &str, extra: &[&str]| {
        let out = path(&dir, name);
        let mut args = vec!["experiment", "run", "--config", &cfg, "--out", &out, "--threads", threads];
        args.extend_from_slice(extra);
        let o = ok(&args);
        (std::fs::read_to_string(&out).unwrap(), banner_hash(&o))
    };
    let (one, hash) = run("r1.csv", "1", &[]);
    let (four, _) = run("r4.csv", "4", &[]);
    assert_eq!(one, four);
    assert!(one.starts_with(&format!("# config_hash={hash} seed=11\n")));
    assert_eq!(one.lines().count(), 2 + 3);
    // Seed flag overrides the file and changes the hash.
    let (other, other_hash) = run("r5.csv", "1", &["--seed", "12"]);
    assert_ne!(other, one);
    assert_ne!(other_hash, hash);
    // JSON output.
    let (json, _) = run("r.json", "1", &[]);
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["provenance"]["config_hash"], hash.as_str());

    let rates = path(&dir, "rates.json");
    ok(&["experiment", "rates", "--in", &path(&dir, "r1.csv"), "--out", &rates]);
    let r = json_file(Path::new(&rates));
    assert_eq!(r["config_hash"], hash.as_str());
    assert_eq!(r["rates"].as_array().unwrap().len(), 1);
    assert!(r["rates"][0]["latent"]["slope"].as_f64().unwrap() < 0.0);
    ok(&["experiment", "rates", "--in", &path(&dir, "r.json"), "--out", &rates]);
}

#[test]
fn experiment_errors() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.csv");
    std::fs::write(
        &bad,
        "# config_hash=0 seed=0\nn,rho,kappa,mean_latent,mean_subspace,stderr_latent,stderr_subspace,setting,trials,failures\n\
         100,0.5,6,0.1,0.01,0,0,a,3,0\n200,0.5,6,oops,0.01,0,0,a,3,0\n",
    )
    .unwrap();
    let out = grdpg(&["experiment", "rates", "--in", &bad], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));
    // Too few points to fit: runtime error.
    let short = path(&dir, "short.csv");
    std::fs::write(
        &short,
        "n,rho,kappa,mean_latent,mean_subspace,stderr_latent,stderr_subspace,setting,trials,failures\n100,0.5,6,0.1,0.01,0,0,a,3,0\n",
    )
    .unwrap();
    assert_eq!(grdpg(&["experiment", "rates", "--in", &short], &[]).status.code(), Some(2));
    assert_eq!(grdpg(&["experiment", "rates", "--in", &path(&dir, "missing.csv")], &[]).status.code(), Some(1));
    let cfg = path(&dir, "cfg.json");
    std::fs::write(&cfg, r#"{"n_grid":[200,100],"p":2,"q":1,"trials":3,"seed":1,"regime":{"fixed_rho":{"rho":0.9,"kappa_specs":[]}}}"#).unwrap();
    assert_eq!(grdpg(&["experiment", "run", "--config", &cfg], &[]).status.code(), Some(1));
    std::fs::write(&cfg, "{ not json").unwrap();
    assert_eq!(grdpg(&["experiment", "run", "--config", &cfg], &[]).status.code(), Some(1));
    assert_eq!(grdpg(&["experiment", "run"], &[]).status.code(), Some(1));
}

#[test]
fn experiment_config_matches_preset_hash() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "anchor.json");
    let o = ok(&["experiment", "config", "--preset", "anchor", "--out", &out]);
    let cfg: mcharness::ExperimentConfig = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(cfg.config_hash(), banner_hash(&o));
    assert_eq!(cfg, mcharness::ExperimentConfig::desk_anchor(0));
}

#[test]
fn counterexample_commands() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "ce.json");
    ok(&["counterexample", "run", "--resolution", "300", "--out", &out]);
    let r = json_file(Path::new(&out));
    assert_eq!(r["triangle_violated"], true);
    for (k, v) in [("fXY", 2.7324), ("fXZ", 1.2291), ("fYZ", 7.8288)] {
        assert!((r[k].as_f64().unwrap() - v).abs() < 0.02, "{k}");
    }
    let contour = path(&dir, "contour");
    let o = ok(&["counterexample", "contour", "--resolution", "5", "--out-dir", &contour]);
    let hash = banner_hash(&o);
    let manifest = json_file(&dir.path().join("contour/contour.json"));
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 6);
    for f in files {
        let text = std::fs::read_to_string(dir.path().join("contour").join(f["file"].as_str().unwrap())).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("# config_hash={hash} seed=0"));
        assert_eq!(lines.next().unwrap(), "alpha1,alpha2,g");
        assert_eq!(lines.count(), 25);
    }
    let bad = grdpg(&["counterexample", "run", "--x", "1,2;3"], &[]);
    assert_eq!(bad.status.code(), Some(1));
    let coincident = grdpg(&["counterexample", "run", "--resolution", "20", "--y", "3.8,2.4;8,-7.6"], &[]);
    assert_eq!(coincident.status.code(), Some(1), "{}", stderr(&coincident));
}

#[test]
fn helpers() {
    assert_eq!(parse_mat2("1.9, 1.2; 4.0,-3.8").unwrap(), [[1.9, 1.2], [4.0, -3.8]]);
    assert!(parse_mat2("1,2,3;4,5").is_err() && parse_mat2("1,2").is_err() && parse_mat2("a,b;c,d").is_err());
    let a = serde_json::json!({"b": 1, "a": [1.5, 2]});
    let b: Value = serde_json::from_str(r#"{"a":[1.5,2],"b":1}"#).unwrap();
    assert_eq!(hash_value(&a), hash_value(&b));
    assert_eq!(hash_value(&a).len(), 16);
}
