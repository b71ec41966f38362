use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn privwalk(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_privwalk"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_graph(dir: &Path) {
    let mut text = String::new();
    for i in 0..200u32 {
        text.push_str(&format!("{} {}\n", 1000 + i, 1000 + (i + 1) % 200));
        text.push_str(&format!("{} {}\n", 1000 + i, 1000 + (i * 7 + 3) % 200));
    }
    fs::write(dir.join("edges.txt"), text).unwrap();
}

#[test]
fn ingest_label_walk_estimate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_graph(d);
    ok(&privwalk(&["ingest", "edges.txt", "-o", "clean.txt"], d));
    ok(&privwalk(&["labels", "-g", "clean.txt", "-p", "0.2", "--seed", "1", "-o", "labels.txt"], d));
    ok(&privwalk(
        &["walk", "-g", "clean.txt", "--labels", "labels.txt", "-r", "2000", "--mode", "approx_hidden", "-o", "walk.txt"],
        d,
    ));
    let dump = fs::read_to_string(d.join("walk.txt")).unwrap();
    assert_eq!(dump.lines().filter(|l| !l.starts_with('#')).count(), 2000);

    let report = ok(&privwalk(&["estimate", "walk.txt"], d));
    let get = |key: &str| -> f64 {
        report
            .lines()
            .find_map(|l| l.strip_prefix(key).and_then(|v| v.strip_prefix('\t')))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert_eq!(get("m"), 50.0);
    assert!(get("size_proposed") > get("size_nc"));
    assert!(get("avg_degree_proposed") > get("avg_degree_smooth"));
}

#[test]
fn theory_table_has_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    write_graph(dir.path());
    let out = ok(&privwalk(&["theory", "-g", "edges.txt", "--p-grid", "0,0.5,1"], dir.path()));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "p,expected_n_star,alpha_p_n,expected_davg_star,davg,expected_q,expected_q_hat");
    assert_eq!(lines.len(), 4);
}

#[test]
fn experiment_and_census_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"
        dataset = { kind = "preferential_attachment", nodes = 500, edges_per_node = 3, seed = 1 }
        labels = { kind = "bernoulli", p_grid = [0.2] }
        sample_sizes = [300]
        trials = 5
        output_dir = "out"
    "#;
    fs::write(dir.path().join("config.toml"), config).unwrap();
    ok(&privwalk(&["experiment", "config.toml"], dir.path()));
    ok(&privwalk(&["census", "config.toml"], dir.path()));
    let nrmse = fs::read_to_string(dir.path().join("out/nrmse.csv")).unwrap();
    assert_eq!(nrmse.lines().count(), 7);
    assert!(nrmse.starts_with("p,sample_size,estimator,truth,mean_estimate,nrmse,cv_nrmse,"));
    let census = fs::read_to_string(dir.path().join("out/census.csv")).unwrap();
    assert_eq!(census.lines().count(), 3);
    assert!(dir.path().join("out/theory.csv").exists());
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.txt"), "1 2\n2 x\n").unwrap();
    let out = privwalk(&["ingest", "bad.txt"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let out = privwalk(&["estimate", "missing.txt"], dir.path());
    assert!(!out.status.success());
}
