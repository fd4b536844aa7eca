use std::fs;
use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_noncoercive")).args(args).output().unwrap();
    out.status.code().unwrap()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(run(&["solve", "--preset", "heat", "--out", out]), 0);
    assert_eq!(run(&["solve", "--preset", "growth", "--out", out]), 1);
    assert_eq!(run(&["solve", "--preset", "nonpsd", "--out", out]), 2);
    assert_eq!(run(&["solve", "--preset", "unknown", "--out", out]), 2);
    assert_eq!(run(&["sharpness", "--s", "0.4", "--out", out]), 2);
    assert_eq!(run(&["convergence", "--preset", "disk", "--out", out]), 2);
    assert_eq!(run(&["frobnicate"]), 2);
    let missing = dir.path().join("missing.toml");
    assert_eq!(run(&["solve", "--config", missing.to_str().unwrap()]), 2);
}

#[test]
fn csv_headers() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = d.join("run.toml");
    fs::write(
        &cfg,
        "problem.preset = \"disk\"\noutput.mesh = true\noutput.matrices = true\noutput.eigenvectors = true\nconvergence.levels = [8, 16]\nsharpness.terms = 1000\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let out = d.join("out");
    let o = out.to_str().unwrap();
    assert_eq!(run(&["solve", "--config", c, "--out", o]), 0);
    assert_eq!(run(&["eigs", "--config", c, "--out", o]), 0);
    assert_eq!(run(&["check", "--config", c, "--out", o, "--seed", "3"]), 0);
    assert_eq!(run(&["convergence", "--config", c, "--preset", "heat", "--out", o, "--jobs", "2"]), 0);
    assert_eq!(run(&["sharpness", "--config", c, "--out", o]), 0);
    let abs: Vec<String> = (1..=16).map(|j| format!("abs_g{j}")).collect();
    assert_eq!(header(&out.join("trajectory.csv")), format!("t,norm_plus_sq,norm_l2_sq,dual_f_sq,{}", abs.join(",")));
    assert_eq!(header(&out.join("solution_t.csv")), "node,re,im");
    assert_eq!(header(&out.join("report.csv")), "quantity,value");
    assert_eq!(header(&out.join("eigenvalues.csv")), "j,lambda,mass_norm");
    assert_eq!(header(&out.join("eigenvectors.csv")), "row,col,re,im");
    assert_eq!(header(&out.join("k_plus.csv")), "row,col,re,im");
    assert_eq!(header(&out.join("nodes.csv")), "id,x,y");
    assert_eq!(header(&out.join("elements.csv")), "id,n0,n1,n2");
    assert_eq!(header(&out.join("facets.csv")), "id,n0,n1,tag");
    assert_eq!(header(&out.join("convergence.csv")), "level,h,dt,error,order");
    assert_eq!(header(&out.join("sharpness.csv")), "N,partial_A,tail_A,partial_B,verdict");
    assert!(fs::read_dir(&out).unwrap().all(|e| !e.unwrap().file_name().to_string_lossy().ends_with(".tmp")));
}

#[test]
fn sharpness_flags_select_a_only_mode() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    assert_eq!(run(&["sharpness", "--epsilon", "1", "--terms", "1000", "--out", o]), 0);
    let text = fs::read_to_string(dir.path().join("sharpness.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",,n/a")));
}
