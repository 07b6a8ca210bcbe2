use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gridlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridlab")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL_SWEEP: &str = r#"
[problem]
kind = "decay"
[sampling]
strategies = ["equidistant", "chebyshev"]
grid_sizes = [10, 20]
[network]
architectures = [[5]]
[seeds]
start = 0
count = 2
[training]
epochs = 30
"#;

#[test]
fn sample_prints_interval_points() {
    let out = gridlab(&["sample", "--strategy", "equidistant", "--n", "5", "--domain", "0,1"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,x");
    assert_eq!(lines.len(), 6);
    let xs: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
}

#[test]
fn sample_rectangle_and_seed() {
    let args = ["sample", "--strategy", "random", "--n", "3", "--domain", "-1,1,-1,1", "--seed", "7"];
    let a = gridlab(&args);
    let b = gridlab(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("index,x,y\n"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn sample_rejects_bad_input() {
    assert_eq!(code(&gridlab(&["sample", "--strategy", "uniformish", "--n", "3", "--domain", "0,1"])), 1);
    assert_eq!(code(&gridlab(&["sample", "--strategy", "chebyshev", "--n", "3", "--domain", "1,0"])), 1);
    assert_eq!(code(&gridlab(&["sample", "--strategy", "chebyshev", "--n", "3", "--domain", "0,1,2"])), 1);
}

#[test]
fn config_errors_exit_one_and_missing_files_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.toml", "[problem]\nkind = \"decay\"\nlearning_rate = 3\n");
    let out = dir.path().join("out");
    assert_eq!(code(&gridlab(&["sweep", "--config", &bad, "--out", out.to_str().unwrap()])), 1);
    let missing = dir.path().join("nope.toml");
    assert_eq!(code(&gridlab(&["sweep", "--config", missing.to_str().unwrap(), "--out", out.to_str().unwrap()])), 3);
    assert_eq!(code(&gridlab(&["plot", "--in", missing.to_str().unwrap(), "--out", out.to_str().unwrap()])), 3);
}

#[test]
fn train_requires_a_single_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "many.toml", SMALL_SWEEP);
    assert_eq!(code(&gridlab(&["train", "--config", &cfg])), 1);
}

#[test]
fn train_writes_record_history_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "one.toml",
        "[problem]\nkind = \"oscillator\"\n[sampling]\nstrategies = [\"sine_based\"]\ngrid_sizes = [20]\n\
         [network]\narchitectures = [[4, 3]]\n[training]\nepochs = 25\nlog_every = 10\n",
    );
    let out = dir.path().join("run");
    let res = gridlab(&["train", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));

    let results = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 2);
    assert!(results.lines().nth(1).unwrap().starts_with("oscillator,sine_based,2,4;3,20,0,42,25,"));

    let history = fs::read_to_string(out.join("loss_history.csv")).unwrap();
    let epochs: Vec<&str> = history.lines().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(epochs, vec!["epoch", "0", "10", "20", "24"]);

    let ckpt = fs::read_to_string(out.join("checkpoint.txt")).unwrap();
    let mut lines = ckpt.lines();
    assert_eq!(lines.next(), Some("1;4;3"));
    assert_eq!(lines.count(), 2 * 4 + (4 * 3 + 3) + (3 + 1));
}

#[test]
fn sweep_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sweep.toml", SMALL_SWEEP);
    let out = dir.path().join("sweep");
    let res = gridlab(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "--workers", "2"]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let results = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 1 + 2 * 2 * 2);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().next(), Some("problem,widths,grid,strategy,runs,mean_mae,sd_mae"));
    assert_eq!(summary.lines().count(), 1 + 4);
    assert!(out.join("mae_vs_grid_decay_5.svg").exists());

    let replot = dir.path().join("replot");
    let res = gridlab(&["plot", "--in", out.join("results.csv").to_str().unwrap(), "--out", replot.to_str().unwrap()]);
    assert_eq!(code(&res), 0);
    assert_eq!(fs::read_to_string(replot.join("summary.csv")).unwrap(), summary);
}

#[test]
fn diverging_runs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "blowup.toml",
        "[problem]\nkind = \"decay\"\nx0 = 1e300\n[sampling]\nstrategies = [\"equidistant\"]\ngrid_sizes = [5]\n\
         [network]\narchitectures = [[3]]\n[training]\nepochs = 5\n",
    );
    let out = dir.path().join("out");
    let res = gridlab(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 2);
    let results = fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(results.lines().nth(1).unwrap().ends_with(",failed"));
}
