use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hetsample(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hetsample")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_report_with_benchmarks() {
    let dir = tempfile::tempdir().unwrap();
    let out = hetsample(&["run", "--preset", "heterogeneous-demo", "--out", path(dir.path()), "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(report.starts_with("strategy,budget,nrmse,mean_estimate,truth,mean_final_c,k_hat_mode\n"));
    for s in ["ATS", "AVG", "RND"] {
        assert!(report.lines().any(|l| l.starts_with(&format!("{s},"))), "{s} missing");
    }

    let again = hetsample(&["run", "--preset", "heterogeneous-demo", "--out", path(dir.path()), "--seed", "11"]);
    assert_eq!(again.status.code(), Some(1));
    assert!(stderr(&again).contains("--force"));

    let forced = hetsample(&["run", "--preset", "heterogeneous-demo", "--out", path(dir.path()), "--seed", "11", "--force"]);
    assert_eq!(forced.status.code(), Some(0));
    assert_eq!(fs::read_to_string(dir.path().join("report.csv")).unwrap(), report);
}

#[test]
fn verbose_run_writes_replications() {
    let dir = tempfile::tempdir().unwrap();
    let out = hetsample(&["run", "--preset", "constant-property", "--out", path(dir.path()), "--verbose"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for f in ["report.csv", "replications.csv", "frequencies.csv", "oracle.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn malformed_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "name = \"x\"\nproperty = \"p\"\nreplications = \"many\"\n").unwrap();
    let out = hetsample(&["run", "--config", path(&cfg), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("replications"), "{}", stderr(&out));
    assert!(!dir.path().join("report.csv").exists());
}

#[test]
fn oracle_on_constant_property_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = hetsample(&["oracle", "--preset", "constant-property", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("oracle.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[2], "0");
        assert_eq!(fields[4], "0");
    }
}

#[test]
fn unknown_statistic_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    let text = hetsample(&["dump-config", "--preset", "constant-property"]).stdout;
    let text = String::from_utf8(text).unwrap().replace("statistic = \"srw-ring\"", "statistic = \"nope\"");
    fs::write(&cfg, text).unwrap();
    let out = hetsample(&["oracle", "--config", path(&cfg), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("nope"));
}

fn trace_config(dir: &Path, sampler: &str, budget: f64, start: Option<usize>) -> String {
    fs::write(dir.join("edge.txt"), "0 1\n").unwrap();
    fs::write(dir.join("x.txt"), "0 1\n1 2\n").unwrap();
    let start = start.map(|s| format!("start = {s}\n")).unwrap_or_default();
    let text = format!(
        r#"name = "tiny"
seed = 1
property = "x"
budgets = [100.0]
strategies = ["RND"]

[trace]
statistic = "s"
budget = {budget:?}
{start}
[graph]
source = "files"
nodes = 2
relations = [{{ name = "e", path = "edge.txt" }}]
properties = [{{ name = "x", path = "x.txt" }}]

[[statistics]]
name = "s"
relation = "e"
sampler = "{sampler}"
"#
    );
    let cfg = dir.join("trace.toml");
    fs::write(&cfg, text).unwrap();
    cfg.to_str().unwrap().to_string()
}

fn trace_rows(dir: &Path) -> Vec<String> {
    let csv = fs::read_to_string(dir.join("trace.csv")).unwrap();
    csv.lines().skip(1).map(str::to_string).collect()
}

#[test]
fn srw_trace_on_a_single_edge() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = trace_config(dir.path(), "srw", 5.0, Some(0));
    let out = hetsample(&["trace", "--config", &cfg, "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = trace_rows(dir.path());
    assert_eq!(rows.len(), 5);
    let nodes: Vec<&str> = rows.iter().map(|r| r.split(',').next().unwrap()).collect();
    assert_eq!(nodes, ["0", "1", "0", "1", "0"]);
}

#[test]
fn zero_budget_trace_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = trace_config(dir.path(), "srw", 0.0, Some(0));
    let out = hetsample(&["trace", "--config", &cfg, "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("trace.csv").exists());
}

#[test]
fn uniform_trace_pays_for_each_draw() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = trace_config(dir.path(), "uni", 30.0, None);
    let out = hetsample(&["trace", "--config", &cfg, "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(trace_rows(dir.path()).len(), 2);
}

#[test]
fn unaffordable_work_exits_with_runtime_status() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = trace_config(dir.path(), "uni", 10.0, None);
    let out = hetsample(&["trace", "--config", &cfg, "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("trace.csv").exists());
}

#[test]
fn failing_cell_is_reported_with_its_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = trace_config(dir.path(), "uni", 30.0, None);
    let text = fs::read_to_string(&cfg).unwrap().replace("budgets = [100.0]", "budgets = [20.0]");
    fs::write(&cfg, text).unwrap();
    let out = hetsample(&["run", "--config", &cfg, "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("strategy=") && err.contains("budget=20") && err.contains("replication="), "{err}");
    assert!(!dir.path().join("report.csv").exists());
}

#[test]
fn dump_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["heterogeneous-demo", "oracle-heterogeneity"] {
        let first = hetsample(&["dump-config", "--preset", preset]);
        assert_eq!(first.status.code(), Some(0));
        let cfg = dir.path().join(format!("{preset}.toml"));
        fs::write(&cfg, &first.stdout).unwrap();
        let second = hetsample(&["dump-config", "--config", path(&cfg)]);
        assert_eq!(first.stdout, second.stdout);
    }
}

#[test]
fn missing_seed_is_drawn_and_printed() {
    let text = String::from_utf8(hetsample(&["dump-config", "--preset", "constant-property"]).stdout).unwrap();
    let text: String = text.lines().filter(|l| !l.starts_with("seed =")).map(|l| format!("{l}\n")).collect();
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("noseed.toml");
    fs::write(&cfg, text).unwrap();
    let out = hetsample(&["dump-config", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let seed = stdout.lines().find_map(|l| l.strip_prefix("seed: ")).unwrap();
    assert!(stdout.contains(&format!("seed = {seed}")));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(hetsample(&["run"]).status.code(), Some(1));
    assert_eq!(hetsample(&["run", "--preset", "nope"]).status.code(), Some(1));
    assert_eq!(hetsample(&["--help"]).status.code(), Some(0));
}
