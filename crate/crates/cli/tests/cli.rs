use std::path::Path;
use std::process::{Command, Output};

fn hrbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hrbound"))
        .args(args)
        .output()
        .expect("spawn hrbound")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("exp.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = r#"
[experiment]
id = "cli"
seed = 5
replications = 2
requests = 2000
cache_sizes = [2, 4]
methods = ["HR-E", "LRU", "ANALYTIC"]

[traffic]
model = "renewal"
n = 20
family = "exponential"
"#;

#[test]
fn run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = hrbound(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["results.csv", "summary.csv", "plot.csv", "summary.txt"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let results = std::fs::read_to_string(out.join("results.csv")).unwrap();
    // header + 2 reps x 2 sizes x 3 methods
    assert_eq!(results.lines().count(), 13);
    assert!(String::from_utf8_lossy(&o.stdout).contains("HR-E"));

    let again = dir.path().join("again");
    let o = hrbound(&["run", "--config", &cfg, "--out", again.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(results, std::fs::read_to_string(again.join("results.csv")).unwrap());
}

#[test]
fn seed_override_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(hrbound(&["run", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(hrbound(&["run", "--config", &cfg, "--seed", "6", "--out", b.to_str().unwrap()]).status.success());
    assert_ne!(
        std::fs::read_to_string(a.join("results.csv")).unwrap(),
        std::fs::read_to_string(b.join("results.csv")).unwrap()
    );
}

#[test]
fn summarize_reads_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    assert!(hrbound(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let re = dir.path().join("re");
    let o = hrbound(&[
        "summarize",
        "--results",
        out.join("results.csv").to_str().unwrap(),
        "--out",
        re.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(out.join("summary.csv")).unwrap(),
        std::fs::read_to_string(re.join("summary.csv")).unwrap()
    );
}

#[test]
fn generate_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[experiment]
id = "gen"
seed = 9
requests = 20000
cache_sizes = [1]
methods = ["HR-E"]

[traffic]
model = "renewal"
n = 5
family = "gpd"
zipf_exponent = 0.0
"#,
    );
    let out = dir.path().join("gen");
    let o = hrbound(&["generate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = out.join("trace.csv");
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.lines().count() >= 20_000);

    let fits = dir.path().join("fits");
    let o = hrbound(&["fit", "--trace", trace.to_str().unwrap(), "--out", fits.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(fits.join("fits.csv")).unwrap();
    assert_eq!(table.lines().count(), 6);
    for line in table.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[2], "fitted");
        let k: f64 = cols[3].parse().unwrap();
        assert!((k - 0.48).abs() < 0.1, "{line}");
    }
}

#[test]
fn invalid_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "[experiment]\nid = \"x\"\nbogus = 1\n");
    assert_eq!(hrbound(&["run", "--config", &bad]).status.code(), Some(1));
    assert_eq!(hrbound(&["run"]).status.code(), Some(1));
    assert_eq!(hrbound(&["frobnicate"]).status.code(), Some(1));

    let too_big = write_config(
        dir.path(),
        &SMALL.replace("cache_sizes = [2, 4]", "cache_sizes = [50]"),
    );
    let out = dir.path().join("o");
    let o = hrbound(&["run", "--config", &too_big, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());

    let trace = dir.path().join("t.csv");
    std::fs::write(&trace, "timestamp,object_id\n0.5,a\nnot-a-number,b\n").unwrap();
    let o = hrbound(&["fit", "--trace", trace.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_file_exits_nonzero() {
    let o = hrbound(&["summarize", "--results", "/nonexistent/results.csv"]);
    assert_ne!(o.status.code(), Some(0));
    assert_eq!(hrbound(&["--help"]).status.code(), Some(0));
}
