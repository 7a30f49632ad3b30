use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_intentspace");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let o = run(dir.path(), &["generate", "steady", "--seed", "42", "--report", name]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.csv")).unwrap());
    assert!(a.starts_with(b"user_id,intent,timestamp,lat,lon\n"));
}

#[test]
fn replay_steady_writes_reports_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["generate", "steady", "--report", "log.csv"]);
    let o = run(dir.path(), &["replay", "log.csv", "--report", "out", "--snapshot-dir", "snaps"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let per_day = std::fs::read_to_string(dir.path().join("out/per_day.csv")).unwrap();
    assert!(per_day.starts_with("day,instances,hits,ratio,live_nodes\n"));
    assert_eq!(per_day.lines().count(), 29);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert!(summary["overall_hit_ratio"].as_f64().unwrap() >= 0.95);
    for key in ["1", "5", "10"] {
        assert!(summary["precision_at"][key].is_number());
        assert!(summary["conventional_precision_at"][key].is_number());
    }
    let timing: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/timing.json")).unwrap()).unwrap();
    assert!(timing["avg_predict_micros"].as_f64().unwrap() > 0.0);

    let info = run(dir.path(), &["snapshot-info", "snaps/u0.wime"]);
    assert_eq!(info.status.code(), Some(0));
    assert!(stdout(&info).contains("nodes\t6\n"));

    let o = run(
        dir.path(),
        &["predict", "snaps/u0.wime", "--at", "2024-02-01T07:40", "--lat", "12.97", "--lon", "77.692", "--recent", "Check Mail"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rank\tintent\tspatial_score\tseq_similarity\tdistance\tweight"));
    let first: Vec<&str> = lines.next().unwrap().split('\t').collect();
    assert_eq!(first.len(), 6);
    assert_eq!(first[0], "1");
    assert_eq!(first[1], "Read News");
    for field in &first[2..] {
        field.parse::<f64>().unwrap();
    }
}

#[test]
fn replay_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["generate", "one_off_noise", "--users", "3", "--report", "log.csv"]);
    let a = run(dir.path(), &["replay", "log.csv", "--report", "a"]);
    let b = run(dir.path(), &["replay", "log.csv", "--report", "b", "--jobs", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    for f in ["per_day.csv", "summary.json"] {
        assert_eq!(
            std::fs::read(dir.path().join("a").join(f)).unwrap(),
            std::fs::read(dir.path().join("b").join(f)).unwrap()
        );
    }
}

#[test]
fn empty_log_gives_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("log.csv"), "user_id,intent,timestamp,lat,lon\n").unwrap();
    let o = run(dir.path(), &["replay", "log.csv", "--report", "out"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap();
    assert!(summary.contains("\"instances\": 0"));
}

#[test]
fn malformed_row_is_a_data_error_with_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("log.csv"),
        "user_id,intent,timestamp,lat,lon\nu,A,2024-01-01T08:00,12.9,77.6\nu,A,not-a-time,12.9,77.6\n",
    )
    .unwrap();
    let o = run(dir.path(), &["replay", "log.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("log.csv:3"), "{}", stderr(&o));
}

#[test]
fn unordered_user_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("log.csv"),
        "user_id,intent,timestamp,lat,lon\nu,A,2024-01-02T08:00,12.9,77.6\nv,B,2024-01-01T08:00,12.9,77.6\nu,A,2024-01-01T08:00,12.9,77.6\n",
    )
    .unwrap();
    assert_eq!(run(dir.path(), &["replay", "log.csv"]).status.code(), Some(2));
}

#[test]
fn unknown_column_warns() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("log.csv"),
        "user_id,intent,timestamp,lat,lon,mood\nu,A,2024-01-01T08:00,12.9,77.6,ok\n",
    )
    .unwrap();
    let o = run(dir.path(), &["replay", "log.csv", "--report", "out"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("mood"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["generate", "weekly_chaos"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["replay"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["dance"]).status.code(), Some(1));
    std::fs::write(dir.path().join("bad.toml"), "decay_kk = 0.6\n").unwrap();
    run(dir.path(), &["generate", "steady", "--report", "log.csv"]);
    let o = run(dir.path(), &["replay", "log.csv", "--config", "bad.toml"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(dir.path(), &["sweep", "log.csv", "--param", "gamma", "--values", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_or_corrupt_snapshot_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("junk.wime"), b"NOPE1234").unwrap();
    assert_eq!(run(dir.path(), &["snapshot-info", "junk.wime"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["snapshot-info", "absent.wime"]).status.code(), Some(2));
}

#[test]
fn empty_snapshot_predicts_nothing() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("log.csv"), "user_id,intent,timestamp,lat,lon\nu,A,2024-01-01T08:00,12.9,77.6\n").unwrap();
    run(dir.path(), &["replay", "log.csv", "--snapshot-dir", "s", "--report", "r"]);
    let o = run(dir.path(), &["predict", "s/u.wime", "--at", "2024-01-02T08:00", "--lat", "12.9", "--lon", "77.6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\tA\t"));

    let empty = intentspace::Engine::new(intentspace::EngineConfig::default()).unwrap().snapshot();
    std::fs::write(dir.path().join("empty.wime"), empty).unwrap();
    let o = run(dir.path(), &["predict", "empty.wime", "--at", "2024-01-02T08:00", "--lat", "12.9", "--lon", "77.6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "no prediction\n");
}

#[test]
fn sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["generate", "gradual_drift", "--days", "10", "--report", "log.csv"]);
    let o = run(dir.path(), &["sweep", "log.csv", "--param", "decay_k", "--values", "0.4:1.0:0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("decay_k,overall_hit_ratio"));
    assert_eq!(text.lines().count(), 1 + 7);
    let o = run(dir.path(), &["sweep", "log.csv", "--param", "cutoff_c", "--values", "0.90:0.99:0.01", "--report", "c.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 10);
    assert!(rows.lines().nth(10).unwrap().starts_with("0.99,"));
}
