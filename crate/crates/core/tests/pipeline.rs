use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use chrono::NaiveDate;

use emolag::corpus::Source;
use emolag::pipeline::{
    cmd_analyze, cmd_ingest, read_store, store_path, Overrides, PipelineError, RunConfig,
    ANALYSIS_DIR, STORE_DIR,
};
use emolag::report::corpus_stats;
use emolag::synth::{lead_lag_corpus, LeadLagSpec, BUNDLED_SEED};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn config_into(out: &Path) -> RunConfig {
    let mut cfg = RunConfig::load(&data("synthetic/config.toml")).unwrap();
    cfg.apply(&Overrides {
        output_dir: Some(out.to_path_buf()),
        ..Default::default()
    });
    cfg
}

fn date(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

fn has_partial_dirs(dir: &Path) -> bool {
    fs::read_dir(dir)
        .map(|it| {
            it.flatten()
                .any(|e| e.file_name().to_string_lossy().ends_with(".partial"))
        })
        .unwrap_or(false)
}

#[test]
fn missing_input_names_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = config_into(tmp.path());
    cfg.inputs.tweets = PathBuf::from("no_such_tweets.jsonl");
    let err = cmd_ingest(&cfg).unwrap_err();
    assert!(matches!(err, PipelineError::MissingPath { .. }), "{err:?}");
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("no_such_tweets.jsonl"), "{err}");
    assert!(!tmp.path().join(STORE_DIR).exists());
}

#[test]
fn ingest_report_matches_store() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config_into(tmp.path());
    let summary = cmd_ingest(&cfg).unwrap();
    let docs = read_store(&store_path(&cfg)).unwrap();
    assert_eq!(docs.len(), summary.documents);
    assert_eq!(corpus_stats(&docs), summary.by_region);
    assert_eq!(
        docs.iter().filter(|d| d.source == Source::Tweet).count(),
        360
    );
    assert_eq!(
        docs.iter().filter(|d| d.source == Source::Bulletin).count(),
        45
    );

    let report = fs::read_to_string(summary.store_dir.join("ingest_report.csv")).unwrap();
    let total = report.lines().find(|l| l.starts_with("total,")).unwrap();
    assert!(total.ends_with(&format!(",{}", docs.len())), "{total}");
}

#[test]
fn disjoint_windows_fail_at_alignment() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = config_into(tmp.path());
    cfg.study.tweets_start = Some(date("2020-03-01"));
    cfg.study.tweets_end = Some(date("2020-03-15"));
    cfg.study.bulletins_start = Some(date("2020-03-20"));
    cfg.study.bulletins_end = Some(date("2020-04-14"));
    cmd_ingest(&cfg).unwrap();
    let err = cmd_analyze(&cfg).unwrap_err();
    match &err {
        PipelineError::Analysis { stage, .. } => assert_eq!(*stage, "align"),
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(err.exit_code(), 1);
    assert!(!tmp.path().join(ANALYSIS_DIR).exists());
    assert!(!has_partial_dirs(tmp.path()));
}

#[test]
fn failed_analyze_keeps_previous_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = config_into(tmp.path());
    cmd_ingest(&cfg).unwrap();
    let first = cmd_analyze(&cfg).unwrap();
    let before = fs::read(first.analysis_dir.join("granger.csv")).unwrap();

    cfg.analysis.categories = Some(vec!["not_a_category".into()]);
    let err = cmd_analyze(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert_eq!(
        fs::read(first.analysis_dir.join("granger.csv")).unwrap(),
        before
    );
    assert!(!has_partial_dirs(tmp.path()));
}

#[test]
fn stale_staging_directory_is_replaced() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config_into(tmp.path());
    let stale = tmp.path().join(".store.partial");
    fs::create_dir_all(&stale).unwrap();
    fs::write(stale.join("leftover"), "x").unwrap();
    let summary = cmd_ingest(&cfg).unwrap();
    assert!(!summary.store_dir.join("leftover").exists());
    assert!(!has_partial_dirs(tmp.path()));
}

#[test]
fn analyze_without_ingest_is_a_missing_path() {
    let tmp = tempfile::tempdir().unwrap();
    let err = cmd_analyze(&config_into(tmp.path())).unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
}

#[test]
fn bundled_corpus_is_reproducible() {
    let c = lead_lag_corpus(&LeadLagSpec::bundled(BUNDLED_SEED));
    let bundled: Vec<emolag::corpus::Document> = fs::read_to_string(data("synthetic/tweets.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(bundled, c.tweets);
    let offset = LeadLagSpec::default().utc_offset;
    for b in &c.bulletins {
        let name = format!("{}_{}.txt", b.local_date(offset), b.region);
        let text = fs::read_to_string(data("synthetic/bulletins").join(name)).unwrap();
        assert_eq!(text.trim_end(), b.text);
    }
}

fn emolag() -> Command {
    Command::new(env!("CARGO_BIN_EXE_emolag"))
}

#[test]
fn cli_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let config = data("synthetic/config.toml");
    let common = |cmd: &str| {
        let mut c = emolag();
        c.arg(cmd)
            .arg("-c")
            .arg(&config)
            .arg("--output-dir")
            .arg(tmp.path());
        c
    };
    assert!(common("ingest").status().unwrap().success());
    assert!(common("analyze").status().unwrap().success());

    let analysis = tmp.path().join(ANALYSIS_DIR);
    let granger = fs::read_to_string(analysis.join("granger.txt")).unwrap();
    assert!(granger.contains("Medical Emergency"));

    let series = analysis.join("series_delhi_tweet.csv");
    let bulletins = analysis.join("series_delhi_bulletin.csv");
    let out = emolag()
        .arg("granger")
        .arg(&series)
        .arg(&bulletins)
        .arg("--region")
        .arg("delhi")
        .arg("--csv")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows = emolag::report::parse_granger_csv(&csv).unwrap();
    assert_eq!(rows.len(), 16);

    let out = emolag()
        .arg("adf")
        .arg(&series)
        .arg(&bulletins)
        .arg("--region")
        .arg("delhi")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("Medical Emergency"));

    let out = common("chatterplot")
        .arg("--top-n")
        .arg("5")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .count(),
        6
    );

    let out = common("stats").arg("--csv").output().unwrap();
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("delhi,360,45,405"));
}

#[test]
fn cli_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = emolag()
        .args(["ingest", "-c"])
        .arg(tmp.path().join("absent.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.toml"));

    let config = data("synthetic/config.toml");
    let run = |cmd: &str, extra: &[&str]| {
        emolag()
            .arg(cmd)
            .arg("-c")
            .arg(&config)
            .arg("--output-dir")
            .arg(tmp.path())
            .args(extra)
            .output()
            .unwrap()
    };
    assert!(run("ingest", &[]).status.success());
    let out = run("analyze", &["--region", "atlantis"]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn content_and_location_streams_dedup_by_default() {
    let tmp = tempfile::tempdir().unwrap();
    let tweets = tmp.path().join("tweets.jsonl");
    let lines = [
        r#"{"id":"1","created_at":"2020-03-02T06:00:00Z","text":"lockdown","region":"new delhi","user_location":"New Delhi, India"}"#,
        r#"{"id":"2","created_at":"2020-03-02T07:00:00Z","text":"mask","region":"delhi","user_location":"Kochi, India"}"#,
        r#"{"id":"3","created_at":"2020-03-03T07:00:00Z","text":"fear","region":"delhi"}"#,
    ];
    fs::write(&tweets, lines.join("\n")).unwrap();

    let mut cfg = config_into(&tmp.path().join("out"));
    cfg.inputs.tweets = tweets;
    cfg.study.location_country = Some("india".into());
    let tweet_regions = |cfg: &RunConfig| {
        cmd_ingest(cfg).unwrap();
        let mut r: Vec<(String, String)> = read_store(&store_path(cfg))
            .unwrap()
            .into_iter()
            .filter(|d| d.source == Source::Tweet)
            .map(|d| (d.id, d.region))
            .collect();
        r.sort();
        r
    };
    let pair = |id: &str, region: &str| (id.to_string(), region.to_string());
    assert_eq!(
        tweet_regions(&cfg),
        [
            pair("1", "delhi"),
            pair("2", "delhi"),
            pair("2", "kerala"),
            pair("3", "delhi")
        ]
    );

    cfg.apply(&Overrides {
        keep_duplicates: true,
        ..Default::default()
    });
    assert_eq!(
        tweet_regions(&cfg),
        [
            pair("1", "delhi"),
            pair("1", "delhi"),
            pair("2", "delhi"),
            pair("2", "kerala"),
            pair("3", "delhi")
        ]
    );
}
