//! Black-box tests of the command-line surface and its exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn ugcmine(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ugcmine"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn write_comment_page(path: &Path) {
    let mut html = String::from("<html><body><ul class=\"comments\">\n");
    for k in 0..4 {
        html.push_str(&format!(
            "<li><h3>Writer{k}:</h3><p class=\"when\">{} Feb 2020 2:{:02}:11pm</p>\
             <p>Body {k} keeps enough plain words around to classify as message text here.</p><ul></ul></li>\n",
            k + 3,
            k + 1
        ));
    }
    html.push_str("</ul></body></html>\n");
    std::fs::write(path, html).unwrap();
}

#[test]
fn discover_writes_wrapper_and_records() {
    let dir = tempfile::tempdir().unwrap();
    let page = dir.path().join("story.html");
    write_comment_page(&page);

    let out = ugcmine(&["discover", "story.html"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let wrapper = std::fs::read_to_string(dir.path().join("story.wrapper.json")).unwrap();
    assert!(wrapper.contains("//li["));
    assert!(wrapper.contains("\"name\""));
    let records = std::fs::read_to_string(dir.path().join("story.records.jsonl")).unwrap();
    assert_eq!(records.lines().count(), 4);
    let first: serde_json::Value = serde_json::from_str(records.lines().next().unwrap()).unwrap();
    assert_eq!(first["name"][0], "Writer0");
}

#[test]
fn discover_on_empty_page_exits_zero_with_empty_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let page = dir.path().join("empty.html");
    std::fs::write(&page, "<html><body><p>nothing here</p></body></html>").unwrap();

    let out = ugcmine(&["discover", "empty.html"], dir.path());
    assert!(out.status.success());
    let records = std::fs::read_to_string(dir.path().join("empty.records.jsonl")).unwrap();
    assert!(records.is_empty());
    assert!(!dir.path().join("empty.wrapper.json").exists());
}

#[test]
fn missing_input_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = ugcmine(&["discover", "no-such-file.html"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let page = dir.path().join("story.html");
    write_comment_page(&page);
    std::fs::write(dir.path().join("bad.toml"), "[similarity]\nthresold = 0.8\n").unwrap();

    let out = ugcmine(&["discover", "story.html", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    let out = ugcmine(&["discover", "story.html", "--set", "similarity.thresold=1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn extract_applies_a_saved_wrapper() {
    let dir = tempfile::tempdir().unwrap();
    write_comment_page(&dir.path().join("a.html"));
    write_comment_page(&dir.path().join("b.html"));

    let out = ugcmine(&["discover", "a.html"], dir.path());
    assert!(out.status.success());
    let out = ugcmine(&["extract", "--wrapper", "a.wrapper.json", "b.html"], dir.path());
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("4 record(s)"), "stderr: {stderr}");
    let records = std::fs::read_to_string(dir.path().join("b.records.jsonl")).unwrap();
    assert_eq!(records.lines().count(), 4);
}

#[test]
fn extract_rejects_corrupt_wrapper() {
    let dir = tempfile::tempdir().unwrap();
    write_comment_page(&dir.path().join("a.html"));
    std::fs::write(dir.path().join("w.json"), "{ not a wrapper").unwrap();
    let out = ugcmine(&["extract", "--wrapper", "w.json", "a.html"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_testbed_then_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = ugcmine(
        &[
            "gen-testbed",
            "--seed",
            "7",
            "--out",
            "corpus",
            "--pages",
            "6",
            "--min-records",
            "10",
            "--max-records",
            "16",
            "--nested-fraction",
            "0.34",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = ugcmine(&["eval", "corpus", "--interaction-gain", "--json", "report.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("All Results:"));
    assert!(stdout.contains("Success Only:"));
    assert!(stdout.contains("Totals"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["all_results"]["recall"], 1.0);
}

#[test]
fn eval_without_fixtures_rejects_interaction_gain() {
    let dir = tempfile::tempdir().unwrap();
    let page_dir = dir.path().join("corpus/solo");
    std::fs::create_dir_all(&page_dir).unwrap();
    write_comment_page(&page_dir.join("page.html"));
    let annotation = serde_json::json!({
        "page_id": "solo",
        "requires_interaction": false,
        "available_without_interaction": 4,
        "expected_records": (0..4).map(|k| serde_json::json!({
            "name": format!("Writer{k}"),
            "datetime": format!("{} Feb 2020 2:{:02}:11pm", k + 3, k + 1),
            "content": format!("Body {k} keeps enough plain words around to classify as message text here."),
        })).collect::<Vec<_>>(),
    });
    std::fs::write(page_dir.join("annotation.json"), annotation.to_string()).unwrap();

    let out = ugcmine(&["eval", "corpus"], dir.path());
    assert!(out.status.success());

    let out = ugcmine(&["eval", "corpus", "--interaction-gain"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn interact_writes_snapshots_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = dir.path().join("fixture");
    std::fs::create_dir_all(&fixture).unwrap();
    // Build a two-page fixture via gen-testbed to keep this test honest
    // about the on-disk formats.
    let out = ugcmine(
        &[
            "gen-testbed",
            "--seed",
            "3",
            "--out",
            "corpus",
            "--pages",
            "5",
            "--min-records",
            "10",
            "--max-records",
            "12",
            "--nested-fraction",
            "0.2",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let corpus = dir.path().join("corpus");
    let paginated = std::fs::read_dir(&corpus)
        .unwrap()
        .filter_map(|e| e.ok().map(|e| e.path()))
        .find(|p| p.join("transitions.json").exists())
        .expect("a paginated page");

    let out = ugcmine(
        &["interact", paginated.to_str().unwrap(), "--out", "snaps"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = std::fs::read_to_string(dir.path().join("snaps/manifest.json")).unwrap();
    let entries: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    let n = entries.as_array().unwrap().len();
    assert!(n >= 2, "expected multiple snapshots, got {n}");
    for entry in entries.as_array().unwrap() {
        let id = entry["snapshot_id"].as_str().unwrap();
        assert!(dir.path().join(format!("snaps/{id}.html")).exists());
    }

    let out = ugcmine(&["interact", "corpus", "--out", "snaps2"], dir.path());
    assert_eq!(out.status.code(), Some(3)); // no initial.html/page.html
}

#[test]
fn config_dump_round_trips_identically() {
    let dir = tempfile::tempdir().unwrap();
    write_comment_page(&dir.path().join("story.html"));

    let out = ugcmine(
        &[
            "discover",
            "story.html",
            "--set",
            "similarity.threshold=0.65",
            "--dump-config",
            "effective.toml",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let first = std::fs::read_to_string(dir.path().join("story.records.jsonl")).unwrap();
    let dumped = std::fs::read_to_string(dir.path().join("effective.toml")).unwrap();
    assert!(dumped.contains("threshold = 0.65"));

    let out = ugcmine(
        &["discover", "story.html", "--config", "effective.toml"],
        dir.path(),
    );
    assert!(out.status.success());
    let second = std::fs::read_to_string(dir.path().join("story.records.jsonl")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn dump_clusters_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    write_comment_page(&dir.path().join("story.html"));
    let out = ugcmine(&["discover", "story.html", "--dump-clusters"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let dump: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(dump.as_array().unwrap().iter().any(|c| c["member_count"] == 4));
}

#[test]
fn dump_taghashes_prints_canonical_serializations() {
    let dir = tempfile::tempdir().unwrap();
    write_comment_page(&dir.path().join("story.html"));
    let out = ugcmine(&["discover", "story.html", "--dump-taghashes"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("{'li.00': ["));
    assert!(stdout.contains("# 4 node(s)"));
}

#[test]
fn parallel_jobs_match_serial_output() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.html", "b.html", "c.html"] {
        write_comment_page(&dir.path().join(name));
    }
    let out = ugcmine(&["discover", "a.html", "b.html", "c.html", "--jobs", "3"], dir.path());
    assert!(out.status.success());
    let serial_dir = tempfile::tempdir().unwrap();
    for name in ["a.html", "b.html", "c.html"] {
        write_comment_page(&serial_dir.path().join(name));
    }
    let out = ugcmine(&["discover", "a.html", "b.html", "c.html"], serial_dir.path());
    assert!(out.status.success());
    for name in ["a.records.jsonl", "b.records.jsonl", "c.records.jsonl"] {
        assert_eq!(
            std::fs::read_to_string(dir.path().join(name)).unwrap(),
            std::fs::read_to_string(serial_dir.path().join(name)).unwrap()
        );
    }
}

#[test]
fn eval_scores_prebuilt_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = ugcmine(
        &[
            "gen-testbed",
            "--seed",
            "19",
            "--out",
            "corpus",
            "--pages",
            "5",
            "--min-records",
            "10",
            "--max-records",
            "12",
            "--nested-fraction",
            "0.2",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    // Extract every page into an outputs directory named by page id.
    std::fs::create_dir_all(dir.path().join("outputs")).unwrap();
    for entry in std::fs::read_dir(dir.path().join("corpus")).unwrap() {
        let page_dir = entry.unwrap().path();
        let page_id = page_dir.file_name().unwrap().to_string_lossy().into_owned();
        let out = ugcmine(
            &[
                "discover",
                page_dir.join("page.html").to_str().unwrap(),
                "--out-dir",
                "outputs",
            ],
            dir.path(),
        );
        assert!(out.status.success());
        std::fs::rename(
            dir.path().join("outputs/page.records.jsonl"),
            dir.path().join(format!("outputs/{page_id}.records.jsonl")),
        )
        .unwrap();
    }
    let out = ugcmine(&["eval", "corpus", "--outputs", "outputs", "--json", "r.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    // Static extraction cannot reach paginated records, so recall sits
    // below 1 while precision stays perfect.
    assert_eq!(report["all_results"]["precision"], 1.0);
    assert!(report["all_results"]["recall"].as_f64().unwrap() < 1.0);
    assert!(report["success_only"]["recall"].as_f64().unwrap() > 0.0);
}

#[test]
fn normalize_datetimes_flag_rewrites_output() {
    let dir = tempfile::tempdir().unwrap();
    write_comment_page(&dir.path().join("story.html"));
    let out = ugcmine(&["discover", "story.html", "--normalize-datetimes"], dir.path());
    assert!(out.status.success());
    let records = std::fs::read_to_string(dir.path().join("story.records.jsonl")).unwrap();
    let first: serde_json::Value = serde_json::from_str(records.lines().next().unwrap()).unwrap();
    assert_eq!(first["datetime"][0], "2020-02-03T14:01:11");
}
