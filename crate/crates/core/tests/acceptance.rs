//! Acceptance suite. One test per criterion; each prints a PASS line with
//! its measured numbers once its assertions hold. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::collections::HashSet;
use std::time::Instant;

use common::{
    anchor_xpath, as_refs, comment_page, comment_rows, find_pagination_numbers_reference,
    normalized_ted_similarity, random_taghash, write_fixture,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ugcmine_core::config::Config;
use ugcmine_core::dom::parse_html;
use ugcmine_core::eval::{
    evaluate_corpus, f1_score, generate_testbed, run_page, GainRow, GainTable, GeneratorSpec,
};
use ugcmine_core::interact::driver::Transition;
use ugcmine_core::interact::{
    build_link_regex, int_span, pagination_gates, plan_interactions, run_plan, LinkLexicon,
    PageDriver, SimulatorDriver,
};
use ugcmine_core::similarity::{similarity, PenaltyConfig};
use ugcmine_core::snapshot::SnapshotStore;
use ugcmine_core::typing::{classify_column, ColumnSource, FieldType, TypeThresholds};
use ugcmine_core::wrapper::discover;

const GOLDEN_PAGE: &str = include_str!("fixtures/comments.html");

/// Criterion: on the seed-fixed synthetic testbed (>= 20 pages, all five
/// template families, 10..=1000 records per page, >= 30% of pages with
/// nested replies), end-to-end discovery reaches recall >= 0.95 and
/// precision >= 0.90 micro-averaged in all-results mode, within 60 s.
#[test]
fn acceptance_synthetic_corpus_extraction() {
    let dir = tempfile::tempdir().unwrap();
    let spec = GeneratorSpec {
        pages: 20,
        min_records: 10,
        max_records: 60,
        nested_fraction: 0.3,
    };
    let started = Instant::now();
    let annotations = generate_testbed(7, &spec, dir.path()).unwrap();

    // Corpus shape requirements.
    assert_eq!(annotations.len(), 20);
    for a in &annotations {
        let n = a.expected_records.len();
        assert!((10..=1000).contains(&n), "{} has {n} records", a.page_id);
    }
    let mut families = HashSet::new();
    for a in &annotations {
        let page_dir = dir.path().join(&a.page_id);
        let html = std::fs::read_to_string(page_dir.join("page.html")).unwrap();
        if page_dir.join("transitions.json").exists() {
            families.insert("paginated");
        } else if html.contains("<table") {
            families.insert("table");
        } else if html.contains("class=\"card\"") {
            families.insert("div-only");
        } else if html.contains("class=\"replies\"") {
            families.insert("nested");
        } else {
            families.insert("list");
        }
    }
    assert_eq!(families.len(), 5, "families seen: {families:?}");
    let nested_pages = annotations
        .iter()
        .filter(|a| {
            let html =
                std::fs::read_to_string(dir.path().join(&a.page_id).join("page.html")).unwrap();
            html.contains("class=\"replies\"")
        })
        .count();
    assert!(nested_pages * 10 >= annotations.len() * 3, "{nested_pages} nested pages of 20");

    let cfg = Config::default();
    let (report, _) = evaluate_corpus(dir.path(), &cfg).unwrap();
    let elapsed = started.elapsed();

    assert!(
        report.all_results.recall >= 0.95,
        "recall {:.4} < 0.95",
        report.all_results.recall
    );
    assert!(
        report.all_results.precision >= 0.90,
        "precision {:.4} < 0.90",
        report.all_results.precision
    );
    assert!(elapsed.as_secs() <= 60, "runtime {elapsed:?} over 60 s");
    println!(
        "ACCEPTANCE synthetic-corpus-extraction: PASS (recall {:.4}, precision {:.4}, {} pages, {:?})",
        report.all_results.recall,
        report.all_results.precision,
        report.per_page.len(),
        elapsed
    );
}

/// Criterion: the four-comment golden page yields exactly its four records
/// (names and byte-exact datetimes) and the expected type map.
#[test]
fn acceptance_golden_pipeline() {
    let doc = parse_html(GOLDEN_PAGE).unwrap();
    let discoveries = discover(&doc, &Config::default());
    assert_eq!(discoveries.len(), 1, "exactly one UGC wrapper");
    let d = &discoveries[0];

    assert_eq!(d.records.len(), 4);
    let names: Vec<&str> = d.records.iter().map(|r| r.name[0].as_str()).collect();
    assert_eq!(names, ["Patrick", "Tony", "JohnC", "Arthur"]);
    let datetimes: Vec<&str> = d.records.iter().map(|r| r.datetime[0].as_str()).collect();
    assert_eq!(
        datetimes,
        [
            "29 Jan 2015 3:15:55pm",
            "29 Jan 2015 3:47:38pm",
            "29 Jan 2015 4:17:03pm",
            "29 Jan 2015 6:07:58pm"
        ]
    );

    let paths = |v: &[ugcmine_core::FieldPath]| {
        v.iter().map(|p| p.to_string()).collect::<HashSet<String>>()
    };
    let set = |items: &[&str]| items.iter().map(|s| s.to_string()).collect::<HashSet<String>>();
    assert_eq!(paths(&d.type_map.datetime), set(&["p[1]/inner_text"]));
    assert_eq!(paths(&d.type_map.text), set(&["p[2]/text"]));
    assert_eq!(paths(&d.type_map.string), set(&["h3[1]/string"]));
    assert_eq!(
        paths(&d.type_map.url),
        set(&["p[3]/span[1]/a[1]/@href", "p[3]/span[2]/a[1]/@href"])
    );
    println!("ACCEPTANCE golden-pipeline: PASS (4 records, type map as expected)");
}

/// Criterion: over >= 1000 random tag-hash pairs with <= 6 nodes each,
/// self-similarity is exactly 1, symmetry is exact, and pairwise ranking
/// agrees with brute-force unit-cost tree edit distance on >= 90% of
/// pair-of-pairs comparisons (strict inversions count as disagreement).
#[test]
fn acceptance_similarity_oracle() {
    let cfg = PenaltyConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let pairs: Vec<_> = (0..1000)
        .map(|_| (random_taghash(&mut rng, 6), random_taghash(&mut rng, 6)))
        .collect();

    let mut scored = Vec::with_capacity(pairs.len());
    for (a, b) in &pairs {
        assert_eq!(similarity(a, a, &cfg), 1.0);
        assert_eq!(similarity(b, b, &cfg), 1.0);
        let s_ab = similarity(a, b, &cfg);
        let s_ba = similarity(b, a, &cfg);
        assert_eq!(s_ab.to_bits(), s_ba.to_bits(), "symmetry must be exact");
        scored.push((s_ab, normalized_ted_similarity(a, b)));
    }

    let mut total = 0usize;
    let mut discordant = 0usize;
    for _ in 0..4000 {
        let i = rng.gen_range(0..scored.len());
        let j = rng.gen_range(0..scored.len());
        if i == j {
            continue;
        }
        let (s1, o1) = scored[i];
        let (s2, o2) = scored[j];
        total += 1;
        if (s1 - s2) * (o1 - o2) < 0.0 {
            discordant += 1;
        }
    }
    let agreement = 1.0 - discordant as f64 / total as f64;
    assert!(agreement >= 0.90, "ranking agreement {agreement:.4} < 0.90");
    println!(
        "ACCEPTANCE similarity-oracle: PASS ({} pairs, ranking agreement {:.4})",
        pairs.len(),
        agreement
    );
}

/// Criterion: 10 000 random (integer-list, link-count) cases agree exactly
/// with the transcription of the detection pseudocode, and span collapsing
/// reproduces the documented examples.
#[test]
fn acceptance_pagination_gates() {
    let render = |values: &[i64]| {
        int_span(values)
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    assert_eq!(render(&[1, 2, 3, 5]), "1-3,5");
    assert_eq!(render(&[1, 2, 3, 7, 15]), "1-3,7,15");
    assert_eq!(render(&[4]), "4");

    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    for case in 0..10_000 {
        let len = rng.gen_range(0..9);
        // Half the cases draw from a tight range so consecutive runs,
        // duplicates and sorted lists all occur often.
        let spread = if case % 2 == 0 { 6 } else { 40 };
        let digits: Vec<i64> = (0..len).map(|_| rng.gen_range(-2..spread)).collect();
        let links = rng.gen_range(0..12usize);
        assert_eq!(
            pagination_gates(&digits, links),
            find_pagination_numbers_reference(&digits, links),
            "case {case}: digits {digits:?}, links {links}"
        );
    }
    println!("ACCEPTANCE pagination-gates: PASS (10000 cases agree with the transcription)");
}

/// Criterion: on a fixture hiding 20 of 30 comments behind two next-clicks,
/// the AR-P/AR ratio is exactly 300%, the gain table renders, and the
/// adversarial looping pager terminates within limits.
#[test]
fn acceptance_interaction_gain() {
    let dir = tempfile::tempdir().unwrap();
    let pager = "<div class=\"pager\">\n<a href=\"#\">1</a>\n<a href=\"#\">2</a>\n<a href=\"#\">3</a>\n<a href=\"#\">Next</a>\n</div>\n";
    let rows1 = comment_rows(0, 10);
    let rows2 = comment_rows(10, 10);
    let rows3 = comment_rows(20, 10);
    let p1 = comment_page(&as_refs(&rows1), Some(pager));
    let p2 = comment_page(&as_refs(&rows2), Some(pager));
    let p3 = comment_page(&as_refs(&rows3), Some(pager));
    let next = anchor_xpath(&p1, "Next");
    let transitions = serde_json::to_string_pretty(&vec![
        Transition {
            state: "initial".into(),
            click: next.clone(),
            next_state: "page2".into(),
            html: "page2.html".into(),
        },
        Transition {
            state: "page2".into(),
            click: next.clone(),
            next_state: "page3".into(),
            html: "page3.html".into(),
        },
    ])
    .unwrap();
    write_fixture(dir.path(), &p1, &[("page2.html", &p2), ("page3.html", &p3)], &transitions);

    let cfg = Config::default();
    let outcome = run_page(dir.path(), &cfg).unwrap();
    assert_eq!(outcome.without_interaction, 10);
    assert_eq!(outcome.with_interaction, 30);
    let table = GainTable {
        rows: vec![GainRow {
            page_id: "three-page-fixture".into(),
            with_interaction: outcome.with_interaction,
            without_interaction: outcome.without_interaction,
        }],
    };
    assert_eq!(table.rows[0].increase_percent(), 300.0);
    let rendered = table.format_table();
    assert!(rendered.contains("AR-P") && rendered.contains("AR"));
    assert!(rendered.contains("300.0%"));
    assert!(rendered.contains("Totals"));

    // Looping pager: next on page2 goes back to page2 forever.
    let loop_dir = tempfile::tempdir().unwrap();
    let loop_transitions = serde_json::to_string_pretty(&vec![
        Transition {
            state: "initial".into(),
            click: next.clone(),
            next_state: "page2".into(),
            html: "page2.html".into(),
        },
        Transition {
            state: "page2".into(),
            click: next,
            next_state: "page2".into(),
            html: "page2.html".into(),
        },
    ])
    .unwrap();
    write_fixture(loop_dir.path(), &p1, &[("page2.html", &p2)], &loop_transitions);
    let mut driver = SimulatorDriver::from_fixture(loop_dir.path()).unwrap();
    let mut store = SnapshotStore::in_memory();
    let plan = plan_interactions(&driver.current_dom().unwrap(), &cfg.lexicon, &cfg.limits);
    let report = run_plan(&mut driver, &plan, &mut store, &cfg.lexicon, &cfg.limits).unwrap();
    assert!(driver.clicks <= cfg.limits.max_actions);
    assert_eq!(report.snapshot_ids.len(), 2);
    println!(
        "ACCEPTANCE interaction-gain: PASS (300% on the three-page fixture, looping pager stopped after {} clicks)",
        driver.clicks
    );
}

/// Criterion: the generated link regex matches the required labels and
/// rejects the near-miss vocabulary on whole-word boundaries.
#[test]
fn acceptance_link_regex_conformance() {
    let pattern = build_link_regex(&LinkLexicon::default());
    let re = regex::Regex::new(&pattern).unwrap();
    for positive in ["Show all 12 replies", "read more comments", "93 comments", "42 replies"] {
        assert!(re.is_match(positive), "should match {positive:?}");
    }
    for negative in ["Privacy policy", "commentary", "replied"] {
        assert!(!re.is_match(negative), "should not match {negative:?}");
    }
    println!("ACCEPTANCE link-regex-conformance: PASS (4 matches, 3 rejections)");
}

/// Criterion: metric identities hold exactly, success-only recall never
/// falls below all-results recall on a generated corpus, and the
/// constant-field and embedded-date typing fixtures behave as documented.
#[test]
fn acceptance_metric_identities() {
    assert_eq!(f1_score(0.5, 1.0), 2.0 / 3.0);

    let dir = tempfile::tempdir().unwrap();
    let spec = GeneratorSpec {
        pages: 8,
        min_records: 10,
        max_records: 24,
        nested_fraction: 0.25,
    };
    generate_testbed(17, &spec, dir.path()).unwrap();
    // Blank one page to force an extraction failure into the aggregate.
    std::fs::write(
        dir.path().join("page-006").join("page.html"),
        "<html><body><p>empty</p></body></html>",
    )
    .unwrap();
    let cfg = Config::default();
    let (report, _) = evaluate_corpus(dir.path(), &cfg).unwrap();
    assert!(report.success_only.recall >= report.all_results.recall);

    let thresholds = TypeThresholds::default();
    let column = |values: &[&str]| ugcmine_core::typing::FieldColumn {
        steps: vec![ugcmine_core::dom::PathStep { tag: "p".into(), index: 1 }],
        source: ColumnSource::ElementText,
        values: values.iter().map(|v| Some(v.to_string())).collect(),
        direct_text_members: values.len(),
        collapsed: false,
    };
    // Constant templated values are discarded regardless of content.
    assert!(classify_column(&column(&["Reply", "Reply", "Reply", "Reply"]), &thresholds).is_none());
    // A date embedded in one long body does not make the column a datetime.
    let bodies = column(&[
        "The committee resolved to publish the final draft after a long debate over scope.",
        "Posted this on 29 Jan and the thread kept growing for days afterwards with replies.",
        "Nobody in the gallery expected the amendment to survive the second reading at all.",
        "The original motion was withdrawn before anyone could move a formal point of order.",
    ]);
    let field = classify_column(&bodies, &thresholds).unwrap();
    assert_eq!(field.datatype, FieldType::Text);
    println!(
        "ACCEPTANCE metric-identities: PASS (f1(0.5,1.0)=2/3, success-only {:.4} >= all-results {:.4})",
        report.success_only.recall, report.all_results.recall
    );
}
