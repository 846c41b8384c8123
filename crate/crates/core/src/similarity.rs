//! Structural similarity between tag hashes via classified line diffs.
//!
//! Both hashes are rendered to their canonical serializations and compared
//! with an LCS line diff. Differing lines are classified into actions:
//!
//! - a paired `-`/`+` of single-node lines at the same depth is a
//!   *tag modification* (the node was relabelled),
//! - a lone `-`/`+` single-node line is a *node* removal/addition,
//! - a fully added or removed subtree collapses into one *branch* action
//!   carrying the number of tags it contains.
//!
//! Each action costs a configured penalty; the score is
//! `1 - penalty / max(tags(a), tags(b))`, floored at zero.

use serde::{Deserialize, Serialize};

use crate::taghash::{serialize, total_tags, TagHash};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffKind {
    TagModification,
    NodeAdd,
    NodeRemove,
    BranchAdd,
    BranchRemove,
}

/// One classified difference between two canonical serializations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffAction {
    pub kind: DiffKind,
    /// Tags involved; 1 for node actions and modifications, ≥ 2 for branches.
    pub tag_count: usize,
    /// Affected key(s), kept for diagnostics ("dl.00 -> a.00" for mods).
    pub subject: String,
}

/// Config-file layout: `similarity.threshold` plus a
/// `similarity.penalty.{modification,node,branch_per_tag}` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "PenaltyConfigRepr", into = "PenaltyConfigRepr")]
pub struct PenaltyConfig {
    pub modification_penalty: f64,
    pub node_penalty: f64,
    pub branch_per_tag_penalty: f64,
    pub similarity_threshold: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig {
            modification_penalty: 0.5,
            node_penalty: 1.0,
            branch_per_tag_penalty: 1.0,
            similarity_threshold: 0.7,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct PenaltyConfigRepr {
    threshold: f64,
    penalty: PenaltyRepr,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct PenaltyRepr {
    modification: f64,
    node: f64,
    branch_per_tag: f64,
}

impl Default for PenaltyConfigRepr {
    fn default() -> Self {
        PenaltyConfig::default().into()
    }
}

impl Default for PenaltyRepr {
    fn default() -> Self {
        let d = PenaltyConfig::default();
        PenaltyRepr {
            modification: d.modification_penalty,
            node: d.node_penalty,
            branch_per_tag: d.branch_per_tag_penalty,
        }
    }
}

impl From<PenaltyConfigRepr> for PenaltyConfig {
    fn from(r: PenaltyConfigRepr) -> Self {
        PenaltyConfig {
            modification_penalty: r.penalty.modification,
            node_penalty: r.penalty.node,
            branch_per_tag_penalty: r.penalty.branch_per_tag,
            similarity_threshold: r.threshold,
        }
    }
}

impl From<PenaltyConfig> for PenaltyConfigRepr {
    fn from(c: PenaltyConfig) -> Self {
        PenaltyConfigRepr {
            threshold: c.similarity_threshold,
            penalty: PenaltyRepr {
                modification: c.modification_penalty,
                node: c.node_penalty,
                branch_per_tag: c.branch_per_tag_penalty,
            },
        }
    }
}

/// Similarity score in `[0, 1]`. Exactly symmetric: the diff direction is
/// canonicalized before classification and add/remove carry equal penalties.
pub fn similarity(a: &TagHash, b: &TagHash, cfg: &PenaltyConfig) -> f64 {
    let sa = serialize(a);
    let sb = serialize(b);
    let actions = if sa <= sb {
        classify_diff(&sa, &sb)
    } else {
        classify_diff(&sb, &sa)
    };
    let penalty: f64 = actions.iter().map(|act| action_penalty(act, cfg)).sum();
    let denom = total_tags(a).max(total_tags(b)) as f64;
    (1.0 - penalty / denom).max(0.0)
}

pub fn is_similar(a: &TagHash, b: &TagHash, cfg: &PenaltyConfig) -> bool {
    similarity(a, b, cfg) >= cfg.similarity_threshold
}

fn action_penalty(action: &DiffAction, cfg: &PenaltyConfig) -> f64 {
    match action.kind {
        DiffKind::TagModification => cfg.modification_penalty,
        DiffKind::NodeAdd | DiffKind::NodeRemove => cfg.node_penalty,
        DiffKind::BranchAdd | DiffKind::BranchRemove => {
            cfg.branch_per_tag_penalty * action.tag_count as f64
        }
    }
}

/// Diff two canonical serializations and classify every change.
/// Lines only in `a` are removals, lines only in `b` are additions.
pub fn classify_diff(a: &str, b: &str) -> Vec<DiffAction> {
    let a_lines: Vec<Line> = a.lines().map(Line::parse).collect();
    let b_lines: Vec<Line> = b.lines().map(Line::parse).collect();
    let ops = lcs_diff(&a_lines, &b_lines);

    let mut actions = Vec::new();
    let mut dels: Vec<&Line> = Vec::new();
    let mut inss: Vec<&Line> = Vec::new();
    for op in &ops {
        match op {
            Op::Equal => {
                classify_block(&dels, &inss, &mut actions);
                dels.clear();
                inss.clear();
            }
            Op::Delete(i) => dels.push(&a_lines[*i]),
            Op::Insert(j) => inss.push(&b_lines[*j]),
        }
    }
    classify_block(&dels, &inss, &mut actions);
    actions
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LineKind {
    /// `{'key': []}` — a whole node on one line.
    Leaf,
    /// `{'key': [` — a node whose children follow.
    Open,
    /// `]}` — closes an Open line; carries no tags.
    Close,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Line {
    raw: String,
    indent: usize,
    key: Option<String>,
    kind: LineKind,
}

impl Line {
    fn parse(raw: &str) -> Line {
        let trimmed = raw.trim_start();
        let indent = raw.len() - trimmed.len();
        if trimmed.starts_with(']') {
            return Line {
                raw: raw.to_string(),
                indent,
                key: None,
                kind: LineKind::Close,
            };
        }
        let key = trimmed
            .strip_prefix("{'")
            .and_then(|r| r.split_once('\''))
            .map(|(k, _)| k.to_string());
        let kind = if trimmed.trim_end_matches(',').ends_with('[') {
            LineKind::Open
        } else {
            LineKind::Leaf
        };
        Line {
            raw: raw.to_string(),
            indent,
            key,
            kind,
        }
    }
}

enum Op {
    Equal,
    Delete(usize),
    Insert(usize),
}

/// Longest-common-subsequence diff over whole lines.
fn lcs_diff(a: &[Line], b: &[Line]) -> Vec<Op> {
    let n = a.len();
    let m = b.len();
    let mut dp = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[i][j] = if a[i].raw == b[j].raw {
                dp[i + 1][j + 1] + 1
            } else {
                dp[i + 1][j].max(dp[i][j + 1])
            };
        }
    }
    let mut ops = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i].raw == b[j].raw {
            ops.push(Op::Equal);
            i += 1;
            j += 1;
        } else if dp[i + 1][j] >= dp[i][j + 1] {
            ops.push(Op::Delete(i));
            i += 1;
        } else {
            ops.push(Op::Insert(j));
            j += 1;
        }
    }
    ops.extend((i..n).map(Op::Delete));
    ops.extend((j..m).map(Op::Insert));
    ops
}

/// Span of the complete subtree starting at `lines[start]`, if it lies
/// wholly inside the slice, together with the number of tags in it.
fn subtree_span(lines: &[&Line], start: usize) -> (usize, usize) {
    match lines[start].kind {
        LineKind::Leaf => (1, 1),
        LineKind::Close => (1, 0),
        LineKind::Open => {
            let mut depth = 1usize;
            let mut tags = 1usize;
            let mut k = start + 1;
            while k < lines.len() {
                match lines[k].kind {
                    LineKind::Leaf => tags += 1,
                    LineKind::Open => {
                        depth += 1;
                        tags += 1;
                    }
                    LineKind::Close => {
                        depth -= 1;
                        if depth == 0 {
                            return (k - start + 1, tags);
                        }
                    }
                }
                k += 1;
            }
            // The close line was matched elsewhere; only the opener differs.
            (1, 1)
        }
    }
}

fn push_change(actions: &mut Vec<DiffAction>, removal: bool, tags: usize, subject: String) {
    let kind = match (removal, tags >= 2) {
        (true, true) => DiffKind::BranchRemove,
        (true, false) => DiffKind::NodeRemove,
        (false, true) => DiffKind::BranchAdd,
        (false, false) => DiffKind::NodeAdd,
    };
    actions.push(DiffAction {
        kind,
        tag_count: tags,
        subject,
    });
}

fn classify_block(dels: &[&Line], inss: &[&Line], actions: &mut Vec<DiffAction>) {
    let mut i = 0;
    let mut j = 0;
    loop {
        while i < dels.len() && dels[i].kind == LineKind::Close {
            i += 1;
        }
        while j < inss.len() && inss[j].kind == LineKind::Close {
            j += 1;
        }
        match (i < dels.len(), j < inss.len()) {
            (false, false) => return,
            (true, false) => {
                let (span, tags) = subtree_span(dels, i);
                push_change(actions, true, tags, key_of(dels[i]));
                i += span;
            }
            (false, true) => {
                let (span, tags) = subtree_span(inss, j);
                push_change(actions, false, tags, key_of(inss[j]));
                j += span;
            }
            (true, true) => {
                let d = dels[i];
                let n = inss[j];
                if d.key == n.key && d.indent == n.indent {
                    // Same node on both sides (leaf on one, opener on the
                    // other): the node itself is unchanged, its child lines
                    // carry the difference.
                    i += 1;
                    j += 1;
                    continue;
                }
                let (dspan, dtags) = subtree_span(dels, i);
                let (nspan, ntags) = subtree_span(inss, j);
                if dtags == 1 && ntags == 1 && d.indent == n.indent {
                    actions.push(DiffAction {
                        kind: DiffKind::TagModification,
                        tag_count: 1,
                        subject: format!("{} -> {}", key_of(d), key_of(n)),
                    });
                } else {
                    push_change(actions, true, dtags, key_of(d));
                    push_change(actions, false, ntags, key_of(n));
                }
                i += dspan;
                j += nspan;
            }
        }
    }
}

fn key_of(line: &Line) -> String {
    line.key.clone().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taghash::TagHash;

    fn fig9_taghash_1() -> TagHash {
        TagHash::node(
            "li.00",
            vec![
                TagHash::leaf("div.01"),
                TagHash::leaf("div.00"),
                TagHash::leaf("p.00"),
                TagHash::leaf("a.00"),
                TagHash::leaf("div.00"),
                TagHash::leaf("a.00"),
            ],
        )
    }

    fn fig9_taghash_2() -> TagHash {
        TagHash::node(
            "li.00",
            vec![
                TagHash::leaf("div.00"),
                TagHash::leaf("p.00"),
                TagHash::leaf("dl.00"),
                TagHash::leaf("p.00"),
            ],
        )
    }

    #[test]
    fn classify_identical_is_empty() {
        let s = serialize(&fig9_taghash_1());
        assert!(classify_diff(&s, &s).is_empty());
    }

    #[test]
    fn classify_example_diff_actions() {
        // Diffing the four-child tree into the six-child tree yields two
        // added nodes and two relabelled nodes.
        let a = serialize(&fig9_taghash_2());
        let b = serialize(&fig9_taghash_1());
        let actions = classify_diff(&a, &b);
        let summary: Vec<(DiffKind, usize, &str)> = actions
            .iter()
            .map(|x| (x.kind, x.tag_count, x.subject.as_str()))
            .collect();
        assert_eq!(
            summary,
            vec![
                (DiffKind::NodeAdd, 1, "div.01"),
                (DiffKind::TagModification, 1, "dl.00 -> a.00"),
                (DiffKind::TagModification, 1, "p.00 -> div.00"),
                (DiffKind::NodeAdd, 1, "a.00"),
            ]
        );
    }

    #[test]
    fn classify_new_children_under_existing_leaf() {
        let a = serialize(&TagHash::leaf("p.00"));
        let b = serialize(&TagHash::node(
            "p.00",
            vec![TagHash::leaf("b.00"), TagHash::leaf("i.00")],
        ));
        let actions = classify_diff(&a, &b);
        // The p node matches both sides; its two new leaf children are
        // separate additions (canonical outcome under one-node-per-line).
        assert_eq!(actions.len(), 2);
        assert!(actions.iter().all(|x| x.kind == DiffKind::NodeAdd && x.tag_count == 1));
        let total_penalty: f64 = actions
            .iter()
            .map(|x| action_penalty(x, &PenaltyConfig::default()))
            .sum();
        assert_eq!(total_penalty, 2.0);
    }

    #[test]
    fn classify_whole_branch_addition() {
        let a = serialize(&TagHash::node("li.00", vec![TagHash::leaf("p.00")]));
        let b = serialize(&TagHash::node(
            "li.00",
            vec![
                TagHash::leaf("p.00"),
                TagHash::node("ul.00", vec![TagHash::leaf("li.00"), TagHash::leaf("li.00")]),
            ],
        ));
        let actions = classify_diff(&a, &b);
        assert_eq!(actions.len(), 1);
        assert_eq!(actions[0].kind, DiffKind::BranchAdd);
        assert_eq!(actions[0].tag_count, 3);
        assert_eq!(actions[0].subject, "ul.00");
    }

    #[test]
    fn similarity_identity_is_exactly_one() {
        let cfg = PenaltyConfig::default();
        let h = fig9_taghash_1();
        assert_eq!(similarity(&h, &h, &cfg), 1.0);
    }

    #[test]
    fn similarity_example_pair_score() {
        // Penalty 1 + 0.5 + 0.5 + 1 = 3 over max(7, 5) tags.
        let cfg = PenaltyConfig::default();
        let got = similarity(&fig9_taghash_1(), &fig9_taghash_2(), &cfg);
        let want = 1.0 - 3.0 / 7.0;
        assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
    }

    #[test]
    fn similarity_single_relabel() {
        let cfg = PenaltyConfig::default();
        let got = similarity(&TagHash::leaf("li.00"), &TagHash::leaf("div.00"), &cfg);
        assert!((got - 0.5).abs() < 1e-12);
    }

    #[test]
    fn threshold_gates_the_example_pair() {
        let mut cfg = PenaltyConfig {
            similarity_threshold: 0.99,
            ..PenaltyConfig::default()
        };
        let h = fig9_taghash_1();
        assert!(is_similar(&h, &h, &cfg));

        cfg.similarity_threshold = 0.8;
        assert!(!is_similar(&fig9_taghash_1(), &fig9_taghash_2(), &cfg));
        cfg.similarity_threshold = 0.5;
        assert!(is_similar(&fig9_taghash_1(), &fig9_taghash_2(), &cfg));
    }

    #[test]
    fn score_floors_at_zero() {
        let cfg = PenaltyConfig::default();
        let tiny = TagHash::leaf("p.00");
        let busy = TagHash::node(
            "li.00",
            vec![
                TagHash::node("div.00", vec![TagHash::leaf("a.00"), TagHash::leaf("b.00")]),
                TagHash::leaf("span.00"),
            ],
        );
        let got = similarity(&tiny, &busy, &cfg);
        assert_eq!(got, 0.0);
    }
}
