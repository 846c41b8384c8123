//! Repeating-structure discovery: bucket identical tag hashes, merge
//! similar buckets into clusters, reject nested duplicates, and emit a
//! structural xpath per surviving cluster.

use std::collections::{BTreeMap, HashMap};

use crate::dom::{Document, NodeId, StructuralXPath};
use crate::similarity::{is_similar, PenaltyConfig};
use crate::taghash::{serialize, tag_hash, TagHash};

/// Default anchor tags likely to hold UGC items.
pub const DEFAULT_TAG_FILTER: &[&str] = &["li", "div", "article", "tr", "section"];

pub const DEFAULT_MIN_CLUSTER_SIZE: usize = 3;

/// Per-page collection of tag hashes, bucketed by identical serialization.
#[derive(Debug)]
pub struct TagHashList {
    pub entries: Vec<(NodeId, TagHash)>,
    /// Bucket key is the byte-identical canonical serialization; buckets
    /// appear in document order of their first member.
    pub buckets: Vec<(String, Vec<NodeId>)>,
}

/// A bucket of structurally similar subtrees plus its structural xpath.
#[derive(Debug, Clone)]
pub struct Cluster {
    /// Member anchors in document order, nested duplicates removed.
    pub members: Vec<NodeId>,
    /// Tag hash of the seed bucket's first member.
    pub representative: TagHash,
    pub structural_xpath: StructuralXPath,
}

/// One entry per element whose tag is in `tag_filter` (every element when
/// the filter is empty), hashed to `depth` and grouped into exact buckets.
pub fn build_tag_hash_list(doc: &Document, tag_filter: &[String], depth: usize) -> TagHashList {
    let mut entries = Vec::new();
    for id in doc.elements() {
        let tag = doc.tag(id).unwrap_or("");
        if tag_filter.is_empty() || tag_filter.iter().any(|t| t == tag) {
            entries.push((id, tag_hash(doc, id, depth)));
        }
    }
    let mut buckets: Vec<(String, Vec<NodeId>)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (id, hash) in &entries {
        let key = serialize(hash);
        match index.get(&key) {
            Some(&i) => buckets[i].1.push(*id),
            None => {
                index.insert(key.clone(), buckets.len());
                buckets.push((key, vec![*id]));
            }
        }
    }
    TagHashList { entries, buckets }
}

/// True when `candidate` is a DOM descendant of some member whose tag hash
/// it also resembles. Nested children with a radically different structure
/// are not detected; that is a known limit of hash-based nesting checks.
pub fn detect_nested(
    doc: &Document,
    candidate: NodeId,
    members: &[NodeId],
    depth: usize,
    cfg: &PenaltyConfig,
) -> bool {
    let candidate_hash = tag_hash(doc, candidate, depth);
    members.iter().any(|&m| {
        m != candidate
            && doc.is_ancestor(m, candidate)
            && is_similar(&candidate_hash, &tag_hash(doc, m, depth), cfg)
    })
}

/// Greedily merge exact buckets into clusters: largest bucket first, each
/// remaining bucket joining when its representative is similar to the seed
/// bucket's first-member hash. Nested members are dropped afterwards, then
/// clusters below `min_cluster_size`.
pub fn merge_buckets(
    doc: &Document,
    list: &TagHashList,
    depth: usize,
    cfg: &PenaltyConfig,
    min_cluster_size: usize,
) -> Vec<Cluster> {
    let hashes: HashMap<NodeId, &TagHash> = list.entries.iter().map(|(id, h)| (*id, h)).collect();
    let mut order: Vec<usize> = (0..list.buckets.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(list.buckets[i].1.len()), list.buckets[i].1[0]));

    let mut used = vec![false; list.buckets.len()];
    let mut clusters = Vec::new();
    for &seed in &order {
        if used[seed] {
            continue;
        }
        used[seed] = true;
        let rep = hashes[&list.buckets[seed].1[0]].clone();
        let mut members = list.buckets[seed].1.clone();
        for &cand in &order {
            if used[cand] {
                continue;
            }
            let cand_rep = hashes[&list.buckets[cand].1[0]];
            if is_similar(&rep, cand_rep, cfg) {
                used[cand] = true;
                members.extend_from_slice(&list.buckets[cand].1);
            }
        }
        members.sort();
        let kept: Vec<NodeId> = members
            .iter()
            .copied()
            .filter(|&m| !detect_nested(doc, m, &members, depth, cfg))
            .collect();
        if kept.len() >= min_cluster_size {
            let xpath = structural_xpath(doc, &kept);
            clusters.push(Cluster {
                members: kept,
                representative: rep,
                structural_xpath: xpath,
            });
        }
    }
    clusters.sort_by_key(|c| c.members[0]);
    clusters
}

/// Build `//tag[count(c)=n and ...]` from the direct-child tag counts shared
/// by a strict majority of members. Tags without a majority count, or whose
/// majority count is zero, contribute no predicate.
pub fn structural_xpath(doc: &Document, members: &[NodeId]) -> StructuralXPath {
    let anchor_tag = doc.tag(members[0]).unwrap_or("div").to_string();
    let mut union: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let per_member: Vec<BTreeMap<String, usize>> = members
        .iter()
        .map(|&m| {
            let mut counts = BTreeMap::new();
            for c in doc.child_elements(m) {
                *counts.entry(doc.tag(c).unwrap().to_string()).or_insert(0) += 1;
            }
            counts
        })
        .collect();
    for counts in &per_member {
        for tag in counts.keys() {
            union.entry(tag.clone()).or_default();
        }
    }
    let mut predicates = Vec::new();
    for tag in union.keys() {
        let mut tally: BTreeMap<usize, usize> = BTreeMap::new();
        for counts in &per_member {
            *tally.entry(*counts.get(tag).unwrap_or(&0)).or_insert(0) += 1;
        }
        if let Some((count, _)) = tally.iter().find(|(_, votes)| **votes * 2 > members.len()) {
            if *count >= 1 {
                predicates.push((tag.clone(), *count));
            }
        }
    }
    StructuralXPath::new(anchor_tag, predicates)
}
