//! UGC filtering, role assignment, wrapper construction and application.
//!
//! A wrapper pairs a structural xpath with the field paths playing the
//! name/datetime/content roles. Serialized form:
//!
//! ```json
//! {
//!   "//li[count(a)=1 and count(h3)=1 and count(p)=3]": {
//!     "other": [],
//!     "content": ["p[2]/text"],
//!     "datetime": ["p[1]/inner_text"],
//!     "name": ["h3[1]/string"]
//!   }
//! }
//! ```

use std::collections::HashMap;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::config::Config;
use crate::dom::{Document, FieldPath, StructuralXPath, Terminal};
use crate::error::{Error, Result};
use crate::miner::{build_tag_hash_list, merge_buckets, Cluster};
use crate::typing::{normalize_datetime, type_cluster, FieldType, TypeMap, TypedField};

/// Role assignment for a UGC cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct RoleMap {
    pub name: FieldPath,
    pub datetime: FieldPath,
    pub content: FieldPath,
    pub other: Vec<FieldPath>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wrapper {
    pub structural_xpath: StructuralXPath,
    pub roles: RoleMap,
}

/// One extracted record. Field values stay as raw strings; Fig-style
/// output keeps every field a list even when it holds a single value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Record {
    pub other: Vec<String>,
    pub content: Vec<String>,
    pub datetime: Vec<String>,
    pub name: Vec<String>,
}

/// A structure is UGC when it carries at least one string field (origin),
/// one datetime field (timestamp) and one text field (message).
pub fn is_ugc(map: &TypeMap) -> bool {
    !map.string.is_empty() && !map.datetime.is_empty() && !map.text.is_empty()
}

/// Pick the most appropriate field per role: the highest-probability field
/// of the required type, earliest discovery order on ties. Remaining typed
/// fields land in `other`, except href-attribute urls, which exist for
/// navigation rather than record data.
pub fn select_roles(map: &TypeMap, fields: &[TypedField]) -> Result<RoleMap> {
    if !is_ugc(map) {
        return Err(Error::NotUgc);
    }
    // Highest probability wins; discovery order breaks ties.
    let pick = |ty: FieldType| -> FieldPath {
        fields
            .iter()
            .filter(|f| f.datatype == ty)
            .fold(None::<&TypedField>, |best, f| match best {
                Some(b) if f.probability <= b.probability => Some(b),
                _ => Some(f),
            })
            .map(|f| f.path.clone())
            .unwrap()
    };
    let name = pick(FieldType::String);
    let datetime = pick(FieldType::Datetime);
    let content = pick(FieldType::Text);
    let other = fields
        .iter()
        .filter(|f| f.path != name && f.path != datetime && f.path != content)
        .filter(|f| !(f.datatype == FieldType::Url && matches!(f.path.terminal, Terminal::Attr(_))))
        .map(|f| f.path.clone())
        .collect();
    Ok(RoleMap {
        name,
        datetime,
        content,
        other,
    })
}

pub fn build_wrapper(cluster: &Cluster, roles: RoleMap) -> Wrapper {
    Wrapper {
        structural_xpath: cluster.structural_xpath.clone(),
        roles,
    }
}

/// Result of applying a wrapper to one document.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub records: Vec<Record>,
    /// Nodes matched by the structural xpath.
    pub matched: usize,
    /// Matches dropped because a mandatory role path did not resolve.
    pub dropped: usize,
}

/// Extract records from every structural match, in document order. Matches
/// missing any of name/datetime/content are dropped and counted.
pub fn apply_wrapper(wrapper: &Wrapper, doc: &Document) -> Extraction {
    let matches = doc.select_structural(&wrapper.structural_xpath);
    let matched = matches.len();
    let mut records = Vec::new();
    let mut dropped = 0;
    for node in matches {
        let name = doc.resolve_field(node, &wrapper.roles.name);
        let datetime = doc.resolve_field(node, &wrapper.roles.datetime);
        let content = doc.resolve_field(node, &wrapper.roles.content);
        match (name, datetime, content) {
            (Some(name), Some(datetime), Some(content)) => {
                let other = wrapper
                    .roles
                    .other
                    .iter()
                    .filter_map(|p| doc.resolve_field(node, p))
                    .collect();
                records.push(Record {
                    other,
                    content: vec![content],
                    datetime: vec![datetime],
                    name: vec![name],
                });
            }
            _ => dropped += 1,
        }
    }
    Extraction {
        records,
        matched,
        dropped,
    }
}

/// A discovered wrapper together with the records it extracted from the
/// document it was induced on.
#[derive(Debug, Clone)]
pub struct Discovery {
    pub cluster: Cluster,
    pub type_map: TypeMap,
    pub wrapper: Wrapper,
    pub records: Vec<Record>,
    pub dropped: usize,
}

/// End-to-end single-document pipeline: mine clusters, type their fields,
/// keep the UGC ones, build wrappers and extract. Returns one entry per
/// UGC cluster; duplicate xpaths keep the first wrapper only.
pub fn discover(doc: &Document, cfg: &Config) -> Vec<Discovery> {
    let list = build_tag_hash_list(doc, &cfg.miner.tag_filter, cfg.miner.canopy_depth);
    let clusters = merge_buckets(
        doc,
        &list,
        cfg.miner.canopy_depth,
        &cfg.similarity,
        cfg.miner.min_cluster_size,
    );
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for cluster in clusters {
        let (fields, map) = type_cluster(doc, &cluster, cfg.miner.canopy_depth, &cfg.similarity, &cfg.typing);
        if !is_ugc(&map) {
            continue;
        }
        let roles = match select_roles(&map, &fields) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let wrapper = build_wrapper(&cluster, roles);
        if !seen.insert(wrapper.structural_xpath.to_string()) {
            continue;
        }
        let extraction = apply_wrapper(&wrapper, doc);
        out.push(Discovery {
            cluster,
            type_map: map,
            wrapper,
            records: extraction.records,
            dropped: extraction.dropped,
        });
    }
    out
}

/// Rewrite absolute datetime values to ISO 8601 where possible; values that
/// cannot be pinned to an absolute instant pass through unchanged.
pub fn normalize_record_datetimes(record: &Record) -> Record {
    let mut out = record.clone();
    out.datetime = record
        .datetime
        .iter()
        .map(|v| normalize_datetime(v).unwrap_or_else(|| v.clone()))
        .collect();
    out
}

#[derive(Serialize, Deserialize)]
struct RoleRepr {
    other: Vec<String>,
    content: Vec<String>,
    datetime: Vec<String>,
    name: Vec<String>,
}

impl Serialize for Wrapper {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = RoleRepr {
            other: self.roles.other.iter().map(|p| p.to_string()).collect(),
            content: vec![self.roles.content.to_string()],
            datetime: vec![self.roles.datetime.to_string()],
            name: vec![self.roles.name.to_string()],
        };
        let mut map = serializer.serialize_map(Some(1))?;
        map.serialize_entry(&self.structural_xpath.to_string(), &repr)?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for Wrapper {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw: HashMap<String, RoleRepr> = HashMap::deserialize(deserializer)?;
        if raw.len() != 1 {
            return Err(DeError::custom("wrapper must hold exactly one xpath entry"));
        }
        let (xpath, repr) = raw.into_iter().next().unwrap();
        let structural_xpath: StructuralXPath = xpath.parse().map_err(DeError::custom)?;
        let parse_one = |vals: &[String], role: &str| -> std::result::Result<FieldPath, D::Error> {
            vals.first()
                .ok_or_else(|| DeError::custom(format!("wrapper is missing the {role} role")))?
                .parse()
                .map_err(DeError::custom)
        };
        let other = repr
            .other
            .iter()
            .map(|p| p.parse().map_err(DeError::custom))
            .collect::<std::result::Result<Vec<FieldPath>, _>>()?;
        Ok(Wrapper {
            structural_xpath,
            roles: RoleMap {
                name: parse_one(&repr.name, "name")?,
                datetime: parse_one(&repr.datetime, "datetime")?,
                content: parse_one(&repr.content, "content")?,
                other,
            },
        })
    }
}

impl Wrapper {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("wrapper serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Wrapper> {
        serde_json::from_str(text).map_err(|e| Error::WrapperParse(e.to_string()))
    }
}
