use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// The supported XPath subset: a tag plus direct-child count predicates,
/// e.g. `//li[count(a)=1 and count(h3)=1 and count(p)=3]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructuralXPath {
    pub tag: String,
    /// `(child_tag, exact_count)` pairs, kept sorted by tag for determinism.
    pub predicates: Vec<(String, usize)>,
}

impl StructuralXPath {
    pub fn new(tag: impl Into<String>, mut predicates: Vec<(String, usize)>) -> Self {
        predicates.sort();
        StructuralXPath {
            tag: tag.into(),
            predicates,
        }
    }
}

impl fmt::Display for StructuralXPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "//{}", self.tag)?;
        if !self.predicates.is_empty() {
            let preds: Vec<String> = self
                .predicates
                .iter()
                .map(|(tag, n)| format!("count({tag})={n}"))
                .collect();
            write!(f, "[{}]", preds.join(" and "))?;
        }
        Ok(())
    }
}

impl FromStr for StructuralXPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let err = || Error::XPathParse(s.to_string());
        let t = s.trim();
        let rest = t.strip_prefix("//").ok_or_else(err)?.trim_start();
        let (tag, preds) = match rest.find('[') {
            None => (rest.trim(), ""),
            Some(open) => {
                if !rest.trim_end().ends_with(']') {
                    return Err(err());
                }
                let close = rest.rfind(']').unwrap();
                (rest[..open].trim(), rest[open + 1..close].trim())
            }
        };
        if tag.is_empty() || !tag.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(err());
        }
        let mut predicates = Vec::new();
        if !preds.is_empty() {
            for clause in preds.split(" and ") {
                let clause = clause.trim();
                let inner = clause
                    .strip_prefix("count(")
                    .and_then(|c| c.split_once(')'))
                    .ok_or_else(err)?;
                let count_tag = inner.0.trim();
                let value = inner
                    .1
                    .trim()
                    .strip_prefix('=')
                    .ok_or_else(err)?
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| err())?;
                if count_tag.is_empty() {
                    return Err(err());
                }
                predicates.push((count_tag.to_string(), value));
            }
        }
        Ok(StructuralXPath::new(tag, predicates))
    }
}

impl Serialize for StructuralXPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for StructuralXPath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_spaced_and_compact_forms() {
        let spaced: StructuralXPath = "// li [ count(a)=1 and count(h3)=1 and count(p)=3 ]"
            .parse()
            .unwrap();
        let compact: StructuralXPath = "//li[count(a)=1 and count(h3)=1 and count(p)=3]"
            .parse()
            .unwrap();
        assert_eq!(spaced, compact);
        assert_eq!(
            compact.to_string(),
            "//li[count(a)=1 and count(h3)=1 and count(p)=3]"
        );
    }

    #[test]
    fn predicates_sort_by_tag() {
        let x = StructuralXPath::new("li", vec![("ul".into(), 1), ("a".into(), 1)]);
        assert_eq!(x.to_string(), "//li[count(a)=1 and count(ul)=1]");
    }

    #[test]
    fn bare_tag_has_no_predicates() {
        let x: StructuralXPath = "//article".parse().unwrap();
        assert!(x.predicates.is_empty());
    }

    #[test]
    fn rejects_unsupported_syntax() {
        assert!("/li".parse::<StructuralXPath>().is_err());
        assert!("//li[position()=1]".parse::<StructuralXPath>().is_err());
        assert!("//li[count(a)>1]".parse::<StructuralXPath>().is_err());
        assert!("//li[count(a)=x]".parse::<StructuralXPath>().is_err());
    }
}
