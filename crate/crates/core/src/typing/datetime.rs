//! Lenient datetime detection and optional normalization.
//!
//! Detection is deliberately permissive: a value counts as date-bearing when
//! it contains an absolute date, an ISO 8601 stamp, a bare clock time, or a
//! relative phrase ("16 minutes ago"). Content fields that merely embed a
//! date will fire too; the probability filter upstream is what keeps such
//! columns from being typed as datetimes.

use std::sync::LazyLock;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use regex::Regex;

const MONTHS: &str = "jan|feb|mar|apr|may|jun|jul|aug|sep|oct|nov|dec";

static PATTERNS: LazyLock<Vec<Regex>> = LazyLock::new(|| {
    let month_day = format!(r"\b\d{{1,2}}(st|nd|rd|th)?\s+({MONTHS})[a-z]*\.?(\s+\d{{2,4}})?\b");
    let day_month = format!(r"\b({MONTHS})[a-z]*\.?\s+\d{{1,2}}(st|nd|rd|th)?(\s*,?\s*\d{{2,4}})?\b");
    let sources = [
        month_day.as_str(),
        day_month.as_str(),
        // ISO 8601 dates and datetimes: 2015-01-29, 2015-01-29T15:15:55Z
        r"\b\d{4}-\d{2}-\d{2}([tT ]\d{2}:\d{2}(:\d{2})?([.,]\d+)?(z|Z|[+-]\d{2}:?\d{2})?)?\b",
        // Slashed or dotted numeric dates: 29/01/2015, 1.29.15
        r"\b\d{1,2}[/.]\d{1,2}[/.]\d{2,4}\b",
        // Clock times: 3:15:55pm, 15:04, 5:12 am
        r"\b\d{1,2}:\d{2}(:\d{2})?\s*([ap]\.?m\.?)?\b",
        // Relative phrases: 16 minutes ago, a day ago
        r"\b(\d+|a|an)\s+(second|minute|hour|day|week|month|year)s?\s+ago\b",
        r"\byesterday\b",
        r"\bjust now\b",
    ];
    sources
        .iter()
        .map(|s| Regex::new(&format!("(?i){s}")).unwrap())
        .collect()
});

/// True when the value contains any recognizable date or time expression.
pub fn contains_datetime(value: &str) -> bool {
    let v = value.trim();
    if v.is_empty() {
        return false;
    }
    PATTERNS.iter().any(|re| re.is_match(v))
}

const ABSOLUTE_FORMATS: &[&str] = &[
    "%d %b %Y %I:%M:%S%p",
    "%d %b %Y %I:%M%p",
    "%d %B %Y %I:%M:%S%p",
    "%d %b %Y %H:%M:%S",
    "%d %b %Y %H:%M",
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%d %H:%M",
    "%d/%m/%Y %H:%M:%S",
    "%d/%m/%Y %H:%M",
];

const DATE_ONLY_FORMATS: &[&str] = &["%d %b %Y", "%d %B %Y", "%Y-%m-%d", "%d/%m/%Y", "%b %d, %Y", "%B %d, %Y"];

/// Best-effort normalization of an absolute datetime to ISO 8601. Relative
/// phrases and bare times have no absolute value and pass through as `None`.
pub fn normalize_datetime(value: &str) -> Option<String> {
    let v = value.trim();
    let squashed = v.replace("  ", " ");
    for fmt in ABSOLUTE_FORMATS {
        if let Ok(dt) = NaiveDateTime::parse_from_str(&squashed, fmt) {
            return Some(dt.format("%Y-%m-%dT%H:%M:%S").to_string());
        }
    }
    for fmt in DATE_ONLY_FORMATS {
        if let Ok(d) = NaiveDate::parse_from_str(&squashed, fmt) {
            return Some(d.format("%Y-%m-%d").to_string());
        }
    }
    // Times on their own normalize to a bare time.
    for fmt in ["%I:%M:%S%p", "%I:%M%p", "%H:%M:%S", "%H:%M"] {
        if let Ok(t) = NaiveTime::parse_from_str(&squashed, fmt) {
            return Some(t.format("%H:%M:%S").to_string());
        }
    }
    None
}
