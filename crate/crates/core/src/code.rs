//! Hierarchical misconception codes such as `ITER.3.b.ii.A`.
//!
//! The first segment names the control structure (`SEL` or `ITER`). Deeper
//! segments follow a fixed level scheme: arabic numerals, lowercase latin
//! letters, lowercase roman numerals, uppercase latin letters and uppercase
//! roman numerals. Every segment is stored as its ordinal value, so ordering
//! is plain lexicographic comparison of the ordinal vectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid misconception code `{text}`: {reason}")]
pub struct CodeParseError {
    pub text: String,
    pub reason: String,
}

/// Control structure a code belongs to. `Sel` sorts before `Iter`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Domain {
    Sel,
    Iter,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Sel => "SEL",
            Domain::Iter => "ITER",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Level {
    Arabic,
    Lower,
    LowerRoman,
    Upper,
    UpperRoman,
}

const LEVELS: [Level; 5] = [
    Level::Arabic,
    Level::Lower,
    Level::LowerRoman,
    Level::Upper,
    Level::UpperRoman,
];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MisconceptionCode {
    domain: Domain,
    // ordinals of the segments below the domain, all >= 1
    path: Vec<u32>,
}

impl MisconceptionCode {
    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Number of segments including the domain.
    pub fn depth(&self) -> usize {
        self.path.len() + 1
    }

    pub fn is_root(&self) -> bool {
        self.path.is_empty()
    }

    pub fn root(domain: Domain) -> Self {
        MisconceptionCode {
            domain,
            path: Vec::new(),
        }
    }

    pub fn parent(&self) -> Option<MisconceptionCode> {
        if self.path.is_empty() {
            return None;
        }
        let mut path = self.path.clone();
        path.pop();
        Some(MisconceptionCode {
            domain: self.domain,
            path,
        })
    }

    /// All proper prefixes, shortest first.
    pub fn proper_prefixes(&self) -> Vec<MisconceptionCode> {
        (0..self.path.len())
            .map(|n| MisconceptionCode {
                domain: self.domain,
                path: self.path[..n].to_vec(),
            })
            .collect()
    }

    /// True iff `prefix` is a proper prefix of `self`.
    pub fn has_proper_prefix(&self, prefix: &MisconceptionCode) -> bool {
        self.domain == prefix.domain
            && prefix.path.len() < self.path.len()
            && self.path.starts_with(&prefix.path)
    }

    /// Renders the long form used in prose, e.g. `Iteration-(3)-(b)-(ii)-(A)`.
    pub fn long_form(&self) -> String {
        let mut out = String::from(match self.domain {
            Domain::Sel => "Selection",
            Domain::Iter => "Iteration",
        });
        for (i, v) in self.path.iter().enumerate() {
            out.push_str("-(");
            out.push_str(&render_segment(LEVELS[i], *v));
            out.push(')');
        }
        out
    }

    fn parse_segments<'a>(
        text: &str,
        domain: &str,
        segs: impl Iterator<Item = &'a str>,
    ) -> Result<Self, CodeParseError> {
        let err = |reason: &str| CodeParseError {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let domain = match domain {
            "SEL" | "Selection" => Domain::Sel,
            "ITER" | "Iteration" => Domain::Iter,
            _ => return Err(err("first segment must be SEL or ITER")),
        };
        let mut path = Vec::new();
        for (i, seg) in segs.enumerate() {
            let level = *LEVELS.get(i).ok_or_else(|| err("too many segments"))?;
            let v = parse_segment(level, seg).ok_or_else(|| {
                err(&format!("segment `{seg}` does not fit level {}", i + 2))
            })?;
            path.push(v);
        }
        Ok(MisconceptionCode { domain, path })
    }
}

fn parse_segment(level: Level, seg: &str) -> Option<u32> {
    let v = match level {
        Level::Arabic => {
            if seg.is_empty() || !seg.bytes().all(|b| b.is_ascii_digit()) || seg.starts_with('0') {
                return None;
            }
            seg.parse().ok()?
        }
        Level::Lower | Level::Upper => {
            let mut chars = seg.chars();
            let c = chars.next()?;
            if chars.next().is_some() {
                return None;
            }
            let base = if level == Level::Lower { 'a' } else { 'A' };
            if !(base..=(if level == Level::Lower { 'z' } else { 'Z' })).contains(&c) {
                return None;
            }
            c as u32 - base as u32 + 1
        }
        Level::LowerRoman | Level::UpperRoman => {
            let upper = level == Level::UpperRoman;
            if seg.is_empty()
                || !seg.chars().all(|c| {
                    if upper {
                        matches!(c, 'I' | 'V' | 'X')
                    } else {
                        matches!(c, 'i' | 'v' | 'x')
                    }
                })
            {
                return None;
            }
            roman_value(&seg.to_ascii_lowercase())?
        }
    };
    // reject non-canonical spellings such as "iiii" or "01"
    (render_segment(level, v) == seg).then_some(v)
}

fn roman_value(s: &str) -> Option<u32> {
    let digit = |c| match c {
        'i' => Some(1),
        'v' => Some(5),
        'x' => Some(10),
        _ => None,
    };
    let vals: Vec<u32> = s.chars().map(digit).collect::<Option<_>>()?;
    let mut total = 0;
    for (i, v) in vals.iter().enumerate() {
        if vals.get(i + 1).is_some_and(|n| n > v) {
            total -= *v as i64;
        } else {
            total += *v as i64;
        }
    }
    (1..=39).contains(&total).then_some(total as u32)
}

fn to_roman(mut v: u32) -> String {
    let mut out = String::new();
    for (val, sym) in [(10, "x"), (9, "ix"), (5, "v"), (4, "iv"), (1, "i")] {
        while v >= val {
            out.push_str(sym);
            v -= val;
        }
    }
    out
}

fn render_segment(level: Level, v: u32) -> String {
    match level {
        Level::Arabic => v.to_string(),
        Level::Lower => char::from_u32('a' as u32 + v - 1).map_or_else(String::new, String::from),
        Level::Upper => char::from_u32('A' as u32 + v - 1).map_or_else(String::new, String::from),
        Level::LowerRoman => to_roman(v),
        Level::UpperRoman => to_roman(v).to_ascii_uppercase(),
    }
}

impl fmt::Display for MisconceptionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.domain.as_str())?;
        for (i, v) in self.path.iter().enumerate() {
            write!(f, ".{}", render_segment(LEVELS[i], *v))?;
        }
        Ok(())
    }
}

impl FromStr for MisconceptionCode {
    type Err = CodeParseError;

    /// Accepts the dotted form (`ITER.3.b.ii.A`) and the long prose form
    /// (`Iteration-(3)-(b)-(ii)-(A)`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.contains("-(") {
            let mut parts = t.split('-');
            let domain = parts.next().unwrap_or_default();
            let segs: Vec<&str> = parts
                .map(|p| p.strip_prefix('(').and_then(|p| p.strip_suffix(')')))
                .collect::<Option<_>>()
                .ok_or_else(|| CodeParseError {
                    text: s.to_string(),
                    reason: "long form segments must be parenthesized".into(),
                })?;
            return Self::parse_segments(s, domain, segs.into_iter());
        }
        let mut parts = t.split('.');
        let domain = parts.next().unwrap_or_default();
        Self::parse_segments(s, domain, parts)
    }
}

impl Serialize for MisconceptionCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MisconceptionCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn code(s: &str) -> MisconceptionCode {
        s.parse().unwrap()
    }

    #[test]
    fn parses_deep_codes() {
        let c = code("SEL.4.c.ii.A.II");
        assert_eq!(c.depth(), 6);
        assert_eq!(c.to_string(), "SEL.4.c.ii.A.II");
        assert_eq!(c.parent().unwrap().to_string(), "SEL.4.c.ii.A");
    }

    #[test]
    fn long_form_round_trips() {
        let c = code("Iteration-(3)-(b)-(ii)-(A)");
        assert_eq!(c, code("ITER.3.b.ii.A"));
        assert_eq!(c.long_form(), "Iteration-(3)-(b)-(ii)-(A)");
    }

    #[test]
    fn rejects_bad_segments() {
        for bad in ["", "LOOP.1", "SEL.a", "SEL.1.1", "SEL.1.a.iiii", "SEL.1.a.I", "SEL.01", "ITER.1.a.i.A.I.x", "SEL..1"] {
            assert!(bad.parse::<MisconceptionCode>().is_err(), "{bad}");
        }
    }

    #[test]
    fn ordering_is_by_segment_value() {
        assert!(code("SEL.5.b") < code("ITER.1.a"));
        assert!(code("ITER.3.b.ii.A") < code("ITER.3.b.iii"));
        assert!(code("ITER.3.b.iv") < code("ITER.3.b.v"));
        assert!(code("ITER.3.b.ix") < code("ITER.3.b.x"));
        assert!(code("ITER.2") < code("ITER.10"));
        assert!(code("ITER.3") < code("ITER.3.a"));
    }

    #[test]
    fn prefixes() {
        let c = code("ITER.7.a.i");
        let p: Vec<String> = c.proper_prefixes().iter().map(|p| p.to_string()).collect();
        assert_eq!(p, ["ITER", "ITER.7", "ITER.7.a"]);
        assert!(c.has_proper_prefix(&code("ITER.7")));
        assert!(!c.has_proper_prefix(&c));
        assert!(!c.has_proper_prefix(&code("SEL.7")));
    }

    fn arb_code() -> impl Strategy<Value = MisconceptionCode> {
        (prop::bool::ANY, prop::collection::vec(1u32..=26, 0..=5)).prop_map(|(sel, path)| {
            let path = path
                .into_iter()
                .enumerate()
                .map(|(i, v)| if matches!(LEVELS[i], Level::LowerRoman | Level::UpperRoman) { v.min(39) } else { v })
                .collect();
            MisconceptionCode {
                domain: if sel { Domain::Sel } else { Domain::Iter },
                path,
            }
        })
    }

    proptest! {
        #[test]
        fn text_form_round_trips(c in arb_code()) {
            let text = c.to_string();
            prop_assert_eq!(text.parse::<MisconceptionCode>().unwrap(), c.clone());
            prop_assert_eq!(c.long_form().parse::<MisconceptionCode>().unwrap(), c);
        }

        #[test]
        fn order_is_total_and_consistent(a in arb_code(), b in arb_code()) {
            let ab = a.cmp(&b);
            prop_assert_eq!(ab.reverse(), b.cmp(&a));
            prop_assert_eq!(ab == std::cmp::Ordering::Equal, a == b);
        }
    }
}
