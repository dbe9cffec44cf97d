//! Canonical keys, the in-memory memo table and the cache file.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::sync::Mutex;

use thiserror::Error;

use crate::fibration::{Family, ZProblem};
use crate::problem::{ParseError, Problem};
use crate::Count;

pub const CACHE_HEADER: &str = "EGC-CACHE v1";

/// A memoized quantity. Text form is `PREFIX|payload`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CacheKey {
    X(Problem),
    W(Problem),
    Z(ZProblem),
    QQ(Family, u32, u32),
    HQ(Family, u32),
    HH(Family),
    HMQ(Family, u32),
    SS(Family),
}

impl fmt::Display for CacheKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CacheKey::X(p) => write!(f, "X|{p}"),
            CacheKey::W(p) => write!(f, "W|{p}"),
            CacheKey::Z(z) => write!(f, "Z|{z}"),
            CacheKey::QQ(b, e, e2) => write!(f, "QQ|{b} s={e},{e2}"),
            CacheKey::HQ(b, e) => write!(f, "HQ|{b} s={e}"),
            CacheKey::HH(b) => write!(f, "HH|{b}"),
            CacheKey::HMQ(b, e) => write!(f, "HMQ|{b} s={e}"),
            CacheKey::SS(b) => write!(f, "SS|{b}"),
        }
    }
}

fn split_slots(payload: &str) -> Result<(Family, Vec<u32>), ParseError> {
    let (base, slots) = match payload.rsplit_once(" s=") {
        Some((b, s)) => (b, Some(s)),
        None => (payload, None),
    };
    let fam: Family = base.parse()?;
    let slots = match slots {
        None => Vec::new(),
        Some(s) => s
            .split(',')
            .map(|x| x.parse().map_err(|_| ParseError(format!("bad slot {x:?}"))))
            .collect::<Result<_, _>>()?,
    };
    Ok((fam, slots))
}

impl FromStr for CacheKey {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let (prefix, payload) = s
            .split_once('|')
            .ok_or_else(|| ParseError(format!("missing key prefix in {s:?}")))?;
        let bad = || ParseError(format!("bad slots in key {s:?}"));
        Ok(match prefix {
            "X" => CacheKey::X(payload.parse()?),
            "W" => CacheKey::W(payload.parse()?),
            "Z" => CacheKey::Z(payload.parse()?),
            "QQ" | "HQ" | "HH" | "HMQ" | "SS" => {
                let (fam, slots) = split_slots(payload)?;
                match (prefix, slots.as_slice()) {
                    ("QQ", [a, b]) => CacheKey::QQ(fam, *a, *b),
                    ("HQ", [a]) => CacheKey::HQ(fam, *a),
                    ("HMQ", [a]) => CacheKey::HMQ(fam, *a),
                    ("HH", []) => CacheKey::HH(fam),
                    ("SS", []) => CacheKey::SS(fam),
                    _ => return Err(bad()),
                }
            }
            _ => return Err(ParseError(format!("unknown key prefix {prefix:?}"))),
        })
    }
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("integrity violation for {key}: stored {old}, new {new}")]
    Integrity { key: String, old: Count, new: Count },
    #[error("cache version mismatch: expected {CACHE_HEADER:?}, found {0:?}")]
    Version(String),
    #[error("malformed cache line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Concurrent idempotent map from keys to exact counts.
#[derive(Debug, Default)]
pub struct MemoStore {
    map: Mutex<HashMap<CacheKey, Count>>,
}

impl MemoStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, key: &CacheKey) -> Option<Count> {
        self.map.lock().unwrap().get(key).cloned()
    }

    pub fn store(&self, key: CacheKey, value: Count) -> Result<(), CacheError> {
        let mut map = self.map.lock().unwrap();
        if let Some(old) = map.get(&key) {
            if *old != value {
                return Err(CacheError::Integrity {
                    key: key.to_string(),
                    old: old.clone(),
                    new: value,
                });
            }
            return Ok(());
        }
        map.insert(key, value);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.map.lock().unwrap().clear();
    }

    /// Records as sorted `(key text, value)` pairs.
    pub fn records(&self) -> Vec<(String, Count)> {
        let map = self.map.lock().unwrap();
        let mut out: Vec<_> = map.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        out.sort();
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from(CACHE_HEADER);
        s.push('\n');
        for (k, v) in self.records() {
            s.push_str(&k);
            s.push('\t');
            s.push_str(&v.to_string());
            s.push('\n');
        }
        s
    }

    pub fn merge_text(&self, text: &str) -> Result<usize, CacheError> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        if header != CACHE_HEADER {
            return Err(CacheError::Version(header.to_string()));
        }
        let mut added = 0;
        for (idx, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let malformed = |reason: String| CacheError::Malformed {
                line: idx + 2,
                reason,
            };
            let (k, v) = line
                .split_once('\t')
                .ok_or_else(|| malformed("missing tab".into()))?;
            let key: CacheKey = k.parse().map_err(|e: ParseError| malformed(e.to_string()))?;
            let value: Count = v
                .parse()
                .map_err(|_| malformed(format!("bad value {v:?}")))?;
            self.store(key, value)?;
            added += 1;
        }
        Ok(added)
    }

    pub fn save(&self, path: &Path) -> Result<(), CacheError> {
        let mut f = fs::File::create(path)?;
        f.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn load(&self, path: &Path) -> Result<usize, CacheError> {
        let text = fs::read_to_string(path)?;
        self.merge_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn key(s: &str) -> CacheKey {
        s.parse().unwrap()
    }

    #[test]
    fn lookup_and_store() {
        let m = MemoStore::new();
        let k = key("X|g=0 n=3 d=1 h=1,2:1 i=1:4");
        assert_eq!(m.lookup(&k), None);
        m.store(k.clone(), BigInt::from(2)).unwrap();
        assert_eq!(m.lookup(&k), Some(BigInt::from(2)));
        m.store(k.clone(), BigInt::from(2)).unwrap();
        assert!(matches!(
            m.store(k, BigInt::from(3)),
            Err(CacheError::Integrity { .. })
        ));
    }

    #[test]
    fn key_text_round_trip() {
        for s in [
            "X|g=0 n=3 d=2 h=2,2:1 i=1:7",
            "W|g=1 n=2 d=3 h=1,1:3 i=0:9",
            "Z|n=2 d=4 i=0:11 D=q0.1+q0.2+q0.3+q0.4",
            "QQ|n=2 d=4 i=0:11 s=0,0",
            "HQ|n=2 d=4 i=0:11 s=0",
            "HH|n=2 d=4 i=0:11",
            "HMQ|n=2 d=3 i=0:8;1:1 s=1",
            "SS|n=2 d=4 i=0:11",
        ] {
            assert_eq!(key(s).to_string(), s);
        }
        assert!("Y|g=0".parse::<CacheKey>().is_err());
        assert!("QQ|n=2 d=4 i=0:11 s=0".parse::<CacheKey>().is_err());
    }

    #[test]
    fn save_load_round_trip() {
        let m = MemoStore::new();
        m.store(key("X|g=0 n=3 d=1 h=1,2:1 i=1:4"), BigInt::from(2)).unwrap();
        m.store(key("HH|n=2 d=4 i=0:11"), BigInt::from(390)).unwrap();
        let text = m.to_text();
        let m2 = MemoStore::new();
        assert_eq!(m2.merge_text(&text).unwrap(), 2);
        assert_eq!(m2.to_text(), text);

        let other = MemoStore::new();
        other.store(key("SS|n=2 d=4 i=0:11"), BigInt::from(-155)).unwrap();
        other.store(key("HH|n=2 d=4 i=0:11"), BigInt::from(390)).unwrap();
        m2.merge_text(&other.to_text()).unwrap();
        assert_eq!(m2.len(), 3);
    }

    #[test]
    fn load_rejects_bad_input() {
        let m = MemoStore::new();
        assert!(matches!(m.merge_text("EGC-CACHE v0\n"), Err(CacheError::Version(_))));
        assert!(matches!(
            m.merge_text("EGC-CACHE v1\nX|g=0 n=3 d=1 h=1,2:1 i=1:4 2\n"),
            Err(CacheError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            m.merge_text("EGC-CACHE v1\nX|g=0 n=3 d=1 h=1,2:1 i=1:4\tx\n"),
            Err(CacheError::Malformed { .. })
        ));
        m.merge_text("EGC-CACHE v1\nX|g=0 n=3 d=1 h=1,2:1 i=1:4\t2\n").unwrap();
        assert!(matches!(
            m.merge_text("EGC-CACHE v1\nX|g=0 n=3 d=1 h=1,2:1 i=1:4\t5\n"),
            Err(CacheError::Integrity { .. })
        ));
    }
}
