//! Value types accepted both as flags and in JSON config files, and the flag-over-file merge.

use std::fmt;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

/// Integers written as a comma-separated list of values and inclusive ranges, e.g. `1..8,16,-3..-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ints {
    text: String,
    values: Vec<i64>,
}

impl Ints {
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// The values as positive integers, or an error naming `key`.
    pub fn positive(&self, key: &str) -> Result<Vec<u64>, String> {
        self.values
            .iter()
            .map(|&v| {
                u64::try_from(v).ok().filter(|&v| v > 0).ok_or_else(|| format!("{key}: {v} is not a positive integer"))
            })
            .collect()
    }
}

impl FromStr for Ints {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut values = Vec::new();
        for part in s.split(',').map(str::trim) {
            let bad = || format!("cannot read `{part}` as an integer or an inclusive range a..b");
            match part.split_once("..") {
                Some((a, b)) => {
                    let a: i64 = a.trim().parse().map_err(|_| bad())?;
                    let b: i64 = b.trim().parse().map_err(|_| bad())?;
                    if a > b {
                        return Err(format!("empty range `{part}`"));
                    }
                    values.extend(a..=b);
                }
                None => values.push(part.parse().map_err(|_| bad())?),
            }
        }
        Ok(Self { text: s.split(',').map(str::trim).collect::<Vec<_>>().join(","), values })
    }
}

impl fmt::Display for Ints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for Ints {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Ints {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            One(i64),
            List(Vec<i64>),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Text(t) => t,
            Raw::One(v) => v.to_string(),
            Raw::List(v) => v.iter().map(i64::to_string).collect::<Vec<_>>().join(","),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Clap value parser for JSON-valued flags.
pub fn json<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_str(s).map_err(|e| e.to_string())
}

/// Overlays the non-null fields of `flags` onto `file` and parses the result strictly.
pub fn merge<P: Serialize + DeserializeOwned>(file: Option<Value>, flags: &P) -> Result<P, String> {
    let mut base = match file {
        None | Some(Value::Null) => serde_json::Map::new(),
        Some(Value::Object(m)) => m,
        Some(other) => return Err(format!("params: expected an object, got {other}")),
    };
    match serde_json::to_value(flags).map_err(|e| e.to_string())? {
        Value::Object(m) => {
            for (k, v) in m {
                if !v.is_null() {
                    base.insert(k, v);
                }
            }
        }
        _ => unreachable!("parameter structs serialize to objects"),
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| format!("params: {e}"))
}
