//! Deterministic reports: `key: value` blocks on stdout, optional JSON file.
//! Nothing time-dependent is recorded.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub sections: Vec<Block>,
    pub status: String,
}

/// A titled list of entries that keeps insertion order in every format.
#[derive(Debug, Clone)]
pub struct Block {
    pub title: String,
    pub entries: Vec<(String, String)>,
}

impl Serialize for Block {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("title", &self.title)?;
        m.serialize_entry("entries", &Entries(&self.entries))?;
        m.end()
    }
}

struct Entries<'a>(&'a [(String, String)]);

impl Serialize for Entries<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl Block {
    pub fn new(title: impl Into<String>) -> Self {
        Block {
            title: title.into(),
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }
}

impl Report {
    pub fn new(command: &str, config: Option<&str>, seed: Option<u64>) -> Self {
        Report {
            command: command.to_string(),
            config: config.map(str::to_string),
            seed,
            sections: Vec::new(),
            status: String::new(),
        }
    }

    pub fn add(&mut self, block: Block) {
        self.sections.push(block);
    }

    pub fn render(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        if let Some(c) = &self.config {
            out.push_str(&format!("config: {c}\n"));
        }
        if let Some(s) = self.seed {
            out.push_str(&format!("seed: {s}\n"));
        }
        for b in &self.sections {
            out.push_str(&format!("\n[{}]\n", b.title));
            for (k, v) in &b.entries {
                out.push_str(&format!("{k}: {v}\n"));
            }
        }
        out.push_str(&format!("\nstatus: {}\n", self.status));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Fixed-width scientific notation so reports compare byte for byte.
pub fn sci(x: f64) -> String {
    format!("{x:.3e}")
}
