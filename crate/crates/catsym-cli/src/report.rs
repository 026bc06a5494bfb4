//! Deterministic line-oriented reports with a content digest.
//!
//! A report is an ordered list of `key: value` fields. The digest covers
//! exactly the field lines, and timing is appended after the digest, so
//! two runs over the same input produce byte-identical output up to the
//! final timing line and identical digests always.

use std::time::Duration;

use sha2::{Digest, Sha256};

pub struct Report {
    fields: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { fields: vec![("command".to_string(), command.to_string())] }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.fields.push((key.into(), value.into()));
    }

    fn body(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.fields {
            out.push_str(k);
            out.push_str(": ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn digest(&self) -> String {
        format!("sha256:{:x}", Sha256::digest(self.body().as_bytes()))
    }

    pub fn render(&self, json: bool, elapsed: Duration) -> String {
        if json {
            self.render_json(elapsed)
        } else {
            self.render_text(elapsed)
        }
    }

    fn render_text(&self, elapsed: Duration) -> String {
        format!(
            "{}report.digest: {}\ntime.total_ms: {}\n",
            self.body(),
            self.digest(),
            elapsed.as_millis()
        )
    }

    fn render_json(&self, elapsed: Duration) -> String {
        let fields: Vec<serde_json::Value> =
            self.fields.iter().map(|(k, v)| serde_json::json!([k, v])).collect();
        let doc = serde_json::json!({
            "fields": fields,
            "digest": self.digest(),
            "time_total_ms": elapsed.as_millis() as u64,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}
