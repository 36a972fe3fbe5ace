//! Output envelopes and rendering.
//!
//! Every command emits one envelope on stdout: the command name, the
//! fully resolved inputs (after defaults, env fallbacks and rate-to-count
//! conversion), the results, and — for stochastic commands only — the
//! seed that was actually used. JSON is the default and is stable byte
//! for byte given identical inputs; markdown renders the same values for
//! humans.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Markdown,
}

#[derive(Serialize)]
pub struct Envelope<I: Serialize, R: Serialize> {
    pub command: &'static str,
    pub inputs: I,
    pub results: R,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl<I: Serialize, R: Serialize> Envelope<I, R> {
    pub fn stochastic(command: &'static str, inputs: I, results: R, seed: u64) -> Self {
        Self { command, inputs, results, seed: Some(seed) }
    }

    pub fn pure(command: &'static str, inputs: I, results: R) -> Self {
        Self { command, inputs, results, seed: None }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut json =
                    serde_json::to_string_pretty(self).expect("envelope serialization");
                json.push('\n');
                json
            }
            OutputFormat::Markdown => self.render_markdown(),
        }
    }

    fn render_markdown(&self) -> String {
        let value = serde_json::to_value(self).expect("envelope serialization");
        let mut out = format!("# replicheck {}\n", self.command);
        for section in ["inputs", "results"] {
            out.push_str(&format!("\n## {section}\n\n"));
            out.push_str("| field | value |\n|---|---|\n");
            render_rows(&value[section], "", &mut out);
        }
        if let Some(seed) = self.seed {
            out.push_str(&format!("\nseed: {seed}\n"));
        }
        out
    }
}

/// Flatten nested objects into `a.b` rows; lists of pairs (histograms)
/// are summarized rather than dumped.
fn render_rows(value: &Value, prefix: &str, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (key, inner) in map {
                let path = if prefix.is_empty() {
                    key.clone()
                } else {
                    format!("{prefix}.{key}")
                };
                render_rows(inner, &path, out);
            }
        }
        Value::Array(items) => {
            out.push_str(&format!("| {prefix} | {} entries |\n", items.len()));
        }
        other => {
            out.push_str(&format!("| {prefix} | {other} |\n"));
        }
    }
}
