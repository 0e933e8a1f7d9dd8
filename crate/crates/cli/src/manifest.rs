use serde::Serialize;
use serde_json::{json, Value};

/// Provenance block written at the top of every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub params: Value,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl RunManifest {
    pub fn new(subcommand: &'static str, params: Value, seed: Option<u64>, stamp: bool) -> Self {
        Self {
            tool: env!("CARGO_BIN_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            params,
            seed,
            timestamp: stamp.then(|| chrono::Utc::now().to_rfc3339()),
        }
    }

    /// `# key: value` lines for CSV and text outputs.
    pub fn comment_lines(&self) -> String {
        let mut out = format!("# {} {} {}\n", self.tool, self.version, self.subcommand);
        if let Value::Object(map) = &self.params {
            for (k, v) in map {
                out.push_str(&format!("# {k}: {v}\n"));
            }
        }
        let listed = matches!(&self.params, Value::Object(m) if m.contains_key("seed"));
        if let (Some(seed), false) = (self.seed, listed) {
            out.push_str(&format!("# seed: {seed}\n"));
        }
        if let Some(ts) = &self.timestamp {
            out.push_str(&format!("# timestamp: {ts}\n"));
        }
        out
    }

    pub fn wrap(&self, result: impl Serialize) -> Value {
        json!({ "manifest": self, "result": result })
    }
}
