//! Report structure and emitters. JSON output is deterministic except for
//! the `generated_unix` stamp, which golden comparisons strip.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct StmtResult {
    pub stmt: usize,
    pub line: usize,
    pub kind: String,
    pub text: String,
    pub value: Value,
    pub status: String,
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Summary {
    pub pass: u32,
    pub fail: u32,
    pub errors: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub script: String,
    pub engine: String,
    pub generated_unix: u64,
    pub results: Vec<StmtResult>,
    pub summary: Summary,
}

impl Report {
    pub fn new(script: &str, results: Vec<StmtResult>, summary: Summary) -> Self {
        let generated_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            script: script.to_string(),
            engine: format!("divforge {}", env!("CARGO_PKG_VERSION")),
            generated_unix,
            results,
            summary,
        }
    }

    /// Exit code 0 iff no assert failed and no statement errored.
    pub fn clean(&self) -> bool {
        self.summary.fail == 0 && self.summary.errors == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the timestamp removed, for golden comparisons.
    pub fn to_json_stable(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("generated_unix");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("script: {}\n", self.script));
        out.push_str(&format!("engine: {}\n", self.engine));
        for r in &self.results {
            let marker = match r.status.as_str() {
                "ok" => "ok  ",
                "fail" => "FAIL",
                _ => "ERR ",
            };
            out.push_str(&format!("[{marker}] {:>3} | {}\n", r.line, r.text));
            if r.status != "ok" || r.kind == "query" || r.kind == "expect_paper" {
                out.push_str(&format!("       {}\n", compact(&r.value)));
            }
            for t in &r.trace {
                out.push_str(&format!("       . {t}\n"));
            }
        }
        out.push_str(&format!(
            "summary: pass={} fail={} errors={}\n",
            self.summary.pass, self.summary.fail, self.summary.errors
        ));
        out
    }
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).unwrap_or_else(|_| "<unprintable>".into())
}
