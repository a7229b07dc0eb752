use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Kv,
    Json,
}

/// Whether the command reached a definite answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Definite,
    Unknown,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Definite => 0,
            Status::Unknown => 2,
        }
    }
}

/// Ordered key/value results of one command.
pub struct Report {
    command: String,
    flags: Map<String, Value>,
    fields: Vec<(String, Value)>,
    pub status: Status,
}

impl Report {
    pub fn new(command: &str, flags: Map<String, Value>) -> Self {
        Report {
            command: command.to_string(),
            flags,
            fields: Vec::new(),
            status: Status::Definite,
        }
    }

    pub fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.push((key.to_string(), value.into()));
    }

    pub fn unknown(&mut self) {
        self.status = Status::Unknown;
    }

    pub fn render(&self, format: Format) -> String {
        let budget_status = match self.status {
            Status::Definite => "ok",
            Status::Unknown => "exhausted",
        };
        match format {
            Format::Json => {
                let mut results = Map::new();
                for (k, v) in &self.fields {
                    results.insert(k.clone(), v.clone());
                }
                let doc = json!({
                    "tool": "dtc",
                    "version": env!("CARGO_PKG_VERSION"),
                    "command": self.command,
                    "flags": self.flags,
                    "status": budget_status,
                    "results": results,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
                s.push('\n');
                s
            }
            Format::Kv => {
                let mut out = format!(
                    "tool=dtc\nversion={}\ncommand={}\nflags={}\nstatus={budget_status}\n",
                    env!("CARGO_PKG_VERSION"),
                    self.command,
                    Value::Object(self.flags.clone())
                );
                for (k, v) in &self.fields {
                    match v {
                        Value::String(s) => out.push_str(&format!("{k}={s}\n")),
                        other => out.push_str(&format!("{k}={other}\n")),
                    }
                }
                out
            }
        }
    }
}
