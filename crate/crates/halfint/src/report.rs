//! Report assembly: a header with the full configuration, then a JSON body or
//! a CSV table.

use serde_json::{json, Value};

use crate::config::RunConfig;

/// A failed identity with both sides.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub identity: String,
    pub lhs: String,
    pub rhs: String,
}

impl Failure {
    pub fn new(identity: impl Into<String>, lhs: impl ToString, rhs: impl ToString) -> Self {
        Failure {
            identity: identity.into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Json(Value),
    Csv {
        columns: Vec<&'static str>,
        rows: Vec<Vec<String>>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub body: Body,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn json(v: Value) -> Self {
        Report {
            body: Body::Json(v),
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn header(command: &str, args: &Value, cfg: &RunConfig) -> Value {
        json!({
            "program": "halfint",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "args": args,
            "config": cfg.to_json(),
        })
    }

    pub fn render(
        &self,
        command: &str,
        args: &Value,
        cfg: &RunConfig,
    ) -> Result<String, csv::Error> {
        let header = Self::header(command, args, cfg);
        match &self.body {
            Body::Json(v) => {
                let failures: Vec<Value> = self
                    .failures
                    .iter()
                    .map(|f| json!({ "identity": f.identity, "lhs": f.lhs, "rhs": f.rhs }))
                    .collect();
                let doc = json!({
                    "header": header,
                    "result": v,
                    "verification": { "passed": self.passed(), "failures": failures },
                });
                Ok(serde_json::to_string_pretty(&doc).expect("report serializes") + "\n")
            }
            Body::Csv { columns, rows } => {
                let mut out = String::new();
                for (k, v) in header.as_object().expect("header is an object") {
                    out += &format!("# {k}={v}\n");
                }
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(columns)?;
                for r in rows {
                    w.write_record(r)?;
                }
                out += &String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
                    .expect("csv is utf-8");
                Ok(out)
            }
        }
    }
}
