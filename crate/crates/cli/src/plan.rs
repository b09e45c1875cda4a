//! Run plans: a normalized, serializable description of one CLI run.
//!
//! Every subcommand parses into a [`RunPlan`] before anything executes, so
//! a run is fully determined by the plan: command name, input files, a
//! string parameter map, output path and artifact format. Plans are
//! deterministic; nothing in them depends on time or environment.

use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("UsageError: unknown format {s:?} (csv or json)")),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RunPlan {
    pub command: String,
    pub inputs: BTreeMap<String, PathBuf>,
    pub params: BTreeMap<String, String>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunPlan {
    pub fn new(command: &str, format: Format, out: Option<PathBuf>) -> Self {
        RunPlan {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            params: BTreeMap::new(),
            out,
            format,
        }
    }

    pub fn input(&mut self, name: &str, path: PathBuf) -> &mut Self {
        self.inputs.insert(name.to_string(), path);
        self
    }

    pub fn param(&mut self, name: &str, value: impl ToString) -> &mut Self {
        self.params.insert(name.to_string(), value.to_string());
        self
    }

    /// Stable JSON rendering (keys sorted), suitable for replay records.
    pub fn to_json(&self) -> serde_json::Value {
        let inputs: serde_json::Map<String, serde_json::Value> = self
            .inputs
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.display().to_string())))
            .collect();
        let params: serde_json::Map<String, serde_json::Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        serde_json::json!({
            "command": self.command,
            "format": match self.format { Format::Csv => "csv", Format::Json => "json" },
            "inputs": inputs,
            "out": self.out.as_ref().map(|p| p.display().to_string()),
            "params": params,
        })
    }
}
