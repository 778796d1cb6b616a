use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

/// Process exit status, one per class of result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Verified = 0,
    Refuted = 1,
    Inconclusive = 2,
    Precondition = 3,
    Input = 4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub diagnostics: BTreeMap<String, Value>,
    pub residuals: BTreeMap<String, f64>,
    pub timings: Timings,
    #[serde(skip)]
    pub exit: Option<Exit>,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl Report {
    pub fn new(outcome: impl Into<String>, exit: Exit) -> Self {
        Report {
            outcome: outcome.into(),
            certificate: None,
            witness: None,
            diagnostics: BTreeMap::new(),
            residuals: BTreeMap::new(),
            timings: Timings { total_ms: 0.0 },
            exit: Some(exit),
            table: None,
        }
    }

    pub fn error(outcome: &str, exit: Exit, message: impl Into<String>) -> Self {
        Report::new(outcome, exit).diagnostic("message", message.into())
    }

    pub fn certificate(mut self, value: impl Serialize) -> Self {
        self.certificate = Some(to_value(value));
        self
    }

    pub fn witness(mut self, value: impl Serialize) -> Self {
        self.witness = Some(to_value(value));
        self
    }

    pub fn diagnostic(mut self, key: &str, value: impl Serialize) -> Self {
        self.diagnostics.insert(key.to_string(), to_value(value));
        self
    }

    pub fn residual(mut self, key: &str, value: f64) -> Self {
        self.residuals.insert(key.to_string(), value);
        self
    }

    pub fn table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn exit_code(&self) -> Exit {
        self.exit.unwrap_or(Exit::Inconclusive)
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

/// Tabular view of a result, emitted with `--out csv`.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn write_json(report: &Report, out: &mut impl Write) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, report)?;
    writeln!(out)
}

pub fn write_csv(table: &Table, out: &mut impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}
