//! Instance documents: the versioned JSON envelope and one payload type per
//! subcommand.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use quadcert_core::soc::Vertex;
use quadcert_core::{HqpbInstance, SLemmaInstance, SymMatrix, Tolerances};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Basis,
    Pdcomb,
    Yuan,
    Slemma,
    Hqpb,
    Gtrs,
    Trtls,
    Soc,
    Jnr,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Basis => "basis",
            Kind::Pdcomb => "pdcomb",
            Kind::Yuan => "yuan",
            Kind::Slemma => "slemma",
            Kind::Hqpb => "hqpb",
            Kind::Gtrs => "gtrs",
            Kind::Trtls => "trtls",
            Kind::Soc => "soc",
            Kind::Jnr => "jnr",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Document {
    pub schema_version: String,
    pub kind: Kind,
    pub payload: serde_json::Value,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Document {
    pub fn parse(text: &str, expected: Kind) -> Result<Self, String> {
        let doc: Document = serde_json::from_str(text).map_err(|e| format!("malformed document: {e}"))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "unsupported schemaVersion {:?}, expected {SCHEMA_VERSION:?}",
                doc.schema_version
            ));
        }
        if doc.kind != expected {
            return Err(format!(
                "document kind {:?} does not match subcommand {:?}",
                doc.kind.name(),
                expected.name()
            ));
        }
        Ok(doc)
    }

    pub fn payload<T: DeserializeOwned>(&self) -> Result<T, String> {
        serde_json::from_value(self.payload.clone()).map_err(|e| format!("invalid {} payload: {e}", self.kind.name()))
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MatricesPayload {
    pub matrices: Vec<SymMatrix>,
    /// Spanning vectors of the subspace cone; the whole space when absent.
    #[serde(default)]
    pub cone: Option<Vec<Vec<f64>>>,
}

pub type SlemmaPayload = SLemmaInstance;
pub type HqpbPayload = HqpbInstance;

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GtrsPayload {
    pub a0: SymMatrix,
    pub lin0: Vec<f64>,
    pub a1: SymMatrix,
    pub lin1: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TrtlsPayload {
    /// Coefficient matrix by rows; need not be square.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SocPayload {
    pub n: usize,
    pub p: usize,
    pub grad_f: Vec<f64>,
    #[serde(default)]
    pub grad_g_active: Vec<Vec<f64>>,
    #[serde(default)]
    pub grad_h: Vec<Vec<f64>>,
    pub hessians: Vec<SymMatrix>,
    pub vertices: Vec<Vertex>,
    #[serde(default)]
    pub cone: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "probe", rename_all = "camelCase", deny_unknown_fields)]
pub enum JnrPayload {
    #[serde(rename_all = "camelCase")]
    Sample {
        matrices: Vec<SymMatrix>,
        #[serde(default = "default_count")]
        count: usize,
    },
    #[serde(rename_all = "camelCase")]
    Membership {
        matrices: Vec<SymMatrix>,
        target: Vec<f64>,
        #[serde(default = "default_starts")]
        starts: usize,
        #[serde(default)]
        norm_cap: Option<f64>,
    },
    #[serde(rename_all = "camelCase")]
    Convexity {
        matrices: Vec<SymMatrix>,
        #[serde(default = "default_pairs")]
        pairs: usize,
    },
    #[serde(rename_all = "camelCase")]
    Acuteness { matrices: Vec<SymMatrix> },
    #[serde(rename_all = "camelCase")]
    ClosureDemo {
        #[serde(default = "default_identity_samples")]
        samples: usize,
    },
    #[serde(rename_all = "camelCase")]
    Lift { b1: SymMatrix, b2: SymMatrix },
}

fn default_count() -> usize {
    200
}

fn default_starts() -> usize {
    16
}

fn default_pairs() -> usize {
    50
}

fn default_identity_samples() -> usize {
    1000
}
