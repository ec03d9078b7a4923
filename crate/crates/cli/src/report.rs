//! The JSON report printed by every subcommand.

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use freespec::io::num;

pub struct Report {
    command: String,
    inputs: Map<String, Value>,
    verdicts: Map<String, Value>,
    witnesses: Map<String, Value>,
    pub tol: f64,
    pub seed: u64,
}

impl Report {
    pub fn new(command: &str, tol: f64, seed: u64) -> Self {
        Report {
            command: command.into(),
            inputs: Map::new(),
            verdicts: Map::new(),
            witnesses: Map::new(),
            tol,
            seed,
        }
    }

    /// Records the sha256 digest of an input file's bytes.
    pub fn input(&mut self, key: &str, bytes: &[u8]) {
        let digest = hex::encode(Sha256::digest(bytes));
        self.inputs.insert(key.into(), Value::String(format!("sha256:{digest}")));
    }

    pub fn verdict(&mut self, key: &str, v: Value) {
        self.verdicts.insert(key.into(), v);
    }

    pub fn witness(&mut self, key: &str, v: Value) {
        self.witnesses.insert(key.into(), v);
    }

    /// `runtime_ms` stays null unless timing was requested, keeping reports
    /// byte-identical across runs.
    pub fn finish(self, runtime_ms: Option<f64>) -> Value {
        let mut tolerances = Map::new();
        tolerances.insert("tol".into(), num(self.tol));
        let mut o = Map::new();
        o.insert("command".into(), self.command.into());
        o.insert("inputs".into(), Value::Object(self.inputs));
        o.insert("verdicts".into(), Value::Object(self.verdicts));
        o.insert("witnesses".into(), Value::Object(self.witnesses));
        o.insert("tolerances".into(), Value::Object(tolerances));
        o.insert("seed".into(), self.seed.into());
        o.insert("runtime_ms".into(), runtime_ms.map_or(Value::Null, num));
        Value::Object(o)
    }
}
