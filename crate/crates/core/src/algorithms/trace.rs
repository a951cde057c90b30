use serde::{Deserialize, Serialize};

use crate::space::{OracleCounters, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Mps,
    Smps,
    MirrorProx,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mps => "mps",
            Method::Smps => "smps",
            Method::MirrorProx => "mirror_prox",
        }
    }
}

/// State after outer iteration `k`: the output point `z_bar_k` and the
/// cumulative oracle counters at that moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    pub z_bar: Point,
    pub counters: OracleCounters,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub method: Method,
    pub problem: String,
    pub seed: Option<u64>,
    pub records: Vec<TraceRecord>,
    /// The last non-averaged iterate (`z_N` for the sliding methods).
    pub final_iterate: Point,
}

impl Trace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// The averaged output `z_bar_N`.
    pub fn output(&self) -> Option<&Point> {
        self.records.last().map(|r| &r.z_bar)
    }

    pub fn counters(&self) -> OracleCounters {
        self.records.last().map(|r| r.counters).unwrap_or_default()
    }

    /// Bitwise equality of every `z_bar_k` and of the final iterate. Counters
    /// and wall-clock times are not compared.
    pub fn same_iterates(&self, other: &Trace) -> bool {
        fn bits(p: &Point) -> Vec<u64> {
            p.values().iter().map(|x| x.to_bits()).collect()
        }
        self.records.len() == other.records.len()
            && bits(&self.final_iterate) == bits(&other.final_iterate)
            && self
                .records
                .iter()
                .zip(&other.records)
                .all(|(a, b)| a.k == b.k && bits(&a.z_bar) == bits(&b.z_bar))
    }
}
