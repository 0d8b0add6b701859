use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Circuit;

/// Gate counts keyed by [`Gate::kind_name`](super::Gate::kind_name).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateStats {
    pub counts: BTreeMap<String, usize>,
    pub total: usize,
    pub single_qudit: usize,
    pub two_qudit: usize,
    /// Gates on three or more wires.
    pub multi_qudit: usize,
}

pub fn gate_stats(c: &Circuit) -> GateStats {
    let mut s = GateStats::default();
    for gate in c.gates() {
        *s.counts.entry(gate.kind_name()).or_default() += 1;
        s.total += 1;
        match gate.arity() {
            1 => s.single_qudit += 1,
            2 => s.two_qudit += 1,
            _ => s.multi_qudit += 1,
        }
    }
    s
}

impl GateStats {
    pub fn count(&self, kind: &str) -> usize {
        self.counts.get(kind).copied().unwrap_or(0)
    }
}

impl fmt::Display for GateStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .counts
            .keys()
            .map(String::len)
            .max()
            .unwrap_or(0)
            .max(12);
        for (k, v) in &self.counts {
            writeln!(f, "{k:<width$} {v}")?;
        }
        writeln!(f, "{:<width$} {}", "single-qudit", self.single_qudit)?;
        writeln!(f, "{:<width$} {}", "two-qudit", self.two_qudit)?;
        writeln!(f, "{:<width$} {}", "multi-qudit", self.multi_qudit)?;
        write!(f, "{:<width$} {}", "total", self.total)
    }
}
