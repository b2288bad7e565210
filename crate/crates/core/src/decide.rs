//! Deciding the Maltsev property.
//!
//! A rectangular digraph is Maltsev exactly when its factor `G⁺` is, and the
//! factor is strictly smaller unless the digraph is a disjoint union of
//! directed cycles. Disjoint unions of cycles and edgeless digraphs are
//! Maltsev, so following `G ↦ G⁺` while checking rectangularity at every
//! level decides the property and leaves a chain that can be replayed.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::structure::{factor, rectangularity_violation, RectangularityWitness, Side};

/// True iff every vertex has in-degree and out-degree exactly one. The null
/// digraph counts as the empty union.
pub fn is_disjoint_union_of_cycles(g: &Digraph) -> bool {
    (0..g.n()).all(|v| g.out(v).len() == 1 && g.inn(v).len() == 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseKind {
    #[serde(rename = "disjoint-cycles")]
    DisjointCycles,
    #[serde(rename = "edgeless")]
    Edgeless,
    #[serde(rename = "null")]
    Null,
}

impl BaseKind {
    pub fn name(self) -> &'static str {
        match self {
            BaseKind::DisjointCycles => "disjoint-cycles",
            BaseKind::Edgeless => "edgeless",
            BaseKind::Null => "null",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        match s {
            "disjoint-cycles" => Some(BaseKind::DisjointCycles),
            "edgeless" => Some(BaseKind::Edgeless),
            "null" => Some(BaseKind::Null),
            _ => None,
        }
    }
}

/// Classifies `g` as one of the base cases, checked in the order null,
/// disjoint cycles, edgeless.
pub fn base_kind(g: &Digraph) -> Option<BaseKind> {
    if g.n() == 0 {
        Some(BaseKind::Null)
    } else if is_disjoint_union_of_cycles(g) {
        Some(BaseKind::DisjointCycles)
    } else if g.is_edgeless() {
        Some(BaseKind::Edgeless)
    } else {
        None
    }
}

/// Outcome of [`decide_maltsev`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaltsevCertificate {
    /// `chain[0]` is the input and `chain[i+1]` is the `R⁺`-factor of
    /// `chain[i]`; the last member is a base case of kind `base`.
    Accepted { chain: Vec<Digraph>, base: BaseKind },
    /// The digraph reached after `level` factoring steps is not rectangular.
    Refuted {
        level: usize,
        witness: RectangularityWitness,
    },
}

impl MaltsevCertificate {
    pub fn is_maltsev(&self) -> bool {
        matches!(self, MaltsevCertificate::Accepted { .. })
    }

    pub fn chain(&self) -> Option<&[Digraph]> {
        match self {
            MaltsevCertificate::Accepted { chain, .. } => Some(chain),
            MaltsevCertificate::Refuted { .. } => None,
        }
    }

    pub fn into_error(self) -> Option<Error> {
        match self {
            MaltsevCertificate::Accepted { .. } => None,
            MaltsevCertificate::Refuted { level, witness } => {
                Some(Error::NotMaltsev { level, witness })
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            MaltsevCertificate::Accepted { chain, base } => json!({
                "verdict": true,
                "chain": chain,
                "base": base.name(),
            }),
            MaltsevCertificate::Refuted { level, witness } => json!({
                "verdict": false,
                "level": level,
                "witness": witness.to_array(),
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Json(format!("certificate: {m}"));
        let verdict = v
            .get("verdict")
            .and_then(Value::as_bool)
            .ok_or_else(|| bad("missing boolean `verdict`"))?;
        if verdict {
            let chain: Vec<Digraph> = serde_json::from_value(
                v.get("chain").cloned().ok_or_else(|| bad("missing `chain`"))?,
            )?;
            let base = v
                .get("base")
                .and_then(Value::as_str)
                .and_then(BaseKind::from_name)
                .ok_or_else(|| bad("missing or unknown `base`"))?;
            Ok(MaltsevCertificate::Accepted { chain, base })
        } else {
            let level = v
                .get("level")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("missing `level`"))? as usize;
            let w: [usize; 4] = serde_json::from_value(
                v.get("witness")
                    .cloned()
                    .ok_or_else(|| bad("missing `witness`"))?,
            )?;
            Ok(MaltsevCertificate::Refuted {
                level,
                witness: RectangularityWitness {
                    x: w[0],
                    y: w[1],
                    x2: w[2],
                    y2: w[3],
                },
            })
        }
    }

    /// Re-derives the certificate for `g` step by step: every factor must be
    /// reproduced exactly, every chain member rectangular, sizes strictly
    /// decreasing, and the witness (if any) a genuine violation.
    pub fn replay(&self, g: &Digraph) -> bool {
        match self {
            MaltsevCertificate::Accepted { chain, base } => {
                if chain.first() != Some(g) {
                    return false;
                }
                for pair in chain.windows(2) {
                    if pair[1].n() >= pair[0].n() || base_kind(&pair[0]).is_some() {
                        return false;
                    }
                    match factor(&pair[0], Side::Plus) {
                        Ok(f) if f.quotient == pair[1] => {}
                        _ => return false,
                    }
                }
                let last = chain.last().expect("chain is nonempty");
                rectangularity_violation(last).is_none() && base_kind(last) == Some(*base)
            }
            MaltsevCertificate::Refuted { level, witness } => {
                let mut cur = g.clone();
                for _ in 0..*level {
                    if base_kind(&cur).is_some() {
                        return false;
                    }
                    match factor(&cur, Side::Plus) {
                        Ok(f) => cur = f.quotient,
                        Err(_) => return false,
                    }
                }
                let RectangularityWitness { x, y, x2, y2 } = *witness;
                let n = cur.n();
                [x, y, x2, y2].iter().all(|&v| v < n)
                    && cur.has_edge(x, y)
                    && cur.has_edge(x2, y)
                    && cur.has_edge(x2, y2)
                    && !cur.has_edge(x, y2)
            }
        }
    }
}

/// Decides whether `g` has a Maltsev polymorphism.
pub fn decide_maltsev(g: &Digraph) -> MaltsevCertificate {
    let mut chain = vec![g.clone()];
    loop {
        let level = chain.len() - 1;
        let cur = &chain[level];
        if let Some(witness) = rectangularity_violation(cur) {
            return MaltsevCertificate::Refuted { level, witness };
        }
        if let Some(base) = base_kind(cur) {
            return MaltsevCertificate::Accepted { chain, base };
        }
        let next = factor(cur, Side::Plus)
            .expect("rectangularity was checked")
            .quotient;
        assert!(
            next.n() < cur.n(),
            "factoring a rectangular non-base digraph must shrink it"
        );
        chain.push(next);
    }
}
