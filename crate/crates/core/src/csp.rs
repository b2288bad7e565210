//! Pinned homomorphism problems solved by path consistency.
//!
//! An instance is a digraph `H` together with a partial map `V(H) → V(G)`;
//! it is satisfiable when the map extends to a homomorphism `H → G`. Path
//! consistency never rejects a satisfiable instance, and when `G` has a
//! majority polymorphism (in particular when `G` is Maltsev) it never accepts
//! an unsatisfiable one either.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decide::decide_maltsev;
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::search::MAX_VALUES;
use crate::synth::{verify_identities, verify_polymorphism, OpKind, TernaryOp};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CspInstance {
    pub h: Digraph,
    /// Pinned variables and their targets in `V(G)`.
    #[serde(default)]
    pub pins: BTreeMap<usize, usize>,
}

impl CspInstance {
    pub fn new(h: Digraph, pins: BTreeMap<usize, usize>) -> Self {
        CspInstance { h, pins }
    }

    pub fn with_pin(&self, var: usize, target: usize) -> Self {
        let mut next = self.clone();
        next.pins.insert(var, target);
        next
    }

    pub fn validate(&self, g: &Digraph) -> Result<()> {
        for (&var, &target) in &self.pins {
            if var >= self.h.n() {
                return Err(Error::VertexOutOfRange {
                    vertex: var,
                    n: self.h.n(),
                });
            }
            if target >= g.n() {
                return Err(Error::VertexOutOfRange {
                    vertex: target,
                    n: g.n(),
                });
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("instances serialise")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CspVerdict {
    Yes,
    No,
    /// Consistent, but the target is not known to have a majority
    /// polymorphism, so a solution is not guaranteed.
    Maybe,
}

impl CspVerdict {
    pub fn exit_code(self) -> i32 {
        match self {
            CspVerdict::Yes => 0,
            CspVerdict::No => 1,
            CspVerdict::Maybe => 3,
        }
    }
}

impl fmt::Display for CspVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CspVerdict::Yes => "yes",
            CspVerdict::No => "no",
            CspVerdict::Maybe => "maybe",
        })
    }
}

/// Unary and binary constraints over the variables of an instance.
///
/// Values are vertices of `G` encoded as bits of a `u64`. The relation for
/// the ordered pair `(i, j)` is stored row by row: `row(i, j, a)` is the set
/// of `b` with `(a, b)` allowed. `row(j, i, ·)` is always the transpose.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSystem {
    vars: usize,
    values: usize,
    domains: Vec<u64>,
    rows: Vec<u64>,
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            b
        })
    })
}

impl PairSystem {
    /// Domains from the pins and loops of `H`, pair relations from its edges
    /// (both directions when `H` has edges `(i,j)` and `(j,i)`), and the full
    /// product for unrelated pairs.
    pub fn initial(instance: &CspInstance, g: &Digraph) -> Result<Self> {
        instance.validate(g)?;
        let (k, n) = (instance.h.n(), g.n());
        if n > MAX_VALUES {
            return Err(Error::InvalidArgument(format!(
                "consistency solver supports targets of at most {MAX_VALUES} vertices"
            )));
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut succ = vec![0u64; n];
        let mut pred = vec![0u64; n];
        for &(u, v) in g.edges() {
            succ[u] |= 1 << v;
            pred[v] |= 1 << u;
        }
        let loops = g.loops().fold(0u64, |m, v| m | 1 << v);

        let mut domains = vec![full; k];
        for (&var, &t) in &instance.pins {
            domains[var] &= 1 << t;
        }
        for v in instance.h.loops() {
            domains[v] &= loops;
        }
        let mut sys = PairSystem {
            vars: k,
            values: n,
            domains,
            rows: vec![0; k * k * n],
        };
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let (fwd, bwd) = (instance.h.has_edge(i, j), instance.h.has_edge(j, i));
                for a in bits(sys.domains[i]) {
                    let mut row = sys.domains[j];
                    if fwd {
                        row &= succ[a];
                    }
                    if bwd {
                        row &= pred[a];
                    }
                    *sys.row_mut(i, j, a) = row;
                }
            }
        }
        Ok(sys)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn domain(&self, var: usize) -> impl Iterator<Item = usize> {
        bits(self.domains[var])
    }

    /// Allowed value pairs for the variables `(i, j)`, `i ≠ j`.
    pub fn pairs(&self, i: usize, j: usize) -> Vec<(usize, usize)> {
        bits(self.domains[i])
            .flat_map(|a| bits(self.row(i, j, a)).map(move |b| (a, b)))
            .collect()
    }

    #[inline]
    fn row(&self, i: usize, j: usize, a: usize) -> u64 {
        self.rows[(i * self.vars + j) * self.values + a]
    }

    #[inline]
    fn row_mut(&mut self, i: usize, j: usize, a: usize) -> &mut u64 {
        &mut self.rows[(i * self.vars + j) * self.values + a]
    }

    /// Some variable has no value left.
    pub fn is_wiped_out(&self) -> bool {
        self.domains.contains(&0)
    }

    fn remove_value(&mut self, i: usize, a: usize) {
        self.domains[i] &= !(1 << a);
        for j in 0..self.vars {
            if j == i {
                continue;
            }
            for b in bits(self.row(i, j, a)) {
                *self.row_mut(j, i, b) &= !(1 << a);
            }
            *self.row_mut(i, j, a) = 0;
        }
    }

    /// Drops values of `i` that have no partner in some relation.
    fn project(&mut self, i: usize) -> bool {
        let mut changed = false;
        for a in bits(self.domains[i]) {
            if (0..self.vars).any(|j| j != i && self.row(i, j, a) == 0) {
                self.remove_value(i, a);
                changed = true;
            }
        }
        changed
    }

    /// `R_ij ← R_ij ∩ (R_ik ∘ R_kj)`, keeping the transpose in step.
    fn revise(&mut self, i: usize, k: usize, j: usize) -> bool {
        let mut changed = false;
        for a in bits(self.domains[i]) {
            let via = bits(self.row(i, k, a)).fold(0u64, |m, c| m | self.row(k, j, c));
            let old = self.row(i, j, a);
            let new = old & via;
            if new != old {
                *self.row_mut(i, j, a) = new;
                for b in bits(old & !new) {
                    *self.row_mut(j, i, b) &= !(1 << a);
                }
                changed = true;
            }
        }
        changed
    }

    /// Runs path consistency to a fixpoint. Returns `false` iff some domain
    /// (and with it every relation touching it) became empty.
    pub fn propagate(&mut self) -> bool {
        let k = self.vars;
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..k {
                changed |= self.project(i);
            }
            for i in 0..k {
                for j in 0..k {
                    if i == j {
                        continue;
                    }
                    for m in 0..k {
                        if m != i && m != j {
                            changed |= self.revise(i, m, j);
                        }
                    }
                }
            }
            if self.is_wiped_out() {
                return false;
            }
        }
        true
    }
}

/// Path-consistency verdict without any precondition on `G`: `false` is a
/// proof of unsatisfiability.
pub fn is_path_consistent(instance: &CspInstance, g: &Digraph) -> Result<bool> {
    let mut sys = PairSystem::initial(instance, g)?;
    Ok(sys.propagate())
}

/// Decides the instance by path consistency. "yes" is only reported when
/// `G` is Maltsev (hence has a majority polymorphism); otherwise a consistent
/// instance yields [`CspVerdict::Maybe`].
pub fn solve_csp_consistency(instance: &CspInstance, g: &Digraph) -> Result<CspVerdict> {
    if !is_path_consistent(instance, g)? {
        return Ok(CspVerdict::No);
    }
    Ok(if decide_maltsev(g).is_maltsev() {
        CspVerdict::Yes
    } else {
        CspVerdict::Maybe
    })
}

/// As [`solve_csp_consistency`], trusting a supplied majority table once it
/// passes both verifiers.
pub fn solve_csp_with_majority(
    instance: &CspInstance,
    g: &Digraph,
    majority: &TernaryOp,
) -> Result<CspVerdict> {
    if !is_path_consistent(instance, g)? {
        return Ok(CspVerdict::No);
    }
    let valid = majority.n() == g.n()
        && verify_identities(majority, OpKind::Majority).is_none()
        && verify_polymorphism(g, majority)?.is_none();
    Ok(if valid {
        CspVerdict::Yes
    } else {
        CspVerdict::Maybe
    })
}

/// A reproducible random instance: each ordered pair of variables (loops
/// included) becomes an edge with probability `edge_prob`, and `pin_count`
/// distinct variables are pinned to uniformly chosen vertices of `G`.
pub fn random_instance(
    g: &Digraph,
    vars: usize,
    edge_prob: f64,
    pin_count: usize,
    seed: u64,
) -> Result<CspInstance> {
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidArgument(format!(
            "edge probability {edge_prob} outside [0, 1]"
        )));
    }
    if pin_count > vars {
        return Err(Error::InvalidArgument(format!(
            "cannot pin {pin_count} of {vars} variables"
        )));
    }
    if pin_count > 0 && g.n() == 0 {
        return Err(Error::InvalidArgument(
            "cannot pin variables into the null digraph".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..vars {
        for v in 0..vars {
            if rng.gen_bool(edge_prob) {
                edges.push((u, v));
            }
        }
    }
    let h = Digraph::new(vars, edges)?;
    let mut pinned: Vec<usize> = sample(&mut rng, vars, pin_count).into_vec();
    pinned.sort_unstable();
    let pins = pinned
        .into_iter()
        .map(|v| (v, rng.gen_range(0..g.n())))
        .collect();
    Ok(CspInstance { h, pins })
}
