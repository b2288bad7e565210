//! Ternary operation tables and the construction of majority and Maltsev
//! polymorphisms.
//!
//! Construction runs down the decision chain `G → G⁺ → … → base`, builds a
//! table on the base case directly, then lifts it one level at a time. A lift
//! from `f⁺` on `G⁺` to `f` on `G` picks, for every triple, a vertex that
//!
//! 1. satisfies the identities of the requested kind (these entries are fixed
//!    first and never revisited),
//! 2. lies in the `R⁺`-class `f⁺(x/R⁺, y/R⁺, z/R⁺)` when `x, y, z` are all
//!    non-sinks,
//! 3. lies in the `R⁻`-class `f⁻(x/R⁻, y/R⁻, z/R⁻)` when `x, y, z` are all
//!    non-sources, where `f⁻` is `f⁺` transported along `X ↦ X⁺`.
//!
//! Among the admissible vertices the smallest index is taken.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::decide::{base_kind, decide_maltsev, BaseKind, MaltsevCertificate};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::structure::{decompose, ClassBijection, Decomposition};

/// Which identity system a ternary operation must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    /// `m(x,y,y) = x`, `m(x,x,y) = y`.
    Maltsev,
    /// `M(x,y,y) = M(y,x,y) = M(y,y,x) = y`.
    Majority,
}

impl OpKind {
    pub fn name(self) -> &'static str {
        match self {
            OpKind::Maltsev => "maltsev",
            OpKind::Majority => "majority",
        }
    }

    /// The value the identities force at `(x, y, z)`, if any.
    #[inline]
    pub fn forced(self, x: usize, y: usize, z: usize) -> Option<usize> {
        match self {
            OpKind::Maltsev => {
                if y == z {
                    Some(x)
                } else if x == y {
                    Some(z)
                } else {
                    None
                }
            }
            OpKind::Majority => {
                if x == y || x == z {
                    Some(x)
                } else if y == z {
                    Some(y)
                } else {
                    None
                }
            }
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maltsev" => Ok(OpKind::Maltsev),
            "majority" => Ok(OpKind::Majority),
            _ => Err(Error::InvalidArgument(format!("unknown operation kind `{s}`"))),
        }
    }
}

/// A total operation `V³ → V` stored flat: `f(x,y,z)` lives at `x·n² + y·n + z`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "OpRepr", into = "OpRepr")]
pub struct TernaryOp {
    n: usize,
    table: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct OpRepr {
    n: usize,
    arity: usize,
    table: Vec<usize>,
}

impl TryFrom<OpRepr> for TernaryOp {
    type Error = Error;

    fn try_from(r: OpRepr) -> Result<Self> {
        if r.arity != 3 {
            return Err(Error::InvalidArgument(format!(
                "expected arity 3, found {}",
                r.arity
            )));
        }
        TernaryOp::from_table(r.n, r.table)
    }
}

impl From<TernaryOp> for OpRepr {
    fn from(op: TernaryOp) -> Self {
        OpRepr {
            n: op.n,
            arity: 3,
            table: op.table,
        }
    }
}

impl fmt::Debug for TernaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TernaryOp(n={}, {:?})", self.n, self.table)
    }
}

impl TernaryOp {
    pub fn from_table(n: usize, table: Vec<usize>) -> Result<Self> {
        if table.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n,
                got: table.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= n) {
            return Err(Error::VertexOutOfRange { vertex: bad, n });
        }
        Ok(TernaryOp { n, table })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> usize) -> Self {
        let mut table = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let v = f(x, y, z);
                    assert!(v < n, "operation value {v} out of range 0..{n}");
                    table.push(v);
                }
            }
        }
        TernaryOp { n, table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.n + y) * self.n + z
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> usize {
        self.table[self.index(x, y, z)]
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("operation tables serialise")
    }
}

/// The first pair `(x, y)` at which `f` breaks the identities of `kind`.
pub fn verify_identities(f: &TernaryOp, kind: OpKind) -> Option<(usize, usize)> {
    let n = f.n();
    for x in 0..n {
        for y in 0..n {
            let ok = match kind {
                OpKind::Maltsev => f.get(x, y, y) == x && f.get(x, x, y) == y,
                OpKind::Majority => {
                    f.get(x, y, y) == y && f.get(y, x, y) == y && f.get(y, y, x) == y
                }
            };
            if !ok {
                return Some((x, y));
            }
        }
    }
    None
}

/// Checks that `f` maps every triple of edges to an edge. Returns the first
/// offending triple of edges, if any.
pub fn verify_polymorphism(g: &Digraph, f: &TernaryOp) -> Result<Option<[(usize, usize); 3]>> {
    if f.n() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: f.n(),
        });
    }
    let edges = g.edges();
    for &e1 in edges {
        for &e2 in edges {
            for &e3 in edges {
                let a = f.get(e1.0, e2.0, e3.0);
                let b = f.get(e1.1, e2.1, e3.1);
                if !g.has_edge(a, b) {
                    return Ok(Some([e1, e2, e3]));
                }
            }
        }
    }
    Ok(None)
}

/// `M(x,y,z) = y` if `y = z`, otherwise `x`.
pub fn majority_base(g: &Digraph) -> Result<TernaryOp> {
    base_kind(g).ok_or(Error::NotBaseCase)?;
    Ok(TernaryOp::from_fn(g.n(), |x, y, z| if y == z { y } else { x }))
}

/// A Maltsev polymorphism of a disjoint union of cycles or an edgeless
/// digraph.
///
/// On cycles every vertex has a cycle id and a position. When `y` and `z`
/// share a cycle, `x` is advanced along its own cycle by the offset from `y`
/// to `z` (taken in `0..len(y's cycle)`); otherwise when `x` and `y` share a
/// cycle, `z` is advanced by the offset from `y` to `x`; otherwise the value
/// is `x`. On a single cycle this is `x - y + z` modulo the length.
pub fn maltsev_base(g: &Digraph) -> Result<TernaryOp> {
    let kind = base_kind(g).ok_or(Error::NotBaseCase)?;
    let n = g.n();
    if kind == BaseKind::Edgeless {
        return Ok(TernaryOp::from_fn(n, |x, y, z| {
            if y == z {
                x
            } else if x == y {
                z
            } else {
                x
            }
        }));
    }
    let cycles = CycleLayout::new(g);
    Ok(TernaryOp::from_fn(n, |x, y, z| {
        if cycles.id[y] == cycles.id[z] {
            cycles.advance(x, cycles.offset(y, z))
        } else if cycles.id[x] == cycles.id[y] {
            cycles.advance(z, cycles.offset(y, x))
        } else {
            x
        }
    }))
}

/// Cycle decomposition of a digraph in which every vertex has exactly one
/// in- and one out-neighbour.
struct CycleLayout {
    id: Vec<usize>,
    pos: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl CycleLayout {
    fn new(g: &Digraph) -> Self {
        let n = g.n();
        let mut id = vec![usize::MAX; n];
        let mut pos = vec![0; n];
        let mut members = Vec::new();
        for start in 0..n {
            if id[start] != usize::MAX {
                continue;
            }
            let c = members.len();
            let mut cycle = Vec::new();
            let mut v = start;
            while id[v] == usize::MAX {
                id[v] = c;
                pos[v] = cycle.len();
                cycle.push(v);
                v = g.out(v)[0];
            }
            members.push(cycle);
        }
        CycleLayout { id, pos, members }
    }

    /// Steps from `a` forward to `b` along their common cycle.
    fn offset(&self, a: usize, b: usize) -> usize {
        let len = self.members[self.id[a]].len();
        (self.pos[b] + len - self.pos[a]) % len
    }

    fn advance(&self, v: usize, steps: usize) -> usize {
        let cycle = &self.members[self.id[v]];
        cycle[(self.pos[v] + steps) % cycle.len()]
    }
}

/// Transports `f⁺` on `G⁺` to `G⁻` along `X ↦ X⁺`:
/// `f⁻(a,b,c) = φ(f⁺(φ⁻¹a, φ⁻¹b, φ⁻¹c))`.
pub fn conjugate_via_phi(g: &Digraph, f_plus: &TernaryOp) -> Result<TernaryOp> {
    let d = decompose(g)?;
    check_factor_size(&d, f_plus)?;
    Ok(conjugate(&d.phi, f_plus))
}

fn conjugate(phi: &ClassBijection, f_plus: &TernaryOp) -> TernaryOp {
    let back = &phi.backward;
    TernaryOp::from_fn(f_plus.n(), |a, b, c| {
        phi.forward[f_plus.get(back[a], back[b], back[c])]
    })
}

fn check_factor_size(d: &Decomposition, f_plus: &TernaryOp) -> Result<()> {
    let expected = d.plus.quotient.n();
    if f_plus.n() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: f_plus.n(),
        });
    }
    Ok(())
}

fn require_on_factor(d: &Decomposition, f_plus: &TernaryOp, kind: OpKind) -> Result<()> {
    check_factor_size(d, f_plus)?;
    if let Some((x, y)) = verify_identities(f_plus, kind) {
        return Err(Error::InvalidArgument(format!(
            "operation on G⁺ is not {kind}: identities fail at ({x}, {y})"
        )));
    }
    if let Some(t) = verify_polymorphism(&d.plus.quotient, f_plus)? {
        return Err(Error::InvalidArgument(format!(
            "operation on G⁺ is not a polymorphism: edges {t:?}"
        )));
    }
    Ok(())
}

/// Lifts a majority polymorphism of `G⁺` to one of `G`.
pub fn lift_majority(g: &Digraph, m_plus: &TernaryOp) -> Result<TernaryOp> {
    let d = decompose(g)?;
    require_on_factor(&d, m_plus, OpKind::Majority)?;
    lift(g, &d, m_plus, OpKind::Majority)
}

/// Lifts a Maltsev polymorphism of `G⁺` to one of `G`.
pub fn lift_maltsev(g: &Digraph, m_plus: &TernaryOp) -> Result<TernaryOp> {
    let d = decompose(g)?;
    require_on_factor(&d, m_plus, OpKind::Maltsev)?;
    lift(g, &d, m_plus, OpKind::Maltsev)
}

fn lift(g: &Digraph, d: &Decomposition, f_plus: &TernaryOp, kind: OpKind) -> Result<TernaryOp> {
    let f_minus = conjugate(&d.phi, f_plus);
    let plus = &d.plus.partition;
    let minus = &d.minus.partition;
    let n = g.n();
    let mut table = Vec::with_capacity(n * n * n);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if let Some(v) = kind.forced(x, y, z) {
                    table.push(v);
                    continue;
                }
                let up = match (plus.block(x), plus.block(y), plus.block(z)) {
                    (Some(a), Some(b), Some(c)) => Some(f_plus.get(a, b, c)),
                    _ => None,
                };
                let down = match (minus.block(x), minus.block(y), minus.block(z)) {
                    (Some(a), Some(b), Some(c)) => Some(f_minus.get(a, b, c)),
                    _ => None,
                };
                let choice = match (up, down) {
                    (Some(p), Some(m)) => plus.blocks[p]
                        .iter()
                        .copied()
                        .find(|&v| minus.block(v) == Some(m)),
                    (Some(p), None) => Some(plus.blocks[p][0]),
                    (None, Some(m)) => Some(minus.blocks[m][0]),
                    (None, None) => Some(0),
                };
                table.push(choice.ok_or(Error::EmptyCandidates { triple: [x, y, z] })?);
            }
        }
    }
    TernaryOp::from_table(n, table)
}

fn base_table(g: &Digraph, kind: OpKind) -> Result<TernaryOp> {
    match kind {
        OpKind::Majority => majority_base(g),
        OpKind::Maltsev => maltsev_base(g),
    }
}

/// Builds a polymorphism of the requested kind along the decision chain.
/// The result is re-verified before it is returned.
pub fn synthesize(g: &Digraph, kind: OpKind) -> Result<TernaryOp> {
    let chain = match decide_maltsev(g) {
        MaltsevCertificate::Accepted { chain, .. } => chain,
        refuted => return Err(refuted.into_error().expect("refuted certificate")),
    };
    let (base, steps) = chain.split_last().expect("chain is nonempty");
    let mut op = base_table(base, kind)?;
    for level in steps.iter().rev() {
        let d = decompose(level)?;
        op = lift(level, &d, &op, kind)?;
    }
    if let Some((x, y)) = verify_identities(&op, kind) {
        return Err(Error::Invariant(format!(
            "synthesised {kind} table breaks the identities at ({x}, {y})"
        )));
    }
    if let Some(t) = verify_polymorphism(g, &op)? {
        return Err(Error::Invariant(format!(
            "synthesised {kind} table is not a polymorphism: edges {t:?}"
        )));
    }
    Ok(op)
}

pub fn synth_majority(g: &Digraph) -> Result<TernaryOp> {
    synthesize(g, OpKind::Majority)
}

pub fn synth_maltsev(g: &Digraph) -> Result<TernaryOp> {
    synthesize(g, OpKind::Maltsev)
}
