//! Rectangularity and the factor digraphs `G⁺` and `G⁻`.
//!
//! On a rectangular digraph the relation "share an out-neighbour" (`R⁺`) is
//! an equivalence on the non-sinks, and "share an in-neighbour" (`R⁻`) is an
//! equivalence on the non-sources. Two `R⁺`-related vertices have identical
//! out-neighbourhoods, so the classes are computed by grouping on `v⁺`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::error::{Error, Result};

/// Edges `(x,y), (x2,y), (x2,y2)` are present but `(x,y2)` is not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RectangularityWitness {
    pub x: usize,
    pub y: usize,
    pub x2: usize,
    pub y2: usize,
}

impl RectangularityWitness {
    pub fn to_array(self) -> [usize; 4] {
        [self.x, self.y, self.x2, self.y2]
    }
}

impl fmt::Display for RectangularityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.x, self.y, self.x2, self.y2)
    }
}

/// First violation of rectangularity, scanning `(x,y)` in edge order, then
/// `x2 ∈ y⁻` and `y2 ∈ x2⁺` ascending.
pub fn rectangularity_violation(g: &Digraph) -> Option<RectangularityWitness> {
    for &(x, y) in g.edges() {
        for &x2 in g.inn(y) {
            for &y2 in g.out(x2) {
                if !g.has_edge(x, y2) {
                    return Some(RectangularityWitness { x, y, x2, y2 });
                }
            }
        }
    }
    None
}

pub fn is_rectangular(g: &Digraph) -> bool {
    rectangularity_violation(g).is_none()
}

fn require_rectangular(g: &Digraph) -> Result<()> {
    match rectangularity_violation(g) {
        None => Ok(()),
        Some(w) => Err(Error::NotRectangular(w)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `R⁺`, defined on the non-sinks.
    Plus,
    /// `R⁻`, defined on the non-sources.
    Minus,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Side::Plus),
            "minus" | "-" => Ok(Side::Minus),
            _ => Err(Error::InvalidArgument(format!("unknown side `{s}`"))),
        }
    }
}

/// Classes of `R⁺` or `R⁻`. Blocks are numbered by their smallest vertex, and
/// each block lists its vertices in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub side: Side,
    pub blocks: Vec<Vec<usize>>,
    pub block_of: Vec<Option<usize>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    #[inline]
    pub fn block(&self, v: usize) -> Option<usize> {
        self.block_of[v]
    }
}

/// Partition of `V ∖ S⁺` (plus) or `V ∖ S⁻` (minus) into `R⁺`/`R⁻` classes.
pub fn r_classes(g: &Digraph, side: Side) -> Result<Partition> {
    require_rectangular(g)?;
    Ok(r_classes_unchecked(g, side))
}

fn r_classes_unchecked(g: &Digraph, side: Side) -> Partition {
    let mut index: HashMap<&[usize], usize> = HashMap::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of = vec![None; g.n()];
    for (v, slot) in block_of.iter_mut().enumerate() {
        let key = match side {
            Side::Plus => g.out(v),
            Side::Minus => g.inn(v),
        };
        if key.is_empty() {
            continue;
        }
        let b = *index.entry(key).or_insert_with(|| {
            blocks.push(Vec::new());
            blocks.len() - 1
        });
        blocks[b].push(v);
        *slot = Some(b);
    }
    Partition {
        side,
        blocks,
        block_of,
    }
}

/// A quotient digraph together with the partition it was built from.
///
/// `(X,Y)` is a quotient edge iff some `x ∈ X`, `y ∈ Y` have `(x,y) ∈ E(G)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorGraph {
    pub partition: Partition,
    pub quotient: Digraph,
}

impl FactorGraph {
    /// Projection of a vertex onto its quotient vertex, if it has one.
    pub fn project(&self, v: usize) -> Option<usize> {
        self.partition.block(v)
    }

    /// The quotient in the digraph text format followed by one
    /// `class <index>: v1 v2 ...` line per block.
    pub fn to_text(&self) -> String {
        let mut s = self.quotient.to_text();
        for (i, block) in self.partition.blocks.iter().enumerate() {
            s.push_str(&format!("class {i}:"));
            for v in block {
                s.push_str(&format!(" {v}"));
            }
            s.push('\n');
        }
        s
    }
}

pub fn factor(g: &Digraph, side: Side) -> Result<FactorGraph> {
    require_rectangular(g)?;
    Ok(factor_unchecked(g, side))
}

fn factor_unchecked(g: &Digraph, side: Side) -> FactorGraph {
    let partition = r_classes_unchecked(g, side);
    let edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .filter_map(|&(x, y)| Some((partition.block(x)?, partition.block(y)?)))
        .collect();
    let quotient = Digraph::new(partition.len(), edges).expect("block indices are in range");
    FactorGraph {
        partition,
        quotient,
    }
}

/// The bijection `X ↦ X⁺` from `R⁺`-classes onto `R⁻`-classes, by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassBijection {
    pub forward: Vec<usize>,
    pub backward: Vec<usize>,
}

/// Both factor digraphs of a rectangular digraph and the bijection between
/// their vertex sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub plus: FactorGraph,
    pub minus: FactorGraph,
    pub phi: ClassBijection,
}

pub fn decompose(g: &Digraph) -> Result<Decomposition> {
    require_rectangular(g)?;
    let plus = factor_unchecked(g, Side::Plus);
    let minus = factor_unchecked(g, Side::Minus);
    let phi = class_bijection(g, &plus.partition, &minus.partition)?;
    Ok(Decomposition { plus, minus, phi })
}

pub fn phi(g: &Digraph) -> Result<ClassBijection> {
    require_rectangular(g)?;
    let plus = r_classes_unchecked(g, Side::Plus);
    let minus = r_classes_unchecked(g, Side::Minus);
    class_bijection(g, &plus, &minus)
}

fn class_bijection(g: &Digraph, plus: &Partition, minus: &Partition) -> Result<ClassBijection> {
    if plus.len() != minus.len() {
        return Err(Error::Invariant(format!(
            "{} R⁺-classes but {} R⁻-classes",
            plus.len(),
            minus.len()
        )));
    }
    let mut forward = Vec::with_capacity(plus.len());
    let mut backward = vec![usize::MAX; minus.len()];
    for (x_idx, block) in plus.blocks.iter().enumerate() {
        // Every member of an R⁺-class has the same out-neighbourhood.
        let image = g.out(block[0]);
        let y_idx = minus.block(image[0]).ok_or_else(|| {
            Error::Invariant(format!("out-neighbour {} has no R⁻-class", image[0]))
        })?;
        if minus.blocks[y_idx] != image {
            return Err(Error::Invariant(format!(
                "X⁺ of R⁺-class {x_idx} is not an R⁻-class"
            )));
        }
        if backward[y_idx] != usize::MAX {
            return Err(Error::Invariant(format!(
                "R⁻-class {y_idx} is hit twice by X ↦ X⁺"
            )));
        }
        forward.push(y_idx);
        backward[y_idx] = x_idx;
    }
    Ok(ClassBijection { forward, backward })
}

/// Checks that `X ↦ X⁺` is an isomorphism `G⁺ → G⁻`. Returns the first pair
/// of `R⁺`-classes `(X, Y)` on which edge membership disagrees, or `None`.
pub fn verify_phi_isomorphism(g: &Digraph) -> Result<Option<(usize, usize)>> {
    let d = decompose(g)?;
    let k = d.plus.partition.len();
    for x in 0..k {
        for y in 0..k {
            let up = d.plus.quotient.has_edge(x, y);
            let down = d
                .minus
                .quotient
                .has_edge(d.phi.forward[x], d.phi.forward[y]);
            if up != down {
                return Ok(Some((x, y)));
            }
        }
    }
    Ok(None)
}
