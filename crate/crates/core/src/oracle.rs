//! Brute-force ground truth.
//!
//! Both searches are complete: they explore every assignment the constraints
//! do not rule out, fixing variables in ascending index and trying values in
//! ascending order. They share nothing with the structural decision path.

use std::collections::BTreeMap;

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::search::{EdgeCsp, MAX_VALUES};
use crate::synth::{OpKind, TernaryOp};

/// Searches for a ternary polymorphism of `g` satisfying the identities of
/// `kind`, treating each table entry as a variable over `V(g)`.
///
/// Identity-forced entries are fixed up front; every triple of edges
/// `(u1,v1), (u2,v2), (u3,v3)` contributes the constraint that the entries
/// at `(u1,u2,u3)` and `(v1,v2,v3)` form an edge. Complete for any size the
/// table fits in memory; practical up to four vertices.
pub fn find_polymorphism_bruteforce(g: &Digraph, kind: OpKind) -> Result<Option<TernaryOp>> {
    let n = g.n();
    if n > MAX_VALUES {
        return Err(Error::InvalidArgument(format!(
            "polymorphism search supports at most {MAX_VALUES} vertices"
        )));
    }
    let idx = |x: usize, y: usize, z: usize| (x * n + y) * n + z;
    let mut csp = EdgeCsp::new(g, n * n * n);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if let Some(v) = kind.forced(x, y, z) {
                    csp.fix(idx(x, y, z), v);
                }
            }
        }
    }
    let edges = g.edges();
    for &(u1, v1) in edges {
        for &(u2, v2) in edges {
            for &(u3, v3) in edges {
                csp.require_edge(idx(u1, u2, u3), idx(v1, v2, v3));
            }
        }
    }
    Ok(csp
        .solve()
        .map(|table| TernaryOp::from_table(n, table).expect("values lie in V(g)")))
}

/// Searches for a homomorphism `H → G` extending `pins`.
pub fn find_homomorphism_bruteforce(
    h: &Digraph,
    g: &Digraph,
    pins: &BTreeMap<usize, usize>,
) -> Result<Option<Vec<usize>>> {
    if g.n() > MAX_VALUES {
        return Err(Error::InvalidArgument(format!(
            "homomorphism search supports targets of at most {MAX_VALUES} vertices"
        )));
    }
    let mut csp = EdgeCsp::new(g, h.n());
    for (&var, &target) in pins {
        if var >= h.n() {
            return Err(Error::VertexOutOfRange {
                vertex: var,
                n: h.n(),
            });
        }
        if target >= g.n() {
            return Err(Error::VertexOutOfRange {
                vertex: target,
                n: g.n(),
            });
        }
        csp.fix(var, target);
    }
    for &(u, v) in h.edges() {
        csp.require_edge(u, v);
    }
    Ok(csp.solve())
}

/// True iff `map` is a homomorphism `H → G` agreeing with `pins`.
pub fn is_homomorphism(
    h: &Digraph,
    g: &Digraph,
    pins: &BTreeMap<usize, usize>,
    map: &[usize],
) -> bool {
    map.len() == h.n()
        && map.iter().all(|&t| t < g.n())
        && pins.iter().all(|(&v, &t)| map.get(v) == Some(&t))
        && h.edges().iter().all(|&(u, v)| g.has_edge(map[u], map[v]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{verify_identities, verify_polymorphism};

    fn n4() -> Digraph {
        Digraph::new(4, [(0, 2), (1, 2), (1, 3)]).unwrap()
    }

    fn self_checked(g: &Digraph, kind: OpKind) -> Option<TernaryOp> {
        let op = find_polymorphism_bruteforce(g, kind).unwrap()?;
        assert_eq!(verify_identities(&op, kind), None);
        assert_eq!(verify_polymorphism(g, &op).unwrap(), None);
        Some(op)
    }

    #[test]
    fn polymorphism_search_examples() {
        assert!(self_checked(&Digraph::cycle(3), OpKind::Maltsev).is_some());
        assert!(self_checked(&n4(), OpKind::Maltsev).is_none());
        let op = self_checked(&Digraph::cycle(1), OpKind::Majority).unwrap();
        assert_eq!(op.table(), &[0]);
        assert_eq!(
            self_checked(&Digraph::null(), OpKind::Maltsev).unwrap().n(),
            0
        );
    }

    #[test]
    fn n4_does_have_a_majority() {
        // Non-rectangular digraphs may still admit a majority polymorphism.
        assert!(self_checked(&n4(), OpKind::Majority).is_some());
    }

    #[test]
    fn homomorphism_search_examples() {
        let c3 = Digraph::cycle(3);
        let none = BTreeMap::new();
        let h = find_homomorphism_bruteforce(&Digraph::path(2), &c3, &none)
            .unwrap()
            .unwrap();
        assert!(c3.has_edge(h[0], h[1]));

        let p3 = Digraph::path(3);
        let pins = BTreeMap::from([(0, 0), (2, 2)]);
        assert_eq!(
            find_homomorphism_bruteforce(&p3, &c3, &pins).unwrap(),
            Some(vec![0, 1, 2])
        );
        let pins = BTreeMap::from([(0, 0), (2, 0)]);
        assert_eq!(find_homomorphism_bruteforce(&p3, &c3, &pins).unwrap(), None);
    }

    #[test]
    fn homomorphism_edge_cases() {
        let c3 = Digraph::cycle(3);
        // A loop in H needs a loop in G.
        let loop1 = Digraph::cycle(1);
        assert_eq!(
            find_homomorphism_bruteforce(&loop1, &c3, &BTreeMap::new()).unwrap(),
            None
        );
        // Nothing maps into the null digraph except the null digraph.
        let none = BTreeMap::new();
        assert_eq!(
            find_homomorphism_bruteforce(&Digraph::edgeless(1), &Digraph::null(), &none).unwrap(),
            None
        );
        assert_eq!(
            find_homomorphism_bruteforce(&Digraph::null(), &Digraph::null(), &none).unwrap(),
            Some(vec![])
        );
        assert!(
            find_homomorphism_bruteforce(&Digraph::path(2), &c3, &BTreeMap::from([(0, 5)]))
                .is_err()
        );
        assert!(
            find_homomorphism_bruteforce(&Digraph::path(2), &c3, &BTreeMap::from([(7, 0)]))
                .is_err()
        );
    }
}
