//! Backtracking over binary constraints "the pair of values is an edge of G",
//! with domains as bitmasks over `V(G)` and arc consistency maintained after
//! every decision. Shared by the brute-force oracles.

use crate::digraph::Digraph;

pub(crate) const MAX_VALUES: usize = 64;

#[derive(Clone, Copy)]
enum Dir {
    /// Value of the other variable must be an out-neighbour of ours.
    Out,
    /// Value of the other variable must be an in-neighbour of ours.
    In,
}

pub(crate) struct EdgeCsp {
    succ: Vec<u64>,
    pred: Vec<u64>,
    loops: u64,
    domains: Vec<u64>,
    arcs: Vec<Vec<(usize, Dir)>>,
    infeasible: bool,
}

impl EdgeCsp {
    /// `vars` variables, each ranging over all of `V(G)`.
    pub(crate) fn new(target: &Digraph, vars: usize) -> Self {
        let n = target.n();
        assert!(n <= MAX_VALUES, "search supports at most {MAX_VALUES} values");
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut succ = vec![0u64; n];
        let mut pred = vec![0u64; n];
        for &(u, v) in target.edges() {
            succ[u] |= 1 << v;
            pred[v] |= 1 << u;
        }
        let loops = target.loops().fold(0u64, |m, v| m | 1 << v);
        EdgeCsp {
            succ,
            pred,
            loops,
            domains: vec![full; vars],
            arcs: vec![Vec::new(); vars],
            infeasible: vars > 0 && n == 0,
        }
    }

    pub(crate) fn fix(&mut self, var: usize, value: usize) {
        self.restrict(var, 1 << value);
    }

    fn restrict(&mut self, var: usize, mask: u64) {
        self.domains[var] &= mask;
        if self.domains[var] == 0 {
            self.infeasible = true;
        }
    }

    /// Requires `(value(a), value(b)) ∈ E(G)`.
    pub(crate) fn require_edge(&mut self, a: usize, b: usize) {
        if a == b {
            self.restrict(a, self.loops);
        } else {
            self.arcs[a].push((b, Dir::Out));
            self.arcs[b].push((a, Dir::In));
        }
    }

    fn image(&self, mask: u64, dir: Dir) -> u64 {
        let table = match dir {
            Dir::Out => &self.succ,
            Dir::In => &self.pred,
        };
        let mut acc = 0;
        let mut m = mask;
        while m != 0 {
            acc |= table[m.trailing_zeros() as usize];
            m &= m - 1;
        }
        acc
    }

    fn propagate(&self, domains: &mut [u64], mut queue: Vec<usize>) -> bool {
        let mut queued = vec![false; domains.len()];
        for &v in &queue {
            queued[v] = true;
        }
        while let Some(a) = queue.pop() {
            queued[a] = false;
            for &(b, dir) in &self.arcs[a] {
                let narrowed = domains[b] & self.image(domains[a], dir);
                if narrowed != domains[b] {
                    if narrowed == 0 {
                        return false;
                    }
                    domains[b] = narrowed;
                    if !queued[b] {
                        queued[b] = true;
                        queue.push(b);
                    }
                }
            }
        }
        true
    }

    /// First solution in the order "lowest unfixed variable, smallest value".
    pub(crate) fn solve(&self) -> Option<Vec<usize>> {
        if self.infeasible {
            return None;
        }
        let mut domains = self.domains.clone();
        let all = (0..domains.len()).collect();
        if !self.propagate(&mut domains, all) {
            return None;
        }
        self.search(domains)
    }

    fn search(&self, domains: Vec<u64>) -> Option<Vec<usize>> {
        let Some(var) = domains.iter().position(|d| d.count_ones() > 1) else {
            return Some(
                domains
                    .iter()
                    .map(|d| d.trailing_zeros() as usize)
                    .collect(),
            );
        };
        let mut values = domains[var];
        while values != 0 {
            let value = values.trailing_zeros();
            values &= values - 1;
            let mut next = domains.clone();
            next[var] = 1 << value;
            if self.propagate(&mut next, vec![var]) {
                if let Some(sol) = self.search(next) {
                    return Some(sol);
                }
            }
        }
        None
    }
}
