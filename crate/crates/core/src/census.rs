//! Exhaustive enumeration and classification of small digraphs.
//!
//! Digraphs on `n` vertices are identified with their adjacency codes (see
//! [`Digraph::from_code`]), so the labeled space is `0..2^(n²)` and the
//! canonical representative of an isomorphism class is its smallest code.

use std::fmt;
use std::str::FromStr;
use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

use serde::{Deserialize, Serialize};

use crate::decide::{decide_maltsev, MaltsevCertificate};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::oracle::find_polymorphism_bruteforce;
use crate::structure::is_rectangular;
use crate::synth::{synth_majority, OpKind};

pub const MAX_CENSUS_N: usize = 5;

const SHARDS: u64 = 256;

/// Up to this size the majority column is filled by exhaustive search;
/// above it, by synthesising a majority table for every Maltsev digraph.
pub const ORACLE_MAJORITY_MAX_N: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumerationMode {
    Labeled,
    UpToIso,
}

impl EnumerationMode {
    pub fn name(self) -> &'static str {
        match self {
            EnumerationMode::Labeled => "labeled",
            EnumerationMode::UpToIso => "up_to_iso",
        }
    }
}

impl fmt::Display for EnumerationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnumerationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "labeled" => Ok(EnumerationMode::Labeled),
            "up_to_iso" | "iso" => Ok(EnumerationMode::UpToIso),
            _ => Err(Error::InvalidArgument(format!("unknown mode `{s}`"))),
        }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_CENSUS_N {
        return Err(Error::InvalidArgument(format!(
            "enumeration is limited to n ≤ {MAX_CENSUS_N}, got {n}"
        )));
    }
    Ok(())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Minimises adjacency codes over all vertex permutations.
struct Canonizer {
    n: usize,
    /// For each permutation, the destination bit of every source bit.
    bit_maps: Vec<Vec<u32>>,
    /// For each permutation, the source bit of every destination bit.
    inverse_maps: Vec<Vec<u32>>,
}

impl Canonizer {
    fn new(n: usize) -> Self {
        let nn = n * n;
        let bit_maps = permutations(n)
            .into_iter()
            .map(|p| {
                (0..nn)
                    .map(|b| {
                        let (u, v) = ((nn - 1 - b) / n, (nn - 1 - b) % n);
                        (nn - 1 - (p[u] * n + p[v])) as u32
                    })
                    .collect()
            })
            .collect::<Vec<Vec<u32>>>();
        let inverse_maps = bit_maps
            .iter()
            .map(|map| {
                let mut inv = vec![0u32; nn];
                for (src, &dst) in map.iter().enumerate() {
                    inv[dst as usize] = src as u32;
                }
                inv
            })
            .collect();
        Canonizer {
            n,
            bit_maps,
            inverse_maps,
        }
    }

    /// No relabeling has a smaller code. Compares from the most significant
    /// bit and stops at the first difference.
    fn is_canonical(&self, code: u64) -> bool {
        let nn = self.n * self.n;
        self.inverse_maps.iter().all(|inv| {
            for p in (0..nn).rev() {
                let permuted = code >> inv[p] & 1;
                let own = code >> p & 1;
                if permuted != own {
                    return permuted > own;
                }
            }
            true
        })
    }

    fn canonical(&self, code: u64) -> u64 {
        let nn = self.n * self.n;
        self.bit_maps
            .iter()
            .map(|map| {
                (0..nn)
                    .filter(|&b| code >> b & 1 == 1)
                    .fold(0u64, |acc, b| acc | 1 << map[b])
            })
            .min()
            .unwrap_or(code)
    }
}

/// The smallest adjacency code among all relabelings of `g`.
pub fn canonical_code(g: &Digraph) -> Result<u64> {
    check_size(g.n())?;
    Ok(Canonizer::new(g.n()).canonical(g.code()))
}

pub fn canonical_form(g: &Digraph) -> Result<Digraph> {
    Ok(Digraph::from_code(g.n(), canonical_code(g)?))
}

fn space_size(n: usize) -> u64 {
    1u64 << (n * n)
}

/// All digraphs on `n` vertices in ascending code order, or one
/// representative (the minimum-code member) per isomorphism class.
pub fn enumerate_digraphs(
    n: usize,
    mode: EnumerationMode,
) -> Result<impl Iterator<Item = Digraph>> {
    check_size(n)?;
    let canon = match mode {
        EnumerationMode::Labeled => None,
        EnumerationMode::UpToIso => Some(Canonizer::new(n)),
    };
    Ok((0..space_size(n))
        .filter(move |&c| canon.as_ref().is_none_or(|k| k.is_canonical(c)))
        .map(move |c| Digraph::from_code(n, c)))
}

/// One row of the census: how many digraphs on `n` vertices are
/// rectangular, Maltsev and admit a majority polymorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CensusRow {
    pub n: usize,
    pub mode: EnumerationMode,
    pub total: u64,
    pub rectangular: u64,
    pub maltsev: u64,
    pub majority: u64,
}

impl CensusRow {
    pub const CSV_HEADER: &'static str = "n,mode,total,rectangular,maltsev,majority";

    fn empty(n: usize, mode: EnumerationMode) -> Self {
        CensusRow {
            n,
            mode,
            total: 0,
            rectangular: 0,
            maltsev: 0,
            majority: 0,
        }
    }

    fn merge(mut self, other: CensusRow) -> Self {
        self.total += other.total;
        self.rectangular += other.rectangular;
        self.maltsev += other.maltsev;
        self.majority += other.majority;
        self
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n, self.mode, self.total, self.rectangular, self.maltsev, self.majority
        )
    }
}

/// Renders rows as CSV with the header line.
pub fn to_csv(rows: &[CensusRow]) -> String {
    let mut s = String::from(CensusRow::CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv_line());
        s.push('\n');
    }
    s
}

fn classify_range(
    n: usize,
    mode: EnumerationMode,
    codes: Range<u64>,
) -> Result<CensusRow> {
    let canon = (mode == EnumerationMode::UpToIso).then(|| Canonizer::new(n));
    let mut row = CensusRow::empty(n, mode);
    for code in codes {
        if let Some(k) = &canon {
            if !k.is_canonical(code) {
                continue;
            }
        }
        row.total += 1;
        if !code_is_rectangular(n, code) {
            if n <= ORACLE_MAJORITY_MAX_N
                && find_polymorphism_bruteforce(&Digraph::from_code(n, code), OpKind::Majority)?
                    .is_some()
            {
                row.majority += 1;
            }
            continue;
        }
        let g = Digraph::from_code(n, code);
        debug_assert!(is_rectangular(&g));
        row.rectangular += 1;
        let maltsev = decide_maltsev(&g).is_maltsev();
        if maltsev {
            row.maltsev += 1;
        }
        let majority = if n <= ORACLE_MAJORITY_MAX_N {
            find_polymorphism_bruteforce(&g, OpKind::Majority)?.is_some()
        } else {
            maltsev && synth_majority(&g).is_ok()
        };
        if majority {
            row.majority += 1;
        }
    }
    Ok(row)
}

/// Rectangularity read straight off an adjacency code: all in-neighbours of
/// any vertex must have the same out-neighbourhood.
fn code_is_rectangular(n: usize, code: u64) -> bool {
    let nn = n * n;
    let mut rows = [0u64; MAX_CENSUS_N];
    for (u, row) in rows.iter_mut().enumerate().take(n) {
        *row = code >> (nn - (u + 1) * n) & ((1 << n) - 1);
    }
    // Row bit `n-1-v` stands for the edge to `v`.
    (0..n).all(|col| {
        let mut shared: Option<u64> = None;
        rows[..n]
            .iter()
            .filter(|r| *r >> col & 1 == 1)
            .all(|&r| *shared.get_or_insert(r) == r)
    })
}

/// Census row for `n` computed on a single thread.
pub fn count_maltsev(n: usize, mode: EnumerationMode) -> Result<CensusRow> {
    count_maltsev_sharded(n, mode, 1)
}

/// Census row for `n` classified by `workers` threads. The code space is cut
/// into contiguous prefix shards that idle workers pick up in turn; rows are
/// summed, so the result does not depend on the number of workers.
pub fn count_maltsev_sharded(
    n: usize,
    mode: EnumerationMode,
    workers: usize,
) -> Result<CensusRow> {
    check_size(n)?;
    let total = space_size(n);
    let shard_count = total.min(SHARDS);
    let chunk = total.div_ceil(shard_count);
    let shards: Vec<Range<u64>> = (0..shard_count)
        .map(|w| (w * chunk).min(total)..((w + 1) * chunk).min(total))
        .collect();
    let next = AtomicUsize::new(0);
    let workers = workers.clamp(1, shards.len());
    let rows: Vec<Result<CensusRow>> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| {
                    let mut row = CensusRow::empty(n, mode);
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(range) = shards.get(i) else {
                            return Ok(row);
                        };
                        row = row.merge(classify_range(n, mode, range.clone())?);
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("census worker panicked"))
            .collect()
    });
    rows.into_iter()
        .try_fold(CensusRow::empty(n, mode), |acc, r| Ok(acc.merge(r?)))
}

/// The first digraph, by vertex count then adjacency code, that is
/// rectangular but not Maltsev. Such a digraph is always refuted below the
/// top level of its certificate.
pub fn smallest_rectangular_non_maltsev() -> Option<(Digraph, MaltsevCertificate)> {
    (0..=MAX_CENSUS_N).find_map(|n| {
        (0..space_size(n)).find_map(|code| {
            if !code_is_rectangular(n, code) {
                return None;
            }
            let g = Digraph::from_code(n, code);
            let cert = decide_maltsev(&g);
            (!cert.is_maltsev()).then_some((g, cert))
        })
    })
}
