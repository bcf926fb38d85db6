//! Non-crossing partitions of `{1..n}`: enumeration, refinement order,
//! Kreweras complement, and the Möbius function of the NC lattice.
//!
//! Partitions are kept in canonical form (each block ascending, blocks
//! ordered by least element) so equality and hashing are structural.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// Default cap for [`enumerate_nc`]; Catalan(10) = 16796 keeps exhaustive
/// moment sums tractable.
pub const DEFAULT_ENUM_BOUND: usize = 10;
/// Hard ceiling for any enumeration override (Catalan(12) = 208012).
pub const MAX_ENUM_BOUND: usize = 12;
/// Cap on the ground-set size for non-crossing pair enumeration.
pub const PAIR_ENUM_BOUND: usize = 16;
/// Cap for [`catalan`].
pub const CATALAN_BOUND: usize = 30;

/// A partition of `{1..n}` into disjoint nonempty blocks, canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Validates cover/disjointness and canonicalizes block order.
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        let mut covered = 0usize;
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::Domain("empty block".into()));
            }
            for &e in block {
                if e < 1 || e > n {
                    return Err(Error::Domain(format!("element {e} outside 1..={n}")));
                }
                if seen[e] {
                    return Err(Error::Domain(format!("element {e} appears in two blocks")));
                }
                seen[e] = true;
                covered += 1;
            }
        }
        if covered != n {
            return Err(Error::Domain(format!(
                "blocks cover {covered} of {n} elements"
            )));
        }
        for block in &mut blocks {
            block.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks })
    }

    /// The all-singletons partition `0_n`.
    pub fn singletons(n: usize) -> Self {
        SetPartition {
            n,
            blocks: (1..=n).map(|i| vec![i]).collect(),
        }
    }

    /// The one-block partition `1_n`.
    pub fn full(n: usize) -> Self {
        SetPartition {
            n,
            blocks: if n == 0 {
                Vec::new()
            } else {
                vec![(1..=n).collect()]
            },
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Block index per element; slot 0 is unused.
    pub fn block_ids(&self) -> Vec<usize> {
        let mut ids = vec![usize::MAX; self.n + 1];
        for (bi, block) in self.blocks.iter().enumerate() {
            for &e in block {
                ids[e] = bi;
            }
        }
        ids
    }
}

/// True iff no quadruple `a<b<c<d` has `a,c` in one block and `b,d` in a
/// different block. Linear scan with a stack of open blocks.
pub fn is_noncrossing(p: &SetPartition) -> bool {
    let ids = p.block_ids();
    let mut remaining: Vec<usize> = p.blocks().iter().map(|b| b.len()).collect();
    let mut opened = vec![false; p.num_blocks()];
    let mut stack: Vec<usize> = Vec::new();
    for e in 1..=p.n() {
        let b = ids[e];
        match stack.last() {
            Some(&top) if top == b => {}
            _ => {
                if opened[b] {
                    // the block resumes while not on top: it interleaves
                    // with whatever was opened in between
                    return false;
                }
                stack.push(b);
                opened[b] = true;
            }
        }
        remaining[b] -= 1;
        if remaining[b] == 0 {
            if stack.last() != Some(&b) {
                return false;
            }
            stack.pop();
        }
    }
    true
}

/// Refinement order: every block of `s` lies inside some block of `p`.
pub fn leq(s: &SetPartition, p: &SetPartition) -> Result<bool> {
    if s.n() != p.n() {
        return Err(Error::Domain(format!(
            "comparing partitions of different ground sets ({} vs {})",
            s.n(),
            p.n()
        )));
    }
    let pid = p.block_ids();
    Ok(s.blocks()
        .iter()
        .all(|b| b.iter().all(|&e| pid[e] == pid[b[0]])))
}

/// A non-crossing partition of `{1..n}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NCPartition(SetPartition);

impl NCPartition {
    pub fn new(p: SetPartition) -> Result<Self> {
        if is_noncrossing(&p) {
            Ok(NCPartition(p))
        } else {
            Err(Error::Domain("partition has a crossing".into()))
        }
    }

    pub fn singletons(n: usize) -> Self {
        NCPartition(SetPartition::singletons(n))
    }

    pub fn full(n: usize) -> Self {
        NCPartition(SetPartition::full(n))
    }

    pub fn as_set(&self) -> &SetPartition {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        self.0.blocks()
    }

    pub fn num_blocks(&self) -> usize {
        self.0.num_blocks()
    }
}

/// A pair partition: every block has exactly two elements.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PairPartition(SetPartition);

impl PairPartition {
    pub fn new(p: SetPartition) -> Result<Self> {
        if p.blocks().iter().any(|b| b.len() != 2) {
            return Err(Error::Domain("pair partition has a block of size != 2".into()));
        }
        Ok(PairPartition(p))
    }

    pub fn as_set(&self) -> &SetPartition {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    /// The blocks as ordered pairs `(r, s)` with `r < s`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.0.blocks().iter().map(|b| (b[0], b[1])).collect()
    }
}

/// All non-crossing partitions of `{1..len}` as raw block lists, built
/// bottom-up: the block of 1 splits the rest into independent segments.
fn nc_patterns(n: usize) -> Vec<Vec<Vec<Vec<usize>>>> {
    let mut table: Vec<Vec<Vec<Vec<usize>>>> = Vec::with_capacity(n + 1);
    table.push(vec![Vec::new()]); // length 0: empty partition
    for len in 1..=n {
        let rest = len - 1;
        let mut out: Vec<Vec<Vec<usize>>> = Vec::new();
        for mask in 0u32..(1u32 << rest) {
            // members of the block containing 1
            let mut block = vec![1usize];
            for i in 0..rest {
                if mask & (1 << i) != 0 {
                    block.push(i + 2);
                }
            }
            // gaps between consecutive members, plus the tail
            let mut segments: Vec<(usize, usize)> = block
                .windows(2)
                .map(|w| (w[0] + 1, w[1] - 1))
                .collect();
            segments.push((block[block.len() - 1] + 1, len));

            let mut partials: Vec<Vec<Vec<usize>>> = vec![vec![block.clone()]];
            for &(a, b) in &segments {
                if a > b {
                    continue;
                }
                let shift = a - 1;
                let seg_parts = &table[b - a + 1];
                let mut next = Vec::with_capacity(partials.len() * seg_parts.len());
                for base in &partials {
                    for sp in seg_parts {
                        let mut combined = base.clone();
                        for blk in sp {
                            combined.push(blk.iter().map(|e| e + shift).collect());
                        }
                        next.push(combined);
                    }
                }
                partials = next;
            }
            out.append(&mut partials);
        }
        table.push(out);
    }
    table
}

/// Per-order cached data: the full list of NC partitions (canonical, sorted)
/// and, computed lazily, the Möbius values `μ(σ, 1_n)` aligned with it.
pub(crate) struct NcLevel {
    pub parts: Vec<NCPartition>,
    index: HashMap<SetPartition, usize>,
    mobius_top: OnceLock<Vec<i64>>,
}

impl NcLevel {
    fn build(n: usize) -> NcLevel {
        let raw = nc_patterns(n).pop().unwrap();
        let mut parts: Vec<NCPartition> = raw
            .into_iter()
            .map(|blocks| {
                let p = SetPartition::new(n, blocks).expect("generated blocks are a partition");
                NCPartition(p)
            })
            .collect();
        parts.sort_unstable_by(|a, b| a.blocks().cmp(b.blocks()));
        let index = parts
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_set().clone(), i))
            .collect();
        NcLevel {
            parts,
            index,
            mobius_top: OnceLock::new(),
        }
    }

    pub fn index_of(&self, p: &NCPartition) -> Option<usize> {
        self.index.get(p.as_set()).copied()
    }

    /// `μ(parts[i], 1_n)` for every i, by the defining recursion run once
    /// with all intermediate values shared.
    pub fn mobius_top(&self) -> &[i64] {
        self.mobius_top.get_or_init(|| {
            let count = self.parts.len();
            let top = self
                .parts
                .iter()
                .position(|p| p.num_blocks() == 1)
                .expect("1_n present");

            // below[i] = bitset of j with parts[j] <= parts[i]
            let words = count.div_ceil(64);
            let mut below = vec![vec![0u64; words]; count];
            for (i, pi) in self.parts.iter().enumerate() {
                for (j, pj) in self.parts.iter().enumerate() {
                    if leq(pj.as_set(), pi.as_set()).unwrap() {
                        below[i][j / 64] |= 1 << (j % 64);
                    }
                }
            }

            // uppers of each s, finest first, so every r < u precedes u
            let mut by_blocks: Vec<usize> = (0..count).collect();
            by_blocks.sort_unstable_by_key(|&i| std::cmp::Reverse(self.parts[i].num_blocks()));

            let mut result = vec![0i64; count];
            let mut row = vec![0i64; count];
            for s in 0..count {
                let uppers: Vec<usize> = by_blocks
                    .iter()
                    .copied()
                    .filter(|&u| below[u][s / 64] & (1 << (s % 64)) != 0)
                    .collect();
                for (pos, &u) in uppers.iter().enumerate() {
                    if u == s {
                        row[u] = 1;
                        continue;
                    }
                    let mut acc = 0i64;
                    for &r in &uppers[..pos] {
                        if below[u][r / 64] & (1 << (r % 64)) != 0 {
                            acc += row[r];
                        }
                    }
                    row[u] = -acc;
                }
                result[s] = row[top];
            }
            result
        })
    }
}

fn level_cache() -> &'static Mutex<HashMap<usize, Arc<NcLevel>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<NcLevel>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared per-order enumeration, synchronized for concurrent callers.
pub(crate) fn nc_level(n: usize) -> Result<Arc<NcLevel>> {
    if n < 1 || n > MAX_ENUM_BOUND {
        return Err(Error::SizeLimit {
            what: "non-crossing enumeration order",
            got: n,
            limit: MAX_ENUM_BOUND,
        });
    }
    if let Some(level) = level_cache().lock().unwrap().get(&n) {
        return Ok(level.clone());
    }
    let built = Arc::new(NcLevel::build(n));
    let mut guard = level_cache().lock().unwrap();
    Ok(guard.entry(n).or_insert(built).clone())
}

/// All non-crossing partitions of `{1..n}`, canonical and deduplicated;
/// the count is Catalan(n).
pub fn enumerate_nc(n: usize) -> Result<Vec<NCPartition>> {
    enumerate_nc_with_bound(n, DEFAULT_ENUM_BOUND)
}

/// As [`enumerate_nc`] with an overridden cap (itself limited to
/// [`MAX_ENUM_BOUND`]).
pub fn enumerate_nc_with_bound(n: usize, bound: usize) -> Result<Vec<NCPartition>> {
    let bound = bound.min(MAX_ENUM_BOUND);
    if n < 1 || n > bound {
        return Err(Error::SizeLimit {
            what: "non-crossing enumeration order",
            got: n,
            limit: bound,
        });
    }
    Ok(nc_level(n)?.parts.clone())
}

/// All non-crossing pair partitions of `{1..2k}`; the count is Catalan(k).
pub fn enumerate_nc_pair(two_k: usize) -> Result<Vec<PairPartition>> {
    if two_k == 0 || two_k % 2 != 0 {
        return Err(Error::Domain(format!(
            "pair partitions need an even positive ground set, got {two_k}"
        )));
    }
    if two_k > PAIR_ENUM_BOUND {
        return Err(Error::SizeLimit {
            what: "non-crossing pair enumeration order",
            got: two_k,
            limit: PAIR_ENUM_BOUND,
        });
    }
    // 1 pairs with an even j; the inside and outside segments are
    // independent non-crossing pairings
    let mut table: Vec<Vec<Vec<(usize, usize)>>> = vec![vec![Vec::new()]];
    for m in 1..=(two_k / 2) {
        let len = 2 * m;
        let mut out = Vec::new();
        for j in (2..=len).step_by(2) {
            let inner = &table[(j - 2) / 2];
            let outer = &table[(len - j) / 2];
            for ip in inner {
                for op in outer {
                    let mut pairs = vec![(1, j)];
                    pairs.extend(ip.iter().map(|&(a, b)| (a + 1, b + 1)));
                    pairs.extend(op.iter().map(|&(a, b)| (a + j, b + j)));
                    out.push(pairs);
                }
            }
        }
        table.push(out);
    }
    let mut result: Vec<PairPartition> = table
        .pop()
        .unwrap()
        .into_iter()
        .map(|pairs| {
            let blocks = pairs.into_iter().map(|(a, b)| vec![a, b]).collect();
            PairPartition(SetPartition::new(two_k, blocks).expect("valid pairing"))
        })
        .collect();
    result.sort_unstable_by(|a, b| a.as_set().blocks().cmp(b.as_set().blocks()));
    Ok(result)
}

/// The m-th Catalan number, exactly.
pub fn catalan(m: usize) -> Result<BigInt> {
    if m > CATALAN_BOUND {
        return Err(Error::SizeLimit {
            what: "catalan index",
            got: m,
            limit: CATALAN_BOUND,
        });
    }
    Ok(num_integer::binomial(BigInt::from(2 * m), BigInt::from(m)) / BigInt::from(m + 1))
}

/// Union of `p` (on odd circle positions) and a candidate complement
/// (on even positions) as a partition of `{1..2n}`.
fn interleaved_union(p: &NCPartition, comp: &[Vec<usize>]) -> SetPartition {
    let n = p.n();
    let mut blocks: Vec<Vec<usize>> = p
        .blocks()
        .iter()
        .map(|b| b.iter().map(|&i| 2 * i - 1).collect())
        .collect();
    blocks.extend(
        comp.iter()
            .map(|b| b.iter().map(|&i| 2 * i).collect::<Vec<_>>()),
    );
    SetPartition::new(2 * n, blocks).expect("interleaved blocks form a partition")
}

/// Kreweras complement: the coarsest partition `K(p)` of the interleaved
/// copies `1̄..n̄` such that `p ∪ K(p)` is non-crossing on the 2n-point
/// circle. Satisfies `|p| + |K(p)| = n + 1`.
///
/// Built greedily: merging any two complement blocks that keeps the union
/// non-crossing. Compatible partitions are exactly those below `K(p)`, so
/// the greedy fixpoint is the complement regardless of merge order.
pub fn kreweras_complement(p: &NCPartition) -> NCPartition {
    let n = p.n();
    if n == 0 {
        return NCPartition(SetPartition::full(0));
    }
    let mut comp: Vec<Vec<usize>> = (1..=n).map(|i| vec![i]).collect();
    loop {
        let mut merged = false;
        'search: for a in 0..comp.len() {
            for b in (a + 1)..comp.len() {
                let mut cand: Vec<Vec<usize>> = Vec::with_capacity(comp.len() - 1);
                for (i, blk) in comp.iter().enumerate() {
                    if i == b {
                        continue;
                    }
                    let mut blk = blk.clone();
                    if i == a {
                        blk.extend_from_slice(&comp[b]);
                        blk.sort_unstable();
                    }
                    cand.push(blk);
                }
                if is_noncrossing(&interleaved_union(p, &cand)) {
                    comp = cand;
                    merged = true;
                    break 'search;
                }
            }
        }
        if !merged {
            break;
        }
    }
    NCPartition::new(SetPartition::new(n, comp).expect("complement is a partition"))
        .expect("complement is non-crossing")
}

/// Möbius function of the NC lattice interval `[s, p]`, by the defining
/// recursion `μ(s,s) = 1`, `μ(s,p) = −Σ_{s≤r<p} μ(s,r)`.
pub fn mobius_nc(s: &NCPartition, p: &NCPartition) -> Result<i64> {
    if s.n() != p.n() {
        return Err(Error::Domain(format!(
            "Möbius interval endpoints on different ground sets ({} vs {})",
            s.n(),
            p.n()
        )));
    }
    if !leq(s.as_set(), p.as_set())? {
        return Err(Error::Domain(
            "Möbius interval requires s ≤ p in refinement order".into(),
        ));
    }
    let level = nc_level(s.n())?;
    // elements of [s, p], finest first
    let mut interval: Vec<usize> = level
        .parts
        .iter()
        .enumerate()
        .filter(|(_, r)| {
            leq(s.as_set(), r.as_set()).unwrap() && leq(r.as_set(), p.as_set()).unwrap()
        })
        .map(|(i, _)| i)
        .collect();
    interval.sort_unstable_by_key(|&i| std::cmp::Reverse(level.parts[i].num_blocks()));

    let mut mu: HashMap<usize, i64> = HashMap::with_capacity(interval.len());
    for (pos, &u) in interval.iter().enumerate() {
        if level.parts[u].as_set() == s.as_set() {
            mu.insert(u, 1);
            continue;
        }
        let mut acc = 0i64;
        for &r in &interval[..pos] {
            if leq(level.parts[r].as_set(), level.parts[u].as_set())? {
                acc += mu[&r];
            }
        }
        mu.insert(u, -acc);
    }
    let p_idx = level
        .index_of(p)
        .expect("interval endpoint is enumerated");
    Ok(mu[&p_idx])
}
