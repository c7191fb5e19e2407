//! Row-by-row backtracking over canonical column blocks.
//!
//! Vertices are placed one at a time. Columns that agree on every row placed
//! so far form a block, and only the number of ones a new row puts in each
//! block matters (ones go first within the block). The blocks after the last
//! row are exactly the nonzero column-count variables `S_A`, so every
//! addressing is reached once up to column order.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use super::{ExactError, SearchConfig};
use crate::addressing::Addressing;
use crate::graph::DistanceMatrix;
use crate::par;

#[derive(Clone, Copy, Debug)]
struct Block {
    size: u64,
    /// Bit `p` is the entry of the row placed at position `p`.
    mask: u64,
}

struct RowState {
    /// Ones chosen per block for the row being placed.
    xs: Vec<u64>,
    /// Distance so far to each placed row.
    dist: Vec<u64>,
    /// `suffix[b]`: total size of blocks `b..`.
    suffix: Vec<u64>,
}

struct Problem<'a> {
    n: usize,
    len: u64,
    /// `need[p][q]`: required distance between the rows at positions `p`, `q`.
    need: Vec<Vec<u64>>,
    order: Vec<usize>,
    cfg: &'a SearchConfig,
    nodes: &'a AtomicU64,
    exhausted: &'a AtomicBool,
}

/// Places the most constrained vertex next: largest total requirement to the
/// rows already placed, ties to the lowest index. Starts from an endpoint of a
/// heaviest pair.
fn vertex_order(req: &[Vec<u64>]) -> Vec<usize> {
    let n = req.len();
    if n == 0 {
        return Vec::new();
    }
    let mut first = 0;
    let mut best = 0;
    for (i, row) in req.iter().enumerate() {
        for &r in &row[i + 1..] {
            if r > best {
                best = r;
                first = i;
            }
        }
    }
    let mut order = vec![first];
    let mut used = vec![false; n];
    used[first] = true;
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| !used[v])
            .max_by_key(|&v| {
                let total: u64 = order.iter().map(|&p| req[v][p]).sum();
                let peak = order.iter().map(|&p| req[v][p]).max().unwrap_or(0);
                (peak, total, std::cmp::Reverse(v))
            })
            .expect("unplaced vertex");
        used[next] = true;
        order.push(next);
    }
    order
}

struct Budget<'a> {
    local: u64,
    shared: &'a AtomicU64,
    limit: u64,
    exhausted: &'a AtomicBool,
}

impl Budget<'_> {
    const BATCH: u64 = 256;

    #[inline]
    fn tick(&mut self) -> Result<(), ExactError> {
        self.local += 1;
        if self.local == Self::BATCH || self.shared.load(Ordering::Relaxed) + self.local > self.limit {
            let used = self.shared.fetch_add(self.local, Ordering::Relaxed) + self.local;
            self.local = 0;
            if used > self.limit || self.exhausted.load(Ordering::Relaxed) {
                self.exhausted.store(true, Ordering::Relaxed);
                return Err(ExactError::BudgetExceeded { limit: self.limit });
            }
        }
        Ok(())
    }

    fn flush(&mut self) {
        self.shared.fetch_add(self.local, Ordering::Relaxed);
        self.local = 0;
    }
}

impl Problem<'_> {
    fn initial_blocks(&self) -> Vec<Block> {
        if self.cfg.canonical_columns {
            vec![Block { size: self.len, mask: 0 }]
        } else {
            (0..self.len).map(|_| Block { size: 1, mask: 0 }).collect()
        }
    }

    /// Splits every block by the ones-count chosen for row `k`.
    fn split(blocks: &[Block], xs: &[u64], k: usize) -> Vec<Block> {
        let mut out = Vec::with_capacity(blocks.len() * 2);
        for (b, &x) in blocks.iter().zip(xs) {
            if x > 0 {
                out.push(Block { size: x, mask: b.mask | (1 << k) });
            }
            if b.size > x {
                out.push(Block { size: b.size - x, mask: b.mask });
            }
        }
        out
    }

    /// Necessary condition for every unplaced row given the rows at positions
    /// `..=k`: a row `r` satisfies `d(r, p) + d(r, q) <= 2 len - d(p, q)`.
    fn lookahead_ok(&self, k: usize, dist_to_k: &[u64]) -> bool {
        (k + 1..self.n).all(|m| {
            (0..k).all(|j| self.need[m][j] + self.need[m][k] + dist_to_k[j] <= 2 * self.len)
        })
    }

    /// Depth-first completion of rows `k..` from `blocks`.
    fn place(&self, k: usize, blocks: &[Block], budget: &mut Budget) -> Result<Option<Vec<Block>>, ExactError> {
        if k == self.n {
            return Ok(Some(blocks.to_vec()));
        }
        self.for_each_row(k, blocks, budget, &mut |p, next, budget| p.place(k + 1, &next, budget))
    }

    /// Calls `visit` on the block split of every admissible row `k`, in search
    /// order, stopping at the first `Some`.
    fn for_each_row<F>(
        &self,
        k: usize,
        blocks: &[Block],
        budget: &mut Budget,
        visit: &mut F,
    ) -> Result<Option<Vec<Block>>, ExactError>
    where
        F: FnMut(&Self, Vec<Block>, &mut Budget) -> Result<Option<Vec<Block>>, ExactError>,
    {
        let mut suffix = vec![0u64; blocks.len() + 1];
        for b in (0..blocks.len()).rev() {
            suffix[b] = suffix[b + 1] + blocks[b].size;
        }
        let mut state = RowState { xs: vec![0; blocks.len()], dist: vec![0; k], suffix };
        self.choose(k, blocks, 0, &mut state, budget, visit)
    }

    fn choose<F>(
        &self,
        k: usize,
        blocks: &[Block],
        b: usize,
        st: &mut RowState,
        budget: &mut Budget,
        visit: &mut F,
    ) -> Result<Option<Vec<Block>>, ExactError>
    where
        F: FnMut(&Self, Vec<Block>, &mut Budget) -> Result<Option<Vec<Block>>, ExactError>,
    {
        if b == blocks.len() {
            if !self.lookahead_ok(k, &st.dist) {
                return Ok(None);
            }
            return visit(self, Self::split(blocks, &st.xs, k), budget);
        }
        let block = blocks[b];
        // push the new row away from the majority of placed rows first
        let ascending = 2 * block.mask.count_ones() as usize > k;
        for step in 0..=block.size {
            let x = if ascending { step } else { block.size - step };
            budget.tick()?;
            let mut ok = true;
            for (j, d) in st.dist.iter_mut().enumerate() {
                *d += if (block.mask >> j) & 1 == 1 { block.size - x } else { x };
                if *d + st.suffix[b + 1] < self.need[k][j] {
                    ok = false;
                }
            }
            if ok {
                st.xs[b] = x;
                if let Some(found) = self.choose(k, blocks, b + 1, st, budget, visit)? {
                    return Ok(Some(found));
                }
            }
            for (j, d) in st.dist.iter_mut().enumerate() {
                *d -= if (block.mask >> j) & 1 == 1 { block.size - x } else { x };
            }
        }
        Ok(None)
    }

    fn budget(&self) -> Budget<'_> {
        Budget { local: 0, shared: self.nodes, limit: self.cfg.node_limit, exhausted: self.exhausted }
    }

    fn to_addressing(&self, blocks: &[Block]) -> Addressing {
        let mut a = Addressing::zeros(self.n, self.len as usize);
        let mut col = 0;
        for b in blocks {
            for _ in 0..b.size {
                for (p, &v) in self.order.iter().enumerate() {
                    if (b.mask >> p) & 1 == 1 {
                        a.set(v, col, true);
                    }
                }
                col += 1;
            }
        }
        a
    }
}

/// Frontier size that keeps the pool busy without front-loading much work.
const FRONTIER_TARGET: usize = 64;

/// Decides whether an addressing of length exactly `len` exists with every
/// pair at distance at least `lambda * d`. Returns a witness, `None` when the
/// exhausted search proves there is none, or `BudgetExceeded`.
pub(super) fn search(
    dm: &DistanceMatrix,
    lambda: u64,
    len: u64,
    cfg: &SearchConfig,
    nodes: &AtomicU64,
) -> Result<Option<Addressing>, ExactError> {
    let n = dm.n();
    if n > 64 {
        return Err(ExactError::TooLarge { n });
    }
    let req: Vec<Vec<u64>> =
        (0..n).map(|i| (0..n).map(|j| lambda * dm.get(i, j)).collect()).collect();
    if req.iter().flatten().any(|&r| r > len) {
        return Ok(None);
    }
    if n <= 1 {
        return Ok(Some(Addressing::zeros(n, len as usize)));
    }
    let order = vertex_order(&req);
    let need = order.iter().map(|&u| order.iter().map(|&v| req[u][v]).collect()).collect();
    let exhausted = AtomicBool::new(false);
    let p = Problem { n, len, need, order, cfg, nodes, exhausted: &exhausted };

    let mut budget = p.budget();
    let mut depth = if cfg.fix_first_row { 1 } else { 0 };
    let mut frontier = vec![p.initial_blocks()];
    while frontier.len() < FRONTIER_TARGET && depth < n {
        let mut next = Vec::new();
        for blocks in &frontier {
            p.for_each_row(depth, blocks, &mut budget, &mut |_, split, _| {
                next.push(split);
                Ok(None)
            })?;
        }
        frontier = next;
        depth += 1;
    }
    budget.flush();
    if depth == n {
        return Ok(frontier.first().map(|b| p.to_addressing(b)));
    }

    let found = par::find_map_first(&frontier, |blocks| {
        let mut budget = p.budget();
        let r = p.place(depth, blocks, &mut budget);
        budget.flush();
        match r {
            Ok(Some(b)) => Some(Ok(b)),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        }
    });
    match found {
        None => Ok(None),
        Some(Ok(blocks)) => Ok(Some(p.to_addressing(&blocks))),
        Some(Err(e)) => Err(e),
    }
}
