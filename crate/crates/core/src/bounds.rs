//! Closed-form lower and upper bounds on the addressing length `c` and on its
//! fractional counterpart `beta`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::addressing::ceil_log2;
use crate::graph::{DistanceMatrix, GraphError, WeightedGraph};
use crate::lp::{ceil_u64, fmt_rational, int, Rational};
use crate::par;

pub const DEFAULT_SUBSET_CAP: usize = 6;
pub const DEFAULT_HELD_KARP_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{n} vertices exceed the Held-Karp limit of {cap}")]
    SizeLimit { n: usize, cap: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct BoundsConfig {
    /// Largest vertex subset enumerated for the subset Plotkin bound.
    pub subset_cap: usize,
    /// Hamilton bounds are omitted above this many vertices.
    pub held_karp_cap: usize,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self { subset_cap: DEFAULT_SUBSET_CAP, held_karp_cap: DEFAULT_HELD_KARP_CAP }
    }
}

/// Which parameter a bound constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Quantity {
    C,
    Beta,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::C => "c",
            Quantity::Beta => "beta",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bound {
    pub rule: &'static str,
    pub quantity: Quantity,
    pub value: Rational,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundReport {
    pub lower: Vec<Bound>,
    pub upper: Vec<Bound>,
}

impl BoundReport {
    fn push_lower(&mut self, rule: &'static str, quantity: Quantity, value: Rational) {
        self.lower.push(Bound { rule, quantity, value });
    }

    fn push_upper(&mut self, rule: &'static str, quantity: Quantity, value: Rational) {
        self.upper.push(Bound { rule, quantity, value });
    }

    /// Sorts both lists by quantity, then rule name.
    fn normalize(&mut self) {
        for list in [&mut self.lower, &mut self.upper] {
            list.sort_by(|a, b| (a.quantity, a.rule).cmp(&(b.quantity, b.rule)));
        }
    }

    pub fn merge(mut self, other: BoundReport) -> Self {
        self.lower.extend(other.lower);
        self.upper.extend(other.upper);
        self.normalize();
        self
    }

    fn best(list: &[Bound], q: Quantity, upper: bool) -> Option<&Bound> {
        list.iter().filter(|b| b.quantity == q).fold(None, |best: Option<&Bound>, b| match best {
            Some(x) if (upper && b.value >= x.value) || (!upper && b.value <= x.value) => Some(x),
            _ => Some(b),
        })
    }

    /// Largest lower bound on `c`; ties go to the first rule by name.
    pub fn best_lower(&self) -> Option<(u64, &'static str)> {
        Self::best(&self.lower, Quantity::C, false)
            .map(|b| (ceil_u64(&b.value).expect("nonnegative"), b.rule))
    }

    /// Smallest upper bound on `c`; ties go to the first rule by name.
    pub fn best_upper(&self) -> Option<(u64, &'static str)> {
        Self::best(&self.upper, Quantity::C, true)
            .map(|b| (ceil_u64(&b.value).expect("nonnegative"), b.rule))
    }

    pub fn best_beta_lower(&self) -> Option<(Rational, &'static str)> {
        Self::best(&self.lower, Quantity::Beta, false).map(|b| (b.value.clone(), b.rule))
    }

    pub fn best_beta_upper(&self) -> Option<(Rational, &'static str)> {
        Self::best(&self.upper, Quantity::Beta, true).map(|b| (b.value.clone(), b.rule))
    }

    pub fn get(&self, side_upper: bool, quantity: Quantity, rule: &str) -> Option<&Rational> {
        let list = if side_upper { &self.upper } else { &self.lower };
        list.iter().find(|b| b.quantity == quantity && b.rule == rule).map(|b| &b.value)
    }

    fn rows(&self) -> Vec<(&'static str, &Bound)> {
        let lower = self.lower.iter().map(|b| ("lower", b));
        lower.chain(self.upper.iter().map(|b| ("upper", b))).collect()
    }

    fn summary(&self) -> Vec<(&'static str, String, &'static str)> {
        let mut out = Vec::new();
        if let Some((v, r)) = self.best_lower() {
            out.push(("best_lower", v.to_string(), r));
        }
        if let Some((v, r)) = self.best_upper() {
            out.push(("best_upper", v.to_string(), r));
        }
        if let Some((v, r)) = self.best_beta_lower() {
            out.push(("best_beta_lower", fmt_rational(&v), r));
        }
        if let Some((v, r)) = self.best_beta_upper() {
            out.push(("best_beta_upper", fmt_rational(&v), r));
        }
        out
    }

    /// Aligned human-readable table.
    pub fn to_table(&self) -> String {
        let rows = self.rows();
        let width = rows.iter().map(|(_, b)| b.rule.len()).max().unwrap_or(4).max(4);
        let mut s = format!("{:<5}  {:<8}  {:<width$}  value\n", "side", "quantity", "rule");
        for (side, b) in rows {
            let _ = writeln!(
                s,
                "{side:<5}  {:<8}  {:<width$}  {}",
                b.quantity.name(),
                b.rule,
                fmt_rational(&b.value)
            );
        }
        for (key, v, rule) in self.summary() {
            let _ = writeln!(s, "{key} = {v} ({rule})");
        }
        s
    }

    /// One `key=value` per line: `lower.c.diameter=3`, then `best_*` keys.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        for (side, b) in self.rows() {
            let _ = writeln!(s, "{side}.{}.{}={}", b.quantity.name(), b.rule, fmt_rational(&b.value));
        }
        for (key, v, rule) in self.summary() {
            let _ = writeln!(s, "{key}={v}");
            let _ = writeln!(s, "{key}_rule={rule}");
        }
        s
    }
}

/// Largest `sum of pairwise distances / floor(|B|^2 / 4)` over vertex sets
/// `B` with `2 <= |B| <= cap`, and a maximizing set (first in lexicographic
/// order). `None` with fewer than two vertices.
pub fn subset_plotkin(dm: &DistanceMatrix, cap: usize) -> Option<(Rational, Vec<usize>)> {
    let n = dm.n();
    if n < 2 || cap < 2 {
        return None;
    }
    let firsts: Vec<usize> = (0..n).collect();
    let per_first = par::map(&firsts, |&first| {
        let mut best: Option<(Rational, Vec<usize>)> = None;
        let mut set = vec![first];
        subsets_from(dm, cap, &mut set, 0, &mut best);
        best
    });
    per_first.into_iter().flatten().fold(None, |acc, cand| match acc {
        Some(a) if a.0 >= cand.0 => Some(a),
        _ => Some(cand),
    })
}

fn subsets_from(
    dm: &DistanceMatrix,
    cap: usize,
    set: &mut Vec<usize>,
    sum: u64,
    best: &mut Option<(Rational, Vec<usize>)>,
) {
    let k = set.len();
    if k >= 2 {
        let v = Rational::new((sum as i64).into(), ((k * k / 4) as i64).into());
        if best.as_ref().is_none_or(|b| v > b.0) {
            *best = Some((v, set.clone()));
        }
    }
    if k == cap {
        return;
    }
    let last = *set.last().expect("nonempty");
    for next in last + 1..dm.n() {
        let add: u64 = set.iter().map(|&u| dm.get(u, next)).sum();
        set.push(next);
        subsets_from(dm, cap, set, sum + add, best);
        set.pop();
    }
}

/// Largest triangle perimeter in the metric and a maximizing triple.
pub fn max_triangle(dm: &DistanceMatrix) -> Option<(u64, [usize; 3])> {
    let n = dm.n();
    let mut best: Option<(u64, [usize; 3])> = None;
    for u in 0..n {
        for v in u + 1..n {
            for z in v + 1..n {
                let p = dm.get(u, v) + dm.get(u, z) + dm.get(v, z);
                if best.is_none_or(|b| p > b.0) {
                    best = Some((p, [u, v, z]));
                }
            }
        }
    }
    best
}

/// Lower bounds with the default configuration.
pub fn lower_bounds(g: &WeightedGraph) -> Result<BoundReport, BoundsError> {
    Ok(lower_bounds_dm(&g.distances()?, BoundsConfig::default()))
}

/// Diameter, `ceil(log2 n)`, the heaviest-triangle bound `ceil(perimeter / 2)`
/// and the subset Plotkin bound for `c`; diameter, whole-set Plotkin and
/// subset Plotkin for `beta`.
pub fn lower_bounds_dm(dm: &DistanceMatrix, cfg: BoundsConfig) -> BoundReport {
    let mut r = BoundReport::default();
    let n = dm.n();
    let diam = int(dm.diameter());
    r.push_lower("diameter", Quantity::C, diam.clone());
    r.push_lower("diameter", Quantity::Beta, diam);
    r.push_lower("log2_vertices", Quantity::C, int(u64::from(ceil_log2(n))));
    if let Some((p, _)) = max_triangle(dm) {
        r.push_lower("triangle", Quantity::C, int(p.div_ceil(2)));
    }
    if n >= 2 {
        let q = Rational::new((dm.pair_sum() as i64).into(), ((n * n / 4) as i64).into());
        r.push_lower("plotkin", Quantity::Beta, q);
    }
    if let Some((v, _)) = subset_plotkin(dm, cfg.subset_cap) {
        r.push_lower("subset_plotkin", Quantity::C, v.ceil());
        r.push_lower("subset_plotkin", Quantity::Beta, v);
    }
    r.normalize();
    r
}

/// Upper bounds with the default configuration.
pub fn upper_bounds(g: &WeightedGraph) -> Result<BoundReport, BoundsError> {
    upper_bounds_with(g, BoundsConfig::default())
}

/// Hamilton path and half Hamilton cycle on the metric closure (omitted above
/// `held_karp_cap`), bottleneck tree `t * (n - 1)`, the Hadamard length, the
/// `sum - max` for cycles, total weight for trees, and `2 * diam` for `beta`.
pub fn upper_bounds_with(g: &WeightedGraph, cfg: BoundsConfig) -> Result<BoundReport, BoundsError> {
    let dm = g.distances()?;
    let n = g.n();
    let mut r = BoundReport::default();
    if n <= cfg.held_karp_cap {
        let p = held_karp_path(&dm, cfg.held_karp_cap)?;
        r.push_upper("hamilton_path", Quantity::C, int(p.weight));
        let c = held_karp_cycle(&dm, cfg.held_karp_cap)?;
        r.push_upper("hamilton_cycle_half", Quantity::C, int(c.weight.div_ceil(2)));
    }
    let t = bottleneck_spanning_tree(g)?;
    r.push_upper("bottleneck_tree", Quantity::C, int(t * (n as u64 - 1)));
    let need = (n as u64).max(2 * dm.diameter()).max(1);
    r.push_upper("hadamard", Quantity::C, int(need.next_power_of_two() - 1));
    if let Some((_, weights)) = g.cycle_order() {
        let total: u64 = weights.iter().sum();
        let max = weights.iter().copied().max().unwrap_or(0);
        r.push_upper("cycle_sum_minus_max", Quantity::C, int(total - max));
    }
    if g.is_tree() {
        r.push_upper("tree_weight", Quantity::C, int(g.edges().iter().map(|e| e.w).sum()));
    }
    r.push_upper("twice_diameter", Quantity::Beta, int(2 * dm.diameter()));
    r.normalize();
    Ok(r)
}

/// Both sides merged.
pub fn all_bounds(g: &WeightedGraph, cfg: BoundsConfig) -> Result<BoundReport, BoundsError> {
    let lower = lower_bounds_dm(&g.distances()?, cfg);
    Ok(lower.merge(upper_bounds_with(g, cfg)?))
}

/// Minimum over spanning trees of the heaviest tree edge, by Kruskal.
pub fn bottleneck_spanning_tree(g: &WeightedGraph) -> Result<u64, BoundsError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    let mut edges: Vec<_> = g.edges().to_vec();
    edges.sort_by_key(|e| e.w);
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut joined = 1;
    let mut t = 0;
    for e in edges {
        if joined == g.n() {
            break;
        }
        let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
        if a != b {
            parent[a] = b;
            joined += 1;
            t = e.w;
        }
    }
    Ok(t)
}

/// A minimum-weight Hamilton path or cycle on the metric closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    pub weight: u64,
    pub order: Vec<usize>,
}

const INF: u64 = u64::MAX / 4;

/// `dp[mask * n + v]`: lightest path covering `mask` and ending at `v`.
/// Masks are processed by popcount so each layer only reads the previous one.
fn held_karp_table(dm: &DistanceMatrix, start: Option<usize>) -> (Vec<u64>, Vec<u8>) {
    let n = dm.n();
    let full = 1usize << n;
    let mut dp = vec![INF; full * n];
    let mut parent = vec![u8::MAX; full * n];
    match start {
        Some(s) => dp[(1 << s) * n + s] = 0,
        None => (0..n).for_each(|v| dp[(1 << v) * n + v] = 0),
    }
    let mut layers = vec![Vec::new(); n + 1];
    for mask in 1..full {
        if start.is_none_or(|s| (mask >> s) & 1 == 1) {
            layers[mask.count_ones() as usize].push(mask);
        }
    }
    for layer in &layers[2..] {
        let computed = par::map(layer, |&mask| {
            let mut cells = Vec::new();
            for v in (0..n).filter(|v| (mask >> v) & 1 == 1) {
                let prev = mask & !(1 << v);
                let mut best = (INF, u8::MAX);
                for u in (0..n).filter(|u| (prev >> u) & 1 == 1) {
                    let w = dp[prev * n + u];
                    if w < INF && w + dm.get(u, v) < best.0 {
                        best = (w + dm.get(u, v), u as u8);
                    }
                }
                cells.push((mask * n + v, best));
            }
            cells
        });
        for (idx, (w, p)) in computed.into_iter().flatten() {
            dp[idx] = w;
            parent[idx] = p;
        }
    }
    (dp, parent)
}

fn walk_back(n: usize, parent: &[u8], mut mask: usize, mut v: usize) -> Vec<usize> {
    let mut order = vec![v];
    while mask.count_ones() > 1 {
        let u = parent[mask * n + v] as usize;
        mask &= !(1 << v);
        v = u;
        order.push(v);
    }
    order.reverse();
    order
}

fn check_size(n: usize, cap: usize) -> Result<(), BoundsError> {
    if n > cap || n > 24 {
        Err(BoundsError::SizeLimit { n, cap })
    } else {
        Ok(())
    }
}

/// Lightest Hamilton path of the metric closure (Held-Karp).
pub fn held_karp_path(dm: &DistanceMatrix, cap: usize) -> Result<Tour, BoundsError> {
    let n = dm.n();
    check_size(n, cap)?;
    if n <= 1 {
        return Ok(Tour { weight: 0, order: (0..n).collect() });
    }
    let (dp, parent) = held_karp_table(dm, None);
    let full = (1 << n) - 1;
    let end = (0..n).min_by_key(|&v| dp[full * n + v]).expect("n >= 2");
    Ok(Tour { weight: dp[full * n + end], order: walk_back(n, &parent, full, end) })
}

/// Lightest Hamilton cycle of the metric closure (Held-Karp), starting at 0.
pub fn held_karp_cycle(dm: &DistanceMatrix, cap: usize) -> Result<Tour, BoundsError> {
    let n = dm.n();
    check_size(n, cap)?;
    match n {
        0 | 1 => return Ok(Tour { weight: 0, order: (0..n).collect() }),
        2 => return Ok(Tour { weight: 2 * dm.get(0, 1), order: vec![0, 1] }),
        _ => {}
    }
    let (dp, parent) = held_karp_table(dm, Some(0));
    let full = (1 << n) - 1;
    let close = |v: usize| dp[full * n + v] + dm.get(v, 0);
    let end = (1..n).min_by_key(|&v| close(v)).expect("n >= 3");
    Ok(Tour { weight: close(end), order: walk_back(n, &parent, full, end) })
}
