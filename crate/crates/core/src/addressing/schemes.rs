//! Constructive addressing schemes.

use super::{Addressing, AddressingError};
use crate::graph::{DistanceMatrix, WeightedGraph};

fn ceil_half(x: u64) -> u64 {
    x.div_ceil(2)
}

pub(crate) fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// `0^(len - p) 1^p`.
fn set_suffix_ones(a: &mut Addressing, row: usize, len: usize, ones: usize) {
    for c in len - ones..len {
        a.set(row, c, true);
    }
}

/// Address of position `p` on a unit cycle of length `total`, using the
/// rolling window of length `ceil(total / 2)`: ones fill in from the right,
/// then drain from the right once the row is all ones.
fn rolling_row(a: &mut Addressing, row: usize, total: u64, p: u64) {
    let len = ceil_half(total);
    if p <= len {
        set_suffix_ones(a, row, len as usize, p as usize);
    } else {
        for c in 0..(total - p) as usize {
            a.set(row, c, true);
        }
    }
}

/// Optimal addressing of a weighted path: row `k` is `0^(L - s_k) 1^(s_k)`
/// where `s_k` is the weight of the first `k` edges and `L` the total weight.
pub fn path_addressing(weights: &[u64]) -> Result<Addressing, AddressingError> {
    if weights.is_empty() {
        return Err(AddressingError::EmptyInput);
    }
    let total: u64 = weights.iter().sum();
    let mut a = Addressing::zeros(weights.len() + 1, total as usize);
    let mut s = 0;
    for (k, &w) in std::iter::once(&0).chain(weights).enumerate() {
        s += w;
        set_suffix_ones(&mut a, k, total as usize, s as usize);
    }
    Ok(a)
}

/// Optimal addressing of a weight-minimal weighted cycle, of length
/// `ceil(sum / 2)`. Vertex `i` sits after the first `i` edges; vertex 0 gets
/// the all-zero row.
pub fn cycle_addressing(weights: &[u64]) -> Result<Addressing, AddressingError> {
    if weights.len() < 3 {
        return Err(AddressingError::WrongSize { expected: 3, found: weights.len() });
    }
    let total: u64 = weights.iter().sum();
    if weights.iter().any(|&w| w == 0 || 2 * w > total) {
        return Err(AddressingError::NotWeightMinimal);
    }
    Ok(rolling_positions(weights))
}

fn rolling_positions(weights: &[u64]) -> Addressing {
    let total: u64 = weights.iter().sum();
    let mut a = Addressing::zeros(weights.len(), ceil_half(total) as usize);
    let mut p = 0;
    for (i, &w) in weights.iter().enumerate() {
        rolling_row(&mut a, i, total, p);
        p += w;
    }
    a
}

/// Addressing of length `ceil(H / 2)` where `H` is the length of the closed
/// tour visiting vertices in `order`. Valid for any metric: both arcs of the
/// tour between two vertices are at least their distance.
pub fn cyclic_order_addressing(dm: &DistanceMatrix, order: &[usize]) -> Addressing {
    assert_eq!(order.len(), dm.n(), "order must visit every vertex once");
    let n = order.len();
    let weights: Vec<u64> = (0..n).map(|i| dm.get(order[i], order[(i + 1) % n])).collect();
    let rolled = if n == 1 { Addressing::zeros(1, 0) } else { rolling_positions(&weights) };
    let mut inverse = vec![0; n];
    for (pos, &v) in order.iter().enumerate() {
        inverse[v] = pos;
    }
    rolled.select_rows(&inverse)
}

/// Addressing of length equal to the weight of the open path visiting
/// vertices in `order`.
pub fn linear_order_addressing(dm: &DistanceMatrix, order: &[usize]) -> Addressing {
    assert_eq!(order.len(), dm.n(), "order must visit every vertex once");
    let weights: Vec<u64> = order.windows(2).map(|w| dm.get(w[0], w[1])).collect();
    let rolled = if weights.is_empty() {
        Addressing::zeros(1, 0)
    } else {
        path_addressing(&weights).expect("non-empty")
    };
    let mut inverse = vec![0; order.len()];
    for (pos, &v) in order.iter().enumerate() {
        inverse[v] = pos;
    }
    rolled.select_rows(&inverse)
}

/// Three rows `{0^k, 1^c 0^(k-c), 0^(k-b) 1^b}` with `k = ceil((a+b+c)/2)`.
/// Row 0 and row 1 are at distance `c`, rows 0 and 2 at `b`, rows 1 and 2 at
/// least `a`.
pub fn triangle_addressing(a: u64, b: u64, c: u64) -> Result<Addressing, AddressingError> {
    if !(a <= b && b <= c && c <= a + b) || a == 0 {
        return Err(AddressingError::TriangleViolation { a, b, c });
    }
    let k = ceil_half(a + b + c) as usize;
    let mut out = Addressing::zeros(3, k);
    for col in 0..c as usize {
        out.set(1, col, true);
    }
    set_suffix_ones(&mut out, 2, k, b as usize);
    Ok(out)
}

/// Isometric addressing of a weighted tree: one block of `w(e)` columns per
/// edge, set exactly on the vertices below `e` when rooted at vertex 0.
pub fn tree_addressing(g: &WeightedGraph) -> Result<Addressing, AddressingError> {
    if !g.is_tree() {
        return Err(AddressingError::NotATree);
    }
    let mut offset = Vec::with_capacity(g.edges().len());
    let mut total = 0usize;
    for e in g.edges() {
        offset.push(total);
        total += e.w as usize;
    }
    let edge_index = |u: usize, v: usize| {
        g.edges()
            .iter()
            .position(|e| (e.u == u && e.v == v) || (e.u == v && e.v == u))
            .expect("tree edge")
    };

    let mut a = Addressing::zeros(g.n(), total);
    let mut parent = vec![usize::MAX; g.n()];
    let mut stack = vec![0usize];
    parent[0] = 0;
    while let Some(u) = stack.pop() {
        for &(v, w) in g.neighbors(u) {
            if parent[v] != usize::MAX {
                continue;
            }
            parent[v] = u;
            for c in 0..total {
                a.set(v, c, a.get(u, c));
            }
            let off = offset[edge_index(u, v)];
            for c in off..off + w as usize {
                a.set(v, c, true);
            }
            stack.push(v);
        }
    }
    Ok(a)
}

/// The first `n` binary counter values on `ceil(log2 n)` bits, most
/// significant bit first.
pub fn complete_graph_addressing(n: usize) -> Addressing {
    let len = ceil_log2(n) as usize;
    let mut a = Addressing::zeros(n, len);
    for i in 0..n {
        for c in 0..len {
            a.set(i, c, (i >> (len - 1 - c)) & 1 == 1);
        }
    }
    a
}

/// Sylvester–Hadamard code of length `2^k`: the `2^k` rows of the order-`2^k`
/// Sylvester matrix (`+1 -> 0`, `-1 -> 1`), followed by their complements.
/// Distinct rows among the first `2^k` are at distance `2^(k-1)`.
pub fn hadamard_code(k: u32) -> Addressing {
    assert!(k <= 16, "Hadamard codes are limited to length 2^16");
    let size = 1usize << k;
    let mut a = Addressing::zeros(2 * size, size);
    for i in 0..size {
        for j in 0..size {
            let bit = (i & j).count_ones() % 2 == 1;
            a.set(i, j, bit);
            a.set(size + i, j, !bit);
        }
    }
    a
}

/// Assigns `n` distinct Sylvester rows, the least power of two `2^k` with
/// `2^k >= max(n, 2 * lambda * diam)`, dropping the constant first column.
/// The length is `2^k - 1` and every pair is at distance `2^(k-1)`, which is at
/// least `lambda * diam`.
pub fn hadamard_addressing(dm: &DistanceMatrix, lambda: u64) -> Result<Addressing, AddressingError> {
    if lambda == 0 {
        return Err(AddressingError::ZeroLambda);
    }
    let n = dm.n();
    let need = (n as u64).max(2 * lambda * dm.diameter()).max(1);
    let size = need.next_power_of_two() as usize;
    let mut a = Addressing::zeros(n, size - 1);
    for i in 0..n {
        for j in 1..size {
            a.set(i, j - 1, (i & j).count_ones() % 2 == 1);
        }
    }
    Ok(a)
}

/// Builds an addressing from cut multiplicities: `count` columns whose
/// one-set is the vertex set `mask`.
pub(crate) fn from_cuts(n: usize, cuts: &[(u64, u64)]) -> Addressing {
    let len: u64 = cuts.iter().map(|c| c.1).sum();
    let mut a = Addressing::zeros(n, len as usize);
    let mut col = 0;
    for &(mask, count) in cuts {
        for _ in 0..count {
            for v in 0..n {
                if (mask >> v) & 1 == 1 {
                    a.set(v, col, true);
                }
            }
            col += 1;
        }
    }
    a
}

/// Optimal addressing of a four-point metric, of length
/// `max_i ceil(T_i / 2)` where `T_i` is the perimeter of the triangle missing
/// vertex `i`.
///
/// Take the heaviest triangle `u v z` and the remaining vertex `w`. When `w` is
/// no farther from each triangle vertex than the opposite triangle side, the
/// three balanced cuts `{uv|zw}`, `{uz|vw}`, `{uw|vz}` suffice and their
/// multiplicities are explicit. Otherwise the seven cuts of the four points
/// are searched for a decomposition of the same length.
pub fn k4_addressing(dm: &DistanceMatrix) -> Result<Addressing, AddressingError> {
    if dm.n() != 4 {
        return Err(AddressingError::WrongSize { expected: 4, found: dm.n() });
    }
    if !dm.is_metric() {
        return Err(AddressingError::NotWeightMinimal);
    }
    let d = |i: usize, j: usize| dm.get(i, j);
    let perimeter = |w: usize| {
        let t: Vec<usize> = (0..4).filter(|&x| x != w).collect();
        d(t[0], t[1]) + d(t[0], t[2]) + d(t[1], t[2])
    };
    let w = (0..4).max_by_key(|&w| (perimeter(w), std::cmp::Reverse(w))).expect("four vertices");
    let len = ceil_half(perimeter(w));
    let tri: Vec<usize> = (0..4).filter(|&x| x != w).collect();
    let (u, v, z) = (tri[0], tri[1], tri[2]);
    let (a, b, c) = (d(v, z), d(u, z), d(u, v));

    let bit = |x: usize| 1u64 << x;
    if d(u, w) <= a && d(v, w) <= b && d(z, w) <= c {
        let cuts = [
            (bit(z) | bit(w), len - c),
            (bit(v) | bit(w), len - b),
            (bit(v) | bit(z), b + c - len),
        ];
        return Ok(from_cuts(4, &cuts));
    }
    seven_cut_search(dm, len).ok_or(AddressingError::NotWeightMinimal)
}

/// Exhaustive search over multiplicities of the three balanced cuts and four
/// singleton cuts of a four-point metric, for total length `len`.
fn seven_cut_search(dm: &DistanceMatrix, len: u64) -> Option<Addressing> {
    let d = |i: usize, j: usize| dm.get(i, j) as i64;
    let len = len as i64;
    // balanced cuts, each named by the vertex sharing a side with 0
    for x in 0..=len {
        for y in 0..=len - x {
            for t in 0..=len - x - y {
                let rem = len - x - y - t;
                let p = x + y + t;
                // pair separation by balanced cuts: all but the one keeping them together
                let e = |i: usize, j: usize| {
                    let together = match (i.min(j), i.max(j)) {
                        (0, 1) | (2, 3) => x,
                        (0, 2) | (1, 3) => y,
                        _ => t,
                    };
                    d(i, j) - (p - together)
                };
                for s0 in 0..=rem {
                    for s1 in 0..=rem - s0 {
                        if s0 + s1 < e(0, 1) {
                            continue;
                        }
                        let mut s2 = 0.max(e(0, 2) - s0).max(e(1, 2) - s1);
                        let s3 = 0.max(e(0, 3) - s0).max(e(1, 3) - s1);
                        let deficit = e(2, 3) - s2 - s3;
                        if deficit > 0 {
                            s2 += deficit;
                        }
                        let used = s0 + s1 + s2 + s3;
                        if used <= rem {
                            let b = |v: usize| 1u64 << v;
                            let cuts = [
                                (b(2) | b(3), x as u64),
                                (b(1) | b(3), y as u64),
                                (b(1) | b(2), t as u64),
                                (b(0), s0 as u64),
                                (b(1), s1 as u64),
                                (b(2), s2 as u64),
                                (b(3), s3 as u64),
                                (0, (rem - used) as u64),
                            ];
                            return Some(from_cuts(4, &cuts));
                        }
                    }
                }
            }
        }
    }
    None
}
