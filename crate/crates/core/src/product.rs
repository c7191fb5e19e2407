//! Cartesian products: concatenation upper bounds, proper functions, and
//! exactness certificates.
//!
//! A proper function `f` is superadditive over products and bounded by `c`
//! (strongly proper: bounded by `beta`). If `ceil(f(G1 □ G2)) = c(G1) + c(G2)`,
//! the concatenated factor witnesses are optimal for the product. All four
//! functions are evaluated on the metric closure.

use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::addressing::{ceil_log2, Addressing, AddressingError};
use crate::bounds::{max_triangle, Quantity};
use crate::exact::{brute_force_c, SearchConfig};
use crate::graph::{product_of, DistanceMatrix, GraphError, WeightedGraph};
use crate::lp::{beta_with_cap, ceil_u64, fmt_rational, int, Rational, DEFAULT_PRIMAL_CAP};
use crate::par;

/// Largest number of vertex subsets a single evaluation may enumerate.
pub const SUBSET_LIMIT: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductError {
    #[error("{what} needs {count} subsets, above the limit of {limit}")]
    SizeLimit { what: String, count: u64, limit: u64 },
    #[error("subset size 2k must be between 2 and 6, got {size}")]
    SubsetSize { size: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProperFunctionId {
    /// `ceil(log2 |V|)`. Superadditive only when a factor has power-of-two order.
    LogVertices,
    Diameter,
    /// Best `sum d / k^2` over vertex sets of size `2k`.
    SubsetPlotkin(usize),
    /// Best triangle perimeter over 2.
    TrianglePlotkin,
}

impl ProperFunctionId {
    /// Order in which certificates are tried.
    pub const ALL: [ProperFunctionId; 5] = [
        Self::Diameter,
        Self::TrianglePlotkin,
        Self::SubsetPlotkin(2),
        Self::SubsetPlotkin(3),
        Self::LogVertices,
    ];

    /// Bounded by `beta` rather than only by `c`.
    pub fn is_strongly_proper(self) -> bool {
        !matches!(self, Self::LogVertices)
    }
}

impl fmt::Display for ProperFunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LogVertices => f.write_str("log_vertices"),
            Self::Diameter => f.write_str("diameter"),
            Self::SubsetPlotkin(k) => write!(f, "subset_plotkin_{}", 2 * k),
            Self::TrianglePlotkin => f.write_str("triangle_plotkin"),
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn check_subsets(what: String, n: usize, size: usize) -> Result<(), ProductError> {
    let count = binomial(n as u64, size as u64);
    if count > SUBSET_LIMIT {
        return Err(ProductError::SizeLimit { what, count, limit: SUBSET_LIMIT });
    }
    Ok(())
}

/// Largest pairwise distance sum over vertex sets of exactly `size` vertices.
fn max_subset_sum(dm: &DistanceMatrix, size: usize) -> Option<u64> {
    let n = dm.n();
    if size > n {
        return None;
    }
    par::max_range(0..n + 1 - size, |first| {
        (first + 1..n)
            .combinations(size - 1)
            .map(|rest| {
                let inner: u64 = rest.iter().tuple_combinations().map(|(&a, &b)| dm.get(a, b)).sum();
                inner + rest.iter().map(|&v| dm.get(first, v)).sum::<u64>()
            })
            .max()
            .unwrap_or(0)
    })
}

/// Value of `f` on a distance matrix. Functions over subsets larger than
/// the vertex set evaluate to 0.
pub fn proper_value_dm(f: ProperFunctionId, dm: &DistanceMatrix) -> Result<Rational, ProductError> {
    let n = dm.n();
    Ok(match f {
        ProperFunctionId::LogVertices => int(u64::from(ceil_log2(n))),
        ProperFunctionId::Diameter => int(dm.diameter()),
        ProperFunctionId::SubsetPlotkin(k) => {
            if k == 0 || 2 * k > 6 {
                return Err(ProductError::SubsetSize { size: 2 * k });
            }
            check_subsets(f.to_string(), n, 2 * k)?;
            let sum = max_subset_sum(dm, 2 * k).unwrap_or(0);
            Rational::new(sum.into(), (k as u64 * k as u64).into())
        }
        ProperFunctionId::TrianglePlotkin => {
            check_subsets(f.to_string(), n, 3)?;
            let sum = max_triangle(dm).map_or(0, |(p, _)| p);
            Rational::new(sum.into(), 2u64.into())
        }
    })
}

/// Value of `f` on the metric closure of `g`.
pub fn proper_value(f: ProperFunctionId, g: &WeightedGraph) -> Result<Rational, ProductError> {
    proper_value_dm(f, &g.distances()?)
}

/// Concatenated addressing of the product of the factors, in the vertex
/// order of [`product_of`]. Valid for the product whenever each factor's
/// addressing is valid for its factor.
pub fn product_upper(addrs: &[Addressing]) -> Result<Addressing, AddressingError> {
    let (first, rest) = addrs.split_first().ok_or(AddressingError::EmptyInput)?;
    Ok(rest.iter().fold(first.clone(), |acc, a| acc.product_concat(a)))
}

#[derive(Debug, Clone)]
pub struct CertifyConfig {
    pub search: SearchConfig,
    pub primal_cap: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self { search: SearchConfig { node_limit: 1_000_000, ..SearchConfig::default() }, primal_cap: DEFAULT_PRIMAL_CAP }
    }
}

/// Additivity of one quantity over a product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub quantity: Quantity,
    pub factor_values: Vec<Rational>,
    /// The sum of the factor values, which the product attains.
    pub value: Rational,
    /// Every function whose value on the product meets the sum (rounded up for `c`).
    pub functions: Vec<(ProperFunctionId, Rational)>,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factor_values.iter().map(fmt_rational).collect();
        let by: Vec<String> = self
            .functions
            .iter()
            .map(|(id, v)| format!("{id} = {}", fmt_rational(v)))
            .collect();
        write!(
            f,
            "{} = {} = {} (proven; {})",
            self.quantity.name(),
            fmt_rational(&self.value),
            parts.join(" + "),
            by.join(", ")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCertificate {
    pub c: Option<Certificate>,
    pub beta: Option<Certificate>,
    /// Concatenated optimal factor witnesses, present with `c`.
    pub witness: Option<Addressing>,
}

/// [`certify_product_exact_with`] with default limits.
pub fn certify_product_exact(gs: &[WeightedGraph]) -> Option<ProductCertificate> {
    certify_product_exact_with(gs, &CertifyConfig::default())
}

/// Tries to prove `c` and `beta` additive over the product of `gs`.
///
/// `c` of each factor comes from the exact search; `beta` from the exact LP.
/// A quantity is certified when some function evaluated on the product
/// reaches the factor sum, since the sum is already an upper bound. Factors
/// that exceed the search or LP limits leave that quantity uncertified. The
/// result is `None` when neither quantity is certified.
pub fn certify_product_exact_with(gs: &[WeightedGraph], cfg: &CertifyConfig) -> Option<ProductCertificate> {
    let product = product_of(gs)?;
    let pdm = product.distances().ok()?;
    let dms: Vec<DistanceMatrix> = gs.iter().map(|g| g.distances()).collect::<Result<_, _>>().ok()?;

    let evaluated: Vec<(ProperFunctionId, Rational)> = ProperFunctionId::ALL
        .iter()
        .filter_map(|&f| proper_value_dm(f, &pdm).ok().map(|v| (f, v)))
        .collect();

    let mut witness = None;
    let c = (|| {
        let exact: Vec<_> = dms.iter().map(|m| brute_force_c(m, 1, &cfg.search).ok()).collect::<Option<_>>()?;
        let sum: u64 = exact.iter().map(|r| r.value).sum();
        let functions: Vec<_> = evaluated
            .iter()
            .filter(|(_, v)| ceil_u64(v) == Some(sum))
            .cloned()
            .collect();
        if functions.is_empty() {
            return None;
        }
        let addrs: Vec<Addressing> = exact.iter().map(|r| r.witness.clone()).collect();
        witness = product_upper(&addrs).ok();
        Some(Certificate {
            quantity: Quantity::C,
            factor_values: exact.iter().map(|r| int(r.value)).collect(),
            value: int(sum),
            functions,
        })
    })();

    let beta = (|| {
        let betas: Vec<Rational> = dms.iter().map(|m| beta_with_cap(m, cfg.primal_cap).ok()).collect::<Option<_>>()?;
        let sum: Rational = betas.iter().cloned().sum();
        let functions: Vec<_> = evaluated
            .iter()
            .filter(|(f, v)| f.is_strongly_proper() && *v == sum)
            .cloned()
            .collect();
        if functions.is_empty() {
            return None;
        }
        Some(Certificate { quantity: Quantity::Beta, factor_values: betas, value: sum, functions })
    })();

    if c.is_none() && beta.is_none() {
        return None;
    }
    Some(ProductCertificate { c, beta, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::addressing::{complete_graph_addressing, cycle_addressing, path_addressing, verify};
    use crate::graph::families::*;
    use crate::lp::rat;

    #[test]
    fn proper_value_examples() {
        assert_eq!(proper_value(ProperFunctionId::TrianglePlotkin, &unit_cycle(6)).unwrap(), int(3));
        assert_eq!(proper_value(ProperFunctionId::Diameter, &path(&[2, 3])).unwrap(), int(5));
        assert_eq!(proper_value(ProperFunctionId::LogVertices, &complete(8, 1)).unwrap(), int(3));
        assert_eq!(proper_value(ProperFunctionId::SubsetPlotkin(2), &complete(4, 1)).unwrap(), rat(3, 2));
        assert_eq!(proper_value(ProperFunctionId::SubsetPlotkin(1), &path(&[2, 3])).unwrap(), int(5));
        assert_eq!(proper_value(ProperFunctionId::SubsetPlotkin(3), &path(&[1])).unwrap(), int(0));
        assert_eq!(
            proper_value(ProperFunctionId::SubsetPlotkin(4), &path(&[1])),
            Err(ProductError::SubsetSize { size: 8 })
        );
    }

    #[test]
    fn subset_limit() {
        assert!(matches!(
            proper_value(ProperFunctionId::SubsetPlotkin(3), &unit_cycle(60)),
            Err(ProductError::SizeLimit { .. })
        ));
    }

    #[test]
    fn concatenation_examples() {
        let k2 = Addressing::from_strs(&["0", "1"]).unwrap();
        let q3 = product_upper(&[k2.clone(), k2.clone(), k2]).unwrap();
        assert_eq!(q3.len(), 3);
        let cube = product_of(&[complete(2, 1), complete(2, 1), complete(2, 1)]).unwrap();
        assert!(verify(&q3, &cube.distances().unwrap(), 1).unwrap());

        let a = cycle_addressing(&[1; 6]).unwrap();
        let b = path_addressing(&[2, 3]).unwrap();
        let w = product_upper(&[a, b]).unwrap();
        let g = product_of(&[unit_cycle(6), path(&[2, 3])]).unwrap();
        let dm = g.distances().unwrap();
        assert_eq!(w.len(), 8);
        assert!(verify(&w, &dm, 1).unwrap());
        let lower = proper_value_dm(ProperFunctionId::TrianglePlotkin, &dm).unwrap();
        assert_eq!(ceil_u64(&lower), Some(8));

        let w = product_upper(&[complete_graph_addressing(4), complete_graph_addressing(2)]).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(product_upper(&[]), Err(AddressingError::EmptyInput));
    }

    #[test]
    fn certificate_examples() {
        let cert = certify_product_exact(&[unit_cycle(5), path(&[2])]).unwrap();
        let c = cert.c.unwrap();
        assert_eq!(c.value, int(5));
        assert_eq!(c.functions[0], (ProperFunctionId::TrianglePlotkin, rat(9, 2)));
        assert!(c.to_string().starts_with("c = 5 = 3 + 2 (proven; triangle_plotkin = 9/2"));
        assert_eq!(cert.beta.unwrap().value, rat(9, 2));
        assert_eq!(cert.witness.unwrap().len(), 5);

        let cert = certify_product_exact(&[unit_cycle(3), unit_cycle(4)]).unwrap();
        assert_eq!(cert.c.unwrap().value, int(4));
        assert_eq!(cert.beta.unwrap().value, rat(7, 2));

        let cert = certify_product_exact(&[complete(4, 1), complete(2, 1)]).unwrap();
        let c = cert.c.unwrap();
        assert_eq!(c.value, int(3));
        assert!(c.functions.iter().any(|f| f.0 == ProperFunctionId::LogVertices));
    }

    #[test]
    fn odd_cycle_products_leave_c_open() {
        // every lower bound stops at 4 while the factor sum is 5
        let cert = certify_product_exact(&[unit_cycle(3), unit_cycle(5)]).unwrap();
        assert!(cert.c.is_none());
        assert!(cert.witness.is_none());
        assert_eq!(cert.beta.unwrap().value, int(4));
    }

    #[test]
    fn log_vertices_needs_a_power_of_two_factor() {
        let f = ProperFunctionId::LogVertices;
        let p = product_of(&[path(&[1, 1]), path(&[1, 1, 1, 1])]).unwrap();
        let lhs = proper_value(f, &p).unwrap();
        let rhs = proper_value(f, &path(&[1, 1])).unwrap() + proper_value(f, &path(&[1, 1, 1, 1])).unwrap();
        assert!(lhs < rhs);
    }
}
