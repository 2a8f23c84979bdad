use num_traits::{One, Zero};

use crate::algebra::Rational;
use crate::error::{Error, Result};

pub const MATCHING_EDGE_CAP: usize = 20;

/// An undirected multigraph with rational edge weights.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WeightedGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize, Rational)>,
}

/// `Σ_M Π_{e∈M} w(e)` over all matchings; loops never match.
pub fn matching_brute_force(g: &WeightedGraph) -> Result<Rational> {
    if g.edges.len() > MATCHING_EDGE_CAP {
        return Err(Error::SizeCap {
            what: "edges",
            size: g.edges.len(),
            cap: MATCHING_EDGE_CAP,
        });
    }
    if let Some(&(u, v, _)) = g.edges.iter().find(|&&(u, v, _)| u.max(v) >= g.vertices) {
        return Err(Error::Precondition(format!("edge ({u},{v}) outside {} vertices", g.vertices)));
    }
    fn go(g: &WeightedGraph, i: usize, used: &mut Vec<bool>) -> Rational {
        let Some((u, v, w)) = g.edges.get(i) else {
            return Rational::one();
        };
        let mut total = go(g, i + 1, used);
        if u != v && !used[*u] && !used[*v] && !w.is_zero() {
            used[*u] = true;
            used[*v] = true;
            total += w * go(g, i + 1, used);
            used[*u] = false;
            used[*v] = false;
        }
        total
    }
    Ok(go(g, 0, &mut vec![false; g.vertices]))
}
