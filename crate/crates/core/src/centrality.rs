//! Weighted betweenness and degree centralization of partnership networks.
//!
//! Shortest paths use the edge length `1 / (runs + 1)`: a heavy partnership
//! is a short hop, and a scoreless one still has finite length. Path lengths
//! are sums of such terms, so two lengths count as equal when they agree to
//! a relative tolerance of [`PATH_TOLERANCE`].
//!
//! Betweenness is unnormalized: each unordered pair `(j, l)` of other nodes
//! contributes the fraction of its shortest paths passing through the node.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::PartnershipNetwork;

pub const PATH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CentralityError {
    #[error("network has {components} connected components")]
    Disconnected { components: usize },
    #[error("centralization needs at least 3 players, network has {n}")]
    TooSmall { n: usize },
}

/// Length of an edge carrying `weight` runs.
pub fn edge_distance(weight: u64) -> f64 {
    1.0 / (weight as f64 + 1.0)
}

/// Whether two accumulated path lengths are the same up to [`PATH_TOLERANCE`].
pub fn same_length(a: f64, b: f64) -> bool {
    (a - b).abs() <= PATH_TOLERANCE * a.abs().max(b.abs())
}

/// Betweenness of a connected network, keyed by player id.
pub fn weighted_betweenness(net: &PartnershipNetwork) -> Result<BTreeMap<String, f64>, CentralityError> {
    let components = net.components().len();
    if components > 1 {
        return Err(CentralityError::Disconnected { components });
    }
    Ok(componentwise_betweenness(net))
}

/// Betweenness computed within each connected component. Pairs in different
/// components have no path and contribute nothing.
pub fn componentwise_betweenness(net: &PartnershipNetwork) -> BTreeMap<String, f64> {
    let scores = brandes(net);
    net.nodes().iter().cloned().zip(scores).collect()
}

/// Brandes accumulation over a Dijkstra search from every source. Teams have
/// at most a dozen batsmen, so the search picks the closest open node by a
/// linear scan.
fn brandes(net: &PartnershipNetwork) -> Vec<f64> {
    let n = net.node_count();
    let adj: Vec<Vec<(usize, f64)>> = net
        .adjacency()
        .into_iter()
        .map(|nbrs| nbrs.into_iter().map(|(w, runs)| (w, edge_distance(runs))).collect())
        .collect();
    let mut bc = vec![0.0; n];

    let mut dist = vec![f64::INFINITY; n];
    let mut sigma = vec![0.0f64; n];
    let mut delta = vec![0.0f64; n];
    let mut settled = vec![false; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order: Vec<usize> = Vec::with_capacity(n);

    for s in 0..n {
        dist.fill(f64::INFINITY);
        sigma.fill(0.0);
        delta.fill(0.0);
        settled.fill(false);
        preds.iter_mut().for_each(Vec::clear);
        order.clear();
        dist[s] = 0.0;
        sigma[s] = 1.0;

        loop {
            let next = (0..n)
                .filter(|&v| !settled[v] && dist[v].is_finite())
                .min_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
            let Some(v) = next else { break };
            settled[v] = true;
            order.push(v);
            for &(w, len) in &adj[v] {
                if settled[w] {
                    continue;
                }
                let alt = dist[v] + len;
                if dist[w].is_infinite() || (alt < dist[w] && !same_length(alt, dist[w])) {
                    dist[w] = alt;
                    sigma[w] = sigma[v];
                    preds[w].clear();
                    preds[w].push(v);
                } else if same_length(alt, dist[w]) {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }

        for &w in order.iter().rev() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    // Every unordered pair was visited from both ends.
    bc.iter_mut().for_each(|b| *b /= 2.0);
    bc
}

/// Degree centralization `sum(k_max - k_i) / ((N - 1)(N - 2))`, with `k_i` the
/// number of distinct partners of player `i`.
pub fn degree_centralization(net: &PartnershipNetwork) -> Result<f64, CentralityError> {
    let (num, den) = degree_centralization_ratio(net)?;
    Ok(num as f64 / den as f64)
}

/// Numerator and denominator of the centralization index as exact integers.
pub fn degree_centralization_ratio(net: &PartnershipNetwork) -> Result<(u64, u64), CentralityError> {
    let n = net.node_count();
    if n < 3 {
        return Err(CentralityError::TooSmall { n });
    }
    let deg = net.degrees();
    let kmax = *deg.iter().max().expect("n >= 3");
    let num: u64 = deg.iter().map(|&k| (kmax - k) as u64).sum();
    Ok((num, ((n - 1) * (n - 2)) as u64))
}

/// Per-network summary: betweenness by player and the centralization index
/// (absent below three players).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityReport {
    pub betweenness: BTreeMap<String, f64>,
    pub omega: Option<f64>,
    pub n_players: usize,
}

impl CentralityReport {
    pub fn compute(net: &PartnershipNetwork) -> Self {
        Self {
            betweenness: componentwise_betweenness(net),
            omega: degree_centralization(net).ok(),
            n_players: net.node_count(),
        }
    }

    /// Players sharing the highest score (within `tol`), in id order.
    pub fn top_players(&self, tol: f64) -> Vec<&str> {
        let max = self.betweenness.values().copied().fold(f64::NEG_INFINITY, f64::max);
        self.betweenness
            .iter()
            .filter(|(_, &v)| v >= max - tol)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}
