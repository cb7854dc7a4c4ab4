//! Weighted undirected batting-partnership networks.
//!
//! Nodes are batsmen; an edge joins two batsmen who batted together and
//! carries the total runs of all their partnerships in the match. The node
//! list is sorted by player id and edges are stored as `(u, v)` index pairs
//! with `u < v`, so two networks built from the same partnerships in any
//! order compare equal.

mod export;

pub use export::{export_graph, ExportFormat};

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{Innings, Partnership, TeamInningsSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("match {match_id}, team {team}: no partnerships to build a network from")]
    EmptyInnings { match_id: String, team: String },
    #[error("self-loop on player {0:?}")]
    SelfLoop(String),
    #[error("unsupported export format {0:?} (expected dot, graphml or json)")]
    UnsupportedFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartnershipNetwork {
    match_id: String,
    team: String,
    nodes: Vec<String>,
    edges: Vec<Edge>,
}

impl PartnershipNetwork {
    /// Builds a network from `(player, player, runs)` triples, summing the runs of
    /// repeated pairs.
    pub fn from_weighted_pairs<I, S>(
        match_id: impl Into<String>,
        team: impl Into<String>,
        pairs: I,
    ) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (S, S, u64)>,
        S: AsRef<str>,
    {
        let mut weights: BTreeMap<(String, String), u64> = BTreeMap::new();
        let mut players: BTreeSet<String> = BTreeSet::new();
        for (a, b, runs) in pairs {
            let (a, b) = (a.as_ref(), b.as_ref());
            if a == b {
                return Err(GraphError::SelfLoop(a.to_string()));
            }
            let key = if a < b { (a, b) } else { (b, a) };
            players.insert(a.to_string());
            players.insert(b.to_string());
            *weights.entry((key.0.to_string(), key.1.to_string())).or_insert(0) += runs;
        }
        let nodes: Vec<String> = players.into_iter().collect();
        let index = |p: &str| nodes.binary_search_by(|n| n.as_str().cmp(p)).expect("node present");
        let edges = weights
            .into_iter()
            .map(|((a, b), weight)| Edge {
                u: index(&a),
                v: index(&b),
                weight,
            })
            .collect();
        Ok(Self {
            match_id: match_id.into(),
            team: team.into(),
            nodes,
            edges,
        })
    }

    fn from_partnerships<'a>(
        match_id: &str,
        team: &str,
        partnerships: impl Iterator<Item = &'a Partnership>,
    ) -> Result<Self, GraphError> {
        let net = Self::from_weighted_pairs(
            match_id,
            team,
            partnerships.map(|p| (p.batsman_a.as_str(), p.batsman_b.as_str(), u64::from(p.runs))),
        )?;
        if net.nodes.is_empty() {
            return Err(GraphError::EmptyInnings {
                match_id: match_id.to_string(),
                team: team.to_string(),
            });
        }
        Ok(net)
    }

    pub fn match_id(&self) -> &str {
        &self.match_id
    }

    pub fn team(&self) -> &str {
        &self.team
    }

    /// Player ids, sorted.
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn index_of(&self, player: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(player)).ok()
    }

    pub fn contains(&self, player: &str) -> bool {
        self.index_of(player).is_some()
    }

    pub fn weight(&self, a: &str, b: &str) -> Option<u64> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        let (u, v) = if i < j { (i, j) } else { (j, i) };
        self.edges.iter().find(|e| e.u == u && e.v == v).map(|e| e.weight)
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Number of distinct batting partners of each node, in node order.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    /// Adjacency lists of `(neighbour, weight)` in node order.
    pub fn adjacency(&self) -> Vec<Vec<(usize, u64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.u].push((e.v, e.weight));
            adj[e.v].push((e.u, e.weight));
        }
        adj
    }

    /// Connected components as sorted lists of node indices, ordered by their
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        for start in 0..self.nodes.len() {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                for &(w, _) in &adj[comp[i]] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }
}

/// Builds one network for a team's whole match, summing pair weights across
/// innings.
pub fn build_network(match_id: &str, innings_set: &TeamInningsSet) -> Result<PartnershipNetwork, GraphError> {
    PartnershipNetwork::from_partnerships(
        match_id,
        &innings_set.team,
        innings_set.innings.iter().flat_map(|i| &i.partnerships),
    )
}

/// Builds one network per innings that has at least one partnership.
pub fn build_innings_networks(
    match_id: &str,
    innings_set: &TeamInningsSet,
) -> Vec<(usize, PartnershipNetwork)> {
    innings_set
        .innings
        .iter()
        .enumerate()
        .filter_map(|(k, inn)| build_innings_network(match_id, &innings_set.team, inn).ok().map(|n| (k, n)))
        .collect()
}

pub fn build_innings_network(
    match_id: &str,
    team: &str,
    innings: &Innings,
) -> Result<PartnershipNetwork, GraphError> {
    PartnershipNetwork::from_partnerships(match_id, team, innings.partnerships.iter())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Overs;
    use proptest::prelude::*;

    fn team(innings: Vec<Vec<(&str, &str, u32)>>) -> TeamInningsSet {
        TeamInningsSet {
            team: "T".into(),
            captain: "a".into(),
            did_not_bat: false,
            innings: innings
                .into_iter()
                .map(|ps| Innings::new(ps.into_iter().map(|(a, b, r)| Partnership::new(a, b, r)).collect()))
                .collect(),
            runs_total: 0,
            overs_faced: Overs::from_balls(0),
        }
    }

    #[test]
    fn single_partnership() {
        let net = build_network("m", &team(vec![vec![("a", "b", 30)]])).unwrap();
        assert_eq!(net.node_count(), 2);
        assert_eq!(net.edges().len(), 1);
        assert_eq!(net.weight("b", "a"), Some(30));
    }

    #[test]
    fn star_from_a_surviving_batsman() {
        let net = build_network("m", &team(vec![vec![("a", "b", 10), ("b", "c", 20), ("b", "d", 5)]])).unwrap();
        assert_eq!(net.nodes(), ["a", "b", "c", "d"]);
        assert_eq!(net.degrees(), vec![1, 3, 1, 1]);
        assert_eq!(net.weight("a", "b"), Some(10));
        assert_eq!(net.weight("b", "c"), Some(20));
        assert_eq!(net.weight("b", "d"), Some(5));
        assert_eq!(net.weight("a", "c"), None);
    }

    #[test]
    fn test_innings_are_aggregated() {
        let net = build_network("m", &team(vec![vec![("a", "b", 10)], vec![("b", "a", 15)]])).unwrap();
        assert_eq!(net.edges().len(), 1);
        assert_eq!(net.weight("a", "b"), Some(10 + 15));
        let per = build_innings_networks("m", &team(vec![vec![("a", "b", 10)], vec![("b", "a", 15)]]));
        assert_eq!(per.len(), 2);
        assert_eq!(per[1].1.weight("a", "b"), Some(15));
    }

    #[test]
    fn zero_run_partnership_keeps_edge() {
        let net = build_network("m", &team(vec![vec![("a", "b", 0), ("b", "c", 4)]])).unwrap();
        assert_eq!(net.weight("a", "b"), Some(0));
        assert!(net.is_connected());
    }

    #[test]
    fn empty_innings() {
        assert!(matches!(
            build_network("m", &team(vec![vec![]])),
            Err(GraphError::EmptyInnings { .. })
        ));
    }

    #[test]
    fn components_of_disjoint_innings() {
        let net = build_network("m", &team(vec![vec![("a", "b", 1)], vec![("c", "d", 2)]])).unwrap();
        assert_eq!(net.components(), vec![vec![0, 1], vec![2, 3]]);
        assert!(!net.is_connected());
    }

    /// A random valid innings: batting order p0..p10, each partnership ends with one
    /// of the pair dismissed.
    fn innings_strategy() -> impl Strategy<Value = Vec<(String, String, u32)>> {
        (1usize..=10, prop::collection::vec((any::<bool>(), 0u32..200), 10)).prop_map(|(k, steps)| {
            let mut out = Vec::new();
            let (mut x, mut y) = (0usize, 1usize);
            for (i, (drop_first, runs)) in steps.into_iter().take(k).enumerate() {
                out.push((format!("p{x:02}"), format!("p{y:02}"), runs));
                let next = i + 2;
                if drop_first {
                    x = next;
                } else {
                    y = next;
                }
            }
            out
        })
    }

    proptest! {
        #[test]
        fn weight_conservation_and_connectivity(ps in innings_strategy()) {
            let t = team(vec![ps.iter().map(|(a, b, r)| (a.as_str(), b.as_str(), *r)).collect()]);
            t.innings[0].check_chain().unwrap();
            let net = build_network("m", &t).unwrap();
            let runs: u64 = ps.iter().map(|p| u64::from(p.2)).sum();
            prop_assert_eq!(net.total_weight(), runs);
            prop_assert!(net.is_connected());
            prop_assert_eq!(net.node_count(), ps.len() + 1);
        }

        #[test]
        fn order_invariance(ps in innings_strategy(), seed in any::<u64>()) {
            let mut shuffled = ps.clone();
            // Deterministic Fisher-Yates driven by the proptest seed.
            let mut s = seed;
            for i in (1..shuffled.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (s >> 33) as usize % (i + 1);
                shuffled.swap(i, j);
            }
            let a = PartnershipNetwork::from_weighted_pairs("m", "T", ps.iter().map(|(a, b, r)| (a, b, u64::from(*r)))).unwrap();
            let b = PartnershipNetwork::from_weighted_pairs("m", "T", shuffled.iter().map(|(a, b, r)| (b, a, u64::from(*r)))).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
