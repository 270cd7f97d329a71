//! Access graphs and the *respects* relation.
//!
//! Vertices are pages, numbered `1..=N`. After a page `p` is requested, the
//! next request must be `p` itself or a neighbor of `p`. Self-transitions are
//! always allowed by that rule and are never stored as edges.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A page, i.e. a vertex of an access graph. Pages are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PageId(pub u32);

impl PageId {
    /// Index into per-page tables (pages are 1-based).
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for PageId {
    fn from(v: u32) -> Self {
        PageId(v)
    }
}

/// Structural class of an access graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphClass {
    /// Simple path 1 – 2 – … – N.
    Path,
    /// Central vertex N adjacent to leaves 1..N-1, no other edges.
    Star,
    /// Single cycle with i adjacent to i±1 mod N.
    Cycle,
    /// All pairs adjacent.
    Complete,
    /// Arbitrary edge set.
    Custom,
}

impl GraphClass {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphClass::Path => "path",
            GraphClass::Star => "star",
            GraphClass::Cycle => "cycle",
            GraphClass::Complete => "complete",
            GraphClass::Custom => "custom",
        }
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GraphClass {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, GraphError> {
        match s {
            "path" => Ok(GraphClass::Path),
            "star" => Ok(GraphClass::Star),
            "cycle" => Ok(GraphClass::Cycle),
            "complete" => Ok(GraphClass::Complete),
            "custom" => Ok(GraphClass::Custom),
            other => Err(GraphError::UnknownClass(other.to_string())),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown graph class `{0}`")]
    UnknownClass(String),
    #[error("{class} graph needs at least {min} vertices, got {n}")]
    TooFewVertices { class: GraphClass, min: u32, n: u32 },
    #[error("edge endpoint {v} out of range 1..={n}")]
    EndpointOutOfRange { v: u32, n: u32 },
    #[error("self-loop at vertex {0} (self-transitions are implicit, not edges)")]
    SelfLoop(u32),
}

/// Why a sequence fails to respect a graph. An out-of-range request is
/// reported distinctly from a transition along a missing edge.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RespectsError {
    #[error("request #{index} is page {page}, outside 1..={n}")]
    PageOutOfRange { index: usize, page: PageId, n: u32 },
    #[error("requests #{index}..#{} move from {from} to {to}, which are not adjacent", index + 1)]
    NotAdjacent {
        index: usize,
        from: PageId,
        to: PageId,
    },
}

/// An undirected access graph over pages `1..=N`.
///
/// The adjacency is symmetric and irreflexive; immutable after construction,
/// so it can be shared freely across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessGraph {
    n: u32,
    class: GraphClass,
    adj: Vec<Vec<PageId>>, // indexed by page id; slot 0 unused
}

impl AccessGraph {
    /// Builds a graph of the given class. Stars need N ≥ 3, others N ≥ 2.
    pub fn new(class: GraphClass, n: u32) -> Result<Self, GraphError> {
        let min = match class {
            GraphClass::Star => 3,
            _ => 2,
        };
        if n < min {
            return Err(GraphError::TooFewVertices { class, min, n });
        }
        let mut g = AccessGraph {
            n,
            class,
            adj: vec![Vec::new(); n as usize + 1],
        };
        match class {
            GraphClass::Path => {
                for v in 1..n {
                    g.add_edge(v, v + 1);
                }
            }
            GraphClass::Cycle => {
                for v in 1..n {
                    g.add_edge(v, v + 1);
                }
                g.add_edge(n, 1);
            }
            GraphClass::Star => {
                for v in 1..n {
                    g.add_edge(v, n);
                }
            }
            GraphClass::Complete => {
                for u in 1..=n {
                    for v in (u + 1)..=n {
                        g.add_edge(u, v);
                    }
                }
            }
            GraphClass::Custom => {}
        }
        g.sort_adjacency();
        Ok(g)
    }

    /// Builds a custom graph from an explicit edge list.
    pub fn custom(n: u32, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::TooFewVertices {
                class: GraphClass::Custom,
                min: 2,
                n,
            });
        }
        let mut g = AccessGraph {
            n,
            class: GraphClass::Custom,
            adj: vec![Vec::new(); n as usize + 1],
        };
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            for w in [u, v] {
                if w < 1 || w > n {
                    return Err(GraphError::EndpointOutOfRange { v: w, n });
                }
            }
            if !g.adj[u as usize].contains(&PageId(v)) {
                g.add_edge(u, v);
            }
        }
        g.sort_adjacency();
        Ok(g)
    }

    fn add_edge(&mut self, u: u32, v: u32) {
        self.adj[u as usize].push(PageId(v));
        self.adj[v as usize].push(PageId(u));
    }

    fn sort_adjacency(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
        }
    }

    pub fn n_vertices(&self) -> u32 {
        self.n
    }

    pub fn class(&self) -> GraphClass {
        self.class
    }

    /// The center of a star graph (vertex N by convention).
    pub fn star_center(&self) -> Option<PageId> {
        (self.class == GraphClass::Star).then_some(PageId(self.n))
    }

    pub fn contains(&self, p: PageId) -> bool {
        p.0 >= 1 && p.0 <= self.n
    }

    pub fn neighbors(&self, p: PageId) -> &[PageId] {
        &self.adj[p.index()]
    }

    pub fn is_adjacent(&self, p: PageId, q: PageId) -> bool {
        self.adj[p.index()].binary_search(&q).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 1..=self.n {
            for &v in &self.adj[u as usize] {
                if v.0 > u {
                    out.push((u, v.0));
                }
            }
        }
        out
    }

    /// True iff every consecutive pair of requests is identical or adjacent.
    /// Empty and length-1 sequences respect every graph that covers them.
    pub fn respects(&self, seq: &RequestSequence) -> bool {
        self.check_respects(seq).is_ok()
    }

    /// Like [`respects`](Self::respects) but reports the first violation.
    pub fn check_respects(&self, seq: &RequestSequence) -> Result<(), RespectsError> {
        for (i, &p) in seq.iter().enumerate() {
            if !self.contains(p) {
                return Err(RespectsError::PageOutOfRange {
                    index: i,
                    page: p,
                    n: self.n,
                });
            }
        }
        for (i, w) in seq.as_slice().windows(2).enumerate() {
            let (from, to) = (w[0], w[1]);
            if from != to && !self.is_adjacent(from, to) {
                return Err(RespectsError::NotAdjacent { index: i, from, to });
            }
        }
        Ok(())
    }

    /// Hop distance from every vertex to the nearest of `sources`
    /// (breadth-first layering). `None` means unreachable. Indexed by page id.
    pub fn distances_to_nearest(&self, sources: &[PageId]) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n as usize + 1];
        let mut queue = VecDeque::new();
        for &s in sources {
            if self.contains(s) && dist[s.index()].is_none() {
                dist[s.index()] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u.index()].unwrap();
            for &v in self.neighbors(u) {
                if dist[v.index()].is_none() {
                    dist[v.index()] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Graphviz DOT rendering, mostly for documentation.
    pub fn to_dot(&self) -> String {
        let mut s = format!("graph {} {{\n", self.class);
        for v in 1..=self.n {
            s.push_str(&format!("  {v};\n"));
        }
        for (u, v) in self.edges() {
            s.push_str(&format!("  {u} -- {v};\n"));
        }
        s.push_str("}\n");
        s
    }
}

/// JSON wire form: `{"n_vertices": N, "class_tag": "...", "edges": [[u,v],...]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub n_vertices: u32,
    pub class_tag: GraphClass,
    pub edges: Vec<(u32, u32)>,
}

impl From<&AccessGraph> for GraphJson {
    fn from(g: &AccessGraph) -> Self {
        GraphJson {
            n_vertices: g.n,
            class_tag: g.class,
            edges: g.edges(),
        }
    }
}

impl TryFrom<GraphJson> for AccessGraph {
    type Error = GraphError;

    fn try_from(j: GraphJson) -> Result<Self, GraphError> {
        let mut g = AccessGraph::custom(j.n_vertices, &j.edges)?;
        // Trust the tag only if the edge set actually matches the class.
        if j.class_tag != GraphClass::Custom {
            if let Ok(reference) = AccessGraph::new(j.class_tag, j.n_vertices) {
                if reference.adj == g.adj {
                    g.class = j.class_tag;
                }
            }
        }
        Ok(g)
    }
}

impl Serialize for AccessGraph {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        GraphJson::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for AccessGraph {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = GraphJson::deserialize(de)?;
        AccessGraph::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// An ordered sequence of page requests.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RequestSequence(pub Vec<PageId>);

impl RequestSequence {
    pub fn new(requests: Vec<PageId>) -> Self {
        RequestSequence(requests)
    }

    pub fn from_pages<I: IntoIterator<Item = u32>>(pages: I) -> Self {
        RequestSequence(pages.into_iter().map(PageId).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PageId> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[PageId] {
        &self.0
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.0.clone();
        v.reverse();
        RequestSequence(v)
    }

    /// Parses a comma-separated list of page ids, e.g. `"1,2,3"`.
    pub fn parse_csv(s: &str) -> Result<Self, std::num::ParseIntError> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(RequestSequence::default());
        }
        s.split(',')
            .map(|t| t.trim().parse::<u32>().map(PageId))
            .collect::<Result<Vec<_>, _>>()
            .map(RequestSequence)
    }
}

impl fmt::Display for RequestSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for p in &self.0 {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromIterator<PageId> for RequestSequence {
    fn from_iter<I: IntoIterator<Item = PageId>>(iter: I) -> Self {
        RequestSequence(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(pages: &[u32]) -> RequestSequence {
        RequestSequence::from_pages(pages.iter().copied())
    }

    #[test]
    fn path_edges() {
        let g = AccessGraph::new(GraphClass::Path, 4).unwrap();
        assert_eq!(g.edges(), vec![(1, 2), (2, 3), (3, 4)]);
    }

    #[test]
    fn cycle_edges() {
        let g = AccessGraph::new(GraphClass::Cycle, 5).unwrap();
        assert_eq!(g.edges(), vec![(1, 2), (1, 5), (2, 3), (3, 4), (4, 5)]);
    }

    #[test]
    fn star_edges() {
        let g = AccessGraph::new(GraphClass::Star, 4).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.star_center(), Some(PageId(4)));
        for leaf in 1..=3 {
            assert!(g.is_adjacent(PageId(leaf), PageId(4)));
        }
        assert!(!g.is_adjacent(PageId(1), PageId(2)));
    }

    #[test]
    fn complete_edge_count() {
        let g = AccessGraph::new(GraphClass::Complete, 6).unwrap();
        assert_eq!(g.edge_count(), 6 * 5 / 2);
    }

    #[test]
    fn class_minimums() {
        assert!(AccessGraph::new(GraphClass::Star, 2).is_err());
        assert!(AccessGraph::new(GraphClass::Path, 1).is_err());
        assert!(AccessGraph::new(GraphClass::Star, 3).is_ok());
    }

    #[test]
    fn custom_matches_named_classes() {
        let k3 = AccessGraph::custom(3, &[(1, 2), (2, 3), (1, 3)]).unwrap();
        let complete = AccessGraph::new(GraphClass::Complete, 3).unwrap();
        assert_eq!(k3.edges(), complete.edges());

        let p4 = AccessGraph::custom(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        let path = AccessGraph::new(GraphClass::Path, 4).unwrap();
        assert_eq!(p4.edges(), path.edges());
    }

    #[test]
    fn custom_rejects_self_loop_and_range() {
        assert_eq!(
            AccessGraph::custom(2, &[(1, 1)]),
            Err(GraphError::SelfLoop(1))
        );
        assert_eq!(
            AccessGraph::custom(3, &[(1, 4)]),
            Err(GraphError::EndpointOutOfRange { v: 4, n: 3 })
        );
    }

    #[test]
    fn respects_path_walk() {
        let g = AccessGraph::new(GraphClass::Path, 4).unwrap();
        assert!(g.respects(&seq(&[1, 2, 3, 4, 3, 2])));
        assert!(!g.respects(&seq(&[1, 3])));
        assert!(g.respects(&seq(&[])));
        assert!(g.respects(&seq(&[2])));
        assert!(g.respects(&seq(&[2, 2, 2])));
    }

    #[test]
    fn respects_star_through_center() {
        let g = AccessGraph::new(GraphClass::Star, 4).unwrap();
        let s = 4;
        assert!(g.respects(&seq(&[1, s, 2, s, 1])));
        assert!(!g.respects(&seq(&[1, 2])));
    }

    #[test]
    fn respects_error_kinds_are_distinct() {
        let g = AccessGraph::new(GraphClass::Path, 4).unwrap();
        assert_eq!(
            g.check_respects(&seq(&[1, 9])),
            Err(RespectsError::PageOutOfRange {
                index: 1,
                page: PageId(9),
                n: 4
            })
        );
        assert_eq!(
            g.check_respects(&seq(&[1, 3])),
            Err(RespectsError::NotAdjacent {
                index: 0,
                from: PageId(1),
                to: PageId(3)
            })
        );
    }

    #[test]
    fn complete_respects_everything_in_range() {
        let g = AccessGraph::new(GraphClass::Complete, 4).unwrap();
        assert!(g.respects(&seq(&[4, 1, 3, 1, 2, 4, 4])));
    }

    #[test]
    fn bfs_distances() {
        let g = AccessGraph::new(GraphClass::Cycle, 5).unwrap();
        let d = g.distances_to_nearest(&[PageId(1)]);
        assert_eq!(d[3], Some(2));
        assert_eq!(d[4], Some(2));
        let disconnected = AccessGraph::custom(4, &[(1, 2)]).unwrap();
        let d = disconnected.distances_to_nearest(&[PageId(1)]);
        assert_eq!(d[3], None);
    }

    #[test]
    fn json_round_trip() {
        let g = AccessGraph::new(GraphClass::Cycle, 5).unwrap();
        let js = serde_json::to_string(&g).unwrap();
        assert!(js.contains("\"class_tag\":\"cycle\""));
        let back: AccessGraph = serde_json::from_str(&js).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn json_class_tag_must_match_edges() {
        // A claimed "cycle" whose edges form a path falls back to custom.
        let js = r#"{"n_vertices":3,"class_tag":"cycle","edges":[[1,2],[2,3]]}"#;
        let g: AccessGraph = serde_json::from_str(js).unwrap();
        assert_eq!(g.class(), GraphClass::Custom);
    }

    #[test]
    fn dot_export_mentions_edges() {
        let g = AccessGraph::new(GraphClass::Path, 3).unwrap();
        let dot = g.to_dot();
        assert!(dot.contains("1 -- 2"));
        assert!(dot.contains("2 -- 3"));
    }

    #[test]
    fn sequence_parsing() {
        let s = RequestSequence::parse_csv(" 1, 2,3 ").unwrap();
        assert_eq!(s, seq(&[1, 2, 3]));
        assert!(RequestSequence::parse_csv("1,x").is_err());
        assert_eq!(RequestSequence::parse_csv("").unwrap().len(), 0);
    }
}
