//! Weighted dual graphs of resolutions, their blowups, and pullback of cycles.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::QCycle;
use crate::linalg::{is_negative_definite, IntMatrix};

pub type VertexId = u32;

/// On-disk form of a graph: `{"vertices": [{"id", "weight"}], "edges": [[a, b]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<[VertexId; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub id: VertexId,
    pub weight: i64,
}

/// A validated resolution graph: a tree of rational curves with negative
/// definite intersection matrix. Vertices are stored in ascending id order;
/// "index" below always means the position in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionGraph {
    ids: Vec<VertexId>,
    weights: Vec<i64>,
    edges: Vec<(VertexId, VertexId)>,
    adjacency: Vec<Vec<usize>>,
}

impl ResolutionGraph {
    pub fn new(vertices: &[(VertexId, i64)], edges: &[(VertexId, VertexId)]) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::TooSmall(vertices.len()));
        }
        let mut verts = vertices.to_vec();
        verts.sort_by_key(|&(id, _)| id);
        if let Some(w) = verts.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Parse(format!("duplicate vertex id {}", w[0].0)));
        }
        if let Some(&(id, weight)) = verts.iter().find(|&&(_, w)| w >= 0) {
            return Err(Error::BadWeight { id, weight });
        }
        let ids: Vec<VertexId> = verts.iter().map(|v| v.0).collect();
        let weights: Vec<i64> = verts.iter().map(|v| v.1).collect();

        let mut normalized = BTreeSet::new();
        for &(a, b) in edges {
            for v in [a, b] {
                if ids.binary_search(&v).is_err() {
                    return Err(Error::UnknownVertex(v));
                }
            }
            if a == b {
                return Err(Error::NotATree(format!("self-loop at {a}")));
            }
            if !normalized.insert((a.min(b), a.max(b))) {
                return Err(Error::NotATree(format!("repeated edge ({a}, {b})")));
            }
        }
        if normalized.len() + 1 != ids.len() {
            return Err(Error::NotATree(format!(
                "{} edges for {} vertices",
                normalized.len(),
                ids.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); ids.len()];
        for &(a, b) in &normalized {
            let (ia, ib) = (index_in(&ids, a), index_in(&ids, b));
            adjacency[ia].push(ib);
            adjacency[ib].push(ia);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        let g = ResolutionGraph {
            ids,
            weights,
            edges: normalized.into_iter().collect(),
            adjacency,
        };
        // n-1 edges and connected means tree
        if g.component_of(0, None).len() != g.len() {
            return Err(Error::NotATree("graph is disconnected".into()));
        }
        if !is_negative_definite(&g.intersection_matrix())? {
            return Err(Error::NotNegativeDefinite);
        }
        Ok(g)
    }

    pub fn from_document(doc: &GraphDocument) -> Result<Self> {
        let vertices: Vec<_> = doc.vertices.iter().map(|v| (v.id, v.weight)).collect();
        let edges: Vec<_> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::new(&vertices, &edges)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_document(&doc)
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            vertices: self
                .ids
                .iter()
                .zip(&self.weights)
                .map(|(&id, &weight)| VertexSpec { id, weight })
                .collect(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    /// Linear chain with the given weights, ids 1..=n.
    pub fn chain(weights: &[i64]) -> Result<Self> {
        let vertices: Vec<_> = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (i as VertexId + 1, w))
            .collect();
        let edges: Vec<_> = (1..weights.len() as VertexId).map(|i| (i, i + 1)).collect();
        Self::new(&vertices, &edges)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.ids.binary_search(&v).is_ok()
    }

    pub fn index_of(&self, v: VertexId) -> Result<usize> {
        self.ids
            .binary_search(&v)
            .map_err(|_| Error::UnknownVertex(v))
    }

    pub fn weight(&self, v: VertexId) -> Result<i64> {
        Ok(self.weights[self.index_of(v)?])
    }

    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>> {
        let i = self.index_of(v)?;
        Ok(self.adjacency[i].iter().map(|&j| self.ids[j]).collect())
    }

    pub fn has_edge(&self, v: VertexId, w: VertexId) -> bool {
        self.edges.binary_search(&(v.min(w), v.max(w))).is_ok()
    }

    /// Number of neighbours; `(E - E_v) . E_v` for a tree.
    pub fn delta(&self, v: VertexId) -> Result<usize> {
        Ok(self.adjacency[self.index_of(v)?].len())
    }

    pub fn is_end(&self, v: VertexId) -> bool {
        self.delta(v).is_ok_and(|d| d == 1)
    }

    pub fn ends(&self) -> Vec<VertexId> {
        self.select(|d| d == 1)
    }

    pub fn nodes(&self) -> Vec<VertexId> {
        self.select(|d| d >= 3)
    }

    fn select(&self, pred: impl Fn(usize) -> bool) -> Vec<VertexId> {
        self.ids
            .iter()
            .zip(&self.adjacency)
            .filter(|(_, adj)| pred(adj.len()))
            .map(|(&id, _)| id)
            .collect()
    }

    pub fn intersection_matrix(&self) -> IntMatrix {
        let n = self.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, &w) in self.weights.iter().enumerate() {
            m.set(i, i, BigInt::from(w));
            for &j in &self.adjacency[i] {
                m.set(i, j, BigInt::from(1));
            }
        }
        m
    }

    fn component_of(&self, start: usize, removed: Option<usize>) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        if let Some(r) = removed {
            seen[r] = true;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut out = Vec::new();
        while let Some(i) = stack.pop() {
            out.push(i);
            for &j in &self.adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Connected components of the graph with `v` removed, one per
    /// neighbour of `v`, ordered by that neighbour's id.
    pub fn branches(&self, v: VertexId) -> Result<Vec<Vec<VertexId>>> {
        let i = self.index_of(v)?;
        Ok(self.adjacency[i]
            .iter()
            .map(|&start| {
                self.component_of(start, Some(i))
                    .into_iter()
                    .map(|j| self.ids[j])
                    .collect()
            })
            .collect())
    }

    /// Minimal good resolution graphs have no (-1)-curve with at most two
    /// neighbours.
    pub fn check_minimal(&self) -> Result<()> {
        for (i, &id) in self.ids.iter().enumerate() {
            if self.weights[i] == -1 && self.adjacency[i].len() <= 2 {
                return Err(Error::NotMinimal(id));
            }
        }
        Ok(())
    }

    /// Smallest positive id not in use.
    pub fn next_free_id(&self) -> VertexId {
        let mut candidate = 1;
        for &id in &self.ids {
            if id == candidate {
                candidate += 1;
            } else if id > candidate {
                break;
            }
        }
        candidate
    }

    fn rebuilt(
        &self,
        new_vertex: (VertexId, i64),
        weight_changes: &[WeightChange],
        remove_edge: Option<(VertexId, VertexId)>,
        add_edges: &[(VertexId, VertexId)],
    ) -> Result<Self> {
        let mut vertices: Vec<(VertexId, i64)> = self
            .ids
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
            .collect();
        for c in weight_changes {
            let slot = vertices
                .iter_mut()
                .find(|v| v.0 == c.id)
                .expect("known vertex");
            slot.1 = c.new;
        }
        vertices.push(new_vertex);
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .copied()
            .filter(|&e| Some(e) != remove_edge)
            .collect();
        edges.extend_from_slice(add_edges);
        // the rule preserves tree-ness and definiteness; `new` re-checks both
        Self::new(&vertices, &edges)
    }

    /// Blow up the intersection point of `E_v` and `E_w`.
    pub fn blowup_edge(&self, v: VertexId, w: VertexId) -> Result<(Self, BlowupEvent)> {
        self.index_of(v)?;
        self.index_of(w)?;
        if !self.has_edge(v, w) {
            return Err(Error::NotAnEdge(v, w));
        }
        let u = self.next_free_id();
        let weight_changes = vec![self.decrement(v)?, self.decrement(w)?];
        let g = self.rebuilt(
            (u, -1),
            &weight_changes,
            Some((v.min(w), v.max(w))),
            &[(v, u), (u, w)],
        )?;
        let event = BlowupEvent {
            kind: BlowupKind::Edge(v, w),
            new_vertex: u,
            weight_changes,
        };
        Ok((g, event))
    }

    /// Blow up a smooth point of the end curve `E_end`; the new (-1)-curve
    /// becomes the end.
    pub fn blowup_end_point(&self, end: VertexId) -> Result<(Self, BlowupEvent)> {
        self.index_of(end)?;
        if !self.is_end(end) {
            return Err(Error::NotAnEnd(end));
        }
        let u = self.next_free_id();
        let weight_changes = vec![self.decrement(end)?];
        let g = self.rebuilt((u, -1), &weight_changes, None, &[(end, u)])?;
        let event = BlowupEvent {
            kind: BlowupKind::EndPoint {
                end_index: end,
                vertex: end,
            },
            new_vertex: u,
            weight_changes,
        };
        Ok((g, event))
    }

    fn decrement(&self, v: VertexId) -> Result<WeightChange> {
        let old = self.weight(v)?;
        Ok(WeightChange {
            id: v,
            old,
            new: old - 1,
        })
    }

    /// Apply a recorded event to this graph.
    pub fn apply(&self, event: &BlowupEvent) -> Result<Self> {
        let (g, replayed) = match event.kind {
            BlowupKind::Edge(v, w) => self.blowup_edge(v, w)?,
            BlowupKind::EndPoint { vertex, .. } => self.blowup_end_point(vertex)?,
        };
        debug_assert_eq!(replayed.new_vertex, event.new_vertex);
        Ok(g)
    }
}

fn index_in(ids: &[VertexId], v: VertexId) -> usize {
    ids.binary_search(&v).expect("vertex present")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightChange {
    pub id: VertexId,
    pub old: i64,
    pub new: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlowupKind {
    /// Centre `E_v ∩ E_w`.
    Edge(VertexId, VertexId),
    /// Centre is the point where the end curve of `end_index` meets `vertex`.
    EndPoint {
        end_index: VertexId,
        vertex: VertexId,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupEvent {
    pub kind: BlowupKind,
    pub new_vertex: VertexId,
    pub weight_changes: Vec<WeightChange>,
}

impl std::fmt::Display for BlowupEvent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            BlowupKind::Edge(v, w) => write!(f, "blow up E{v} ∩ E{w}")?,
            BlowupKind::EndPoint { end_index, vertex } => {
                write!(f, "blow up b_{end_index} on E{vertex}")?
            }
        }
        write!(f, " -> new vertex {} (weight -1)", self.new_vertex)?;
        for c in &self.weight_changes {
            write!(f, ", E{}: {} -> {}", c.id, c.old, c.new)?;
        }
        Ok(())
    }
}

/// Total transform of a rational cycle under one blowup. Old coefficients
/// are kept; the exceptional curve gets the sum of the coefficients of the
/// curves through the centre.
pub fn pullback_vertex_cycle(
    pre: &ResolutionGraph,
    post: &ResolutionGraph,
    event: &BlowupEvent,
    d: &QCycle,
) -> Result<QCycle> {
    if d.ids() != pre.ids() {
        return Err(Error::IndexMismatch);
    }
    let new_coeff = match event.kind {
        BlowupKind::Edge(v, w) => d.coefficient(v)? + d.coefficient(w)?,
        BlowupKind::EndPoint { vertex, .. } => d.coefficient(vertex)?,
    };
    let coeffs = post
        .ids()
        .iter()
        .map(|&id| {
            if id == event.new_vertex {
                Ok(new_coeff.clone())
            } else {
                d.coefficient(id).map_err(|_| Error::IndexMismatch)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QCycle::new(post.ids().to_vec(), coeffs))
}

/// An initial graph with the ordered blowups applied to it, tracking which
/// current vertex carries each end variable `z_i` (keyed by the original
/// end id `i`).
#[derive(Clone, Debug)]
pub struct GraphHistory {
    initial: ResolutionGraph,
    events: Vec<BlowupEvent>,
    current: ResolutionGraph,
    end_map: BTreeMap<VertexId, VertexId>,
}

impl GraphHistory {
    pub fn new(g: ResolutionGraph) -> Self {
        let end_map = g.ends().into_iter().map(|e| (e, e)).collect();
        GraphHistory {
            initial: g.clone(),
            events: Vec::new(),
            current: g,
            end_map,
        }
    }

    pub fn initial(&self) -> &ResolutionGraph {
        &self.initial
    }

    pub fn current(&self) -> &ResolutionGraph {
        &self.current
    }

    pub fn events(&self) -> &[BlowupEvent] {
        &self.events
    }

    pub fn end_map(&self) -> &BTreeMap<VertexId, VertexId> {
        &self.end_map
    }

    /// Original end ids, ascending.
    pub fn end_indices(&self) -> Vec<VertexId> {
        self.end_map.keys().copied().collect()
    }

    /// Current vertices carrying the end variables, in end-index order.
    pub fn end_vertices(&self) -> Vec<VertexId> {
        self.end_map.values().copied().collect()
    }

    pub fn end_vertex(&self, index: VertexId) -> Result<VertexId> {
        self.end_map
            .get(&index)
            .copied()
            .ok_or(Error::NotAnEnd(index))
    }

    pub fn blowup_edge(&mut self, v: VertexId, w: VertexId) -> Result<&BlowupEvent> {
        let (g, event) = self.current.blowup_edge(v, w)?;
        self.current = g;
        self.events.push(event);
        Ok(self.events.last().expect("just pushed"))
    }

    pub fn blowup_end(&mut self, index: VertexId) -> Result<&BlowupEvent> {
        let vertex = self.end_vertex(index)?;
        let (g, mut event) = self.current.blowup_end_point(vertex)?;
        event.kind = BlowupKind::EndPoint {
            end_index: index,
            vertex,
        };
        self.end_map.insert(index, event.new_vertex);
        self.current = g;
        self.events.push(event);
        Ok(self.events.last().expect("just pushed"))
    }

    /// Rebuild the current graph from the initial one.
    pub fn replay(&self) -> Result<ResolutionGraph> {
        self.events
            .iter()
            .try_fold(self.initial.clone(), |g, e| g.apply(e))
    }
}
