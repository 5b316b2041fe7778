//! The O(1)-per-item query layer over a [`TuranIndex`]: edge decoding,
//! incidence booleans, and the four listing families. Node identifiers are
//! depth-first ranks (opening parenthesis ranks), faces are opening bracket
//! ranks, and edges are sequence positions (exposed canonically as the
//! smaller of their two positions).

use crate::turan::{SeqView, TuranIndex};
use std::fmt;

/// Depth-first rank of a node; 1 is the traversal root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

/// Rank of a face's opening bracket; 1 is the outer face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceId(pub usize);

/// Position in S identifying an edge (each edge has two; the canonical one
/// is the smaller).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgePos(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Table-1 rows 1.a/1.b, 2.a/2.b and 3.a-3.f over the core index.
pub struct Topology<'a> {
    idx: &'a TuranIndex,
}

impl<'a> Topology<'a> {
    pub fn new(idx: &'a TuranIndex) -> Self {
        Topology { idx }
    }

    pub fn index(&self) -> &'a TuranIndex {
        self.idx
    }

    fn primal(&self) -> SeqView<'a> {
        self.idx.primal()
    }

    fn dual(&self) -> SeqView<'a> {
        self.idx.dual()
    }

    pub fn node_count(&self) -> usize {
        self.idx.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.idx.edge_count()
    }

    pub fn face_count(&self) -> usize {
        self.idx.face_count()
    }

    pub fn check_node(&self, u: NodeId) -> crate::Result<()> {
        if u.0 == 0 || u.0 > self.node_count() {
            return Err(crate::Error::Range(format!("node {u} not in 1..={}", self.node_count())));
        }
        Ok(())
    }

    pub fn check_face(&self, x: FaceId) -> crate::Result<()> {
        if x.0 == 0 || x.0 > self.face_count() {
            return Err(crate::Error::Range(format!("face {x} not in 1..={}", self.face_count())));
        }
        Ok(())
    }

    pub fn check_edge(&self, e: EdgePos) -> crate::Result<()> {
        if !self.primal().is_valid_edge_pos(e.0) {
            return Err(crate::Error::Range(format!(
                "edge position {e} not in 3..={}",
                self.idx.seq_len() - 2
            )));
        }
        Ok(())
    }

    /// Canonical position of the edge visited at `e`.
    pub fn canonical_edge(&self, e: EdgePos) -> EdgePos {
        EdgePos(self.primal().canonical(e.0))
    }

    /// (3.a) The two nodes connected by edge `e` (equal for a self-loop).
    pub fn edge_endpoints(&self, e: EdgePos) -> (NodeId, NodeId) {
        let v = self.primal();
        (NodeId(v.node_of(e.0)), NodeId(v.node_of(v.mate(e.0))))
    }

    /// (3.b) The two faces divided by edge `e` (equal for a bridge).
    pub fn edge_faces(&self, e: EdgePos) -> (FaceId, FaceId) {
        let v = self.dual();
        (FaceId(v.node_of(e.0)), FaceId(v.node_of(v.mate(e.0))))
    }

    /// (1.a) Do edges `e` and `f` share a node?
    pub fn edges_share_node(&self, e: EdgePos, f: EdgePos) -> bool {
        let (a, b) = self.edge_endpoints(e);
        let (c, d) = self.edge_endpoints(f);
        a == c || a == d || b == c || b == d
    }

    /// (1.b) Do edges `e` and `f` border a common face?
    pub fn edges_share_face(&self, e: EdgePos, f: EdgePos) -> bool {
        let (a, b) = self.edge_faces(e);
        let (c, d) = self.edge_faces(f);
        a == c || a == d || b == c || b == d
    }

    /// (2.a) Is edge `e` incident on node `u`?
    pub fn edge_incident_node(&self, e: EdgePos, u: NodeId) -> bool {
        let (a, b) = self.edge_endpoints(e);
        a == u || b == u
    }

    /// (2.b) Is edge `e` on the border of face `x`?
    pub fn edge_borders_face(&self, e: EdgePos, x: FaceId) -> bool {
        let (a, b) = self.edge_faces(e);
        a == x || b == x
    }

    /// (3.c) Incident edges of `u` with their opposite endpoints,
    /// counter-clockwise from the parent edge. A self-loop appears twice,
    /// both times with opposite endpoint `u`.
    pub fn list_node_edges(&self, u: NodeId) -> impl Iterator<Item = (EdgePos, NodeId)> + 'a {
        let v = self.primal();
        v.rotation(u.0)
            .map(move |p| (EdgePos(v.canonical(p)), NodeId(v.node_of(v.mate(p)))))
    }

    /// (3.e) Faces incident on `u`, counter-clockwise; every corner face is
    /// produced twice consecutively (cyclically).
    pub fn list_node_faces_raw(&self, u: NodeId) -> impl Iterator<Item = FaceId> + 'a {
        let d = self.dual();
        let p = self.primal();
        p.rotation(u.0)
            .flat_map(move |pos| [FaceId(d.node_of(pos)), FaceId(d.node_of(d.mate(pos)))])
    }

    /// (3.e) with consecutive duplicates collapsed cyclically: each corner
    /// face once, counter-clockwise around `u`.
    pub fn list_node_faces(&self, u: NodeId) -> Vec<FaceId> {
        dedup_cyclic(self.list_node_faces_raw(u).collect())
    }

    /// (3.d) Faces bordering face `x` with the separating edge, clockwise
    /// from x's parent in the dual tree.
    pub fn list_face_faces(&self, x: FaceId) -> impl Iterator<Item = (EdgePos, FaceId)> + 'a {
        let v = self.dual();
        v.rotation(x.0)
            .map(move |p| (EdgePos(v.canonical(p)), FaceId(v.node_of(v.mate(p)))))
    }

    /// (3.f) Edges bordering `x`, clockwise; a bridge appears twice.
    pub fn list_face_edges(&self, x: FaceId) -> impl Iterator<Item = EdgePos> + 'a {
        let v = self.dual();
        v.rotation(x.0).map(move |p| EdgePos(v.canonical(p)))
    }

    /// (3.f) Nodes along the frontier of `x` in boundary order.
    pub fn list_face_nodes(&self, x: FaceId) -> impl Iterator<Item = NodeId> + 'a {
        let d = self.dual();
        let p = self.primal();
        d.rotation(x.0).map(move |pos| NodeId(p.node_of(pos)))
    }

    /// Rotation length of `u`: its degree with self-loops counted twice.
    pub fn node_degree(&self, u: NodeId) -> usize {
        self.primal().degree(u.0)
    }

    /// Boundary length of `x` (a bridge contributes twice).
    pub fn face_border_len(&self, x: FaceId) -> usize {
        self.dual().degree(x.0)
    }

    /// Degree of `u`, walking at most `cap` rotation steps.
    pub fn primal_degree_capped(&self, u: NodeId, cap: usize) -> usize {
        self.primal().degree_capped(u.0, cap)
    }

    /// Boundary length of `x`, walking at most `cap` steps.
    pub fn face_border_capped(&self, x: FaceId, cap: usize) -> usize {
        self.dual().degree_capped(x.0, cap)
    }
}

/// Collapse consecutive duplicates, treating the sequence as cyclic.
pub(crate) fn dedup_cyclic<T: PartialEq + Copy>(items: Vec<T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(items.len() / 2 + 1);
    for it in items {
        if out.last() != Some(&it) {
            out.push(it);
        }
    }
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{build_turan, parse_rotation_system};

    const P2: &str = "PLANAREMB 1\n2 1\n1 1\n1 1\n1 2\nroot 1 1\n";
    const K3: &str = "PLANAREMB 1\n3 3\n2 1 3\n2 1 2\n2 2 3\n1 2\n2 3\n1 3\nroot 1 1\n";

    fn build(text: &str) -> crate::turan::TuranIndex {
        let rs = parse_rotation_system(text).unwrap();
        build_turan(&rs).unwrap().0
    }

    #[test]
    fn k3_navigation() {
        let idx = build(K3);
        let v = idx.primal();
        assert_eq!(v.first(1), 3);
        assert_eq!(v.first(3), 5);
        assert_eq!(v.mate(5), 8);
        assert_eq!(v.mate(v.mate(5)), 5);
        assert_eq!(v.next(3), 8);
        assert_eq!(v.node_of(5), 3);
        assert_eq!(v.node_of(8), 1);
        assert_eq!(v.node_of(9), 1);
        assert_eq!(v.parent(2), Some(1));
        assert_eq!(v.parent(3), Some(2));
        assert_eq!(v.parent(1), None);
        // rotations
        let rot1: Vec<usize> = v.rotation(1).collect();
        assert_eq!(rot1, [3, 8]);
        let rot3: Vec<usize> = v.rotation(3).collect();
        assert_eq!(rot3, [5, 6]);
        assert_eq!(v.degree(2), 2);
    }

    #[test]
    fn k3_queries() {
        let idx = build(K3);
        let t = Topology::new(&idx);
        let (a, b) = t.edge_endpoints(EdgePos(5));
        assert_eq!((a.0.min(b.0), a.0.max(b.0)), (1, 3));
        let (x, y) = t.edge_faces(EdgePos(5));
        assert_eq!((x.0.min(y.0), x.0.max(y.0)), (1, 2));
        // edges a (positions 3/7) and c (5/8) share node 1
        assert!(t.edges_share_node(EdgePos(3), EdgePos(5)));
        assert!(t.edge_incident_node(EdgePos(5), NodeId(1)));
        assert!(t.edge_borders_face(EdgePos(5), FaceId(2)));
        // neighbors of 1 in rotation order: 2 then 3
        let ne: Vec<usize> = t.list_node_edges(NodeId(1)).map(|(_, w)| w.0).collect();
        assert_eq!(ne, [2, 3]);
        // canonical ids
        assert_eq!(t.canonical_edge(EdgePos(8)), EdgePos(5));
        // each node touches both faces
        for u in 1..=3 {
            let fs = t.list_node_faces(NodeId(u));
            assert_eq!(fs.len(), 2, "node {u} faces {fs:?}");
        }
        // face boundaries
        let f1: Vec<usize> = t.list_face_nodes(FaceId(1)).map(|n| n.0).collect();
        assert_eq!(f1, [1, 2, 3]);
        let f2: Vec<usize> = t.list_face_nodes(FaceId(2)).map(|n| n.0).collect();
        assert_eq!(f2, [3, 2, 1]);
        assert_eq!(t.face_border_len(FaceId(1)), 3);
        // duplicated-listing property: corner faces appear twice consecutively
        let raw: Vec<usize> = t.list_node_faces_raw(NodeId(1)).map(|f| f.0).collect();
        assert_eq!(raw, [1, 2, 2, 1]);
    }

    #[test]
    fn p2_queries() {
        let idx = build(P2);
        let t = Topology::new(&idx);
        assert_eq!(idx.primal().first(2), 4); // leaf: its own closing position
        let (a, b) = t.edge_endpoints(EdgePos(3));
        assert_eq!((a.0.min(b.0), a.0.max(b.0)), (1, 2));
        let (x, y) = t.edge_faces(EdgePos(3));
        assert_eq!((x, y), (FaceId(1), FaceId(1))); // bridge
        assert!(t.edges_share_face(EdgePos(3), EdgePos(3)));
        assert!(t.edge_borders_face(EdgePos(3), FaceId(1)));
        let f1: Vec<usize> = t.list_face_nodes(FaceId(1)).map(|n| n.0).collect();
        assert_eq!(f1, [1, 2]);
        assert_eq!(t.face_border_len(FaceId(1)), 2);
        assert_eq!(t.node_degree(NodeId(2)), 1);
    }

    #[test]
    fn self_loop_listing() {
        let txt = "PLANAREMB 1\n1 1\n2 1 1\n1 1\nroot 1 1\n";
        let idx = build(txt);
        let t = Topology::new(&idx);
        let items: Vec<(usize, usize)> = t
            .list_node_edges(NodeId(1))
            .map(|(e, w)| (e.0, w.0))
            .collect();
        // the loop appears twice, both times with opposite endpoint 1
        assert_eq!(items, [(3, 1), (3, 1)]);
        let (a, b) = t.edge_endpoints(EdgePos(3));
        assert_eq!((a, b), (NodeId(1), NodeId(1)));
        assert_eq!(t.node_degree(NodeId(1)), 2);
    }

    #[test]
    fn prev_inverts_next() {
        let idx = build(K3);
        let v = idx.primal();
        for u in 1..=3 {
            let rot: Vec<usize> = v.rotation(u).collect();
            for w in rot.windows(2) {
                assert_eq!(v.prev(w[1]), w[0]);
            }
        }
    }
}

