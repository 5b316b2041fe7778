//! Brute-force ground truth. Materializes nodes, edges and faces of a
//! rotation system with naive structures and answers every query by direct
//! scan. Shares nothing with the succinct path beyond the parsed
//! [`RotationSystem`]; used by the verify command and the test batteries.

use crate::embed::{face_trace, Dart, EdgeEnds, RotationSystem};
use std::collections::HashSet;

/// Naive materialization of the whole topology, input ids throughout.
pub struct NaiveTopology {
    pub n: usize,
    pub m: usize,
    /// adjacency[v-1] = multiset of neighbors in rotation order
    /// (self-loops contribute v twice).
    pub adjacency: Vec<Vec<usize>>,
    /// faces[f-1] = boundary darts in trace order.
    pub face_darts: Vec<Vec<Dart>>,
    /// face id at each dart: face_at[v-1][slot-1].
    pub face_at: Vec<Vec<usize>>,
    /// endpoints per edge.
    pub endpoints: Vec<(usize, usize)>,
    /// the two face ids bordering each edge (equal for a bridge).
    pub edge_faces: Vec<(usize, usize)>,
    /// distinct faces per node / distinct nodes per face.
    pub node_faces: Vec<HashSet<usize>>,
    pub face_nodes: Vec<HashSet<usize>>,
    pub neighbor_sets: Vec<HashSet<usize>>,
    /// faces adjacent (sharing an edge) per face.
    pub face_adj: Vec<HashSet<usize>>,
}

impl NaiveTopology {
    pub fn new(rs: &RotationSystem) -> NaiveTopology {
        let ends = EdgeEnds::resolve(rs).expect("validated rotation system");
        let traced = face_trace(rs, &ends);
        let mut face_at: Vec<Vec<usize>> = (1..=rs.n).map(|v| vec![0; rs.degree(v)]).collect();
        for (id, f) in traced.iter().enumerate() {
            for d in &f.darts {
                face_at[d.node - 1][d.slot - 1] = id + 1;
            }
        }
        let mut adjacency = Vec::with_capacity(rs.n);
        for v in 1..=rs.n {
            adjacency.push(
                rs.rotations[v - 1]
                    .iter()
                    .map(|&e| {
                        let (a, b) = rs.endpoints[e - 1];
                        if a == v { b } else { a }
                    })
                    .collect(),
            );
        }
        // the two sides of edge e = the faces of its two darts
        let mut edge_faces = Vec::with_capacity(rs.m);
        for e in 1..=rs.m {
            let (d0, d1) = ends.of(e);
            edge_faces.push((
                face_at[d0.node - 1][d0.slot - 1],
                face_at[d1.node - 1][d1.slot - 1],
            ));
        }
        let nf = traced.len();
        let mut node_faces = vec![HashSet::new(); rs.n];
        let mut face_nodes = vec![HashSet::new(); nf];
        for (fid, f) in traced.iter().enumerate() {
            for d in &f.darts {
                node_faces[d.node - 1].insert(fid + 1);
                face_nodes[fid].insert(d.node);
            }
        }
        let mut neighbor_sets = vec![HashSet::new(); rs.n];
        for v in 1..=rs.n {
            for &w in &adjacency[v - 1] {
                neighbor_sets[v - 1].insert(w);
            }
        }
        let mut face_adj = vec![HashSet::new(); nf];
        for &(x, y) in &edge_faces {
            face_adj[x - 1].insert(y);
            face_adj[y - 1].insert(x);
        }
        NaiveTopology {
            n: rs.n,
            m: rs.m,
            adjacency,
            face_darts: traced.into_iter().map(|f| f.darts).collect(),
            face_at,
            endpoints: rs.endpoints.clone(),
            edge_faces,
            node_faces,
            face_nodes,
            neighbor_sets,
            face_adj,
        }
    }

    pub fn face_count(&self) -> usize {
        self.face_darts.len()
    }

    /// (1.c)
    pub fn neighbor(&self, u: usize, v: usize) -> bool {
        self.neighbor_sets[u - 1].contains(&v)
    }

    /// All edge ids connecting u and v.
    pub fn connecting_edges(&self, u: usize, v: usize) -> Vec<usize> {
        (1..=self.m)
            .filter(|&e| {
                let (a, b) = self.endpoints[e - 1];
                (a, b) == (u, v) || (a, b) == (v, u)
            })
            .collect()
    }

    /// (1.d)
    pub fn faces_adjacent(&self, x: usize, y: usize) -> bool {
        self.face_adj[x - 1].contains(&y)
    }

    /// Edge ids separating faces x and y.
    pub fn separating_edges(&self, x: usize, y: usize) -> Vec<usize> {
        (1..=self.m)
            .filter(|&e| {
                let (a, b) = self.edge_faces[e - 1];
                (a, b) == (x, y) || (a, b) == (y, x)
            })
            .collect()
    }

    /// (2.c)
    pub fn node_on_face(&self, u: usize, x: usize) -> bool {
        self.face_nodes[x - 1].contains(&u)
    }

    /// (1.e)
    pub fn nodes_share_face(&self, u: usize, v: usize) -> bool {
        !self.node_faces[u - 1].is_disjoint(&self.node_faces[v - 1])
    }

    /// (1.f)
    pub fn faces_share_node(&self, x: usize, y: usize) -> bool {
        !self.face_nodes[x - 1].is_disjoint(&self.face_nodes[y - 1])
    }

    /// (Lemma 8) common neighbor node.
    pub fn nodes_share_neighbor(&self, u: usize, v: usize) -> bool {
        !self.neighbor_sets[u - 1].is_disjoint(&self.neighbor_sets[v - 1])
    }

    /// (Lemma 8 dual) common adjacent face.
    pub fn faces_share_adjacent_face(&self, x: usize, y: usize) -> bool {
        !self.face_adj[x - 1].is_disjoint(&self.face_adj[y - 1])
    }

    /// (4.a) duplicated counts equal the rotation length.
    pub fn count_node_dup(&self, u: usize) -> usize {
        self.adjacency[u - 1].len()
    }

    pub fn count_node_distinct_nodes(&self, u: usize) -> usize {
        self.neighbor_sets[u - 1].len()
    }

    pub fn count_node_distinct_faces(&self, u: usize) -> usize {
        self.node_faces[u - 1].len()
    }

    /// (4.b) duplicated counts equal the boundary length.
    pub fn count_face_dup(&self, x: usize) -> usize {
        self.face_darts[x - 1].len()
    }

    pub fn count_face_distinct_nodes(&self, x: usize) -> usize {
        self.face_nodes[x - 1].len()
    }

    pub fn count_face_distinct_faces(&self, x: usize) -> usize {
        self.face_adj[x - 1].len()
    }

    /// Boundary node cycle of face x in trace order.
    pub fn face_node_cycle(&self, x: usize) -> Vec<usize> {
        self.face_darts[x - 1].iter().map(|d| d.node).collect()
    }

    /// Sanity: Euler counts plus the handshake identities, checked once per
    /// test graph.
    pub fn self_check(&self) {
        assert_eq!(self.face_count(), self.m + 2 - self.n, "Euler");
        let deg_sum: usize = self.adjacency.iter().map(|a| a.len()).sum();
        assert_eq!(deg_sum, 2 * self.m, "sum of degrees");
        let border_sum: usize = self.face_darts.iter().map(|f| f.len()).sum();
        assert_eq!(border_sum, 2 * self.m, "sum of boundary lengths");
        // cross-consistency of the share relations
        for u in 1..=self.n.min(40) {
            for v in 1..=self.n.min(40) {
                let shares = self.nodes_share_face(u, v);
                let by_scan = self.node_faces[u - 1]
                    .iter()
                    .any(|&x| self.node_on_face(v, x));
                assert_eq!(shares, by_scan);
            }
        }
    }
}

/// A query against the oracle, mirroring the Table-1 catalog; used by the
/// verify command to dispatch uniformly.
#[derive(Clone, Copy, Debug)]
pub enum OracleQuery {
    EdgesShareNode(usize, usize),
    EdgesShareFace(usize, usize),
    Neighbor(usize, usize),
    FacesAdjacent(usize, usize),
    NodesShareFace(usize, usize),
    FacesShareNode(usize, usize),
    EdgeIncidentNode(usize, usize),
    EdgeBordersFace(usize, usize),
    NodeOnFace(usize, usize),
    NodesShareNeighbor(usize, usize),
    FacesShareAdjacentFace(usize, usize),
}

/// Uniform boolean dispatch (edge arguments are edge ids).
pub fn oracle_query(t: &NaiveTopology, q: OracleQuery) -> bool {
    use OracleQuery::*;
    match q {
        EdgesShareNode(e, f) => {
            let (a, b) = t.endpoints[e - 1];
            let (c, d) = t.endpoints[f - 1];
            a == c || a == d || b == c || b == d
        }
        EdgesShareFace(e, f) => {
            let (a, b) = t.edge_faces[e - 1];
            let (c, d) = t.edge_faces[f - 1];
            a == c || a == d || b == c || b == d
        }
        Neighbor(u, v) => t.neighbor(u, v),
        FacesAdjacent(x, y) => t.faces_adjacent(x, y),
        NodesShareFace(u, v) => t.nodes_share_face(u, v),
        FacesShareNode(x, y) => t.faces_share_node(x, y),
        EdgeIncidentNode(e, u) => {
            let (a, b) = t.endpoints[e - 1];
            a == u || b == u
        }
        EdgeBordersFace(e, x) => {
            let (a, b) = t.edge_faces[e - 1];
            a == x || b == x
        }
        NodeOnFace(u, x) => t.node_on_face(u, x),
        NodesShareNeighbor(u, v) => t.nodes_share_neighbor(u, v),
        FacesShareAdjacentFace(x, y) => t.faces_share_adjacent_face(x, y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::parse_rotation_system;

    #[test]
    fn k3_truth_table() {
        let rs = parse_rotation_system(
            "PLANAREMB 1\n3 3\n2 1 3\n2 1 2\n2 2 3\n1 2\n2 3\n1 3\nroot 1 1\n",
        )
        .unwrap();
        let t = NaiveTopology::new(&rs);
        t.self_check();
        for u in 1..=3 {
            for v in 1..=3 {
                assert_eq!(t.neighbor(u, v), u != v, "neighbor({u},{v})");
                assert!(t.nodes_share_face(u, v));
                assert_eq!(t.nodes_share_neighbor(u, v), true); // triangle
            }
        }
        assert!(t.faces_adjacent(1, 2));
        assert_eq!(t.count_face_distinct_nodes(1), 3);
    }

    #[test]
    fn p2_by_hand() {
        let rs = parse_rotation_system("PLANAREMB 1\n2 1\n1 1\n1 1\n1 2\nroot 1 1\n").unwrap();
        let t = NaiveTopology::new(&rs);
        t.self_check();
        assert!(t.neighbor(1, 2));
        assert!(!t.neighbor(1, 1));
        assert!(!t.nodes_share_neighbor(1, 2));
        assert!(t.faces_adjacent(1, 1)); // bridge: dual self-loop
        assert_eq!(t.count_face_dup(1), 2);
        assert_eq!(t.count_face_distinct_nodes(1), 2);
        assert!(t.node_on_face(2, 1));
    }

    #[test]
    fn grid_face_count() {
        // 20x20 grid: n=400, m=760, faces=362
        let rs = crate::gen::grid(20, 20);
        assert_eq!((rs.n, rs.m), (400, 760));
        let t = NaiveTopology::new(&rs);
        t.self_check();
        assert_eq!(t.face_count(), 362);
    }
}

