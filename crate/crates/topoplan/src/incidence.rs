//! Node-on-face incidence and the counting queries.
//!
//! `node_on_face` scans whichever side is light; when both the node and the
//! face meet the `f_inc` threshold the answer comes from a dictionary of
//! heavy incident pairs (the bipartite incidence graph is planar, so the
//! dictionary holds O(m/f_inc) entries). Counting distinguishes duplicated
//! counts (rotation / boundary-walk length) from distinct counts computed
//! by sort-dedup for light entities and stored explicitly for heavy ones.

use crate::levels::ExplicitTop;
use crate::topo::{FaceId, NodeId, Topology};

/// Heavy (node, face) incidence dictionary with its threshold.
#[derive(Clone, Debug)]
pub struct IncidenceIndex {
    pub f_inc: usize,
    pub heavy_pairs: ExplicitTop,
}

impl IncidenceIndex {
    /// Default threshold ceil(log2(m)^2); any omega(log m) keeps the
    /// dictionary within o(m).
    pub fn default_threshold(m: usize) -> usize {
        let lg = (m.max(2) as f64).log2();
        (lg * lg).ceil() as usize
    }

    pub fn build(t: &Topology<'_>, f_inc: usize) -> IncidenceIndex {
        let f_inc = f_inc.max(1);
        let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
        for u in 1..=t.node_count() {
            let u = NodeId(u);
            if t.primal_degree_capped(u, f_inc) < f_inc {
                continue;
            }
            let mut faces = t.list_node_faces(u);
            faces.sort_unstable();
            faces.dedup();
            for x in faces {
                if t.face_border_capped(x, f_inc) >= f_inc {
                    pairs.push((u.0, t.node_count() + x.0, 1));
                }
            }
        }
        IncidenceIndex {
            f_inc,
            heavy_pairs: ExplicitTop::build(&pairs),
        }
    }

    pub fn pair_count(&self) -> usize {
        self.heavy_pairs.entries
    }

    /// (2.c) Is face `x` incident on node `u`?
    pub fn node_on_face(&self, t: &Topology<'_>, u: NodeId, x: FaceId) -> bool {
        // light node: walk its incident faces
        if t.primal_degree_capped(u, self.f_inc) < self.f_inc {
            return t.list_node_faces_raw(u).any(|y| y == x);
        }
        // light face: walk its frontier
        if t.face_border_capped(x, self.f_inc) < self.f_inc {
            return t.list_face_nodes(x).any(|w| w == u);
        }
        self.heavy_pairs.lookup(u.0, t.node_count() + x.0).is_some()
    }

    pub fn bits(&self) -> usize {
        self.heavy_pairs.bits()
    }
}

/// What to count around a node or face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountKind {
    Edges,
    Nodes,
    Faces,
}

impl CountKind {
    pub fn parse(s: &str) -> Option<CountKind> {
        match s {
            "edges" => Some(CountKind::Edges),
            "nodes" => Some(CountKind::Nodes),
            "faces" => Some(CountKind::Faces),
            _ => None,
        }
    }
}

/// Explicitly stored counts for entities with at least `f_cnt` edge ends.
#[derive(Clone, Debug)]
pub struct CountIndex {
    pub f_cnt: usize,
    /// (entity id, degree, distinct opposite-entities, distinct cross-entities)
    /// for nodes: (deg, distinct neighbor nodes, distinct incident faces)
    pub node_counts: Vec<(usize, usize, usize, usize)>,
    /// for faces: (border len, distinct adjacent faces, distinct frontier nodes)
    pub face_counts: Vec<(usize, usize, usize, usize)>,
}

impl CountIndex {
    pub const DEFAULT_F_CNT: usize = 16;

    pub fn build(t: &Topology<'_>, f_cnt: usize) -> CountIndex {
        let f_cnt = f_cnt.max(2);
        let mut node_counts = Vec::new();
        for u in 1..=t.node_count() {
            let u = NodeId(u);
            let deg = t.node_degree(u);
            if deg >= f_cnt {
                let mut ns: Vec<usize> = t.list_node_edges(u).map(|(_, w)| w.0).collect();
                ns.sort_unstable();
                ns.dedup();
                let mut fs: Vec<usize> = t.list_node_faces(u).iter().map(|f| f.0).collect();
                fs.sort_unstable();
                fs.dedup();
                node_counts.push((u.0, deg, ns.len(), fs.len()));
            }
        }
        let mut face_counts = Vec::new();
        for x in 1..=t.face_count() {
            let x = FaceId(x);
            let len = t.face_border_len(x);
            if len >= f_cnt {
                let mut adj: Vec<usize> = t.list_face_faces(x).map(|(_, y)| y.0).collect();
                adj.sort_unstable();
                adj.dedup();
                let mut ns: Vec<usize> = t.list_face_nodes(x).map(|w| w.0).collect();
                ns.sort_unstable();
                ns.dedup();
                face_counts.push((x.0, len, adj.len(), ns.len()));
            }
        }
        CountIndex { f_cnt, node_counts, face_counts }
    }

    /// (4.a) Count entities around node `u`. Duplicated semantics counts
    /// every rotation step (self-loops twice, faces once per corner);
    /// distinct removes repetitions.
    pub fn count_node(&self, t: &Topology<'_>, u: NodeId, kind: CountKind, distinct: bool) -> usize {
        // bounded walk: if the rotation ends within f_cnt steps the node is
        // light and we count directly
        let capped = t.primal_degree_capped(u, self.f_cnt);
        if capped < self.f_cnt {
            let deg = capped;
            return match (kind, distinct) {
                (CountKind::Edges, _) => deg,
                (_, false) => deg,
                (CountKind::Nodes, true) => {
                    let mut ns: Vec<usize> = t.list_node_edges(u).map(|(_, w)| w.0).collect();
                    ns.sort_unstable();
                    ns.dedup();
                    ns.len()
                }
                (CountKind::Faces, true) => {
                    let mut fs: Vec<usize> = t.list_node_faces(u).iter().map(|f| f.0).collect();
                    fs.sort_unstable();
                    fs.dedup();
                    fs.len()
                }
            };
        }
        let row = self
            .node_counts
            .iter()
            .find(|r| r.0 == u.0)
            .expect("heavy node present in count table");
        match (kind, distinct) {
            (CountKind::Edges, _) => row.1,
            (_, false) => row.1,
            (CountKind::Nodes, true) => row.2,
            (CountKind::Faces, true) => row.3,
        }
    }

    /// (4.b) Count entities bordering face `x` (dual of count_node).
    pub fn count_face(&self, t: &Topology<'_>, x: FaceId, kind: CountKind, distinct: bool) -> usize {
        let capped = t.face_border_capped(x, self.f_cnt);
        if capped < self.f_cnt {
            let len = capped;
            return match (kind, distinct) {
                (CountKind::Edges, _) => len,
                (_, false) => len,
                (CountKind::Faces, true) => {
                    let mut adj: Vec<usize> = t.list_face_faces(x).map(|(_, y)| y.0).collect();
                    adj.sort_unstable();
                    adj.dedup();
                    adj.len()
                }
                (CountKind::Nodes, true) => {
                    let mut ns: Vec<usize> = t.list_face_nodes(x).map(|w| w.0).collect();
                    ns.sort_unstable();
                    ns.dedup();
                    ns.len()
                }
            };
        }
        let row = self
            .face_counts
            .iter()
            .find(|r| r.0 == x.0)
            .expect("heavy face present in count table");
        match (kind, distinct) {
            (CountKind::Edges, _) => row.1,
            (_, false) => row.1,
            (CountKind::Faces, true) => row.2,
            (CountKind::Nodes, true) => row.3,
        }
    }

    pub fn bits(&self) -> usize {
        (self.node_counts.len() + self.face_counts.len()) * 4 * 64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{build_turan, parse_rotation_system};
    use crate::oracle::NaiveTopology;

    const K3: &str = "PLANAREMB 1\n3 3\n2 1 3\n2 1 2\n2 2 3\n1 2\n2 3\n1 3\nroot 1 1\n";
    const P2: &str = "PLANAREMB 1\n2 1\n1 1\n1 1\n1 2\nroot 1 1\n";

    #[test]
    fn k3_counts() {
        let rs = parse_rotation_system(K3).unwrap();
        let (idx, _) = build_turan(&rs).unwrap();
        let t = Topology::new(&idx);
        let c = CountIndex::build(&t, CountIndex::DEFAULT_F_CNT);
        assert_eq!(c.count_node(&t, NodeId(1), CountKind::Edges, false), 2);
        assert_eq!(c.count_node(&t, NodeId(1), CountKind::Nodes, true), 2);
        assert_eq!(c.count_node(&t, NodeId(1), CountKind::Faces, true), 2);
        let inc = IncidenceIndex::build(&t, 4);
        for u in 1..=3 {
            for x in 1..=2 {
                assert!(inc.node_on_face(&t, NodeId(u), FaceId(x)));
            }
        }
    }

    #[test]
    fn p2_counts() {
        let rs = parse_rotation_system(P2).unwrap();
        let (idx, _) = build_turan(&rs).unwrap();
        let t = Topology::new(&idx);
        let c = CountIndex::build(&t, CountIndex::DEFAULT_F_CNT);
        // the bridge bounds the face on both sides
        assert_eq!(c.count_face(&t, FaceId(1), CountKind::Edges, false), 2);
        assert_eq!(c.count_face(&t, FaceId(1), CountKind::Nodes, true), 2);
        let inc = IncidenceIndex::build(&t, IncidenceIndex::default_threshold(1));
        assert!(inc.node_on_face(&t, NodeId(2), FaceId(1)));
    }

    #[test]
    fn self_loop_counts() {
        // node with only a self-loop: edges -> 2, distinct nodes -> 1
        let txt = "PLANAREMB 1\n1 1\n2 1 1\n1 1\nroot 1 1\n";
        let rs = parse_rotation_system(txt).unwrap();
        let (idx, _) = build_turan(&rs).unwrap();
        let t = Topology::new(&idx);
        let c = CountIndex::build(&t, CountIndex::DEFAULT_F_CNT);
        assert_eq!(c.count_node(&t, NodeId(1), CountKind::Edges, false), 2);
        assert_eq!(c.count_node(&t, NodeId(1), CountKind::Nodes, true), 1);
    }

    #[test]
    fn heavy_paths_vs_oracle() {
        // small threshold forces every branch: light node, light face, dictionary
        let rs = crate::gen::triangulation(60, 3);
        let (idx, tabs) = build_turan(&rs).unwrap();
        let t = Topology::new(&idx);
        let naive = NaiveTopology::new(&rs);
        // face correspondence by matching distinct frontier sets is fragile;
        // instead check counts against rotation facts and incidence via the
        // listing equivalence established elsewhere. Here: dictionary branch.
        for f_inc in [1usize, 3, 6, 1000] {
            let inc = IncidenceIndex::build(&t, f_inc);
            for u in 1..=rs.n {
                let fs = t.list_node_faces(NodeId(u));
                for x in 1..=t.face_count() {
                    let want = fs.contains(&FaceId(x));
                    assert_eq!(inc.node_on_face(&t, NodeId(u), FaceId(x)), want, "f_inc={f_inc} u={u} x={x}");
                }
            }
        }
        // counting matches the oracle through the id map
        let c = CountIndex::build(&t, 8);
        for u in 1..=rs.n {
            let iu = tabs.input_of_dfs[u];
            assert_eq!(
                c.count_node(&t, NodeId(u), CountKind::Edges, false),
                naive.count_node_dup(iu)
            );
            assert_eq!(
                c.count_node(&t, NodeId(u), CountKind::Nodes, true),
                naive.count_node_distinct_nodes(iu)
            );
        }
        // handshake: duplicated edge counts sum to 2m on both sides
        let nsum: usize = (1..=rs.n)
            .map(|u| c.count_node(&t, NodeId(u), CountKind::Edges, false))
            .sum();
        assert_eq!(nsum, 2 * rs.m);
        let fsum: usize = (1..=t.face_count())
            .map(|x| c.count_face(&t, FaceId(x), CountKind::Edges, false))
            .sum();
        assert_eq!(fsum, 2 * rs.m);
    }

    #[test]
    fn heavy_pair_bound() {
        let rs = crate::gen::triangulation(400, 9);
        let (idx, _) = build_turan(&rs).unwrap();
        let t = Topology::new(&idx);
        for f_inc in [4usize, 8, 16] {
            let inc = IncidenceIndex::build(&t, f_inc);
            assert!(
                inc.pair_count() * f_inc <= 16 * rs.m,
                "pairs {} > 16m/f_inc",
                inc.pair_count()
            );
        }
    }
}

