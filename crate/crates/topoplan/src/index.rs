//! The assembled index: core sequence, both multilevel instances, the
//! incidence and count tables, optional heavy-pair matrices, and the
//! node-id sidecar. One build call produces everything the queries need;
//! the result is immutable and safe for concurrent readers.

use crate::embed::{build_turan, RotationSystem, TraversalTables};
use crate::heavy::{HeavyPairIndex, SharedAnswer};
use crate::incidence::{CountIndex, CountKind, IncidenceIndex};
use crate::levels::{build_levels, NeighborIndex, NeighborParams};
use crate::topo::{EdgePos, FaceId, NodeId, Topology};
use crate::turan::TuranIndex;
use crate::Result;

/// Whether to build the heavy-pair matrices, and with witness identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HeavyMode {
    #[default]
    Off,
    On,
    WithWitness,
}

/// All build-time parameters; serialized with the index so answers are
/// reproducible from the file alone.
#[derive(Clone, Copy, Debug)]
pub struct BuildParams {
    pub neighbor: NeighborParams,
    pub f_inc: usize,
    pub f_cnt: usize,
    pub f_hp: usize,
    pub heavy: HeavyMode,
}

impl BuildParams {
    pub fn defaults_for(m: usize) -> BuildParams {
        BuildParams {
            neighbor: NeighborParams::defaults_for(m),
            f_inc: IncidenceIndex::default_threshold(m),
            f_cnt: CountIndex::DEFAULT_F_CNT,
            f_hp: HeavyPairIndex::default_threshold(m),
            heavy: HeavyMode::Off,
        }
    }
}

/// Input node id <-> depth-first id translation, kept as a sidecar next to
/// the succinct structures (which never consult it).
#[derive(Clone, Debug)]
pub struct NodeIdMap {
    pub input_of_dfs: Vec<usize>,
    pub dfs_of_input: Vec<usize>,
}

impl NodeIdMap {
    pub fn to_dfs(&self, input: usize) -> Option<NodeId> {
        self.dfs_of_input
            .get(input)
            .copied()
            .filter(|&d| d != 0)
            .map(NodeId)
    }

    pub fn to_input(&self, dfs: NodeId) -> Option<usize> {
        self.input_of_dfs.get(dfs.0).copied().filter(|&d| d != 0)
    }
}

/// The complete queryable index.
#[derive(Clone, Debug)]
pub struct TopoIndex {
    pub turan: TuranIndex,
    pub primal_nbr: NeighborIndex,
    pub dual_nbr: NeighborIndex,
    pub incidence: IncidenceIndex,
    pub counts: CountIndex,
    pub heavy: Option<HeavyPairIndex>,
    pub params: BuildParams,
    pub node_map: NodeIdMap,
}

/// Build output: the index plus traversal bookkeeping that verification
/// uses (edge-end positions per input edge; not serialized).
pub struct BuildResult {
    pub index: TopoIndex,
    pub tables: TraversalTables,
}

impl TopoIndex {
    pub fn build(rs: &RotationSystem, params: BuildParams) -> Result<BuildResult> {
        let (turan, tables) = build_turan(rs)?;
        let primal_nbr = build_levels(turan.primal(), params.neighbor);
        let dual_nbr = build_levels(turan.dual(), params.neighbor);
        let (incidence, counts, heavy) = {
            let t = Topology::new(&turan);
            let incidence = IncidenceIndex::build(&t, params.f_inc);
            let counts = CountIndex::build(&t, params.f_cnt);
            let heavy = match params.heavy {
                HeavyMode::Off => None,
                HeavyMode::On => Some(HeavyPairIndex::build(&t, params.f_hp, false)),
                HeavyMode::WithWitness => Some(HeavyPairIndex::build(&t, params.f_hp, true)),
            };
            (incidence, counts, heavy)
        };
        let node_map = NodeIdMap {
            input_of_dfs: tables.input_of_dfs.clone(),
            dfs_of_input: tables.dfs_of_input.clone(),
        };
        Ok(BuildResult {
            index: TopoIndex {
                turan,
                primal_nbr,
                dual_nbr,
                incidence,
                counts,
                heavy,
                params,
                node_map,
            },
            tables,
        })
    }

    pub fn topology(&self) -> Topology<'_> {
        Topology::new(&self.turan)
    }

    pub fn node_count(&self) -> usize {
        self.turan.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.turan.edge_count()
    }

    pub fn face_count(&self) -> usize {
        self.turan.face_count()
    }

    /// (1.c)
    pub fn neighbor(&self, u: NodeId, v: NodeId) -> Result<bool> {
        let t = self.topology();
        t.check_node(u)?;
        t.check_node(v)?;
        Ok(self.primal_nbr.neighbor(self.turan.primal(), u.0, v.0))
    }

    pub fn connecting_edge(&self, u: NodeId, v: NodeId) -> Result<Option<EdgePos>> {
        let t = self.topology();
        t.check_node(u)?;
        t.check_node(v)?;
        Ok(self
            .primal_nbr
            .connecting_edge(self.turan.primal(), u.0, v.0)
            .map(EdgePos))
    }

    /// (1.d)
    pub fn faces_adjacent(&self, x: FaceId, y: FaceId) -> Result<bool> {
        let t = self.topology();
        t.check_face(x)?;
        t.check_face(y)?;
        Ok(self.dual_nbr.neighbor(self.turan.dual(), x.0, y.0))
    }

    pub fn separating_edge(&self, x: FaceId, y: FaceId) -> Result<Option<EdgePos>> {
        let t = self.topology();
        t.check_face(x)?;
        t.check_face(y)?;
        Ok(self
            .dual_nbr
            .connecting_edge(self.turan.dual(), x.0, y.0)
            .map(EdgePos))
    }

    /// (2.c)
    pub fn node_on_face(&self, u: NodeId, x: FaceId) -> Result<bool> {
        let t = self.topology();
        t.check_node(u)?;
        t.check_face(x)?;
        Ok(self.incidence.node_on_face(&t, u, x))
    }

    /// (4.a)
    pub fn count_node(&self, u: NodeId, kind: CountKind, distinct: bool) -> Result<usize> {
        let t = self.topology();
        t.check_node(u)?;
        Ok(self.counts.count_node(&t, u, kind, distinct))
    }

    /// (4.b)
    pub fn count_face(&self, x: FaceId, kind: CountKind, distinct: bool) -> Result<usize> {
        let t = self.topology();
        t.check_face(x)?;
        Ok(self.counts.count_face(&t, x, kind, distinct))
    }

    fn heavy_index(&self) -> Result<&HeavyPairIndex> {
        self.heavy.as_ref().ok_or_else(|| {
            crate::Error::Param("index built without --heavy-pairs; rebuild to use this query".into())
        })
    }

    /// (1.e)
    pub fn nodes_share_face(&self, u: NodeId, v: NodeId) -> Result<SharedAnswer> {
        let t = self.topology();
        t.check_node(u)?;
        t.check_node(v)?;
        Ok(self.heavy_index()?.nodes_share_face(&t, &self.incidence, u, v))
    }

    /// (1.f)
    pub fn faces_share_node(&self, x: FaceId, y: FaceId) -> Result<SharedAnswer> {
        let t = self.topology();
        t.check_face(x)?;
        t.check_face(y)?;
        Ok(self.heavy_index()?.faces_share_node(&t, &self.incidence, x, y))
    }

    pub fn nodes_share_neighbor(&self, u: NodeId, v: NodeId) -> Result<SharedAnswer> {
        let t = self.topology();
        t.check_node(u)?;
        t.check_node(v)?;
        Ok(self
            .heavy_index()?
            .nodes_share_neighbor(&self.turan, &self.primal_nbr, u, v))
    }

    pub fn faces_share_adjacent_face(&self, x: FaceId, y: FaceId) -> Result<SharedAnswer> {
        let t = self.topology();
        t.check_face(x)?;
        t.check_face(y)?;
        Ok(self
            .heavy_index()?
            .faces_share_adjacent_face(&self.turan, &self.dual_nbr, x, y))
    }

    /// Space accounting over every structure.
    pub fn space_report(&self) -> SpaceReport {
        let core_bits = self.turan.core_payload_bits();
        let dir_bits = self.turan.a().directory_bits()
            + self.turan.b().directory_bits()
            + self.turan.bstar().directory_bits();
        let primal_levels: Vec<LevelLine> = level_lines(&self.primal_nbr);
        let dual_levels: Vec<LevelLine> = level_lines(&self.dual_nbr);
        let d0 = &self.primal_nbr.survivors.first();
        let c0 = &self.primal_nbr.bracket_survivors.first();
        let sparse_plain = d0.map_or(0, |b| b.payload_bits()) + c0.map_or(0, |b| b.payload_bits());
        let sparse_entropy = d0.map_or(0.0, |b| b.entropy_bound_bits())
            + c0.map_or(0.0, |b| b.entropy_bound_bits());
        SpaceReport {
            n: self.node_count(),
            m: self.edge_count(),
            faces: self.face_count(),
            core_bits,
            core_directories_bits: dir_bits,
            primal_levels,
            dual_levels,
            primal_aux_bits: self.primal_nbr.aux_bits(),
            dual_aux_bits: self.dual_nbr.aux_bits(),
            incidence_bits: self.incidence.bits(),
            counts_bits: self.counts.bits(),
            heavy_bits: self.heavy.as_ref().map(|h| h.bits()),
            sparse_plain_bits: sparse_plain,
            sparse_entropy_bits: sparse_entropy,
        }
    }
}

/// One level's measured sizes for reporting.
#[derive(Clone, Copy, Debug)]
pub struct LevelLine {
    pub level: usize,
    pub nodes: usize,
    pub edges: usize,
    pub symbols: usize,
    pub angle_pairs: usize,
    pub bracket_pairs: usize,
}

fn level_lines(nbr: &NeighborIndex) -> Vec<LevelLine> {
    nbr.levels
        .iter()
        .enumerate()
        .map(|(i, l)| LevelLine {
            level: i + 1,
            nodes: l.stats.nodes,
            edges: l.stats.edges,
            symbols: l.stats.symbols,
            angle_pairs: l.stats.angle_pairs,
            bracket_pairs: l.stats.bracket_pairs,
        })
        .collect()
}

/// Bit accounting of every structure in the index.
#[derive(Clone, Debug)]
pub struct SpaceReport {
    pub n: usize,
    pub m: usize,
    pub faces: usize,
    pub core_bits: usize,
    pub core_directories_bits: usize,
    pub primal_levels: Vec<LevelLine>,
    pub dual_levels: Vec<LevelLine>,
    pub primal_aux_bits: usize,
    pub dual_aux_bits: usize,
    pub incidence_bits: usize,
    pub counts_bits: usize,
    pub heavy_bits: Option<usize>,
    pub sparse_plain_bits: usize,
    pub sparse_entropy_bits: f64,
}

impl SpaceReport {
    /// Render the human-readable summary the build command prints.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("n: {}\nm: {}\nfaces: {}\n", self.n, self.m, self.faces));
        out.push_str(&format!("core payload: 4m+8 bits = {}\n", self.core_bits));
        out.push_str(&format!("core rank/select directories: {} bits\n", self.core_directories_bits));
        for (name, lines) in [("primal", &self.primal_levels), ("dual", &self.dual_levels)] {
            for l in lines.iter() {
                out.push_str(&format!(
                    "{} level {}: n_i={} m_i={} symbols={} brackets={} angles={}\n",
                    name, l.level, l.nodes, l.edges, l.symbols, l.bracket_pairs, l.angle_pairs
                ));
            }
        }
        out.push_str(&format!(
            "neighbor structures: primal {} bits, dual {} bits\n",
            self.primal_aux_bits, self.dual_aux_bits
        ));
        out.push_str(&format!(
            "incidence dictionary: {} bits\ncount tables: {} bits\n",
            self.incidence_bits, self.counts_bits
        ));
        if let Some(h) = self.heavy_bits {
            out.push_str(&format!("heavy-pair matrices: {h} bits\n"));
        }
        out.push_str(&format!(
            "D0/C0 plain: {} bits (entropy bound {:.0} bits)\n",
            self.sparse_plain_bits, self.sparse_entropy_bits
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::parse_rotation_system;

    #[test]
    fn build_and_query_k3() {
        let rs = parse_rotation_system(
            "PLANAREMB 1\n3 3\n2 1 3\n2 1 2\n2 2 3\n1 2\n2 3\n1 3\nroot 1 1\n",
        )
        .unwrap();
        let params = BuildParams::defaults_for(rs.m);
        let built = TopoIndex::build(&rs, params).unwrap();
        let idx = &built.index;
        assert!(idx.neighbor(NodeId(1), NodeId(3)).unwrap());
        assert!(!idx.neighbor(NodeId(1), NodeId(1)).unwrap());
        assert!(idx.faces_adjacent(FaceId(1), FaceId(2)).unwrap());
        assert!(idx.node_on_face(NodeId(2), FaceId(2)).unwrap());
        assert_eq!(idx.count_node(NodeId(1), CountKind::Edges, false).unwrap(), 2);
        assert!(idx.neighbor(NodeId(0), NodeId(1)).is_err());
        assert!(idx.nodes_share_face(NodeId(1), NodeId(2)).is_err()); // heavy off
        let rep = idx.space_report();
        assert_eq!(rep.core_bits, 20);
        assert!(rep.render().contains("core payload: 4m+8 bits = 20"));
    }

    #[test]
    fn id_map_roundtrip() {
        let rs = crate::gen::triangulation(50, 1);
        let built = TopoIndex::build(&rs, BuildParams::defaults_for(rs.m)).unwrap();
        let map = &built.index.node_map;
        for input in 1..=rs.n {
            let d = map.to_dfs(input).unwrap();
            assert_eq!(map.to_input(d), Some(input));
        }
        assert_eq!(map.to_dfs(0), None);
        assert_eq!(map.to_dfs(rs.n + 1), None);
    }
}

