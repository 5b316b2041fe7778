//! Rotation systems: the PLANAREMB v1 text format, validation (edge
//! multiplicity, connectivity, Euler check via face tracing), and the
//! interleaved depth-first traversal that emits the core sequence.

use crate::bits::BitSeqBuilder;
use crate::bp::BalancedSeq;
use crate::turan::TuranIndex;
use crate::{Error, Result};

/// A directed edge end: `(node, slot)` where `slot` indexes the node's
/// counter-clockwise rotation. Each edge has two darts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart {
    pub node: usize,
    pub slot: usize,
}

/// Input planar embedding: per-node ccw cyclic edge lists plus a root
/// incidence on the outer face. Node and edge ids are 1-based input ids.
#[derive(Clone, Debug)]
pub struct RotationSystem {
    pub n: usize,
    pub m: usize,
    /// rotations[v-1] = ccw list of incident edge ids (self-loops twice).
    pub rotations: Vec<Vec<usize>>,
    /// endpoints[e-1] = (u, v) as given.
    pub endpoints: Vec<(usize, usize)>,
    pub root: usize,
    /// 1-based index into the root's rotation; the traversal starts with
    /// that edge, and the corner before it is the outer face.
    pub root_start: usize,
}

impl RotationSystem {
    pub fn degree(&self, v: usize) -> usize {
        self.rotations[v - 1].len()
    }

    pub fn face_count(&self) -> usize {
        self.m + 2 - self.n
    }

    /// The dart one slot counter-clockwise of `d` at the same node.
    pub fn rot_next(&self, d: Dart) -> Dart {
        let deg = self.rotations[d.node - 1].len();
        Dart { node: d.node, slot: d.slot % deg + 1 }
    }

    /// Twin dart: the other end of the same edge.
    pub fn twin(&self, d: Dart, ends: &EdgeEnds) -> Dart {
        let e = self.rotations[d.node - 1][d.slot - 1];
        let (d0, d1) = ends.of(e);
        if d0 == d {
            d1
        } else {
            d0
        }
    }

    pub fn edge_at(&self, d: Dart) -> usize {
        self.rotations[d.node - 1][d.slot - 1]
    }

    /// Serialize back to PLANAREMB v1 text.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("PLANAREMB 1\n");
        out.push_str(&format!("{} {}\n", self.n, self.m));
        for rot in &self.rotations {
            out.push_str(&format!("{}", rot.len()));
            for e in rot {
                out.push_str(&format!(" {e}"));
            }
            out.push('\n');
        }
        for &(u, v) in &self.endpoints {
            out.push_str(&format!("{u} {v}\n"));
        }
        out.push_str(&format!("root {} {}\n", self.root, self.root_start));
        out
    }
}

/// Resolved dart pair per edge, derived from the rotations.
pub struct EdgeEnds {
    ends: Vec<(Dart, Dart)>,
}

impl EdgeEnds {
    pub fn of(&self, e: usize) -> (Dart, Dart) {
        self.ends[e - 1]
    }

    /// Build from rotations, checking every edge appears exactly twice and
    /// at its declared endpoints.
    pub fn resolve(rs: &RotationSystem) -> Result<EdgeEnds> {
        let mut seen: Vec<Vec<Dart>> = vec![Vec::new(); rs.m];
        for v in 1..=rs.n {
            for (s, &e) in rs.rotations[v - 1].iter().enumerate() {
                if e == 0 || e > rs.m {
                    return Err(Error::Validation(format!(
                        "node {v} references edge {e} outside 1..={}",
                        rs.m
                    )));
                }
                seen[e - 1].push(Dart { node: v, slot: s + 1 });
            }
        }
        let mut ends = Vec::with_capacity(rs.m);
        for e in 1..=rs.m {
            let occ = &seen[e - 1];
            if occ.len() != 2 {
                return Err(Error::Validation(format!(
                    "edge {e} appears {} times in rotations (expected 2)",
                    occ.len()
                )));
            }
            let (u, v) = rs.endpoints[e - 1];
            let (a, b) = (occ[0], occ[1]);
            let ok = (a.node == u && b.node == v) || (a.node == v && b.node == u);
            if !ok {
                return Err(Error::Validation(format!(
                    "edge {e} declared ({u},{v}) but appears at nodes {} and {}",
                    a.node, b.node
                )));
            }
            ends.push((a, b));
        }
        Ok(EdgeEnds { ends })
    }
}

/// One traced face: its boundary darts in trace order.
#[derive(Clone, Debug)]
pub struct TracedFace {
    pub darts: Vec<Dart>,
}

/// Face tracing over the rotation system: orbits of
/// `d -> rot_next(twin(d))`, partitioning the 2m darts into face cycles.
pub fn face_trace(rs: &RotationSystem, ends: &EdgeEnds) -> Vec<TracedFace> {
    let mut dart_index = vec![usize::MAX; 2 * rs.m];
    let key = |d: Dart, rs: &RotationSystem| -> usize {
        // dense dart key: edge occurrence identity
        let e = rs.edge_at(d);
        let (d0, _) = ends.of(e);
        2 * (e - 1) + usize::from(d != d0)
    };
    let mut faces = Vec::new();
    for v in 1..=rs.n {
        for s in 1..=rs.degree(v) {
            let start = Dart { node: v, slot: s };
            if dart_index[key(start, rs)] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut cycle = Vec::new();
            let mut d = start;
            loop {
                dart_index[key(d, rs)] = id;
                cycle.push(d);
                d = rs.rot_next(rs.twin(d, ends));
                if d == start {
                    break;
                }
            }
            faces.push(TracedFace { darts: cycle });
        }
    }
    faces
}

/// Face id per dart, aligned with the `face_trace` order.
pub fn face_of_darts(rs: &RotationSystem, _ends: &EdgeEnds, faces: &[TracedFace]) -> Vec<Vec<usize>> {
    let mut per_node: Vec<Vec<usize>> = (1..=rs.n).map(|v| vec![0; rs.degree(v)]).collect();
    for (id, f) in faces.iter().enumerate() {
        for d in &f.darts {
            per_node[d.node - 1][d.slot - 1] = id + 1;
        }
    }
    per_node
}

/// Parse and validate PLANAREMB v1 text.
pub fn parse_rotation_system(text: &str) -> Result<RotationSystem> {
    let mut tokens: Vec<(usize, &str)> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            tokens.push((ln + 1, tok));
        }
    }
    let mut pos = 0;
    let mut take = |what: &str| -> Result<(usize, &str)> {
        if pos >= tokens.len() {
            return Err(Error::Parse {
                line: tokens.last().map(|t| t.0).unwrap_or(0),
                msg: format!("unexpected end of input, expected {what}"),
            });
        }
        let t = tokens[pos];
        pos += 1;
        Ok(t)
    };
    let int = |t: (usize, &str), what: &str| -> Result<usize> {
        t.1.parse::<usize>().map_err(|_| Error::Parse {
            line: t.0,
            msg: format!("expected {what}, got '{}'", t.1),
        })
    };

    let magic = take("PLANAREMB")?;
    if magic.1 != "PLANAREMB" {
        return Err(Error::Parse { line: magic.0, msg: format!("bad magic '{}'", magic.1) });
    }
    let ver = take("version")?;
    if ver.1 != "1" {
        return Err(Error::Parse { line: ver.0, msg: format!("unsupported version '{}'", ver.1) });
    }
    let n = int(take("node count")?, "node count")?;
    let m = int(take("edge count")?, "edge count")?;
    if n == 0 {
        return Err(Error::Validation("graph must have at least one node".into()));
    }
    if m == 0 {
        return Err(Error::Validation("graph must have at least one edge".into()));
    }
    let mut rotations = Vec::with_capacity(n);
    for v in 1..=n {
        let deg = int(take("degree")?, &format!("degree of node {v}"))?;
        if deg == 0 {
            return Err(Error::Validation(format!("node {v} has no incident edges")));
        }
        let mut rot = Vec::with_capacity(deg);
        for _ in 0..deg {
            rot.push(int(take("edge id")?, "edge id")?);
        }
        rotations.push(rot);
    }
    let mut endpoints = Vec::with_capacity(m);
    for _ in 0..m {
        let u = int(take("endpoint")?, "endpoint")?;
        let v = int(take("endpoint")?, "endpoint")?;
        endpoints.push((u, v));
    }
    let kw = take("root")?;
    if kw.1 != "root" {
        return Err(Error::Parse { line: kw.0, msg: format!("expected 'root', got '{}'", kw.1) });
    }
    let root = int(take("root node")?, "root node")?;
    let root_start = int(take("root incidence")?, "root incidence")?;
    if pos != tokens.len() {
        return Err(Error::Parse {
            line: tokens[pos].0,
            msg: format!("trailing input '{}'", tokens[pos].1),
        });
    }

    for (e, &(u, v)) in endpoints.iter().enumerate() {
        if u == 0 || u > n || v == 0 || v > n {
            return Err(Error::Validation(format!("edge {} endpoints ({u},{v}) out of range", e + 1)));
        }
    }
    if root == 0 || root > n {
        return Err(Error::Validation(format!("root {root} out of range")));
    }
    if root_start == 0 || root_start > rotations[root - 1].len() {
        return Err(Error::Validation(format!(
            "root incidence {root_start} out of 1..={}",
            rotations[root - 1].len()
        )));
    }

    let rs = RotationSystem { n, m, rotations, endpoints, root, root_start };
    let ends = EdgeEnds::resolve(&rs)?;

    // connectivity
    let mut visited = vec![false; n + 1];
    let mut stack = vec![rs.root];
    visited[rs.root] = true;
    let mut seen = 1;
    while let Some(v) = stack.pop() {
        for &e in &rs.rotations[v - 1] {
            let (a, b) = rs.endpoints[e - 1];
            let w = if a == v { b } else { a };
            if !visited[w] {
                visited[w] = true;
                seen += 1;
                stack.push(w);
            }
        }
    }
    if seen != n {
        return Err(Error::Validation(format!("graph is disconnected ({seen} of {n} nodes reachable)")));
    }

    // Euler check: the rotation system is a planar embedding iff face
    // tracing yields exactly m - n + 2 faces
    if m + 2 < n {
        return Err(Error::Validation(format!("m = {m}, n = {n}: no planar embedding possible")));
    }
    let faces = face_trace(&rs, &ends);
    if faces.len() != rs.face_count() {
        return Err(Error::Validation(format!(
            "Euler check failed: traced {} faces, expected m - n + 2 = {}",
            faces.len(),
            rs.face_count()
        )));
    }
    Ok(rs)
}

/// Bookkeeping produced alongside the Turán sequence.
#[derive(Clone, Debug)]
pub struct TraversalTables {
    /// Input node id per DFS id (dfs ids are 1-based; index 0 unused).
    pub input_of_dfs: Vec<usize>,
    /// DFS id per input node id.
    pub dfs_of_input: Vec<usize>,
    /// For each position 3..=2m+2 of S: the dart visited there.
    pub dart_at: Vec<Dart>,
    /// For each input edge id: its two positions in S (first visit, second).
    pub edge_positions: Vec<(usize, usize)>,
}

impl TraversalTables {
    pub fn dart_at(&self, pos: usize) -> Dart {
        self.dart_at[pos - 3]
    }
}

/// Run the interleaved DFS and emit the Turán sequence split into A, B, B*.
///
/// At the root the walk starts with the `root_start` edge; at every other
/// node it starts immediately after the parent edge, processing incidences
/// counter-clockwise. First visits of tree edges write `(`, second `)`;
/// non-tree edges write `[` and `]`. The 2m symbols are enclosed by one
/// parenthesis pair (the root) and one bracket pair (the outer face),
/// nested `( [ ... ] )`.
pub fn build_turan(rs: &RotationSystem) -> Result<(TuranIndex, TraversalTables)> {
    let ends = EdgeEnds::resolve(rs)?;
    let n = rs.n;
    let m = rs.m;
    let seq_len = 2 * (m + 2);

    let mut a = BitSeqBuilder::with_capacity(seq_len);
    let mut b = BitSeqBuilder::with_capacity(2 * n);
    let mut bstar = BitSeqBuilder::with_capacity(2 * (m + 2 - n));
    let mut dart_at = Vec::with_capacity(2 * m);
    let mut edge_positions = vec![(0usize, 0usize); m];
    let mut input_of_dfs = vec![0usize; n + 1];
    let mut dfs_of_input = vec![0usize; n + 1];

    #[derive(Clone, Copy, PartialEq)]
    enum EdgeState {
        Unvisited,
        OpenTree,
        OpenBracket,
        Done,
    }
    let mut estate = vec![EdgeState::Unvisited; m + 1];
    let mut visited = vec![false; n + 1];

    // S = ( [ ... ] )
    a.push(true); // root '('
    b.push(false);
    a.push(false); // outer '['
    bstar.push(false);

    let mut next_dfs = 1usize;
    visited[rs.root] = true;
    input_of_dfs[next_dfs] = rs.root;
    dfs_of_input[rs.root] = next_dfs;
    next_dfs += 1;

    let mut pos = 2usize; // symbols written so far

    // frame: node, next slot offset, remaining slots, anchor slot
    struct Frame {
        node: usize,
        anchor: usize, // slot whose successor starts the walk; root: start-1
        step: usize,
        deg: usize,
    }
    let mut stack = Vec::with_capacity(64);
    stack.push(Frame {
        node: rs.root,
        anchor: rs.root_start + rs.degree(rs.root) - 1, // walk starts AT root_start
        step: 0,
        deg: rs.degree(rs.root),
    });

    while let Some(top) = stack.last_mut() {
        if top.step == top.deg {
            stack.pop();
            continue;
        }
        let v = top.node;
        let deg = top.deg;
        let slot = (top.anchor + top.step) % deg + 1;
        top.step += 1;
        let d = Dart { node: v, slot };
        let e = rs.edge_at(d);
        pos += 1;
        dart_at.push(d);
        match estate[e] {
            EdgeState::Unvisited => {
                let (eu, ev) = rs.endpoints[e - 1];
                let w = if eu == v { ev } else { eu };
                edge_positions[e - 1].0 = pos;
                if !visited[w] {
                    // tree edge: descend
                    estate[e] = EdgeState::OpenTree;
                    a.push(true);
                    b.push(false);
                    visited[w] = true;
                    input_of_dfs[next_dfs] = w;
                    dfs_of_input[w] = next_dfs;
                    next_dfs += 1;
                    let tw = rs.twin(d, &ends);
                    debug_assert_eq!(tw.node, w);
                    stack.push(Frame {
                        node: w,
                        anchor: tw.slot,
                        step: 0,
                        deg: rs.degree(w),
                    });
                } else {
                    estate[e] = EdgeState::OpenBracket;
                    a.push(false);
                    bstar.push(false);
                }
            }
            EdgeState::OpenTree => {
                estate[e] = EdgeState::Done;
                edge_positions[e - 1].1 = pos;
                a.push(true);
                b.push(true);
                // the parent edge closes exactly at the end of this frame
                debug_assert_eq!(top.step, top.deg, "tree edge closed mid-rotation");
                stack.pop();
            }
            EdgeState::OpenBracket => {
                estate[e] = EdgeState::Done;
                edge_positions[e - 1].1 = pos;
                a.push(false);
                bstar.push(true);
            }
            EdgeState::Done => {
                return Err(Error::Validation(format!("edge {e} visited a third time; rotations are inconsistent")));
            }
        }
    }

    a.push(false); // outer ']'
    bstar.push(true);
    a.push(true); // root ')'
    b.push(true);
    pos += 2;

    debug_assert_eq!(pos, seq_len);
    if next_dfs != n + 1 {
        return Err(Error::Validation("traversal did not reach every node".into()));
    }
    debug_assert!(estate[1..].iter().all(|s| *s == EdgeState::Done));

    let idx = TuranIndex::new(
        a.build(),
        BalancedSeq::from_bits(b.build()),
        BalancedSeq::from_bits(bstar.build()),
        n,
        m,
    );
    debug_assert!(idx.b().is_balanced());
    debug_assert!(idx.bstar().is_balanced());
    Ok((
        idx,
        TraversalTables {
            input_of_dfs,
            dfs_of_input,
            dart_at,
            edge_positions,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const P2: &str = "PLANAREMB 1\n2 1\n1 1\n1 1\n1 2\nroot 1 1\n";
    pub(crate) const K3: &str = "\
PLANAREMB 1
# triangle
3 3
2 1 3
2 1 2
2 2 3
1 2
2 3
1 3
root 1 1
";

    #[test]
    fn parse_p2() {
        let rs = parse_rotation_system(P2).unwrap();
        assert_eq!((rs.n, rs.m), (2, 1));
        let ends = EdgeEnds::resolve(&rs).unwrap();
        let faces = face_trace(&rs, &ends);
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].darts.len(), 2);
    }

    #[test]
    fn parse_k3() {
        let rs = parse_rotation_system(K3).unwrap();
        assert_eq!((rs.n, rs.m), (3, 3));
        let ends = EdgeEnds::resolve(&rs).unwrap();
        let faces = face_trace(&rs, &ends);
        assert_eq!(faces.len(), 2);
        assert!(faces.iter().all(|f| f.darts.len() == 3));
    }

    #[test]
    fn parse_errors() {
        // K5 has no planar embedding: any rotation assignment fails Euler
        let mut txt = String::from("PLANAREMB 1\n5 10\n");
        let mut eid = 0;
        let mut incidence: Vec<Vec<usize>> = vec![Vec::new(); 5];
        let mut endpoints = Vec::new();
        for u in 1..=5usize {
            for v in (u + 1)..=5 {
                eid += 1;
                incidence[u - 1].push(eid);
                incidence[v - 1].push(eid);
                endpoints.push((u, v));
            }
        }
        for rot in &incidence {
            txt.push_str(&format!("4 {} {} {} {}\n", rot[0], rot[1], rot[2], rot[3]));
        }
        for (u, v) in endpoints {
            txt.push_str(&format!("{u} {v}\n"));
        }
        txt.push_str("root 1 1\n");
        let err = parse_rotation_system(&txt).unwrap_err();
        assert!(format!("{err}").contains("Euler"), "{err}");

        // disconnected
        let txt = "PLANAREMB 1\n4 2\n2 1 1\n1 2\n1 2\n2 2 2\n1 1\n3 4\nroot 1 1\n";
        let err = parse_rotation_system(txt).unwrap_err();
        assert!(format!("{err}").contains("edge 2") || format!("{err}").contains("disconnected"), "{err}");

        // edge multiplicity violation
        let txt = "PLANAREMB 1\n2 2\n2 1 1\n2 1 1\n1 2\n1 2\nroot 1 1\n";
        let err = parse_rotation_system(txt).unwrap_err();
        assert!(format!("{err}").contains("appears"), "{err}");

        // syntax error carries a line number
        let txt = "PLANAREMB 1\n2 x\n";
        match parse_rotation_system(txt).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn p2_sequence() {
        let rs = parse_rotation_system(P2).unwrap();
        let (idx, tabs) = build_turan(&rs).unwrap();
        assert_eq!(idx.render(), "([()])");
        assert_eq!(idx.core_payload_bits(), 4 * 1 + 8);
        assert_eq!(tabs.edge_positions[0], (3, 4));
        // A = 101101 (1 = parenthesis), B = 0011, B* = 01
        let abits: Vec<bool> = (1..=6).map(|i| idx.a().get(i)).collect();
        assert_eq!(abits, [true, false, true, true, false, true]);
        let bbits: Vec<bool> = (1..=4).map(|i| idx.b().bits().get(i)).collect();
        assert_eq!(bbits, [false, false, true, true]);
        let sbits: Vec<bool> = (1..=2).map(|i| idx.bstar().bits().get(i)).collect();
        assert_eq!(sbits, [false, true]);
    }

    #[test]
    fn k3_sequence() {
        let rs = parse_rotation_system(K3).unwrap();
        let (idx, tabs) = build_turan(&rs).unwrap();
        assert_eq!(idx.render(), "([(([))]])");
        assert_eq!(idx.seq_len(), 2 * (3 + 2));
        assert_eq!(idx.core_payload_bits(), 4 * 3 + 8);
        // edge 3 = (1,3) is the non-tree edge, visited at positions 5 and 8
        assert_eq!(tabs.edge_positions[2], (5, 8));
        // dfs ids follow input ids here
        assert_eq!(tabs.dfs_of_input[1..], [1, 2, 3]);
    }

    #[test]
    fn self_loop_only() {
        // one node, one self-loop: S = ( [ [ ] ] )
        let txt = "PLANAREMB 1\n1 1\n2 1 1\n1 1\nroot 1 1\n";
        let rs = parse_rotation_system(txt).unwrap();
        assert_eq!(rs.face_count(), 2);
        let (idx, _) = build_turan(&rs).unwrap();
        assert_eq!(idx.render(), "([[]])");
    }
}

