//! The contraction hierarchy behind `neighbor(u,v)` / `faces_adjacent(x,y)`.
//!
//! Level 0 is the core sequence read through a [`SeqView`] (primal for
//! nodes, dual for faces). Each round marks the nodes with at least `f`
//! incident edge ends, removes the rest, replaces removed parenthesis
//! pairs by angle pairs (normalized by the three rewrite rules), drops
//! brackets with a dead endpoint, and collapses multi-edges to one
//! representative (keeping at most one self-loop per node). Survivor
//! bitvectors `D_i` map node ids upward, `C_i` map bracket ranks downward
//! for edge retrieval. After `k` rounds the remaining graph's bracket
//! adjacencies live in a constant-expected-time static dictionary.

use crate::bits::{BitSeq, BitSeqBuilder};
use crate::bp::BalancedSeq;
use crate::ternary::{Sym, TernarySeq};
use crate::turan::SeqView;
use crate::{Error, Result};

/// Level threshold and level count; `f >= 9` is required by the size
/// analysis of the contraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NeighborParams {
    pub f: usize,
    pub k: usize,
}

impl NeighborParams {
    pub fn new(f: usize, k: usize) -> Result<Self> {
        if f < 9 {
            return Err(Error::Param(format!("level threshold f = {f} must be >= 9")));
        }
        if k < 1 {
            return Err(Error::Param("level count k must be >= 1".into()));
        }
        Ok(NeighborParams { f, k })
    }

    /// f = k = max(9, ceil(1.5 * loglog m / logloglog m)), guarded for
    /// small m where the expression is ill-conditioned.
    pub fn defaults_for(m: usize) -> Self {
        let v = if m < (1 << 16) {
            9
        } else {
            let ll = (m as f64).log2().log2();
            let lll = ll.log2();
            if lll.is_finite() && lll > 0.0 {
                ((1.5 * ll / lll).ceil() as usize).max(9)
            } else {
                9
            }
        };
        NeighborParams { f: v, k: v }
    }
}

/// One contraction level i >= 1: the ternary sequence plus the three
/// projected balanced sequences.
#[derive(Clone, Debug)]
pub struct LevelStructure {
    pub seq: TernarySeq,
    pub parens: BalancedSeq,
    pub brackets: BalancedSeq,
    pub angles: BalancedSeq,
    pub stats: LevelStats,
}

/// Measured sizes per level, for the space laws and the stats report.
#[derive(Clone, Copy, Debug, Default)]
pub struct LevelStats {
    pub nodes: usize,
    pub edges: usize,
    pub symbols: usize,
    pub bracket_pairs: usize,
    pub angle_pairs: usize,
}

impl LevelStructure {
    /// Symbol and open/close at a position.
    fn sym_at(&self, p: usize) -> (Sym, bool) {
        let s = self.seq.get(p);
        let r = match s {
            Sym::Bracket => self.seq.rank(Sym::Bracket, p),
            Sym::Paren => self.seq.rank(Sym::Paren, p),
            Sym::Angle => self.seq.rank(Sym::Angle, p),
        };
        let open = match s {
            Sym::Bracket => self.brackets.is_open(r),
            Sym::Paren => self.parens.is_open(r),
            Sym::Angle => self.angles.is_open(r),
        };
        (s, open)
    }

    /// Other occurrence of the pair at `p`.
    fn mate(&self, p: usize) -> usize {
        let s = self.seq.get(p);
        let (bv, r) = match s {
            Sym::Bracket => (&self.brackets, self.seq.rank(Sym::Bracket, p)),
            Sym::Paren => (&self.parens, self.seq.rank(Sym::Paren, p)),
            Sym::Angle => (&self.angles, self.seq.rank(Sym::Angle, p)),
        };
        let j = if bv.is_open(r) { bv.close(r) } else { bv.open(r) };
        self.seq.select(s, j)
    }

    /// Owner node of the bracket at `p` (angles are transparent: the
    /// tightest enclosing parenthesis pair).
    fn node_of_bracket(&self, p: usize) -> usize {
        let pr = self.seq.rank(Sym::Paren, p);
        debug_assert!(pr > 0, "bracket before any paren at level >= 1");
        if self.parens.is_open(pr) {
            self.parens.rank_open(pr)
        } else {
            let o = self.parens.open(pr);
            self.parens
                .rank_open(self.parens.enclose(o).expect("bracket outside all node regions"))
        }
    }

    /// Scan node `u`'s region for a bracket whose far endpoint is `target`;
    /// returns the position of the matching bracket end if found. Skips
    /// child subtrees and angle groups in O(1) each.
    fn scan(&self, u: usize, target: usize) -> Option<usize> {
        let mut p = self.seq.select(Sym::Paren, self.parens.select_open(u)) + 1;
        loop {
            let (s, open) = self.sym_at(p);
            match s {
                Sym::Paren => {
                    if open {
                        p = self.mate(p) + 1;
                    } else {
                        return None; // u's own close
                    }
                }
                Sym::Angle => {
                    debug_assert!(open, "angle close reached at top level");
                    p = self.mate(p) + 1;
                }
                Sym::Bracket => {
                    let j = self.mate(p);
                    if self.node_of_bracket(j) == target {
                        return Some(p);
                    }
                    p += 1;
                }
            }
        }
    }

    /// Opening-bracket rank (enclosure = 1) of the bracket at `p`.
    fn bracket_rank_of(&self, p: usize) -> usize {
        let r = self.seq.rank(Sym::Bracket, p);
        let o = if self.brackets.is_open(r) { r } else { self.brackets.open(r) };
        self.brackets.rank_open(o)
    }

    /// Structural re-check of the three angle rewrite rules plus the level
    /// invariants; the acceptance suite runs this over every built level.
    pub fn lint(&self) -> Result<()> {
        enum Fr {
            Angle { items: usize, has_nonangle: bool },
            Paren,
        }
        let len = self.seq.len();
        let mut prev_angle_close = false;
        let mut frames: Vec<Fr> = Vec::new();
        let mut counted_angles = 0usize;
        if len < 2 || self.seq.get_quiet(1) != Sym::Bracket || self.seq.get_quiet(len) != Sym::Bracket {
            return Err(Error::Validation("level sequence missing its enclosure".into()));
        }
        for p in 1..=len {
            let (s, open) = self.sym_at(p);
            match (s, open) {
                (Sym::Angle, true) => {
                    if prev_angle_close {
                        return Err(Error::Validation(format!(
                            "rule 1 violated: adjacent angle pairs at position {p}"
                        )));
                    }
                    if let Some(Fr::Angle { items, .. }) = frames.last_mut() {
                        *items += 1;
                    }
                    frames.push(Fr::Angle { items: 0, has_nonangle: false });
                    counted_angles += 1;
                }
                (Sym::Angle, false) => match frames.pop() {
                    Some(Fr::Angle { items, has_nonangle }) => {
                        if items == 0 {
                            return Err(Error::Validation(format!("rule 3 violated: empty angle at {p}")));
                        }
                        if !has_nonangle {
                            return Err(Error::Validation(format!(
                                "rule 2/1 violated: angle at {p} contains only angles"
                            )));
                        }
                    }
                    _ => return Err(Error::Validation(format!("unbalanced angle close at {p}"))),
                },
                (Sym::Paren, true) => {
                    if let Some(Fr::Angle { items, has_nonangle }) = frames.last_mut() {
                        *items += 1;
                        *has_nonangle = true;
                    }
                    frames.push(Fr::Paren);
                }
                (Sym::Paren, false) => match frames.pop() {
                    Some(Fr::Paren) => {}
                    _ => return Err(Error::Validation(format!("unbalanced paren close at {p}"))),
                },
                (Sym::Bracket, _) => {
                    if matches!(frames.last(), Some(Fr::Angle { .. })) {
                        return Err(Error::Validation(format!(
                            "bracket at angle top level at position {p}"
                        )));
                    }
                }
            }
            prev_angle_close = s == Sym::Angle && !open;
        }
        if !frames.is_empty() {
            return Err(Error::Validation("unbalanced level sequence".into()));
        }
        if counted_angles != self.stats.angle_pairs {
            return Err(Error::Validation("angle pair count mismatch".into()));
        }
        if self.stats.angle_pairs > self.stats.nodes {
            return Err(Error::Validation(format!(
                "angle pairs {} exceed surviving nodes {}",
                self.stats.angle_pairs, self.stats.nodes
            )));
        }
        if !self.parens.is_balanced() || !self.brackets.is_balanced() || !self.angles.is_balanced() {
            return Err(Error::Validation("projected sequences unbalanced".into()));
        }
        Ok(())
    }

    pub fn payload_bits(&self) -> usize {
        self.seq.payload_bits()
            + self.parens.payload_bits()
            + self.brackets.payload_bits()
            + self.angles.payload_bits()
    }

    pub fn directory_bits(&self) -> usize {
        self.seq.directory_bits()
            + self.parens.directory_bits()
            + self.brackets.directory_bits()
            + self.angles.directory_bits()
    }
}

/// Adjacency dictionary of the last-level graph: normalized node pairs to
/// a representative bracket rank, open addressing with constant expected
/// probes.
#[derive(Clone, Debug, Default)]
pub struct ExplicitTop {
    mask: u64,
    keys: Vec<u64>,
    vals: Vec<u64>,
    pub entries: usize,
}

const EMPTY_KEY: u64 = u64::MAX;

impl ExplicitTop {
    pub fn build(pairs: &[(usize, usize, usize)]) -> ExplicitTop {
        if pairs.is_empty() {
            return ExplicitTop::default();
        }
        let cap = (pairs.len() * 2).next_power_of_two().max(8);
        let mut keys = vec![EMPTY_KEY; cap];
        let mut vals = vec![0u64; cap];
        let mask = (cap - 1) as u64;
        for &(u, v, b) in pairs {
            let key = Self::key(u, v);
            let mut slot = (Self::mix(key) & mask) as usize;
            loop {
                if keys[slot] == EMPTY_KEY {
                    keys[slot] = key;
                    vals[slot] = b as u64;
                    break;
                }
                debug_assert_ne!(keys[slot], key, "duplicate pair in top dictionary");
                slot = (slot + 1) & mask as usize;
            }
        }
        ExplicitTop { mask, keys, vals, entries: pairs.len() }
    }

    fn key(u: usize, v: usize) -> u64 {
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        ((a as u64) << 32) | b as u64
    }

    fn mix(k: u64) -> u64 {
        k.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 17
    }

    pub fn lookup(&self, u: usize, v: usize) -> Option<usize> {
        if self.keys.is_empty() {
            return None;
        }
        let key = Self::key(u, v);
        let mut slot = (Self::mix(key) & self.mask) as usize;
        loop {
            if self.keys[slot] == EMPTY_KEY {
                return None;
            }
            if self.keys[slot] == key {
                return Some(self.vals[slot] as usize);
            }
            slot = (slot + 1) & self.mask as usize;
        }
    }

    pub fn bits(&self) -> usize {
        (self.keys.len() + self.vals.len()) * 64
    }

    pub(crate) fn raw(&self) -> (u64, &[u64], &[u64], usize) {
        (self.mask, &self.keys, &self.vals, self.entries)
    }

    pub(crate) fn from_raw(mask: u64, keys: Vec<u64>, vals: Vec<u64>, entries: usize) -> Self {
        ExplicitTop { mask, keys, vals, entries }
    }
}

// ---------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------

/// Stream symbol of a level being contracted.
#[derive(Clone, Copy, Debug)]
enum LSym {
    POpen,
    PClose,
    /// payload: bracket pair index in open order
    BOpen(u32),
    BClose(u32),
    AOpen,
    AClose,
}

#[derive(Clone, Copy, PartialEq)]
enum EdgeKind {
    Tree,
    Bracket,
}

/// Everything one contraction round needs to know about a level.
struct LevelSpec {
    node_count: usize,
    syms: Vec<LSym>,
    /// endpoints of bracket pair b (node ids of this level).
    bracket_ends: Vec<(usize, usize)>,
    /// (parent, child) pairs in direct nesting (no intervening angle).
    tree_edges: Vec<(usize, usize)>,
}

impl LevelSpec {
    fn edge_count(&self) -> usize {
        self.tree_edges.len() + self.bracket_ends.len()
    }

    /// Edge-end degrees (self-loops twice).
    fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.node_count + 1];
        for &(u, v) in &self.tree_edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        for &(u, v) in &self.bracket_ends {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }
}

/// Extract the level-0 spec from a sequence view: the root's pair wrapped
/// around the 2m interior symbols (the view's bracket enclosure is left
/// out; the next level gets a fresh one).
fn extract_base(view: SeqView<'_>) -> LevelSpec {
    let len = view.seq_len();
    let mut syms = Vec::with_capacity(len - 2);
    let mut bracket_ends = Vec::new();
    let mut tree_edges = Vec::new();
    let mut paren_stack: Vec<usize> = Vec::new();
    let mut bracket_stack: Vec<u32> = Vec::new();
    let mut nodes = 0usize;

    let handle_paren_open = |syms: &mut Vec<LSym>, paren_stack: &mut Vec<usize>, nodes: &mut usize, tree_edges: &mut Vec<(usize, usize)>| {
        *nodes += 1;
        if let Some(&parent) = paren_stack.last() {
            tree_edges.push((parent, *nodes));
        }
        paren_stack.push(*nodes);
        syms.push(LSym::POpen);
    };

    handle_paren_open(&mut syms, &mut paren_stack, &mut nodes, &mut tree_edges);
    for pos in 3..=(len - 2) {
        if view.is_paren(pos) {
            if view.paren_bv().is_open(view.paren_rank(pos)) {
                handle_paren_open(&mut syms, &mut paren_stack, &mut nodes, &mut tree_edges);
            } else {
                paren_stack.pop();
                syms.push(LSym::PClose);
            }
        } else if view.bracket_bv().is_open(view.bracket_rank(pos)) {
            let b = bracket_ends.len() as u32;
            bracket_ends.push((*paren_stack.last().expect("bracket outside root"), 0));
            bracket_stack.push(b);
            syms.push(LSym::BOpen(b));
        } else {
            let b = bracket_stack.pop().expect("unbalanced brackets");
            bracket_ends[b as usize].1 = *paren_stack.last().expect("bracket outside root");
            syms.push(LSym::BClose(b));
        }
    }
    paren_stack.pop();
    syms.push(LSym::PClose);
    debug_assert!(paren_stack.is_empty() && bracket_stack.is_empty());
    debug_assert_eq!(nodes, view.node_count());
    LevelSpec {
        node_count: nodes,
        syms,
        bracket_ends,
        tree_edges,
    }
}

/// Normalized angle-group tree built during projection.
enum OutItem {
    Sym(LSym),
    Group(Vec<OutItem>),
}

/// Result of one contraction round.
struct Round {
    d: BitSeq,
    c: BitSeq,
    /// next-level structure + spec, when a sequence is materialized
    level: Option<(LevelStructure, LevelSpec)>,
    /// next-level graph: kept edges as (u', v', kind, new bracket rank)
    next_edges: Vec<(usize, usize, EdgeKind, usize)>,
    next_nodes: usize,
}

fn contract(spec: &LevelSpec, f: usize, build_seq: bool) -> Round {
    let deg = spec.degrees();
    let mut d = BitSeqBuilder::with_capacity(spec.node_count);
    let mut new_id = vec![0usize; spec.node_count + 1];
    let mut next_nodes = 0usize;
    for u in 1..=spec.node_count {
        let alive = deg[u] >= f;
        d.push(alive);
        if alive {
            next_nodes += 1;
            new_id[u] = next_nodes;
        }
    }
    let alive = |u: usize| new_id[u] != 0;

    // surviving tree adjacencies, for parallel-bracket suppression
    let mut tree_pairs: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    let mut next_edges: Vec<(usize, usize, EdgeKind, usize)> = Vec::new();
    for &(u, v) in &spec.tree_edges {
        if alive(u) && alive(v) {
            let (a, b) = norm(new_id[u], new_id[v]);
            tree_pairs.insert((a, b));
            next_edges.push((a, b, EdgeKind::Tree, 0));
        }
    }
    // bracket representatives: lowest open index per surviving pair, unless
    // a tree adjacency already covers it; at most one self-loop per node
    let mut rep_of_pair: std::collections::HashMap<(usize, usize), usize> = std::collections::HashMap::new();
    let mut keep = vec![false; spec.bracket_ends.len()];
    for (b, &(u, v)) in spec.bracket_ends.iter().enumerate() {
        if !(alive(u) && alive(v)) {
            continue;
        }
        let pair = norm(new_id[u], new_id[v]);
        if pair.0 != pair.1 && tree_pairs.contains(&pair) {
            continue;
        }
        rep_of_pair.entry(pair).or_insert(b); // first = lowest open position
    }
    for (&pair, &b) in &rep_of_pair {
        keep[b] = true;
        next_edges.push((pair.0, pair.1, EdgeKind::Bracket, 0));
    }

    // C over bracket ranks: enclosure (rank 1) always survives; kept
    // brackets get new ranks 2.. in open order
    let mut c = BitSeqBuilder::with_capacity(spec.bracket_ends.len() + 1);
    c.push(true);
    let mut new_rank = vec![0usize; spec.bracket_ends.len()];
    let mut rank_counter = 1usize;
    for b in 0..spec.bracket_ends.len() {
        c.push(keep[b]);
        if keep[b] {
            rank_counter += 1;
            new_rank[b] = rank_counter;
        }
    }
    for e in next_edges.iter_mut() {
        if e.2 == EdgeKind::Bracket {
            let b = rep_of_pair[&(e.0, e.1)];
            e.3 = new_rank[b];
        }
    }

    let level = if build_seq && next_nodes > 0 {
        Some(project(spec, &new_id, &keep, &new_rank, next_nodes, &next_edges))
    } else {
        None
    };

    Round {
        d: d.build(),
        c: c.build(),
        level,
        next_edges,
        next_nodes,
    }
}

fn norm(u: usize, v: usize) -> (usize, usize) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Project the stream onto the survivors, normalizing angles bottom-up:
/// adjacent sibling groups merge (rule 1), a group whose sole content is a
/// group collapses (rule 2), empty groups disappear (rule 3).
fn project(
    spec: &LevelSpec,
    new_id: &[usize],
    keep: &[bool],
    new_rank: &[usize],
    next_nodes: usize,
    next_edges: &[(usize, usize, EdgeKind, usize)],
) -> (LevelStructure, LevelSpec) {
    let mut frames: Vec<Vec<OutItem>> = vec![Vec::new()];
    let mut paren_counter = 0usize;
    // stack entries: true = surviving paren (emitted), false = angle frame
    let mut stack: Vec<bool> = Vec::new();

    fn append_group(frame: &mut Vec<OutItem>, group: Vec<OutItem>) {
        if group.is_empty() {
            return; // rule 3
        }
        if let Some(OutItem::Group(prev)) = frame.last_mut() {
            prev.extend(group); // rule 1
            return;
        }
        frame.push(OutItem::Group(group));
    }

    for &s in &spec.syms {
        match s {
            LSym::POpen => {
                paren_counter += 1;
                let survives = new_id[paren_counter] != 0;
                stack.push(survives);
                if survives {
                    frames.last_mut().unwrap().push(OutItem::Sym(LSym::POpen));
                } else {
                    frames.push(Vec::new());
                }
            }
            LSym::PClose => {
                if stack.pop().expect("paren underflow") {
                    frames.last_mut().unwrap().push(OutItem::Sym(LSym::PClose));
                } else {
                    let mut content = frames.pop().expect("frame underflow");
                    // rule 2: unwrap single-group content
                    while content.len() == 1 && matches!(content[0], OutItem::Group(_)) {
                        let OutItem::Group(inner) = content.pop().unwrap() else { unreachable!() };
                        content = inner;
                    }
                    append_group(frames.last_mut().unwrap(), content);
                }
            }
            LSym::AOpen => {
                frames.push(Vec::new());
            }
            LSym::AClose => {
                let mut content = frames.pop().expect("frame underflow");
                while content.len() == 1 && matches!(content[0], OutItem::Group(_)) {
                    let OutItem::Group(inner) = content.pop().unwrap() else { unreachable!() };
                    content = inner;
                }
                append_group(frames.last_mut().unwrap(), content);
            }
            LSym::BOpen(b) => {
                if keep[b as usize] {
                    frames.last_mut().unwrap().push(OutItem::Sym(LSym::BOpen(b)));
                }
            }
            LSym::BClose(b) => {
                if keep[b as usize] {
                    frames.last_mut().unwrap().push(OutItem::Sym(LSym::BClose(b)));
                }
            }
        }
    }
    debug_assert_eq!(frames.len(), 1);
    let tree = frames.pop().unwrap();

    // serialize: enclosure brackets around the projected content
    let mut syms: Vec<Sym> = Vec::new();
    let mut popen = BitSeqBuilder::new();
    let mut bopen = BitSeqBuilder::new();
    let mut aopen = BitSeqBuilder::new();
    let mut out_stream: Vec<LSym> = Vec::new();
    let mut bracket_pairs = 1usize; // enclosure
    let mut angle_pairs = 0usize;

    syms.push(Sym::Bracket);
    bopen.push(false);

    fn emit(
        items: &[OutItem],
        syms: &mut Vec<Sym>,
        popen: &mut BitSeqBuilder,
        bopen: &mut BitSeqBuilder,
        aopen: &mut BitSeqBuilder,
        out_stream: &mut Vec<LSym>,
        bracket_pairs: &mut usize,
        angle_pairs: &mut usize,
        new_rank: &[usize],
    ) {
        for it in items {
            match it {
                OutItem::Sym(s) => {
                    out_stream.push(*s);
                    match s {
                        LSym::POpen => {
                            syms.push(Sym::Paren);
                            popen.push(false);
                        }
                        LSym::PClose => {
                            syms.push(Sym::Paren);
                            popen.push(true);
                        }
                        LSym::BOpen(b) => {
                            debug_assert!(new_rank[*b as usize] >= 2);
                            syms.push(Sym::Bracket);
                            bopen.push(false);
                            *bracket_pairs += 1;
                        }
                        LSym::BClose(_) => {
                            syms.push(Sym::Bracket);
                            bopen.push(true);
                        }
                        LSym::AOpen | LSym::AClose => unreachable!("angles are groups here"),
                    }
                }
                OutItem::Group(g) => {
                    *angle_pairs += 1;
                    syms.push(Sym::Angle);
                    aopen.push(false);
                    out_stream.push(LSym::AOpen);
                    emit(g, syms, popen, bopen, aopen, out_stream, bracket_pairs, angle_pairs, new_rank);
                    syms.push(Sym::Angle);
                    aopen.push(true);
                    out_stream.push(LSym::AClose);
                }
            }
        }
    }
    emit(
        &tree,
        &mut syms,
        &mut popen,
        &mut bopen,
        &mut aopen,
        &mut out_stream,
        &mut bracket_pairs,
        &mut angle_pairs,
        new_rank,
    );
    syms.push(Sym::Bracket);
    bopen.push(true);

    // rebuild the spec for the next round from the serialized stream
    let next_spec = spec_from_stream(next_nodes, out_stream);
    debug_assert_eq!(next_spec.node_count, next_nodes);
    if cfg!(debug_assertions) {
        // the stream's edges must agree with the contraction's bookkeeping
        let mut expect_tree: Vec<(usize, usize)> = next_edges
            .iter()
            .filter(|e| e.2 == EdgeKind::Tree)
            .map(|e| (e.0, e.1))
            .collect();
        let mut got_tree: Vec<(usize, usize)> = next_spec.tree_edges.iter().map(|&(u, v)| norm(u, v)).collect();
        expect_tree.sort_unstable();
        got_tree.sort_unstable();
        debug_assert_eq!(expect_tree, got_tree, "tree adjacencies diverge from nesting");
        let mut expect_br: Vec<(usize, usize)> = next_edges
            .iter()
            .filter(|e| e.2 == EdgeKind::Bracket)
            .map(|e| (e.0, e.1))
            .collect();
        let mut got_br: Vec<(usize, usize)> = next_spec.bracket_ends.iter().map(|&(u, v)| norm(u, v)).collect();
        expect_br.sort_unstable();
        got_br.sort_unstable();
        debug_assert_eq!(expect_br, got_br, "bracket edges diverge from stream");
    }

    let edges = next_edges.len();
    let stats = LevelStats {
        nodes: next_nodes,
        edges,
        symbols: syms.len(),
        bracket_pairs,
        angle_pairs,
    };
    let level = LevelStructure {
        seq: TernarySeq::from_syms(&syms),
        parens: BalancedSeq::from_bits(popen.build()),
        brackets: BalancedSeq::from_bits(bopen.build()),
        angles: BalancedSeq::from_bits(aopen.build()),
        stats,
    };
    (level, next_spec)
}

/// Walk a serialized stream, recovering node ids, tree adjacencies (direct
/// nesting without an intervening angle) and bracket endpoints.
fn spec_from_stream(node_count: usize, syms: Vec<LSym>) -> LevelSpec {
    #[derive(Clone, Copy)]
    enum Fr {
        Paren(usize),
        Angle,
    }
    let mut nodes = 0usize;
    let mut tree_edges = Vec::new();
    let mut bracket_ends: Vec<(usize, usize)> = Vec::new();
    let mut combined: Vec<Fr> = Vec::new();
    let mut owners: Vec<usize> = Vec::new();
    let mut bstack: Vec<u32> = Vec::new();
    let mut renumber: Vec<u32> = Vec::new();
    let mut out = Vec::with_capacity(syms.len());
    for s in syms {
        match s {
            LSym::POpen => {
                nodes += 1;
                if let Some(Fr::Paren(parent)) = combined.last() {
                    tree_edges.push((*parent, nodes));
                }
                combined.push(Fr::Paren(nodes));
                owners.push(nodes);
                out.push(LSym::POpen);
            }
            LSym::PClose => {
                combined.pop();
                owners.pop();
                out.push(LSym::PClose);
            }
            LSym::AOpen => {
                combined.push(Fr::Angle);
                out.push(LSym::AOpen);
            }
            LSym::AClose => {
                combined.pop();
                out.push(LSym::AClose);
            }
            LSym::BOpen(_) => {
                let b = bracket_ends.len() as u32;
                bracket_ends.push((*owners.last().expect("bracket at top level"), 0));
                bstack.push(b);
                renumber.push(b);
                out.push(LSym::BOpen(b));
            }
            LSym::BClose(_) => {
                let b = bstack.pop().expect("unbalanced stream brackets");
                bracket_ends[b as usize].1 = *owners.last().expect("bracket at top level");
                out.push(LSym::BClose(b));
            }
        }
    }
    debug_assert_eq!(nodes, node_count);
    LevelSpec {
        node_count,
        syms: out,
        bracket_ends,
        tree_edges,
    }
}

// ---------------------------------------------------------------------
// the assembled instance
// ---------------------------------------------------------------------

/// The multilevel structure for one reading of the sequence.
#[derive(Clone, Debug)]
pub struct NeighborIndex {
    pub levels: Vec<LevelStructure>,
    pub survivors: Vec<BitSeq>,
    pub bracket_survivors: Vec<BitSeq>,
    pub top: ExplicitTop,
    pub params: NeighborParams,
    /// Stats per built level (index 0 = level 1).
    pub base_edges: usize,
}

/// Build the hierarchy over one view. The chain truncates early when a
/// level runs out of survivors; queries then terminate at the last level.
pub fn build_levels(view: SeqView<'_>, params: NeighborParams) -> NeighborIndex {
    let mut spec = extract_base(view);
    let base_edges = spec.edge_count();
    let mut levels = Vec::new();
    let mut survivors = Vec::new();
    let mut bracket_survivors = Vec::new();
    let mut top = ExplicitTop::default();
    for i in 0..params.k {
        let build_seq = i + 1 < params.k;
        let round = contract(&spec, params.f, build_seq);
        survivors.push(round.d);
        bracket_survivors.push(round.c);
        if round.next_nodes == 0 {
            break; // empty graph: dictionary stays empty
        }
        if i + 1 == params.k {
            let pairs: Vec<(usize, usize, usize)> = round
                .next_edges
                .iter()
                .filter(|e| e.2 == EdgeKind::Bracket)
                .map(|e| (e.0, e.1, e.3))
                .collect();
            top = ExplicitTop::build(&pairs);
            break;
        }
        let (level, next_spec) = round.level.expect("sequence built for intermediate level");
        levels.push(level);
        spec = next_spec;
    }
    NeighborIndex {
        levels,
        survivors,
        bracket_survivors,
        top,
        params,
        base_edges,
    }
}

/// Where a connecting edge was found.
enum Hit {
    /// tree edge of the base view: child node id
    Tree(usize),
    /// bracket rank at some level
    Bracket { level: usize, rank: usize },
    None,
}

impl NeighborIndex {
    /// (1.c)/(1.d): are view-nodes `u` and `v` connected by an edge?
    /// `u == v` asks for a self-loop.
    pub fn neighbor(&self, view: SeqView<'_>, u: usize, v: usize) -> bool {
        !matches!(self.search(view, u, v), Hit::None)
    }

    /// Canonical sequence position of some connecting edge, if any.
    pub fn connecting_edge(&self, view: SeqView<'_>, u: usize, v: usize) -> Option<usize> {
        match self.search(view, u, v) {
            Hit::None => None,
            Hit::Tree(child) => Some(view.open_pos(child)),
            Hit::Bracket { level, rank } => {
                let mut r = rank;
                for j in (0..level).rev() {
                    r = self.bracket_survivors[j].select1(r);
                }
                Some(view.select_bracket(view.bracket_bv().select_open(r)))
            }
        }
    }

    fn search(&self, view: SeqView<'_>, u: usize, v: usize) -> Hit {
        // step 0: spanning-tree adjacency via enclose
        if u != v {
            if view.parent(u) == Some(v) {
                return Hit::Tree(u);
            }
            if view.parent(v) == Some(u) {
                return Hit::Tree(v);
            }
        }
        let t = self.survivors.len();
        let (mut ui, mut vi) = (u, v);
        for i in 0..=t {
            if i == t {
                if let Some(rank) = self.top.lookup(ui, vi) {
                    return Hit::Bracket { level: t, rank };
                }
                return Hit::None;
            }
            let d = &self.survivors[i];
            let (scan_from, scan_for) = if !d.get(ui) {
                (ui, vi)
            } else if !d.get(vi) {
                (vi, ui)
            } else {
                ui = d.rank1(ui);
                vi = d.rank1(vi);
                continue;
            };
            return match self.scan_level(view, i, scan_from, scan_for) {
                Some(pos) => Hit::Bracket {
                    level: i,
                    rank: self.bracket_rank_at(view, i, pos),
                },
                None => Hit::None,
            };
        }
        unreachable!()
    }

    /// Scan `a`'s region at level `i` for a bracket to `b`.
    fn scan_level(&self, view: SeqView<'_>, i: usize, a: usize, b: usize) -> Option<usize> {
        if i == 0 {
            for p in view.rotation(a) {
                if !view.is_paren(p) && view.node_of(view.mate(p)) == b {
                    return Some(p);
                }
            }
            None
        } else {
            self.levels[i - 1].scan(a, b)
        }
    }

    fn bracket_rank_at(&self, view: SeqView<'_>, i: usize, pos: usize) -> usize {
        if i == 0 {
            let r = view.bracket_rank(pos);
            let bv = view.bracket_bv();
            let o = if bv.is_open(r) { r } else { bv.open(r) };
            bv.rank_open(o)
        } else {
            self.levels[i - 1].bracket_rank_of(pos)
        }
    }

    /// Level-law checks of the built chain (sizes per the contraction
    /// analysis); returns measured (n_i, m_i, |S_i|) triples for levels >= 1.
    pub fn level_law_report(&self) -> Vec<LevelStats> {
        self.levels.iter().map(|l| l.stats).collect()
    }

    pub fn aux_bits(&self) -> usize {
        let mut bits = 0;
        for l in &self.levels {
            bits += l.payload_bits() + l.directory_bits();
        }
        for d in &self.survivors {
            bits += d.payload_bits() + d.directory_bits();
        }
        for c in &self.bracket_survivors {
            bits += c.payload_bits() + c.directory_bits();
        }
        bits + self.top.bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{build_turan, parse_rotation_system};
    use crate::oracle::NaiveTopology;
    use crate::turan::TuranIndex;

    fn build(text: &str) -> (TuranIndex, crate::embed::RotationSystem) {
        let rs = parse_rotation_system(text).unwrap();
        let (idx, _) = build_turan(&rs).unwrap();
        (idx, rs)
    }

    fn params(f: usize, k: usize) -> NeighborParams {
        NeighborParams::new(f, k).unwrap()
    }

    #[test]
    fn f_below_nine_rejected() {
        assert!(NeighborParams::new(8, 3).is_err());
        assert!(NeighborParams::new(9, 0).is_err());
        assert!(NeighborParams::new(9, 1).is_ok());
    }

    #[test]
    fn k3_no_survivors() {
        let (idx, _) = build("PLANAREMB 1\n3 3\n2 1 3\n2 1 2\n2 2 3\n1 2\n2 3\n1 3\nroot 1 1\n");
        let ni = build_levels(idx.primal(), params(9, 9));
        assert_eq!(ni.top.entries, 0);
        assert!(ni.levels.is_empty());
        let v = idx.primal();
        assert!(ni.neighbor(v, 1, 3));
        assert!(ni.neighbor(v, 3, 1));
        assert!(ni.neighbor(v, 1, 2));
        assert!(!ni.neighbor(v, 1, 1));
        assert_eq!(ni.connecting_edge(v, 1, 3), Some(5));
        assert_eq!(ni.connecting_edge(v, 2, 3), Some(4));
        assert_eq!(ni.connecting_edge(v, 1, 1), None);
    }

    #[test]
    fn wheel_uses_levels() {
        // hub degree 16 >= 9 survives one round, gets isolated, chain ends
        let rs = crate::gen::wheel(16);
        let (idx, tabs) = build_turan(&rs).unwrap();
        let ni = build_levels(idx.primal(), params(9, 9));
        assert_eq!(ni.survivors[0].count_ones(), 1);
        let naive = NaiveTopology::new(&rs);
        let v = idx.primal();
        for u in 1..=rs.n {
            for w in 1..=rs.n {
                let want = naive.neighbor(tabs.input_of_dfs[u], tabs.input_of_dfs[w]);
                assert_eq!(ni.neighbor(v, u, w), want, "neighbor({u},{w})");
                let got = ni.connecting_edge(v, u, w);
                assert_eq!(got.is_some(), want);
                if let Some(pos) = got {
                    let (a, b) = (v.node_of(pos), v.node_of(v.mate(pos)));
                    assert_eq!(norm(a, b), norm(u, w));
                }
            }
        }
    }

    #[test]
    fn dual_instance_bridge_self_loop() {
        // P2: the bridge is a dual self-loop on the single face
        let (idx, _) = build("PLANAREMB 1\n2 1\n1 1\n1 1\n1 2\nroot 1 1\n");
        let ni = build_levels(idx.dual(), params(9, 9));
        let v = idx.dual();
        assert!(ni.neighbor(v, 1, 1));
        assert_eq!(ni.connecting_edge(v, 1, 1), Some(3));
    }

    #[test]
    fn triangulation_vs_oracle_all_pairs() {
        for seed in 0..4u64 {
            let rs = crate::gen::triangulation(120, seed);
            let (idx, tabs) = build_turan(&rs).unwrap();
            let naive = NaiveTopology::new(&rs);
            let v = idx.primal();
            for f in [9usize, 12] {
                for k in [1usize, 2, 4] {
                    let ni = build_levels(v, params(f, k));
                    for l in &ni.levels {
                        l.lint().unwrap();
                    }
                    for u in 1..=rs.n {
                        for w in u..=rs.n {
                            let want = naive.neighbor(tabs.input_of_dfs[u], tabs.input_of_dfs[w]);
                            assert_eq!(ni.neighbor(v, u, w), want, "f={f} k={k} ({u},{w})");
                            assert_eq!(ni.neighbor(v, w, u), want);
                            if let Some(pos) = ni.connecting_edge(v, u, w) {
                                let (a, b) = (v.node_of(pos), v.node_of(v.mate(pos)));
                                assert_eq!(norm(a, b), norm(u, w));
                            } else {
                                assert!(!want);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn level_chain_laws() {
        let rs = crate::gen::triangulation(4000, 11);
        let (idx, _) = build_turan(&rs).unwrap();
        let f = 9;
        let ni = build_levels(idx.primal(), params(f, 9));
        let mut prev_m = ni.base_edges;
        for (i, st) in ni.level_law_report().iter().enumerate() {
            assert!(
                st.edges * f <= 8 * prev_m,
                "level {}: m_i = {} > 8*{}/{}",
                i + 1,
                st.edges,
                prev_m,
                f
            );
            assert!(st.angle_pairs <= st.nodes);
            prev_m = st.edges;
        }
        // survivor counts match D ranks
        for (i, d) in ni.survivors.iter().enumerate() {
            let expect = if i < ni.levels.len() {
                ni.levels[i].stats.nodes
            } else {
                continue;
            };
            assert_eq!(d.count_ones(), expect);
        }
    }

    #[test]
    fn banana_multiedge_reduction() {
        // many parallels and loops collapse to one bracket per pair/node
        let rs = crate::gen::banana(6, 3);
        let (idx, _) = build_turan(&rs).unwrap();
        let naive = NaiveTopology::new(&rs);
        let v = idx.primal();
        let ni = build_levels(v, params(9, 3));
        for u in 1..=2 {
            for w in 1..=2 {
                assert_eq!(ni.neighbor(v, u, w), naive.neighbor(u, w), "({u},{w})");
            }
        }
        assert!(ni.neighbor(v, 1, 1)); // retained self-loop
        let pos = ni.connecting_edge(v, 1, 1).unwrap();
        assert_eq!(v.node_of(pos), 1);
        assert_eq!(v.node_of(v.mate(pos)), 1);
    }
}

