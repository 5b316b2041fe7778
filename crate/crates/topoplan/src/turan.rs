//! The core encoding: interleaving bitvector `A` plus balanced sequences
//! `B` (spanning-tree parentheses) and `B*` (dual-tree brackets), with the
//! constant-time navigation set over them.
//!
//! The sequence `S` of length `2(m+2)` is `( [ <2m edge visits> ] )`:
//! the enclosing parenthesis pair is the traversal root (node 1), the
//! enclosing bracket pair the outer face (face 1). `A[i] = 1` marks a
//! parenthesis. `B`/`B*` store 0 for opening, 1 for closing symbols.
//!
//! Everything here is expressed over a [`SeqView`], which reads `S` either
//! as the primal graph (parens = tree edges, nodes) or as its dual
//! (brackets = dual-tree edges, faces). All formulas are shared.

use crate::bits::BitSeq;
use crate::bp::BalancedSeq;

/// The succinct planar-embedding index: `4m + 8` core payload bits.
#[derive(Clone, Debug)]
pub struct TuranIndex {
    pub(crate) a: BitSeq,
    pub(crate) b: BalancedSeq,
    pub(crate) bstar: BalancedSeq,
    pub(crate) n: usize,
    pub(crate) m: usize,
}

impl TuranIndex {
    pub fn new(a: BitSeq, b: BalancedSeq, bstar: BalancedSeq, n: usize, m: usize) -> Self {
        debug_assert_eq!(a.len(), 2 * (m + 2));
        debug_assert_eq!(b.len(), 2 * n);
        debug_assert_eq!(bstar.len(), 2 * (m + 2 - n));
        TuranIndex { a, b, bstar, n, m }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn face_count(&self) -> usize {
        self.m + 2 - self.n
    }

    /// Length of S including the four enclosing symbols.
    pub fn seq_len(&self) -> usize {
        2 * (self.m + 2)
    }

    /// Core payload: |A| + |B| + |B*| = 4m + 8 bits.
    pub fn core_payload_bits(&self) -> usize {
        self.a.len() + self.b.len() + self.bstar.len()
    }

    pub fn a(&self) -> &BitSeq {
        &self.a
    }

    pub fn b(&self) -> &BalancedSeq {
        &self.b
    }

    pub fn bstar(&self) -> &BalancedSeq {
        &self.bstar
    }

    /// Read S with parentheses as the node structure (the graph itself).
    pub fn primal(&self) -> SeqView<'_> {
        SeqView { idx: self, dual: false }
    }

    /// Read S with brackets as the node structure (the dual graph).
    pub fn dual(&self) -> SeqView<'_> {
        SeqView { idx: self, dual: true }
    }

    /// Reconstruct S as text, for debugging and replay tests.
    pub fn render(&self) -> String {
        let v = self.primal();
        (1..=self.seq_len())
            .map(|i| {
                let paren = v.is_paren(i);
                let open = v.is_open_at(i);
                match (paren, open) {
                    (true, true) => '(',
                    (true, false) => ')',
                    (false, true) => '[',
                    (false, false) => ']',
                }
            })
            .collect()
    }
}

/// One reading of the sequence: "paren" means the symbols that encode this
/// view's spanning tree / node regions, "bracket" the complementary ones.
#[derive(Clone, Copy)]
pub struct SeqView<'a> {
    idx: &'a TuranIndex,
    dual: bool,
}

impl<'a> SeqView<'a> {
    pub fn is_dual(self) -> bool {
        self.dual
    }

    /// Nodes of this view (faces of the graph when dual).
    pub fn node_count(self) -> usize {
        if self.dual {
            self.idx.m + 2 - self.idx.n
        } else {
            self.idx.n
        }
    }

    pub fn edge_count(self) -> usize {
        self.idx.m
    }

    pub fn seq_len(self) -> usize {
        self.idx.seq_len()
    }

    #[inline]
    pub fn is_paren(self, i: usize) -> bool {
        self.idx.a.get(i) != self.dual
    }

    #[inline]
    pub(crate) fn paren_rank(self, i: usize) -> usize {
        if self.dual {
            self.idx.a.rank0(i)
        } else {
            self.idx.a.rank1(i)
        }
    }

    #[inline]
    pub(crate) fn bracket_rank(self, i: usize) -> usize {
        if self.dual {
            self.idx.a.rank1(i)
        } else {
            self.idx.a.rank0(i)
        }
    }

    #[inline]
    pub(crate) fn select_paren(self, j: usize) -> usize {
        if self.dual {
            self.idx.a.select0(j)
        } else {
            self.idx.a.select1(j)
        }
    }

    #[inline]
    pub(crate) fn select_bracket(self, j: usize) -> usize {
        if self.dual {
            self.idx.a.select1(j)
        } else {
            self.idx.a.select0(j)
        }
    }

    #[inline]
    pub(crate) fn paren_bv(self) -> &'a BalancedSeq {
        if self.dual {
            &self.idx.bstar
        } else {
            &self.idx.b
        }
    }

    #[inline]
    pub(crate) fn bracket_bv(self) -> &'a BalancedSeq {
        if self.dual {
            &self.idx.b
        } else {
            &self.idx.bstar
        }
    }

    /// Is the symbol at `i` an opening one (of either class)?
    pub fn is_open_at(self, i: usize) -> bool {
        if self.is_paren(i) {
            self.paren_bv().is_open(self.paren_rank(i))
        } else {
            self.bracket_bv().is_open(self.bracket_rank(i))
        }
    }

    /// Valid edge positions are 3..=seq_len()-2 (the four enclosing symbols
    /// are not edges).
    pub fn is_valid_edge_pos(self, i: usize) -> bool {
        3 <= i && i + 2 <= self.seq_len()
    }

    /// Position in S of the other occurrence of the edge visited at `i`.
    pub fn mate(self, i: usize) -> usize {
        let paren = self.is_paren(i);
        let (bv, r) = if paren {
            (self.paren_bv(), self.paren_rank(i))
        } else {
            (self.bracket_bv(), self.bracket_rank(i))
        };
        let j = if bv.is_open(r) { bv.close(r) } else { bv.open(r) };
        if paren {
            self.select_paren(j)
        } else {
            self.select_bracket(j)
        }
    }

    /// The view-node whose region position `i` belongs to (the node being
    /// visited when the i-th symbol was written).
    pub fn node_of(self, i: usize) -> usize {
        let bv = self.paren_bv();
        let p = self.paren_rank(i);
        debug_assert!(p > 0, "no view-paren precedes position {i}");
        if self.is_paren(i) {
            if bv.is_open(p) {
                // opening of a child: source is the parent region
                bv.rank_open(bv.enclose(p).expect("root open has no source"))
            } else {
                bv.rank_open(bv.open(p))
            }
        } else if bv.is_open(p) {
            bv.rank_open(p)
        } else {
            let o = bv.open(p);
            bv.rank_open(bv.enclose(o).expect("bracket outside all regions"))
        }
    }

    /// First visited edge of node `v` (counter-clockwise from the parent
    /// edge; the root starts at its chosen outer-face incidence).
    pub fn first(self, v: usize) -> usize {
        if v == 1 {
            // the formula lands on the remaining enclosing symbol; the first
            // real edge is always position 3
            3
        } else {
            self.select_paren(self.paren_bv().select_open(v)) + 1
        }
    }

    /// Last visited edge of node `v`.
    pub fn last(self, v: usize) -> usize {
        if v == 1 {
            self.prev(self.seq_len() - 1)
        } else {
            let bv = self.paren_bv();
            self.select_paren(bv.close(bv.select_open(v)))
        }
    }

    /// Next edge of the same node in counter-clockwise order.
    pub fn next(self, i: usize) -> usize {
        if self.is_paren(i) {
            let r = self.paren_rank(i);
            if self.paren_bv().is_open(r) {
                return self.mate(i) + 1;
            }
        }
        i + 1
    }

    /// Previous edge of the same node; inverse of [`next`](Self::next)
    /// inside a rotation.
    pub fn prev(self, i: usize) -> usize {
        let j = i - 1;
        if self.is_paren(j) {
            let r = self.paren_rank(j);
            if !self.paren_bv().is_open(r) {
                return self.mate(j);
            }
        }
        j
    }

    /// Parent of `v` in this view's spanning tree (None for the root).
    pub fn parent(self, v: usize) -> Option<usize> {
        let bv = self.paren_bv();
        let e = bv.enclose(bv.select_open(v))?;
        Some(bv.rank_open(e))
    }

    /// Position in S of node v's opening paren (v >= 2 has a real parent
    /// edge there; v = 1 gives the enclosing symbol).
    pub fn open_pos(self, v: usize) -> usize {
        self.select_paren(self.paren_bv().select_open(v))
    }

    /// Canonical (smaller) position of the pair containing `i`.
    pub fn canonical(self, i: usize) -> usize {
        let m = self.mate(i);
        i.min(m)
    }

    /// Iterate the rotation of `v`: every incident edge end in ccw order.
    pub fn rotation(self, v: usize) -> RotationIter<'a> {
        if v == 1 {
            RotationIter {
                view: self,
                cur: Some(3),
                stop: self.seq_len() - 1,
                inclusive: false,
            }
        } else {
            let bv = self.paren_bv();
            let close = self.select_paren(bv.close(bv.select_open(v)));
            RotationIter {
                view: self,
                cur: Some(self.first(v)),
                stop: close,
                inclusive: true,
            }
        }
    }

    /// Degree of `v` (edge ends; self-loops count twice).
    pub fn degree(self, v: usize) -> usize {
        self.rotation(v).count()
    }

    /// Degree, but stop counting once `cap` is reached.
    pub fn degree_capped(self, v: usize, cap: usize) -> usize {
        self.rotation(v).take(cap).count()
    }
}

/// Iterator over the edge positions of one node's rotation.
pub struct RotationIter<'a> {
    view: SeqView<'a>,
    cur: Option<usize>,
    stop: usize,
    /// true: emit until (and including) `stop`; false: `stop` is a sentinel
    /// position that terminates the walk (the root's closing enclosure).
    inclusive: bool,
}

impl<'a> Iterator for RotationIter<'a> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        let p = self.cur?;
        if self.inclusive {
            self.cur = if p == self.stop {
                None
            } else {
                Some(self.view.next(p))
            };
        } else {
            let nxt = self.view.next(p);
            self.cur = if nxt >= self.stop { None } else { Some(nxt) };
        }
        Some(p)
    }
}
