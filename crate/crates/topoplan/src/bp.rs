//! Balanced parentheses over a bitvector: 0 = open, 1 = close.
//!
//! Navigation (`open`, `close`, `enclose`) runs on a range-min-max block
//! tree over excess values. Block size is a build parameter (default 512
//! symbols). In-block scans step a byte at a time through precomputed
//! excess tables.

use crate::bits::{probes, BitSeq};

/// Default block size in symbols.
pub const DEFAULT_BLOCK: usize = 512;

// Per-byte excess summaries; bit 0 = open (+1), bit 1 = close (-1).
// DELTA = total excess change, MIN/MAX = extreme prefix excess within the byte.
struct ByteTables {
    delta: [i8; 256],
    min: [i8; 256],
    max: [i8; 256],
}

static BYTE: ByteTables = build_byte_tables();

const fn build_byte_tables() -> ByteTables {
    let mut delta = [0i8; 256];
    let mut min = [0i8; 256];
    let mut max = [0i8; 256];
    let mut b = 0usize;
    while b < 256 {
        let mut e: i8 = 0;
        let mut mn: i8 = 0;
        let mut mx: i8 = 0;
        let mut k = 0;
        while k < 8 {
            e += if (b >> k) & 1 == 0 { 1 } else { -1 };
            if e < mn {
                mn = e;
            }
            if e > mx {
                mx = e;
            }
            k += 1;
        }
        delta[b] = e;
        min[b] = mn;
        max[b] = mx;
        b += 1;
    }
    ByteTables { delta, min, max }
}

/// Balanced sequence with open/close/enclose support.
#[derive(Clone, Debug, Default)]
pub struct BalancedSeq {
    bits: BitSeq,
    block: usize,
    /// Complete-binary-tree (1-based heap) of (min, max) cumulative excess per block range.
    tree_min: Vec<i64>,
    tree_max: Vec<i64>,
    leaf_base: usize,
}

impl BalancedSeq {
    pub fn from_bits(bits: BitSeq) -> Self {
        Self::with_block(bits, DEFAULT_BLOCK)
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_bits(BitSeq::from_bools(bits))
    }

    pub fn with_block(bits: BitSeq, block: usize) -> Self {
        assert!(block >= 8 && block % 8 == 0, "block must be a positive multiple of 8");
        let len = bits.len();
        let n_blocks = (len + block - 1) / block;
        let mut leaf_base = 1;
        while leaf_base < n_blocks {
            leaf_base <<= 1;
        }
        let mut tree_min = vec![i64::MAX; 2 * leaf_base];
        let mut tree_max = vec![i64::MIN; 2 * leaf_base];
        // leaf summaries
        let mut e: i64 = 0;
        for blk in 0..n_blocks {
            let start = blk * block;
            let end = (start + block).min(len);
            let mut mn = i64::MAX;
            let mut mx = i64::MIN;
            let mut p = start;
            while p < end {
                if (end - p) >= 8 && p % 8 == 0 {
                    let byte = byte_at(&bits, p);
                    mn = mn.min(e + BYTE.min[byte as usize] as i64);
                    mx = mx.max(e + BYTE.max[byte as usize] as i64);
                    e += BYTE.delta[byte as usize] as i64;
                    p += 8;
                } else {
                    e += if bit_quiet(&bits, p) { -1 } else { 1 };
                    mn = mn.min(e);
                    mx = mx.max(e);
                    p += 1;
                }
            }
            tree_min[leaf_base + blk] = mn;
            tree_max[leaf_base + blk] = mx;
        }
        for v in (1..leaf_base).rev() {
            tree_min[v] = tree_min[2 * v].min(tree_min[2 * v + 1]);
            tree_max[v] = tree_max[2 * v].max(tree_max[2 * v + 1]);
        }
        BalancedSeq {
            bits,
            block,
            tree_min,
            tree_max,
            leaf_base,
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.len() == 0
    }

    pub fn bits(&self) -> &BitSeq {
        &self.bits
    }

    /// True if position `i` (1-based) is an opening symbol.
    #[inline]
    pub fn is_open(&self, i: usize) -> bool {
        !self.bits.get(i)
    }

    /// Number of opens among the first `i` symbols.
    pub fn rank_open(&self, i: usize) -> usize {
        self.bits.rank0(i)
    }

    pub fn rank_close(&self, i: usize) -> usize {
        self.bits.rank1(i)
    }

    /// Position of the j-th opening symbol.
    pub fn select_open(&self, j: usize) -> usize {
        self.bits.select0(j)
    }

    pub fn select_close(&self, j: usize) -> usize {
        self.bits.select1(j)
    }

    pub fn count_open(&self) -> usize {
        self.bits.count_zeros()
    }

    /// Excess (#opens - #closes) of the prefix of length `i`.
    #[inline]
    pub fn excess(&self, i: usize) -> i64 {
        i as i64 - 2 * self.bits.rank1_quiet(i) as i64
    }

    /// Matching close of the open at `i`.
    pub fn close(&self, i: usize) -> usize {
        probes::bump();
        debug_assert!(self.is_open_quiet(i), "close() on a non-open at {i}");
        let target = self.excess(i) - 1;
        self.fwd_search(i, target)
            .expect("balanced sequence: close must exist")
    }

    /// Matching open of the close at `j`.
    pub fn open(&self, j: usize) -> usize {
        probes::bump();
        debug_assert!(!self.is_open_quiet(j), "open() on a non-close at {j}");
        let target = self.excess(j);
        // largest i' < j with excess(i') == excess(j); match opens at i'+1
        self.bwd_search(j - 1, target)
            .map(|p| p + 1)
            .expect("balanced sequence: open must exist")
    }

    /// Tightest enclosing open of the open at `i`, or None at top level.
    pub fn enclose(&self, i: usize) -> Option<usize> {
        probes::bump();
        debug_assert!(self.is_open_quiet(i), "enclose() on a non-open at {i}");
        let target = self.excess(i) - 2;
        if target < 0 {
            return None;
        }
        self.bwd_search(i - 1, target).map(|p| p + 1)
    }

    #[inline]
    fn is_open_quiet(&self, i: usize) -> bool {
        let p = i - 1;
        (self.bits.words()[p / 64] >> (p % 64)) & 1 == 0
    }

    /// Smallest j > from with excess(j) == target. `from` >= 1.
    fn fwd_search(&self, from: usize, target: i64) -> Option<usize> {
        let len = self.len();
        let mut e = self.excess(from);
        let mut p = from; // positions processed so far
        // scan remainder of from's block
        let blk = from / self.block; // block of position from+1 (0-based pos = from)
        let blk_end = ((blk + 1) * self.block).min(len);
        if let Some(hit) = self.scan_fwd(&mut p, blk_end, &mut e, target) {
            return Some(hit);
        }
        if p >= len {
            return None;
        }
        // climb the block tree for the next block whose range covers target
        let mut v = self.leaf_base + blk;
        loop {
            while v & 1 == 1 {
                v >>= 1;
                if v == 0 {
                    return None;
                }
            }
            if v == 0 {
                return None;
            }
            v += 1; // right sibling
            if self.tree_min[v] <= target && target <= self.tree_max[v] {
                break;
            }
        }
        // descend to the leftmost qualifying leaf
        while v < self.leaf_base {
            let l = 2 * v;
            v = if self.tree_min[l] <= target && target <= self.tree_max[l] {
                l
            } else {
                l + 1
            };
        }
        let blk = v - self.leaf_base;
        let start = blk * self.block;
        let mut e = self.excess(start);
        let mut p = start;
        let end = (start + self.block).min(len);
        self.scan_fwd(&mut p, end, &mut e, target)
    }

    fn scan_fwd(&self, p: &mut usize, end: usize, e: &mut i64, target: i64) -> Option<usize> {
        while *p < end {
            if *p % 8 == 0 && end - *p >= 8 {
                let byte = byte_at(&self.bits, *p) as usize;
                let lo = *e + BYTE.min[byte] as i64;
                let hi = *e + BYTE.max[byte] as i64;
                if lo <= target && target <= hi {
                    // resolve within the byte
                    let mut eb = *e;
                    for k in 0..8 {
                        eb += if (byte >> k) & 1 == 0 { 1 } else { -1 };
                        if eb == target {
                            return Some(*p + k + 1);
                        }
                    }
                    unreachable!("byte range said target was inside");
                }
                *e += BYTE.delta[byte] as i64;
                *p += 8;
            } else {
                *e += if bit_quiet(&self.bits, *p) { -1 } else { 1 };
                *p += 1;
                if *e == target {
                    return Some(*p);
                }
            }
        }
        None
    }

    /// Largest j <= from with excess(j) == target; j may be 0 (virtual start).
    fn bwd_search(&self, from: usize, target: i64) -> Option<usize> {
        if self.excess(from) == target {
            return Some(from);
        }
        if from == 0 {
            return None;
        }
        let blk = (from - 1) / self.block;
        let start = blk * self.block;
        if let Some(hit) = self.scan_bwd(start, from, target) {
            return Some(hit);
        }
        if start == 0 {
            return if target == 0 { Some(0) } else { None };
        }
        // climb for the nearest preceding block covering target
        let mut v = self.leaf_base + blk;
        loop {
            while v & 1 == 0 {
                v >>= 1;
                if v == 0 {
                    break;
                }
            }
            if v <= 1 {
                return if target == 0 { Some(0) } else { None };
            }
            v -= 1; // left sibling
            if self.tree_min[v] <= target && target <= self.tree_max[v] {
                break;
            }
        }
        while v < self.leaf_base {
            let r = 2 * v + 1;
            v = if self.tree_min[r] <= target && target <= self.tree_max[r] {
                r
            } else {
                2 * v
            };
        }
        let blk = v - self.leaf_base;
        let start = blk * self.block;
        let end = ((blk + 1) * self.block).min(self.len());
        self.scan_bwd(start, end, target)
            .or(if target == 0 { Some(0) } else { None })
    }

    /// Largest j in (start, end] with excess(j) == target, scanning backward.
    fn scan_bwd(&self, start: usize, end: usize, target: i64) -> Option<usize> {
        let mut p = end;
        let mut e = self.excess(end);
        while p > start {
            if p % 8 == 0 && p - start >= 8 {
                let byte = byte_at(&self.bits, p - 8) as usize;
                let before = e - BYTE.delta[byte] as i64;
                let lo = before + BYTE.min[byte] as i64;
                let hi = before + BYTE.max[byte] as i64;
                if (lo <= target && target <= hi) || before == target {
                    let mut eb = before;
                    let mut best = if before == target { Some(p - 8) } else { None };
                    for k in 0..8 {
                        eb += if (byte >> k) & 1 == 0 { 1 } else { -1 };
                        if eb == target {
                            best = Some(p - 8 + k + 1);
                        }
                    }
                    // best is the largest within this byte; but positions after
                    // the byte were already scanned, so it's the answer
                    if let Some(b) = best {
                        if b < end {
                            return Some(b);
                        }
                    }
                }
                e = before;
                p -= 8;
            } else {
                e -= if bit_quiet(&self.bits, p - 1) { -1 } else { 1 };
                p -= 1;
                if e == target {
                    return Some(p);
                }
            }
        }
        None
    }

    /// True if the sequence is balanced overall (used by validators).
    pub fn is_balanced(&self) -> bool {
        let mut e: i64 = 0;
        for p in 0..self.len() {
            e += if bit_quiet(&self.bits, p) { -1 } else { 1 };
            if e < 0 {
                return false;
            }
        }
        e == 0
    }

    pub fn payload_bits(&self) -> usize {
        self.bits.payload_bits()
    }

    pub fn directory_bits(&self) -> usize {
        self.bits.directory_bits() + (self.tree_min.len() + self.tree_max.len()) * 64
    }
}

#[inline]
fn bit_quiet(bits: &BitSeq, p: usize) -> bool {
    (bits.words()[p / 64] >> (p % 64)) & 1 == 1
}

#[inline]
fn byte_at(bits: &BitSeq, p: usize) -> u8 {
    debug_assert!(p % 8 == 0);
    (bits.words()[p / 64] >> (p % 64)) as u8
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Stack-based oracle: (open->close, close->open, enclose per open).
    fn naive(bits: &[bool]) -> (Vec<usize>, Vec<usize>, Vec<Option<usize>>) {
        let n = bits.len();
        let mut close = vec![0; n + 1];
        let mut open = vec![0; n + 1];
        let mut encl = vec![None; n + 1];
        let mut stack = Vec::new();
        for i in 1..=n {
            if !bits[i - 1] {
                encl[i] = stack.last().copied();
                stack.push(i);
            } else {
                let o = stack.pop().unwrap();
                close[o] = i;
                open[i] = o;
            }
        }
        assert!(stack.is_empty());
        (close, open, encl)
    }

    fn check_all(seq: &BalancedSeq, bits: &[bool]) {
        let (close, open, encl) = naive(bits);
        for i in 1..=bits.len() {
            if !bits[i - 1] {
                assert_eq!(seq.close(i), close[i], "close({i}) on {bits:?}");
                assert_eq!(seq.enclose(i), encl[i], "enclose({i}) on {bits:?}");
                assert_eq!(seq.open(seq.close(i)), i);
            } else {
                assert_eq!(seq.open(i), open[i], "open({i}) on {bits:?}");
                assert_eq!(seq.close(seq.open(i)), i);
            }
        }
    }

    #[test]
    fn hand_cases() {
        // "(())": close(1)=4, close(2)=3, enclose(2)=1
        let s = BalancedSeq::from_bools(&[false, false, true, true]);
        assert_eq!(s.close(1), 4);
        assert_eq!(s.close(2), 3);
        assert_eq!(s.enclose(2), Some(1));
        // "()": enclose(1) = none
        let s = BalancedSeq::from_bools(&[false, true]);
        assert_eq!(s.enclose(1), None);
        assert_eq!(s.close(1), 2);
        assert_eq!(s.open(2), 1);
    }

    /// All Dyck words up to 9 pairs with a tiny block size to stress block
    /// boundaries and the tree walk.
    #[test]
    fn exhaustive_small() {
        fn rec(n: usize, open: usize, close: usize, buf: &mut Vec<bool>, f: &mut impl FnMut(&[bool])) {
            if buf.len() == 2 * n {
                f(buf);
                return;
            }
            if open < n {
                buf.push(false);
                rec(n, open + 1, close, buf, f);
                buf.pop();
            }
            if close < open {
                buf.push(true);
                rec(n, open, close + 1, buf, f);
                buf.pop();
            }
        }
        for pairs in 0..=9 {
            let mut buf = Vec::new();
            rec(pairs, 0, 0, &mut buf, &mut |bits| {
                let s = BalancedSeq::with_block(BitSeq::from_bools(bits), 8);
                assert!(s.is_balanced());
                check_all(&s, bits);
            });
        }
    }

    fn random_dyck(pairs: usize, rng: &mut impl Rng) -> Vec<bool> {
        let mut out = Vec::with_capacity(2 * pairs);
        let (mut o, mut c) = (0, 0);
        while out.len() < 2 * pairs {
            if o < pairs && (c >= o || rng.gen_bool(0.5)) {
                out.push(false);
                o += 1;
            } else {
                out.push(true);
                c += 1;
            }
        }
        out
    }

    #[test]
    fn random_long_sequences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for case in 0..30 {
            let pairs = 1 + rng.gen_range(0..(1 << 13));
            let bits = random_dyck(pairs, &mut rng);
            let block = [8usize, 64, 512][case % 3];
            let s = BalancedSeq::with_block(BitSeq::from_bools(&bits), block);
            let (close, open, encl) = naive(&bits);
            for _ in 0..400 {
                let i = rng.gen_range(1..=bits.len());
                if !bits[i - 1] {
                    assert_eq!(s.close(i), close[i]);
                    assert_eq!(s.enclose(i), encl[i]);
                } else {
                    assert_eq!(s.open(i), open[i]);
                }
            }
        }
    }

    /// close(open(j)) = j and open(close(i)) = i over every position of a
    /// sequence long enough to exercise all directory levels (2^14 symbols).
    #[test]
    fn inverse_laws_exhaustive_16k() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let bits = random_dyck(1 << 13, &mut rng);
        let s = BalancedSeq::from_bools(&bits);
        for i in 1..=bits.len() {
            if !bits[i - 1] {
                let c = s.close(i);
                assert_eq!(s.open(c), i);
                if let Some(e) = s.enclose(i) {
                    assert!(e < i && s.close(e) > c);
                }
            } else {
                let o = s.open(i);
                assert_eq!(s.close(o), i);
            }
        }
    }
}
