//! Plain bitvector with rank/select support.
//!
//! Positions are 1-based throughout (matching the sequence model of the rest
//! of the crate): `rank1(i)` counts 1-bits among the first `i` positions,
//! `select1(j)` returns the 1-based position of the `j`-th 1-bit.
//!
//! The directory is fixed-block sampling: absolute counts every
//! [`SUPER_WORDS`] words plus select samples every [`SELECT_SAMPLE`]-th
//! occurrence. Overhead is reported, not theoretically optimal.

use std::cell::Cell;

/// Words per rank superblock (512 bits).
const SUPER_WORDS: usize = 8;
/// One select sample per this many occurrences.
const SELECT_SAMPLE: usize = 512;

thread_local! {
    static PROBES: Cell<u64> = const { Cell::new(0) };
}

/// Sequence-probe accounting. One probe is one public rank/select/access/
/// open/close/enclose call on a base sequence; query algorithms are judged
/// by how many of these they issue.
pub mod probes {
    use super::PROBES;

    #[inline]
    pub(crate) fn bump() {
        PROBES.with(|c| c.set(c.get().wrapping_add(1)));
    }

    /// Current probe count for this thread.
    pub fn count() -> u64 {
        PROBES.with(|c| c.get())
    }

    /// Reset the thread's probe counter.
    pub fn reset() {
        PROBES.with(|c| c.set(0));
    }

    /// Probes issued while running `f`.
    pub fn measure<T>(f: impl FnOnce() -> T) -> (T, u64) {
        let before = count();
        let out = f();
        (out, count() - before)
    }
}

/// Immutable bitvector with rank/select directories.
#[derive(Clone, Debug, Default)]
pub struct BitSeq {
    words: Vec<u64>,
    len: usize,
    ones: usize,
    /// Absolute 1-count before each superblock.
    super_ranks: Vec<u64>,
    /// Word index containing the (k*SELECT_SAMPLE)-th 1 / 0.
    select1_samples: Vec<u32>,
    select0_samples: Vec<u32>,
}

/// Builder: push bits, then freeze.
#[derive(Clone, Debug, Default)]
pub struct BitSeqBuilder {
    words: Vec<u64>,
    len: usize,
}

impl BitSeqBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits / 64 + 1),
            len: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let w = self.len / 64;
        if w == self.words.len() {
            self.words.push(0);
        }
        if bit {
            self.words[w] |= 1u64 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn build(self) -> BitSeq {
        BitSeq::from_words(self.words, self.len)
    }
}

impl BitSeq {
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut b = BitSeqBuilder::with_capacity(bits.len());
        for &x in bits {
            b.push(x);
        }
        b.build()
    }

    /// Assemble from raw little-endian words; trailing bits beyond `len`
    /// must be zero (enforced here by masking).
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        let need = (len + 63) / 64;
        words.truncate(need);
        words.resize(need, 0);
        if len % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        let mut super_ranks = Vec::with_capacity(words.len() / SUPER_WORDS + 2);
        let mut select1_samples = Vec::new();
        let mut select0_samples = Vec::new();
        let mut ones: u64 = 0;
        for (i, &w) in words.iter().enumerate() {
            if i % SUPER_WORDS == 0 {
                super_ranks.push(ones);
            }
            let before1 = ones as usize;
            let pc = w.count_ones() as usize;
            if before1 / SELECT_SAMPLE != (before1 + pc) / SELECT_SAMPLE {
                select1_samples.push(i as u32);
            }
            let zeros_before = i * 64 - before1;
            let zc = 64 - pc;
            if zeros_before / SELECT_SAMPLE != (zeros_before + zc) / SELECT_SAMPLE {
                select0_samples.push(i as u32);
            }
            ones += pc as u64;
        }
        super_ranks.push(ones);
        BitSeq {
            words,
            len,
            ones: ones as usize,
            super_ranks,
            select1_samples,
            select0_samples,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> usize {
        self.ones
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.ones
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Bit at 1-based position `i`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        probes::bump();
        debug_assert!(1 <= i && i <= self.len, "position {i} out of 1..={}", self.len);
        let p = i - 1;
        (self.words[p / 64] >> (p % 64)) & 1 == 1
    }

    /// Number of 1-bits among the first `i` positions (0 <= i <= len).
    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        probes::bump();
        self.rank1_quiet(i)
    }

    pub(crate) fn rank1_quiet(&self, i: usize) -> usize {
        debug_assert!(i <= self.len, "rank position {i} out of 0..={}", self.len);
        if i == 0 {
            return 0;
        }
        let p = i - 1; // last included bit, 0-based
        let w = p / 64;
        let sb = w / SUPER_WORDS;
        let mut r = self.super_ranks[sb] as usize;
        for k in (sb * SUPER_WORDS)..w {
            r += self.words[k].count_ones() as usize;
        }
        let keep = p % 64 + 1;
        let mask = if keep == 64 { !0u64 } else { (1u64 << keep) - 1 };
        r + (self.words[w] & mask).count_ones() as usize
    }

    #[inline]
    pub fn rank0(&self, i: usize) -> usize {
        probes::bump();
        i - self.rank1_quiet(i)
    }

    /// 1-based position of the j-th 1-bit (1 <= j <= count_ones).
    pub fn select1(&self, j: usize) -> usize {
        probes::bump();
        debug_assert!(1 <= j && j <= self.ones, "select1({j}) out of range (ones={})", self.ones);
        let sample = (j - 1) / SELECT_SAMPLE;
        let mut w = if sample == 0 {
            0
        } else {
            self.select1_samples[sample - 1] as usize
        };
        // hop superblocks first
        let mut sb = w / SUPER_WORDS;
        while sb + 1 < self.super_ranks.len() - 1 && self.super_ranks[sb + 1] < j as u64 {
            sb += 1;
        }
        w = w.max(sb * SUPER_WORDS);
        let mut before = self.rank_before_word(w);
        loop {
            let pc = self.words[w].count_ones() as usize;
            if before + pc >= j {
                break;
            }
            before += pc;
            w += 1;
        }
        w * 64 + select_in_word(self.words[w], j - before) + 1
    }

    /// 1-based position of the j-th 0-bit.
    pub fn select0(&self, j: usize) -> usize {
        probes::bump();
        let zeros = self.len - self.ones;
        debug_assert!(1 <= j && j <= zeros, "select0({j}) out of range (zeros={zeros})");
        let sample = (j - 1) / SELECT_SAMPLE;
        let mut w = if sample == 0 {
            0
        } else {
            self.select0_samples[sample - 1] as usize
        };
        let mut before = w * 64 - self.rank_before_word(w);
        loop {
            let zc = 64 - self.words[w].count_ones() as usize;
            if before + zc >= j {
                break;
            }
            before += zc;
            w += 1;
        }
        w * 64 + select_in_word(!self.words[w], j - before) + 1
    }

    fn rank_before_word(&self, w: usize) -> usize {
        let sb = w / SUPER_WORDS;
        let mut r = self.super_ranks[sb] as usize;
        for k in (sb * SUPER_WORDS)..w {
            r += self.words[k].count_ones() as usize;
        }
        r
    }

    /// Payload size in bits (exactly the sequence length).
    pub fn payload_bits(&self) -> usize {
        self.len
    }

    /// Directory overhead in bits (rank superblocks + select samples).
    pub fn directory_bits(&self) -> usize {
        self.super_ranks.len() * 64 + (self.select1_samples.len() + self.select0_samples.len()) * 32
    }

    /// Information-theoretic bound log2(C(len, ones)) for sparse storage,
    /// reported so the gap to the plain representation is visible.
    pub fn entropy_bound_bits(&self) -> f64 {
        let n = self.len as f64;
        let k = self.ones.min(self.len - self.ones) as f64;
        if k == 0.0 || n == 0.0 {
            return 0.0;
        }
        // ln C(n,k) via Stirling's ln-gamma approximation
        fn ln_fact(x: f64) -> f64 {
            if x < 1.5 {
                return 0.0;
            }
            x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
        }
        (ln_fact(n) - ln_fact(k) - ln_fact(n - k)) / std::f64::consts::LN_2
    }
}

/// 0-based offset of the r-th set bit (r >= 1) within a word.
#[inline]
pub(crate) fn select_in_word(mut w: u64, mut r: usize) -> usize {
    debug_assert!(r >= 1 && (w.count_ones() as usize) >= r);
    // narrow down byte by byte
    let mut base = 0;
    loop {
        let c = (w & 0xff).count_ones() as usize;
        if c >= r {
            break;
        }
        r -= c;
        w >>= 8;
        base += 8;
    }
    let mut b = w & 0xff;
    let mut off = 0;
    loop {
        if b & 1 == 1 {
            r -= 1;
            if r == 0 {
                return base + off;
            }
        }
        b >>= 1;
        off += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn naive_rank(bits: &[bool], b: bool, i: usize) -> usize {
        bits[..i].iter().filter(|&&x| x == b).count()
    }

    #[test]
    fn rank_trivial() {
        // direct count over 1,0,1,1
        let s = BitSeq::from_bools(&[true, false, true, true]);
        assert_eq!(s.rank1(4), 3);
        assert_eq!(s.rank0(0), 0);
        assert_eq!(s.rank1(0), 0);
        assert_eq!(s.rank1(1), 1);
    }

    #[test]
    fn select_trivial() {
        let s = BitSeq::from_bools(&[false, true, false, true]);
        assert_eq!(s.select1(2), 4);
        assert_eq!(s.select1(1), 2);
        assert_eq!(s.select0(2), 3);
    }

    #[test]
    fn select_inverse_law() {
        let s = BitSeq::from_bools(&[true, true, false, true, false, false, true]);
        for p in 1..=s.len() {
            if s.get(p) {
                assert_eq!(s.select1(s.rank1(p)), p);
            } else {
                assert_eq!(s.select0(s.rank0(p)), p);
            }
        }
    }

    #[test]
    fn rank_select_against_linear_scan_large() {
        // 10^6 random bits, 1000 sampled positions vs a linear-scan oracle
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let bits: Vec<bool> = (0..1_000_000).map(|_| rng.gen_bool(0.37)).collect();
        let s = BitSeq::from_bools(&bits);
        let mut cum = vec![0usize; bits.len() + 1];
        for (i, &b) in bits.iter().enumerate() {
            cum[i + 1] = cum[i] + b as usize;
        }
        for _ in 0..1000 {
            let i = rng.gen_range(0..=bits.len());
            assert_eq!(s.rank1(i), cum[i]);
            assert_eq!(s.rank0(i), i - cum[i]);
        }
        for _ in 0..1000 {
            let j = rng.gen_range(1..=s.count_ones());
            let p = s.select1(j);
            assert!(bits[p - 1]);
            assert_eq!(s.rank1(p), j);
            let j0 = rng.gen_range(1..=s.count_zeros());
            let p0 = s.select0(j0);
            assert!(!bits[p0 - 1]);
            assert_eq!(s.rank0(p0), j0);
        }
    }

    #[test]
    fn probe_counter_counts() {
        let s = BitSeq::from_bools(&[true, false]);
        let (_, n) = probes::measure(|| {
            s.rank1(2);
            s.select1(1);
            s.get(1);
        });
        assert_eq!(n, 3);
    }

    proptest! {
        #[test]
        fn rank_select_laws(bits in proptest::collection::vec(any::<bool>(), 0..800)) {
            let s = BitSeq::from_words(Vec::new(), 0);
            prop_assert_eq!(s.len(), 0);
            let s = BitSeq::from_bools(&bits);
            let mut prev = 0;
            for i in 0..=bits.len() {
                let r = s.rank1(i);
                prop_assert_eq!(r, naive_rank(&bits, true, i));
                prop_assert!(r >= prev); // nondecreasing
                prev = r;
            }
            for j in 1..=s.count_ones() {
                let p = s.select1(j);
                prop_assert!(bits[p - 1]);
                prop_assert_eq!(s.rank1(p), j);
                prop_assert!(s.select1(s.rank1(p)) <= p);
            }
            for j in 1..=s.count_zeros() {
                let p = s.select0(j);
                prop_assert!(!bits[p - 1]);
                prop_assert_eq!(s.rank0(p), j);
            }
        }
    }
}
