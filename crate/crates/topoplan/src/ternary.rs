//! Sequence over the 3-symbol alphabet used by contraction levels:
//! bracket = 0, paren = 1, angle = 2. Stored 2 bits per symbol with
//! per-block rank directories for each symbol.

use crate::bits::probes;

/// Symbol classes of a level sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sym {
    Bracket = 0,
    Paren = 1,
    Angle = 2,
}

impl Sym {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(c: u8) -> Sym {
        match c {
            0 => Sym::Bracket,
            1 => Sym::Paren,
            2 => Sym::Angle,
            _ => panic!("invalid ternary code {c}"),
        }
    }
}

/// Symbols per rank block (one u64 word of 2-bit codes).
const BLOCK: usize = 32;
/// Blocks per superblock sample.
const SUPER: usize = 8;

#[derive(Clone, Debug, Default)]
pub struct TernarySeq {
    words: Vec<u64>,
    len: usize,
    /// Cumulative counts of symbols 0 and 1 before each superblock.
    super0: Vec<u64>,
    super1: Vec<u64>,
    counts: [usize; 3],
}

impl TernarySeq {
    pub fn from_syms(syms: &[Sym]) -> Self {
        let len = syms.len();
        let mut words = vec![0u64; (len + BLOCK - 1) / BLOCK];
        for (i, s) in syms.iter().enumerate() {
            words[i / BLOCK] |= (s.code() as u64) << (2 * (i % BLOCK));
        }
        Self::from_words(words, len)
    }

    pub fn from_words(words: Vec<u64>, len: usize) -> Self {
        let mut super0 = Vec::new();
        let mut super1 = Vec::new();
        let mut counts = [0usize; 3];
        for (w, &word) in words.iter().enumerate() {
            if w % SUPER == 0 {
                super0.push(counts[0] as u64);
                super1.push(counts[1] as u64);
            }
            let upto = if (w + 1) * BLOCK <= len { BLOCK } else { len - w * BLOCK };
            let (c0, c1) = word_counts(word, upto);
            counts[0] += c0;
            counts[1] += c1;
            counts[2] += upto - c0 - c1;
        }
        super0.push(counts[0] as u64);
        super1.push(counts[1] as u64);
        TernarySeq {
            words,
            len,
            super0,
            super1,
            counts,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count(&self, s: Sym) -> usize {
        self.counts[s.code() as usize]
    }

    /// Symbol at 1-based position.
    #[inline]
    pub fn get(&self, i: usize) -> Sym {
        probes::bump();
        self.get_quiet(i)
    }

    #[inline]
    pub(crate) fn get_quiet(&self, i: usize) -> Sym {
        debug_assert!(1 <= i && i <= self.len);
        let p = i - 1;
        Sym::from_code(((self.words[p / BLOCK] >> (2 * (p % BLOCK))) & 3) as u8)
    }

    /// Occurrences of `s` among the first `i` symbols.
    pub fn rank(&self, s: Sym, i: usize) -> usize {
        probes::bump();
        self.rank_quiet(s, i)
    }

    fn rank_quiet(&self, s: Sym, i: usize) -> usize {
        debug_assert!(i <= self.len);
        if i == 0 {
            return 0;
        }
        match s {
            Sym::Bracket => self.rank01(i).0,
            Sym::Paren => self.rank01(i).1,
            Sym::Angle => {
                let (c0, c1) = self.rank01(i);
                i - c0 - c1
            }
        }
    }

    fn rank01(&self, i: usize) -> (usize, usize) {
        let p = i - 1;
        let w = p / BLOCK;
        let sb = w / SUPER;
        let mut c0 = self.super0[sb] as usize;
        let mut c1 = self.super1[sb] as usize;
        for k in (sb * SUPER)..w {
            let (a, b) = word_counts(self.words[k], BLOCK);
            c0 += a;
            c1 += b;
        }
        let (a, b) = word_counts(self.words[w], p % BLOCK + 1);
        (c0 + a, c1 + b)
    }

    /// Position of the j-th occurrence of `s` (1-based).
    pub fn select(&self, s: Sym, j: usize) -> usize {
        probes::bump();
        debug_assert!(1 <= j && j <= self.count(s), "select({s:?},{j}) out of range");
        // binary search superblocks on rank, then walk words
        let mut lo = 0usize;
        let mut hi = self.super0.len() - 1; // superblock index range
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            let c = match s {
                Sym::Bracket => self.super0[mid] as usize,
                Sym::Paren => self.super1[mid] as usize,
                Sym::Angle => (mid * SUPER * BLOCK).min(self.len) - (self.super0[mid] + self.super1[mid]) as usize,
            };
            if c < j {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let mut w = lo * SUPER;
        let mut before = match s {
            Sym::Bracket => self.super0[lo] as usize,
            Sym::Paren => self.super1[lo] as usize,
            Sym::Angle => (lo * SUPER * BLOCK).min(self.len) - (self.super0[lo] + self.super1[lo]) as usize,
        };
        loop {
            let upto = if (w + 1) * BLOCK <= self.len { BLOCK } else { self.len - w * BLOCK };
            let c = match s {
                Sym::Bracket => word_counts(self.words[w], upto).0,
                Sym::Paren => word_counts(self.words[w], upto).1,
                Sym::Angle => {
                    let (a, b) = word_counts(self.words[w], upto);
                    upto - a - b
                }
            };
            if before + c >= j {
                break;
            }
            before += c;
            w += 1;
        }
        let word = self.words[w];
        let mut need = j - before;
        let upto = if (w + 1) * BLOCK <= self.len { BLOCK } else { self.len - w * BLOCK };
        for k in 0..upto {
            let code = ((word >> (2 * k)) & 3) as u8;
            if code == s.code() {
                need -= 1;
                if need == 0 {
                    return w * BLOCK + k + 1;
                }
            }
        }
        unreachable!("select fell off the word");
    }

    pub fn payload_bits(&self) -> usize {
        2 * self.len
    }

    pub fn directory_bits(&self) -> usize {
        (self.super0.len() + self.super1.len()) * 64
    }
}

/// Counts of codes 0 and 1 among the first `upto` lanes of a word.
#[inline]
fn word_counts(word: u64, upto: usize) -> (usize, usize) {
    let mask = if upto == BLOCK { !0u64 } else { (1u64 << (2 * upto)) - 1 };
    let w = word & mask;
    let lo = w & 0x5555_5555_5555_5555;
    let hi = (w >> 1) & 0x5555_5555_5555_5555;
    let lanes = if upto == BLOCK { 0x5555_5555_5555_5555u64 } else { 0x5555_5555_5555_5555u64 & mask };
    let c0 = (!lo & !hi & lanes).count_ones() as usize;
    let c1 = (lo & !hi).count_ones() as usize;
    (c0, c1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn rank_select_vs_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.gen_range(0..3000);
            let syms: Vec<Sym> = (0..n).map(|_| Sym::from_code(rng.gen_range(0..3))).collect();
            let t = TernarySeq::from_syms(&syms);
            for s in [Sym::Bracket, Sym::Paren, Sym::Angle] {
                let mut cum = 0;
                for i in 1..=n {
                    if syms[i - 1] == s {
                        cum += 1;
                        assert_eq!(t.select(s, cum), i, "select {s:?} {cum}");
                    }
                    assert_eq!(t.rank(s, i), cum, "rank {s:?} {i}");
                }
                assert_eq!(t.count(s), cum);
            }
            for i in 1..=n {
                assert_eq!(t.get(i), syms[i - 1]);
            }
        }
    }
}
