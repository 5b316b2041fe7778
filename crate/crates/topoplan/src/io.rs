//! Index file format: little-endian, section-tabled, versioned, with a
//! CRC-32 per section. Rank/select and navigation directories are rebuilt
//! on load (they are deterministic functions of the payload), so a
//! round-trip reproduces query behavior bit for bit.

use crate::bits::BitSeq;
use crate::bp::BalancedSeq;
use crate::heavy::{HeavyPairIndex, PairMatrix};
use crate::incidence::{CountIndex, IncidenceIndex};
use crate::index::{BuildParams, HeavyMode, NodeIdMap, TopoIndex};
use crate::levels::{ExplicitTop, LevelStats, LevelStructure, NeighborIndex, NeighborParams};
use crate::ternary::TernarySeq;
use crate::turan::TuranIndex;
use crate::{Error, Result};
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"TOPOPLAN";
const VERSION: u32 = 1;

mod section {
    pub const HEADER: u32 = 1;
    pub const TURAN: u32 = 2;
    pub const PRIMAL_NBR: u32 = 3;
    pub const DUAL_NBR: u32 = 4;
    pub const INCIDENCE: u32 = 5;
    pub const COUNTS: u32 = 6;
    pub const HEAVY: u32 = 7;
    pub const NODEMAP: u32 = 8;
}

// CRC-32 (IEEE), table built at compile time.
const CRC_TABLE: [u32; 256] = {
    let mut table = [0u32; 256];
    let mut i = 0;
    while i < 256 {
        let mut c = i as u32;
        let mut k = 0;
        while k < 8 {
            c = if c & 1 == 1 { 0xEDB8_8320 ^ (c >> 1) } else { c >> 1 };
            k += 1;
        }
        table[i] = c;
        i += 1;
    }
    table
};

pub fn crc32(data: &[u8]) -> u32 {
    let mut c = !0u32;
    for &b in data {
        c = CRC_TABLE[((c ^ b as u32) & 0xff) as usize] ^ (c >> 8);
    }
    !c
}

#[derive(Default)]
struct Enc {
    buf: Vec<u8>,
}

impl Enc {
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }

    fn words(&mut self, words: &[u64]) {
        self.usize(words.len());
        for &w in words {
            self.u64(w);
        }
    }

    fn usizes(&mut self, xs: &[usize]) {
        self.usize(xs.len());
        for &x in xs {
            self.usize(x);
        }
    }

    fn bitseq(&mut self, b: &BitSeq) {
        self.usize(b.len());
        self.words(b.words());
    }

    fn balanced(&mut self, b: &BalancedSeq) {
        self.bitseq(b.bits());
    }

    fn ternary(&mut self, t: &TernarySeq) {
        self.usize(t.len());
        self.words(t.words());
    }
}

struct Dec<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Dec<'a> {
    fn new(buf: &'a [u8]) -> Dec<'a> {
        Dec { buf, pos: 0 }
    }

    fn u64(&mut self) -> Result<u64> {
        if self.pos + 8 > self.buf.len() {
            return Err(Error::Corrupt("section truncated".into()));
        }
        let v = u64::from_le_bytes(self.buf[self.pos..self.pos + 8].try_into().unwrap());
        self.pos += 8;
        Ok(v)
    }

    fn usize(&mut self) -> Result<usize> {
        Ok(self.u64()? as usize)
    }

    fn words(&mut self) -> Result<Vec<u64>> {
        let len = self.usize()?;
        if len > self.buf.len() / 8 + 1 {
            return Err(Error::Corrupt("implausible word count".into()));
        }
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(self.u64()?);
        }
        Ok(out)
    }

    fn usizes(&mut self) -> Result<Vec<usize>> {
        let len = self.usize()?;
        if len > self.buf.len() / 8 + 1 {
            return Err(Error::Corrupt("implausible list length".into()));
        }
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(self.usize()?);
        }
        Ok(out)
    }

    fn bitseq(&mut self) -> Result<BitSeq> {
        let len = self.usize()?;
        let words = self.words()?;
        if words.len() != (len + 63) / 64 {
            return Err(Error::Corrupt("bitvector length mismatch".into()));
        }
        Ok(BitSeq::from_words(words, len))
    }

    fn balanced(&mut self) -> Result<BalancedSeq> {
        Ok(BalancedSeq::from_bits(self.bitseq()?))
    }

    fn ternary(&mut self) -> Result<TernarySeq> {
        let len = self.usize()?;
        let words = self.words()?;
        if words.len() != (len + 31) / 32 {
            return Err(Error::Corrupt("ternary length mismatch".into()));
        }
        Ok(TernarySeq::from_words(words, len))
    }

    fn done(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::Corrupt("trailing bytes in section".into()));
        }
        Ok(())
    }
}

fn enc_top(e: &mut Enc, top: &ExplicitTop) {
    let (mask, keys, vals, entries) = top.raw();
    e.u64(mask);
    e.usize(entries);
    e.words(keys);
    e.words(vals);
}

fn dec_top(d: &mut Dec) -> Result<ExplicitTop> {
    let mask = d.u64()?;
    let entries = d.usize()?;
    let keys = d.words()?;
    let vals = d.words()?;
    Ok(ExplicitTop::from_raw(mask, keys, vals, entries))
}

fn enc_nbr(e: &mut Enc, n: &NeighborIndex) {
    e.usize(n.params.f);
    e.usize(n.params.k);
    e.usize(n.base_edges);
    e.usize(n.levels.len());
    for l in &n.levels {
        e.ternary(&l.seq);
        e.balanced(&l.parens);
        e.balanced(&l.brackets);
        e.balanced(&l.angles);
        for v in [l.stats.nodes, l.stats.edges, l.stats.symbols, l.stats.bracket_pairs, l.stats.angle_pairs] {
            e.usize(v);
        }
    }
    e.usize(n.survivors.len());
    for d in &n.survivors {
        e.bitseq(d);
    }
    e.usize(n.bracket_survivors.len());
    for c in &n.bracket_survivors {
        e.bitseq(c);
    }
    enc_top(e, &n.top);
}

fn dec_nbr(d: &mut Dec) -> Result<NeighborIndex> {
    let f = d.usize()?;
    let k = d.usize()?;
    let base_edges = d.usize()?;
    let params = NeighborParams::new(f, k).map_err(|e| Error::Corrupt(format!("bad params: {e}")))?;
    let nlev = d.usize()?;
    let mut levels = Vec::with_capacity(nlev);
    for _ in 0..nlev {
        let seq = d.ternary()?;
        let parens = d.balanced()?;
        let brackets = d.balanced()?;
        let angles = d.balanced()?;
        let stats = LevelStats {
            nodes: d.usize()?,
            edges: d.usize()?,
            symbols: d.usize()?,
            bracket_pairs: d.usize()?,
            angle_pairs: d.usize()?,
        };
        levels.push(LevelStructure { seq, parens, brackets, angles, stats });
    }
    let nd = d.usize()?;
    let mut survivors = Vec::with_capacity(nd);
    for _ in 0..nd {
        survivors.push(d.bitseq()?);
    }
    let nc = d.usize()?;
    let mut bracket_survivors = Vec::with_capacity(nc);
    for _ in 0..nc {
        bracket_survivors.push(d.bitseq()?);
    }
    let top = dec_top(d)?;
    Ok(NeighborIndex {
        levels,
        survivors,
        bracket_survivors,
        top,
        params,
        base_edges,
    })
}

fn enc_matrix(e: &mut Enc, m: &PairMatrix) {
    e.usizes(&m.heavy);
    e.usize(m.bits.len());
    e.buf.extend_from_slice(&m.bits);
    match &m.witnesses {
        None => e.u64(0),
        Some(w) => {
            e.u64(1);
            e.usize(w.len());
            for &x in w {
                e.buf.extend_from_slice(&x.to_le_bytes());
            }
        }
    }
}

fn dec_matrix(d: &mut Dec) -> Result<PairMatrix> {
    let heavy = d.usizes()?;
    let blen = d.usize()?;
    if d.pos + blen > d.buf.len() {
        return Err(Error::Corrupt("matrix truncated".into()));
    }
    let bits = d.buf[d.pos..d.pos + blen].to_vec();
    d.pos += blen;
    let witnesses = if d.u64()? == 1 {
        let wlen = d.usize()?;
        let mut w = Vec::with_capacity(wlen);
        for _ in 0..wlen {
            if d.pos + 4 > d.buf.len() {
                return Err(Error::Corrupt("witness array truncated".into()));
            }
            w.push(u32::from_le_bytes(d.buf[d.pos..d.pos + 4].try_into().unwrap()));
            d.pos += 4;
        }
        Some(w)
    } else {
        None
    };
    Ok(PairMatrix { heavy, bits, witnesses })
}

/// Serialize the whole index to bytes.
pub fn to_bytes(idx: &TopoIndex) -> Vec<u8> {
    let mut sections: Vec<(u32, Vec<u8>)> = Vec::new();

    let mut h = Enc::default();
    h.usize(idx.turan.node_count());
    h.usize(idx.turan.edge_count());
    h.usize(idx.params.neighbor.f);
    h.usize(idx.params.neighbor.k);
    h.usize(idx.params.f_inc);
    h.usize(idx.params.f_cnt);
    h.usize(idx.params.f_hp);
    h.u64(match idx.params.heavy {
        HeavyMode::Off => 0,
        HeavyMode::On => 1,
        HeavyMode::WithWitness => 2,
    });
    sections.push((section::HEADER, h.buf));

    let mut t = Enc::default();
    t.bitseq(idx.turan.a());
    t.balanced(idx.turan.b());
    t.balanced(idx.turan.bstar());
    sections.push((section::TURAN, t.buf));

    let mut p = Enc::default();
    enc_nbr(&mut p, &idx.primal_nbr);
    sections.push((section::PRIMAL_NBR, p.buf));
    let mut dd = Enc::default();
    enc_nbr(&mut dd, &idx.dual_nbr);
    sections.push((section::DUAL_NBR, dd.buf));

    let mut i = Enc::default();
    i.usize(idx.incidence.f_inc);
    enc_top(&mut i, &idx.incidence.heavy_pairs);
    sections.push((section::INCIDENCE, i.buf));

    let mut c = Enc::default();
    c.usize(idx.counts.f_cnt);
    c.usize(idx.counts.node_counts.len());
    for &(a, b, x, y) in &idx.counts.node_counts {
        c.usize(a);
        c.usize(b);
        c.usize(x);
        c.usize(y);
    }
    c.usize(idx.counts.face_counts.len());
    for &(a, b, x, y) in &idx.counts.face_counts {
        c.usize(a);
        c.usize(b);
        c.usize(x);
        c.usize(y);
    }
    sections.push((section::COUNTS, c.buf));

    if let Some(hp) = &idx.heavy {
        let mut e = Enc::default();
        e.usize(hp.f_hp);
        e.u64(hp.with_witness as u64);
        enc_matrix(&mut e, &hp.node_face_share);
        enc_matrix(&mut e, &hp.face_node_share);
        enc_matrix(&mut e, &hp.node_neighbor_share);
        enc_matrix(&mut e, &hp.face_adjacent_share);
        sections.push((section::HEAVY, e.buf));
    }

    let mut nm = Enc::default();
    nm.usizes(&idx.node_map.input_of_dfs);
    nm.usizes(&idx.node_map.dfs_of_input);
    sections.push((section::NODEMAP, nm.buf));

    // assemble: magic, version, count, table, blobs
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(sections.len() as u32).to_le_bytes());
    let table_at = out.len();
    out.resize(out.len() + sections.len() * 24, 0);
    for (i, (id, blob)) in sections.iter().enumerate() {
        let off = out.len() as u64;
        let entry = table_at + i * 24;
        out[entry..entry + 4].copy_from_slice(&id.to_le_bytes());
        out[entry + 4..entry + 12].copy_from_slice(&off.to_le_bytes());
        out[entry + 12..entry + 20].copy_from_slice(&(blob.len() as u64).to_le_bytes());
        out[entry + 20..entry + 24].copy_from_slice(&crc32(blob).to_le_bytes());
        out.extend_from_slice(blob);
    }
    out
}

/// Parse an index file, validating checksums and rebuilding directories.
pub fn from_bytes(data: &[u8]) -> Result<TopoIndex> {
    if data.len() < 16 || &data[..8] != MAGIC {
        return Err(Error::Corrupt("bad magic".into()));
    }
    let version = u32::from_le_bytes(data[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Corrupt(format!("unsupported version {version}")));
    }
    let count = u32::from_le_bytes(data[12..16].try_into().unwrap()) as usize;
    if data.len() < 16 + count * 24 {
        return Err(Error::Corrupt("section table truncated".into()));
    }
    let mut blobs: std::collections::HashMap<u32, &[u8]> = std::collections::HashMap::new();
    for i in 0..count {
        let entry = 16 + i * 24;
        let id = u32::from_le_bytes(data[entry..entry + 4].try_into().unwrap());
        let off = u64::from_le_bytes(data[entry + 4..entry + 12].try_into().unwrap()) as usize;
        let len = u64::from_le_bytes(data[entry + 12..entry + 20].try_into().unwrap()) as usize;
        let crc = u32::from_le_bytes(data[entry + 20..entry + 24].try_into().unwrap());
        if off + len > data.len() {
            return Err(Error::Corrupt(format!("section {id} out of bounds")));
        }
        let blob = &data[off..off + len];
        if crc32(blob) != crc {
            return Err(Error::Corrupt(format!("checksum mismatch in section {id}")));
        }
        blobs.insert(id, blob);
    }
    let get = |id: u32, name: &str| -> Result<&[u8]> {
        blobs
            .get(&id)
            .copied()
            .ok_or_else(|| Error::Corrupt(format!("missing section {name}")))
    };

    let mut h = Dec::new(get(section::HEADER, "header")?);
    let n = h.usize()?;
    let m = h.usize()?;
    let f = h.usize()?;
    let k = h.usize()?;
    let f_inc = h.usize()?;
    let f_cnt = h.usize()?;
    let f_hp = h.usize()?;
    let heavy_mode = match h.u64()? {
        0 => HeavyMode::Off,
        1 => HeavyMode::On,
        2 => HeavyMode::WithWitness,
        x => return Err(Error::Corrupt(format!("bad heavy mode {x}"))),
    };
    h.done()?;

    let mut t = Dec::new(get(section::TURAN, "turan")?);
    let a = t.bitseq()?;
    let b = t.balanced()?;
    let bstar = t.balanced()?;
    t.done()?;
    if a.len() != 2 * (m + 2) || b.len() != 2 * n || n > m + 1 || bstar.len() != 2 * (m + 2 - n) {
        return Err(Error::Corrupt("core sequence sizes inconsistent with header".into()));
    }
    let turan = TuranIndex::new(a, b, bstar, n, m);

    let mut p = Dec::new(get(section::PRIMAL_NBR, "primal levels")?);
    let primal_nbr = dec_nbr(&mut p)?;
    p.done()?;
    let mut dd = Dec::new(get(section::DUAL_NBR, "dual levels")?);
    let dual_nbr = dec_nbr(&mut dd)?;
    dd.done()?;

    let mut i = Dec::new(get(section::INCIDENCE, "incidence")?);
    let inc_f = i.usize()?;
    let heavy_pairs = dec_top(&mut i)?;
    i.done()?;
    let incidence = IncidenceIndex { f_inc: inc_f, heavy_pairs };

    let mut c = Dec::new(get(section::COUNTS, "counts")?);
    let cf = c.usize()?;
    let nn = c.usize()?;
    let mut node_counts = Vec::with_capacity(nn);
    for _ in 0..nn {
        node_counts.push((c.usize()?, c.usize()?, c.usize()?, c.usize()?));
    }
    let nf = c.usize()?;
    let mut face_counts = Vec::with_capacity(nf);
    for _ in 0..nf {
        face_counts.push((c.usize()?, c.usize()?, c.usize()?, c.usize()?));
    }
    c.done()?;
    let counts = CountIndex { f_cnt: cf, node_counts, face_counts };

    let heavy = match blobs.get(&section::HEAVY) {
        None => None,
        Some(blob) => {
            let mut e = Dec::new(blob);
            let fhp = e.usize()?;
            let with_witness = e.u64()? == 1;
            let node_face_share = dec_matrix(&mut e)?;
            let face_node_share = dec_matrix(&mut e)?;
            let node_neighbor_share = dec_matrix(&mut e)?;
            let face_adjacent_share = dec_matrix(&mut e)?;
            e.done()?;
            Some(HeavyPairIndex {
                f_hp: fhp,
                with_witness,
                node_face_share,
                face_node_share,
                node_neighbor_share,
                face_adjacent_share,
            })
        }
    };

    let mut nm = Dec::new(get(section::NODEMAP, "node map")?);
    let input_of_dfs = nm.usizes()?;
    let dfs_of_input = nm.usizes()?;
    nm.done()?;

    Ok(TopoIndex {
        turan,
        primal_nbr,
        dual_nbr,
        incidence,
        counts,
        heavy,
        params: BuildParams {
            neighbor: NeighborParams::new(f, k).map_err(|e| Error::Corrupt(format!("{e}")))?,
            f_inc,
            f_cnt,
            f_hp,
            heavy: heavy_mode,
        },
        node_map: NodeIdMap { input_of_dfs, dfs_of_input },
    })
}

pub fn save(idx: &TopoIndex, path: &Path) -> Result<()> {
    let bytes = to_bytes(idx);
    let mut f = std::fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<TopoIndex> {
    let mut f = std::fs::File::open(path)?;
    let mut data = Vec::new();
    f.read_to_end(&mut data)?;
    from_bytes(&data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{BuildParams, HeavyMode};
    use crate::topo::{FaceId, NodeId};

    #[test]
    fn roundtrip_identical_answers() {
        let rs = crate::gen::triangulation(200, 5);
        let mut params = BuildParams::defaults_for(rs.m);
        params.heavy = HeavyMode::WithWitness;
        params.f_hp = 12;
        let built = TopoIndex::build(&rs, params).unwrap();
        let bytes = to_bytes(&built.index);
        let loaded = from_bytes(&bytes).unwrap();
        for u in 1..=rs.n {
            for v in (u..=rs.n).step_by(7) {
                assert_eq!(
                    built.index.neighbor(NodeId(u), NodeId(v)).unwrap(),
                    loaded.neighbor(NodeId(u), NodeId(v)).unwrap()
                );
                assert_eq!(
                    built.index.connecting_edge(NodeId(u), NodeId(v)).unwrap(),
                    loaded.connecting_edge(NodeId(u), NodeId(v)).unwrap()
                );
            }
        }
        for x in 1..=built.index.face_count() {
            for y in (x..=built.index.face_count()).step_by(5) {
                assert_eq!(
                    built.index.faces_adjacent(FaceId(x), FaceId(y)).unwrap(),
                    loaded.faces_adjacent(FaceId(x), FaceId(y)).unwrap()
                );
            }
        }
        // serialization is deterministic
        assert_eq!(bytes, to_bytes(&loaded));
    }

    #[test]
    fn corrupt_rejected() {
        let rs = crate::gen::grid(4, 4);
        let built = TopoIndex::build(&rs, BuildParams::defaults_for(rs.m)).unwrap();
        let mut bytes = to_bytes(&built.index);
        // flip one payload bit
        let at = bytes.len() - 9;
        bytes[at] ^= 0x10;
        match from_bytes(&bytes) {
            Err(crate::Error::Corrupt(msg)) => assert!(msg.contains("checksum"), "{msg}"),
            other => panic!("corruption not detected: {other:?}"),
        }
        // truncated magic
        assert!(from_bytes(&bytes[..4]).is_err());
    }
}

