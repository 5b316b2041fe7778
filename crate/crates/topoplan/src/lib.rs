//! Succinct topological model of a planar subdivision.
//!
//! A connected planar embedding with `n` nodes, `m` edges and `m - n + 2`
//! faces is stored as an interleaved parenthesis/bracket sequence of
//! `4m + 8` core bits plus small auxiliary indexes, answering adjacency,
//! incidence, listing and counting queries over nodes, edges and faces.
//!
//! The main pieces:
//!
//! * [`bits`], [`bp`], [`ternary`] — rank/select bitvectors, balanced
//!   parentheses navigation, and a small-alphabet sequence.
//! * [`embed`] — rotation-system parsing, face tracing and the traversal
//!   that emits the core sequence.
//! * [`turan`] / [`topo`] — constant-time navigation and the O(1)-per-item
//!   query set (endpoints, faces of an edge, listings).
//! * [`levels`] — the contraction hierarchy answering `neighbor(u,v)` and
//!   `faces_adjacent(x,y)` with bounded probes, plus edge retrieval.
//! * [`incidence`] — node-on-face tests and counting with repetition control.
//! * [`heavy`] — optional heavy-pair matrices for shared-face/node queries.
//! * [`oracle`] — brute-force ground truth used by `verify` and the tests.
//! * [`index`] / [`io`] — the assembled index, space accounting and the
//!   serialized file format.
//! * [`gen`] — deterministic planar input generators (grids, triangulations,
//!   random deletions).

pub mod bits;
pub mod bp;
pub mod embed;
pub mod gen;
pub mod heavy;
pub mod incidence;
pub mod index;
pub mod io;
pub mod levels;
pub mod oracle;
pub mod ternary;
pub mod topo;
pub mod turan;
pub mod verify;

// re-exports filled in as modules land

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid embedding: {0}")]
    Validation(String),
    #[error("bad parameter: {0}")]
    Param(String),
    #[error("id out of range: {0}")]
    Range(String),
    #[error("index file corrupt: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
