//! Deterministic generators of connected planar embeddings: grids, random
//! triangulations (incremental face splitting), and grids with random
//! non-bridge deletions. All outputs pass the parser's Euler check.

use crate::embed::{face_trace, Dart, EdgeEnds, RotationSystem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

/// R x C grid graph. Node (i,j) is id i*C + j + 1; rotations list edges in
/// ccw order E, N, W, S. Root is the (0,0) corner with its outer incidence.
pub fn grid(rows: usize, cols: usize) -> RotationSystem {
    assert!(rows >= 1 && cols >= 1 && rows * cols >= 2, "grid too small");
    let n = rows * cols;
    let h = |i: usize, j: usize| i * (cols - 1) + j + 1; // (i,j)-(i,j+1)
    let hcount = rows * (cols.saturating_sub(1));
    let v = |i: usize, j: usize| hcount + i * cols + j + 1; // (i,j)-(i+1,j)
    let m = hcount + cols * (rows.saturating_sub(1));
    let mut rotations = Vec::with_capacity(n);
    let mut endpoints = vec![(0, 0); m];
    for i in 0..rows {
        for j in 0..cols {
            let mut rot = Vec::with_capacity(4);
            if j + 1 < cols {
                rot.push(h(i, j)); // E
                endpoints[h(i, j) - 1] = (i * cols + j + 1, i * cols + j + 2);
            }
            if i + 1 < rows {
                rot.push(v(i, j)); // N
                endpoints[v(i, j) - 1] = (i * cols + j + 1, (i + 1) * cols + j + 1);
            }
            if j > 0 {
                rot.push(h(i, j - 1)); // W
            }
            if i > 0 {
                rot.push(v(i - 1, j)); // S
            }
            rotations.push(rot);
        }
    }
    RotationSystem {
        n,
        m,
        rotations,
        endpoints,
        root: 1,
        root_start: 1,
    }
}

/// Random maximal planar triangulation on `n >= 3` nodes: start from a
/// triangle and repeatedly insert a node into a random inner face. Yields
/// m = 3n - 6 edges.
pub fn triangulation(n: usize, seed: u64) -> RotationSystem {
    assert!(n >= 3, "triangulation needs at least 3 nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // rotations hold edge ids; edges hold endpoint pairs
    let mut rotations: Vec<Vec<usize>> = vec![vec![1, 3], vec![2, 1], vec![3, 2]];
    let mut endpoints: Vec<(usize, usize)> = vec![(1, 2), (2, 3), (3, 1)];
    // inner faces as node triples (a,b,c) in orbit order; the outer face
    // (orbit 2->1, 1->3, 3->2) is never split
    let mut faces: Vec<[usize; 3]> = vec![[1, 2, 3]];
    for newv in 4..=n {
        let fi = rng.gen_range(0..faces.len());
        let [a, b, c] = faces[fi];
        let ea = endpoints.len() + 1;
        endpoints.push((newv, a));
        let eb = endpoints.len() + 1;
        endpoints.push((newv, b));
        let ec = endpoints.len() + 1;
        endpoints.push((newv, c));
        // rotation of the new node: predecessors around the face
        rotations.push(vec![ea, ec, eb]);
        // at each corner, the new edge goes right after the edge toward the
        // orbit predecessor: at a after (a,c), at b after (a,b), at c after (b,c)
        let insert_after = |rot: &mut Vec<usize>, after_edge: usize, newe: usize| {
            let pos = rot.iter().position(|&e| e == after_edge).expect("edge in rotation");
            rot.insert(pos + 1, newe);
        };
        let edge_between = |endpoints: &[(usize, usize)], rot: &Vec<usize>, x: usize, y: usize| -> usize {
            *rot.iter()
                .find(|&&e| {
                    let (p, q) = endpoints[e - 1];
                    (p, q) == (x, y) || (p, q) == (y, x)
                })
                .expect("face edge present")
        };
        let eac = edge_between(&endpoints, &rotations[a - 1], a, c);
        insert_after(&mut rotations[a - 1], eac, ea);
        let eab = edge_between(&endpoints, &rotations[b - 1], a, b);
        insert_after(&mut rotations[b - 1], eab, eb);
        let ebc = edge_between(&endpoints, &rotations[c - 1], b, c);
        insert_after(&mut rotations[c - 1], ebc, ec);
        faces[fi] = [a, b, newv];
        faces.push([b, c, newv]);
        faces.push([c, a, newv]);
    }
    let m = endpoints.len();
    debug_assert_eq!(m, 3 * n - 6);
    // outer face is the orbit through dart (1 -> 3): slot of edge 3's
    // successor... the walk starts at the dart whose corner is outer; the
    // corner before edge (1,3) at node 1 lies on the outer orbit
    let root_start = rotations[0]
        .iter()
        .position(|&e| {
            let (p, q) = endpoints[e - 1];
            (p, q) == (1, 3) || (p, q) == (3, 1)
        })
        .unwrap()
        + 1;
    RotationSystem {
        n,
        m,
        rotations,
        endpoints,
        root: 1,
        root_start,
    }
}

/// Grid with up to `deletions` random non-bridge edges removed (bridges are
/// detected via a union-find over face ids, so connectivity and the Euler
/// invariant are preserved).
pub fn random_deletion_grid(rows: usize, cols: usize, deletions: usize, seed: u64) -> RotationSystem {
    let base = grid(rows, cols);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ends = EdgeEnds::resolve(&base).expect("grid is valid");
    let faces = face_trace(&base, &ends);
    let mut face_at: Vec<Vec<usize>> = (1..=base.n).map(|v| vec![0; base.degree(v)]).collect();
    for (id, f) in faces.iter().enumerate() {
        for d in &f.darts {
            face_at[d.node - 1][d.slot - 1] = id + 1;
        }
    }
    let outer_face = face_at[0][base.root_start - 1];

    struct Dsu(Vec<usize>);
    impl Dsu {
        fn find(&mut self, x: usize) -> usize {
            if self.0[x] != x {
                let r = self.find(self.0[x]);
                self.0[x] = r;
            }
            self.0[x]
        }
        fn union(&mut self, a: usize, b: usize) {
            let (ra, rb) = (self.find(a), self.find(b));
            self.0[ra] = rb;
        }
    }
    let mut dsu = Dsu((0..=faces.len()).collect());
    let face_of = |d: Dart, face_at: &Vec<Vec<usize>>| face_at[d.node - 1][d.slot - 1];

    let mut removed = vec![false; base.m];
    let mut done = 0;
    let mut attempts = 0;
    while done < deletions && attempts < 20 * deletions + 100 {
        attempts += 1;
        let e = rng.gen_range(1..=base.m);
        if removed[e - 1] {
            continue;
        }
        let (d0, d1) = ends.of(e);
        let (f0, f1) = (face_of(d0, &face_at), face_of(d1, &face_at));
        if dsu.find(f0) == dsu.find(f1) {
            continue; // bridge (or would merge a face with itself)
        }
        dsu.union(f0, f1);
        removed[e - 1] = true;
        done += 1;
    }

    // compact surviving edges
    let mut new_id = vec![0usize; base.m + 1];
    let mut endpoints = Vec::new();
    for e in 1..=base.m {
        if !removed[e - 1] {
            endpoints.push(base.endpoints[e - 1]);
            new_id[e] = endpoints.len();
        }
    }
    let rotations: Vec<Vec<usize>> = base
        .rotations
        .iter()
        .map(|rot| rot.iter().filter(|&&e| !removed[e - 1]).map(|&e| new_id[e]).collect())
        .collect();

    // root: any dart whose corner merged into the outer region
    let outer_rep = dsu.find(outer_face);
    let mut root = 0;
    let mut root_start = 0;
    'outer: for v in 1..=base.n {
        let mut kept_slot = 0;
        for (s, &e) in base.rotations[v - 1].iter().enumerate() {
            if removed[e - 1] {
                continue;
            }
            kept_slot += 1;
            let d = Dart { node: v, slot: s + 1 };
            if dsu.find(face_of(d, &face_at)) == outer_rep {
                root = v;
                root_start = kept_slot;
                break 'outer;
            }
        }
    }
    assert!(root != 0, "outer face lost all corners");
    RotationSystem {
        n: base.n,
        m: endpoints.len(),
        rotations,
        endpoints,
        root,
        root_start,
    }
}

/// Wheel: a hub adjacent to every rim node of a cycle. Exercises a single
/// very high degree node (hub id 1).
pub fn wheel(rim: usize) -> RotationSystem {
    assert!(rim >= 3);
    let n = rim + 1;
    // spokes 1..rim: (1, 1+k); rim edges rim+1..2rim: (1+k, 1+k%rim+1)
    let mut endpoints = Vec::with_capacity(2 * rim);
    for k in 1..=rim {
        endpoints.push((1, 1 + k));
    }
    for k in 1..=rim {
        endpoints.push((1 + k, 1 + k % rim + 1));
    }
    let mut rotations = Vec::with_capacity(n);
    rotations.push((1..=rim).collect::<Vec<_>>());
    for k in 1..=rim {
        let prev_rim = rim + (k + rim - 2) % rim + 1;
        let spoke = k;
        let next_rim = rim + k;
        rotations.push(vec![next_rim, spoke, prev_rim]);
    }
    RotationSystem {
        n,
        m: 2 * rim,
        rotations,
        endpoints,
        root: 2,
        root_start: 1,
    }
}

/// Two stars joined at their centers; forces heavy nodes for the pair
/// matrices at small sizes. Centers are nodes 1 and 2 with `leaves` leaves
/// each.
pub fn double_star(leaves: usize) -> RotationSystem {
    let n = 2 + 2 * leaves;
    let m = 1 + 2 * leaves;
    let mut endpoints = vec![(1, 2)];
    for k in 0..leaves {
        endpoints.push((1, 3 + k));
    }
    for k in 0..leaves {
        endpoints.push((2, 3 + leaves + k));
    }
    let mut rotations = Vec::with_capacity(n);
    let mut rot1 = vec![1];
    rot1.extend((0..leaves).map(|k| 2 + k));
    rotations.push(rot1);
    let mut rot2 = vec![1];
    rot2.extend((0..leaves).map(|k| 2 + leaves + k));
    rotations.push(rot2);
    for k in 0..leaves {
        rotations.push(vec![2 + k]);
    }
    for k in 0..leaves {
        rotations.push(vec![2 + leaves + k]);
    }
    RotationSystem {
        n,
        m,
        rotations,
        endpoints,
        root: 1,
        root_start: 1,
    }
}

/// A small multigraph: `parallel` edges between two nodes plus `loops`
/// self-loops at node 1, planar-embedded as nested arcs.
pub fn banana(parallel: usize, loops: usize) -> RotationSystem {
    assert!(parallel >= 1);
    let n = 2;
    let m = parallel + loops;
    let mut endpoints = Vec::new();
    for _ in 0..parallel {
        endpoints.push((1, 2));
    }
    for _ in 0..loops {
        endpoints.push((1, 1));
    }
    // at node 1: parallels in order, then the loops nested after them
    let mut rot1: Vec<usize> = (1..=parallel).collect();
    for l in 0..loops {
        rot1.push(parallel + l + 1);
        rot1.push(parallel + l + 1);
    }
    // at node 2 the parallels reverse
    let rot2: Vec<usize> = (1..=parallel).rev().collect();
    RotationSystem {
        n,
        m,
        rotations: vec![rot1, rot2],
        endpoints,
        root: 1,
        root_start: 1,
    }
}

/// Named sizes for the verify battery and benchmarks.
pub fn by_kind(kind: &str, a: usize, b: usize, seed: u64) -> crate::Result<RotationSystem> {
    match kind {
        "grid" => Ok(grid(a, b)),
        "triangulation" => Ok(triangulation(a, seed)),
        "random-deletion" => Ok(random_deletion_grid(a, b, (a * b) / 3, seed)),
        other => Err(crate::Error::Param(format!("unknown generator '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::parse_rotation_system;

    fn roundtrip(rs: &RotationSystem) -> RotationSystem {
        parse_rotation_system(&rs.to_text()).expect("generated embedding is valid")
    }

    #[test]
    fn grid_counts() {
        let g = roundtrip(&grid(2, 2));
        assert_eq!((g.n, g.m), (4, 4));
        assert_eq!(g.face_count(), 2);
        let g = roundtrip(&grid(20, 20));
        assert_eq!((g.n, g.m), (400, 760));
        assert_eq!(g.face_count(), 362);
        roundtrip(&grid(1, 2));
        roundtrip(&grid(7, 1));
        roundtrip(&grid(1, 30));
    }

    #[test]
    fn triangulation_counts() {
        for n in [3usize, 4, 5, 10, 100, 1000] {
            let t = roundtrip(&triangulation(n, 7));
            assert_eq!(t.m, 3 * n - 6, "n={n}");
            assert_eq!(t.face_count(), 2 * n - 4);
        }
    }

    #[test]
    fn deletion_grid_valid() {
        for seed in 0..5 {
            let g = roundtrip(&random_deletion_grid(8, 11, 25, seed));
            assert!(g.m >= 8 * 11 - 1);
            assert!(g.m < 8 * 10 + 11 * 7);
        }
    }

    #[test]
    fn fixtures_valid() {
        let w = roundtrip(&wheel(12));
        assert_eq!(w.face_count(), 12 + 1);
        let d = roundtrip(&double_star(9));
        assert_eq!(d.face_count(), 1);
        let b = roundtrip(&banana(3, 2));
        assert_eq!(b.face_count(), b.m + 2 - b.n);
    }
}

