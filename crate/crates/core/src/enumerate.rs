//! Full enumeration of the surface mod `p` with both adjacency structures.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::field::PrimeModulus;
use crate::surface::{GraphKind, MarkoffTriple};

/// Default largest modulus that may be enumerated.
pub const DEFAULT_ENUMERATION_CAP: u64 = 3000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerationError {
    #[error("p = {p} exceeds the enumeration cap {cap}")]
    TooLarge { p: u64, cap: u64 },
}

/// Every surface point, sorted lexicographically, with neighbour indices.
#[derive(Clone, Debug)]
pub struct SurfaceEnumeration {
    p: PrimeModulus,
    vertices: Vec<MarkoffTriple>,
    /// `row_start[x1 * p + x2]..row_start[x1 * p + x2 + 1]` is the block of
    /// vertices with that prefix (at most two).
    row_start: Vec<u32>,
    adjacency_g: Vec<[u32; 3]>,
    adjacency_ghat: Vec<[u32; 3]>,
}

/// `p^2 + (-1/p)·3p`, valid for `p > 3`.
pub fn expected_vertex_count(p: &PrimeModulus) -> u64 {
    let n = p.get();
    let minus_one = p.legendre(n - 1) as i64;
    (n as i64 * n as i64 + minus_one * 3 * n as i64) as u64
}

/// Square root table over `F_p`: `table[a]` is the smaller root of `a`.
fn sqrt_table(p: &PrimeModulus) -> Vec<Option<u32>> {
    let n = p.get() as usize;
    let mut table = vec![None; n];
    for r in (0..=n / 2).rev() {
        table[p.mul(r as u64, r as u64) as usize] = Some(r as u32);
    }
    table
}

pub fn enumerate_surface(p: &PrimeModulus) -> Result<SurfaceEnumeration, EnumerationError> {
    enumerate_surface_with_cap(p, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_surface_with_cap(
    p: &PrimeModulus,
    cap: u64,
) -> Result<SurfaceEnumeration, EnumerationError> {
    let n = p.get();
    if n > cap {
        return Err(EnumerationError::TooLarge { p: n, cap });
    }
    let roots = sqrt_table(p);
    let half = p.inv(2).expect("p is odd");
    // x3 solves x3^2 - 3 x1 x2 x3 + (x1^2 + x2^2) = 0
    let rows: Vec<(Vec<MarkoffTriple>, Vec<u8>)> = (0..n)
        .into_par_iter()
        .map(|x1| {
            let mut points = Vec::new();
            let mut counts = Vec::with_capacity(n as usize);
            let sq1 = p.mul(x1, x1);
            for x2 in 0..n {
                let b = p.mul(3, p.mul(x1, x2));
                let c = p.add(sq1, p.mul(x2, x2));
                let disc = p.sub(p.mul(b, b), p.mul(4, c));
                let before = points.len();
                if let Some(r) = roots[disc as usize] {
                    let r = r as u64;
                    let lo = p.mul(p.sub(b, r), half);
                    let hi = p.mul(p.add(b, r), half);
                    let (a, z) = if lo <= hi { (lo, hi) } else { (hi, lo) };
                    for x3 in [a, z] {
                        if points.len() > before && points.last() == Some(&MarkoffTriple([x1, x2, x3])) {
                            continue;
                        }
                        if [x1, x2, x3] != [0, 0, 0] {
                            points.push(MarkoffTriple([x1, x2, x3]));
                        }
                    }
                }
                counts.push((points.len() - before) as u8);
            }
            (points, counts)
        })
        .collect();

    let mut vertices = Vec::new();
    let mut row_start = Vec::with_capacity((n * n + 1) as usize);
    for (points, counts) in rows {
        let mut offset = vertices.len() as u32;
        for c in counts {
            row_start.push(offset);
            offset += c as u32;
        }
        vertices.extend(points);
    }
    row_start.push(vertices.len() as u32);

    let mut e = SurfaceEnumeration {
        p: *p,
        vertices,
        row_start,
        adjacency_g: Vec::new(),
        adjacency_ghat: Vec::new(),
    };
    let adjacency = |graph: GraphKind| -> Vec<[u32; 3]> {
        e.vertices
            .par_iter()
            .map(|t| {
                t.neighbors(p, graph)
                    .map(|u| e.index_of(&u).expect("moves preserve the surface"))
            })
            .collect()
    };
    let g = adjacency(GraphKind::G);
    let ghat = adjacency(GraphKind::GHat);
    e.adjacency_g = g;
    e.adjacency_ghat = ghat;
    Ok(e)
}

impl SurfaceEnumeration {
    pub fn modulus(&self) -> &PrimeModulus {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[MarkoffTriple] {
        &self.vertices
    }

    pub fn vertex(&self, index: u32) -> MarkoffTriple {
        self.vertices[index as usize]
    }

    pub fn index_of(&self, t: &MarkoffTriple) -> Option<u32> {
        let n = self.p.get();
        let [x1, x2, _] = t.0;
        if x1 >= n || x2 >= n {
            return None;
        }
        let row = (x1 * n + x2) as usize;
        let (lo, hi) = (self.row_start[row], self.row_start[row + 1]);
        (lo..hi).find(|&i| self.vertices[i as usize] == *t)
    }

    /// Neighbour indices under the generators of `graph`, in index order.
    pub fn adjacency(&self, graph: GraphKind) -> &[[u32; 3]] {
        match graph {
            GraphKind::G => &self.adjacency_g,
            GraphKind::GHat => &self.adjacency_ghat,
        }
    }

    /// Writes `x1,x2,x3;n1,n2,n3` per vertex.
    pub fn write_adjacency<W: Write>(&self, graph: GraphKind, mut out: W) -> io::Result<()> {
        for (t, nb) in self.vertices.iter().zip(self.adjacency(graph)) {
            writeln!(
                out,
                "{},{},{};{},{},{}",
                t.0[0], t.0[1], t.0[2], nb[0], nb[1], nb[2]
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prime(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn brute_count(n: u64) -> usize {
        let mut count = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let v = a * a + b * b + c * c;
                    if (a, b, c) != (0, 0, 0) && v % n == (3 * a * b * c) % n {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_surface(&prime(7)).unwrap().len(), 28);
        assert_eq!(enumerate_surface(&prime(13)).unwrap().len(), 208);
        assert_eq!(enumerate_surface(&prime(5)).unwrap().len(), 40);
        assert_eq!(enumerate_surface(&prime(3)).unwrap().len(), 8);
        for n in [3u64, 5, 7, 11, 13, 17, 19, 23] {
            assert_eq!(enumerate_surface(&prime(n)).unwrap().len(), brute_count(n), "p = {n}");
        }
    }

    #[test]
    fn count_formula_up_to_211() {
        for n in (5..212u64).filter(|&n| crate::field::is_prime_u64(n)) {
            let p = prime(n);
            assert_eq!(enumerate_surface(&p).unwrap().len() as u64, expected_vertex_count(&p));
        }
    }

    #[test]
    fn sorted_indexed_and_regular() {
        let p = prime(29);
        let e = enumerate_surface(&p).unwrap();
        assert!(e.vertices().windows(2).all(|w| w[0] < w[1]));
        for (i, t) in e.vertices().iter().enumerate() {
            assert!(t.on_surface(&p));
            assert_eq!(e.index_of(t), Some(i as u32));
            for graph in [GraphKind::G, GraphKind::GHat] {
                let nb = e.adjacency(graph)[i];
                assert_eq!(nb.map(|j| e.vertex(j)), t.neighbors(&p, graph));
            }
        }
        assert_eq!(e.index_of(&MarkoffTriple([1, 1, 3])), None);
    }

    #[test]
    fn cap_is_enforced() {
        let err = enumerate_surface_with_cap(&prime(101), 100).unwrap_err();
        assert_eq!(err, EnumerationError::TooLarge { p: 101, cap: 100 });
    }

    #[test]
    fn adjacency_export_format() {
        let e = enumerate_surface(&prime(5)).unwrap();
        let mut buf = Vec::new();
        e.write_adjacency(GraphKind::G, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 40);
        let first = text.lines().next().unwrap();
        let (coords, nb) = first.split_once(';').unwrap();
        assert_eq!(coords.split(',').count(), 3);
        assert_eq!(nb.split(',').count(), 3);
    }
}
