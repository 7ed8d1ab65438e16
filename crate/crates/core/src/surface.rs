//! Points of the Markoff surface `x1^2 + x2^2 + x3^2 = 3 x1 x2 x3` over `F_p`
//! and the moves between them.
//!
//! Triples are bare residue arrays; every operation takes the modulus
//! explicitly so that a triple costs 24 bytes in enumerations.
//!
//! Coordinate indices are 1-based in the public API (`1..=3`).

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::PrimeModulus;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("{triple} is not on the Markoff surface mod {p}")]
    NotOnSurface { triple: String, p: u64 },
    #[error("triple reduces to (0,0,0) mod {0}")]
    ZeroTriple(u64),
    #[error("coordinate {value} is not a residue in [0, {p})")]
    OutOfRange { value: u64, p: u64 },
    #[error("move index must be 1, 2 or 3, got {0}")]
    BadIndex(u8),
}

/// A residue triple, normally on the surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MarkoffTriple(pub [u64; 3]);

impl MarkoffTriple {
    pub const ONES: MarkoffTriple = MarkoffTriple([1, 1, 1]);

    /// Validates range and surface membership.
    pub fn new(p: &PrimeModulus, coords: [u64; 3]) -> Result<Self, SurfaceError> {
        for &value in &coords {
            if value >= p.get() {
                return Err(SurfaceError::OutOfRange { value, p: p.get() });
            }
        }
        let t = MarkoffTriple(coords);
        if !t.on_surface(p) {
            return Err(SurfaceError::NotOnSurface {
                triple: t.to_string(),
                p: p.get(),
            });
        }
        Ok(t)
    }

    #[inline]
    pub fn coords(&self) -> [u64; 3] {
        self.0
    }

    /// Coordinate by 1-based index.
    #[inline]
    pub fn get(&self, index: u8) -> u64 {
        self.0[index as usize - 1]
    }

    /// `x1^2 + x2^2 + x3^2 - 3 x1 x2 x3 ≡ 0` and not the zero triple.
    pub fn on_surface(&self, p: &PrimeModulus) -> bool {
        let [a, b, c] = self.0;
        if a >= p.get() || b >= p.get() || c >= p.get() || self.0 == [0, 0, 0] {
            return false;
        }
        let squares = p.add(p.add(p.mul(a, a), p.mul(b, b)), p.mul(c, c));
        let cubic = p.mul(p.mul(3 % p.get(), a), p.mul(b, c));
        squares == cubic
    }

    /// `R_i`: replaces `x_i` by `3 x_j x_k - x_i`.
    #[inline]
    pub fn involution(&self, p: &PrimeModulus, index: u8) -> MarkoffTriple {
        let i = index as usize - 1;
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let mut out = self.0;
        out[i] = p.sub(three_mul(p, self.0[j], self.0[k]), self.0[i]);
        MarkoffTriple(out)
    }

    /// The rotation fixing coordinate `index`:
    /// `(x_i, x_j, x_k) -> (x_i, x_k, 3 x_i x_k - x_j)` with `j = i+1`, `k = i+2`.
    #[inline]
    pub fn rotation(&self, p: &PrimeModulus, index: u8) -> MarkoffTriple {
        let i = index as usize - 1;
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let mut out = self.0;
        out[j] = self.0[k];
        out[k] = p.sub(three_mul(p, self.0[i], self.0[k]), self.0[j]);
        MarkoffTriple(out)
    }

    /// Inverse of [`rotation`](Self::rotation) for the same index.
    #[inline]
    pub fn rotation_inverse(&self, p: &PrimeModulus, index: u8) -> MarkoffTriple {
        let i = index as usize - 1;
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let mut out = self.0;
        out[k] = self.0[j];
        out[j] = p.sub(three_mul(p, self.0[i], self.0[j]), self.0[k]);
        MarkoffTriple(out)
    }

    #[inline]
    pub fn apply(&self, p: &PrimeModulus, m: Move) -> MarkoffTriple {
        match m.kind {
            MoveKind::Involution => self.involution(p, m.index),
            MoveKind::Rotation => self.rotation(p, m.index),
            MoveKind::RotationInverse => self.rotation_inverse(p, m.index),
        }
    }

    /// Images under the three generators of `graph`, in index order. Fixed
    /// points show up as self-loops.
    pub fn neighbors(&self, p: &PrimeModulus, graph: GraphKind) -> [MarkoffTriple; 3] {
        match graph {
            GraphKind::G => [1, 2, 3].map(|i| self.involution(p, i)),
            GraphKind::GHat => [1, 2, 3].map(|i| self.rotation(p, i)),
        }
    }

    /// Exchanges two coordinates (1-based).
    pub fn swap(&self, a: u8, b: u8) -> MarkoffTriple {
        let mut out = self.0;
        out.swap(a as usize - 1, b as usize - 1);
        MarkoffTriple(out)
    }
}

impl fmt::Display for MarkoffTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

#[inline]
fn three_mul(p: &PrimeModulus, a: u64, b: u64) -> u64 {
    let prod = p.mul(a, b);
    p.add(p.add(prod, prod), prod)
}

/// Coordinatewise reduction of an integer solution.
pub fn reduce_mod_p(t: &[BigInt; 3], p: &PrimeModulus) -> Result<MarkoffTriple, SurfaceError> {
    let modulus = BigInt::from(p.get());
    let coords = t.clone().map(|x| {
        let r = ((x % &modulus) + &modulus) % &modulus;
        u64::try_from(r).expect("residue fits in u64")
    });
    if coords == [0, 0, 0] {
        return Err(SurfaceError::ZeroTriple(p.get()));
    }
    MarkoffTriple::new(p, coords)
}

/// Which generating set defines the edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GraphKind {
    /// Edges are the involutions `R_1, R_2, R_3`.
    #[serde(rename = "g")]
    G,
    /// Edges are the rotations.
    #[serde(rename = "ghat")]
    GHat,
}

impl GraphKind {
    pub fn name(&self) -> &'static str {
        match self {
            GraphKind::G => "g",
            GraphKind::GHat => "ghat",
        }
    }

    /// Whether a move of this kind is an edge of the graph.
    pub fn admits(&self, kind: MoveKind) -> bool {
        match self {
            GraphKind::G => kind == MoveKind::Involution,
            GraphKind::GHat => kind != MoveKind::Involution,
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GraphKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "g" => Ok(GraphKind::G),
            "ghat" => Ok(GraphKind::GHat),
            other => Err(format!("unknown graph kind {other:?}, expected g or ghat")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Involution,
    Rotation,
    /// Traversal of a rotation edge backwards; the rotation graph is read as
    /// undirected.
    RotationInverse,
}

/// One edge traversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawMove", into = "RawMove")]
pub struct Move {
    kind: MoveKind,
    index: u8,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMove {
    kind: MoveKind,
    index: u8,
}

impl TryFrom<RawMove> for Move {
    type Error = SurfaceError;

    fn try_from(raw: RawMove) -> Result<Self, Self::Error> {
        Move::new(raw.kind, raw.index)
    }
}

impl From<Move> for RawMove {
    fn from(m: Move) -> Self {
        RawMove {
            kind: m.kind,
            index: m.index,
        }
    }
}

impl Move {
    pub fn new(kind: MoveKind, index: u8) -> Result<Self, SurfaceError> {
        if !(1..=3).contains(&index) {
            return Err(SurfaceError::BadIndex(index));
        }
        Ok(Self { kind, index })
    }

    /// Panics unless `index` is 1, 2 or 3.
    pub fn involution(index: u8) -> Self {
        Self::new(MoveKind::Involution, index).expect("index in 1..=3")
    }

    /// Panics unless `index` is 1, 2 or 3.
    pub fn rotation(index: u8) -> Self {
        Self::new(MoveKind::Rotation, index).expect("index in 1..=3")
    }

    /// Panics unless `index` is 1, 2 or 3.
    pub fn rotation_inverse(index: u8) -> Self {
        Self::new(MoveKind::RotationInverse, index).expect("index in 1..=3")
    }

    pub fn kind(&self) -> MoveKind {
        self.kind
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    pub fn inverse(&self) -> Move {
        let kind = match self.kind {
            MoveKind::Involution => MoveKind::Involution,
            MoveKind::Rotation => MoveKind::RotationInverse,
            MoveKind::RotationInverse => MoveKind::Rotation,
        };
        Move {
            kind,
            index: self.index,
        }
    }

    /// The six rotation-graph moves, forward before inverse, by index.
    pub const ROTATION_MOVES: [Move; 6] = [
        Move { kind: MoveKind::Rotation, index: 1 },
        Move { kind: MoveKind::Rotation, index: 2 },
        Move { kind: MoveKind::Rotation, index: 3 },
        Move { kind: MoveKind::RotationInverse, index: 1 },
        Move { kind: MoveKind::RotationInverse, index: 2 },
        Move { kind: MoveKind::RotationInverse, index: 3 },
    ];

    pub const INVOLUTIONS: [Move; 3] = [
        Move { kind: MoveKind::Involution, index: 1 },
        Move { kind: MoveKind::Involution, index: 2 },
        Move { kind: MoveKind::Involution, index: 3 },
    ];

    /// The generating moves of `graph`.
    pub fn generators(graph: GraphKind) -> &'static [Move] {
        match graph {
            GraphKind::G => &Self::INVOLUTIONS,
            GraphKind::GHat => &Self::ROTATION_MOVES,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MoveKind::Involution => write!(f, "R{}", self.index),
            MoveKind::Rotation => write!(f, "rot{}", self.index),
            MoveKind::RotationInverse => write!(f, "rot{}^-1", self.index),
        }
    }
}

/// Replays `moves` from `start`.
pub fn replay(p: &PrimeModulus, start: MarkoffTriple, moves: &[Move]) -> MarkoffTriple {
    moves.iter().fold(start, |t, &m| t.apply(p, m))
}

/// Inverse word: reversed order, each move inverted.
pub fn invert_word(moves: &[Move]) -> Vec<Move> {
    moves.iter().rev().map(Move::inverse).collect()
}
