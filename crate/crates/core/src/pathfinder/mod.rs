//! Path finding on the rotation graph: climb both endpoints to the cage by
//! order-increasing orbit hops, join the two cage vertices through a shared
//! maximal plane, and emit a verified certificate.

mod bridge;
mod certificate;
mod climb;
mod convert;
mod search;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::PrimeModulus;
use crate::rotation::{RotationError, RotationOrders};
use crate::surface::{invert_word, GraphKind, MarkoffTriple, Move, SurfaceError};

pub use bridge::BridgeSegment;
pub use certificate::{
    check_major, verify_path, CertificateError, PathCertificate, PathStats, VerifyFailure,
    CERTIFICATE_VERSION,
};
pub use climb::{CageFragment, ClimbHop, ClimbMechanism};
pub use search::bfs_word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Rotation(#[from] RotationError),
    #[error("{0} is already in the cage")]
    AlreadyInCage(String),
    #[error("{0} is not in the cage")]
    NotInCage(String),
    #[error("no point of higher order on the orbits of {triple} (order {order})")]
    NoAscent { triple: String, order: u64 },
    #[error("breadth-first search from {start} exhausted depth {cap}")]
    DepthExhausted { start: String, cap: u64 },
    #[error("no maximal plane joins {from} and {to}")]
    NoBridge { from: String, to: String },
    #[error("word conversion failed: {0}")]
    ConversionFailure(String),
    #[error("certificate did not verify: {0}")]
    Unverified(VerifyFailure),
}

/// How an orbit is scanned for an ascent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    /// Walk the whole orbit and take the highest-order point.
    #[default]
    FullOrbit,
    /// Stop at the first point of strictly higher order.
    Greedy,
}

/// Which coordinate's orbit a climb step walks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateChoice {
    /// The coordinate of highest rotation order, lowest index on ties.
    #[default]
    Maximal,
    /// A seeded random coordinate per step, falling back to the maximal one
    /// when its orbit has no ascent. Bridge choices are randomized too.
    Randomized { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub struct ClimbPolicy {
    pub mode: ScanMode,
    pub coordinate_choice: CoordinateChoice,
}

impl ClimbPolicy {
    pub fn greedy() -> Self {
        Self {
            mode: ScanMode::Greedy,
            coordinate_choice: CoordinateChoice::Maximal,
        }
    }

    pub fn full_scan() -> Self {
        Self::default()
    }

    pub fn randomized(mode: ScanMode, seed: u64) -> Self {
        Self {
            mode,
            coordinate_choice: CoordinateChoice::Randomized { seed },
        }
    }

    /// A generator keyed by the policy seed and `context`, or `None` for the
    /// deterministic policy.
    fn rng(&self, context: &[u64]) -> Option<ChaCha8Rng> {
        match self.coordinate_choice {
            CoordinateChoice::Maximal => None,
            CoordinateChoice::Randomized { seed } => {
                Some(ChaCha8Rng::seed_from_u64(mix_seed(seed, context)))
            }
        }
    }
}

/// SplitMix64 folding of `words` into `seed`.
pub fn mix_seed(seed: u64, words: &[u64]) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for &w in words {
        h ^= w;
        h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = h;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h = z ^ (z >> 31);
    }
    h
}

/// Measurements of one `find_path` run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RunStats {
    pub path_length: u64,
    pub wall_time_ms: f64,
    pub climb_steps: u64,
    pub stats: PathStats,
}

/// Path finder for one prime; owns the rotation-order oracle.
#[derive(Debug)]
pub struct PathFinder {
    p: PrimeModulus,
    orders: RotationOrders,
}

impl PathFinder {
    pub fn new(p: &PrimeModulus) -> Result<Self, PathError> {
        Ok(Self {
            p: *p,
            orders: RotationOrders::new(p)?,
        })
    }

    pub fn from_orders(orders: RotationOrders) -> Self {
        Self {
            p: *orders.modulus(),
            orders,
        }
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.p
    }

    pub fn orders(&self) -> &RotationOrders {
        &self.orders
    }

    /// `σ(p - 1) + σ(p + 1) + 3p`, the length budget of a rotation-graph path.
    pub fn path_length_bound(&self) -> u128 {
        let g = self.orders.groups();
        g.p_minus_1.divisor_sum() + g.p_plus_1.divisor_sum() + 3 * self.p.get() as u128
    }

    fn check(&self, t: &MarkoffTriple) -> Result<(), PathError> {
        MarkoffTriple::new(&self.p, t.0)?;
        Ok(())
    }

    /// Connects `x` to `y` in `graph`. The returned certificate has been
    /// verified.
    pub fn find_path(
        &self,
        x: &MarkoffTriple,
        y: &MarkoffTriple,
        graph: GraphKind,
        policy: &ClimbPolicy,
    ) -> Result<PathCertificate, PathError> {
        self.check(x)?;
        self.check(y)?;
        let rotation_cert = self.find_rotation_path(x, y, policy)?;
        let cert = match graph {
            GraphKind::GHat => rotation_cert,
            GraphKind::G => self.convert_word(&rotation_cert)?,
        };
        verify_path(&cert).map_err(PathError::Unverified)?;
        Ok(cert)
    }

    fn find_rotation_path(
        &self,
        x: &MarkoffTriple,
        y: &MarkoffTriple,
        policy: &ClimbPolicy,
    ) -> Result<PathCertificate, PathError> {
        let mut stats = PathStats::default();
        let moves = if x == y {
            Vec::new()
        } else {
            let fx = self.connect_to_cage(x, policy)?;
            let fy = self.connect_to_cage(y, policy)?;
            let bridge = self.bridge_cage(&fx.end, &fy.end, policy)?;
            stats.absorb(&fx.stats);
            stats.absorb(&fy.stats);
            stats.bridge_steps = bridge.moves.len() as u64;
            stats.bridge_detours = bridge.detours;
            let mut moves = fx.moves;
            moves.extend(bridge.moves);
            moves.extend(invert_word(&fy.moves));
            cancel_inverse_pairs(moves)
        };
        Ok(PathCertificate::new(&self.p, GraphKind::GHat, *x, *y, moves, stats))
    }

    /// Runs `find_path` under a wall clock.
    pub fn measure_run(
        &self,
        x: &MarkoffTriple,
        y: &MarkoffTriple,
        graph: GraphKind,
        policy: &ClimbPolicy,
    ) -> Result<(PathCertificate, RunStats), PathError> {
        let started = Instant::now();
        let cert = self.find_path(x, y, graph, policy)?;
        let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
        let run = RunStats {
            path_length: cert.len() as u64,
            wall_time_ms,
            climb_steps: cert.stats.climb_steps,
            stats: cert.stats,
        };
        Ok((cert, run))
    }
}

/// Breadth-first search over the six rotation moves from `x` until
/// `predicate` holds.
pub fn bfs_fallback(
    p: &PrimeModulus,
    x: &MarkoffTriple,
    predicate: impl FnMut(&MarkoffTriple) -> bool,
    depth_cap: u64,
) -> Result<Vec<Move>, PathError> {
    bfs_word(p, *x, &Move::ROTATION_MOVES, depth_cap, predicate).ok_or_else(|| {
        PathError::DepthExhausted {
            start: x.to_string(),
            cap: depth_cap,
        }
    })
}

/// Free reduction: drops adjacent `m, m^-1` pairs.
fn cancel_inverse_pairs(moves: Vec<Move>) -> Vec<Move> {
    let mut out: Vec<Move> = Vec::with_capacity(moves.len());
    for m in moves {
        if out.last() == Some(&m.inverse()) {
            out.pop();
        } else {
            out.push(m);
        }
    }
    out
}

/// Forward or inverse rotations about `index` covering `steps` of an orbit
/// of length `len`, whichever is shorter.
fn orbit_segment(index: u8, steps: u64, len: u64) -> Vec<Move> {
    let steps = steps % len;
    if steps <= len - steps {
        vec![Move::rotation(index); steps as usize]
    } else {
        vec![Move::rotation_inverse(index); (len - steps) as usize]
    }
}

/// Uniform random surface point, without enumerating the surface.
pub fn random_vertex<R: rand::Rng>(p: &PrimeModulus, rng: &mut R) -> MarkoffTriple {
    let n = p.get();
    let half = p.inv(2).expect("p is odd");
    loop {
        let x1 = rng.gen_range(0..n);
        let x2 = rng.gen_range(0..n);
        let pick_larger = rng.gen::<bool>();
        let b = p.mul(3, p.mul(x1, x2));
        let disc = p.sub(p.mul(b, b), p.mul(4, p.add(p.mul(x1, x1), p.mul(x2, x2))));
        let Some(roots) = p.sqrt(disc) else { continue };
        let r = match roots.to_vec()[..] {
            [r] if !pick_larger => r,
            [lo, hi] => {
                if pick_larger {
                    hi
                } else {
                    lo
                }
            }
            _ => continue,
        };
        let x3 = p.mul(p.add(b, r), half);
        if [x1, x2, x3] != [0, 0, 0] {
            return MarkoffTriple([x1, x2, x3]);
        }
    }
}
