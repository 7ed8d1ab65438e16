//! Integer Markoff triples: descent to `(±1,±1,±1)`, the positive tree,
//! lift search and the lift-based path attack.
//!
//! Over the integers the four solutions with all `|x_i| = 1` are
//! `(1,1,1)`, `(1,-1,-1)`, `(-1,1,-1)`, `(-1,-1,1)`. Flipping two signs
//! commutes with every involution, so these four lie in four distinct
//! orbits. Two descents ending at different sign triples are therefore
//! joined by a word that exists only mod `p`; it is found once per prime by
//! breadth-first search on the involution graph.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::field::PrimeModulus;
use crate::pathfinder::{random_vertex, verify_path, PathCertificate, PathStats};
use crate::surface::{reduce_mod_p, GraphKind, MarkoffTriple, Move, SurfaceError};

/// Default largest coordinate searched when lifting.
pub const DEFAULT_LIFT_BOUND: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("{0} does not satisfy the Markoff equation over the integers")]
    NotMarkoff(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("no word joins {from} and {to} mod {p}")]
    NoJoin { from: String, to: String, p: u64 },
    #[error("replayed word does not connect the endpoints: {0}")]
    CertificateMismatch(String),
}

/// An integer solution of the Markoff equation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerTriple(pub [BigInt; 3]);

impl IntegerTriple {
    pub fn new(coords: [BigInt; 3]) -> Result<Self, LiftError> {
        let t = IntegerTriple(coords);
        if !t.is_markoff() {
            return Err(LiftError::NotMarkoff(t.to_string()));
        }
        Ok(t)
    }

    pub fn from_i64(coords: [i64; 3]) -> Result<Self, LiftError> {
        Self::new(coords.map(BigInt::from))
    }

    pub fn from_u128(coords: [u128; 3]) -> Self {
        IntegerTriple(coords.map(BigInt::from))
    }

    pub fn ones() -> Self {
        Self::from_u128([1, 1, 1])
    }

    /// Satisfies the equation and is not the zero triple.
    pub fn is_markoff(&self) -> bool {
        let [a, b, c] = &self.0;
        if a.is_zero() && b.is_zero() && c.is_zero() {
            return false;
        }
        a * a + b * b + c * c == BigInt::from(3) * a * b * c
    }

    pub fn involution(&self, index: u8) -> IntegerTriple {
        let i = index as usize - 1;
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let mut out = self.0.clone();
        out[i] = BigInt::from(3) * &self.0[j] * &self.0[k] - &self.0[i];
        IntegerTriple(out)
    }

    /// 1-based index of the largest `|x_i|`, lowest index on ties.
    pub fn max_abs_index(&self) -> u8 {
        let mut best = 0;
        for i in 1..3 {
            if self.0[i].abs() > self.0[best].abs() {
                best = i;
            }
        }
        best as u8 + 1
    }

    pub fn max_abs(&self) -> BigInt {
        self.0[self.max_abs_index() as usize - 1].abs()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|x| x.abs().is_one())
    }

    pub fn reduce(&self, p: &PrimeModulus) -> Result<MarkoffTriple, SurfaceError> {
        reduce_mod_p(&self.0, p)
    }
}

impl fmt::Display for IntegerTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// Serialized as three decimal strings, since coordinates outgrow JSON
/// numbers.
impl Serialize for IntegerTriple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        strings.serialize(s)
    }
}

/// A descent from `source` to a unit triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DescentWord {
    pub source: IntegerTriple,
    /// Involution indices in application order.
    pub moves: Vec<u8>,
    /// The triple after each move; the last entry equals `terminal`.
    pub chain: Vec<IntegerTriple>,
    pub terminal: IntegerTriple,
}

impl DescentWord {
    pub fn as_moves(&self) -> Vec<Move> {
        self.moves.iter().map(|&i| Move::involution(i)).collect()
    }
}

/// Repeatedly reflects the coordinate of largest absolute value until every
/// coordinate is `±1`. The largest `|x_i|` strictly decreases at each step.
pub fn descend(t: &IntegerTriple) -> Result<DescentWord, LiftError> {
    if !t.is_markoff() {
        return Err(LiftError::NotMarkoff(t.to_string()));
    }
    let mut current = t.clone();
    let mut moves = Vec::new();
    let mut chain = Vec::new();
    while !current.is_unit() {
        let i = current.max_abs_index();
        let next = current.involution(i);
        moves.push(i);
        chain.push(next.clone());
        current = next;
    }
    Ok(DescentWord {
        source: t.clone(),
        moves,
        chain,
        terminal: current,
    })
}

/// The positive tree from `(1,1,1)`, breadth first, to depth `height`,
/// dropping triples whose largest coordinate exceeds `bound`. Moving away
/// from the root never shrinks the largest coordinate, so the result holds
/// every positive solution within both limits.
pub fn tree_enumerate(height: u32, bound: u128) -> Vec<[u128; 3]> {
    let root = [1u128, 1, 1];
    if bound < 1 {
        return Vec::new();
    }
    let mut seen: HashSet<[u128; 3]> = HashSet::from([root]);
    let mut out = vec![root];
    let mut queue = VecDeque::from([(root, 0u32)]);
    while let Some((t, depth)) = queue.pop_front() {
        if depth >= height {
            continue;
        }
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let Some(v) = t[j]
                .checked_mul(t[k])
                .and_then(|x| x.checked_mul(3))
                .and_then(|x| x.checked_sub(t[i]))
            else {
                continue;
            };
            if v > bound {
                continue;
            }
            let mut child = t;
            child[i] = v;
            if seen.insert(child) {
                out.push(child);
                queue.push_back((child, depth + 1));
            }
        }
    }
    out
}

/// The sign patterns that keep a positive solution a solution.
const SIGN_PATTERNS: [[i8; 3]; 4] = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];

fn signed(t: &[u128; 3], signs: [i8; 3]) -> IntegerTriple {
    IntegerTriple([0, 1, 2].map(|i| {
        let v = BigInt::from(t[i]);
        if signs[i] < 0 {
            -v
        } else {
            v
        }
    }))
}

fn reduce_signed(t: &[u128; 3], signs: [i8; 3], p: u64) -> [u64; 3] {
    [0, 1, 2].map(|i| {
        let r = (t[i] % p as u128) as u64;
        if signs[i] < 0 && r != 0 {
            p - r
        } else {
            r
        }
    })
}

/// First tree triple (in enumeration order, each with its four sign
/// patterns) reducing exactly to `target`.
pub fn search_lift(target: &MarkoffTriple, p: &PrimeModulus, bound: u128) -> Option<IntegerTriple> {
    search_in(&tree_enumerate(u32::MAX, bound), target, p)
}

fn search_in(tree: &[[u128; 3]], target: &MarkoffTriple, p: &PrimeModulus) -> Option<IntegerTriple> {
    tree.iter().find_map(|t| {
        SIGN_PATTERNS
            .iter()
            .find(|&&s| reduce_signed(t, s, p.get()) == target.0)
            .map(|&s| signed(t, s))
    })
}

/// Words joining the unit triples mod `p`, computed once per prime.
#[derive(Clone, Debug)]
pub struct SignJoin {
    p: PrimeModulus,
    words: HashMap<(MarkoffTriple, MarkoffTriple), Vec<Move>>,
}

impl SignJoin {
    pub fn new(p: &PrimeModulus) -> Result<Self, LiftError> {
        let units: Vec<MarkoffTriple> = SIGN_PATTERNS
            .iter()
            .map(|&s| MarkoffTriple(reduce_signed(&[1, 1, 1], s, p.get())))
            .collect();
        let mut words = HashMap::new();
        for &a in &units {
            for &b in &units {
                let word = crate::pathfinder::bfs_word(p, a, &Move::INVOLUTIONS, u64::MAX, |t| *t == b)
                    .ok_or_else(|| LiftError::NoJoin {
                        from: a.to_string(),
                        to: b.to_string(),
                        p: p.get(),
                    })?;
                words.insert((a, b), word);
            }
        }
        Ok(Self { p: *p, words })
    }

    pub fn word(&self, from: &MarkoffTriple, to: &MarkoffTriple) -> Option<&[Move]> {
        self.words.get(&(*from, *to)).map(Vec::as_slice)
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.p
    }
}

/// Lifts both endpoints, descends each lift, joins the unit triples and
/// replays the result mod `p` as an involution-graph certificate. `None`
/// when either endpoint has no lift within `bound`.
pub fn lift_path_attack(
    x: &MarkoffTriple,
    y: &MarkoffTriple,
    p: &PrimeModulus,
    bound: u128,
    join: &SignJoin,
) -> Result<Option<PathCertificate>, LiftError> {
    MarkoffTriple::new(p, x.0)?;
    MarkoffTriple::new(p, y.0)?;
    let tree = tree_enumerate(u32::MAX, bound);
    let (Some(lx), Some(ly)) = (search_in(&tree, x, p), search_in(&tree, y, p)) else {
        return Ok(None);
    };
    let dx = descend(&lx)?;
    let dy = descend(&ly)?;
    let (ux, uy) = (dx.terminal.reduce(p)?, dy.terminal.reduce(p)?);
    let bridge = join.word(&ux, &uy).ok_or_else(|| LiftError::NoJoin {
        from: ux.to_string(),
        to: uy.to_string(),
        p: p.get(),
    })?;
    let mut moves = dx.as_moves();
    moves.extend_from_slice(bridge);
    moves.extend(dy.as_moves().into_iter().rev());
    let cert = PathCertificate::new(p, GraphKind::G, *x, *y, moves, PathStats::default());
    verify_path(&cert).map_err(|f| LiftError::CertificateMismatch(f.to_string()))?;
    Ok(Some(cert))
}

/// Lift statistics for one prime.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureRow {
    pub p: u64,
    pub log_p: f64,
    pub samples: u64,
    pub lifted: u64,
    /// Mean descent length over lifted samples; `None` without hits.
    pub mean_word_length: Option<f64>,
    pub min_word_length: Option<u64>,
    /// `min_word_length / ln p`.
    pub min_length_over_log_p: Option<f64>,
    /// Shortest descent among all tree triples reaching each vertex, averaged
    /// over the vertices reached.
    pub mean_shortest_lift: f64,
    /// Fraction of surface points with any lift within the bound.
    pub coverage: f64,
}

/// Measures lift density and descent lengths for random targets.
pub fn conjecture_report(primes: &[PrimeModulus], samples: u64, bound: u128, seed: u64) -> Vec<ConjectureRow> {
    let tree = tree_enumerate(u32::MAX, bound);
    // descent length of a positive triple equals its tree depth
    let depths = tree_depths(&tree);
    primes
        .iter()
        .map(|p| {
            let mut shortest: HashMap<[u64; 3], u64> = HashMap::new();
            for (t, &d) in tree.iter().zip(&depths) {
                for s in SIGN_PATTERNS {
                    let r = reduce_signed(t, s, p.get());
                    let e = shortest.entry(r).or_insert(d);
                    *e = (*e).min(d);
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(crate::pathfinder::mix_seed(seed, &[p.get()]));
            let mut lengths = Vec::new();
            for _ in 0..samples {
                let target = random_vertex(p, &mut rng);
                if let Some(&d) = shortest.get(&target.0) {
                    lengths.push(d);
                }
            }
            let n = p.get() as f64;
            let vertex_count = crate::enumerate::expected_vertex_count(p) as f64;
            ConjectureRow {
                p: p.get(),
                log_p: n.ln(),
                samples,
                lifted: lengths.len() as u64,
                mean_word_length: (!lengths.is_empty())
                    .then(|| lengths.iter().sum::<u64>() as f64 / lengths.len() as f64),
                min_word_length: lengths.iter().min().copied(),
                min_length_over_log_p: lengths.iter().min().map(|&m| m as f64 / n.ln()),
                mean_shortest_lift: shortest.values().sum::<u64>() as f64 / shortest.len().max(1) as f64,
                coverage: shortest.len() as f64 / vertex_count,
            }
        })
        .collect()
}

/// Depth of each triple below the root; the same as its descent length.
fn tree_depths(tree: &[[u128; 3]]) -> Vec<u64> {
    tree.iter()
        .map(|t| {
            let d = descend(&IntegerTriple::from_u128(*t)).expect("tree triples are solutions");
            d.moves.len() as u64
        })
        .collect()
}

/// `(T, #positive solutions with max ≤ T, count / (ln T)^2)` for each bound.
pub fn tree_growth(bounds: &[u128]) -> Vec<(u128, u64, f64)> {
    bounds
        .iter()
        .map(|&t| {
            let count = tree_enumerate(u32::MAX, t).len() as u64;
            let log = (t as f64).ln();
            (t, count, if log > 0.0 { count as f64 / (log * log) } else { f64::NAN })
        })
        .collect()
}
