//! Joining two cage vertices.
//!
//! From `x` with maximal coordinate `α` (axis `i`) and `y` with maximal
//! coordinate `β` (axis `j`), pick a third axis `k` and a maximal value `γ`
//! such that `α`'s orbit reaches a point with `γ` at `k` and `γ`'s orbit
//! reaches `β`'s orbit. The word is three orbit segments.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::{orbit_segment, ClimbPolicy, PathError, PathFinder};
use crate::rotation::OrbitIter;
use crate::surface::{MarkoffTriple, Move};

/// Intermediate cage vertices tried on each side before giving up.
const DETOUR_TRIES: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeSegment {
    pub moves: Vec<Move>,
    /// Intermediate cage vertices the segment was routed through.
    pub detours: u64,
}

impl PathFinder {
    pub fn bridge_cage(
        &self,
        x: &MarkoffTriple,
        y: &MarkoffTriple,
        policy: &ClimbPolicy,
    ) -> Result<BridgeSegment, PathError> {
        self.check(x)?;
        self.check(y)?;
        for t in [x, y] {
            if !self.orders.in_cage(t) {
                return Err(PathError::NotInCage(t.to_string()));
            }
        }
        let mut rng = policy.rng(&[x.0[0], x.0[1], x.0[2], y.0[0], y.0[1], y.0[2]]);
        if let Some(moves) = self.bridge_direct(x, y, rng.as_mut())? {
            return Ok(BridgeSegment { moves, detours: 0 });
        }
        // Route through a cage vertex on one of x's maximal orbits, then on
        // one of y's.
        for (near, far, near_is_x) in [(x, y, true), (y, x, false)] {
            for axis in self.orders.maximal_indices(near) {
                let orbit = self.orders.orbit(near, axis)?;
                let len = orbit.len() as u64;
                let stops = orbit
                    .iter()
                    .enumerate()
                    .skip(1)
                    .filter(|(_, z)| self.orders.in_cage(z))
                    .take(DETOUR_TRIES);
                for (s, z) in stops {
                    let hop = orbit_segment(axis, s as u64, len);
                    let rest = if near_is_x {
                        self.bridge_direct(z, far, rng.as_mut())?
                    } else {
                        self.bridge_direct(far, z, rng.as_mut())?
                    };
                    if let Some(rest) = rest {
                        let moves = if near_is_x {
                            hop.into_iter().chain(rest).collect()
                        } else {
                            rest.into_iter().chain(crate::surface::invert_word(&hop)).collect()
                        };
                        return Ok(BridgeSegment { moves, detours: 1 });
                    }
                }
            }
        }
        Err(PathError::NoBridge {
            from: x.to_string(),
            to: y.to_string(),
        })
    }

    /// The three-segment construction, or `None` when no maximal plane
    /// joins the two orbits.
    fn bridge_direct(
        &self,
        x: &MarkoffTriple,
        y: &MarkoffTriple,
        mut rng: Option<&mut ChaCha8Rng>,
    ) -> Result<Option<Vec<Move>>, PathError> {
        if x == y {
            return Ok(Some(Vec::new()));
        }
        let x_axes = self.orders.maximal_indices(x);
        let y_axes = self.orders.maximal_indices(y);
        let mut x_orbits = Vec::new();
        for &i in &x_axes {
            let ox = self.orders.orbit(x, i)?;
            if let Some(s) = ox.iter().position(|t| t == y) {
                return Ok(Some(orbit_segment(i, s as u64, ox.len() as u64)));
            }
            x_orbits.push((i, ox));
        }
        for (i, ox) in &x_orbits {
            for &j in &y_axes {
                let oy = self.orders.orbit(y, j)?;
                let position: HashMap<MarkoffTriple, usize> =
                    oy.iter().enumerate().map(|(w, t)| (*t, w)).collect();
                for k in (1..=3u8).filter(|k| k != i && *k != j) {
                    let values: HashSet<u64> = oy.iter().map(|t| t.get(k)).collect();
                    let mut candidates: Vec<(u64, usize)> = ox
                        .iter()
                        .enumerate()
                        .map(|(s, t)| (t.get(k), s))
                        .filter(|(g, _)| values.contains(g) && self.orders.is_maximal(*g))
                        .collect();
                    match rng.as_deref_mut() {
                        Some(r) => candidates.shuffle(r),
                        None => candidates.sort_unstable(),
                    }
                    for (gamma, s) in candidates {
                        let a = ox[s];
                        let lk = self.orders.rotation_order(gamma);
                        let hit = OrbitIter::new(&self.p, &a, k)
                            .enumerate()
                            .find_map(|(r, b)| position.get(&b).map(|&w| (r, w)));
                        if let Some((r, w)) = hit {
                            let (lx, ly) = (ox.len() as u64, oy.len() as u64);
                            let mut moves = orbit_segment(*i, s as u64, lx);
                            moves.extend(orbit_segment(k, r as u64, lk));
                            moves.extend(orbit_segment(j, (ly - w as u64) % ly, ly));
                            return Ok(Some(moves));
                        }
                    }
                }
            }
        }
        Ok(None)
    }
}
