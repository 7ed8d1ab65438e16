//! Climbing to the cage along maximal orbits.

use rand::Rng;
use serde::Serialize;

use super::{bfs_fallback, orbit_segment, ClimbPolicy, PathError, PathFinder, ScanMode};
use crate::pathfinder::PathStats;
use crate::rotation::OrbitIter;
use crate::surface::{replay, MarkoffTriple, Move};

/// One order-increasing hop along a single orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClimbHop {
    pub from: MarkoffTriple,
    pub to: MarkoffTriple,
    pub from_order: u64,
    pub to_order: u64,
    /// Index of the coordinate whose orbit was walked.
    pub axis: u8,
    pub moves: Vec<Move>,
    /// Orbit points examined.
    pub scanned: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClimbMechanism {
    AlreadyInCage,
    Climb,
    /// At least one hop stalled and breadth-first search finished the climb.
    BfsFallback,
}

/// Path from a vertex into the cage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CageFragment {
    pub end: MarkoffTriple,
    pub moves: Vec<Move>,
    pub stats: PathStats,
    pub mechanism: ClimbMechanism,
}

impl PathFinder {
    /// Walks one orbit of `t` to a point of strictly higher triple order.
    pub fn climb_step(&self, t: &MarkoffTriple, policy: &ClimbPolicy) -> Result<ClimbHop, PathError> {
        self.check(t)?;
        if self.orders.in_cage(t) {
            return Err(PathError::AlreadyInCage(t.to_string()));
        }
        let (order, max_axis) = self.orders.triple_order(t);
        let axis = match policy.rng(&t.0) {
            Some(mut rng) => rng.gen_range(1..=3u8),
            None => max_axis,
        };
        if let Some(hop) = self.scan_orbit(t, axis, order, policy.mode) {
            return Ok(hop);
        }
        if axis != max_axis {
            if let Some(hop) = self.scan_orbit(t, max_axis, order, policy.mode) {
                return Ok(hop);
            }
        }
        Err(PathError::NoAscent {
            triple: t.to_string(),
            order,
        })
    }

    fn scan_orbit(&self, t: &MarkoffTriple, axis: u8, order: u64, mode: ScanMode) -> Option<ClimbHop> {
        let len = self.orders.rotation_order(t.get(axis));
        let mut best: Option<(u64, u64, MarkoffTriple)> = None;
        let mut scanned = 0u64;
        for (s, u) in OrbitIter::new(&self.p, t, axis).enumerate().skip(1) {
            scanned += 1;
            let (o, _) = self.orders.triple_order(&u);
            if o > best.map_or(order, |b| b.1) {
                best = Some((s as u64, o, u));
                if mode == ScanMode::Greedy {
                    break;
                }
            }
        }
        let (steps, to_order, to) = best?;
        Some(ClimbHop {
            from: *t,
            to,
            from_order: order,
            to_order,
            axis,
            moves: orbit_segment(axis, steps, len),
            scanned,
        })
    }

    /// Repeats [`climb_step`](Self::climb_step) until the cage is reached;
    /// a stalled climb is finished by breadth-first search.
    pub fn connect_to_cage(
        &self,
        t: &MarkoffTriple,
        policy: &ClimbPolicy,
    ) -> Result<CageFragment, PathError> {
        self.check(t)?;
        let mut current = *t;
        let mut moves = Vec::new();
        let mut stats = PathStats::default();
        let mut mechanism = ClimbMechanism::AlreadyInCage;
        let end_game = (self.p.get() as f64).sqrt().ceil() as u64;
        while !self.orders.in_cage(&current) {
            match self.climb_step(&current, policy) {
                Ok(hop) => {
                    debug_assert!(hop.to_order > hop.from_order);
                    mechanism = ClimbMechanism::Climb;
                    stats.climb_hops += 1;
                    stats.orbit_scans += hop.scanned;
                    stats.climb_steps += hop.moves.len() as u64;
                    if hop.from_order >= end_game {
                        stats.end_game_hops += 1;
                    }
                    moves.extend(hop.moves);
                    current = hop.to;
                }
                Err(PathError::NoAscent { .. }) => {
                    let word = self.bfs_to_cage(&current)?;
                    mechanism = ClimbMechanism::BfsFallback;
                    stats.bfs_fallbacks += 1;
                    stats.climb_steps += word.len() as u64;
                    current = replay(&self.p, current, &word);
                    moves.extend(word);
                }
                Err(e) => return Err(e),
            }
        }
        Ok(CageFragment {
            end: current,
            moves,
            stats,
            mechanism,
        })
    }

    /// Depth cap `10⌈log2 p⌉`, escalating once to `3p`.
    fn bfs_to_cage(&self, t: &MarkoffTriple) -> Result<Vec<Move>, PathError> {
        let in_cage = |u: &MarkoffTriple| self.orders.in_cage(u);
        let shallow = 10 * self.p.bit_len() as u64;
        bfs_fallback(&self.p, t, in_cage, shallow)
            .or_else(|_| bfs_fallback(&self.p, t, in_cage, 3 * self.p.get()))
    }
}
