//! Translating words between the involution graph and the rotation graph.
//!
//! A rotation is a coordinate transposition composed with an involution:
//! `rot_i = τ_{jk} ∘ R_j` and `rot_i^{-1} = τ_{jk} ∘ R_k` with `j = i+1`,
//! `k = i+2`. Each step is first replaced by a short word found by bounded
//! search. If some step has no short replacement, the whole word is
//! translated one move per move while tracking the accumulated coordinate
//! permutation, which is undone at the end.

use super::search::bfs_word;
use super::{verify_path, PathCertificate, PathError, PathFinder};
use crate::surface::{GraphKind, MarkoffTriple, Move, MoveKind};

/// Search depth for replacing one involution by rotations.
const ROTATIONS_PER_INVOLUTION: u64 = 3;
/// Search depth for replacing one rotation by involutions.
const INVOLUTIONS_PER_ROTATION: u64 = 6;

/// The vertex fixed by every coordinate permutation.
const HUB: MarkoffTriple = MarkoffTriple::ONES;

impl PathFinder {
    /// Re-expresses a valid certificate in the other graph.
    pub fn convert_word(&self, c: &PathCertificate) -> Result<PathCertificate, PathError> {
        verify_path(c).map_err(PathError::Unverified)?;
        if c.p != self.p.get() {
            return Err(PathError::ConversionFailure(format!(
                "certificate is mod {}, converter is mod {}",
                c.p,
                self.p.get()
            )));
        }
        let (graph, moves, fixups) = match c.graph {
            GraphKind::G => {
                let (moves, fixups) = self.involutions_to_rotations(c.start, c.end, &c.moves)?;
                (GraphKind::GHat, moves, fixups)
            }
            GraphKind::GHat => {
                let (moves, fixups) = self.rotations_to_involutions(c.start, c.end, &c.moves)?;
                (GraphKind::G, moves, fixups)
            }
        };
        let mut stats = c.stats;
        stats.conversion_fixups += fixups;
        let out = PathCertificate::new(&self.p, graph, c.start, c.end, moves, stats);
        verify_path(&out).map_err(|f| PathError::ConversionFailure(f.to_string()))?;
        Ok(out)
    }

    /// Replaces each step by a bounded-length word over `generators`.
    fn stepwise(&self, start: MarkoffTriple, moves: &[Move], generators: &[Move], depth: u64) -> Option<Vec<Move>> {
        let mut out = Vec::new();
        let mut u = start;
        for &m in moves {
            let v = u.apply(&self.p, m);
            out.extend(bfs_word(&self.p, u, generators, depth, |t| *t == v)?);
            u = v;
        }
        Some(out)
    }

    fn rotations_to_involutions(
        &self,
        start: MarkoffTriple,
        end: MarkoffTriple,
        moves: &[Move],
    ) -> Result<(Vec<Move>, u64), PathError> {
        if let Some(word) = self.stepwise(start, moves, &Move::INVOLUTIONS, INVOLUTIONS_PER_ROTATION) {
            return Ok((word, 0));
        }
        let (mut word, landed, perm) = track_rotations(&self.p, start, moves);
        if landed == end {
            return Ok((word, 0));
        }
        // landed is end with coordinates permuted; conjugate a word end -> HUB
        // by that permutation, then walk back out along the word itself.
        let to_hub = self.find_rotation_path(&end, &HUB, &Default::default())?;
        let (hub_word, at_hub, _) = track_rotations(&self.p, end, &to_hub.moves);
        if at_hub != HUB {
            return Err(PathError::ConversionFailure(format!(
                "hub word from {end} ended at {at_hub}"
            )));
        }
        let conjugated = hub_word.iter().map(|m| Move::involution(perm[m.index() as usize - 1] + 1));
        word.extend(conjugated);
        word.extend(hub_word.iter().rev());
        Ok((word, 2 * hub_word.len() as u64))
    }

    fn involutions_to_rotations(
        &self,
        start: MarkoffTriple,
        end: MarkoffTriple,
        moves: &[Move],
    ) -> Result<(Vec<Move>, u64), PathError> {
        if let Some(word) = self.stepwise(start, moves, &Move::ROTATION_MOVES, ROTATIONS_PER_INVOLUTION) {
            return Ok((word, 0));
        }
        // g[a] = v[perm[a]], where g follows the involution word and v the
        // emitted rotation word.
        let mut perm = [0usize, 1, 2];
        let mut v = start;
        let mut word = Vec::with_capacity(moves.len());
        for m in moves {
            let at = perm[m.index() as usize - 1];
            let axis = (at + 2) % 3;
            let rot = Move::rotation(axis as u8 + 1);
            v = v.apply(&self.p, rot);
            word.push(rot);
            let (c, d) = (at, (at + 1) % 3);
            for slot in perm.iter_mut() {
                if *slot == c {
                    *slot = d;
                } else if *slot == d {
                    *slot = c;
                }
            }
        }
        if v == end {
            return Ok((word, 0));
        }
        let fix = self.find_rotation_path(&v, &end, &Default::default())?;
        let fixups = fix.moves.len() as u64;
        word.extend(fix.moves);
        Ok((super::cancel_inverse_pairs(word), fixups))
    }
}

/// One involution per rotation. Returns the word, the vertex it reaches and
/// the permutation with `reached[perm[a]] = rotation_end[a]`.
fn track_rotations(
    p: &crate::field::PrimeModulus,
    start: MarkoffTriple,
    moves: &[Move],
) -> (Vec<Move>, MarkoffTriple, [u8; 3]) {
    // v[a] = g[perm[a]], where v follows the rotation word and g the
    // emitted involution word.
    let mut perm = [0u8, 1, 2];
    let mut g = start;
    let mut word = Vec::with_capacity(moves.len());
    for m in moves {
        let i = m.index() as usize - 1;
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let reflected = match m.kind() {
            MoveKind::Rotation => j,
            MoveKind::RotationInverse => k,
            MoveKind::Involution => unreachable!("rotation certificates hold rotations only"),
        };
        let r = Move::involution(perm[reflected] + 1);
        g = g.apply(p, r);
        word.push(r);
        perm.swap(j, k);
    }
    (word, g, perm)
}
