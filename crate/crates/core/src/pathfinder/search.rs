//! Breadth-first search over move generators.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use crate::field::PrimeModulus;
use crate::surface::{MarkoffTriple, Move};

/// Shortest word over `generators` from `start` to any vertex satisfying
/// `target`, of length at most `depth_cap`. Ties resolve by generator order.
pub fn bfs_word(
    p: &PrimeModulus,
    start: MarkoffTriple,
    generators: &[Move],
    depth_cap: u64,
    mut target: impl FnMut(&MarkoffTriple) -> bool,
) -> Option<Vec<Move>> {
    if target(&start) {
        return Some(Vec::new());
    }
    // vertex -> (parent, move, depth)
    let mut seen: HashMap<MarkoffTriple, (MarkoffTriple, Move, u64)> = HashMap::new();
    let mut queue = VecDeque::from([(start, 0u64)]);
    while let Some((u, depth)) = queue.pop_front() {
        if depth >= depth_cap {
            continue;
        }
        for &m in generators {
            let v = u.apply(p, m);
            if v == start {
                continue;
            }
            if let Entry::Vacant(slot) = seen.entry(v) {
                slot.insert((u, m, depth + 1));
                if target(&v) {
                    return Some(unwind(&seen, start, v));
                }
                queue.push_back((v, depth + 1));
            }
        }
    }
    None
}

fn unwind(
    seen: &HashMap<MarkoffTriple, (MarkoffTriple, Move, u64)>,
    start: MarkoffTriple,
    mut v: MarkoffTriple,
) -> Vec<Move> {
    let mut word = Vec::new();
    while v != start {
        let (parent, m, _) = seen[&v];
        word.push(m);
        v = parent;
    }
    word.reverse();
    word
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::replay;

    #[test]
    fn trivial_and_exhausted() {
        let p = PrimeModulus::new(13).unwrap();
        let t = MarkoffTriple::ONES;
        assert_eq!(bfs_word(&p, t, &Move::ROTATION_MOVES, 0, |_| true), Some(vec![]));
        assert_eq!(bfs_word(&p, t, &Move::ROTATION_MOVES, 0, |_| false), None);
    }

    #[test]
    fn finds_shortest_word() {
        let p = PrimeModulus::new(13).unwrap();
        let target = MarkoffTriple::ONES.involution(&p, 2).involution(&p, 1);
        let word = bfs_word(&p, MarkoffTriple::ONES, &Move::INVOLUTIONS, 5, |t| *t == target).unwrap();
        assert_eq!(word.len(), 2);
        assert_eq!(replay(&p, MarkoffTriple::ONES, &word), target);
    }
}
