//! Replayable path certificates and their JSON form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::PrimeModulus;
use crate::surface::{GraphKind, MarkoffTriple, Move};

/// Schema version written into every certificate; readers accept any minor
/// revision of the same major version.
pub const CERTIFICATE_VERSION: &str = "1.0";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("unsupported certificate schema version {0}")]
    UnsupportedVersion(String),
}

/// Counters gathered while a path is built.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathStats {
    /// Moves spent climbing to the cage, both endpoints.
    pub climb_steps: u64,
    /// Moves spent joining the two cage vertices.
    pub bridge_steps: u64,
    /// Orbit points examined while climbing.
    pub orbit_scans: u64,
    /// Order-increasing hops.
    pub climb_hops: u64,
    /// Hops that started from order at least `⌈√p⌉`.
    pub end_game_hops: u64,
    /// Climbs that stalled and were finished by breadth-first search.
    pub bfs_fallbacks: u64,
    /// Bridges routed through an intermediate cage vertex.
    pub bridge_detours: u64,
    /// Moves appended by word conversion to undo coordinate permutations.
    pub conversion_fixups: u64,
}

impl PathStats {
    pub fn absorb(&mut self, other: &PathStats) {
        self.climb_steps += other.climb_steps;
        self.bridge_steps += other.bridge_steps;
        self.orbit_scans += other.orbit_scans;
        self.climb_hops += other.climb_hops;
        self.end_game_hops += other.end_game_hops;
        self.bfs_fallbacks += other.bfs_fallbacks;
        self.bridge_detours += other.bridge_detours;
        self.conversion_fixups += other.conversion_fixups;
    }
}

/// A word of moves claimed to lead from `start` to `end` in `graph`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathCertificate {
    pub schema_version: String,
    pub p: u64,
    pub graph: GraphKind,
    pub start: MarkoffTriple,
    pub end: MarkoffTriple,
    pub moves: Vec<Move>,
    #[serde(default)]
    pub stats: PathStats,
}

impl PathCertificate {
    pub fn new(
        p: &PrimeModulus,
        graph: GraphKind,
        start: MarkoffTriple,
        end: MarkoffTriple,
        moves: Vec<Move>,
        stats: PathStats,
    ) -> Self {
        Self {
            schema_version: CERTIFICATE_VERSION.to_string(),
            p: p.get(),
            graph,
            start,
            end,
            moves,
            stats,
        }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    /// Parses a certificate, rejecting unknown major schema versions.
    pub fn from_json(text: &str) -> Result<Self, CertificateError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CertificateError::Malformed(e.to_string()))?;
        let version = value
            .get("schema_version")
            .and_then(|v| v.as_str())
            .ok_or_else(|| CertificateError::Malformed("missing schema_version".into()))?;
        check_major(version)?;
        serde_json::from_value(value).map_err(|e| CertificateError::Malformed(e.to_string()))
    }
}

/// Accepts `1` or `1.x`.
pub fn check_major(version: &str) -> Result<(), CertificateError> {
    let major = version.split('.').next().unwrap_or("");
    if major == "1" {
        Ok(())
    } else {
        Err(CertificateError::UnsupportedVersion(version.to_string()))
    }
}

/// Why a certificate failed to verify.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("verification failed at move {index}: {reason}")]
pub struct VerifyFailure {
    /// Position of the offending move; `moves.len()` for an endpoint mismatch,
    /// `0` for a bad header.
    pub index: usize,
    pub reason: String,
}

/// Replays the moves, checking the modulus, the generators allowed in the
/// graph, surface membership and the final endpoint.
pub fn verify_path(c: &PathCertificate) -> Result<(), VerifyFailure> {
    let fail = |index: usize, reason: String| Err(VerifyFailure { index, reason });
    if check_major(&c.schema_version).is_err() {
        return fail(0, format!("unsupported schema version {}", c.schema_version));
    }
    let p = match PrimeModulus::new(c.p) {
        Ok(p) => p,
        Err(e) => return fail(0, e.to_string()),
    };
    if !c.start.on_surface(&p) {
        return fail(0, format!("start {} is not on the surface", c.start));
    }
    let mut t = c.start;
    for (index, m) in c.moves.iter().enumerate() {
        if !c.graph.admits(m.kind()) {
            return fail(index, format!("{m} is not an edge of graph {}", c.graph));
        }
        t = t.apply(&p, *m);
        if !t.on_surface(&p) {
            return fail(index, format!("{t} left the surface"));
        }
    }
    if t != c.end {
        return fail(c.moves.len(), format!("replay ends at {t}, certificate claims {}", c.end));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PathCertificate {
        let p = PrimeModulus::new(17).unwrap();
        let start = MarkoffTriple([15, 0, 8]);
        let moves = vec![Move::rotation(3); 5];
        let end = crate::surface::replay(&p, start, &moves);
        PathCertificate::new(&p, GraphKind::GHat, start, end, moves, PathStats::default())
    }

    #[test]
    fn empty_certificate_verifies() {
        let p = PrimeModulus::new(13).unwrap();
        let c = PathCertificate::new(
            &p,
            GraphKind::G,
            MarkoffTriple::ONES,
            MarkoffTriple::ONES,
            vec![],
            PathStats::default(),
        );
        assert_eq!(verify_path(&c), Ok(()));
    }

    #[test]
    fn corrupted_move_is_located() {
        let mut c = sample();
        assert_eq!(c.end, MarkoffTriple([12, 5, 8]));
        assert_eq!(verify_path(&c), Ok(()));
        c.moves[2] = Move::rotation(1);
        let err = verify_path(&c).unwrap_err();
        assert_eq!(err.index, 5);
        let mut c = sample();
        c.moves[1] = Move::involution(1);
        assert_eq!(verify_path(&c).unwrap_err().index, 1);
        let mut c = sample();
        c.p = 15;
        assert_eq!(verify_path(&c).unwrap_err().index, 0);
    }

    #[test]
    fn json_round_trip_and_versioning() {
        let c = sample();
        let text = c.to_json();
        assert!(text.contains(r#""graph":"ghat""#));
        assert_eq!(PathCertificate::from_json(&text).unwrap(), c);
        let minor = text.replace(r#""schema_version":"1.0""#, r#""schema_version":"1.7""#);
        assert!(PathCertificate::from_json(&minor).is_ok());
        let major = text.replace(r#""schema_version":"1.0""#, r#""schema_version":"2.0""#);
        assert_eq!(
            PathCertificate::from_json(&major),
            Err(CertificateError::UnsupportedVersion("2.0".into()))
        );
        assert!(matches!(
            PathCertificate::from_json("{}"),
            Err(CertificateError::Malformed(_))
        ));
        assert!(matches!(
            PathCertificate::from_json(&text.replace("\"p\":17", "\"p\":-17")),
            Err(CertificateError::Malformed(_))
        ));
    }
}
