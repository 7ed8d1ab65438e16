//! Rotation orders of coordinates and the cage.
//!
//! The rotation fixing a coordinate with value `x1` acts on the other two by
//! the matrix `[[0, 1], [-1, x]]` with `x = 3 x1`. Its order is read off an
//! eigenvalue `χ` with `χ + χ^{-1} = x`.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;
use thiserror::Error;

use crate::factor::{mult_order, FactorError, GroupOrders};
use crate::field::{PrimeModulus, QuadExt, QuadExtField};
use crate::surface::MarkoffTriple;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RotationError {
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error("x1 = {0} is parabolic and has no splitting element")]
    Parabolic(u64),
    #[error("orbit of {triple} about coordinate {index} did not close within {cap} steps")]
    OrbitOverflow { triple: String, index: u8, cap: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateClass {
    Parabolic,
    Hyperbolic,
    Elliptic,
}

impl CoordinateClass {
    pub fn name(&self) -> &'static str {
        match self {
            CoordinateClass::Parabolic => "parabolic",
            CoordinateClass::Hyperbolic => "hyperbolic",
            CoordinateClass::Elliptic => "elliptic",
        }
    }
}

/// The eigenvalue `χ`, in `F_p` or in `F_{p^2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chi {
    Base(u64),
    Ext(QuadExt),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplittingData {
    pub chi: Chi,
    pub chi_inv: Chi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitDescriptor {
    pub coordinate_index: u8,
    pub coordinate_value: u64,
    pub class: CoordinateClass,
    pub order: u64,
    pub maximal: bool,
}

/// One row of the order table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrderRow {
    pub element: u64,
    pub order: u64,
    pub class: CoordinateClass,
    pub maximal: bool,
}

/// Moduli up to this size cache every coordinate's order.
const CACHE_LIMIT: u64 = 1 << 22;

/// Rotation-order oracle for one prime. Shareable across threads.
#[derive(Debug)]
pub struct RotationOrders {
    p: PrimeModulus,
    ext: QuadExtField,
    groups: GroupOrders,
    /// Order by `x1`; zero means not yet computed.
    cache: Vec<AtomicU64>,
}

impl RotationOrders {
    pub fn new(p: &PrimeModulus) -> Result<Self, RotationError> {
        let groups = GroupOrders::new(p)?;
        Ok(Self::with_groups(p, groups))
    }

    pub fn with_groups(p: &PrimeModulus, groups: GroupOrders) -> Self {
        let cache = if p.get() <= CACHE_LIMIT {
            (0..p.get()).map(|_| AtomicU64::new(0)).collect()
        } else {
            Vec::new()
        };
        Self {
            p: *p,
            ext: QuadExtField::new(*p),
            groups,
            cache,
        }
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.p
    }

    pub fn groups(&self) -> &GroupOrders {
        &self.groups
    }

    pub fn classify(&self, x1: u64) -> CoordinateClass {
        classify(&self.p, x1)
    }

    /// The class maximum: `p - 1`, `p + 1`, or `p` / `2p` for `x ≡ 2` / `x ≡ -2`.
    pub fn max_order(&self, x1: u64) -> u64 {
        let n = self.p.get();
        match self.classify(x1) {
            CoordinateClass::Hyperbolic => n - 1,
            CoordinateClass::Elliptic => n + 1,
            CoordinateClass::Parabolic => self.rotation_order(x1),
        }
    }

    pub fn rotation_order(&self, x1: u64) -> u64 {
        if let Some(slot) = self.cache.get(x1 as usize) {
            let cached = slot.load(Ordering::Relaxed);
            if cached != 0 {
                return cached;
            }
            let order = self.compute_order(x1);
            slot.store(order, Ordering::Relaxed);
            return order;
        }
        self.compute_order(x1)
    }

    fn compute_order(&self, x1: u64) -> u64 {
        let p = &self.p;
        let x = p.mul(3, x1);
        if x == 2 % p.get() {
            return p.get();
        }
        if x == p.get() - 2 {
            return 2 * p.get();
        }
        let order = match self.split(x1).expect("non-parabolic").chi {
            Chi::Base(chi) => mult_order(p, chi, &self.groups.p_minus_1),
            Chi::Ext(chi) => mult_order(&self.ext, chi, &self.groups.p_plus_1),
        };
        order.expect("χ lies in the group of order p - 1 or p + 1") as u64
    }

    pub fn split(&self, x1: u64) -> Result<SplittingData, RotationError> {
        let p = &self.p;
        let x = p.mul(3, x1);
        let disc = p.sub(p.mul(x, x), p.reduce(4));
        let half = p.inv(2).expect("p is odd");
        match self.classify(x1) {
            CoordinateClass::Parabolic => Err(RotationError::Parabolic(x1)),
            CoordinateClass::Hyperbolic => {
                let r = p.sqrt(disc).expect("residue").smaller();
                let chi = p.mul(p.add(x, r), half);
                let chi_inv = p.mul(p.sub(x, r), half);
                Ok(SplittingData {
                    chi: Chi::Base(chi),
                    chi_inv: Chi::Base(chi_inv),
                })
            }
            CoordinateClass::Elliptic => {
                // disc = D s^2, so √disc = s √D
                let d_inv = p.inv(self.ext.nonresidue()).expect("non-zero");
                let s = p.sqrt(p.mul(disc, d_inv)).expect("residue").smaller();
                let a = p.mul(x, half);
                let b = p.mul(s, half);
                Ok(SplittingData {
                    chi: Chi::Ext(QuadExt { a, b }),
                    chi_inv: Chi::Ext(QuadExt { a, b: p.neg(b) }),
                })
            }
        }
    }

    pub fn is_maximal(&self, x1: u64) -> bool {
        self.rotation_order(x1) == self.max_order(x1)
    }

    /// Descriptor for the coordinate at 1-based `index`.
    pub fn descriptor(&self, t: &MarkoffTriple, index: u8) -> OrbitDescriptor {
        let v = t.get(index);
        let order = self.rotation_order(v);
        OrbitDescriptor {
            coordinate_index: index,
            coordinate_value: v,
            class: self.classify(v),
            order,
            maximal: order == self.max_order(v),
        }
    }

    /// Largest coordinate order and its 1-based index; lowest index on ties.
    pub fn triple_order(&self, t: &MarkoffTriple) -> (u64, u8) {
        let mut best = (self.rotation_order(t.0[0]), 1u8);
        for index in 2..=3u8 {
            let order = self.rotation_order(t.get(index));
            if order > best.0 {
                best = (order, index);
            }
        }
        best
    }

    /// Some coordinate has the maximal order of its class.
    pub fn in_cage(&self, t: &MarkoffTriple) -> bool {
        t.0.iter().any(|&v| self.is_maximal(v))
    }

    /// Indices (1-based) of the maximal coordinates.
    pub fn maximal_indices(&self, t: &MarkoffTriple) -> Vec<u8> {
        (1..=3u8).filter(|&i| self.is_maximal(t.get(i))).collect()
    }

    pub fn order_table(&self) -> Vec<OrderRow> {
        self.p
            .residues()
            .map(|element| OrderRow {
                element,
                order: self.rotation_order(element),
                class: self.classify(element),
                maximal: self.is_maximal(element),
            })
            .collect()
    }

    /// The rotation orbit of `t` about `index`, starting at `t`.
    pub fn orbit(&self, t: &MarkoffTriple, index: u8) -> Result<Vec<MarkoffTriple>, RotationError> {
        orbit(&self.p, t, index)
    }
}

pub fn classify(p: &PrimeModulus, x1: u64) -> CoordinateClass {
    let x = p.mul(3, x1);
    let disc = p.sub(p.mul(x, x), p.reduce(4));
    match p.legendre(disc) {
        0 => CoordinateClass::Parabolic,
        1 => CoordinateClass::Hyperbolic,
        _ => CoordinateClass::Elliptic,
    }
}

/// Streams `t, rot(t), rot^2(t), ...` until the orbit closes.
#[derive(Clone, Debug)]
pub struct OrbitIter {
    p: PrimeModulus,
    index: u8,
    start: MarkoffTriple,
    next: Option<MarkoffTriple>,
    emitted: u64,
    overflowed: bool,
}

impl OrbitIter {
    pub fn new(p: &PrimeModulus, t: &MarkoffTriple, index: u8) -> Self {
        Self {
            p: *p,
            index,
            start: *t,
            next: Some(*t),
            emitted: 0,
            overflowed: false,
        }
    }

    /// True once the safety cap of `2p + 1` points has stopped the stream.
    pub fn overflowed(&self) -> bool {
        self.overflowed
    }
}

impl Iterator for OrbitIter {
    type Item = MarkoffTriple;

    fn next(&mut self) -> Option<MarkoffTriple> {
        let current = self.next?;
        if self.emitted > 2 * self.p.get() + 1 {
            self.overflowed = true;
            self.next = None;
            return None;
        }
        self.emitted += 1;
        let following = current.rotation(&self.p, self.index);
        self.next = (following != self.start).then_some(following);
        Some(current)
    }
}

pub fn orbit(
    p: &PrimeModulus,
    t: &MarkoffTriple,
    index: u8,
) -> Result<Vec<MarkoffTriple>, RotationError> {
    let mut it = OrbitIter::new(p, t, index);
    let points: Vec<_> = it.by_ref().collect();
    if it.overflowed() {
        return Err(RotationError::OrbitOverflow {
            triple: t.to_string(),
            index,
            cap: 2 * p.get() + 1,
        });
    }
    Ok(points)
}
