//! The Markoff hash: a non-backtracking walk on the involution graph driven
//! by input bits.
//!
//! From the current label `c` (initially `k`), bit `b` selects the next label
//! `(c + b) mod 3 + 1`, which always differs from `c`, and the walk applies
//! that involution. The digest is the final vertex.

use std::fmt::Debug;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::bigfield::BigPrime;
use crate::field::PrimeModulus;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HashError {
    #[error("edge label must be 1, 2 or 3, got {0}")]
    BadLabel(u8),
    #[error("start vertex is not on the surface")]
    StartOffSurface,
    #[error("seed has {got} bits, at least {need} required")]
    SeedTooShort { got: usize, need: u64 },
    #[error("invalid bit character {0:?}")]
    BadBit(char),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DigestError {
    #[error("digest must be {expected} hex characters, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("digest is not valid hex")]
    NotHex,
    #[error("coordinate {0} is not below the modulus")]
    OutOfRange(usize),
    #[error("decoded vertex is not on the surface")]
    OffSurface,
}

/// Coordinate arithmetic needed by the walk, for word-sized and big moduli.
pub trait HashField {
    type Elem: Clone + PartialEq + Debug;

    fn element(&self, v: u64) -> Self::Elem;
    /// `3 a b - c`.
    fn vieta(&self, a: &Self::Elem, b: &Self::Elem, c: &Self::Elem) -> Self::Elem;
    fn on_surface(&self, t: &[Self::Elem; 3]) -> bool;
    fn modulus_bits(&self) -> u64;
    /// Big-endian, left-padded to `width` bytes.
    fn to_bytes(&self, e: &Self::Elem, width: usize) -> Vec<u8>;
    /// `None` if the value is not below the modulus.
    fn decode(&self, bytes: &[u8]) -> Option<Self::Elem>;

    fn involution(&self, t: &[Self::Elem; 3], index: u8) -> [Self::Elem; 3] {
        let i = index as usize - 1;
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let mut out = t.clone();
        out[i] = self.vieta(&t[j], &t[k], &t[i]);
        out
    }

    /// Bytes per coordinate in the digest.
    fn coordinate_width(&self) -> usize {
        self.modulus_bits().div_ceil(8) as usize
    }
}

impl HashField for PrimeModulus {
    type Elem = u64;

    fn element(&self, v: u64) -> u64 {
        self.reduce(v)
    }

    fn vieta(&self, a: &u64, b: &u64, c: &u64) -> u64 {
        self.sub(self.mul(self.mul(3, *a), *b), *c)
    }

    fn on_surface(&self, t: &[u64; 3]) -> bool {
        crate::surface::MarkoffTriple(*t).on_surface(self)
    }

    fn modulus_bits(&self) -> u64 {
        self.bit_len() as u64
    }

    fn to_bytes(&self, e: &u64, width: usize) -> Vec<u8> {
        e.to_be_bytes()[8 - width..].to_vec()
    }

    fn decode(&self, bytes: &[u8]) -> Option<u64> {
        let mut buf = [0u8; 8];
        buf[8 - bytes.len()..].copy_from_slice(bytes);
        let v = u64::from_be_bytes(buf);
        (v < self.get()).then_some(v)
    }
}

impl HashField for BigPrime {
    type Elem = BigUint;

    fn element(&self, v: u64) -> BigUint {
        self.reduce(&BigUint::from(v))
    }

    fn vieta(&self, a: &BigUint, b: &BigUint, c: &BigUint) -> BigUint {
        let three_ab = self.mul(&self.mul(&BigUint::from(3u32), a), b);
        self.sub(&three_ab, c)
    }

    fn on_surface(&self, t: &[BigUint; 3]) -> bool {
        if t.iter().any(|x| x >= self.get()) || t.iter().all(Zero::is_zero) {
            return false;
        }
        let squares = t.iter().fold(BigUint::zero(), |acc, x| self.add(&acc, &self.mul(x, x)));
        let cubic = self.mul(&self.mul(&BigUint::from(3u32), &t[0]), &self.mul(&t[1], &t[2]));
        squares == cubic
    }

    fn modulus_bits(&self) -> u64 {
        self.bit_len()
    }

    fn to_bytes(&self, e: &BigUint, width: usize) -> Vec<u8> {
        let raw = if e.is_zero() { Vec::new() } else { e.to_bytes_be() };
        let mut out = vec![0u8; width - raw.len()];
        out.extend(raw);
        out
    }

    fn decode(&self, bytes: &[u8]) -> Option<BigUint> {
        let v = BigUint::from_bytes_be(bytes);
        (&v < self.get()).then_some(v)
    }
}

/// A sequence of bits, most significant first within each source byte.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Parses a string of `0` and `1` characters.
    pub fn parse(s: &str) -> Result<Self, HashError> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(HashError::BadBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        Self(
            bytes
                .iter()
                .flat_map(|&b| (0..8).rev().map(move |s| (b >> s) & 1 == 1))
                .collect(),
        )
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Public parameters of the hash.
#[derive(Clone, Debug)]
pub struct HashParams<F: HashField> {
    field: F,
    start: [F::Elem; 3],
    k: u8,
    min_walk: u64,
}

impl<F: HashField> HashParams<F> {
    /// Start `(1,1,1)`, minimum walk `⌈log2 p⌉`.
    pub fn new(field: F, k: u8) -> Result<Self, HashError> {
        let one = field.element(1);
        Self::with_start(field, k, [one.clone(), one.clone(), one])
    }

    pub fn with_start(field: F, k: u8, start: [F::Elem; 3]) -> Result<Self, HashError> {
        if !(1..=3).contains(&k) {
            return Err(HashError::BadLabel(k));
        }
        if !field.on_surface(&start) {
            return Err(HashError::StartOffSurface);
        }
        // p is an odd prime, so ⌈log2 p⌉ is its bit length
        let min_walk = field.modulus_bits();
        Ok(Self {
            field,
            start,
            k,
            min_walk,
        })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn start(&self) -> &[F::Elem; 3] {
        &self.start
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn min_walk(&self) -> u64 {
        self.min_walk
    }
}

/// Result of one hash evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct HashOutput<E> {
    pub vertex: [E; 3],
    /// Edge label taken at each step.
    pub labels: Vec<u8>,
    /// The input was shorter than the minimum walk length.
    pub short_input: bool,
}

#[inline]
pub fn next_label(current: u8, bit: bool) -> u8 {
    (current + bit as u8) % 3 + 1
}

pub fn hash_bits<F: HashField>(bits: &BitString, params: &HashParams<F>) -> HashOutput<F::Elem> {
    hash_bits_traced(bits, params, |_, _| {})
}

/// As [`hash_bits`], calling `visit(label, vertex)` after every step.
pub fn hash_bits_traced<F: HashField>(
    bits: &BitString,
    params: &HashParams<F>,
    mut visit: impl FnMut(u8, &[F::Elem; 3]),
) -> HashOutput<F::Elem> {
    let short_input = (bits.len() as u64) < params.min_walk;
    if short_input {
        log::warn!(
            "hash input has {} bits, fewer than the minimum walk of {}",
            bits.len(),
            params.min_walk
        );
    }
    let mut label = params.k;
    let mut vertex = params.start.clone();
    let mut labels = Vec::with_capacity(bits.len());
    for &b in bits.bits() {
        label = next_label(label, b);
        vertex = params.field.involution(&vertex, label);
        labels.push(label);
        visit(label, &vertex);
    }
    HashOutput {
        vertex,
        labels,
        short_input,
    }
}

/// The public start vertex obtained by hashing `seed_bits` from `(1,1,1)`
/// with `k = 1`.
pub fn derive_start<F: HashField + Clone>(
    field: &F,
    seed_bits: &BitString,
) -> Result<[F::Elem; 3], HashError> {
    let params = HashParams::new(field.clone(), 1)?;
    if (seed_bits.len() as u64) < params.min_walk {
        return Err(HashError::SeedTooShort {
            got: seed_bits.len(),
            need: params.min_walk,
        });
    }
    Ok(hash_bits(seed_bits, &params).vertex)
}

/// Lowercase hex of the three fixed-width big-endian coordinates.
pub fn digest_encode<F: HashField>(field: &F, vertex: &[F::Elem; 3]) -> String {
    let width = field.coordinate_width();
    let bytes: Vec<u8> = vertex.iter().flat_map(|c| field.to_bytes(c, width)).collect();
    hex::encode(bytes)
}

pub fn digest_decode<F: HashField>(field: &F, digest: &str) -> Result<[F::Elem; 3], DigestError> {
    let width = field.coordinate_width();
    if digest.len() != 6 * width {
        return Err(DigestError::WrongLength {
            expected: 6 * width,
            got: digest.len(),
        });
    }
    if digest.bytes().any(|b| b.is_ascii_uppercase()) {
        return Err(DigestError::NotHex);
    }
    let bytes = hex::decode(digest).map_err(|_| DigestError::NotHex)?;
    let mut coords = Vec::with_capacity(3);
    for (i, chunk) in bytes.chunks(width).enumerate() {
        coords.push(field.decode(chunk).ok_or(DigestError::OutOfRange(i))?);
    }
    let vertex: [F::Elem; 3] = coords.try_into().expect("three chunks");
    if !field.on_surface(&vertex) {
        return Err(DigestError::OffSurface);
    }
    Ok(vertex)
}
