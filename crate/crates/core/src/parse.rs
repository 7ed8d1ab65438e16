//! Parsers for command-line and file inputs.

use num_bigint::{BigInt, BigUint};
use num_traits::Num;
use thiserror::Error;

use crate::bigfield::{BigFieldError, BigPrime};
use crate::field::{FieldError, PrimeModulus};
use crate::lifting::{IntegerTriple, LiftError};
use crate::surface::{MarkoffTriple, SurfaceError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("not an unsigned integer: {0:?}")]
    BadInteger(String),
    #[error("expected three comma-separated values, got {0:?}")]
    BadTriple(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    BigField(#[from] BigFieldError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

/// Decimal, or hexadecimal with a `0x` prefix.
pub fn parse_u64(s: &str) -> Result<u64, ParseError> {
    let t = s.trim();
    let (digits, radix) = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => (hex, 16),
        None => (t, 10),
    };
    // the std parsers also take a leading '+'
    if digits.is_empty() || !digits.chars().all(|c| c.is_digit(radix)) {
        return Err(ParseError::BadInteger(s.to_string()));
    }
    u64::from_str_radix(digits, radix).map_err(|_| ParseError::BadInteger(s.to_string()))
}

pub fn parse_prime(s: &str) -> Result<PrimeModulus, ParseError> {
    Ok(PrimeModulus::new(parse_u64(s)?)?)
}

/// Arbitrary-size unsigned integer, decimal or `0x` hex.
pub fn parse_biguint(s: &str) -> Result<BigUint, ParseError> {
    let t = s.trim();
    let (digits, radix) = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => (hex, 16),
        None => (t, 10),
    };
    if digits.is_empty() || !digits.chars().all(|c| c.is_digit(radix)) {
        return Err(ParseError::BadInteger(s.to_string()));
    }
    BigUint::from_str_radix(digits, radix).map_err(|_| ParseError::BadInteger(s.to_string()))
}

pub fn parse_big_prime(s: &str) -> Result<BigPrime, ParseError> {
    Ok(BigPrime::new(parse_biguint(s)?)?)
}

fn split3(s: &str) -> Result<[&str; 3], ParseError> {
    let parts: Vec<&str> = s.trim().trim_start_matches('(').trim_end_matches(')').split(',').collect();
    parts.try_into().map_err(|_| ParseError::BadTriple(s.to_string()))
}

/// Three residues in `[0, p)` that lie on the surface.
pub fn parse_triple(s: &str, p: &PrimeModulus) -> Result<MarkoffTriple, ParseError> {
    let [a, b, c] = split3(s)?;
    let coords = [parse_decimal(a)?, parse_decimal(b)?, parse_decimal(c)?];
    Ok(MarkoffTriple::new(p, coords)?)
}

fn parse_decimal(s: &str) -> Result<u64, ParseError> {
    let t = s.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::BadInteger(s.to_string()));
    }
    t.parse().map_err(|_| ParseError::BadInteger(s.to_string()))
}

/// Three signed decimal integers solving the equation over the integers.
pub fn parse_integer_triple(s: &str) -> Result<IntegerTriple, ParseError> {
    let [a, b, c] = split3(s)?;
    let coords = [a, b, c].map(|x| {
        let t = x.trim();
        let digits = t.strip_prefix('-').unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseError::BadInteger(x.to_string()));
        }
        BigInt::from_str_radix(t, 10).map_err(|_| ParseError::BadInteger(x.to_string()))
    });
    let [a, b, c] = coords;
    Ok(IntegerTriple::new([a?, b?, c?])?)
}
