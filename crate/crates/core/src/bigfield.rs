//! Arbitrary-precision prime field, used only where the modulus exceeds the
//! word-sized field (hash demos up to 256-bit primes).

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::is_prime_u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BigFieldError {
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("modulus must be an odd prime, got {0}")]
    Even(BigUint),
}

/// Extra Miller–Rabin rounds with pseudo-random bases beyond the fixed ones.
const RANDOM_ROUNDS: usize = 32;

/// An odd prime of any size.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BigPrime {
    p: BigUint,
}

impl BigPrime {
    pub fn new(p: BigUint) -> Result<Self, BigFieldError> {
        if p.is_even() {
            return Err(BigFieldError::Even(p));
        }
        if !is_probable_prime(&p) {
            return Err(BigFieldError::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn get(&self) -> &BigUint {
        &self.p
    }

    pub fn bit_len(&self) -> u64 {
        self.p.bits()
    }

    pub fn reduce(&self, v: &BigUint) -> BigUint {
        v % &self.p
    }

    pub fn reduce_signed(&self, v: &BigInt) -> BigUint {
        let p = BigInt::from_biguint(Sign::Plus, self.p.clone());
        v.mod_floor(&p).to_biguint().expect("mod_floor is non-negative")
    }

    pub fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.p
    }

    pub fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.p - (b - a)
        }
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.p
    }
}

/// Miller–Rabin: deterministic below `2^64`, otherwise the first twelve prime
/// bases plus seeded pseudo-random bases (error below `4^-44`).
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;

    let witness = |a: &BigUint| -> bool {
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            return false;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                return false;
            }
        }
        true
    };

    for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if witness(&BigUint::from(a)) {
            return false;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x006d_6172_6b6f_6666);
    let two = BigUint::from(2u32);
    for _ in 0..RANDOM_ROUNDS {
        let a = rng.gen_biguint_range(&two, &n_minus_1);
        if witness(&a) {
            return false;
        }
    }
    !n.is_zero()
}
