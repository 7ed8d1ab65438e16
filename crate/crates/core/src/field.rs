//! Arithmetic in `F_p` and `F_{p^2}`.
//!
//! Residues are plain `u64` values in `[0, p)`; the [`PrimeModulus`] carries
//! the modulus and performs every operation. Products go through `u128`, so
//! the modulus is limited to `p < 2^62`. Larger moduli (hash demos) live in
//! [`crate::bigfield`].

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus must be an odd prime, got {0}")]
    Even(u64),
    #[error("modulus {0} exceeds the 62-bit limit of the word-sized field")]
    TooLarge(u64),
}

/// An odd prime `p < 2^62`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus {
    p: u64,
}

impl PrimeModulus {
    pub const LIMIT: u64 = 1 << 62;

    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= Self::LIMIT {
            return Err(FieldError::TooLarge(p));
        }
        if p == 2 {
            return Err(FieldError::Even(p));
        }
        if !is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn get(&self) -> u64 {
        self.p
    }

    /// Number of bits in the binary representation of `p`.
    pub fn bit_len(&self) -> u32 {
        64 - self.p.leading_zeros()
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.p
    }

    #[inline]
    pub fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.p as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, base: u64, mut exp: u128) -> u64 {
        let mut acc = 1 % self.p;
        let mut b = self.reduce(base);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = self.reduce(a);
        if a == 0 {
            return None;
        }
        // extended Euclid on i128 to stay clear of overflow
        let (mut r0, mut r1) = (self.p as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(self.reduce_i128(t0))
    }

    /// `a / b`, `None` when `b == 0`.
    pub fn div(&self, a: u64, b: u64) -> Option<u64> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    /// The Legendre symbol `(a / p)` via Euler's criterion.
    pub fn legendre(&self, a: u64) -> i8 {
        let a = self.reduce(a);
        if a == 0 {
            return 0;
        }
        let e = self.pow(a, ((self.p - 1) / 2) as u128);
        if e == 1 {
            1
        } else {
            debug_assert_eq!(e, self.p - 1);
            -1
        }
    }

    /// Square roots of `a`, smaller representative first. `None` when `a`
    /// is a non-residue.
    pub fn sqrt(&self, a: u64) -> Option<SquareRoots> {
        let a = self.reduce(a);
        if a == 0 {
            return Some(SquareRoots::Zero);
        }
        if self.legendre(a) != 1 {
            return None;
        }
        let r = self.tonelli_shanks(a);
        let other = self.p - r;
        Some(SquareRoots::Pair(r.min(other), r.max(other)))
    }

    fn tonelli_shanks(&self, a: u64) -> u64 {
        let p = self.p;
        if p % 4 == 3 {
            return self.pow(a, ((p + 1) / 4) as u128);
        }
        // p - 1 = q * 2^s with q odd
        let mut q = p - 1;
        let mut s = 0u32;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let z = self.smallest_nonresidue();
        let mut m = s;
        let mut c = self.pow(z, q as u128);
        let mut t = self.pow(a, q as u128);
        let mut r = self.pow(a, q.div_ceil(2) as u128);
        while t != 1 {
            let mut i = 0u32;
            let mut t2 = t;
            while t2 != 1 {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.mul(b, b);
            }
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        r
    }

    /// The smallest positive quadratic non-residue mod `p`.
    pub fn smallest_nonresidue(&self) -> u64 {
        (2..self.p)
            .find(|&z| self.legendre(z) == -1)
            .expect("every odd prime has a non-residue")
    }

    /// Iterator over every residue `0..p`.
    pub fn residues(&self) -> std::ops::Range<u64> {
        0..self.p
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.p)
    }
}

/// Square roots of a residue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareRoots {
    Zero,
    Pair(u64, u64),
}

impl SquareRoots {
    pub fn smaller(&self) -> u64 {
        match *self {
            SquareRoots::Zero => 0,
            SquareRoots::Pair(r, _) => r,
        }
    }

    pub fn to_vec(&self) -> Vec<u64> {
        match *self {
            SquareRoots::Zero => vec![0],
            SquareRoots::Pair(r, s) => vec![r, s],
        }
    }
}

/// Multiplicative structure shared by `F_p^*` and `F_{p^2}^*`, used for
/// order computations.
pub trait MulGroup {
    type Elem: Copy + PartialEq + fmt::Debug;

    fn one(&self) -> Self::Elem;

    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;

    fn pow(&self, base: Self::Elem, mut exp: u128) -> Self::Elem {
        let mut acc = self.one();
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }
}

impl MulGroup for PrimeModulus {
    type Elem = u64;

    fn one(&self) -> u64 {
        1
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        PrimeModulus::mul(self, a, b)
    }

    fn pow(&self, base: u64, exp: u128) -> u64 {
        PrimeModulus::pow(self, base, exp)
    }
}

/// `a + b·√D` in `F_{p^2} = F_p[y]/(y^2 - D)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt {
    pub a: u64,
    pub b: u64,
}

/// The quadratic extension built on the smallest non-residue `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadExtField {
    base: PrimeModulus,
    nonresidue: u64,
}

impl QuadExtField {
    pub fn new(base: PrimeModulus) -> Self {
        Self {
            nonresidue: base.smallest_nonresidue(),
            base,
        }
    }

    pub fn base(&self) -> &PrimeModulus {
        &self.base
    }

    pub fn nonresidue(&self) -> u64 {
        self.nonresidue
    }

    pub fn from_base(&self, a: u64) -> QuadExt {
        QuadExt {
            a: self.base.reduce(a),
            b: 0,
        }
    }

    pub fn add(&self, x: QuadExt, y: QuadExt) -> QuadExt {
        let f = &self.base;
        QuadExt {
            a: f.add(x.a, y.a),
            b: f.add(x.b, y.b),
        }
    }

    pub fn sub(&self, x: QuadExt, y: QuadExt) -> QuadExt {
        let f = &self.base;
        QuadExt {
            a: f.sub(x.a, y.a),
            b: f.sub(x.b, y.b),
        }
    }

    pub fn mul(&self, x: QuadExt, y: QuadExt) -> QuadExt {
        let f = &self.base;
        let bb = f.mul(x.b, y.b);
        QuadExt {
            a: f.add(f.mul(x.a, y.a), f.mul(bb, self.nonresidue)),
            b: f.add(f.mul(x.a, y.b), f.mul(x.b, y.a)),
        }
    }

    pub fn conjugate(&self, x: QuadExt) -> QuadExt {
        QuadExt {
            a: x.a,
            b: self.base.neg(x.b),
        }
    }

    /// `x^{p+1} = x · conj(x)`, always in `F_p`.
    pub fn norm(&self, x: QuadExt) -> u64 {
        let f = &self.base;
        f.sub(
            f.mul(x.a, x.a),
            f.mul(self.nonresidue, f.mul(x.b, x.b)),
        )
    }

    pub fn inv(&self, x: QuadExt) -> Option<QuadExt> {
        let n_inv = self.base.inv(self.norm(x))?;
        let c = self.conjugate(x);
        Some(QuadExt {
            a: self.base.mul(c.a, n_inv),
            b: self.base.mul(c.b, n_inv),
        })
    }

    pub fn frobenius(&self, x: QuadExt) -> QuadExt {
        MulGroup::pow(self, x, self.base.get() as u128)
    }

    pub fn is_base(&self, x: QuadExt) -> bool {
        x.b == 0
    }
}

impl MulGroup for QuadExtField {
    type Elem = QuadExt;

    fn one(&self) -> QuadExt {
        QuadExt { a: 1, b: 0 }
    }

    fn mul(&self, a: QuadExt, b: QuadExt) -> QuadExt {
        QuadExtField::mul(self, a, b)
    }
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, b, m);
        }
        b = mul_mod_u64(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for the full `u64` range.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
