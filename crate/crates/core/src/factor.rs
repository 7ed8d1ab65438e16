//! Integer factorization, divisor enumeration and multiplicative orders.
//!
//! Only `p - 1` and `p + 1` are ever factored (each below `2^62`); the
//! factorization of `p^2 - 1` is their merge.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::field::{is_prime_u64, MulGroup, PrimeModulus};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error("cannot factor zero")]
    Zero,
    #[error("cofactor {cofactor} resisted factoring within {budget} rho iterations")]
    BudgetExhausted { cofactor: u64, budget: u64 },
    #[error("element does not satisfy g^n = 1 for the supplied group order {0}")]
    WrongGroupOrder(u128),
    #[error("the identity check needs a non-zero element")]
    ZeroElement,
}

/// Effort cap for Pollard rho.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorBudget {
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        Self {
            rho_iterations: 1 << 24,
        }
    }
}

/// `n = Π prime^exponent`, primes ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredInteger {
    n: u128,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        Self {
            n: 1,
            factors: Vec::new(),
        }
    }

    /// Builds from an explicit factor list; primes are merged and sorted.
    pub fn from_factors(factors: impl IntoIterator<Item = (u64, u32)>) -> Self {
        let mut map = BTreeMap::new();
        for (q, e) in factors {
            if e > 0 {
                *map.entry(q).or_insert(0u32) += e;
            }
        }
        let n = map
            .iter()
            .fold(1u128, |acc, (&q, &e)| acc * (q as u128).pow(e));
        Self {
            n,
            factors: map.into_iter().collect(),
        }
    }

    pub fn n(&self) -> u128 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn product(&self, other: &FactoredInteger) -> FactoredInteger {
        Self::from_factors(self.factors.iter().chain(other.factors.iter()).copied())
    }

    /// τ(n).
    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    /// σ(n), the sum of divisors.
    pub fn divisor_sum(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(q, e)| (0..=e).map(|k| (q as u128).pow(k)).sum::<u128>())
            .product()
    }

    /// All divisors, ascending.
    pub fn divisors(&self) -> Vec<u128> {
        let mut divs = vec![1u128];
        for &(q, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u128;
            for _ in 0..e {
                pk *= q as u128;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Complete factorization of `n` by trial division followed by Pollard rho.
pub fn factorize(n: u64) -> Result<FactoredInteger, FactorError> {
    factorize_with(n, FactorBudget::default())
}

pub fn factorize_with(n: u64, budget: FactorBudget) -> Result<FactoredInteger, FactorError> {
    if n == 0 {
        return Err(FactorError::Zero);
    }
    let mut found = Vec::new();
    let mut m = n;
    for q in [2u64, 3, 5] {
        while m % q == 0 {
            found.push((q, 1));
            m /= q;
        }
    }
    // wheel over 6k ± 1 up to 10^4
    let mut d = 7u64;
    let mut step = [4u64, 2].into_iter().cycle();
    while d <= 10_000 && d * d <= m {
        while m % d == 0 {
            found.push((d, 1));
            m /= d;
        }
        d += step.next().unwrap();
    }
    let mut stack = vec![m];
    while let Some(c) = stack.pop() {
        if c == 1 {
            continue;
        }
        if is_prime_u64(c) {
            found.push((c, 1));
            continue;
        }
        let split = pollard_brent(c, budget.rho_iterations).ok_or(FactorError::BudgetExhausted {
            cofactor: c,
            budget: budget.rho_iterations,
        })?;
        stack.push(split);
        stack.push(c / split);
    }
    Ok(FactoredInteger::from_factors(found))
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's variant of Pollard rho; returns a non-trivial factor of the
/// composite `n`, or `None` once `budget` iterations are spent.
fn pollard_brent(n: u64, budget: u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    let mut spent = 0u64;
    for c in 1..u64::MAX {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let mut g = 1u64;
        let (mut x, mut ys) = (0u64, 0u64);
        const BLOCK: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BLOCK.min(r - k) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BLOCK;
            }
            r *= 2;
            spent += r;
            if spent > budget {
                return None;
            }
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    None
}

/// The least `k ≥ 1` with `g^k = 1`, given a multiple `group` of that order.
pub fn mult_order<G: MulGroup>(
    group: &G,
    g: G::Elem,
    group_order: &FactoredInteger,
) -> Result<u128, FactorError> {
    let one = group.one();
    if group.pow(g, group_order.n()) != one {
        return Err(FactorError::WrongGroupOrder(group_order.n()));
    }
    let mut k = group_order.n();
    for &(q, e) in group_order.factors() {
        for _ in 0..e {
            let candidate = k / q as u128;
            if group.pow(g, candidate) == one {
                k = candidate;
            } else {
                break;
            }
        }
    }
    Ok(k)
}

/// Factorizations of `p - 1`, `p + 1` and their product `p^2 - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupOrders {
    pub p_minus_1: FactoredInteger,
    pub p_plus_1: FactoredInteger,
    pub p_squared_minus_1: FactoredInteger,
}

impl GroupOrders {
    pub fn new(p: &PrimeModulus) -> Result<Self, FactorError> {
        Self::with_budget(p, FactorBudget::default())
    }

    pub fn with_budget(p: &PrimeModulus, budget: FactorBudget) -> Result<Self, FactorError> {
        let p_minus_1 = factorize_with(p.get() - 1, budget)?;
        let p_plus_1 = factorize_with(p.get() + 1, budget)?;
        let p_squared_minus_1 = p_minus_1.product(&p_plus_1);
        Ok(Self {
            p_minus_1,
            p_plus_1,
            p_squared_minus_1,
        })
    }
}

/// η_p = τ(p² − 1).
pub fn eta(p: &PrimeModulus) -> Result<u64, FactorError> {
    Ok(GroupOrders::new(p)?.p_squared_minus_1.divisor_count())
}

/// Outcome of the divisor-sum smoothness screen.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessReport {
    pub passes: bool,
    /// The tested `y` with the largest ratio `S(y) / y`; a violating `y`
    /// whenever `passes` is false.
    pub worst_y: u128,
    pub worst_ratio: f64,
    /// `(ln p)^{1/3}`, the lower end of the divisor window.
    pub lower_bound: f64,
}

/// Evaluates `S(y) = Σ_{d | n, d ∈ [(ln p)^{1/3}, y]} d^{2/3} < y` for every
/// `y` that is a divisor of `n` inside the window, plus the extra points in
/// `extra_y`. `S` only jumps at divisors, so those are the binding cases.
pub fn smoothness_screen(ln_p: f64, n: &FactoredInteger, extra_y: &[u128]) -> SmoothnessReport {
    let lower = ln_p.cbrt();
    let window: Vec<u128> = n
        .divisors()
        .into_iter()
        .filter(|&d| d as f64 >= lower)
        .collect();
    let mut tests: Vec<u128> = window.clone();
    tests.extend(extra_y.iter().copied().filter(|&y| y as f64 >= lower));
    tests.sort_unstable();
    tests.dedup();

    let mut passes = true;
    let mut worst_y = 0u128;
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut acc = 0.0f64;
    let mut next = 0usize;
    for y in tests {
        while next < window.len() && window[next] <= y {
            acc += (window[next] as f64).powf(2.0 / 3.0);
            next += 1;
        }
        let ratio = acc / y as f64;
        if acc >= y as f64 {
            passes = false;
        }
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_y = y;
        }
    }
    if worst_ratio == f64::NEG_INFINITY {
        worst_ratio = 0.0;
    }
    SmoothnessReport {
        passes,
        worst_y,
        worst_ratio,
        lower_bound: lower,
    }
}

/// The smoothness screen for `p^2 - 1`, testing every divisor and `y = p`.
pub fn smoothness_check(p: &PrimeModulus) -> Result<SmoothnessReport, FactorError> {
    let orders = GroupOrders::new(p)?;
    Ok(smoothness_screen(
        (p.get() as f64).ln(),
        &orders.p_squared_minus_1,
        &[p.get() as u128],
    ))
}
