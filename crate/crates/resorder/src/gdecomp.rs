//! Decomposition of the base g into sign, primitive base and exponent, and
//! the quadratic-field parameters attached to it.
//!
//! Every density formula in this crate is driven by four quantities derived
//! from g: the sign, the largest exponent h with g = +/- g0^h for a positive
//! rational g0 that is not an exact power, the discriminant D of Q(sqrt(g0)),
//! and the 2-adic correction parameters m and n_r of the field-degree rule
//! (see [`crate::kummer`]).

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, Rat};
use crate::{Error, Result};

/// The decomposition g = sign * g0^h together with the discriminant data.
#[derive(Debug, Clone)]
pub struct GParams {
    /// The base itself, reduced.
    pub g: Rat,
    /// +1 or -1.
    pub sign: i8,
    /// Positive rational, not an exact power of a rational.
    pub g0: Rat,
    /// Largest exponent: g = sign * g0^h.
    pub h: u64,
    /// Discriminant of Q(sqrt(g0)); always positive since g0 > 0.
    pub disc: u128,
    /// 2-adic correction parameter of the degree rule.
    pub m: u128,
    /// nu_2(h), cached.
    pub e2: u32,
    /// nu_p(h) for the primes dividing h.
    pub e: BTreeMap<u64, u32>,
    /// Odd primes dividing the discriminant, ascending.
    pub disc_odd_primes: Vec<u64>,
    /// Numerator of g (signed) and denominator (positive), coprime.
    pub g1: BigInt,
    pub g2: BigInt,
}

impl GParams {
    /// nu_p(h).
    pub fn e_p(&self, p: u64) -> u32 {
        self.e.get(&p).copied().unwrap_or(0)
    }

    /// n_r of the degree rule: m when g < 0 and r is odd,
    /// lcm(2^(nu_2(h r) + 1), D) otherwise.
    pub fn n_r(&self, r: u64) -> u128 {
        assert!(r >= 1);
        if self.sign < 0 && r % 2 == 1 {
            self.m
        } else {
            let k = self.e2 + r.trailing_zeros() + 1;
            assert!(k < 100, "2-power in n_r out of range");
            lcm128(1u128 << k, self.disc)
        }
    }

    /// True when some prime divisor of D is congruent to c mod q.
    pub fn disc_has_odd_prime_cong(&self, c: u64, q: u64) -> bool {
        self.disc_odd_primes.iter().any(|&p| p % q == c)
    }

    pub fn is_negative(&self) -> bool {
        self.sign < 0
    }
}

pub(crate) fn lcm128(a: u128, b: u128) -> u128 {
    a / a.gcd(&b) * b
}

/// Decompose a rational g outside {-1, 0, 1}.
///
/// h is the gcd of all prime exponents of |g| (denominator exponents counted
/// positively), g0 the corresponding primitive root of |g|, and D the
/// discriminant of Q(sqrt(g0)): k when the squarefree kernel k of
/// numerator*denominator of g0 is 1 mod 4, and 4k otherwise.
pub fn decompose(g: &Rat) -> Result<GParams> {
    if g.is_zero() || g.abs().is_one() {
        return Err(Error::InvalidBase(format!(
            "g = {} has no order distribution (need g outside {{-1, 0, 1}})",
            g
        )));
    }
    let sign: i8 = if g.is_negative() { -1 } else { 1 };
    let g1 = g.numer().clone();
    let g2 = g.denom().clone();

    let num_f = arith::factorize_big(g1.magnitude())?;
    let den_f = arith::factorize_big(g2.magnitude())?;

    // h = gcd of all exponents across numerator and denominator.
    let mut h: u64 = 0;
    for &(_, e) in num_f.iter().chain(den_f.iter()) {
        h = h.gcd(&(e as u64));
    }
    debug_assert!(h >= 1);

    // g0 = |g|^(1/h), kernel = product of primes with odd exponent in g0.
    let mut g0_num = BigUint::one();
    let mut g0_den = BigUint::one();
    let mut kernel = BigUint::one();
    for &(p, e) in &num_f {
        let e0 = e as u64 / h;
        g0_num *= BigUint::from(p).pow(e0 as u32);
        if e0 % 2 == 1 {
            kernel *= BigUint::from(p);
        }
    }
    for &(p, e) in &den_f {
        let e0 = e as u64 / h;
        g0_den *= BigUint::from(p).pow(e0 as u32);
        if e0 % 2 == 1 {
            kernel *= BigUint::from(p);
        }
    }
    let g0 = Rat::new(BigInt::from(g0_num), BigInt::from(g0_den));

    let kernel: u128 = kernel.to_u128().ok_or_else(|| {
        Error::ResourceLimit("squarefree kernel of g0 exceeds 128 bits".into())
    })?;
    if kernel > u128::MAX / 4 {
        return Err(Error::ResourceLimit(
            "discriminant of Q(sqrt(g0)) exceeds 128 bits".into(),
        ));
    }
    let disc = if kernel % 4 == 1 { kernel } else { 4 * kernel };

    let e2 = if h == 0 { 0 } else { h.trailing_zeros() };
    let m = if (e2 == 0 && disc % 8 == 4) || (e2 == 1 && disc % 8 == 0) {
        disc / 2
    } else {
        lcm128(1u128 << (e2 + 2), disc)
    };

    let mut e = BTreeMap::new();
    for (p, k) in arith::factorize(h).pairs {
        e.insert(p, k);
    }

    let mut disc_odd_primes: Vec<u64> = num_f
        .iter()
        .chain(den_f.iter())
        .filter(|&&(p, ex)| p > 2 && ((ex as u64 / h) % 2 == 1))
        .map(|&(p, _)| p)
        .collect();
    disc_odd_primes.sort_unstable();

    Ok(GParams {
        g: g.clone(),
        sign,
        g0,
        h,
        disc,
        m,
        e2,
        e,
        disc_odd_primes,
        g1,
        g2,
    })
}

/// Decompose an integer base.
pub fn decompose_int(g: i64) -> Result<GParams> {
    decompose(&arith::rat_int(g))
}
