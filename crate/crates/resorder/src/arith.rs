//! Exact rational arithmetic and elementary arithmetic functions:
//! factorization, Moebius mu, Euler phi, p-adic valuations, the Legendre
//! symbol, and a segmented prime sieve.
//!
//! Everything here is pure and state-free; the only shared state is a lazily
//! built table of the primes below 2^20, which is enough trial divisors to
//! factor any integer below 2^40 completely.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact rational with arbitrary-precision numerator and positive denominator.
///
/// `BigRational` keeps values reduced with the sign in the numerator, which is
/// exactly the canonical form every closed-form coefficient in this crate
/// relies on for equality tests.
pub type Rat = num_rational::BigRational;

/// Shorthand for a small rational n/d.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for an integral rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parse "a", "-a", "a/b" or "b^e" style input (optionally "a^e/b^f") into a
/// rational. Exponent syntax keeps inputs like 6^27 exact without forcing the
/// caller to expand them.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num = parse_power_int(num_s)?;
    let den = match den_s {
        Some(d) => parse_power_int(d)?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(num, den))
}

fn parse_power_int(s: &str) -> Result<BigInt> {
    let s = s.trim();
    // "-b^e" reads as -(b^e)
    let (neg, s) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, s),
    };
    let (base_s, exp_s) = match s.split_once('^') {
        Some((b, e)) => (b, Some(e)),
        None => (s, None),
    };
    let base: BigInt = base_s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {base_s:?}")))?;
    let mag = match exp_s {
        None => base,
        Some(e) => {
            let e: u32 = e
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent {e:?}")))?;
            base.pow(e)
        }
    };
    Ok(if neg { -mag } else { mag })
}

/// Render a rational as "n" or "n/d".
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

const SMALL_PRIME_LIMIT: u64 = 1 << 20;

/// Primes below 2^20, built once. These suffice to trial-divide anything
/// below 2^40, which covers every p-1 the census can see.
pub fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| sieve_simple(SMALL_PRIME_LIMIT))
}

/// Plain sieve of Eratosthenes, used for the base table and for unit tests.
pub fn sieve_simple(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Prime factorization as an ascending list of (prime, exponent) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub pairs: Vec<(u64, u32)>,
}

impl Factorization {
    /// Reconstruct the factored integer.
    pub fn value(&self) -> u64 {
        self.pairs
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }

    pub fn nu(&self, p: u64) -> u32 {
        self.pairs
            .iter()
            .find(|&&(q, _)| q == p)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn phi(&self) -> u64 {
        self.pairs
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
    }

    pub fn moebius(&self) -> i32 {
        if self.pairs.iter().any(|&(_, e)| e > 1) {
            0
        } else if self.pairs.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// All positive divisors, in no particular order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.pairs {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs
    }
}

/// Factor n >= 1 by trial division against the shared prime table, falling
/// back to odd trial division for cofactors whose square root exceeds the
/// table. Inputs at the census scale (below 2^40) never hit the fallback.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize: n must be positive");
    let mut pairs = Vec::new();
    let mut m = n;
    for &p in small_primes() {
        if p * p > m {
            break;
        }
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            pairs.push((p, e));
        }
    }
    if m > 1 {
        if m < SMALL_PRIME_LIMIT * SMALL_PRIME_LIMIT {
            pairs.push((m, 1));
        } else {
            // Slow path for inputs beyond 2^40: continue with odd candidates.
            let mut d = SMALL_PRIME_LIMIT | 1;
            while d * d <= m {
                if m % d == 0 {
                    let mut e = 0u32;
                    while m % d == 0 {
                        m /= d;
                        e += 1;
                    }
                    pairs.push((d, e));
                }
                d += 2;
            }
            if m > 1 {
                pairs.push((m, 1));
            }
            pairs.sort_unstable();
        }
    }
    Factorization { pairs }
}

/// Factor the magnitude of a big integer. Fails with a resource error when an
/// unfactored cofactor does not fit in 64 bits; callers feed this with bases
/// whose prime content is within reach of trial division.
pub fn factorize_big(n: &BigUint) -> Result<Vec<(u64, u32)>> {
    assert!(!n.is_zero(), "factorize_big: n must be positive");
    let mut pairs = Vec::new();
    let mut m = n.clone();
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            break;
        }
        if (&m % &pb).is_zero() {
            let mut e = 0u32;
            while (&m % &pb).is_zero() {
                m /= &pb;
                e += 1;
            }
            pairs.push((p, e));
        }
    }
    if !m.is_one() {
        match m.to_u64() {
            Some(rest) => {
                let tail = factorize(rest);
                pairs.extend(tail.pairs);
                pairs.sort_unstable();
            }
            None => {
                return Err(Error::ResourceLimit(format!(
                    "cannot factor cofactor {m} (exceeds 64 bits)"
                )))
            }
        }
    }
    Ok(pairs)
}

pub fn moebius(n: u64) -> i32 {
    factorize(n).moebius()
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).phi()
}

/// nu_p(n): the exponent of the prime p in n.
pub fn valuation(p: u64, n: u64) -> u32 {
    assert!(n >= 1 && p >= 2);
    let mut e = 0;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    e
}

/// (a*b) mod m without overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// a^e mod m by binary exponentiation with 128-bit intermediates.
pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Inverse of a mod p for prime p.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

/// Legendre symbol (a/p) for an odd prime p, via Euler's criterion:
/// a^((p-1)/2) is 1, p-1 or 0 mod p.
pub fn legendre(a: i64, p: u64) -> i32 {
    assert!(p > 2, "legendre: p must be an odd prime");
    let ar = a.rem_euclid(p as i64) as u64;
    legendre_u(ar, p)
}

pub(crate) fn legendre_u(a: u64, p: u64) -> i32 {
    let r = pow_mod(a % p, (p - 1) / 2, p);
    if r == 0 {
        0
    } else if r == 1 {
        1
    } else {
        debug_assert_eq!(r, p - 1);
        -1
    }
}

/// Upper bound for the n-th prime (1-indexed), from the standard
/// p_n < n (ln n + ln ln n) bound for n >= 6.
pub fn nth_prime_bound(n: u64) -> u64 {
    if n < 6 {
        return 16;
    }
    let nf = n as f64;
    let ln = nf.ln();
    (nf * (ln + ln.ln()) * 1.02) as u64 + 64
}

const MAX_SIEVE_LIMIT: u64 = 1 << 40;
pub const MAX_PRIME_COUNT: u64 = 100_000_000;

/// Half-open span [lo, hi) handed to per-segment workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub lo: u64,
    pub hi: u64,
}

/// Segmented sieve over [2, limit]. Segments are disjoint, cover the whole
/// range in order, and can be sieved independently, so workers may process
/// them in parallel and merge per-segment results in index order.
pub struct SegmentedSieve {
    base: Vec<u64>,
    limit: u64,
    span: u64,
}

impl SegmentedSieve {
    /// Default segment span: 2^20 odd numbers.
    pub const DEFAULT_SPAN: u64 = 1 << 21;

    pub fn new(limit: u64) -> Result<Self> {
        Self::with_span(limit, Self::DEFAULT_SPAN)
    }

    pub fn with_span(limit: u64, span: u64) -> Result<Self> {
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::ResourceLimit(format!(
                "sieve limit {limit} exceeds 2^40"
            )));
        }
        let root = (limit as f64).sqrt() as u64 + 2;
        Ok(SegmentedSieve {
            base: sieve_simple(root),
            limit,
            span: span.max(1 << 12),
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// The base primes (everything up to sqrt(limit)), useful as trial
    /// divisors for numbers up to the limit.
    pub fn base_primes(&self) -> &[u64] {
        &self.base
    }

    pub fn segments(&self) -> Vec<Segment> {
        let mut segs = Vec::new();
        let mut lo = 2u64;
        while lo <= self.limit {
            let hi = (lo + self.span).min(self.limit + 1);
            segs.push(Segment { lo, hi });
            lo = hi;
        }
        segs
    }

    /// The primes in [seg.lo, seg.hi), ascending.
    pub fn primes_in(&self, seg: Segment) -> Vec<u64> {
        let lo = seg.lo.max(2);
        if lo >= seg.hi {
            return Vec::new();
        }
        let len = (seg.hi - lo) as usize;
        let mut composite = vec![false; len];
        for &p in &self.base {
            if p * p >= seg.hi {
                break;
            }
            let start = p.max(lo.div_ceil(p)) * p;
            let mut j = start.max(p * p);
            while j < seg.hi {
                composite[(j - lo) as usize] = true;
                j += p;
            }
        }
        (0..len)
            .filter(|&i| !composite[i])
            .map(|i| lo + i as u64)
            .filter(|&n| n >= 2)
            .collect()
    }

    /// All primes up to the limit, ascending.
    pub fn primes(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for seg in self.segments() {
            out.extend(self.primes_in(seg));
        }
        out
    }
}

/// The primes up to `limit`, convenience wrapper over the segmented sieve.
pub fn primes_up_to(limit: u64) -> Result<Vec<u64>> {
    Ok(SegmentedSieve::new(limit)?.primes())
}

/// The first `count` primes, ascending.
pub fn first_primes(count: u64) -> Result<Vec<u64>> {
    if count > MAX_PRIME_COUNT {
        return Err(Error::ResourceLimit(format!(
            "prime count {count} exceeds 10^8"
        )));
    }
    let sieve = SegmentedSieve::new(nth_prime_bound(count))?;
    let mut out = Vec::with_capacity(count as usize);
    for seg in sieve.segments() {
        let ps = sieve.primes_in(seg);
        for p in ps {
            out.push(p);
            if out.len() as u64 == count {
                return Ok(out);
            }
        }
    }
    Err(Error::ResourceLimit(format!(
        "nth_prime_bound too small for count {count}"
    )))
}
