//! The Euler-product constants A_chi, the constrained Euler sums C_chi(h,r,s)
//! in exact closed form, and the specialized finite products P1 P2 P3 and
//! P'1 P'2 behind the mod-4 and mod-3 densities.
//!
//! C_chi(h,r,s) = sum over v coprime to r, divisible by s, of
//! h_chi(v) gcd(h,v) / (v phi(v)). For a real character whose primitive part
//! has conductor 1, 3 or 4 this is an exact rational multiple of 1, A_xi1 or
//! A_psi1; the rational is assembled from finitely many local factors, one
//! per prime dividing h, r, s or the modulus, all other primes contributing
//! their generic A-factor. The local factors (one geometric series per prime
//! power column of the sum) are transcribed case by case and are guarded by
//! a direct truncated-series cross-check in the test suite.

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, format_rat, rat, rat_int, Rat, SegmentedSieve};
use crate::dirichlet::DirichletChar;
use crate::gdecomp::GParams;
use crate::{Error, Result};

/// Reference values of the two special constants, truncated decimal
/// expansions accurate to the printed digits.
pub const A_PSI1: f64 = 0.643650679662525;
pub const A_XI1: f64 = 0.173977122429634;

const A_PSI1_DIGITS: i64 = 643_650_679_662_525;
const A_XI1_DIGITS: i64 = 173_977_122_429_634;

/// The special constant attached to an exact density value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecialConstant {
    /// A_psi1, the mod-4 constant.
    APsi1,
    /// A_xi1, the mod-3 constant.
    AXi1,
}

impl SpecialConstant {
    pub fn name(self) -> &'static str {
        match self {
            SpecialConstant::APsi1 => "A_psi1",
            SpecialConstant::AXi1 => "A_xi1",
        }
    }

    pub fn value_f64(self) -> f64 {
        match self {
            SpecialConstant::APsi1 => A_PSI1,
            SpecialConstant::AXi1 => A_XI1,
        }
    }

    /// The reference value as an exact rational (15 decimal digits), used for
    /// digit-exact truncated display.
    pub fn value_rat(self) -> Rat {
        let digits = match self {
            SpecialConstant::APsi1 => A_PSI1_DIGITS,
            SpecialConstant::AXi1 => A_XI1_DIGITS,
        };
        Rat::new(BigInt::from(digits), BigInt::from(10u64).pow(15u32))
    }
}

/// An exact density of the shape q0 + q1 * A with A in {A_psi1, A_xi1};
/// `constant = None` forces q1 = 0 and the value is the plain rational q0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityValue {
    pub q0: Rat,
    pub q1: Rat,
    pub constant: Option<SpecialConstant>,
}

impl DensityValue {
    pub fn rational(q0: Rat) -> Self {
        DensityValue {
            q0,
            q1: Rat::zero(),
            constant: None,
        }
    }

    pub fn zero() -> Self {
        Self::rational(Rat::zero())
    }

    pub fn new(q0: Rat, q1: Rat, constant: SpecialConstant) -> Self {
        let mut v = DensityValue {
            q0,
            q1,
            constant: Some(constant),
        };
        v.normalize();
        v
    }

    fn normalize(&mut self) {
        if self.q1.is_zero() {
            self.constant = None;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.q0.is_zero() && self.q1.is_zero()
    }

    /// Componentwise sum. The two terms must not carry different constants.
    pub fn add(&self, other: &DensityValue) -> DensityValue {
        let constant = match (self.constant, other.constant) {
            (a, None) => a,
            (None, b) => b,
            (Some(a), Some(b)) => {
                assert_eq!(a, b, "cannot add densities over different constants");
                Some(a)
            }
        };
        let mut v = DensityValue {
            q0: &self.q0 + &other.q0,
            q1: &self.q1 + &other.q1,
            constant,
        };
        v.normalize();
        v
    }

    pub fn sub(&self, other: &DensityValue) -> DensityValue {
        self.add(&other.scale(&rat_int(-1)))
    }

    pub fn scale(&self, c: &Rat) -> DensityValue {
        let mut v = DensityValue {
            q0: &self.q0 * c,
            q1: &self.q1 * c,
            constant: self.constant,
        };
        v.normalize();
        v
    }

    pub fn numeric_f64(&self) -> f64 {
        let a = self.constant.map(|c| c.value_f64()).unwrap_or(0.0);
        rat_to_f64(&self.q0) + rat_to_f64(&self.q1) * a
    }

    /// Numeric value as an exact rational, with the constant replaced by its
    /// 15-digit reference expansion. Used for digit-exact truncation.
    pub fn numeric_rat(&self) -> Rat {
        match self.constant {
            None => self.q0.clone(),
            Some(c) => &self.q0 + &self.q1 * c.value_rat(),
        }
    }

    /// Canonical exact string: "q0", "cA/d", or "q0 +/- cA/d" with reduced
    /// fractions, e.g. "3A_xi1/8", "1/8 - A_psi1/8", "5/12 + 5A_xi1/16".
    pub fn exact_string(&self) -> String {
        if self.q1.is_zero() {
            return format_rat(&self.q0);
        }
        let c = self.constant.expect("nonzero q1 requires a constant");
        let aterm = |q: &Rat| -> String {
            let n = q.numer().magnitude();
            let head = if n.is_one() {
                c.name().to_string()
            } else {
                format!("{}{}", n, c.name())
            };
            if q.denom().is_one() {
                head
            } else {
                format!("{}/{}", head, q.denom())
            }
        };
        if self.q0.is_zero() {
            let sign = if self.q1.is_negative() { "-" } else { "" };
            format!("{}{}", sign, aterm(&self.q1))
        } else {
            let op = if self.q1.is_negative() { "-" } else { "+" };
            format!("{} {} {}", format_rat(&self.q0), op, aterm(&self.q1))
        }
    }

    /// Parse the canonical exact string back. Inverse of [`exact_string`].
    pub fn parse(s: &str) -> Result<DensityValue> {
        let s = s.trim();
        let parse_term = |t: &str| -> Result<(Rat, Option<SpecialConstant>)> {
            let t = t.trim();
            for c in [SpecialConstant::APsi1, SpecialConstant::AXi1] {
                if let Some(pos) = t.find(c.name()) {
                    let head = &t[..pos];
                    let tail = &t[pos + c.name().len()..];
                    let mut num = if head.is_empty() || head == "-" {
                        format!("{head}1")
                    } else {
                        head.to_string()
                    };
                    if !tail.is_empty() {
                        num.push_str(tail);
                    }
                    return Ok((crate::arith::parse_rat(&num)?, Some(c)));
                }
            }
            Ok((crate::arith::parse_rat(t)?, None))
        };
        // split on " + " / " - " (binary ops are space-separated)
        let (first, rest) = if let Some(pos) = s.find(" + ") {
            (&s[..pos], Some((1i64, &s[pos + 3..])))
        } else if let Some(pos) = s.find(" - ") {
            (&s[..pos], Some((-1i64, &s[pos + 3..])))
        } else {
            (s, None)
        };
        let (q_first, c_first) = parse_term(first)?;
        match rest {
            None => match c_first {
                None => Ok(DensityValue::rational(q_first)),
                Some(c) => Ok(DensityValue::new(Rat::zero(), q_first, c)),
            },
            Some((sgn, second)) => {
                let (q_second, c_second) = parse_term(second)?;
                let c = c_second
                    .ok_or_else(|| Error::Parse(format!("expected constant term in {s:?}")))?;
                if c_first.is_some() {
                    return Err(Error::Parse(format!("two constant terms in {s:?}")));
                }
                Ok(DensityValue::new(q_first, q_second * rat_int(sgn), c))
            }
        }
    }
}

pub(crate) fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
    })
}

/// Truncate (toward zero) to 8 decimals, digit-exactly, from the rational.
pub fn truncate8(x: &Rat) -> String {
    let scaled = (x * rat_int(100_000_000)).trunc();
    let n = scaled.numer().clone();
    let neg = n.is_negative();
    let mag = n.magnitude().to_string();
    let padded = format!("{:0>9}", mag);
    let (int_part, frac_part) = padded.split_at(padded.len() - 8);
    format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac_part)
}

/// Partial Euler product for A_chi over the primes up to `cutoff`:
/// prod over chi(p) != 0 of (1 + (chi(p) - 1) p / ((p^2 - chi(p))(p - 1))).
///
/// Accumulates log-magnitude and argument with compensated summation; the
/// principal character gives exactly 1. Results are cached per
/// (modulus, character index, cutoff).
pub fn a_numeric(chi: &DirichletChar, cutoff: u64) -> Result<Complex64> {
    assert!(cutoff >= 100, "cutoff too small to be meaningful");
    if chi.principal {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let key = (chi.modulus, chi.index, cutoff);
    type ACache = Mutex<HashMap<(u64, u32, u64), Complex64>>;
    static CACHE: OnceLock<ACache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(*v);
    }

    let sieve = SegmentedSieve::new(cutoff)?;
    let mut log_re = Kahan::default();
    let mut log_im = Kahan::default();
    for seg in sieve.segments() {
        for p in sieve.primes_in(seg) {
            let c = chi.eval_complex(p);
            if c.norm_sqr() < 0.25 {
                continue; // chi(p) = 0
            }
            let pf = p as f64;
            let factor =
                1.0 + (c - 1.0) * pf / ((pf * pf - c) * (pf - 1.0));
            let l = factor.ln();
            log_re.add(l.re);
            log_im.add(l.im);
        }
    }
    let value = Complex64::new(log_re.sum, log_im.sum).exp();
    cache.lock().unwrap().insert(key, value);
    Ok(value)
}

/// Same, for a real character; returns the real value.
pub fn a_numeric_real(chi: &DirichletChar, cutoff: u64) -> Result<f64> {
    assert!(chi.is_real());
    Ok(a_numeric(chi, cutoff)?.re)
}

#[derive(Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// chi'(p) for the primitive character of conductor f in {1, 3, 4}.
fn primitive_value(conductor: u64, p: u64) -> i64 {
    match conductor {
        1 => 1,
        3 => match p % 3 {
            1 => 1,
            2 => -1,
            _ => 0,
        },
        4 => match p % 4 {
            1 => 1,
            3 => -1,
            _ => 0,
        },
        _ => unreachable!("conductor restricted to 1, 3, 4"),
    }
}

/// Generic local factor of A at p for a character value c in {-1, 0, 1}:
/// 1 + (c - 1) p / ((p^2 - c)(p - 1)). By the A-product convention, c = 0
/// contributes no factor.
fn a_local_factor(p: u64, c: i64) -> Rat {
    if c == 0 || c == 1 {
        return rat_int(1);
    }
    let p = p as i64;
    rat_int(1) + rat(c - 1, 1) * rat(p, 1) / (rat(p * p - c, 1) * rat(p - 1, 1))
}

fn pow_rat(p: u64, e: i64) -> Rat {
    rat_int(p as i64).pow(e as i32)
}

/// Local factor at p of C_chi(h, r, s) for p not dividing r s:
/// 1 + p^(1-e) (c-1)/(p-1) * ((p^e - c^e)/(p - c) + c^e/(p^2 - c)).
fn c_factor_generic(p: u64, e: u32, c: i64) -> Rat {
    rat_int(1) + c_factor_nu1(p, e, c)
}

/// Local factor at p when nu_p(s) = 1 (the generic factor minus its 1).
fn c_factor_nu1(p: u64, e: u32, c: i64) -> Rat {
    let pi = p as i64;
    let ce = pow_i(c, e); // c^e with 0^0 = 1
    let pe = rat_int(pi).pow(e as i32);
    let inner = (pe - rat_int(ce)) / rat_int(pi - c) + rat(ce, pi * pi - c);
    pow_rat(p, 1 - e as i64) * rat(c - 1, pi - 1) * inner
}

/// Local factor at p when nu = nu_p(s) >= max(e_p + 1, 2):
/// c^(nu-1) (c-1)/(p-1) * p^(e+3-2 nu) / (p^2 - c).
fn c_factor_high(p: u64, e: u32, nu: u32, c: i64) -> Rat {
    let pi = p as i64;
    rat_int(pow_i(c, nu - 1)) * rat(c - 1, pi - 1) * pow_rat(p, e as i64 + 3 - 2 * nu as i64)
        / rat_int(pi * pi - c)
}

/// Local factor at p when 2 <= nu = nu_p(s) <= e_p:
/// (c-1)/(p-1) * ((x^(nu-1) - x^e)/(1 - x) + p^(1-e) c^e/(p^2 - c)), x = c/p.
///
/// The geometric numerator runs over the exponent range nu..=e of the
/// underlying prime-power column, so the exponent is nu_p(s), re-derived from
/// the defining sum (the printed form carries a stray subscript 2 there).
fn c_factor_mid(p: u64, e: u32, nu: u32, c: i64) -> Rat {
    let pi = p as i64;
    let x = rat(c, pi);
    let geo = (x.clone().pow(nu as i32 - 1) - x.clone().pow(e as i32))
        / (rat_int(1) - x);
    let tail = pow_rat(p, 1 - e as i64) * rat(pow_i(c, e), pi * pi - c);
    rat(c - 1, pi - 1) * (geo + tail)
}

fn pow_i(c: i64, e: u32) -> i64 {
    // 0^0 = 1 by convention
    match c {
        0 => {
            if e == 0 {
                1
            } else {
                0
            }
        }
        1 => 1,
        -1 => {
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        _ => unreachable!(),
    }
}

/// Exact evaluation of C_chi(h, r, s) as a DensityValue, for a real chi whose
/// conductor lies in {1, 3, 4}.
///
/// gcd(r, s) > 1 forces the empty sum, hence exactly 0. Otherwise the value
/// is c * A_chi' with c rational: local factors at the primes dividing
/// h, r, s or the modulus are evaluated explicitly and divided by the generic
/// A-factor they replace; every other prime contributes its A-factor
/// verbatim.
pub fn c_closed(chi: &DirichletChar, h: u64, r: u64, s: u64) -> Result<DensityValue> {
    if !chi.is_real() || !matches!(chi.conductor, 1 | 3 | 4) {
        return Err(Error::NumericOnly(format!(
            "C_chi closed form needs a real character of conductor 1, 3 or 4 \
             (got modulus {}, order {}, conductor {}); use the series evaluation",
            chi.modulus, chi.order, chi.conductor
        )));
    }
    assert!(h >= 1 && r >= 1 && s >= 1);
    if r.gcd(&s) > 1 {
        return Ok(DensityValue::zero());
    }

    let mut special: BTreeSet<u64> = BTreeSet::new();
    for n in [h, r, s, chi.modulus] {
        for (p, _) in factorize(n).pairs {
            special.insert(p);
        }
    }

    let mut coeff = rat_int(1);
    for &p in &special {
        let c = chi.eval_real(p);
        let e = crate::arith::valuation(p, h);
        let local = if r % p == 0 {
            rat_int(1) // v runs over integers coprime to r: empty column
        } else if s % p == 0 {
            let nu = crate::arith::valuation(p, s);
            if nu == 1 {
                c_factor_nu1(p, e, c)
            } else if nu > e {
                c_factor_high(p, e, nu, c)
            } else {
                c_factor_mid(p, e, nu, c)
            }
        } else {
            c_factor_generic(p, e, c)
        };
        let generic = a_local_factor(p, primitive_value(chi.conductor, p));
        coeff *= local / generic;
        if coeff.is_zero() {
            break;
        }
    }

    Ok(match chi.conductor {
        1 => DensityValue::rational(coeff),
        3 => DensityValue::new(Rat::zero(), coeff, SpecialConstant::AXi1),
        4 => DensityValue::new(Rat::zero(), coeff, SpecialConstant::APsi1),
        _ => unreachable!(),
    })
}

/// The finite products of the explicit mod-4 theorem, on its nontrivial
/// branch: h odd, 8 | D, and no prime divisor of D congruent to 1 mod 4.
///
/// Returns (P1, P2, c3) with P3 = c3 * A_psi1; the local shapes are
///   P1 over p | D, p = 3 mod 4:  2(p^e - (-1)^e)/(p^(e-1)(p^2-1))
///                                + 2p(-1)^e/(p^e (p^2+1)(p-1))
///   P2 over p | h, p not | D, p = 3 mod 4: 1 - (first term) - (second term)
///   P3 over p not | hD, p = 3 mod 4: 1 - 2p/((p^2+1)(p-1))
pub fn p123(gp: &GParams) -> Result<(Rat, Rat, Rat)> {
    if gp.h % 2 == 0 {
        return Err(Error::NumericOnly(
            "P1 P2 P3 only applies for odd h (even h has the constant branch)".into(),
        ));
    }
    if gp.disc % 8 != 0 || gp.disc_has_odd_prime_cong(1, 4) {
        return Err(Error::NumericOnly(
            "P1 P2 P3 needs 8 | D with no prime divisor of D congruent to 1 mod 4".into(),
        ));
    }
    let p1 = gp
        .disc_odd_primes
        .iter()
        .filter(|&&p| p % 4 == 3)
        .map(|&p| p_local_main(p, gp.e_p(p)))
        .product::<Rat>();
    let p2 = gp
        .e
        .keys()
        .filter(|&&p| p > 2 && p % 4 == 3 && !gp.disc_odd_primes.contains(&p))
        .map(|&p| rat_int(1) - p_local_main(p, gp.e_p(p)))
        .product::<Rat>();
    // divide the generic factors at p | hD out of A_psi1
    let mut c3 = rat_int(1);
    let mut seen: BTreeSet<u64> = gp.disc_odd_primes.iter().copied().collect();
    seen.extend(gp.e.keys().copied());
    for p in seen {
        if p > 2 && p % 4 == 3 {
            c3 /= rat_int(1) - two_p_factor(p);
        }
    }
    Ok((p1, p2, c3))
}

/// 2(p^e - (-1)^e)/(p^(e-1)(p^2-1)) + 2p(-1)^e/(p^e (p^2+1)(p-1)),
/// the local shape shared by P1 / P'1 (and negated inside P2 / P'2).
fn p_local_main(p: u64, e: u32) -> Rat {
    let pi = p as i64;
    let sign = if e % 2 == 0 { 1 } else { -1 };
    let pe = rat_int(pi).pow(e as i32);
    let first = rat_int(2) * (pe.clone() - rat_int(sign))
        / (pow_rat(p, e as i64 - 1) * rat_int(pi * pi - 1));
    let second = rat(2 * pi * sign, 1) / (pe * rat_int((pi * pi + 1) * (pi - 1)));
    first + second
}

/// 2p/((p^2+1)(p-1)).
fn two_p_factor(p: u64) -> Rat {
    let pi = p as i64;
    rat(2 * pi, (pi * pi + 1) * (pi - 1))
}

/// The finite products of the explicit mod-3 corollary: (P'1, c') with
/// P'2 = c' * A_xi1.
///
///   P'1 over p | D, p > 2, p = 2 mod 3: the same local shape as P1
///   P'2 over p not | 2D, p = 2 mod 3: one minus that shape
pub fn pprime12(gp: &GParams) -> (Rat, Rat) {
    let p1 = gp
        .disc_odd_primes
        .iter()
        .filter(|&&p| p % 3 == 2)
        .map(|&p| p_local_main(p, gp.e_p(p)))
        .product::<Rat>();
    // P'2 = prod_{p | h, p not | 2D, p = 2 mod 3} (1 - shape_p) / A-factor_p
    //       * A_xi1 / prod_{p | 2D, p = 2 mod 3} A-factor_p
    let mut c = rat_int(1);
    for &p in gp.e.keys() {
        if p > 2 && p % 3 == 2 && !gp.disc_odd_primes.contains(&p) {
            c *= (rat_int(1) - p_local_main(p, gp.e_p(p)))
                / (rat_int(1) - two_p_factor(p));
        }
    }
    let mut excluded: BTreeSet<u64> = gp
        .disc_odd_primes
        .iter()
        .copied()
        .filter(|&p| p % 3 == 2)
        .collect();
    excluded.insert(2);
    for p in excluded {
        if p % 3 == 2 {
            c /= rat_int(1) - two_p_factor(p);
        }
    }
    (p1, c)
}

/// sum over v coprime to r of h_chi(v) / [K_{sv,v} : Q], in closed form.
///
/// Equals (C_chi(h,r,1) + C_chi(h,r,n_s/(n_s,s))) / phi(s) for positive g or
/// even s; for negative g and odd s two extra 2-power terms enter:
/// -C_chi(h,r,2)/2 + C_chi(h,r,2^(nu_2(h)+1))/2.
pub fn h_sum_over_degrees(
    chi: &DirichletChar,
    r: u64,
    s: u64,
    gp: &GParams,
) -> Result<DensityValue> {
    let ns = gp.n_r(s);
    let q128 = ns / ns.gcd(&(s as u128));
    let q = u64::try_from(q128)
        .map_err(|_| Error::ResourceLimit("n_s/(n_s,s) exceeds 64 bits".into()))?;
    let mut total = c_closed(chi, gp.h, r, 1)?.add(&c_closed(chi, gp.h, r, q)?);
    if gp.sign < 0 && s % 2 == 1 {
        let half = rat(1, 2);
        total = total
            .sub(&c_closed(chi, gp.h, r, 2)?.scale(&half))
            .add(&c_closed(chi, gp.h, r, 1u64 << (gp.e2 + 1))?.scale(&half));
    }
    Ok(total.scale(&rat(1, crate::arith::euler_phi(s) as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::{character_group, psi1, xi1};
    use crate::gdecomp::decompose_int;

    #[test]
    fn density_value_strings() {
        let v = DensityValue::new(rat(1, 8), rat(-1, 8), SpecialConstant::APsi1);
        assert_eq!(v.exact_string(), "1/8 - A_psi1/8");
        assert_eq!(DensityValue::parse("1/8 - A_psi1/8").unwrap(), v);

        let v = DensityValue::new(Rat::zero(), rat(3, 8), SpecialConstant::AXi1);
        assert_eq!(v.exact_string(), "3A_xi1/8");
        assert_eq!(DensityValue::parse("3A_xi1/8").unwrap(), v);

        let v = DensityValue::new(Rat::zero(), rat(-489, 2396), SpecialConstant::APsi1);
        assert_eq!(v.exact_string(), "-489A_psi1/2396");
        assert_eq!(DensityValue::parse("-489A_psi1/2396").unwrap(), v);

        let v = DensityValue::new(rat(5, 12), rat(5, 16), SpecialConstant::AXi1);
        assert_eq!(v.exact_string(), "5/12 + 5A_xi1/16");
        assert_eq!(DensityValue::parse("5/12 + 5A_xi1/16").unwrap(), v);

        assert_eq!(DensityValue::zero().exact_string(), "0");
        assert_eq!(DensityValue::parse("0").unwrap(), DensityValue::zero());
        assert_eq!(DensityValue::parse("A_xi1").unwrap().q1, rat_int(1));
        assert_eq!(DensityValue::parse("-A_psi1/4").unwrap().q1, rat(-1, 4));
    }

    #[test]
    fn truncation_is_toward_zero() {
        assert_eq!(truncate8(&rat(1, 3)), "0.33333333");
        assert_eq!(truncate8(&rat(-1, 3)), "-0.33333333");
        assert_eq!(truncate8(&rat(1, 2)), "0.50000000");
        assert_eq!(truncate8(&rat_int(0)), "0.00000000");
        // A_xi1 itself
        let a = DensityValue::new(Rat::zero(), rat_int(1), SpecialConstant::AXi1);
        assert_eq!(truncate8(&a.numeric_rat()), "0.17397712");
    }

    #[test]
    fn a_numeric_of_principal_is_one() {
        let chi0 = character_group(4).unwrap()[0].clone();
        assert_eq!(a_numeric(&chi0, 1000).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn a_numeric_converges_to_reference() {
        // modest cutoff here; the acceptance suite runs the 10^7 check
        let a4 = a_numeric_real(&psi1(), 2_000_000).unwrap();
        assert!((a4 - A_PSI1).abs() < 5e-7, "A_psi1 at 2e6: {a4}");
        let a3 = a_numeric_real(&xi1(), 2_000_000).unwrap();
        assert!((a3 - A_XI1).abs() < 5e-7, "A_xi1 at 2e6: {a3}");
    }

    #[test]
    fn a_numeric_cutoff_stability() {
        // every local factor is below 1, so the partial products decrease
        // monotonically onto the limit
        for chi in [xi1(), psi1()] {
            let cuts = [10_000u64, 100_000, 1_000_000, 2_000_000];
            let vals: Vec<f64> = cuts
                .iter()
                .map(|&c| a_numeric_real(&chi, c).unwrap())
                .collect();
            for w in vals.windows(2) {
                assert!(w[0] > w[1], "partial products not decreasing: {vals:?}");
            }
            assert!((vals[2] - vals[3]).abs() < 1e-5);
        }
    }

    #[test]
    fn c_closed_examples() {
        let xi = xi1();
        // C(1,3,1) = A_xi1 exactly
        let c = c_closed(&xi, 1, 3, 1).unwrap();
        assert_eq!(c, DensityValue::new(Rat::zero(), rat_int(1), SpecialConstant::AXi1));
        // C(1,3,8) = -A_xi1/4
        let c = c_closed(&xi, 1, 3, 8).unwrap();
        assert_eq!(c.q1, rat(-1, 4));
        // C(2,3,1) = -3 A_xi1
        let c = c_closed(&xi, 2, 3, 1).unwrap();
        assert_eq!(c.q1, rat_int(-3));
        // gcd(r,s) > 1 kills the sum
        let ps = psi1();
        assert!(c_closed(&ps, 1, 2, 4).unwrap().is_zero());
        assert!(c_closed(&ps, 1, 2, 6).unwrap().is_zero());
        assert!(c_closed(&xi, 5, 6, 3).unwrap().is_zero());
        // gcd(2,3) = 1, so this one does NOT vanish
        assert_eq!(c_closed(&ps, 1, 2, 3).unwrap().q1, rat(-3, 7));
    }

    #[test]
    fn c_closed_matches_direct_series() {
        // Direct truncated sum of h_chi(v) gcd(h,v) / (v phi(v)) over
        // v <= V coprime to r and divisible by s, compared against the
        // closed form at two cutoffs. This is the transcription guard for
        // the local-factor case analysis.
        let xi = xi1();
        let ps = psi1();
        let cases: Vec<(&DirichletChar, u64, u64, u64)> = vec![
            (&xi, 1, 3, 1),
            (&xi, 1, 3, 8),
            (&xi, 2, 3, 1),
            (&xi, 2, 3, 2),
            (&xi, 2, 3, 4),
            (&xi, 8, 3, 2),
            (&xi, 8, 3, 16),
            (&xi, 8, 3, 32),
            (&xi, 4, 3, 56),
            (&xi, 8, 3, 4), // mid case (2 <= nu <= e) at p = 2
            (&xi, 9, 2, 1),
            (&ps, 1, 2, 8),
            (&ps, 3, 2, 8),
            (&ps, 27, 2, 3),
            (&ps, 27, 2, 9), // mid case at the odd prime 3
            (&ps, 1, 2, 3),
            (&ps, 1, 1, 1),
        ];
        for (chi, h, r, s) in cases {
            let closed = c_closed(chi, h, r, s).unwrap().numeric_f64();
            let mut direct = [0.0f64; 2];
            for (i, v_max) in [10_000u64, 100_000].into_iter().enumerate() {
                let mut acc = 0.0;
                for v in 1..=v_max {
                    if v % s != 0 || num_integer::gcd(v, r) != 1 {
                        continue;
                    }
                    let hv = chi.h_real(v);
                    if hv == 0 {
                        continue;
                    }
                    acc += hv as f64 * num_integer::gcd(h, v) as f64
                        / (v as f64 * crate::arith::euler_phi(v) as f64);
                }
                direct[i] = acc;
            }
            assert!(
                (direct[0] - closed).abs() < 1e-3 && (direct[1] - closed).abs() < 1e-3,
                "series mismatch for h={h} r={r} s={s}: closed {closed}, direct {direct:?}"
            );
        }
    }

    #[test]
    fn p123_table_products() {
        // g = 2: all products empty, P3 = A_psi1
        let gp = decompose_int(2).unwrap();
        let (p1, p2, c3) = p123(&gp).unwrap();
        assert_eq!(p1, rat_int(1));
        assert_eq!(p2, rat_int(1));
        assert_eq!(c3, rat_int(1));
        // g = 8: P2 local factor at 3 gives 1/10, c3 = 10/7, product A/7
        let gp = decompose_int(8).unwrap();
        let (p1, p2, c3) = p123(&gp).unwrap();
        assert_eq!(p1 * p2 * c3, rat(1, 7));
        // g = -216 = -(6^3): P1 at 3 gives 9/10, product 9A/7
        let gp = decompose_int(-216).unwrap();
        let (p1, p2, c3) = p123(&gp).unwrap();
        assert_eq!(p1 * p2 * c3, rat(9, 7));
        // even h is the other branch
        assert!(p123(&decompose_int(4).unwrap()).is_err());
        // 8 does not divide D = 12
        assert!(p123(&decompose_int(3).unwrap()).is_err());
    }

    #[test]
    fn pprime_products() {
        // g = 2: D = 8 has no odd prime divisor
        let gp = decompose_int(2).unwrap();
        let (p1, c) = pprime12(&gp);
        assert_eq!(p1, rat_int(1));
        // only the p = 2 generic factor is divided out: c = 1/(1 - 4/5) = 5
        assert_eq!(c, rat_int(5));
        // g = 5: P'1 over p = 5 with e = 0
        let gp = decompose_int(5).unwrap();
        let (p1, _) = pprime12(&gp);
        assert_eq!(p1, rat(5, 52));
        // g = 49: 7 = 1 mod 3 excluded
        let gp = decompose_int(49).unwrap();
        let (p1, _) = pprime12(&gp);
        assert_eq!(p1, rat_int(1));
    }

    #[test]
    fn p_products_have_positive_local_factors() {
        for g in [2i64, 8, 512, 2048, -216, 216, 6, 10, 14, -2] {
            let gp = decompose_int(g).unwrap();
            if gp.h % 2 == 1 && gp.disc % 8 == 0 && !gp.disc_has_odd_prime_cong(1, 4) {
                let (p1, p2, c3) = p123(&gp).unwrap();
                assert!(p1 > Rat::zero() && p2 > Rat::zero() && c3 > Rat::zero());
            }
            let (pp1, c) = pprime12(&gp);
            assert!(pp1 >= Rat::zero() && c > Rat::zero());
        }
    }

    #[test]
    fn exact_string_roundtrip_property() {
        use proptest::prelude::*;
        let mut runner = proptest::test_runner::TestRunner::default();
        runner
            .run(
                &(
                    -50i64..50,
                    1i64..40,
                    -50i64..50,
                    1i64..40,
                    proptest::bool::ANY,
                ),
                |(a, b, c, d, psi)| {
                    let constant = if psi {
                        SpecialConstant::APsi1
                    } else {
                        SpecialConstant::AXi1
                    };
                    let v = DensityValue::new(rat(a, b), rat(c, d), constant);
                    let back = DensityValue::parse(&v.exact_string()).unwrap();
                    prop_assert_eq!(back, v);
                    Ok(())
                },
            )
            .unwrap();
    }

    #[test]
    fn h_sum_reproduces_difference_coefficients() {
        // (1/2) * [sum for g=-2] = 3 A_xi1 / 8: the two half terms cancel
        let xi = xi1();
        let gp = decompose_int(-2).unwrap();
        let s = h_sum_over_degrees(&xi, 3, 1, &gp).unwrap();
        // epsilon for 3 | D handled by the caller; here D = 8 so the plain
        // sum applies: C(1,3,1) + C(1,3,8) = 3A/4
        assert_eq!(s.q1, rat(3, 4));
    }
}
