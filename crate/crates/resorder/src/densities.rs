//! Closed-form densities: order mod 4 split by p mod 2^s and p = 3 mod 4,
//! the bias constant Delta_g between the two odd order classes, order mod 3
//! split by p mod 3^s and p = 2 mod 3, index densities rho_g(a,d), the
//! prime-averaged generic densities, and the per-prime local density.
//!
//! The infinite degree series over 2-power (resp. 3-power) levels are summed
//! exactly: terms are evaluated through the degree rule until the parameters
//! stabilize, the implementation then checks that three consecutive term
//! ratios equal 1/4 (resp. 1/9) exactly, and closes the geometric tail in
//! rational arithmetic. The ratio check turns the stabilization argument
//! into a runtime-verified fact rather than an assumption.

use num_integer::Integer;
use num_traits::{Pow, Zero};

use crate::arith::{euler_phi, factorize, rat, rat_int, Rat};
use crate::dirichlet::{character_group, xi1};
use crate::eulerprod::{c_closed, h_sum_over_degrees, p123, pprime12, DensityValue, SpecialConstant};
use crate::gdecomp::GParams;
use crate::kummer::degree;
use crate::series::{series_rho, SeriesResult};
use crate::{Error, Result};

/// A prime congruence filter (a1 mod d1). Only the shapes the closed forms
/// cover are admitted: (0,1) meaning all primes, (1, 2^s) with s >= 2,
/// (3, 4), (1, 3^s) with s >= 1, and (2, 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassSpec {
    pub a1: u64,
    pub d1: u64,
}

impl ClassSpec {
    pub const ALL: ClassSpec = ClassSpec { a1: 0, d1: 1 };

    pub fn new(a1: u64, d1: u64) -> Result<Self> {
        let c = ClassSpec { a1, d1 };
        if c.shape_mod4().is_some() || c.shape_mod3().is_some() {
            Ok(c)
        } else {
            Err(Error::UnsupportedClass(format!("({a1}, {d1})")))
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let (a, d) = s
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("class spec {s:?} is not a1/d1")))?;
        let a1 = a.trim().parse().map_err(|_| Error::Parse(s.into()))?;
        let d1 = d.trim().parse().map_err(|_| Error::Parse(s.into()))?;
        Self::new(a1, d1)
    }

    /// For the mod-4 densities: Some(shape), with (1,2^s) reported as s.
    fn shape_mod4(&self) -> Option<Mod4Shape> {
        match (self.a1, self.d1) {
            (0, 1) => Some(Mod4Shape::All),
            (3, 4) => Some(Mod4Shape::ThreeMod4),
            (1, d) if (4..=(1u64 << 30)).contains(&d) && d.is_power_of_two() => {
                Some(Mod4Shape::OneModTwoPow(d.trailing_zeros()))
            }
            _ => None,
        }
    }

    /// For the mod-3 densities, with (1,3^s) reported as s.
    fn shape_mod3(&self) -> Option<Mod3Shape> {
        match (self.a1, self.d1) {
            (0, 1) => Some(Mod3Shape::All),
            (2, 3) => Some(Mod3Shape::TwoMod3),
            (1, d) if d >= 3 && d <= 3u64.pow(18) => {
                let mut s = 0u32;
                let mut m = d;
                while m % 3 == 0 {
                    m /= 3;
                    s += 1;
                }
                if m == 1 {
                    Some(Mod3Shape::OneModThreePow(s))
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mod4Shape {
    All,
    OneModTwoPow(u32),
    ThreeMod4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mod3Shape {
    All,
    OneModThreePow(u32),
    TwoMod3,
}

/// Exact geometric-tail summation: adds term(start..=r0+3), verifies that the
/// last three consecutive ratios equal `ratio` exactly, and closes the tail.
fn sum_with_geometric_tail<F: Fn(u32) -> Rat>(
    term: F,
    start: u32,
    stabilized_by: u32,
    ratio: Rat,
) -> Rat {
    let r0 = stabilized_by.max(start);
    let mut total = Rat::zero();
    for r in start..=r0 + 3 {
        total += term(r);
    }
    for r in r0..=r0 + 2 {
        let t = term(r);
        let tn = term(r + 1);
        assert!(
            !t.is_zero() && tn == t * &ratio,
            "degree series failed to stabilize geometrically at level {r}"
        );
    }
    let tail = term(r0 + 3) * &ratio / (rat_int(1) - &ratio);
    total + tail
}

/// 1/[K_{n,k} : Q] as a rational.
fn inv_degree(n: u64, k: u64, gp: &GParams) -> Rat {
    Rat::new(1.into(), degree(n, k, gp).into())
}

fn nu2_u128(x: u128) -> u32 {
    x.trailing_zeros()
}

/// sum_{r >= s} (1/[K_{2^r,2^(r-1)}] - 1/[K_{2^(r+1),2^(r-1)}]): the density
/// of p = 1 mod 2^s with ord not divisible by 4 is 2^(1-s) minus this.
fn even_series_a(s: u32, gp: &GParams) -> Rat {
    let r0 = s.max(gp.e2 + nu2_u128(gp.disc) + 4);
    sum_with_geometric_tail(
        |r| {
            inv_degree(1 << r, 1 << (r - 1), gp) - inv_degree(1 << (r + 1), 1 << (r - 1), gp)
        },
        s,
        r0,
        rat(1, 4),
    )
}

/// sum_{r >= s} (1/[K_{2^r,2^r}] - 1/[K_{2^(r+1),2^r}]): the density of
/// p = 1 mod 2^s with odd order.
fn odd_series_b(s: u32, gp: &GParams) -> Rat {
    let r0 = s.max(gp.e2 + nu2_u128(gp.disc) + 4);
    sum_with_geometric_tail(
        |r| inv_degree(1 << r, 1 << r, gp) - inv_degree(1 << (r + 1), 1 << r, gp),
        s,
        r0,
        rat(1, 4),
    )
}

/// Density of ord_g(p) = j mod 4 over primes p = a1 mod d1.
pub fn delta_mod4(gp: &GParams, cls: ClassSpec, j: u32) -> Result<DensityValue> {
    assert!(j < 4, "j must be a residue mod 4");
    let shape = cls
        .shape_mod4()
        .ok_or_else(|| Error::UnsupportedClass(format!("({}, {}) for modulus 4", cls.a1, cls.d1)))?;
    Ok(match shape {
        Mod4Shape::All => {
            let one = delta_mod4(gp, ClassSpec { a1: 1, d1: 4 }, j)?;
            let three = delta_mod4(gp, ClassSpec { a1: 3, d1: 4 }, j)?;
            one.add(&three)
        }
        Mod4Shape::OneModTwoPow(s) => match j {
            0 => DensityValue::rational(rat(1, 1 << (s - 1)) - even_series_a(s, gp)),
            2 => DensityValue::rational(even_series_a(s, gp) - odd_series_b(s, gp)),
            _ => DensityValue::rational(odd_series_b(s, gp) / rat_int(2)),
        },
        Mod4Shape::ThreeMod4 => {
            let sgn = rat_int(gp.sign as i64);
            match j {
                // ord | p-1 with nu_2(p-1) = 1: the order is never 0 mod 4
                0 => DensityValue::zero(),
                // the quadratic nonresidue half: (1 - sgn)/4 for even h
                // (g an exact square up to sign), 1/4 otherwise
                2 => {
                    if gp.h % 2 == 0 {
                        DensityValue::rational((rat_int(1) - sgn) / rat_int(4))
                    } else {
                        DensityValue::rational(rat(1, 4))
                    }
                }
                _ => {
                    if gp.h % 2 == 0 {
                        DensityValue::rational((rat_int(1) + sgn) / rat_int(8))
                    } else {
                        match p123(gp) {
                            Ok((p1, p2, c3)) => {
                                let unit = if j == 1 { rat_int(-1) } else { rat_int(1) };
                                DensityValue::new(
                                    rat(1, 8),
                                    sgn * unit * p1 * p2 * c3 / rat_int(8),
                                    SpecialConstant::APsi1,
                                )
                            }
                            Err(_) => DensityValue::rational(rat(1, 8)),
                        }
                    }
                }
            }
        }
    })
}

/// Delta_g: the bias between the two odd order classes over p = 3 mod 4.
/// Zero when h is even, 8 does not divide D, or D has a prime divisor
/// congruent to 1 mod 4; otherwise -sgn(g) P1 P2 P3 / 2.
pub fn order_mod4_bias(gp: &GParams) -> DensityValue {
    match p123(gp) {
        Err(_) => DensityValue::zero(),
        Ok((p1, p2, c3)) => DensityValue::new(
            Rat::zero(),
            rat_int(-(gp.sign as i64)) * p1 * p2 * c3 / rat_int(2),
            SpecialConstant::APsi1,
        ),
    }
}

/// sum_{r >= s} (1/[K_{3^r,3^r}] - 1/[K_{3^(r+1),3^r}]): the density of
/// p = 1 mod 3^s with ord coprime to 3.
fn mod3_series(s: u32, gp: &GParams) -> Rat {
    let e3 = gp.e_p(3);
    let r0 = s.max(e3 + 2);
    sum_with_geometric_tail(
        |r| {
            let n = 3u64.pow(r);
            inv_degree(n, n, gp) - inv_degree(3 * n, n, gp)
        },
        s,
        r0,
        rat(1, 9),
    )
}

/// The class-(2,3) difference sum C(h,3,1) [+ negative-g terms] + eps *
/// C(h,3,n1/(3,n1)), with eps = -1 when 3 | D and +1 otherwise. The density
/// of ord = j mod 3 over p = 2 mod 3 is xi0(j)/4 + xi1(j)/4 times this.
fn two_mod3_sum(gp: &GParams) -> DensityValue {
    let xi = xi1();
    let h = gp.h;
    let n1 = gp.n_r(1);
    let q = u64::try_from(n1 / n1.gcd(&3)).expect("n_1 exceeds 64 bits");
    let eps = if gp.disc % 3 == 0 { rat_int(-1) } else { rat_int(1) };
    let mut total = c_closed(&xi, h, 3, 1).expect("xi1 is exact");
    if gp.sign < 0 {
        let half = rat(1, 2);
        total = total
            .sub(&c_closed(&xi, h, 3, 2).expect("xi1 is exact").scale(&half))
            .add(
                &c_closed(&xi, h, 3, 1u64 << (gp.e2 + 1))
                    .expect("xi1 is exact")
                    .scale(&half),
            );
    }
    total.add(&c_closed(&xi, h, 3, q).expect("xi1 is exact").scale(&eps))
}

/// Density of ord_g(p) = j mod 3 over primes p = a1 mod d1.
pub fn delta_mod3(gp: &GParams, cls: ClassSpec, j: u32) -> Result<DensityValue> {
    assert!(j < 3, "j must be a residue mod 3");
    let shape = cls
        .shape_mod3()
        .ok_or_else(|| Error::UnsupportedClass(format!("({}, {}) for modulus 3", cls.a1, cls.d1)))?;
    Ok(match shape {
        Mod3Shape::All => {
            let one = delta_mod3(gp, ClassSpec { a1: 1, d1: 3 }, j)?;
            let two = delta_mod3(gp, ClassSpec { a1: 2, d1: 3 }, j)?;
            one.add(&two)
        }
        Mod3Shape::OneModThreePow(s) => {
            // total density of the class p = 1 mod 3^s is 3^(1-s)/2
            let class_total = rat(1, 2) / rat_int(3).pow(s as i32 - 1);
            let coprime = mod3_series(s, gp);
            match j {
                0 => DensityValue::rational(class_total - coprime),
                _ => DensityValue::rational(coprime / rat_int(2)),
            }
        }
        Mod3Shape::TwoMod3 => {
            if j == 0 {
                // ord | p-1 and 3 does not divide p-1
                DensityValue::zero()
            } else {
                let xi_j = if j == 1 { rat_int(1) } else { rat_int(-1) };
                let sum = two_mod3_sum(gp);
                DensityValue::rational(rat(1, 4)).add(&sum.scale(&(xi_j / rat_int(4))))
            }
        }
    })
}

/// Alternative factored evaluation of the class-(2,3) densities, used as a
/// cross-check of [`delta_mod3`]: eps1 kills the correction when D has a
/// prime divisor congruent to 1 mod 3, and the 2-power bookkeeping is
/// carried by (-1)^Omega(n1) 2^(e2 + 2 - 2 nu_2(n1)).
pub fn two_mod3_factored(gp: &GParams, j: u32) -> DensityValue {
    assert!(matches!(j, 1 | 2));
    let xi = xi1();
    let xi_j = if j == 1 { rat_int(1) } else { rat_int(-1) };
    let e2 = gp.e2 as i64;

    let middle = if gp.sign > 0 {
        c_closed(&xi, gp.h, 3, 1).unwrap().scale(&(xi_j.clone() / rat_int(4)))
    } else {
        let s2 = if gp.e2 % 2 == 0 { 1i64 } else { -1 };
        let coef = rat_int(1)
            - rat_int(2i64.pow(gp.e2) - s2) / (rat_int(3) * rat_int(2).pow(e2 as i32 - 1))
            - rat_int(2).pow(2 - e2 as i32) * rat_int(s2) / rat_int(5);
        c_closed(&xi, gp.h, 6, 1)
            .unwrap()
            .scale(&(xi_j.clone() * coef / rat_int(4)))
    };

    let eps1 = if gp.disc_has_odd_prime_cong(1, 3) { 0 } else { 1 };
    let correction = if eps1 == 0 {
        DensityValue::zero()
    } else {
        let n1 = gp.n_r(1);
        let nu2 = nu2_u128(n1) as i64;
        let odd = u64::try_from(n1 >> nu2).expect("odd part of n_1 exceeds 64 bits");
        let omega: u32 = nu2 as u32 + factorize(odd).pairs.iter().map(|&(_, e)| e).sum::<u32>();
        let sign = if omega % 2 == 0 { rat_int(1) } else { rat_int(-1) };
        let (pp1, c) = pprime12(gp);
        DensityValue::new(
            Rat::zero(),
            xi_j / rat_int(5) * sign * rat_int(2).pow((e2 + 2 - 2 * nu2) as i32) * pp1 * c,
            SpecialConstant::AXi1,
        )
    };

    DensityValue::rational(rat(1, 4)).add(&middle).add(&correction)
}

/// The full-modulus difference the reference tables print:
/// delta_g(1,3) - delta_g(2,3) for d = 3, delta_g(1,4) - delta_g(3,4) for
/// d = 4. Both are pure multiples of the matching constant.
pub fn table_difference(gp: &GParams, d: u32) -> Result<DensityValue> {
    match d {
        3 => {
            let a = delta_mod3(gp, ClassSpec::ALL, 1)?;
            let b = delta_mod3(gp, ClassSpec::ALL, 2)?;
            Ok(a.sub(&b))
        }
        4 => {
            let a = delta_mod4(gp, ClassSpec::ALL, 1)?;
            let b = delta_mod4(gp, ClassSpec::ALL, 3)?;
            Ok(a.sub(&b))
        }
        _ => Err(Error::UnsupportedClass(format!("table modulus {d}"))),
    }
}

/// Result of an index-density query: exact when the closed form applies,
/// otherwise a truncated-series value with its convergence estimate.
#[derive(Debug, Clone)]
pub enum RhoIndex {
    Exact(DensityValue),
    Numeric(SeriesResult),
}

impl RhoIndex {
    pub fn numeric_f64(&self) -> f64 {
        match self {
            RhoIndex::Exact(v) => v.numeric_f64(),
            RhoIndex::Numeric(s) => s.value,
        }
    }

    pub fn exact(&self) -> Option<&DensityValue> {
        match self {
            RhoIndex::Exact(v) => Some(v),
            RhoIndex::Numeric(_) => None,
        }
    }
}

const RHO_NUMERIC_T: u64 = 1200;
const RHO_NUMERIC_V: u64 = 30_000;

/// Density of primes with r_g(p) = a mod d.
///
/// Exact on two routes: d | a gives 1/[K_{d,d} : Q] (the index-divisibility
/// density), and gcd(a,d) = 1 with d in {1,2,3,4,6} (all characters real
/// with conductor 1, 3 or 4) gives
/// (1/phi(d)) sum_chi conj(chi(a)) sum_v h_chi(v)/[K_{v,v} : Q]
/// through the closed Euler sums. Everything else falls back to the series.
pub fn rho_index(gp: &GParams, a: u64, d: u64) -> RhoIndex {
    assert!(d >= 1);
    let a = a % d;
    if a == 0 {
        return RhoIndex::Exact(DensityValue::rational(inv_degree(d, d, gp)));
    }
    if a.gcd(&d) == 1 && matches!(d, 2 | 3 | 4 | 6) {
        let chars = character_group(d).expect("small modulus");
        let mut total = DensityValue::zero();
        for chi in &chars {
            let weight = rat_int(chi.eval_real(a));
            let l = h_sum_over_degrees(chi, 1, 1, gp).expect("real small-conductor character");
            total = total.add(&l.scale(&weight));
        }
        return RhoIndex::Exact(total.scale(&rat(1, euler_phi(d) as i64)));
    }
    RhoIndex::Numeric(series_rho(gp, a, d, RHO_NUMERIC_T, RHO_NUMERIC_V))
}

/// The prime-averaged generic densities delta(a, d) for d = 3, 4.
pub fn generic_delta(a: u64, d: u64) -> Result<DensityValue> {
    match d {
        3 => Ok(match a % 3 {
            0 => DensityValue::rational(rat(3, 8)),
            1 => DensityValue::new(rat(5, 16), rat(1, 4), SpecialConstant::AXi1),
            _ => DensityValue::new(rat(5, 16), rat(-1, 4), SpecialConstant::AXi1),
        }),
        4 => Ok(if a % 2 == 0 {
            DensityValue::rational(rat(1, 3))
        } else {
            DensityValue::rational(rat(1, 6))
        }),
        _ => Err(Error::UnsupportedClass(format!(
            "generic densities cover d = 3, 4 only, got {d}"
        ))),
    }
}

/// Whether g is generic for modulus d: every residue class has exactly the
/// prime-averaged density.
pub fn is_generic(gp: &GParams, d: u64) -> Result<bool> {
    match d {
        3 => {
            for a in 0..3 {
                if delta_mod3(gp, ClassSpec::ALL, a)? != generic_delta(a as u64, 3)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        4 => {
            for a in 0..4 {
                if delta_mod4(gp, ClassSpec::ALL, a)? != generic_delta(a as u64, 4)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Err(Error::UnsupportedClass(format!(
            "genericity covers d = 3, 4 only, got {d}"
        ))),
    }
}

/// delta(p; a, d) = sum over divisors r of p-1 with r = a mod d of
/// phi(r)/(p-1): the density of elements of F_p^* with order a mod d.
pub fn local_density(p: u64, a: u64, d: u64) -> Rat {
    assert!(d >= 1 && p >= 2);
    let f = factorize(p - 1);
    let mut num = 0u64;
    for r in f.divisors() {
        if r % d == a % d {
            num += euler_phi(r);
        }
    }
    Rat::new(num.into(), (p - 1).into())
}
