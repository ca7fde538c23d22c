//! Degrees of the Kummer fields K_{n,k} = Q(zeta_n, g^(1/k)) for k | n, and
//! the quadratic intersections with Q(zeta_8).
//!
//! The degree rule: [K_{kr,k} : Q] = phi(kr) * k / (eps(kr,k) * gcd(k,h)),
//! where eps depends on whether n_r divides kr and, for negative g with r
//! odd, on the 2-part of k. All field-membership predicates this crate needs
//! (sqrt(2), sqrt(-2), zeta_3) reduce to degree comparisons and the
//! intersection rule, so no general number-field arithmetic appears anywhere.

use num_integer::Integer;

use crate::arith::{euler_phi, rat, Rat};
use crate::gdecomp::GParams;

/// The possible intersections Q(zeta_8) with Q(zeta_2v, g^(1/2v)), v odd:
/// one of the four quadratic subfields of Q(zeta_8), or Q itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadField {
    Rational,
    /// Q(i)
    Gauss,
    /// Q(sqrt(2))
    Sqrt2,
    /// Q(sqrt(-2))
    SqrtM2,
}

/// Twice the correction factor eps(n, k), as an integer in {1, 2, 4}.
///
/// eps = 2 when n_r | n; for g < 0 and r = n/k odd additionally eps = 1/2
/// when k is even but 2^(nu_2(h)+1) does not divide k; eps = 1 otherwise.
pub(crate) fn epsilon_twice(n: u64, k: u64, gp: &GParams) -> u32 {
    debug_assert!(k >= 1 && n % k == 0);
    let r = n / k;
    let nr = gp.n_r(r);
    if (n as u128) % nr == 0 {
        4
    } else if gp.sign < 0 && r % 2 == 1 {
        let two_pow = 1u64 << (gp.e2 + 1);
        if k % 2 == 0 && k % two_pow != 0 {
            1
        } else {
            2
        }
    } else {
        2
    }
}

/// eps(n, k) as an exact rational (it can be 1/2).
pub fn epsilon(n: u64, k: u64, gp: &GParams) -> Rat {
    rat(epsilon_twice(n, k, gp) as i64, 2)
}

/// [Q(zeta_n, g^(1/k)) : Q] for k | n.
///
/// Panics when k does not divide n or when the division by eps * gcd(k, h)
/// fails to be integral; the latter would mean the case analysis above is
/// wrong for this input, which is worth failing loudly over.
pub fn degree(n: u64, k: u64, gp: &GParams) -> u128 {
    assert!(k >= 1 && n % k == 0, "degree: k = {k} must divide n = {n}");
    degree_with_phi(n, euler_phi(n), k, gp)
}

pub(crate) fn degree_with_phi(n: u64, phi_n: u64, k: u64, gp: &GParams) -> u128 {
    let num = phi_n as u128 * k as u128 * 2;
    let den = epsilon_twice(n, k, gp) as u128 * k.gcd(&gp.h) as u128;
    assert!(
        num % den == 0,
        "degree not integral for n = {n}, k = {k}, g = {}",
        gp.g
    );
    num / den
}

/// The intersection L_v = Q(zeta_8) with Q(zeta_2v, g^(1/2v)) for odd v.
///
/// Case rule: for h even the intersection is the field of sqrt(sgn g); for h
/// odd it is Q unless D | 8v, in which case it is determined by D mod 4, 8,
/// 32 and the sign of g.
pub fn intersection_l(v: u64, gp: &GParams) -> QuadField {
    assert!(v % 2 == 1, "intersection_l: v must be odd");
    let neg = gp.sign < 0;
    if gp.h % 2 == 0 {
        return if neg { QuadField::Gauss } else { QuadField::Rational };
    }
    if (8 * v as u128) % gp.disc != 0 {
        return QuadField::Rational;
    }
    if gp.disc % 4 == 1 {
        if neg {
            QuadField::Gauss
        } else {
            QuadField::Rational
        }
    } else if gp.disc % 8 == 4 {
        if neg {
            QuadField::Rational
        } else {
            QuadField::Gauss
        }
    } else if gp.disc % 32 == 8 {
        if neg {
            QuadField::SqrtM2
        } else {
            QuadField::Sqrt2
        }
    } else {
        debug_assert_eq!(gp.disc % 32, 24);
        if neg {
            QuadField::Sqrt2
        } else {
            QuadField::SqrtM2
        }
    }
}

/// Whether zeta_3 lies in K_{v,v}, for 3 not dividing v: adjoining zeta_3
/// grows the degree by a factor 1 or 2, and membership is the factor-1 case.
pub fn contains_zeta3(v: u64, gp: &GParams) -> bool {
    assert!(v % 3 != 0, "contains_zeta3: v must be coprime to 3");
    degree(3 * v, v, gp) == degree(v, v, gp)
}
