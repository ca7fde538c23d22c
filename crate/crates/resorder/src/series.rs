//! Truncated-series evaluation of every density from its definitional sum,
//! independent of the closed-form path, used to validate the closed forms.
//!
//! The index density is the double sum over t = a mod d and squarefree v of
//! mu(v) / [K_{vt,vt} : Q]; the order densities are resummed single series
//! weighted by h_chi with field-membership conditions evaluated through
//! exact degree comparisons. Summation is chunked and merged in fixed order,
//! so results are deterministic and independent of the worker count.

use rayon::prelude::*;

use crate::densities::ClassSpec;
use crate::dirichlet::h_prime_power_real;
use crate::gdecomp::GParams;
use crate::kummer::{degree_with_phi, intersection_l, QuadField};
use crate::{Error, Result};

/// A truncated series value with bookkeeping about how it was cut off.
#[derive(Debug, Clone)]
pub struct SeriesResult {
    pub value: f64,
    pub cutoff_t: u64,
    pub cutoff_v: u64,
    /// |value at the full cutoffs - value at half cutoffs|; heuristic.
    pub convergence_estimate: f64,
    /// For the index series only: the tail bound 2h / (vt phi(vt)) summed
    /// over the next dyadic t-block and extrapolated geometrically.
    pub rigorous_tail: Option<f64>,
}

impl SeriesResult {
    fn fixed(value: f64, v_cut: u64) -> SeriesResult {
        SeriesResult {
            value,
            cutoff_t: 0,
            cutoff_v: v_cut,
            convergence_estimate: 0.0,
            rigorous_tail: None,
        }
    }
}

/// Shared multiplicative tables up to n: smallest prime factor, mu, phi.
struct NtTables {
    spf: Vec<u32>,
    mu: Vec<i8>,
    phi: Vec<u64>,
}

impl NtTables {
    fn build(n: usize) -> NtTables {
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            for &p in &primes {
                let ip = i * p as usize;
                if p > spf[i] || ip > n {
                    break;
                }
                spf[ip] = p;
            }
        }
        let mut mu = vec![0i8; n + 1];
        let mut phi = vec![0u64; n + 1];
        if n >= 1 {
            mu[1] = 1;
            phi[1] = 1;
        }
        for i in 2..=n {
            let p = spf[i] as usize;
            let m = i / p;
            if m % p == 0 {
                mu[i] = 0;
                phi[i] = phi[m] * p as u64;
            } else {
                mu[i] = -mu[m];
                phi[i] = phi[m] * (p as u64 - 1);
            }
        }
        NtTables { spf, mu, phi }
    }

    /// h_chi(v) for a real character given by its values on primes.
    fn h_real(&self, mut v: usize, chi_p: impl Fn(u64) -> i64) -> i64 {
        let mut acc = 1i64;
        while v > 1 {
            let p = self.spf[v] as usize;
            let mut r = 0u32;
            while v % p == 0 {
                v /= p;
                r += 1;
            }
            acc *= h_prime_power_real(chi_p(p as u64), r);
            if acc == 0 {
                return 0;
            }
        }
        acc
    }
}

/// Degree context with the r = 1 parameters precomputed; the inner loops of
/// the series only ever need [K_{n,n} : Q].
struct DegCtx {
    h: u64,
    n1: u128,
    neg: bool,
    pow2: u64,
}

impl DegCtx {
    fn new(gp: &GParams) -> DegCtx {
        DegCtx {
            h: gp.h,
            n1: gp.n_r(1),
            neg: gp.sign < 0,
            pow2: 1u64 << (gp.e2 + 1),
        }
    }

    /// 1 / [K_{n,n} : Q] given phi(n).
    #[inline]
    fn inv_degree_nn(&self, n: u64, phi_n: u64) -> f64 {
        let eps2: u32 = if (n as u128) % self.n1 == 0 {
            4
        } else if self.neg && n % 2 == 0 && n % self.pow2 != 0 {
            1
        } else {
            2
        };
        let g = num_integer::gcd(n, self.h);
        let num = phi_n as u128 * n as u128 * 2;
        let den = eps2 as u128 * g as u128;
        debug_assert_eq!(num % den, 0);
        den as f64 / num as f64
    }
}

fn kahan_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for x in xs {
        let y = x - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Deterministic parallel sum: fixed chunks, Kahan within each chunk,
/// chunk results merged in index order.
fn chunked_sum<T: Sync>(items: &[T], f: impl Fn(&T) -> f64 + Sync) -> f64 {
    const CHUNK: usize = 4096;
    let partials: Vec<f64> = items
        .par_chunks(CHUNK)
        .map(|chunk| kahan_sum(chunk.iter().map(&f)))
        .collect();
    kahan_sum(partials.into_iter())
}

/// rho_g(a, d) as the truncated double series
/// sum_{t = a mod d, t <= T} sum_{v <= V} mu(v) / [K_{vt,vt} : Q].
pub fn series_rho(gp: &GParams, a: u64, d: u64, t_cut: u64, v_cut: u64) -> SeriesResult {
    assert!(t_cut >= 10 && v_cut >= 10, "cutoffs too small");
    let tables = NtTables::build((v_cut * 2).max(2 * t_cut) as usize);
    let ctx = DegCtx::new(gp);

    let eval = |t_max: u64, v_max: u64| -> f64 {
        let ts: Vec<u64> = (1..=t_max).filter(|t| t % d == a % d).collect();
        chunked_sum(&ts, |&t| {
            let phi_t = tables.phi[t as usize];
            kahan_sum((1..=v_max).filter_map(|v| {
                let mu = tables.mu[v as usize];
                if mu == 0 {
                    return None;
                }
                let g = num_integer::gcd(v, t);
                let phi_vt = tables.phi[v as usize] * phi_t / tables.phi[g as usize] * g;
                Some(mu as f64 * ctx.inv_degree_nn(v * t, phi_vt))
            }))
        })
    };

    let value = eval(t_cut, v_cut);
    let half = eval(t_cut / 2, v_cut / 2);

    // tail bound over the next dyadic t-block, extrapolated geometrically
    let ts_next: Vec<u64> = (t_cut + 1..=2 * t_cut).filter(|t| t % d == a % d).collect();
    let bound_block = chunked_sum(&ts_next, |&t| {
        let phi_t = tables.phi[t as usize];
        kahan_sum((1..=v_cut).filter_map(|v| {
            if tables.mu[v as usize] == 0 {
                return None;
            }
            let g = num_integer::gcd(v, t);
            let phi_vt = tables.phi[v as usize] * phi_t / tables.phi[g as usize] * g;
            Some(2.0 * gp.h as f64 / (v as f64 * t as f64 * phi_vt as f64))
        }))
    });

    SeriesResult {
        value,
        cutoff_t: t_cut,
        cutoff_v: v_cut,
        convergence_estimate: (value - half).abs(),
        rigorous_tail: Some(2.0 * bound_block),
    }
}

/// The bias series: sum over odd v of h_psi1(v)/[K_{2v,2v} : Q], counted
/// positively when sqrt(-2) lies in K_{2v,2v} and negatively when sqrt(2)
/// does, with membership read off the quadratic intersection rule.
fn bias_series(gp: &GParams, tables: &NtTables, v_cut: u64) -> f64 {
    let ctx = DegCtx::new(gp);
    let vs: Vec<u64> = (1..=v_cut).step_by(2).collect();
    chunked_sum(&vs, |&v| {
        let h = tables.h_real(v as usize, |p| match p % 4 {
            1 => 1,
            3 => -1,
            _ => 0,
        });
        if h == 0 {
            return 0.0;
        }
        let sign = match intersection_l(v, gp) {
            QuadField::SqrtM2 => 1.0,
            QuadField::Sqrt2 => -1.0,
            _ => return 0.0,
        };
        // phi(2v) = phi(v) for odd v
        sign * h as f64 * ctx.inv_degree_nn(2 * v, tables.phi[v as usize])
    })
}

/// The mod-3 correction series: sum over v coprime to 3 with zeta_3 outside
/// K_{v,v} of h_xi1(v)/[K_{v,v} : Q].
fn zeta3_series(gp: &GParams, tables: &NtTables, v_cut: u64) -> f64 {
    let vs: Vec<u64> = (1..=v_cut).filter(|v| v % 3 != 0).collect();
    chunked_sum(&vs, |&v| {
        let h = tables.h_real(v as usize, |p| match p % 3 {
            1 => 1,
            2 => -1,
            _ => 0,
        });
        if h == 0 {
            return 0.0;
        }
        let phi_v = tables.phi[v as usize];
        // zeta_3 in K_{v,v} iff adjoining it does not grow the degree
        let d_v = degree_with_phi(v, phi_v, v, gp);
        let d_3v = degree_with_phi(3 * v, 2 * phi_v, v, gp);
        if d_3v == d_v {
            return 0.0;
        }
        h as f64 / d_v as f64
    })
}

/// The 2-power (resp. 3-power) level series
/// sum_{r >= s} (1/[K_{b^r, k(r)}] - 1/[K_{b^(r+1), k(r)}]) with
/// k(r) = b^r or b^(r-1), summed until the terms vanish in f64.
fn level_series(gp: &GParams, base: u64, s: u32, upper_k: bool) -> f64 {
    let mut total = 0.0;
    let mut n: u64 = base.pow(s);
    let mut r = s;
    while let Some(bn) = n.checked_mul(base) {
        let k = if upper_k { n } else { n / base };
        let lo = degree_with_phi(n, crate::arith::euler_phi(n), k, gp) as f64;
        let hi = degree_with_phi(bn, crate::arith::euler_phi(bn), k, gp) as f64;
        let term = 1.0 / lo - 1.0 / hi;
        total += term;
        if term.abs() < 1e-18 && r > s + 8 {
            break;
        }
        n = bn;
        r += 1;
    }
    total
}

/// Density of p = 3 mod 4 with (g/p) = 1: the quadratic-residue half.
fn qr_positive_density(gp: &GParams) -> f64 {
    if gp.h % 2 == 0 {
        (1.0 + gp.sign as f64) / 4.0
    } else {
        0.25
    }
}

/// Series evaluation of the order-mod-d densities, mirroring the split the
/// closed forms use but with every infinite sum truncated at `v_cut`.
pub fn series_delta_order(
    gp: &GParams,
    modulus: u32,
    cls: ClassSpec,
    j: u32,
    v_cut: u64,
) -> Result<SeriesResult> {
    assert!(v_cut >= 100);
    match (modulus, cls.a1, cls.d1) {
        (4, 0, 1) | (3, 0, 1) => {
            let m = modulus as u64;
            let a = series_delta_order(gp, modulus, ClassSpec { a1: 1, d1: m }, j, v_cut)?;
            let other = if modulus == 4 { (3, 4) } else { (2, 3) };
            let b = series_delta_order(
                gp,
                modulus,
                ClassSpec { a1: other.0, d1: other.1 },
                j,
                v_cut,
            )?;
            Ok(SeriesResult {
                value: a.value + b.value,
                cutoff_t: 0,
                cutoff_v: v_cut,
                convergence_estimate: a.convergence_estimate + b.convergence_estimate,
                rigorous_tail: None,
            })
        }
        (4, 1, d) if d >= 4 && d.is_power_of_two() => {
            assert!(j < 4);
            let s = d.trailing_zeros();
            let value = match j {
                0 => 0.5f64.powi(s as i32 - 1) - level_series(gp, 2, s, false),
                2 => level_series(gp, 2, s, false) - level_series(gp, 2, s, true),
                _ => level_series(gp, 2, s, true) / 2.0,
            };
            Ok(SeriesResult::fixed(value, v_cut))
        }
        (4, 3, 4) => {
            assert!(j < 4);
            match j {
                0 => Ok(SeriesResult::fixed(0.0, v_cut)),
                2 => Ok(SeriesResult::fixed(0.5 - qr_positive_density(gp), v_cut)),
                _ => {
                    let base = qr_positive_density(gp) / 2.0;
                    let unit = if j == 1 { 1.0 } else { -1.0 };
                    let tables = NtTables::build(v_cut as usize);
                    Ok(two_point_estimate(v_cut, |v| {
                        base + unit * bias_series(gp, &tables, v) / 4.0
                    }))
                }
            }
        }
        (3, 1, d) if is_three_power(d) => {
            assert!(j < 3);
            let s = three_valuation(d);
            let coprime = level_series(gp, 3, s, true);
            let value = match j {
                0 => 0.5 * 3.0f64.powi(1 - s as i32) - coprime,
                _ => coprime / 2.0,
            };
            Ok(SeriesResult::fixed(value, v_cut))
        }
        (3, 2, 3) => {
            assert!(j < 3);
            if j == 0 {
                Ok(SeriesResult::fixed(0.0, v_cut))
            } else {
                let xi_j = if j == 1 { 1.0 } else { -1.0 };
                let tables = NtTables::build(v_cut as usize);
                Ok(two_point_estimate(v_cut, |v| {
                    0.25 + xi_j * zeta3_series(gp, &tables, v) / 4.0
                }))
            }
        }
        _ => Err(Error::UnsupportedClass(format!(
            "({}, {}) for modulus {modulus}",
            cls.a1, cls.d1
        ))),
    }
}

/// The table differences from the definitional series: Delta_g/2 for d = 4
/// and half the zeta_3-restricted sum for d = 3.
pub fn series_table_difference(gp: &GParams, d: u32, v_cut: u64) -> Result<SeriesResult> {
    let tables = NtTables::build(v_cut as usize);
    match d {
        4 => Ok(two_point_estimate(v_cut, |v| {
            bias_series(gp, &tables, v) / 2.0
        })),
        3 => Ok(two_point_estimate(v_cut, |v| {
            zeta3_series(gp, &tables, v) / 2.0
        })),
        _ => Err(Error::UnsupportedClass(format!("table modulus {d}"))),
    }
}

fn two_point_estimate(v_cut: u64, eval: impl Fn(u64) -> f64) -> SeriesResult {
    let value = eval(v_cut);
    let half = eval(v_cut / 2);
    SeriesResult {
        value,
        cutoff_t: 0,
        cutoff_v: v_cut,
        convergence_estimate: (value - half).abs(),
        rigorous_tail: None,
    }
}

fn is_three_power(mut d: u64) -> bool {
    if d < 3 {
        return false;
    }
    while d % 3 == 0 {
        d /= 3;
    }
    d == 1
}

fn three_valuation(mut d: u64) -> u32 {
    let mut s = 0;
    while d % 3 == 0 {
        d /= 3;
        s += 1;
    }
    s
}
