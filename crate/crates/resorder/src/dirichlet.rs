//! Dirichlet character groups mod d, the convolution h_chi = mu * chi, and
//! the orthogonality resummation used to turn residue-class conditions on
//! divisors into multiplicative weights.
//!
//! Characters are built by CRT over the prime-power components of d: odd
//! prime powers use discrete logs to a least primitive root, the 2^k
//! component the {-1, 5} generator pair. Values are stored as exponents into
//! Z/o (o the character order), so everything stays exact; complex numbers
//! appear only when a caller explicitly asks for a numeric evaluation.

use num_complex::Complex64;
use num_integer::Integer;

use crate::arith::{factorize, pow_mod};
use crate::{Error, Result};

const MAX_CHAR_MODULUS: u64 = 10_000;

/// A Dirichlet character mod `modulus` of order `order`, with chi(a) =
/// exp(2 pi i exps[a] / order) on units and 0 elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletChar {
    pub modulus: u64,
    pub order: u32,
    pub conductor: u64,
    pub principal: bool,
    /// Position within the canonical enumeration of the group mod `modulus`.
    pub index: u32,
    exps: Vec<Option<u32>>,
}

impl DirichletChar {
    /// Exponent e with chi(a) = zeta_order^e, or None when gcd(a, d) > 1.
    pub fn exp_at(&self, a: u64) -> Option<u32> {
        self.exps[(a % self.modulus) as usize]
    }

    /// True when all values are real, i.e. the order divides 2.
    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    /// chi(a) for a real character, in {-1, 0, 1}.
    pub fn eval_real(&self, a: u64) -> i64 {
        debug_assert!(self.is_real());
        match self.exp_at(a) {
            None => 0,
            Some(0) => 1,
            Some(_) => -1,
        }
    }

    /// chi(a) as a complex number.
    pub fn eval_complex(&self, a: u64) -> Complex64 {
        match self.exp_at(a) {
            None => Complex64::new(0.0, 0.0),
            Some(e) => {
                let theta = 2.0 * std::f64::consts::PI * e as f64 / self.order as f64;
                Complex64::new(theta.cos(), theta.sin())
            }
        }
    }

    /// The complex-conjugate character.
    pub fn conjugate(&self) -> DirichletChar {
        let mut c = self.clone();
        for e in c.exps.iter_mut().flatten() {
            *e = (self.order - *e) % self.order;
        }
        c
    }

    /// h_chi(v) = (mu * chi)(v) for a real character; exact.
    ///
    /// Multiplicative with h_chi(p^r) = chi(p)^(r-1) (chi(p) - 1), reading
    /// 0^0 = 1.
    pub fn h_real(&self, v: u64) -> i64 {
        debug_assert!(self.is_real());
        let mut acc = 1i64;
        for (p, r) in factorize(v).pairs {
            let c = self.eval_real(p);
            acc *= h_prime_power_real(c, r);
            if acc == 0 {
                return 0;
            }
        }
        acc
    }

    /// h_chi(v) for an arbitrary character, evaluated numerically.
    pub fn h_complex(&self, v: u64) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (p, r) in factorize(v).pairs {
            let c = self.eval_complex(p);
            let pow = if r == 1 {
                Complex64::new(1.0, 0.0)
            } else {
                c.powu(r - 1)
            };
            acc *= pow * (c - 1.0);
        }
        acc
    }
}

pub(crate) fn h_prime_power_real(c: i64, r: u32) -> i64 {
    match c {
        0 => {
            if r == 1 {
                -1
            } else {
                0
            }
        }
        1 => 0,
        -1 => {
            let sign = if r % 2 == 1 { 1 } else { -1 };
            sign * -2
        }
        _ => unreachable!("real character value out of range"),
    }
}

/// One cyclic component of (Z/dZ)^*: unit a has dlog[a] with respect to a
/// fixed generator of order `order`.
struct CyclicComponent {
    modulus: u64,
    order: u64,
    dlog: Vec<Option<u64>>,
}

fn primitive_root(p: u64, k: u32) -> u64 {
    // least primitive root mod p, lifted to p^k
    let phi_p = p - 1;
    let fact = factorize(phi_p);
    let mut g = 2u64;
    loop {
        let ok = fact
            .pairs
            .iter()
            .all(|&(q, _)| pow_mod(g, phi_p / q, p) != 1);
        if ok {
            break;
        }
        g += 1;
    }
    if k == 1 {
        return g;
    }
    // g generates mod p^k iff g^(p-1) != 1 mod p^2
    let p2 = p * p;
    if pow_mod(g, p - 1, p2) == 1 {
        g + p
    } else {
        g
    }
}

fn cyclic_component(p: u64, k: u32) -> CyclicComponent {
    let modulus = p.pow(k);
    let order = (p - 1) * p.pow(k - 1);
    let root = primitive_root(p, k);
    let mut dlog = vec![None; modulus as usize];
    let mut x = 1u64;
    for j in 0..order {
        dlog[x as usize] = Some(j);
        x = x * root % modulus;
    }
    CyclicComponent {
        modulus,
        order,
        dlog,
    }
}

/// Components for the 2^k part: trivial for k = 1, cyclic {1,3} for k = 2,
/// and the pair <-1> x <5> for k >= 3.
fn two_power_components(k: u32) -> Vec<CyclicComponent> {
    match k {
        0 | 1 => vec![],
        2 => {
            let mut dlog = vec![None; 4];
            dlog[1] = Some(0);
            dlog[3] = Some(1);
            vec![CyclicComponent {
                modulus: 4,
                order: 2,
                dlog,
            }]
        }
        _ => {
            let modulus = 1u64 << k;
            let half_order = 1u64 << (k - 2);
            let mut sign = vec![None; modulus as usize];
            let mut five = vec![None; modulus as usize];
            let mut x = 1u64;
            for j in 0..half_order {
                sign[x as usize] = Some(0);
                five[x as usize] = Some(j);
                let neg = modulus - x;
                sign[neg as usize] = Some(1);
                five[neg as usize] = Some(j);
                x = x * 5 % modulus;
            }
            vec![
                CyclicComponent {
                    modulus,
                    order: 2,
                    dlog: sign,
                },
                CyclicComponent {
                    modulus,
                    order: half_order,
                    dlog: five,
                },
            ]
        }
    }
}

/// The full group of Dirichlet characters mod d, in a deterministic order
/// with the principal character first.
pub fn character_group(d: u64) -> Result<Vec<DirichletChar>> {
    if d == 0 {
        return Err(Error::Parse("character modulus must be positive".into()));
    }
    if d > MAX_CHAR_MODULUS {
        return Err(Error::ResourceLimit(format!(
            "character modulus {d} exceeds {MAX_CHAR_MODULUS}"
        )));
    }

    let mut components: Vec<CyclicComponent> = Vec::new();
    for (p, k) in factorize(d).pairs {
        if p == 2 {
            components.extend(two_power_components(k));
        } else {
            components.push(cyclic_component(p, k));
        }
    }

    // Group exponent and per-unit exponents in Z/big_order.
    let big_order: u64 = components.iter().fold(1u64, |l, c| l.lcm(&c.order));
    let phi: u64 = components.iter().map(|c| c.order).product();

    // Enumerate character index tuples in mixed radix over component orders.
    let mut chars = Vec::with_capacity(phi as usize);
    let ncomp = components.len();
    let mut tuple = vec![0u64; ncomp];
    for index in 0..phi {
        let mut exps_big: Vec<Option<u64>> = vec![None; d as usize];
        for a in 0..d {
            if a.gcd(&d) != 1 {
                continue;
            }
            let mut e = 0u64;
            let mut ok = true;
            for (ci, comp) in components.iter().enumerate() {
                match comp.dlog[(a % comp.modulus) as usize] {
                    Some(l) => {
                        e = (e + tuple[ci] * l % comp.order * (big_order / comp.order))
                            % big_order;
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                exps_big[a as usize] = Some(e);
            }
        }

        // Reduce exponents from Z/big_order to Z/order of this character.
        let mut g = big_order;
        for e in exps_big.iter().flatten() {
            if *e > 0 {
                g = g.gcd(e);
            }
        }
        let order = (big_order / g) as u32;
        let exps: Vec<Option<u32>> = exps_big
            .iter()
            .map(|oe| oe.map(|e| (e / g) as u32))
            .collect();

        let mut chi = DirichletChar {
            modulus: d,
            order: order.max(1),
            conductor: 1,
            principal: order == 1,
            index: index as u32,
            exps,
        };
        chi.conductor = conductor_of(&chi);
        chars.push(chi);

        // increment mixed-radix tuple
        for ci in 0..ncomp {
            tuple[ci] += 1;
            if tuple[ci] < components[ci].order {
                break;
            }
            tuple[ci] = 0;
        }
    }

    // Principal character first, then by (order, index); stable and

    // deterministic across runs.
    chars.sort_by_key(|c| (!c.principal, c.order, c.index));
    for (i, c) in chars.iter_mut().enumerate() {
        c.index = i as u32;
    }
    Ok(chars)
}

fn conductor_of(chi: &DirichletChar) -> u64 {
    let d = chi.modulus;
    'outer: for f in factorize(d).divisors().into_iter().collect::<std::collections::BTreeSet<_>>() {
        for a in 0..d {
            if a.gcd(&d) == 1 && a % f == 1 % f && chi.exp_at(a) != Some(0) {
                continue 'outer;
            }
        }
        return f;
    }
    d
}

/// The nonprincipal character mod 4 (psi_1).
pub fn psi1() -> DirichletChar {
    character_group(4)
        .unwrap()
        .into_iter()
        .find(|c| !c.principal)
        .unwrap()
}

/// The nonprincipal character mod 3 (xi_1).
pub fn xi1() -> DirichletChar {
    character_group(3)
        .unwrap()
        .into_iter()
        .find(|c| !c.principal)
        .unwrap()
}

/// sum_{t | v, t = a mod d} mu(v/t), by divisor enumeration. This is the
/// left-hand side of the orthogonality resummation
/// (1/phi(d)) * sum_chi conj(chi(a)) h_chi(v) and serves as its test oracle.
pub fn class_sum(a: u64, d: u64, v: u64) -> Result<i64> {
    if a.gcd(&d) != 1 {
        return Err(Error::Parse(format!(
            "class_sum needs gcd(a, d) = 1, got a = {a}, d = {d}"
        )));
    }
    let f = factorize(v);
    let mut sum = 0i64;
    for t in f.divisors() {
        if t % d == a % d {
            sum += crate::arith::moebius(v / t) as i64;
        }
    }
    Ok(sum)
}
