//! Empirical verification engine: stream primes, compute the order and index
//! of g mod p, tally residue classes, and compare against the analytic
//! densities.
//!
//! Primes p dividing the numerator or denominator of g have no order and are
//! counted as skipped; ratios divide by the total number of primes examined
//! (skipped included), which is the convention the reference experiments
//! use. Work is parallel over disjoint sieve segments with one private tally
//! per worker; merging is associative, so the result is deterministic and
//! independent of the worker count.

use std::path::{Path, PathBuf};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{
    mul_mod, nth_prime_bound, pow_mod, Factorization, Rat, Segment, SegmentedSieve,
    MAX_PRIME_COUNT,
};
use crate::densities::{delta_mod3, delta_mod4, table_difference, ClassSpec};
use crate::eulerprod::DensityValue;
use crate::gdecomp::decompose;
use crate::{Error, Result};

/// What to tally: joint (p mod d1, ord mod d2) classes and index moduli.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusSpec {
    pub order_pairs: Vec<(u32, u32)>,
    pub index_moduli: Vec<u32>,
}

impl CensusSpec {
    pub fn order_mod(d: u32) -> CensusSpec {
        CensusSpec {
            order_pairs: vec![(1, d)],
            index_moduli: vec![],
        }
    }

    pub fn index_mod(d: u32) -> CensusSpec {
        CensusSpec {
            order_pairs: vec![],
            index_moduli: vec![d],
        }
    }
}

/// Joint counts of primes by congruence classes of p, ord_g(p) and r_g(p).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusTally {
    pub g: String,
    pub spec: CensusSpec,
    /// One flattened d1 x d2 matrix per order pair.
    pub counts: Vec<Vec<u64>>,
    /// One vector of d counters per index modulus.
    pub index_counts: Vec<Vec<u64>>,
    pub skipped: u64,
    pub total: u64,
    pub max_prime: u64,
}

impl CensusTally {
    fn new(g: String, spec: &CensusSpec) -> CensusTally {
        CensusTally {
            g,
            spec: spec.clone(),
            counts: spec
                .order_pairs
                .iter()
                .map(|&(d1, d2)| vec![0u64; (d1 * d2) as usize])
                .collect(),
            index_counts: spec
                .index_moduli
                .iter()
                .map(|&d| vec![0u64; d as usize])
                .collect(),
            skipped: 0,
            total: 0,
            max_prime: 0,
        }
    }

    fn merge(&mut self, other: &CensusTally) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, b) in self.index_counts.iter_mut().zip(&other.index_counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.skipped += other.skipped;
        self.total += other.total;
        self.max_prime = self.max_prime.max(other.max_prime);
    }

    /// Count of primes with p = a1 mod d1 and ord = a2 mod d2.
    pub fn order_count(&self, pair: usize, a1: u32, a2: u32) -> u64 {
        let (d1, d2) = self.spec.order_pairs[pair];
        self.counts[pair][(a1 % d1 * d2 + a2 % d2) as usize]
    }

    /// The same count divided by the total number of primes examined.
    pub fn order_ratio(&self, pair: usize, a1: u32, a2: u32) -> f64 {
        self.order_count(pair, a1, a2) as f64 / self.total as f64
    }

    pub fn index_count(&self, modulus_pos: usize, class: u32) -> u64 {
        let d = self.spec.index_moduli[modulus_pos];
        self.index_counts[modulus_pos][(class % d) as usize]
    }

    pub fn index_ratio(&self, modulus_pos: usize, class: u32) -> f64 {
        self.index_count(modulus_pos, class) as f64 / self.total as f64
    }

    /// Sum of all cells of one order pair plus skipped; always the total.
    pub fn check_conservation(&self) -> bool {
        self.counts
            .iter()
            .all(|m| m.iter().sum::<u64>() + self.skipped == self.total)
            && self
                .index_counts
                .iter()
                .all(|m| m.iter().sum::<u64>() + self.skipped == self.total)
    }
}

/// Least k >= 1 with t^k = 1 mod p, given the factorization of p - 1:
/// start from p - 1 and strip each prime q while t^(o/q) stays 1.
pub fn multiplicative_order(t: u64, p: u64, fact: &Factorization) -> u64 {
    assert!(t % p != 0, "order undefined for t = 0 mod p");
    order_from_pairs(t % p, p, &fact.pairs)
}

fn order_from_pairs(t: u64, p: u64, pairs: &[(u64, u32)]) -> u64 {
    debug_assert!(t >= 1 && t < p);
    let mut o = p - 1;
    for &(q, _) in pairs {
        while o % q == 0 && pow_mod(t, o / q, p) == 1 {
            o /= q;
        }
    }
    o
}

/// Remainder of a magnitude given as little-endian 64-bit digits.
fn digits_mod(digits: &[u64], p: u64) -> u64 {
    let mut r: u64 = 0;
    for &d in digits.iter().rev() {
        r = (((r as u128) << 64) % p as u128) as u64;
        r = ((r as u128 + d as u128) % p as u128) as u64;
    }
    r
}

/// Factor n by trial division over a prepared ascending prime slice that
/// covers sqrt(n); the cofactor, if any, is prime.
fn factor_with_table(mut n: u64, table: &[u64], out: &mut Vec<(u64, u32)>) {
    out.clear();
    for &q in table {
        if q * q > n {
            break;
        }
        if n % q == 0 {
            let mut e = 0u32;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
    }
    if n > 1 {
        out.push((n, 1));
    }
}

pub struct CensusConfig {
    pub n_primes: u64,
    /// 0 means: use RESORDER_JOBS if set, otherwise all cores.
    pub jobs: usize,
    pub checkpoint: Option<PathBuf>,
}

impl CensusConfig {
    pub fn new(n_primes: u64) -> CensusConfig {
        CensusConfig {
            n_primes,
            jobs: 0,
            checkpoint: None,
        }
    }
}

const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    n_primes: u64,
    next_segment: usize,
    tally: CensusTally,
    hash: String,
}

fn checkpoint_hash(version: u32, n_primes: u64, next_segment: usize, tally: &CensusTally) -> String {
    let payload = serde_json::to_vec(&(version, n_primes, next_segment, tally))
        .expect("checkpoint serialization");
    let mut hasher = Sha256::new();
    hasher.update(&payload);
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn save_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let data = serde_json::to_vec_pretty(cp)
        .map_err(|e| Error::Checkpoint(format!("serialize: {e}")))?;
    std::fs::write(&tmp, data).map_err(|e| Error::Checkpoint(format!("write: {e}")))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::Checkpoint(format!("rename: {e}")))?;
    Ok(())
}

fn load_checkpoint(path: &Path, g: &str, spec: &CensusSpec, n_primes: u64) -> Result<Checkpoint> {
    let data = std::fs::read(path).map_err(|e| Error::Checkpoint(format!("read: {e}")))?;
    let cp: Checkpoint =
        serde_json::from_slice(&data).map_err(|e| Error::Checkpoint(format!("parse: {e}")))?;
    if cp.version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!(
            "version {} unsupported",
            cp.version
        )));
    }
    let expected = checkpoint_hash(cp.version, cp.n_primes, cp.next_segment, &cp.tally);
    if expected != cp.hash {
        return Err(Error::Checkpoint("content hash mismatch".into()));
    }
    if cp.tally.g != g || &cp.tally.spec != spec || cp.n_primes != n_primes {
        return Err(Error::Checkpoint(
            "checkpoint belongs to a different census".into(),
        ));
    }
    Ok(cp)
}

/// Canonical textual form of g used in tallies and checkpoints.
pub fn g_string(g: &Rat) -> String {
    crate::arith::format_rat(g)
}

/// Census over the first `n_primes` primes: for each prime not dividing the
/// numerator or denominator of g, compute ord and index of g mod p and
/// update every requested tally.
pub fn census_run(g: &Rat, spec: &CensusSpec, cfg: &CensusConfig) -> Result<CensusTally> {
    if g.is_zero() || g.abs().is_one() {
        return Err(Error::InvalidBase(format!("census needs |g| > 1, got {g}")));
    }
    if cfg.n_primes > MAX_PRIME_COUNT {
        return Err(Error::ResourceLimit(format!(
            "census of {} primes exceeds 10^8",
            cfg.n_primes
        )));
    }
    if cfg.n_primes == 0 {
        return Err(Error::ResourceLimit("census needs at least one prime".into()));
    }

    let g_str = g_string(g);
    let limit = nth_prime_bound(cfg.n_primes);
    let sieve = SegmentedSieve::new(limit)?;
    let segments = sieve.segments();

    let neg = g.is_negative();
    let g1_digits = g.numer().magnitude().to_u64_digits();
    let g2_digits = g.denom().magnitude().to_u64_digits();

    let mut tally = CensusTally::new(g_str.clone(), spec);
    let mut start_segment = 0usize;
    if let Some(path) = &cfg.checkpoint {
        if path.exists() {
            let cp = load_checkpoint(path, &g_str, spec, cfg.n_primes)?;
            tally = cp.tally;
            start_segment = cp.next_segment;
        }
    }

    let pool = build_pool(cfg.jobs)?;

    let scan_segment = |seg: Segment| -> CensusTally {
        let mut local = CensusTally::new(g_str.clone(), spec);
        let mut fact: Vec<(u64, u32)> = Vec::with_capacity(16);
        for p in sieve.primes_in(seg) {
            tally_prime(
                p,
                &g1_digits,
                &g2_digits,
                neg,
                sieve.base_primes(),
                &mut fact,
                &mut local,
            );
        }
        local
    };

    let batch = pool.current_num_threads().max(1) * 4;
    let mut seg_idx = start_segment;
    while tally.total < cfg.n_primes && seg_idx < segments.len() {
        let upper = (seg_idx + batch).min(segments.len());
        let results: Vec<CensusTally> =
            pool.install(|| segments[seg_idx..upper].par_iter().map(|&s| scan_segment(s)).collect());
        for (k, part) in results.iter().enumerate() {
            let remaining = cfg.n_primes - tally.total;
            if part.total <= remaining {
                tally.merge(part);
            } else {
                // rescan the boundary segment, clipped to the primes we need
                let seg = segments[seg_idx + k];
                let mut clipped = CensusTally::new(g_str.clone(), spec);
                let mut fact: Vec<(u64, u32)> = Vec::with_capacity(16);
                for p in sieve.primes_in(seg).into_iter().take(remaining as usize) {
                    tally_prime(
                        p,
                        &g1_digits,
                        &g2_digits,
                        neg,
                        sieve.base_primes(),
                        &mut fact,
                        &mut clipped,
                    );
                }
                tally.merge(&clipped);
                break;
            }
            if tally.total == cfg.n_primes {
                break;
            }
        }
        seg_idx = upper;
        if let Some(path) = &cfg.checkpoint {
            let cp = Checkpoint {
                version: CHECKPOINT_VERSION,
                n_primes: cfg.n_primes,
                next_segment: seg_idx,
                hash: checkpoint_hash(CHECKPOINT_VERSION, cfg.n_primes, seg_idx, &tally),
                tally: tally.clone(),
            };
            save_checkpoint(path, &cp)?;
        }
    }

    if tally.total != cfg.n_primes {
        return Err(Error::ResourceLimit(format!(
            "sieve bound too small: saw {} of {} primes",
            tally.total, cfg.n_primes
        )));
    }
    debug_assert!(tally.check_conservation());
    Ok(tally)
}

fn build_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    let jobs = if jobs > 0 {
        jobs
    } else {
        std::env::var("RESORDER_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(0)
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if jobs > 0 {
        builder = builder.num_threads(jobs);
    }
    builder
        .build()
        .map_err(|e| Error::ResourceLimit(format!("thread pool: {e}")))
}

fn tally_prime(
    p: u64,
    g1_digits: &[u64],
    g2_digits: &[u64],
    neg: bool,
    base_primes: &[u64],
    fact: &mut Vec<(u64, u32)>,
    tally: &mut CensusTally,
) {
    tally.total += 1;
    tally.max_prime = tally.max_prime.max(p);
    let g1r = digits_mod(g1_digits, p);
    let g2r = digits_mod(g2_digits, p);
    if g1r == 0 || g2r == 0 {
        tally.skipped += 1;
        return;
    }
    let mut t = mul_mod(g1r, pow_mod(g2r, p - 2, p), p);
    if neg {
        t = p - t; // t != 0, and p - 1 = 1 when p = 2
    }
    factor_with_table(p - 1, base_primes, fact);
    let ord = order_from_pairs(t, p, fact);
    let idx = (p - 1) / ord;
    debug_assert_eq!(ord * idx, p - 1);

    for (i, &(d1, d2)) in tally.spec.order_pairs.iter().enumerate() {
        let cell = ((p % d1 as u64) as u32 * d2 + (ord % d2 as u64) as u32) as usize;
        tally.counts[i][cell] += 1;
    }
    for (i, &d) in tally.spec.index_moduli.iter().enumerate() {
        tally.index_counts[i][(idx % d as u64) as usize] += 1;
    }
}

/// One class row of a census-versus-analytic comparison.
#[derive(Debug, Clone)]
pub struct ClassComparison {
    pub j: u32,
    pub analytic: DensityValue,
    pub empirical: f64,
}

/// Census comparison for the order distribution mod d in {3, 4}: per-class
/// densities plus the signed difference the reference tables print.
#[derive(Debug, Clone)]
pub struct CensusComparison {
    pub d: u32,
    pub classes: Vec<ClassComparison>,
    pub difference_analytic: DensityValue,
    pub difference_empirical: f64,
    pub tally: CensusTally,
}

pub fn census_compare(g: &Rat, d: u32, cfg: &CensusConfig) -> Result<CensusComparison> {
    if !matches!(d, 3 | 4) {
        return Err(Error::UnsupportedClass(format!("census modulus {d}")));
    }
    let gp = decompose(g)?;
    let spec = CensusSpec::order_mod(d);
    let tally = census_run(g, &spec, cfg)?;
    let mut classes = Vec::new();
    for j in 0..d {
        let analytic = if d == 3 {
            delta_mod3(&gp, ClassSpec::ALL, j)?
        } else {
            delta_mod4(&gp, ClassSpec::ALL, j)?
        };
        classes.push(ClassComparison {
            j,
            analytic,
            empirical: tally.order_ratio(0, 0, j),
        });
    }
    let difference_analytic = table_difference(&gp, d)?;
    let hi = tally.order_ratio(0, 0, 1);
    let lo = tally.order_ratio(0, 0, if d == 3 { 2 } else { 3 });
    Ok(CensusComparison {
        d,
        classes,
        difference_analytic,
        difference_empirical: hi - lo,
        tally,
    })
}

/// Average of the local densities delta(p; a, d) over the first n primes,
/// one entry per class a mod d.
pub fn avg_local_density(d: u32, n_primes: u64) -> Result<Vec<f64>> {
    if n_primes > MAX_PRIME_COUNT {
        return Err(Error::ResourceLimit(format!(
            "average over {n_primes} primes exceeds 10^8"
        )));
    }
    let sieve = SegmentedSieve::new(nth_prime_bound(n_primes))?;
    let mut sums = vec![0.0f64; d as usize];
    let mut seen = 0u64;
    'outer: for seg in sieve.segments() {
        for p in sieve.primes_in(seg) {
            for a in 0..d {
                sums[a as usize] +=
                    crate::eulerprod::rat_to_f64(&crate::densities::local_density(p, a as u64, d as u64));
            }
            seen += 1;
            if seen == n_primes {
                break 'outer;
            }
        }
    }
    Ok(sums.into_iter().map(|s| s / seen as f64).collect())
}
