//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Criterion 4 carries one documented correction: the reference experiment
//! for the index of 2 mod 3 quotes its endpoint prime as 1299709, which is
//! the 100000th prime, while labelling the run as 10^6 primes. A census over
//! the first 10^5 primes reproduces the quoted ratios exactly (counts 16589,
//! 47127, 36283); a census over 10^6 primes does not (it lands ~6e-4 away,
//! closer to the limit densities). The suite therefore checks exact-digit
//! reproduction at 10^5 primes, endpoint pinned to 1299709, and convergence
//! toward the analytic values at 10^6.

use std::sync::OnceLock;
use std::time::Instant;

use num_traits::Zero;
use resorder::arith::{parse_rat, rat, rat_int, Rat};
use resorder::census::{census_run, CensusConfig, CensusSpec, CensusTally};
use resorder::densities::{
    delta_mod3, delta_mod4, order_mod4_bias, rho_index, table_difference, ClassSpec, RhoIndex,
};
use resorder::dirichlet::{character_group, class_sum, psi1, xi1};
use resorder::eulerprod::{a_numeric_real, DensityValue, A_XI1};
use resorder::gdecomp::{decompose, GParams};
use resorder::series::{series_delta_order, series_rho, series_table_difference};
use resorder::tables::{format_numerical, TABLE1, TABLE2};

fn pass(criterion: &str, detail: &str) {
    println!("acceptance {criterion}: PASS - {detail}");
}

fn sample_bases() -> Vec<GParams> {
    ["2", "3", "4", "5", "8", "9", "-2", "-3", "-196", "25", "2048", "6^9"]
        .iter()
        .map(|s| decompose(&parse_rat(s).unwrap()).unwrap())
        .collect()
}

/// Shared 10^6-prime census of g = 2 used by criteria 5 and 8.
fn shared_census_g2() -> &'static CensusTally {
    static TALLY: OnceLock<CensusTally> = OnceLock::new();
    TALLY.get_or_init(|| {
        let spec = CensusSpec {
            order_pairs: vec![(1, 2), (4, 4), (3, 3)],
            index_moduli: vec![3],
        };
        census_run(&rat_int(2), &spec, &CensusConfig::new(1_000_000)).unwrap()
    })
}

#[test]
fn criterion_1_constants() {
    let start = Instant::now();
    let a4 = a_numeric_real(&psi1(), 10_000_000).unwrap();
    let a3 = a_numeric_real(&xi1(), 10_000_000).unwrap();
    let elapsed = start.elapsed();
    assert!(
        (a4 - 0.643650679662525).abs() <= 1e-7,
        "A_psi1 at 1e7: {a4}"
    );
    assert!(
        (a3 - 0.173977122429634).abs() <= 1e-7,
        "A_xi1 at 1e7: {a3}"
    );
    assert!(elapsed.as_secs() <= 60, "constants took {elapsed:?}");
    pass(
        "criterion 1 (constants)",
        &format!("A_psi1 = {a4:.15}, A_xi1 = {a3:.15} at cutoff 1e7 in {elapsed:?}"),
    );
}

#[test]
fn criterion_2_table1_exact_column() {
    for row in &TABLE1 {
        let gp = decompose(&parse_rat(row.g).unwrap()).unwrap();
        let diff = table_difference(&gp, 3).unwrap();
        assert_eq!(
            diff,
            DensityValue::parse(row.exact).unwrap(),
            "exact column at g = {}",
            row.g
        );
        assert_eq!(
            format_numerical(&diff),
            row.numerical,
            "numeric column at g = {}",
            row.g
        );
    }
    pass(
        "criterion 2 (table 1 exact column)",
        "all 15 rows match the printed coefficient and 8 truncated decimals",
    );
}

#[test]
fn criterion_3_table2_exact_column() {
    for row in &TABLE2 {
        let gp = decompose(&parse_rat(row.g).unwrap()).unwrap();
        let diff = table_difference(&gp, 4).unwrap();
        assert_eq!(
            diff,
            DensityValue::parse(row.exact).unwrap(),
            "exact column at g = {}",
            row.g
        );
        assert_eq!(
            format_numerical(&diff),
            row.numerical,
            "numeric column at g = {}",
            row.g
        );
    }
    pass(
        "criterion 3 (table 2 exact column)",
        "all 11 rows match the printed coefficient and 8 truncated decimals",
    );
}

#[test]
fn criterion_4_index_census_reproduction() {
    let start = Instant::now();

    // exact analytic values
    let gp = decompose(&rat_int(2)).unwrap();
    match rho_index(&gp, 0, 3) {
        RhoIndex::Exact(v) => assert_eq!(v, DensityValue::rational(rat(1, 6))),
        _ => panic!("rho(0,3) must be exact"),
    }
    match rho_index(&gp, 1, 3) {
        RhoIndex::Exact(v) => {
            assert_eq!((v.q0.clone(), v.q1.clone()), (rat(5, 12), rat(5, 16)))
        }
        _ => panic!("rho(1,3) must be exact"),
    }
    match rho_index(&gp, 2, 3) {
        RhoIndex::Exact(v) => {
            assert_eq!((v.q0.clone(), v.q1.clone()), (rat(5, 12), rat(-5, 16)))
        }
        _ => panic!("rho(2,3) must be exact"),
    }

    // exact-digit reproduction over the run that ends at the quoted prime
    let spec = CensusSpec::index_mod(3);
    let tally = census_run(&rat_int(2), &spec, &CensusConfig::new(100_000)).unwrap();
    assert_eq!(tally.max_prime, 1299709, "endpoint prime of the quoted run");
    let quoted = [0.16589, 0.47127, 0.36283];
    for (a, &q) in quoted.iter().enumerate() {
        let r = tally.index_ratio(0, a as u32);
        assert!(
            (r - q).abs() <= 2e-5,
            "index class {a}: census {r} vs quoted {q}"
        );
    }

    // and the larger run converges toward the analytic limits
    let big = shared_census_g2();
    let limits = [1.0 / 6.0, 5.0 / 12.0 + 5.0 / 16.0 * A_XI1, 5.0 / 12.0 - 5.0 / 16.0 * A_XI1];
    for (a, &l) in limits.iter().enumerate() {
        let r = big.index_ratio(0, a as u32);
        assert!(
            (r - l).abs() <= 1e-3,
            "index class {a} at 1e6 primes: {r} vs limit {l}"
        );
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() <= 300, "census took {elapsed:?}");
    pass(
        "criterion 4 (index census)",
        &format!(
            "counts {:?} at 10^5 primes match the quoted digits exactly; \
             10^6-prime run within 1e-3 of the limits; {elapsed:?}",
            tally.index_counts[0]
        ),
    );
}

#[test]
fn criterion_5_even_order_density() {
    let tally = shared_census_g2();
    let even = tally.order_ratio(0, 0, 0);
    let expect = 17.0 / 24.0;
    assert!(
        (even - expect).abs() <= 3e-3,
        "even-order fraction {even} vs 17/24 = {expect}"
    );
    pass(
        "criterion 5 (even order density)",
        &format!("fraction {even:.6} vs 17/24 = {expect:.6} over 10^6 primes"),
    );
}

#[test]
fn criterion_6_desk_scale_table_check() {
    // five rows of each table, census at 10^6 primes, tolerance 5e-3
    let picks1 = ["-196", "-3", "2", "4", "5"];
    let picks2 = ["-216", "2", "8", "512", "2048"];
    for (d, picks, rows) in [(3u32, &picks1, &TABLE1[..]), (4, &picks2, &TABLE2[..])] {
        for g_str in picks.iter() {
            let row = rows.iter().find(|r| r.g == *g_str).unwrap();
            let g = parse_rat(row.g).unwrap();
            let gp = decompose(&g).unwrap();
            let analytic = table_difference(&gp, d).unwrap().numeric_f64();
            let spec = CensusSpec::order_mod(d);
            let tally = census_run(&g, &spec, &CensusConfig::new(1_000_000)).unwrap();
            let other = if d == 3 { 2 } else { 3 };
            let empirical = tally.order_ratio(0, 0, 1) - tally.order_ratio(0, 0, other);
            assert!(
                (empirical - analytic).abs() <= 5e-3,
                "g = {}, d = {d}: empirical {empirical} vs analytic {analytic}",
                row.g
            );
        }
    }
    pass(
        "criterion 6 (desk-scale table check)",
        "10 rows within 5e-3 of the analytic differences at 10^6 primes",
    );
}

#[test]
fn criterion_7_oracle_equivalence() {
    let v_cut = 100_000u64;
    for gp in sample_bases() {
        // order mod 3 and mod 4, full modulus and the split classes
        for j in 0..3u32 {
            for cls in [ClassSpec::ALL, ClassSpec::new(1, 3).unwrap(), ClassSpec::new(2, 3).unwrap()] {
                let s = series_delta_order(&gp, 3, cls, j, v_cut).unwrap();
                let closed = delta_mod3(&gp, cls, j).unwrap().numeric_f64();
                let tol = (10.0 * s.convergence_estimate).max(1e-3);
                assert!(
                    (s.value - closed).abs() <= tol,
                    "g={} mod3 cls=({},{}) j={j}: series {} vs closed {closed} (tol {tol})",
                    gp.g, cls.a1, cls.d1, s.value
                );
            }
        }
        for j in 0..4u32 {
            for cls in [ClassSpec::ALL, ClassSpec::new(1, 4).unwrap(), ClassSpec::new(3, 4).unwrap()] {
                let s = series_delta_order(&gp, 4, cls, j, v_cut).unwrap();
                let closed = delta_mod4(&gp, cls, j).unwrap().numeric_f64();
                let tol = (10.0 * s.convergence_estimate).max(1e-3);
                assert!(
                    (s.value - closed).abs() <= tol,
                    "g={} mod4 cls=({},{}) j={j}: series {} vs closed {closed} (tol {tol})",
                    gp.g, cls.a1, cls.d1, s.value
                );
            }
        }
        // the printed table differences
        for d in [3u32, 4] {
            let s = series_table_difference(&gp, d, v_cut).unwrap();
            let closed = table_difference(&gp, d).unwrap().numeric_f64();
            let tol = (10.0 * s.convergence_estimate).max(1e-3);
            assert!(
                (s.value - closed).abs() <= tol,
                "g={} diff d={d}: series {} vs closed {closed}",
                gp.g, s.value
            );
        }
        // index densities mod 3
        for a in 0..3u64 {
            let s = series_rho(&gp, a, 3, 1000, v_cut);
            let closed = match rho_index(&gp, a, 3) {
                RhoIndex::Exact(v) => v.numeric_f64(),
                RhoIndex::Numeric(_) => unreachable!("d = 3 is exact"),
            };
            let tol = (10.0 * s.convergence_estimate).max(1e-3);
            assert!(
                (s.value - closed).abs() <= tol,
                "g={} rho({a},3): series {} vs closed {closed} (tol {tol})",
                gp.g, s.value
            );
        }
    }
    pass(
        "criterion 7 (oracle equivalence)",
        "series and closed forms agree for all 12 bases at V = 1e5",
    );
}

#[test]
fn criterion_8_invariant_suites() {
    // class sums at s in {2,3,4} over a 20-base sample, exactly
    let twenty: Vec<GParams> = [
        "2", "3", "4", "5", "8", "9", "-2", "-3", "-196", "25", "2048", "6^9", "-9", "-81",
        "216", "-216", "512", "48", "10", "3/2",
    ]
    .iter()
    .map(|s| decompose(&parse_rat(s).unwrap()).unwrap())
    .collect();
    for gp in &twenty {
        for s in 2..=4u32 {
            let cls = ClassSpec::new(1, 1 << s).unwrap();
            let mut total = DensityValue::zero();
            for j in 0..4 {
                total = total.add(&delta_mod4(gp, cls, j).unwrap());
            }
            assert_eq!(total, DensityValue::rational(rat(1, 1 << (s - 1))));
        }
        let mut total = DensityValue::zero();
        for j in 0..4 {
            total = total.add(&delta_mod4(gp, ClassSpec::new(3, 4).unwrap(), j).unwrap());
        }
        assert_eq!(total, DensityValue::rational(rat(1, 2)));
        let mut total = DensityValue::zero();
        for j in 0..3 {
            total = total.add(&delta_mod3(gp, ClassSpec::new(2, 3).unwrap(), j).unwrap());
        }
        assert_eq!(total, DensityValue::rational(rat(1, 2)));
        for s in 1..=3u32 {
            let cls = ClassSpec::new(1, 3u64.pow(s)).unwrap();
            let mut total = DensityValue::zero();
            for j in 0..3 {
                total = total.add(&delta_mod3(gp, cls, j).unwrap());
            }
            let expect = rat(1, 2) * Rat::from_integer(3i64.pow(s - 1).into()).recip();
            assert_eq!(total, DensityValue::rational(expect));
        }
    }

    // bias antisymmetry and the complement law over the sample set
    for gp in sample_bases() {
        let neg = decompose(&(-gp.g.clone())).unwrap();
        assert_eq!(
            order_mod4_bias(&gp),
            order_mod4_bias(&neg).scale(&rat_int(-1)),
            "bias symmetry at g = {}",
            gp.g
        );
        for j in [1u32, 3] {
            let a = delta_mod4(&gp, ClassSpec::new(3, 4).unwrap(), j).unwrap();
            let b = delta_mod4(&neg, ClassSpec::new(3, 4).unwrap(), j).unwrap();
            assert_eq!(a.add(&b), DensityValue::rational(rat(1, 4)));
        }
    }

    // sign law mod 4: sgn(delta(3,4;3,4) - delta(3,4;1,4)) = sgn(g) when the
    // bias is nonzero
    for g_str in ["2", "-2", "8", "-8", "216", "-216", "2048", "6", "10"] {
        let gp = decompose(&parse_rat(g_str).unwrap()).unwrap();
        if order_mod4_bias(&gp).is_zero() {
            continue;
        }
        let d3 = delta_mod4(&gp, ClassSpec::new(3, 4).unwrap(), 3).unwrap();
        let d1 = delta_mod4(&gp, ClassSpec::new(3, 4).unwrap(), 1).unwrap();
        let diff = d3.sub(&d1);
        assert_eq!(diff.q1 > Rat::zero(), gp.sign > 0, "mod-4 sign law at {g_str}");
    }

    // sign law mod 3 with its equality cases
    for g_str in ["3", "9", "48", "-3", "2", "4", "81", "-81", "6561"] {
        let gp = decompose(&parse_rat(g_str).unwrap()).unwrap();
        let d1 = delta_mod3(&gp, ClassSpec::new(2, 3).unwrap(), 1).unwrap();
        let d2 = delta_mod3(&gp, ClassSpec::new(2, 3).unwrap(), 2).unwrap();
        let diff = d1.sub(&d2);
        if gp.sign > 0 && gp.h.is_multiple_of(2) {
            assert!(diff.q1 <= Rat::zero(), "mod-3 sign law at {g_str}");
        } else {
            assert!(diff.q1 >= Rat::zero(), "mod-3 sign law at {g_str}");
        }
        let predicted = gp.sign > 0 && gp.disc == 12 && matches!(gp.e2, 0 | 2);
        assert_eq!(diff.is_zero(), predicted, "equality case at {g_str}");
    }

    // orthogonality identity on 200 seeded random triples
    use num_complex::Complex64;
    use num_integer::Integer;
    use rand::{rngs::StdRng, Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(20260809);
    let mut done = 0;
    while done < 200 {
        let d = rng.gen_range(1u64..=24);
        let a = rng.gen_range(0u64..d);
        if a.gcd(&d) != 1 {
            continue;
        }
        let v = rng.gen_range(1u64..=10_000);
        let lhs = class_sum(a, d, v).unwrap();
        let mut rhs = Complex64::new(0.0, 0.0);
        for chi in character_group(d).unwrap() {
            rhs += chi.eval_complex(a).conj() * chi.h_complex(v);
        }
        rhs /= resorder::arith::euler_phi(d) as f64;
        assert!(
            (rhs.re - lhs as f64).abs() < 1e-6 && rhs.im.abs() < 1e-6,
            "orthogonality at (a,d,v) = ({a},{d},{v})"
        );
        done += 1;
    }

    // census congruence impossibilities over 10^6 primes: p = 3 mod 4 never
    // has ord = 0 mod 4, p = 2 mod 3 never has ord = 0 mod 3
    let tally = shared_census_g2();
    assert_eq!(tally.order_count(1, 3, 0), 0, "p=3(4) with 4 | ord");
    assert_eq!(tally.order_count(2, 2, 0), 0, "p=2(3) with 3 | ord");

    pass(
        "criterion 8 (invariant suites)",
        "class sums, bias antisymmetry, complement and sign laws, \
         orthogonality on 200 triples, zero impossibility violations",
    );
}

/// Optional long-mode target: the full 10^8-prime run with tolerance 5e-4.
/// Takes a few minutes per row; run with
/// `cargo test --release --test acceptance -- --ignored --nocapture`.
#[test]
#[ignore]
fn long_mode_full_census() {
    for (d, row) in [(3u32, &TABLE1[1]), (4, &TABLE2[3])] {
        let g = parse_rat(row.g).unwrap();
        let gp = decompose(&g).unwrap();
        let analytic = table_difference(&gp, d).unwrap().numeric_f64();
        let spec = CensusSpec::order_mod(d);
        let tally = census_run(&g, &spec, &CensusConfig::new(100_000_000)).unwrap();
        assert_eq!(tally.max_prime, 2038074743, "the 10^8th prime");
        let other = if d == 3 { 2 } else { 3 };
        let empirical = tally.order_ratio(0, 0, 1) - tally.order_ratio(0, 0, other);
        let published: f64 = row.experimental.parse().unwrap();
        assert!(
            (empirical - analytic).abs() <= 5e-4,
            "g = {}: empirical {empirical} vs analytic {analytic}",
            row.g
        );
        println!(
            "long mode g = {}: empirical {empirical:.8} vs published {published:.8} \
             (analytic {analytic:.8})",
            row.g
        );
    }
}
