//! Command-line surface: constants, exact and numeric densities, series
//! evaluations, census runs, and reference-table reproduction.
//!
//! Exit codes: 0 on success, 2 on usage errors, 3 when the base g is one of
//! the degenerate values -1, 0, 1.

use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::arith::{parse_rat, Rat};
use crate::census::{avg_local_density, census_compare, CensusConfig};
use crate::densities::{
    delta_mod3, delta_mod4, generic_delta, is_generic, local_density, order_mod4_bias, rho_index,
    table_difference, ClassSpec, RhoIndex,
};
use crate::dirichlet::{psi1, xi1};
use crate::eulerprod::{a_numeric_real, A_PSI1, A_XI1};
use crate::gdecomp::decompose;
use crate::report::{emit, Format, Meta, Report, Row};
use crate::series::{series_delta_order, series_rho, series_table_difference};
use crate::tables::{format_numerical, table};
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "resorder",
    about = "Densities of primes by the residue class of the order or index of a rational base",
    version
)]
struct Cli {
    /// Output format: human, csv or json.
    #[arg(long, global = true, default_value = "human")]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the two Euler-product constants at a prime cutoff.
    Constants {
        #[arg(long, default_value_t = 10_000_000)]
        cutoff: u64,
    },
    /// Exact densities.
    Density {
        #[command(subcommand)]
        which: DensityCmd,
    },
    /// Truncated-series evaluation of a density, with convergence estimate.
    Oracle {
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        /// rho:A:D | order:MOD:A1/D1:J | diff:3 | diff:4
        #[arg(long)]
        target: String,
        /// Series cutoff V.
        #[arg(long, default_value_t = 100_000)]
        cutoff: u64,
    },
    /// Prime census: order distribution mod d against the analytic values.
    Census(CensusArgs),
    /// Reproduce a reference table, optionally with a fresh census column.
    Table {
        /// 1 (order mod 3) or 2 (order mod 4).
        #[arg(long)]
        which: u8,
        /// Add an empirical column from a census over this many primes.
        #[arg(long)]
        primes: Option<u64>,
        /// Comma-separated 1-based row numbers (default: all).
        #[arg(long)]
        rows: Option<String>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Average of the local densities delta(p; a, d) over the first primes.
    LocalAverage {
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 100_000)]
        primes: u64,
    },
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long, allow_hyphen_values = true)]
    g: String,
    /// Order modulus: 3 or 4.
    #[arg(long)]
    d: u32,
    #[arg(long)]
    primes: u64,
    /// Worker threads (0 = RESORDER_JOBS or all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Checkpoint file; an existing compatible checkpoint is resumed.
    #[arg(long)]
    checkpoint: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum DensityCmd {
    /// Order distribution: density of ord_g(p) = j mod d over a prime class.
    Order {
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        /// 3 or 4.
        #[arg(long)]
        d: u32,
        /// Prime class a1/d1: 0/1, 1/2^s, 3/4, 1/3^s or 2/3 (default 0/1).
        #[arg(long)]
        class: Option<String>,
        /// Single residue j (default: all residues mod d).
        #[arg(long)]
        j: Option<u32>,
    },
    /// Index distribution: density of r_g(p) = a mod d.
    Index {
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long)]
        d: u64,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
    },
    /// The prime-averaged generic densities and the genericity test for g.
    Generic {
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long)]
        d: u64,
    },
}

/// Run the CLI on the given arguments (argv[0] included); returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    match dispatch(&cli.cmd, start) {
        Ok(report) => {
            print!("{}", emit(&report, cli.format));
            0
        }
        Err(Error::InvalidBase(msg)) => {
            eprintln!("error: {msg}");
            3
        }
        Err(Error::UnsupportedClass(msg)) | Err(Error::Parse(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn parse_g(s: &str) -> Result<Rat> {
    let g = parse_rat(s)?;
    // surface the degenerate bases as their own error class
    decompose(&g)?;
    Ok(g)
}

fn dispatch(cmd: &Cmd, start: Instant) -> Result<Report> {
    let mut report = match cmd {
        Cmd::Constants { cutoff } => constants_report(*cutoff)?,
        Cmd::Density { which } => density_report(which)?,
        Cmd::Oracle { g, target, cutoff } => oracle_report(g, target, *cutoff)?,
        Cmd::Census(args) => census_report(args)?,
        Cmd::Table {
            which,
            primes,
            rows,
            jobs,
        } => table_report(*which, *primes, rows.as_deref(), *jobs)?,
        Cmd::LocalAverage { d, primes } => local_average_report(*d, *primes)?,
    };
    report.meta.runtime_ms = start.elapsed().as_millis();
    report.meta.grh_conditional = report.rows.iter().any(|r| r.grh);
    Ok(report)
}

fn constants_report(cutoff: u64) -> Result<Report> {
    let a4 = a_numeric_real(&psi1(), cutoff)?;
    let a3 = a_numeric_real(&xi1(), cutoff)?;
    let rows = vec![
        Row::numeric_only("A_psi1 (partial product)", a4, false)
            .with_empirical(A_PSI1),
        Row::numeric_only("A_xi1 (partial product)", a3, false)
            .with_empirical(A_XI1),
    ];
    Ok(Report {
        command: "constants".into(),
        g: None,
        rows,
        meta: Meta {
            cutoff: Some(cutoff),
            ..Meta::default()
        },
    })
}

fn density_report(cmd: &DensityCmd) -> Result<Report> {
    match cmd {
        DensityCmd::Order { g, d, class, j } => {
            if !matches!(d, 3 | 4) {
                return Err(Error::UnsupportedClass(format!("order modulus {d}")));
            }
            let gr = parse_g(g)?;
            let gp = decompose(&gr)?;
            let cls = match class {
                Some(c) => ClassSpec::parse(c)?,
                None => ClassSpec::ALL,
            };
            let js: Vec<u32> = match j {
                Some(j) if *j < *d => vec![*j],
                Some(j) => {
                    return Err(Error::UnsupportedClass(format!("residue {j} mod {d}")))
                }
                None => (0..*d).collect(),
            };
            let mut rows = Vec::new();
            for jj in js {
                let (v, grh) = if *d == 3 {
                    (delta_mod3(&gp, cls, jj)?, jj != 0)
                } else {
                    (delta_mod4(&gp, cls, jj)?, jj % 2 == 1)
                };
                let label = format!("delta({},{}; {},{})", cls.a1, cls.d1, jj, d);
                rows.push(Row::exact_density(label, &v, grh));
            }
            if *d == 4 && cls == ClassSpec::ALL {
                rows.push(Row::exact_density("Delta_g", &order_mod4_bias(&gp), true));
            }
            if cls == ClassSpec::ALL {
                rows.push(Row::exact_density(
                    format!("delta(1,{d}) - delta({},{d})", if *d == 3 { 2 } else { 3 }),
                    &table_difference(&gp, *d)?,
                    true,
                ));
            }
            Ok(Report {
                command: "density order".into(),
                g: Some(g.clone()),
                rows,
                meta: Meta::default(),
            })
        }
        DensityCmd::Index { g, d, a } => {
            if *d == 0 {
                return Err(Error::UnsupportedClass("index modulus 0".into()));
            }
            let gr = parse_g(g)?;
            let gp = decompose(&gr)?;
            let a = a.rem_euclid(*d as i64) as u64;
            let label = format!("rho({a},{d})");
            let row = match rho_index(&gp, a, *d) {
                RhoIndex::Exact(v) => Row::exact_density(label, &v, a != 0),
                RhoIndex::Numeric(s) => {
                    let mut row = Row::numeric_only(
                        format!("{label} [series, not exact]"),
                        s.value,
                        true,
                    );
                    row.deviation = Some(s.convergence_estimate.max(s.rigorous_tail.unwrap_or(0.0)));
                    row
                }
            };
            Ok(Report {
                command: "density index".into(),
                g: Some(g.clone()),
                rows: vec![row],
                meta: Meta::default(),
            })
        }
        DensityCmd::Generic { g, d } => {
            let gr = parse_g(g)?;
            let gp = decompose(&gr)?;
            let mut rows = Vec::new();
            for a in 0..*d {
                rows.push(Row::exact_density(
                    format!("delta({a},{d}) [generic]"),
                    &generic_delta(a, *d)?,
                    true,
                ));
            }
            let flag = is_generic(&gp, *d)?;
            rows.push(Row::numeric_only(
                format!("g is generic for d={d}: {flag}"),
                if flag { 1.0 } else { 0.0 },
                true,
            ));
            Ok(Report {
                command: "density generic".into(),
                g: Some(g.clone()),
                rows,
                meta: Meta::default(),
            })
        }
    }
}

fn oracle_report(g: &str, target: &str, cutoff: u64) -> Result<Report> {
    let gr = parse_g(g)?;
    let gp = decompose(&gr)?;
    let parts: Vec<&str> = target.split(':').collect();
    let mut rows = Vec::new();
    match parts.as_slice() {
        ["rho", a, d] => {
            let a: u64 = a.parse().map_err(|_| Error::Parse(target.into()))?;
            let d: u64 = d.parse().map_err(|_| Error::Parse(target.into()))?;
            let t_cut = (cutoff / 25).clamp(100, 4000);
            let s = series_rho(&gp, a, d, t_cut, cutoff);
            let mut row = Row::numeric_only(format!("rho({a},{d}) series"), s.value, true);
            row.deviation = s.rigorous_tail;
            rows.push(row);
            rows.push(Row::numeric_only(
                "convergence estimate",
                s.convergence_estimate,
                false,
            ));
            if let RhoIndex::Exact(v) = rho_index(&gp, a, d) {
                rows.push(Row::exact_density(format!("rho({a},{d}) closed"), &v, a != 0));
            }
        }
        ["order", m, cls, j] => {
            let modulus: u32 = m.parse().map_err(|_| Error::Parse(target.into()))?;
            let cls = ClassSpec::parse(cls)?;
            let j: u32 = j.parse().map_err(|_| Error::Parse(target.into()))?;
            let s = series_delta_order(&gp, modulus, cls, j, cutoff)?;
            rows.push(Row::numeric_only(
                format!("delta({},{}; {},{}) series", cls.a1, cls.d1, j, modulus),
                s.value,
                true,
            ));
            rows.push(Row::numeric_only(
                "convergence estimate",
                s.convergence_estimate,
                false,
            ));
            let closed = if modulus == 3 {
                delta_mod3(&gp, cls, j)?
            } else {
                delta_mod4(&gp, cls, j)?
            };
            rows.push(Row::exact_density("closed form", &closed, true));
        }
        ["diff", d] => {
            let d: u32 = d.parse().map_err(|_| Error::Parse(target.into()))?;
            let s = series_table_difference(&gp, d, cutoff)?;
            rows.push(Row::numeric_only(format!("diff mod {d} series"), s.value, true));
            rows.push(Row::numeric_only(
                "convergence estimate",
                s.convergence_estimate,
                false,
            ));
            rows.push(Row::exact_density(
                "closed form",
                &table_difference(&gp, d)?,
                true,
            ));
        }
        _ => {
            return Err(Error::Parse(format!(
                "unknown oracle target {target:?} (rho:A:D | order:MOD:A1/D1:J | diff:D)"
            )))
        }
    }
    Ok(Report {
        command: format!("oracle {target}"),
        g: Some(g.to_string()),
        rows,
        meta: Meta {
            cutoff: Some(cutoff),
            ..Meta::default()
        },
    })
}

fn census_report(args: &CensusArgs) -> Result<Report> {
    let gr = parse_g(&args.g)?;
    let cfg = CensusConfig {
        n_primes: args.primes,
        jobs: args.jobs,
        checkpoint: args.checkpoint.clone(),
    };
    let cmp = census_compare(&gr, args.d, &cfg)?;
    let mut rows = Vec::new();
    for c in &cmp.classes {
        let grh = if args.d == 3 { c.j != 0 } else { c.j % 2 == 1 };
        rows.push(
            Row::exact_density(format!("delta({},{})", c.j, args.d), &c.analytic, grh)
                .with_empirical(c.empirical),
        );
    }
    let other = if args.d == 3 { 2 } else { 3 };
    rows.push(
        Row::exact_density(
            format!("delta(1,{}) - delta({},{})", args.d, other, args.d),
            &cmp.difference_analytic,
            true,
        )
        .with_empirical(cmp.difference_empirical),
    );
    rows.push(Row::numeric_only(
        "skipped primes",
        cmp.tally.skipped as f64,
        false,
    ));
    Ok(Report {
        command: format!("census d={}", args.d),
        g: Some(args.g.clone()),
        rows,
        meta: Meta {
            primes: Some(args.primes),
            ..Meta::default()
        },
    })
}

fn table_report(which: u8, primes: Option<u64>, rows_arg: Option<&str>, jobs: usize) -> Result<Report> {
    let rows_data =
        table(which).ok_or_else(|| Error::UnsupportedClass(format!("table {which}")))?;
    let selected: Vec<usize> = match rows_arg {
        None => (0..rows_data.len()).collect(),
        Some(list) => {
            let mut out = Vec::new();
            for item in list.split(',') {
                let idx: usize = item
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad row list {list:?}")))?;
                if idx == 0 || idx > rows_data.len() {
                    return Err(Error::Parse(format!("row {idx} out of range")));
                }
                out.push(idx - 1);
            }
            out
        }
    };
    let d = if which == 1 { 3 } else { 4 };
    let mut rows = Vec::new();
    for &i in &selected {
        let trow = rows_data[i];
        let g = parse_rat(trow.g)?;
        let gp = decompose(&g)?;
        let diff = table_difference(&gp, d)?;
        debug_assert_eq!(format_numerical(&diff), trow.numerical);
        let label = format!("g={} (g0={}, h={})", trow.g, trow.g0, trow.h);
        let mut row = Row::exact_density(label, &diff, true);
        if let Some(n) = primes {
            let cmp = census_compare(
                &g,
                d,
                &CensusConfig {
                    n_primes: n,
                    jobs,
                    checkpoint: None,
                },
            )?;
            row = row.with_empirical(cmp.difference_empirical);
        }
        rows.push(row);
    }
    Ok(Report {
        command: format!("table {which}"),
        g: None,
        rows,
        meta: Meta {
            primes,
            ..Meta::default()
        },
    })
}

fn local_average_report(d: u32, primes: u64) -> Result<Report> {
    if d == 0 {
        return Err(Error::UnsupportedClass("modulus 0".into()));
    }
    let avg = avg_local_density(d, primes)?;
    let mut rows = Vec::new();
    for (a, v) in avg.iter().enumerate() {
        let mut row = Row::numeric_only(format!("avg delta(p; {a},{d})"), *v, false);
        if matches!(d, 3 | 4) {
            let limit = generic_delta(a as u64, d as u64)?;
            row = row.with_empirical(limit.numeric_f64());
        }
        rows.push(row);
    }
    // small demonstration value: the exact local density at the largest
    // prime below 100
    let p = 97u64;
    rows.push(Row::numeric_only(
        format!("delta({p}; 0,{d}) exact = {}", crate::arith::format_rat(&local_density(p, 0, d as u64))),
        crate::eulerprod::rat_to_f64(&local_density(p, 0, d as u64)),
        false,
    ));
    Ok(Report {
        command: format!("local-average d={d}"),
        g: None,
        rows,
        meta: Meta {
            primes: Some(primes),
            ..Meta::default()
        },
    })
}
