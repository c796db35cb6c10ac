//! `dint` command line. Results go to stdout as JSON lines, diagnostics to
//! stderr. Exit status: 0 success, 1 domain error, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dint_core::detach::{classify, find_extrema, DetachConfig, ExtremumKind, SampledFunction};
use dint_core::green::{alpha_of_pattern, RectilinearDomain};
use dint_core::grid::{GridField, LatticeBox, Scalar};
use dint_core::sat::SummedAreaTable;
use dint_core::slant::{
    closed_curve_integral, decompose, slanted_integral, slanted_integral_doubled, LatticeCurve,
};
use serde_json::{json, Value};

use crate::bench::{self, CostReport};
use crate::checks::{self, Fault, Scale};
use crate::io::{self, Field, Table};

#[derive(Debug, Parser)]
#[command(name = "dint", version, about = "Discrete integration over lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Mode {
    /// Exact 64-bit integer arithmetic; the field must hold integers.
    #[arg(long, conflicts_with = "float")]
    pub exact: bool,
    /// Floating-point arithmetic.
    #[arg(long)]
    pub float: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a summed-area table from a field and write it as GRDS.
    SatBuild {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Table origin, one coordinate per axis (default all zero).
        #[arg(long, value_parser = parse_index)]
        origin: Option<Origin>,
        #[command(flatten)]
        mode: Mode,
    },
    /// Sum a field over inclusive boxes.
    #[command(group = clap::ArgGroup::new("source").required(true).args(["sat", "field"]))]
    SatQuery {
        #[arg(long)]
        sat: Option<PathBuf>,
        #[arg(long)]
        field: Option<PathBuf>,
        /// `lo:hi[,lo:hi]…`, one pair per axis; repeatable.
        #[arg(long = "box", required = true, value_parser = parse_box)]
        boxes: Vec<LatticeBox>,
        #[command(flatten)]
        mode: Mode,
    },
    /// Integrate a planar field over a union of boxes from its corners.
    Green {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        domain: PathBuf,
        #[command(flatten)]
        mode: Mode,
    },
    /// Slanted integrals along the tended segments of a lattice curve.
    Slant {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        curve: PathBuf,
        #[command(flatten)]
        mode: Mode,
    },
    /// Classify sampled points by their detachments.
    Detach {
        #[arg(long)]
        samples: PathBuf,
        /// Comma-separated abscissae, or `all` for every interior sample.
        #[arg(long, value_parser = parse_at)]
        at: At,
    },
    /// Local extrema of sampled data.
    Extrema {
        #[arg(long)]
        samples: PathBuf,
    },
    /// Time table queries against naive summation.
    Bench {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: bool,
        /// Timed samples per report (at least 100).
        #[arg(long, default_value_t = 200)]
        repetitions: usize,
        /// Length of the monotony stream.
        #[arg(long, default_value_t = 10_000_000)]
        stream: usize,
    },
    /// Run the embedded oracle suites at reduced scale.
    Selftest {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, hide = true, value_enum)]
        inject: Option<Injected>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Injected {
    CorruptAlpha,
}

#[derive(Debug, Clone, PartialEq)]
pub enum At {
    All,
    Points(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Origin(pub Vec<usize>);

fn parse_index(s: &str) -> Result<Origin, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("not an index: {t:?}"))
        })
        .collect::<Result<_, _>>()
        .map(Origin)
}

/// `lo:hi[,lo:hi]…`, inclusive.
pub fn parse_box(s: &str) -> Result<LatticeBox, String> {
    let (lo, hi) = s
        .split(',')
        .map(|pair| {
            let (a, b) = pair
                .split_once(':')
                .ok_or_else(|| format!("expected lo:hi, got {pair:?}"))?;
            let n = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("not an index: {t:?}"))
            };
            Ok((n(a)?, n(b)?))
        })
        .collect::<Result<(Vec<_>, Vec<_>), String>>()?;
    LatticeBox::new(lo, hi).map_err(|e| e.to_string())
}

fn parse_at(s: &str) -> Result<At, String> {
    if s.trim() == "all" {
        return Ok(At::All);
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {t:?}"))
        })
        .collect::<Result<_, _>>()
        .map(At::Points)
}

/// 17 significant digits: enough to recover every `f64`.
pub fn float(v: f64) -> Value {
    if v.is_finite() {
        Value::Number(format!("{v:.16e}").parse().expect("finite float text"))
    } else {
        Value::Null
    }
}

/// JSON rendering of a scalar in its own precision.
pub trait Render: Scalar {
    fn render(self) -> Value;
}

impl Render for i64 {
    fn render(self) -> Value {
        json!(self)
    }
}

impl Render for f64 {
    fn render(self) -> Value {
        float(self)
    }
}

type Outcome = Result<Vec<Value>, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Arith {
    Exact,
    Float,
}

fn arith(mode: &Mode, field: &Field) -> Arith {
    match (mode.exact, mode.float, field) {
        (true, _, _) | (false, false, Field::Int(_)) => Arith::Exact,
        _ => Arith::Float,
    }
}

/// Applies `f` to the field in the requested precision.
fn with_field<R>(
    field: &Field,
    mode: &Mode,
    f_int: impl FnOnce(&GridField<i64>) -> Result<R, String>,
    f_float: impl FnOnce(&GridField<f64>) -> Result<R, String>,
) -> Result<R, String> {
    match arith(mode, field) {
        Arith::Exact => f_int(&field.to_int().map_err(err)?),
        Arith::Float => f_float(&field.to_float()),
    }
}

fn sat_build(path: &Path, out: &Path, origin: Option<Origin>, mode: &Mode) -> Outcome {
    let field = io::load_field(path).map_err(err)?;
    let origin = origin.map_or_else(|| vec![0; field.extents().len()], |o| o.0);
    fn build<T: io::Wire + Render>(
        f: &GridField<T>,
        origin: &[usize],
        out: &Path,
        dtype: &str,
    ) -> Outcome {
        let sat = SummedAreaTable::build(f, origin).map_err(err)?;
        io::write_bytes(out, &io::encode_table(&sat).map_err(err)?).map_err(err)?;
        let total = *sat.cumulative().last().expect("nonempty table");
        Ok(vec![
            json!({"extents": sat.extents(), "origin": sat.origin(), "dtype": dtype, "total": total.render()}),
        ])
    }
    with_field(
        &field,
        mode,
        |f| build(f, &origin, out, "i64"),
        |f| build(f, &origin, out, "f64"),
    )
}

fn query_lines<T: Render>(sat: &SummedAreaTable<T>, boxes: &[LatticeBox]) -> Outcome {
    boxes
        .iter()
        .map(|b| Ok(json!({"lo": b.lo(), "hi": b.hi(), "value": sat.box_query(b).map_err(err)?.render()})))
        .collect()
}

fn sat_query(
    sat: Option<PathBuf>,
    field: Option<PathBuf>,
    boxes: &[LatticeBox],
    mode: &Mode,
) -> Outcome {
    if let Some(path) = sat {
        return match (io::load_table(&path).map_err(err)?, mode.float) {
            (Table::Int(t), false) => query_lines(&t, boxes),
            (Table::Int(t), true) => {
                let cum = t.cumulative().iter().map(|&v| v as f64).collect();
                let t = SummedAreaTable::from_cumulative(
                    t.extents().to_vec(),
                    t.origin().to_vec(),
                    cum,
                )
                .map_err(err)?;
                query_lines(&t, boxes)
            }
            (Table::Float(_), _) if mode.exact => {
                Err("table holds f64 values; --exact needs an i64 table".into())
            }
            (Table::Float(t), _) => query_lines(&t, boxes),
        };
    }
    let field = io::load_field(&field.expect("required group")).map_err(err)?;
    let origin = vec![0; field.extents().len()];
    with_field(
        &field,
        mode,
        |f| query_lines(&SummedAreaTable::build(f, &origin).map_err(err)?, boxes),
        |f| query_lines(&SummedAreaTable::build(f, &origin).map_err(err)?, boxes),
    )
}

fn planar(extents: &[usize]) -> Result<[usize; 2], String> {
    match extents {
        &[h, w] => Ok([h, w]),
        _ => Err(format!("expected a 2-D field, got {} axes", extents.len())),
    }
}

fn census(d: &RectilinearDomain) -> Value {
    let counts = d.alpha_census();
    let rows: Vec<Value> = (0u8..16)
        .filter(|&p| counts[p as usize] > 0)
        .map(|p| json!({"pattern": format!("{p:04b}"), "alpha": alpha_of_pattern(p), "count": counts[p as usize]}))
        .collect();
    Value::Array(rows)
}

fn green(field: &Path, domain: &Path, mode: &Mode) -> Outcome {
    let field = io::load_field(field).map_err(err)?;
    let d = io::load_domain(domain)
        .map_err(err)?
        .to_domain(planar(field.extents())?)
        .map_err(err)?;
    fn line<T: Render>(f: &GridField<T>, d: &RectilinearDomain) -> Outcome {
        let sat = SummedAreaTable::build(f, &[0, 0]).map_err(err)?;
        let v = d.integrate(&sat).map_err(err)?;
        Ok(vec![json!({
            "integral": v.render(),
            "cells": d.cell_count(),
            "corners": d.corners().len(),
            "census": census(d),
        })])
    }
    with_field(&field, mode, |f| line(f, &d), |f| line(f, &d))
}

fn slant(field: &Path, curve: &Path, mode: &Mode) -> Outcome {
    let field = io::load_field(field).map_err(err)?;
    planar(field.extents())?;
    let curve = io::load_curve(curve)
        .map_err(err)?
        .to_curve()
        .map_err(err)?;
    fn lines<T: Render>(f: &GridField<T>, curve: &LatticeCurve) -> Outcome {
        let sat = SummedAreaTable::build(f, &[0, 0]).map_err(err)?;
        let mut out = Vec::new();
        for (k, seg) in decompose(curve).map_err(err)?.iter().enumerate() {
            out.push(json!({
                "segment": k,
                "start": seg.start(),
                "end": seg.end(),
                "beta": seg.beta().as_i8(),
                "doubled": slanted_integral_doubled(seg, &sat).map_err(err)?.render(),
                "integral": float(slanted_integral(seg, &sat).map_err(err)?),
            }));
        }
        if curve.is_closed() {
            out.push(json!({"closed_integral": closed_curve_integral(curve, &sat).map_err(err)?.render()}));
        }
        Ok(out)
    }
    with_field(&field, mode, |f| lines(f, &curve), |f| lines(f, &curve))
}

fn detach(samples: &Path, at: &At) -> Outcome {
    let f: SampledFunction = io::load_samples(samples).map_err(err)?;
    let cfg = DetachConfig::default();
    let xs: Vec<f64> = match at {
        At::All => f.xs()[1..f.len().saturating_sub(1).max(1)].to_vec(),
        At::Points(p) => p.clone(),
    };
    xs.iter()
        .map(|&x| {
            let r = classify(&f, x, &cfg).map_err(|e| format!("at {x}: {e}"))?;
            Ok(io::report_json(&r, float(x)))
        })
        .collect()
}

fn extrema(samples: &Path) -> Outcome {
    let f = io::load_samples(samples).map_err(err)?;
    Ok(find_extrema(&f, &DetachConfig::default())
        .into_iter()
        .map(|e| {
            let kind = match e.kind {
                ExtremumKind::Min => "min",
                ExtremumKind::Max => "max",
                ExtremumKind::Plateau => "plateau",
            };
            json!({"index": e.index, "x": float(e.x), "kind": kind})
        })
        .collect())
}

fn bench_reports(seed: u64, repetitions: usize, stream: usize) -> Result<Vec<CostReport>, String> {
    let mut out = bench::bench_box_sum(
        &[vec![256, 256]],
        &[vec![64, 64], vec![1, 1]],
        repetitions,
        seed,
    )
    .map_err(err)?;
    out.extend(
        bench::bench_box_sum(&[vec![64, 64, 64]], &[vec![16, 16, 16]], repetitions, seed)
            .map_err(err)?,
    );
    let volumes = [vec![1, 1], vec![8, 8], vec![64, 64], vec![128, 128]];
    out.extend(
        bench::sat_latency_by_volume(&[256, 256], &volumes, repetitions, seed).map_err(err)?,
    );
    out.extend(bench::bench_sign_vs_quotient(stream, repetitions, seed).map_err(err)?);
    Ok(out)
}

/// Suite lines and whether all passed.
pub fn selftest(seed: u64, fault: Fault) -> (Vec<Value>, bool) {
    let s = Scale::REDUCED;
    let suites: [(&str, checks::Verdict); 4] = [
        ("sat-vs-naive", checks::sat_oracle(s.sat_cases, seed)),
        (
            "green-vs-cell-sum",
            checks::green_unions(s.green_cases, seed, fault),
        ),
        ("closed-curve", checks::slant_loops(s.loops, seed)),
        ("weather-vane", checks::weather_vane_round_trip()),
    ];
    let ok = suites.iter().all(|(_, v)| v.is_ok());
    let lines = suites
        .into_iter()
        .map(|(name, v)| match v {
            Ok(detail) => json!({"suite": name, "passed": true, "detail": detail}),
            Err(detail) => json!({"suite": name, "passed": false, "detail": detail}),
        })
        .collect();
    (lines, ok)
}

fn emit(out: &mut dyn Write, lines: &[Value]) -> std::io::Result<()> {
    for line in lines {
        writeln!(out, "{line}")?;
    }
    out.flush()
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, String> {
    let lines = match cmd {
        Command::SatBuild {
            field,
            out: dest,
            origin,
            mode,
        } => sat_build(&field, &dest, origin, &mode)?,
        Command::SatQuery {
            sat,
            field,
            boxes,
            mode,
        } => sat_query(sat, field, &boxes, &mode)?,
        Command::Green {
            field,
            domain,
            mode,
        } => green(&field, &domain, &mode)?,
        Command::Slant { field, curve, mode } => slant(&field, &curve, &mode)?,
        Command::Detach { samples, at } => detach(&samples, &at)?,
        Command::Extrema { samples } => extrema(&samples)?,
        Command::Bench {
            seed,
            csv,
            repetitions,
            stream,
        } => {
            let reports = bench_reports(seed, repetitions, stream)?;
            if csv {
                writeln!(out, "{}", CostReport::CSV_HEADER).map_err(err)?;
                for r in &reports {
                    writeln!(out, "{}", r.csv_row()).map_err(err)?;
                }
                return Ok(0);
            }
            reports
                .iter()
                .map(|r| serde_json::to_value(r).map_err(err))
                .collect::<Result<_, _>>()?
        }
        Command::Selftest { seed, inject } => {
            let fault = match inject {
                Some(Injected::CorruptAlpha) => Fault::CorruptAlpha,
                None => Fault::None,
            };
            let (lines, ok) = selftest(seed, fault);
            emit(out, &lines).map_err(err)?;
            return Ok(if ok { 0 } else { 1 });
        }
    };
    emit(out, &lines).map_err(err)?;
    Ok(0)
}

/// Parses `args` (program name first) and runs the verb.
pub fn run<I, T>(args: I, out: &mut dyn Write, diag: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(diag, "{text}")
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => {
            if code != 0 {
                let _ = writeln!(diag, "error: self-test failed");
            }
            code
        }
        Err(msg) => {
            let _ = writeln!(diag, "error: {msg}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_grammar() {
        let b = parse_box("0:3,2:5").unwrap();
        assert_eq!((b.lo(), b.hi()), (&[0, 2][..], &[3, 5][..]));
        assert!(parse_box("5:3").unwrap_err().contains("lo exceeds hi"));
        assert!(parse_box("1-2").is_err());
        assert!(parse_box("a:2").is_err());
    }

    #[test]
    fn at_grammar() {
        assert_eq!(parse_at("all").unwrap(), At::All);
        assert_eq!(parse_at("0,0.5").unwrap(), At::Points(vec![0.0, 0.5]));
        assert!(parse_at("x").is_err());
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(float(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(float(-2.0).to_string(), "-2.0000000000000000e+0");
        let back: f64 = float(std::f64::consts::PI).to_string().parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
        assert_eq!(float(f64::NAN), Value::Null);
    }

    #[test]
    fn usage_errors_exit_two() {
        let mut out = Vec::new();
        let mut diag = Vec::new();
        assert_eq!(
            run(["dint", "sat-query", "--box", "5:3"], &mut out, &mut diag),
            2
        );
        assert!(String::from_utf8_lossy(&diag).contains("lo exceeds hi"));
        diag.clear();
        assert_eq!(run(["dint", "green", "--bogus"], &mut out, &mut diag), 2);
        assert!(String::from_utf8_lossy(&diag).contains("--bogus"));
        assert_eq!(run(["dint"], &mut out, &mut diag), 2);
    }
}
