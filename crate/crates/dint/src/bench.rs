//! Wall-clock cost comparisons.
//!
//! Every pair of contenders is first run over the same inputs and their
//! answers compared; only then is anything timed. Timing is single-threaded,
//! the first tenth of the samples is discarded as warmup.

use std::hint::black_box;
use std::time::Instant;

use dint_core::grid::{naive_box_sum, GridError, GridField, LatticeBox};
use dint_core::sat::{SatError, SummedAreaTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

pub const MIN_SAMPLES: usize = 100;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("empty stream")]
    EmptyStream,
    #[error("need at least {MIN_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
    #[error("box {boxed:?} does not fit field {field:?}")]
    BoxTooLarge {
        field: Vec<usize>,
        boxed: Vec<usize>,
    },
    #[error("contenders disagree on {0}")]
    Mismatch(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Sat(#[from] SatError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub label: String,
    pub samples: usize,
    pub median_ns: f64,
    pub p10_ns: f64,
    pub p90_ns: f64,
    /// Baseline median over this median.
    pub ratio: Option<f64>,
    pub baseline: Option<String>,
}

impl CostReport {
    pub const CSV_HEADER: &'static str = "label,samples,median_ns,p10_ns,p90_ns,ratio,baseline";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.label,
            self.samples,
            self.median_ns,
            self.p10_ns,
            self.p90_ns,
            self.ratio.map_or(String::new(), |r| r.to_string()),
            self.baseline.as_deref().unwrap_or("")
        )
    }

    fn against(mut self, baseline: &CostReport) -> Self {
        self.ratio = Some(baseline.median_ns / self.median_ns);
        self.baseline = Some(baseline.label.clone());
        self
    }
}

/// Nearest-rank percentile of sorted data.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let rank = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Times `samples` batches of `batch` calls and reports per-call latency.
/// `f` receives a running call count.
pub fn measure<R>(
    label: &str,
    samples: usize,
    batch: usize,
    mut f: impl FnMut(usize) -> R,
) -> Result<CostReport, BenchError> {
    if samples < MIN_SAMPLES {
        return Err(BenchError::TooFewSamples(samples));
    }
    let warmup = samples / 10;
    let mut times = Vec::with_capacity(samples);
    let mut calls = 0;
    for s in 0..warmup + samples {
        let start = Instant::now();
        for _ in 0..batch {
            black_box(f(black_box(calls)));
            calls += 1;
        }
        let ns = start.elapsed().as_nanos() as f64 / batch as f64;
        if s >= warmup {
            times.push(ns);
        }
    }
    Ok(summarise(label, times))
}

fn summarise(label: &str, mut times: Vec<f64>) -> CostReport {
    times.sort_by(f64::total_cmp);
    CostReport {
        label: label.to_string(),
        samples: times.len(),
        median_ns: percentile(&times, 0.5),
        p10_ns: percentile(&times, 0.1),
        p90_ns: percentile(&times, 0.9),
        ratio: None,
        baseline: None,
    }
}

fn dims(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

/// Random boxes of the given size inside `extents`.
fn boxes_of(
    rng: &mut ChaCha8Rng,
    extents: &[usize],
    size: &[usize],
    count: usize,
) -> Result<Vec<LatticeBox>, BenchError> {
    if size.len() != extents.len() || size.iter().zip(extents).any(|(&s, &e)| s == 0 || s > e) {
        return Err(BenchError::BoxTooLarge {
            field: extents.to_vec(),
            boxed: size.to_vec(),
        });
    }
    (0..count)
        .map(|_| {
            let lo: Vec<usize> = size
                .iter()
                .zip(extents)
                .map(|(&s, &e)| rng.random_range(0..=e - s))
                .collect();
            let hi = lo.iter().zip(size).map(|(&l, &s)| l + s - 1).collect();
            Ok(LatticeBox::new(lo, hi)?)
        })
        .collect()
}

const QUERIES: usize = 64;

struct QuerySet {
    field: GridField<i64>,
    sat: SummedAreaTable<i64>,
    boxes: Vec<LatticeBox>,
}

fn query_set(extents: &[usize], size: &[usize], seed: u64) -> Result<QuerySet, BenchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = GridField::from_fn(extents.to_vec(), |_| rng.random_range(-1000..=1000))?;
    let sat = SummedAreaTable::build(&field, &vec![0; extents.len()])?;
    let boxes = boxes_of(&mut rng, extents, size, QUERIES)?;
    for b in &boxes {
        if sat.box_query(b)? != naive_box_sum(&field, b)? {
            return Err(BenchError::Mismatch(format!(
                "box {:?}..{:?}",
                b.lo(),
                b.hi()
            )));
        }
    }
    Ok(QuerySet { field, sat, boxes })
}

/// One query per sample, cycling through the query set.
fn sat_side(q: &QuerySet, label: &str, samples: usize) -> Result<CostReport, BenchError> {
    measure(label, samples, 1, |k| {
        q.sat.box_query(&q.boxes[k % q.boxes.len()])
    })
}

/// Paired SAT and naive timings for every field/box pair of matching rank.
/// Each pair yields the naive report followed by the SAT report, whose
/// `ratio` is the speedup.
pub fn bench_box_sum(
    field_sizes: &[Vec<usize>],
    box_sizes: &[Vec<usize>],
    repetitions: usize,
    seed: u64,
) -> Result<Vec<CostReport>, BenchError> {
    let mut out = Vec::new();
    for extents in field_sizes {
        for size in box_sizes.iter().filter(|s| s.len() == extents.len()) {
            let q = query_set(extents, size, seed)?;
            let tag = format!("{} box {}", dims(extents), dims(size));
            let naive = measure(&format!("naive {tag}"), repetitions, 1, |k| {
                naive_box_sum(&q.field, &q.boxes[k % q.boxes.len()])
            })?;
            let sat = sat_side(&q, &format!("sat {tag}"), repetitions)?.against(&naive);
            out.push(naive);
            out.push(sat);
        }
    }
    Ok(out)
}

/// SAT query latency for several box sizes on one field. The sizes are
/// timed round-robin, one query each per round, so clock and load drift
/// lands on every size alike.
pub fn sat_latency_by_volume(
    extents: &[usize],
    box_sizes: &[Vec<usize>],
    repetitions: usize,
    seed: u64,
) -> Result<Vec<CostReport>, BenchError> {
    if repetitions < MIN_SAMPLES {
        return Err(BenchError::TooFewSamples(repetitions));
    }
    let sets = box_sizes
        .iter()
        .map(|size| query_set(extents, size, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let warmup = repetitions / 10;
    let mut times = vec![Vec::with_capacity(repetitions); sets.len()];
    for round in 0..warmup + repetitions {
        for (q, t) in sets.iter().zip(&mut times) {
            let b = &q.boxes[round % q.boxes.len()];
            let start = Instant::now();
            black_box(q.sat.box_query(black_box(b)))?;
            let ns = start.elapsed().as_nanos() as f64;
            if round >= warmup {
                t.push(ns);
            }
        }
    }
    Ok(box_sizes
        .iter()
        .zip(times)
        .map(|(size, t)| summarise(&format!("sat {} box {}", dims(extents), dims(size)), t))
        .collect())
}

/// True when all p10–p90 ranges share a common point.
pub fn ranges_overlap(reports: &[CostReport]) -> bool {
    let lo = reports
        .iter()
        .map(|r| r.p10_ns)
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = reports
        .iter()
        .map(|r| r.p90_ns)
        .fold(f64::INFINITY, f64::min);
    lo <= hi
}

fn sign_pass(ys: &[f64]) -> i64 {
    ys.windows(2)
        .map(|w| (w[1] - w[0]).signum() as i64 * i64::from(w[1] != w[0]))
        .sum()
}

fn quotient_pass(xs: &[f64], ys: &[f64]) -> i64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| {
            let q = (y[1] - y[0]) / (x[1] - x[0]);
            q.signum() as i64 * i64::from(q != 0.0)
        })
        .sum()
}

/// Per-point monotony probing over a stream of `len` samples: the sign of
/// each increment against the sign of each difference quotient. Returns the
/// quotient report and the sign report, whose `ratio` is the speedup.
pub fn bench_sign_vs_quotient(
    len: usize,
    repetitions: usize,
    seed: u64,
) -> Result<Vec<CostReport>, BenchError> {
    if len == 0 {
        return Err(BenchError::EmptyStream);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = 0.0;
    let xs: Vec<f64> = (0..len)
        .map(|_| {
            x += rng.random_range(0.5..1.5);
            x
        })
        .collect();
    let ys: Vec<f64> = (0..len)
        .map(|_| f64::from(rng.random_range(-4i32..=4)))
        .collect();
    if sign_pass(&ys) != quotient_pass(&xs, &ys) {
        return Err(BenchError::Mismatch("monotony stream".into()));
    }
    let per_point = |ns: CostReport| {
        let scale = 1.0 / len.max(2).saturating_sub(1) as f64;
        CostReport {
            median_ns: ns.median_ns * scale,
            p10_ns: ns.p10_ns * scale,
            p90_ns: ns.p90_ns * scale,
            ..ns
        }
    };
    let quotient = per_point(measure(
        &format!("quotient stream {len}"),
        repetitions,
        1,
        |_| quotient_pass(&xs, &ys),
    )?);
    let sign = per_point(measure(
        &format!("sign stream {len}"),
        repetitions,
        1,
        |_| sign_pass(&ys),
    )?)
    .against(&quotient);
    Ok(vec![quotient, sign])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentiles_are_ordered() {
        let mut calls = 0;
        let mut last = 0;
        let r = measure("spin", 100, 3, |k| {
            calls += 1;
            last = k;
            (0..k * 50).sum::<usize>()
        })
        .unwrap();
        assert_eq!((calls, last), (330, 329));
        assert!(r.p10_ns <= r.median_ns && r.median_ns <= r.p90_ns);
        assert!(matches!(
            measure("x", 99, 1, |_| ()),
            Err(BenchError::TooFewSamples(99))
        ));
    }

    #[test]
    fn nearest_rank() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(percentile(&v, 0.1), 1.0);
        assert_eq!(percentile(&v, 0.5), 5.0);
        assert_eq!(percentile(&v, 0.9), 9.0);
    }

    #[test]
    fn empty_stream() {
        assert_eq!(
            bench_sign_vs_quotient(0, 100, 1).unwrap_err().to_string(),
            "empty stream"
        );
    }

    #[test]
    fn oversized_box() {
        assert!(matches!(
            bench_box_sum(&[vec![4, 4]], &[vec![5, 1]], 100, 0),
            Err(BenchError::BoxTooLarge { .. })
        ));
    }

    #[test]
    fn passes_agree() {
        let xs = [0.0, 1.0, 1.5, 4.0];
        let ys = [2.0, 2.0, -1.0, 3.0];
        assert_eq!(sign_pass(&ys), 0);
        assert_eq!(quotient_pass(&xs, &ys), 0);
    }
}
