//! Benchmark harness: every (function, method) pair, one CSV row each.

use std::fs;
use std::io;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::Status;
use crate::pipeline::{synthesize, Method, SynthOptions};
use crate::pla::{parse_pla, PlaError, PlaTable};

pub const CSV_HEADER: &str = "function,inputs,outputs,method,qubits,gate_count,complexity,time_us,status";

/// One result line; metric fields are empty unless the status is `ok`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub function: String,
    pub inputs: usize,
    pub outputs: usize,
    pub method: Method,
    pub qubits: Option<usize>,
    pub gate_count: Option<usize>,
    pub complexity: Option<usize>,
    pub time_us: Option<u64>,
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub name: String,
    pub table: PlaTable,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: PlaError },
}

/// Loads every `*.pla` file in `dir`, sorted by file name.
pub fn load_benchmarks(dir: &Path) -> Result<Vec<Benchmark>, BenchError> {
    let io_err = |source| BenchError::Io { path: dir.display().to_string(), source };
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(io_err)?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "pla"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let shown = path.display().to_string();
            let text = fs::read_to_string(&path).map_err(|source| BenchError::Io { path: shown.clone(), source })?;
            let table = parse_pla(&text).map_err(|source| BenchError::Parse { path: shown, source })?;
            let name = path.file_stem().expect("file has a stem").to_string_lossy().into_owned();
            Ok(Benchmark { name, table })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Runs that ended in an error other than timeout or size, such as a
    /// failed verification.
    pub failures: Vec<String>,
}

/// Runs all pairs on `jobs` worker threads; rows come back sorted by
/// function name, then method.
pub fn run_bench(benchmarks: &[Benchmark], methods: &[Method], base: &SynthOptions, jobs: usize) -> BenchReport {
    let pairs: Vec<(&Benchmark, Method)> =
        benchmarks.iter().flat_map(|b| methods.iter().map(move |&m| (b, m))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    let results: Vec<Result<BenchRow, String>> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(b, method)| {
                let opts = SynthOptions { method, ..*base };
                let mut row = BenchRow {
                    function: b.name.clone(),
                    inputs: b.table.n,
                    outputs: b.table.m,
                    method,
                    qubits: None,
                    gate_count: None,
                    complexity: None,
                    time_us: None,
                    status: Status::Ok,
                };
                match synthesize(&b.table, &b.name, &opts) {
                    Ok(s) => {
                        row.qubits = Some(s.metrics.qubits);
                        row.gate_count = Some(s.metrics.gate_count);
                        row.complexity = Some(s.metrics.complexity);
                        row.time_us = Some(s.metrics.time_us);
                        Ok(row)
                    }
                    Err(e) => match e.status() {
                        Some(status) => {
                            row.status = status;
                            Ok(row)
                        }
                        None => Err(format!("{} / {}: {e}", b.name, method)),
                    },
                }
            })
            .collect()
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(msg) => failures.push(msg),
        }
    }
    rows.sort_by(|a, b| (&a.function, a.method).cmp(&(&b.function, b.method)));
    BenchReport { rows, failures }
}

pub fn write_csv<W: io::Write>(rows: &[BenchRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in rows {
        w.write_record([
            r.function.clone(),
            r.inputs.to_string(),
            r.outputs.to_string(),
            r.method.to_string(),
            opt(r.qubits.map(|v| v.to_string())),
            opt(r.gate_count.map(|v| v.to_string())),
            opt(r.complexity.map(|v| v.to_string())),
            opt(r.time_us.map(|v| v.to_string())),
            r.status.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pla::Cube;

    fn bench(name: &str, cubes: &[(&str, &str)]) -> Benchmark {
        let n = cubes[0].0.len();
        let m = cubes[0].1.len();
        let table = PlaTable::with_cubes(n, m, cubes.iter().map(|(i, o)| Cube::from_strs(i, o))).unwrap();
        Benchmark { name: name.into(), table }
    }

    #[test]
    fn rows_are_sorted_and_blank_on_failure() {
        let benches = vec![bench("zz", &[("11", "1")]), bench("aa", &[("1-1", "10"), ("0-0", "01")])];
        let base = SynthOptions { gate_limit: 1, ..SynthOptions::default() };
        let report = run_bench(&benches, &Method::ALL, &base, 2);
        assert!(report.failures.is_empty());
        let keys: Vec<(&str, Method)> = report.rows.iter().map(|r| (r.function.as_str(), r.method)).collect();
        assert_eq!(
            keys,
            vec![
                ("aa", Method::Esop),
                ("aa", Method::EsopRtt),
                ("aa", Method::Tbs),
                ("zz", Method::Esop),
                ("zz", Method::EsopRtt),
                ("zz", Method::Tbs),
            ]
        );
        let tbs = &report.rows[2];
        assert_eq!(tbs.status, Status::TooLarge);
        let mut out = Vec::new();
        write_csv(&report.rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        assert!(text.contains("aa,3,2,tbs,,,,,too_large\n"));
    }

    #[test]
    fn single_and_parallel_runs_agree() {
        let benches = vec![bench("a", &[("1-1", "10"), ("011", "01")]), bench("b", &[("10", "1")])];
        let base = SynthOptions::default();
        let strip = |mut rows: Vec<BenchRow>| {
            rows.iter_mut().for_each(|r| r.time_us = None);
            rows
        };
        let one = strip(run_bench(&benches, &Method::ALL, &base, 1).rows);
        let four = strip(run_bench(&benches, &Method::ALL, &base, 4).rows);
        assert_eq!(one, four);
    }
}
