use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use ternrec_core::arith::sieve::{prime_count, SegmentedPrimes};
use ternrec_core::charpoly::{check_conditions, solve_exponents};
use ternrec_core::experiments::{self, ExperimentReport};
use ternrec_core::modular::profile_any;
use ternrec_core::recurrence::{validate_presets, Preset};
use ternrec_core::representation::count_range_with;
use ternrec_core::{Error, Result};

use crate::config::{resolve, resolve_threads, Format, Overrides, RunConfig};
use crate::{Command, EXIT_BUDGET, EXIT_FAIL, EXIT_INPUT, EXIT_OK};

pub const SCHEMA_VERSION: &str = "1";
const PRIME_CHUNK: usize = 4096;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } => EXIT_BUDGET,
        _ => EXIT_INPUT,
    }
}

pub fn run(command: Command, threads: Option<usize>) -> u8 {
    if let Err(e) = validate_presets() {
        eprintln!("error: {e}");
        return EXIT_INPUT;
    }
    match dispatch(command, threads) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn dispatch(command: Command, threads: Option<usize>) -> Result<u8> {
    match command {
        Command::Analyze { seq } => {
            let cfg = resolve(&seq, Overrides { threads, ..Default::default() }, None)?;
            analyze(&cfg)
        }
        Command::Primes { seq, p_max, out, format } => {
            let over = Overrides { threads, output: out, format, ..Default::default() };
            let cfg = resolve(&seq, over, None)?;
            in_pool(cfg.threads, || primes(&cfg, p_max))?
        }
        Command::Count { seq, x, n_exact, out, summary, format } => {
            let over = Overrides { x, n_exact, threads, output: out, format };
            let cfg = resolve(&seq, over, Some(Preset::Tribonacci))?;
            in_pool(cfg.threads, || count(&cfg, summary.as_deref()))?
        }
        Command::Verify { experiment, seq, params } => {
            let params = parse_params(&params)?;
            // spec-free experiments ignore the sequence
            let default = Some(Preset::Tribonacci);
            let cfg = resolve(&seq, Overrides { threads, ..Default::default() }, default)?;
            in_pool(cfg.threads, || verify(&cfg, &experiment, &params))?
        }
        Command::Constants { json } => {
            resolve_threads(threads, None)?;
            constants(json)
        }
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::invalid(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::invalid(format!("write failed: {e}"))
}

fn with_schema(value: impl Serialize) -> Value {
    let mut v = serde_json::to_value(value).expect("serializable");
    if let Value::Object(map) = &mut v {
        map.insert("schema_version".into(), SCHEMA_VERSION.into());
    }
    v
}

fn analyze(cfg: &RunConfig) -> Result<u8> {
    let a = check_conditions(&cfg.spec)?;
    println!("{}", serde_json::to_string_pretty(&with_schema(&a)).expect("json"));
    if a.all_conditions_hold() {
        Ok(EXIT_OK)
    } else {
        for reason in a.failures() {
            eprintln!("condition {reason}");
        }
        Ok(EXIT_FAIL)
    }
}

/// Writes rows as CSV with a header, or as one JSON array.
struct RowSink {
    format: Format,
    csv: Option<csv::Writer<Box<dyn Write>>>,
    json: Option<(Box<dyn Write>, bool)>,
}

impl RowSink {
    fn new(format: Format, out: Box<dyn Write>, header: &[&str]) -> Result<Self> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
                w.write_record(header).map_err(io_err)?;
                Ok(RowSink { format, csv: Some(w), json: None })
            }
            Format::Json => {
                let mut out = out;
                out.write_all(b"[").map_err(io_err)?;
                Ok(RowSink { format, csv: None, json: Some((out, true)) })
            }
        }
    }

    fn row(&mut self, fields: Vec<String>, value: impl Serialize) -> Result<()> {
        match self.format {
            Format::Csv => self.csv.as_mut().unwrap().write_record(&fields).map_err(io_err),
            Format::Json => {
                let (out, first) = self.json.as_mut().unwrap();
                if !*first {
                    out.write_all(b",").map_err(io_err)?;
                }
                *first = false;
                out.write_all(b"\n").map_err(io_err)?;
                serde_json::to_writer(&mut *out, &value).map_err(io_err)
            }
        }
    }

    fn finish(self) -> Result<()> {
        if let Some(mut w) = self.csv {
            w.flush().map_err(io_err)?;
        }
        if let Some((mut out, _)) = self.json {
            out.write_all(b"\n]\n").map_err(io_err)?;
            out.flush().map_err(io_err)?;
        }
        Ok(())
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn primes(cfg: &RunConfig, p_max: u64) -> Result<u8> {
    cfg.spec.ensure_ternary()?;
    let header = ["p", "root_count", "in_Z", "alpha", "t_p", "k_p", "ord_alpha", "ord_ratio", "mult_order"];
    let mut sink = RowSink::new(cfg.format, open_output(cfg.output.as_deref())?, &header)?;
    let mut z = 0u64;
    let mut failure = None;
    if p_max >= 3 {
        let all: Vec<u64> = SegmentedPrimes::new(2, p_max).collect();
        'chunks: for chunk in all.chunks(PRIME_CHUNK) {
            let profiles: Vec<Result<_>> = chunk.par_iter().map(|&p| profile_any(&cfg.spec, p)).collect();
            for pr in profiles {
                match pr {
                    Ok(pr) => {
                        z += pr.in_z as u64;
                        let fields = vec![
                            pr.p.to_string(),
                            pr.root_count.to_string(),
                            pr.in_z.to_string(),
                            opt(pr.alpha),
                            opt(pr.t_p),
                            opt(pr.k_p),
                            opt(pr.ord_alpha),
                            opt(pr.ord_ratio),
                            opt(pr.mult_order),
                        ];
                        sink.row(fields, &pr)?;
                    }
                    Err(e) => {
                        failure = Some(e);
                        break 'chunks;
                    }
                }
            }
        }
    }
    sink.finish()?;
    let pi = prime_count(p_max);
    let ratio = if pi == 0 { 0.0 } else { z as f64 / pi as f64 };
    eprintln!("Z({p_max}) = {z}, pi({p_max}) = {pi}, ratio = {ratio:.6}");
    match failure {
        Some(e) => Err(e),
        None => Ok(EXIT_OK),
    }
}

fn count(cfg: &RunConfig, summary_path: Option<&Path>) -> Result<u8> {
    let x = cfg.x.ok_or_else(|| Error::invalid("--x is required"))?;
    let started = Instant::now();
    let report = count_range_with(&cfg.spec, x, cfg.n_exact, &cfg.represent())?;
    let mut sink = RowSink::new(
        cfg.format,
        open_output(cfg.output.as_deref())?,
        &["n", "status", "u", "v", "obstruction_p"],
    )?;
    for rec in &report.records {
        let row = rec.row();
        let fields = vec![
            row.n.to_string(),
            row.status.to_string(),
            opt(row.u.as_ref()),
            opt(row.v.as_ref()),
            opt(row.obstruction_p),
        ];
        sink.row(fields, &row)?;
    }
    sink.finish()?;
    let mut summary = with_schema(&report);
    summary["wall_time_s"] = json!(started.elapsed().as_secs_f64());
    summary["threads"] = json!(cfg.threads);
    let text = serde_json::to_string_pretty(&summary).expect("json");
    match summary_path {
        Some(p) => std::fs::write(p, text + "\n").map_err(io_err)?,
        None => eprintln!("{text}"),
    }
    Ok(EXIT_OK)
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, String>> {
    raw.iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().replace('-', "_"), v.trim().to_string()))
                .ok_or_else(|| Error::invalid(format!("parameter {kv:?} is not key=value")))
        })
        .collect()
}

struct Params<'a>(&'a BTreeMap<String, String>);

impl Params<'_> {
    fn get<T: std::str::FromStr>(&self, key: &str, default: Option<T>) -> Result<T> {
        match self.0.get(key) {
            Some(s) => s
                .parse()
                .map_err(|_| Error::invalid(format!("parameter {key}={s:?} has the wrong type"))),
            None => default.ok_or_else(|| Error::invalid(format!("missing parameter {key}"))),
        }
    }

    fn opt<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.0.get(key).map(|_| self.get(key, None)).transpose()
    }
}

/// Report for an exact count, passing iff it equals `expected` when given.
fn count_report(name: &str, params: &BTreeMap<String, String>, value: u64, expected: Option<u64>) -> ExperimentReport {
    let mut violations = Vec::new();
    if let Some(want) = expected {
        if want != value {
            violations.push(json!({"expected": want, "got": value}));
        }
    }
    ExperimentReport {
        name: name.to_string(),
        parameters: params.iter().map(|(k, v)| (k.clone(), json!(v))).collect(),
        observations: vec![experiments::Observation {
            label: "count".into(),
            value: value as f64,
        }],
        pass: violations.is_empty(),
        violations,
    }
}

fn verify(cfg: &RunConfig, name: &str, raw: &BTreeMap<String, String>) -> Result<u8> {
    let p = Params(raw);
    let spec = &cfg.spec;
    let report = match name {
        "z-density" => experiments::z_density_with(
            spec,
            p.get("x", Some(1_000_000))?,
            p.get("tolerance", Some(experiments::DEFAULT_DENSITY_TOLERANCE))?,
        )?,
        "lemma5" => experiments::lemma5_sweep(spec, p.get("p_min", Some(101))?, p.get("p_max", Some(100_000))?)?,
        "multipliers" => experiments::multiplier_sweep(spec, p.get("p_min", Some(3))?, p.get("p_max", Some(10_000))?)?,
        "beukers" => experiments::beukers_zero_count(spec, p.get("n_max", Some(500))?)?,
        "beukers-random" => experiments::beukers_random(
            p.get("samples", Some(1000))?,
            p.get("bound", Some(5))?,
            p.get("n_max", Some(500))?,
            p.get("seed", Some(1))?,
        )?,
        "char-sums" => experiments::char_sum_sweep_with(spec, p.get("p_max", Some(1000))?, cfg.scan_states)?,
        "smooth" => {
            let v = experiments::smooth_count(p.get("x", None)?, p.get("y", None)?)?;
            count_report("smooth", raw, v, p.opt("expected")?)
        }
        "divisor-interval" => {
            let v = experiments::divisor_interval_count(p.get("x", None)?, p.get("y", None)?, p.get("z", None)?)?;
            count_report("divisor_interval", raw, v, p.opt("expected")?)
        }
        "shifted-prime" => {
            let v = experiments::shifted_prime_count(
                p.get("x", None)?,
                p.get("y", None)?,
                p.get("z", None)?,
                p.get("lam", None)?,
            )?;
            count_report("shifted_prime", raw, v, p.opt("expected")?)
        }
        "omega-iz" => {
            let v = experiments::omega_iz(spec, p.get("n", None)?, p.get("z3", None)?, p.get("y2", None)?)?;
            count_report("omega_iz", raw, v, p.opt("expected")?)
        }
        "counterexample" => {
            let preset = Preset::identify(spec)
                .ok_or_else(|| Error::invalid("counterexample needs a preset sequence"))?;
            experiments::counterexample_density(preset, p.get("x", Some(1000))?)?
        }
        "theorem-shape" => {
            let xs: Vec<u64> = p
                .get("xs", Some("1000,10000,100000".to_string()))?
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| Error::invalid(format!("bad x value {s:?}"))))
                .collect::<Result<_>>()?;
            experiments::upper_density_trend(spec, &xs, p.get("n_exact", Some(cfg.n_exact))?, p.get("threshold", Some(0.6))?)?
        }
        other => return Err(Error::invalid(format!("unknown experiment {other:?}"))),
    };
    println!("{}", serde_json::to_string_pretty(&with_schema(&report)).expect("json"));
    eprintln!("{}", report.summary());
    Ok(if report.pass { EXIT_OK } else { EXIT_FAIL })
}

/// `x` rounded to 7 significant digits.
fn sig7(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let decimals = (6 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

fn constants(as_json: bool) -> Result<u8> {
    let e = solve_exponents()?;
    let c = 20.0 / (e.kappa * e.kappa);
    if as_json {
        let mut v = with_schema(&e);
        v["kappa_delta"] = json!(e.kappa * e.delta);
        v["c"] = json!(c);
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        return Ok(EXIT_OK);
    }
    println!("delta = {}", sig7(e.delta));
    println!("kappa = {}", sig7(e.kappa));
    println!("lambda = {}", sig7(e.lambda));
    println!("kappa*delta = {}", sig7(e.kappa * e.delta));
    println!("exponent = {}", sig7(e.exponent));
    println!(
        "lambda (published) = {}, deviation = {:.1e}",
        e.lambda_published,
        (e.lambda - e.lambda_published).abs()
    );
    println!("c = 20/kappa^2 = {}", sig7(c));
    Ok(EXIT_OK)
}

