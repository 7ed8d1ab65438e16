use std::fs;
use std::io::{self, Write};

use markoff::analytics::{
    cage_stats, components_of, correlation, experiment_campaign, param_check, primes_in, sample_walk,
    spectrum_moments_of, write_analytics_csv, write_bench_csv, AnalyticsError, CampaignConfig,
};
use markoff::enumerate::{enumerate_surface, expected_vertex_count};
use markoff::field::PrimeModulus;
use markoff::hash::{digest_encode, hash_bits, BitString, HashError, HashField, HashParams};
use markoff::lifting::{descend, lift_path_attack, search_lift, LiftError, SignJoin};
use markoff::parse::{parse_big_prime, parse_integer_triple, parse_prime, parse_triple, parse_u64, ParseError};
use markoff::pathfinder::{verify_path, ClimbPolicy, PathCertificate, PathError, PathFinder, ScanMode, CERTIFICATE_VERSION};
use markoff::rotation::RotationOrders;
use markoff::surface::GraphKind;
use serde_json::json;
use thiserror::Error;

use crate::{Cli, Command, Graph};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(e.to_string())
    }
}

macro_rules! domain_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.to_string())
            }
        }
    )*};
}
domain_errors!(PathError, LiftError, AnalyticsError, markoff::enumerate::EnumerationError, markoff::rotation::RotationError, csv::Error);

impl From<HashError> for CliError {
    fn from(e: HashError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<Graph> for GraphKind {
    fn from(g: Graph) -> Self {
        match g {
            Graph::G => GraphKind::G,
            Graph::Ghat => GraphKind::GHat,
        }
    }
}

fn mode(greedy: bool) -> ScanMode {
    if greedy {
        ScanMode::Greedy
    } else {
        ScanMode::FullOrbit
    }
}

fn json_line(value: &impl serde::Serialize) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("output serializes");
    out.push(b'\n');
    out
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let output = execute(cli.command)?;
    match cli.out {
        Some(path) => fs::write(path, output)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(&output)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn execute(command: Command) -> Result<Vec<u8>, CliError> {
    match command {
        Command::Hash { p, k, start, bits, file } => {
            let input = match (bits, file) {
                (Some(b), _) => BitString::parse(&b)?,
                (None, Some(path)) => BitString::from_bytes(&fs::read(path)?),
                (None, None) => unreachable!("clap requires one input"),
            };
            // word-sized moduli take the fast path
            let digest = match parse_u64(&p).ok().and_then(|n| PrimeModulus::new(n).ok()) {
                Some(field) => hash_with(field, k, start.as_deref(), &input, parse_u64)?,
                None => hash_with(parse_big_prime(&p)?, k, start.as_deref(), &input, |s| {
                    markoff::parse::parse_biguint(s)
                })?,
            };
            Ok(format!("{digest}\n").into_bytes())
        }
        Command::FindPath { p, from, to, graph, greedy, random_coords, seed } => {
            let p = parse_prime(&p.p)?;
            let (x, y) = (parse_triple(&from, &p)?, parse_triple(&to, &p)?);
            let policy = if random_coords {
                ClimbPolicy::randomized(mode(greedy), seed)
            } else {
                ClimbPolicy {
                    mode: mode(greedy),
                    ..ClimbPolicy::default()
                }
            };
            let cert = PathFinder::new(&p)?.find_path(&x, &y, graph.into(), &policy)?;
            Ok(format!("{}\n", cert.to_json_pretty()).into_bytes())
        }
        Command::VerifyPath { cert } => {
            let text = fs::read_to_string(cert)?;
            let c = PathCertificate::from_json(&text).map_err(|e| CliError::Domain(e.to_string()))?;
            match verify_path(&c) {
                Ok(()) => Ok(json_line(&json!({
                    "schema_version": CERTIFICATE_VERSION,
                    "valid": true,
                    "p": c.p,
                    "graph": c.graph,
                    "length": c.len(),
                }))),
                Err(f) => Err(CliError::Domain(format!("certificate rejected at index {}: {}", f.index, f.reason))),
            }
        }
        Command::BenchBgs { pmin, pmax, trials, seed, greedy, graph, timing } => {
            let config = CampaignConfig {
                trials,
                seed,
                timing,
                graph: graph.into(),
                mode: mode(greedy),
                components: false,
                moment_orders: Vec::new(),
                ..CampaignConfig::default()
            };
            let records = experiment_campaign(&primes_in(pmin, pmax), &config);
            let mut out = Vec::new();
            write_bench_csv(&records, &mut out)?;
            report_row_errors(&records);
            Ok(out)
        }
        Command::Descend { triple } => {
            let t = parse_integer_triple(&triple)?;
            let d = descend(&t)?;
            Ok(json_line(&json!({
                "schema_version": CERTIFICATE_VERSION,
                "source": d.source,
                "moves": d.moves,
                "chain": d.chain,
                "terminal": d.terminal,
            })))
        }
        Command::Lift { p, target, bound, require_success } => {
            let p = parse_prime(&p.p)?;
            let t = parse_triple(&target, &p)?;
            let lift = search_lift(&t, &p, bound);
            if lift.is_none() && require_success {
                return Err(CliError::Domain(format!("no lift of {t} with coordinates up to {bound}")));
            }
            Ok(json_line(&json!({
                "schema_version": CERTIFICATE_VERSION,
                "p": p.get(),
                "target": t,
                "bound": bound.to_string(),
                "lift": lift,
            })))
        }
        Command::LiftAttack { p, from, to, bound, require_success } => {
            let p = parse_prime(&p.p)?;
            let (x, y) = (parse_triple(&from, &p)?, parse_triple(&to, &p)?);
            let join = SignJoin::new(&p)?;
            match lift_path_attack(&x, &y, &p, bound, &join)? {
                Some(cert) => Ok(format!("{}\n", cert.to_json_pretty()).into_bytes()),
                None if require_success => Err(CliError::Domain(format!(
                    "no lift of both endpoints with coordinates up to {bound}"
                ))),
                None => Ok(json_line(&json!({
                    "schema_version": CERTIFICATE_VERSION,
                    "p": p.get(),
                    "start": x,
                    "end": y,
                    "found": false,
                }))),
            }
        }
        Command::Enumerate { p, graph, summary } => {
            let p = parse_prime(&p.p)?;
            let e = enumerate_surface(&p)?;
            if summary {
                let comps = components_of(&e, graph.into());
                return Ok(json_line(&json!({
                    "schema_version": CERTIFICATE_VERSION,
                    "p": p.get(),
                    "vertex_count": e.len(),
                    "expected_vertex_count": expected_vertex_count(&p),
                    "graph": GraphKind::from(graph),
                    "component_count": comps.count,
                })));
            }
            let mut out = Vec::new();
            e.write_adjacency(graph.into(), &mut out)?;
            Ok(out)
        }
        Command::Orders { p, orbit, index } => {
            let p = parse_prime(&p.p)?;
            let orders = RotationOrders::new(&p)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            match orbit {
                Some(t) => {
                    let t = parse_triple(&t, &p)?;
                    w.write_record(["step", "x1", "x2", "x3"])?;
                    for (s, u) in orders.orbit(&t, index)?.iter().enumerate() {
                        w.serialize((s, u.0[0], u.0[1], u.0[2]))?;
                    }
                }
                None => {
                    w.write_record(["element", "order", "type", "maximal"])?;
                    for row in orders.order_table() {
                        w.serialize((row.element, row.order, row.class.name(), row.maximal))?;
                    }
                }
            }
            finish_csv(w)
        }
        Command::Cage { p } => {
            let p = parse_prime(&p.p)?;
            let s = cage_stats(&p)?;
            Ok(json_line(&json!({
                "schema_version": CERTIFICATE_VERSION,
                "p": s.p,
                "vertex_count": s.vertex_count,
                "cage_size": s.cage_size,
                "proportion": s.proportion,
            })))
        }
        Command::Analyze { pmin, pmax, trials, seed, timing, lmax } => {
            let config = CampaignConfig {
                trials,
                seed,
                timing,
                moment_orders: (2..=lmax).step_by(2).collect(),
                ..CampaignConfig::default()
            };
            let records = experiment_campaign(&primes_in(pmin, pmax), &config);
            let mut out = Vec::new();
            write_analytics_csv(&records, &mut out)?;
            report_row_errors(&records);
            let (xs, ys): (Vec<f64>, Vec<f64>) = records
                .iter()
                .filter_map(|r| Some(((r.eta_p? as f64).ln(), r.cage_proportion?)))
                .unzip();
            if let Some(c) = correlation(&xs, &ys) {
                eprintln!("correlation(ln eta_p, cage_proportion) = {c:.6}");
            }
            Ok(out)
        }
        Command::Spectrum { p, lmax, seed, samples } => {
            let p = parse_prime(&p.p)?;
            let e = enumerate_surface(&p)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["L", "graph_moment", "km_moment", "std_error"])?;
            for row in spectrum_moments_of(&e, lmax, seed, samples) {
                w.serialize((row.l, row.graph_moment, row.km_moment, row.std_error))?;
            }
            finish_csv(w)
        }
        Command::Sample { p, length, trials, seed } => {
            let p = parse_prime(&p.p)?;
            let orders = RotationOrders::new(&p)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["trial", "x1", "x2", "x3", "in_cage"])?;
            for t in 0..trials {
                let walk = sample_walk(&p, length, markoff::pathfinder::mix_seed(seed, &[t]));
                let v = walk.last().expect("walk holds its start");
                w.serialize((t, v.0[0], v.0[1], v.0[2], orders.in_cage(v)))?;
            }
            finish_csv(w)
        }
        Command::ParamCheck { p } => {
            let p = parse_prime(&p.p)?;
            let r = param_check(&p)?;
            let mut doc = serde_json::to_value(&r).expect("report serializes");
            doc["schema_version"] = json!(CERTIFICATE_VERSION);
            Ok(json_line(&doc))
        }
    }
}

fn hash_with<F: HashField + Clone, E>(
    field: F,
    k: u8,
    start: Option<&str>,
    input: &BitString,
    parse_coord: impl Fn(&str) -> Result<E, ParseError>,
) -> Result<String, CliError>
where
    F::Elem: From<E>,
{
    let params = match start {
        None => HashParams::new(field.clone(), k)?,
        Some(s) => {
            let parts: Vec<&str> = s.split(',').collect();
            let coords: [&str; 3] = parts
                .try_into()
                .map_err(|_| CliError::Usage(format!("expected three comma-separated values, got {s:?}")))?;
            let [a, b, c] = coords.map(|x| parse_coord(x).map(F::Elem::from));
            HashParams::with_start(field.clone(), k, [a?, b?, c?])?
        }
    };
    let out = hash_bits(input, &params);
    if out.short_input {
        eprintln!(
            "warning: input has {} bits, below the minimum walk of {}",
            input.len(),
            params.min_walk()
        );
    }
    Ok(digest_encode(&field, &out.vertex))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, CliError> {
    w.into_inner().map_err(|e| CliError::Domain(e.to_string()))
}

fn report_row_errors(records: &[markoff::analytics::AnalyticsRecord]) {
    for r in records {
        if let Some(e) = &r.error {
            eprintln!("warning: p = {}: {e}", r.p);
        }
    }
}
