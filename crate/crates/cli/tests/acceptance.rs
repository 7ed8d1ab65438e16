//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Oracles here are written independently of the library.

use std::collections::{HashMap, HashSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use markoff::analytics::{components_of, regression_slope, spectrum_moments};
use markoff::enumerate::enumerate_surface;
use markoff::field::PrimeModulus;
use markoff::hash::{hash_bits, hash_bits_traced, BitString, HashParams};
use markoff::lifting::{conjecture_report, descend, lift_path_attack, tree_enumerate, IntegerTriple, SignJoin};
use markoff::pathfinder::{random_vertex, verify_path, ClimbPolicy, PathCertificate, PathFinder};
use markoff::surface::{GraphKind, MarkoffTriple, MoveKind};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn small_primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| n > 1 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect()
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_markoff"))
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = binary().args(args).output().expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

/// Surface arithmetic written out longhand.
mod oracle {
    pub fn on_surface(p: u64, t: [u64; 3]) -> bool {
        let m = |a: u64, b: u64| (a as u128 * b as u128 % p as u128) as u64;
        let [a, b, c] = t;
        t != [0, 0, 0]
            && t.iter().all(|&x| x < p)
            && (m(a, a) + m(b, b) + m(c, c)) % p == m(m(3, a), m(b, c))
    }

    fn vieta(p: u64, a: u64, b: u64, c: u64) -> u64 {
        let prod = 3 * (a as u128) * (b as u128) % p as u128;
        ((prod + p as u128 - c as u128) % p as u128) as u64
    }

    pub fn involution(p: u64, t: [u64; 3], i: usize) -> [u64; 3] {
        let mut out = t;
        out[i] = vieta(p, t[(i + 1) % 3], t[(i + 2) % 3], t[i]);
        out
    }

    pub fn rotation(p: u64, t: [u64; 3], i: usize) -> [u64; 3] {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let mut out = t;
        out[j] = t[k];
        out[k] = vieta(p, t[i], t[k], t[j]);
        out
    }

    pub fn rotation_inverse(p: u64, t: [u64; 3], i: usize) -> [u64; 3] {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let mut out = t;
        out[k] = t[j];
        out[j] = vieta(p, t[i], t[j], t[k]);
        out
    }
}

/// Replays a certificate with the longhand arithmetic.
fn oracle_replay(c: &PathCertificate) -> Option<[u64; 3]> {
    let mut t = c.start.0;
    for m in &c.moves {
        let i = m.index() as usize - 1;
        t = match m.kind() {
            MoveKind::Involution => oracle::involution(c.p, t, i),
            MoveKind::Rotation => oracle::rotation(c.p, t, i),
            MoveKind::RotationInverse => oracle::rotation_inverse(c.p, t, i),
        };
        if !oracle::on_surface(c.p, t) {
            return None;
        }
    }
    Some(t)
}

fn oracle_reachable(p: u64, from: [u64; 3]) -> HashSet<[u64; 3]> {
    let mut seen = HashSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(t) = queue.pop_front() {
        for i in 0..3 {
            for u in [oracle::rotation(p, t, i), oracle::rotation_inverse(p, t, i)] {
                if seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
    }
    seen
}

fn criterion_1() -> Outcome {
    let primes = small_primes(5, 997);
    for &n in &primes {
        let p = PrimeModulus::new(n).unwrap();
        // -1 is a square mod p iff p ≡ 1 mod 4
        let chi = if n % 4 == 1 { 1i64 } else { -1 };
        let expected = (n * n) as i64 + chi * 3 * n as i64;
        let got = enumerate_surface(&p).map_err(|e| e.to_string())?.len() as i64;
        ensure(got == expected, || format!("p = {n}: {got} vertices, expected {expected}"))?;
    }
    Ok(format!("{} primes in [5, 997]", primes.len()))
}

fn criterion_2() -> Outcome {
    let primes = small_primes(5, 997);
    for &n in &primes {
        let e = enumerate_surface(&PrimeModulus::new(n).unwrap()).map_err(|e| e.to_string())?;
        for graph in [GraphKind::G, GraphKind::GHat] {
            let c = components_of(&e, graph);
            ensure(c.count == 1, || format!("p = {n}, {}: {} components", graph.name(), c.count))?;
        }
    }
    Ok(format!("G and Ghat connected for {} primes", primes.len()))
}

fn criterion_3() -> Outcome {
    let table: [(u64, &str); 17] = [
        (4, "parabolic"),
        (18, "elliptic"),
        (8, "hyperbolic"),
        (16, "hyperbolic"),
        (16, "hyperbolic"),
        (34, "parabolic"),
        (6, "elliptic"),
        (18, "elliptic"),
        (9, "elliptic"),
        (18, "elliptic"),
        (9, "elliptic"),
        (3, "elliptic"),
        (17, "parabolic"),
        (16, "hyperbolic"),
        (16, "hyperbolic"),
        (8, "hyperbolic"),
        (9, "elliptic"),
    ];
    let csv = String::from_utf8(run_cli(&["orders", "--p", "17"])).unwrap();
    let rows: Vec<Vec<String>> = csv.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    ensure(rows.len() == 17, || format!("{} rows", rows.len()))?;
    for (x1, (row, (order, class))) in rows.iter().zip(table).enumerate() {
        ensure(row[0] == x1.to_string(), || format!("row {x1} element {}", row[0]))?;
        ensure(row[1] == order.to_string(), || format!("row {x1}: order {} vs {order}", row[1]))?;
        if x1 != 0 {
            ensure(row[2] == class, || format!("row {x1}: type {} vs {class}", row[2]))?;
        }
    }
    let orbit = String::from_utf8(run_cli(&["orders", "--p", "17", "--orbit", "15,0,8", "--index", "3"])).unwrap();
    let firsts: Vec<&str> = orbit.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    let printed = ["15", "0", "2", "14", "11", "12", "5", "6", "3"];
    ensure(firsts == printed, || format!("orbit {firsts:?}"))?;
    Ok("17 orders, 16 types, 9-cycle of (15,0,8)".into())
}

fn criterion_4() -> Outcome {
    let int = |v: [i64; 3]| IntegerTriple(v.map(BigInt::from));
    let d = descend(&int([29, -169, -14701])).map_err(|e| e.to_string())?;
    ensure(d.moves == [3, 2, 1, 2, 3], || format!("word {:?}", d.moves))?;
    let chain = [[29, -169, -2], [29, -5, -2], [1, -5, -2], [1, -1, -2], [1, -1, -1]].map(int);
    ensure(d.chain == chain, || format!("chain {:?}", d.chain))?;
    ensure(d.terminal == int([1, -1, -1]), || format!("terminal {}", d.terminal))?;
    Ok("word [3,2,1,2,3], terminal (1,-1,-1)".into())
}

/// Certificates of criterion 5, kept for the length checks of criterion 6.
struct SoundnessRun {
    certificates: Vec<(u64, u128, PathCertificate)>,
}

fn criterion_5(run: &mut SoundnessRun) -> Outcome {
    let policies = [ClimbPolicy::greedy(), ClimbPolicy::full_scan()];
    let mut small_pairs = 0u64;
    for n in small_primes(5, 31) {
        let p = PrimeModulus::new(n).unwrap();
        let f = PathFinder::new(&p).map_err(|e| e.to_string())?;
        let bound = f.path_length_bound();
        let e = enumerate_surface(&p).unwrap();
        for x in e.vertices() {
            let reachable = oracle_reachable(n, x.0);
            for y in e.vertices() {
                for policy in &policies {
                    let c = f
                        .find_path(x, y, GraphKind::GHat, policy)
                        .map_err(|err| format!("p = {n}, {x} -> {y}: {err}"))?;
                    ensure(reachable.contains(&y.0), || format!("oracle cannot reach {y} from {x}"))?;
                    ensure(oracle_replay(&c) == Some(y.0), || format!("p = {n}, {x} -> {y}: replay mismatch"))?;
                    ensure(c.len() as u128 <= bound, || format!("p = {n}, {x} -> {y}: length {}", c.len()))?;
                }
                small_pairs += 1;
            }
        }
    }
    for n in [101u64, 499, 997] {
        let p = PrimeModulus::new(n).unwrap();
        let f = PathFinder::new(&p).map_err(|e| e.to_string())?;
        let bound = f.path_length_bound();
        let mut rng = ChaCha8Rng::seed_from_u64(n);
        for _ in 0..100 {
            let (x, y) = (random_vertex(&p, &mut rng), random_vertex(&p, &mut rng));
            for policy in &policies {
                let c = f
                    .find_path(&x, &y, GraphKind::GHat, policy)
                    .map_err(|err| format!("p = {n}, {x} -> {y}: {err}"))?;
                verify_path(&c).map_err(|err| format!("p = {n}: {err}"))?;
                ensure(oracle_replay(&c) == Some(y.0), || format!("p = {n}, {x} -> {y}: replay mismatch"))?;
                run.certificates.push((n, bound, c));
            }
        }
    }
    Ok(format!("{small_pairs} pairs for p <= 31, 2 x 100 pairs at 101, 499, 997"))
}

fn criterion_6(run: &SoundnessRun) -> Outcome {
    for (n, bound, c) in &run.certificates {
        ensure(c.len() as u128 <= *bound, || format!("p = {n}: length {} > {bound}", c.len()))?;
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in small_primes(101, 997) {
        let p = PrimeModulus::new(n).unwrap();
        let f = PathFinder::new(&p).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(n ^ 0x5eed);
        let mut total = 0u64;
        let trials = 100;
        for _ in 0..trials {
            let (x, y) = (random_vertex(&p, &mut rng), random_vertex(&p, &mut rng));
            let c = f.find_path(&x, &y, GraphKind::GHat, &ClimbPolicy::greedy()).map_err(|e| e.to_string())?;
            ensure(c.len() as u128 <= f.path_length_bound(), || format!("p = {n}: length {}", c.len()))?;
            total += c.len() as u64;
        }
        let m = n as f64;
        xs.push((m * m.ln().ln()).ln());
        ys.push((total as f64 / trials as f64).ln());
    }
    let slope = regression_slope(&xs, &ys).ok_or("degenerate regression")?;
    ensure((0.6..=1.3).contains(&slope), || format!("slope {slope:.3}"))?;
    Ok(format!("{} certificates within bound; slope {slope:.3} over {} primes", run.certificates.len(), xs.len()))
}

fn criterion_7() -> Outcome {
    let mut worst = 0f64;
    for n in [83u64, 89] {
        let rows = spectrum_moments(&PrimeModulus::new(n).unwrap(), 7, 0).map_err(|e| e.to_string())?;
        ensure(rows[0].graph_moment == 1.0 && rows[0].km_moment == 1.0, || "L = 0 not exact".into())?;
        for r in rows.iter().filter(|r| r.l % 2 == 1) {
            ensure(r.km_moment == 0.0, || format!("odd km moment {}", r.km_moment))?;
        }
        for l in [2usize, 4, 6] {
            let r = rows[l];
            let tol = 0.25 * r.km_moment.max(1.0);
            let gap = (r.graph_moment - r.km_moment).abs();
            worst = worst.max(gap / tol);
            ensure(gap <= tol, || format!("p = {n}, L = {l}: graph {} vs km {}", r.graph_moment, r.km_moment))?;
        }
    }
    Ok(format!("worst gap {:.3} of tolerance", worst))
}

fn criterion_8() -> Outcome {
    let p = PrimeModulus::new(997).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..10_000 {
        let len = rng.gen_range(0..=256);
        let bits = BitString::new((0..len).map(|_| rng.gen()).collect());
        let k = rng.gen_range(1..=3u8);
        let params = HashParams::new(p, k).unwrap();
        let mut visited = Vec::new();
        let out = hash_bits_traced(&bits, &params, |label, v| visited.push((label, *v)));
        ensure(out == hash_bits(&bits, &params), || format!("trial {trial}: not deterministic"))?;
        let mut label = k;
        let mut at = [1u64, 1, 1];
        for (step, (&b, &(l, v))) in bits.bits().iter().zip(&visited).enumerate() {
            let expected = (label + b as u8) % 3 + 1;
            ensure(l == expected && l != label, || format!("trial {trial}, step {step}: label {l}"))?;
            at = oracle::involution(997, at, l as usize - 1);
            ensure(v == at && oracle::on_surface(997, v), || format!("trial {trial}, step {step}: vertex"))?;
            label = l;
        }
    }

    let p13 = PrimeModulus::new(13).unwrap();
    let params = HashParams::new(p13, 1).unwrap();
    let mut first_collision = None;
    for len in 1..=12usize {
        let mut seen: HashMap<[u64; 3], u64> = HashMap::new();
        let mut collided = false;
        for word in 0..1u64 << len {
            let bits = BitString::new((0..len).rev().map(|i| word >> i & 1 == 1).collect());
            let v = hash_bits(&bits, &params).vertex;
            // longhand walk
            let (mut label, mut at) = (1u8, [1u64, 1, 1]);
            for &b in bits.bits() {
                label = (label + b as u8) % 3 + 1;
                at = oracle::involution(13, at, label as usize - 1);
            }
            ensure(v == at, || format!("length {len}, input {word:b}: walk mismatch"))?;
            if let Some(prev) = seen.insert(v, word) {
                ensure(prev != word, || "duplicate input".into())?;
                collided = true;
            }
        }
        match (collided, first_collision) {
            (true, None) => first_collision = Some(len),
            (false, Some(c)) => return Err(format!("injective again at length {len} after collision at {c}")),
            _ => {}
        }
    }
    let first = first_collision.ok_or("no collision up to length 12 despite 4096 > 208 inputs")?;
    // 2^8 inputs exceed the 208 vertices, forcing a collision by length 8
    ensure(first <= 8, || format!("first collision at length {first}"))?;
    Ok(format!("10^4 inputs at p = 997; p = 13 injective below length {first}"))
}

fn criterion_9() -> Outcome {
    let tree = tree_enumerate(u32::MAX, 10_000);
    let signs = [[1i64, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];
    let mut checks = 0u64;
    for n in [7u64, 13, 101] {
        let p = PrimeModulus::new(n).unwrap();
        for t in &tree {
            for s in signs {
                let z = IntegerTriple([0, 1, 2].map(|i| BigInt::from(t[i]) * s[i]));
                let reduce = |w: &IntegerTriple| -> [u64; 3] {
                    w.0.clone().map(|x| {
                        let r = x % BigInt::from(n);
                        u64::try_from(if r < BigInt::from(0) { r + n } else { r }).unwrap()
                    })
                };
                let r = reduce(&z);
                ensure(z.reduce(&p).map(|m| m.0) == Ok(r), || format!("reduction of {z}"))?;
                for i in 1..=3u8 {
                    let up = reduce(&z.involution(i));
                    ensure(up == oracle::involution(n, r, i as usize - 1), || format!("p = {n}, {z}, R{i}"))?;
                    checks += 1;
                }
            }
        }
    }

    let mut attacks = 0;
    for n in [7u64, 13, 101] {
        let p = PrimeModulus::new(n).unwrap();
        let join = SignJoin::new(&p).map_err(|e| e.to_string())?;
        let targets: Vec<MarkoffTriple> = tree
            .iter()
            .take(12)
            .flat_map(|t| signs.map(|s| MarkoffTriple([0, 1, 2].map(|i| {
                let r = t[i] as u64 % n;
                if s[i] < 0 && r != 0 { n - r } else { r }
            }))))
            .collect();
        for x in &targets {
            for y in targets.iter().step_by(5) {
                let c = lift_path_attack(x, y, &p, 10_000, &join)
                    .map_err(|e| e.to_string())?
                    .ok_or_else(|| format!("p = {n}: no lift for {x} or {y}"))?;
                verify_path(&c).map_err(|e| format!("p = {n}, {x} -> {y}: {e}"))?;
                ensure(oracle_replay(&c) == Some(y.0), || format!("p = {n}, {x} -> {y}: replay"))?;
                attacks += 1;
            }
        }
    }

    let primes: Vec<PrimeModulus> = small_primes(101, 997)
        .into_iter()
        .step_by(16)
        .map(|n| PrimeModulus::new(n).unwrap())
        .collect();
    let report = conjecture_report(&primes, 1000, 1_000_000, 9);
    let lifted: u64 = report.iter().map(|r| r.lifted).sum();
    for r in &report {
        println!(
            "    p = {:4}  ln p = {:.2}  lifted {:4}/{}  mean word {}  min word / ln p {}",
            r.p,
            r.log_p,
            r.lifted,
            r.samples,
            r.mean_word_length.map_or("-".into(), |m| format!("{m:.2}")),
            r.min_length_over_log_p.map_or("-".into(), |m| format!("{m:.2}")),
        );
    }
    Ok(format!(
        "{checks} naturality checks; {attacks} lift-attack certificates; report over {} primes, {lifted} lifts",
        report.len()
    ))
}

fn criterion_10() -> Outcome {
    let runs: [&[&str]; 2] = [
        &["analyze", "--pmin", "5", "--pmax", "120", "--trials", "10", "--seed", "7"],
        &["bench-bgs", "--pmax", "300", "--trials", "20", "--seed", "7"],
    ];
    let mut sizes = Vec::new();
    for args in runs {
        let a = run_cli(args);
        let b = run_cli(args);
        ensure(a == b, || format!("{} differs between runs", args[0]))?;
        ensure(a.iter().filter(|&&c| c == b'\n').count() > 1, || format!("{} produced no rows", args[0]))?;
        sizes.push(a.len());
    }
    Ok(format!("analyze {} bytes, bench-bgs {} bytes, identical across runs", sizes[0], sizes[1]))
}

fn main() -> ExitCode {
    let mut soundness = SoundnessRun { certificates: Vec::new() };
    let mut failed = 0;
    let mut report = |n: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {n:2} {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {n:2} {name}: {detail} [{secs:.1}s]");
            }
        }
    };
    report(1, "vertex-count formula", &mut criterion_1);
    report(2, "connectivity", &mut criterion_2);
    report(3, "order table at p = 17", &mut criterion_3);
    report(4, "descent regression", &mut criterion_4);
    report(5, "pathfinder soundness", &mut || criterion_5(&mut soundness));
    report(6, "path-length bound and scaling", &mut || criterion_6(&soundness));
    report(7, "spectral moments", &mut criterion_7);
    report(8, "hash properties", &mut criterion_8);
    report(9, "lifting measurements", &mut criterion_9);
    report(10, "campaign determinism", &mut criterion_10);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
