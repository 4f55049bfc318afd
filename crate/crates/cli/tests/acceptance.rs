//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use irreg_core::conditions::count_conditions;
use irreg_core::construct::{fallback_greedy, run_pipeline, PipelineOptions, PipelineOutcome};
use irreg_core::generate::{generate, Family, GraphFamilySpec};
use irreg_core::oracle::{
    exact_strength, exact_strength_with_budget, search_at, OracleError, DEFAULT_NODE_BUDGET,
};
use irreg_core::params::{derive_params, ConstructionParams};
use irreg_core::partition::sample_partition;
use irreg_core::Graph;

const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(10);
const GRID_TIME_LIMIT: Duration = Duration::from_secs(300);
const PETERSEN_NODE_BUDGET: u64 = DEFAULT_NODE_BUDGET;
/// Connected graphs on n unlabeled vertices, n = 3..=6.
const CONNECTED_COUNTS: [(usize, usize); 4] = [(3, 2), (4, 6), (5, 21), (6, 112)];

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// independent helpers: nothing below reuses the library's own checkers

fn sums(g: &Graph, w: &[u64]) -> Vec<u64> {
    let mut s = vec![0; g.n()];
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        s[u] += w[i];
        s[v] += w[i];
    }
    s
}

fn all_distinct(xs: &[u64]) -> bool {
    let set: HashSet<u64> = xs.iter().copied().collect();
    set.len() == xs.len()
}

fn regular_degree(g: &Graph) -> Option<usize> {
    let d = g.degree(0);
    (0..g.n()).all(|v| g.degree(v) == d).then_some(d)
}

fn cycle(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let u = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// All connected graphs on `n` vertices, one per isomorphism class.
fn connected_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let index = |a: usize, b: usize| {
        pairs
            .iter()
            .position(|&p| p == (a.min(b), a.max(b)))
            .unwrap()
    };
    let maps: Vec<Vec<usize>> = permutations(n)
        .iter()
        .map(|p| pairs.iter().map(|&(a, b)| index(p[a], p[b])).collect())
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 1u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if !connected(n, &edges) {
            continue;
        }
        let canon = maps
            .iter()
            .map(|m| {
                (0..pairs.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .fold(0u32, |acc, i| acc | 1 << m[i])
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            out.push(Graph::from_edges(n, edges).unwrap());
        }
    }
    out
}

fn tiny_suite() -> Vec<Graph> {
    (3..=6).flat_map(connected_graphs).collect()
}

fn named(family: Family, n: Option<usize>, d: Option<usize>, connections: Vec<usize>) -> Graph {
    generate(&GraphFamilySpec {
        family,
        n,
        d,
        connections,
        seed: 0,
    })
    .unwrap()
}

fn c1_oracle() -> Check {
    let start = Instant::now();
    let p3 = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    let cases = [
        ("K_3", complete(3), 3),
        ("K_4", complete(4), 3),
        ("C_4", cycle(4), 3),
        ("P_3", p3, 2),
    ];
    let mut notes = Vec::new();
    for (name, g, expected) in cases {
        let r = exact_strength(&g, 10).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.s == Some(expected), || {
            format!("{name}: s = {:?}, expected {expected}", r.s)
        })?;
        let w = r.witness.unwrap();
        ensure(
            w.k() == expected && all_distinct(&sums(&g, w.weights())),
            || format!("{name}: bad witness"),
        )?;
        let (below, nodes) =
            search_at(&g, expected - 1, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        ensure(below.is_none(), || {
            format!("{name}: found a weighting with k = {}", expected - 1)
        })?;
        notes.push(format!(
            "{name}={expected} ({} + {nodes} nodes)",
            r.nodes_explored
        ));
    }
    // canonical edges of C_4 are 01, 03, 12, 23; on the cycle 0-1-2-3 these read (1, 1, 2, 3)
    // up to rotation, with sums (4, 2, 3, 5) when laid out as 01=1, 12=1, 23=2, 30=3
    let c4 = cycle(4);
    let w = exact_strength(&c4, 10).unwrap().witness.unwrap();
    ensure(w.weights() == [1, 1, 2, 3], || {
        format!("C_4 witness {:?}", w.weights())
    })?;
    ensure(sums(&c4, &[1, 3, 1, 2]) == [4, 2, 3, 5], || {
        "C_4 cyclic layout".into()
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed < ORACLE_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("{} in {elapsed:.2?}", notes.join(", ")))
}

fn c2_lower_bound() -> Check {
    let (mut total, mut regular) = (0, 0);
    for (n, count) in CONNECTED_COUNTS {
        let graphs = connected_graphs(n);
        ensure(graphs.len() == count, || {
            format!("n = {n}: {} classes, expected {count}", graphs.len())
        })?;
        total += graphs.len();
        for g in graphs {
            let s = exact_strength(&g, 20)
                .map_err(|e| e.to_string())?
                .s
                .unwrap();
            if let Some(d) = regular_degree(&g) {
                regular += 1;
                let bound = (n + d - 1).div_ceil(d) as u64;
                ensure(s >= bound, || format!("{:?}: s = {s} < {bound}", g.edges()))?;
            }
        }
    }
    let petersen = named(Family::Petersen, None, None, vec![]);
    let pet = match exact_strength_with_budget(&petersen, 20, PETERSEN_NODE_BUDGET) {
        Ok(r) => {
            let s = r.s.unwrap();
            ensure(s >= 4, || format!("Petersen s = {s} < 4"))?;
            format!("Petersen s = {s}")
        }
        Err(OracleError::BudgetExhausted { .. }) => "Petersen skipped (node budget)".into(),
        Err(e) => return Err(e.to_string()),
    };
    let c4 = exact_strength(&cycle(4), 10).unwrap().s.unwrap();
    let paper_lower = (4 + 2 + 1u64).div_ceil(2);
    ensure(c4 == 3 && paper_lower == 4, || {
        format!("C_4: s = {c4}, paper bound {paper_lower}")
    })?;
    Ok(format!(
        "{total} graphs ({regular} regular) n <= 6; {pet}; C_4 s = 3 < paper bound 4"
    ))
}

/// Bin from threshold comparison: x lies in bin b iff x >= ceil((b-1) 2^64 / d).
fn bin_by_thresholds(x: u64, d: usize) -> usize {
    let above = (1..d).filter(|&b| {
        let t = ((b as u128) << 64).div_ceil(d as u128);
        (x as u128) >= t
    });
    1 + above.count()
}

fn level_of_bin(bin: usize, p: &ConstructionParams) -> usize {
    let first_small = p.d - p.s_star + 1;
    if bin < first_small {
        return 0;
    }
    let h = p.s_star / 13;
    (bin - first_small) / h + 1
}

fn c3_partition_recount() -> Check {
    let (n, d) = (2000, 500);
    let g = generate(&GraphFamilySpec::random_regular(n, d, 2024)).unwrap();
    let p = derive_params(n, d, 0.1, 0.04).unwrap();
    let top = p.d - p.s_star;
    for seed in 0..20u64 {
        let vp = sample_partition(&g, &p, seed).map_err(|e| e.to_string())?;
        let counts = count_conditions(&g, &p, &vp);
        let bins: Vec<usize> = vp.x().iter().map(|&x| bin_by_thresholds(x, d)).collect();
        let levels: Vec<usize> = bins.iter().map(|&b| level_of_bin(b, &p)).collect();
        for v in 0..n {
            let mut small = [0u32; 13];
            let (mut window, mut corrected) = (0u32, 0u32);
            for (&u, &e) in g.neighbors(v).iter().zip(g.incident(v)) {
                if levels[u] > 0 {
                    small[levels[u] - 1] += 1;
                }
                let i = bins[v];
                let j = bins[u];
                if i <= top && top + 1 < i + j && j <= top {
                    window += 1;
                    corrected += u32::from(vp.coins()[e]);
                }
            }
            let got = &counts.vertices[v];
            ensure(
                got.small == small && got.window == window && got.corrected == corrected,
                || {
                    format!("seed {seed} vertex {v}: {got:?} vs small {small:?} window {window} corrected {corrected}")
                },
            )?;
        }
        for i in 1..=d {
            let brute = bins.iter().filter(|&&b| b <= i).count();
            ensure(counts.prefix[i - 1] == brute, || {
                format!("seed {seed} prefix {i}")
            })?;
        }
        for l in 1..=13 {
            let brute = levels.iter().filter(|&&x| x == l).count();
            ensure(counts.level_sizes[l - 1] == brute, || {
                format!("seed {seed} |S_{l}|")
            })?;
        }
    }
    Ok(format!("20 seeds x {n} vertices, {d} prefixes, 13 levels"))
}

struct GridRun {
    n: usize,
    d: usize,
    seed: u64,
    g: Graph,
    out: PipelineOutcome,
}

fn run_grid() -> (Vec<GridRun>, Duration) {
    let start = Instant::now();
    let mut runs = Vec::new();
    for n in [1200usize, 2000, 4000] {
        for d in [n / 4, n / 3] {
            let g = generate(&GraphFamilySpec::random_regular(n, d, n as u64 + d as u64)).unwrap();
            for seed in 1..=5u64 {
                let out = run_pipeline(
                    &g,
                    &PipelineOptions {
                        seed,
                        ..Default::default()
                    },
                );
                runs.push(GridRun {
                    n,
                    d,
                    seed,
                    g: g.clone(),
                    out,
                });
            }
        }
    }
    (runs, start.elapsed())
}

fn small_edge(r: &GridRun, e: usize) -> bool {
    let vp = r.out.trace.partition.as_ref().unwrap();
    let (u, v) = r.g.edge(e);
    !vp.in_big(u) && !vp.in_big(v)
}

fn c4_pipeline_validity(runs: &[GridRun], elapsed: Duration) -> Check {
    let mut ok = 0;
    let mut failures: Vec<String> = Vec::new();
    for r in runs {
        let tag = format!("n={} d={} seed={}", r.n, r.d, r.seed);
        let t = &r.out.trace;
        match &r.out.result {
            Ok(layers) => {
                ok += 1;
                let p = t.params.as_ref().unwrap();
                let vp = t.partition.as_ref().unwrap();
                let f = layers.total();
                let vw = sums(&r.g, &f);
                ensure(all_distinct(&vw), || format!("{tag}: not irregular"))?;
                ensure(r.out.achieved_k() == f.iter().copied().max(), || {
                    format!("{tag}: k mismatch")
                })?;
                let w12 = sums(&r.g, &layers.f12());
                let mut big: Vec<u64> = (0..r.g.n())
                    .filter(|&v| vp.in_big(v))
                    .map(|v| w12[v])
                    .collect();
                big.sort_unstable();
                ensure(big.windows(2).all(|w| w[1] == w[0] + 1), || {
                    format!("{tag}: B not consecutive")
                })?;
                let classes = &t.step3.as_ref().unwrap().classes;
                for v in (0..r.g.n()).filter(|&v| !vp.in_big(v)) {
                    let c = classes[v].unwrap();
                    let lo = 2 * c.lambda * c.q + c.a;
                    ensure(vw[v] == lo || vw[v] == lo + c.q, || {
                        format!("{tag}: vertex {v} outside its class")
                    })?;
                }
                for e in 0..r.g.m() {
                    let x = layers.f3[e];
                    let fine = if small_edge(r, e) {
                        x <= 3 * p.q
                    } else {
                        x == 0
                    };
                    ensure(fine, || format!("{tag}: f3({e}) = {x}"))?;
                }
            }
            Err(f) => failures.push(format!("{}:{}", f.stage, tag)),
        }
    }
    ensure(elapsed < GRID_TIME_LIMIT, || {
        format!("grid took {elapsed:?}")
    })?;
    let mut stages: Vec<String> = failures
        .iter()
        .map(|f| f.split(':').next().unwrap().to_string())
        .collect();
    stages.sort();
    stages.dedup();
    Ok(format!(
        "{ok}/{} runs valid, {} typed failures (stages: {}), {elapsed:.1?}",
        runs.len(),
        failures.len(),
        stages.join(",")
    ))
}

fn c5_claim_ranges(runs: &[GridRun]) -> Check {
    let mut checked = (0, 0);
    for r in runs {
        let t = &r.out.trace;
        let (Some(p), Some(vp)) = (&t.params, &t.partition) else {
            continue;
        };
        let ceil = (r.n as u64).div_ceil(r.d as u64);
        let floor = r.n as u64 / r.d as u64;
        let cap =
            (1000.0 * r.n as f64 / (r.d as f64).powf(1.0 + p.epsilon - p.gamma)).ceil() as u64;
        let check = |w: &[u64], extra: u64| -> Result<(), String> {
            for e in 0..r.g.m() {
                let (u, v) = r.g.edge(e);
                let (lo, hi) = match (vp.in_big(u), vp.in_big(v)) {
                    (true, true) => (1, floor + 2),
                    (false, false) => (1, 1),
                    _ => (ceil, ceil + 13 * p.omega + extra),
                };
                ensure(lo <= w[e] && w[e] <= hi, || {
                    format!(
                        "n={} d={} seed={} edge {e}: {} not in [{lo}, {hi}]",
                        r.n, r.d, r.seed, w[e]
                    )
                })?;
            }
            Ok(())
        };
        if let Some(f1) = &t.f1 {
            check(f1, 0)?;
            checked.0 += 1;
        }
        if let (Some(f1), Some(f2)) = (&t.f1, &t.f2) {
            let f12: Vec<u64> = f1.iter().zip(f2).map(|(a, b)| a + b).collect();
            check(&f12, cap)?;
            checked.1 += 1;
        }
    }
    ensure(checked.0 > 0 && checked.1 > 0, || {
        "no Step 1/Step 2 output to check".into()
    })?;
    Ok(format!(
        "{} Step-1 and {} Step-2 outputs, zero tolerance",
        checked.0, checked.1
    ))
}

fn c6_fallback_totality() -> Check {
    let mut suite: Vec<(String, Graph)> = tiny_suite()
        .into_iter()
        .enumerate()
        .map(|(i, g)| (format!("tiny#{i}"), g))
        .collect();
    suite.push((
        "Petersen".into(),
        named(Family::Petersen, None, None, vec![]),
    ));
    suite.push((
        "Q_3".into(),
        named(Family::Hypercube, None, Some(3), vec![]),
    ));
    suite.push((
        "Q_4".into(),
        named(Family::Hypercube, None, Some(4), vec![]),
    ));
    for n in [5, 7, 8, 12] {
        suite.push((format!("C_{n}"), cycle(n)));
    }
    for n in [5, 7, 8] {
        suite.push((format!("K_{n}"), complete(n)));
    }
    suite.push((
        "circulant(12;1,3)".into(),
        named(Family::Circulant, Some(12), None, vec![1, 3]),
    ));
    for (n, d, seed) in [
        (40, 6, 1),
        (60, 8, 2),
        (100, 10, 3),
        (120, 30, 4),
        (200, 20, 5),
    ] {
        suite.push((
            format!("rr({n},{d})"),
            generate(&GraphFamilySpec::random_regular(n, d, seed)).unwrap(),
        ));
    }
    let mut worst_ratio: f64 = 0.0;
    for (i, (name, g)) in suite.iter().enumerate() {
        let w = fallback_greedy(g, i as u64, 1).map_err(|e| format!("{name}: {e}"))?;
        ensure(w.weights().iter().all(|&x| x >= 1), || {
            format!("{name}: zero weight")
        })?;
        ensure(all_distinct(&sums(g, w.weights())), || {
            format!("{name}: not irregular")
        })?;
        if g.n() <= 8 {
            let s = exact_strength(g, 20).map_err(|e| e.to_string())?.s.unwrap();
            ensure(w.k() >= s, || {
                format!("{name}: k = {} below exact {s}", w.k())
            })?;
        }
        if let Some(d) = regular_degree(g) {
            let reference = 6 * g.n().div_ceil(d) as u64;
            ensure(w.k() <= reference, || {
                format!("{name}: k = {} > 6*ceil(n/d) = {reference}", w.k())
            })?;
            worst_ratio = worst_ratio.max(w.k() as f64 / reference as f64);
        }
    }
    for (name, g) in [
        ("K_3", complete(3)),
        ("K_4", complete(4)),
        ("C_4", cycle(4)),
        ("C_5", cycle(5)),
    ] {
        let k = fallback_greedy(&g, 0, 1).unwrap().k();
        ensure(k == 3, || format!("{name}: fallback k = {k}, exact 3"))?;
    }
    Ok(format!(
        "{} graphs valid; max k / 6*ceil(n/d) = {worst_ratio:.2}",
        suite.len()
    ))
}

fn irreg(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_irreg"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn c7_determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let read = |p: &str| std::fs::read(Path::new(p)).unwrap_or_default();
    let mut compared = 0;
    for (graph, family_args, algo) in [
        (
            "small.el",
            vec![
                "--family",
                "random-regular",
                "--n",
                "60",
                "--d",
                "8",
                "--seed",
                "3",
            ],
            "auto",
        ),
        (
            "dense.el",
            vec![
                "--family",
                "random-regular",
                "--n",
                "1200",
                "--d",
                "300",
                "--seed",
                "4",
            ],
            "paper",
        ),
        ("pet.el", vec!["--family", "petersen"], "fallback"),
    ] {
        let g = path(graph);
        let mut gen = vec!["gen"];
        gen.extend(family_args);
        gen.extend(["--out", &g]);
        let (code, _) = irreg(&gen);
        ensure(code == 0, || format!("gen {graph} exited {code}"))?;
        let mut runs = Vec::new();
        for i in 0..2 {
            let (r, w) = (
                path(&format!("{graph}.{i}.json")),
                path(&format!("{graph}.{i}.w")),
            );
            let (code, _) = irreg(&[
                "solve",
                "--in",
                &g,
                "--algo",
                algo,
                "--seed",
                "5",
                "--no-timings",
                "--report",
                &r,
                "--weights-out",
                &w,
            ]);
            runs.push((code, read(&r), read(&w)));
        }
        ensure(runs[0] == runs[1], || format!("{graph}: runs differ"))?;
        ensure(!runs[0].1.is_empty(), || format!("{graph}: no report"))?;
        if runs[0].0 == 0 {
            let (code, _) = irreg(&[
                "verify",
                "--in",
                &g,
                "--weights",
                &path(&format!("{graph}.0.w")),
            ]);
            ensure(code == 0, || format!("{graph}: verify exited {code}"))?;
        }
        compared += 1;
    }
    let grid = "n=40,60;d=n/5;eps=0.1;gamma=0.04;seeds=1,2";
    let a = irreg(&["bench", "--grid", grid, "--algo", "auto", "--no-timings"]);
    let b = irreg(&["bench", "--grid", grid, "--algo", "auto", "--no-timings"]);
    ensure(a == b && a.0 == 0, || "bench output differs".into())?;
    Ok(format!(
        "{compared} solve pairs and one bench pair byte-identical"
    ))
}

fn main() {
    let mut results: Vec<(&str, Result<String, String>)> = Vec::new();
    let guard = |f: &dyn Fn() -> Check| -> Check {
        catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or(e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        })
    };
    results.push(("exact-oracle ground truth", guard(&c1_oracle)));
    results.push(("lower-bound consistency", guard(&c2_lower_bound)));
    results.push((
        "partition-condition oracle equivalence",
        guard(&c3_partition_recount),
    ));
    let (runs, elapsed) = run_grid();
    results.push((
        "pipeline validity",
        guard(&|| c4_pipeline_validity(&runs, elapsed)),
    ));
    results.push(("claim-range checks", guard(&|| c5_claim_ranges(&runs))));
    results.push(("fallback totality", guard(&c6_fallback_totality)));
    results.push(("determinism", guard(&c7_determinism)));

    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
