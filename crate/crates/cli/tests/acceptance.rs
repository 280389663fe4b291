//! Acceptance suite. Each criterion prints one `PASS`, `FAIL` or `SKIP`
//! line; the test fails if any criterion fails.
//!
//! Criterion 3 also checks two gene-regulation networks when their edge lists
//! are present in `$CHEI2D_DATA_DIR` (default `tests/data`) as `ecoli.txt`
//! and `yeast.txt`.

mod common;

use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use chei2d::flow::{compute_flow, FlowAverage};
use chei2d::google::{
    cheirank, dense_solve_oracle, pagerank, two_d_ranking, RankParams, RankVector, TwoDRanking,
};
use chei2d::graph::{parse_edge_list, synth_random, synth_scale_free, DirectedGraph, ParseOptions};
use chei2d::spam::{
    analytic_fraction, filter_links_by_rank, filtered_cheirank_with, identity_ranks,
    synth_transition_ensemble, Eta, FilterConfig, FilterMode,
};
use chei2d::stats::{
    cell_index, correlator, density_grid, density_grid_per_lattice_point, fit_exponent_default,
    point_count, point_count_curve, Scale,
};
use common::{chei2d, data_files, fixture, FIXTURES};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::tempdir;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = std::result::Result<Verdict, String>;
type Criterion = (&'static str, fn() -> Check);

fn pass(detail: impl Into<String>) -> Check {
    Ok(Verdict::Pass(detail.into()))
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Ok(Verdict::Fail(format!($($fmt)+)));
        }
    };
}

fn within(limit: Duration, start: Instant) -> std::result::Result<f64, String> {
    let secs = start.elapsed().as_secs_f64();
    if secs < limit.as_secs_f64() {
        Ok(secs)
    } else {
        Err(format!("took {secs:.1}s, budget {}s", limit.as_secs()))
    }
}

fn load(name: &str) -> DirectedGraph {
    let weighted = name.starts_with("weighted");
    load_path(fixture(name), weighted)
}

fn load_path(path: PathBuf, weighted: bool) -> DirectedGraph {
    let file = File::open(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let opts = ParseOptions {
        weighted,
        ..ParseOptions::default()
    };
    parse_edge_list(BufReader::new(file), opts).unwrap()
}

/// The on-disk fixtures plus a few generated graphs.
fn test_graphs() -> Vec<(String, DirectedGraph)> {
    let mut graphs: Vec<_> = FIXTURES.iter().map(|n| (n.to_string(), load(n))).collect();
    graphs.push((
        "scale-free N=2000".into(),
        synth_scale_free(2000, 2.1, 2.7, 11).unwrap(),
    ));
    graphs.push(("random N=500".into(), synth_random(500, 2500, 12).unwrap()));
    graphs.push((
        "isolated N=5".into(),
        DirectedGraph::from_links(5, std::iter::empty()).unwrap(),
    ));
    graphs
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let params = RankParams::default().with_tol(1e-12);
    let mut worst = 0.0f64;
    for seed in 0..50u64 {
        let n = 2 + (seed as usize * 37) % 49;
        let links = ((0.1 * (n * n) as f64).round() as usize).max(1);
        let g = synth_random(n, links, 1000 + seed).map_err(|e| e.to_string())?;
        let p = pagerank(&g, &params).map_err(|e| e.to_string())?;
        let oracle = dense_solve_oracle(&g, params.alpha).map_err(|e| e.to_string())?;
        let err = max_abs_diff(&p.probabilities, &oracle);
        ensure!(err <= 1e-8, "seed {seed} (N={n}): L∞ error {err:e}");
        ensure!(p.converged, "seed {seed} did not converge");
        worst = worst.max(err);
    }
    let secs = within(Duration::from_secs(5), start)?;
    pass(format!("50 graphs, worst L∞ error {worst:.1e}, {secs:.2}s"))
}

fn definitional_identity() -> Check {
    let params = RankParams::default();
    let graphs = test_graphs();
    for (name, g) in &graphs {
        let c = cheirank(g, &params).map_err(|e| e.to_string())?;
        let p = pagerank(&g.reverse(), &params).map_err(|e| e.to_string())?;
        ensure!(
            c.probabilities == p.probabilities,
            "{name}: probabilities differ"
        );
        ensure!(c.order == p.order, "{name}: rank order differs");
    }
    pass(format!("bit-identical on {} graphs", graphs.len()))
}

fn data_dir() -> PathBuf {
    std::env::var_os("CHEI2D_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| fixture(""))
}

fn correlator_fixtures() -> Check {
    let uniform = RankVector::from_probabilities(vec![0.25; 4]);
    let r = TwoDRanking::new(uniform.clone(), uniform).map_err(|e| e.to_string())?;
    let k_uniform = correlator(&r, 0);
    ensure!(k_uniform == 0.0, "uniform κ(0) = {k_uniform:e}");

    let g = load("complete4.txt");
    let r = two_d_ranking(&g, &RankParams::default()).map_err(|e| e.to_string())?;
    let k_complete = correlator(&r, 0);
    ensure!(
        k_complete.abs() < 1e-12,
        "complete-graph κ(0) = {k_complete:e}"
    );

    let r = TwoDRanking::new(
        RankVector::from_probabilities(vec![0.7, 0.3]),
        RankVector::from_probabilities(vec![0.6, 0.4]),
    )
    .map_err(|e| e.to_string())?;
    let k_two = correlator(&r, 0);
    ensure!((k_two - 0.08).abs() < 1e-12, "two-node κ(0) = {k_two}");

    let mut notes = vec![format!("uniform 0, two-node {k_two:.4}")];
    let mut missing = Vec::new();
    for (file, expected) in [("ecoli.txt", -0.0645), ("yeast.txt", -0.0497)] {
        let path = data_dir().join(file);
        if !path.exists() {
            missing.push(file);
            continue;
        }
        let g = load_path(path, false);
        let r = two_d_ranking(&g, &RankParams::default()).map_err(|e| e.to_string())?;
        let k = correlator(&r, 0);
        ensure!(
            (k - expected).abs() <= 0.002,
            "{file}: κ = {k:.4}, expected {expected}"
        );
        notes.push(format!("{file} {k:.4}"));
    }
    if missing.is_empty() {
        pass(notes.join(", "))
    } else {
        Ok(Verdict::Skip(format!(
            "{}; gene networks not present: {}",
            notes.join(", "),
            missing.join(", ")
        )))
    }
}

fn point_count_limits() -> Check {
    let start = Instant::now();
    let n = 10_000;
    let ramp: Vec<f64> = (0..n).map(|i| (n - i) as f64).collect();
    let total: f64 = ramp.iter().sum();
    let p = RankVector::from_probabilities(ramp.iter().map(|x| x / total).collect());
    let correlated = TwoDRanking::new(p.clone(), p.clone()).map_err(|e| e.to_string())?;
    let curve = point_count_curve(&correlated);
    ensure!(
        curve.iter().enumerate().all(|(i, &d)| d == i),
        "correlated ranking: Δ(n) ≠ n"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut shuffled = p.probabilities.clone();
    shuffled.shuffle(&mut rng);
    let independent =
        TwoDRanking::new(p, RankVector::from_probabilities(shuffled)).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for m in [n / 10, n / 4, n / 2] {
        let (nn, mm) = (n as f64, m as f64);
        let mean = mm * mm / nn;
        let var = mm * (mm / nn) * ((nn - mm) / nn) * ((nn - mm) / (nn - 1.0));
        let z = (point_count(&independent, m) as f64 - mean) / var.sqrt();
        ensure!(z.abs() < 5.0, "n={m}: z = {z:.2}");
        worst = worst.max(z.abs());
    }
    let secs = within(Duration::from_secs(5), start)?;
    pass(format!("Δ(n)=n exact; random |z| ≤ {worst:.2}; {secs:.2}s"))
}

fn fraction_monte_carlo() -> Check {
    let start = Instant::now();
    let nodes = 1_000_000;
    let links = 200_000;
    let k = identity_ranks(nodes);
    let mut worst = 0.0f64;
    for (a, nu) in [(1.0, 0.0), (0.4, 0.0), (0.4, 0.8)] {
        let g = synth_transition_ensemble(nodes, links, a, nu, 5).map_err(|e| e.to_string())?;
        for eta in [0.5, 1.0, 2.0, 5.0, 10.0] {
            let measured = filter_links_by_rank(&g, &k, Eta::Finite(eta))
                .map_err(|e| e.to_string())?
                .fraction;
            let expected = analytic_fraction(eta, a, nu).map_err(|e| e.to_string())?;
            let err = (measured - expected).abs();
            ensure!(
                err < 0.02,
                "a={a} ν={nu} η_K={eta}: measured {measured:.4}, closed form {expected:.4}"
            );
            worst = worst.max(err);
        }
    }
    let secs = within(Duration::from_secs(30), start)?;
    pass(format!("{links} links, worst |Δf| {worst:.4}; {secs:.1}s"))
}

fn filter_endpoints() -> Check {
    let params = RankParams::default();
    let graphs = test_graphs();
    let mut worst = 0.0f64;
    for (name, g) in &graphs {
        let r = two_d_ranking(g, &params).map_err(|e| e.to_string())?;
        for mode in [FilterMode::Probability, FilterMode::Rank] {
            for (eta, target) in [
                (Eta::Finite(0.0), &r.pagerank),
                (Eta::Infinite, &r.cheirank),
            ] {
                let cfg = FilterConfig { mode, eta, params };
                let got = filtered_cheirank_with(g, &r.pagerank, &cfg)
                    .map_err(|e| e.to_string())?
                    .cheirank
                    .unwrap();
                let err = max_abs_diff(&got.probabilities, &target.probabilities);
                ensure!(
                    err <= 10.0 * params.tol,
                    "{name} {mode:?} η={eta}: error {err:e}"
                );
                worst = worst.max(err);
            }
        }
    }
    pass(format!(
        "{} graphs, both modes, worst {worst:.1e}",
        graphs.len()
    ))
}

fn exponent_relation() -> Check {
    let start = Instant::now();
    let g = synth_scale_free(10_000, 2.1, 2.7, 7).map_err(|e| e.to_string())?;
    let r = two_d_ranking(&g, &RankParams::default()).map_err(|e| e.to_string())?;
    let beta = fit_exponent_default(&r.pagerank).map_err(|e| e.to_string())?;
    let beta_star = fit_exponent_default(&r.cheirank).map_err(|e| e.to_string())?;
    ensure!((0.75..=1.05).contains(&beta), "β = {beta:.3}");
    ensure!((0.45..=0.75).contains(&beta_star), "β* = {beta_star:.3}");
    let secs = within(Duration::from_secs(60), start)?;
    pass(format!("β = {beta:.3}, β* = {beta_star:.3}; {secs:.1}s"))
}

fn conservation() -> Check {
    let params = RankParams::default();
    let mut grids = 0;
    let mut fields = 0;
    for (name, g) in test_graphs() {
        let r = two_d_ranking(&g, &params).map_err(|e| e.to_string())?;
        let n = g.node_count();
        for scale in [Scale::Linear, Scale::Log] {
            for cells in [1, 3, 10, 100] {
                let unit = density_grid(&r, cells, scale).map_err(|e| e.to_string())?;
                let total = unit.total();
                ensure!(
                    (total - 1.0).abs() <= 1e-9,
                    "{name} {scale} {cells}: mass {total}"
                );
                // The display variant divides by cell area; undoing that
                // recovers the unit mass.
                let display =
                    density_grid_per_lattice_point(&r, cells, scale).map_err(|e| e.to_string())?;
                let mut span = vec![0.0; cells];
                for k in 1..=n as u32 {
                    span[cell_index(k, n, cells, scale)] += 1.0;
                }
                let restored: f64 = (0..cells)
                    .flat_map(|row| (0..cells).map(move |col| (row, col)))
                    .map(|(row, col)| display.get(row, col) * span[row] * span[col])
                    .sum();
                ensure!(
                    (restored - 1.0).abs() <= 1e-9,
                    "{name} {scale} {cells}: per-lattice-point mass {restored}"
                );
                grids += 2;

                let cell_of = |v: u32| {
                    let (k, ks) = r.ranks(v);
                    (
                        cell_index(k, n, cells, scale) as i64,
                        cell_index(ks, n, cells, scale) as i64,
                    )
                };
                let (mut raw_x, mut raw_y) = (0i64, 0i64);
                let mut has_links = vec![false; cells * cells];
                let mut occupied = vec![false; cells * cells];
                for (s, d, _) in g.links() {
                    let (a, b) = (cell_of(s), cell_of(d));
                    raw_x += b.0 - a.0;
                    raw_y += b.1 - a.1;
                    has_links[(a.0 as usize) * cells + a.1 as usize] = true;
                }
                for v in 0..n as u32 {
                    let c = cell_of(v);
                    occupied[(c.0 as usize) * cells + c.1 as usize] = true;
                }
                for average in [FlowAverage::PerNode, FlowAverage::PerLink] {
                    let field =
                        compute_flow(&g, &r, cells, scale, average).map_err(|e| e.to_string())?;
                    let (mut wx, mut wy) = (0.0, 0.0);
                    for (idx, c) in field.grid.iter().enumerate() {
                        let weight = match average {
                            FlowAverage::PerNode => c.nodes,
                            FlowAverage::PerLink => c.links,
                        } as f64;
                        wx += c.dx * weight;
                        wy += c.dy * weight;
                        ensure!(
                            c.empty == !(occupied[idx] && has_links[idx]),
                            "{name} {scale} {cells}: wrong empty flag at ({}, {})",
                            c.i,
                            c.i_star
                        );
                    }
                    ensure!(
                        (wx - raw_x as f64).abs() <= 1e-9 && (wy - raw_y as f64).abs() <= 1e-9,
                        "{name} {scale} {cells} {average:?}: ({wx}, {wy}) vs ({raw_x}, {raw_y})"
                    );
                    fields += 1;
                }
            }
        }
    }
    pass(format!("{grids} grids, {fields} flow fields"))
}

fn child_peak_rss_bytes() -> u64 {
    // SAFETY: getrusage only writes into the struct we pass.
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    let rc = unsafe { libc::getrusage(libc::RUSAGE_CHILDREN, &mut usage) };
    assert_eq!(rc, 0);
    // Linux reports kilobytes.
    usage.ru_maxrss as u64 * 1024
}

fn run_ok(args: &[&str]) -> std::result::Result<(), String> {
    let out = chei2d(args);
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "chei2d {} exited {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn streaming_run() -> Check {
    let nodes = 1_000_000usize;
    let links = 10_000_000usize;
    let budget = 64 * links as u64 + 128 * nodes as u64;
    let dir = tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let graph = d.join("synth/graph.txt");
    let start = Instant::now();
    run_ok(&[
        "--seed",
        "1",
        "synth",
        "--model",
        "random",
        "--nodes",
        &nodes.to_string(),
        "--links",
        &links.to_string(),
        "--out",
        d.join("synth").to_str().unwrap(),
    ])?;
    let synth_secs = start.elapsed().as_secs_f64();
    let ranked = Instant::now();
    run_ok(&[
        "rank",
        "--input",
        graph.to_str().unwrap(),
        "--out",
        d.join("rank").to_str().unwrap(),
    ])?;
    run_ok(&[
        "stats",
        "--ranks",
        d.join("rank/rank.tsv").to_str().unwrap(),
        "--out",
        d.join("stats").to_str().unwrap(),
    ])?;
    let work = ranked.elapsed().as_secs_f64();
    let total = within(Duration::from_secs(600), start)?;
    let rss = child_peak_rss_bytes();
    ensure!(
        rss <= budget,
        "peak child RSS {} MB exceeds {} MB",
        rss >> 20,
        budget >> 20
    );
    pass(format!(
        "synth {synth_secs:.1}s, rank+stats {work:.1}s, total {total:.1}s; peak RSS {} MB ({:.1} B/link, budget {} MB)",
        rss >> 20,
        rss as f64 / links as f64,
        budget >> 20
    ))
}

fn determinism() -> Check {
    let dir = tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let sf = d.join("sf");
    run_ok(&[
        "--seed",
        "9",
        "synth",
        "--nodes",
        "3000",
        "--out",
        sf.to_str().unwrap(),
    ])?;
    let graph = sf.join("graph.txt");
    let graph = graph.to_str().unwrap();
    let subset = fixture("subset.txt");
    let subset = subset.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["rank", "--input", graph],
        vec!["stats", "--input", graph],
        vec!["density", "--input", graph, "--per-lattice-point"],
        vec!["flow", "--input", graph, "--cells", "20"],
        vec!["filter", "--input", graph, "--eta", "2"],
        vec!["filter", "--input", graph, "--eta-k", "2"],
        vec!["matrix", "--input", graph, "--cells", "100"],
        vec!["twod", "--input", graph, "--subset", subset],
        vec!["--seed", "9", "synth", "--nodes", "3000"],
    ];
    let mut compared = 0;
    for (i, cmd) in commands.iter().enumerate() {
        let mut reference = None;
        for (run, threads) in ["1", "1", "4"].iter().enumerate() {
            let out = d.join(format!("c{i}-r{run}"));
            let mut args = vec!["--threads", threads];
            args.extend(cmd);
            args.extend(["--out", out.to_str().unwrap()]);
            run_ok(&args)?;
            let files = data_files(&out);
            ensure!(!files.is_empty(), "{}: no outputs", cmd.join(" "));
            match &reference {
                None => reference = Some(files),
                Some(r) => {
                    for ((name, a), (_, b)) in r.iter().zip(&files) {
                        ensure!(
                            a == b,
                            "{}: {name} differs with --threads {threads}",
                            cmd.join(" ")
                        );
                    }
                    ensure!(
                        r.len() == files.len(),
                        "{}: file sets differ",
                        cmd.join(" ")
                    );
                    compared += files.len();
                }
            }
        }
    }
    pass(format!(
        "{} commands x 3 runs (--threads 1, 1, 4): {compared} file comparisons identical",
        commands.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("definitional identity", definitional_identity),
        ("correlator fixtures", correlator_fixtures),
        ("point-count limits", point_count_limits),
        ("inverted-fraction Monte Carlo", fraction_monte_carlo),
        ("filter endpoints", filter_endpoints),
        ("exponent relation", exponent_relation),
        ("grid/flow conservation", conservation),
        ("streaming run 1e6 nodes / 1e7 links", streaming_run),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let verdict = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(Ok(v)) => v,
            Ok(Err(e)) => Verdict::Fail(e),
            Err(panic) => Verdict::Fail(
                panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panicked".into()),
            ),
        };
        let (tag, detail) = match verdict {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Skip(d) => ("SKIP", d),
            Verdict::Fail(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} [{tag}] {name}: {detail}", i + 1);
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
