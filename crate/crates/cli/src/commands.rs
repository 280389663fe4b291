use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Parser;

use chei2d::export;
use chei2d::flow::{compute_flow, FlowAverage};
use chei2d::google::{pagerank, two_d_ranking, RankParams};
use chei2d::graph::{
    parse_edge_list, synth_random, synth_scale_free_with, write_edge_list, DirectedGraph,
    ParseOptions, ScaleFreeConfig,
};
use chei2d::spam::{filtered_cheirank_with, measure_fraction_curve, Eta, FilterConfig, FilterMode};
use chei2d::stats::{self, Scale};
use chei2d::table::{rank_metadata, read_rank_table, write_rank_table};
use chei2d::twod::{local_rank, read_subset, two_d_rank};
use chei2d::TwoDRanking;

use crate::manifest::{FilterRecord, IterationRecord, RunManifest};
use crate::{Cli, Command, GraphArgs, Model, Outcome};

pub fn run(cli: Cli, argv: &[String]) -> Result<Outcome> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            bail!("--threads must be at least 1");
        }
        // A second call (from `replay`) finds the pool already built.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let started = Instant::now();
    let mut run = Run {
        manifest: RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            argv: argv.to_vec(),
            seed: cli.seed,
            threads: rayon::current_num_threads(),
            converged: true,
            ..Default::default()
        },
        dir: PathBuf::new(),
    };
    let outcome = match &cli.command {
        Command::Replay(args) => return replay(&args.manifest, args.out.as_deref()),
        Command::Rank(args) => {
            run.start("rank", &args.out.out)?;
            let g = run.load_graph(&args.graph)?;
            let params = run.rank_params(&args.graph)?;
            let r = two_d_ranking(&g, &params)?;
            run.record_ranking(&r);
            let meta = rank_metadata(&r, params.alpha, params.tol, params.max_iter);
            run.emit("rank.tsv", |w| write_rank_table(w, &r, &meta))?;
            run.outcome()
        }
        Command::Stats(args) => {
            run.start("stats", &args.out.out)?;
            let r = run.ranking(&args.graph, args.ranks.as_deref())?;
            let series = stats::correlator_series(&r, args.tau_min, args.tau_max);
            run.manifest.kappa = Some(stats::correlator(&r, 0));
            let comps = stats::correlator_components(&r);
            let hist = stats::component_histogram(&comps, args.bins, args.hist_lo, args.hist_hi)?;
            let n = r.node_count();
            let curve = stats::point_count_curve(&r);
            let rows: Vec<(usize, usize)> = stats::log_spaced(n, args.delta_samples)
                .into_iter()
                .map(|m| (m, curve[m]))
                .collect();
            run.emit("kappa_tau.tsv", |w| {
                export::write_correlator_tsv(w, &series)
            })?;
            run.emit("kappa_hist.tsv", |w| export::write_histogram_tsv(w, &hist))?;
            run.emit("delta.tsv", |w| export::write_point_count_tsv(w, n, &rows))?;
            run.outcome()
        }
        Command::Density(args) => {
            run.start("density", &args.out.out)?;
            let r = run.ranking(&args.graph, args.ranks.as_deref())?;
            let scale: Scale = args.scale.into();
            run.manifest.cells = Some(args.cells);
            run.manifest.scale = Some(scale.to_string());
            let grid = stats::density_grid(&r, args.cells, scale)?;
            run.emit("density.csv", |w| export::write_grid_csv(w, &grid))?;
            run.emit("density.json", |w| write_json(w, &grid))?;
            if args.per_lattice_point {
                let g = stats::density_grid_per_lattice_point(&r, args.cells, scale)?;
                run.emit("density_per_lattice_point.csv", |w| {
                    export::write_grid_csv(w, &g)
                })?;
            }
            run.outcome()
        }
        Command::Flow(args) => {
            run.start("flow", &args.out.out)?;
            let g = run.load_graph(&args.graph)?;
            let params = run.rank_params(&args.graph)?;
            let r = two_d_ranking(&g, &params)?;
            run.record_ranking(&r);
            let scale: Scale = args.scale.into();
            run.manifest.cells = Some(args.cells);
            run.manifest.scale = Some(scale.to_string());
            let average = if args.per_link {
                FlowAverage::PerLink
            } else {
                FlowAverage::PerNode
            };
            let field = compute_flow(&g, &r, args.cells, scale, average)?;
            run.emit("flow.tsv", |w| export::write_flow_tsv(w, &field))?;
            run.outcome()
        }
        Command::Filter(args) => {
            run.start("filter", &args.out.out)?;
            let g = run.load_graph(&args.graph)?;
            let params = run.rank_params(&args.graph)?;
            let (mode, eta) = match (&args.eta, &args.eta_k, args.eta_inf) {
                (Some(e), None, false) => (FilterMode::Probability, Some(e.parse::<Eta>()?)),
                (None, Some(e), false) => (FilterMode::Rank, Some(e.parse::<Eta>()?)),
                (None, None, true) => (FilterMode::Probability, Some(Eta::Infinite)),
                (None, None, false) => (FilterMode::Probability, None),
                _ => bail!("--eta, --eta-k and --eta-inf are mutually exclusive"),
            };
            let etas = args
                .etas
                .iter()
                .map(|s| s.trim().parse::<Eta>())
                .collect::<chei2d::Result<Vec<_>>>()?;
            let p = pagerank(&g, &params)?;
            run.manifest.converged &= p.converged;
            let curve = measure_fraction_curve(&g, &p, mode, &etas)?;
            run.emit("fraction.tsv", |w| {
                export::write_fraction_tsv(w, &mode.to_string(), &curve)
            })?;
            let mut record = FilterRecord {
                mode: mode.to_string(),
                eta: eta.map(|e| e.to_string()),
                curve_etas: etas.iter().map(|e| e.to_string()).collect(),
                inverted: None,
                fraction: None,
            };
            let mut iterations = IterationRecord {
                pagerank: Some(p.iterations),
                ..Default::default()
            };
            if let Some(eta) = eta {
                let cfg = FilterConfig { mode, eta, params };
                let result = filtered_cheirank_with(&g, &p, &cfg)?;
                let filtered = result
                    .cheirank
                    .expect("filtered_cheirank sets the rank vector");
                run.manifest.converged &= filtered.converged;
                iterations.filtered_cheirank = Some(filtered.iterations);
                record.inverted = Some(result.inverted);
                record.fraction = Some(result.fraction);
                let pair = TwoDRanking::new(p.clone(), filtered)?;
                let mut meta = rank_metadata(&pair, params.alpha, params.tol, params.max_iter);
                meta.push(("filter_mode".into(), mode.to_string()));
                meta.push(("filter_eta".into(), eta.to_string()));
                meta.push(("inverted".into(), result.inverted.to_string()));
                meta.push(("fraction".into(), format!("{:e}", result.fraction)));
                run.emit("filtered_rank.tsv", |w| write_rank_table(w, &pair, &meta))?;
            }
            run.manifest.iterations = Some(iterations);
            run.manifest.filter = Some(record);
            run.outcome()
        }
        Command::Matrix(args) => {
            run.start("matrix", &args.out.out)?;
            let g = run.load_graph(&args.graph)?;
            let params = run.rank_params(&args.graph)?;
            let p = pagerank(&g, &params)?;
            run.manifest.converged &= p.converged;
            run.manifest.iterations = Some(IterationRecord {
                pagerank: Some(p.iterations),
                ..Default::default()
            });
            run.manifest.cells = Some(args.cells);
            run.manifest.raw_window = Some(args.raw_window);
            let m = stats::matrix_density_render(
                &g,
                &p.index,
                args.cells,
                params.alpha,
                args.raw_window,
            )?;
            run.emit("matrix.csv", |w| export::write_grid_csv(w, &m.grid))?;
            run.emit("matrix_raw.csv", |w| {
                writeln!(w, "# raw_window {}", m.raw_window)?;
                export::write_square_csv(w, m.raw_window, &m.raw)
            })?;
            run.outcome()
        }
        Command::Twod(args) => {
            run.start("twod", &args.out.out)?;
            let r = run.ranking(&args.graph, args.ranks.as_deref())?;
            let order = two_d_rank(&r);
            run.emit("twod.tsv", |w| export::write_twod_tsv(w, &r, &order))?;
            if let Some(path) = &args.subset {
                let file = open(path)?;
                let subset = read_subset(BufReader::new(file))
                    .with_context(|| format!("reading subset {}", path.display()))?;
                let local = local_rank(&r, &subset)?;
                run.emit("local.tsv", |w| export::write_local_tsv(w, &local))?;
            }
            run.outcome()
        }
        Command::Synth(args) => {
            run.start("synth", &args.out.out)?;
            let g = match args.model {
                Model::ScaleFree => synth_scale_free_with(ScaleFreeConfig {
                    nodes: args.nodes,
                    mu_in: args.mu_in,
                    mu_out: args.mu_out,
                    min_degree: args.min_degree,
                    seed: cli.seed,
                })?,
                Model::Random => {
                    let links = args
                        .links
                        .context("--links is required for the random model")?;
                    synth_random(args.nodes, links, cli.seed)?
                }
            };
            run.manifest.nodes = Some(g.node_count());
            run.manifest.links = Some(g.link_count());
            run.emit("graph.txt", |w| write_edge_list(&g, w))?;
            Outcome::Clean
        }
    };
    run.manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    run.manifest.write(&run.dir)?;
    Ok(outcome)
}

fn replay(manifest: &Path, out: Option<&Path>) -> Result<Outcome> {
    let recorded = RunManifest::read(manifest)
        .with_context(|| format!("reading manifest {}", manifest.display()))?;
    let mut argv = recorded.argv.clone();
    if let Some(out) = out {
        let pos = argv
            .iter()
            .position(|a| a == "--out")
            .context("recorded command has no --out")?;
        argv[pos + 1] = out.display().to_string();
    }
    let full: Vec<String> = std::iter::once("chei2d".to_string())
        .chain(argv.iter().cloned())
        .collect();
    let cli = Cli::try_parse_from(&full).context("recorded arguments no longer parse")?;
    if matches!(cli.command, Command::Replay(_)) {
        bail!("manifest records a replay");
    }
    run(cli, &argv)
}

struct Run {
    manifest: RunManifest,
    dir: PathBuf,
}

impl Run {
    fn start(&mut self, command: &str, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        self.manifest.command = command.to_string();
        self.dir = dir.to_path_buf();
        Ok(())
    }

    fn emit<F>(&mut self, name: &str, write: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
    {
        let path = self.dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        write(&mut w)
            .and_then(|_| w.flush())
            .with_context(|| format!("writing {}", path.display()))?;
        self.manifest.outputs.push(name.to_string());
        Ok(())
    }

    fn rank_params(&mut self, args: &GraphArgs) -> Result<RankParams> {
        self.manifest.alpha = Some(args.alpha);
        self.manifest.tol = Some(args.tol);
        self.manifest.max_iter = Some(args.max_iter);
        Ok(RankParams {
            alpha: args.alpha,
            tol: args.tol,
            max_iter: args.max_iter,
        })
    }

    fn load_graph(&mut self, args: &GraphArgs) -> Result<DirectedGraph> {
        let path = args.input.as_ref().context("--input is required")?;
        self.manifest.input = Some(path.display().to_string());
        self.manifest.weighted = Some(args.weighted);
        let opts = ParseOptions {
            weighted: args.weighted,
            drop_self_loops: args.drop_self_loops,
        };
        let g = parse_edge_list(BufReader::new(open(path)?), opts)
            .with_context(|| format!("parsing {}", path.display()))?;
        self.manifest.nodes = Some(g.node_count());
        self.manifest.links = Some(g.link_count());
        Ok(g)
    }

    /// Loads a rank table, or computes the ranking from `--input`.
    fn ranking(&mut self, args: &GraphArgs, ranks: Option<&Path>) -> Result<TwoDRanking> {
        if let Some(path) = ranks {
            self.manifest.ranks = Some(path.display().to_string());
            let table = read_rank_table(BufReader::new(open(path)?))
                .with_context(|| format!("parsing rank table {}", path.display()))?;
            self.manifest.nodes = Some(table.ranking.node_count());
            return Ok(table.ranking);
        }
        let g = self.load_graph(args)?;
        let params = self.rank_params(args)?;
        let r = two_d_ranking(&g, &params)?;
        self.record_ranking(&r);
        Ok(r)
    }

    fn record_ranking(&mut self, r: &TwoDRanking) {
        self.manifest.converged &= r.converged();
        self.manifest.iterations = Some(IterationRecord {
            pagerank: Some(r.pagerank.iterations),
            cheirank: Some(r.cheirank.iterations),
            filtered_cheirank: None,
        });
    }

    fn outcome(&self) -> Outcome {
        if self.manifest.converged {
            Outcome::Clean
        } else {
            Outcome::NotConverged
        }
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_json<W: Write, T: serde::Serialize>(w: &mut W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)
}
