//! Subcommand implementations behind the `dcsbm` binary. Argument parsing
//! lives in the binary; everything here takes resolved paths and settings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::analysis::{
    chain_binder, cluster_means, conditional_refit, groups, scalar_summaries, theta_means, ContinuousSummary,
    DiscreteSummary, Partition, RefitReport,
};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::io::{self, RunMeta};
use crate::model::{generate_network, run_chains, ChainConfig, ChainOutput, Model, TiePanel, TrueParams};
use crate::network::{load_edge_list_with_base, load_node_tags, load_snapshots_with_base, Network};
use crate::random::RandomSource;
use crate::svg;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Env var naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "DCSBM_OUTPUT_DIR";

/// Resolved config as written into every run directory.
pub const RUN_CONFIG_FILE: &str = "config.txt";

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: Error,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

fn usage(error: Error) -> Failure {
    Failure { code: EXIT_USAGE, error }
}

fn runtime(error: Error) -> Failure {
    Failure { code: EXIT_RUNTIME, error }
}

pub type CmdResult<T> = std::result::Result<T, Failure>;

/// Loads the network named by `cfg`, with node names and tags if given.
pub fn load_network(cfg: &RunConfig) -> Result<Network> {
    let mut net: Network = if cfg.model.is_dynamic() {
        load_snapshots_with_base(&cfg.data, cfg.index_base)?.into()
    } else {
        let path = cfg
            .data
            .first()
            .ok_or_else(|| Error::Config("no `data` file given".into()))?;
        load_edge_list_with_base(path, cfg.index_base, None)?.into()
    };
    let n = net.n();
    let names = match &cfg.labels {
        Some(p) => {
            let tags = load_node_tags(p)?;
            Some((0..n).map(|i| tags.get(&i).cloned().unwrap_or_else(|| (i + 1).to_string())).collect::<Vec<_>>())
        }
        None => None,
    };
    let attrs = match &cfg.attributes {
        Some(p) => load_node_tags(p)?,
        None => BTreeMap::new(),
    };
    let decorate = |s: &mut crate::network::StaticNetwork| -> Result<()> {
        if let Some(names) = &names {
            s.set_labels(names.clone())?;
        }
        for (&i, tag) in &attrs {
            if i < n {
                s.set_attribute(i, tag.clone())?;
            }
        }
        Ok(())
    };
    match &mut net {
        Network::Static(s) => decorate(s)?,
        Network::Dynamic(d) => {
            let mut snaps = d.snapshots().to_vec();
            for s in &mut snaps {
                decorate(s)?;
            }
            *d = crate::network::DynamicNetwork::new(snaps)?;
        }
    }
    Ok(net)
}

fn node_names(net: &Network) -> Vec<String> {
    (0..net.n()).map(|i| net.snapshot(0).node_name(i)).collect()
}

fn unit_names(model: Model, names: &[String], time_points: usize) -> Vec<String> {
    match model {
        Model::Dynamic1 => (0..time_points)
            .flat_map(|t| names.iter().map(move |s| format!("{s}@{}", t + 1)))
            .collect(),
        _ => names.to_vec(),
    }
}

fn absolutize(p: &Path) -> PathBuf {
    std::fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf())
}

/// Validates, samples all chains, writes the run directory and summaries.
pub fn cmd_fit(cfg: &RunConfig, out_dir: &Path, log: &mut dyn Write) -> CmdResult<Vec<ChainOutput>> {
    cfg.validate().map_err(usage)?;
    let net = load_network(cfg).map_err(usage)?;
    let panel = TiePanel::new(&net, cfg.model).map_err(usage)?;
    let _ = writeln!(
        log,
        "fitting {} model: n = {}, T = {}, edges = {:?}; {} chains x {} sweeps",
        cfg.model,
        panel.n(),
        panel.time_points(),
        (0..panel.time_points()).map(|t| panel.edge_count(t)).collect::<Vec<_>>(),
        cfg.chains.chains,
        cfg.chains.iterations
    );
    let chains = run_chains(&panel, cfg.model, &cfg.hyper, &cfg.chains).map_err(runtime)?;
    let mut meta = RunMeta::from_chains(&chains).map_err(runtime)?;
    meta.extra.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    io::write_run(out_dir, &meta, &chains).map_err(runtime)?;
    let mut resolved = cfg.clone();
    resolved.data = cfg.data.iter().map(|p| absolutize(p)).collect();
    resolved.labels = cfg.labels.as_deref().map(absolutize);
    resolved.attributes = cfg.attributes.as_deref().map(absolutize);
    resolved.output_dir = None;
    io::write_text(&out_dir.join(RUN_CONFIG_FILE), &resolved.to_text()).map_err(runtime)?;
    for c in &chains {
        let _ = writeln!(log, "chain {}: {} draws in {:.1} s", c.chain + 1, c.draws.len(), c.wall_seconds);
    }
    summarize_chains(out_dir, &net, &chains, log).map_err(runtime)?;
    Ok(chains)
}

fn read_run_config(run_dir: &Path) -> Result<RunConfig> {
    RunConfig::load(run_dir.join(RUN_CONFIG_FILE))
}

/// Recomputes every summary file from a run directory.
pub fn cmd_summarize(run_dir: &Path, log: &mut dyn Write) -> CmdResult<Vec<PathBuf>> {
    let cfg = read_run_config(run_dir).map_err(usage)?;
    let (_, chains) = io::read_run(run_dir).map_err(usage)?;
    let net = load_network(&cfg).map_err(usage)?;
    summarize_chains(run_dir, &net, &chains, log).map_err(runtime)
}

fn discrete_csv(s: &DiscreteSummary, chains: &[ChainOutput], f: fn(&crate::model::Draw) -> usize) -> String {
    let mut out = String::from("value,count");
    for c in 0..chains.len() {
        let _ = write!(out, ",chain_{}", c + 1);
    }
    out.push('\n');
    for (&v, &count) in &s.histogram {
        let _ = write!(out, "{v},{count}");
        for c in chains {
            let _ = write!(out, ",{}", c.draws.iter().filter(|d| f(d) == v).count());
        }
        out.push('\n');
    }
    out
}

fn continuous_csv(s: &ContinuousSummary) -> String {
    let mut out = String::from("bin_low,bin_high,count\n");
    for (b, &count) in s.counts.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", s.edges[b], s.edges[b + 1], count);
    }
    out
}

fn describe_groups(labels: &[usize], names: &[String], values: Option<&[f64]>) -> String {
    let mut out = String::new();
    let means = values.map(|v| cluster_means(labels, v));
    for (k, g) in groups(labels).iter().enumerate() {
        let members: Vec<&str> = g.iter().map(|&i| names[i].as_str()).collect();
        match &means {
            Some(m) => {
                let _ = writeln!(out, "  {} (mean theta {:+.3}): {}", k + 1, m[k], members.join(" "));
            }
            None => {
                let _ = writeln!(out, "  {}: {}", k + 1, members.join(" "));
            }
        }
    }
    out
}

/// Writes the summary manifest for `chains` into `dir`.
pub fn summarize_chains(
    dir: &Path,
    net: &Network,
    chains: &[ChainOutput],
    log: &mut dyn Write,
) -> Result<Vec<PathBuf>> {
    let report = scalar_summaries(chains)?;
    let names = node_names(net);
    let model = chains[0].model;
    let units = unit_names(model, &names, chains[0].time_points);
    let mut written = Vec::new();
    let mut put = |name: &str, text: String| -> Result<()> {
        let p = dir.join(name);
        io::write_text(&p, &text)?;
        written.push(p);
        Ok(())
    };

    put("K_hist.csv", discrete_csv(&report.k, chains, |d| d.k))?;
    put("L_hist.csv", discrete_csv(&report.l, chains, |d| d.l))?;
    let bars = |s: &DiscreteSummary| -> Vec<(String, f64)> {
        s.histogram.iter().map(|(v, c)| (v.to_string(), *c as f64)).collect()
    };
    put("K_hist.svg", svg::bar_chart(&bars(&report.k), "Posterior of K (communities)"))?;
    put("L_hist.svg", svg::bar_chart(&bars(&report.l), "Posterior of L (popularity clusters)"))?;
    put("alpha_hist.csv", continuous_csv(&report.alpha))?;
    put("nu_hist.csv", continuous_csv(&report.nu))?;
    if let Some(eta) = &report.eta {
        put("eta_hist.csv", continuous_csv(eta))?;
    }

    let (psm_z, hard_z) = chain_binder(chains, Partition::Community)?;
    let (psm_c, hard_c) = chain_binder(chains, Partition::Popularity)?;
    put("psm_community.csv", io::matrix_to_csv(psm_z.n(), |i, j| psm_z.get(i, j)))?;
    put("psm_popularity.csv", io::matrix_to_csv(psm_c.n(), |i, j| psm_c.get(i, j)))?;
    put(
        "psm_community.svg",
        svg::heatmap(&psm_z, &hard_z.labels, &names, "Posterior similarity: communities"),
    )?;
    put(
        "psm_popularity.svg",
        svg::heatmap(&psm_c, &hard_c.labels, &units, "Posterior similarity: popularity"),
    )?;
    put("binder_community.csv", io::partition_to_csv(&hard_z.labels, Some(&names)))?;
    put("binder_popularity.csv", io::partition_to_csv(&hard_c.labels, Some(&units)))?;

    let theta = theta_means(chains);
    let mut tcsv = String::from("unit,name,theta_mean\n");
    for (u, th) in theta.iter().enumerate() {
        let _ = writeln!(tcsv, "{},{},{}", u + 1, units[u], th);
    }
    put("theta_means.csv", tcsv)?;

    let mut s = String::new();
    let _ = writeln!(s, "model: {model}");
    let _ = writeln!(
        s,
        "draws: {} ({} chains)",
        chains.iter().map(|c| c.draws.len()).sum::<usize>(),
        chains.len()
    );
    let disc = |s: &mut String, name: &str, d: &DiscreteSummary| {
        let _ = writeln!(
            s,
            "{name}: mode {}, mean {:.3}, sd {:.3}, per-chain modes {:?}",
            d.mode,
            d.moments.mean,
            d.moments.sd,
            d.per_chain.iter().map(|p| p.0).collect::<Vec<_>>()
        );
    };
    disc(&mut s, "K", &report.k);
    disc(&mut s, "L", &report.l);
    let cont = |s: &mut String, name: &str, c: &ContinuousSummary| {
        let _ = writeln!(
            s,
            "{name}: mean {:.4}, sd {:.4}, mode {:.4}, psrf {:.4}, P(>0) {:.4}",
            c.moments.mean, c.moments.sd, c.mode, c.psrf, c.positive_fraction
        );
    };
    cont(&mut s, "alpha", &report.alpha);
    cont(&mut s, "nu", &report.nu);
    if let Some(eta) = &report.eta {
        cont(&mut s, "eta", eta);
    }
    let _ = writeln!(
        s,
        "binder communities: {} (expected loss {:.3})",
        hard_z.num_clusters(),
        hard_z.expected_loss
    );
    s.push_str(&describe_groups(&hard_z.labels, &names, None));
    let _ = writeln!(
        s,
        "binder popularity clusters: {} (expected loss {:.3})",
        hard_c.num_clusters(),
        hard_c.expected_loss
    );
    s.push_str(&describe_groups(&hard_c.labels, &units, Some(&theta)));
    let _ = log.write_all(s.as_bytes());
    put("summary.txt", s)?;
    Ok(written)
}

/// Settings for a refit; `None` fields fall back to the run's own config.
#[derive(Debug, Clone, Default)]
pub struct RefitOptions {
    pub community: Option<PathBuf>,
    pub popularity: Option<PathBuf>,
    pub iterations: Option<usize>,
    pub burn_in: Option<usize>,
    pub thin: Option<usize>,
    pub chains: Option<usize>,
    pub seed: Option<u64>,
}

/// Refit table as CSV.
pub fn refit_to_csv(report: &RefitReport, z: &[usize], c: &[usize], names: &[String], units: &[String]) -> String {
    let mut out = String::from("parameter,cluster,size,mean,sd,members\n");
    for (k, (m, g)) in report.beta.iter().zip(groups(z)).enumerate() {
        let members: Vec<&str> = g.iter().map(|&i| names[i].as_str()).collect();
        let _ = writeln!(out, "beta,{},{},{},{},{}", k + 1, report.community_sizes[k], m.mean, m.sd, members.join(" "));
    }
    for (k, (m, g)) in report.theta.iter().zip(groups(c)).enumerate() {
        let members: Vec<&str> = g.iter().map(|&i| units[i].as_str()).collect();
        let _ = writeln!(out, "theta,{},{},{},{},{}", k + 1, report.popularity_sizes[k], m.mean, m.sd, members.join(" "));
    }
    if let Some(e) = &report.eta {
        let _ = writeln!(out, "eta,,,{},{},", e.mean, e.sd);
    }
    out
}

/// Reruns the sampler on fixed partitions (by default the run's Binder
/// partitions) and writes `refit.csv`.
pub fn cmd_refit(run_dir: &Path, opts: &RefitOptions, log: &mut dyn Write) -> CmdResult<RefitReport> {
    let cfg = read_run_config(run_dir).map_err(usage)?;
    let net = load_network(&cfg).map_err(usage)?;
    let panel = TiePanel::new(&net, cfg.model).map_err(usage)?;
    let zp = opts.community.clone().unwrap_or_else(|| run_dir.join("binder_community.csv"));
    let cp = opts.popularity.clone().unwrap_or_else(|| run_dir.join("binder_popularity.csv"));
    let z = io::read_partition(&zp).map_err(usage)?;
    let c = io::read_partition(&cp).map_err(usage)?;
    let base = &cfg.chains;
    let chain_cfg = ChainConfig {
        chains: opts.chains.unwrap_or(base.chains),
        iterations: opts.iterations.unwrap_or(base.iterations),
        burn_in: opts.burn_in.unwrap_or(base.burn_in),
        thin: opts.thin.unwrap_or(base.thin),
        seed: opts.seed.unwrap_or(base.seed),
        jobs: None,
    };
    let report = conditional_refit(&panel, cfg.model, &cfg.hyper, &z, &c, &chain_cfg).map_err(usage)?;
    let names = node_names(&net);
    let units = unit_names(cfg.model, &names, panel.time_points());
    let table = refit_to_csv(&report, &z, &c, &names, &units);
    io::write_text(&run_dir.join("refit.csv"), &table).map_err(runtime)?;
    let _ = log.write_all(table.as_bytes());
    Ok(report)
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Config(format!("`{key}`: `{s}` is not a number"))))
        .collect()
}

/// Parameters for `simulate`, read from a `key = value` file.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulateSettings {
    pub model: Model,
    pub n: usize,
    pub time_points: usize,
    pub params: TrueParams,
    pub seed: u64,
}

impl SimulateSettings {
    /// Keys: `model`, `n`, `time_points`, `seed`, `communities` (1-based
    /// labels, or `blocks = k` for contiguous equal blocks), `popularity`
    /// (1-based labels per unit; default one cluster), `beta`, `theta`,
    /// `eta`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = io::read_text(path)?;
        let mut kv = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: no + 1,
                message: "expected `key = value`".into(),
            })?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| kv.get(k).map(String::as_str);
        let model: Model = get("model").unwrap_or("static").parse()?;
        let n: usize = get("n")
            .ok_or_else(|| Error::Config("`n` is required".into()))?
            .parse()
            .map_err(|_| Error::Config("`n` must be a count".into()))?;
        let time_points: usize = match get("time_points") {
            Some(v) => v.parse().map_err(|_| Error::Config("`time_points` must be a count".into()))?,
            None if model.is_dynamic() => 2,
            None => 1,
        };
        let seed: u64 = get("seed").unwrap_or("1").parse().map_err(|_| Error::Config("`seed` must be an integer".into()))?;
        let one_based = |key: &str, v: Vec<usize>| -> Result<Vec<usize>> {
            v.into_iter()
                .map(|l| l.checked_sub(1).ok_or_else(|| Error::Config(format!("`{key}` labels are 1-based"))))
                .collect()
        };
        let z = match (get("communities"), get("blocks")) {
            (Some(v), _) => one_based("communities", parse_list("communities", v)?)?,
            (None, Some(b)) => {
                let b: usize = b.parse().map_err(|_| Error::Config("`blocks` must be a count".into()))?;
                TrueParams::planted(n, b.max(1), 0.0, 0.0).z
            }
            (None, None) => vec![0; n],
        };
        let units = model.popularity_units(n, time_points);
        let c = match get("popularity") {
            Some(v) => one_based("popularity", parse_list("popularity", v)?)?,
            None => vec![0; units],
        };
        let k = z.iter().max().map_or(0, |m| m + 1);
        let mut beta_star: Vec<f64> = parse_list("beta", get("beta").unwrap_or("0"))?;
        if beta_star.len() == 1 && k > 1 {
            beta_star = vec![beta_star[0]; k];
        }
        let l = c.iter().max().map_or(0, |m| m + 1);
        let mut theta_star: Vec<f64> = parse_list("theta", get("theta").unwrap_or("0"))?;
        if theta_star.len() == 1 && l > 1 {
            theta_star = vec![theta_star[0]; l];
        }
        let eta: f64 = get("eta").unwrap_or("0").parse().map_err(|_| Error::Config("`eta` must be a number".into()))?;
        for key in kv.keys() {
            if !["model", "n", "time_points", "seed", "communities", "blocks", "popularity", "beta", "theta", "eta"]
                .contains(&key.as_str())
            {
                return Err(Error::Config(format!("unknown key `{key}`")));
            }
        }
        Ok(SimulateSettings {
            model,
            n,
            time_points,
            params: TrueParams { z, c, beta_star, theta_star, eta },
            seed,
        })
    }
}

/// Writes one edge list per time point plus the true partitions.
pub fn cmd_simulate(params: &Path, out_dir: &Path, log: &mut dyn Write) -> CmdResult<Vec<PathBuf>> {
    let sim = SimulateSettings::load(params).map_err(usage)?;
    let mut rng = RandomSource::new(sim.seed, 0);
    let net = generate_network(&mut rng, sim.n, sim.time_points, sim.model, &sim.params).map_err(usage)?;
    std::fs::create_dir_all(out_dir).map_err(|e| runtime(Error::io(out_dir, e)))?;
    let mut written = Vec::new();
    let mut put = |name: String, text: String| -> Result<()> {
        let p = out_dir.join(name);
        io::write_text(&p, &text)?;
        written.push(p);
        Ok(())
    };
    (|| -> Result<()> {
        match &net {
            Network::Static(s) => put("network.txt".into(), s.to_edge_list_string())?,
            Network::Dynamic(d) => {
                for (t, s) in d.snapshots().iter().enumerate() {
                    put(format!("snapshot_{}.txt", t + 1), s.to_edge_list_string())?;
                }
            }
        }
        put("truth_community.csv".into(), io::partition_to_csv(&sim.params.z, None))?;
        put("truth_popularity.csv".into(), io::partition_to_csv(&sim.params.c, None))?;
        Ok(())
    })()
    .map_err(runtime)?;
    for t in 0..net.time_points() {
        let _ = writeln!(log, "time point {}: {} edges", t + 1, net.snapshot(t).edge_count());
    }
    Ok(written)
}

/// Loads each file (or the files as one panel) and reports basic counts.
pub fn cmd_validate_data(paths: &[PathBuf], cfg: &RunConfig, log: &mut dyn Write) -> CmdResult<()> {
    let mut cfg = cfg.clone();
    if !paths.is_empty() {
        cfg.data = paths.to_vec();
    }
    if cfg.data.is_empty() {
        return Err(usage(Error::Config("no data files given".into())));
    }
    if cfg.data.len() > 1 && !cfg.model.is_dynamic() {
        cfg.model = Model::Dynamic1;
    }
    let net = load_network(&cfg).map_err(usage)?;
    let _ = writeln!(log, "n = {}, time points = {}", net.n(), net.time_points());
    for t in 0..net.time_points() {
        let s = net.snapshot(t);
        let deg = s.degrees();
        let max = deg.iter().copied().max().unwrap_or(0);
        let isolated = deg.iter().filter(|&&d| d == 0).count();
        let _ = writeln!(
            log,
            "snapshot {}: {} edges, max degree {max}, isolated nodes {isolated}",
            t + 1,
            s.edge_count()
        );
    }
    Ok(())
}
