//! Run directories: one CSV per chain plus a `run.meta` key-value file.
//!
//! Chain CSV columns: `draw, sweep, K, L, alpha, nu, eta`, then `z_1..z_n`,
//! `c_1..c_U` (1-based labels; `U` popularity units), `theta_1..theta_U` and
//! `beta_1..beta_n` (the value of each unit's cluster). Floats use Rust's
//! shortest round-trip formatting, so reading a run back is exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{ChainOutput, Draw, Model};

pub const META_FILE: &str = "run.meta";

pub fn chain_file_name(chain: usize) -> String {
    format!("chain_{}.csv", chain + 1)
}

/// Contents of `run.meta`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub model: Model,
    pub n: usize,
    pub time_points: usize,
    pub chains: usize,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub wall_seconds: Vec<f64>,
    /// Anything else (data paths, rng name, version).
    pub extra: BTreeMap<String, String>,
}

impl RunMeta {
    pub fn from_chains(chains: &[ChainOutput]) -> Result<Self> {
        let first = chains
            .first()
            .ok_or_else(|| Error::InvalidArgument("no chains to describe".into()))?;
        Ok(RunMeta {
            model: first.model,
            n: first.n,
            time_points: first.time_points,
            chains: chains.len(),
            iterations: first.iterations,
            burn_in: first.burn_in,
            thin: first.thin,
            seed: first.seed,
            wall_seconds: chains.iter().map(|c| c.wall_seconds).collect(),
            extra: BTreeMap::new(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "model = {}", self.model);
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "time_points = {}", self.time_points);
        let _ = writeln!(s, "chains = {}", self.chains);
        let _ = writeln!(s, "iterations = {}", self.iterations);
        let _ = writeln!(s, "burn_in = {}", self.burn_in);
        let _ = writeln!(s, "thin = {}", self.thin);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "rng = chacha8");
        let _ = writeln!(
            s,
            "streams = {}",
            (0..self.chains).map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        );
        let _ = writeln!(
            s,
            "wall_seconds = {}",
            self.wall_seconds.iter().map(|w| format!("{w:.3}")).collect::<Vec<_>>().join(",")
        );
        for (k, v) in &self.extra {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: no + 1,
                message: "expected `key = value`".into(),
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut take = |key: &str| {
            map.remove(key).ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                message: format!("missing `{key}`"),
            })
        };
        let num = |key: &str, v: String| -> Result<usize> {
            v.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                message: format!("`{key}` is not a count: `{v}`"),
            })
        };
        let model: Model = take("model")?.parse()?;
        let n = num("n", take("n")?)?;
        let time_points = num("time_points", take("time_points")?)?;
        let chains = num("chains", take("chains")?)?;
        let iterations = num("iterations", take("iterations")?)?;
        let burn_in = num("burn_in", take("burn_in")?)?;
        let thin = num("thin", take("thin")?)?;
        let seed = take("seed")?.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: "`seed` is not an integer".into(),
        })?;
        let wall_seconds = take("wall_seconds")
            .unwrap_or_default()
            .split(',')
            .filter_map(|w| w.trim().parse().ok())
            .collect();
        map.remove("rng");
        map.remove("streams");
        Ok(RunMeta {
            model,
            n,
            time_points,
            chains,
            iterations,
            burn_in,
            thin,
            seed,
            wall_seconds,
            extra: map,
        })
    }
}

fn header(n: usize, units: usize) -> String {
    let mut cols: Vec<String> = ["draw", "sweep", "K", "L", "alpha", "nu", "eta"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend((1..=n).map(|i| format!("z_{i}")));
    cols.extend((1..=units).map(|u| format!("c_{u}")));
    cols.extend((1..=units).map(|u| format!("theta_{u}")));
    cols.extend((1..=n).map(|i| format!("beta_{i}")));
    cols.join(",")
}

pub fn chain_to_csv(chain: &ChainOutput) -> String {
    let units = chain.model.popularity_units(chain.n, chain.time_points);
    let mut s = header(chain.n, units);
    s.push('\n');
    for (d, draw) in chain.draws.iter().enumerate() {
        let _ = write!(
            s,
            "{},{},{},{},{},{},{}",
            d + 1,
            draw.sweep,
            draw.k,
            draw.l,
            draw.alpha,
            draw.nu,
            draw.eta
        );
        for &z in &draw.z {
            let _ = write!(s, ",{}", z + 1);
        }
        for &c in &draw.c {
            let _ = write!(s, ",{}", c + 1);
        }
        for th in draw.theta_per_unit() {
            let _ = write!(s, ",{th}");
        }
        for b in draw.beta_per_actor() {
            let _ = write!(s, ",{b}");
        }
        s.push('\n');
    }
    s
}

/// Cluster values in first-occurrence label order, from per-unit values.
fn cluster_values(labels: &[usize], per_unit: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![f64::NAN; k];
    for (&l, &v) in labels.iter().zip(per_unit) {
        if out[l].is_nan() {
            out[l] = v;
        }
    }
    out
}

pub fn chain_from_csv(path: &Path, text: &str, meta: &RunMeta, chain: usize) -> Result<ChainOutput> {
    let units = meta.model.popularity_units(meta.n, meta.time_points);
    let expected = header(meta.n, units);
    let mut lines = text.lines();
    let bad = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    if lines.next().map(str::trim) != Some(expected.as_str()) {
        return Err(bad(1, "header does not match run.meta".into()));
    }
    let width = 7 + 2 * meta.n + 2 * units;
    let mut draws = Vec::new();
    for (no, line) in lines.enumerate() {
        let line_no = no + 2;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != width {
            return Err(bad(line_no, format!("{} fields, expected {width}", f.len())));
        }
        let int = |s: &str| s.trim().parse::<usize>().map_err(|_| bad(line_no, format!("`{s}` is not a count")));
        let real = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(line_no, format!("`{s}` is not a number")));
        let label = |s: &str| -> Result<usize> {
            let v = int(s)?;
            v.checked_sub(1).ok_or_else(|| bad(line_no, "labels are 1-based".into()))
        };
        let z: Vec<usize> = f[7..7 + meta.n].iter().map(|s| label(s)).collect::<Result<_>>()?;
        let c: Vec<usize> = f[7 + meta.n..7 + meta.n + units].iter().map(|s| label(s)).collect::<Result<_>>()?;
        let theta: Vec<f64> = f[7 + meta.n + units..7 + meta.n + 2 * units]
            .iter()
            .map(|s| real(s))
            .collect::<Result<_>>()?;
        let beta: Vec<f64> = f[7 + meta.n + 2 * units..].iter().map(|s| real(s)).collect::<Result<_>>()?;
        let k = int(f[2])?;
        let l = int(f[3])?;
        if z.iter().any(|&x| x >= k) || c.iter().any(|&x| x >= l) {
            return Err(bad(line_no, "label exceeds cluster count".into()));
        }
        draws.push(Draw {
            sweep: int(f[1])?,
            k,
            l,
            alpha: real(f[4])?,
            nu: real(f[5])?,
            eta: real(f[6])?,
            beta_star: cluster_values(&z, &beta, k),
            theta_star: cluster_values(&c, &theta, l),
            z,
            c,
        });
    }
    Ok(ChainOutput {
        chain,
        model: meta.model,
        n: meta.n,
        time_points: meta.time_points,
        seed: meta.seed,
        stream: chain as u64,
        iterations: meta.iterations,
        burn_in: meta.burn_in,
        thin: meta.thin,
        wall_seconds: meta.wall_seconds.get(chain).copied().unwrap_or(0.0),
        draws,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes `run.meta` and every chain CSV into `dir`, creating it.
pub fn write_run(dir: &Path, meta: &RunMeta, chains: &[ChainOutput]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = vec![dir.join(META_FILE)];
    write_text(&written[0], &meta.to_text())?;
    for c in chains {
        let p = dir.join(chain_file_name(c.chain));
        write_text(&p, &chain_to_csv(c))?;
        written.push(p);
    }
    Ok(written)
}

pub fn read_run(dir: &Path) -> Result<(RunMeta, Vec<ChainOutput>)> {
    let meta_path = dir.join(META_FILE);
    let meta = RunMeta::parse(&meta_path, &read_text(&meta_path)?)?;
    let chains = (0..meta.chains)
        .map(|c| {
            let p = dir.join(chain_file_name(c));
            chain_from_csv(&p, &read_text(&p)?, &meta, c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((meta, chains))
}

/// Two-column `node,label` CSV with 1-based node ids and labels.
pub fn partition_to_csv(labels: &[usize], names: Option<&[String]>) -> String {
    let mut s = String::from(if names.is_some() { "node,name,label\n" } else { "node,label\n" });
    for (i, &l) in labels.iter().enumerate() {
        match names {
            Some(names) => {
                let _ = writeln!(s, "{},{},{}", i + 1, names.get(i).map_or("", String::as_str), l + 1);
            }
            None => {
                let _ = writeln!(s, "{},{}", i + 1, l + 1);
            }
        }
    }
    s
}

/// Reads a partition CSV written by [`partition_to_csv`] (or any file whose
/// last column is the label, one row per unit in order). Returns 0-based
/// labels.
pub fn read_partition(path: &Path) -> Result<Vec<usize>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (no == 0 && line.starts_with("node")) {
            continue;
        }
        let last = line.rsplit(',').next().unwrap_or("");
        let v: usize = last.trim().parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: no + 1,
            message: format!("`{last}` is not a label"),
        })?;
        out.push(v.saturating_sub(1));
    }
    if out.is_empty() {
        return Err(Error::Partition(format!("{} has no rows", path.display())));
    }
    Ok(out)
}

/// Square matrix as CSV with a 1-based index header row and column.
pub fn matrix_to_csv(n: usize, get: impl Fn(usize, usize) -> f64) -> String {
    let mut s = String::from("node");
    for j in 1..=n {
        let _ = write!(s, ",{j}");
    }
    s.push('\n');
    for i in 0..n {
        let _ = write!(s, "{}", i + 1);
        for j in 0..n {
            let _ = write!(s, ",{:.4}", get(i, j));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_chain() -> ChainOutput {
        let draw = Draw {
            sweep: 7,
            z: vec![0, 0, 1],
            c: vec![0, 1, 0],
            k: 2,
            l: 2,
            alpha: 0.1 + 0.2,
            nu: 1.0 / 3.0,
            eta: 0.0,
            beta_star: vec![1.5, -0.25],
            theta_star: vec![-1.0e-7, 2.0],
        };
        ChainOutput {
            chain: 0,
            model: Model::Static,
            n: 3,
            time_points: 1,
            seed: 9,
            stream: 0,
            iterations: 10,
            burn_in: 5,
            thin: 1,
            wall_seconds: 0.5,
            draws: vec![draw],
        }
    }

    #[test]
    fn run_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let chain = sample_chain();
        let meta = RunMeta::from_chains(std::slice::from_ref(&chain)).unwrap();
        write_run(dir.path(), &meta, std::slice::from_ref(&chain)).unwrap();
        let (meta2, chains) = read_run(dir.path()).unwrap();
        assert_eq!(meta2.n, 3);
        assert_eq!(chains[0].draws, chain.draws);
    }

    #[test]
    fn partition_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.csv");
        write_text(&p, &partition_to_csv(&[0, 1, 1, 2], None)).unwrap();
        assert_eq!(read_partition(&p).unwrap(), vec![0, 1, 1, 2]);
    }

    #[test]
    fn corrupt_row_is_reported() {
        let chain = sample_chain();
        let meta = RunMeta::from_chains(std::slice::from_ref(&chain)).unwrap();
        let mut text = chain_to_csv(&chain);
        text.push_str("2,8,1\n");
        let err = chain_from_csv(Path::new("x.csv"), &text, &meta, 0).unwrap_err();
        assert!(err.to_string().contains("x.csv:3"), "{err}");
    }
}
