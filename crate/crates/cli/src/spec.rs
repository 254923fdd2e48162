//! Parsing of graph sources, start schemes and lifespan lists.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use collab_walk::scheme::{normalize, uniform};
use collab_walk::{Network, StartScheme, TransitionKernel};

/// Parses a generator spec (`cycle:3`, `complete:4`, `path:5`, `torus:3,5`,
/// `gnp:30,0.2,7`) or, failing that, reads an edge-list file.
pub fn parse_graph(source: &str) -> Result<Network> {
    if let Some((kind, args)) = source.split_once(':') {
        let fields: Vec<&str> = args.split(',').map(str::trim).collect();
        let int = |i: usize| -> Result<usize> {
            fields
                .get(i)
                .with_context(|| format!("`{source}` is missing argument {}", i + 1))?
                .parse()
                .with_context(|| format!("`{source}`: argument {} is not an integer", i + 1))
        };
        let arity = |want: usize| -> Result<()> {
            if fields.len() != want {
                bail!("`{source}` expects {want} argument(s), got {}", fields.len());
            }
            Ok(())
        };
        let net = match kind {
            "cycle" => {
                arity(1)?;
                Network::cycle(int(0)?)?
            }
            "complete" => {
                arity(1)?;
                Network::complete(int(0)?)?
            }
            "path" => {
                arity(1)?;
                Network::path(int(0)?)?
            }
            "torus" => {
                arity(2)?;
                Network::torus(int(0)?, int(1)?)?
            }
            "gnp" => {
                arity(3)?;
                let p: f64 = fields[1]
                    .parse()
                    .with_context(|| format!("`{source}`: edge probability is not a number"))?;
                let seed: u64 = fields[2]
                    .parse()
                    .with_context(|| format!("`{source}`: seed is not an integer"))?;
                Network::gnp(int(0)?, p, seed)?
            }
            _ if Path::new(source).exists() => Network::read_edge_list(source)?,
            other => bail!("unknown generator `{other}` (expected cycle, complete, path, torus or gnp)"),
        };
        return Ok(net);
    }
    Network::read_edge_list(source).with_context(|| format!("cannot read edge list `{source}`"))
}

/// Comma-separated lifespans; a single value is repeated for every walker.
/// Returns the lifespans and the resolved walker count.
pub fn parse_lifespans(list: &str, k: Option<usize>) -> Result<Vec<f64>> {
    let values = list
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|t| t.is_finite() && *t >= 0.0)
                .with_context(|| format!("`{s}` is not a nonnegative lifespan"))
        })
        .collect::<Result<Vec<f64>>>()?;
    match k {
        None => Ok(values),
        Some(0) => bail!("at least one walker is required"),
        Some(k) if values.len() == 1 => Ok(vec![values[0]; k]),
        Some(k) if values.len() == k => Ok(values),
        Some(k) => bail!("{} lifespans given for {k} walkers", values.len()),
    }
}

fn read_distribution(path: &str, n: usize) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read `{path}`"))?;
    let weights = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(i, l)| {
            l.parse::<f64>()
                .with_context(|| format!("`{path}` entry {}: `{l}` is not a number", i + 1))
        })
        .collect::<Result<Vec<f64>>>()?;
    if weights.len() != n {
        bail!("`{path}` holds {} weights for a graph with {n} vertices", weights.len());
    }
    Ok(normalize(&weights)?)
}

/// Scheme mini-language: `iid-stationary`, `iid-uniform`,
/// `shared-stationary`, `shared-uniform`, `point:<v>[,<v>…]`, `dist:<path>`.
pub fn parse_scheme(spec: &str, kernel: &TransitionKernel, k: usize) -> Result<StartScheme> {
    let n = kernel.vertex_count();
    let scheme = match spec {
        "iid-stationary" => StartScheme::iid_stationary(kernel, k),
        "iid-uniform" => StartScheme::iid(uniform(n), k),
        "shared-stationary" => StartScheme::SharedPoint(kernel.pi().to_vec()),
        "shared-uniform" => StartScheme::SharedPoint(uniform(n)),
        _ => {
            if let Some(list) = spec.strip_prefix("point:") {
                let points = list
                    .split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<usize>()
                            .with_context(|| format!("`{v}` is not a vertex"))
                    })
                    .collect::<Result<Vec<usize>>>()?;
                let points = match points.len() {
                    1 => vec![points[0]; k],
                    m if m == k => points,
                    m => bail!("{m} start points given for {k} walkers"),
                };
                if let Some(&v) = points.iter().find(|&&v| v >= n) {
                    bail!("start vertex {v} is outside 0..{n}");
                }
                StartScheme::FixedPoints(points)
            } else if let Some(path) = spec.strip_prefix("dist:") {
                StartScheme::iid(read_distribution(path, n)?, k)
            } else {
                bail!("unknown scheme `{spec}`");
            }
        }
    };
    scheme.validate(n, k)?;
    Ok(scheme)
}

/// Comma-separated list of nonnegative reals.
pub fn parse_reals(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x >= 0.0)
                .with_context(|| format!("`{s}` is not a nonnegative number"))
        })
        .collect()
}
