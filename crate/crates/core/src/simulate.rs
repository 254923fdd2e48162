//! Seeded Monte Carlo estimates of the union of ranges.
//!
//! Replica `i` of a job draws every random number from its own ChaCha
//! stream `(seed, i)`, and results are aggregated in replica order, so an
//! estimate depends only on the job and never on the thread pool.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::chain::{TransitionKernel, Variant};
use crate::error::{Error, Result};
use crate::rng::replica_rng;
use crate::scheme::StartScheme;
use crate::survival::check_time_for;

/// A batch of independent replicas of one `k`-walker experiment.
#[derive(Debug, Clone)]
pub struct WalkJob<'a> {
    pub kernel: &'a TransitionKernel,
    pub scheme: StartScheme,
    pub lifespans: Vec<f64>,
    pub replicas: u64,
    pub seed: u64,
    /// Keep per-replica union sizes for CDFs.
    pub retain_samples: bool,
}

impl<'a> WalkJob<'a> {
    pub fn new(
        kernel: &'a TransitionKernel,
        scheme: StartScheme,
        lifespans: Vec<f64>,
        replicas: u64,
        seed: u64,
    ) -> Result<Self> {
        let job = WalkJob {
            kernel,
            scheme,
            lifespans,
            replicas,
            seed,
            retain_samples: false,
        };
        job.validate()?;
        Ok(job)
    }

    pub fn retaining_samples(mut self) -> Self {
        self.retain_samples = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::InvalidJob("at least one replica is required".into()));
        }
        for &t in &self.lifespans {
            check_time_for(self.kernel.variant(), t)?;
        }
        self.scheme
            .validate(self.kernel.vertex_count(), self.lifespans.len())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub replicas: u64,
    pub samples: Option<Vec<u32>>,
    pub seed: u64,
}

/// Right-continuous step function as `(value, P(X ≤ value))` pairs.
pub type EmpiricalCdf = Vec<(u32, f64)>;

enum StartSampler {
    Iid(Vec<WeightedIndex<f64>>),
    Shared(WeightedIndex<f64>),
    Fixed(Vec<usize>),
    Coupled(WeightedIndex<f64>, usize),
}

/// Per-job tables shared by all replicas.
struct Prepared<'a> {
    job: &'a WalkJob<'a>,
    cumulative: Vec<Vec<f64>>,
    starts: StartSampler,
}

fn weighted(weights: &[f64]) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(weights).map_err(|e| Error::InvalidScheme(e.to_string()))
}

impl<'a> Prepared<'a> {
    fn new(job: &'a WalkJob<'a>) -> Result<Self> {
        job.validate()?;
        let kernel = job.kernel;
        let cumulative = (0..kernel.vertex_count())
            .map(|x| {
                kernel
                    .row(x)
                    .iter()
                    .scan(0.0, |acc, &(_, p)| {
                        *acc += p;
                        Some(*acc)
                    })
                    .collect()
            })
            .collect();
        let starts = match &job.scheme {
            StartScheme::IidProduct(measures) => {
                StartSampler::Iid(measures.iter().map(|m| weighted(m)).collect::<Result<_>>()?)
            }
            StartScheme::SharedPoint(nu) => StartSampler::Shared(weighted(nu)?),
            StartScheme::FixedPoints(points) => StartSampler::Fixed(points.clone()),
            StartScheme::Coupling(c) => StartSampler::Coupled(weighted(c.table())?, c.vertex_count()),
        };
        Ok(Prepared {
            job,
            cumulative,
            starts,
        })
    }

    fn step<R: Rng>(&self, x: usize, rng: &mut R) -> usize {
        let cum = &self.cumulative[x];
        let row = self.job.kernel.row(x);
        let u = rng.random::<f64>() * cum[cum.len() - 1];
        let i = cum.partition_point(|&c| c <= u).min(row.len() - 1);
        row[i].0
    }

    fn draw_starts<R: Rng>(&self, rng: &mut R, out: &mut Vec<usize>) {
        let k = self.job.lifespans.len();
        out.clear();
        match &self.starts {
            StartSampler::Iid(samplers) => out.extend(samplers.iter().map(|s| s.sample(rng))),
            StartSampler::Shared(s) => {
                let x = s.sample(rng);
                out.extend(std::iter::repeat_n(x, k));
            }
            StartSampler::Fixed(points) => out.extend_from_slice(points),
            StartSampler::Coupled(s, n) => {
                let mut cell = s.sample(rng);
                for _ in 0..k {
                    out.push(cell % n);
                    cell /= n;
                }
            }
        }
    }

    fn run(&self, index: u64, scratch: &mut Scratch) -> u32 {
        let mut rng = replica_rng(self.job.seed, index);
        self.draw_starts(&mut rng, &mut scratch.starts);
        scratch.visited.fill(0);
        let mut count = 0u32;
        let mut mark = |visited: &mut [u64], x: usize| {
            let (word, bit) = (x / 64, 1u64 << (x % 64));
            if visited[word] & bit == 0 {
                visited[word] |= bit;
                count += 1;
            }
        };
        let continuous = self.job.kernel.variant() == Variant::ContinuousTime;
        for (i, &lifespan) in self.job.lifespans.iter().enumerate() {
            let mut pos = scratch.starts[i];
            mark(&mut scratch.visited, pos);
            if continuous {
                let mut clock = 0.0;
                loop {
                    let hold: f64 = rng.sample(Exp1);
                    clock += hold;
                    if clock > lifespan {
                        break;
                    }
                    pos = self.step(pos, &mut rng);
                    mark(&mut scratch.visited, pos);
                }
            } else {
                for _ in 0..lifespan as u64 {
                    pos = self.step(pos, &mut rng);
                    mark(&mut scratch.visited, pos);
                }
            }
        }
        count
    }
}

struct Scratch {
    visited: Vec<u64>,
    starts: Vec<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            visited: vec![0; n.div_ceil(64)],
            starts: Vec::new(),
        }
    }
}

/// Union size of replica `replica_index`; a pure function of the job and index.
pub fn sample_union(job: &WalkJob<'_>, replica_index: u64) -> Result<u32> {
    let prepared = Prepared::new(job)?;
    Ok(prepared.run(replica_index, &mut Scratch::new(job.kernel.vertex_count())))
}

/// Mean and standard error over all replicas.
pub fn estimate(job: &WalkJob<'_>) -> Result<RangeEstimate> {
    let prepared = Prepared::new(job)?;
    let n = job.kernel.vertex_count();
    let samples: Vec<u32> = (0..job.replicas)
        .into_par_iter()
        .map_init(|| Scratch::new(n), |scratch, i| prepared.run(i, scratch))
        .collect();
    let (mean, std_error) = mean_and_std_error(&samples);
    Ok(RangeEstimate {
        mean,
        std_error,
        replicas: job.replicas,
        samples: job.retain_samples.then_some(samples),
        seed: job.seed,
    })
}

/// Sample mean and `s / √R` with the `R − 1` variance denominator.
pub fn mean_and_std_error(samples: &[u32]) -> (f64, f64) {
    let r = samples.len() as f64;
    let mean = samples.iter().map(|&s| s as f64).sum::<f64>() / r;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = samples.iter().map(|&s| (s as f64 - mean).powi(2)).sum();
    (mean, (ss / (r - 1.0)).sqrt() / r.sqrt())
}

pub fn empirical_cdf(estimate: &RangeEstimate) -> Result<EmpiricalCdf> {
    let samples = estimate.samples.as_ref().ok_or(Error::SamplesNotRetained)?;
    Ok(cdf_of(samples))
}

/// Empirical CDF of a sample.
pub fn cdf_of(samples: &[u32]) -> EmpiricalCdf {
    let mut counts = BTreeMap::new();
    for &s in samples {
        *counts.entry(s).or_insert(0u64) += 1;
    }
    let total = samples.len() as f64;
    let mut running = 0u64;
    counts
        .into_iter()
        .map(|(value, c)| {
            running += c;
            (value, running as f64 / total)
        })
        .collect()
}

/// Evaluates a step CDF at `y`.
pub fn cdf_at(cdf: &[(u32, f64)], y: f64) -> f64 {
    cdf.iter()
        .take_while(|&&(v, _)| v as f64 <= y)
        .last()
        .map_or(0.0, |&(_, p)| p)
}
