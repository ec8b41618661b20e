//! Benchmark campaigns: generated instances, solver runs, CSV records.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::solver::{bw_tba_solve_with, es_solve, Algorithm, Budget, BwOptions};
use crate::strategy::edf_schedulable;
use crate::task_model::{generate_instance, DeadlineMode, InstanceParams, TaskSet};

/// Name of the generator recorded in every row.
pub const RNG_NAME: &str = "chacha8";

pub const SCHEMA_LINE: &str = "# schema=1";

/// Child seed for instance `idx` of a campaign (splitmix64 finalizer).
pub fn derive_seed(campaign_seed: u64, idx: u64) -> u64 {
    let mut z = campaign_seed.wrapping_add(idx.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parses `3/2`, `1.5` or `2` exactly.
pub fn parse_ratio(text: &str) -> Result<Ratio<u64>> {
    let bad = || Error::InvalidArgument(format!("not a non-negative rational: `{text}`"));
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.len() > 18 || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let n: u64 = digits.parse().map_err(|_| bad())?;
    Ok(Ratio::new(n, 10u64.pow(frac.len() as u32)))
}

fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn ratio_text(r: &Ratio<u64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

mod ratio_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&ratio_text(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Ratio<u64>, D::Error> {
        let text = String::deserialize(d)?;
        parse_ratio(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RatioSpec {
    Integer(u64),
    Number(f64),
    Text(String),
}

impl RatioSpec {
    fn to_ratio(&self) -> Result<Ratio<u64>> {
        match self {
            RatioSpec::Integer(n) => Ok(Ratio::from_integer(*n)),
            // Shortest round-trip formatting recovers the literal written.
            RatioSpec::Number(x) => parse_ratio(&format!("{x}")),
            RatioSpec::Text(t) => parse_ratio(t),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CampaignFile {
    seed: u64,
    cpus: u32,
    tasks: usize,
    instances_per_point: usize,
    utilizations: Vec<RatioSpec>,
    t_min: u32,
    t_max: u32,
    #[serde(default)]
    deadline_mode: Option<String>,
    #[serde(default)]
    algorithms: Option<Vec<String>>,
}

/// A benchmark campaign: `instances_per_point` instances for each target
/// utilization.
#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    pub seed: u64,
    pub cpus: u32,
    pub tasks: usize,
    pub instances_per_point: usize,
    pub utilizations: Vec<Ratio<u64>>,
    pub t_min: u32,
    pub t_max: u32,
    pub deadline_mode: DeadlineMode,
    /// Algorithms named in the file, if any.
    pub algorithms: Vec<Algorithm>,
}

impl Campaign {
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: CampaignFile =
            toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("campaign: {e}")))?;
        let utilizations = file
            .utilizations
            .iter()
            .map(RatioSpec::to_ratio)
            .collect::<Result<Vec<_>>>()?;
        let deadline_mode = match file.deadline_mode {
            Some(m) => m.parse()?,
            None => DeadlineMode::default(),
        };
        let algorithms = file
            .algorithms
            .unwrap_or_default()
            .iter()
            .map(|a| a.parse())
            .collect::<Result<Vec<_>>>()?;
        Ok(Campaign {
            seed: file.seed,
            cpus: file.cpus,
            tasks: file.tasks,
            instances_per_point: file.instances_per_point,
            utilizations,
            t_min: file.t_min,
            t_max: file.t_max,
            deadline_mode,
            algorithms,
        })
    }

    /// Every instance as `(instance_id, utilization, seed, task set)`.
    pub fn instances(&self) -> Result<Vec<(u64, Ratio<u64>, u64, TaskSet)>> {
        let mut out = Vec::new();
        for (p, &u) in self.utilizations.iter().enumerate() {
            for k in 0..self.instances_per_point {
                let id = (p * self.instances_per_point + k) as u64;
                let seed = derive_seed(self.seed, id);
                let params = InstanceParams {
                    tasks: self.tasks,
                    cpus: self.cpus,
                    utilization: ratio_to_f64(u),
                    t_min: self.t_min,
                    t_max: self.t_max,
                    deadline_mode: self.deadline_mode,
                };
                let ts = generate_instance(&params, &mut rng_for(seed))?;
                out.push((id, u, seed, ts));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    /// The run hit its budget.
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::Inconclusive => None,
        }
    }
}

fn serialize_algorithm<S: Serializer>(a: &Algorithm, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(a.name())
}

fn deserialize_algorithm<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Algorithm, D::Error> {
    let text = String::deserialize(d)?;
    text.parse().map_err(serde::de::Error::custom)
}

fn serialize_mode<S: Serializer>(m: &DeadlineMode, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&m.to_string())
}

fn deserialize_mode<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<DeadlineMode, D::Error> {
    let text = String::deserialize(d)?;
    text.parse().map_err(serde::de::Error::custom)
}

/// One CSV row: one algorithm on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub instance_id: u64,
    pub n: usize,
    pub m: u32,
    #[serde(with = "ratio_serde")]
    pub u_target: Ratio<u64>,
    pub t_min: u32,
    pub t_max: u32,
    #[serde(serialize_with = "serialize_mode", deserialize_with = "deserialize_mode")]
    pub deadline_mode: DeadlineMode,
    pub seed: u64,
    pub rng: String,
    #[serde(serialize_with = "serialize_algorithm", deserialize_with = "deserialize_algorithm")]
    pub algorithm: Algorithm,
    pub feasible: Verdict,
    pub explored_nodes: u64,
    pub peak_set_size: u64,
    pub iterations: u32,
    pub wall_time_ms: f64,
}

struct RunResult {
    verdict: Verdict,
    explored: u64,
    peak: u64,
    iterations: u32,
    wall_ms: f64,
}

fn run_one(ts: &TaskSet, algorithm: Algorithm, budget: Budget) -> Result<RunResult> {
    let start = std::time::Instant::now();
    let outcome = match algorithm {
        Algorithm::Es => es_solve(ts, budget).map(|o| (o.feasible, o.metrics, o.iterations)),
        Algorithm::BwTba | Algorithm::BwTbaNoFrontier => {
            let opts = BwOptions {
                use_frontier: algorithm == Algorithm::BwTba,
                budget,
                ..BwOptions::default()
            };
            bw_tba_solve_with(ts, &opts).map(|o| (o.feasible, o.metrics, o.iterations))
        }
        Algorithm::Edf => edf_schedulable(ts, budget).map(|r| (r.schedulable, r.metrics, 0)),
    };
    match outcome {
        Ok((feasible, metrics, iterations)) => Ok(RunResult {
            verdict: Verdict::from_bool(feasible),
            explored: metrics.explored_nodes,
            peak: metrics.peak_set_size as u64,
            iterations,
            wall_ms: metrics.wall_time_ms(),
        }),
        Err(Error::BudgetExceeded { explored, .. }) => Ok(RunResult {
            verdict: Verdict::Inconclusive,
            explored,
            peak: 0,
            iterations: 0,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        }),
        Err(e) => Err(e),
    }
}

/// Runs every algorithm on every instance, rows sorted by
/// `(instance_id, algorithm)`. `threads = None` uses rayon's default pool.
pub fn run_campaign(
    campaign: &Campaign,
    algorithms: &[Algorithm],
    budget: Budget,
    threads: Option<usize>,
) -> Result<Vec<ExperimentRecord>> {
    if algorithms.is_empty() {
        return Err(Error::InvalidArgument("no algorithms selected".into()));
    }
    let instances = campaign.instances()?;
    let work = || -> Result<Vec<ExperimentRecord>> {
        let nested: Vec<Result<Vec<ExperimentRecord>>> = instances
            .par_iter()
            .map(|(id, u, seed, ts)| {
                algorithms
                    .iter()
                    .map(|&algorithm| {
                        let r = run_one(ts, algorithm, budget)?;
                        Ok(ExperimentRecord {
                            instance_id: *id,
                            n: ts.len(),
                            m: ts.cpus(),
                            u_target: *u,
                            t_min: campaign.t_min,
                            t_max: campaign.t_max,
                            deadline_mode: campaign.deadline_mode,
                            seed: *seed,
                            rng: RNG_NAME.to_string(),
                            algorithm,
                            feasible: r.verdict,
                            explored_nodes: r.explored,
                            peak_set_size: r.peak,
                            iterations: r.iterations,
                            wall_time_ms: r.wall_ms,
                        })
                    })
                    .collect()
            })
            .collect();
        let mut rows = Vec::new();
        for chunk in nested {
            rows.extend(chunk?);
        }
        rows.sort_by_key(|r| (r.instance_id, r.algorithm));
        Ok(rows)
    };
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(work),
        None => work(),
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidArgument(format!("csv: {other:?}")),
    }
}

pub fn write_csv<W: Write>(records: &[ExperimentRecord], mut out: W) -> Result<()> {
    writeln!(out, "{SCHEMA_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ExperimentRecord>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

/// Aggregates for one utilization bucket.
#[derive(Debug, Clone, PartialEq)]
pub struct BucketSummary {
    pub u_target: Ratio<u64>,
    pub instances: usize,
    /// Per algorithm: (feasible count, conclusive count).
    pub feasible: BTreeMap<Algorithm, (usize, usize)>,
    /// Median of `explored(es) / explored(bw-tba)` over instances where
    /// both are conclusive.
    pub median_es_over_bw: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub buckets: Vec<BucketSummary>,
    pub median_es_over_bw: Option<f64>,
    /// Instances where es and bw-tba both concluded but disagree.
    pub disagreements: Vec<u64>,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let k = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[k]
    } else {
        (values[k - 1] + values[k]) / 2.0
    })
}

pub fn summarize(records: &[ExperimentRecord]) -> Summary {
    let mut by_instance: BTreeMap<u64, Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        by_instance.entry(r.instance_id).or_default().push(r);
    }
    let mut buckets: BTreeMap<Ratio<u64>, (BucketSummary, Vec<f64>)> = BTreeMap::new();
    let mut all_ratios = Vec::new();
    let mut disagreements = Vec::new();
    for (id, rows) in &by_instance {
        let u = rows[0].u_target;
        let (bucket, ratios) = buckets.entry(u).or_insert_with(|| {
            (
                BucketSummary {
                    u_target: u,
                    instances: 0,
                    feasible: BTreeMap::new(),
                    median_es_over_bw: None,
                },
                Vec::new(),
            )
        });
        bucket.instances += 1;
        for r in rows {
            let entry = bucket.feasible.entry(r.algorithm).or_default();
            if let Some(f) = r.feasible.as_bool() {
                entry.1 += 1;
                entry.0 += usize::from(f);
            }
        }
        let find = |a| rows.iter().find(|r| r.algorithm == a && r.feasible != Verdict::Inconclusive);
        if let (Some(es), Some(bw)) = (find(Algorithm::Es), find(Algorithm::BwTba)) {
            if es.feasible != bw.feasible {
                disagreements.push(*id);
            }
            if bw.explored_nodes > 0 {
                let ratio = es.explored_nodes as f64 / bw.explored_nodes as f64;
                ratios.push(ratio);
                all_ratios.push(ratio);
            }
        }
    }
    let buckets = buckets
        .into_values()
        .map(|(mut b, mut ratios)| {
            b.median_es_over_bw = median(&mut ratios);
            b
        })
        .collect();
    Summary {
        buckets,
        median_es_over_bw: median(&mut all_ratios),
        disagreements,
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "u_target,instances,algorithm,feasible,conclusive,ratio")?;
        for b in &self.buckets {
            for (a, (feasible, conclusive)) in &b.feasible {
                let ratio = if *conclusive == 0 {
                    f64::NAN
                } else {
                    *feasible as f64 / *conclusive as f64
                };
                writeln!(
                    f,
                    "{},{},{},{},{},{:.3}",
                    ratio_text(&b.u_target),
                    b.instances,
                    a,
                    feasible,
                    conclusive,
                    ratio
                )?;
            }
        }
        match self.median_es_over_bw {
            Some(m) => writeln!(f, "median explored es/bw-tba: {m:.3}")?,
            None => writeln!(f, "median explored es/bw-tba: n/a")?,
        }
        writeln!(f, "es/bw-tba disagreements: {}", self.disagreements.len())
    }
}

impl FromStr for Campaign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Campaign::from_toml(s)
    }
}
