//! Experiment orchestration: runs every (problem, M, algorithm, seed) cell,
//! writes the raw per-run CSV and a per-cell summary with significance marks
//! against MOEA-CSOD.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::baselines::{nsga2_run, random_search, BaselineConfig};
use crate::dan::DanConfig;
use crate::error::{Error, Result};
use crate::lsmop::{LsmopInstance, DEFAULT_PF_POINTS};
use crate::metrics::{median, significance, Mark};
use crate::moea_csod::{self, CsodConfig, RunResult};
use crate::refvec::Layout;
use crate::rng::RngStream;

pub const RAW_HEADER: &str = "problem,M,D,N,algorithm,seed,generations,igd";
pub const SUMMARY_HEADER: &str = "problem,M,algorithm,median_igd,mark";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algorithm {
    MoeaCsod,
    Nsga2,
    Random,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::MoeaCsod, Algorithm::Nsga2, Algorithm::Random];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::MoeaCsod => "moea-csod",
            Algorithm::Nsga2 => "nsga2",
            Algorithm::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::config(format!("unknown algorithm {s:?}")))
    }
}

/// Population size and dimension used for `m` objectives: the
/// (3,105,300), (6,132,600), (8,156,800), (10,275,1000) protocol, and the
/// default reference-vector count with `D = 100 M` otherwise.
pub fn protocol_size(m: usize) -> (usize, usize) {
    match m {
        3 => (105, 300),
        6 => (132, 600),
        8 => (156, 800),
        10 => (275, 1000),
        _ => (Layout::default_for(m).vectors(m).len(), 100 * m),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problems: Vec<usize>,
    pub objectives: Vec<usize>,
    /// Overrides the protocol dimension for every objective count.
    pub dims: Option<usize>,
    pub algorithms: Vec<Algorithm>,
    pub generations: usize,
    pub runs: usize,
    pub seed: u64,
    pub alpha: f64,
    pub dan: DanConfig,
    pub pf_points: usize,
    pub significance_level: f64,
    pub workers: usize,
    pub out: Option<PathBuf>,
    /// Raw CSV files from external algorithms merged into the summary.
    pub import: Vec<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problems: (1..=9).collect(),
            objectives: vec![3, 6, 8, 10],
            dims: None,
            algorithms: Algorithm::ALL.to_vec(),
            generations: 50,
            runs: 20,
            seed: 0,
            alpha: 2.0,
            dan: DanConfig::default(),
            pf_points: DEFAULT_PF_POINTS,
            significance_level: 0.05,
            workers: 1,
            out: None,
            import: Vec::new(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(format!("invalid value {value:?} for `{key}`")))
}

fn parse_list<T>(value: &str, all: Vec<T>, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    if value == "all" {
        return Ok(all);
    }
    value.split(',').map(|v| item(v.trim())).collect()
}

impl ExperimentConfig {
    /// Set one option by its key (the CLI flag name without dashes).
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "problem" => {
                self.problems = parse_list(value, (1..=9).collect(), |v| {
                    let id = v
                        .strip_prefix("lsmop")
                        .or_else(|| v.strip_prefix("LSMOP"))
                        .unwrap_or(v);
                    match id.parse::<usize>() {
                        Ok(n) if (1..=9).contains(&n) => Ok(n),
                        _ => Err(Error::config(format!("unknown problem {v:?}"))),
                    }
                })?
            }
            "objectives" => {
                self.objectives = parse_list(value, vec![3, 6, 8, 10], |v| parse_num(key, v))?
            }
            "algorithm" => self.algorithms = parse_list(value, Algorithm::ALL.to_vec(), Algorithm::parse)?,
            "dims" => self.dims = Some(parse_num(key, value)?),
            "generations" => self.generations = parse_num(key, value)?,
            "runs" => self.runs = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "workers" => self.workers = parse_num(key, value)?,
            "pf-points" | "pf_points" => self.pf_points = parse_num(key, value)?,
            "significance" => self.significance_level = parse_num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "import" => self.import.push(PathBuf::from(value)),
            "dan-hidden" | "dan_hidden" => self.dan.hidden = parse_num(key, value)?,
            "dan-embed" | "dan_embed" => self.dan.embed_dim = parse_num(key, value)?,
            "dan-noise" | "dan_noise" => self.dan.noise_dim = parse_num(key, value)?,
            "dan-lr" | "dan_lr" => self.dan.learning_rate = parse_num(key, value)?,
            "dan-steps" | "dan_steps" => self.dan.steps_per_generation = parse_num(key, value)?,
            "dan-period" | "dan_period" => self.dan.two_sample_period = parse_num(key, value)?,
            "lambda1" => self.dan.lambda1 = parse_num(key, value)?,
            "lambda2" => self.dan.lambda2 = parse_num(key, value)?,
            _ => return Err(Error::config(format!("unknown option `{key}`"))),
        }
        Ok(())
    }

    /// Apply a flat `key = value` file; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected `key = value`", n + 1)))?;
            self.apply(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::default();
        cfg.apply_file_text(&text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() || self.objectives.is_empty() || self.algorithms.is_empty() {
            return Err(Error::config("problems, objectives and algorithms must be non-empty"));
        }
        if self.runs == 0 || self.workers == 0 {
            return Err(Error::config("runs and workers must be positive"));
        }
        if let Some(&m) = self.objectives.iter().find(|&&m| m < 2) {
            return Err(Error::config(format!("objective count {m} is below 2")));
        }
        self.dan.validate()
    }

    fn csod_config(&self) -> CsodConfig {
        CsodConfig {
            generations: self.generations,
            alpha: self.alpha,
            dan: self.dan.clone(),
            pf_points: self.pf_points,
            ..CsodConfig::default()
        }
    }
}

/// One run of one algorithm on one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub problem: usize,
    pub m: usize,
    pub d: usize,
    pub n: usize,
    pub algorithm: String,
    pub seed: u64,
    pub generations: usize,
    /// Final IGD, or the error that aborted the run.
    pub igd: std::result::Result<f64, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub problem: usize,
    pub m: usize,
    pub algorithm: String,
    pub median_igd: Option<f64>,
    pub mark: Option<Mark>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub cells: Vec<CellResult>,
    pub summary: Vec<SummaryRow>,
}

struct CellSpec {
    problem: usize,
    m: usize,
    d: usize,
    n: usize,
    algorithm: Algorithm,
    seed: u64,
}

fn run_cell(spec: &CellSpec, config: &ExperimentConfig) -> Result<RunResult> {
    let instance = LsmopInstance::new(spec.problem, spec.m, spec.d)?;
    let key = format!("lsmop{}/m{}/{}", spec.problem, spec.m, spec.algorithm.name());
    let mut rng = RngStream::new(spec.seed).split_str(&key);
    match spec.algorithm {
        Algorithm::MoeaCsod => moea_csod::run(&instance, &config.csod_config(), &mut rng),
        Algorithm::Nsga2 | Algorithm::Random => {
            let cfg = BaselineConfig {
                generations: config.generations,
                population_size: Some(spec.n),
                pf_points: config.pf_points,
                ..BaselineConfig::default()
            };
            if spec.algorithm == Algorithm::Nsga2 {
                nsga2_run(&instance, &cfg, &mut rng)
            } else {
                random_search(&instance, &cfg, &mut rng)
            }
        }
    }
}

/// Run every cell of the experiment. Writes `raw.csv`, `summary.csv` (and
/// `errors.txt` when a run failed) into `config.out` when set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let mut specs = Vec::new();
    for &problem in &config.problems {
        for &m in &config.objectives {
            let (protocol_n, protocol_d) = protocol_size(m);
            let d = config.dims.unwrap_or(protocol_d);
            let n = match config.dims {
                None => protocol_n,
                Some(_) => Layout::default_for(m).vectors(m).len(),
            };
            for &algorithm in &config.algorithms {
                for r in 0..config.runs {
                    specs.push(CellSpec {
                        problem,
                        m,
                        d,
                        n,
                        algorithm,
                        seed: config.seed.wrapping_add(r as u64),
                    });
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    let mut cells: Vec<CellResult> = pool.install(|| {
        specs
            .par_iter()
            .map(|spec| CellResult {
                problem: spec.problem,
                m: spec.m,
                d: spec.d,
                n: spec.n,
                algorithm: spec.algorithm.name().to_owned(),
                seed: spec.seed,
                generations: config.generations,
                igd: run_cell(spec, config)
                    .map(|r| r.final_igd())
                    .map_err(|e| e.to_string()),
            })
            .collect()
    });

    let mut imported = Vec::new();
    for path in &config.import {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        imported.extend(parse_raw_csv(&text)?);
    }
    let summary = summarize(cells.iter().chain(&imported), config.significance_level);

    if let Some(dir) = &config.out {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_file(&dir.join("raw.csv"), &raw_csv(&cells))?;
        write_file(&dir.join("summary.csv"), &summary_csv(&summary))?;
        let errors: String = cells
            .iter()
            .filter_map(|c| {
                c.igd.as_ref().err().map(|e| {
                    format!("lsmop{} M={} {} seed={}: {e}\n", c.problem, c.m, c.algorithm, c.seed)
                })
            })
            .collect();
        if !errors.is_empty() {
            write_file(&dir.join("errors.txt"), &errors)?;
        }
    }
    cells.extend(imported);
    Ok(ExperimentOutput { cells, summary })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Medians per (problem, M, algorithm) and rank-sum marks against MOEA-CSOD.
pub fn summarize<'a>(cells: impl IntoIterator<Item = &'a CellResult>, level: f64) -> Vec<SummaryRow> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<(usize, usize), BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    let mut order: Vec<(usize, usize, String)> = Vec::new();
    for c in cells {
        let entry = groups.entry((c.problem, c.m)).or_default();
        if !entry.contains_key(&c.algorithm) {
            order.push((c.problem, c.m, c.algorithm.clone()));
        }
        let samples = entry.entry(c.algorithm.clone()).or_default();
        if let Ok(v) = c.igd {
            samples.push(v);
        }
    }
    order.sort_by(|a, b| {
        (a.0, a.1)
            .cmp(&(b.0, b.1))
            .then_with(|| algorithm_rank(&a.2).cmp(&algorithm_rank(&b.2)))
            .then_with(|| a.2.cmp(&b.2))
    });
    order
        .into_iter()
        .map(|(problem, m, algorithm)| {
            let group = &groups[&(problem, m)];
            let samples = &group[&algorithm];
            let reference = group.get(Algorithm::MoeaCsod.name());
            let mark = match reference {
                Some(r) if algorithm != Algorithm::MoeaCsod.name() => significance(r, samples, level).ok(),
                _ => None,
            };
            SummaryRow {
                problem,
                m,
                algorithm,
                median_igd: median(samples),
                mark,
            }
        })
        .collect()
}

fn algorithm_rank(name: &str) -> usize {
    Algorithm::parse(name).map_or(Algorithm::ALL.len(), |a| a as usize)
}

pub fn raw_csv(cells: &[CellResult]) -> String {
    let mut out = String::from(RAW_HEADER);
    out.push('\n');
    for c in cells {
        let igd = match &c.igd {
            Ok(v) => v.to_string(),
            Err(_) => "NaN".to_owned(),
        };
        let _ = writeln!(
            out,
            "lsmop{},{},{},{},{},{},{},{}",
            c.problem, c.m, c.d, c.n, c.algorithm, c.seed, c.generations, igd
        );
    }
    out
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let median = r.median_igd.map_or_else(|| "NaN".to_owned(), |v| v.to_string());
        let mark = r.mark.map_or_else(String::new, |m| m.to_string());
        let _ = writeln!(out, "lsmop{},{},{},{},{}", r.problem, r.m, r.algorithm, median, mark);
    }
    out
}

/// Parse rows in the raw CSV schema. `NaN` IGD values become failed runs.
pub fn parse_raw_csv(text: &str) -> Result<Vec<CellResult>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == RAW_HEADER => {}
        other => return Err(Error::Parse(format!("unexpected raw CSV header {other:?}"))),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 8 {
                return Err(Error::Parse(format!("raw CSV row {}: expected 8 fields", i + 1)));
            }
            let num = |s: &str| -> Result<u64> {
                s.parse()
                    .map_err(|_| Error::Parse(format!("raw CSV row {}: bad number {s:?}", i + 1)))
            };
            let problem = f[0]
                .trim_start_matches("lsmop")
                .trim_start_matches("LSMOP");
            let igd: f64 = f[7]
                .parse()
                .map_err(|_| Error::Parse(format!("raw CSV row {}: bad IGD {:?}", i + 1, f[7])))?;
            Ok(CellResult {
                problem: num(problem)? as usize,
                m: num(f[1])? as usize,
                d: num(f[2])? as usize,
                n: num(f[3])? as usize,
                algorithm: f[4].to_owned(),
                seed: num(f[5])?,
                generations: num(f[6])? as usize,
                igd: if igd.is_nan() { Err("NaN".to_owned()) } else { Ok(igd) },
            })
        })
        .collect()
}
