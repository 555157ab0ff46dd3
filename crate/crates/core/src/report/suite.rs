//! Suite expansion and execution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

use crate::corpus::{build_corpus, CorpusOptions, TestFunction};
use crate::error::{Error, Result};
use crate::geometry::Setting;
use crate::quadrature::QuadratureSpec;
use crate::verifiers::{
    consistency_triangle, heisenberg_collapse_residual, heisenberg_spot_check, homogeneous_cartesian_check,
    identity_terms, sharpness_sweep, verify_ckn, verify_higher_ckn, verify_higher_order_identity, verify_identity,
    verify_inequality, verify_uncertainty, ExponentTuple, InequalityKind, QuadDiagnostics, RecordKind, SweepStatement,
    UncertaintyKind, Verdict, VerificationRecord,
};

use super::config::SuiteConfig;
use super::statements::{lookup, StatementClass, STATEMENTS};
use super::{CheckEntry, Report, StatementSummary, Summary, SweepEntry, SCHEMA_VERSION};

pub const COLLAPSE_SAMPLES: usize = 1000;
pub const COLLAPSE_TOLERANCE: f64 = 1e-14;
pub const TENSOR_TOLERANCE: f64 = 1e-6;
pub const CARTESIAN_TOLERANCE: f64 = 1e-7;
pub const EUCLIDEAN_MATCH_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
enum Task {
    Identity { p: f64 },
    Consistency,
    Higher { k: usize },
    Ineq { kind: InequalityKind, p: f64 },
    Ckn { e: ExponentTuple },
    HigherCkn { k: usize, e: ExponentTuple },
    Uncert { kind: UncertaintyKind },
}

#[derive(Debug, Clone)]
struct Job {
    statement: &'static str,
    setting: Setting,
    radial_only: bool,
    params: Vec<(&'static str, f64)>,
    task: Task,
}

impl Job {
    fn new(statement: &'static str, setting: &Setting, params: Vec<(&'static str, f64)>, task: Task) -> Self {
        Self {
            statement,
            setting: setting.clone(),
            radial_only: false,
            params,
            task,
        }
    }

    fn corpus_key(&self) -> (String, bool) {
        (self.setting.to_string(), self.radial_only)
    }

    fn run(&self, f: &TestFunction, spec: &QuadratureSpec) -> Result<VerificationRecord> {
        let s = &self.setting;
        match &self.task {
            Task::Identity { p } => verify_identity(f, *p, s, spec),
            Task::Consistency => consistency_triangle(f, s, spec),
            Task::Higher { k } => verify_higher_order_identity(f, *k, s, spec),
            Task::Ineq { kind, p } => verify_inequality(f, *kind, *p, s, spec),
            Task::Ckn { e } => verify_ckn(f, e, s, spec),
            Task::HigherCkn { k, e } => verify_higher_ckn(f, *k, e, s, spec),
            Task::Uncert { kind } => verify_uncertainty(f, *kind, s, spec),
        }
    }

    /// A failing record standing in for a computation that raised an error.
    fn error_record(&self, f: &TestFunction, e: &Error) -> VerificationRecord {
        let kind = match lookup(self.statement).map(|i| i.class) {
            Ok(StatementClass::Identity) => RecordKind::Identity,
            _ => RecordKind::Inequality,
        };
        VerificationRecord {
            statement: self.statement.into(),
            setting: self.setting.to_string(),
            function: f.label.clone(),
            params: self.params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            kind,
            lhs: 0.0,
            rhs: 0.0,
            remainder: None,
            residual: f64::MAX,
            tolerance: 0.0,
            verdict: Verdict::Fail,
            sigma_power: 0.0,
            quad_diagnostics: QuadDiagnostics {
                converged: false,
                ..QuadDiagnostics::default()
            },
            note: Some(format!("error: {e}")),
        }
    }
}

fn tuple_params(e: &ExponentTuple) -> Vec<(&'static str, f64)> {
    vec![("p", e.p), ("q", e.q), ("r", e.r), ("delta", e.delta), ("b", e.b), ("c", e.c)]
}

/// Expands the configured statements into jobs in canonical order, with
/// notes for combinations a statement does not cover.
fn expand(config: &SuiteConfig) -> Result<(Vec<Job>, Vec<String>)> {
    let eu = config.euclidean_settings()?;
    let hom = config.homogeneous_settings()?;
    let h1 = Setting::StratifiedH1;
    let mut jobs = Vec::new();
    let mut notes = Vec::new();
    let ps = &config.p_values;
    let ks = &config.k_values;
    let mut ids: Vec<&'static str> = Vec::new();
    for s in &config.statements {
        let id = lookup(s)?.id;
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    ids.sort_by_key(|id| STATEMENTS.iter().position(|s| s.id == *id));
    let tuples = |d: f64| -> Result<Vec<ExponentTuple>> { config.exponents.iter().map(|e| e.resolve(d)).collect() };
    let uncertainty_note = |id: &str, s: &Setting| {
        format!("{id} skipped on {s}: q = N/(N−1) needs N ≥ 2, although the first-order results admit N = 1")
    };

    for id in ids {
        match id {
            "id-3.2" | "sob-3.1" | "hardy-3.6" => {
                for s in &eu {
                    for &p in ps {
                        let task = match id {
                            "id-3.2" => Task::Identity { p },
                            "sob-3.1" => Task::Ineq {
                                kind: InequalityKind::CriticalSobolev,
                                p,
                            },
                            _ => Task::Ineq {
                                kind: InequalityKind::CriticalHardy,
                                p,
                            },
                        };
                        jobs.push(Job::new(id, s, vec![("p", p)], task));
                    }
                }
            }
            "badiale-3.8" | "stability-3.9" => {
                let kind = if id == "badiale-3.8" {
                    InequalityKind::BadialeCritical
                } else {
                    InequalityKind::BadialeStability
                };
                for s in &eu {
                    let d = s.dimension_parameter();
                    if d < 2.0 {
                        notes.push(format!("{id} skipped on {s}: needs p = N ≥ 2"));
                        continue;
                    }
                    jobs.push(Job::new(id, s, vec![("p", d)], Task::Ineq { kind, p: d }));
                }
            }
            "strat-id-3.5" => {
                for &p in ps {
                    jobs.push(Job::new(id, &h1, vec![("p", p)], Task::Identity { p }));
                }
            }
            "hom-id-3.8" => {
                for s in &hom {
                    for &p in ps {
                        jobs.push(Job::new(id, s, vec![("p", p)], Task::Identity { p }));
                    }
                }
            }
            "higher-4.1" | "higher-ineq-4.5" => {
                for s in &eu {
                    for &k in ks {
                        let task = if id == "higher-4.1" {
                            Task::Higher { k }
                        } else {
                            Task::Ineq {
                                kind: InequalityKind::HigherOrder { k },
                                p: 2.0,
                            }
                        };
                        let mut job = Job::new(id, s, vec![("k", k as f64), ("p", 2.0)], task);
                        job.radial_only = id == "higher-4.1";
                        jobs.push(job);
                    }
                }
            }
            "consistency-p2" => {
                for s in &eu {
                    jobs.push(Job::new(id, s, vec![("p", 2.0)], Task::Consistency));
                }
            }
            "ckn-5.1" | "ckn-strat-5.6" | "ckn-hom-5.9" => {
                let settings: Vec<Setting> = match id {
                    "ckn-5.1" => eu.clone(),
                    "ckn-strat-5.6" => vec![h1.clone()],
                    _ => hom.clone(),
                };
                for s in &settings {
                    for e in tuples(s.dimension_parameter())? {
                        jobs.push(Job::new(id, s, tuple_params(&e), Task::Ckn { e }));
                    }
                }
            }
            "higher-ckn" => {
                for s in &eu {
                    for &k in ks {
                        for e in tuples(s.dimension_parameter())?.into_iter().filter(|e| e.p == 2.0) {
                            let mut params = tuple_params(&e);
                            params.push(("k", k as f64));
                            jobs.push(Job::new(id, s, params, Task::HigherCkn { k, e }));
                        }
                    }
                }
            }
            "uncert-5.4" | "uncert-strat-5.12" | "uncert-hom-5.17" => {
                let settings: Vec<Setting> = match id {
                    "uncert-5.4" => eu.clone(),
                    "uncert-strat-5.12" => vec![h1.clone()],
                    _ => hom.clone(),
                };
                let kind = UncertaintyKind::Critical;
                for s in &settings {
                    if s.dimension_parameter() < 2.0 {
                        notes.push(uncertainty_note(id, s));
                        continue;
                    }
                    let e = kind.tuple(s)?;
                    jobs.push(Job::new(id, s, tuple_params(&e), Task::Uncert { kind }));
                }
            }
            "hpw-5.5" => {
                let s = Setting::euclidean(2, 2)?;
                let kind = UncertaintyKind::Hpw;
                let e = kind.tuple(&s)?;
                jobs.push(Job::new(id, &s, tuple_params(&e), Task::Uncert { kind }));
            }
            "nash-5.7" => {
                let kind = UncertaintyKind::Nash;
                for (n, big_n) in [(4, 4), (6, 3)] {
                    let s = Setting::euclidean(n, big_n)?;
                    let e = kind.tuple(&s)?;
                    jobs.push(Job::new(id, &s, tuple_params(&e), Task::Uncert { kind }));
                }
            }
            "higher-uncert" => {
                for &k in ks {
                    let s = Setting::euclidean(2 * k, 2 * k)?;
                    let kind = UncertaintyKind::HigherOrder { k };
                    let mut params = tuple_params(&kind.tuple(&s)?);
                    params.push(("k", k as f64));
                    jobs.push(Job::new(id, &s, params, Task::Uncert { kind }));
                }
            }
            "sharp-sweep" => {}
            other => return Err(Error::UnknownStatement(other.into())),
        }
    }
    Ok((jobs, notes))
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("CYLHARDY_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("CYLHARDY_THREADS must be a positive integer, got `{v}`")))?;
        if n > 0 {
            b = b.num_threads(n);
        }
    }
    b.build().map_err(|e| Error::Config(e.to_string()))
}

#[derive(Debug, Clone)]
enum CheckTask {
    Collapse(TestFunction),
    Tensor(TestFunction, f64),
    Cartesian(Setting, TestFunction, f64),
    EuclideanMatch(Setting, TestFunction, f64),
}

fn run_check(task: &CheckTask, seed: u64, spec: &QuadratureSpec) -> CheckEntry {
    let h1 = Setting::StratifiedH1;
    let entry = |stmt: &str, s: &Setting, f: &TestFunction, path: &str, p: f64, tol: f64| CheckEntry {
        statement: stmt.into(),
        setting: s.to_string(),
        function: f.label.clone(),
        path: path.into(),
        p,
        residual: f64::MAX,
        tolerance: tol,
        passed: false,
        detail: None,
        note: None,
    };
    let finish = |mut e: CheckEntry, res: Result<(f64, Option<crate::verifiers::SpotCheck>)>| {
        match res {
            Ok((r, d)) => {
                e.residual = r;
                e.detail = d;
                e.passed = r <= e.tolerance && d.is_none_or(|d| d.converged);
            }
            Err(err) => e.note = Some(format!("error: {err}")),
        }
        e
    };
    match task {
        CheckTask::Collapse(f) => {
            let e = entry("strat-id-3.5", &h1, f, "collapse", 0.0, COLLAPSE_TOLERANCE);
            let res = (|| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let sup = f.support();
                let (tlo, thi) = f.transverse.as_ref().map(|t| t.factors[0].support()).unwrap_or((-1.0, 1.0));
                let mut worst: f64 = 0.0;
                for _ in 0..COLLAPSE_SAMPLES {
                    let r = rng.random_range(sup.lo..sup.hi);
                    let th = rng.random_range(0.0..std::f64::consts::TAU);
                    let t = rng.random_range(tlo..thi);
                    worst = worst.max(heisenberg_collapse_residual(f, &[r * th.cos(), r * th.sin(), t])?);
                }
                Ok((worst, None))
            })();
            finish(e, res)
        }
        CheckTask::Tensor(f, p) => {
            let e = entry("strat-id-3.5", &h1, f, "tensor-3d", *p, TENSOR_TOLERANCE);
            let res = heisenberg_spot_check(f, *p, spec).map(|c| (c.identity_residual.max(c.max_disagreement), Some(c)));
            finish(e, res)
        }
        CheckTask::Cartesian(s, f, p) => {
            let e = entry("hom-id-3.8", s, f, "cartesian-2d", *p, CARTESIAN_TOLERANCE);
            let res =
                homogeneous_cartesian_check(f, *p, s, spec).map(|c| (c.identity_residual.max(c.max_disagreement), Some(c)));
            finish(e, res)
        }
        CheckTask::EuclideanMatch(s, f, p) => {
            let e = entry("hom-id-3.8", s, f, "euclidean-match", *p, EUCLIDEAN_MATCH_TOLERANCE);
            let res = (|| {
                let n = s.ambient_dim();
                let a = identity_terms(f, *p, s, spec)?;
                let b = identity_terms(f, *p, &Setting::euclidean(n, n)?, spec)?;
                let pairs = [(a.lhs, b.lhs), (a.main, b.main), (a.remainder, b.remainder)];
                let scale = pairs.iter().map(|(x, y)| x.value.abs().max(y.value.abs())).fold(0.0, f64::max);
                let worst = pairs.iter().map(|(x, y)| (x.value - y.value).abs()).fold(0.0, f64::max);
                Ok((if scale > 0.0 { worst / scale } else { 0.0 }, None))
            })();
            finish(e, res)
        }
    }
}

fn sweep_file(label: &str) -> String {
    let slug: String = label
        .chars()
        .filter_map(|c| match c {
            ':' => Some('-'),
            '=' | '.' => None,
            c => Some(c),
        })
        .collect();
    format!("sweep-{slug}.csv")
}

fn summarize(records: &[VerificationRecord], checks: &[CheckEntry], sweeps: &[SweepEntry]) -> Summary {
    let mut by: BTreeMap<usize, StatementSummary> = BTreeMap::new();
    for r in records {
        let idx = STATEMENTS.iter().position(|s| s.id == r.statement).unwrap_or(usize::MAX);
        let e = by.entry(idx).or_insert_with(|| StatementSummary {
            statement: r.statement.clone(),
            records: 0,
            failed: 0,
            worst_identity_residual: None,
            worst_identity_function: None,
            min_inequality_residual: None,
            min_inequality_function: None,
        });
        e.records += 1;
        if !r.passed() {
            e.failed += 1;
        }
        let at = || Some(format!("{} on {}", r.function, r.setting));
        match r.kind {
            RecordKind::Identity => {
                if e.worst_identity_residual.is_none_or(|w| r.residual > w) {
                    e.worst_identity_residual = Some(r.residual);
                    e.worst_identity_function = at();
                }
            }
            RecordKind::Inequality => {
                if e.min_inequality_residual.is_none_or(|w| r.residual < w) {
                    e.min_inequality_residual = Some(r.residual);
                    e.min_inequality_function = at();
                }
            }
        }
    }
    let failed = records.iter().filter(|r| !r.passed()).count();
    Summary {
        records: records.len(),
        passed: records.len() - failed,
        failed,
        checks: checks.len(),
        checks_failed: checks.iter().filter(|c| !c.passed).count(),
        sweeps: sweeps.len(),
        sweeps_failed: sweeps.iter().filter(|s| !s.report.passed()).count(),
        statements: by.into_values().collect(),
    }
}

/// Validates `config`, runs every check it names and assembles the report.
pub fn run_suite(config: &SuiteConfig) -> Result<Report> {
    config.validate()?;
    let (jobs, notes) = expand(config)?;
    let spec = &config.quadrature;

    let mut corpora: BTreeMap<(String, bool), Vec<TestFunction>> = BTreeMap::new();
    for job in &jobs {
        if let std::collections::btree_map::Entry::Vacant(slot) = corpora.entry(job.corpus_key()) {
            let opts = CorpusOptions {
                complex: config.corpus.complex,
                nonseparable: config.corpus.nonseparable && !job.radial_only,
            };
            slot.insert(build_corpus(config.corpus.seed, config.corpus.count, &job.setting, opts)?);
        }
    }
    let work: Vec<(usize, usize)> = jobs
        .iter()
        .enumerate()
        .flat_map(|(j, job)| (0..corpora[&job.corpus_key()].len()).map(move |m| (j, m)))
        .collect();

    let has = |id: &str| config.statements.iter().any(|s| s == id);
    let mut check_tasks = Vec::new();
    if config.spot_checks && !config.p_values.is_empty() {
        let p = config.p_values[0];
        let member = 1.min(config.corpus.count - 1);
        let opts = CorpusOptions {
            complex: config.corpus.complex,
            nonseparable: config.corpus.nonseparable,
        };
        if has("strat-id-3.5") {
            let f = build_corpus(config.corpus.seed, config.corpus.count, &Setting::StratifiedH1, opts)?.remove(member);
            check_tasks.push(CheckTask::Collapse(f.clone()));
            check_tasks.push(CheckTask::Tensor(f, p));
        }
        if has("hom-id-3.8") {
            for s in config.homogeneous_settings()? {
                let f = build_corpus(config.corpus.seed, config.corpus.count, &s, opts)?.remove(member);
                let weights = match &s {
                    Setting::HomogeneousGroup { weights } => weights.clone(),
                    _ => unreachable!("validated as homogeneous"),
                };
                if weights.len() == 2 {
                    check_tasks.push(CheckTask::Cartesian(s.clone(), f.clone(), p));
                }
                if weights.iter().all(|&w| w == 1) {
                    let plain = TestFunction { angular: None, ..f };
                    check_tasks.push(CheckTask::EuclideanMatch(s.clone(), plain, p));
                }
            }
        }
    }

    let mut sweep_stmts = Vec::new();
    if has("sharp-sweep") {
        let sw = &config.sweep;
        for &p in &sw.p_values {
            sweep_stmts.push((SweepStatement::CriticalSobolev { p }, sw.epsilons.clone(), sw.bound));
        }
        for &k in &sw.k_values {
            sweep_stmts.push((SweepStatement::HigherOrder { k }, sw.higher_epsilons.clone(), sw.higher_bound));
        }
    }

    let pool = thread_pool()?;
    let (records, checks, sweeps) = pool.install(|| -> Result<_> {
        let records: Vec<VerificationRecord> = work
            .par_iter()
            .map(|&(j, m)| {
                let job = &jobs[j];
                let f = &corpora[&job.corpus_key()][m];
                job.run(f, spec).unwrap_or_else(|e| job.error_record(f, &e))
            })
            .collect();
        let checks: Vec<CheckEntry> = check_tasks
            .par_iter()
            .map(|t| run_check(t, config.corpus.seed, spec))
            .collect();
        let sweeps = sweep_stmts
            .par_iter()
            .map(|(stmt, eps, bound)| {
                let report = sharpness_sweep(*stmt, config.sweep.delta, eps, *bound, spec)?;
                Ok(SweepEntry {
                    csv: sweep_file(&report.statement),
                    report,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((records, checks, sweeps))
    })?;

    Ok(Report {
        schema: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        suite: config.suite.clone(),
        config_hash: config.hash(),
        summary: summarize(&records, &checks, &sweeps),
        records,
        checks,
        sweeps,
        notes,
        timestamp: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_statement_list_gives_empty_report() {
        let c = SuiteConfig {
            statements: vec![],
            ..SuiteConfig::default()
        };
        let r = run_suite(&c).unwrap();
        assert!(r.records.is_empty() && r.checks.is_empty() && r.sweeps.is_empty());
        assert!(r.passed());
    }

    #[test]
    fn record_count_is_statements_times_params_times_corpus() {
        let mut c = SuiteConfig::named("quick").unwrap();
        c.statements = vec!["id-3.2".into(), "ckn-5.1".into()];
        c.corpus.count = 2;
        let r = run_suite(&c).unwrap();
        let expected = 2 * (c.settings.len() * c.p_values.len()) + 2 * (c.settings.len() * c.exponents.len());
        assert_eq!(r.records.len(), expected);
        assert!(r.passed(), "{:?}", r.summary);
    }

    #[test]
    fn sweep_file_names() {
        assert_eq!(sweep_file("critical-sobolev:p=2"), "sweep-critical-sobolev-p2.csv");
        assert_eq!(sweep_file("critical-sobolev:p=1.5"), "sweep-critical-sobolev-p15.csv");
    }
}
