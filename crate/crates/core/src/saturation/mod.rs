//! Equality saturation: search every rule, apply all matches, rebuild, and
//! repeat until nothing changes or a limit is hit.

mod apply;
mod report;
mod scheduler;

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::analysis::{analyze, extract, AnalysisError, CostFunction, ExtractError, SignAnalysis};
use crate::egraph::{EGraph, EGraphError, Id};
use crate::ematch::{ematch_program, EMatch};
use crate::rules::{Direction, RuleKind, Theory};
use crate::term::Term;

pub use apply::{add_instantiation, lookup_instantiation};
pub use report::{Report, RuleStats, StopReason};
pub use scheduler::{BackoffScheduler, BackoffState, Scheduler, SimpleScheduler};

#[derive(Clone)]
pub enum Goal {
    /// Both terms (added to the graph at the start) are in one class.
    AreEqual(Term, Term),
    Custom(Arc<dyn Fn(&EGraph) -> bool + Send + Sync>),
}

impl Goal {
    pub fn reached(&self, g: &EGraph) -> bool {
        match self {
            Goal::AreEqual(a, b) => match (g.lookup_term(a), g.lookup_term(b)) {
                (Some(x), Some(y)) => g.find(x) == g.find(y),
                _ => false,
            },
            Goal::Custom(f) => f(g),
        }
    }
}

impl fmt::Debug for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::AreEqual(a, b) => write!(f, "AreEqual({a}, {b})"),
            Goal::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchedulerKind {
    Simple,
    Backoff { ban_length: usize },
}

#[derive(Debug, Clone)]
pub struct SaturationParams {
    /// Maximum number of iterations.
    pub timeout: usize,
    pub timelimit: Option<Duration>,
    /// Initial per-rule match limit of the backoff scheduler.
    pub matchlimit: usize,
    pub eclasslimit: usize,
    pub enodelimit: usize,
    pub goal: Option<Goal>,
    pub scheduler: SchedulerKind,
    pub threaded: bool,
    pub timer: bool,
    pub printiter: bool,
}

impl Default for SaturationParams {
    fn default() -> Self {
        SaturationParams {
            timeout: 8,
            timelimit: None,
            matchlimit: 5000,
            eclasslimit: 5000,
            enodelimit: 15000,
            goal: None,
            scheduler: SchedulerKind::Backoff { ban_length: 5 },
            threaded: false,
            timer: true,
            printiter: false,
        }
    }
}

impl SaturationParams {
    pub fn make_scheduler(&self) -> Box<dyn Scheduler> {
        match self.scheduler {
            SchedulerKind::Simple => Box::new(SimpleScheduler),
            SchedulerKind::Backoff { ban_length } => Box::new(BackoffScheduler::new(self.matchlimit, ban_length)),
        }
    }
}

/// Outcome of one iteration.
#[derive(Debug, Clone)]
pub struct Step {
    pub changed: bool,
    pub rules: Vec<RuleStats>,
}

/// One search/apply/rebuild round. Rules that cannot be compiled for the
/// e-graph are ignored. Returns `Err` with the stop reason when an unequal
/// rule finds a contradiction or the node limit is reached while applying.
pub fn eqsat_step(
    g: &mut EGraph,
    theory: &Theory,
    sched: &mut dyn Scheduler,
    params: &SaturationParams,
    iter: usize,
) -> Result<Step, StopReason> {
    let mut stats: Vec<RuleStats> = theory
        .rules
        .iter()
        .map(|r| RuleStats {
            name: r.name.clone(),
            ..Default::default()
        })
        .collect();
    let clock = |start: Instant| if params.timer { start.elapsed() } else { Duration::ZERO };

    let mut found: Vec<(usize, Direction, Vec<EMatch>)> = Vec::new();
    for (i, rule) in theory.rules.iter().enumerate() {
        if !sched.can_search(i, iter) {
            continue;
        }
        let start = Instant::now();
        let mut per_dir = Vec::new();
        for &dir in rule.directions() {
            let Ok(prog) = rule.program(dir) else { continue };
            match ematch_program(g, prog, params.threaded) {
                Ok(ms) => per_dir.push((dir, ms)),
                Err(e) => log::warn!("rule {}: {e}", rule.name),
            }
        }
        stats[i].search_time = clock(start);
        let n: usize = per_dir.iter().map(|(_, ms)| ms.len()).sum();
        stats[i].matches = n;
        if sched.inform(i, n, iter) {
            found.extend(per_dir.into_iter().map(|(d, ms)| (i, d, ms)));
        }
    }

    let version = g.version();
    for (i, dir, matches) in found {
        let rule = &theory.rules[i];
        let (_, rhs) = rule.sides(dir);
        let start = Instant::now();
        for m in &matches {
            let target = match rule.kind {
                RuleKind::Unequal => {
                    if lookup_instantiation(g, rhs, m).is_some_and(|id| g.find(id) == g.find(m.class)) {
                        g.rebuild();
                        return Err(StopReason::Contradiction(rule.name.clone()));
                    }
                    continue;
                }
                RuleKind::Dynamic => add_instantiation(g, rhs, m, true),
                RuleKind::Rewrite | RuleKind::Equality => add_instantiation(g, rhs, m, false),
            };
            match target {
                Ok(Some(id)) => {
                    g.merge(m.class, id).expect("ids come from this graph");
                }
                Ok(None) => {}
                Err(EGraphError::CapacityExceeded(_)) => {
                    g.rebuild();
                    return Err(StopReason::ENodeLimit);
                }
                Err(e) => panic!("instantiation used a foreign id: {e}"),
            }
        }
        stats[i].apply_time += clock(start);
    }
    g.rebuild();
    Ok(Step {
        changed: g.version() != version,
        rules: stats,
    })
}

/// Names of rules (with the reason) that cannot run on an e-graph.
pub fn unsupported_rules(theory: &Theory) -> Vec<String> {
    let mut out = Vec::new();
    for r in &theory.rules {
        for &dir in r.directions() {
            if let Err(e) = r.program(dir) {
                out.push(format!("{}: {e}", r.name));
                break;
            }
        }
    }
    out
}

/// Runs equality saturation on `g` until a stop condition holds.
pub fn saturate(g: &mut EGraph, theory: &Theory, params: &SaturationParams) -> Report {
    let start = Instant::now();
    let skipped = unsupported_rules(theory);
    for s in &skipped {
        log::warn!("skipped in e-graph mode: {s}");
    }
    let saved_limit = g.enode_limit();
    g.set_enode_limit(Some(params.enodelimit));
    if let Some(Goal::AreEqual(a, b)) = &params.goal {
        let _ = g.add_term(a).and_then(|_| g.add_term(b));
    }
    g.rebuild();

    let mut rules: Vec<RuleStats> = theory
        .rules
        .iter()
        .map(|r| RuleStats {
            name: r.name.clone(),
            ..Default::default()
        })
        .collect();
    let mut sched = params.make_scheduler();
    let mut iterations = 0;
    let goal_reached = |g: &EGraph| params.goal.as_ref().is_some_and(|goal| goal.reached(g));

    let stop = 'run: {
        if goal_reached(g) {
            break 'run StopReason::GoalReached;
        }
        for iter in 0..params.timeout {
            if params.timelimit.is_some_and(|t| start.elapsed() >= t) {
                break 'run StopReason::TimeLimit;
            }
            let step = eqsat_step(g, theory, sched.as_mut(), params, iter);
            iterations = iter + 1;
            let step = match step {
                Ok(s) => s,
                Err(reason) => break 'run reason,
            };
            for (acc, s) in rules.iter_mut().zip(&step.rules) {
                acc.search_time += s.search_time;
                acc.apply_time += s.apply_time;
                acc.matches += s.matches;
            }
            if params.printiter {
                log::info!(
                    "iteration {iterations}: {} eclasses, {} enodes",
                    g.n_classes(),
                    g.n_enodes()
                );
            }
            if g.n_classes() > params.eclasslimit {
                break 'run StopReason::EClassLimit;
            }
            if g.n_enodes() > params.enodelimit {
                break 'run StopReason::ENodeLimit;
            }
            if goal_reached(g) {
                break 'run StopReason::GoalReached;
            }
            if !step.changed && sched.can_stop(iter) {
                break 'run StopReason::Saturated;
            }
        }
        StopReason::IterationLimit
    };
    g.set_enode_limit(saved_limit);
    Report {
        stop_reason: stop,
        iterations,
        n_enodes: g.n_enodes(),
        n_eclasses: g.n_classes(),
        total_time: start.elapsed(),
        rules,
        skipped,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SaturationError {
    #[error(transparent)]
    Graph(#[from] EGraphError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
}

/// Registers the sign analysis when some rule predicate reads it.
fn prepare(g: &mut EGraph, theory: &Theory) -> Result<(), AnalysisError> {
    if theory.uses_analysis() {
        analyze(g, SignAnalysis::default())?;
    }
    Ok(())
}

/// Saturates a graph built from `t` and extracts the cheapest equivalent.
pub fn simplify(
    t: &Term,
    theory: &Theory,
    params: &SaturationParams,
    cf: &dyn CostFunction,
) -> Result<(Term, Report), SaturationError> {
    let mut g = EGraph::from_term(t)?;
    prepare(&mut g, theory)?;
    let report = saturate(&mut g, theory, params);
    let root = g.root().expect("graph built from a term has a root");
    Ok((extract(&g, cf, root)?, report))
}

/// Whether saturation puts `a` and `b` in the same class. `false` means
/// "not shown equal", not "unequal".
pub fn prove_equal(a: &Term, b: &Term, theory: &Theory, params: &SaturationParams) -> Result<(bool, Report), SaturationError> {
    let mut g = EGraph::new();
    let x = g.add_term(a)?;
    let y = g.add_term(b)?;
    g.set_root(x);
    prepare(&mut g, theory)?;
    let params = SaturationParams {
        goal: Some(Goal::AreEqual(a.clone(), b.clone())),
        ..params.clone()
    };
    let report = saturate(&mut g, theory, &params);
    let equal = report.stop_reason == StopReason::GoalReached || g.find(x) == g.find(y);
    Ok((equal, report))
}

/// The graph's classes as sorted lists of their member ids, sorted; equal
/// for two graphs that built the same partition over the same ids.
pub fn partition(g: &EGraph) -> Vec<Vec<Id>> {
    let mut groups: std::collections::BTreeMap<Id, Vec<Id>> = Default::default();
    for i in 0..g.n_ids() {
        let id = Id::from(i);
        groups.entry(g.find(id)).or_default().push(id);
    }
    groups.into_values().collect()
}
