use std::fmt;
use std::time::Duration;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StopReason {
    Saturated,
    IterationLimit,
    TimeLimit,
    EClassLimit,
    ENodeLimit,
    GoalReached,
    /// An unequal rule matched two sides in the same class.
    Contradiction(String),
}

impl StopReason {
    /// Stops caused by a size, time or contradiction check rather than by
    /// running out of work or iterations.
    pub fn is_limit(&self) -> bool {
        matches!(
            self,
            StopReason::TimeLimit | StopReason::EClassLimit | StopReason::ENodeLimit | StopReason::Contradiction(_)
        )
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopReason::Saturated => f.write_str("saturated"),
            StopReason::IterationLimit => f.write_str("iteration_limit"),
            StopReason::TimeLimit => f.write_str("time_limit"),
            StopReason::EClassLimit => f.write_str("eclass_limit"),
            StopReason::ENodeLimit => f.write_str("enode_limit"),
            StopReason::GoalReached => f.write_str("goal_reached"),
            StopReason::Contradiction(rule) => write!(f, "contradiction:{rule}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RuleStats {
    pub name: String,
    pub search_time: Duration,
    pub apply_time: Duration,
    pub matches: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub n_enodes: usize,
    pub n_eclasses: usize,
    pub total_time: Duration,
    pub rules: Vec<RuleStats>,
    /// Rules that cannot run on an e-graph (e.g. segment patterns).
    pub skipped: Vec<String>,
}

#[derive(Serialize)]
struct JsonRule<'a> {
    name: &'a str,
    search_s: f64,
    apply_s: f64,
    matches: usize,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    stop_reason: String,
    iterations: usize,
    n_enodes: usize,
    n_eclasses: usize,
    rules: Vec<JsonRule<'a>>,
}

impl Report {
    pub fn to_json(&self) -> serde_json::Value {
        let r = JsonReport {
            stop_reason: self.stop_reason.to_string(),
            iterations: self.iterations,
            n_enodes: self.n_enodes,
            n_eclasses: self.n_eclasses,
            rules: self
                .rules
                .iter()
                .map(|r| JsonRule {
                    name: &r.name,
                    search_s: r.search_time.as_secs_f64(),
                    apply_s: r.apply_time.as_secs_f64(),
                    matches: r.matches,
                })
                .collect(),
        };
        serde_json::to_value(r).expect("report serializes")
    }

    /// The report with every duration zeroed, for comparing runs.
    pub fn without_timings(&self) -> Report {
        let mut r = self.clone();
        r.total_time = Duration::ZERO;
        for s in &mut r.rules {
            s.search_time = Duration::ZERO;
            s.apply_time = Duration::ZERO;
        }
        r
    }

    /// Summary lines, plus the per-rule table when `timings` is set.
    pub fn render(&self, timings: bool) -> String {
        let mut out = format!(
            "stop reason: {}\niterations:  {}\neclasses:    {}\nenodes:      {}\ntime:        {:.6}s\n",
            self.stop_reason,
            self.iterations,
            self.n_eclasses,
            self.n_enodes,
            self.total_time.as_secs_f64()
        );
        if timings && !self.rules.is_empty() {
            let w = self.rules.iter().map(|r| r.name.len()).max().unwrap_or(0).max(4);
            out.push_str(&format!("{:<w$}  {:>10}  {:>10}  {:>8}\n", "rule", "search_s", "apply_s", "matches"));
            for r in &self.rules {
                out.push_str(&format!(
                    "{:<w$}  {:>10.6}  {:>10.6}  {:>8}\n",
                    r.name,
                    r.search_time.as_secs_f64(),
                    r.apply_time.as_secs_f64(),
                    r.matches
                ));
            }
        }
        for s in &self.skipped {
            out.push_str(&format!("skipped: {s}\n"));
        }
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(true))
    }
}
