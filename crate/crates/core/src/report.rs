//! Rendering of results as a human summary plus a `key=value` section.
//!
//! Exit codes: 0 success or feasible, 1 failure or infeasible, 2 input
//! error, 3 search budget exhausted.

use std::fmt::Write as _;

use crate::lattice::Transcript;
use crate::scenario::summoning_line;
use crate::search::FeasibilityResult;
use crate::task::{GoverningTask, SummoningTask, ValidationReport, Verdict};
use crate::token::{SweepReport, TokenRun, TokenVerdict};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_EXHAUSTED: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Human,
    Machine,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    /// Free text for people; never parsed.
    pub summary: Vec<String>,
    /// Stable `key=value` lines.
    pub machine: Vec<String>,
    pub code: u8,
}

impl Report {
    pub fn new(code: u8) -> Self {
        Report {
            code,
            ..Report::default()
        }
    }

    pub fn say(&mut self, line: impl Into<String>) -> &mut Self {
        self.summary.push(line.into());
        self
    }

    pub fn line(&mut self, line: impl Into<String>) -> &mut Self {
        self.machine.push(line.into());
        self
    }

    /// Appends another report's lines; the worse exit code wins.
    pub fn absorb(&mut self, other: Report) {
        self.summary.extend(other.summary);
        self.machine.extend(other.machine);
        self.code = self.code.max(other.code);
    }

    /// Machine format prints only the `key=value` lines.
    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        if format == Format::Human {
            for s in &self.summary {
                let _ = writeln!(out, "{s}");
            }
            if !self.summary.is_empty() && !self.machine.is_empty() {
                out.push('\n');
            }
        }
        for m in &self.machine {
            let _ = writeln!(out, "{m}");
        }
        out
    }

    /// A diagnostic for bad input. The CLI prints it to stderr.
    pub fn input_error(message: impl Into<String>) -> Self {
        let mut r = Report::new(EXIT_INPUT);
        r.line(format!("error={}", message.into()));
        r
    }
}

pub fn format_validation(task: &SummoningTask, report: &ValidationReport) -> Report {
    let mut r = Report::new(if report.passed() { EXIT_OK } else { EXIT_FAIL });
    r.say(format!(
        "summoning task, {} pairs, mode {}: {}",
        task.pairs().len(),
        task.mode().as_str(),
        if report.passed() { "valid" } else { "invalid" }
    ));
    for p in &report.pairs {
        for reason in p.reasons() {
            r.say(format!("  pair {}: {reason}", p.index + 1));
        }
        r.line(format!(
            "pair={} after_call={} after_start={}",
            p.index + 1,
            p.after_call,
            p.after_start
        ));
    }
    r.line(format!(
        "verdict={}",
        if report.passed() { "valid" } else { "invalid" }
    ));
    r
}

/// A lattice run: transcript lines, deliveries and the task verdict.
pub fn format_run(transcript: &Transcript, task: &GoverningTask, verdict: &Verdict) -> Report {
    let mut r = Report::new(if verdict.is_ok() { EXIT_OK } else { EXIT_FAIL });
    let pattern = task.format_pattern(transcript.pattern);
    r.say(format!(
        "pattern {pattern}: {} events, {} deliveries",
        transcript.events.len(),
        transcript.deliveries.len()
    ));
    if let Err(v) = verdict {
        r.say(format!("failed: {v}"));
    }
    r.line(format!("pattern={pattern}"));
    r.machine
        .extend(transcript.render().lines().map(String::from));
    for d in &transcript.deliveries {
        r.line(format!(
            "delivery t={} x={} sym={}",
            d.t,
            d.x,
            transcript.alphabet().name(d.symbol)
        ));
    }
    push_verdict(&mut r, verdict);
    r
}

fn push_verdict(r: &mut Report, verdict: &Verdict) {
    match verdict {
        Ok(()) => r.line("verdict=success"),
        Err(v) => r.line("verdict=failure").line(format!("violation={v}")),
    };
}

/// A token run under an extracted plan.
pub fn format_token_run(run: &TokenRun, pattern: &str) -> Report {
    let mut r = Report::new(if run.success { EXIT_OK } else { EXIT_FAIL });
    r.say(format!(
        "pattern {pattern}: token moved {} steps",
        run.trajectory.len() - 1
    ));
    r.line(format!("pattern={pattern}"));
    for (&(t, x), k) in run.trajectory.iter().zip(&run.knowledge) {
        r.line(format!("t={t} x={x} knowledge={k}"));
    }
    match run.delivered_at {
        Some((t, x)) => r.line(format!("delivery t={t} x={x}")),
        None => r.line("delivery=none"),
    };
    r.line(format!(
        "verdict={}",
        if run.success { "success" } else { "failure" }
    ));
    r
}

/// `verdict=`, then `witness=` or one `strategy= fails_on=` line per class.
pub fn format_search(result: &FeasibilityResult, task: &GoverningTask) -> Report {
    let stats = result.stats();
    let stats_line = format!(
        "space={} classes={} winners={}",
        stats.space, stats.classes, stats.winners
    );
    match result {
        FeasibilityResult::Feasible { index, .. } => {
            let mut r = Report::new(EXIT_OK);
            r.say(format!(
                "feasible: strategy {index} succeeds on every admissible pattern"
            ));
            r.line("verdict=feasible")
                .line(format!("witness={index}"))
                .line(stats_line);
            r
        }
        FeasibilityResult::Infeasible { certificates, .. } => {
            let mut r = Report::new(EXIT_FAIL);
            r.say(format!(
                "infeasible within bounds: {} behaviour classes, each fails on some pattern",
                certificates.len()
            ));
            r.line("verdict=infeasible").line(stats_line);
            for c in certificates {
                r.line(format!(
                    "strategy={} fails_on={}",
                    c.index,
                    task.format_pattern(c.pattern)
                ));
            }
            r
        }
        FeasibilityResult::Exhausted { budget, .. } => {
            let mut r = Report::new(EXIT_EXHAUSTED);
            r.say(format!("budget of {budget:?} exhausted, no verdict"));
            r.line("verdict=exhausted").line(stats_line);
            r
        }
    }
}

pub fn format_token(verdict: &TokenVerdict) -> Report {
    match verdict {
        TokenVerdict::Feasible(plan) => {
            let mut r = Report::new(EXIT_OK);
            r.say(format!(
                "feasible: plan with {} decision points",
                plan.entries.len()
            ));
            r.line("verdict=feasible");
            for ((t, x, k), a) in &plan.entries {
                r.line(format!("plan t={t} x={x} knowledge={k} action={a}"));
            }
            r
        }
        TokenVerdict::Infeasible => {
            let mut r = Report::new(EXIT_FAIL);
            r.say("infeasible: no plan wins against every admissible pattern");
            r.line("verdict=infeasible");
            r
        }
    }
}

/// Totals line followed by one line per counterexample.
pub fn format_sweep(report: &SweepReport) -> Report {
    let w = report.window;
    let mut r = Report::new(if report.counterexamples.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAIL
    });
    r.say(format!(
        "all valid {}-pair token tasks in x∈[{},{}], t∈[0,{}]",
        report.n, w.x_min, w.x_max, w.t_max
    ));
    r.line(format!(
        "tasks={} single_feasible={} multi_feasible={} counterexamples={}",
        report.tasks,
        report.single_feasible,
        report.multi_feasible,
        report.counterexamples.len()
    ));
    for c in &report.counterexamples {
        r.line(format!(
            "counterexample={} {}",
            c.index,
            summoning_line(&c.task)
        ));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_echo_strategy, LatticeScenario};
    use crate::search::{decide_feasible, SearchBounds};
    use crate::task::{Promise, RefinedBitTask};

    #[test]
    fn search_exit_codes() {
        for (promise, code, lines) in [
            (Promise::ExactlyOne, EXIT_OK, 0),
            (Promise::AtLeastOne, EXIT_FAIL, 16),
        ] {
            let task = RefinedBitTask::new(8, 1, promise).unwrap();
            let sc = LatticeScenario::refined(task);
            let res = decide_feasible(&sc, &SearchBounds::local_response(3).unwrap()).unwrap();
            let r = format_search(&res, sc.task());
            assert_eq!(r.code, code);
            assert_eq!(
                r.machine
                    .iter()
                    .filter(|l| l.starts_with("strategy="))
                    .count(),
                lines
            );
            if code == EXIT_OK {
                assert_eq!(r.machine[0], "verdict=feasible");
                assert_eq!(r.machine[1], "witness=5");
            }
        }
    }

    #[test]
    fn run_report_renders_transcript() {
        let task = RefinedBitTask::new(8, 1, Promise::ExactlyOne).unwrap();
        let sc = LatticeScenario::refined(task);
        let p = crate::task::CallPattern(0b10);
        let tr = crate::lattice::run(&sc, &make_echo_strategy(&task), p).unwrap();
        let v = sc.task().success_predicate(p, &tr.deliveries).unwrap();
        let r = format_run(&tr, sc.task(), &v);
        let text = r.render(Format::Machine);
        assert!(text.starts_with("pattern=(0,1)\n"));
        assert!(text.ends_with("verdict=success\n"));
        assert!(r.render(Format::Human).len() > text.len());
    }

    #[test]
    fn input_error_code() {
        assert_eq!(Report::input_error("x").code, EXIT_INPUT);
    }
}
