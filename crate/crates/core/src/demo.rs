//! Built-in end-to-end checks.
//!
//! Each demo runs a fixed scenario and prints the claim it checks next to
//! the verdict. The machine section depends only on the parameters, never on
//! the worker count.

use thiserror::Error;

use crate::lattice::LatticeError;
use crate::lattice::{
    guaranteed_success, make_echo_strategy, make_relay_strategy, run, LatticeScenario,
};
use crate::report::{format_sweep, Report, EXIT_FAIL, EXIT_OK};
use crate::search::{
    decide_feasible_with, refined_local_search, FeasibilityResult, SearchBounds, SearchError,
};
use crate::task::{OriginalSignalTask, Promise, RefinedBitTask, Request, TaskError};
use crate::token::{monotonicity_sweep, TokenError, DEFAULT_SWEEP_WINDOW};

pub const DEMOS: [&str; 4] = [
    "finkelstein-original",
    "finkelstein-refined-exactly-one",
    "finkelstein-refined-at-least-one",
    "token-monotonicity",
];

#[derive(Debug, Error)]
pub enum DemoError {
    #[error("unknown demo '{0}'; valid names: {}", DEMOS.join(", "))]
    Unknown(String),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Token(#[from] TokenError),
    #[error("relay site {relay} must lie strictly between 0 and D={d}")]
    Relay { relay: i64, d: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DemoParams {
    pub d: i64,
    pub eps: i64,
    /// `None` checks every site strictly between the labs.
    pub relay: Option<i64>,
    pub workers: usize,
}

impl Default for DemoParams {
    fn default() -> Self {
        DemoParams {
            d: 8,
            eps: 1,
            relay: None,
            workers: 1,
        }
    }
}

pub fn run_demo(name: &str, params: &DemoParams) -> Result<Report, DemoError> {
    match name {
        "finkelstein-original" => original(params),
        "finkelstein-refined-exactly-one" => refined(params, Promise::ExactlyOne),
        "finkelstein-refined-at-least-one" => refined(params, Promise::AtLeastOne),
        "token-monotonicity" => token(params),
        other => Err(DemoError::Unknown(other.to_string())),
    }
}

fn original(params: &DemoParams) -> Result<Report, DemoError> {
    let task = OriginalSignalTask::new(params.d)?;
    let sites: Vec<i64> = match params.relay {
        Some(r) if r <= 0 || r >= params.d => {
            return Err(DemoError::Relay {
                relay: r,
                d: params.d,
            })
        }
        Some(r) => vec![r],
        None => (1..params.d).collect(),
    };
    let mut r = Report::new(EXIT_OK);
    r.say("claim: routing both requests through one relay agent, B receives exactly one");
    r.say(format!(
        "valid signal, at the requested destination at t=T={}, for every request subset",
        task.deadline()
    ));
    r.line(format!(
        "demo=finkelstein-original D={} T={}",
        params.d,
        task.deadline()
    ));
    let mut all_ok = true;
    for &site in &sites {
        let sc = LatticeScenario::original(task, site)?;
        let strategy = make_relay_strategy(&task, site)?;
        for p in sc.admissible_patterns() {
            let tr = run(&sc, &strategy, p)?;
            let fulfilled = task.fulfilled(&tr.deliveries)?;
            let requested: Vec<Request> = fulfilled
                .iter()
                .copied()
                .filter(|q| p.contains(q.index()))
                .collect();
            let ok = tr.deliveries.len() == 1
                && requested.len() == 1
                && fulfilled.len() == 1
                && tr.deliveries[0].t == task.deadline()
                && tr.deliveries[0].x == task.destination(requested[0]);
            all_ok &= ok;
            let at = tr
                .deliveries
                .iter()
                .map(|d| format!("{},{}", d.t, d.x))
                .collect::<Vec<_>>()
                .join(";");
            let fulfilled_set = fulfilled
                .iter()
                .map(|q| (q.index() + 1).to_string())
                .collect::<Vec<_>>()
                .join(",");
            r.line(format!(
                "relay={site} requests={} deliveries={} at={} fulfilled={{{fulfilled_set}}} ok={ok}",
                sc.format_pattern(p),
                tr.deliveries.len(),
                if at.is_empty() { "-" } else { &at }
            ));
        }
        all_ok &= guaranteed_success(&sc, &strategy)?.is_success();
    }
    r.line(format!(
        "relay_sites={} runs={}",
        sites.len(),
        sites.len() * 3
    ));
    finish(&mut r, all_ok);
    Ok(r)
}

fn refined(params: &DemoParams, promise: Promise) -> Result<Report, DemoError> {
    let task = RefinedBitTask::new(params.d, params.eps, promise)?;
    let sc = LatticeScenario::refined(task);
    let mut r = Report::new(EXIT_OK);
    let name = format!("finkelstein-refined-{}", promise.as_str().replace('_', "-"));
    let [b0, a0, a1, b1] = task.layout();
    r.line(format!(
        "demo={name} D={} eps={} layout=B0:{b0},A0:{a0},A1:{a1},B1:{b1} deadline={}",
        task.d(),
        task.eps(),
        task.deadline()
    ));
    r.say("Each A_i only hears its own B_i before the deadline: D+eps > eps, so a strategy");
    r.say("reduces to a pair of response maps {0,1} -> {0,1}, 16 in all.");

    let local = decide_feasible_with(&sc, &SearchBounds::local_response(3)?, params.workers)?;
    let direct = refined_local_search(promise);
    let stats = local.stats();
    let ok = match (&local, promise) {
        (FeasibilityResult::Feasible { witness, index, .. }, Promise::ExactlyOne) => {
            r.say("claim: under the exactly-one promise, echoing the bit is the only winning strategy");
            let echo = *witness == make_echo_strategy(&task);
            r.line(format!(
                "strategies={} winners={} witness={}",
                stats.space,
                stats.winners,
                if echo {
                    "echo".to_string()
                } else {
                    index.to_string()
                }
            ));
            r.line(format!("witness_index={index}"));
            let direct_ok = direct.len() == 1 && direct[0].is_echo();
            r.line(format!(
                "direct_check winners={} echo={}",
                direct.len(),
                direct_ok
            ));
            echo && stats.winners == 1 && direct_ok
        }
        (FeasibilityResult::Infeasible { certificates, .. }, Promise::AtLeastOne) => {
            r.say("claim: under the at-least-one promise no strategy guarantees success");
            r.line(format!(
                "strategies={} winners={}",
                stats.space, stats.winners
            ));
            for c in certificates {
                r.line(format!(
                    "strategy={} fails_on={}",
                    c.index,
                    sc.format_pattern(c.pattern)
                ));
            }
            r.line(format!("direct_check winners={}", direct.len()));
            let mut ok = certificates.len() as u128 == stats.space && direct.is_empty();

            r.say(
                "Wider check: every lattice transducer with at most 2 states over {silence,0,1}.",
            );
            let wide = decide_feasible_with(&sc, &SearchBounds::new(2, 3)?, params.workers)?;
            let ws = wide.stats();
            let certs = match &wide {
                FeasibilityResult::Infeasible { certificates, .. } => certificates.len(),
                _ => 0,
            };
            r.line(format!(
                "transducers states=2 alphabet=3 space={} classes={} winners={} certificates={certs}",
                ws.space, ws.classes, ws.winners
            ));
            ok &=
                matches!(wide, FeasibilityResult::Infeasible { .. }) && certs as u64 == ws.classes;
            ok
        }
        _ => {
            r.line(format!(
                "strategies={} winners={}",
                stats.space, stats.winners
            ));
            false
        }
    };
    finish(&mut r, ok);
    Ok(r)
}

fn token(params: &DemoParams) -> Result<Report, DemoError> {
    let w = DEFAULT_SWEEP_WINDOW;
    let sweep = monotonicity_sweep(w, 2, params.workers)?;
    let mut r = Report::new(EXIT_OK);
    r.say("claim: for a classical token, allowing several calls never breaks a task that is");
    r.say("feasible with exactly one call. Any single-call plan lifts: act on the first call");
    r.say("resolved and ignore the rest.");
    r.line(format!(
        "demo=token-monotonicity n=2 window={},{},{}",
        w.x_min, w.x_max, w.t_max
    ));
    let body = format_sweep(&sweep);
    let ok = body.code == EXIT_OK;
    r.absorb(body);
    finish(&mut r, ok);
    Ok(r)
}

fn finish(r: &mut Report, ok: bool) {
    r.line(format!(
        "verdict={}",
        if ok { "confirmed" } else { "refuted" }
    ));
    r.code = if ok { EXIT_OK } else { EXIT_FAIL };
}
