//! Classical summoning with one unclonable token on a 1+1-D lattice.
//!
//! The token starts at `s` and moves at most one site per step. Call
//! information spreads from each `c_i` at light speed in both directions and
//! can be copied freely, so at any point the token knows exactly the status
//! of the calls in its causal past, including calls that were *not* made.
//! Alice wins if the token is handed over exactly at `r_i` for some call `i`
//! that was made.
//!
//! Along a causal trajectory the causal past only grows, so the knowledge at
//! the current point subsumes everything seen earlier and plans can be
//! functions of `(t, x, knowledge)` alone. [`token_feasible`] solves the
//! resulting AND-OR game: Alice picks an action, the adversary's pattern is
//! revealed only through knowledge refinement.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{precedes, precedes_1d, GeometryError, Point};
use crate::task::{
    validate_summoning, CallMode, CallPattern, CallReturnPair, SummoningTask, TaskError,
};

/// Largest pair count the token solver handles.
pub const MAX_TOKEN_PAIRS: usize = 6;
/// Largest `(t, x, knowledge)` table the solver will allocate.
pub const MAX_SOLVER_STATES: u128 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error("rejected input: {0}")]
    Rejected(String),
    #[error("plan has no action at t={t} x={x} knowledge={knowledge}")]
    PlanIncomplete {
        t: i64,
        x: i64,
        knowledge: Knowledge,
    },
    #[error("plan moves the token illegally at t={t} x={x}: {reason}")]
    IllegalMove { t: i64, x: i64, reason: String },
    #[error("needs {required} units of work, cap is {cap}")]
    Resource { required: u128, cap: u128 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CallStatus {
    Called,
    NotCalled,
    Unknown,
}

/// Status of every call as seen from one spacetime point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Knowledge {
    n: u8,
    resolved: u64,
    called: u64,
}

impl Knowledge {
    pub fn len(&self) -> usize {
        usize::from(self.n)
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn status(&self, i: usize) -> CallStatus {
        if self.resolved & (1 << i) == 0 {
            CallStatus::Unknown
        } else if self.called & (1 << i) != 0 {
            CallStatus::Called
        } else {
            CallStatus::NotCalled
        }
    }

    /// Whether an admissible pattern is consistent with what is known.
    pub fn consistent_with(&self, p: CallPattern) -> bool {
        p.0 & self.resolved == self.called
    }

    /// `other` knows at least as much and agrees on everything known here.
    pub fn refined_by(&self, other: &Knowledge) -> bool {
        self.resolved & !other.resolved == 0 && other.called & self.resolved == self.called
    }
}

impl fmt::Display for Knowledge {
    /// `C` called, `N` not called, `?` unknown; one character per pair.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(match self.status(i) {
                CallStatus::Called => "C",
                CallStatus::NotCalled => "N",
                CallStatus::Unknown => "?",
            })?;
        }
        Ok(())
    }
}

/// Knowledge at `location` when the calls in `pattern` were made.
pub fn knowledge_at(
    location: &Point,
    pattern: CallPattern,
    task: &SummoningTask,
) -> Result<Knowledge, TokenError> {
    let mut k = Knowledge {
        n: task.pairs().len() as u8,
        resolved: 0,
        called: 0,
    };
    for (i, pair) in task.pairs().iter().enumerate() {
        if precedes(&pair.call, location)? {
            k.resolved |= 1 << i;
            if pattern.contains(i) {
                k.called |= 1 << i;
            }
        }
    }
    Ok(k)
}

/// A summoning task the token model accepts: 1-D and valid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenTask {
    task: SummoningTask,
}

impl TokenTask {
    pub fn new(task: SummoningTask) -> Result<Self, TokenError> {
        if task.dim() != 1 {
            return Err(TokenError::Rejected("token tasks are 1-D".into()));
        }
        if task.pairs().len() > MAX_TOKEN_PAIRS {
            return Err(TokenError::Rejected(format!(
                "token tasks have at most {MAX_TOKEN_PAIRS} pairs"
            )));
        }
        let report = validate_summoning(&task)?;
        if let Some(bad) = report.failures().next() {
            return Err(TokenError::Rejected(format!(
                "pair {}: {}",
                bad.index + 1,
                bad.reasons().join("; ")
            )));
        }
        Ok(TokenTask { task })
    }

    pub fn task(&self) -> &SummoningTask {
        &self.task
    }

    pub fn mode(&self) -> CallMode {
        self.task.mode()
    }

    pub fn with_mode(&self, mode: CallMode) -> Self {
        TokenTask {
            task: self.task.with_mode(mode),
        }
    }
}

/// Spatial range `[x_min, x_max]` and last time step `t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub x_min: i64,
    pub x_max: i64,
    pub t_max: i64,
}

impl Window {
    /// Smallest window holding every point of the task.
    pub fn enclosing(task: &SummoningTask) -> Self {
        let pts = std::iter::once(task.start())
            .chain(task.pairs().iter().flat_map(|p| [&p.call, &p.ret]));
        let (mut x_min, mut x_max, mut t_max) = (i64::MAX, i64::MIN, i64::MIN);
        for p in pts {
            x_min = x_min.min(p.x());
            x_max = x_max.max(p.x());
            t_max = t_max.max(p.t());
        }
        Window {
            x_min,
            x_max,
            t_max,
        }
    }

    fn contains(&self, t: i64, x: i64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && t <= self.t_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    /// Step by -1, 0 or +1.
    Move(i8),
    Deliver,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Move(-1) => f.write_str("left"),
            Action::Move(0) => f.write_str("stay"),
            Action::Move(1) => f.write_str("right"),
            Action::Move(d) => write!(f, "move{d:+}"),
            Action::Deliver => f.write_str("deliver"),
        }
    }
}

/// Alice's routing rule. It sees only time, position and knowledge, never
/// the pattern itself.
pub trait TokenPlan {
    fn decide(&self, t: i64, x: i64, knowledge: &Knowledge) -> Option<Action>;
}

impl<F> TokenPlan for F
where
    F: Fn(i64, i64, &Knowledge) -> Option<Action>,
{
    fn decide(&self, t: i64, x: i64, knowledge: &Knowledge) -> Option<Action> {
        self(t, x, knowledge)
    }
}

/// A plan stored as an explicit table.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TablePlan {
    pub entries: BTreeMap<(i64, i64, Knowledge), Action>,
}

impl TokenPlan for TablePlan {
    fn decide(&self, t: i64, x: i64, knowledge: &Knowledge) -> Option<Action> {
        self.entries.get(&(t, x, *knowledge)).copied()
    }
}

/// Trajectory and outcome of one plan run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenRun {
    /// One `(t, x)` per step, starting at `s`.
    pub trajectory: Vec<(i64, i64)>,
    pub knowledge: Vec<Knowledge>,
    pub delivered_at: Option<(i64, i64)>,
    pub success: bool,
}

/// Moves the token under `plan` for one call pattern.
pub fn plan_run<P: TokenPlan + ?Sized>(
    task: &TokenTask,
    window: Window,
    plan: &P,
    pattern: CallPattern,
) -> Result<TokenRun, TokenError> {
    let s = task.task.start();
    let (mut t, mut x) = (s.t(), s.x());
    let mut run = TokenRun {
        trajectory: Vec::new(),
        knowledge: Vec::new(),
        delivered_at: None,
        success: false,
    };
    loop {
        let k = knowledge_at(&Point::line(t, x), pattern, &task.task)?;
        run.trajectory.push((t, x));
        run.knowledge.push(k);
        let action =
            plan.decide(t, x, &k)
                .ok_or(TokenError::PlanIncomplete { t, x, knowledge: k })?;
        match action {
            Action::Deliver => {
                run.delivered_at = Some((t, x));
                run.success = task
                    .task
                    .pairs()
                    .iter()
                    .enumerate()
                    .any(|(i, p)| pattern.contains(i) && p.ret.t() == t && p.ret.x() == x);
                return Ok(run);
            }
            Action::Move(d) => {
                if !(-1..=1).contains(&d) {
                    return Err(TokenError::IllegalMove {
                        t,
                        x,
                        reason: format!("step {d} exceeds light speed"),
                    });
                }
                if t >= window.t_max {
                    return Ok(run);
                }
                let nx = x + i64::from(d);
                if !window.contains(t + 1, nx) {
                    return Err(TokenError::IllegalMove {
                        t,
                        x,
                        reason: format!("x={nx} leaves the window"),
                    });
                }
                t += 1;
                x = nx;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenVerdict {
    Feasible(TablePlan),
    Infeasible,
}

impl TokenVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, TokenVerdict::Feasible(_))
    }
}

const UNKNOWN: u8 = 0;
const WIN: u8 = 1;
const LOSE: u8 = 2;
const ACTIONS: [Action; 4] = [
    Action::Deliver,
    Action::Move(-1),
    Action::Move(0),
    Action::Move(1),
];

/// Memoised AND-OR solver over `(t, x, called ∩ resolved)`.
///
/// Buffers are reused between tasks so the sweep allocates once per worker.
#[derive(Default)]
struct Solver {
    n: usize,
    t0: i64,
    x_min: i64,
    width: usize,
    height: usize,
    patterns: Vec<u64>,
    /// Per cell: calls in the causal past.
    resolved: Vec<u64>,
    /// Per cell: pairs whose return point is this cell.
    returns: Vec<u64>,
    memo: Vec<u8>,
    choice: Vec<u8>,
}

impl Solver {
    fn load(&mut self, start: (i64, i64), pairs: &[LinePair], patterns: &[u64], w: Window) {
        self.load_geometry(start, pairs, w);
        self.set_patterns(patterns);
    }

    fn load_geometry(&mut self, start: (i64, i64), pairs: &[LinePair], w: Window) {
        self.n = pairs.len();
        self.t0 = start.0;
        self.x_min = w.x_min;
        self.width = (w.x_max - w.x_min + 1) as usize;
        self.height = (w.t_max - start.0 + 1) as usize;
        self.resolved.clear();
        self.returns.clear();
        for row in 0..self.height {
            let t = self.t0 + row as i64;
            for col in 0..self.width {
                let x = self.x_min + col as i64;
                let mut res = 0;
                let mut ret = 0;
                for (i, &((ct, cx), (rt, rx))) in pairs.iter().enumerate() {
                    if precedes_1d(ct, cx, t, x) {
                        res |= 1 << i;
                    }
                    if rt == t && rx == x {
                        ret |= 1 << i;
                    }
                }
                self.resolved.push(res);
                self.returns.push(ret);
            }
        }
    }

    /// Sets the adversary and clears the memo.
    fn set_patterns(&mut self, patterns: &[u64]) {
        self.patterns.clear();
        self.patterns.extend_from_slice(patterns);
        let states = (self.width * self.height) << self.n;
        self.memo.clear();
        self.memo.resize(states, UNKNOWN);
        self.choice.clear();
        self.choice.resize(states, 0);
    }

    #[inline]
    fn cell(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    fn win(&mut self, row: usize, col: usize, called: u64) -> bool {
        let cell = self.cell(row, col);
        let key = (cell << self.n) | called as usize;
        match self.memo[key] {
            WIN => return true,
            LOSE => return false,
            _ => {}
        }
        let resolved = self.resolved[cell];
        let mut result = false;
        // Deliver works if every consistent pattern has a call returning here.
        let ret = self.returns[cell];
        if ret != 0
            && self
                .patterns
                .iter()
                .filter(|&&p| p & resolved == called)
                .all(|&p| p & ret != 0)
        {
            self.choice[key] = 0;
            result = true;
        } else if row + 1 < self.height {
            for (a, d) in [(1u8, -1i64), (2, 0), (3, 1)] {
                let nc = col as i64 + d;
                if nc < 0 || nc >= self.width as i64 {
                    continue;
                }
                if self.children_win(row + 1, nc as usize, resolved, called) {
                    self.choice[key] = a;
                    result = true;
                    break;
                }
            }
        }
        self.memo[key] = if result { WIN } else { LOSE };
        result
    }

    /// All knowledge blocks at the next cell, reachable from the current
    /// block, are winning.
    fn children_win(&mut self, row: usize, col: usize, resolved: u64, called: u64) -> bool {
        let next_resolved = self.resolved[self.cell(row, col)];
        let mut seen: u64 = 0; // blocks already checked, as bits of next_called
        for idx in 0..self.patterns.len() {
            let p = self.patterns[idx];
            if p & resolved != called {
                continue;
            }
            let nc = p & next_resolved;
            if nc < 64 && seen & (1 << nc) != 0 {
                continue;
            }
            if nc < 64 {
                seen |= 1 << nc;
            }
            if !self.win(row, col, nc) {
                return false;
            }
        }
        true
    }

    /// Feasible iff every block at the start point wins.
    fn solve(&mut self, start_col: usize) -> bool {
        self.children_win(0, start_col, 0, 0)
    }

    fn extract(&self, start_col: usize) -> TablePlan {
        let mut plan = TablePlan::default();
        let mut stack: Vec<(usize, usize, u64)> = Vec::new();
        let push_blocks = |stack: &mut Vec<(usize, usize, u64)>,
                           row: usize,
                           col: usize,
                           resolved: u64,
                           called: u64| {
            let next = self.resolved[self.cell(row, col)];
            let mut blocks: Vec<u64> = self
                .patterns
                .iter()
                .filter(|&&p| p & resolved == called)
                .map(|&p| p & next)
                .collect();
            blocks.sort_unstable();
            blocks.dedup();
            for b in blocks {
                stack.push((row, col, b));
            }
        };
        push_blocks(&mut stack, 0, start_col, 0, 0);
        while let Some((row, col, called)) = stack.pop() {
            let cell = self.cell(row, col);
            let key = (cell << self.n) | called as usize;
            let k = Knowledge {
                n: self.n as u8,
                resolved: self.resolved[cell],
                called,
            };
            let t = self.t0 + row as i64;
            let x = self.x_min + col as i64;
            if plan.entries.contains_key(&(t, x, k)) {
                continue;
            }
            let action = ACTIONS[usize::from(self.choice[key])];
            plan.entries.insert((t, x, k), action);
            if let Action::Move(d) = action {
                let nc = (col as i64 + i64::from(d)) as usize;
                push_blocks(&mut stack, row + 1, nc, k.resolved, called);
            }
        }
        plan
    }
}

fn pattern_masks(n: usize, mode: CallMode) -> Vec<u64> {
    match mode {
        CallMode::SingleGuaranteed => (0..n).map(|i| 1u64 << i).collect(),
        CallMode::MultiplePossible => crate::task::nonempty_subsets(n)
            .into_iter()
            .map(|p| p.0)
            .collect(),
    }
}

/// Decides whether some plan succeeds on every admissible pattern, and
/// returns the plan restricted to the states it reaches.
pub fn token_feasible(task: &TokenTask, window: Window) -> Result<TokenVerdict, TokenError> {
    let st = &task.task;
    let all = std::iter::once(st.start()).chain(st.pairs().iter().flat_map(|p| [&p.call, &p.ret]));
    for p in all {
        if !(window.x_min..=window.x_max).contains(&p.x()) || p.t() > window.t_max || p.t() < 0 {
            return Err(TokenError::Rejected(format!(
                "window x∈[{},{}] t∈[0,{}] does not contain {p}",
                window.x_min, window.x_max, window.t_max
            )));
        }
    }
    let states = (window.x_max - window.x_min + 1) as u128
        * (window.t_max - st.start().t() + 1) as u128
        * (1u128 << st.pairs().len());
    if states > MAX_SOLVER_STATES {
        return Err(TokenError::Resource {
            required: states,
            cap: MAX_SOLVER_STATES,
        });
    }
    let pairs: Vec<_> = st
        .pairs()
        .iter()
        .map(|p| ((p.call.t(), p.call.x()), (p.ret.t(), p.ret.x())))
        .collect();
    let start = (st.start().t(), st.start().x());
    let mut solver = Solver::default();
    solver.load(
        start,
        &pairs,
        &pattern_masks(pairs.len(), st.mode()),
        window,
    );
    let col = (start.1 - window.x_min) as usize;
    Ok(if solver.solve(col) {
        TokenVerdict::Feasible(solver.extract(col))
    } else {
        TokenVerdict::Infeasible
    })
}

/// Lattice bounds for the sweep: all points with `x_min ≤ x ≤ x_max` and
/// `0 ≤ t ≤ t_max`.
pub const DEFAULT_SWEEP_WINDOW: Window = Window {
    x_min: -4,
    x_max: 4,
    t_max: 6,
};

/// Largest number of tasks a sweep will enumerate.
pub const SWEEP_CAP: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    /// Position in the sweep's enumeration order.
    pub index: u64,
    pub task: SummoningTask,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    pub window: Window,
    pub n: usize,
    pub tasks: u64,
    pub single_feasible: u64,
    pub multi_feasible: u64,
    pub counterexamples: Vec<Counterexample>,
}

type LinePair = ((i64, i64), (i64, i64));

fn sweep_points(w: Window) -> Vec<(i64, i64)> {
    (0..=w.t_max)
        .flat_map(|t| (w.x_min..=w.x_max).map(move |x| (t, x)))
        .collect()
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Enumerates every valid `n`-pair token task in the window and reports the
/// tasks that are feasible with one guaranteed call but infeasible when
/// several calls may come.
///
/// Tasks are enumerated by start point, then by strictly increasing tuples
/// of call/return pairs (pairs ordered by call then return, each by `(t, x)`).
pub fn monotonicity_sweep(
    window: Window,
    n: usize,
    workers: usize,
) -> Result<SweepReport, TokenError> {
    if n == 0 || n > MAX_TOKEN_PAIRS {
        return Err(TokenError::Rejected(format!(
            "N must be in 1..={MAX_TOKEN_PAIRS}"
        )));
    }
    if window.x_min > window.x_max
        || window.t_max < 0
        || window.x_max - window.x_min > 64
        || window.t_max > 64
    {
        return Err(TokenError::Rejected("sweep window out of range".into()));
    }
    let points = sweep_points(window);
    let pairs: Vec<LinePair> = points
        .iter()
        .flat_map(|&c| points.iter().map(move |&r| (c, r)))
        .filter(|&((ct, cx), (rt, rx))| rt > ct && precedes_1d(ct, cx, rt, rx))
        .collect();
    let per_start: Vec<Vec<usize>> = points
        .iter()
        .map(|&(st, sx)| {
            (0..pairs.len())
                .filter(|&i| {
                    let (rt, rx) = pairs[i].1;
                    rt > st && precedes_1d(st, sx, rt, rx)
                })
                .collect()
        })
        .collect();
    let counts: Vec<u128> = per_start
        .iter()
        .map(|v| binomial(v.len() as u128, n as u128))
        .collect();
    let required: u128 = counts.iter().sum();
    if required > SWEEP_CAP {
        return Err(TokenError::Resource {
            required,
            cap: SWEEP_CAP,
        });
    }
    let offsets: Vec<u64> = counts
        .iter()
        .scan(0u64, |acc, &c| {
            let o = *acc;
            *acc += c as u64;
            Some(o)
        })
        .collect();

    let single = pattern_masks(n, CallMode::SingleGuaranteed);
    let multi = pattern_masks(n, CallMode::MultiplePossible);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| TokenError::Rejected(format!("cannot start workers: {e}")))?;

    // per start point: single count, multi count, (index, start, pair ids) of counterexamples
    type Part = (u64, u64, Vec<(u64, usize, Vec<usize>)>);
    let parts: Vec<Part> = pool.install(|| {
        (0..points.len())
            .into_par_iter()
            .map(|si| {
                let start = points[si];
                let cands = &per_start[si];
                let mut solver = Solver::default();
                let mut sf = 0u64;
                let mut mf = 0u64;
                let mut bad = Vec::new();
                let mut chosen: Vec<LinePair> = Vec::with_capacity(n);
                let mut idx = vec![0usize; n];
                let mut k = offsets[si];
                for_each_combination(cands.len(), n, &mut idx, &mut |combo| {
                    chosen.clear();
                    chosen.extend(combo.iter().map(|&c| pairs[cands[c]]));
                    // Clamping a trajectory into the task's bounding box keeps it
                    // legal and only enlarges its causal past, and nothing happens
                    // after the last return point, so the box decides the task.
                    let mut b = Window {
                        x_min: start.1,
                        x_max: start.1,
                        t_max: start.0,
                    };
                    for &((_, cx), (rt, rx)) in &chosen {
                        b.x_min = b.x_min.min(cx).min(rx);
                        b.x_max = b.x_max.max(cx).max(rx);
                        b.t_max = b.t_max.max(rt);
                    }
                    let col = (start.1 - b.x_min) as usize;
                    solver.load(start, &chosen, &single, b);
                    let s_ok = solver.solve(col);
                    // the multi-call adversary includes every single-call pattern
                    let m_ok = s_ok && {
                        solver.set_patterns(&multi);
                        solver.solve(col)
                    };
                    sf += u64::from(s_ok);
                    mf += u64::from(m_ok);
                    if s_ok && !m_ok {
                        bad.push((k, si, combo.iter().map(|&c| cands[c]).collect()));
                    }
                    k += 1;
                });
                (sf, mf, bad)
            })
            .collect()
    });

    let mut report = SweepReport {
        window,
        n,
        tasks: required as u64,
        single_feasible: 0,
        multi_feasible: 0,
        counterexamples: Vec::new(),
    };
    for (sf, mf, bad) in parts {
        report.single_feasible += sf;
        report.multi_feasible += mf;
        for (index, si, pair_ids) in bad {
            let (st, sx) = points[si];
            let task_pairs = pair_ids
                .iter()
                .map(|&p| {
                    let ((ct, cx), (rt, rx)) = pairs[p];
                    CallReturnPair::new(Point::line(ct, cx), Point::line(rt, rx)).expect("1-D")
                })
                .collect();
            let task =
                SummoningTask::new(Point::line(st, sx), task_pairs, CallMode::SingleGuaranteed)
                    .expect("distinct pairs");
            report.counterexamples.push(Counterexample { index, task });
        }
    }
    Ok(report)
}

fn for_each_combination(m: usize, k: usize, idx: &mut [usize], f: &mut dyn FnMut(&[usize])) {
    if k > m {
        return;
    }
    for (i, v) in idx.iter_mut().enumerate() {
        *v = i;
    }
    loop {
        f(idx);
        // advance to the next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
