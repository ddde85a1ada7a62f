//! Task families, their adversaries and their success predicates.
//!
//! Three families are modelled:
//!
//! * [`SummoningTask`]: a start point and call/return pairs; Alice must answer
//!   at the return point of a call that was actually made.
//! * [`RefinedBitTask`]: two wings, each with an Alice agent `A_i` and a Bob
//!   agent `B_i` at distance `eps`; Bob sends bits at `t = 0` and expects one
//!   `0` and one `1` back by `t = 2 eps`, the `1` going to a wing that sent `1`.
//! * [`OriginalSignalTask`]: two labs at distance `D`; each request asks for a
//!   light signal to arrive at the other lab at `T = D` with no signal going
//!   the opposite way.
//!
//! The adversary of every family is the set of admissible [`CallPattern`]s.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::geometry::{strictly_precedes, GeometryError, Point};
use crate::symbol::{bit, Symbol};

/// Largest number of call/return pairs accepted by [`SummoningTask::new`].
pub const MAX_PAIRS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{invariant}: {detail}")]
    Invariant {
        invariant: &'static str,
        detail: String,
    },
    #[error("malformed outcome: {0}")]
    MalformedOutcome(String),
    #[error("pattern {0} is not admissible for this task")]
    InadmissiblePattern(String),
}

fn invariant(invariant: &'static str, detail: impl Into<String>) -> TaskError {
    TaskError::Invariant {
        invariant,
        detail: detail.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CallReturnPair {
    pub call: Point,
    pub ret: Point,
}

impl CallReturnPair {
    pub fn new(call: Point, ret: Point) -> Result<Self, TaskError> {
        if call.dim() != ret.dim() {
            return Err(GeometryError::DimensionMismatch {
                left: call.dim(),
                right: ret.dim(),
            }
            .into());
        }
        Ok(CallReturnPair { call, ret })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CallMode {
    /// Exactly one call is made.
    SingleGuaranteed,
    /// Any nonempty set of calls is made; one response is required.
    MultiplePossible,
}

impl CallMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CallMode::SingleGuaranteed => "single",
            CallMode::MultiplePossible => "multiple",
        }
    }
}

/// A set of call indices, stored as a bitmask (bit `i` = index `i`).
///
/// For the refined bit task, bit `i` is set when `B_i` sends a `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CallPattern(pub u64);

impl CallPattern {
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        CallPattern(indices.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1 << i) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    /// `{1,2}` style, 1-based.
    pub fn to_set_string(self) -> String {
        let items: Vec<String> = self.indices().map(|i| (i + 1).to_string()).collect();
        format!("{{{}}}", items.join(","))
    }

    /// `(b0,b1)` style for the two-wing bit task.
    pub fn to_bits_string(self) -> String {
        format!(
            "({},{})",
            u8::from(self.contains(0)),
            u8::from(self.contains(1))
        )
    }
}

/// All nonempty subsets of `0..n`, ordered by size and then lexicographically.
pub fn nonempty_subsets(n: usize) -> Vec<CallPattern> {
    let mut out = Vec::with_capacity((1usize << n) - 1);
    let mut buf = Vec::with_capacity(n);
    fn rec(start: usize, n: usize, k: usize, buf: &mut Vec<usize>, out: &mut Vec<CallPattern>) {
        if buf.len() == k {
            out.push(CallPattern::from_indices(buf.iter().copied()));
            return;
        }
        for i in start..n {
            buf.push(i);
            rec(i + 1, n, k, buf, out);
            buf.pop();
        }
    }
    for k in 1..=n {
        rec(0, n, k, &mut buf, &mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SummoningTask {
    start: Point,
    pairs: Vec<CallReturnPair>,
    mode: CallMode,
}

impl SummoningTask {
    pub fn new(
        start: Point,
        pairs: Vec<CallReturnPair>,
        mode: CallMode,
    ) -> Result<Self, TaskError> {
        if pairs.is_empty() {
            return Err(invariant("N must be ≥ 1", "no call/return pairs"));
        }
        if pairs.len() > MAX_PAIRS {
            return Err(invariant(
                "N must be ≤ 16",
                format!("{} call/return pairs", pairs.len()),
            ));
        }
        for p in &pairs {
            if p.call.dim() != start.dim() {
                return Err(GeometryError::DimensionMismatch {
                    left: start.dim(),
                    right: p.call.dim(),
                }
                .into());
            }
            if p.ret.dim() != start.dim() {
                return Err(GeometryError::DimensionMismatch {
                    left: start.dim(),
                    right: p.ret.dim(),
                }
                .into());
            }
        }
        for (i, a) in pairs.iter().enumerate() {
            if let Some(j) = pairs[..i].iter().position(|b| b == a) {
                return Err(invariant(
                    "pairs must be distinct",
                    format!("pair {} repeats pair {}", i + 1, j + 1),
                ));
            }
        }
        Ok(SummoningTask { start, pairs, mode })
    }

    pub fn start(&self) -> &Point {
        &self.start
    }

    pub fn pairs(&self) -> &[CallReturnPair] {
        &self.pairs
    }

    pub fn mode(&self) -> CallMode {
        self.mode
    }

    pub fn with_mode(&self, mode: CallMode) -> Self {
        SummoningTask {
            mode,
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.start.dim()
    }

    pub fn admissible_patterns(&self) -> Vec<CallPattern> {
        let n = self.pairs.len();
        match self.mode {
            CallMode::SingleGuaranteed => (0..n).map(|i| CallPattern(1 << i)).collect(),
            CallMode::MultiplePossible => nonempty_subsets(n),
        }
    }

    /// Exactly one delivery, located exactly at the return point of a call
    /// in `pattern`. Deliveries are 1-D `(t, x)` events.
    pub fn judge(
        &self,
        pattern: CallPattern,
        deliveries: &[Delivery],
    ) -> Result<Verdict, TaskError> {
        if self.dim() != 1 {
            return Err(TaskError::MalformedOutcome(
                "lattice deliveries can only be judged for 1-D tasks".into(),
            ));
        }
        let [d] = deliveries else {
            return Ok(Err(if deliveries.is_empty() {
                Violation::NoDelivery
            } else {
                Violation::MultipleDeliveries(deliveries.len())
            }));
        };
        let hit = self
            .pairs
            .iter()
            .enumerate()
            .any(|(i, p)| pattern.contains(i) && p.ret.t() == d.t && p.ret.x() == d.x);
        Ok(if hit {
            Ok(())
        } else {
            Err(Violation::WrongPlace { t: d.t, x: d.x })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCheck {
    pub index: usize,
    /// `c_i` strictly precedes `r_i`.
    pub after_call: bool,
    /// `s` strictly precedes `r_i`.
    pub after_start: bool,
}

impl PairCheck {
    pub fn passed(&self) -> bool {
        self.after_call && self.after_start
    }

    pub fn reasons(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.after_call {
            out.push("return point does not strictly follow call point");
        }
        if !self.after_start {
            out.push("return point does not strictly follow start point");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub pairs: Vec<PairCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(PairCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PairCheck> {
        self.pairs.iter().filter(|p| !p.passed())
    }
}

/// Checks `r_i > c_i` and `r_i > s` for every pair.
pub fn validate_summoning(task: &SummoningTask) -> Result<ValidationReport, TaskError> {
    let pairs = task
        .pairs
        .iter()
        .enumerate()
        .map(|(index, p)| {
            Ok(PairCheck {
                index,
                after_call: strictly_precedes(&p.call, &p.ret)?,
                after_start: strictly_precedes(&task.start, &p.ret)?,
            })
        })
        .collect::<Result<_, GeometryError>>()?;
    Ok(ValidationReport { pairs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Promise {
    ExactlyOne,
    AtLeastOne,
}

impl Promise {
    pub fn as_str(self) -> &'static str {
        match self {
            Promise::ExactlyOne => "exactly_one",
            Promise::AtLeastOne => "at_least_one",
        }
    }
}

/// Two-wing bit task. Layout on the line: `B_0` at `-eps`, `A_0` at `0`,
/// `A_1` at `D`, `B_1` at `D + eps`. Inputs leave `B_i` at `t = 0`; outputs
/// are due by `t = 2 eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RefinedBitTask {
    d: i64,
    eps: i64,
    promise: Promise,
}

impl RefinedBitTask {
    pub fn new(d: i64, eps: i64, promise: Promise) -> Result<Self, TaskError> {
        if eps < 1 {
            return Err(invariant("eps must be ≥ 1", format!("eps = {eps}")));
        }
        if d < 2 * eps {
            return Err(invariant(
                "D must be ≥ 2·eps",
                format!("D = {d}, eps = {eps}"),
            ));
        }
        Ok(RefinedBitTask { d, eps, promise })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn eps(&self) -> i64 {
        self.eps
    }

    pub fn promise(&self) -> Promise {
        self.promise
    }

    pub fn with_promise(&self, promise: Promise) -> Self {
        RefinedBitTask { promise, ..*self }
    }

    pub fn a_site(&self, wing: usize) -> i64 {
        if wing == 0 {
            0
        } else {
            self.d
        }
    }

    pub fn b_site(&self, wing: usize) -> i64 {
        if wing == 0 {
            -self.eps
        } else {
            self.d + self.eps
        }
    }

    /// `[B_0, A_0, A_1, B_1]` positions.
    pub fn layout(&self) -> [i64; 4] {
        [
            self.b_site(0),
            self.a_site(0),
            self.a_site(1),
            self.b_site(1),
        ]
    }

    pub fn deadline(&self) -> i64 {
        2 * self.eps
    }

    pub fn admissible_patterns(&self) -> Vec<CallPattern> {
        let mut out = vec![CallPattern(0b10), CallPattern(0b01)];
        if self.promise == Promise::AtLeastOne {
            out.push(CallPattern(0b11));
        }
        out
    }

    /// Each `B_i` gets exactly one bit by the deadline; one `0` and one `1`;
    /// the `1` lands at a wing that sent `1`. Later deliveries are ignored.
    pub fn judge(
        &self,
        pattern: CallPattern,
        deliveries: &[Delivery],
    ) -> Result<Verdict, TaskError> {
        let mut received: [Vec<bool>; 2] = [Vec::new(), Vec::new()];
        for d in deliveries {
            let wing = if d.x == self.b_site(0) {
                0
            } else if d.x == self.b_site(1) {
                1
            } else {
                return Err(TaskError::MalformedOutcome(format!(
                    "delivery at x={} is not a B site",
                    d.x
                )));
            };
            let value = bit::decode(d.symbol).ok_or_else(|| {
                TaskError::MalformedOutcome(format!(
                    "delivery at x={} carries a non-bit symbol",
                    d.x
                ))
            })?;
            if d.t <= self.deadline() {
                received[wing].push(value);
            }
        }
        let mut values = [false; 2];
        for wing in 0..2 {
            match received[wing].as_slice() {
                [v] => values[wing] = *v,
                [] => return Ok(Err(Violation::MissingBit { wing })),
                more => {
                    return Ok(Err(Violation::ExtraBits {
                        wing,
                        count: more.len(),
                    }))
                }
            }
        }
        if values[0] == values[1] {
            return Ok(Err(Violation::NotAntiCorrelated {
                value: u8::from(values[0]),
            }));
        }
        let one_wing = if values[0] { 0 } else { 1 };
        if !pattern.contains(one_wing) {
            return Ok(Err(Violation::OneToZeroSender { wing: one_wing }));
        }
        Ok(Ok(()))
    }
}

/// One of the two requests in the two-lab signalling task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Request {
    /// Submitted at `L`; a signal must reach `R` at `T`.
    Task1,
    /// Submitted at `R`; a signal must reach `L` at `T`.
    Task2,
}

impl Request {
    pub fn index(self) -> usize {
        match self {
            Request::Task1 => 0,
            Request::Task2 => 1,
        }
    }
}

/// Two labs on a line: `L` at `0`, `R` at `D`, with `T = D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OriginalSignalTask {
    d: i64,
}

impl OriginalSignalTask {
    pub fn new(d: i64) -> Result<Self, TaskError> {
        if d < 2 {
            return Err(invariant("D must be ≥ 2", format!("D = {d}")));
        }
        Ok(OriginalSignalTask { d })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn deadline(&self) -> i64 {
        self.d
    }

    pub fn lab_l(&self) -> i64 {
        0
    }

    pub fn lab_r(&self) -> i64 {
        self.d
    }

    /// Where the request is submitted.
    pub fn origin(&self, r: Request) -> i64 {
        match r {
            Request::Task1 => self.lab_l(),
            Request::Task2 => self.lab_r(),
        }
    }

    /// Where the requested signal has to arrive.
    pub fn destination(&self, r: Request) -> i64 {
        match r {
            Request::Task1 => self.lab_r(),
            Request::Task2 => self.lab_l(),
        }
    }

    pub fn admissible_patterns(&self) -> Vec<CallPattern> {
        nonempty_subsets(2)
    }

    /// Tasks fulfilled by a delivery record: a signal reaches the destination
    /// at exactly `T` and nothing reaches the origin during `[0, T]`.
    pub fn fulfilled(&self, deliveries: &[Delivery]) -> Result<BTreeSet<Request>, TaskError> {
        for d in deliveries {
            if d.x != self.lab_l() && d.x != self.lab_r() {
                return Err(TaskError::MalformedOutcome(format!(
                    "delivery at x={} is not a lab",
                    d.x
                )));
            }
            if d.symbol.is_silence() {
                return Err(TaskError::MalformedOutcome("silent delivery".into()));
            }
        }
        let t_end = self.deadline();
        let mut out = BTreeSet::new();
        for r in [Request::Task1, Request::Task2] {
            let on_time = deliveries
                .iter()
                .any(|d| d.x == self.destination(r) && d.t == t_end);
            let back = deliveries
                .iter()
                .any(|d| d.x == self.origin(r) && (0..=t_end).contains(&d.t));
            if on_time && !back {
                out.insert(r);
            }
        }
        Ok(out)
    }

    pub fn judge(
        &self,
        pattern: CallPattern,
        deliveries: &[Delivery],
    ) -> Result<Verdict, TaskError> {
        let done = self.fulfilled(deliveries)?;
        if done.iter().any(|r| pattern.contains(r.index())) {
            Ok(Ok(()))
        } else {
            let fulfilled = done.iter().fold(CallPattern::default(), |m, r| {
                CallPattern(m.0 | 1 << r.index())
            });
            Ok(Err(Violation::NothingRequestedFulfilled { fulfilled }))
        }
    }
}

/// A symbol arriving at an observer site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Delivery {
    pub t: i64,
    pub x: i64,
    pub symbol: Symbol,
}

/// Why a run failed its task.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    NoDelivery,
    MultipleDeliveries(usize),
    WrongPlace { t: i64, x: i64 },
    MissingBit { wing: usize },
    ExtraBits { wing: usize, count: usize },
    NotAntiCorrelated { value: u8 },
    OneToZeroSender { wing: usize },
    NothingRequestedFulfilled { fulfilled: CallPattern },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoDelivery => write!(f, "no delivery"),
            Violation::MultipleDeliveries(n) => write!(f, "{n} deliveries"),
            Violation::WrongPlace { t, x } => {
                write!(f, "delivery at t={t} x={x} is not a called return point")
            }
            Violation::MissingBit { wing } => write!(f, "B_{wing} received no bit by the deadline"),
            Violation::ExtraBits { wing, count } => write!(f, "B_{wing} received {count} bits"),
            Violation::NotAntiCorrelated { value } => write!(f, "both B agents received {value}"),
            Violation::OneToZeroSender { wing } => {
                write!(f, "the 1 went to B_{wing}, which sent 0")
            }
            Violation::NothingRequestedFulfilled { fulfilled } => {
                write!(
                    f,
                    "no requested task fulfilled (fulfilled={})",
                    fulfilled.to_set_string()
                )
            }
        }
    }
}

/// `Ok(())` on success, otherwise the violated requirement.
pub type Verdict = Result<(), Violation>;

/// The task a lattice scenario is judged against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoverningTask {
    Summoning(SummoningTask),
    Refined(RefinedBitTask),
    Original(OriginalSignalTask),
    /// Accepts every outcome; the adversary is the given pattern list.
    Unconstrained(Vec<CallPattern>),
    /// `base`'s predicate against a chosen subset of adversary patterns.
    Restricted {
        base: Box<GoverningTask>,
        patterns: Vec<CallPattern>,
    },
}

impl GoverningTask {
    pub fn admissible_patterns(&self) -> Vec<CallPattern> {
        match self {
            GoverningTask::Summoning(t) => t.admissible_patterns(),
            GoverningTask::Refined(t) => t.admissible_patterns(),
            GoverningTask::Original(t) => t.admissible_patterns(),
            GoverningTask::Unconstrained(p) => p.clone(),
            GoverningTask::Restricted { patterns, .. } => patterns.clone(),
        }
    }

    pub fn success_predicate(
        &self,
        pattern: CallPattern,
        deliveries: &[Delivery],
    ) -> Result<Verdict, TaskError> {
        match self {
            GoverningTask::Summoning(t) => t.judge(pattern, deliveries),
            GoverningTask::Refined(t) => t.judge(pattern, deliveries),
            GoverningTask::Original(t) => t.judge(pattern, deliveries),
            GoverningTask::Unconstrained(_) => Ok(Ok(())),
            GoverningTask::Restricted { base, .. } => base.success_predicate(pattern, deliveries),
        }
    }

    pub fn format_pattern(&self, p: CallPattern) -> String {
        match self {
            GoverningTask::Refined(_) => p.to_bits_string(),
            GoverningTask::Restricted { base, .. } => base.format_pattern(p),
            _ => p.to_set_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(ct: i64, cx: i64, rt: i64, rx: i64) -> CallReturnPair {
        CallReturnPair::new(Point::line(ct, cx), Point::line(rt, rx)).unwrap()
    }

    fn one_pair(p: CallReturnPair) -> SummoningTask {
        SummoningTask::new(Point::line(0, 0), vec![p], CallMode::SingleGuaranteed).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(validate_summoning(&one_pair(pair(1, 0, 2, 0)))
            .unwrap()
            .passed());

        let r = validate_summoning(&one_pair(pair(1, 3, 2, 3))).unwrap();
        assert!(!r.passed());
        assert!(r.pairs[0].after_call);
        assert!(!r.pairs[0].after_start);

        let r = validate_summoning(&one_pair(pair(1, 0, 1, 0))).unwrap();
        assert!(!r.pairs[0].after_call);
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn summoning_rejects_bad_shapes() {
        let s = Point::line(0, 0);
        assert!(SummoningTask::new(s.clone(), vec![], CallMode::SingleGuaranteed).is_err());
        assert!(SummoningTask::new(
            s.clone(),
            vec![pair(1, 0, 2, 0), pair(1, 0, 2, 0)],
            CallMode::SingleGuaranteed
        )
        .is_err());
        let planar = CallReturnPair::new(
            Point::new(1, vec![0, 0]).unwrap(),
            Point::new(2, vec![0, 0]).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            SummoningTask::new(s, vec![planar], CallMode::SingleGuaranteed),
            Err(TaskError::Geometry(_))
        ));
        assert!(
            CallReturnPair::new(Point::line(0, 0), Point::new(1, vec![0, 0]).unwrap()).is_err()
        );
    }

    #[test]
    fn subset_order() {
        let t = SummoningTask::new(
            Point::line(0, 0),
            vec![pair(1, 0, 2, 0), pair(1, 1, 3, 1)],
            CallMode::MultiplePossible,
        )
        .unwrap();
        let got: Vec<String> = t
            .admissible_patterns()
            .into_iter()
            .map(|p| p.to_set_string())
            .collect();
        assert_eq!(got, ["{1}", "{2}", "{1,2}"]);
        let got: Vec<String> = nonempty_subsets(3)
            .into_iter()
            .map(|p| p.to_set_string())
            .collect();
        assert_eq!(
            got,
            ["{1}", "{2}", "{3}", "{1,2}", "{1,3}", "{2,3}", "{1,2,3}"]
        );
        assert_eq!(
            t.with_mode(CallMode::SingleGuaranteed)
                .admissible_patterns()
                .len(),
            2
        );
    }

    #[test]
    fn refined_patterns() {
        let t = RefinedBitTask::new(8, 1, Promise::AtLeastOne).unwrap();
        let got: Vec<String> = t
            .admissible_patterns()
            .into_iter()
            .map(|p| p.to_bits_string())
            .collect();
        assert_eq!(got, ["(0,1)", "(1,0)", "(1,1)"]);
        let got: Vec<String> = t
            .with_promise(Promise::ExactlyOne)
            .admissible_patterns()
            .into_iter()
            .map(|p| p.to_bits_string())
            .collect();
        assert_eq!(got, ["(0,1)", "(1,0)"]);
    }

    #[test]
    fn refined_invariants() {
        assert!(RefinedBitTask::new(8, 0, Promise::ExactlyOne).is_err());
        assert!(RefinedBitTask::new(3, 2, Promise::ExactlyOne).is_err());
        let t = RefinedBitTask::new(8, 1, Promise::ExactlyOne).unwrap();
        assert_eq!(t.layout(), [-1, 0, 8, 9]);
        assert_eq!(t.deadline(), 2);
    }

    fn out(t: i64, x: i64, b: bool) -> Delivery {
        Delivery {
            t,
            x,
            symbol: bit::encode(b),
        }
    }

    #[test]
    fn refined_predicate_examples() {
        let t = RefinedBitTask::new(8, 1, Promise::AtLeastOne).unwrap();
        let p01 = CallPattern(0b10);
        let p11 = CallPattern(0b11);
        assert_eq!(
            t.judge(p01, &[out(2, -1, false), out(2, 9, true)]).unwrap(),
            Ok(())
        );
        assert_eq!(
            t.judge(p11, &[out(2, -1, true), out(2, 9, true)]).unwrap(),
            Err(Violation::NotAntiCorrelated { value: 1 })
        );
        assert_eq!(
            t.judge(p01, &[out(2, -1, true), out(2, 9, false)]).unwrap(),
            Err(Violation::OneToZeroSender { wing: 0 })
        );
        assert_eq!(
            t.judge(p01, &[out(3, -1, false), out(2, 9, true)]).unwrap(),
            Err(Violation::MissingBit { wing: 0 })
        );
        assert_eq!(
            t.judge(
                p01,
                &[out(1, -1, false), out(2, -1, false), out(2, 9, true)]
            )
            .unwrap(),
            Err(Violation::ExtraBits { wing: 0, count: 2 })
        );
        assert!(matches!(
            t.judge(p01, &[out(2, 4, true)]),
            Err(TaskError::MalformedOutcome(_))
        ));
        let silent = Delivery {
            t: 2,
            x: -1,
            symbol: Symbol::SILENCE,
        };
        assert!(matches!(
            t.judge(p01, &[silent]),
            Err(TaskError::MalformedOutcome(_))
        ));
    }

    #[test]
    fn original_fulfillment() {
        let t = OriginalSignalTask::new(8).unwrap();
        let sig = Symbol(1);
        let at_r = Delivery {
            t: 8,
            x: 8,
            symbol: sig,
        };
        let at_l = Delivery {
            t: 8,
            x: 0,
            symbol: sig,
        };
        assert!(t.fulfilled(&[at_r, at_l]).unwrap().is_empty());
        assert_eq!(
            t.fulfilled(&[at_r]).unwrap(),
            BTreeSet::from([Request::Task1])
        );
        assert_eq!(
            t.fulfilled(&[at_l]).unwrap(),
            BTreeSet::from([Request::Task2])
        );
        // late arrival in the opposite direction is outside the window
        let late = Delivery {
            t: 9,
            x: 0,
            symbol: sig,
        };
        assert_eq!(
            t.fulfilled(&[at_r, late]).unwrap(),
            BTreeSet::from([Request::Task1])
        );
        // early arrival is not "at time T"
        let early = Delivery {
            t: 7,
            x: 8,
            symbol: sig,
        };
        assert!(t.fulfilled(&[early]).unwrap().is_empty());

        assert_eq!(t.judge(CallPattern(0b01), &[at_r]).unwrap(), Ok(()));
        assert!(t.judge(CallPattern(0b10), &[at_r]).unwrap().is_err());
        assert!(t
            .fulfilled(&[Delivery {
                t: 8,
                x: 3,
                symbol: sig
            }])
            .is_err());
        assert!(OriginalSignalTask::new(1).is_err());
    }

    #[test]
    fn summoning_predicate() {
        let t = SummoningTask::new(
            Point::line(0, 2),
            vec![pair(1, 0, 5, 0), pair(1, 4, 5, 4)],
            CallMode::MultiplePossible,
        )
        .unwrap();
        let at = |t, x| Delivery {
            t,
            x,
            symbol: Symbol(1),
        };
        assert_eq!(t.judge(CallPattern(0b01), &[at(5, 0)]).unwrap(), Ok(()));
        assert_eq!(
            t.judge(CallPattern(0b10), &[at(5, 0)]).unwrap(),
            Err(Violation::WrongPlace { t: 5, x: 0 })
        );
        assert_eq!(
            t.judge(CallPattern(0b11), &[]).unwrap(),
            Err(Violation::NoDelivery)
        );
        assert_eq!(
            t.judge(CallPattern(0b11), &[at(5, 0), at(5, 4)]).unwrap(),
            Err(Violation::MultipleDeliveries(2))
        );
    }
}
