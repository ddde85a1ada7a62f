//! The token solver against a naive game-tree oracle, plus knowledge laws.

use std::collections::BTreeMap;

use causaltask::task::{CallMode, CallPattern, CallReturnPair, SummoningTask};
use causaltask::token::{
    knowledge_at, plan_run, token_feasible, Knowledge, TokenTask, TokenVerdict, Window,
};
use causaltask::Point;
use proptest::prelude::*;

const W: Window = Window {
    x_min: -2,
    x_max: 2,
    t_max: 5,
};

/// Straight from the definition: Alice moves, the adversary's pattern is
/// revealed only through the knowledge at the next point.
fn oracle(task: &SummoningTask, t: i64, x: i64, patterns: &[CallPattern]) -> bool {
    let delivers = |p: &CallPattern| {
        task.pairs()
            .iter()
            .enumerate()
            .any(|(i, pr)| p.contains(i) && pr.ret.t() == t && pr.ret.x() == x)
    };
    if patterns.iter().all(delivers) {
        return true;
    }
    if t == W.t_max {
        return false;
    }
    (-1..=1).any(|dx| {
        let nx = x + dx;
        (W.x_min..=W.x_max).contains(&nx)
            && split(task, t + 1, nx, patterns)
                .into_values()
                .all(|g| oracle(task, t + 1, nx, &g))
    })
}

fn split(
    task: &SummoningTask,
    t: i64,
    x: i64,
    patterns: &[CallPattern],
) -> BTreeMap<Knowledge, Vec<CallPattern>> {
    let mut groups: BTreeMap<Knowledge, Vec<CallPattern>> = BTreeMap::new();
    for &p in patterns {
        groups
            .entry(knowledge_at(&Point::line(t, x), p, task).unwrap())
            .or_default()
            .push(p);
    }
    groups
}

fn oracle_feasible(task: &SummoningTask) -> bool {
    let s = task.start();
    split(task, s.t(), s.x(), &task.admissible_patterns())
        .into_values()
        .all(|g| oracle(task, s.t(), s.x(), &g))
}

/// Valid tasks built directly: each return point lies strictly inside the
/// future of both its call point and the start.
fn tasks() -> impl Strategy<Value = TokenTask> {
    let raw_pair = (0i64..=3, W.x_min..=W.x_max, 0i64..=2, any::<u8>());
    (
        W.x_min..=W.x_max,
        prop::collection::vec(raw_pair, 1..=3),
        any::<bool>(),
    )
        .prop_filter_map(
            "empty cone intersection or repeated pair",
            |(sx, raw, multi)| {
                let mut pairs = Vec::new();
                for (ct, cx, drt, pick) in raw {
                    let rt = (ct + 1 + drt).min(W.t_max);
                    let lo = (cx - (rt - ct)).max(sx - rt).max(W.x_min);
                    let hi = (cx + (rt - ct)).min(sx + rt).min(W.x_max);
                    if lo > hi {
                        return None;
                    }
                    let rx = lo + i64::from(pick) % (hi - lo + 1);
                    pairs.push(
                        CallReturnPair::new(Point::line(ct, cx), Point::line(rt, rx)).unwrap(),
                    );
                }
                let mode = if multi {
                    CallMode::MultiplePossible
                } else {
                    CallMode::SingleGuaranteed
                };
                let task = SummoningTask::new(Point::line(0, sx), pairs, mode).ok()?;
                TokenTask::new(task).ok()
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_500))]

    #[test]
    fn solver_matches_oracle(task in tasks()) {
        let verdict = token_feasible(&task, W).unwrap();
        prop_assert_eq!(verdict.is_feasible(), oracle_feasible(task.task()));
        if let TokenVerdict::Feasible(plan) = verdict {
            for p in task.task().admissible_patterns() {
                let run = plan_run(&task, W, &plan, p).unwrap();
                prop_assert!(run.success);
                // light speed and growing knowledge along the way
                for (a, b) in run.trajectory.windows(2).map(|w| (w[0], w[1])) {
                    prop_assert_eq!(b.0, a.0 + 1);
                    prop_assert!((b.1 - a.1).abs() <= 1);
                }
                for k in run.knowledge.windows(2) {
                    prop_assert!(k[0].refined_by(&k[1]));
                }
            }
        }
    }

    /// A plan sees only knowledge: two patterns follow the same path until
    /// their knowledge first differs.
    #[test]
    fn plans_are_measurable(task in tasks()) {
        let TokenVerdict::Feasible(plan) = token_feasible(&task, W).unwrap() else { return Ok(()); };
        let runs: Vec<_> = task.task().admissible_patterns().into_iter().map(|p| plan_run(&task, W, &plan, p).unwrap()).collect();
        for a in &runs {
            for b in &runs {
                for i in 0..a.trajectory.len().min(b.trajectory.len()) {
                    prop_assert_eq!(a.trajectory[i], b.trajectory[i]);
                    if a.knowledge[i] != b.knowledge[i] {
                        break;
                    }
                }
            }
        }
    }

    /// A single-call plan lifts to the multi-call adversary.
    #[test]
    fn single_feasible_implies_multi_feasible(task in tasks()) {
        let single = token_feasible(&task.with_mode(CallMode::SingleGuaranteed), W).unwrap();
        let multi = token_feasible(&task.with_mode(CallMode::MultiplePossible), W).unwrap();
        prop_assert_eq!(single.is_feasible(), multi.is_feasible());
    }

    /// Knowledge only grows along any causal walk.
    #[test]
    fn knowledge_monotone_along_walks(task in tasks(), steps in prop::collection::vec(-1i64..=1, 8), mask in 1u64..8) {
        let p = CallPattern(mask & ((1 << task.task().pairs().len()) - 1));
        prop_assume!(!p.is_empty());
        let (mut t, mut x) = (0, 0);
        let mut prev = knowledge_at(&Point::line(t, x), p, task.task()).unwrap();
        for dx in steps {
            t += 1;
            x += dx;
            let k = knowledge_at(&Point::line(t, x), p, task.task()).unwrap();
            prop_assert!(prev.refined_by(&k));
            prev = k;
        }
    }
}

#[test]
fn documented_two_pair_cases() {
    let pair =
        |ct, cx, rt, rx| CallReturnPair::new(Point::line(ct, cx), Point::line(rt, rx)).unwrap();
    for (rt, feasible) in [(5, true), (4, false)] {
        for mode in [CallMode::SingleGuaranteed, CallMode::MultiplePossible] {
            let t = SummoningTask::new(
                Point::line(0, 2),
                vec![pair(1, 0, rt, 0), pair(1, 4, rt, 4)],
                mode,
            )
            .unwrap();
            let w = Window::enclosing(&t);
            assert_eq!(
                token_feasible(&TokenTask::new(t).unwrap(), w)
                    .unwrap()
                    .is_feasible(),
                feasible
            );
        }
    }
}
