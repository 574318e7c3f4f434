//! Slow reference evaluators, kept deliberately independent of the folded
//! expansion-table machinery. The test suites check the fast paths against
//! these.

use crate::formula::Formula;
use crate::trace::{TraceAssignment, UpTrace};
use std::collections::BTreeMap;

fn joint_bounds(traces: &BTreeMap<String, UpTrace>) -> (usize, usize) {
    let stem = traces.values().map(|t| t.stem_len()).max().unwrap_or(0);
    let mut period = 1usize;
    for t in traces.values() {
        let p = t.cycle_len();
        let g = {
            let (mut a, mut b) = (period, p);
            while b != 0 {
                let r = a % b;
                a = b;
                b = r;
            }
            a
        };
        period = period / g * p;
    }
    (stem, period)
}

/// Evaluates a quantifier-free body by unrolling the joint word for
/// `2(S+P)` explicit positions and solving Until backwards, anchored at the
/// periodic tail (position `L` is identified with `L - P`).
pub fn unrolled_eval(body: &Formula, assignment: &TraceAssignment) -> bool {
    let core = body.desugar();
    let mut traces: BTreeMap<String, UpTrace> = BTreeMap::new();
    for v in core.free_variables() {
        traces.insert(
            v.clone(),
            assignment
                .trace(&v)
                .expect("oracle needs a full assignment"),
        );
    }
    let (stem, period) = joint_bounds(&traces);
    let len = 2 * (stem + period);

    fn eval(
        f: &Formula,
        traces: &BTreeMap<String, UpTrace>,
        assignment: &TraceAssignment,
        len: usize,
        period: usize,
    ) -> Vec<bool> {
        let wrap = |i: usize| if i < len { i } else { i - period };
        match f {
            Formula::True => vec![true; len],
            Formula::False => vec![false; len],
            Formula::Atom { prop, var } => {
                let idx = assignment.alphabet().index_of(prop);
                let t = &traces[var];
                (0..len)
                    .map(|i| idx.map(|idx| t.at(i).contains(idx)).unwrap_or(false))
                    .collect()
            }
            Formula::Not(a) => eval(a, traces, assignment, len, period)
                .into_iter()
                .map(|v| !v)
                .collect(),
            Formula::Or(a, b) => {
                let va = eval(a, traces, assignment, len, period);
                let vb = eval(b, traces, assignment, len, period);
                va.into_iter().zip(vb).map(|(x, y)| x || y).collect()
            }
            Formula::Next(a) => {
                let va = eval(a, traces, assignment, len, period);
                (0..len).map(|i| va[wrap(i + 1)]).collect()
            }
            Formula::Until(a, b) => {
                let va = eval(a, traces, assignment, len, period);
                let vb = eval(b, traces, assignment, len, period);
                let mut row = vec![false; len];
                // the wrap at the top ties the tail back one period, so two
                // descending sweeps reach the fixpoint
                for _ in 0..2 {
                    for i in (0..len).rev() {
                        row[i] = vb[i] || (va[i] && row[wrap(i + 1)]);
                    }
                }
                row
            }
            other => panic!("non-core operator {other:?} in oracle"),
        }
    }

    eval(&core, &traces, assignment, len, period)[0]
}

/// Plain recursive scanner: Until searches witnesses within `S + P` steps
/// of the current position, which covers every distinct joint suffix.
pub fn scan_eval(body: &Formula, assignment: &TraceAssignment) -> bool {
    let core = body.desugar();
    let mut traces: BTreeMap<String, UpTrace> = BTreeMap::new();
    for v in core.free_variables() {
        traces.insert(
            v.clone(),
            assignment
                .trace(&v)
                .expect("oracle needs a full assignment"),
        );
    }
    let (stem, period) = joint_bounds(&traces);
    let bound = stem + period;

    fn eval(
        f: &Formula,
        pos: usize,
        traces: &BTreeMap<String, UpTrace>,
        assignment: &TraceAssignment,
        bound: usize,
    ) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom { prop, var } => assignment
                .alphabet()
                .index_of(prop)
                .map(|idx| traces[var].at(pos).contains(idx))
                .unwrap_or(false),
            Formula::Not(a) => !eval(a, pos, traces, assignment, bound),
            Formula::Or(a, b) => {
                eval(a, pos, traces, assignment, bound) || eval(b, pos, traces, assignment, bound)
            }
            Formula::Next(a) => eval(a, pos + 1, traces, assignment, bound),
            Formula::Until(a, b) => {
                for j in pos..=pos + bound {
                    if eval(b, j, traces, assignment, bound) {
                        return true;
                    }
                    if !eval(a, j, traces, assignment, bound) {
                        return false;
                    }
                }
                false
            }
            other => panic!("non-core operator {other:?} in oracle"),
        }
    }

    eval(&core, 0, &traces, assignment, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula_any;
    use crate::trace::{expansion_table, Alphabet, EvalOptions, TraceAssignment, UpTrace};

    #[test]
    fn oracles_agree_with_table_on_examples() {
        let a = Alphabet::new(["a", "b"]).unwrap();
        let l = |ls: &[&str]| a.labels(ls).unwrap();
        let t1 = UpTrace::new(vec![l(&["a"]), l(&[])], vec![l(&["b"]), l(&[])]).unwrap();
        let t2 = UpTrace::new(vec![], vec![l(&["a"]), l(&["b"]), l(&[])]).unwrap();
        let pi = TraceAssignment::empty(a).bind("p", t1).bind("q", t2);
        for s in [
            "a[p] U b[q]",
            "G F (b[p] & a[q])",
            "X (a[q] U (b[p] | b[q]))",
            "F G !a[p]",
            "(a[p] | b[q]) U (b[p] & X a[q])",
        ] {
            let body = parse_formula_any(s).unwrap();
            let fast = expansion_table(&body, &pi, &EvalOptions::default())
                .unwrap()
                .root_value();
            assert_eq!(
                fast,
                unrolled_eval(&body, &pi),
                "unrolled oracle disagrees on {s}"
            );
            assert_eq!(fast, scan_eval(&body, &pi), "scan oracle disagrees on {s}");
        }
    }
}
