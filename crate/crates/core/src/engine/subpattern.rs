//! Subpattern-per-rule evaluation.
//!
//! Rule `k` has as head the variables of subpattern `k` that some other
//! subpattern (or the projection) also uses. Its body calls the rules of the
//! earlier subpatterns that first bind its imported variables, then lists its
//! own atoms. Calls are re-derived each time, never tabled, so shared prefixes
//! are enumerated again for every dependent rule. The overarching rule joins
//! the materialized relations in subpattern order.

use std::collections::BTreeSet;

use rustc_hash::FxHashSet;
use smallvec::SmallVec;

use super::exec::{Counters, Exec, Flow, Probe, Table};
use super::plan::{self, Access, CAtom, Compiled, Goal, Raw, Rule};
use crate::graph::GraphStore;
use crate::relations::Relations;

pub(super) struct Layout {
    pub heads: Vec<Vec<usize>>,
    pub deps: Vec<Vec<usize>>,
}

pub(super) fn layout(c: &Compiled) -> Layout {
    let n = c.subs.len();
    let occurs: Vec<Vec<usize>> = c
        .subs
        .iter()
        .map(|r| {
            let mut seen = Vec::new();
            for a in &c.atoms[r.clone()] {
                for s in a.slots() {
                    if !seen.contains(&s) {
                        seen.push(s);
                    }
                }
            }
            seen
        })
        .collect();
    let mut provider = vec![usize::MAX; c.slot_count()];
    for (k, r) in c.subs.iter().enumerate() {
        for a in c.atoms[r.clone()].iter().filter(|a| !matches!(a, CAtom::Check { .. })) {
            for s in a.slots() {
                provider[s] = provider[s].min(k);
            }
        }
    }
    let heads = (0..n)
        .map(|k| {
            occurs[k]
                .iter()
                .copied()
                .filter(|&s| s == c.root || (0..n).any(|j| j != k && occurs[j].contains(&s)))
                .collect()
        })
        .collect();
    let deps = (0..n)
        .map(|k| {
            occurs[k]
                .iter()
                .map(|&s| provider[s])
                .filter(|&p| p < k)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .collect();
    Layout { heads, deps }
}

fn expand(c: &Compiled, deps: &[Vec<usize>], k: usize, out: &mut Vec<Goal>) {
    for &d in &deps[k] {
        expand(c, deps, d, out);
    }
    out.extend(c.subs[k].clone().map(Goal::Atom));
    out.push(Goal::End(Rule::Sub(k)));
}

pub(super) fn run(g: &GraphStore, c: &Compiled, rel: &dyn Relations) -> (BTreeSet<Raw>, Counters) {
    let Layout { heads, deps } = layout(c);
    let green_eq = rel.green_is_equality();
    let mut counters = Counters::default();

    let mut tables = Vec::with_capacity(c.subs.len());
    for (k, head) in heads.iter().enumerate() {
        let mut goals = Vec::new();
        expand(c, &deps, k, &mut goals);
        let prog = plan::schedule(c, &goals, vec![false; c.slot_count()], &[], green_eq);
        let mut table = Table::new(head.len());
        let mut seen: FxHashSet<SmallVec<[Raw; 4]>> = FxHashSet::default();
        let mut ex = Exec::new(g, c, &prog, rel, &[], &[], vec![None; c.slot_count()]);
        ex.run(&mut |slots| {
            let row: SmallVec<[Raw; 4]> = head.iter().map(|&s| slots[s].expect("head bound")).collect();
            if seen.insert(row.clone()) {
                table.push(&row);
            }
            Flow::Continue
        });
        counters.add(ex.counters);
        tables.push(table);
    }

    let goals: Vec<Goal> = (0..c.subs.len())
        .map(Goal::Relation)
        .chain([Goal::End(Rule::Root)])
        .collect();
    let prog = plan::schedule(c, &goals, vec![false; c.slot_count()], &heads, green_eq);
    let probes: Vec<Probe> = tables
        .into_iter()
        .enumerate()
        .map(|(k, table)| {
            let key = prog
                .steps
                .iter()
                .find_map(|s| match (&s.goal, &s.access) {
                    (Goal::Relation(j), Access::Relation { key, .. }) if *j == k => Some(key.clone()),
                    _ => None,
                })
                .unwrap_or_default();
            Probe::new(table, &key)
        })
        .collect();

    let mut roots = BTreeSet::new();
    let mut ex = Exec::new(g, c, &prog, rel, &probes, &heads, vec![None; c.slot_count()]);
    ex.run(&mut |slots| {
        roots.insert(slots[c.root].expect("root bound"));
        Flow::Continue
    });
    counters.add(ex.counters);
    (roots, counters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Schema;
    use crate::pattern::builtin_agile_lite;

    fn names(c: &Compiled, slots: &[usize]) -> Vec<String> {
        slots.iter().map(|&s| c.vars[s].name().to_string()).collect()
    }

    #[test]
    fn agile_lite_interfaces() {
        let c = Compiled::new(&builtin_agile_lite(), &Schema::default()).unwrap();
        let l = layout(&c);
        assert_eq!(names(&c, &l.heads[0]), ["W1", "T21", "T22"]);
        assert_eq!(names(&c, &l.heads[1]), ["T21", "T22", "W1", "V3"]);
        assert_eq!(names(&c, &l.heads[2]), ["X", "Y1", "Pa"]);
        assert_eq!(names(&c, &l.heads[3]), ["X"]);
        assert_eq!(names(&c, &l.heads[5]), ["X", "V3", "T21", "T22"]);
        assert_eq!(l.deps[0], Vec::<usize>::new());
        assert_eq!(l.deps[1], vec![0]);
        assert_eq!(l.deps[3], vec![2]);
        assert_eq!(l.deps[4], vec![2]);
        assert_eq!(l.deps[5], vec![0, 1, 2]);
    }
}
