//! Pattern evaluation.
//!
//! Three strategies compute the same root set:
//!
//! * [`Strategy::Unified`]: the whole pattern as one rule body, evaluated
//!   left to right with bindings flowing forward across subpattern
//!   boundaries.
//! * [`Strategy::Subpattern`]: every subpattern is its own rule. Each is
//!   materialized into a relation over its interface variables, re-deriving
//!   the earlier subpatterns it depends on, and an overarching rule joins the
//!   relations in order.
//! * [`Strategy::Bruteforce`]: nested scans over every fact of each atom's
//!   predicate without any index. Used as the test oracle.
//!
//! Inference accounting: `atom_matches` counts successful atom-against-fact
//! unifications (constraints that hold count too), `rule_firings` counts
//! completed rule bodies. Reported inferences are their sum.

mod bruteforce;
mod certify;
mod exec;
mod plan;
mod subpattern;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;

use crate::graph::{GraphStore, ObjectId, PropertyValue};
use crate::pattern::{Pattern, PatternFinding, Role, Var};
use crate::relations::{KeyEquality, Relations};

pub use certify::CertifyError;
use exec::{Counters, Exec, Flow};
use plan::{Compiled, Goal, Raw, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    Unified,
    Subpattern,
    Bruteforce,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Self::Unified, Self::Subpattern, Self::Bruteforce];

    pub fn name(self) -> &'static str {
        match self {
            Self::Unified => "unified",
            Self::Subpattern => "subpattern",
            Self::Bruteforce => "bruteforce",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown strategy `{s}` (expected unified, subpattern or bruteforce)"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MatchStats {
    pub atom_matches: u64,
    pub rule_firings: u64,
    pub backtracks: u64,
    pub elapsed_seconds: f64,
}

impl MatchStats {
    pub fn inferences(&self) -> u64 {
        self.atom_matches + self.rule_firings
    }

    fn from_counters(c: Counters, elapsed_seconds: f64) -> Self {
        MatchStats {
            atom_matches: c.atom_matches,
            rule_firings: c.rule_firings,
            backtracks: c.backtracks,
            elapsed_seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    /// Distinct root ids, ascending.
    pub roots: Vec<ObjectId>,
    pub stats: MatchStats,
    pub strategy: Strategy,
}

/// A value bound to a pattern variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Id(ObjectId),
    Prop(PropertyValue),
}

impl Value {
    fn from_raw(raw: Raw, role: Role) -> Self {
        match role {
            Role::Id => Value::Id(ObjectId(raw)),
            Role::Prop => Value::Prop(PropertyValue(raw as i64)),
        }
    }

    pub fn as_id(self) -> Option<ObjectId> {
        match self {
            Value::Id(id) => Some(id),
            Value::Prop(_) => None,
        }
    }

    pub fn as_prop(self) -> Option<PropertyValue> {
        match self {
            Value::Prop(p) => Some(p),
            Value::Id(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Id(id) => write!(f, "{id}"),
            Value::Prop(p) => write!(f, "{p}"),
        }
    }
}

/// Assignment of pattern variables to values.
pub type Binding = BTreeMap<Var, Value>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchError {
    #[error("invalid pattern: {}", render_findings(.0))]
    InvalidPattern(Vec<PatternFinding>),
    #[error("brute-force search examined more than {limit} candidate tuples")]
    SizeGuard { limit: u64 },
}

fn render_findings(f: &[PatternFinding]) -> String {
    f.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Default cap on candidate tuples examined by the brute-force oracle.
pub const DEFAULT_BRUTEFORCE_BUDGET: u64 = 1_000_000_000;

/// Evaluation entry point with configurable constraint semantics.
#[derive(Clone)]
pub struct Matcher {
    relations: Arc<dyn Relations>,
    bruteforce_budget: u64,
}

impl Default for Matcher {
    fn default() -> Self {
        Matcher {
            relations: Arc::new(KeyEquality::default()),
            bruteforce_budget: DEFAULT_BRUTEFORCE_BUDGET,
        }
    }
}

impl fmt::Debug for Matcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matcher")
            .field("bruteforce_budget", &self.bruteforce_budget)
            .finish_non_exhaustive()
    }
}

impl Matcher {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_relations(mut self, relations: Arc<dyn Relations>) -> Self {
        self.relations = relations;
        self
    }

    pub fn with_bruteforce_budget(mut self, limit: u64) -> Self {
        self.bruteforce_budget = limit;
        self
    }

    pub fn relations(&self) -> &dyn Relations {
        self.relations.as_ref()
    }

    pub fn run(&self, strategy: Strategy, g: &GraphStore, p: &Pattern) -> Result<MatchResult, MatchError> {
        match strategy {
            Strategy::Unified => self.unified(g, p),
            Strategy::Subpattern => self.subpattern(g, p),
            Strategy::Bruteforce => self.bruteforce(g, p),
        }
    }

    fn compile(&self, g: &GraphStore, p: &Pattern) -> Result<Compiled, MatchError> {
        Compiled::new(p, g.schema()).map_err(MatchError::InvalidPattern)
    }

    /// One rule whose body is every atom of the pattern, in order.
    pub fn unified(&self, g: &GraphStore, p: &Pattern) -> Result<MatchResult, MatchError> {
        let c = self.compile(g, p)?;
        let start = Instant::now();
        let goals: Vec<Goal> = (0..c.atoms.len())
            .map(Goal::Atom)
            .chain([Goal::End(Rule::Root)])
            .collect();
        let prog = plan::schedule(
            &c,
            &goals,
            vec![false; c.slot_count()],
            &[],
            self.relations.green_is_equality(),
        );
        let mut roots = BTreeSet::new();
        let mut ex = Exec::new(g, &c, &prog, self.relations(), &[], &[], vec![None; c.slot_count()]);
        ex.run(&mut |slots| {
            roots.insert(slots[c.root].expect("root bound in every solution"));
            Flow::Continue
        });
        let elapsed = start.elapsed().as_secs_f64();
        Ok(MatchResult {
            roots: roots.into_iter().map(ObjectId).collect(),
            stats: MatchStats::from_counters(ex.counters, elapsed),
            strategy: Strategy::Unified,
        })
    }

    /// Materialize each subpattern as its own rule, then join.
    pub fn subpattern(&self, g: &GraphStore, p: &Pattern) -> Result<MatchResult, MatchError> {
        let c = self.compile(g, p)?;
        let start = Instant::now();
        let (roots, counters) = subpattern::run(g, &c, self.relations());
        let elapsed = start.elapsed().as_secs_f64();
        Ok(MatchResult {
            roots: roots.into_iter().map(ObjectId).collect(),
            stats: MatchStats::from_counters(counters, elapsed),
            strategy: Strategy::Subpattern,
        })
    }

    /// Index-free nested enumeration. Refuses with [`MatchError::SizeGuard`]
    /// once the examined candidate count passes the configured budget.
    pub fn bruteforce(&self, g: &GraphStore, p: &Pattern) -> Result<MatchResult, MatchError> {
        let report = p.validate(g.schema());
        if !report.is_empty() {
            return Err(MatchError::InvalidPattern(report));
        }
        let start = Instant::now();
        let (roots, counters) = bruteforce::run(g, p, self.relations(), self.bruteforce_budget)?;
        let elapsed = start.elapsed().as_secs_f64();
        Ok(MatchResult {
            roots: roots.into_iter().collect(),
            stats: MatchStats::from_counters(counters, elapsed),
            strategy: Strategy::Bruteforce,
        })
    }

    /// One full binding under which `root` satisfies the pattern, if any.
    pub fn witness(&self, g: &GraphStore, p: &Pattern, root: ObjectId) -> Result<Option<Binding>, MatchError> {
        let c = self.compile(g, p)?;
        let mut prebound = vec![false; c.slot_count()];
        prebound[c.root] = true;
        let goals: Vec<Goal> = (0..c.atoms.len()).map(Goal::Atom).collect();
        let prog = plan::schedule(&c, &goals, prebound, &[], self.relations.green_is_equality());
        let mut init = vec![None; c.slot_count()];
        init[c.root] = Some(root.0);
        let mut found = None;
        let mut ex = Exec::new(g, &c, &prog, self.relations(), &[], &[], init);
        ex.run(&mut |slots| {
            found = Some(
                c.vars
                    .iter()
                    .zip(slots)
                    .zip(&c.roles)
                    .map(|((v, raw), &role)| (v.clone(), Value::from_raw(raw.expect("all bound"), role)))
                    .collect(),
            );
            Flow::Stop
        });
        Ok(found)
    }

    /// Re-checks every atom of `p` under `binding` against the store.
    pub fn certify(&self, g: &GraphStore, p: &Pattern, binding: &Binding) -> Result<(), CertifyError> {
        certify::certify(g, p, binding, self.relations())
    }
}

/// A rule of the subpattern strategy: `name(head) :- calls, atoms.`
///
/// `calls` lists the earlier subpatterns (by index) whose rules first bind
/// the variables this subpattern imports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubpatternRule {
    pub name: String,
    pub head: Vec<Var>,
    pub calls: Vec<usize>,
}

pub fn subpattern_rules(p: &Pattern, schema: &crate::graph::Schema) -> Result<Vec<SubpatternRule>, MatchError> {
    let c = Compiled::new(p, schema).map_err(MatchError::InvalidPattern)?;
    let l = subpattern::layout(&c);
    Ok(p.subpatterns()
        .iter()
        .zip(l.heads)
        .zip(l.deps)
        .map(|((s, head), calls)| SubpatternRule {
            name: s.name.clone(),
            head: head.into_iter().map(|i| c.vars[i].clone()).collect(),
            calls,
        })
        .collect())
}

pub fn match_unified(g: &GraphStore, p: &Pattern) -> Result<MatchResult, MatchError> {
    Matcher::default().unified(g, p)
}

pub fn match_subpattern(g: &GraphStore, p: &Pattern) -> Result<MatchResult, MatchError> {
    Matcher::default().subpattern(g, p)
}

pub fn match_bruteforce(g: &GraphStore, p: &Pattern) -> Result<MatchResult, MatchError> {
    Matcher::default().bruteforce(g, p)
}
