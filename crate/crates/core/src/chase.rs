//! The chase of a goal egd/tgd over a set of egds and tgds.
//!
//! Each step rewrites the goal: an egd step identifies two values of the goal
//! body (the larger symbol is replaced by the smaller one), a tgd step adds
//! every missing head instance at once, with fresh symbols for head-only
//! values. The goal is implied exactly when some rewritten goal is trivial.

use std::fmt;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::model::{
    for_each_homomorphism, satisfies, Target, Dependency, Egd,
    ModelError, Relation, Tgd, Valuation,
};
use crate::symbol::{FreshSource, Symbol};

pub const DEFAULT_BUDGET: usize = 10_000;
/// Tableau size past which the chase gives up with [`Verdict::Exhausted`];
/// a single tgd step can add a number of rows polynomial in the current size.
pub const DEFAULT_MAX_ROWS: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChaseError {
    #[error("only egds and tgds can be chased, found {0}")]
    Unsupported(&'static str),
    #[error("dependency {index} is over a different schema than the goal")]
    SchemaMismatch { index: usize },
    #[error("rule precondition violated: {0}")]
    Precondition(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The dependency being chased: `σ_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChaseGoal {
    Egd(Egd),
    Tgd(Tgd),
}

impl ChaseGoal {
    pub fn body(&self) -> &Relation {
        match self {
            ChaseGoal::Egd(e) => e.body(),
            ChaseGoal::Tgd(t) => t.body(),
        }
    }

    pub fn schema(&self) -> &[Symbol] {
        self.body().schema()
    }

    pub fn is_trivial(&self) -> bool {
        self.to_dependency().is_trivial()
    }

    pub fn to_dependency(&self) -> Dependency {
        match self {
            ChaseGoal::Egd(e) => e.clone().into(),
            ChaseGoal::Tgd(t) => t.clone().into(),
        }
    }

    /// `g(σ)`: applies `g` to body, head, and the equated pair.
    pub fn substitute(&self, g: &Valuation) -> ChaseGoal {
        match self {
            ChaseGoal::Egd(e) => ChaseGoal::Egd(
                Egd::new(e.body().map(g), g.apply(e.lhs()), g.apply(e.rhs()))
                    .expect("substitution keeps equated values in the body"),
            ),
            ChaseGoal::Tgd(t) => ChaseGoal::Tgd(
                Tgd::new(t.body().map(g), t.head().map(g)).expect("schema and head size are kept"),
            ),
        }
    }

    fn with_body(&self, body: Relation) -> ChaseGoal {
        match self {
            ChaseGoal::Egd(e) => ChaseGoal::Egd(
                Egd::new(body, e.lhs(), e.rhs()).expect("the body only grows"),
            ),
            ChaseGoal::Tgd(t) => {
                ChaseGoal::Tgd(Tgd::new(body, t.head().clone()).expect("the body only grows"))
            }
        }
    }

    pub fn values(&self) -> Vec<Symbol> {
        self.to_dependency().values().into_iter().collect()
    }
}

impl TryFrom<Dependency> for ChaseGoal {
    type Error = ChaseError;

    fn try_from(d: Dependency) -> Result<Self, ChaseError> {
        match d {
            Dependency::Egd(e) => Ok(ChaseGoal::Egd(e)),
            Dependency::Tgd(t) => Ok(ChaseGoal::Tgd(t)),
            other => Err(ChaseError::Unsupported(other.kind())),
        }
    }
}

impl fmt::Display for ChaseGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChaseGoal::Egd(e) => e.fmt(f),
            ChaseGoal::Tgd(t) => t.fmt(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChaseStep {
    /// `valuation` embeds the body of dependency `dependency` with
    /// `f(x) != f(y)`; `replaced` was rewritten to `by` everywhere.
    Egd {
        dependency: usize,
        valuation: Valuation,
        replaced: Symbol,
        by: Symbol,
    },
    /// One extension `f'_i` per applicable valuation, defined on the body
    /// and head values of the dependency.
    Tgd {
        dependency: usize,
        extensions: Vec<Valuation>,
    },
}

impl ChaseStep {
    pub fn dependency(&self) -> usize {
        match self {
            ChaseStep::Egd { dependency, .. } | ChaseStep::Tgd { dependency, .. } => *dependency,
        }
    }

    /// Symbols minted by this step, in minting order.
    pub fn minted(&self, sigma: &[Dependency]) -> Vec<Symbol> {
        match (self, sigma.get(self.dependency())) {
            (ChaseStep::Tgd { extensions, .. }, Some(Dependency::Tgd(t))) => {
                let fresh = t.head_only_values();
                extensions
                    .iter()
                    .flat_map(|ext| fresh.iter().map(|v| ext.apply(*v)).collect::<Vec<_>>())
                    .collect()
            }
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChaseState {
    current: ChaseGoal,
    rho: Valuation,
    fresh: FreshSource,
    log: Vec<ChaseStep>,
}

impl ChaseState {
    /// Starts a chase of `goal`; fresh symbols are minted above every fresh
    /// symbol in `goal` and `sigma`.
    pub fn new(goal: ChaseGoal, sigma: &[Dependency]) -> Self {
        let mut seen = goal.values();
        seen.extend(goal.schema().iter().copied());
        for d in sigma {
            seen.extend(d.values());
            seen.extend(d.attributes());
        }
        ChaseState {
            fresh: FreshSource::above(seen.iter()),
            current: goal,
            rho: Valuation::new(),
            log: Vec::new(),
        }
    }

    pub fn current(&self) -> &ChaseGoal {
        &self.current
    }

    pub fn rho(&self) -> &Valuation {
        &self.rho
    }

    pub fn step_index(&self) -> usize {
        self.log.len()
    }

    pub fn fresh_floor(&self) -> u32 {
        self.fresh.watermark()
    }

    pub fn log(&self) -> &[ChaseStep] {
        &self.log
    }

    /// Keeps later mints above `floor`.
    pub fn raise_fresh_floor(&mut self, floor: u32) {
        self.fresh.raise_to(floor);
    }
}

fn check_schema(state: &ChaseState, body: &Relation, index: usize) -> Result<(), ChaseError> {
    if body.schema() == state.current.schema() {
        Ok(())
    } else {
        Err(ChaseError::SchemaMismatch { index })
    }
}

/// Valuations embedding the body of `tau` into the goal body with
/// `f(x) != f(y)`, in enumeration order.
pub fn applicable_egd(state: &ChaseState, tau: &Egd) -> Result<Vec<Valuation>, ChaseError> {
    let mut out = Vec::new();
    for_each_homomorphism(tau.body(), state.current.body(), &Valuation::new(), |f| {
        if f.apply(tau.lhs()) != f.apply(tau.rhs()) {
            out.push(f.clone());
        }
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

fn first_applicable_egd(state: &ChaseState, tau: &Egd) -> Result<Option<Valuation>, ChaseError> {
    let mut out = None;
    for_each_homomorphism(tau.body(), state.current.body(), &Valuation::new(), |f| {
        if f.apply(tau.lhs()) != f.apply(tau.rhs()) {
            out = Some(f.clone());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(out)
}

/// Applies the egd rule with valuation `f`; `index` is recorded in the log.
pub fn apply_egd(
    state: &ChaseState,
    tau: &Egd,
    index: usize,
    f: &Valuation,
) -> Result<ChaseState, ChaseError> {
    check_schema(state, tau.body(), index)?;
    let (a, b) = (f.apply(tau.lhs()), f.apply(tau.rhs()));
    if a == b {
        return Err(ChaseError::Precondition(format!("valuation equates {a} with itself")));
    }
    if !tau.body().map(f).rows().all(|row| state.current.body().contains(row)) {
        return Err(ChaseError::Precondition("valuation does not embed the egd body".into()));
    }
    let (by, replaced) = if a < b { (a, b) } else { (b, a) };
    let g: Valuation = [(replaced, by)].into_iter().collect();
    let mut rho: Valuation = state.rho.iter().map(|(u, v)| (u, g.apply(v))).collect();
    if !rho.contains(replaced) {
        rho.insert(replaced, by);
    }
    let mut log = state.log.clone();
    log.push(ChaseStep::Egd {
        dependency: index,
        valuation: f.clone(),
        replaced,
        by,
    });
    Ok(ChaseState {
        current: state.current.substitute(&g),
        rho,
        fresh: state.fresh.clone(),
        log,
    })
}

/// Valuations embedding the body of `tau` into the goal body that have no
/// extension embedding the head.
pub fn applicable_tgd(state: &ChaseState, tau: &Tgd) -> Result<Vec<Valuation>, ChaseError> {
    let target = Target::new(state.current.body(), tau.schema())?;
    let mut out = Vec::new();
    for f in target.all(tau.body(), &Valuation::new())? {
        if target.first(tau.head(), &f)?.is_none() {
            out.push(f);
        }
    }
    Ok(out)
}

/// Like [`applicable_tgd`], but gives up with `None` once more than
/// `limit` valuations are found.
pub fn applicable_tgd_within(
    state: &ChaseState,
    tau: &Tgd,
    limit: usize,
) -> Result<Option<Vec<Valuation>>, ChaseError> {
    let target = Target::new(state.current.body(), tau.schema())?;
    let mut out = Vec::new();
    let mut failure = None;
    target.for_each(tau.body(), &Valuation::new(), |f| {
        match target.first(tau.head(), f) {
            Ok(Some(_)) => {}
            Ok(None) => out.push(f.clone()),
            Err(e) => failure = Some(e),
        }
        if failure.is_some() || out.len() > limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok((out.len() <= limit).then_some(out))
}

/// Applies the tgd rule to all of `fs`, which must be exactly
/// `applicable_tgd(state, tau)`.
pub fn apply_tgd(
    state: &ChaseState,
    tau: &Tgd,
    index: usize,
    fs: &[Valuation],
) -> Result<ChaseState, ChaseError> {
    check_schema(state, tau.body(), index)?;
    if fs.is_empty() {
        return Err(ChaseError::Precondition("no applicable valuations".into()));
    }
    if fs != applicable_tgd(state, tau)?.as_slice() {
        return Err(ChaseError::Precondition(
            "valuations differ from the applicable ones".into(),
        ));
    }
    let mut next = state.clone();
    let fresh_values = tau.head_only_values();
    let mut body = state.current.body().clone();
    let mut extensions = Vec::with_capacity(fs.len());
    for f in fs {
        let mut ext = f.clone();
        for v in &fresh_values {
            ext.insert(*v, next.fresh.mint());
        }
        for row in tau.head().map(&ext).rows() {
            body.insert(row.clone());
        }
        extensions.push(ext);
    }
    next.current = state.current.with_body(body);
    next.log.push(ChaseStep::Tgd {
        dependency: index,
        extensions,
    });
    Ok(next)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Implied,
    NotImplied,
    Exhausted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Implied => "implied",
            Verdict::NotImplied => "not-implied",
            Verdict::Exhausted => "exhausted",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ChaseOutcome {
    pub verdict: Verdict,
    pub sigma: Vec<Dependency>,
    pub initial: ChaseGoal,
    pub last: ChaseGoal,
    pub steps: Vec<ChaseStep>,
    pub rho: Valuation,
    /// Index the next fresh symbol would get.
    pub fresh_floor: u32,
    pub budget: usize,
}

impl ChaseOutcome {
    /// `σ_0, σ_1, ..., σ_n`, recomputed from the steps.
    pub fn states(&self) -> Vec<ChaseGoal> {
        let mut out = vec![self.initial.clone()];
        for step in &self.steps {
            let cur = out.last().expect("nonempty");
            let next = match step {
                ChaseStep::Egd { replaced, by, .. } => {
                    cur.substitute(&[(*replaced, *by)].into_iter().collect())
                }
                ChaseStep::Tgd {
                    dependency,
                    extensions,
                } => {
                    let Some(Dependency::Tgd(t)) = self.sigma.get(*dependency) else {
                        unreachable!("tgd step refers to a tgd");
                    };
                    let mut body = cur.body().clone();
                    for ext in extensions {
                        for row in t.head().map(ext).rows() {
                            body.insert(row.clone());
                        }
                    }
                    cur.with_body(body)
                }
            };
            out.push(next);
        }
        out
    }

    /// The final body as a relation satisfying every premise and violating
    /// the goal; both facts are re-checked.
    pub fn countermodel(&self) -> Result<Relation, ChaseError> {
        if self.verdict != Verdict::NotImplied {
            return Err(ChaseError::Precondition(format!(
                "no countermodel for verdict {}",
                self.verdict
            )));
        }
        extract_countermodel(&self.sigma, &self.initial, &self.last)
    }
}

pub fn extract_countermodel(
    sigma: &[Dependency],
    goal: &ChaseGoal,
    last: &ChaseGoal,
) -> Result<Relation, ChaseError> {
    let r = last.body().clone();
    for (i, d) in sigma.iter().enumerate() {
        if !satisfies(&r, d)? {
            return Err(ChaseError::Inconsistent(format!(
                "final tableau violates premise {i}"
            )));
        }
    }
    if satisfies(&r, &goal.to_dependency())? {
        return Err(ChaseError::Inconsistent("final tableau satisfies the goal".into()));
    }
    Ok(r)
}

struct Runner<'a> {
    sigma: &'a [Dependency],
    state: ChaseState,
    budget: usize,
    max_rows: usize,
}

enum Stop {
    Done(Verdict),
    Fail(ChaseError),
}

impl From<ChaseError> for Stop {
    fn from(e: ChaseError) -> Self {
        Stop::Fail(e)
    }
}

impl Runner<'_> {
    fn after_step(&self) -> Result<(), Stop> {
        if self.state.current.is_trivial() {
            Err(Stop::Done(Verdict::Implied))
        } else {
            Ok(())
        }
    }

    fn spend(&self) -> Result<(), Stop> {
        if self.state.step_index() >= self.budget {
            Err(Stop::Done(Verdict::Exhausted))
        } else {
            Ok(())
        }
    }

    /// Applies egds in declaration order, each until it no longer applies,
    /// and sweeps again until none applies.
    fn saturate_egds(&mut self) -> Result<(), Stop> {
        loop {
            let mut changed = false;
            for (i, d) in self.sigma.iter().enumerate() {
                let Dependency::Egd(e) = d else { continue };
                while let Some(f) = first_applicable_egd(&self.state, e)? {
                    self.spend()?;
                    self.state = apply_egd(&self.state, e, i, &f)?;
                    self.after_step()?;
                    changed = true;
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    fn run(&mut self) -> Result<(), Stop> {
        self.after_step()?;
        loop {
            self.saturate_egds()?;
            let mut applied = false;
            for (i, d) in self.sigma.iter().enumerate() {
                let Dependency::Tgd(t) = d else { continue };
                self.saturate_egds()?;
                let room = self.max_rows.saturating_sub(self.state.current.body().len());
                let Some(fs) = applicable_tgd_within(&self.state, t, room)? else {
                    return Err(Stop::Done(Verdict::Exhausted));
                };
                if fs.is_empty() {
                    continue;
                }
                self.spend()?;
                self.state = apply_tgd(&self.state, t, i, &fs)?;
                self.after_step()?;
                if self.state.current.body().len() > self.max_rows {
                    return Err(Stop::Done(Verdict::Exhausted));
                }
                applied = true;
            }
            if !applied {
                return Err(Stop::Done(Verdict::NotImplied));
            }
        }
    }
}

/// Checks that `sigma` holds only egds and tgds over the goal's schema.
pub fn validate_premises(sigma: &[Dependency], goal: &ChaseGoal) -> Result<(), ChaseError> {
    for (index, d) in sigma.iter().enumerate() {
        let body = match d {
            Dependency::Egd(e) => e.body(),
            Dependency::Tgd(t) => t.body(),
            other => return Err(ChaseError::Unsupported(other.kind())),
        };
        if body.schema() != goal.schema() {
            return Err(ChaseError::SchemaMismatch { index });
        }
    }
    Ok(())
}

/// Chases `goal` over `sigma` for at most `budget` steps, giving up as
/// exhausted when the tableau would outgrow [`DEFAULT_MAX_ROWS`].
pub fn run_chase(
    sigma: &[Dependency],
    goal: &Dependency,
    budget: usize,
) -> Result<ChaseOutcome, ChaseError> {
    run_chase_bounded(sigma, goal, budget, DEFAULT_MAX_ROWS)
}

pub fn run_chase_bounded(
    sigma: &[Dependency],
    goal: &Dependency,
    budget: usize,
    max_rows: usize,
) -> Result<ChaseOutcome, ChaseError> {
    let initial = ChaseGoal::try_from(goal.clone())?;
    validate_premises(sigma, &initial)?;
    let mut runner = Runner {
        sigma,
        state: ChaseState::new(initial.clone(), sigma),
        budget,
        max_rows,
    };
    let verdict = match runner.run() {
        Ok(()) => unreachable!("the scheduler only stops with a verdict"),
        Err(Stop::Done(v)) => v,
        Err(Stop::Fail(e)) => return Err(e),
    };
    let state = runner.state;
    let outcome = ChaseOutcome {
        verdict,
        sigma: sigma.to_vec(),
        initial,
        last: state.current,
        steps: state.log,
        rho: state.rho,
        fresh_floor: state.fresh.watermark(),
        budget,
    };
    if verdict == Verdict::NotImplied {
        outcome.countermodel()?;
    }
    Ok(outcome)
}
