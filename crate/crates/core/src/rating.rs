//! Rule-based rating: linguistic variables, IF/THEN rules, Mamdani-style
//! inference, and the per-activity criteria that feed it.
//!
//! Prioritization decisions are never hard-coded; they come from an editable
//! rule base. Inference is min/max Mamdani with per-rule weights: each rule
//! fires at the minimum of its antecedent memberships times its weight, fired
//! consequent terms are clipped at that strength, the clipped shapes are
//! aggregated by max, and the result is reduced to a triangular score — the
//! aggregate's support bounds as flanks and its exact centroid as the peak.
//! The centroid is computed analytically on the piecewise-linear aggregate;
//! tests hold it against an independent discretized oracle.
//!
//! The engine supplies values for five input variables:
//! `urgency` (latest-start slack, lower or negative = more urgent),
//! `importance` (job weight in [0,1]), `waiting` (time since the activity
//! first became selectable), `resource_fit` (1 = fastest capable resource),
//! and `strategic` (resource weight in [0,1]). A rule base may use any
//! subset of them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::fuzzy::TriFuzzy;
use crate::model::{Activity, ActivityId, Instance, Resource, Schedule};
use crate::retrograde::Arrangement;

/// Input variable names the engine supplies values for.
pub const INPUT_VARIABLES: [&str; 5] =
    ["urgency", "importance", "waiting", "resource_fit", "strategic"];

/// Default name of the output variable.
pub const OUTPUT_VARIABLE: &str = "priority";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RatingError {
    #[error("rule base has no rules")]
    EmptyRuleBase,
    #[error("invalid rule base: {0}")]
    InvalidRuleBase(String),
    #[error("rule references unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("rule references unknown term '{term}' of variable '{variable}'")]
    UnknownTerm { variable: String, term: String },
    #[error("no value supplied for input variable '{0}'")]
    MissingInput(String),
}

/// A named variable over a real domain with fuzzy-term memberships.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinguisticVariable {
    pub name: String,
    pub domain: [f64; 2],
    pub terms: BTreeMap<String, TriFuzzy>,
}

/// IF/THEN rule: all antecedents combine by min; the consequent term is
/// clipped at the firing strength times `weight`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rule {
    #[serde(rename = "if")]
    pub antecedents: Vec<(String, String)>,
    #[serde(rename = "then")]
    pub consequent: (String, String),
    #[serde(default = "default_weight")]
    pub weight: f64,
}

fn default_weight() -> f64 {
    1.0
}

/// Input variables, one output variable over `[0, 1]`, and the rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleBase {
    pub variables: Vec<LinguisticVariable>,
    pub output: LinguisticVariable,
    pub rules: Vec<Rule>,
}

impl RuleBase {
    pub fn variable(&self, name: &str) -> Option<&LinguisticVariable> {
        self.variables.iter().find(|v| v.name == name)
    }

    /// All structural problems, each as a human-readable message naming the
    /// offending rule or variable.
    pub fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();

        if self.rules.is_empty() {
            out.push("rule base has no rules".into());
        }

        let mut names: Vec<&str> = Vec::new();
        for var in &self.variables {
            if names.contains(&var.name.as_str()) {
                out.push(format!("variable '{}' declared more than once", var.name));
            }
            names.push(&var.name);
            if !INPUT_VARIABLES.contains(&var.name.as_str()) {
                out.push(format!(
                    "variable '{}' is not supplied by the engine (known inputs: {})",
                    var.name,
                    INPUT_VARIABLES.join(", ")
                ));
            }
            out.extend(variable_issues(var));
        }

        out.extend(variable_issues(&self.output));
        if self.output.domain != [0.0, 1.0] {
            out.push(format!(
                "output variable '{}' must have domain [0, 1], got [{}, {}]",
                self.output.name, self.output.domain[0], self.output.domain[1]
            ));
        }
        out.extend(coverage_issues(&self.output));

        for (i, rule) in self.rules.iter().enumerate() {
            if rule.antecedents.is_empty() {
                out.push(format!("rule {i}: no antecedents"));
            }
            for (var, term) in &rule.antecedents {
                match self.variable(var) {
                    None => out.push(format!("rule {i}: unknown input variable '{var}'")),
                    Some(v) if !v.terms.contains_key(term) => {
                        out.push(format!("rule {i}: variable '{var}' has no term '{term}'"))
                    }
                    _ => {}
                }
            }
            let (out_var, out_term) = &rule.consequent;
            if out_var != &self.output.name {
                out.push(format!(
                    "rule {i}: consequent variable '{out_var}' is not the output variable '{}'",
                    self.output.name
                ));
            } else if !self.output.terms.contains_key(out_term) {
                out.push(format!(
                    "rule {i}: output variable has no term '{out_term}'"
                ));
            }
            if !(rule.weight > 0.0 && rule.weight <= 1.0) {
                out.push(format!("rule {i}: weight {} outside (0, 1]", rule.weight));
            }
        }

        out
    }

    pub fn validate(&self) -> Result<(), RatingError> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(RatingError::InvalidRuleBase(issues.join("; ")))
        }
    }
}

// the negated comparison is deliberate: it also rejects NaN domains
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn variable_issues(var: &LinguisticVariable) -> Vec<String> {
    let mut out = Vec::new();
    let [lo, hi] = var.domain;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        out.push(format!(
            "variable '{}' has an invalid domain [{lo}, {hi}]",
            var.name
        ));
    }
    if var.terms.is_empty() {
        out.push(format!("variable '{}' has no terms", var.name));
    }
    for (term, tri) in &var.terms {
        if tri.a() < lo - 1e-9 || tri.b() > hi + 1e-9 {
            out.push(format!(
                "variable '{}' term '{term}' support [{}, {}] leaves the domain [{lo}, {hi}]",
                var.name,
                tri.a(),
                tri.b()
            ));
        }
    }
    out
}

// The output terms must jointly cover the whole domain, otherwise some
// aggregate supports could not express every score.
fn coverage_issues(var: &LinguisticVariable) -> Vec<String> {
    let mut out = Vec::new();
    let [lo, hi] = var.domain;
    let mut supports: Vec<(f64, f64)> = var.terms.values().map(|t| (t.a(), t.b())).collect();
    supports.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let mut covered = lo;
    for (a, b) in supports {
        if a > covered + 1e-9 {
            out.push(format!(
                "output terms of '{}' leave [{covered}, {a}] uncovered",
                var.name
            ));
        }
        covered = covered.max(b);
    }
    if covered < hi - 1e-9 {
        out.push(format!(
            "output terms of '{}' leave [{covered}, {hi}] uncovered",
            var.name
        ));
    }
    out
}

fn lookup(inputs: &[(&str, f64)], name: &str) -> Option<f64> {
    inputs.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
}

/// Mamdani inference over the rule base. Missing inputs and unresolved names
/// are configuration errors; a rule base where no rule fires yields the zero
/// score `(0, 0, 0)` and logs a warning.
pub fn infer(rule_base: &RuleBase, inputs: &[(&str, f64)]) -> Result<TriFuzzy, RatingError> {
    if rule_base.rules.is_empty() {
        return Err(RatingError::EmptyRuleBase);
    }

    let mut fired: Vec<(TriFuzzy, f64)> = Vec::new();
    for rule in &rule_base.rules {
        let mut strength = 1.0f64;
        for (var_name, term_name) in &rule.antecedents {
            let var = rule_base
                .variable(var_name)
                .ok_or_else(|| RatingError::UnknownVariable(var_name.clone()))?;
            let term = var
                .terms
                .get(term_name)
                .ok_or_else(|| RatingError::UnknownTerm {
                    variable: var_name.clone(),
                    term: term_name.clone(),
                })?;
            let raw = lookup(inputs, var_name)
                .ok_or_else(|| RatingError::MissingInput(var_name.clone()))?;
            let x = raw.clamp(var.domain[0], var.domain[1]);
            strength = strength.min(term.membership(x));
        }
        strength *= rule.weight;

        let (out_var, out_term) = &rule.consequent;
        if out_var != &rule_base.output.name {
            return Err(RatingError::UnknownVariable(out_var.clone()));
        }
        let term = rule_base
            .output
            .terms
            .get(out_term)
            .ok_or_else(|| RatingError::UnknownTerm {
                variable: out_var.clone(),
                term: out_term.clone(),
            })?;
        if strength > 0.0 {
            fired.push((*term, strength));
        }
    }

    if fired.is_empty() {
        log::warn!("no rule fired; returning zero score");
        return Ok(TriFuzzy::crisp(0.0));
    }

    let a = fired.iter().map(|(t, _)| t.a()).fold(f64::INFINITY, f64::min);
    let b = fired.iter().map(|(t, _)| t.b()).fold(f64::NEG_INFINITY, f64::max);
    let c = aggregate_centroid(&fired, a, b);
    Ok(TriFuzzy::new(a, c.clamp(a, b), b).expect("aggregate centroid lies inside the support"))
}

// Max over the clipped shapes at one point.
fn aggregate_at(fired: &[(TriFuzzy, f64)], x: f64) -> f64 {
    fired
        .iter()
        .map(|(t, s)| s.min(t.membership(x)))
        .fold(0.0, f64::max)
}

/// Exact centroid of `max_i min(level_i, term_i)` over `[lo, hi]`.
///
/// The aggregate is piecewise linear between the clipped-trapezoid corners
/// and the pairwise crossings of the active segments; each elementary
/// interval is integrated in closed form. Endpoint discontinuities (from
/// degenerate flanks) carry no mass, so every interval is sampled at two
/// interior points instead of at its ends.
fn aggregate_centroid(fired: &[(TriFuzzy, f64)], lo: f64, hi: f64) -> f64 {
    if hi - lo <= 1e-12 {
        return (lo + hi) / 2.0;
    }

    let mut corners: Vec<f64> = Vec::with_capacity(fired.len() * 4 + 2);
    corners.push(lo);
    corners.push(hi);
    for (t, s) in fired {
        let p = t.a() + s * (t.peak() - t.a());
        let q = t.b() - s * (t.b() - t.peak());
        corners.extend([t.a(), p, q, t.b()]);
    }
    corners.retain(|x| *x >= lo && *x <= hi);
    corners.sort_by(f64::total_cmp);
    corners.dedup_by(|x, y| (*x - *y).abs() <= 1e-12);

    // refine with crossings of the shape segments inside each corner interval
    let mut xs = corners.clone();
    for w in corners.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let d = x1 - x0;
        if d <= 1e-12 {
            continue;
        }
        let (s1, s2) = (x0 + d / 3.0, x0 + 2.0 * d / 3.0);
        for i in 0..fired.len() {
            let (ti, li) = &fired[i];
            let (fi1, fi2) = (li.min(ti.membership(s1)), li.min(ti.membership(s2)));
            for (tj, lj) in &fired[i + 1..] {
                let (fj1, fj2) = (lj.min(tj.membership(s1)), lj.min(tj.membership(s2)));
                let denom = (fi2 - fi1) - (fj2 - fj1);
                if denom.abs() < 1e-15 {
                    continue;
                }
                // lines through the two interior samples cross at parameter t
                // measured from s1 in units of d/3
                let t = (fj1 - fi1) / denom;
                let x = s1 + t * (d / 3.0);
                if x > x0 + 1e-12 && x < x1 - 1e-12 {
                    xs.push(x);
                }
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|x, y| (*x - *y).abs() <= 1e-12);

    let (mut area, mut moment) = (0.0f64, 0.0f64);
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let d = x1 - x0;
        if d <= 1e-12 {
            continue;
        }
        // two interior samples define the open-interval line exactly
        let (s1, s2) = (x0 + d / 3.0, x0 + 2.0 * d / 3.0);
        let (g1, g2) = (aggregate_at(fired, s1), aggregate_at(fired, s2));
        let slope = (g2 - g1) / (d / 3.0);
        let f0 = g1 - slope * (d / 3.0);
        let f1 = g2 + slope * (d / 3.0);
        area += (f0 + f1) * d / 2.0;
        moment += d * (f0 * (2.0 * x0 + x1) + f1 * (x0 + 2.0 * x1)) / 6.0;
    }

    if area <= 1e-12 {
        // all mass sits in spikes; take the location of the highest one
        let mut best = (lo, aggregate_at(fired, lo));
        for &x in &xs {
            let f = aggregate_at(fired, x);
            if f > best.1 + 1e-15 {
                best = (x, f);
            }
        }
        return best.0;
    }
    moment / area
}

/// Crisp per-activity inputs for the rating stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Criteria {
    /// Latest-start slack relative to `now`; lower or negative = more urgent.
    pub urgency: f64,
    pub job_importance: f64,
    /// Time since the activity was first selectable; 0 on first selection.
    pub waiting_time: f64,
    /// 1 on the fastest capable resource, less on slower ones.
    pub resource_fit: f64,
    pub strategic_weight: f64,
}

impl Criteria {
    pub fn inputs(&self) -> [(&'static str, f64); 5] {
        [
            ("urgency", self.urgency),
            ("importance", self.job_importance),
            ("waiting", self.waiting_time),
            ("resource_fit", self.resource_fit),
            ("strategic", self.strategic_weight),
        ]
    }
}

/// Window start of the iteration that first selected the activity.
pub fn first_selected_time(schedule: &Schedule, id: &ActivityId) -> Option<f64> {
    schedule
        .iteration_log
        .iter()
        .find(|rec| rec.selected.contains(id))
        .map(|rec| rec.window_start)
}

/// Job-level criteria of one unscheduled activity at decision time `now`.
pub fn compute_criteria(
    activity: &Activity,
    instance: &Instance,
    arrangement: &Arrangement,
    schedule: &Schedule,
    now: f64,
) -> Criteria {
    let cfg = &instance.config;
    let latest_start = arrangement
        .get(&activity.id)
        .map(|e| e.latest_start)
        .unwrap_or_else(|| TriFuzzy::crisp(0.0));
    let importance = instance
        .job(&activity.job_id)
        .map(|j| j.importance)
        .unwrap_or(0.0);
    let waiting = first_selected_time(schedule, &activity.id)
        .map(|t| (now - t).max(0.0))
        .unwrap_or(0.0);
    let strategic = activity
        .capable_resources
        .iter()
        .filter_map(|r| instance.resource(r))
        .map(|r| r.strategic_weight)
        .fold(0.0, f64::max);
    Criteria {
        urgency: cfg.defuzz.apply(&latest_start) - now,
        job_importance: importance,
        waiting_time: waiting,
        resource_fit: 1.0,
        strategic_weight: strategic,
    }
}

/// Resource-specific criteria: urgency re-derived from the processing time on
/// this resource, fit relative to the fastest capable resource, and the
/// resource's own strategic weight.
pub fn resource_criteria(
    activity: &Activity,
    resource: &Resource,
    instance: &Instance,
    arrangement: &Arrangement,
    schedule: &Schedule,
    now: f64,
) -> Criteria {
    let cfg = &instance.config;
    let base = compute_criteria(activity, instance, arrangement, schedule, now);
    let duration = activity.duration_on(&resource.id);
    let urgency = arrangement
        .get(&activity.id)
        .map(|e| cfg.defuzz.apply(&(e.latest_finish - duration)) - now)
        .unwrap_or(base.urgency);
    let best = activity.optimistic_duration().centroid();
    let here = duration.centroid();
    let fit = if here > 0.0 { (best / here).clamp(0.0, 1.0) } else { 1.0 };
    Criteria {
        urgency,
        resource_fit: fit,
        strategic_weight: resource.strategic_weight,
        ..base
    }
}

/// Scores the selected activities through the rule base on job-level
/// criteria and returns them highest first. Entries whose scores compare
/// equal form one tier of the induced partial order; the sort is stable, so
/// ties keep the incoming (relative) order.
pub fn prioritize_jobs(
    selected: &[ActivityId],
    instance: &Instance,
    arrangement: &Arrangement,
    schedule: &Schedule,
    rule_base: &RuleBase,
    now: f64,
) -> Result<Vec<(ActivityId, TriFuzzy)>, RatingError> {
    let mut scored = Vec::with_capacity(selected.len());
    for id in selected {
        let Some(activity) = instance.activity(id) else {
            continue;
        };
        let criteria = compute_criteria(activity, instance, arrangement, schedule, now);
        let score = infer(rule_base, &criteria.inputs())?;
        scored.push((id.clone(), score));
    }
    let eps = instance.config.compare_epsilon;
    scored.sort_by(|x, y| y.1.compare(&x.1, eps));
    Ok(scored)
}

/// Tier index per position of a descending score list: a new tier starts
/// wherever adjacent scores compare unequal.
pub fn tier_indices(sorted: &[(ActivityId, TriFuzzy)], eps: f64) -> Vec<usize> {
    let mut tiers = Vec::with_capacity(sorted.len());
    let mut tier = 0usize;
    for (i, (_, score)) in sorted.iter().enumerate() {
        if i > 0 && sorted[i - 1].1.compare(score, eps) != core::cmp::Ordering::Equal {
            tier += 1;
        }
        tiers.push(tier);
    }
    tiers
}
