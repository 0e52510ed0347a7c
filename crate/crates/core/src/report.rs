//! Runs requested checks on a workspace and assembles the JSON report.

use crate::courant::{bracket_axiom_residuals, courant_bracket, pairing, GSection};
use crate::dsl::{
    validate_workspace, CheckKind, CheckRequest, ExpectKey, Item, StructureError, Workspace,
};
use crate::frame::{FrameModel, PForm, VField};
use crate::gac::{GacData, PwSign, SubbundleFrame};
use crate::involutivity::{
    classify, delta_profile, h_frame, membership, prop_c_battery, recombination_verdicts,
    theorem_c_battery, BracketWitness, InclusionResult, Thresholds, Verdict,
};
use crate::quotient::{quotient_report, Fiber};
use crate::sample::{SampleSet, DEFAULT_SAMPLES};
use crate::scalar::render_real;
use serde::Serialize;
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub samples: usize,
    pub seed: u64,
    pub thresholds: Thresholds,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            samples: DEFAULT_SAMPLES,
            seed: 0,
            thresholds: Thresholds::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureStatus {
    pub name: String,
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structure: Option<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub facts: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationOutcome {
    pub key: String,
    pub expected: String,
    pub actual: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub model: String,
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub diagnostics: Vec<String>,
    pub structures: Vec<StructureStatus>,
    pub checks: Vec<CheckOutcome>,
    pub expectations: Vec<ExpectationOutcome>,
    pub passed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Looks a fact up across all check outcomes.
    pub fn fact(&self, path: &str) -> Option<&str> {
        self.checks
            .iter()
            .find_map(|c| c.facts.get(path))
            .map(String::as_str)
    }

    /// One line per check and expectation.
    pub fn summary(&self) -> String {
        let mut out = format!("model {} (dim {})\n", self.model, self.dim);
        for d in &self.diagnostics {
            out.push_str(&format!("  diagnostic: {d}\n"));
        }
        for c in &self.checks {
            let on = c
                .structure
                .as_deref()
                .map(|s| format!(" on {s}"))
                .unwrap_or_default();
            let status = serde_json::to_value(c.status).expect("status serializes");
            out.push_str(&format!(
                "{}{on}: {}",
                c.check,
                status.as_str().unwrap_or_default()
            ));
            if let Some(r) = &c.reason {
                out.push_str(&format!(" ({r})"));
            }
            out.push('\n');
            for (k, v) in &c.facts {
                out.push_str(&format!("  {k} = {v}\n"));
            }
        }
        for e in &self.expectations {
            let mark = if e.pass { "ok" } else { "MISMATCH" };
            out.push_str(&format!(
                "expect {} = {:?}: {mark} (got {})\n",
                e.key,
                e.expected,
                e.actual.as_deref().unwrap_or("nothing")
            ));
        }
        out.push_str(if self.passed { "passed\n" } else { "failed\n" });
        out
    }
}

/// Runs `checks` (the workspace's own `check` statements when empty) and every expectation.
pub fn run_report(w: &Workspace, checks: &[CheckRequest], opts: &RunOptions) -> Report {
    let samples = SampleSet::halton(&w.model, opts.samples);
    let validation = validate_workspace(w, &samples);
    let structures: Vec<StructureStatus> = validation
        .structures
        .iter()
        .map(|(name, r)| StructureStatus {
            name: name.clone(),
            valid: r.is_ok(),
            error: r.as_ref().err().map(|e| e.to_string()),
        })
        .collect();
    let runner = Runner {
        w,
        opts,
        built: &validation.structures,
    };
    let requested = if checks.is_empty() {
        &w.checks[..]
    } else {
        checks
    };
    let mut outcomes: Vec<CheckOutcome> = requested.iter().map(|c| runner.run(c)).collect();

    let mut expectations = Vec::new();
    for e in &w.expectations {
        let (key, actual) = match &e.key {
            ExpectKey::Fact(path) => {
                let known = outcomes.iter().any(|c| c.facts.contains_key(path));
                if !known {
                    if let Some(kind) = kind_of_path(path) {
                        let already = outcomes.iter().any(|c| {
                            c.check == kind.name()
                                && c.structure.as_deref() == runner.default_target(kind)
                        });
                        if !already {
                            outcomes.push(runner.run(&CheckRequest::new(kind)));
                        }
                    }
                }
                let actual = outcomes.iter().find_map(|c| c.facts.get(path)).cloned();
                (path.clone(), actual)
            }
            ExpectKey::Bracket(s, t) => {
                let m = &w.model;
                let key = format!("bracket({}, {})", m.render_section(s), m.render_section(t));
                let twist = runner.default_structure().and_then(|g| g.twist());
                let actual = courant_bracket(m, s, t, twist)
                    .map(|b| m.render_section(&b))
                    .ok();
                (key, actual)
            }
            ExpectKey::Member(s, frame) => {
                let key = format!("member({}, {frame})", w.model.render_section(s));
                let actual = runner.default_structure().and_then(|g| {
                    let f = named_frame(g, frame, &opts.thresholds)?;
                    Some(
                        membership(s, &f, g.samples(), &opts.thresholds)
                            .verdict()
                            .to_string(),
                    )
                });
                (key, actual)
            }
        };
        let pass = actual.as_deref() == Some(e.value.as_str());
        expectations.push(ExpectationOutcome {
            key,
            expected: e.value.clone(),
            actual,
            pass,
        });
    }

    let passed = validation.is_valid()
        && outcomes
            .iter()
            .all(|c| matches!(c.status, Status::Pass | Status::Skipped))
        && expectations.iter().all(|e| e.pass);
    Report {
        schema: SCHEMA_VERSION,
        model: w.model.name.clone(),
        dim: w.model.dim(),
        samples: opts.samples,
        seed: opts.seed,
        diagnostics: validation.diagnostics(),
        structures,
        checks: outcomes,
        expectations,
        passed,
    }
}

/// Report key prefix of a check: `prop-c` becomes `prop_c`.
pub fn fact_prefix(kind: CheckKind) -> String {
    kind.name().replace('-', "_")
}

fn kind_of_path(path: &str) -> Option<CheckKind> {
    let head = path.split('.').next()?;
    CheckKind::ALL.into_iter().find(|k| fact_prefix(*k) == head)
}

/// Frames addressable by `member(..., name)`.
pub const FRAME_NAMES: [&str; 8] = [
    "vperp", "kernel", "e10", "e01", "l_plus", "l_minus", "h_plus", "h_minus",
];

fn named_frame(g: &GacData, name: &str, thr: &Thresholds) -> Option<SubbundleFrame> {
    let f = g.frames();
    Some(match name {
        "vperp" => f.complement.clone(),
        "kernel" => f.kernel.clone(),
        "e10" => f.holomorphic.clone(),
        "e01" => f.antiholomorphic.clone(),
        "l_plus" => f.l_plus.clone(),
        "l_minus" => f.l_minus.clone(),
        "h_plus" => h_frame(g, PwSign::Plus, thr),
        "h_minus" => h_frame(g, PwSign::Minus, thr),
        _ => return None,
    })
}

fn side_key(sign: PwSign) -> &'static str {
    match sign {
        PwSign::Plus => "plus",
        PwSign::Minus => "minus",
    }
}

fn yes_no(b: bool) -> String {
    Verdict::from_bool(b).to_string()
}

/// Renders a number, snapping to an integer within 1e-9.
pub fn render_number(x: f64) -> String {
    if (x - x.round()).abs() <= 1e-9 {
        format!("{}", x.round() as i64)
    } else if x < 0.0 {
        format!("-{}", render_real(-x))
    } else {
        render_real(x)
    }
}

/// `a, b, c` when all entries agree, otherwise the full list.
fn render_profile<T: PartialEq + ToString>(values: &[T]) -> String {
    match values.first() {
        Some(first) if values.iter().all(|v| v == first) => first.to_string(),
        Some(_) => values
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" "),
        None => String::new(),
    }
}

fn render_span(m: &FrameModel, sections: &[GSection]) -> String {
    let parts: Vec<String> = sections.iter().map(|s| m.render_section(s)).collect();
    format!("span{{{}}}", parts.join(", "))
}

fn render_witness(m: &FrameModel, w: &BracketWitness) -> String {
    format!(
        "[{}, {}] = {}",
        m.render_section(&w.left),
        m.render_section(&w.right),
        m.render_section(&w.bracket)
    )
}

fn render_form(m: &FrameModel, f: &PForm) -> String {
    m.render_form(f)
}

fn render_vector(m: &FrameModel, v: &VField) -> String {
    m.render_vector(v)
}

struct Runner<'a> {
    w: &'a Workspace,
    opts: &'a RunOptions,
    built: &'a [(String, Result<GacData, StructureError>)],
}

type Facts = BTreeMap<String, String>;

impl<'a> Runner<'a> {
    fn default_target(&self, kind: CheckKind) -> Option<&'a str> {
        if kind.needs_structure() {
            self.w.default_structure()
        } else {
            None
        }
    }

    fn default_structure(&self) -> Option<&'a GacData> {
        let name = self.w.default_structure()?;
        self.built
            .iter()
            .find(|(n, _)| n == name)
            .and_then(|(_, r)| r.as_ref().ok())
    }

    fn run(&self, req: &CheckRequest) -> CheckOutcome {
        let prefix = fact_prefix(req.kind);
        let mut out = CheckOutcome {
            check: req.kind.name().to_string(),
            structure: None,
            status: Status::Pass,
            reason: None,
            facts: Facts::new(),
        };
        if !req.kind.needs_structure() {
            self.calculus(&prefix, &mut out);
            return out;
        }
        let Some(target) = req.target.as_deref().or(self.w.default_structure()) else {
            out.status = Status::Skipped;
            out.reason = Some("skipped: the workspace declares no structure".into());
            return out;
        };
        out.structure = Some(target.to_string());
        let g = match self.built.iter().find(|(n, _)| n == target).map(|(_, r)| r) {
            Some(Ok(g)) => g,
            Some(Err(e)) => {
                out.status = if req.kind == CheckKind::Axioms {
                    Status::Fail
                } else {
                    Status::Skipped
                };
                out.reason = Some(format!("skipped: structure `{target}` is invalid: {e}"));
                if req.kind == CheckKind::Axioms {
                    out.reason = Some(e.to_string());
                    out.facts.insert(format!("{prefix}.valid"), "no".into());
                }
                return out;
            }
            None => {
                out.status = Status::Error;
                out.reason = Some(format!("no structure named `{target}`"));
                return out;
            }
        };
        let result = match req.kind {
            CheckKind::Calculus => unreachable!("handled above"),
            CheckKind::Axioms => self.axioms(g, &prefix, &mut out),
            CheckKind::Frames => self.frames(g, &prefix, &mut out),
            CheckKind::Classify => self.classify(g, &prefix, &mut out),
            CheckKind::Battery => self.battery(g, req.side, &prefix, &mut out),
            CheckKind::PropC => self.prop_c(g, &prefix, &mut out),
            CheckKind::Delta => self.delta(g, req.side, &prefix, &mut out),
            CheckKind::Quotient => self.quotient(g, req, &prefix, &mut out),
        };
        if let Err(e) = result {
            out.status = Status::Error;
            out.reason = Some(e);
        }
        out
    }

    fn calculus(&self, p: &str, out: &mut CheckOutcome) {
        let m = &self.w.model;
        let diagnostics = m.validate();
        let facts = &mut out.facts;
        facts.insert(
            format!("{p}.frame"),
            if diagnostics.is_empty() {
                "valid".into()
            } else {
                diagnostics
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            },
        );
        let mut sections: Vec<(&str, &GSection)> = Vec::new();
        for (name, item) in &self.w.items {
            match item {
                Item::Scalar(f) => {
                    facts.insert(format!("{p}.d.{name}"), render_form(m, &m.differential(f)));
                }
                Item::Form(f) => {
                    let d = m
                        .exterior_derivative(f)
                        .map(|d| render_form(m, &d))
                        .unwrap_or_else(|e| format!("error: {e}"));
                    facts.insert(format!("{p}.d.{name}"), d);
                }
                Item::Section(s) => sections.push((name, s)),
                _ => {}
            }
        }
        let mut axioms_ok = true;
        for (i, (a, s)) in sections.iter().enumerate() {
            for (b, t) in &sections[i..] {
                let v = pairing(s, t)
                    .map(|v| v.to_string())
                    .unwrap_or_else(|e| format!("error: {e}"));
                facts.insert(format!("{p}.pairing.{a}.{b}"), v);
            }
            for (b, t) in &sections[i + 1..] {
                let v = courant_bracket(m, s, t, None)
                    .map(|v| m.render_section(&v))
                    .unwrap_or_else(|e| format!("error: {e}"));
                facts.insert(format!("{p}.bracket.{a}.{b}"), v);
                for (_, u) in &sections[i + 1..] {
                    axioms_ok &= bracket_axiom_residuals(m, s, t, u, None)
                        .map(|r| r.is_zero())
                        .unwrap_or(false);
                }
            }
        }
        if sections.len() >= 2 {
            facts.insert(format!("{p}.axiom_residuals_zero"), yes_no(axioms_ok));
        }
        if !diagnostics.is_empty() || !axioms_ok {
            out.status = Status::Fail;
            out.reason = Some("frame relations or bracket axioms fail".into());
        }
    }

    fn axioms(&self, g: &GacData, p: &str, out: &mut CheckOutcome) -> Result<(), String> {
        let m = g.model();
        let c = g.consequence_residuals();
        let d = g.derived_pair();
        let f = &mut out.facts;
        f.insert(format!("{p}.valid"), "yes".into());
        f.insert(format!("{p}.phi_cube"), yes_no(c.cube_zero));
        f.insert(format!("{p}.phi_e_plus"), yes_no(c.kills_e_plus));
        f.insert(format!("{p}.phi_e_minus"), yes_no(c.kills_e_minus));
        f.insert(format!("{p}.image_orthogonal"), yes_no(c.image_orthogonal));
        f.insert(format!("{p}.reeb"), render_vector(m, &d.reeb));
        f.insert(format!("{p}.eta"), render_form(m, &d.eta));
        f.insert(format!("{p}.reeb_prime"), render_vector(m, &d.reeb_prime));
        f.insert(format!("{p}.eta_prime"), render_form(m, &d.eta_prime));
        f.insert(
            format!("{p}.twist"),
            g.twist()
                .map(|h| render_form(m, h.form()))
                .unwrap_or_else(|| "0".into()),
        );
        if !c.all() {
            out.status = Status::Fail;
            out.reason = Some("a consequence of the axioms fails".into());
        }
        Ok(())
    }

    fn frames(&self, g: &GacData, p: &str, out: &mut CheckOutcome) -> Result<(), String> {
        let m = g.model();
        let thr = &self.opts.thresholds;
        let mut all = true;
        for name in FRAME_NAMES {
            let frame = named_frame(g, name, thr).expect("known frame name");
            all &= frame.certified();
            out.facts
                .insert(format!("{p}.{name}"), render_span(m, &frame.sections));
            out.facts
                .insert(format!("{p}.{name}.rank"), render_profile(&frame.ranks));
            out.facts.insert(
                format!("{p}.{name}.isotropic"),
                yes_no(frame.is_isotropic()),
            );
            out.facts
                .insert(format!("{p}.{name}.symbolic"), yes_no(frame.symbolic));
        }
        if !all {
            out.status = Status::Fail;
            out.reason = Some("a rank certificate fails".into());
        }
        Ok(())
    }

    fn classify(&self, g: &GacData, p: &str, out: &mut CheckOutcome) -> Result<(), String> {
        let m = g.model();
        let thr = &self.opts.thresholds;
        let r = classify(g, thr).map_err(|e| e.to_string())?;
        let f = &mut out.facts;
        f.insert(format!("{p}.level"), r.level().into());
        f.insert(format!("{p}.contact"), r.is_contact.to_string());
        f.insert(format!("{p}.strong"), r.is_strong.to_string());
        f.insert(format!("{p}.normal"), r.is_normal.to_string());
        f.insert(
            format!("{p}.strong_criterion"),
            r.strong_criterion.to_string(),
        );
        f.insert(format!("{p}.e_bracket"), m.render_section(&r.e_bracket));
        f.insert(format!("{p}.poon_wade"), r.poon_wade.to_string());
        f.insert(format!("{p}.routes_agree"), yes_no(r.routes_agree()));
        if let Some(w) = &r.criterion_witness {
            f.insert(
                format!("{p}.strong_criterion.witness"),
                render_witness(m, w),
            );
        }
        let mut recombination = Verdict::Yes;
        for sign in [PwSign::Plus, PwSign::Minus] {
            let side: &InclusionResult = r.l_side(sign);
            let k = format!("{p}.l_{}", side_key(sign));
            f.insert(k.clone(), side.verdict.to_string());
            if let Some(w) = &side.witness {
                f.insert(format!("{k}.witness"), render_witness(m, w));
                f.insert(format!("{k}.witness.bracket"), m.render_section(&w.bracket));
            }
            let (plain, mixed) = recombination_verdicts(g, g.l_frame(sign), self.opts.seed, thr)
                .map_err(|e| e.to_string())?;
            recombination = recombination.and(Verdict::from_bool(plain == mixed));
        }
        f.insert(
            format!("{p}.recombination_invariant"),
            recombination.to_string(),
        );
        if !r.routes_agree() {
            out.status = Status::Fail;
            out.reason =
                Some("strongness from both sides disagrees with the bracket criterion".into());
        } else if recombination == Verdict::No {
            out.status = Status::Fail;
            out.reason = Some("involutivity changed under a frame recombination".into());
        }
        Ok(())
    }

    fn sides(requested: Option<PwSign>) -> Vec<PwSign> {
        requested.map_or_else(|| vec![PwSign::Plus, PwSign::Minus], |s| vec![s])
    }

    fn battery(
        &self,
        g: &GacData,
        side: Option<PwSign>,
        p: &str,
        out: &mut CheckOutcome,
    ) -> Result<(), String> {
        let thr = &self.opts.thresholds;
        let m = g.model();
        let mut ran = 0;
        let mut failed = false;
        let mut reasons = Vec::new();
        for sign in Self::sides(side) {
            let k = format!("{p}.{}", side_key(sign));
            let b = theorem_c_battery(g, sign, thr).map_err(|e| e.to_string())?;
            if let Some(reason) = b.skipped {
                out.facts.insert(format!("{k}.skipped"), reason.clone());
                reasons.push(format!("side {sign}: {reason}"));
                continue;
            }
            ran += 1;
            let conditions: Vec<String> = b.conditions.iter().map(Verdict::to_string).collect();
            out.facts
                .insert(format!("{k}.conditions"), conditions.join(","));
            out.facts
                .insert(format!("{k}.agreement"), b.agreement.to_string());
            if let Some(c) = b.consequences {
                out.facts
                    .insert(format!("{k}.consequences"), format!("{},{}", c[0], c[1]));
                failed |= c.contains(&Verdict::No);
            }
            for (n, w) in b.witnesses.iter().enumerate() {
                if let Some(w) = w {
                    out.facts
                        .insert(format!("{k}.witness.{}", n + 1), render_witness(m, w));
                }
            }
            failed |= b.agreement != Verdict::Yes;
        }
        if failed {
            out.status = Status::Fail;
            out.reason = Some("the five conditions disagree or a consequence fails".into());
        } else if ran == 0 {
            out.status = Status::Skipped;
            out.reason = Some(format!("skipped: {}", reasons.join("; ")));
        }
        Ok(())
    }

    fn prop_c(&self, g: &GacData, p: &str, out: &mut CheckOutcome) -> Result<(), String> {
        let r = prop_c_battery(g, &self.opts.thresholds);
        let f = &mut out.facts;
        let ranks: Vec<String> = r
            .rank_table
            .iter()
            .map(|row| format!("{},{},{}", row[0], row[1], row[2]))
            .collect();
        f.insert(format!("{p}.n"), r.n.to_string());
        f.insert(format!("{p}.ranks"), render_profile(&ranks));
        f.insert(
            format!("{p}.image_kernel_split"),
            yes_no(r.image_kernel_split),
        );
        f.insert(format!("{p}.reeb_perp_split"), yes_no(r.reeb_perp_split));
        for s in &r.sides {
            let k = format!("{p}.{}", side_key(s.side));
            f.insert(format!("{k}.reeb_in_l"), yes_no(s.reeb_in_l));
            f.insert(format!("{k}.h_rank"), render_profile(&s.h_ranks));
            f.insert(
                format!("{k}.h_rank_expected"),
                s.h_rank_expected.to_string(),
            );
            f.insert(format!("{k}.h_perp_span"), yes_no(s.h_perp_span_equal));
            f.insert(
                format!("{k}.h_plus_reeb_rank"),
                yes_no(s.h_plus_reeb_rank_ok),
            );
            f.insert(
                format!("{k}.h_plus_reeb_isotropic"),
                yes_no(s.h_plus_reeb_isotropic),
            );
            f.insert(format!("{k}.transverse_rank"), yes_no(s.transverse_rank_ok));
        }
        f.insert(format!("{p}.passes"), yes_no(r.passes()));
        if !r.passes() {
            out.status = Status::Fail;
            out.reason = Some("a rank or decomposition check fails".into());
        }
        Ok(())
    }

    fn delta(
        &self,
        g: &GacData,
        side: Option<PwSign>,
        p: &str,
        out: &mut CheckOutcome,
    ) -> Result<(), String> {
        for sign in Self::sides(side) {
            let d = delta_profile(g, sign, &self.opts.thresholds);
            let k = format!("{p}.{}", side_key(sign));
            out.facts
                .insert(format!("{k}.dims"), render_profile(&d.delta_dims));
            let rho: Vec<String> = d.rho.iter().map(|r| render_number(*r)).collect();
            out.facts.insert(format!("{k}.rho"), render_profile(&rho));
            out.facts
                .insert(format!("{k}.constant"), yes_no(d.constant));
        }
        Ok(())
    }

    /// Fiber defaults to the frame direction carrying `R`.
    fn default_fiber(g: &GacData) -> Option<String> {
        let reeb = &g.derived_pair().reeb;
        let nonzero: Vec<usize> = (0..reeb.dim()).filter(|&a| !reeb.0[a].is_zero()).collect();
        match nonzero.as_slice() {
            [a] => Some(g.model().frame_names()[*a].clone()),
            _ => None,
        }
    }

    fn quotient(
        &self,
        g: &GacData,
        req: &CheckRequest,
        p: &str,
        out: &mut CheckOutcome,
    ) -> Result<(), String> {
        let m = g.model();
        let thr = &self.opts.thresholds;
        let Some(fiber_name) = req.fiber.clone().or_else(|| Self::default_fiber(g)) else {
            out.status = Status::Skipped;
            out.reason =
                Some("skipped: R is not along a single frame direction; name a fiber".into());
            return Ok(());
        };
        let fiber = Fiber::resolve(m, &fiber_name).map_err(|e| e.to_string())?;
        let side = req.side.unwrap_or_else(|| {
            let r = classify(g, thr).ok();
            match r {
                Some(r) if !r.l_minus.verdict.is_yes() && r.l_plus.verdict.is_yes() => PwSign::Plus,
                _ => PwSign::Minus,
            }
        });
        let q = quotient_report(g, &fiber, side, thr);
        let f = &mut out.facts;
        f.insert(format!("{p}.fiber"), m.frame_names()[fiber.frame].clone());
        f.insert(
            format!("{p}.invariance.interior"),
            render_form(m, &q.invariance.interior),
        );
        f.insert(
            format!("{p}.invariance.lie"),
            render_form(m, &q.invariance.lie),
        );
        f.insert(format!("{p}.invariance"), yes_no(q.invariance.holds()));
        match &q.period {
            Ok(per) => {
                f.insert(format!("{p}.gamma"), per.gamma.to_string());
                f.insert(format!("{p}.gamma_constant"), yes_no(per.constant));
            }
            Err(e) => {
                f.insert(format!("{p}.gamma"), format!("none: {e}"));
            }
        }
        match &q.curvature {
            Ok(c) => {
                f.insert(format!("{p}.omega"), render_form(m, &c.omega));
                f.insert(format!("{p}.omega_closed"), yes_no(c.closed));
            }
            Err(e) => {
                f.insert(format!("{p}.omega"), format!("none: {e}"));
            }
        }
        match &q.euler {
            Ok(e) => {
                f.insert(format!("{p}.euler"), render_number(e.value));
                f.insert(format!("{p}.euler_integral"), yes_no(e.integral));
            }
            Err(e) => {
                f.insert(format!("{p}.euler"), format!("none: {e}"));
            }
        }
        let nd = &q.nondegeneracy;
        f.insert(format!("{p}.delta.side"), side.to_string());
        f.insert(format!("{p}.delta.dims"), render_profile(&nd.delta_dims));
        f.insert(
            format!("{p}.delta.nondegenerate"),
            if nd.vacuous {
                "vacuous".into()
            } else {
                yes_no(nd.nondegenerate)
            },
        );
        let curvature_ok = q.curvature.as_ref().map(|c| c.closed).unwrap_or(false);
        if !q.invariance.holds() {
            out.status = Status::Fail;
            out.reason = Some("R does not preserve eta".into());
        } else if !curvature_ok {
            out.status = Status::Fail;
            out.reason = Some("no closed curvature form".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_workspace;

    const CONTACT: &str = "model r3; coords x, y, z;
        endo Phi { d/dx -> dy; d/dy -> -dx; dx -> d/dy; dy -> -d/dx - y*d/dz; dz -> y*d/dy; }
        gac S = (Phi, dz - y*dx, d/dz);
        check classify; check quotient;";

    #[test]
    fn contact_report_facts() {
        let w = parse_workspace(CONTACT).unwrap();
        let r = run_report(&w, &[], &RunOptions::default());
        assert_eq!(r.schema, 1);
        assert_eq!(r.fact("classify.level"), Some("contact"));
        assert_eq!(r.fact("classify.strong"), Some("no"));
        assert_eq!(r.fact("classify.poon_wade"), Some("PW(-)"));
        assert_eq!(r.fact("quotient.omega"), Some("dx^dy"));
        assert_eq!(r.fact("quotient.omega_closed"), Some("yes"));
        assert_eq!(r.fact("quotient.fiber"), Some("d/dz"));
        assert!(r.fact("quotient.gamma").unwrap().starts_with("none"));
        assert!(r.passed, "{}", r.summary());
    }

    #[test]
    fn expectations_are_compared_and_run_missing_checks() {
        let text = format!(
            "{CONTACT}\nexpect axioms.reeb = \"d/dz\";\nexpect bracket(d/dx, y*dx) = \"0\";\n\
             expect member(d/dz, l_minus) = \"yes\";\nexpect classify.level = \"normal\";"
        );
        let w = parse_workspace(&text).unwrap();
        let r = run_report(&w, &[], &RunOptions::default());
        let pass: Vec<bool> = r.expectations.iter().map(|e| e.pass).collect();
        assert_eq!(pass, vec![true, false, true, false]);
        assert_eq!(r.expectations[1].actual.as_deref(), Some("-1/2*dy"));
        assert!(r.checks.iter().any(|c| c.check == "axioms"));
        assert!(!r.passed);
    }

    #[test]
    fn structureless_checks_are_skipped_with_reason() {
        let w = parse_workspace(
            "model m; coords x; section s = x*d/dx; check calculus; check classify;",
        )
        .unwrap();
        let r = run_report(&w, &[], &RunOptions::default());
        assert_eq!(r.checks[0].status, Status::Pass);
        assert_eq!(r.checks[1].status, Status::Skipped);
        assert!(r.checks[1]
            .reason
            .as_deref()
            .unwrap()
            .starts_with("skipped:"));
        assert!(r.passed);
    }

    #[test]
    fn reports_are_byte_stable() {
        let w = parse_workspace(CONTACT).unwrap();
        let a = run_report(&w, &[], &RunOptions::default()).to_json();
        let b = run_report(&w, &[], &RunOptions::default()).to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\": 1"));
    }

    #[test]
    fn numbers_snap_to_integers() {
        assert_eq!(render_number(1.0 + 1e-12), "1");
        assert_eq!(render_number(-0.5), "-1/2");
        assert_eq!(render_number(0.0), "0");
    }
}
