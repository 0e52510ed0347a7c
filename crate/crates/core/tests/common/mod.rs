#![allow(dead_code)]

use gct::catalogue;
use gct::courant::GSection;
use gct::dsl::{parse_workspace, print_workspace, DslError, Workspace};
use gct::frame::{combinations, FrameModel, PForm, VField};
use gct::gac::GacData;
use gct::sample::{SampleSet, DEFAULT_SAMPLES};
use gct::scalar::Scalar;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Model-independent description of one term: coefficient, polynomial factor, phase.
#[derive(Debug, Clone)]
pub struct RawTerm {
    coeff: i8,
    power_var: usize,
    power: u32,
    phase_var: usize,
    phase: i8,
}

pub type RawScalar = Vec<RawTerm>;

pub fn raw_term() -> impl Strategy<Value = RawTerm> {
    (-3i8..=3, 0usize..8, 0u32..=2, 0usize..8, -2i8..=2).prop_map(
        |(coeff, power_var, power, phase_var, phase)| RawTerm {
            coeff: if coeff == 0 { 1 } else { coeff },
            power_var,
            power,
            phase_var,
            phase,
        },
    )
}

pub fn raw_scalar() -> impl Strategy<Value = RawScalar> {
    prop::collection::vec(raw_term(), 0..=2)
}

/// Enough raw components for any model up to dimension 5.
pub fn raw_components(n: usize) -> impl Strategy<Value = Vec<RawScalar>> {
    prop::collection::vec(raw_scalar(), n)
}

/// Realizes a raw scalar over `vars`; without coordinates only constants survive.
pub fn scalar(raw: &RawScalar, vars: &[String]) -> Scalar {
    raw.iter().fold(Scalar::zero(), |acc, t| {
        let mut term = Scalar::real(t.coeff as f64);
        if !vars.is_empty() {
            let v = &vars[t.power_var % vars.len()];
            if t.power > 0 {
                term = &term * &Scalar::var(v).checked_pow(t.power).unwrap();
            }
            let w = &vars[t.phase_var % vars.len()];
            term = &term * &Scalar::exp_i(w, 2.0 * PI * t.phase as f64);
        }
        &acc + &term
    })
}

/// As [`scalar`], with the polynomial factor taken from `poly_vars` and the phase from `phase_var`.
pub fn scalar_split(raw: &RawScalar, poly_vars: &[String], phase_var: &str) -> Scalar {
    raw.iter().fold(Scalar::zero(), |acc, t| {
        let mut term = Scalar::real(t.coeff as f64);
        if !poly_vars.is_empty() && t.power > 0 {
            let v = &poly_vars[t.power_var % poly_vars.len()];
            term = &term * &Scalar::var(v).checked_pow(t.power).unwrap();
        }
        term = &term * &Scalar::exp_i(phase_var, 2.0 * PI * t.phase as f64);
        &acc + &term
    })
}

pub fn vars(m: &FrameModel) -> Vec<String> {
    m.coordinates().iter().map(|c| c.name.to_string()).collect()
}

pub fn section(m: &FrameModel, raw: &[RawScalar]) -> GSection {
    let v = vars(m);
    let comps: Vec<Scalar> = (0..2 * m.dim())
        .map(|k| scalar(&raw[k % raw.len()], &v))
        .collect();
    GSection::from_components(&comps)
}

pub fn vfield(m: &FrameModel, raw: &[RawScalar]) -> VField {
    let v = vars(m);
    VField(
        (0..m.dim())
            .map(|k| scalar(&raw[k % raw.len()], &v))
            .collect(),
    )
}

pub fn form(m: &FrameModel, degree: usize, raw: &[RawScalar]) -> PForm {
    let v = vars(m);
    let mut f = PForm::zero(m.dim(), degree);
    for (k, idx) in combinations(m.dim(), degree).iter().enumerate() {
        f.set_component(idx, scalar(&raw[k % raw.len()], &v));
    }
    f
}

/// Models of every catalogue entry plus a five-dimensional one.
pub fn models() -> Vec<FrameModel> {
    let mut ids = catalogue::ids();
    ids.retain(|id| id != "t3-new");
    ids.into_iter().map(|id| workspace(&id).model).collect()
}

pub fn workspace(id: &str) -> Workspace {
    catalogue::load(id).unwrap_or_else(|e| panic!("{e}"))
}

pub fn structure(id: &str) -> GacData {
    let w = workspace(id);
    let name = w.default_structure().expect("entry declares a structure");
    let samples = SampleSet::halton(&w.model, DEFAULT_SAMPLES);
    w.build_structure(name, &samples)
        .unwrap_or_else(|e| panic!("{id}: {e}"))
}

pub fn real(s: Scalar) -> Scalar {
    (&s + &s.conjugate()).div_real(2.0)
}

/// Real closed 2-form `d theta + c dx^dy` built from raw data.
pub fn closed_b(m: &FrameModel, theta: &[RawScalar], c: i8) -> PForm {
    let v = vars(m);
    let theta = PForm::one_form((0..m.dim()).map(|k| real(scalar(&theta[k], &v))).collect());
    let mut constant = PForm::zero(m.dim(), 2);
    constant.set_component(&[0, 1], Scalar::real(c as f64));
    m.exterior_derivative(&theta).unwrap().add(&constant)
}

pub const VOCAB: &[&str] = &[
    "model",
    "coords",
    "lie",
    "product",
    "frame",
    "endo",
    "gac",
    "construct",
    "check",
    "expect",
    "fiber",
    "side",
    "sqrt",
    "sin",
    "cos",
    "exp",
    "pi",
    "i",
    "x",
    "y",
    "z",
    "t",
    "X1",
    "X2",
    "a1",
    "S",
    "Phi",
    "d/dx",
    "d/dy",
    "dx",
    "dy",
    "dz",
    "^",
    "*",
    "/",
    "+",
    "-",
    "->",
    "=",
    "(",
    ")",
    "{",
    "}",
    "[",
    "]",
    ",",
    ";",
    ":",
    "\"",
    "\"yes\"",
    "0",
    "1",
    "2.5",
    "1e3",
    "1e999",
    "\n",
    "\t",
    "@",
    "é",
    "#",
];

/// Up to 40 vocabulary tokens, sometimes after a valid model header.
pub fn random_stream(rng: &mut impl Rng) -> String {
    let mut text = String::new();
    if rng.gen_bool(0.5) {
        text.push_str("model m; coords x, y, z;\n");
    }
    for _ in 0..rng.gen_range(0..40) {
        text.push_str(VOCAB.choose(rng).unwrap());
        text.push(' ');
    }
    text
}

/// A source with one to three whitespace-delimited tokens removed, inserted or swapped.
pub fn mutate(src: &str, rng: &mut impl Rng) -> String {
    let mut tokens: Vec<&str> = src.split_inclusive(char::is_whitespace).collect();
    for _ in 0..rng.gen_range(1..4) {
        let k = rng.gen_range(0..tokens.len());
        match rng.gen_range(0..3) {
            0 => {
                tokens.remove(k);
            }
            1 => tokens.insert(k, VOCAB.choose(rng).unwrap()),
            _ => {
                let j = rng.gen_range(0..tokens.len());
                tokens.swap(k, j);
            }
        }
    }
    tokens.concat()
}

/// Error position lies inside the text or one past its end.
pub fn position_in_bounds(text: &str, err: &DslError) -> bool {
    let lines: Vec<&str> = text.split('\n').collect();
    let p = err.pos;
    let width = lines
        .get(p.line.wrapping_sub(1))
        .map_or(0, |l| l.chars().count());
    p.line >= 1 && p.line <= lines.len() + 1 && p.col >= 1 && p.col <= width + 2
}

/// Parses without panicking; errors are positioned and successes survive print and reparse.
pub fn parse_robustly(text: &str) -> Result<(), String> {
    match catch_unwind(AssertUnwindSafe(|| parse_workspace(text))) {
        Ok(Ok(w)) => {
            let printed = print_workspace(&w);
            match parse_workspace(&printed) {
                Ok(again) if again == w => Ok(()),
                _ => Err(format!("print/parse mismatch for {text:?}")),
            }
        }
        Ok(Err(e)) if position_in_bounds(text, &e) => Ok(()),
        Ok(Err(e)) => Err(format!(
            "error position {} out of bounds in {text:?}",
            e.pos
        )),
        Err(_) => Err(format!("parser panicked on {text:?}")),
    }
}
