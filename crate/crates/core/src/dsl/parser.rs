//! Recursive-descent parser for `.gct` files.

use super::lexer::{tokenize, Tok, Token};
use super::{
    CheckKind, CheckRequest, DslError, ErrorKind, ExpectKey, Expectation, GacDecl, Item, Pos,
    Workspace,
};
use crate::courant::{Bivector, GEndo, GSection};
use crate::frame::{combinations, wedge_unbounded, FrameModel, PForm, VField, MAX_DEGREE};
use crate::gac::{endo_from_images, PwSign};
use crate::sample::{SampleSet, DEFAULT_SAMPLES};
use crate::scalar::{Scalar, Term, Var, EXPONENT_CAP};
use num_complex::Complex64;
use std::collections::BTreeMap;

const RESERVED: [&str; 6] = ["pi", "i", "sqrt", "cos", "sin", "exp"];

/// Parses and resolves a whole workspace.
pub fn parse_workspace(text: &str) -> Result<Workspace, DslError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        name: None,
        coords: Vec::new(),
        lie: Vec::new(),
        model: None,
        items: Vec::new(),
        checks: Vec::new(),
        expectations: Vec::new(),
    };
    p.workspace()
}

/// An evaluated expression.
#[derive(Debug, Clone)]
enum Value {
    Scalar(Scalar),
    Vector(VField),
    Form(PForm),
    Section(GSection),
    Bivector(Bivector),
}

impl Value {
    fn kind(&self) -> String {
        match self {
            Value::Scalar(_) => "scalar".into(),
            Value::Vector(_) => "vector field".into(),
            Value::Form(f) => format!("{}-form", f.degree()),
            Value::Section(_) => "section".into(),
            Value::Bivector(_) => "bivector".into(),
        }
    }

    fn scalars(&self) -> Vec<Scalar> {
        match self {
            Value::Scalar(s) => vec![s.clone()],
            Value::Vector(v) => v.0.clone(),
            Value::Form(f) => f.components().to_vec(),
            Value::Section(s) => s.components(),
            Value::Bivector(b) => {
                let n = b.dim();
                (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| b.entry(i, j).clone())
                    .collect()
            }
        }
    }

    fn map(&self, f: &mut impl FnMut(&Scalar) -> Scalar) -> Value {
        match self {
            Value::Scalar(s) => Value::Scalar(f(s)),
            Value::Vector(v) => Value::Vector(VField(v.0.iter().map(&mut *f).collect())),
            Value::Form(a) => {
                let mut out = PForm::zero(a.dim(), a.degree());
                for (idx, c) in combinations(a.dim(), a.degree()).iter().zip(a.components()) {
                    out.set_component(idx, f(c));
                }
                Value::Form(out)
            }
            Value::Section(s) => {
                let comps: Vec<Scalar> = s.components().iter().map(&mut *f).collect();
                Value::Section(GSection::from_components(&comps))
            }
            Value::Bivector(b) => {
                let n = b.dim();
                let m = (0..n)
                    .map(|i| (0..n).map(|j| f(b.entry(i, j))).collect())
                    .collect();
                Value::Bivector(Bivector::from_matrix(m).expect("entrywise maps keep antisymmetry"))
            }
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    name: Option<String>,
    coords: Vec<(String, bool)>,
    lie: Vec<(String, String)>,
    model: Option<FrameModel>,
    items: Vec<(String, Item)>,
    checks: Vec<CheckRequest>,
    expectations: Vec<Expectation>,
}

fn syntax(tok: &Token, expected: &[&str]) -> DslError {
    DslError::new(
        tok.pos,
        ErrorKind::Syntax {
            found: tok.tok.to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        },
    )
}

fn math(pos: Pos, msg: impl Into<String>) -> DslError {
    DslError::new(pos, ErrorKind::Math(msg.into()))
}

fn type_error(pos: Pos, expected: &str, found: &Value) -> DslError {
    DslError::new(
        pos,
        ErrorKind::Type {
            expected: expected.into(),
            found: found.kind(),
        },
    )
}

/// Largest exponent of each variable over a set of scalars.
fn max_powers(values: &[Scalar]) -> BTreeMap<Var, u32> {
    let mut out: BTreeMap<Var, u32> = BTreeMap::new();
    for s in values {
        for t in s.terms() {
            for (v, e) in &t.powers {
                let slot = out.entry(v.clone()).or_insert(0);
                *slot = (*slot).max(*e);
            }
        }
    }
    out
}

/// Rejects products whose exponents could exceed the cap before computing them.
fn check_product(pos: Pos, a: &Value, b: &Value) -> Result<(), DslError> {
    let pa = max_powers(&a.scalars());
    let pb = max_powers(&b.scalars());
    for (v, e) in &pa {
        let total = e + pb.get(v).copied().unwrap_or(0);
        if total > EXPONENT_CAP {
            return Err(math(
                pos,
                format!("exponent {total} of `{v}` exceeds the cap of {EXPONENT_CAP}"),
            ));
        }
    }
    Ok(())
}

fn check_finite(pos: Pos, v: Value) -> Result<Value, DslError> {
    let finite = v.scalars().iter().all(|s| {
        s.terms()
            .iter()
            .all(|t| t.coeff.re.is_finite() && t.coeff.im.is_finite())
    });
    if finite {
        Ok(v)
    } else {
        Err(math(pos, "coefficient overflow"))
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(&self.peek().tok, Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.is_punct(p);
        if hit {
            self.bump();
        }
        hit
    }

    fn expect_punct(&mut self, p: &'static str) -> Result<Pos, DslError> {
        if self.is_punct(p) {
            Ok(self.bump().pos)
        } else {
            Err(syntax(self.peek(), &[&format!("`{p}`")]))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<Pos, DslError> {
        if self.is_word(w) {
            Ok(self.bump().pos)
        } else {
            Err(syntax(self.peek(), &[&format!("`{w}`")]))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), DslError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.bump().pos))
            }
            _ => Err(syntax(self.peek(), &[what])),
        }
    }

    fn integer(&mut self) -> Result<(usize, Pos), DslError> {
        match self.peek().tok {
            Tok::Number(x) if x >= 0.0 && x == x.trunc() && x < 1e9 => {
                Ok((x as usize, self.bump().pos))
            }
            _ => Err(syntax(self.peek(), &["integer"])),
        }
    }

    fn string(&mut self) -> Result<String, DslError> {
        match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(syntax(self.peek(), &["string"])),
        }
    }

    fn workspace(&mut self) -> Result<Workspace, DslError> {
        if !self.is_word("model") {
            return Err(DslError::new(self.peek().pos, ErrorKind::NoModel));
        }
        self.bump();
        let (mut name, _) = self.ident("model name")?;
        while self.is_punct("-") {
            match self.peek_at(1).clone() {
                Tok::Ident(w) => name.push_str(&format!("-{w}")),
                Tok::Number(x) if x >= 0.0 && x == x.trunc() && x < 1e9 => {
                    name.push_str(&format!("-{}", x as u64))
                }
                _ => break,
            }
            self.bump();
            self.bump();
        }
        self.name = Some(name);
        self.expect_punct(";")?;
        while self.peek().tok != Tok::Eof {
            self.statement()?;
        }
        let pos = self.peek().pos;
        let model = self.model(pos)?.clone();
        Ok(Workspace {
            model,
            items: std::mem::take(&mut self.items),
            checks: std::mem::take(&mut self.checks),
            expectations: std::mem::take(&mut self.expectations),
        })
    }

    fn model(&mut self, pos: Pos) -> Result<&FrameModel, DslError> {
        if self.model.is_none() {
            let name = self.name.clone().unwrap_or_default();
            let coords: Vec<(&str, bool)> =
                self.coords.iter().map(|(c, p)| (c.as_str(), *p)).collect();
            let frame: Vec<&str> = self.lie.iter().map(|(f, _)| f.as_str()).collect();
            let dual: Vec<&str> = self.lie.iter().map(|(_, a)| a.as_str()).collect();
            let mut m = match (coords.is_empty(), frame.is_empty()) {
                (true, true) => return Err(DslError::new(pos, ErrorKind::EmptyModel)),
                (false, true) => FrameModel::coordinate(&name, &coords),
                (true, false) => FrameModel::lie(&name, &frame, &dual),
                (false, false) => FrameModel::coordinate(&name, &coords)
                    .product(&FrameModel::lie(&name, &frame, &dual)),
            };
            m.name = name;
            self.model = Some(m);
        }
        Ok(self.model.as_ref().expect("built above"))
    }

    fn statement(&mut self) -> Result<(), DslError> {
        let tok = self.peek().clone();
        let word = match &tok.tok {
            Tok::Ident(w) => w.clone(),
            _ => return Err(syntax(&tok, &["statement"])),
        };
        match word.as_str() {
            "coords" => self.coords_stmt(),
            "frame" => self.frame_stmt(),
            "bracket" => self.bracket_stmt(),
            "scalar" | "section" | "form" | "bivector" => self.value_stmt(&word),
            "endo" => self.endo_stmt(),
            "gac" => self.gac_stmt(),
            "check" => self.check_stmt(),
            "expect" => self.expect_stmt(),
            _ => Err(syntax(
                &tok,
                &[
                    "coords", "frame", "bracket", "scalar", "section", "form", "bivector", "endo",
                    "gac", "check", "expect",
                ],
            )),
        }
    }

    fn declare_symbol(&self, name: &str, pos: Pos) -> Result<(), DslError> {
        let taken = RESERVED.contains(&name)
            || self
                .coords
                .iter()
                .any(|(c, _)| c == name || format!("d{c}") == name)
            || self.lie.iter().any(|(f, a)| f == name || a == name)
            || self.items.iter().any(|(n, _)| n == name);
        if taken {
            Err(DslError::new(pos, ErrorKind::Duplicate(name.to_string())))
        } else {
            Ok(())
        }
    }

    fn coords_stmt(&mut self) -> Result<(), DslError> {
        let pos = self.bump().pos;
        if self.model.is_some() {
            return Err(DslError::new(pos, ErrorKind::ModelFrozen));
        }
        loop {
            let (c, cpos) = self.ident("coordinate name")?;
            self.declare_symbol(&c, cpos)?;
            if self
                .lie
                .iter()
                .any(|(f, a)| *f == format!("d{c}") || *a == format!("d{c}"))
            {
                return Err(DslError::new(cpos, ErrorKind::Duplicate(format!("d{c}"))));
            }
            let periodic = self.is_word("periodic");
            if periodic {
                self.bump();
            }
            self.coords.push((c, periodic));
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(";")?;
        Ok(())
    }

    fn frame_stmt(&mut self) -> Result<(), DslError> {
        let pos = self.bump().pos;
        if self.model.is_some() {
            return Err(DslError::new(pos, ErrorKind::ModelFrozen));
        }
        let mut frame = Vec::new();
        loop {
            let (f, fpos) = self.ident("frame name")?;
            self.declare_symbol(&f, fpos)?;
            if frame.iter().any(|(g, _): &(String, Pos)| *g == f) {
                return Err(DslError::new(fpos, ErrorKind::Duplicate(f)));
            }
            frame.push((f, fpos));
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_word("dual")?;
        let mut dual = Vec::new();
        loop {
            let (a, apos) = self.ident("coframe name")?;
            self.declare_symbol(&a, apos)?;
            if frame.iter().any(|(g, _)| *g == a)
                || dual.iter().any(|(g, _): &(String, Pos)| *g == a)
            {
                return Err(DslError::new(apos, ErrorKind::Duplicate(a)));
            }
            dual.push((a, apos));
            if !self.eat_punct(",") {
                break;
            }
        }
        if frame.len() != dual.len() {
            return Err(DslError::new(
                dual.last().map_or(pos, |d| d.1),
                ErrorKind::Dimension(format!(
                    "{} frame names but {} dual names",
                    frame.len(),
                    dual.len()
                )),
            ));
        }
        self.expect_punct(";")?;
        self.lie
            .extend(frame.into_iter().zip(dual).map(|((f, _), (a, _))| (f, a)));
        Ok(())
    }

    fn bracket_stmt(&mut self) -> Result<(), DslError> {
        let pos = self.bump().pos;
        self.expect_punct("[")?;
        let (i, ipos) = self.integer()?;
        self.expect_punct(",")?;
        let (j, jpos) = self.integer()?;
        self.expect_punct("]")?;
        self.expect_punct("=")?;
        let vpos = self.peek().pos;
        let value = self.expr()?;
        self.expect_punct(";")?;
        let m = self.model(pos)?;
        let n = m.dim();
        let lie_start = n - self.lie.len();
        for (k, kpos) in [(i, ipos), (j, jpos)] {
            if k == 0 || k > n {
                return Err(DslError::new(
                    kpos,
                    ErrorKind::Dimension(format!("frame index {k} outside 1..{n}")),
                ));
            }
            if k - 1 < lie_start {
                return Err(DslError::new(
                    kpos,
                    ErrorKind::Dimension(format!(
                        "frame index {k} is a coordinate field, whose brackets vanish"
                    )),
                ));
            }
        }
        if i == j {
            return Err(DslError::new(
                jpos,
                ErrorKind::Dimension("a frame element brackets to zero with itself".into()),
            ));
        }
        let v = self.as_vector(value, vpos)?;
        self.model
            .as_mut()
            .expect("built above")
            .set_bracket(i - 1, j - 1, &v)
            .map_err(|e| DslError::new(vpos, ErrorKind::Dimension(e.to_string())))
    }

    fn value_stmt(&mut self, word: &str) -> Result<(), DslError> {
        self.bump();
        let (name, npos) = self.ident("name")?;
        self.model(npos)?;
        self.declare_symbol(&name, npos)?;
        self.expect_punct("=")?;
        let vpos = self.peek().pos;
        let value = self.expr()?;
        self.expect_punct(";")?;
        let item = match word {
            "scalar" => match value {
                Value::Scalar(s) => Item::Scalar(s),
                other => return Err(type_error(vpos, "scalar", &other)),
            },
            "section" => Item::Section(self.as_section(value, vpos)?),
            "form" => Item::Form(self.as_form(value, vpos)?),
            _ => Item::Bivector(self.as_bivector(value, vpos)?),
        };
        self.items.push((name, item));
        Ok(())
    }

    fn rules(&mut self) -> Result<Vec<(GSection, GSection, Pos)>, DslError> {
        self.expect_punct("{")?;
        let mut rules = Vec::new();
        while !self.eat_punct("}") {
            let spos = self.peek().pos;
            let src = self.expr()?;
            let src = self.as_section(src, spos)?;
            self.expect_punct("->")?;
            let ipos = self.peek().pos;
            let img = self.expr()?;
            let img = self.as_section(img, ipos)?;
            self.expect_punct(";")?;
            rules.push((src, img, spos));
        }
        Ok(rules)
    }

    fn endo_stmt(&mut self) -> Result<(), DslError> {
        let pos = self.bump().pos;
        let (name, npos) = self.ident("name")?;
        self.model(npos)?;
        self.declare_symbol(&name, npos)?;
        let rules = self.rules()?;
        self.eat_punct(";");
        let endo = self.assemble_endo(&rules, pos)?;
        self.items.push((name, Item::Endo(endo)));
        Ok(())
    }

    /// Basis-element sources leave the remaining basis columns zero; otherwise
    /// the sources must form a basis.
    fn assemble_endo(
        &self,
        rules: &[(GSection, GSection, Pos)],
        pos: Pos,
    ) -> Result<GEndo, DslError> {
        let m = self.model.as_ref().expect("built before rules");
        let n = m.dim();
        let basis_index = |s: &GSection| -> Option<usize> {
            let comps = s.components();
            let nonzero: Vec<usize> = (0..comps.len()).filter(|&k| !comps[k].is_zero()).collect();
            match nonzero.as_slice() {
                [k] if comps[*k] == Scalar::one() => Some(*k),
                _ => None,
            }
        };
        let indices: Option<Vec<usize>> = rules.iter().map(|(s, _, _)| basis_index(s)).collect();
        if let Some(indices) = indices {
            let mut cols = vec![GSection::zero(n); 2 * n];
            let mut seen = vec![false; 2 * n];
            for (k, (_, img, rpos)) in indices.into_iter().zip(rules) {
                if seen[k] {
                    return Err(DslError::new(
                        *rpos,
                        ErrorKind::Duplicate(m.render_section(&GSection::basis(n, k))),
                    ));
                }
                seen[k] = true;
                cols[k] = img.clone();
            }
            return Ok(GEndo::from_columns(&cols));
        }
        if rules.len() != 2 * n {
            return Err(DslError::new(
                pos,
                ErrorKind::Dimension(format!(
                    "{} rules given, a basis of {} sources is needed",
                    rules.len(),
                    2 * n
                )),
            ));
        }
        let sources: Vec<GSection> = rules.iter().map(|(s, _, _)| s.clone()).collect();
        let images: Vec<GSection> = rules.iter().map(|(_, i, _)| i.clone()).collect();
        let samples = SampleSet::halton(m, DEFAULT_SAMPLES);
        endo_from_images(&sources, &images, &samples).map_err(|e| math(pos, e.to_string()))
    }

    fn gac_stmt(&mut self) -> Result<(), DslError> {
        self.bump();
        let (name, npos) = self.ident("name")?;
        self.model(npos)?;
        self.declare_symbol(&name, npos)?;
        self.expect_punct("=")?;
        let decl = if self.is_word("construct") {
            self.bump();
            self.expect_punct("(")?;
            let (e_plus, e_minus) = self.section_pair()?;
            self.expect_punct(")")?;
            let rules = self.rules()?;
            self.eat_punct(";");
            GacDecl::Construct {
                e_plus,
                e_minus,
                rules: rules.into_iter().map(|(s, i, _)| (s, i)).collect(),
            }
        } else {
            self.expect_punct("(")?;
            let (phi, ppos) = self.ident("endomorphism name")?;
            match self.items.iter().find(|(n, _)| *n == phi) {
                Some((_, Item::Endo(_))) => {}
                Some((_, other)) => {
                    return Err(DslError::new(
                        ppos,
                        ErrorKind::Type {
                            expected: "endo".into(),
                            found: other.kind().into(),
                        },
                    ))
                }
                None => return Err(DslError::new(ppos, ErrorKind::Unresolved(phi))),
            }
            self.expect_punct(",")?;
            let (e_plus, e_minus) = self.section_pair()?;
            self.expect_punct(")")?;
            let twist = if self.is_word("twist") {
                self.bump();
                let tpos = self.peek().pos;
                let h = self.expr()?;
                let h = self.as_form(h, tpos)?;
                if h.degree() != 3 && !h.is_zero() {
                    return Err(DslError::new(
                        tpos,
                        ErrorKind::Type {
                            expected: "3-form".into(),
                            found: format!("{}-form", h.degree()),
                        },
                    ));
                }
                (!h.is_zero()).then_some(h)
            } else {
                None
            };
            self.expect_punct(";")?;
            GacDecl::Triple {
                phi,
                e_plus,
                e_minus,
                twist,
            }
        };
        self.items.push((name, Item::Gac(decl)));
        Ok(())
    }

    fn section_pair(&mut self) -> Result<(GSection, GSection), DslError> {
        let apos = self.peek().pos;
        let a = self.expr()?;
        let a = self.as_section(a, apos)?;
        self.expect_punct(",")?;
        let bpos = self.peek().pos;
        let b = self.expr()?;
        let b = self.as_section(b, bpos)?;
        Ok((a, b))
    }

    fn check_stmt(&mut self) -> Result<(), DslError> {
        self.bump();
        let (mut kind_name, kpos) = self.ident("check name")?;
        if self.is_punct("-") {
            if let Tok::Ident(rest) = self.peek_at(1).clone() {
                self.bump();
                self.bump();
                kind_name = format!("{kind_name}-{rest}");
            }
        }
        let kind = CheckKind::from_name(&kind_name).ok_or_else(|| {
            let names: Vec<&str> = CheckKind::ALL.iter().map(|k| k.name()).collect();
            syntax(
                &Token {
                    tok: Tok::Ident(kind_name.clone()),
                    pos: kpos,
                },
                &names,
            )
        })?;
        let mut req = CheckRequest::new(kind);
        loop {
            if self.is_word("on") {
                self.bump();
                let (target, tpos) = self.ident("structure name")?;
                match self.items.iter().find(|(n, _)| *n == target) {
                    Some((_, Item::Gac(_))) => {}
                    _ => return Err(DslError::new(tpos, ErrorKind::Unresolved(target))),
                }
                req.target = Some(target);
            } else if self.is_word("side") {
                self.bump();
                req.side = Some(if self.eat_punct("+") {
                    PwSign::Plus
                } else if self.eat_punct("-") {
                    PwSign::Minus
                } else {
                    return Err(syntax(self.peek(), &["`+`", "`-`"]));
                });
            } else if self.is_word("fiber") {
                self.bump();
                let t = self.bump();
                let fiber = match t.tok {
                    Tok::Ident(s) | Tok::FrameSym(s) => s,
                    _ => return Err(syntax(&t, &["fiber direction"])),
                };
                let m = self.model(t.pos)?;
                let known =
                    m.frame_names().contains(&fiber) || m.coordinate_index(&fiber).is_some();
                if !known {
                    return Err(DslError::new(t.pos, ErrorKind::Unresolved(fiber)));
                }
                req.fiber = Some(fiber);
            } else {
                break;
            }
        }
        self.expect_punct(";")?;
        self.checks.push(req);
        Ok(())
    }

    fn expect_stmt(&mut self) -> Result<(), DslError> {
        self.bump();
        let (head, hpos) = self.ident("expectation key")?;
        self.model(hpos)?;
        let key = if head == "bracket" && self.is_punct("(") {
            self.bump();
            let (a, b) = self.section_pair()?;
            self.expect_punct(")")?;
            ExpectKey::Bracket(a, b)
        } else if head == "member" && self.is_punct("(") {
            self.bump();
            let spos = self.peek().pos;
            let s = self.expr()?;
            let s = self.as_section(s, spos)?;
            self.expect_punct(",")?;
            let (frame, _) = self.ident("frame label")?;
            self.expect_punct(")")?;
            ExpectKey::Member(s, frame)
        } else {
            let mut path = head;
            while self.eat_punct(".") {
                let t = self.bump();
                match t.tok {
                    Tok::Ident(s) => path.push_str(&format!(".{s}")),
                    Tok::Number(x) if x >= 0.0 && x == x.trunc() && x < 1e9 => {
                        path.push_str(&format!(".{}", x as u64))
                    }
                    _ => return Err(syntax(&t, &["path segment"])),
                }
            }
            ExpectKey::Fact(path)
        };
        self.expect_punct("=")?;
        let value = self.string()?;
        self.expect_punct(";")?;
        self.expectations.push(Expectation { key, value });
        Ok(())
    }

    // ------------------------------------------------------------------
    // expressions

    fn expr(&mut self) -> Result<Value, DslError> {
        let mut acc = self.term()?;
        loop {
            let pos = self.peek().pos;
            if self.eat_punct("+") {
                let rhs = self.term()?;
                acc = self.add(acc, rhs, pos)?;
            } else if self.eat_punct("-") {
                let rhs = self.term()?;
                let rhs = rhs.map(&mut |s| -s);
                acc = self.add(acc, rhs, pos)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Value, DslError> {
        let mut acc = self.unary()?;
        loop {
            let pos = self.peek().pos;
            if self.eat_punct("*") {
                let rhs = self.unary()?;
                acc = self.mul(acc, rhs, pos)?;
            } else if self.eat_punct("/") {
                let rhs = self.unary()?;
                acc = self.div(acc, rhs, pos)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Value, DslError> {
        if self.eat_punct("-") {
            let v = self.unary()?;
            return Ok(v.map(&mut |s| -s));
        }
        if self.eat_punct("+") {
            return self.unary();
        }
        self.wedge()
    }

    fn wedge(&mut self) -> Result<Value, DslError> {
        let mut acc = self.primary()?;
        loop {
            let pos = self.peek().pos;
            if !self.eat_punct("^") {
                return Ok(acc);
            }
            if let Tok::Number(x) = self.peek().tok {
                self.bump();
                acc = self.power(acc, x, pos)?;
            } else {
                let rhs = self.primary()?;
                acc = self.wedge_values(acc, rhs, pos)?;
            }
        }
    }

    fn primary(&mut self) -> Result<Value, DslError> {
        let t = self.bump();
        match t.tok {
            Tok::Number(x) => Ok(Value::Scalar(Scalar::real(x))),
            Tok::Punct("(") => {
                let v = self.expr()?;
                self.expect_punct(")")?;
                Ok(v)
            }
            Tok::FrameSym(s) => self.resolve(&s, t.pos),
            Tok::Ident(s) if ["sqrt", "cos", "sin", "exp"].contains(&s.as_str()) => {
                self.expect_punct("(")?;
                let apos = self.peek().pos;
                let arg = self.expr()?;
                self.expect_punct(")")?;
                let arg = match arg {
                    Value::Scalar(a) => a,
                    other => return Err(type_error(apos, "scalar argument", &other)),
                };
                self.function(&s, &arg, apos).map(Value::Scalar)
            }
            Tok::Ident(s) => self.resolve(&s, t.pos),
            _ => Err(syntax(&t, &["expression"])),
        }
    }

    fn resolve(&mut self, name: &str, pos: Pos) -> Result<Value, DslError> {
        match name {
            "pi" => return Ok(Value::Scalar(Scalar::real(std::f64::consts::PI))),
            "i" => return Ok(Value::Scalar(Scalar::imag_unit())),
            _ => {}
        }
        if let Some((_, item)) = self.items.iter().find(|(n, _)| n == name) {
            return match item {
                Item::Scalar(s) => Ok(Value::Scalar(s.clone())),
                Item::Section(s) => Ok(Value::Section(s.clone())),
                Item::Form(f) => Ok(Value::Form(f.clone())),
                Item::Bivector(b) => Ok(Value::Bivector(b.clone())),
                other => Err(DslError::new(
                    pos,
                    ErrorKind::Type {
                        expected: "value".into(),
                        found: other.kind().into(),
                    },
                )),
            };
        }
        let m = self.model(pos)?;
        let n = m.dim();
        if let Some(a) = m.frame_names().iter().position(|f| f == name) {
            return Ok(Value::Vector(VField::basis(n, a)));
        }
        if let Some(a) = m.coframe_names().iter().position(|f| f == name) {
            return Ok(Value::Form(PForm::coframe(n, a)));
        }
        if m.coordinate_index(name).is_some() {
            return Ok(Value::Scalar(Scalar::var(name)));
        }
        Err(DslError::new(pos, ErrorKind::Unresolved(name.to_string())))
    }

    fn function(&self, name: &str, arg: &Scalar, pos: Pos) -> Result<Scalar, DslError> {
        if name == "sqrt" {
            return match arg.as_constant() {
                Some(c) if c.im == 0.0 && c.re >= 0.0 => Ok(Scalar::real(c.re.sqrt())),
                None if arg.is_zero() => Ok(Scalar::zero()),
                _ => Err(math(pos, "sqrt needs a nonnegative constant")),
            };
        }
        let (c0, lin) = arg.as_affine().ok_or_else(|| {
            math(
                pos,
                format!("{name} needs an argument linear in the coordinates"),
            )
        })?;
        // exp(i * theta) for real theta, or exp(c0 + i * theta) for exp
        let phase = |sign: f64| -> Result<Scalar, DslError> {
            let mut freqs: Vec<(Var, f64)> = Vec::new();
            for (v, k) in &lin {
                let k = if name == "exp" {
                    if k.re.abs() > 0.0 {
                        return Err(math(pos, "exp needs a purely imaginary coordinate part"));
                    }
                    k.im
                } else {
                    if k.im.abs() > 0.0 {
                        return Err(math(pos, format!("{name} needs a real argument")));
                    }
                    k.re
                };
                if !k.is_finite() {
                    return Err(math(pos, "frequency overflow"));
                }
                freqs.push((v.clone(), sign * k));
            }
            freqs.sort_by(|a, b| a.0.cmp(&b.0));
            freqs.retain(|(_, k)| *k != 0.0);
            let coeff = if name == "exp" {
                c0.exp()
            } else {
                (Complex64::i() * c0 * sign).exp()
            };
            Ok(Scalar::from_terms(vec![Term {
                coeff,
                powers: Vec::new(),
                freqs,
            }]))
        };
        let out = match name {
            "exp" => phase(1.0)?,
            "cos" => {
                if c0.im != 0.0 {
                    return Err(math(pos, "cos needs a real argument"));
                }
                (phase(1.0)? + phase(-1.0)?) * Complex64::new(0.5, 0.0)
            }
            _ => {
                if c0.im != 0.0 {
                    return Err(math(pos, "sin needs a real argument"));
                }
                (phase(1.0)? - phase(-1.0)?) * Complex64::new(0.0, -0.5)
            }
        };
        match check_finite(pos, Value::Scalar(out))? {
            Value::Scalar(s) => Ok(s),
            _ => unreachable!("scalar in, scalar out"),
        }
    }

    fn power(&self, base: Value, x: f64, pos: Pos) -> Result<Value, DslError> {
        let base = match base {
            Value::Scalar(s) => s,
            other => return Err(type_error(pos, "scalar base", &other)),
        };
        if x < 0.0 || x != x.trunc() || x > EXPONENT_CAP as f64 {
            return Err(math(
                pos,
                format!("exponent must be an integer in 0..={EXPONENT_CAP}"),
            ));
        }
        let out = base
            .checked_pow(x as u32)
            .map_err(|e| math(pos, e.to_string()))?;
        check_finite(pos, Value::Scalar(out))
    }

    fn add(&self, a: Value, b: Value, pos: Pos) -> Result<Value, DslError> {
        use Value::*;
        let out = match (a, b) {
            (Scalar(x), Scalar(y)) => Scalar(&x + &y),
            (Vector(x), Vector(y)) => Vector(x.add(&y)),
            (Form(x), Form(y)) if x.degree() == y.degree() => Form(x.add(&y)),
            (Bivector(x), Bivector(y)) => Bivector(x.add(&y)),
            (x, Scalar(z)) | (Scalar(z), x) if z.is_zero() => x,
            (x, y) => {
                let xs = self.sectionish(&x);
                let ys = self.sectionish(&y);
                match (xs, ys) {
                    (Some(s), Some(t)) => Section(s.add(&t)),
                    _ => {
                        return Err(DslError::new(
                            pos,
                            ErrorKind::Type {
                                expected: format!("a summand compatible with {}", x.kind()),
                                found: y.kind(),
                            },
                        ))
                    }
                }
            }
        };
        check_finite(pos, out)
    }

    fn sectionish(&self, v: &Value) -> Option<GSection> {
        match v {
            Value::Vector(x) => Some(GSection::from_vector(x.clone())),
            Value::Form(f) if f.degree() == 1 => Some(GSection::from_form(f.clone())),
            Value::Section(s) => Some(s.clone()),
            _ => None,
        }
    }

    fn mul(&self, a: Value, b: Value, pos: Pos) -> Result<Value, DslError> {
        check_product(pos, &a, &b)?;
        let out = match (a, b) {
            (Value::Scalar(f), other) | (other, Value::Scalar(f)) => other.map(&mut |s| s * &f),
            (x, y) => {
                return Err(DslError::new(
                    pos,
                    ErrorKind::Type {
                        expected: "a scalar factor (use ^ for wedge products)".into(),
                        found: format!("{} * {}", x.kind(), y.kind()),
                    },
                ))
            }
        };
        check_finite(pos, out)
    }

    fn div(&self, a: Value, b: Value, pos: Pos) -> Result<Value, DslError> {
        let d = match b {
            Value::Scalar(d) => d,
            other => return Err(type_error(pos, "scalar divisor", &other)),
        };
        let inv = d
            .inverse()
            .map_err(|_| math(pos, format!("cannot divide by `{d}`")))?;
        self.mul(a, Value::Scalar(inv), pos)
    }

    fn wedge_values(&self, a: Value, b: Value, pos: Pos) -> Result<Value, DslError> {
        check_product(pos, &a, &b)?;
        let out = match (&a, &b) {
            (Value::Form(x), Value::Form(y)) => {
                let degree = x.degree() + y.degree();
                if degree > MAX_DEGREE {
                    return Err(DslError::new(
                        pos,
                        ErrorKind::Dimension(format!(
                            "a {degree}-form exceeds the storage ceiling of {MAX_DEGREE}"
                        )),
                    ));
                }
                Value::Form(wedge_unbounded(x, y))
            }
            (Value::Vector(x), Value::Vector(y)) => Value::Bivector(Bivector::wedge(x, y)),
            (Value::Scalar(_), _) | (_, Value::Scalar(_)) => {
                return Err(math(pos, "`^` on a scalar needs an integer exponent"));
            }
            _ => {
                return Err(DslError::new(
                    pos,
                    ErrorKind::Type {
                        expected: "two forms or two vector fields".into(),
                        found: format!("{} ^ {}", a.kind(), b.kind()),
                    },
                ))
            }
        };
        check_finite(pos, out)
    }

    fn as_vector(&self, v: Value, pos: Pos) -> Result<VField, DslError> {
        let n = self.model.as_ref().map_or(0, FrameModel::dim);
        match v {
            Value::Vector(x) => Ok(x),
            Value::Scalar(s) if s.is_zero() => Ok(VField::zero(n)),
            other => Err(type_error(pos, "vector field", &other)),
        }
    }

    fn as_section(&self, v: Value, pos: Pos) -> Result<GSection, DslError> {
        let n = self.model.as_ref().map_or(0, FrameModel::dim);
        match v {
            Value::Scalar(s) if s.is_zero() => Ok(GSection::zero(n)),
            other => self
                .sectionish(&other)
                .ok_or_else(|| type_error(pos, "section", &other)),
        }
    }

    fn as_form(&self, v: Value, pos: Pos) -> Result<PForm, DslError> {
        let n = self.model.as_ref().map_or(0, FrameModel::dim);
        match v {
            Value::Form(f) => Ok(f),
            Value::Scalar(s) if s.is_zero() => Ok(PForm::zero(n, 2)),
            other => Err(type_error(pos, "form", &other)),
        }
    }

    fn as_bivector(&self, v: Value, pos: Pos) -> Result<Bivector, DslError> {
        let n = self.model.as_ref().map_or(0, FrameModel::dim);
        match v {
            Value::Bivector(b) => Ok(b),
            Value::Scalar(s) if s.is_zero() => Ok(Bivector::zero(n)),
            other => Err(type_error(pos, "bivector", &other)),
        }
    }
}
