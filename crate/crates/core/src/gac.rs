//! Generalized almost contact triples, their eigenbundle frames, and structure transforms.

use crate::courant::{pairing, Bivector, CourantError, GEndo, GSection, Twist};
use crate::frame::{FrameModel, PForm, VField};
use crate::linalg::{invert, kernel, numeric_rank, LinalgError};
use crate::sample::SampleSet;
use crate::scalar::Scalar;
use num_complex::Complex64;
use std::fmt;
use thiserror::Error;

/// The defining identities of a generalized almost contact triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    NullPlus,
    NullMinus,
    Normalization,
    SkewAdjoint,
    /// `Phi^2 u = -u + 2(<E-,u>E+ + <E+,u>E-)` on basis section `u`.
    Square(usize),
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::NullPlus => write!(f, "<E+,E+> = 0"),
            Axiom::NullMinus => write!(f, "<E-,E-> = 0"),
            Axiom::Normalization => write!(f, "<E+,E-> = 1/2"),
            Axiom::SkewAdjoint => write!(f, "Phi + Phi* = 0"),
            Axiom::Square(k) => write!(
                f,
                "Phi^2 = -1 + 2(E+ (x) E- + E- (x) E+) on basis section {}",
                k + 1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub residual: String,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "axiom {} violated, residual {}",
            self.axiom, self.residual
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GacError {
    #[error("{0}")]
    Violation(AxiomViolation),
    #[error(transparent)]
    Courant(#[from] CourantError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("operands have dimension {found}, model has {expected}")]
    Dimension { expected: usize, found: usize },
    #[error(
        "rank certificate for {frame} failed: expected {expected}, found {found} at sample {point}"
    )]
    RankCertificate {
        frame: String,
        expected: usize,
        found: usize,
        point: usize,
    },
    #[error("frame {0} is not isotropic")]
    NotIsotropic(String),
    #[error("J moves `{0}` out of the complement of span(E+, E-)")]
    NotPreserving(String),
    #[error("source `{0}` does not lie in the complement of span(E+, E-)")]
    SourceOutside(String),
    #[error("J squared is not -1 on `{0}`")]
    NotComplex(String),
    #[error("J is not skew for the pairing on `{0}` and `{1}`")]
    NotSkew(String, String),
    #[error("expected {expected} J images on the complement, got {found}")]
    ImageCount { expected: usize, found: usize },
}

/// Spanning sections plus a pointwise numeric rank certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbundleFrame {
    pub label: String,
    pub sections: Vec<GSection>,
    pub claimed_rank: usize,
    /// Numeric rank at each sample point.
    pub ranks: Vec<usize>,
    /// False when the frame came from a pivot that vanishes somewhere on the samples.
    pub symbolic: bool,
}

impl SubbundleFrame {
    pub fn new(
        label: &str,
        sections: Vec<GSection>,
        claimed_rank: usize,
        samples: &SampleSet,
        symbolic: bool,
    ) -> Self {
        let ranks = pointwise_ranks(&sections, samples);
        SubbundleFrame {
            label: label.to_string(),
            sections,
            claimed_rank,
            ranks,
            symbolic,
        }
    }

    pub fn certified(&self) -> bool {
        self.ranks.iter().all(|&r| r == self.claimed_rank)
    }

    pub fn certify(self) -> Result<Self, GacError> {
        match self.ranks.iter().position(|&r| r != self.claimed_rank) {
            None => Ok(self),
            Some(point) => Err(GacError::RankCertificate {
                frame: self.label.clone(),
                expected: self.claimed_rank,
                found: self.ranks[point],
                point,
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.sections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    /// All pairwise pairings vanish identically.
    pub fn is_isotropic(&self) -> bool {
        self.sections.iter().enumerate().all(|(i, s)| {
            self.sections[i..]
                .iter()
                .all(|t| pairing(s, t).map(|p| p.is_zero()).unwrap_or(false))
        })
    }
}

/// Numeric rank of the sections at every sample point.
pub fn pointwise_ranks(sections: &[GSection], samples: &SampleSet) -> Vec<usize> {
    (0..samples.len())
        .map(|k| {
            let cols: Vec<Vec<Complex64>> = sections
                .iter()
                .map(|s| samples.eval_section(s, k))
                .collect();
            numeric_rank(&cols)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenFrames {
    pub complement: SubbundleFrame,
    pub kernel: SubbundleFrame,
    pub holomorphic: SubbundleFrame,
    pub antiholomorphic: SubbundleFrame,
    pub l_plus: SubbundleFrame,
    pub l_minus: SubbundleFrame,
}

/// `R = X+ + X-`, `eta = eta+ + eta-`, `R' = X- - X+`, `eta' = eta+ - eta-`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedPair {
    pub reeb: VField,
    pub eta: PForm,
    pub reeb_prime: VField,
    pub eta_prime: PForm,
}

/// Sign of a Poon-Wade shape: `Plus` has `E+` a vector field and `E-` a form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PwSign {
    Plus,
    Minus,
}

impl fmt::Display for PwSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PwSign::Plus => write!(f, "+"),
            PwSign::Minus => write!(f, "-"),
        }
    }
}

/// Transform taking the structure to (or from) a Poon-Wade shape.
#[derive(Debug, Clone, PartialEq)]
pub enum PwCandidate {
    /// `e^B` applied to the structure yields the shape `target`.
    BField { b: PForm, target: PwSign },
    /// `e^{-P}` applied to the structure yields the shape `target`.
    BetaField { bivector: Bivector, target: PwSign },
}

/// Shape part of the Poon-Wade case analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum PwShape {
    Pure(PwSign),
    Transform(PwCandidate),
    /// Both sections have nonzero vector and form parts.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    BField,
    BetaField,
}

/// A validated triple `(Phi, E+, E-)` with cached frames.
#[derive(Debug, Clone)]
pub struct GacData {
    model: FrameModel,
    samples: SampleSet,
    phi: GEndo,
    e_plus: GSection,
    e_minus: GSection,
    twist: Option<Twist>,
    derived: DerivedPair,
    frames: EigenFrames,
}

impl GacData {
    pub fn build(
        model: &FrameModel,
        phi: GEndo,
        e_plus: GSection,
        e_minus: GSection,
        twist: Option<Twist>,
        samples: &SampleSet,
    ) -> Result<Self, GacError> {
        check_axioms(model, &phi, &e_plus, &e_minus)?;
        let derived = DerivedPair {
            reeb: e_plus.vector.add(&e_minus.vector),
            eta: e_plus.form.add(&e_minus.form),
            reeb_prime: e_minus.vector.sub(&e_plus.vector),
            eta_prime: e_plus.form.sub(&e_minus.form),
        };
        let frames = eigen_frames(model, &phi, &e_plus, &e_minus, samples)?;
        let twist = twist.filter(|t| !t.is_zero());
        Ok(GacData {
            model: model.clone(),
            samples: samples.clone(),
            phi,
            e_plus,
            e_minus,
            twist,
            derived,
            frames,
        })
    }

    pub fn model(&self) -> &FrameModel {
        &self.model
    }

    pub fn samples(&self) -> &SampleSet {
        &self.samples
    }

    pub fn phi(&self) -> &GEndo {
        &self.phi
    }

    pub fn e_plus(&self) -> &GSection {
        &self.e_plus
    }

    pub fn e_minus(&self) -> &GSection {
        &self.e_minus
    }

    pub fn twist(&self) -> Option<&Twist> {
        self.twist.as_ref()
    }

    pub fn derived_pair(&self) -> &DerivedPair {
        &self.derived
    }

    pub fn frames(&self) -> &EigenFrames {
        &self.frames
    }

    /// `E+` for `Plus`, `E-` for `Minus`.
    pub fn e(&self, sign: PwSign) -> &GSection {
        match sign {
            PwSign::Plus => &self.e_plus,
            PwSign::Minus => &self.e_minus,
        }
    }

    pub fn l_frame(&self, sign: PwSign) -> &SubbundleFrame {
        match sign {
            PwSign::Plus => &self.frames.l_plus,
            PwSign::Minus => &self.frames.l_minus,
        }
    }

    /// Half the odd dimension: `dim = 2n + 1`.
    pub fn half_rank(&self) -> usize {
        (self.model.dim() - 1) / 2
    }

    /// Residuals of `Phi^3 + Phi`, `Phi(E+)`, `Phi(E-)` and the largest `<E+-, Phi u>` over basis sections.
    pub fn consequence_residuals(&self) -> ConsequenceResiduals {
        let phi2 = self.phi.compose(&self.phi);
        let phi3 = phi2.compose(&self.phi);
        let cube = phi3.add(&self.phi);
        let n = self.model.dim();
        let mut orthogonal = true;
        for k in 0..2 * n {
            let image = self.phi.apply(&GSection::basis(n, k));
            for e in [&self.e_plus, &self.e_minus] {
                if !pairing(e, &image).map(|p| p.is_zero()).unwrap_or(false) {
                    orthogonal = false;
                }
            }
        }
        ConsequenceResiduals {
            cube_zero: cube.is_zero(),
            kills_e_plus: self.phi.apply(&self.e_plus).is_zero(),
            kills_e_minus: self.phi.apply(&self.e_minus).is_zero(),
            image_orthogonal: orthogonal,
        }
    }

    /// Shape analysis for the Poon-Wade classification.
    pub fn pw_shape(&self) -> PwShape {
        let (xp, ep) = (&self.e_plus.vector, &self.e_plus.form);
        let (xm, em) = (&self.e_minus.vector, &self.e_minus.form);
        if ep.is_zero() && xm.is_zero() {
            return PwShape::Pure(PwSign::Plus);
        }
        if xp.is_zero() && em.is_zero() {
            return PwShape::Pure(PwSign::Minus);
        }
        let wedge =
            |a: &PForm, b: &PForm| self.model.wedge(a, b).expect("1-forms on the same model");
        if xp.is_zero() {
            return PwShape::Transform(PwCandidate::BField {
                b: wedge(em, ep),
                target: PwSign::Minus,
            });
        }
        if xm.is_zero() {
            return PwShape::Transform(PwCandidate::BField {
                b: wedge(ep, em),
                target: PwSign::Plus,
            });
        }
        if em.is_zero() {
            return PwShape::Transform(PwCandidate::BetaField {
                bivector: Bivector::wedge(xp, xm),
                target: PwSign::Minus,
            });
        }
        if ep.is_zero() {
            return PwShape::Transform(PwCandidate::BetaField {
                bivector: Bivector::wedge(xm, xp),
                target: PwSign::Plus,
            });
        }
        PwShape::Mixed
    }

    /// B-field: `(e^B Phi e^{-B}, e^B E)`, twist shifted by `-dB`. Beta-field: `(e^{-P} Phi e^P, e^{-P} E)`.
    pub fn transform_b(&self, b: &PForm) -> Result<GacData, GacError> {
        let fwd = GEndo::b_field(b);
        let back = GEndo::b_field(&b.neg());
        let phi = fwd.compose(&self.phi).compose(&back);
        let shift = Twist::from_b_field(&self.model, b)?;
        let twist = match (&self.twist, shift.is_zero()) {
            (t, true) => t.clone(),
            (None, false) => Some(shift),
            (Some(t), false) => Some(Twist::new(&self.model, t.form().add(shift.form()))?),
        };
        GacData::build(
            &self.model,
            phi,
            fwd.apply(&self.e_plus),
            fwd.apply(&self.e_minus),
            twist,
            &self.samples,
        )
    }

    pub fn transform_beta(&self, p: &Bivector) -> Result<GacData, GacError> {
        let neg = Bivector::from_matrix(
            (0..p.dim())
                .map(|i| (0..p.dim()).map(|j| -p.entry(i, j)).collect())
                .collect(),
        )?;
        let fwd = GEndo::beta_field(&neg);
        let back = GEndo::beta_field(p);
        let phi = fwd.compose(&self.phi).compose(&back);
        GacData::build(
            &self.model,
            phi,
            fwd.apply(&self.e_plus),
            fwd.apply(&self.e_minus),
            self.twist.clone(),
            &self.samples,
        )
    }

    pub fn transform_candidate(&self, c: &PwCandidate) -> Result<GacData, GacError> {
        match c {
            PwCandidate::BField { b, .. } => self.transform_b(b),
            PwCandidate::BetaField { bivector, .. } => self.transform_beta(bivector),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsequenceResiduals {
    pub cube_zero: bool,
    pub kills_e_plus: bool,
    pub kills_e_minus: bool,
    pub image_orthogonal: bool,
}

impl ConsequenceResiduals {
    pub fn all(&self) -> bool {
        self.cube_zero && self.kills_e_plus && self.kills_e_minus && self.image_orthogonal
    }
}

fn violation(axiom: Axiom, residual: String) -> GacError {
    GacError::Violation(AxiomViolation { axiom, residual })
}

/// First violated axiom, in the order null, normalization, skewness, square.
pub fn check_axioms(
    model: &FrameModel,
    phi: &GEndo,
    ep: &GSection,
    em: &GSection,
) -> Result<(), GacError> {
    let n = model.dim();
    for found in [phi.dim(), ep.dim(), em.dim()] {
        if found != n {
            return Err(GacError::Dimension { expected: n, found });
        }
    }
    let pp = pairing(ep, ep)?;
    if !pp.is_zero() {
        return Err(violation(Axiom::NullPlus, pp.to_string()));
    }
    let mm = pairing(em, em)?;
    if !mm.is_zero() {
        return Err(violation(Axiom::NullMinus, mm.to_string()));
    }
    let pm = pairing(ep, em)?;
    if pm != Scalar::real(0.5) {
        return Err(violation(Axiom::Normalization, format!("<E+,E-> = {pm}")));
    }
    let skew = phi.add(&phi.pairing_adjoint());
    if !skew.is_zero() {
        let (r, c) = first_nonzero(&skew);
        return Err(violation(
            Axiom::SkewAdjoint,
            format!("entry ({}, {}) = {}", r + 1, c + 1, skew.entry(r, c)),
        ));
    }
    for k in 0..2 * n {
        let u = GSection::basis(n, k);
        let lhs = phi.apply(&phi.apply(&u));
        let rhs = ep
            .scale(&pairing(em, &u)?)
            .add(&em.scale(&pairing(ep, &u)?))
            .scale(&Scalar::real(2.0))
            .sub(&u);
        let diff = lhs.sub(&rhs);
        if !diff.is_zero() {
            return Err(violation(Axiom::Square(k), model.render_section(&diff)));
        }
    }
    Ok(())
}

fn first_nonzero(m: &GEndo) -> (usize, usize) {
    let size = 2 * m.dim();
    (0..size)
        .flat_map(|r| (0..size).map(move |c| (r, c)))
        .find(|&(r, c)| !m.entry(r, c).is_zero())
        .unwrap_or((0, 0))
}

/// Frame of `{s : <s, E+> = <s, E-> = 0}` by fraction-free elimination.
pub fn orthogonal_complement_frame(
    model: &FrameModel,
    ep: &GSection,
    em: &GSection,
    samples: &SampleSet,
) -> Result<SubbundleFrame, GacError> {
    let n = model.dim();
    let functional = |e: &GSection| -> Vec<Scalar> {
        e.form
            .components()
            .iter()
            .chain(&e.vector.0)
            .cloned()
            .collect()
    };
    let (basis, safe) = kernel(vec![functional(ep), functional(em)], samples);
    let sections = basis
        .iter()
        .map(|v| normalize_leading(&GSection::from_components(v)))
        .collect();
    SubbundleFrame::new("V-perp", sections, 2 * n - 2, samples, safe).certify()
}

fn eigen_frames(
    model: &FrameModel,
    phi: &GEndo,
    ep: &GSection,
    em: &GSection,
    samples: &SampleSet,
) -> Result<EigenFrames, GacError> {
    let n = model.dim();
    let complement = orthogonal_complement_frame(model, ep, em, samples)?;
    let i = Scalar::imag_unit();
    let candidates: Vec<GSection> = complement
        .sections
        .iter()
        .map(|e| normalize_leading(&e.sub(&phi.apply(e).scale(&i))))
        .collect();
    let target = n - 1;
    let mut chosen: Vec<GSection> = Vec::new();
    for c in candidates {
        if chosen.len() == target {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(c.clone());
        if pointwise_ranks(&trial, samples)
            .iter()
            .all(|&r| r == trial.len())
        {
            chosen = trial;
        }
    }
    let symbolic = complement.symbolic;
    let holomorphic = SubbundleFrame::new("E(1,0)", chosen, target, samples, symbolic).certify()?;
    let antiholomorphic = SubbundleFrame::new(
        "E(0,1)",
        holomorphic
            .sections
            .iter()
            .map(GSection::conjugate)
            .collect(),
        target,
        samples,
        symbolic,
    )
    .certify()?;
    let with = |label: &str, e: &GSection| {
        let mut s = vec![e.clone()];
        s.extend(holomorphic.sections.iter().cloned());
        SubbundleFrame::new(label, s, n, samples, symbolic).certify()
    };
    let l_plus = with("L+", ep)?;
    let l_minus = with("L-", em)?;
    let kernel =
        SubbundleFrame::new("ker Phi", vec![ep.clone(), em.clone()], 2, samples, true).certify()?;
    for f in [&holomorphic, &antiholomorphic, &l_plus, &l_minus] {
        if !f.is_isotropic() {
            return Err(GacError::NotIsotropic(f.label.clone()));
        }
    }
    Ok(EigenFrames {
        complement,
        kernel,
        holomorphic,
        antiholomorphic,
        l_plus,
        l_minus,
    })
}

/// Scales a section so its first nonzero component is 1 when that component is a unit.
pub fn normalize_leading(s: &GSection) -> GSection {
    match s.components().into_iter().find(|c| !c.is_zero()) {
        Some(lead) if lead.is_unit() => s.scale(&lead.inverse().expect("units are invertible")),
        _ => s.clone(),
    }
}

/// Assembles `Phi = J` on the complement of `span(E+, E-)` and `0` on the span.
///
/// `pairs` lists `(v, J v)` for a spanning set of the complement.
pub fn construct_from_gcs(
    model: &FrameModel,
    ep: &GSection,
    em: &GSection,
    pairs: &[(GSection, GSection)],
    samples: &SampleSet,
) -> Result<GEndo, GacError> {
    let n = model.dim();
    if pairs.len() != 2 * n - 2 {
        return Err(GacError::ImageCount {
            expected: 2 * n - 2,
            found: pairs.len(),
        });
    }
    let in_complement = |s: &GSection| -> Result<bool, GacError> {
        Ok(pairing(s, ep)?.is_zero() && pairing(s, em)?.is_zero())
    };
    for (v, jv) in pairs {
        if !in_complement(v)? {
            return Err(GacError::SourceOutside(model.render_section(v)));
        }
        if !in_complement(jv)? {
            return Err(GacError::NotPreserving(model.render_section(v)));
        }
    }
    for (a, (v, jv)) in pairs.iter().enumerate() {
        for (w, jw) in &pairs[a..] {
            if !(pairing(jv, w)? + pairing(v, jw)?).is_zero() {
                return Err(GacError::NotSkew(
                    model.render_section(v),
                    model.render_section(w),
                ));
            }
        }
    }
    let mut sources = vec![ep.clone(), em.clone()];
    let mut images = vec![GSection::zero(n), GSection::zero(n)];
    for (v, jv) in pairs {
        sources.push(v.clone());
        images.push(jv.clone());
    }
    let phi = endo_from_images(&sources, &images, samples)?;
    for (v, _) in pairs {
        let sq = phi.apply(&phi.apply(v)).add(v);
        if !sq.is_zero() {
            return Err(GacError::NotComplex(model.render_section(v)));
        }
    }
    Ok(phi)
}

/// The endomorphism sending each source section to its image, `T S^{-1}`.
pub fn endo_from_images(
    sources: &[GSection],
    images: &[GSection],
    samples: &SampleSet,
) -> Result<GEndo, GacError> {
    let size = sources.len();
    let s_cols: Vec<Vec<Scalar>> = sources.iter().map(GSection::components).collect();
    let s: Vec<Vec<Scalar>> = (0..size)
        .map(|r| (0..size).map(|c| s_cols[c][r].clone()).collect())
        .collect();
    let s_inv = GEndo::from_matrix(invert(&s, samples)?);
    Ok(GEndo::from_columns(images).compose(&s_inv))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::courant::tests::{heisenberg, section};
    use std::f64::consts::SQRT_2;

    pub(crate) fn re(x: f64) -> Scalar {
        Scalar::real(x)
    }

    fn im(x: f64) -> Scalar {
        Scalar::constant(Complex64::new(0.0, x))
    }

    /// Example data on R^3: E+ = d/dz + dx, E- = (dz + d/dx)/2, J on the complement.
    pub(crate) fn r3_new(samples: usize) -> GacData {
        let m = FrameModel::coordinate("r3", &[("x", false), ("y", false), ("z", false)]);
        let ep = section(3, &[(2, re(1.0)), (3, re(1.0))]);
        let em = section(3, &[(5, re(0.5)), (0, re(0.5))]);
        let pairs = vec![
            (
                section(3, &[(0, re(1.0)), (5, re(-1.0))]),
                section(3, &[(4, re(SQRT_2))]),
            ),
            (
                section(3, &[(1, re(1.0))]),
                section(3, &[(2, re(1.0 / SQRT_2)), (3, re(-1.0 / SQRT_2))]),
            ),
            (
                section(3, &[(2, re(1.0)), (3, re(-1.0))]),
                section(3, &[(1, re(-SQRT_2))]),
            ),
            (
                section(3, &[(4, re(1.0))]),
                section(3, &[(0, re(-1.0 / SQRT_2)), (5, re(1.0 / SQRT_2))]),
            ),
        ];
        let s = SampleSet::halton(&m, samples);
        let phi = construct_from_gcs(&m, &ep, &em, &pairs, &s).unwrap();
        GacData::build(&m, phi, ep, em, None, &s).unwrap()
    }

    pub(crate) fn heisenberg_gac() -> GacData {
        let m = heisenberg();
        let ep = section(3, &[(0, re(1.0)), (4, re(1.0))]);
        let em = section(3, &[(1, re(0.5)), (3, re(0.5))]);
        let pairs = vec![
            (
                section(3, &[(0, re(1.0)), (4, re(-1.0))]),
                section(3, &[(5, re(SQRT_2))]),
            ),
            (
                section(3, &[(2, re(1.0))]),
                section(3, &[(1, re(1.0 / SQRT_2)), (3, re(-1.0 / SQRT_2))]),
            ),
            (
                section(3, &[(1, re(1.0)), (3, re(-1.0))]),
                section(3, &[(2, re(-SQRT_2))]),
            ),
            (
                section(3, &[(5, re(1.0))]),
                section(3, &[(0, re(-1.0 / SQRT_2)), (4, re(1.0 / SQRT_2))]),
            ),
        ];
        let s = SampleSet::halton(&m, 10);
        let phi = construct_from_gcs(&m, &ep, &em, &pairs, &s).unwrap();
        GacData::build(&m, phi, ep, em, None, &s).unwrap()
    }

    /// Standard contact structure on R^3 with alpha = dz - y dx.
    pub(crate) fn contact_r3() -> GacData {
        let m = FrameModel::coordinate("r3", &[("x", false), ("y", false), ("z", false)]);
        let y = Scalar::var("y");
        let ep = section(3, &[(5, re(1.0)), (3, -y.clone())]);
        let em = section(3, &[(2, re(1.0))]);
        let images = vec![
            section(3, &[(4, re(1.0))]),
            section(3, &[(3, re(-1.0))]),
            GSection::zero(3),
            section(3, &[(1, re(1.0))]),
            section(3, &[(0, re(-1.0)), (2, -y.clone())]),
            section(3, &[(1, y.clone())]),
        ];
        let phi = GEndo::from_columns(&images);
        let s = SampleSet::halton(&m, 20);
        GacData::build(&m, phi, ep, em, None, &s).unwrap()
    }

    fn spans_equal(a: &[GSection], b: &[GSection], samples: &SampleSet) -> bool {
        let ra = pointwise_ranks(a, samples);
        let rb = pointwise_ranks(b, samples);
        let joint: Vec<GSection> = a.iter().chain(b).cloned().collect();
        ra == rb && ra == pointwise_ranks(&joint, samples)
    }

    #[test]
    fn r3_example_is_valid() {
        let g = r3_new(20);
        assert!(g.consequence_residuals().all());
        let d = g.derived_pair();
        assert_eq!(d.reeb, VField(vec![re(0.5), re(0.0), re(1.0)]));
        assert_eq!(d.eta, PForm::one_form(vec![re(1.0), re(0.0), re(0.5)]));
        assert_eq!(d.eta.pair(&d.reeb), re(1.0));
        assert_eq!(d.eta_prime.pair(&d.reeb_prime), re(1.0));
        let vperp = vec![
            section(3, &[(0, re(1.0)), (5, re(-1.0))]),
            section(3, &[(1, re(1.0))]),
            section(3, &[(2, re(1.0)), (3, re(-1.0))]),
            section(3, &[(4, re(1.0))]),
        ];
        assert!(spans_equal(
            &g.frames().complement.sections,
            &vperp,
            g.samples()
        ));
        // (pr o phi)(d/dx - dz) = dy, with Phi = sqrt(2) (pr o phi)
        let image = g.phi().apply(&vperp[0]);
        assert_eq!(image, section(3, &[(4, re(SQRT_2))]));
        let l_plus = vec![
            g.e_plus().clone(),
            section(3, &[(0, re(1.0)), (5, re(-1.0)), (4, im(-SQRT_2))]),
            section(3, &[(2, re(1.0)), (3, re(-1.0)), (1, im(SQRT_2))]),
        ];
        assert!(spans_equal(
            &g.frames().l_plus.sections,
            &l_plus,
            g.samples()
        ));
    }

    #[test]
    fn heisenberg_frames_match() {
        let g = heisenberg_gac();
        assert!(g.consequence_residuals().all());
        let expected = vec![
            g.e_minus().clone(),
            section(3, &[(0, re(1.0)), (4, re(-1.0)), (5, im(-SQRT_2))]),
            section(3, &[(1, re(1.0)), (3, re(-1.0)), (2, im(SQRT_2))]),
        ];
        assert!(spans_equal(
            &g.frames().l_minus.sections,
            &expected,
            g.samples()
        ));
        assert_eq!(g.frames().l_minus.claimed_rank, 3);
        assert!(g.frames().l_plus.certified());
    }

    #[test]
    fn doubled_e_minus_breaks_normalization() {
        let g = heisenberg_gac();
        let em = g.e_minus().scale(&re(2.0));
        let err = GacData::build(
            g.model(),
            g.phi().clone(),
            g.e_plus().clone(),
            em,
            None,
            g.samples(),
        )
        .unwrap_err();
        match err {
            GacError::Violation(v) => {
                assert_eq!(v.axiom, Axiom::Normalization);
                assert_eq!(v.residual, "<E+,E-> = 1");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn broken_j_is_rejected() {
        let m = FrameModel::coordinate("r3", &[("x", false), ("y", false), ("z", false)]);
        let ep = section(3, &[(2, re(1.0)), (3, re(1.0))]);
        let em = section(3, &[(5, re(0.5)), (0, re(0.5))]);
        // pr o phi without the sqrt(2) factor squares to -1/2
        let h = 1.0 / SQRT_2;
        let pairs = vec![
            (
                section(3, &[(0, re(1.0)), (5, re(-1.0))]),
                section(3, &[(4, re(1.0))]),
            ),
            (
                section(3, &[(1, re(1.0))]),
                section(3, &[(2, re(h * h)), (3, re(-h * h))]),
            ),
            (
                section(3, &[(2, re(1.0)), (3, re(-1.0))]),
                section(3, &[(1, re(-1.0))]),
            ),
            (
                section(3, &[(4, re(1.0))]),
                section(3, &[(0, re(-0.5)), (5, re(0.5))]),
            ),
        ];
        let s = SampleSet::halton(&m, 5);
        assert!(matches!(
            construct_from_gcs(&m, &ep, &em, &pairs, &s),
            Err(GacError::NotComplex(_))
        ));
        let mut leaving = pairs.clone();
        leaving[0].1 = section(3, &[(3, re(1.0))]);
        assert!(matches!(
            construct_from_gcs(&m, &ep, &em, &leaving, &s),
            Err(GacError::NotPreserving(_))
        ));
    }

    #[test]
    fn pw_shapes() {
        let c = contact_r3();
        assert_eq!(c.pw_shape(), PwShape::Pure(PwSign::Minus));
        assert_eq!(c.derived_pair().reeb, c.e_minus().vector);
        assert_eq!(c.derived_pair().eta, c.e_plus().form);
        assert_eq!(r3_new(5).pw_shape(), PwShape::Mixed);
    }

    #[test]
    fn b_transform_of_contact() {
        let c = contact_r3();
        assert!(c.transform_b(&PForm::zero(3, 2)).unwrap().phi() == c.phi());
        let mut b = PForm::zero(3, 2);
        b.set_component(&[0, 1], re(1.0));
        let t = c.transform_b(&b).unwrap();
        assert!(t.twist().is_none());
        let mut nonclosed = PForm::zero(3, 2);
        nonclosed.set_component(&[0, 1], Scalar::var("z"));
        let t = c.transform_b(&nonclosed).unwrap();
        let mut expected = PForm::zero(3, 3);
        expected.set_component(&[0, 1, 2], re(-1.0));
        assert_eq!(t.twist().unwrap().form(), &expected);
    }

    #[test]
    fn case_two_b_candidate_gives_pw_shape() {
        // Case 2: X+ = 0, and E- with both parts; mix contact data by a B-field first
        let c = contact_r3();
        let mut b = PForm::zero(3, 2);
        b.set_component(&[1, 2], re(1.0));
        let mixed = c.transform_b(&b).unwrap();
        let shape = mixed.pw_shape();
        let PwShape::Transform(candidate @ PwCandidate::BField { .. }) = shape else {
            panic!("expected a B-field candidate, got {shape:?}")
        };
        let back = mixed.transform_candidate(&candidate).unwrap();
        assert_eq!(back.pw_shape(), PwShape::Pure(PwSign::Minus));
    }

    #[test]
    fn case_four_beta_candidate_gives_pw_shape() {
        let c = contact_r3();
        // a beta field mixing the contact form with a vector
        let mut p = Bivector::zero(3);
        p.set(0, 2, re(1.0));
        let mixed = c.transform_beta(&p).unwrap();
        let shape = mixed.pw_shape();
        let PwShape::Transform(candidate @ PwCandidate::BetaField { .. }) = shape else {
            panic!("expected a beta candidate, got {shape:?}")
        };
        let back = mixed.transform_candidate(&candidate).unwrap();
        assert_eq!(back.pw_shape(), PwShape::Pure(PwSign::Minus));
    }
}
