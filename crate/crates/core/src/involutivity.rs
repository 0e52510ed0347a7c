//! Membership and involutivity decisions, classification, and the equivalence batteries.

use crate::courant::{courant_bracket, pairing, CourantError, GSection};
use crate::gac::{pointwise_ranks, GacData, PwCandidate, PwShape, PwSign, SubbundleFrame};
use crate::linalg::{kernel, numeric_nullspace, numeric_rank, numeric_residual, solve};
use crate::sample::SampleSet;
use crate::scalar::Scalar;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvolutivityError {
    #[error(transparent)]
    Courant(#[from] CourantError),
}

/// Numeric membership thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub accept: f64,
    pub reject: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            accept: 1e-8,
            reject: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    Yes,
    /// Not a member; the residual is largest at sample `point`.
    No {
        point: usize,
        residual: f64,
    },
    Undecided {
        residual: f64,
    },
}

/// Tri-state verdict; undecided is never folded into yes or no.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    No,
    Undecided,
    Yes,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }

    pub fn and(self, other: Verdict) -> Verdict {
        self.min(other)
    }

    pub fn or(self, other: Verdict) -> Verdict {
        self.max(other)
    }

    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Yes => write!(f, "yes"),
            Verdict::No => write!(f, "no"),
            Verdict::Undecided => write!(f, "undecided"),
        }
    }
}

impl Membership {
    pub fn verdict(&self) -> Verdict {
        match self {
            Membership::Yes => Verdict::Yes,
            Membership::No { .. } => Verdict::No,
            Membership::Undecided { .. } => Verdict::Undecided,
        }
    }
}

/// Largest pointwise least-squares residual of `s` against the frame, with its sample index.
pub fn numeric_membership_residual(
    s: &GSection,
    frame: &[GSection],
    samples: &SampleSet,
) -> (usize, f64) {
    (0..samples.len())
        .map(|k| {
            let cols: Vec<Vec<Complex64>> =
                frame.iter().map(|f| samples.eval_section(f, k)).collect();
            (k, numeric_residual(&cols, &samples.eval_section(s, k)))
        })
        .fold(
            (0, 0.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        )
}

/// Sampled route alone.
pub fn numeric_membership(
    s: &GSection,
    frame: &[GSection],
    samples: &SampleSet,
    thr: &Thresholds,
) -> Membership {
    let (point, residual) = numeric_membership_residual(s, frame, samples);
    if residual <= thr.accept {
        Membership::Yes
    } else if residual >= thr.reject {
        Membership::No { point, residual }
    } else {
        Membership::Undecided { residual }
    }
}

/// Symbolic route alone; `None` when elimination hits a pivot that vanishes on the samples.
pub fn symbolic_membership(s: &GSection, frame: &[GSection], samples: &SampleSet) -> Option<bool> {
    let cols: Vec<Vec<Scalar>> = frame.iter().map(GSection::components).collect();
    let sol = solve(&cols, &s.components(), samples);
    sol.safe.then(|| sol.consistent())
}

/// Symbolic solve when the frame and pivots allow it, sampled thresholds otherwise.
pub fn membership(
    s: &GSection,
    frame: &SubbundleFrame,
    samples: &SampleSet,
    thr: &Thresholds,
) -> Membership {
    if frame.symbolic {
        match symbolic_membership(s, &frame.sections, samples) {
            Some(true) => return Membership::Yes,
            Some(false) => {
                let (point, residual) = numeric_membership_residual(s, &frame.sections, samples);
                return Membership::No { point, residual };
            }
            None => {}
        }
    }
    numeric_membership(s, &frame.sections, samples, thr)
}

/// A bracket that left the target frame.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketWitness {
    pub left: GSection,
    pub right: GSection,
    pub bracket: GSection,
    pub membership: Membership,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InclusionResult {
    pub verdict: Verdict,
    /// First failing (or undecided) bracket in pair order.
    pub witness: Option<BracketWitness>,
    pub brackets_checked: usize,
}

/// Decides `[a, b] in target` for the given pairs, fanned out and merged in pair order.
pub fn brackets_within(
    g: &GacData,
    pairs: &[(GSection, GSection)],
    target: &SubbundleFrame,
    thr: &Thresholds,
) -> Result<InclusionResult, InvolutivityError> {
    let results: Vec<Result<(GSection, Membership), CourantError>> = pairs
        .par_iter()
        .map(|(a, b)| {
            let br = courant_bracket(g.model(), a, b, g.twist())?;
            let m = if br.is_zero() {
                Membership::Yes
            } else {
                membership(&br, target, g.samples(), thr)
            };
            Ok((br, m))
        })
        .collect();
    let mut verdict = Verdict::Yes;
    let mut witness = None;
    for ((a, b), r) in pairs.iter().zip(results) {
        let (br, m) = r?;
        let v = m.verdict();
        if v < verdict || (v != Verdict::Yes && witness.is_none()) {
            if v < verdict || witness.is_none() {
                witness = Some(BracketWitness {
                    left: a.clone(),
                    right: b.clone(),
                    bracket: br,
                    membership: m,
                });
            }
            verdict = verdict.and(v);
        }
    }
    Ok(InclusionResult {
        verdict,
        witness,
        brackets_checked: pairs.len(),
    })
}

fn all_pairs(frame: &[GSection]) -> Vec<(GSection, GSection)> {
    let mut out = Vec::new();
    for i in 0..frame.len() {
        for j in (i + 1)..frame.len() {
            out.push((frame[i].clone(), frame[j].clone()));
        }
    }
    out
}

fn cross_pairs(left: &[GSection], right: &[GSection]) -> Vec<(GSection, GSection)> {
    left.iter()
        .flat_map(|a| right.iter().map(move |b| (a.clone(), b.clone())))
        .collect()
}

/// Pairwise frame brackets stay in the frame.
pub fn is_involutive(
    g: &GacData,
    frame: &SubbundleFrame,
    thr: &Thresholds,
) -> Result<InclusionResult, InvolutivityError> {
    brackets_within(g, &all_pairs(&frame.sections), frame, thr)
}

#[derive(Debug, Clone, PartialEq)]
pub enum PoonWade {
    Pw(PwSign),
    /// Not of Poon-Wade type; `shape` records a pure shape whose L side failed involutivity.
    NotPw {
        shape: Option<PwSign>,
    },
    /// Reached from a Poon-Wade shape by the stated transform; the candidate may vanish.
    AfterTransform(PwCandidate),
}

impl PoonWade {
    pub fn is_poon_wade(&self) -> bool {
        matches!(self, PoonWade::Pw(_))
    }
}

impl fmt::Display for PoonWade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoonWade::Pw(s) => write!(f, "PW({s})"),
            PoonWade::NotPw { .. } => write!(f, "not-PW"),
            PoonWade::AfterTransform(PwCandidate::BField { target, .. }) => {
                write!(f, "PW({target})-after-B-transform")
            }
            PoonWade::AfterTransform(PwCandidate::BetaField { target, .. }) => {
                write!(f, "PW({target})-after-beta-transform")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub axioms_ok: bool,
    pub l_plus: InclusionResult,
    pub l_minus: InclusionResult,
    pub is_contact: Verdict,
    pub is_strong: Verdict,
    pub is_normal: Verdict,
    /// `[L+-, E(1,0)] in E(1,0)` for both signs.
    pub strong_criterion: Verdict,
    pub criterion_witness: Option<BracketWitness>,
    pub e_bracket: GSection,
    pub poon_wade: PoonWade,
}

impl ClassificationReport {
    pub fn l_side(&self, sign: PwSign) -> &InclusionResult {
        match sign {
            PwSign::Plus => &self.l_plus,
            PwSign::Minus => &self.l_minus,
        }
    }

    /// Both-sides involutivity and the bracket criterion give the same strongness verdict.
    pub fn routes_agree(&self) -> bool {
        self.is_strong == Verdict::Undecided
            || self.strong_criterion == Verdict::Undecided
            || self.is_strong == self.strong_criterion
    }

    /// `normal`, `strong`, `contact`, `almost-contact` or `undecided`.
    pub fn level(&self) -> &'static str {
        if self.is_normal.is_yes() {
            "normal"
        } else if self.is_strong.is_yes() {
            "strong"
        } else if self.is_contact.is_yes() {
            "contact"
        } else if self.is_contact == Verdict::No {
            "almost-contact"
        } else {
            "undecided"
        }
    }
}

pub fn classify(g: &GacData, thr: &Thresholds) -> Result<ClassificationReport, InvolutivityError> {
    let frames = g.frames();
    let l_plus = is_involutive(g, &frames.l_plus, thr)?;
    let l_minus = is_involutive(g, &frames.l_minus, thr)?;
    let is_contact = l_plus.verdict.or(l_minus.verdict);
    let is_strong = l_plus.verdict.and(l_minus.verdict);
    let e10 = &frames.holomorphic;
    let mut criterion = Verdict::Yes;
    let mut criterion_witness = None;
    for l in [&frames.l_plus, &frames.l_minus] {
        let pairs = cross_pairs(&l.sections, &e10.sections);
        let r = brackets_within(g, &pairs, e10, thr)?;
        criterion = criterion.and(r.verdict);
        criterion_witness = criterion_witness.or(r.witness);
    }
    let e_bracket = courant_bracket(g.model(), g.e_plus(), g.e_minus(), g.twist())?;
    let is_normal = is_strong.and(Verdict::from_bool(e_bracket.is_zero()));
    let poon_wade = match g.pw_shape() {
        PwShape::Pure(sign) => {
            let inv = match sign {
                PwSign::Plus => l_plus.verdict,
                PwSign::Minus => l_minus.verdict,
            };
            if inv.is_yes() {
                PoonWade::Pw(sign)
            } else {
                PoonWade::NotPw { shape: Some(sign) }
            }
        }
        PwShape::Transform(c) => PoonWade::AfterTransform(c),
        PwShape::Mixed => PoonWade::NotPw { shape: None },
    };
    Ok(ClassificationReport {
        axioms_ok: true,
        l_plus,
        l_minus,
        is_contact,
        is_strong,
        is_normal,
        strong_criterion: criterion,
        criterion_witness,
        e_bracket,
        poon_wade,
    })
}

/// `R` as a section.
pub fn reeb_section(g: &GacData) -> GSection {
    GSection::from_vector(g.derived_pair().reeb.clone())
}

/// `H = L cap (TR-perp)`: `L` itself when `R in L`, else the sections of `L` with `xi(R) = 0`.
pub fn h_frame(g: &GacData, sign: PwSign, thr: &Thresholds) -> SubbundleFrame {
    let l = g.l_frame(sign);
    let n = g.half_rank();
    let label = format!("H{sign}");
    let r = reeb_section(g);
    if membership(&r, l, g.samples(), thr).is_yes_value() {
        return SubbundleFrame { label, ..l.clone() };
    }
    let reeb = &g.derived_pair().reeb;
    let row: Vec<Scalar> = l.sections.iter().map(|s| s.form.pair(reeb)).collect();
    let (basis, safe) = kernel(vec![row], g.samples());
    let sections = basis
        .iter()
        .map(|coeffs| {
            coeffs
                .iter()
                .zip(&l.sections)
                .filter(|(c, _)| !c.is_zero())
                .fold(GSection::zero(g.model().dim()), |acc, (c, s)| {
                    acc.add(&s.scale(c))
                })
        })
        .collect();
    SubbundleFrame::new(&label, sections, 2 * n, g.samples(), safe && l.symbolic)
}

impl Membership {
    fn is_yes_value(&self) -> bool {
        *self == Membership::Yes
    }
}

/// `L + span(R)`, the pairing complement of `H`.
pub fn h_perp_frame(g: &GacData, sign: PwSign, thr: &Thresholds) -> SubbundleFrame {
    let l = g.l_frame(sign);
    let r = reeb_section(g);
    let in_l = membership(&r, l, g.samples(), thr).is_yes_value();
    let mut sections = l.sections.clone();
    if !in_l {
        sections.push(r);
    }
    let rank = l.claimed_rank + usize::from(!in_l);
    SubbundleFrame::new(
        &format!("H{sign}-perp"),
        sections,
        rank,
        g.samples(),
        l.symbolic,
    )
}

/// `H + span(R)`.
pub fn h_plus_reeb_frame(g: &GacData, h: &SubbundleFrame) -> SubbundleFrame {
    let r = reeb_section(g);
    let mut sections = h.sections.clone();
    let rank = if h.claimed_rank == 2 * g.half_rank() + 1 {
        h.claimed_rank
    } else {
        sections.push(r);
        h.claimed_rank + 1
    };
    SubbundleFrame::new(
        &format!("{}+R", h.label),
        sections,
        rank,
        g.samples(),
        h.symbolic,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCBattery {
    pub side: PwSign,
    /// `None` when the precondition (L side involutive) fails.
    pub skipped: Option<String>,
    /// (1) H involutive; (2) [R, H] in H-perp; (3) H+R isotropic and involutive;
    /// (4) [R, H+R] in H+R; (5) [R, H] in H.
    pub conditions: [Verdict; 5],
    pub witnesses: Vec<Option<BracketWitness>>,
    pub agreement: Verdict,
    /// (i) [R, H-perp] in H-perp and (ii) H-perp bracket-closed, run when some condition holds.
    pub consequences: Option<[Verdict; 2]>,
}

pub fn theorem_c_battery(
    g: &GacData,
    sign: PwSign,
    thr: &Thresholds,
) -> Result<TheoremCBattery, InvolutivityError> {
    let l = g.l_frame(sign);
    let l_inv = is_involutive(g, l, thr)?;
    if !l_inv.verdict.is_yes() {
        return Ok(TheoremCBattery {
            side: sign,
            skipped: Some(format!(
                "L{sign} is not Courant involutive (verdict {})",
                l_inv.verdict
            )),
            conditions: [Verdict::Undecided; 5],
            witnesses: Vec::new(),
            agreement: Verdict::Undecided,
            consequences: None,
        });
    }
    let r = reeb_section(g);
    let h = h_frame(g, sign, thr);
    let h_perp = h_perp_frame(g, sign, thr);
    let hr = h_plus_reeb_frame(g, &h);
    let with_r = |frame: &SubbundleFrame| cross_pairs(std::slice::from_ref(&r), &frame.sections);

    let c1 = is_involutive(g, &h, thr)?;
    let c2 = brackets_within(g, &with_r(&h), &h_perp, thr)?;
    let hr_inv = is_involutive(g, &hr, thr)?;
    let maximal = hr.certified() && hr.claimed_rank == g.model().dim();
    let c3_verdict = hr_inv
        .verdict
        .and(Verdict::from_bool(hr.is_isotropic() && maximal));
    let c4 = brackets_within(g, &with_r(&hr), &hr, thr)?;
    let c5 = brackets_within(g, &with_r(&h), &h, thr)?;
    let conditions = [c1.verdict, c2.verdict, c3_verdict, c4.verdict, c5.verdict];
    let agreement = if conditions.contains(&Verdict::Undecided) {
        Verdict::Undecided
    } else {
        Verdict::from_bool(conditions.iter().all(|&c| c == conditions[0]))
    };
    let consequences = if conditions.contains(&Verdict::Yes) {
        let i = brackets_within(g, &with_r(&h_perp), &h_perp, thr)?.verdict;
        let ii = is_involutive(g, &h_perp, thr)?.verdict;
        Some([i, ii])
    } else {
        None
    };
    Ok(TheoremCBattery {
        side: sign,
        skipped: None,
        conditions,
        witnesses: vec![
            c1.witness,
            c2.witness,
            hr_inv.witness,
            c4.witness,
            c5.witness,
        ],
        agreement,
        consequences,
    })
}

/// Pointwise rank table for one side.
#[derive(Debug, Clone, PartialEq)]
pub struct SideRanks {
    pub side: PwSign,
    pub reeb_in_l: bool,
    pub h_ranks: Vec<usize>,
    pub h_rank_expected: usize,
    pub h_perp_span_equal: bool,
    pub h_plus_reeb_rank_ok: bool,
    pub h_plus_reeb_isotropic: bool,
    pub transverse_rank_ok: bool,
}

impl SideRanks {
    pub fn passes(&self) -> bool {
        self.h_ranks.iter().all(|&r| r == self.h_rank_expected)
            && self.h_perp_span_equal
            && self.h_plus_reeb_rank_ok
            && self.h_plus_reeb_isotropic
            && self.transverse_rank_ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropCReport {
    pub n: usize,
    /// Ranks of `TR-perp`, `Im Phi`, `E(1,0)` at each sample.
    pub rank_table: Vec<[usize; 3]>,
    pub image_kernel_split: bool,
    pub reeb_perp_split: bool,
    pub sides: Vec<SideRanks>,
}

impl PropCReport {
    pub fn passes(&self) -> bool {
        let n = self.n;
        self.rank_table
            .iter()
            .all(|r| *r == [4 * n + 1, 4 * n, 2 * n])
            && self.image_kernel_split
            && self.reeb_perp_split
            && self.sides.iter().all(SideRanks::passes)
    }
}

fn eval_all(sections: &[GSection], samples: &SampleSet, k: usize) -> Vec<Vec<Complex64>> {
    sections
        .iter()
        .map(|s| samples.eval_section(s, k))
        .collect()
}

pub fn prop_c_battery(g: &GacData, thr: &Thresholds) -> PropCReport {
    let dim = g.model().dim();
    let n = g.half_rank();
    let samples = g.samples();
    let basis: Vec<GSection> = (0..2 * dim).map(|k| GSection::basis(dim, k)).collect();
    let image: Vec<GSection> = basis.iter().map(|u| g.phi().apply(u)).collect();
    let kernel_frame = &g.frames().kernel.sections;
    let reeb = &g.derived_pair().reeb;
    let eta_section = GSection::from_form(g.derived_pair().eta.clone());
    let mut rank_table = Vec::new();
    let mut image_kernel_split = true;
    let mut reeb_perp_split = true;
    for k in 0..samples.len() {
        let im_cols = eval_all(&image, samples, k);
        let im_rank = numeric_rank(&im_cols);
        let mut joint = im_cols.clone();
        joint.extend(eval_all(kernel_frame, samples, k));
        image_kernel_split &= numeric_rank(&joint) == 2 * dim && im_rank + 2 == 2 * dim;
        // TR-perp = TM + ann(R): kernel of the functional xi -> xi(R)
        let mut functional = vec![Complex64::new(0.0, 0.0); dim];
        functional.extend(reeb.0.iter().map(|c| samples.eval(c, k)));
        let perp: Vec<Vec<Complex64>> = numeric_nullspace(&[functional], 2 * dim)
            .iter()
            .map(|v| v.iter().cloned().collect())
            .collect();
        let perp_rank = numeric_rank(&perp);
        let mut with_eta = perp.clone();
        with_eta.push(samples.eval_section(&eta_section, k));
        reeb_perp_split &= numeric_rank(&with_eta) == 2 * dim;
        let e10_rank = numeric_rank(&eval_all(&g.frames().holomorphic.sections, samples, k));
        rank_table.push([perp_rank, im_rank, e10_rank]);
    }
    let sides = [PwSign::Plus, PwSign::Minus]
        .into_iter()
        .map(|sign| side_ranks(g, sign, thr))
        .collect();
    PropCReport {
        n,
        rank_table,
        image_kernel_split,
        reeb_perp_split,
        sides,
    }
}

fn side_ranks(g: &GacData, sign: PwSign, thr: &Thresholds) -> SideRanks {
    let dim = g.model().dim();
    let n = g.half_rank();
    let samples = g.samples();
    let l = g.l_frame(sign);
    let r = reeb_section(g);
    let reeb_in_l = membership(&r, l, samples, thr).is_yes_value();
    let h = h_frame(g, sign, thr);
    let h_rank_expected = if reeb_in_l { 2 * n + 1 } else { 2 * n };
    let mut span_l_r = l.sections.clone();
    span_l_r.push(r.clone());
    let hr = h_plus_reeb_frame(g, &h);
    let mut h_perp_span_equal = true;
    let mut h_plus_reeb_rank_ok = true;
    let mut transverse_rank_ok = true;
    for k in 0..samples.len() {
        let rows: Vec<Vec<Complex64>> = eval_all(&h.sections, samples, k)
            .into_iter()
            .map(|v| v[dim..].iter().chain(&v[..dim]).cloned().collect())
            .collect();
        let complement: Vec<Vec<Complex64>> = numeric_nullspace(&rows, 2 * dim)
            .iter()
            .map(|v| v.iter().cloned().collect())
            .collect();
        let target = eval_all(&span_l_r, samples, k);
        let rc = numeric_rank(&complement);
        let rt = numeric_rank(&target);
        let mut joint = complement.clone();
        joint.extend(target);
        h_perp_span_equal &= rc == rt && numeric_rank(&joint) == rc;
        let hr_rank = numeric_rank(&eval_all(&hr.sections, samples, k));
        h_plus_reeb_rank_ok &= hr_rank == 2 * n + 1;
        let r_rank = numeric_rank(&[samples.eval_section(&r, k)]);
        transverse_rank_ok &= hr_rank - r_rank == 2 * n;
    }
    SideRanks {
        side: sign,
        reeb_in_l,
        h_ranks: pointwise_ranks(&h.sections, samples),
        h_rank_expected,
        h_perp_span_equal,
        h_plus_reeb_rank_ok,
        h_plus_reeb_isotropic: hr.is_isotropic(),
        transverse_rank_ok,
    }
}

/// Pointwise `dim(K cap conj K)` where `K` is the reduced tangent projection of `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaProfile {
    pub side: PwSign,
    /// Spanning vectors of `K` as symbolic vector fields.
    pub k_frame: Vec<crate::frame::VField>,
    pub delta_dims: Vec<usize>,
    pub rho: Vec<f64>,
    pub constant: bool,
}

impl DeltaProfile {
    pub fn rho_value(&self) -> Option<f64> {
        self.constant
            .then(|| self.rho.first().copied().unwrap_or(0.0))
    }
}

/// `K = { X - eta(X) R : X = pr_TM h, h in H }`.
pub fn k_frame(g: &GacData, h: &SubbundleFrame) -> Vec<crate::frame::VField> {
    let d = g.derived_pair();
    h.sections
        .iter()
        .map(|s| s.vector.sub(&d.reeb.scale(&d.eta.pair(&s.vector))))
        .collect()
}

/// Orthonormal basis of `K cap conj K` at sample `k`.
pub fn delta_basis(
    k_frame: &[crate::frame::VField],
    samples: &SampleSet,
    k: usize,
) -> Vec<Vec<Complex64>> {
    let kv: Vec<Vec<Complex64>> = k_frame
        .iter()
        .map(|v| v.0.iter().map(|c| samples.eval(c, k)).collect())
        .collect();
    let dim = kv.first().map_or(0, Vec::len);
    let kc: Vec<Vec<Complex64>> = kv
        .iter()
        .map(|v| v.iter().map(|z| z.conj()).collect())
        .collect();
    // (a, b) with K a - conj(K) b = 0
    let m = kv.len();
    let rows: Vec<Vec<Complex64>> = (0..dim)
        .map(|r| {
            kv.iter()
                .map(|v| v[r])
                .chain(kc.iter().map(|v| -v[r]))
                .collect()
        })
        .collect();
    let null = numeric_nullspace(&rows, 2 * m);
    let vecs: Vec<Vec<Complex64>> = null
        .iter()
        .map(|ab| {
            (0..dim)
                .map(|r| (0..m).map(|j| kv[j][r] * ab[j]).sum())
                .collect()
        })
        .collect();
    crate::linalg::column_space(&vecs, dim)
        .into_iter()
        .map(|v| v.iter().cloned().collect())
        .collect()
}

pub fn delta_profile(g: &GacData, sign: PwSign, thr: &Thresholds) -> DeltaProfile {
    let h = h_frame(g, sign, thr);
    let kf = k_frame(g, &h);
    let samples = g.samples();
    let delta_dims: Vec<usize> = (0..samples.len())
        .map(|k| delta_basis(&kf, samples, k).len())
        .collect();
    let rho: Vec<f64> = delta_dims.iter().map(|&d| d as f64 / 2.0).collect();
    let constant = delta_dims.windows(2).all(|w| w[0] == w[1]);
    DeltaProfile {
        side: sign,
        k_frame: kf,
        delta_dims,
        rho,
        constant,
    }
}

/// Pairing of two sections, exposed for report residuals.
pub fn pairing_value(s: &GSection, t: &GSection) -> Scalar {
    pairing(s, t).expect("sections on the same model")
}

/// Random unitriangular recombination `s_i + sum_{j > i} a_ij s_j` with affine coefficients.
pub fn recombine(g: &GacData, frame: &SubbundleFrame, rng: &mut impl Rng) -> SubbundleFrame {
    let coords: Vec<Scalar> = g
        .model()
        .coordinates()
        .iter()
        .map(|c| Scalar::var(&c.name))
        .collect();
    let mut coefficient = || {
        let mut a = Scalar::real(f64::from(rng.gen_range(-2i8..=2)));
        if !coords.is_empty() && rng.gen_bool(0.5) {
            let v = &coords[rng.gen_range(0..coords.len())];
            a += v * f64::from(rng.gen_range(-2i8..=2));
        }
        a
    };
    let s = &frame.sections;
    let sections: Vec<GSection> = (0..s.len())
        .map(|i| {
            s[i + 1..]
                .iter()
                .fold(s[i].clone(), |acc, t| acc.add(&t.scale(&coefficient())))
        })
        .collect();
    SubbundleFrame::new(
        &frame.label,
        sections,
        frame.claimed_rank,
        g.samples(),
        frame.symbolic,
    )
}

/// Involutivity verdicts of a frame and of a seeded random recombination of it.
pub fn recombination_verdicts(
    g: &GacData,
    frame: &SubbundleFrame,
    seed: u64,
    thr: &Thresholds,
) -> Result<(Verdict, Verdict), InvolutivityError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mixed = recombine(g, frame, &mut rng);
    Ok((
        is_involutive(g, frame, thr)?.verdict,
        is_involutive(g, &mixed, thr)?.verdict,
    ))
}
