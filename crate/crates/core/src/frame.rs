//! Exterior calculus on parallelizable models given by a global frame.

use crate::scalar::{Scalar, Var};
use std::fmt;
use thiserror::Error;

/// Highest form degree that is stored.
pub const MAX_DEGREE: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("form degree {0} exceeds the storage ceiling of 3")]
    DegreeOverflow(usize),
    #[error("interior product needs a form of degree at least 1")]
    DegreeZero,
    #[error("operands live on models of dimension {0} and {1}")]
    ModelMismatch(usize, usize),
    #[error("frame index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coordinate {
    pub name: Var,
    pub periodic: bool,
}

/// How a frame element acts on coefficient functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameAction {
    /// The partial derivative along coordinate `.0`.
    Partial(usize),
    /// A left-invariant frame element; scalars of a Lie block are constants.
    Lie,
}

#[derive(Debug, Clone)]
pub struct FrameModel {
    pub name: String,
    frame_names: Vec<String>,
    coframe_names: Vec<String>,
    coordinates: Vec<Coordinate>,
    actions: Vec<FrameAction>,
    /// `structure[i][j][k]`: `[e_i, e_j] = sum_k c e_k`.
    structure: Vec<Vec<Vec<Scalar>>>,
}

impl FrameModel {
    /// Coordinate frame `d/dx_i` with coframe `dx_i`.
    pub fn coordinate(name: &str, coords: &[(&str, bool)]) -> Self {
        let n = coords.len();
        FrameModel {
            name: name.to_string(),
            frame_names: coords.iter().map(|(c, _)| format!("d/d{c}")).collect(),
            coframe_names: coords.iter().map(|(c, _)| format!("d{c}")).collect(),
            coordinates: coords
                .iter()
                .map(|(c, p)| Coordinate {
                    name: Var::from(*c),
                    periodic: *p,
                })
                .collect(),
            actions: (0..n).map(FrameAction::Partial).collect(),
            structure: vec![vec![vec![Scalar::zero(); n]; n]; n],
        }
    }

    /// Abstract Lie frame with all brackets zero; fill in with [`set_bracket`](Self::set_bracket).
    pub fn lie(name: &str, frame: &[&str], coframe: &[&str]) -> Self {
        assert_eq!(frame.len(), coframe.len(), "frame and coframe sizes differ");
        let n = frame.len();
        FrameModel {
            name: name.to_string(),
            frame_names: frame.iter().map(|s| s.to_string()).collect(),
            coframe_names: coframe.iter().map(|s| s.to_string()).collect(),
            coordinates: Vec::new(),
            actions: vec![FrameAction::Lie; n],
            structure: vec![vec![vec![Scalar::zero(); n]; n]; n],
        }
    }

    /// Blockwise product: cross brackets vanish, coordinates concatenate.
    pub fn product(&self, other: &FrameModel) -> FrameModel {
        let n = self.dim() + other.dim();
        let shift = self.dim();
        let cshift = self.coordinates.len();
        let mut structure = vec![vec![vec![Scalar::zero(); n]; n]; n];
        for (i, row) in self.structure.iter().enumerate() {
            for (j, col) in row.iter().enumerate() {
                for (k, c) in col.iter().enumerate() {
                    structure[i][j][k] = c.clone();
                }
            }
        }
        for (i, row) in other.structure.iter().enumerate() {
            for (j, col) in row.iter().enumerate() {
                for (k, c) in col.iter().enumerate() {
                    structure[i + shift][j + shift][k + shift] = c.clone();
                }
            }
        }
        FrameModel {
            name: format!("{}x{}", self.name, other.name),
            frame_names: self
                .frame_names
                .iter()
                .chain(&other.frame_names)
                .cloned()
                .collect(),
            coframe_names: self
                .coframe_names
                .iter()
                .chain(&other.coframe_names)
                .cloned()
                .collect(),
            coordinates: self
                .coordinates
                .iter()
                .chain(&other.coordinates)
                .cloned()
                .collect(),
            actions: self
                .actions
                .iter()
                .copied()
                .chain(other.actions.iter().map(|a| match a {
                    FrameAction::Partial(c) => FrameAction::Partial(c + cshift),
                    FrameAction::Lie => FrameAction::Lie,
                }))
                .collect(),
            structure,
        }
    }

    /// Sets `[e_i, e_j] = value` and `[e_j, e_i] = -value`.
    pub fn set_bracket(&mut self, i: usize, j: usize, value: &VField) -> Result<(), FrameError> {
        let n = self.dim();
        for idx in [i, j] {
            if idx >= n {
                return Err(FrameError::IndexOutOfRange { index: idx, dim: n });
            }
        }
        if value.dim() != n {
            return Err(FrameError::ModelMismatch(n, value.dim()));
        }
        for k in 0..n {
            self.structure[i][j][k] = value.0[k].clone();
            self.structure[j][i][k] = -&value.0[k];
        }
        Ok(())
    }

    /// Overwrites one structure constant without enforcing antisymmetry.
    pub fn set_structure_constant(&mut self, i: usize, j: usize, k: usize, value: Scalar) {
        self.structure[i][j][k] = value;
    }

    pub fn dim(&self) -> usize {
        self.frame_names.len()
    }

    pub fn frame_names(&self) -> &[String] {
        &self.frame_names
    }

    pub fn coframe_names(&self) -> &[String] {
        &self.coframe_names
    }

    pub fn coordinates(&self) -> &[Coordinate] {
        &self.coordinates
    }

    pub fn actions(&self) -> &[FrameAction] {
        &self.actions
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.structure[i][j][k]
    }

    /// `[e_i, e_j]` as a vector field.
    pub fn frame_bracket(&self, i: usize, j: usize) -> VField {
        VField(self.structure[i][j].clone())
    }

    pub fn coordinate_index(&self, name: &str) -> Option<usize> {
        self.coordinates.iter().position(|c| &*c.name == name)
    }

    /// Frame index whose element is `d/d name`.
    pub fn frame_of_coordinate(&self, name: &str) -> Option<usize> {
        let c = self.coordinate_index(name)?;
        self.actions
            .iter()
            .position(|a| *a == FrameAction::Partial(c))
    }

    /// Partial derivative checked against the model's coordinates.
    pub fn partial(&self, f: &Scalar, coordinate: &str) -> Result<Scalar, FrameError> {
        if self.coordinate_index(coordinate).is_none() {
            return Err(FrameError::UnknownCoordinate(coordinate.to_string()));
        }
        Ok(f.differentiate(coordinate))
    }

    /// `e_a(f)`.
    pub fn apply_frame(&self, a: usize, f: &Scalar) -> Scalar {
        match self.actions[a] {
            FrameAction::Partial(c) => f.differentiate(&self.coordinates[c].name),
            FrameAction::Lie => Scalar::zero(),
        }
    }

    /// `X(f)`.
    pub fn apply(&self, x: &VField, f: &Scalar) -> Scalar {
        x.0.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| c * &self.apply_frame(a, f))
            .sum()
    }

    /// `d f` for a function.
    pub fn differential(&self, f: &Scalar) -> PForm {
        PForm {
            degree: 1,
            dim: self.dim(),
            comps: (0..self.dim()).map(|a| self.apply_frame(a, f)).collect(),
        }
    }

    pub fn lie_bracket(&self, x: &VField, y: &VField) -> Result<VField, FrameError> {
        self.check_dim(x.dim())?;
        self.check_dim(y.dim())?;
        let n = self.dim();
        let mut out: Vec<Scalar> = (0..n)
            .map(|k| self.apply(x, &y.0[k]) - self.apply(y, &x.0[k]))
            .collect();
        for i in 0..n {
            if x.0[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y.0[j].is_zero() || i == j {
                    continue;
                }
                let xy = &x.0[i] * &y.0[j];
                for (k, slot) in out.iter_mut().enumerate() {
                    let c = &self.structure[i][j][k];
                    if !c.is_zero() {
                        *slot += &xy * c;
                    }
                }
            }
        }
        Ok(VField(out))
    }

    /// Exterior derivative of a form of degree at most 2.
    pub fn exterior_derivative(&self, a: &PForm) -> Result<PForm, FrameError> {
        if a.degree >= MAX_DEGREE {
            return Err(FrameError::DegreeOverflow(a.degree + 1));
        }
        self.check_dim(a.dim)?;
        Ok(self.d_unbounded(a))
    }

    /// True when `d a = 0`, including for 3-forms whose derivative is not stored.
    pub fn is_closed(&self, a: &PForm) -> bool {
        self.d_unbounded(a).is_zero()
    }

    fn d_unbounded(&self, a: &PForm) -> PForm {
        let n = self.dim();
        let p = a.degree;
        if p >= n {
            return PForm::zero(n, p + 1);
        }
        let tuples = combinations(n, p + 1);
        let mut comps = Vec::with_capacity(tuples.len());
        for idx in &tuples {
            let mut acc = Scalar::zero();
            for (j, &ij) in idx.iter().enumerate() {
                let rest: Vec<usize> = remove_at(idx, &[j]);
                let v = a.eval_indices(&rest);
                if v.is_zero() {
                    continue;
                }
                let term = self.apply_frame(ij, &v);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= &term;
                }
            }
            for j in 0..idx.len() {
                for l in (j + 1)..idx.len() {
                    let rest = remove_at(idx, &[j, l]);
                    let sign = if (j + l) % 2 == 0 { 1.0 } else { -1.0 };
                    for k in 0..n {
                        let c = &self.structure[idx[j]][idx[l]][k];
                        if c.is_zero() {
                            continue;
                        }
                        let mut args = Vec::with_capacity(p);
                        args.push(k);
                        args.extend_from_slice(&rest);
                        let v = a.eval_indices(&args);
                        if !v.is_zero() {
                            acc += &(c * &v) * sign;
                        }
                    }
                }
            }
            comps.push(acc);
        }
        PForm {
            degree: p + 1,
            dim: n,
            comps,
        }
    }

    /// `i_X a`, contracting the first slot.
    pub fn interior_product(&self, x: &VField, a: &PForm) -> Result<PForm, FrameError> {
        if a.degree == 0 {
            return Err(FrameError::DegreeZero);
        }
        self.check_dim(x.dim())?;
        self.check_dim(a.dim)?;
        let n = self.dim();
        let tuples = combinations(n, a.degree - 1);
        let comps = tuples
            .iter()
            .map(|rest| {
                x.0.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| {
                        let mut args = vec![i];
                        args.extend_from_slice(rest);
                        c * &a.eval_indices(&args)
                    })
                    .sum()
            })
            .collect();
        Ok(PForm {
            degree: a.degree - 1,
            dim: n,
            comps,
        })
    }

    /// Cartan formula `L_X = i_X d + d i_X`.
    pub fn lie_derivative(&self, x: &VField, a: &PForm) -> Result<PForm, FrameError> {
        self.check_dim(x.dim())?;
        if a.degree == 0 {
            let f = a.comps[0].clone();
            return Ok(PForm::function(self.dim(), self.apply(x, &f)));
        }
        let da = self.d_unbounded(a);
        let first = if da.degree <= a.degree + 1 && da.degree > 0 {
            self.interior_product(x, &da)?
        } else {
            PForm::zero(self.dim(), a.degree)
        };
        let ixa = self.interior_product(x, a)?;
        let second = self.d_unbounded(&ixa);
        Ok(first.add(&second))
    }

    pub fn wedge(&self, a: &PForm, b: &PForm) -> Result<PForm, FrameError> {
        self.check_dim(a.dim)?;
        self.check_dim(b.dim)?;
        let total = a.degree + b.degree;
        if total > MAX_DEGREE {
            return Err(FrameError::DegreeOverflow(total));
        }
        Ok(wedge_unbounded(a, b))
    }

    /// Antisymmetry and Jacobi diagnostics for the structure constants.
    pub fn validate(&self) -> Vec<FrameDiagnostic> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    let s = &self.structure[i][j][k] + &self.structure[j][i][k];
                    let s = if i == j {
                        self.structure[i][i][k].clone()
                    } else {
                        s
                    };
                    if !s.is_zero() {
                        out.push(FrameDiagnostic::Antisymmetry {
                            i,
                            j,
                            k,
                            residual: s,
                        });
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let e = |a: usize| VField::basis(n, a);
                    let br = |x: &VField, y: &VField| self.lie_bracket(x, y).expect("same model");
                    let jac = br(&e(i), &br(&e(j), &e(k)))
                        .add(&br(&e(j), &br(&e(k), &e(i))))
                        .add(&br(&e(k), &br(&e(i), &e(j))));
                    if !jac.is_zero() {
                        out.push(FrameDiagnostic::Jacobi {
                            i,
                            j,
                            k,
                            residual: jac,
                        });
                    }
                }
            }
        }
        out
    }

    fn check_dim(&self, d: usize) -> Result<(), FrameError> {
        if d == self.dim() {
            Ok(())
        } else {
            Err(FrameError::ModelMismatch(self.dim(), d))
        }
    }

    /// Canonical rendering of a vector field, e.g. `d/dx - y*d/dz`.
    pub fn render_vector(&self, x: &VField) -> String {
        render_combination(
            x.0.iter()
                .zip(&self.frame_names)
                .map(|(c, n)| (c, n.clone())),
        )
    }

    /// Canonical rendering of a form, e.g. `dx^dy`.
    pub fn render_form(&self, a: &PForm) -> String {
        if a.degree == 0 {
            return a.comps[0].to_string();
        }
        let tuples = combinations(self.dim(), a.degree);
        render_combination(a.comps.iter().zip(tuples).map(|(c, idx)| {
            let name = idx
                .iter()
                .map(|&i| self.coframe_names[i].as_str())
                .collect::<Vec<_>>()
                .join("^");
            (c, name)
        }))
    }
}

/// Renders `sum c_i * name_i`, skipping zero coefficients.
pub fn render_combination<'a, I>(items: I) -> String
where
    I: Iterator<Item = (&'a Scalar, String)>,
{
    let mut out = String::new();
    for (c, name) in items {
        if c.is_zero() {
            continue;
        }
        let rendered = c.to_string();
        let (negative, body) = if c.renders_as_product() {
            match rendered.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, rendered),
            }
        } else {
            (false, format!("({rendered})"))
        };
        let piece = if body == "1" {
            name
        } else {
            format!("{body}*{name}")
        };
        match (out.is_empty(), negative) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        out.push_str(&piece);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[derive(Debug, Clone)]
pub enum FrameDiagnostic {
    Antisymmetry {
        i: usize,
        j: usize,
        k: usize,
        residual: Scalar,
    },
    Jacobi {
        i: usize,
        j: usize,
        k: usize,
        residual: VField,
    },
}

impl fmt::Display for FrameDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameDiagnostic::Antisymmetry { i, j, k, residual } => write!(
                f,
                "antisymmetry violated: c[{}][{}][{}] + c[{}][{}][{}] = {residual}",
                i + 1,
                j + 1,
                k + 1,
                j + 1,
                i + 1,
                k + 1
            ),
            FrameDiagnostic::Jacobi { i, j, k, .. } => {
                write!(
                    f,
                    "Jacobi identity violated on frame triple ({}, {}, {})",
                    i + 1,
                    j + 1,
                    k + 1
                )
            }
        }
    }
}

/// Vector field in frame components.
#[derive(Debug, Clone, PartialEq)]
pub struct VField(pub Vec<Scalar>);

impl VField {
    pub fn zero(dim: usize) -> Self {
        VField(vec![Scalar::zero(); dim])
    }

    pub fn basis(dim: usize, a: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[a] = Scalar::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &VField) -> VField {
        VField(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &VField) -> VField {
        VField(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, f: &Scalar) -> VField {
        VField(self.0.iter().map(|a| a * f).collect())
    }

    pub fn conjugate(&self) -> VField {
        VField(self.0.iter().map(Scalar::conjugate).collect())
    }
}

/// Differential form of degree `degree`, components over increasing index tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct PForm {
    degree: usize,
    dim: usize,
    comps: Vec<Scalar>,
}

impl PForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        let len = if degree > dim {
            0
        } else {
            binomial(dim, degree)
        };
        PForm {
            degree,
            dim,
            comps: vec![Scalar::zero(); len],
        }
    }

    pub fn function(dim: usize, f: Scalar) -> Self {
        PForm {
            degree: 0,
            dim,
            comps: vec![f],
        }
    }

    /// 1-form from coframe components.
    pub fn one_form(comps: Vec<Scalar>) -> Self {
        PForm {
            degree: 1,
            dim: comps.len(),
            comps,
        }
    }

    /// The coframe element `e^a`.
    pub fn coframe(dim: usize, a: usize) -> Self {
        let mut f = Self::zero(dim, 1);
        f.comps[a] = Scalar::one();
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Scalar] {
        &self.comps
    }

    /// Component on an increasing index tuple.
    pub fn component(&self, idx: &[usize]) -> &Scalar {
        &self.comps[combination_rank(self.dim, idx)]
    }

    pub fn set_component(&mut self, idx: &[usize], value: Scalar) {
        let r = combination_rank(self.dim, idx);
        self.comps[r] = value;
    }

    /// `a(e_{i1}, ..., e_{ip})` for arbitrary (possibly unsorted or repeated) indices.
    pub fn eval_indices(&self, idx: &[usize]) -> Scalar {
        debug_assert_eq!(idx.len(), self.degree);
        match sort_with_sign(idx) {
            None => Scalar::zero(),
            Some((sorted, negative)) => {
                let c = &self.comps[combination_rank(self.dim, &sorted)];
                if negative {
                    -c
                } else {
                    c.clone()
                }
            }
        }
    }

    /// Evaluates a 1-form on a vector field.
    pub fn pair(&self, x: &VField) -> Scalar {
        debug_assert_eq!(self.degree, 1);
        self.comps
            .iter()
            .zip(&x.0)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Evaluates a 2-form on two vector fields.
    pub fn pair2(&self, x: &VField, y: &VField) -> Scalar {
        debug_assert_eq!(self.degree, 2);
        let mut acc = Scalar::zero();
        for i in 0..self.dim {
            if x.0[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if i == j || y.0[j].is_zero() {
                    continue;
                }
                let c = self.eval_indices(&[i, j]);
                if !c.is_zero() {
                    acc += &(&x.0[i] * &y.0[j]) * &c;
                }
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &PForm) -> PForm {
        assert_eq!(
            self.degree, other.degree,
            "adding forms of different degree"
        );
        PForm {
            degree: self.degree,
            dim: self.dim,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &PForm) -> PForm {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PForm {
        PForm {
            degree: self.degree,
            dim: self.dim,
            comps: self.comps.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, f: &Scalar) -> PForm {
        PForm {
            degree: self.degree,
            dim: self.dim,
            comps: self.comps.iter().map(|a| a * f).collect(),
        }
    }

    pub fn conjugate(&self) -> PForm {
        PForm {
            degree: self.degree,
            dim: self.dim,
            comps: self.comps.iter().map(Scalar::conjugate).collect(),
        }
    }
}

/// Wedge product without the degree ceiling.
pub fn wedge_unbounded(a: &PForm, b: &PForm) -> PForm {
    let n = a.dim;
    let (p, q) = (a.degree, b.degree);
    if p + q > n {
        return PForm::zero(n, p + q);
    }
    let comps = combinations(n, p + q)
        .iter()
        .map(|idx| {
            let mut acc = Scalar::zero();
            for sub in combinations(p + q, p) {
                let left: Vec<usize> = sub.iter().map(|&s| idx[s]).collect();
                let right_pos: Vec<usize> = (0..p + q).filter(|s| !sub.contains(s)).collect();
                let right: Vec<usize> = right_pos.iter().map(|&s| idx[s]).collect();
                let av = a.component_or_fn(&left);
                if av.is_zero() {
                    continue;
                }
                let bv = b.component_or_fn(&right);
                if bv.is_zero() {
                    continue;
                }
                let perm: Vec<usize> = sub.iter().chain(&right_pos).copied().collect();
                let term = &av * &bv;
                if permutation_is_odd(&perm) {
                    acc -= &term;
                } else {
                    acc += term;
                }
            }
            acc
        })
        .collect();
    PForm {
        degree: p + q,
        dim: n,
        comps,
    }
}

impl PForm {
    fn component_or_fn(&self, idx: &[usize]) -> Scalar {
        if self.degree == 0 {
            self.comps[0].clone()
        } else {
            self.component(idx).clone()
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All increasing `k`-tuples from `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Position of an increasing tuple in [`combinations`] order.
pub fn combination_rank(n: usize, idx: &[usize]) -> usize {
    let k = idx.len();
    let mut rank = 0;
    let mut prev = 0;
    for (pos, &v) in idx.iter().enumerate() {
        for skipped in prev..v {
            rank += binomial(n - skipped - 1, k - pos - 1);
        }
        prev = v + 1;
    }
    rank
}

fn remove_at(idx: &[usize], positions: &[usize]) -> Vec<usize> {
    idx.iter()
        .enumerate()
        .filter(|(p, _)| !positions.contains(p))
        .map(|(_, v)| *v)
        .collect()
}

fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut negative = false;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            match v[j].cmp(&v[j + 1]) {
                std::cmp::Ordering::Greater => {
                    v.swap(j, j + 1);
                    negative = !negative;
                }
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, negative))
}

fn permutation_is_odd(perm: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}
