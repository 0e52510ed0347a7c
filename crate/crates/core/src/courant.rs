//! Sections of the generalized tangent bundle, the pairing, and the twisted Courant bracket.

use crate::frame::{render_combination, FrameError, FrameModel, PForm, VField};
use crate::scalar::Scalar;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CourantError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("twist 3-form is not closed")]
    NonClosedTwist,
    #[error("twist must be a 3-form, got degree {0}")]
    TwistDegree(usize),
    #[error("B-field must be a 2-form, got degree {0}")]
    BFieldDegree(usize),
    #[error("bivector is not antisymmetric")]
    NotAntisymmetric,
}

/// `X + xi`, with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct GSection {
    pub vector: VField,
    pub form: PForm,
}

impl GSection {
    pub fn new(vector: VField, form: PForm) -> Self {
        assert_eq!(
            vector.dim(),
            form.dim(),
            "vector and form parts on different models"
        );
        assert_eq!(form.degree(), 1, "form part must be a 1-form");
        GSection { vector, form }
    }

    pub fn zero(dim: usize) -> Self {
        GSection {
            vector: VField::zero(dim),
            form: PForm::zero(dim, 1),
        }
    }

    pub fn from_vector(vector: VField) -> Self {
        let n = vector.dim();
        GSection {
            vector,
            form: PForm::zero(n, 1),
        }
    }

    pub fn from_form(form: PForm) -> Self {
        GSection {
            vector: VField::zero(form.dim()),
            form,
        }
    }

    /// Basis element `k` of `(e_1..e_n, e^1..e^n)`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut comps = vec![Scalar::zero(); 2 * dim];
        comps[k] = Scalar::one();
        Self::from_components(&comps)
    }

    pub fn from_components(comps: &[Scalar]) -> Self {
        let n = comps.len() / 2;
        GSection {
            vector: VField(comps[..n].to_vec()),
            form: PForm::one_form(comps[n..].to_vec()),
        }
    }

    pub fn components(&self) -> Vec<Scalar> {
        self.vector
            .0
            .iter()
            .chain(self.form.components())
            .cloned()
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.vector.is_zero() && self.form.is_zero()
    }

    pub fn add(&self, other: &GSection) -> GSection {
        GSection {
            vector: self.vector.add(&other.vector),
            form: self.form.add(&other.form),
        }
    }

    pub fn sub(&self, other: &GSection) -> GSection {
        GSection {
            vector: self.vector.sub(&other.vector),
            form: self.form.sub(&other.form),
        }
    }

    pub fn neg(&self) -> GSection {
        self.scale(&Scalar::real(-1.0))
    }

    pub fn scale(&self, f: &Scalar) -> GSection {
        GSection {
            vector: self.vector.scale(f),
            form: self.form.scale(f),
        }
    }

    pub fn conjugate(&self) -> GSection {
        GSection {
            vector: self.vector.conjugate(),
            form: self.form.conjugate(),
        }
    }
}

/// Validated closed twist 3-form.
#[derive(Debug, Clone, PartialEq)]
pub struct Twist(PForm);

impl Twist {
    pub fn new(model: &FrameModel, h: PForm) -> Result<Self, CourantError> {
        if h.degree() != 3 {
            return Err(CourantError::TwistDegree(h.degree()));
        }
        if h.dim() != model.dim() {
            return Err(FrameError::ModelMismatch(model.dim(), h.dim()).into());
        }
        if !model.is_closed(&h) {
            return Err(CourantError::NonClosedTwist);
        }
        Ok(Twist(h))
    }

    /// `-dB`, closed by construction.
    pub fn from_b_field(model: &FrameModel, b: &PForm) -> Result<Self, CourantError> {
        if b.degree() != 2 {
            return Err(CourantError::BFieldDegree(b.degree()));
        }
        Ok(Twist(model.exterior_derivative(b)?.neg()))
    }

    pub fn form(&self) -> &PForm {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// `<X + xi, Y + beta> = (xi(Y) + beta(X)) / 2`, bilinear over complex scalars.
pub fn pairing(s: &GSection, t: &GSection) -> Result<Scalar, CourantError> {
    if s.dim() != t.dim() {
        return Err(FrameError::ModelMismatch(s.dim(), t.dim()).into());
    }
    Ok((s.form.pair(&t.vector) + t.form.pair(&s.vector)).div_real(2.0))
}

/// Skew Courant bracket twisted by `h`; the twist enters as `i_X i_Y H`.
pub fn courant_bracket(
    model: &FrameModel,
    s: &GSection,
    t: &GSection,
    h: Option<&Twist>,
) -> Result<GSection, CourantError> {
    let (x, xi) = (&s.vector, &s.form);
    let (y, beta) = (&t.vector, &t.form);
    let vector = model.lie_bracket(x, y)?;
    let mut form = model
        .lie_derivative(x, beta)?
        .sub(&model.lie_derivative(y, xi)?);
    let contraction = &beta.pair(x) - &xi.pair(y);
    if !contraction.is_zero() {
        form = form.sub(&model.differential(&contraction.div_real(2.0)));
    }
    if let Some(h) = h.filter(|h| !h.is_zero()) {
        let iyh = model.interior_product(y, h.form())?;
        form = form.add(&model.interior_product(x, &iyh)?);
    }
    Ok(GSection { vector, form })
}

/// `e^B (X + xi) = X + xi + i_X B`.
pub fn b_transform(model: &FrameModel, b: &PForm, s: &GSection) -> Result<GSection, CourantError> {
    if b.degree() != 2 {
        return Err(CourantError::BFieldDegree(b.degree()));
    }
    let shift = model.interior_product(&s.vector, b)?;
    Ok(GSection {
        vector: s.vector.clone(),
        form: s.form.add(&shift),
    })
}

/// Antisymmetric bivector `sum_{i<j} P^{ij} e_i ^ e_j`, stored as a full matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Bivector(Vec<Vec<Scalar>>);

impl Bivector {
    pub fn zero(dim: usize) -> Self {
        Bivector(vec![vec![Scalar::zero(); dim]; dim])
    }

    pub fn from_matrix(m: Vec<Vec<Scalar>>) -> Result<Self, CourantError> {
        let n = m.len();
        for i in 0..n {
            for j in 0..n {
                if !(&m[i][j] + &m[j][i]).is_zero() {
                    return Err(CourantError::NotAntisymmetric);
                }
            }
        }
        Ok(Bivector(m))
    }

    /// `X ^ Y` for two vector fields.
    pub fn wedge(x: &VField, y: &VField) -> Self {
        let n = x.dim();
        let mut m = vec![vec![Scalar::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m[i][j] = &(&x.0[i] * &y.0[j]) - &(&x.0[j] * &y.0[i]);
                }
            }
        }
        Bivector(m)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        &self.0[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        self.0[j][i] = -&value;
        self.0[i][j] = value;
    }

    pub fn add(&self, other: &Bivector) -> Bivector {
        Bivector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        )
    }

    pub fn scale(&self, f: &Scalar) -> Bivector {
        Bivector(
            self.0
                .iter()
                .map(|row| row.iter().map(|x| x * f).collect())
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(Scalar::is_zero)
    }

    /// Contraction `(X ^ Y)(xi) = xi(Y) X - xi(X) Y`.
    pub fn contract(&self, xi: &PForm) -> VField {
        let n = self.dim();
        VField(
            (0..n)
                .map(|i| {
                    (0..n)
                        .filter(|&j| !self.0[i][j].is_zero())
                        .map(|j| &self.0[i][j] * &xi.components()[j])
                        .sum()
                })
                .collect(),
        )
    }
}

/// `X + xi -> X + P(xi) + xi`.
pub fn beta_transform(p: &Bivector, s: &GSection) -> GSection {
    GSection {
        vector: s.vector.add(&p.contract(&s.form)),
        form: s.form.clone(),
    }
}

/// Endomorphism of `TM + T*M` in the basis `(e_1..e_n, e^1..e^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GEndo {
    matrix: Vec<Vec<Scalar>>,
}

/// Block view `[[phi, pi], [theta, psi]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EndoBlocks {
    pub phi: Vec<Vec<Scalar>>,
    pub pi: Vec<Vec<Scalar>>,
    pub theta: Vec<Vec<Scalar>>,
    pub psi: Vec<Vec<Scalar>>,
}

impl GEndo {
    pub fn zero(dim: usize) -> Self {
        GEndo {
            matrix: vec![vec![Scalar::zero(); 2 * dim]; 2 * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..2 * dim {
            m.matrix[i][i] = Scalar::one();
        }
        m
    }

    /// Square matrix of size `2n`.
    pub fn from_matrix(matrix: Vec<Vec<Scalar>>) -> Self {
        let size = matrix.len();
        assert!(
            size.is_multiple_of(2) && matrix.iter().all(|r| r.len() == size),
            "GEndo needs a 2n x 2n matrix"
        );
        GEndo { matrix }
    }

    /// Endomorphism whose columns are the images of the basis sections.
    pub fn from_columns(columns: &[GSection]) -> Self {
        let size = columns.len();
        let cols: Vec<Vec<Scalar>> = columns.iter().map(GSection::components).collect();
        GEndo::from_matrix(
            (0..size)
                .map(|r| (0..size).map(|c| cols[c][r].clone()).collect())
                .collect(),
        )
    }

    pub fn from_blocks(blocks: &EndoBlocks) -> Self {
        let n = blocks.phi.len();
        let mut m = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                m.matrix[i][j] = blocks.phi[i][j].clone();
                m.matrix[i][j + n] = blocks.pi[i][j].clone();
                m.matrix[i + n][j] = blocks.theta[i][j].clone();
                m.matrix[i + n][j + n] = blocks.psi[i][j].clone();
            }
        }
        m
    }

    /// `e^B` as a matrix.
    pub fn b_field(b: &PForm) -> Self {
        let n = b.dim();
        let mut m = Self::identity(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m.matrix[j + n][i] = b.eval_indices(&[i, j]);
                }
            }
        }
        m
    }

    /// `e^P` for a bivector.
    pub fn beta_field(p: &Bivector) -> Self {
        let n = p.dim();
        let mut m = Self::identity(n);
        for i in 0..n {
            for j in 0..n {
                m.matrix[i][j + n] = p.entry(i, j).clone();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.matrix.len() / 2
    }

    pub fn matrix(&self) -> &[Vec<Scalar>] {
        &self.matrix
    }

    pub fn entry(&self, r: usize, c: usize) -> &Scalar {
        &self.matrix[r][c]
    }

    pub fn blocks(&self) -> EndoBlocks {
        let n = self.dim();
        let block = |r0: usize, c0: usize| -> Vec<Vec<Scalar>> {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| self.matrix[r0 + i][c0 + j].clone())
                        .collect()
                })
                .collect()
        };
        EndoBlocks {
            phi: block(0, 0),
            pi: block(0, n),
            theta: block(n, 0),
            psi: block(n, n),
        }
    }

    pub fn apply(&self, s: &GSection) -> GSection {
        let v = s.components();
        let out: Vec<Scalar> = self
            .matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        GSection::from_components(&out)
    }

    /// `self * other`.
    pub fn compose(&self, other: &GEndo) -> GEndo {
        let size = self.matrix.len();
        let mut out = vec![vec![Scalar::zero(); size]; size];
        for (i, row) in out.iter_mut().enumerate() {
            for k in 0..size {
                let a = &self.matrix[i][k];
                if a.is_zero() {
                    continue;
                }
                for (j, slot) in row.iter_mut().enumerate() {
                    let b = &other.matrix[k][j];
                    if !b.is_zero() {
                        *slot += a * b;
                    }
                }
            }
        }
        GEndo { matrix: out }
    }

    pub fn add(&self, other: &GEndo) -> GEndo {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GEndo) -> GEndo {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, f: &Scalar) -> GEndo {
        GEndo {
            matrix: self
                .matrix
                .iter()
                .map(|r| r.iter().map(|a| a * f).collect())
                .collect(),
        }
    }

    pub fn transpose(&self) -> GEndo {
        let size = self.matrix.len();
        GEndo {
            matrix: (0..size)
                .map(|i| (0..size).map(|j| self.matrix[j][i].clone()).collect())
                .collect(),
        }
    }

    /// Adjoint with respect to the pairing: `S P^T S` with `S = [[0, I], [I, 0]]`.
    pub fn pairing_adjoint(&self) -> GEndo {
        let n = self.dim();
        let swap = |k: usize| if k < n { k + n } else { k - n };
        let size = 2 * n;
        GEndo {
            matrix: (0..size)
                .map(|i| {
                    (0..size)
                        .map(|j| self.matrix[swap(j)][swap(i)].clone())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(Scalar::is_zero)
    }

    pub fn is_skew_adjoint(&self) -> bool {
        self.add(&self.pairing_adjoint()).is_zero()
    }

    pub fn conjugate(&self) -> GEndo {
        GEndo {
            matrix: self
                .matrix
                .iter()
                .map(|r| r.iter().map(Scalar::conjugate).collect())
                .collect(),
        }
    }

    fn zip_with(&self, other: &GEndo, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> GEndo {
        GEndo {
            matrix: self
                .matrix
                .iter()
                .zip(&other.matrix)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
                .collect(),
        }
    }
}

/// Residuals of the bracket/pairing compatibility and of the Jacobi anomaly.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomResiduals {
    /// `pr(s1)<s2,s3> - <[s1,s2] + d<s1,s2>, s3> - <s2, [s1,s3] + d<s1,s3>>`.
    pub pairing: Scalar,
    /// Jacobiator minus `d` of the Nijenhuis operator.
    pub jacobi: GSection,
}

impl AxiomResiduals {
    pub fn is_zero(&self) -> bool {
        self.pairing.is_zero() && self.jacobi.is_zero()
    }
}

/// Residual of the literal skew-bracket compatibility, without the exact-term correction.
pub fn literal_pairing_residual(
    model: &FrameModel,
    s1: &GSection,
    s2: &GSection,
    s3: &GSection,
    h: Option<&Twist>,
) -> Result<Scalar, CourantError> {
    let lhs = model.apply(&s1.vector, &pairing(s2, s3)?);
    let a = pairing(&courant_bracket(model, s1, s2, h)?, s3)?;
    let b = pairing(s2, &courant_bracket(model, s1, s3, h)?)?;
    Ok(lhs - a - b)
}

pub fn bracket_axiom_residuals(
    model: &FrameModel,
    s1: &GSection,
    s2: &GSection,
    s3: &GSection,
    h: Option<&Twist>,
) -> Result<AxiomResiduals, CourantError> {
    let br = |a: &GSection, b: &GSection| courant_bracket(model, a, b, h);
    let dorfman = |a: &GSection, b: &GSection| -> Result<GSection, CourantError> {
        let exact = GSection::from_form(model.differential(&pairing(a, b)?));
        Ok(br(a, b)?.add(&exact))
    };
    let lhs = model.apply(&s1.vector, &pairing(s2, s3)?);
    let pairing_residual = lhs - pairing(&dorfman(s1, s2)?, s3)? - pairing(s2, &dorfman(s1, s3)?)?;

    let s12 = br(s1, s2)?;
    let s13 = br(s1, s3)?;
    let s23 = br(s2, s3)?;
    let jacobiator = br(&s12, s3)?.add(&br(s2, &s13)?).sub(&br(s1, &s23)?);
    let nijenhuis = (pairing(&s12, s3)? + pairing(s1, &s23)? - pairing(s2, &s13)?).div_real(3.0);
    let jacobi = jacobiator.sub(&GSection::from_form(model.differential(&nijenhuis)));
    Ok(AxiomResiduals {
        pairing: pairing_residual,
        jacobi,
    })
}

impl FrameModel {
    /// Canonical rendering, e.g. `d/dx^d/dy`.
    pub fn render_bivector(&self, p: &Bivector) -> String {
        let names = self.frame_names();
        render_combination(
            crate::frame::combinations(self.dim(), 2)
                .into_iter()
                .map(|idx| {
                    (
                        p.entry(idx[0], idx[1]),
                        format!("{}^{}", names[idx[0]], names[idx[1]]),
                    )
                })
                .collect::<Vec<_>>()
                .into_iter(),
        )
    }

    /// Canonical rendering, e.g. `d/dz + dx`.
    pub fn render_section(&self, s: &GSection) -> String {
        let names = self.frame_names().iter().chain(self.coframe_names());
        render_combination(
            s.components()
                .iter()
                .zip(names.cloned())
                .collect::<Vec<_>>()
                .into_iter(),
        )
    }
}
