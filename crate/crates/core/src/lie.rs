//! Compact matrix Lie groups, their adjoint and coadjoint actions, and
//! coadjoint-invariant bilinear forms on the dual of the Lie algebra.
//!
//! Lie algebra elements are stored as coefficient vectors in a basis that is
//! orthonormal for `<X,Y> = -Re tr(XY)`. With this choice `Ad(x)` is an
//! orthogonal matrix and the dual basis of `g*` is the same coordinate system.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{null_space, CMat, Mat, Vector};

/// Invariance residual above which a form is rejected.
pub const INVARIANCE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    SU2,
    U1,
    SO3,
    U2,
    Product(Vec<GroupKind>),
}

impl GroupKind {
    /// Accepts `SU2`, `U1`, `SO3`, `U2` (optionally as `SU(2)` etc.) and
    /// products joined by `x`, such as `SU2xU1`.
    pub fn parse(name: &str) -> Option<GroupKind> {
        let upper = name.trim().to_ascii_uppercase();
        if upper.contains('X') {
            let parts = upper
                .split('X')
                .map(GroupKind::parse)
                .collect::<Option<Vec<_>>>()?;
            return Some(GroupKind::Product(parts));
        }
        match upper.as_str() {
            "SU2" | "SU(2)" => Some(GroupKind::SU2),
            "U1" | "U(1)" => Some(GroupKind::U1),
            "SO3" | "SO(3)" => Some(GroupKind::SO3),
            "U2" | "U(2)" => Some(GroupKind::U2),
            _ => None,
        }
    }

    fn flatten(&self, out: &mut Vec<GroupKind>) {
        match self {
            GroupKind::Product(parts) => parts.iter().for_each(|p| p.flatten(out)),
            simple => out.push(simple.clone()),
        }
    }

    fn matrix_size(&self) -> usize {
        match self {
            GroupKind::U1 => 1,
            GroupKind::SU2 | GroupKind::U2 => 2,
            GroupKind::SO3 => 3,
            GroupKind::Product(parts) => parts.iter().map(|p| p.matrix_size()).sum(),
        }
    }
}

impl std::fmt::Display for GroupKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupKind::SU2 => write!(f, "SU2"),
            GroupKind::U1 => write!(f, "U1"),
            GroupKind::SO3 => write!(f, "SO3"),
            GroupKind::U2 => write!(f, "U2"),
            GroupKind::Product(parts) => {
                let names: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "{}", names.join("x"))
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Block {
    kind: GroupKind,
    offset: usize,
    size: usize,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn simple_basis(kind: &GroupKind) -> Vec<CMat> {
    let s = FRAC_1_SQRT_2;
    let su2 = || {
        vec![
            CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., s), c(0., s), c(0., 0.)]),
            CMat::from_row_slice(2, 2, &[c(0., 0.), c(s, 0.), c(-s, 0.), c(0., 0.)]),
            CMat::from_row_slice(2, 2, &[c(0., s), c(0., 0.), c(0., 0.), c(0., -s)]),
        ]
    };
    match kind {
        GroupKind::SU2 => su2(),
        GroupKind::U1 => vec![CMat::from_element(1, 1, c(0., 1.))],
        GroupKind::U2 => {
            let mut b = su2();
            b.push(CMat::from_row_slice(2, 2, &[c(0., s), c(0., 0.), c(0., 0.), c(0., s)]));
            b
        }
        GroupKind::SO3 => (0..3)
            .map(|a| {
                let mut m = CMat::zeros(3, 3);
                let b = (a + 1) % 3;
                let d = (a + 2) % 3;
                m[(b, d)] = c(-s, 0.);
                m[(d, b)] = c(s, 0.);
                m
            })
            .collect(),
        GroupKind::Product(_) => unreachable!("products are flattened"),
    }
}

/// A compact matrix Lie group with an orthonormal basis of its Lie algebra.
#[derive(Clone, Debug)]
pub struct LieGroupSpec {
    kind: GroupKind,
    matrix_size: usize,
    blocks: Vec<Block>,
    basis: Vec<CMat>,
    ad_basis: Vec<Mat>,
    center_dim: usize,
}

impl LieGroupSpec {
    pub fn new(kind: GroupKind) -> Self {
        let mut simple = Vec::new();
        kind.flatten(&mut simple);
        let matrix_size = kind.matrix_size();
        let mut blocks = Vec::new();
        let mut basis = Vec::new();
        let mut offset = 0;
        for k in simple {
            let size = k.matrix_size();
            for e in simple_basis(&k) {
                let mut m = CMat::zeros(matrix_size, matrix_size);
                m.view_mut((offset, offset), (size, size)).copy_from(&e);
                basis.push(m);
            }
            blocks.push(Block { kind: k, offset, size });
            offset += size;
        }
        let mut spec = LieGroupSpec {
            kind,
            matrix_size,
            blocks,
            basis,
            ad_basis: Vec::new(),
            center_dim: 0,
        };
        let n = spec.dim();
        spec.ad_basis = (0..n)
            .map(|a| {
                let mut m = Mat::zeros(n, n);
                for b in 0..n {
                    let br = &spec.basis[a] * &spec.basis[b] - &spec.basis[b] * &spec.basis[a];
                    m.set_column(b, &Vector::from_vec(spec.coefficients(&br)));
                }
                m
            })
            .collect();
        let mut stacked = Mat::zeros(n * n, n);
        for (a, ad) in spec.ad_basis.iter().enumerate() {
            stacked.view_mut((a * n, 0), (n, n)).copy_from(ad);
        }
        spec.center_dim = null_space(&stacked).ncols();
        spec
    }

    pub fn su2() -> Self {
        Self::new(GroupKind::SU2)
    }

    pub fn u1() -> Self {
        Self::new(GroupKind::U1)
    }

    pub fn u2() -> Self {
        Self::new(GroupKind::U2)
    }

    pub fn so3() -> Self {
        Self::new(GroupKind::SO3)
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    /// Dimension of the Lie algebra.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix_size(&self) -> usize {
        self.matrix_size
    }

    pub fn center_dim(&self) -> usize {
        self.center_dim
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    /// `ad(E_a)` in the orthonormal basis.
    pub fn ad_basis(&self) -> &[Mat] {
        &self.ad_basis
    }

    pub fn identity(&self) -> CMat {
        CMat::identity(self.matrix_size, self.matrix_size)
    }

    pub fn algebra_element(&self, coeffs: &[f64]) -> CMat {
        let mut m = CMat::zeros(self.matrix_size, self.matrix_size);
        for (e, &x) in self.basis.iter().zip(coeffs) {
            m += e * c(x, 0.0);
        }
        m
    }

    /// Orthogonal projection of a matrix onto `g`, in basis coordinates.
    pub fn coefficients(&self, x: &CMat) -> Vec<f64> {
        self.basis
            .iter()
            .map(|e| -(e * x).trace().re)
            .collect()
    }

    pub fn exp(&self, coeffs: &[f64]) -> CMat {
        self.algebra_element(coeffs).exp()
    }

    /// Principal logarithm of a group element, projected onto `g`.
    ///
    /// Group elements are normal matrices, so a generic real combination of
    /// their Hermitian and skew-Hermitian parts diagonalizes them.
    pub fn log(&self, g: &CMat) -> Vec<f64> {
        let ga = g.adjoint();
        let herm = (g + &ga) * c(0.5, 0.0) + (g - &ga) * c(0.0, -0.5 * 0.618_033_988_749_894_9);
        let eig = nalgebra::SymmetricEigen::new(herm);
        let u = eig.eigenvectors;
        let diag = u.adjoint() * g * &u;
        let mut d = CMat::zeros(g.nrows(), g.ncols());
        for i in 0..g.nrows() {
            d[(i, i)] = diag[(i, i)].ln();
        }
        self.coefficients(&(&u * d * u.adjoint()))
    }

    pub fn lie_bracket(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for (a, ad) in self.ad_basis.iter().enumerate() {
            if u[a] == 0.0 {
                continue;
            }
            let col = ad * Vector::from_column_slice(v);
            for k in 0..n {
                out[k] += u[a] * col[k];
            }
        }
        out
    }

    /// `Ad(x)` as an `n × n` matrix.
    pub fn ad(&self, x: &CMat) -> Mat {
        let n = self.dim();
        let xinv = x.adjoint();
        let mut m = Mat::zeros(n, n);
        for b in 0..n {
            let conj = x * &self.basis[b] * &xinv;
            m.set_column(b, &Vector::from_vec(self.coefficients(&conj)));
        }
        m
    }

    /// Coadjoint action `u -> u ∘ Ad(x^-1)` as a matrix on dual coordinates.
    pub fn coadjoint_matrix(&self, x: &CMat) -> Mat {
        self.ad(&x.adjoint()).transpose()
    }

    /// Distance of `g` from the group (unitarity, determinant and block structure).
    pub fn element_residual(&self, g: &CMat) -> f64 {
        if g.nrows() != self.matrix_size || g.ncols() != self.matrix_size {
            return f64::INFINITY;
        }
        let mut res = (g.adjoint() * g - self.identity()).norm();
        let mut inside = CMat::zeros(self.matrix_size, self.matrix_size);
        for b in &self.blocks {
            let blk = g.view((b.offset, b.offset), (b.size, b.size)).clone_owned();
            inside.view_mut((b.offset, b.offset), (b.size, b.size)).copy_from(&blk);
            match b.kind {
                GroupKind::SU2 => res += (blk.determinant() - c(1.0, 0.0)).norm(),
                GroupKind::SO3 => {
                    res += (blk.determinant() - c(1.0, 0.0)).norm();
                    res += blk.iter().map(|z| z.im.abs()).sum::<f64>();
                }
                _ => {}
            }
        }
        res + (g - inside).norm()
    }

    /// Largest commutator norm against the Lie algebra basis.
    pub fn centrality_residual(&self, c: &CMat) -> f64 {
        self.basis
            .iter()
            .map(|e| (c * e - e * c).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_central_element(&self, c: &CMat) -> bool {
        self.element_residual(c) <= 1e-10 && self.centrality_residual(c) <= 1e-10
    }

    /// Haar-distributed random element, block by block.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> CMat {
        let mut g = CMat::zeros(self.matrix_size, self.matrix_size);
        for b in &self.blocks {
            let blk = match b.kind {
                GroupKind::U1 => {
                    let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    CMat::from_element(1, 1, Complex64::from_polar(1.0, t))
                }
                GroupKind::SU2 => random_su2(rng),
                GroupKind::U2 => {
                    let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    random_su2(rng) * Complex64::from_polar(1.0, t)
                }
                GroupKind::SO3 => {
                    let q = random_unit_quaternion(rng);
                    rotation_from_quaternion(q)
                }
                GroupKind::Product(_) => unreachable!(),
            };
            g.view_mut((b.offset, b.offset), (b.size, b.size)).copy_from(&blk);
        }
        g
    }

    /// Random Lie algebra element with standard normal coefficients.
    pub fn random_algebra<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.dim()).map(|_| rng.sample(StandardNormal)).collect()
    }

    /// The element `scalar · I`, if it lies in the group.
    pub fn scalar_element(&self, scalar: f64) -> Option<CMat> {
        let m = self.identity() * c(scalar, 0.0);
        (self.element_residual(&m) <= 1e-12).then_some(m)
    }
}

fn random_unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    loop {
        let q: [f64; 4] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            return [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
        }
    }
}

/// Unit quaternion `(a,b,c,d)` as the SU(2) matrix `[[a+ib, c+id], [-c+id, a-ib]]`.
pub fn su2_from_quaternion(q: [f64; 4]) -> CMat {
    CMat::from_row_slice(
        2,
        2,
        &[c(q[0], q[1]), c(q[2], q[3]), c(-q[2], q[3]), c(q[0], -q[1])],
    )
}

fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> CMat {
    su2_from_quaternion(random_unit_quaternion(rng))
}

fn rotation_from_quaternion(q: [f64; 4]) -> CMat {
    let [w, x, y, z] = q;
    let r = [
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    ];
    CMat::from_iterator(3, 3, r.iter().map(|&v| c(v, 0.0))).transpose()
}

/// Coadjoint action of `x` on a dual vector `u`.
pub fn coadjoint(spec: &LieGroupSpec, x: &CMat, u: &[f64]) -> Vec<f64> {
    (spec.coadjoint_matrix(x) * Vector::from_column_slice(u))
        .iter()
        .cloned()
        .collect()
}

/// A coadjoint-invariant symmetric bilinear form on `g*`, given by its Gram
/// matrix in the dual basis. It may be indefinite or degenerate.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantForm {
    gram: Mat,
    signature: (usize, usize, usize),
}

fn eigen_tol(values: &[f64]) -> f64 {
    1e-10 * values.iter().map(|v| v.abs()).fold(1.0, f64::max)
}

/// Largest residual of `ad_a M + M ad_a^T` over the basis.
pub fn invariance_residual(spec: &LieGroupSpec, gram: &Mat) -> f64 {
    spec.ad_basis()
        .iter()
        .map(|ad| (ad * gram + gram * ad.transpose()).norm())
        .fold(0.0, f64::max)
}

impl InvariantForm {
    pub fn from_gram(spec: &LieGroupSpec, gram: Mat) -> Result<Self> {
        let n = spec.dim();
        if gram.shape() != (n, n) {
            return Err(Error::InvalidInput(format!(
                "form Gram matrix must be {n}x{n}, got {}x{}",
                gram.nrows(),
                gram.ncols()
            )));
        }
        if (&gram - gram.transpose()).norm() > 1e-12 * gram.norm().max(1.0) {
            return Err(Error::InvalidInput("form Gram matrix is not symmetric".into()));
        }
        let residual = invariance_residual(spec, &gram);
        if residual > INVARIANCE_TOL {
            return Err(Error::NotInvariant { residual });
        }
        let eig = SymmetricEigen::new(gram.clone());
        let vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        let tol = eigen_tol(&vals);
        let signature = (
            vals.iter().filter(|&&v| v > tol).count(),
            vals.iter().filter(|&&v| v < -tol).count(),
            vals.iter().filter(|&&v| v.abs() <= tol).count(),
        );
        Ok(InvariantForm { gram, signature })
    }

    /// The reference positive form (identity in the orthonormal dual basis).
    pub fn reference(spec: &LieGroupSpec) -> Self {
        Self::from_gram(spec, Mat::identity(spec.dim(), spec.dim()))
            .expect("the reference form is invariant")
    }

    pub fn diagonal(spec: &LieGroupSpec, entries: &[f64]) -> Result<Self> {
        if entries.len() != spec.dim() {
            return Err(Error::InvalidInput(format!(
                "diagonal form needs {} entries, got {}",
                spec.dim(),
                entries.len()
            )));
        }
        Self::from_gram(spec, Mat::from_diagonal(&Vector::from_column_slice(entries)))
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    /// `(n+, n-, n0)`.
    pub fn signature(&self) -> (usize, usize, usize) {
        self.signature
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.signature.2 == 0
    }

    pub fn eval(&self, u: &[f64], v: &[f64]) -> f64 {
        let u = Vector::from_column_slice(u);
        let v = Vector::from_column_slice(v);
        u.dot(&(&self.gram * v))
    }
}

/// One definite summand `g*_+` or `g*_-` of a split form.
#[derive(Clone, Debug)]
pub struct FormComponent {
    /// +1 for the positive part, -1 for the negative part.
    pub sign: f64,
    /// Orthonormal columns spanning the summand (`n × k`).
    pub basis: Mat,
    /// Positive-definite restriction of `±form` to the summand.
    pub dual_form: Mat,
    /// Induced positive form on the matching summand of `g` (inverse of `dual_form`).
    pub algebra_form: Mat,
}

/// Decomposition `g* = g*_+ ⊕ g*_- ⊕ g*_0` of a coadjoint-invariant form.
#[derive(Clone, Debug)]
pub struct FormSplit {
    pub plus: Mat,
    pub minus: Mat,
    pub zero: Mat,
    components: Vec<FormComponent>,
}

impl FormSplit {
    pub fn components(&self) -> &[FormComponent] {
        &self.components
    }

    pub fn positive(&self) -> Option<&FormComponent> {
        self.components.iter().find(|c| c.sign > 0.0)
    }

    pub fn negative(&self) -> Option<&FormComponent> {
        self.components.iter().find(|c| c.sign < 0.0)
    }

    pub fn signature(&self) -> (usize, usize, usize) {
        let rank = |m: &Mat| m.trace().round() as usize;
        (rank(&self.plus), rank(&self.minus), rank(&self.zero))
    }

    /// `⟨·,·⟩*_+ ∘ P_+ − ⟨·,·⟩*_- ∘ P_-` reassembled as a Gram matrix.
    pub fn recombined_gram(&self) -> Mat {
        let n = self.plus.nrows();
        let mut m = Mat::zeros(n, n);
        for c in &self.components {
            m += c.sign * &c.basis * &c.dual_form * c.basis.transpose();
        }
        m
    }
}

/// Eigen-split of the form relative to the reference positive invariant form.
pub fn split_form(form: &InvariantForm, spec: &LieGroupSpec) -> Result<FormSplit> {
    let residual = invariance_residual(spec, form.gram());
    if residual > INVARIANCE_TOL {
        return Err(Error::NotInvariant { residual });
    }
    let n = spec.dim();
    let eig = SymmetricEigen::new(form.gram().clone());
    let vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    let tol = eigen_tol(&vals);
    let pick = |pred: &dyn Fn(f64) -> bool| -> Mat {
        let idx: Vec<usize> = (0..n).filter(|&i| pred(vals[i])).collect();
        let mut b = Mat::zeros(n, idx.len());
        for (j, &i) in idx.iter().enumerate() {
            b.set_column(j, &eig.eigenvectors.column(i));
        }
        b
    };
    let plus_b = pick(&|v| v > tol);
    let minus_b = pick(&|v| v < -tol);
    let zero_b = pick(&|v| v.abs() <= tol);
    let proj = |b: &Mat| b * b.transpose();
    let mut components = Vec::new();
    for (sign, b) in [(1.0, &plus_b), (-1.0, &minus_b)] {
        if b.ncols() == 0 {
            continue;
        }
        let dual_form = sign * b.transpose() * form.gram() * b;
        let dual_form = 0.5 * (&dual_form + dual_form.transpose());
        let algebra_form = dual_form
            .clone()
            .try_inverse()
            .expect("definite restriction is invertible");
        components.push(FormComponent {
            sign,
            basis: b.clone(),
            dual_form,
            algebra_form,
        });
    }
    Ok(FormSplit {
        plus: proj(&plus_b),
        minus: proj(&minus_b),
        zero: proj(&zero_b),
        components,
    })
}
