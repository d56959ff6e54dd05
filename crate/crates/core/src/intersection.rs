//! Cup and intersection pairings on the twisted (co)homology.
//!
//! The cup product is evaluated on an explicit bar 2-chain read off from the
//! relator spelling. Arbitrary invariant forms are handled one definite
//! component at a time; the null component contributes nothing.

use crate::error::{Error, Result};
use crate::fox::{Relator, Word};
use crate::homology::{build_complex, complex_from_maps, CohomologyData, CYCLE_TOL};
use crate::lie::{split_form, FormSplit, InvariantForm, LieGroupSpec};
use crate::linalg::{block_diag_repeat, pinv, singular_values, CMat, Mat, Vector};
use crate::rep::{conjugate, Representation};

/// Orientation convention for every pairing in the crate. With this value
/// `{tr x1, tr y1}` is positive at the reference SU(2) genus-2 fixture.
pub const ORIENTATION: f64 = -1.0;

/// Below this smallest/largest singular-value ratio a component Gram is singular.
pub const SINGULAR_RATIO: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct ChainTerm {
    pub sign: f64,
    pub prefix: Word,
    /// Zero-based generator index of the letter part.
    pub generator: usize,
}

/// Signed bar terms `ε_k [p_k | z_k]` realizing the fundamental class.
#[derive(Clone, Debug, PartialEq)]
pub struct Fundamental2Chain {
    terms: Vec<ChainTerm>,
}

impl Fundamental2Chain {
    pub fn terms(&self) -> &[ChainTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// For `s_k = z`: `(+1, p_{k-1}, z)`; for `s_k = z^-1`: `(-1, p_{k-1} z^-1, z)`.
pub fn fundamental_chain(rel: &Relator) -> Fundamental2Chain {
    let mut terms = Vec::with_capacity(rel.word().len());
    let mut prefix = Word::identity();
    for &l in rel.word().letters() {
        let next = prefix.mul(&Word::from(l));
        let (sign, p) = if l.inverse { (-1.0, next.clone()) } else { (1.0, prefix.clone()) };
        terms.push(ChainTerm {
            sign,
            prefix: p,
            generator: l.generator,
        });
        prefix = next;
    }
    Fundamental2Chain { terms }
}

/// A chain term evaluated at a representation.
struct EvaluatedTerm {
    sign: f64,
    /// `u -> U(p)` for the cocycle extension, `n × 2ℓn`.
    extension: Mat,
    /// `Ad(φ(p z))`.
    ad_pz: Mat,
    generator: usize,
}

fn evaluate_chain(phi: &Representation) -> Vec<EvaluatedTerm> {
    let spec = phi.spec();
    let n = spec.dim();
    let mut ext = Mat::zeros(n, phi.tangent_dim());
    let mut prefix: CMat = spec.identity();
    let mut out = Vec::new();
    for &l in phi.relator().word().letters() {
        let z = l.generator;
        let m = phi.image(z);
        if l.inverse {
            let mut block = ext.view_mut((0, z * n), (n, n));
            block -= spec.ad(&prefix);
            let pz = prefix.clone();
            prefix *= m.adjoint();
            out.push(EvaluatedTerm {
                sign: -1.0,
                extension: ext.clone(),
                ad_pz: spec.ad(&pz),
                generator: z,
            });
        } else {
            let pz = &prefix * m;
            let ad_pz = spec.ad(&pz);
            out.push(EvaluatedTerm {
                sign: 1.0,
                extension: ext.clone(),
                ad_pz: ad_pz.clone(),
                generator: z,
            });
            let mut block = ext.view_mut((0, z * n), (n, n));
            block += &ad_pz;
            prefix = pz;
        }
    }
    out
}

/// Cochain extension `u -> U(w)` for an arbitrary word, `n × 2ℓn`.
pub fn cocycle_extension(w: &Word, phi: &Representation) -> Result<Mat> {
    crate::fox::word_jacobian(w, phi)
}

/// Matrix `Q` with `σ(u, v) = uᵀ Q v` at the chain level, for a form `b` on `g`.
pub fn cup_matrix(phi: &Representation, b: &Mat) -> Mat {
    let n = phi.spec().dim();
    let big = phi.tangent_dim();
    let mut q = Mat::zeros(big, big);
    for t in evaluate_chain(phi) {
        let block = t.sign * t.extension.transpose() * b * &t.ad_pz;
        let mut cols = q.view_mut((0, t.generator * n), (big, n));
        cols += block;
    }
    q
}

fn check_cocycle(data: &CohomologyData, u: &Vector) -> Result<()> {
    let residual = data.cocycle_residual(u);
    if residual > CYCLE_TOL * u.norm().max(1.0) {
        return Err(Error::NotACocycle { residual });
    }
    Ok(())
}

fn check_cycle(data: &CohomologyData, a: &Vector) -> Result<()> {
    let residual = data.cycle_residual(a);
    if residual > CYCLE_TOL * a.norm().max(1.0) {
        return Err(Error::NotACycle { residual });
    }
    Ok(())
}

/// Cup pairing of two 1-cocycles with coefficients paired by `form_on_g`.
pub fn sigma(u: &Vector, v: &Vector, phi: &Representation, form_on_g: &Mat) -> Result<f64> {
    let data = build_complex(phi);
    check_cocycle(&data, u)?;
    check_cocycle(&data, v)?;
    Ok(ORIENTATION * u.dot(&(cup_matrix(phi, form_on_g) * v)))
}

/// Chain-level cup product with the Lie bracket as coefficient pairing.
pub fn cup_bracket_chain(u: &Vector, v: &Vector, phi: &Representation) -> Vector {
    let spec = phi.spec();
    let n = spec.dim();
    let mut out = vec![0.0; n];
    for t in evaluate_chain(phi) {
        let uu: Vec<f64> = (&t.extension * u).iter().cloned().collect();
        let vz = Vector::from_iterator(n, v.rows(t.generator * n, n).iter().cloned());
        let vv: Vec<f64> = (&t.ad_pz * vz).iter().cloned().collect();
        let br = spec.lie_bracket(&uu, &vv);
        for k in 0..n {
            out[k] += t.sign * br[k];
        }
    }
    Vector::from_vec(out)
}

/// Class of `[u, v]` in `H²`, represented in `(im d¹)^⊥`.
pub fn cup_bracket(u: &Vector, v: &Vector, phi: &Representation) -> Result<Vector> {
    let data = build_complex(phi);
    check_cocycle(&data, u)?;
    check_cocycle(&data, v)?;
    Ok(project_h2(&data, &cup_bracket_chain(u, v, phi)))
}

fn project_h2(data: &CohomologyData, x: &Vector) -> Vector {
    let im = crate::linalg::column_space(&data.d1);
    x - &im * (im.transpose() * x)
}

/// Largest norm of the bracket class over pairs of harmonic basis vectors;
/// zero exactly on the locus where the bracket operation on `H¹` vanishes.
pub fn hom_minus_residual(phi: &Representation) -> f64 {
    let data = build_complex(phi);
    let h = &data.harmonic;
    let mut worst: f64 = 0.0;
    for i in 0..h.ncols() {
        for j in i..h.ncols() {
            let u = h.column(i).clone_owned();
            let v = h.column(j).clone_owned();
            let c = project_h2(&data, &cup_bracket_chain(&u, &v, phi));
            worst = worst.max(c.norm());
        }
    }
    worst
}

pub fn in_hom_minus(phi: &Representation) -> bool {
    hom_minus_residual(phi) <= 1e-8
}

/// Operators of the complex compressed to one definite form component.
struct ComponentOps {
    sign: f64,
    lift: Mat,
    d0: Mat,
    d1: Mat,
    q: Mat,
}

fn component_ops(phi: &Representation, split: &FormSplit) -> Vec<ComponentOps> {
    let data = build_complex(phi);
    split
        .components()
        .iter()
        .map(|c| {
            let lift = block_diag_repeat(&c.basis, phi.rank());
            let b = &c.basis * &c.algebra_form * c.basis.transpose();
            let q = lift.transpose() * cup_matrix(phi, &b) * &lift;
            ComponentOps {
                sign: c.sign,
                d0: lift.transpose() * &data.d0 * &c.basis,
                d1: c.basis.transpose() * &data.d1 * &lift,
                lift,
                q,
            }
        })
        .collect()
}

fn split_for(phi: &Representation, form: &InvariantForm) -> Result<FormSplit> {
    split_form(form, phi.spec())
}

struct ClassComponent {
    sign: f64,
    lift: Mat,
    harmonic: Mat,
    s: Mat,
    s_inv_t: Mat,
}

/// Class-level pairing on `H₁` via cap duality, one component at a time.
pub struct ClassPairing {
    components: Vec<ClassComponent>,
    data: CohomologyData,
    tangent_dim: usize,
}

impl ClassPairing {
    /// Fails with `SingularPairing` if some component Gram is singular.
    pub fn new(phi: &Representation, form: &InvariantForm) -> Result<Self> {
        Self::build(phi, form, false)
    }

    /// Uses a pseudo-inverse on singular component Grams.
    pub fn new_pinv(phi: &Representation, form: &InvariantForm) -> Result<Self> {
        Self::build(phi, form, true)
    }

    fn build(phi: &Representation, form: &InvariantForm, allow_singular: bool) -> Result<Self> {
        let split = split_for(phi, form)?;
        let mut components = Vec::new();
        for ops in component_ops(phi, &split) {
            let cdata = complex_from_maps(ops.d0.clone(), ops.d1.clone());
            let w = cdata.harmonic.clone();
            let s = w.transpose() * &ops.q * &w;
            let s_inv_t = if s.nrows() == 0 {
                s.clone()
            } else {
                let sv = singular_values(&s);
                let ratio = sv.last().unwrap() / sv[0].max(f64::MIN_POSITIVE);
                if ratio < SINGULAR_RATIO {
                    if !allow_singular {
                        return Err(Error::SingularPairing { ratio });
                    }
                    pinv(&s.transpose())
                } else {
                    s.transpose().try_inverse().expect("nonsingular Gram")
                }
            };
            components.push(ClassComponent {
                sign: ops.sign,
                lift: ops.lift,
                harmonic: w,
                s,
                s_inv_t,
            });
        }
        Ok(ClassPairing {
            components,
            data: build_complex(phi),
            tangent_dim: phi.tangent_dim(),
        })
    }

    pub fn complex(&self) -> &CohomologyData {
        &self.data
    }

    /// The bilinear form on `(g*)^{2ℓ}` as a matrix `P` with `⟨a,b⟩ = aᵀ P b`.
    pub fn tensor(&self) -> Mat {
        let mut p = Mat::zeros(self.tangent_dim, self.tangent_dim);
        for c in &self.components {
            let lw = &c.lift * &c.harmonic;
            p += c.sign * &lw * &c.s_inv_t * lw.transpose();
        }
        ORIENTATION * p
    }

    pub fn pairing(&self, a: &Vector, b: &Vector) -> f64 {
        a.dot(&(self.tensor() * b))
    }

    /// Factorisation `tensor = F C Fᵀ`: `F` stacks the lifted component
    /// harmonic bases, `C` is block diagonal with entries `sign S⁻ᵀ`.
    pub fn frame(&self) -> (Mat, Mat) {
        let m: usize = self.components.iter().map(|c| c.harmonic.ncols()).sum();
        let mut frame = Mat::zeros(self.tangent_dim, m);
        let mut core = Mat::zeros(m, m);
        let mut at = 0;
        for c in &self.components {
            let k = c.harmonic.ncols();
            frame.view_mut((0, at), (self.tangent_dim, k)).copy_from(&(&c.lift * &c.harmonic));
            core.view_mut((at, at), (k, k)).copy_from(&(ORIENTATION * c.sign * &c.s_inv_t));
            at += k;
        }
        (frame, core)
    }

    /// Full-space harmonic cocycle `Σ_s sign_s T_s(a)`.
    pub fn transport(&self, a: &Vector) -> Vector {
        let mut out = Vector::zeros(self.tangent_dim);
        for c in &self.components {
            let coords = c.harmonic.transpose() * (c.lift.transpose() * a);
            out += c.sign * &c.lift * &c.harmonic * (&c.s_inv_t * coords);
        }
        out
    }

    /// Per-component σ Grams over the component harmonic bases.
    pub fn component_grams(&self) -> Vec<(f64, Mat)> {
        self.components
            .iter()
            .map(|c| (c.sign, ORIENTATION * c.s.clone()))
            .collect()
    }
}

/// Chain-level pairing defined on all of `G^{2ℓ}` by solving the bordered system
/// `[[Qᵀ, d¹ᵀ, d⁰], [d¹, 0, 0], [d⁰ᵀ, 0, 0]] [u; λ; μ] = [a; 0; 0]` per component.
pub struct BorderedPairing {
    /// Per component: sign, lift, `Q_s`, and the solution operator `a_s -> u_s`.
    components: Vec<(f64, Mat, Mat, Mat)>,
    tangent_dim: usize,
}

impl BorderedPairing {
    pub fn new(phi: &Representation, form: &InvariantForm) -> Result<Self> {
        let split = split_for(phi, form)?;
        let components = component_ops(phi, &split)
            .into_iter()
            .map(|ops| {
                let big = ops.q.nrows();
                let k = ops.d0.ncols();
                let size = big + 2 * k;
                let mut m = Mat::zeros(size, size);
                m.view_mut((0, 0), (big, big)).copy_from(&ops.q.transpose());
                m.view_mut((0, big), (big, k)).copy_from(&ops.d1.transpose());
                m.view_mut((0, big + k), (big, k)).copy_from(&ops.d0);
                m.view_mut((big, 0), (k, big)).copy_from(&ops.d1);
                m.view_mut((big + k, 0), (k, big)).copy_from(&ops.d0.transpose());
                let solve = pinv(&m).view((0, 0), (big, big)).clone_owned();
                (ops.sign, ops.lift, ops.q, solve)
            })
            .collect();
        Ok(BorderedPairing {
            components,
            tangent_dim: phi.tangent_dim(),
        })
    }

    /// `P` with `diamond(a, b) = aᵀ P b`.
    pub fn tensor(&self) -> Mat {
        let mut p = Mat::zeros(self.tangent_dim, self.tangent_dim);
        for (sign, lift, q, solve) in &self.components {
            let g = solve.transpose() * q * solve;
            p += *sign * lift * g * lift.transpose();
        }
        ORIENTATION * p
    }

    pub fn pairing(&self, a: &Vector, b: &Vector) -> f64 {
        let mut total = 0.0;
        for (sign, lift, q, solve) in &self.components {
            let ua = solve * (lift.transpose() * a);
            let ub = solve * (lift.transpose() * b);
            total += sign * ua.dot(&(q * ub));
        }
        ORIENTATION * total
    }

    /// `Σ_s sign_s u_s(a)` lifted back to the full cochain space.
    pub fn transport(&self, a: &Vector) -> Vector {
        let mut out = Vector::zeros(self.tangent_dim);
        for (sign, lift, _, solve) in &self.components {
            out += *sign * lift * (solve * (lift.transpose() * a));
        }
        out
    }
}

/// Intersection pairing of two 1-cycles.
pub fn intersection_pairing(a: &Vector, b: &Vector, phi: &Representation, form: &InvariantForm) -> Result<f64> {
    let ctx = ClassPairing::new(phi, form)?;
    check_cycle(ctx.complex(), a)?;
    check_cycle(ctx.complex(), b)?;
    Ok(ctx.pairing(a, b))
}

/// Gram matrix of the intersection pairing over the harmonic basis of `H₁`.
#[derive(Clone, Debug)]
pub struct PairingOperator {
    pub basis: Mat,
    pub gram: Mat,
    pub split: FormSplit,
}

impl PairingOperator {
    pub fn new(phi: &Representation, form: &InvariantForm) -> Result<Self> {
        let split = split_for(phi, form)?;
        let ctx = ClassPairing::new_pinv(phi, form)?;
        let basis = ctx.complex().harmonic.clone();
        let gram = basis.transpose() * ctx.tensor() * &basis;
        Ok(PairingOperator { basis, gram, split })
    }

    pub fn rank(&self) -> usize {
        crate::linalg::numerical_rank(&self.gram)
    }
}

/// `|⟨a,b⟩_φ − ⟨x·a, x·b⟩_{xφx⁻¹}|` with `x` acting coadjointly on each block.
pub fn equivariance_check(
    phi: &Representation,
    x: &CMat,
    a: &Vector,
    b: &Vector,
    form: &InvariantForm,
) -> Result<f64> {
    let spec: &LieGroupSpec = phi.spec();
    if *x == spec.identity() {
        return Ok(0.0);
    }
    let co = block_diag_repeat(&spec.coadjoint_matrix(x), phi.rank());
    let before = intersection_pairing(a, b, phi, form)?;
    let after = intersection_pairing(&(&co * a), &(&co * b), &conjugate(phi, x), form)?;
    Ok((before - after).abs())
}
