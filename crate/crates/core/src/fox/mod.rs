//! Free groups, their real group rings, Fox derivatives and word maps.

mod ring;
mod word;

pub use ring::{fox_derivative_unchecked, GroupRingElt};
pub use word::{generator_name, Letter, Relator, Word};
pub(crate) use word::parse_word;

use crate::error::{Error, Result};
use crate::linalg::{CMat, Mat};
use crate::rep::Representation;

/// Fox derivative with respect to generator `index` (1-based, `1..=rank`).
pub fn fox_derivative(w: &Word, index: usize, rank: usize) -> Result<GroupRingElt> {
    if index == 0 || index > rank {
        return Err(Error::IndexOutOfRange { index, rank });
    }
    Ok(fox_derivative_unchecked(w, index - 1))
}

/// `(∂r/∂x1, ∂r/∂y1, ..., ∂r/∂yL)`.
pub fn relator_fox_jacobian(rel: &Relator) -> Vec<GroupRingElt> {
    (0..rel.rank())
        .map(|i| fox_derivative_unchecked(rel.word(), i))
        .collect()
}

fn check_alphabet(max_generator: Option<usize>, rank: usize) -> Result<()> {
    match max_generator {
        Some(g) if g >= rank => Err(Error::AlphabetMismatch {
            generator: g + 1,
            rank,
        }),
        _ => Ok(()),
    }
}

/// Evaluates a word on a tuple of unitary matrices.
pub fn eval_word_images(w: &Word, images: &[CMat]) -> Result<CMat> {
    check_alphabet(w.max_generator(), images.len())?;
    let size = images.first().map(|m| m.nrows()).unwrap_or(1);
    if size == 1 {
        // scalars commute, so exponent sums give the value without rounding drift
        let mut out = CMat::identity(1, 1);
        for (g, m) in images.iter().enumerate() {
            let e = w.exponent_sum(g);
            let base = if e < 0 { m.adjoint() } else { m.clone() };
            for _ in 0..e.unsigned_abs() {
                out *= &base;
            }
        }
        return Ok(out);
    }
    let mut out = CMat::identity(size, size);
    for l in w.letters() {
        let m = &images[l.generator];
        out = if l.inverse { out * m.adjoint() } else { out * m };
    }
    Ok(out)
}

pub fn word_eval(w: &Word, phi: &Representation) -> Result<CMat> {
    eval_word_images(w, phi.images())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Adjoint,
    Coadjoint,
}

/// `Σ n_w Act(φ(w))` as a matrix on `g` or `g*`.
pub fn eval_group_ring(e: &GroupRingElt, phi: &Representation, action: Action) -> Result<Mat> {
    check_alphabet(e.max_generator(), phi.rank())?;
    let spec = phi.spec();
    let n = spec.dim();
    let mut out = Mat::zeros(n, n);
    for (w, c) in e.terms() {
        let g = word_eval(w, phi)?;
        let m = match action {
            Action::Adjoint => spec.ad(&g),
            Action::Coadjoint => spec.coadjoint_matrix(&g),
        };
        out += c * m;
    }
    Ok(out)
}

/// Right-translated derivative of the word map: the `n × 2ℓn` matrix `J` with
/// `d/dt|0 w(φ_t) w(φ)^-1 = J X` where `φ_t(z_i) = φ(z_i) exp(t X_i)`.
///
/// Block `i` equals `Ad(∂w/∂z_i · z_i)` evaluated at `φ`.
pub fn word_jacobian(w: &Word, phi: &Representation) -> Result<Mat> {
    check_alphabet(w.max_generator(), phi.rank())?;
    let spec = phi.spec();
    let n = spec.dim();
    let mut jac = Mat::zeros(n, n * phi.rank());
    let mut prefix = spec.identity();
    for l in w.letters() {
        let m = phi.image(l.generator);
        let mut block = jac.view_mut((0, l.generator * n), (n, n));
        if l.inverse {
            block -= spec.ad(&prefix);
            prefix *= m.adjoint();
        } else {
            prefix *= m;
            block += spec.ad(&prefix);
        }
    }
    Ok(jac)
}

/// Left-translated differential of the relator map `X -> d/dt|0 r(φ)^-1 r(φ_t)`.
pub fn relator_differential(phi: &Representation) -> Mat {
    let r = phi.relator_value();
    let jac = word_jacobian(phi.relator().word(), phi).expect("relator matches representation");
    phi.spec().ad(&r.adjoint()) * jac
}
