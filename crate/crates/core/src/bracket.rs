//! The bracket of invariant functions, its chain-level counterpart, Jacobi and
//! Casimir diagnostics, and the standard probe family of trace functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fox::{Letter, Word};
use crate::function::InvariantFunction;
use crate::intersection::{BorderedPairing, ClassPairing};
use crate::lie::InvariantForm;
use crate::linalg::{Mat, Vector};
use crate::rep::{Representation, MEMBERSHIP_TOL};

/// First finite-difference step for Jacobi residuals; the second is twice this.
pub const JACOBI_STEP: f64 = 1e-4;

/// Left-translated differential of `f` at `φ`.
pub fn differential(f: &InvariantFunction, phi: &Representation) -> Result<Vector> {
    f.differential(phi)
}

fn require_member(phi: &Representation) -> Result<()> {
    let residual = phi.relator_residual();
    if residual > MEMBERSHIP_TOL {
        return Err(Error::NotMember { residual });
    }
    Ok(())
}

/// Chain-level pairing of the differentials, defined at every tuple.
pub fn diamond(f: &InvariantFunction, h: &InvariantFunction, phi: &Representation, form: &InvariantForm) -> Result<f64> {
    let ctx = BorderedPairing::new(phi, form)?;
    Ok(ctx.pairing(&f.differential(phi)?, &h.differential(phi)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketValue {
    pub value: f64,
    /// `‖∂₁ df‖`, zero for invariant functions.
    pub cycle_residual_f: f64,
    pub cycle_residual_h: f64,
    pub relator_residual: f64,
}

/// Pairing data at one member, reused across many brackets.
pub struct BracketContext {
    pairing: ClassPairing,
    tensor: Mat,
}

impl BracketContext {
    pub fn new(phi: &Representation, form: &InvariantForm) -> Result<Self> {
        require_member(phi)?;
        let pairing = ClassPairing::new(phi, form)?;
        let tensor = pairing.tensor();
        Ok(BracketContext { pairing, tensor })
    }

    /// As `new` but tolerating singular component Grams via pseudo-inverses.
    pub fn new_pinv(phi: &Representation, form: &InvariantForm) -> Result<Self> {
        require_member(phi)?;
        let pairing = ClassPairing::new_pinv(phi, form)?;
        let tensor = pairing.tensor();
        Ok(BracketContext { pairing, tensor })
    }

    pub fn tensor(&self) -> &Mat {
        &self.tensor
    }

    pub fn pairing(&self) -> &ClassPairing {
        &self.pairing
    }

    pub fn bracket_differentials(&self, df: &Vector, dh: &Vector) -> f64 {
        df.dot(&(&self.tensor * dh))
    }

    /// `Dᵀ P D` for differentials stacked as the columns of `d`.
    pub fn gram(&self, d: &Mat) -> Mat {
        d.transpose() * &self.tensor * d
    }
}

pub fn bracket(f: &InvariantFunction, h: &InvariantFunction, phi: &Representation, form: &InvariantForm) -> Result<BracketValue> {
    let ctx = BracketContext::new(phi, form)?;
    let df = f.differential(phi)?;
    let dh = h.differential(phi)?;
    let data = ctx.pairing.complex();
    Ok(BracketValue {
        value: ctx.bracket_differentials(&df, &dh),
        cycle_residual_f: data.cycle_residual(&df),
        cycle_residual_h: data.cycle_residual(&dh),
        relator_residual: phi.relator_residual(),
    })
}

/// Differentials of `family` stacked as columns.
pub fn differential_matrix(family: &[InvariantFunction], phi: &Representation) -> Result<Mat> {
    let cols = family
        .iter()
        .map(|f| f.differential(phi))
        .collect::<Result<Vec<_>>>()?;
    if cols.is_empty() {
        return Ok(Mat::zeros(phi.tangent_dim(), 0));
    }
    Ok(Mat::from_columns(&cols))
}

/// `{f,h}` for every pair in `family`.
pub fn bracket_gram(family: &[InvariantFunction], phi: &Representation, form: &InvariantForm) -> Result<Mat> {
    let ctx = BracketContext::new_pinv(phi, form)?;
    Ok(ctx.gram(&differential_matrix(family, phi)?))
}

/// Cyclic Jacobi sums for index triples into `functions`, sharing all
/// finite-difference evaluations of the chain-level pairing.
pub fn jacobi_residuals(
    functions: &[InvariantFunction],
    triples: &[[usize; 3]],
    phi: &Representation,
    form: &InvariantForm,
) -> Result<Vec<f64>> {
    let ctx = BracketContext::new(phi, form)?;
    let (frame, core) = ctx.pairing.frame();
    let m = frame.ncols();
    let n = functions.len();
    let base = differential_matrix(functions, phi)?;
    // frame coordinates of every differential at the base point
    let base_frame = frame.transpose() * &base;

    // diamond Grams at ±h, ±2h along each frame direction
    let steps = [JACOBI_STEP, -JACOBI_STEP, 2.0 * JACOBI_STEP, -2.0 * JACOBI_STEP];
    let grams: Vec<Vec<Mat>> = (0..m)
        .into_par_iter()
        .map(|j| {
            let dir: Vec<f64> = frame.column(j).iter().cloned().collect();
            steps
                .iter()
                .map(|&t| {
                    let psi = phi.perturbed(&dir, t);
                    let d = differential_matrix(functions, &psi)?;
                    let tensor = BorderedPairing::new(&psi, form)?.tensor();
                    Ok(d.transpose() * tensor * d)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    // directional derivatives of the pairwise diamond along each frame column
    let derivative = |a: usize, b: usize| -> Vector {
        Vector::from_fn(m, |j, _| {
            let g = &grams[j];
            let h = JACOBI_STEP;
            let fine = (g[0][(a, b)] - g[1][(a, b)]) / (2.0 * h);
            let coarse = (g[2][(a, b)] - g[3][(a, b)]) / (4.0 * h);
            (4.0 * fine - coarse) / 3.0
        })
    };
    let mut out = Vec::with_capacity(triples.len());
    for &[a, b, c] in triples {
        if a >= n || b >= n || c >= n {
            return Err(Error::IndexOutOfRange {
                index: a.max(b).max(c),
                rank: n,
            });
        }
        let mut total = 0.0;
        for (p, q, r) in [(a, b, c), (b, c, a), (c, a, b)] {
            total += derivative(p, q).dot(&(&core * base_frame.column(r)));
        }
        out.push(total.abs());
    }
    Ok(out)
}

/// `|{{f,h},k} + {{h,k},f} + {{k,f},h}|` at `φ`.
pub fn jacobi_residual(
    f: &InvariantFunction,
    h: &InvariantFunction,
    k: &InvariantFunction,
    phi: &Representation,
    form: &InvariantForm,
) -> Result<f64> {
    let functions = [f.clone(), h.clone(), k.clone()];
    Ok(jacobi_residuals(&functions, &[[0, 1, 2]], phi, form)?[0])
}

/// `max_j |{f, h_j}|` over a probe family.
pub fn casimir_residual(
    f: &InvariantFunction,
    phi: &Representation,
    form: &InvariantForm,
    family: &[InvariantFunction],
) -> Result<f64> {
    let ctx = BracketContext::new(phi, form)?;
    let df = f.differential(phi)?;
    family.iter().try_fold(0.0f64, |acc, h| {
        Ok(acc.max(ctx.bracket_differentials(&df, &h.differential(phi)?).abs()))
    })
}

/// Default probe family size: generator traces, pair products and `2ℓ` random words.
pub fn default_family_size(genus: usize) -> usize {
    let r = 2 * genus;
    r + r * (r - 1) / 2 + r
}

/// Trace functions: `tr(z_i)`, then `tr(z_i z_j)` for `i < j`, then traces of
/// seeded random reduced words of length 3 to 6, truncated to `size`.
pub fn probe_family(genus: usize, size: usize, seed: u64) -> Vec<InvariantFunction> {
    let r = 2 * genus;
    let mut out: Vec<InvariantFunction> = (0..r).map(|i| InvariantFunction::trace(Word::generator(i))).collect();
    for i in 0..r {
        for j in i + 1..r {
            out.push(InvariantFunction::trace(Word::generator(i).mul(&Word::generator(j))));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < size {
        let len = rng.random_range(3..=6);
        let mut letters: Vec<Letter> = Vec::with_capacity(len);
        while letters.len() < len {
            let l = Letter::new(rng.random_range(0..r), rng.random_bool(0.5));
            if letters.last() == Some(&l.inv()) {
                continue;
            }
            letters.push(l);
        }
        let w = Word::reduce(letters);
        if !w.is_identity() {
            out.push(InvariantFunction::trace(w));
        }
    }
    out.truncate(size);
    out
}
