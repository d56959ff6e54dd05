//! The twisted cochain complex `g → g^{2ℓ} → g` and its dual chain complex
//! `g* ← (g*)^{2ℓ} ← g*` at a representation.
//!
//! Cochains are stacked left-translated blocks in generator order. In the
//! orthonormal coordinates the coadjoint action has the same matrix as `Ad`,
//! so the boundary maps are the transposes of the coboundary maps.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fox::word_jacobian;
use crate::linalg::{column_space, null_space, singular_values, Mat, Vector};
use crate::rep::{coboundary0, Representation};

/// Residual above which a chain is not accepted as a cycle (or cocycle).
pub const CYCLE_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct CohomologyData {
    /// `d⁰ : g → g^{2ℓ}`.
    pub d0: Mat,
    /// `d¹ : g^{2ℓ} → g`.
    pub d1: Mat,
    /// `∂₁ : (g*)^{2ℓ} → g*`, equal to `d⁰ᵀ`.
    pub boundary1: Mat,
    /// `∂₂ : g* → (g*)^{2ℓ}`, equal to `d¹ᵀ`.
    pub boundary2: Mat,
    /// Orthonormal basis of `ker d¹`.
    pub cocycles: Mat,
    /// Orthonormal basis of `im d⁰`.
    pub coboundaries: Mat,
    /// Orthonormal basis of `ker d¹ ∩ (im d⁰)^⊥`; also the harmonic 1-cycles.
    pub harmonic: Mat,
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    pub d0_spectrum: Vec<f64>,
    pub d1_spectrum: Vec<f64>,
}

/// Builds the complex from the adjoint-coefficient coboundaries.
pub fn build_complex(phi: &Representation) -> CohomologyData {
    let d0 = coboundary0(phi);
    let d1 = word_jacobian(phi.relator().word(), phi).expect("relator matches representation");
    complex_from_maps(d0, d1)
}

/// Complex data from explicit coboundary matrices (used for form components).
pub fn complex_from_maps(d0: Mat, d1: Mat) -> CohomologyData {
    let n = d0.ncols();
    let cocycles = null_space(&d1);
    let coboundaries = column_space(&d0);
    let harmonic = harmonic_basis(&d0, &cocycles);
    let rank0 = coboundaries.ncols();
    let rank1 = column_space(&d1).ncols();
    CohomologyData {
        boundary1: d0.transpose(),
        boundary2: d1.transpose(),
        h0: n - rank0,
        h1: harmonic.ncols(),
        h2: n - rank1,
        d0_spectrum: singular_values(&d0),
        d1_spectrum: singular_values(&d1),
        d0,
        d1,
        cocycles,
        coboundaries,
        harmonic,
    }
}

/// `K · null(d⁰ᵀ K)` with `K` an orthonormal basis of `ker d¹`.
pub fn harmonic_basis(d0: &Mat, cocycles: &Mat) -> Mat {
    if cocycles.ncols() == 0 {
        return Mat::zeros(d0.nrows(), 0);
    }
    let inner = null_space(&(d0.transpose() * cocycles));
    cocycles * inner
}

impl CohomologyData {
    pub fn betti(&self) -> (usize, usize, usize) {
        (self.h0, self.h1, self.h2)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.h0 as i64 - self.h1 as i64 + self.h2 as i64
    }

    /// `‖d¹ d⁰‖`, which vanishes exactly when the relator value is central.
    pub fn complex_residual(&self) -> f64 {
        (&self.d1 * &self.d0).norm()
    }

    pub fn boundary_residual(&self) -> f64 {
        (&self.boundary1 * &self.boundary2).norm()
    }

    pub fn cycle_residual(&self, a: &Vector) -> f64 {
        (&self.boundary1 * a).norm()
    }

    pub fn cocycle_residual(&self, w: &Vector) -> f64 {
        (&self.d1 * w).norm()
    }

    pub fn harmonic_projector(&self) -> Mat {
        &self.harmonic * self.harmonic.transpose()
    }

    /// Harmonic representative of the homology class of the 1-cycle `a`.
    pub fn homology_class(&self, a: &Vector) -> Result<Vector> {
        let residual = self.cycle_residual(a);
        if residual > CYCLE_TOL {
            return Err(Error::NotACycle { residual });
        }
        Ok(&self.harmonic * (self.harmonic.transpose() * a))
    }

    /// Harmonic representative of the cohomology class of the 1-cocycle `w`.
    pub fn cohomology_class(&self, w: &Vector) -> Result<Vector> {
        let residual = self.cocycle_residual(w);
        if residual > CYCLE_TOL {
            return Err(Error::NotACocycle { residual });
        }
        Ok(&self.harmonic * (self.harmonic.transpose() * w))
    }

    /// Evaluation pairing `Σ_i w_i(a_i)` between a cocycle and a cycle.
    pub fn cap_pairing(&self, w: &Vector, a: &Vector) -> Result<f64> {
        let residual = self.cocycle_residual(w);
        if residual > CYCLE_TOL {
            return Err(Error::NotACocycle { residual });
        }
        let residual = self.cycle_residual(a);
        if residual > CYCLE_TOL {
            return Err(Error::NotACycle { residual });
        }
        Ok(w.dot(a))
    }

    /// Row for the CSV dump: Betti numbers and both spectra.
    pub fn summary(&self) -> ComplexSummary {
        ComplexSummary {
            h0: self.h0,
            h1: self.h1,
            h2: self.h2,
            complex_residual: self.complex_residual(),
            d0_spectrum: self.d0_spectrum.clone(),
            d1_spectrum: self.d1_spectrum.clone(),
        }
    }
}

pub fn homology_class(a: &Vector, data: &CohomologyData) -> Result<Vector> {
    data.homology_class(a)
}

pub fn cap_pairing(w: &Vector, a: &Vector, data: &CohomologyData) -> Result<f64> {
    data.cap_pairing(w, a)
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexSummary {
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    pub complex_residual: f64,
    pub d0_spectrum: Vec<f64>,
    pub d1_spectrum: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieGroupSpec;
    use crate::rep::{central_tuples, random_tuple, sample_abelian, sample_hom_xi};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn random_vec<R: Rng>(rng: &mut R, n: usize) -> Vector {
        Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn central_tuple_complex_is_zero() {
        let spec = Arc::new(LieGroupSpec::su2());
        for genus in 1..=3 {
            for t in central_tuples(&spec, genus).unwrap().iter().take(4) {
                let data = build_complex(t);
                assert!(data.d0.norm() < 1e-14 && data.d1.norm() < 1e-14);
                assert_eq!(data.betti(), (3, 6 * genus, 3));
            }
        }
    }

    #[test]
    fn irreducible_su2_genus_two() {
        let spec = Arc::new(LieGroupSpec::su2());
        let phi = sample_hom_xi(&spec, 2, &spec.identity(), 3).unwrap();
        let data = build_complex(&phi);
        assert_eq!(data.betti(), (0, 6, 0));
        assert!(data.complex_residual() < 1e-9);
        assert!(data.boundary_residual() < 1e-9);
    }

    #[test]
    fn u1_has_surface_betti_numbers() {
        let spec = Arc::new(LieGroupSpec::u1());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for genus in 1..=3 {
            let data = build_complex(&random_tuple(&spec, genus, &mut rng));
            assert_eq!(data.betti(), (1, 2 * genus, 1));
        }
    }

    #[test]
    fn abelian_points_have_duality() {
        let spec = Arc::new(LieGroupSpec::su2());
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let data = build_complex(&sample_abelian(&spec, 2, &mut rng));
        assert_eq!(data.betti(), (1, 8, 1));
        assert_eq!(data.euler_characteristic(), -6);
    }

    #[test]
    fn non_members_break_the_complex() {
        let spec = Arc::new(LieGroupSpec::su2());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let phi = random_tuple(&spec, 2, &mut rng);
            assert!(build_complex(&phi).complex_residual() > 1e-3);
        }
    }

    #[test]
    fn homology_class_examples() {
        let spec = Arc::new(LieGroupSpec::su2());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let phi = sample_hom_xi(&spec, 2, &spec.identity(), 8).unwrap();
        let data = build_complex(&phi);
        let boundary = &data.boundary2 * random_vec(&mut rng, 3);
        assert!(data.homology_class(&boundary).unwrap().norm() < 1e-12);
        let h = data.harmonic.column(2).clone_owned();
        assert!((data.homology_class(&h).unwrap() - &h).norm() < 1e-12);
        let mut reps = Vec::new();
        let cycles = null_space(&data.boundary1);
        for _ in 0..10 {
            let a = &cycles * random_vec(&mut rng, cycles.ncols());
            let c = data.homology_class(&a).unwrap();
            assert!(c.norm() <= a.norm() + 1e-12);
            let c2 = data.homology_class(&c).unwrap();
            assert!((&c2 - &c).norm() < 1e-12);
            reps.push(c);
        }
        assert_eq!(crate::linalg::numerical_rank(&Mat::from_columns(&reps)), 6);
        let bad = random_vec(&mut rng, 12);
        assert!(matches!(data.homology_class(&bad), Err(Error::NotACycle { .. })));
    }

    #[test]
    fn cap_pairing_descends_and_is_nondegenerate() {
        let spec = Arc::new(LieGroupSpec::su2());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let phi = sample_hom_xi(&spec, 2, &spec.identity(), 9).unwrap();
        let data = build_complex(&phi);
        let cycles = null_space(&data.boundary1);
        for _ in 0..10 {
            let a = &cycles * random_vec(&mut rng, cycles.ncols());
            let w = &data.cocycles * random_vec(&mut rng, data.cocycles.ncols());
            let cob = &data.d0 * random_vec(&mut rng, 3);
            let bd = &data.boundary2 * random_vec(&mut rng, 3);
            assert!(data.cap_pairing(&cob, &a).unwrap().abs() < 1e-9);
            assert!(data.cap_pairing(&w, &bd).unwrap().abs() < 1e-9);
            let base = data.cap_pairing(&w, &a).unwrap();
            let shifted = data.cap_pairing(&(&w + &cob), &(&a + &bd)).unwrap();
            assert!((base - shifted).abs() < 1e-9);
        }
        let gram = data.harmonic.transpose() * &data.harmonic;
        assert!(gram.determinant().abs() > 1e-6);
    }
}
