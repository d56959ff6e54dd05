//! Points of `Hom(F, G) = G^{2ℓ}` and the relator-constrained subset
//! `{φ : r(φ) = c}`, with sampling, conjugation and orbit-type data.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fox::{eval_word_images, relator_differential, Relator, Word};
use crate::lie::{GroupKind, LieGroupSpec};
use crate::linalg::{null_space, pinv_solve, CMat, Mat, Vector};

/// Relator residual below which a tuple counts as a member.
pub const MEMBERSHIP_TOL: f64 = 1e-8;
/// Residual the Newton projection aims for.
pub const NEWTON_TARGET: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 100;
pub const NEWTON_MAX_RESTARTS: usize = 20;

/// A tuple `(φ(x1), φ(y1), ..., φ(yL))` together with its central target.
#[derive(Clone, Debug)]
pub struct Representation {
    spec: Arc<LieGroupSpec>,
    relator: Arc<Relator>,
    images: Vec<CMat>,
    central: CMat,
}

impl Representation {
    pub fn new(spec: Arc<LieGroupSpec>, genus: usize, images: Vec<CMat>, central: CMat) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidInput("genus must be positive".into()));
        }
        if images.len() != 2 * genus {
            return Err(Error::InvalidInput(format!(
                "genus {genus} needs {} images, got {}",
                2 * genus,
                images.len()
            )));
        }
        for (i, m) in images.iter().enumerate() {
            let res = spec.element_residual(m);
            if res > 1e-8 {
                return Err(Error::InvalidInput(format!(
                    "image {} is not in {} (residual {res:.3e})",
                    crate::fox::generator_name(i),
                    spec.kind()
                )));
            }
        }
        if !spec.is_central_element(&central) {
            return Err(Error::InvalidInput("central target is not central in G".into()));
        }
        Ok(Self::from_parts(spec, Arc::new(Relator::new(genus)), images, central))
    }

    fn from_parts(spec: Arc<LieGroupSpec>, relator: Arc<Relator>, images: Vec<CMat>, central: CMat) -> Self {
        Representation {
            spec,
            relator,
            images,
            central,
        }
    }

    /// Same group, genus and target with new images (not validated).
    pub fn with_images(&self, images: Vec<CMat>) -> Self {
        Self::from_parts(self.spec.clone(), self.relator.clone(), images, self.central.clone())
    }

    pub fn spec(&self) -> &LieGroupSpec {
        &self.spec
    }

    pub fn spec_arc(&self) -> &Arc<LieGroupSpec> {
        &self.spec
    }

    pub fn genus(&self) -> usize {
        self.relator.genus()
    }

    /// Number of generators `2ℓ`.
    pub fn rank(&self) -> usize {
        self.images.len()
    }

    /// Dimension `2ℓ·dim g` of the tangent and cochain spaces.
    pub fn tangent_dim(&self) -> usize {
        self.rank() * self.spec.dim()
    }

    pub fn relator(&self) -> &Relator {
        &self.relator
    }

    pub fn images(&self) -> &[CMat] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &CMat {
        &self.images[i]
    }

    pub fn central(&self) -> &CMat {
        &self.central
    }

    pub fn eval(&self, w: &Word) -> Result<CMat> {
        eval_word_images(w, &self.images)
    }

    pub fn relator_value(&self) -> CMat {
        eval_word_images(self.relator.word(), &self.images).expect("relator alphabet matches")
    }

    /// `‖r(φ) − c‖` in the Frobenius norm.
    pub fn relator_residual(&self) -> f64 {
        (self.relator_value() - &self.central).norm()
    }

    pub fn is_member(&self) -> bool {
        self.relator_residual() <= MEMBERSHIP_TOL
    }

    /// Largest group-membership residual of the images.
    pub fn element_residual(&self) -> f64 {
        self.images
            .iter()
            .map(|m| self.spec.element_residual(m))
            .fold(0.0, f64::max)
    }

    /// `φ(z_i) exp(t X_i)` for a stacked left-translated direction `x`.
    pub fn perturbed(&self, x: &[f64], t: f64) -> Self {
        let n = self.spec.dim();
        let images = self
            .images
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let xi: Vec<f64> = x[i * n..(i + 1) * n].iter().map(|v| v * t).collect();
                m * self.spec.exp(&xi)
            })
            .collect();
        self.with_images(images)
    }

    /// Pulls back along an endomorphism of the free group: `(φ∘β)(z_i) = φ(β(z_i))`.
    pub fn precompose(&self, images: &[Word]) -> Result<Self> {
        let new = images
            .iter()
            .map(|w| self.eval(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.with_images(new))
    }

    pub fn to_data(&self) -> RepresentationData {
        RepresentationData {
            group: self.spec.kind().clone(),
            genus: self.genus(),
            central: MatrixData::from_matrix(&self.central),
            images: self.images.iter().map(MatrixData::from_matrix).collect(),
        }
    }

    pub fn from_data(data: &RepresentationData) -> Result<Self> {
        let spec = Arc::new(LieGroupSpec::new(data.group.clone()));
        let images = data
            .images
            .iter()
            .map(MatrixData::to_matrix)
            .collect::<Result<Vec<_>>>()?;
        Self::new(spec, data.genus, images, data.central.to_matrix()?)
    }
}

/// Row-major real and imaginary parts of a complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixData {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixData {
    pub fn from_matrix(m: &CMat) -> Self {
        let mut re = Vec::with_capacity(m.len());
        let mut im = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        MatrixData {
            rows: m.nrows(),
            cols: m.ncols(),
            re,
            im,
        }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let n = self.rows * self.cols;
        if self.re.len() != n || self.im.len() != n {
            return Err(Error::InvalidInput(format!(
                "matrix data has {} real and {} imaginary entries, expected {n}",
                self.re.len(),
                self.im.len()
            )));
        }
        Ok(CMat::from_fn(self.rows, self.cols, |i, j| {
            let k = i * self.cols + j;
            Complex64::new(self.re[k], self.im[k])
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationData {
    pub group: GroupKind,
    pub genus: usize,
    pub central: MatrixData,
    pub images: Vec<MatrixData>,
}

/// Parses a central element name (`I` or `-I`) for the given group.
pub fn parse_central(spec: &LieGroupSpec, name: &str) -> Result<CMat> {
    let scalar = match name.trim() {
        "I" | "+I" | "1" => 1.0,
        "-I" | "-1" => -1.0,
        other => {
            return Err(Error::config(
                "central",
                format!("unknown central element `{other}` (expected `I` or `-I`)"),
            ))
        }
    };
    spec.scalar_element(scalar).ok_or_else(|| {
        Error::config(
            "central",
            format!("`{}` is not an element of {}", name.trim(), spec.kind()),
        )
    })
}

/// Uniformly random tuple in `G^{2ℓ}` (no relator constraint), target `c = I`.
pub fn random_tuple<R: Rng + ?Sized>(spec: &Arc<LieGroupSpec>, genus: usize, rng: &mut R) -> Representation {
    let images = (0..2 * genus).map(|_| spec.random_element(rng)).collect();
    Representation::from_parts(spec.clone(), Arc::new(Relator::new(genus)), images, spec.identity())
}

/// Newton projection onto `{r = c}` using the pseudo-inverse of the relator differential.
///
/// Returns the projected tuple and the residual history.
pub fn newton_project(phi: &Representation) -> (Representation, Vec<f64>) {
    let spec = phi.spec();
    let mut cur = phi.clone();
    let mut res = cur.relator_residual();
    let mut history = vec![res];
    for _ in 0..NEWTON_MAX_ITER {
        if res <= NEWTON_TARGET {
            break;
        }
        let err = spec.log(&(cur.relator_value().adjoint() * cur.central()));
        let d = relator_differential(&cur);
        let x = pinv_solve(&d, &Vector::from_vec(err));
        let mut step = 1.0;
        loop {
            let trial = cur.perturbed(x.as_slice(), step);
            let trial_res = trial.relator_residual();
            if trial_res < res || step < 1e-3 {
                cur = trial;
                res = trial_res;
                break;
            }
            step *= 0.5;
        }
        history.push(res);
    }
    (cur, history)
}

/// A fixed number of undamped Newton steps toward `{r = c}`. Unlike
/// `newton_project` this is a smooth map of the starting tuple, which keeps
/// integrators that re-project after every step at their nominal order.
pub fn newton_correct(phi: &Representation, steps: usize) -> Representation {
    let spec = phi.spec();
    let mut cur = phi.clone();
    for _ in 0..steps {
        let err = spec.log(&(cur.relator_value().adjoint() * cur.central()));
        let x = pinv_solve(&relator_differential(&cur), &Vector::from_vec(err));
        cur = cur.perturbed(x.as_slice(), 1.0);
    }
    cur
}

/// Samples a point of `{φ : r(φ) = c}` deterministically from `seed`.
pub fn sample_hom_xi(spec: &Arc<LieGroupSpec>, genus: usize, central: &CMat, seed: u64) -> Result<Representation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_hom_xi_with(spec, genus, central, &mut rng)
}

pub fn sample_hom_xi_with<R: Rng + ?Sized>(
    spec: &Arc<LieGroupSpec>,
    genus: usize,
    central: &CMat,
    rng: &mut R,
) -> Result<Representation> {
    if genus == 0 {
        return Err(Error::InvalidInput("genus must be positive".into()));
    }
    if !spec.is_central_element(central) {
        return Err(Error::config("central", "target is not a central element of G"));
    }
    let mut last = f64::INFINITY;
    for _ in 0..NEWTON_MAX_RESTARTS {
        let mut start = random_tuple(spec, genus, rng);
        start.central = central.clone();
        let (phi, history) = newton_project(&start);
        last = *history.last().unwrap();
        if last <= 1e-10 && phi.element_residual() <= 1e-10 {
            return Ok(phi);
        }
    }
    Err(Error::SamplingFailed {
        restarts: NEWTON_MAX_RESTARTS,
        residual: last,
    })
}

/// All `2^{2ℓ}` tuples with entries in `{±I}` (target `I`).
pub fn central_tuples(spec: &Arc<LieGroupSpec>, genus: usize) -> Result<Vec<Representation>> {
    let plus = spec.identity();
    let minus = spec
        .scalar_element(-1.0)
        .ok_or_else(|| Error::InvalidInput(format!("-I is not in {}", spec.kind())))?;
    let rank = 2 * genus;
    let relator = Arc::new(Relator::new(genus));
    Ok((0..1usize << rank)
        .map(|mask| {
            let images = (0..rank)
                .map(|i| if mask >> i & 1 == 1 { minus.clone() } else { plus.clone() })
                .collect();
            Representation::from_parts(spec.clone(), relator.clone(), images, plus.clone())
        })
        .collect())
}

/// Random tuple of commuting elements on a common one-parameter subgroup,
/// conjugated by a random element. Satisfies `r = I` exactly.
pub fn sample_abelian<R: Rng + ?Sized>(spec: &Arc<LieGroupSpec>, genus: usize, rng: &mut R) -> Representation {
    let h = spec.random_algebra(rng);
    let norm = h.iter().map(|v| v * v).sum::<f64>().sqrt();
    let x = spec.random_element(rng);
    let images = (0..2 * genus)
        .map(|_| {
            let t: f64 = rng.random_range(0.2..std::f64::consts::PI - 0.2);
            let coeffs: Vec<f64> = h.iter().map(|v| v / norm * t * std::f64::consts::SQRT_2).collect();
            &x * spec.exp(&coeffs) * x.adjoint()
        })
        .collect();
    Representation::from_parts(spec.clone(), Arc::new(Relator::new(genus)), images, spec.identity())
}

/// Entrywise conjugation `x φ(z_i) x^-1`.
pub fn conjugate(phi: &Representation, x: &CMat) -> Representation {
    let xi = x.adjoint();
    phi.with_images(phi.images.iter().map(|m| x * m * &xi).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StratumLabel {
    Irreducible,
    AbelianNoncentral,
    Central,
    Reducible,
}

impl fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StratumLabel::Irreducible => "irreducible",
            StratumLabel::AbelianNoncentral => "abelian-noncentral",
            StratumLabel::Central => "central",
            StratumLabel::Reducible => "reducible",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitType {
    /// Dimension of the stabilizer algebra, `dim H⁰`.
    pub h0: usize,
    pub label: StratumLabel,
}

/// The coboundary `d⁰ Y = (Y − Ad(φ(z_i))^-1 Y)_i` as a `2ℓn × n` matrix.
pub fn coboundary0(phi: &Representation) -> Mat {
    let spec = phi.spec();
    let n = spec.dim();
    let mut d0 = Mat::zeros(phi.tangent_dim(), n);
    let id = Mat::identity(n, n);
    for (i, m) in phi.images().iter().enumerate() {
        d0.view_mut((i * n, 0), (n, n))
            .copy_from(&(&id - spec.ad(&m.adjoint())));
    }
    d0
}

pub fn orbit_type(phi: &Representation) -> OrbitType {
    let spec = phi.spec();
    let kernel = null_space(&coboundary0(phi));
    let h0 = kernel.ncols();
    let label = if h0 == spec.dim() {
        StratumLabel::Central
    } else if h0 <= spec.center_dim() {
        StratumLabel::Irreducible
    } else {
        let cols: Vec<Vec<f64>> = (0..h0).map(|j| kernel.column(j).iter().cloned().collect()).collect();
        let abelian = cols.iter().enumerate().all(|(a, u)| {
            cols[a + 1..]
                .iter()
                .all(|v| spec.lie_bracket(u, v).iter().all(|x| x.abs() < 1e-8))
        });
        if abelian {
            StratumLabel::AbelianNoncentral
        } else {
            StratumLabel::Reducible
        }
    };
    OrbitType { h0, label }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn su2() -> Arc<LieGroupSpec> {
        Arc::new(LieGroupSpec::su2())
    }

    #[test]
    fn sampling_hits_the_relator_constraint() {
        for (spec, genus, c) in [
            (su2(), 2, "I"),
            (su2(), 1, "-I"),
            (su2(), 3, "-I"),
            (Arc::new(LieGroupSpec::u2()), 2, "-I"),
            (Arc::new(LieGroupSpec::so3()), 2, "I"),
        ] {
            let central = parse_central(&spec, c).unwrap();
            for seed in 0..20 {
                let phi = sample_hom_xi(&spec, genus, &central, seed).unwrap();
                assert!(phi.relator_residual() <= 1e-10);
                assert!(phi.element_residual() <= 1e-10);
            }
        }
    }

    #[test]
    fn u1_needs_no_projection() {
        let spec = Arc::new(LieGroupSpec::u1());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let phi = random_tuple(&spec, 3, &mut rng);
        assert_eq!(phi.relator_residual(), 0.0);
        let (_, history) = newton_project(&phi);
        assert_eq!(history.len(), 1);
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = su2();
        let a = sample_hom_xi(&spec, 2, &spec.identity(), 17).unwrap();
        let b = sample_hom_xi(&spec, 2, &spec.identity(), 17).unwrap();
        assert_eq!(a.images(), b.images());
    }

    #[test]
    fn newton_converges_quadratically() {
        let spec = su2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phi = sample_hom_xi_with(&spec, 2, &spec.identity(), &mut rng).unwrap();
        let x: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (_, history) = newton_project(&phi.perturbed(&x, 1e-2));
        let late: Vec<f64> = history.windows(2).filter(|w| w[1] > 1e-14).map(|w| w[1] / w[0]).collect();
        assert!(!late.is_empty());
        assert!(late.iter().all(|&r| r <= 0.1), "ratios {late:?}");
    }

    #[test]
    fn central_parsing() {
        let spec = su2();
        assert!(parse_central(&spec, "-I").is_ok());
        match parse_central(&spec, "J") {
            Err(Error::Config { field, .. }) => assert_eq!(field, "central"),
            other => panic!("unexpected {other:?}"),
        }
        let so3 = LieGroupSpec::so3();
        assert!(matches!(parse_central(&so3, "-I"), Err(Error::Config { .. })));
    }

    #[test]
    fn orbit_type_examples() {
        let spec = su2();
        let phi = sample_hom_xi(&spec, 2, &spec.identity(), 1).unwrap();
        assert_eq!(orbit_type(&phi), OrbitType { h0: 0, label: StratumLabel::Irreducible });
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ab = sample_abelian(&spec, 2, &mut rng);
        assert!(ab.relator_residual() < 1e-12);
        assert_eq!(orbit_type(&ab), OrbitType { h0: 1, label: StratumLabel::AbelianNoncentral });
        let tuples = central_tuples(&spec, 2).unwrap();
        assert_eq!(tuples.len(), 16);
        for t in &tuples {
            assert_eq!(orbit_type(t), OrbitType { h0: 3, label: StratumLabel::Central });
        }
        let u2 = Arc::new(LieGroupSpec::u2());
        let phi = sample_hom_xi(&u2, 2, &u2.identity(), 1).unwrap();
        assert_eq!(orbit_type(&phi).label, StratumLabel::Irreducible);
        assert_eq!(orbit_type(&sample_abelian(&u2, 2, &mut rng)).label, StratumLabel::AbelianNoncentral);
    }

    #[test]
    fn conjugation_examples() {
        let spec = su2();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let phi = sample_hom_xi_with(&spec, 2, &spec.identity(), &mut rng).unwrap();
        assert_eq!(conjugate(&phi, &spec.identity()).images(), phi.images());
        let minus = spec.scalar_element(-1.0).unwrap();
        let back = conjugate(&phi, &minus);
        for (a, b) in back.images().iter().zip(phi.images()) {
            assert!((a - b).norm() < 1e-15);
        }
        let x = spec.random_element(&mut rng);
        let w: Word = "x1*y2^-1*x2*y1".parse().unwrap();
        let lhs = conjugate(&phi, &x).eval(&w).unwrap();
        let rhs = &x * phi.eval(&w).unwrap() * x.adjoint();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let spec = su2();
        let phi = sample_hom_xi(&spec, 2, &spec.identity(), 5).unwrap();
        let text = serde_json::to_string(&phi.to_data()).unwrap();
        let back: RepresentationData = serde_json::from_str(&text).unwrap();
        let psi = Representation::from_data(&back).unwrap();
        for (a, b) in phi.images().iter().zip(psi.images()) {
            assert_eq!(a, b);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn orbit_type_is_conjugation_invariant(seed in 0u64..1000, kind in 0usize..3) {
            let spec = su2();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let phi = match kind {
                0 => sample_hom_xi_with(&spec, 2, &spec.identity(), &mut rng).unwrap(),
                1 => sample_abelian(&spec, 2, &mut rng),
                _ => central_tuples(&spec, 2).unwrap()[(seed % 16) as usize].clone(),
            };
            let t = orbit_type(&phi);
            for _ in 0..4 {
                let x = spec.random_element(&mut rng);
                prop_assert_eq!(orbit_type(&conjugate(&phi, &x)), t);
            }
        }
    }
}
