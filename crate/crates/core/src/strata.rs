//! Rank scans of the bracket over orbit-type strata, the Kummer census for
//! SU(2) genus 2, and mapping-class pullback checks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bracket::{bracket, bracket_gram, probe_family};
use crate::error::{Error, Result};
use crate::fox::{Relator, Word};
use crate::function::InvariantFunction;
use crate::homology::build_complex;
use crate::lie::{InvariantForm, LieGroupSpec};
use crate::linalg::singular_values;
use crate::rep::{central_tuples, orbit_type, sample_abelian, sample_hom_xi, Representation, StratumLabel};

/// Singular values below this fraction of the largest do not count toward the rank.
pub const RANK_RTOL: f64 = 1e-6;
/// Absolute floor so that an all-noise Gram has rank zero.
pub const RANK_ATOL: f64 = 1e-9;
/// Reported gaps are capped here so that reports stay finite.
pub const GAP_CAP: f64 = 1e300;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub seed: u64,
    pub orbit_type: StratumLabel,
    pub h0: usize,
    pub h1: usize,
    pub rank: usize,
    /// `σ_rank / σ_{rank+1}` of the bracket Gram (with `σ_0 = 1`).
    pub sv_gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankResult {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub gap: f64,
}

/// Rank of the bracket Gram over a probe family.
pub fn poisson_rank(phi: &Representation, form: &InvariantForm, family: &[InvariantFunction]) -> Result<RankResult> {
    let gram = bracket_gram(family, phi, form)?;
    let sv = singular_values(&gram);
    let top = sv.first().copied().unwrap_or(0.0);
    let cutoff = (RANK_RTOL * top).max(RANK_ATOL);
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    let above = if rank == 0 { 1.0 } else { sv[rank - 1] };
    let below = sv.get(rank).copied().unwrap_or(0.0);
    let gap = if below > 0.0 { (above / below).min(GAP_CAP) } else { GAP_CAP };
    Ok(RankResult {
        rank,
        singular_values: sv,
        gap,
    })
}

/// Orbit type, cohomology and bracket rank at one point.
pub fn scan_point(seed: u64, phi: &Representation, form: &InvariantForm, family: &[InvariantFunction]) -> Result<ScanRecord> {
    let ot = orbit_type(phi);
    let h1 = build_complex(phi).h1;
    let r = poisson_rank(phi, form, family)?;
    Ok(ScanRecord {
        seed,
        orbit_type: ot.label,
        h0: ot.h0,
        h1,
        rank: r.rank,
        sv_gap: r.gap,
    })
}

/// Samples one member per seed and scans it; records come back in seed order.
pub fn rank_scan(
    spec: &Arc<LieGroupSpec>,
    genus: usize,
    central: &crate::linalg::CMat,
    form: &InvariantForm,
    seeds: &[u64],
    family: &[InvariantFunction],
) -> Result<Vec<ScanRecord>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let phi = sample_hom_xi(spec, genus, central, seed)?;
            scan_point(seed, &phi, form, family)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusCounts {
    pub abelian: usize,
    pub irreducible: usize,
}

impl Default for CensusCounts {
    fn default() -> Self {
        CensusCounts {
            abelian: 50,
            irreducible: 50,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KummerReport {
    pub records: Vec<ScanRecord>,
    /// Human-readable descriptions of records whose rank is not the expected one.
    pub violations: Vec<String>,
    pub min_gap: f64,
}

impl KummerReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Expected bracket rank on each stratum of the SU(2) genus-2 character variety.
pub fn expected_kummer_rank(label: StratumLabel) -> Option<usize> {
    match label {
        StratumLabel::Central => Some(0),
        StratumLabel::AbelianNoncentral => Some(4),
        StratumLabel::Irreducible => Some(6),
        StratumLabel::Reducible => None,
    }
}

/// Scans the 16 central tuples, then seeded abelian and irreducible samples of
/// `Hom(π₁, SU(2))` in genus 2. Rank violations are collected, not raised.
pub fn kummer_census(seed: u64, counts: CensusCounts, family: &[InvariantFunction]) -> Result<KummerReport> {
    let spec = Arc::new(LieGroupSpec::su2());
    let form = InvariantForm::reference(&spec);
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let abelian_seeds: Vec<u64> = (0..counts.abelian).map(|_| master.random()).collect();
    let irreducible_seeds: Vec<u64> = (0..counts.irreducible).map(|_| master.random()).collect();

    let mut points: Vec<(u64, Representation)> = central_tuples(&spec, 2)?
        .into_iter()
        .enumerate()
        .map(|(mask, t)| (mask as u64, t))
        .collect();
    for &s in &abelian_seeds {
        points.push((s, sample_abelian(&spec, 2, &mut ChaCha8Rng::seed_from_u64(s))));
    }
    let irreducible = irreducible_seeds
        .par_iter()
        .map(|&s| Ok((s, sample_hom_xi(&spec, 2, &spec.identity(), s)?)))
        .collect::<Result<Vec<_>>>()?;
    points.extend(irreducible);

    let records = points
        .par_iter()
        .map(|(s, phi)| scan_point(*s, phi, &form, family))
        .collect::<Result<Vec<_>>>()?;
    let violations = records
        .iter()
        .filter_map(|r| match expected_kummer_rank(r.orbit_type) {
            Some(k) if k == r.rank => None,
            Some(k) => Some(format!("seed {} ({}): rank {} but expected {k}", r.seed, r.orbit_type, r.rank)),
            None => Some(format!("seed {} has unexpected orbit type {}", r.seed, r.orbit_type)),
        })
        .collect();
    let min_gap = records.iter().map(|r| r.sv_gap).fold(f64::INFINITY, f64::min);
    Ok(KummerReport {
        records,
        violations,
        min_gap,
    })
}

/// An endomorphism of the free group on `2ℓ` generators sending the surface
/// relator to a conjugate of itself or of its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct MappingClass {
    name: String,
    images: Vec<Word>,
    /// `+1` when the relator goes to a conjugate of itself, `-1` for its inverse.
    orientation: i32,
    /// Whether the relator is fixed as a word, not merely up to conjugation.
    exact: bool,
}

impl MappingClass {
    pub fn new(name: impl Into<String>, genus: usize, images: Vec<Word>) -> Result<Self> {
        if images.len() != 2 * genus {
            return Err(Error::InvalidInput(format!(
                "genus {genus} needs {} generator images, got {}",
                2 * genus,
                images.len()
            )));
        }
        if let Some(g) = images.iter().filter_map(Word::max_generator).max() {
            if g >= 2 * genus {
                return Err(Error::AlphabetMismatch {
                    generator: g + 1,
                    rank: 2 * genus,
                });
            }
        }
        let r = Relator::new(genus).word().clone();
        let image = r.substitute(&images);
        let (orientation, exact) = if image == r {
            (1, true)
        } else if image.is_conjugate_to(&r) {
            (1, false)
        } else if image == r.inverse() {
            (-1, true)
        } else if image.is_conjugate_to(&r.inverse()) {
            (-1, false)
        } else {
            return Err(Error::RelatorNotPreserved);
        };
        Ok(MappingClass {
            name: name.into(),
            images,
            orientation,
            exact,
        })
    }

    /// `y_k ↦ y_k x_k`, all other generators fixed.
    pub fn dehn_twist(genus: usize, handle: usize) -> Result<Self> {
        if handle == 0 || handle > genus {
            return Err(Error::IndexOutOfRange {
                index: handle,
                rank: genus,
            });
        }
        let mut images: Vec<Word> = (0..2 * genus).map(Word::generator).collect();
        images[2 * handle - 1] = Word::y(handle).mul(&Word::x(handle));
        Self::new(format!("twist-y{handle}"), genus, images)
    }

    /// `x_k ↦ y_{ℓ+1-k}`, `y_k ↦ x_{ℓ+1-k}`: reverses orientation.
    pub fn reflection(genus: usize) -> Result<Self> {
        let images = (1..=genus)
            .flat_map(|k| [Word::y(genus + 1 - k), Word::x(genus + 1 - k)])
            .collect();
        Self::new("reflection", genus, images)
    }

    /// Parses generator images given as word strings.
    pub fn from_strings(name: impl Into<String>, genus: usize, images: &[String]) -> Result<Self> {
        let words = images.iter().map(|s| s.parse()).collect::<Result<Vec<Word>>>()?;
        Self::new(name, genus, words)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn orientation(&self) -> i32 {
        self.orientation
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// `φ ∘ β`.
    pub fn act(&self, phi: &Representation) -> Result<Representation> {
        phi.precompose(&self.images)
    }

    pub fn pullback(&self, f: &InvariantFunction) -> InvariantFunction {
        f.pullback(&self.images)
    }
}

/// `|{f∘β*, h∘β*}(φ) − ε {f,h}(φ∘β)|` with `ε` the orientation of `β`.
pub fn mcg_pullback_check(
    beta: &MappingClass,
    f: &InvariantFunction,
    h: &InvariantFunction,
    phi: &Representation,
    form: &InvariantForm,
) -> Result<f64> {
    if beta.orientation < 0 {
        let c = phi.central();
        if (c * c - phi.spec().identity()).norm() > 1e-12 {
            return Err(Error::InvalidInput(
                "orientation-reversing classes need a central target with c = c^-1".into(),
            ));
        }
    }
    let pulled = bracket(&beta.pullback(f), &beta.pullback(h), phi, form)?.value;
    let pushed = bracket(f, h, &beta.act(phi)?, form)?.value;
    Ok((pulled - beta.orientation as f64 * pushed).abs())
}

/// Default family for scans of genus `genus`.
pub fn default_family(genus: usize, seed: u64) -> Vec<InvariantFunction> {
    probe_family(genus, crate::bracket::default_family_size(genus), seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::parse_central;

    fn f(s: &str) -> InvariantFunction {
        InvariantFunction::parse(s).unwrap()
    }

    #[test]
    fn mapping_class_classification() {
        let t = MappingClass::dehn_twist(2, 1).unwrap();
        assert_eq!(t.images()[1].to_string(), "y1*x1");
        assert!(t.is_exact() && t.orientation() == 1);
        let r = MappingClass::reflection(2).unwrap();
        assert_eq!(r.orientation(), -1);
        let shift = MappingClass::from_strings(
            "shift",
            1,
            &["y1*x1*y1^-1".to_string(), "y1".to_string()],
        )
        .unwrap();
        assert_eq!(shift.orientation(), 1);
        assert!(!shift.is_exact());
        let bad = MappingClass::from_strings("bad", 1, &["x1^2".to_string(), "y1".to_string()]);
        assert!(matches!(bad, Err(Error::RelatorNotPreserved)));
        assert!(MappingClass::dehn_twist(2, 3).is_err());
        assert!(MappingClass::from_strings("short", 2, &["x1".to_string()]).is_err());
    }

    #[test]
    fn dehn_twist_pullback() {
        let spec = Arc::new(LieGroupSpec::su2());
        let form = InvariantForm::reference(&spec);
        let beta = MappingClass::dehn_twist(2, 1).unwrap();
        for seed in 0..5 {
            let phi = sample_hom_xi(&spec, 2, &spec.identity(), seed).unwrap();
            let res = mcg_pullback_check(&beta, &f("tr(y1)"), &f("tr(x1*y2)"), &phi, &form).unwrap();
            assert!(res < 1e-8, "{res}");
        }
    }

    #[test]
    fn reflection_flips_the_bracket() {
        let spec = Arc::new(LieGroupSpec::su2());
        let form = InvariantForm::reference(&spec);
        let beta = MappingClass::reflection(2).unwrap();
        let phi = sample_hom_xi(&spec, 2, &spec.identity(), 3).unwrap();
        let res = mcg_pullback_check(&beta, &f("tr(x1)"), &f("tr(y1*x2)"), &phi, &form).unwrap();
        assert!(res < 1e-8, "{res}");
        // i·I is central in U(2) but is not its own inverse
        let u2 = Arc::new(LieGroupSpec::u2());
        let c = u2.identity() * num_complex::Complex64::new(0.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let images = vec![u2.random_element(&mut rng), u2.random_element(&mut rng)];
        let psi = Representation::new(u2.clone(), 1, images, c).unwrap();
        let beta = MappingClass::reflection(1).unwrap();
        let err = mcg_pullback_check(&beta, &f("tr(x1)"), &f("tr(y1)"), &psi, &InvariantForm::reference(&u2));
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn small_kummer_census() {
        let family = default_family(2, 0);
        let report = kummer_census(5, CensusCounts { abelian: 5, irreducible: 5 }, &family).unwrap();
        assert_eq!(report.records.len(), 26);
        assert!(report.passed(), "{:?}", report.violations);
        assert!(report.min_gap >= 1e4, "{}", report.min_gap);
    }

    #[test]
    fn rank_is_monotone_in_family_size_and_bounded() {
        let spec = Arc::new(LieGroupSpec::su2());
        let form = InvariantForm::reference(&spec);
        for seed in 0..3 {
            let phi = sample_hom_xi(&spec, 2, &spec.identity(), seed).unwrap();
            let h1 = build_complex(&phi).h1;
            let mut last = 0;
            for size in [10, 20, 40] {
                let r = poisson_rank(&phi, &form, &probe_family(2, size, 9)).unwrap().rank;
                assert!(r >= last && r <= h1 && r.is_multiple_of(2));
                last = r;
            }
        }
    }

    #[test]
    fn scan_is_deterministic() {
        let spec = Arc::new(LieGroupSpec::su2());
        let form = InvariantForm::reference(&spec);
        let c = parse_central(&spec, "I").unwrap();
        let family = default_family(2, 0);
        let a = rank_scan(&spec, 2, &c, &form, &[1, 2, 3], &family).unwrap();
        let b = rank_scan(&spec, 2, &c, &form, &[1, 2, 3], &family).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].seed, 1);
    }
}
