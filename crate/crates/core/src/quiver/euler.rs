use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use super::field::primes;
use super::grassmannian::{count_submodules, count_table};
use super::representation::{generic_module, injective_module, projective_module, simple_module};
use super::{DimensionVector, Quiver, Representation};
use crate::error::{Error, Result};
use crate::laurent::Permutation;

pub(crate) fn serialize_biguint<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

fn serialize_bigint<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

/// A rigid module named by construction rather than by matrices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModuleSpec {
    Projective(usize),
    Injective(usize),
    Simple(usize),
    /// A generic representation of this dimension vector.
    Generic(DimensionVector),
}

impl ModuleSpec {
    pub fn dimension_vector(&self, q: &Quiver) -> Result<DimensionVector> {
        match self {
            ModuleSpec::Projective(i) => q.dim_projective(*i),
            ModuleSpec::Injective(i) => q.dim_injective(*i),
            ModuleSpec::Simple(i) => {
                q.check_vertex(*i)?;
                Ok(DimensionVector::unit(q.num_vertices(), *i))
            }
            ModuleSpec::Generic(d) => {
                if d.len() != q.num_vertices() {
                    return Err(Error::ArityMismatch {
                        expected: q.num_vertices(),
                        found: d.len(),
                    });
                }
                Ok(d.clone())
            }
        }
    }

    /// Builds a representation over `F_p`. Generic specs draw from `rng`.
    pub fn realize(&self, q: &Quiver, p: u64, trials: usize, rng: &mut ChaCha8Rng) -> Result<Representation> {
        match self {
            ModuleSpec::Projective(i) => projective_module(q, *i, p),
            ModuleSpec::Injective(i) => injective_module(q, *i, p),
            ModuleSpec::Simple(i) => simple_module(q, *i, p),
            ModuleSpec::Generic(d) => generic_module(q, d, p, trials, rng),
        }
    }

    /// Image under a vertex relabeling `i ↦ g(i)`.
    pub fn relabel(&self, g: &Permutation) -> Result<ModuleSpec> {
        let map = |i: usize| {
            if i < g.len() {
                Ok(g.apply(i))
            } else {
                Err(Error::InvalidVertex(i.to_string()))
            }
        };
        Ok(match self {
            ModuleSpec::Projective(i) => ModuleSpec::Projective(map(*i)?),
            ModuleSpec::Injective(i) => ModuleSpec::Injective(map(*i)?),
            ModuleSpec::Simple(i) => ModuleSpec::Simple(map(*i)?),
            ModuleSpec::Generic(d) => {
                if d.len() != g.len() {
                    return Err(Error::ArityMismatch {
                        expected: g.len(),
                        found: d.len(),
                    });
                }
                let mut out = vec![0; d.len()];
                for (i, &x) in d.iter().enumerate() {
                    out[g.apply(i)] = x;
                }
                ModuleSpec::Generic(DimensionVector(out))
            }
        })
    }

    fn seed_tag(&self) -> Vec<u64> {
        match self {
            ModuleSpec::Projective(i) => vec![1, *i as u64],
            ModuleSpec::Injective(i) => vec![2, *i as u64],
            ModuleSpec::Simple(i) => vec![3, *i as u64],
            ModuleSpec::Generic(d) => std::iter::once(4).chain(d.iter().map(|&x| x as u64)).collect(),
        }
    }
}

impl fmt::Display for ModuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleSpec::Projective(i) => write!(f, "P[{i}]"),
            ModuleSpec::Injective(i) => write!(f, "I[{i}]"),
            ModuleSpec::Simple(i) => write!(f, "S[{i}]"),
            ModuleSpec::Generic(d) => write!(f, "M{d}"),
        }
    }
}

/// Derives an independent RNG stream from a root seed and a task path.
pub(crate) fn stream_seed(root: u64, parts: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    parts.iter().fold(splitmix(root), |acc, &x| splitmix(acc ^ splitmix(x)))
}

/// Value at `x` of the polynomial through `(xs[i], ys[i])`.
fn lagrange_at(xs: &[u64], ys: &[BigUint], x: u64) -> BigRational {
    let x = BigInt::from(x);
    let mut total = BigRational::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        let xi = BigInt::from(*xi);
        let mut term = BigRational::from_integer(BigInt::from(yi.clone()));
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                let xj = BigInt::from(*xj);
                term *= BigRational::new(&x - &xj, &xi - &xj);
            }
        }
        total += term;
    }
    total
}

/// Euler characteristic of one quiver Grassmannian, with the evidence used to
/// obtain it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChiEntry {
    pub e: DimensionVector,
    #[serde(serialize_with = "serialize_bigint")]
    pub chi: BigInt,
    /// Degree bound `Σ e_i (d_i - e_i)` of the counting polynomial.
    pub degree_bound: usize,
    /// Primes used for interpolation.
    pub primes: Vec<u64>,
    /// Prime whose count was predicted and then checked.
    pub holdout: u64,
}

/// Euler characteristics `χ(Gr_e(M))` for every `0 <= e <= dim M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChiTable {
    pub dims: DimensionVector,
    pub entries: Vec<ChiEntry>,
    /// Primes at which generic sampling never produced a rigid module.
    pub skipped_primes: Vec<u64>,
}

impl ChiTable {
    pub fn chi(&self, e: &DimensionVector) -> Option<&BigInt> {
        self.entries.iter().find(|x| &x.e == e).map(|x| &x.chi)
    }

    /// Every `χ` is nonnegative.
    pub fn all_nonnegative(&self) -> bool {
        self.entries.iter().all(|x| x.chi >= BigInt::zero())
    }
}

/// Point counting over several primes followed by exact interpolation.
#[derive(Clone, Debug)]
pub struct EulerSolver {
    seed: u64,
    trials: usize,
    max_skipped_primes: usize,
}

impl EulerSolver {
    pub fn new(seed: u64) -> Self {
        EulerSolver {
            seed,
            trials: 200,
            max_skipped_primes: 6,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Realizes `spec` over the smallest usable primes, calling `visit` on each
    /// until it returns `false`. Returns the skipped primes.
    fn for_each_prime(
        &self,
        q: &Quiver,
        spec: &ModuleSpec,
        mut visit: impl FnMut(u64, &Representation) -> Result<bool>,
    ) -> Result<Vec<u64>> {
        let mut skipped = Vec::new();
        let mut last_error = None;
        for p in primes() {
            let mut tag = spec.seed_tag();
            tag.push(p);
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(self.seed, &tag));
            match spec.realize(q, p, self.trials, &mut rng) {
                Ok(m) => {
                    if !visit(p, &m)? {
                        return Ok(skipped);
                    }
                }
                Err(e @ Error::NotRigid { .. }) => {
                    skipped.push(p);
                    if skipped.len() > self.max_skipped_primes {
                        return Err(e);
                    }
                    last_error = Some(e);
                }
                Err(e) => return Err(e),
            }
        }
        Err(last_error.unwrap_or(Error::BudgetExceeded("ran out of primes".into())))
    }

    /// `χ(Gr_e(M))` for every `e`, sharing one set of point counts.
    pub fn chi_table(&self, q: &Quiver, spec: &ModuleSpec) -> Result<ChiTable> {
        let d = spec.dimension_vector(q)?;
        let subs = d.sub_vectors();
        let bound = |e: &DimensionVector| -> usize {
            e.iter().zip(d.iter()).map(|(a, b)| (a * (b - a)) as usize).sum()
        };
        let needed = subs.iter().map(bound).max().unwrap_or(0) + 2;
        let mut counted: Vec<(u64, BTreeMap<DimensionVector, BigUint>)> = Vec::new();
        let skipped = self.for_each_prime(q, spec, |p, m| {
            counted.push((p, count_table(m)));
            Ok(counted.len() < needed)
        })?;
        let entries = subs
            .into_iter()
            .map(|e| {
                let deg = bound(&e);
                let points: Vec<(u64, BigUint)> = counted[..deg + 2]
                    .iter()
                    .map(|(p, table)| (*p, table[&e].clone()))
                    .collect();
                interpolate(e, deg, &points)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ChiTable {
            dims: d,
            entries,
            skipped_primes: skipped,
        })
    }

    /// `χ(Gr_e(M))` for a single `e`.
    pub fn chi(&self, q: &Quiver, spec: &ModuleSpec, e: &DimensionVector) -> Result<ChiEntry> {
        let d = spec.dimension_vector(q)?;
        if e.len() != d.len() {
            return Err(Error::ArityMismatch {
                expected: d.len(),
                found: e.len(),
            });
        }
        if !e.le(&d) {
            return Err(Error::DimensionMismatch(format!("submodule dimension {e} not within {d}")));
        }
        let deg: usize = e.iter().zip(d.iter()).map(|(a, b)| (a * (b - a)) as usize).sum();
        let mut points = Vec::new();
        self.for_each_prime(q, spec, |p, m| {
            points.push((p, count_submodules(m, e)?.count));
            Ok(points.len() < deg + 2)
        })?;
        interpolate(e.clone(), deg, &points)
    }
}

/// Interpolates through the first `deg + 1` points, checks the last one, and
/// evaluates at `q = 1`.
fn interpolate(e: DimensionVector, deg: usize, points: &[(u64, BigUint)]) -> Result<ChiEntry> {
    debug_assert_eq!(points.len(), deg + 2);
    let (fit, holdout) = points.split_at(deg + 1);
    let xs: Vec<u64> = fit.iter().map(|(p, _)| *p).collect();
    let ys: Vec<BigUint> = fit.iter().map(|(_, n)| n.clone()).collect();
    let (hp, hn) = &holdout[0];
    let predicted = lagrange_at(&xs, &ys, *hp);
    if predicted != BigRational::from_integer(BigInt::from(hn.clone())) {
        return Err(Error::NotPolynomial {
            e: e.to_vec(),
            prime: *hp,
            predicted: predicted.to_string(),
            counted: hn.to_string(),
        });
    }
    let at_one = lagrange_at(&xs, &ys, 1);
    if !at_one.is_integer() {
        return Err(Error::NotIntegral {
            e: e.to_vec(),
            value: at_one.to_string(),
        });
    }
    Ok(ChiEntry {
        e,
        chi: at_one.to_integer(),
        degree_bound: deg,
        primes: xs,
        holdout: *hp,
    })
}

/// `χ(Gr_e(M))` with the given root seed.
pub fn euler_characteristic(q: &Quiver, spec: &ModuleSpec, e: &DimensionVector, seed: u64) -> Result<BigInt> {
    Ok(EulerSolver::new(seed).chi(q, spec, e)?.chi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{kronecker_quiver, Direction};
    use num_traits::One;

    fn dv(v: &[i64]) -> DimensionVector {
        DimensionVector(v.to_vec())
    }

    #[test]
    fn interpolation_recovers_polynomials() {
        // 1 + q + q^2 through q = 2, 3, 5, checked at 7, is 3 at q = 1
        let f = |q: u64| BigUint::from(1 + q + q * q);
        let points: Vec<(u64, BigUint)> = [2, 3, 5, 7].iter().map(|&p| (p, f(p))).collect();
        let entry = interpolate(dv(&[1]), 2, &points).unwrap();
        assert_eq!(entry.chi, BigInt::from(3));
        assert_eq!(entry.primes, vec![2, 3, 5]);
        assert_eq!(entry.holdout, 7);

        let mut bad = points.clone();
        bad[3].1 += 1u32;
        assert!(matches!(interpolate(dv(&[1]), 2, &bad), Err(Error::NotPolynomial { .. })));

        // q - 1 vanishes at q = 1
        let line = [(2, BigUint::from(1u32)), (3, BigUint::from(2u32)), (5, BigUint::from(4u32))];
        assert_eq!(interpolate(dv(&[1]), 1, &line).unwrap().chi, BigInt::zero());
    }

    #[test]
    fn non_integral_value_is_rejected() {
        // (q + 1) / 3 through (2, 1), (5, 2), (11, 4) is 2/3 at q = 1
        let pts = [(2, BigUint::from(1u32)), (5, BigUint::from(2u32)), (11, BigUint::from(4u32))];
        assert!(matches!(interpolate(dv(&[1]), 1, &pts), Err(Error::NotIntegral { .. })));
    }

    #[test]
    fn zero_submodule_has_chi_one() {
        let q = kronecker_quiver(2, 3).unwrap();
        for spec in [ModuleSpec::Projective(0), ModuleSpec::Injective(3), ModuleSpec::Simple(1)] {
            assert_eq!(euler_characteristic(&q, &spec, &dv(&[0; 5]), 0).unwrap(), BigInt::one());
        }
    }

    #[test]
    fn projective_v1_over_k23() {
        // submodules with one w-line and no v-part: three of them, each a point
        let q = kronecker_quiver(2, 3).unwrap();
        let table = EulerSolver::new(0).chi_table(&q, &ModuleSpec::Projective(0)).unwrap();
        let singles: BigInt = [[0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1]]
            .iter()
            .map(|e| table.chi(&dv(e)).unwrap().clone())
            .sum();
        assert_eq!(singles, BigInt::from(3));
        assert!(table.all_nonnegative());
    }

    #[test]
    fn injective_w1_over_k23() {
        let q = kronecker_quiver(2, 3).unwrap();
        let table = EulerSolver::new(0).chi_table(&q, &ModuleSpec::Injective(2)).unwrap();
        let nonzero: Vec<(&DimensionVector, &BigInt)> = table
            .entries
            .iter()
            .filter(|x| !x.chi.is_zero())
            .map(|x| (&x.e, &x.chi))
            .collect();
        let total: BigInt = nonzero.iter().map(|(_, c)| (*c).clone()).sum();
        assert_eq!(total, BigInt::from(5));
        assert_eq!(table.chi(&dv(&[1, 0, 1, 0, 0])), Some(&BigInt::one()));
        assert_eq!(table.chi(&dv(&[0, 1, 1, 0, 0])), Some(&BigInt::one()));
    }

    #[test]
    fn generic_translates_have_nonnegative_chi() {
        for (b, c) in [(1, 2), (2, 2)] {
            let q = kronecker_quiver(b, c).unwrap();
            let d = q
                .coxeter_translate(&q.dim_projective(0).unwrap(), Direction::Backward)
                .unwrap();
            let table = EulerSolver::new(42).chi_table(&q, &ModuleSpec::Generic(d)).unwrap();
            assert!(table.all_nonnegative());
            let same = EulerSolver::new(42)
                .chi_table(&q, &ModuleSpec::Generic(table.dims.clone()))
                .unwrap();
            assert_eq!(table, same);
        }
    }

    #[test]
    fn relabeling_specs() {
        let g = Permutation::transposition(5, 0, 1);
        assert_eq!(ModuleSpec::Projective(0).relabel(&g).unwrap(), ModuleSpec::Projective(1));
        assert_eq!(ModuleSpec::Injective(3).relabel(&g).unwrap(), ModuleSpec::Injective(3));
        assert_eq!(
            ModuleSpec::Generic(dv(&[2, 1, 0, 0, 0])).relabel(&g).unwrap(),
            ModuleSpec::Generic(dv(&[1, 2, 0, 0, 0]))
        );
    }
}
