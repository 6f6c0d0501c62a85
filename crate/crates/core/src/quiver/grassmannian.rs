use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use super::field::{gaussian_binomial, subspaces, Matrix};
use super::{DimensionVector, Representation};
use crate::error::{Error, Result};

/// Number of `F_p`-points of the quiver Grassmannian `Gr_e(M)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrassmannianCount {
    pub e: DimensionVector,
    pub prime: u64,
    #[serde(serialize_with = "crate::quiver::euler::serialize_biguint")]
    pub count: BigUint,
}

/// Enumerates subrepresentations. Subspaces at non-sink vertices are listed
/// explicitly in topological order; at a sink `t` the admissible subspaces
/// are exactly those containing the span of the incoming images, so they are
/// counted with a Gaussian binomial instead.
struct Counter<'a> {
    m: &'a Representation,
    target: Option<&'a DimensionVector>,
    non_sinks: Vec<usize>,
    sinks: Vec<usize>,
    chosen: Vec<Matrix>,
    cache: HashMap<(usize, usize), Vec<Matrix>>,
    table: BTreeMap<DimensionVector, BigUint>,
}

impl<'a> Counter<'a> {
    fn new(m: &'a Representation, target: Option<&'a DimensionVector>) -> Self {
        let q = m.quiver();
        let order = q.topological_order().expect("quiver is acyclic");
        let (sinks, non_sinks): (Vec<usize>, Vec<usize>) =
            order.into_iter().partition(|&i| q.is_sink(i));
        let n = q.num_vertices();
        Counter {
            m,
            target,
            non_sinks,
            sinks,
            chosen: (0..n).map(|i| Matrix::zeros(0, m.dims()[i] as usize)).collect(),
            cache: HashMap::new(),
            table: BTreeMap::new(),
        }
    }

    fn dims_at(&self, i: usize) -> std::ops::RangeInclusive<usize> {
        match self.target {
            Some(e) => e[i] as usize..=e[i] as usize,
            None => 0..=self.m.dims()[i] as usize,
        }
    }

    /// Span of the images of the chosen subspaces under all arrows into `t`.
    fn incoming_images(&self, t: usize) -> Matrix {
        let p = self.m.prime();
        let d = self.m.dims()[t] as usize;
        let mut span = Matrix::zeros(0, d);
        for (a, &(s, tt)) in self.m.quiver().arrows().iter().enumerate() {
            if tt == t {
                span = span.stack(&self.m.map(a).apply_rows(&self.chosen[s], p));
            }
        }
        span
    }

    fn run(&mut self, pos: usize) {
        let p = self.m.prime();
        if pos == self.non_sinks.len() {
            self.leaf();
            return;
        }
        let i = self.non_sinks[pos];
        let d = self.m.dims()[i] as usize;
        let images = self.incoming_images(i);
        for k in self.dims_at(i) {
            let candidates = self
                .cache
                .entry((d, k))
                .or_insert_with(|| subspaces(d, k, p))
                .clone();
            for u in candidates {
                if images.rows() > 0 && u.stack(&images).rank(p) != k {
                    continue;
                }
                self.chosen[i] = u;
                self.run(pos + 1);
            }
        }
        self.chosen[i] = Matrix::zeros(0, d);
    }

    fn leaf(&mut self) {
        let p = self.m.prime();
        let n = self.m.quiver().num_vertices();
        let mut partial: Vec<(DimensionVector, BigUint)> = {
            let mut e = vec![0i64; n];
            for &i in &self.non_sinks {
                e[i] = self.chosen[i].rows() as i64;
            }
            vec![(DimensionVector(e), BigUint::one())]
        };
        for &t in &self.sinks {
            let d = self.m.dims()[t] as usize;
            let r = self.incoming_images(t).rank(p);
            let mut next = Vec::new();
            for (e, count) in &partial {
                for k in self.dims_at(t) {
                    if k < r || k > d {
                        continue;
                    }
                    let mut e = e.clone();
                    e.0[t] = k as i64;
                    next.push((e, count * gaussian_binomial(d - r, k - r, p)));
                }
            }
            partial = next;
        }
        for (e, count) in partial {
            *self.table.entry(e).or_insert_with(BigUint::zero) += count;
        }
    }
}

fn check_sub(m: &Representation, e: &DimensionVector) -> Result<()> {
    if e.len() != m.dims().len() {
        return Err(Error::ArityMismatch {
            expected: m.dims().len(),
            found: e.len(),
        });
    }
    if !e.le(m.dims()) || e.iter().any(|&x| x < 0) {
        return Err(Error::DimensionMismatch(format!(
            "submodule dimension {e} not within {}",
            m.dims()
        )));
    }
    Ok(())
}

/// `#Gr_e(M)(F_p)`: tuples of subspaces `U_i ⊆ F_p^{d_i}` with `dim U_i = e_i`
/// and `M(α) U_s ⊆ U_t` for every arrow.
pub fn count_submodules(m: &Representation, e: &DimensionVector) -> Result<GrassmannianCount> {
    check_sub(m, e)?;
    let mut counter = Counter::new(m, Some(e));
    counter.run(0);
    let count = counter.table.remove(e).unwrap_or_default();
    Ok(GrassmannianCount {
        e: e.clone(),
        prime: m.prime(),
        count,
    })
}

/// Point counts for every `0 <= e <= dim M` in one enumeration pass.
pub fn count_table(m: &Representation) -> BTreeMap<DimensionVector, BigUint> {
    let mut counter = Counter::new(m, None);
    counter.run(0);
    let mut table = counter.table;
    for e in m.dims().sub_vectors() {
        table.entry(e).or_insert_with(BigUint::zero);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{
        generic_module, injective_module, kronecker_quiver, projective_module, simple_module,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Oracle: enumerate every tuple of subspaces at every vertex (sinks
    /// included) and test all containments directly.
    fn brute_force(m: &Representation, e: &DimensionVector) -> BigUint {
        let p = m.prime();
        let q = m.quiver();
        let choices: Vec<Vec<Matrix>> = (0..q.num_vertices())
            .map(|i| subspaces(m.dims()[i] as usize, e[i] as usize, p))
            .collect();
        let mut idx = vec![0usize; choices.len()];
        let mut count = 0u64;
        if choices.iter().any(|c| c.is_empty()) {
            return BigUint::zero();
        }
        loop {
            let ok = q.arrows().iter().enumerate().all(|(a, &(s, t))| {
                let u_t = &choices[t][idx[t]];
                let image = m.map(a).apply_rows(&choices[s][idx[s]], p);
                u_t.stack(&image).rank(p) == u_t.rows()
            });
            if ok {
                count += 1;
            }
            let mut i = 0;
            while i < idx.len() {
                idx[i] += 1;
                if idx[i] < choices[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == idx.len() {
                break;
            }
        }
        BigUint::from(count)
    }

    fn dv(v: &[i64]) -> DimensionVector {
        DimensionVector(v.to_vec())
    }

    #[test]
    fn documented_counts() {
        let q = kronecker_quiver(2, 3).unwrap();
        let s = simple_module(&q, 2, 3).unwrap();
        assert_eq!(count_submodules(&s, &dv(&[0; 5])).unwrap().count, BigUint::one());
        assert_eq!(count_submodules(&s, s.dims()).unwrap().count, BigUint::one());
        for p in [2, 3, 5] {
            let pv = projective_module(&q, 0, p).unwrap();
            assert_eq!(count_submodules(&pv, &dv(&[0, 0, 1, 0, 0])).unwrap().count, BigUint::one());
            assert_eq!(count_submodules(&pv, &dv(&[1, 0, 1, 0, 1])).unwrap().count, BigUint::zero());
        }
        let pv = projective_module(&q, 0, 2).unwrap();
        assert!(count_submodules(&pv, &dv(&[0, 1, 0, 0, 0])).is_err());
        assert!(count_submodules(&pv, &dv(&[0, 0, 0])).is_err());
    }

    #[test]
    fn counts_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (b, c) in [(1, 1), (1, 2), (2, 2), (2, 1)] {
            let q = kronecker_quiver(b, c).unwrap();
            for p in [2, 3] {
                let mut mods = Vec::new();
                for i in 0..q.num_vertices() {
                    mods.push(projective_module(&q, i, p).unwrap());
                    mods.push(injective_module(&q, i, p).unwrap());
                }
                // a couple of generic translates
                for i in 0..q.num_vertices() {
                    if let Ok(d) = q.coxeter_translate(&q.dim_projective(i).unwrap(), super::super::Direction::Backward) {
                        if d.total() <= 6 {
                            if let Ok(m) = generic_module(&q, &d, p, 100, &mut rng) {
                                mods.push(m);
                            }
                        }
                    }
                }
                for m in &mods {
                    let table = count_table(m);
                    for e in m.dims().sub_vectors() {
                        let expected = brute_force(m, &e);
                        assert_eq!(table[&e], expected, "({b},{c}) p={p} M={} e={e}", m.dims());
                        assert_eq!(count_submodules(m, &e).unwrap().count, expected);
                    }
                }
            }
        }
    }

    #[test]
    fn gaussian_bound_and_trivial_submodules() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = kronecker_quiver(2, 2).unwrap();
        let d = dv(&[1, 1, 1, 2]);
        for p in [2, 3, 5] {
            let Ok(m) = generic_module(&q, &d, p, 100, &mut rng) else { continue };
            let table = count_table(&m);
            for (e, count) in &table {
                let bound: BigUint = (0..4)
                    .map(|i| gaussian_binomial(d[i] as usize, e[i] as usize, p))
                    .product();
                assert!(*count <= bound);
            }
            assert_eq!(table[&dv(&[0; 4])], BigUint::one());
            assert_eq!(table[&d], BigUint::one());
        }
    }

    #[test]
    fn isomorphic_samples_have_equal_tables() {
        let q = kronecker_quiver(2, 2).unwrap();
        let d = q
            .coxeter_translate(&q.dim_projective(0).unwrap(), super::super::Direction::Backward)
            .unwrap();
        for p in [3, 5] {
            let mut tables = Vec::new();
            for seed in 0..3 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let m = generic_module(&q, &d, p, 100, &mut rng).unwrap();
                tables.push(count_table(&m));
            }
            assert!(tables.windows(2).all(|w| w[0] == w[1]));
        }
    }
}
