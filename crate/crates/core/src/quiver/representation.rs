use std::collections::HashMap;

use rand::Rng;

use super::field::{check_prime, Matrix};
use super::{DimensionVector, Quiver};
use crate::error::{Error, Result};

/// A representation of a quiver over `F_p`: one matrix of shape
/// `dims[target] × dims[source]` per arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    quiver: Quiver,
    prime: u64,
    dims: DimensionVector,
    maps: Vec<Matrix>,
}

impl Representation {
    pub fn new(quiver: Quiver, prime: u64, dims: DimensionVector, maps: Vec<Matrix>) -> Result<Self> {
        check_prime(prime)?;
        if dims.len() != quiver.num_vertices() {
            return Err(Error::ArityMismatch {
                expected: quiver.num_vertices(),
                found: dims.len(),
            });
        }
        if maps.len() != quiver.arrows().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} arrows but {} maps",
                quiver.arrows().len(),
                maps.len()
            )));
        }
        for (a, (&(s, t), m)) in quiver.arrows().iter().zip(&maps).enumerate() {
            if m.rows() as i64 != dims[t] || m.cols() as i64 != dims[s] {
                return Err(Error::DimensionMismatch(format!(
                    "arrow {a} needs a {}x{} matrix, got {}x{}",
                    dims[t],
                    dims[s],
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(Representation {
            quiver,
            prime,
            dims,
            maps,
        })
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn dims(&self) -> &DimensionVector {
        &self.dims
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn map(&self, arrow: usize) -> &Matrix {
        &self.maps[arrow]
    }
}

/// Paths of the quiver as arrow sequences, grouped by the vertex where the
/// basis element lives, with per-vertex local indices.
struct PathBasis {
    index: HashMap<Vec<usize>, usize>,
    dims: Vec<i64>,
}

impl PathBasis {
    fn new(n: usize) -> Self {
        PathBasis {
            index: HashMap::new(),
            dims: vec![0; n],
        }
    }

    fn insert(&mut self, path: Vec<usize>, vertex: usize) {
        self.index.insert(path, self.dims[vertex] as usize);
        self.dims[vertex] += 1;
    }
}

/// All paths starting at `i`, as arrow sequences in traversal order, with
/// their end vertices.
fn paths_from(q: &Quiver, i: usize) -> Vec<(Vec<usize>, usize)> {
    let mut out = vec![(Vec::new(), i)];
    let mut next = 0;
    while next < out.len() {
        let (path, end) = out[next].clone();
        for (a, &(s, t)) in q.arrows().iter().enumerate() {
            if s == end {
                let mut p = path.clone();
                p.push(a);
                out.push((p, t));
            }
        }
        next += 1;
    }
    out
}

/// All paths ending at `i`, with their start vertices.
fn paths_to(q: &Quiver, i: usize) -> Vec<(Vec<usize>, usize)> {
    let mut out = vec![(Vec::new(), i)];
    let mut next = 0;
    while next < out.len() {
        let (path, start) = out[next].clone();
        for (a, &(s, t)) in q.arrows().iter().enumerate() {
            if t == start {
                let mut p = vec![a];
                p.extend_from_slice(&path);
                out.push((p, s));
            }
        }
        next += 1;
    }
    out
}

fn zero_maps(q: &Quiver, dims: &[i64]) -> Vec<Matrix> {
    q.arrows()
        .iter()
        .map(|&(s, t)| Matrix::zeros(dims[t] as usize, dims[s] as usize))
        .collect()
}

/// Indecomposable projective at `i`; basis = paths starting at `i`, arrows act
/// by post-composition.
pub fn projective_module(q: &Quiver, i: usize, p: u64) -> Result<Representation> {
    q.check_vertex(i)?;
    let paths = paths_from(q, i);
    let mut basis = PathBasis::new(q.num_vertices());
    for (path, end) in &paths {
        basis.insert(path.clone(), *end);
    }
    let mut maps = zero_maps(q, &basis.dims);
    for (path, end) in &paths {
        for (a, &(s, _)) in q.arrows().iter().enumerate() {
            if s == *end {
                let mut longer = path.clone();
                longer.push(a);
                maps[a].set(basis.index[&longer], basis.index[path], 1);
            }
        }
    }
    Representation::new(q.clone(), p, DimensionVector(basis.dims), maps)
}

/// Indecomposable injective at `i`; basis at `j` = paths `j ⇝ i`, an arrow
/// `α` sends a path beginning with `α` to its remainder and kills the rest.
pub fn injective_module(q: &Quiver, i: usize, p: u64) -> Result<Representation> {
    q.check_vertex(i)?;
    let paths = paths_to(q, i);
    let mut basis = PathBasis::new(q.num_vertices());
    for (path, start) in &paths {
        basis.insert(path.clone(), *start);
    }
    let mut maps = zero_maps(q, &basis.dims);
    for (path, _) in &paths {
        if let Some((&first, rest)) = path.split_first() {
            maps[first].set(basis.index[rest], basis.index[path], 1);
        }
    }
    Representation::new(q.clone(), p, DimensionVector(basis.dims), maps)
}

pub fn simple_module(q: &Quiver, i: usize, p: u64) -> Result<Representation> {
    q.check_vertex(i)?;
    let dims = DimensionVector::unit(q.num_vertices(), i);
    let maps = zero_maps(q, &dims);
    Representation::new(q.clone(), p, dims, maps)
}

/// `dim Hom(M, N)`: the nullity of the linear system
/// `f_t · M(α) = N(α) · f_s` over all arrows `α: s -> t`.
pub fn hom_dimension(m: &Representation, n: &Representation) -> Result<usize> {
    if m.quiver != n.quiver {
        return Err(Error::DimensionMismatch("representations of different quivers".into()));
    }
    if m.prime != n.prime {
        return Err(Error::DimensionMismatch(format!(
            "representations over F_{} and F_{}",
            m.prime, n.prime
        )));
    }
    let p = m.prime;
    let q = &m.quiver;
    let (dm, dn) = (&m.dims, &n.dims);
    // unknown f_i is a dn_i × dm_i matrix, stored row-major from offset[i]
    let mut offset = Vec::with_capacity(q.num_vertices());
    let mut unknowns = 0usize;
    for i in 0..q.num_vertices() {
        offset.push(unknowns);
        unknowns += (dm[i] * dn[i]) as usize;
    }
    let var = |i: usize, r: usize, c: usize| offset[i] + r * dm[i] as usize + c;
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for (a, &(s, t)) in q.arrows().iter().enumerate() {
        let (ma, na) = (&m.maps[a], &n.maps[a]);
        for r in 0..dn[t] as usize {
            for c in 0..dm[s] as usize {
                let mut eq = vec![0u64; unknowns];
                // (f_t M_α)[r][c] = Σ_k f_t[r][k] M_α[k][c]
                for k in 0..dm[t] as usize {
                    let v = &mut eq[var(t, r, k)];
                    *v = (*v + ma.get(k, c)) % p;
                }
                // minus (N_α f_s)[r][c] = Σ_k N_α[r][k] f_s[k][c]
                for k in 0..dn[s] as usize {
                    let v = &mut eq[var(s, k, c)];
                    *v = (*v + p - na.get(r, k)) % p;
                }
                rows.push(eq);
            }
        }
    }
    if rows.is_empty() {
        return Ok(unknowns);
    }
    let rank = Matrix::from_rows(&rows, p)?.rank(p);
    Ok(unknowns - rank)
}

/// Samples uniformly random arrow matrices of dimension `d` until the
/// endomorphism ring is one-dimensional. Requires `<d, d> = 1`.
pub fn generic_module<R: Rng + ?Sized>(
    q: &Quiver,
    d: &DimensionVector,
    p: u64,
    trials: usize,
    rng: &mut R,
) -> Result<Representation> {
    check_prime(p)?;
    let form = q.euler_form(d, d)?;
    if form != 1 {
        return Err(Error::NotSchurRoot(d.to_vec(), form));
    }
    for _ in 0..trials {
        let maps = q
            .arrows()
            .iter()
            .map(|&(s, t)| {
                let (rows, cols) = (d[t] as usize, d[s] as usize);
                let data: Vec<Vec<u64>> = (0..rows)
                    .map(|_| (0..cols).map(|_| rng.gen_range(0..p)).collect())
                    .collect();
                if rows == 0 {
                    Ok(Matrix::zeros(0, cols))
                } else {
                    Matrix::from_rows(&data, p)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let m = Representation::new(q.clone(), p, d.clone(), maps)?;
        if hom_dimension(&m, &m)? == 1 {
            return Ok(m);
        }
    }
    Err(Error::NotRigid {
        dims: d.to_vec(),
        prime: p,
        trials,
    })
}
