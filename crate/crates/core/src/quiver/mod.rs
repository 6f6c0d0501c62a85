//! Acyclic quivers (chiefly the generalized Kronecker quiver `K_{b,c}`), their
//! representations over prime fields, submodule Grassmannian point counts and
//! Euler characteristics recovered from those counts.

pub mod field;
mod euler;
mod grassmannian;
mod representation;

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rank2::ExchangeType;

pub use euler::{euler_characteristic, ChiTable, EulerSolver, ModuleSpec};
pub use grassmannian::{count_submodules, count_table, GrassmannianCount};
pub use representation::{
    generic_module, hom_dimension, injective_module, projective_module, simple_module,
    Representation,
};

/// Vertex-indexed vector of nonnegative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimensionVector(Vec<i64>);

impl DimensionVector {
    pub fn new(dims: Vec<i64>) -> Result<Self> {
        if let Some(bad) = dims.iter().find(|&&d| d < 0) {
            return Err(Error::DimensionMismatch(format!(
                "negative entry {bad} in dimension vector {dims:?}"
            )));
        }
        Ok(DimensionVector(dims))
    }

    pub fn zeros(n: usize) -> Self {
        DimensionVector(vec![0; n])
    }

    /// Dimension vector of the simple module at `i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut d = vec![0; n];
        d[i] = 1;
        DimensionVector(d)
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &DimensionVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }

    /// Every `e` with `0 <= e <= self`, in lexicographic order.
    pub fn sub_vectors(&self) -> Vec<DimensionVector> {
        let mut out = vec![Vec::new()];
        for &d in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=d).map(move |x| {
                        let mut v = prefix.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(DimensionVector).collect()
    }
}

impl Deref for DimensionVector {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for DimensionVector {
    /// Unchecked; callers that accept user input go through [`DimensionVector::new`].
    fn from(v: Vec<i64>) -> Self {
        DimensionVector(v)
    }
}

impl fmt::Display for DimensionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// Direction of the Auslander-Reiten translate on dimension vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `τ`: towards the injectives' predecessors, defined on non-projectives.
    Forward,
    /// `τ^{-1}`: defined on non-injectives.
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<(usize, usize)>,
    kronecker: Option<ExchangeType>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<(usize, usize)>) -> Result<Self> {
        let n = vertices.len();
        if n == 0 {
            return Err(Error::InvalidVertex("quiver has no vertices".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].contains(v) {
                return Err(Error::InvalidVertex(format!("duplicate vertex `{v}`")));
            }
        }
        for &(s, t) in &arrows {
            if s >= n || t >= n {
                return Err(Error::InvalidVertex(format!("arrow {s} -> {t}")));
            }
        }
        let q = Quiver {
            vertices,
            arrows,
            kronecker: None,
        };
        q.topological_order()?;
        Ok(q)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    /// `Some((b, c))` when built by [`kronecker_quiver`].
    pub fn kronecker_type(&self) -> Option<ExchangeType> {
        self.kronecker
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::InvalidVertex(name.to_string()))
    }

    pub fn check_vertex(&self, i: usize) -> Result<()> {
        if i < self.num_vertices() {
            Ok(())
        } else {
            Err(Error::InvalidVertex(i.to_string()))
        }
    }

    pub fn is_sink(&self, i: usize) -> bool {
        self.arrows.iter().all(|&(s, _)| s != i)
    }

    pub fn is_source(&self, i: usize) -> bool {
        self.arrows.iter().all(|&(_, t)| t != i)
    }

    /// Vertices ordered so every arrow points forward; `Cyclic` otherwise.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.num_vertices();
        let mut indegree = vec![0usize; n];
        for &(_, t) in &self.arrows {
            indegree[t] += 1;
        }
        let mut ready: Vec<usize> = (0..n).rev().filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop() {
            order.push(i);
            for &(s, t) in &self.arrows {
                if s == i {
                    indegree[t] -= 1;
                    if indegree[t] == 0 {
                        ready.push(t);
                    }
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(Error::Cyclic)
        }
    }

    fn arrow_count(&self, i: usize, j: usize) -> i64 {
        self.arrows.iter().filter(|&&a| a == (i, j)).count() as i64
    }

    /// Skew-symmetric matrix `b_ij = #(i -> j) - #(j -> i)`.
    pub fn exchange_matrix(&self) -> Result<Vec<Vec<i64>>> {
        let n = self.num_vertices();
        for &(s, t) in &self.arrows {
            if s == t {
                return Err(Error::Cyclic);
            }
        }
        Ok((0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.arrow_count(i, j) - self.arrow_count(j, i))
                    .collect()
            })
            .collect())
    }

    /// Euler matrix `C = I - A` with `A_ij` the number of arrows `i -> j`, so
    /// `<d, e> = dᵀ C e`.
    pub fn euler_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.num_vertices();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| i64::from(i == j) - self.arrow_count(i, j))
                    .collect()
            })
            .collect()
    }

    /// `C^{-1} = Σ_k A^k`; entry `(i, j)` counts paths from `i` to `j`.
    pub fn path_counts(&self) -> Vec<Vec<i64>> {
        let n = self.num_vertices();
        let order = self.topological_order().expect("quiver is acyclic");
        let mut paths = vec![vec![0i64; n]; n];
        for i in 0..n {
            paths[i][i] = 1;
        }
        // process targets in topological order so every predecessor is final
        for &t in &order {
            for &(s, tt) in &self.arrows {
                if tt == t {
                    for i in 0..n {
                        paths[i][t] += paths[i][s];
                    }
                }
            }
        }
        paths
    }

    fn check_len(&self, d: &[i64]) -> Result<()> {
        if d.len() == self.num_vertices() {
            Ok(())
        } else {
            Err(Error::ArityMismatch {
                expected: self.num_vertices(),
                found: d.len(),
            })
        }
    }

    pub fn euler_form(&self, d: &[i64], e: &[i64]) -> Result<i64> {
        self.check_len(d)?;
        self.check_len(e)?;
        let diagonal: i64 = d.iter().zip(e).map(|(a, b)| a * b).sum();
        let arrows: i64 = self.arrows.iter().map(|&(s, t)| d[s] * e[t]).sum();
        Ok(diagonal - arrows)
    }

    /// `dim P_i`: row `i` of the path-count matrix.
    pub fn dim_projective(&self, i: usize) -> Result<DimensionVector> {
        self.check_vertex(i)?;
        Ok(DimensionVector(self.path_counts()[i].clone()))
    }

    /// `dim I_i`: column `i` of the path-count matrix.
    pub fn dim_injective(&self, i: usize) -> Result<DimensionVector> {
        self.check_vertex(i)?;
        Ok(DimensionVector(
            self.path_counts().iter().map(|row| row[i]).collect(),
        ))
    }

    /// Coxeter matrix of `τ` (`Forward`, `-C^{-1}Cᵀ`) or of `τ^{-1}`
    /// (`Backward`, `-C^{-T}C`), acting on column vectors.
    pub fn coxeter_matrix(&self, direction: Direction) -> Vec<Vec<i64>> {
        let n = self.num_vertices();
        let c = self.euler_matrix();
        let cinv = self.path_counts();
        let mut out = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                out[i][j] = -(0..n)
                    .map(|k| match direction {
                        Direction::Forward => cinv[i][k] * c[j][k],
                        Direction::Backward => cinv[k][i] * c[k][j],
                    })
                    .sum::<i64>();
            }
        }
        out
    }

    /// Dimension vector of `τ M` (`Forward`) or `τ^{-1} M` (`Backward`) for a
    /// transjective module `M` of dimension `d`. A result outside the positive
    /// orthant means `M` was projective (forward) or injective (backward).
    pub fn coxeter_translate(&self, d: &[i64], direction: Direction) -> Result<DimensionVector> {
        self.check_len(d)?;
        let phi = self.coxeter_matrix(direction);
        let out: Vec<i64> = phi
            .iter()
            .map(|row| row.iter().zip(d).map(|(a, b)| a * b).sum())
            .collect();
        if out.iter().any(|&x| x < 0) || out.iter().all(|&x| x == 0) {
            return Err(Error::NotTransjective {
                from: d.to_vec(),
                to: out,
            });
        }
        Ok(DimensionVector(out))
    }

    /// Unchecked Coxeter image, used by callers that handle wrap-around
    /// (`Φ dim P_i = -dim I_i`).
    pub fn coxeter_image(&self, d: &[i64], direction: Direction) -> Result<Vec<i64>> {
        self.check_len(d)?;
        Ok(self
            .coxeter_matrix(direction)
            .iter()
            .map(|row| row.iter().zip(d).map(|(a, b)| a * b).sum())
            .collect())
    }
}

/// `K_{b,c}`: sources `v1..vb`, sinks `w1..wc`, one arrow `v_i -> w_j` per pair.
pub fn kronecker_quiver(b: i64, c: i64) -> Result<Quiver> {
    let ty = ExchangeType::new(b, c)?;
    let (b, c) = (ty.b() as usize, ty.c() as usize);
    let vertices = (1..=b)
        .map(|i| format!("v{i}"))
        .chain((1..=c).map(|j| format!("w{j}")))
        .collect();
    let arrows = (0..b)
        .flat_map(|i| (0..c).map(move |j| (i, b + j)))
        .collect();
    let mut q = Quiver::new(vertices, arrows)?;
    q.kronecker = Some(ty);
    Ok(q)
}
