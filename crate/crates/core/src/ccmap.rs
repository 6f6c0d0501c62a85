//! The Caldero-Chapoton map on rigid objects of the cluster category of
//! `K_{b,c}`, the folding homomorphism onto `{x1, x2}`, and verifications
//! comparing both against the rank-two recurrence.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{ExponentVector, LaurentPolynomial, MonomialMap, Permutation, VariableContext};
use crate::quiver::{kronecker_quiver, ChiTable, DimensionVector, Direction, EulerSolver, ModuleSpec, Quiver};
use crate::rank2::{ClusterAlgebra, ExchangeType};
use crate::report::CheckReport;

/// Generic modules are only resolved up to this total dimension.
pub const MAX_GENERIC_DIMENSION: i64 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexClass {
    V,
    W,
}

impl fmt::Display for VertexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VertexClass::V => "v",
            VertexClass::W => "w",
        })
    }
}

impl FromStr for VertexClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v" | "V" => Ok(VertexClass::V),
            "w" | "W" => Ok(VertexClass::W),
            _ => Err(Error::Parse(format!("vertex class must be v or w, got `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ObjectKind {
    Module(ModuleSpec),
    ShiftedProjective(usize),
}

/// An indecomposable rigid object, remembered together with the label
/// `P_{class}[shift]` it was resolved from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CCObject {
    pub kind: ObjectKind,
    pub class: VertexClass,
    pub shift: i64,
}

impl CCObject {
    pub fn module(spec: ModuleSpec, class: VertexClass, shift: i64) -> Self {
        CCObject {
            kind: ObjectKind::Module(spec),
            class,
            shift,
        }
    }

    pub fn shifted_projective(vertex: usize, class: VertexClass) -> Self {
        CCObject {
            kind: ObjectKind::ShiftedProjective(vertex),
            class,
            shift: 1,
        }
    }

    pub fn is_module(&self) -> bool {
        matches!(self.kind, ObjectKind::Module(_))
    }

    pub fn relabel(&self, g: &Permutation) -> Result<Self> {
        let kind = match &self.kind {
            ObjectKind::Module(spec) => ObjectKind::Module(spec.relabel(g)?),
            ObjectKind::ShiftedProjective(i) if *i < g.len() => ObjectKind::ShiftedProjective(g.apply(*i)),
            ObjectKind::ShiftedProjective(i) => return Err(Error::InvalidVertex(i.to_string())),
        };
        Ok(CCObject { kind, ..self.clone() })
    }

    /// Human-readable name such as `P_v1[1]`, `I_w2` or `M(1,2,2,2)`.
    pub fn label(&self, q: &Quiver) -> String {
        let name = |i: usize| q.vertices().get(i).cloned().unwrap_or_else(|| i.to_string());
        match &self.kind {
            ObjectKind::ShiftedProjective(i) => format!("P_{}[1]", name(*i)),
            ObjectKind::Module(ModuleSpec::Projective(i)) => format!("P_{}", name(*i)),
            ObjectKind::Module(ModuleSpec::Injective(i)) => format!("I_{}", name(*i)),
            ObjectKind::Module(ModuleSpec::Simple(i)) => format!("S_{}", name(*i)),
            ObjectKind::Module(ModuleSpec::Generic(d)) => format!("M{d}"),
        }
    }
}

/// Where a walk along the translation orbit currently is.
enum Position {
    Module(DimensionVector),
    Shifted(usize),
}

/// One χ table recorded while evaluating the map, for later auditing.
#[derive(Clone, Debug, Serialize)]
pub struct ChiRecord {
    pub object: String,
    pub table: ChiTable,
}

/// The Caldero-Chapoton map for `K_{b,c}` with a fixed root seed.
pub struct CCMap {
    ty: ExchangeType,
    quiver: Quiver,
    u: VariableContext,
    x: VariableContext,
    solver: EulerSolver,
    algebra: ClusterAlgebra,
    cache: Mutex<HashMap<ObjectKind, Arc<LaurentPolynomial>>>,
    chi_log: Mutex<Vec<ChiRecord>>,
}

impl CCMap {
    pub fn new(b: i64, c: i64, seed: u64) -> Result<Self> {
        let quiver = kronecker_quiver(b, c)?;
        let ty = quiver.kronecker_type().expect("built as a Kronecker quiver");
        let u = u_context(&quiver)?;
        Ok(CCMap {
            ty,
            u,
            x: VariableContext::new(["x1", "x2"])?,
            solver: EulerSolver::new(seed),
            algebra: ClusterAlgebra::new(ty),
            quiver,
            cache: Mutex::new(HashMap::new()),
            chi_log: Mutex::new(Vec::new()),
        })
    }

    pub fn exchange_type(&self) -> ExchangeType {
        self.ty
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    /// `u_v1, ..., u_vb, u_w1, ..., u_wc`.
    pub fn u_context(&self) -> &VariableContext {
        &self.u
    }

    pub fn x_context(&self) -> &VariableContext {
        &self.x
    }

    pub fn algebra(&self) -> &ClusterAlgebra {
        &self.algebra
    }

    /// Every χ table computed so far, in evaluation order.
    pub fn chi_log(&self) -> Vec<ChiRecord> {
        self.chi_log.lock().expect("chi log lock").clone()
    }

    fn class_of(&self, vertex: usize) -> VertexClass {
        if vertex < self.ty.b() as usize {
            VertexClass::V
        } else {
            VertexClass::W
        }
    }

    /// Vertex index of `v_j` or `w_j` (1-based `j`).
    pub fn vertex(&self, class: VertexClass, j: usize) -> Result<usize> {
        let (offset, count) = match class {
            VertexClass::V => (0, self.ty.b() as usize),
            VertexClass::W => (self.ty.b() as usize, self.ty.c() as usize),
        };
        if j == 0 || j > count {
            return Err(Error::InvalidVertex(format!("{class}{j}")));
        }
        Ok(offset + j - 1)
    }

    fn is_projective(&self, d: &[i64]) -> Result<Option<usize>> {
        for i in 0..self.quiver.num_vertices() {
            if *self.quiver.dim_projective(i)? == *d {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    fn is_injective(&self, d: &[i64]) -> Result<Option<usize>> {
        for i in 0..self.quiver.num_vertices() {
            if *self.quiver.dim_injective(i)? == *d {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// One step of `τ` (`Forward`) or `τ^{-1}` (`Backward`) in the cluster
    /// category, where `τ P_i = P_i[1]` and `τ P_i[1] = I_i`.
    fn step(&self, pos: Position, direction: Direction) -> Result<Position> {
        match (pos, direction) {
            (Position::Shifted(i), Direction::Forward) => Ok(Position::Module(self.quiver.dim_injective(i)?)),
            (Position::Shifted(i), Direction::Backward) => Ok(Position::Module(self.quiver.dim_projective(i)?)),
            (Position::Module(d), direction) => {
                let image = self.quiver.coxeter_image(&d, direction)?;
                if image.iter().all(|&x| x >= 0) && image.iter().any(|&x| x > 0) {
                    return Ok(Position::Module(DimensionVector::from(image)));
                }
                let negated: Vec<i64> = image.iter().map(|x| -x).collect();
                // Φ dim P_i = -dim I_i and Φ^{-1} dim I_i = -dim P_i
                let mut wrapped = None;
                for i in 0..self.quiver.num_vertices() {
                    let (p, inj) = (self.quiver.dim_projective(i)?, self.quiver.dim_injective(i)?);
                    let hit = match direction {
                        Direction::Forward => *p == *d && *inj == *negated,
                        Direction::Backward => *inj == *d && *p == *negated,
                    };
                    if hit {
                        wrapped = Some(i);
                        break;
                    }
                }
                match wrapped {
                    Some(i) => Ok(Position::Shifted(i)),
                    None => Err(Error::NotTransjective {
                        from: d.to_vec(),
                        to: image,
                    }),
                }
            }
        }
    }

    /// `P_i[s]` where `[1]` acts as `τ` on the transjective component:
    /// `P[0] = P`, `P[1]` shifted, `P[2] = I`, `P[s] = τ^{s-2} I` for `s >= 3`
    /// and `τ^{s} P` for `s <= -1`.
    pub fn object_at(&self, vertex: usize, shift: i64) -> Result<CCObject> {
        self.quiver.check_vertex(vertex)?;
        let class = self.class_of(vertex);
        let pos = match shift {
            1 => Position::Shifted(vertex),
            0 => Position::Module(self.quiver.dim_projective(vertex)?),
            2 => Position::Module(self.quiver.dim_injective(vertex)?),
            s if s >= 3 => {
                let mut pos = Position::Module(self.quiver.dim_injective(vertex)?);
                for _ in 0..s - 2 {
                    pos = self.step(pos, Direction::Forward)?;
                }
                pos
            }
            s => {
                let mut pos = Position::Module(self.quiver.dim_projective(vertex)?);
                for _ in 0..-s {
                    pos = self.step(pos, Direction::Backward)?;
                }
                pos
            }
        };
        let kind = match pos {
            Position::Shifted(i) => ObjectKind::ShiftedProjective(i),
            Position::Module(d) => ObjectKind::Module(if let Some(i) = self.is_projective(&d)? {
                ModuleSpec::Projective(i)
            } else if let Some(i) = self.is_injective(&d)? {
                ModuleSpec::Injective(i)
            } else {
                ModuleSpec::Generic(d)
            }),
        };
        Ok(CCObject { kind, class, shift })
    }

    /// The object whose folded character should be `x_k`: `k = 2m+1` gives
    /// `P_{v1}[m+1]`, `k = 2m+2` gives `P_{w1}[m+1]`.
    pub fn object_for_index(&self, k: i64) -> Result<CCObject> {
        let (class, m) = if k.rem_euclid(2) == 1 {
            (VertexClass::V, (k - 1).div_euclid(2))
        } else {
            (VertexClass::W, (k - 2).div_euclid(2))
        };
        self.object_at(self.vertex(class, 1)?, m + 1)
    }

    /// `X_M` as a Laurent polynomial in the `u` variables.
    pub fn cc_polynomial(&self, obj: &CCObject) -> Result<LaurentPolynomial> {
        Ok((*self.cc_cached(&obj.kind, &obj.label(&self.quiver))?).clone())
    }

    /// `X_{M_1 ⊕ ... ⊕ M_r} = Π X_{M_i}`.
    pub fn cc_direct_sum(&self, objects: &[CCObject]) -> Result<LaurentPolynomial> {
        let mut out = LaurentPolynomial::one(&self.u);
        for obj in objects {
            out = out.mul(&self.cc_polynomial(obj)?)?;
        }
        Ok(out)
    }

    fn cc_cached(&self, kind: &ObjectKind, label: &str) -> Result<Arc<LaurentPolynomial>> {
        if let Some(p) = self.cache.lock().expect("cache lock").get(kind) {
            return Ok(p.clone());
        }
        let value = Arc::new(match kind {
            ObjectKind::ShiftedProjective(i) => {
                self.quiver.check_vertex(*i)?;
                LaurentPolynomial::variable(&self.u, *i)
            }
            ObjectKind::Module(spec) => {
                let d = spec.dimension_vector(&self.quiver)?;
                if let ModuleSpec::Generic(_) = spec {
                    if d.total() > MAX_GENERIC_DIMENSION {
                        return Err(Error::BudgetExceeded(format!(
                            "generic module of dimension {d} exceeds total {MAX_GENERIC_DIMENSION}"
                        )));
                    }
                }
                let table = self.solver.chi_table(&self.quiver, spec)?;
                let value = self.character(&d, &table)?;
                self.chi_log.lock().expect("chi log lock").push(ChiRecord {
                    object: label.to_string(),
                    table,
                });
                value
            }
        });
        self.cache
            .lock()
            .expect("cache lock")
            .insert(kind.clone(), value.clone());
        Ok(value)
    }

    /// `Σ_e χ(Gr_e(M)) Π_i u_i^{-<e, S_i> - <S_i, d - e>}`.
    fn character(&self, d: &DimensionVector, table: &ChiTable) -> Result<LaurentPolynomial> {
        let n = self.quiver.num_vertices();
        let mut terms: Vec<(ExponentVector, BigInt)> = Vec::new();
        for entry in &table.entries {
            if entry.chi.is_zero() {
                continue;
            }
            let rest: Vec<i64> = d.iter().zip(entry.e.iter()).map(|(a, b)| a - b).collect();
            let mut exps = Vec::with_capacity(n);
            for i in 0..n {
                let s = DimensionVector::unit(n, i);
                let x = -self.quiver.euler_form(&entry.e, &s)? - self.quiver.euler_form(&s, &rest)?;
                exps.push(i32::try_from(x).map_err(|_| Error::BudgetExceeded("exponent overflow".into()))?);
            }
            terms.push((ExponentVector::from(exps), entry.chi.clone()));
        }
        LaurentPolynomial::from_terms(&self.u, terms)
    }

    /// Applies `u_vi ↦ x1`, `u_wj ↦ x2`.
    pub fn fold(&self, p: &LaurentPolynomial) -> Result<LaurentPolynomial> {
        fold_with(p, &self.u, &self.x, self.ty)
    }

    /// `fold(X_{object_for_index(k)}) == x_k`, one item per `k`.
    pub fn verify_folding(&self, ks: impl IntoIterator<Item = i64>) -> CheckReport {
        let (b, c) = (self.ty.b(), self.ty.c());
        let mut report = CheckReport::new("folding", format!("A({b},{c})"));
        for k in ks {
            let label = format!("k={k}");
            let outcome = self.object_for_index(k).and_then(|obj| {
                let folded = self.fold(&self.cc_polynomial(&obj)?)?;
                let expected = self.algebra.cluster_variable(k)?;
                Ok((obj, folded, expected))
            });
            match outcome {
                Ok((obj, folded, expected)) => report.record(
                    format!("{label} {}", obj.label(&self.quiver)),
                    folded == expected,
                    || format!("folded character {folded} differs from x_{k} = {expected}"),
                ),
                Err(e) => record_error(&mut report, label, e),
            }
        }
        report
    }

    /// For module objects, the folded denominator is `x1^{Σ dim M(v_i)} x2^{Σ dim M(w_j)}`.
    pub fn check_denominator_law(&self, ks: impl IntoIterator<Item = i64>) -> CheckReport {
        let (b, c) = (self.ty.b(), self.ty.c());
        let mut report = CheckReport::new("denominator law", format!("A({b},{c})"));
        for k in ks {
            let label = format!("k={k}");
            let outcome = self.object_for_index(k).and_then(|obj| {
                let ObjectKind::Module(spec) = &obj.kind else {
                    return Ok(None);
                };
                let d = spec.dimension_vector(&self.quiver)?;
                let folded = self.fold(&self.cc_polynomial(&obj)?)?;
                let den = folded.denominator_exponents()?;
                let bsz = b as usize;
                let expected = [d[..bsz].iter().sum::<i64>(), d[bsz..].iter().sum::<i64>()];
                Ok(Some((obj, den, expected)))
            });
            match outcome {
                Ok(None) => {}
                Ok(Some((obj, den, expected))) => report.record(
                    format!("{label} {}", obj.label(&self.quiver)),
                    i64::from(den[0]) == expected[0] && i64::from(den[1]) == expected[1],
                    || format!("denominator exponents {:?}, dimension sums {expected:?}", &den[..]),
                ),
                Err(e) => record_error(&mut report, label, e),
            }
        }
        report
    }

    /// Class `v`: `X_{P_v[s]} X_{P_v[s+1]} = Π_{j=1}^{c} X_{P_{w_j}[s]} + 1`.
    /// Class `w`: `X_{P_w[s]} X_{P_w[s+1]} = Π_{j=1}^{b} X_{P_{v_j}[s+1]} + 1`.
    pub fn verify_exchange_relation(&self, class: VertexClass, s: i64) -> CheckReport {
        let (b, c) = (self.ty.b(), self.ty.c());
        let mut report = CheckReport::new("exchange relation", format!("A({b},{c}) class {class}"));
        let label = format!("{class} s={s}");
        let outcome = (|| -> Result<(LaurentPolynomial, LaurentPolynomial)> {
            let me = self.vertex(class, 1)?;
            let lhs = self
                .cc_polynomial(&self.object_at(me, s)?)?
                .mul(&self.cc_polynomial(&self.object_at(me, s + 1)?)?)?;
            let (other, count, other_shift) = match class {
                VertexClass::V => (VertexClass::W, c, s),
                VertexClass::W => (VertexClass::V, b, s + 1),
            };
            let middle = (1..=count as usize)
                .map(|j| self.object_at(self.vertex(other, j)?, other_shift))
                .collect::<Result<Vec<_>>>()?;
            let rhs = self
                .cc_direct_sum(&middle)?
                .add(&LaurentPolynomial::one(&self.u))?;
            Ok((lhs, rhs))
        })();
        match outcome {
            Ok((lhs, rhs)) => report.record(label, lhs == rhs, || {
                format!("left side {lhs} differs from right side {rhs}")
            }),
            Err(e) => record_error(&mut report, label, e),
        }
        report
    }

    /// `g · X_M = X_{g M}` and `fold(g · X_M) = fold(X_M)` for `g` preserving
    /// the vertex classes.
    pub fn g_equivariance_check(&self, obj: &CCObject, g: &Permutation) -> CheckReport {
        let (b, c) = (self.ty.b(), self.ty.c());
        let mut report = CheckReport::new("G-equivariance", format!("K_{{{b},{c}}}"));
        let label = format!("{} under {:?}", obj.label(&self.quiver), g.images());
        let outcome = (|| -> Result<(LaurentPolynomial, LaurentPolynomial, LaurentPolynomial)> {
            self.check_group_element(g)?;
            let x = self.cc_polynomial(obj)?;
            let moved = x.permute_variables(g)?;
            let relabeled = self.cc_polynomial(&obj.relabel(g)?)?;
            Ok((x, moved, relabeled))
        })();
        match outcome {
            Ok((x, moved, relabeled)) => {
                report.record(format!("{label}: permute then map"), moved == relabeled, || {
                    format!("g·X = {moved} but X_(gM) = {relabeled}")
                });
                let folds = self.fold(&moved).and_then(|a| Ok((a, self.fold(&x)?)));
                match folds {
                    Ok((a, b)) => report.record(format!("{label}: fold invariance"), a == b, || {
                        format!("fold(g·X) = {a} but fold(X) = {b}")
                    }),
                    Err(e) => record_error(&mut report, format!("{label}: fold invariance"), e),
                }
            }
            Err(e) => record_error(&mut report, label, e),
        }
        report
    }

    fn check_group_element(&self, g: &Permutation) -> Result<()> {
        if g.len() != self.quiver.num_vertices() {
            return Err(Error::InvalidPermutation(format!(
                "expected a permutation of {} vertices, got {}",
                self.quiver.num_vertices(),
                g.len()
            )));
        }
        for i in 0..g.len() {
            if self.class_of(i) != self.class_of(g.apply(i)) {
                return Err(Error::InvalidPermutation(format!(
                    "{} and {} lie in different vertex classes",
                    self.quiver.vertices()[i],
                    self.quiver.vertices()[g.apply(i)]
                )));
            }
        }
        Ok(())
    }
}

fn record_error(report: &mut CheckReport, label: String, e: Error) {
    if e.is_inconclusive() {
        report.inconclusive(label, e.to_string());
    } else {
        report.fail(label, e.to_string());
    }
}

fn u_context(q: &Quiver) -> Result<VariableContext> {
    VariableContext::new(q.vertices().iter().map(|v| format!("u_{v}")))
}

fn fold_with(
    p: &LaurentPolynomial,
    u: &VariableContext,
    x: &VariableContext,
    ty: ExchangeType,
) -> Result<LaurentPolynomial> {
    if p.context() != u {
        return Err(Error::ContextMismatch {
            left: p.context().names().join(","),
            right: u.names().join(","),
        });
    }
    let mut map = MonomialMap::new(u, x);
    for (i, name) in u.names().iter().enumerate() {
        let target = if i < ty.b() as usize { "x1" } else { "x2" };
        map = map.set_variable(name, target)?;
    }
    p.specialize(&map)
}

/// Folding `u_vi ↦ x1`, `u_wj ↦ x2` for a polynomial over the `u` variables
/// of `K_{b,c}`.
pub fn fold(p: &LaurentPolynomial, b: i64, c: i64) -> Result<LaurentPolynomial> {
    let q = kronecker_quiver(b, c)?;
    let ty = q.kronecker_type().expect("Kronecker quiver");
    fold_with(p, &u_context(&q)?, &VariableContext::new(["x1", "x2"])?, ty)
}

pub fn object_for_index(b: i64, c: i64, k: i64) -> Result<CCObject> {
    CCMap::new(b, c, 0)?.object_for_index(k)
}

pub fn verify_folding(b: i64, c: i64, k: i64, seed: u64) -> Result<CheckReport> {
    Ok(CCMap::new(b, c, seed)?.verify_folding([k]))
}
