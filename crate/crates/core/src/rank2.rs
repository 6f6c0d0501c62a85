//! The exchange recurrence of the coefficient-free cluster algebra `A(b, c)`.
//!
//! Cluster variables satisfy `x_{m-1} x_{m+1} = x_m^b + 1` for odd `m` and
//! `x_{m-1} x_{m+1} = x_m^c + 1` for even `m`. Every step is an exact Laurent
//! division; a `NotDivisible` error here is a bug, never mathematics.

use std::collections::HashMap;
use std::ops::RangeInclusive;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{LaurentPolynomial, VariableContext};
use crate::report::CheckReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ExchangeType {
    b: u32,
    c: u32,
}

impl ExchangeType {
    pub fn new(b: i64, c: i64) -> Result<Self> {
        if b < 1 || c < 1 || b > u32::MAX as i64 || c > u32::MAX as i64 {
            return Err(Error::InvalidExchangeType { b, c });
        }
        Ok(ExchangeType {
            b: b as u32,
            c: c as u32,
        })
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    /// `A(c, b)`.
    pub fn transpose(&self) -> Self {
        ExchangeType {
            b: self.c,
            c: self.b,
        }
    }

    /// Exponent in the exchange relation centred at index `m`.
    pub fn exponent_at(&self, m: i64) -> u32 {
        if m.rem_euclid(2) == 1 {
            self.b
        } else {
            self.c
        }
    }

    /// `[[0, b], [-c, 0]]`.
    pub fn exchange_matrix(&self) -> [[i64; 2]; 2] {
        [[0, self.b as i64], [-(self.c as i64), 0]]
    }
}

/// `x_k` expressed in the cluster `(x_m, x_{m+1})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ClusterIndex {
    pub k: i64,
    pub m: i64,
}

/// Exchange-type data plus a memo of computed cluster variables.
///
/// The expansion of `x_k` in `(x_m, x_{m+1})` depends only on `k - m` and on
/// the parity of `m`, so that pair keys the cache. The cache only grows;
/// concurrent callers may compute the same entry twice and insert equal
/// values.
pub struct ClusterAlgebra {
    ty: ExchangeType,
    x: VariableContext,
    y: VariableContext,
    cache: RwLock<HashMap<(i64, i64), Arc<LaurentPolynomial>>>,
}

impl ClusterAlgebra {
    pub fn new(ty: ExchangeType) -> Self {
        ClusterAlgebra {
            ty,
            x: VariableContext::new(["x1", "x2"]).expect("valid names"),
            y: VariableContext::new(["y1", "y2"]).expect("valid names"),
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn exchange_type(&self) -> ExchangeType {
        self.ty
    }

    /// Context `{x1, x2}` of the initial cluster.
    pub fn initial_context(&self) -> &VariableContext {
        &self.x
    }

    /// Context `{y1, y2}` used for expansions in a shifted cluster.
    pub fn shifted_context(&self) -> &VariableContext {
        &self.y
    }

    fn lookup(&self, parity: i64, j: i64) -> Option<Arc<LaurentPolynomial>> {
        if j == 0 || j == 1 {
            return Some(Arc::new(LaurentPolynomial::variable(&self.x, j as usize)));
        }
        self.cache.read().expect("cache lock").get(&(parity, j)).cloned()
    }

    fn store(&self, parity: i64, j: i64, p: LaurentPolynomial) -> Arc<LaurentPolynomial> {
        let p = Arc::new(p);
        self.cache
            .write()
            .expect("cache lock")
            .entry((parity, j))
            .or_insert_with(|| p.clone())
            .clone()
    }

    /// `x_{m+j}` in the cluster `(x_m, x_{m+1})`, over `{x1, x2}`.
    ///
    /// Exponents are keyed on the absolute index `m + j`, not on `j`.
    fn relative(&self, m: i64, j: i64) -> Result<Arc<LaurentPolynomial>> {
        let parity = m.rem_euclid(2);
        if let Some(p) = self.lookup(parity, j) {
            return Ok(p);
        }
        let one = LaurentPolynomial::one(&self.x);
        if j >= 2 {
            let mut start = 2;
            while start < j && self.lookup(parity, start).is_some() {
                start += 1;
            }
            let mut last = None;
            for n in start..=j {
                let prev = self.lookup(parity, n - 1).expect("filled in order");
                let prev2 = self.lookup(parity, n - 2).expect("filled in order");
                let e = self.ty.exponent_at(m + n - 1);
                let next = prev.pow(e).add(&one)?.exact_div(&prev2)?;
                last = Some(self.store(parity, n, next));
            }
            Ok(last.expect("range is nonempty"))
        } else {
            let mut start = -1;
            while start > j && self.lookup(parity, start).is_some() {
                start -= 1;
            }
            let mut last = None;
            for n in (j..=start).rev() {
                let next1 = self.lookup(parity, n + 1).expect("filled in order");
                let next2 = self.lookup(parity, n + 2).expect("filled in order");
                let e = self.ty.exponent_at(m + n + 1);
                let prev = next1.pow(e).add(&one)?.exact_div(&next2)?;
                last = Some(self.store(parity, n, prev));
            }
            Ok(last.expect("range is nonempty"))
        }
    }

    /// `x_k` in the initial cluster `(x_1, x_2)`.
    pub fn cluster_variable(&self, k: i64) -> Result<LaurentPolynomial> {
        Ok((*self.relative(1, k - 1)?).clone())
    }

    /// `x_k` as a Laurent polynomial in `y1 = x_m`, `y2 = x_{m+1}`.
    pub fn expand_in_cluster(&self, k: i64, m: i64) -> Result<LaurentPolynomial> {
        self.relative(m, k - m)?.rename(&self.y)
    }

    pub fn d_vector(&self, k: i64) -> Result<(i64, i64)> {
        let d = self.relative(1, k - 1)?.denominator_exponents()?;
        Ok((d[0] as i64, d[1] as i64))
    }

    /// Smallest `p <= max_period` with `x_{1+p} = x_1` and `x_{2+p} = x_2`.
    pub fn detect_period(&self, max_period: u32) -> Result<Option<u32>> {
        let x1 = self.relative(1, 0)?;
        let x2 = self.relative(1, 1)?;
        for p in 1..=max_period as i64 {
            if *self.relative(1, p)? == *x1 && *self.relative(1, p + 1)? == *x2 {
                return Ok(Some(p as u32));
            }
        }
        Ok(None)
    }

    /// Runs the requested checks on every `(k, m)` in range, in input order.
    pub fn sweep(
        &self,
        ks: RangeInclusive<i64>,
        ms: RangeInclusive<i64>,
        checks: SweepChecks,
    ) -> CheckReport {
        let mut names = Vec::new();
        if checks.positivity {
            names.push("positivity");
        }
        if checks.laurent {
            names.push("laurent");
        }
        if checks.denominator {
            names.push("denominator");
        }
        let mut report = CheckReport::new(
            names.join(","),
            format!(
                "(b,c)=({},{}), k in [{}, {}], m in [{}, {}]",
                self.ty.b,
                self.ty.c,
                ks.start(),
                ks.end(),
                ms.start(),
                ms.end()
            ),
        );
        for m in ms.clone() {
            for k in ks.clone() {
                let label = format!("k={k} m={m}");
                if let Some(limit) = checks.max_terms {
                    let estimate = estimated_terms(self.ty, k, m);
                    if estimate > limit as u128 {
                        report.inconclusive(
                            label,
                            format!("estimated {estimate} terms exceeds budget of {limit}"),
                        );
                        continue;
                    }
                }
                let p = match self.expand_in_cluster(k, m) {
                    Ok(p) => p,
                    Err(Error::NotDivisible) => {
                        report.fail(label, "recurrence division was not exact");
                        continue;
                    }
                    Err(e) => {
                        report.inconclusive(label, e.to_string());
                        continue;
                    }
                };
                if checks.positivity && !p.is_positive() {
                    report.fail(label, format!("negative coefficient in {p}"));
                    continue;
                }
                if checks.denominator {
                    if let Err(why) = self.denominator_growth(k, m) {
                        report.fail(label, why);
                        continue;
                    }
                }
                report.pass(label);
            }
        }
        report
    }

    /// `d`-vectors are nonnegative, and for `bc >= 4` their max-norm grows
    /// strictly between consecutive variables of the same parity class as
    /// `x_k` moves away from the seed `(x_m, x_{m+1})`.
    fn denominator_growth(&self, k: i64, m: i64) -> std::result::Result<(), String> {
        let norm = |p: &LaurentPolynomial| -> std::result::Result<i32, String> {
            let d = p.denominator_exponents().map_err(|e| e.to_string())?;
            if d.iter().any(|&x| x < 0) {
                return Err(format!("negative d-vector {:?}", &*d));
            }
            Ok(d.iter().copied().max().unwrap_or(0))
        };
        let j = k - m;
        let here = norm(&*self.relative(m, j).map_err(|e| e.to_string())?)?;
        if self.ty.b * self.ty.c < 4 || (-2..=3).contains(&j) {
            return Ok(());
        }
        let inner = if j > 0 { j - 2 } else { j + 2 };
        let before = norm(&*self.relative(m, inner).map_err(|e| e.to_string())?)?;
        if here > before {
            Ok(())
        } else {
            Err(format!(
                "d-vector max-norm {here} does not exceed {before} two steps closer to the seed"
            ))
        }
    }

    /// Positivity of `x_k` in every cluster `(x_m, x_{m+1})` of the given ranges.
    pub fn check_positivity_range(
        &self,
        ks: RangeInclusive<i64>,
        ms: RangeInclusive<i64>,
    ) -> CheckReport {
        self.sweep(ks, ms, SweepChecks::positivity())
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SweepChecks {
    pub positivity: bool,
    pub laurent: bool,
    pub denominator: bool,
    /// Skip (as inconclusive) items whose predicted size exceeds this many terms.
    pub max_terms: Option<u64>,
}

impl SweepChecks {
    pub fn positivity() -> Self {
        SweepChecks {
            positivity: true,
            laurent: true,
            ..Default::default()
        }
    }

    pub fn all() -> Self {
        SweepChecks {
            positivity: true,
            laurent: true,
            denominator: true,
            max_terms: None,
        }
    }

    pub fn with_budget(mut self, max_terms: u64) -> Self {
        self.max_terms = Some(max_terms);
        self
    }
}

/// Size estimate for `x_k` in `(x_m, x_{m+1})` from the tropical d-vector
/// recurrence `d_{n+1} = e [d_n]_+ - d_{n-1}`: the numerator fits in a box of
/// `(e_1 d_2 + 1)(e_2 d_1 + 1)` lattice points.
pub fn estimated_terms(ty: ExchangeType, k: i64, m: i64) -> u128 {
    let j = k - m;
    let (mut prev, mut cur): ([i128; 2], [i128; 2]) = ([-1, 0], [0, -1]);
    let step = |prev: [i128; 2], cur: [i128; 2], e: u32| -> [i128; 2] {
        let e = e as i128;
        [
            (e * cur[0].max(0) - prev[0]).min(1 << 60),
            (e * cur[1].max(0) - prev[1]).min(1 << 60),
        ]
    };
    let d = if j >= 1 {
        for n in 2..=j {
            let next = step(prev, cur, ty.exponent_at(m + n - 1));
            prev = cur;
            cur = next;
        }
        cur
    } else {
        // walk downward: prev holds x_{m+1}, cur holds x_m
        let (mut up, mut here) = ([0, -1], [-1, 0]);
        for n in (j..0).rev() {
            let next = step(up, here, ty.exponent_at(m + n + 1));
            up = here;
            here = next;
        }
        here
    };
    let d1 = d[0].max(0) as u128;
    let d2 = d[1].max(0) as u128;
    let e = ty.b.max(ty.c) as u128;
    (e * d2 + 1).saturating_mul(e * d1 + 1)
}

/// `x_k` of `A(b, c)` over `{x1, x2}` with a fresh cache.
pub fn cluster_variable(ty: ExchangeType, k: i64) -> Result<LaurentPolynomial> {
    ClusterAlgebra::new(ty).cluster_variable(k)
}

pub fn expand_in_cluster(ty: ExchangeType, k: i64, m: i64) -> Result<LaurentPolynomial> {
    ClusterAlgebra::new(ty).expand_in_cluster(k, m)
}

pub fn d_vector(ty: ExchangeType, k: i64) -> Result<(i64, i64)> {
    ClusterAlgebra::new(ty).d_vector(k)
}

pub fn detect_period(ty: ExchangeType, max_period: u32) -> Result<Option<u32>> {
    ClusterAlgebra::new(ty).detect_period(max_period)
}

pub fn check_positivity_range(
    ty: ExchangeType,
    ks: RangeInclusive<i64>,
    ms: RangeInclusive<i64>,
) -> CheckReport {
    ClusterAlgebra::new(ty).check_positivity_range(ks, ms)
}
