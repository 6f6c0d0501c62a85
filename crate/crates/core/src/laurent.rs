//! Laurent polynomials with arbitrary-precision integer coefficients.
//!
//! A [`LaurentPolynomial`] lives in `Z[z_1^{±1}, ..., z_n^{±1}]` for a fixed
//! [`VariableContext`]. Terms are stored as a map from [`ExponentVector`] to a
//! nonzero [`BigInt`]; zero coefficients are removed after every operation, so
//! structural equality is ring equality.
//!
//! Iteration order of the internal map is unspecified. Anything that leaves
//! the process (text, JSON) goes through a sorted view.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Ordered, named set of indeterminates. Cheap to clone.
#[derive(Clone)]
pub struct VariableContext(Arc<[String]>);

impl VariableContext {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidContext("at least one variable is required".into()));
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidContext(format!("variable {i} has an empty name")));
            }
            if names[..i].contains(name) {
                return Err(Error::InvalidContext(format!("duplicate variable `{name}`")));
            }
        }
        Ok(VariableContext(names.into()))
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    fn describe(&self) -> String {
        self.0.join(", ")
    }
}

impl PartialEq for VariableContext {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for VariableContext {}

impl fmt::Debug for VariableContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Signed exponents of a Laurent monomial, one per context variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(SmallVec<[i32; 8]>);

impl ExponentVector {
    pub fn zeros(n: usize) -> Self {
        ExponentVector(SmallVec::from_elem(0, n))
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    fn plus(&self, other: &Self) -> Self {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn minus(&self, other: &Self) -> Self {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    fn dominates(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

impl Deref for ExponentVector {
    type Target = [i32];

    fn deref(&self) -> &[i32] {
        &self.0
    }
}

impl From<&[i32]> for ExponentVector {
    fn from(v: &[i32]) -> Self {
        ExponentVector(SmallVec::from_slice(v))
    }
}

impl From<Vec<i32>> for ExponentVector {
    fn from(v: Vec<i32>) -> Self {
        ExponentVector(SmallVec::from_vec(v))
    }
}

impl<const N: usize> From<[i32; N]> for ExponentVector {
    fn from(v: [i32; N]) -> Self {
        ExponentVector(SmallVec::from_slice(&v))
    }
}

impl FromIterator<i32> for ExponentVector {
    fn from_iter<I: IntoIterator<Item = i32>>(iter: I) -> Self {
        ExponentVector(iter.into_iter().collect())
    }
}

#[derive(Clone)]
pub struct LaurentPolynomial {
    context: VariableContext,
    terms: HashMap<ExponentVector, BigInt>,
}

impl LaurentPolynomial {
    pub fn zero(context: &VariableContext) -> Self {
        LaurentPolynomial {
            context: context.clone(),
            terms: HashMap::new(),
        }
    }

    pub fn one(context: &VariableContext) -> Self {
        Self::constant(context, BigInt::one())
    }

    pub fn constant(context: &VariableContext, c: impl Into<BigInt>) -> Self {
        Self::monomial(context, ExponentVector::zeros(context.arity()), c)
            .expect("zero vector always matches the context")
    }

    /// `c · z^exponents`.
    pub fn monomial(
        context: &VariableContext,
        exponents: impl Into<ExponentVector>,
        c: impl Into<BigInt>,
    ) -> Result<Self> {
        let exponents = exponents.into();
        check_arity(context, exponents.len())?;
        let c = c.into();
        let mut terms = HashMap::new();
        if !c.is_zero() {
            terms.insert(exponents, c);
        }
        Ok(LaurentPolynomial {
            context: context.clone(),
            terms,
        })
    }

    /// The `i`-th variable of the context.
    pub fn variable(context: &VariableContext, i: usize) -> Self {
        let mut e = ExponentVector::zeros(context.arity());
        e.0[i] = 1;
        Self::monomial(context, e, 1).expect("arity matches")
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging repeats.
    pub fn from_terms<E, C>(
        context: &VariableContext,
        terms: impl IntoIterator<Item = (E, C)>,
    ) -> Result<Self>
    where
        E: Into<ExponentVector>,
        C: Into<BigInt>,
    {
        let mut out = Self::zero(context);
        for (e, c) in terms {
            let e = e.into();
            check_arity(context, e.len())?;
            out.add_term(e, c.into());
        }
        Ok(out)
    }

    pub fn context(&self) -> &VariableContext {
        &self.context
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(e, c)| c.is_one() && e.iter().all(|&x| x == 0))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exponents: &[i32]) -> BigInt {
        self.terms
            .get(&ExponentVector::from(exponents))
            .cloned()
            .unwrap_or_default()
    }

    /// Unordered view of the terms.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &BigInt)> {
        self.terms.iter()
    }

    /// Terms sorted lexicographically by exponent vector.
    pub fn sorted_terms(&self) -> Vec<(&ExponentVector, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_unstable_by(|a, b| a.0.cmp(b.0));
        v
    }

    fn add_term(&mut self, e: ExponentVector, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
        }
    }

    fn same_context(&self, other: &Self) -> Result<()> {
        if self.context == other.context {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                left: self.context.describe(),
                right: other.context.describe(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        let (mut out, small) = if self.terms.len() >= other.terms.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (e, c) in &small.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        if let Some(dense) = self.dense_product(other) {
            return Ok(dense);
        }
        let mut terms: HashMap<ExponentVector, BigInt> =
            HashMap::with_capacity(self.terms.len().max(other.terms.len()));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let prod = ca * cb;
                match terms.entry(ea.plus(eb)) {
                    Entry::Occupied(mut slot) => *slot.get_mut() += prod,
                    Entry::Vacant(slot) => {
                        slot.insert(prod);
                    }
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(LaurentPolynomial {
            context: self.context.clone(),
            terms,
        })
    }

    /// Product accumulated into a flat array over the bounding box of the
    /// result. Used when the box is small relative to the work.
    fn dense_product(&self, other: &Self) -> Option<Self> {
        const MAX_SLOTS: u128 = 1 << 25;
        let work = self.terms.len() as u128 * other.terms.len() as u128;
        if work < 4096 {
            return None;
        }
        let (lo_a, hi_a) = self.exponent_box()?;
        let (lo_b, hi_b) = other.exponent_box()?;
        let n = lo_a.len();
        let lo: Vec<i64> = (0..n).map(|i| lo_a[i] as i64 + lo_b[i] as i64).collect();
        let extent: Vec<u128> = (0..n)
            .map(|i| (hi_a[i] as i64 + hi_b[i] as i64 - lo[i] + 1) as u128)
            .collect();
        let slots = extent.iter().try_fold(1u128, |acc, &e| acc.checked_mul(e))?;
        if slots > MAX_SLOTS || slots > 16 * work {
            return None;
        }
        let mut stride = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * extent[i + 1] as usize;
        }
        let offset = |e: &ExponentVector, lo_part: &ExponentVector| -> usize {
            (0..n)
                .map(|i| (e[i] - lo_part[i]) as usize * stride[i])
                .sum()
        };
        let a: Vec<(usize, &BigInt)> = self.terms.iter().map(|(e, c)| (offset(e, &lo_a), c)).collect();
        let b: Vec<(usize, &BigInt)> = other.terms.iter().map(|(e, c)| (offset(e, &lo_b), c)).collect();
        let mut acc: Vec<BigInt> = vec![BigInt::zero(); slots as usize];
        for &(ia, ca) in &a {
            for &(ib, cb) in &b {
                acc[ia + ib] += ca * cb;
            }
        }
        let mut terms = HashMap::new();
        for (idx, c) in acc.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut rest = idx;
            let e: ExponentVector = (0..n)
                .map(|i| {
                    let q = rest / stride[i];
                    rest %= stride[i];
                    (lo[i] + q as i64) as i32
                })
                .collect();
            terms.insert(e, c);
        }
        Some(LaurentPolynomial {
            context: self.context.clone(),
            terms,
        })
    }

    fn exponent_box(&self) -> Option<(ExponentVector, ExponentVector)> {
        let lo = self.min_exponents()?;
        let mut hi = lo.clone();
        for e in self.terms.keys() {
            for (h, &x) in hi.0.iter_mut().zip(e.iter()) {
                *h = (*h).max(x);
            }
        }
        Some((lo, hi))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one(&self.context);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base).expect("same context");
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base).expect("same context");
            }
        }
        result
    }

    /// Multiplies by the monomial `z^shift`.
    pub fn shift(&self, shift: &ExponentVector) -> Self {
        LaurentPolynomial {
            context: self.context.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.plus(shift), c.clone()))
                .collect(),
        }
    }

    /// Componentwise minimum exponent over all terms.
    fn min_exponents(&self) -> Option<ExponentVector> {
        let mut iter = self.terms.keys();
        let first = iter.next()?.clone();
        Some(iter.fold(first, |mut acc, e| {
            for (a, &x) in acc.0.iter_mut().zip(e.iter()) {
                *a = (*a).min(x);
            }
            acc
        }))
    }

    /// Exact quotient in the Laurent ring.
    ///
    /// Both operands are first moved into the polynomial ring by monomial
    /// shifts (the divisor so that no variable divides it), then divided under
    /// graded-lexicographic order. Any term that the leading term of the
    /// divisor cannot absorb is a certificate that no quotient exists.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        self.same_context(divisor)?;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let Some(p_min) = self.min_exponents() else {
            return Ok(Self::zero(&self.context));
        };
        let q_min = divisor.min_exponents().expect("divisor is nonzero");

        if divisor.terms.len() == 1 {
            let c = divisor.terms.values().next().expect("one term");
            let mut terms = HashMap::with_capacity(self.terms.len());
            for (e, a) in &self.terms {
                let (quo, rem) = a.div_rem(c);
                if !rem.is_zero() {
                    return Err(Error::NotDivisible);
                }
                terms.insert(e.minus(&q_min), quo);
            }
            return Ok(LaurentPolynomial {
                context: self.context.clone(),
                terms,
            });
        }

        if let Some(result) = self.dense_division(divisor, &p_min, &q_min) {
            return result;
        }

        let grlex = |e: ExponentVector| (e.degree(), e);
        let mut divisor_terms: Vec<((i64, ExponentVector), &BigInt)> = divisor
            .terms
            .iter()
            .map(|(e, c)| (grlex(e.minus(&q_min)), c))
            .collect();
        divisor_terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let ((_, lead_exp), lead_coef) = divisor_terms[0].clone();
        let tail = &divisor_terms[1..];

        let mut remainder: BTreeMap<(i64, ExponentVector), BigInt> = self
            .terms
            .iter()
            .map(|(e, c)| (grlex(e.minus(&p_min)), c.clone()))
            .collect();
        let mut quotient = HashMap::new();
        while let Some(((_, exp), coef)) = remainder.pop_last() {
            if !exp.dominates(&lead_exp) {
                return Err(Error::NotDivisible);
            }
            let (factor, rem) = coef.div_rem(lead_coef);
            if !rem.is_zero() {
                return Err(Error::NotDivisible);
            }
            let q_exp = exp.minus(&lead_exp);
            for ((_, e), c) in tail {
                let key = grlex(e.plus(&q_exp));
                let delta = &factor * *c;
                match remainder.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut slot) => {
                        *slot.get_mut() -= delta;
                        if slot.get().is_zero() {
                            slot.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(slot) => {
                        slot.insert(-delta);
                    }
                }
            }
            quotient.insert(q_exp, factor);
        }
        let back = p_min.minus(&q_min);
        Ok(LaurentPolynomial {
            context: self.context.clone(),
            terms: quotient
                .into_iter()
                .map(|(e, c)| (e.plus(&back), c))
                .collect(),
        })
    }

    /// Exact division on a flat array over the dividend's bounding box, in
    /// lexicographic order. Every partial product of an exact quotient lands
    /// inside that box, so stepping outside it certifies non-divisibility.
    fn dense_division(
        &self,
        divisor: &Self,
        p_min: &ExponentVector,
        q_min: &ExponentVector,
    ) -> Option<Result<Self>> {
        const MAX_SLOTS: u128 = 1 << 25;
        let (_, p_max) = self.exponent_box()?;
        let (_, q_max) = divisor.exponent_box()?;
        let n = p_min.len();
        let extent: Vec<i64> = (0..n).map(|i| (p_max[i] - p_min[i]) as i64 + 1).collect();
        let slots = extent
            .iter()
            .try_fold(1u128, |acc, &e| acc.checked_mul(e as u128))?;
        let work = self.terms.len() as u128 * divisor.terms.len() as u128;
        if slots > MAX_SLOTS || slots > 16 * work || work < 4096 {
            return None;
        }
        if (0..n).any(|i| q_max[i] - q_min[i] > p_max[i] - p_min[i]) {
            return Some(Err(Error::NotDivisible));
        }
        let mut stride = vec![1i64; n];
        for i in (0..n.saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * extent[i + 1];
        }
        let index = |e: &[i64]| -> i64 { e.iter().zip(&stride).map(|(a, s)| a * s).sum() };

        let mut rem: Vec<BigInt> = vec![BigInt::zero(); slots as usize];
        for (e, c) in &self.terms {
            let local: Vec<i64> = (0..n).map(|i| (e[i] - p_min[i]) as i64).collect();
            rem[index(&local) as usize] = c.clone();
        }
        // divisor shifted so that its own box starts at the origin
        let mut q_terms: Vec<(Vec<i64>, &BigInt)> = divisor
            .terms
            .iter()
            .map(|(e, c)| ((0..n).map(|i| (e[i] - q_min[i]) as i64).collect(), c))
            .collect();
        q_terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let (lead_exp, lead_coef) = (q_terms[0].0.clone(), q_terms[0].1);
        let lead_idx = index(&lead_exp);
        let tail: Vec<(i64, &BigInt)> = q_terms[1..]
            .iter()
            .map(|(e, c)| (index(e) - lead_idx, *c))
            .collect();
        let q_extent: Vec<i64> = (0..n).map(|i| (q_max[i] - q_min[i]) as i64).collect();

        let mut quotient = HashMap::new();
        let shift_back: Vec<i64> = (0..n).map(|i| (p_min[i] - q_min[i]) as i64).collect();
        for idx in (0..slots as usize).rev() {
            if rem[idx].is_zero() {
                continue;
            }
            let mut rest = idx as i64;
            let mut coords = vec![0i64; n];
            for i in 0..n {
                coords[i] = rest / stride[i];
                rest %= stride[i];
            }
            // quotient exponent (box-local) = coords - lead; its divisor image
            // must fit inside the dividend box
            let q_exp: Vec<i64> = (0..n).map(|i| coords[i] - lead_exp[i]).collect();
            if (0..n).any(|i| q_exp[i] < 0 || q_exp[i] + q_extent[i] >= extent[i]) {
                return Some(Err(Error::NotDivisible));
            }
            let (factor, r) = rem[idx].div_rem(lead_coef);
            if !r.is_zero() {
                return Some(Err(Error::NotDivisible));
            }
            rem[idx] = BigInt::zero();
            for &(delta, c) in &tail {
                let j = (idx as i64 + delta) as usize;
                rem[j] -= &factor * c;
            }
            let e: ExponentVector = (0..n).map(|i| (q_exp[i] + shift_back[i]) as i32).collect();
            quotient.insert(e, factor);
        }
        Some(Ok(LaurentPolynomial {
            context: self.context.clone(),
            terms: quotient,
        }))
    }

    /// Ring homomorphism sending every source variable to a unit monomial of
    /// the target context.
    pub fn specialize(&self, map: &MonomialMap) -> Result<Self> {
        if map.source != self.context {
            return Err(Error::ContextMismatch {
                left: self.context.describe(),
                right: map.source.describe(),
            });
        }
        for (i, image) in map.images.iter().enumerate() {
            if image.is_none() && self.terms.keys().any(|e| e[i] != 0) {
                return Err(Error::MissingImage(self.context.name(i).to_string()));
            }
        }
        let n = map.target.arity();
        let mut out = Self::zero(&map.target);
        for (e, c) in &self.terms {
            let mut image = ExponentVector::zeros(n);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let target = map.images[i].as_ref().expect("checked above");
                for (slot, &t) in image.0.iter_mut().zip(target.iter()) {
                    *slot += k * t;
                }
            }
            out.add_term(image, c.clone());
        }
        Ok(out)
    }

    /// Applies `u_i ↦ u_{g(i)}`.
    pub fn permute_variables(&self, g: &Permutation) -> Result<Self> {
        if g.len() != self.context.arity() {
            return Err(Error::InvalidPermutation(format!(
                "permutation of {} points applied to {} variables",
                g.len(),
                self.context.arity()
            )));
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut image = ExponentVector::zeros(e.len());
                for (i, &k) in e.iter().enumerate() {
                    image.0[g.apply(i)] = k;
                }
                (image, c.clone())
            })
            .collect();
        Ok(LaurentPolynomial {
            context: self.context.clone(),
            terms,
        })
    }

    /// Every stored coefficient is strictly positive. The zero polynomial is
    /// positive vacuously.
    pub fn is_positive(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    /// Exponents of the monomial denominator when written `N / z^d` with `N` a
    /// polynomial divisible by no variable.
    pub fn denominator_exponents(&self) -> Result<ExponentVector> {
        let min = self.min_exponents().ok_or(Error::ZeroPolynomial)?;
        Ok(min.iter().map(|&e| (-e).max(0)).collect())
    }

    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational> {
        check_arity(&self.context, point.len())?;
        if let Some(i) = point.iter().position(|x| x.is_zero()) {
            return Err(Error::ZeroCoordinate(self.context.name(i).to_string()));
        }
        let mut cache: HashMap<(usize, i32), BigRational> = HashMap::new();
        let mut total = BigRational::zero();
        for (e, c) in &self.terms {
            let mut term = BigRational::from_integer(c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let factor = cache
                    .entry((i, k))
                    .or_insert_with(|| num_traits::pow::Pow::pow(&point[i], k));
                term *= &*factor;
            }
            total += term;
        }
        Ok(total)
    }

    /// Integer-point evaluation convenience wrapper.
    pub fn evaluate_integers(&self, point: &[i64]) -> Result<BigRational> {
        let point: Vec<BigRational> = point
            .iter()
            .map(|&x| BigRational::from_integer(BigInt::from(x)))
            .collect();
        self.evaluate(&point)
    }

    /// Same terms over a different context of the same arity.
    pub fn rename(&self, context: &VariableContext) -> Result<Self> {
        check_arity(context, self.context.arity())?;
        Ok(LaurentPolynomial {
            context: context.clone(),
            terms: self.terms.clone(),
        })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("polynomial JSON is always representable")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynomial JSON is always representable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn check_arity(context: &VariableContext, found: usize) -> Result<()> {
    if context.arity() == found {
        Ok(())
    } else {
        Err(Error::ArityMismatch {
            expected: context.arity(),
            found,
        })
    }
}

impl PartialEq for LaurentPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.context == other.context && self.terms == other.terms
    }
}

impl Eq for LaurentPolynomial {}

impl fmt::Debug for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Order used for display: compare from the last variable backwards.
fn display_order(a: &ExponentVector, b: &ExponentVector) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

fn write_monomial(out: &mut String, names: &[String], e: &[i32]) {
    let mut first = true;
    for (name, &k) in names.iter().zip(e) {
        if k == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push_str(name);
        if k != 1 {
            out.push('^');
            out.push_str(&k.to_string());
        }
    }
}

impl fmt::Display for LaurentPolynomial {
    /// Single-line fraction `N / d` with the monomial denominator factored out.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Ok(denominator) = self.denominator_exponents() else {
            return f.write_str("0");
        };
        let names = self.context.names();
        let mut numerator: Vec<(ExponentVector, &BigInt)> = self
            .terms
            .iter()
            .map(|(e, c)| (e.plus(&denominator), c))
            .collect();
        numerator.sort_by(|a, b| display_order(&a.0, &b.0));

        let mut num = String::new();
        for (i, (e, c)) in numerator.iter().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => num.push('-'),
                (0, false) => {}
                (_, true) => num.push_str(" - "),
                (_, false) => num.push_str(" + "),
            }
            let abs = c.abs();
            let is_const = e.iter().all(|&k| k == 0);
            if is_const {
                num.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    num.push_str(&abs.to_string());
                    num.push('*');
                }
                write_monomial(&mut num, names, e);
            }
        }

        let denominator_factors = denominator.iter().filter(|&&k| k != 0).count();
        if denominator_factors == 0 {
            return f.write_str(&num);
        }
        let mut den = String::new();
        write_monomial(&mut den, names, &denominator);
        if numerator.len() > 1 {
            write!(f, "({num})")?;
        } else {
            f.write_str(&num)?;
        }
        if denominator_factors > 1 {
            write!(f, " / ({den})")
        } else {
            write!(f, " / {den}")
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    exponents: Vec<i32>,
    coefficient: String,
}

#[derive(Serialize, Deserialize)]
struct PolynomialRecord {
    variables: Vec<String>,
    terms: Vec<TermRecord>,
}

impl Serialize for LaurentPolynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PolynomialRecord {
            variables: self.context.names().to_vec(),
            terms: self
                .sorted_terms()
                .into_iter()
                .map(|(e, c)| TermRecord {
                    exponents: e.to_vec(),
                    coefficient: c.to_string(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let record = PolynomialRecord::deserialize(deserializer)?;
        let context = VariableContext::new(record.variables).map_err(D::Error::custom)?;
        let mut terms = Vec::with_capacity(record.terms.len());
        for t in record.terms {
            let c: BigInt = t
                .coefficient
                .parse()
                .map_err(|_| D::Error::custom(format!("bad coefficient `{}`", t.coefficient)))?;
            terms.push((ExponentVector::from(t.exponents), c));
        }
        LaurentPolynomial::from_terms(&context, terms).map_err(D::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &LaurentPolynomial {
            type Output = LaurentPolynomial;

            /// Panics when the contexts differ; use the inherent method to get a `Result`.
            fn $method(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
                LaurentPolynomial::$method(self, rhs).expect("operands share a context")
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn neg(self) -> LaurentPolynomial {
        LaurentPolynomial {
            context: self.context.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

/// Images of source variables as unit monomials in a target context.
#[derive(Clone, Debug)]
pub struct MonomialMap {
    source: VariableContext,
    target: VariableContext,
    images: Vec<Option<ExponentVector>>,
}

impl MonomialMap {
    pub fn new(source: &VariableContext, target: &VariableContext) -> Self {
        MonomialMap {
            source: source.clone(),
            target: target.clone(),
            images: vec![None; source.arity()],
        }
    }

    /// The map sending each variable to the same-named variable.
    pub fn identity(context: &VariableContext) -> Self {
        let mut map = Self::new(context, context);
        for i in 0..context.arity() {
            let mut e = ExponentVector::zeros(context.arity());
            e.0[i] = 1;
            map.images[i] = Some(e);
        }
        map
    }

    pub fn set(mut self, source_var: &str, image: impl Into<ExponentVector>) -> Result<Self> {
        let i = self
            .source
            .index_of(source_var)
            .ok_or_else(|| Error::InvalidContext(format!("unknown variable `{source_var}`")))?;
        let image = image.into();
        check_arity(&self.target, image.len())?;
        self.images[i] = Some(image);
        Ok(self)
    }

    /// Sends `source_var` to the single target variable `target_var`.
    pub fn set_variable(self, source_var: &str, target_var: &str) -> Result<Self> {
        let j = self
            .target
            .index_of(target_var)
            .ok_or_else(|| Error::InvalidContext(format!("unknown variable `{target_var}`")))?;
        let mut e = ExponentVector::zeros(self.target.arity());
        e.0[j] = 1;
        self.set(source_var, e)
    }

    pub fn source(&self) -> &VariableContext {
        &self.source
    }

    pub fn target(&self) -> &VariableContext {
        &self.target
    }
}

/// A bijection of `{0, ..., n-1}`, acting on variables by index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    /// Permutation of a context given as `name ↦ name` pairs; unlisted names are fixed.
    pub fn from_names(context: &VariableContext, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut images: Vec<usize> = (0..context.arity()).collect();
        for (from, to) in pairs {
            let i = context
                .index_of(from)
                .ok_or_else(|| Error::InvalidPermutation(format!("unknown variable `{from}`")))?;
            let j = context
                .index_of(to)
                .ok_or_else(|| Error::InvalidPermutation(format!("unknown variable `{to}`")))?;
            images[i] = j;
        }
        Self::from_images(images)
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, j);
        Permutation(images)
    }

    /// The cycle `points[0] → points[1] → ... → points[0]`.
    pub fn cycle(n: usize, points: &[usize]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        for (k, &p) in points.iter().enumerate() {
            if p >= n {
                return Err(Error::InvalidPermutation(format!("point {p} out of range")));
            }
            images[p] = points[(k + 1) % points.len()];
        }
        Self::from_images(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn xy() -> VariableContext {
        VariableContext::new(["x1", "x2"]).unwrap()
    }

    fn u23() -> VariableContext {
        VariableContext::new(["u_v1", "u_v2", "u_w1", "u_w2", "u_w3"]).unwrap()
    }

    fn poly(ctx: &VariableContext, terms: &[(&[i32], i64)]) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(ctx, terms.iter().map(|(e, c)| (*e, *c))).unwrap()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn context_rejects_duplicates_and_empty() {
        assert!(VariableContext::new(Vec::<String>::new()).is_err());
        assert!(VariableContext::new(["x", "x"]).is_err());
        assert!(VariableContext::new(["x", ""]).is_err());
    }

    #[test]
    fn add_cancels_and_keeps_identity() {
        let ctx = xy();
        let p = poly(&ctx, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let q = poly(&ctx, &[(&[1, 0], 1), (&[0, 1], -1)]);
        assert_eq!(&p + &q, poly(&ctx, &[(&[1, 0], 2)]));
        assert_eq!(&p + &LaurentPolynomial::zero(&ctx), p);

        let a = poly(&ctx, &[(&[0, 0], 1), (&[2, 0], 1)]);
        let b = poly(&ctx, &[(&[0, 3], 2), (&[0, 6], 1)]);
        assert_eq!(
            &a + &b,
            poly(&ctx, &[(&[0, 0], 1), (&[2, 0], 1), (&[0, 3], 2), (&[0, 6], 1)])
        );
    }

    #[test]
    fn mixing_contexts_is_an_error() {
        let p = LaurentPolynomial::one(&xy());
        let q = LaurentPolynomial::one(&u23());
        assert!(matches!(p.add(&q), Err(Error::ContextMismatch { .. })));
        assert!(matches!(p.mul(&q), Err(Error::ContextMismatch { .. })));
        assert!(matches!(p.exact_div(&q), Err(Error::ContextMismatch { .. })));
    }

    #[test]
    fn mul_reproduces_projective_character() {
        let ctx = u23();
        let num = poly(&ctx, &[(&[0, 0, 0, 0, 0], 1), (&[1, 1, 0, 0, 0], 1)]);
        let inv_w1 = poly(&ctx, &[(&[0, 0, -1, 0, 0], 1)]);
        let x_pw1 = poly(&ctx, &[(&[0, 0, -1, 0, 0], 1), (&[1, 1, -1, 0, 0], 1)]);
        assert_eq!(&num * &inv_w1, x_pw1);
        assert_eq!(&num * &LaurentPolynomial::one(&ctx), num);
        assert_eq!(
            num.pow(3),
            poly(
                &ctx,
                &[
                    (&[0, 0, 0, 0, 0], 1),
                    (&[1, 1, 0, 0, 0], 3),
                    (&[2, 2, 0, 0, 0], 3),
                    (&[3, 3, 0, 0, 0], 1)
                ]
            )
        );
    }

    #[test]
    fn pow_edge_cases() {
        let ctx = xy();
        let x2 = LaurentPolynomial::variable(&ctx, 1);
        assert_eq!(x2.pow(3), poly(&ctx, &[(&[0, 3], 1)]));
        assert!(x2.pow(0).is_one());
        // ((1 + x1^2) / x2)^3
        let x0 = poly(&ctx, &[(&[0, -1], 1), (&[2, -1], 1)]);
        assert_eq!(
            x0.pow(3),
            poly(
                &ctx,
                &[(&[0, -3], 1), (&[2, -3], 3), (&[4, -3], 3), (&[6, -3], 1)]
            )
        );
    }

    #[test]
    fn exact_division_cases() {
        let ctx = xy();
        let p = poly(&ctx, &[(&[2, 0], 1), (&[0, 2], -1)]);
        let q = poly(&ctx, &[(&[1, 0], 1), (&[0, 1], -1)]);
        assert_eq!(p.exact_div(&q).unwrap(), poly(&ctx, &[(&[1, 0], 1), (&[0, 1], 1)]));

        let one_plus_x1 = poly(&ctx, &[(&[0, 0], 1), (&[1, 0], 1)]);
        let x2 = LaurentPolynomial::variable(&ctx, 1);
        assert_eq!(
            one_plus_x1.exact_div(&x2).unwrap(),
            poly(&ctx, &[(&[0, -1], 1), (&[1, -1], 1)])
        );

        let one_plus_x2 = poly(&ctx, &[(&[0, 0], 1), (&[0, 1], 1)]);
        assert_eq!(one_plus_x1.exact_div(&one_plus_x2), Err(Error::NotDivisible));
        assert_eq!(
            one_plus_x1.exact_div(&LaurentPolynomial::zero(&ctx)),
            Err(Error::DivisionByZero)
        );
        // integrality of the quotient matters
        let two = LaurentPolynomial::constant(&ctx, 2);
        assert_eq!(one_plus_x1.exact_div(&two), Err(Error::NotDivisible));
        // a Laurent divisor with shifted support
        let shifted = q.shift(&ExponentVector::from([-3, 2]));
        assert_eq!(
            p.exact_div(&shifted).unwrap(),
            poly(&ctx, &[(&[4, -2], 1), (&[3, -1], 1)])
        );
    }

    #[test]
    fn specialize_folds_and_merges() {
        let u = u23();
        let x = xy();
        let pi = MonomialMap::new(&u, &x)
            .set_variable("u_v1", "x1")
            .unwrap()
            .set_variable("u_v2", "x1")
            .unwrap()
            .set_variable("u_w1", "x2")
            .unwrap()
            .set_variable("u_w2", "x2")
            .unwrap()
            .set_variable("u_w3", "x2")
            .unwrap();
        let p = poly(&u, &[(&[0, 0, -1, 0, 0], 1), (&[0, 0, 0, -1, 0], 1)]);
        assert_eq!(p.specialize(&pi).unwrap(), poly(&x, &[(&[0, -1], 2)]));

        let x_pv1 = poly(
            &u,
            &[
                (&[-1, 0, -1, -1, -1], 1),
                (&[2, 3, -1, -1, -1], 1),
                (&[1, 2, -1, -1, -1], 3),
                (&[0, 1, -1, -1, -1], 3),
                (&[-1, 0, 0, 0, 0], 1),
            ],
        );
        let folded = poly(
            &x,
            &[
                (&[-1, -3], 1),
                (&[5, -3], 1),
                (&[3, -3], 3),
                (&[1, -3], 3),
                (&[-1, 0], 1),
            ],
        );
        assert_eq!(x_pv1.specialize(&pi).unwrap(), folded);
        assert_eq!(p.specialize(&MonomialMap::identity(&u)).unwrap(), p);

        let partial = MonomialMap::new(&u, &x).set_variable("u_v1", "x1").unwrap();
        assert_eq!(
            p.specialize(&partial),
            Err(Error::MissingImage("u_w1".into()))
        );
    }

    #[test]
    fn permutation_relabels() {
        let u = u23();
        let p = poly(&u, &[(&[0, 0, -1, 0, 0], 1), (&[1, 1, -1, 0, 0], 1)]);
        let g = Permutation::from_names(&u, &[("u_w1", "u_w2"), ("u_w2", "u_w1")]).unwrap();
        assert_eq!(
            p.permute_variables(&g).unwrap(),
            poly(&u, &[(&[0, 0, 0, -1, 0], 1), (&[1, 1, 0, -1, 0], 1)])
        );
        assert_eq!(p.permute_variables(&Permutation::identity(5)).unwrap(), p);
        assert!(Permutation::from_images(vec![0, 0, 1]).is_err());
        assert!(p.permute_variables(&Permutation::identity(3)).is_err());
    }

    #[test]
    fn positivity_convention() {
        let ctx = xy();
        assert!(poly(&ctx, &[(&[-2, -1], 1), (&[0, -1], 1), (&[-2, 2], 2), (&[-2, 5], 1)]).is_positive());
        assert!(!poly(&ctx, &[(&[1, 0], 1), (&[0, 1], -1)]).is_positive());
        assert!(LaurentPolynomial::zero(&ctx).is_positive());
    }

    #[test]
    fn denominators() {
        let ctx = xy();
        let x_m1 = poly(
            &ctx,
            &[(&[-1, -3], 1), (&[5, -3], 1), (&[3, -3], 3), (&[1, -3], 3), (&[-1, 0], 1)],
        );
        assert_eq!(&*x_m1.denominator_exponents().unwrap(), &[1, 3]);
        assert_eq!(
            &*LaurentPolynomial::variable(&ctx, 0).denominator_exponents().unwrap(),
            &[0, 0]
        );
        let x3 = poly(&ctx, &[(&[-1, 0], 1), (&[-1, 3], 1)]);
        assert_eq!(&*x3.denominator_exponents().unwrap(), &[1, 0]);
        assert_eq!(
            LaurentPolynomial::zero(&ctx).denominator_exponents(),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn evaluation() {
        let ctx = xy();
        let x0 = poly(&ctx, &[(&[0, -1], 1), (&[2, -1], 1)]);
        assert_eq!(x0.evaluate_integers(&[1, 1]).unwrap(), rat(2));
        assert_eq!(poly(&ctx, &[(&[1, 1], 1)]).evaluate_integers(&[2, 3]).unwrap(), rat(6));
        let x_m1 = poly(
            &ctx,
            &[(&[-1, -3], 1), (&[5, -3], 1), (&[3, -3], 3), (&[1, -3], 3), (&[-1, 0], 1)],
        );
        assert_eq!(x_m1.evaluate_integers(&[1, 1]).unwrap(), rat(9));
        assert!(matches!(x0.evaluate_integers(&[1, 0]), Err(Error::ZeroCoordinate(_))));
        assert_eq!(
            x0.evaluate(&[BigRational::new(1.into(), 2.into()), rat(2)]).unwrap(),
            BigRational::new(5.into(), 8.into())
        );
    }

    #[test]
    fn display_matches_fraction_form() {
        let ctx = xy();
        let x_m1 = poly(
            &ctx,
            &[(&[-1, -3], 1), (&[5, -3], 1), (&[3, -3], 3), (&[1, -3], 3), (&[-1, 0], 1)],
        );
        assert_eq!(x_m1.to_string(), "(1 + 3*x1^2 + 3*x1^4 + x1^6 + x2^3) / (x1*x2^3)");
        assert_eq!(poly(&ctx, &[(&[0, -1], 1), (&[2, -1], 1)]).to_string(), "(1 + x1^2) / x2");
        assert_eq!(LaurentPolynomial::variable(&ctx, 0).to_string(), "x1");
        assert_eq!(LaurentPolynomial::zero(&ctx).to_string(), "0");
        assert_eq!(poly(&ctx, &[(&[1, 0], 1), (&[0, 1], -1)]).to_string(), "x1 - x2");
        assert_eq!(poly(&ctx, &[(&[-1, -1], -3)]).to_string(), "-3 / (x1*x2)");
    }

    #[test]
    fn json_layout() {
        let ctx = xy();
        let p = poly(&ctx, &[(&[0, -1], 1), (&[2, -1], -7), (&[-1, 4], 1)]);
        assert_eq!(
            p.to_json(),
            r#"{"variables":["x1","x2"],"terms":[{"exponents":[-1,4],"coefficient":"1"},{"exponents":[0,-1],"coefficient":"1"},{"exponents":[2,-1],"coefficient":"-7"}]}"#
        );
        assert_eq!(LaurentPolynomial::from_json(&p.to_json()).unwrap(), p);
        assert!(LaurentPolynomial::from_json(r#"{"variables":["x"],"terms":[{"exponents":[1,2],"coefficient":"1"}]}"#).is_err());
    }

    fn arb_poly(ctx: VariableContext) -> impl Strategy<Value = LaurentPolynomial> {
        let n = ctx.arity();
        prop::collection::vec((prop::collection::vec(-3i32..4, n), -5i64..6), 0..6).prop_map(
            move |terms| LaurentPolynomial::from_terms(&ctx, terms).unwrap(),
        )
    }

    fn arb_pair() -> impl Strategy<Value = (LaurentPolynomial, LaurentPolynomial)> {
        (arb_poly(xy()), arb_poly(xy()))
    }

    fn arb_u() -> impl Strategy<Value = LaurentPolynomial> {
        arb_poly(u23())
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    fn fold_map() -> MonomialMap {
        let mut pi = MonomialMap::new(&u23(), &xy());
        for v in ["u_v1", "u_v2"] {
            pi = pi.set_variable(v, "x1").unwrap();
        }
        for w in ["u_w1", "u_w2", "u_w3"] {
            pi = pi.set_variable(w, "x2").unwrap();
        }
        pi
    }

    proptest! {
        #[test]
        fn ring_axioms((p, q) in arb_pair(), r in arb_poly(xy())) {
            prop_assert_eq!(&p + &q, &q + &p);
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert!((&p - &p).is_zero());
        }

        #[test]
        fn division_undoes_multiplication((p, q) in arb_pair()) {
            prop_assume!(!q.is_zero());
            prop_assert_eq!((&p * &q).exact_div(&q).unwrap(), p);
        }

        #[test]
        fn folding_is_a_homomorphism(p in arb_u(), q in arb_u()) {
            let pi = fold_map();
            prop_assert_eq!(
                (&p * &q).specialize(&pi).unwrap(),
                &p.specialize(&pi).unwrap() * &q.specialize(&pi).unwrap()
            );
            prop_assert_eq!(
                (&p + &q).specialize(&pi).unwrap(),
                &p.specialize(&pi).unwrap() + &q.specialize(&pi).unwrap()
            );
        }

        #[test]
        fn permutation_is_an_automorphism(p in arb_u(), q in arb_u(), g in arb_perm(5), h in arb_perm(5)) {
            prop_assert_eq!(
                (&p * &q).permute_variables(&g).unwrap(),
                &p.permute_variables(&g).unwrap() * &q.permute_variables(&g).unwrap()
            );
            prop_assert_eq!(
                p.permute_variables(&h).unwrap().permute_variables(&g).unwrap(),
                p.permute_variables(&g.compose(&h)).unwrap()
            );
        }

        #[test]
        fn folding_forgets_orbit_labels(p in arb_u(), sv in arb_perm(2), sw in arb_perm(3)) {
            let mut images: Vec<usize> = sv.images().to_vec();
            images.extend(sw.images().iter().map(|&j| j + 2));
            let g = Permutation::from_images(images).unwrap();
            let pi = fold_map();
            prop_assert_eq!(p.permute_variables(&g).unwrap().specialize(&pi).unwrap(), p.specialize(&pi).unwrap());
        }

        #[test]
        fn evaluation_is_a_homomorphism((p, q) in arb_pair(), a in prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3]), b in prop::sample::select(vec![-2i64, -1, 1, 2, 5])) {
            let at = [a, b];
            prop_assert_eq!((&p * &q).evaluate_integers(&at).unwrap(), p.evaluate_integers(&at).unwrap() * q.evaluate_integers(&at).unwrap());
            prop_assert_eq!((&p + &q).evaluate_integers(&at).unwrap(), p.evaluate_integers(&at).unwrap() + q.evaluate_integers(&at).unwrap());
        }

        #[test]
        fn json_round_trips(p in arb_u()) {
            let s = p.to_json();
            let back = LaurentPolynomial::from_json(&s).unwrap();
            prop_assert_eq!(back.to_json(), s);
            prop_assert_eq!(back, p);
        }
    }
}
