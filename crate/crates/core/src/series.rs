//! Truncated multivariate power series over exact rationals.
//!
//! A [`TruncatedSeries`] in `m` variables with trust order `N` stores every
//! monomial coefficient of total degree `0..=N` in a dense table ordered by
//! degree. Inside one degree, exponent vectors are listed in descending
//! lexicographic order, so the table for order `k <= N` is a prefix of the
//! table for order `N` and truncation is a slice.
//!
//! Stored numbers are monomial coefficients. The jet coordinate (the partial
//! derivative value at the origin) of a multi-index is the coefficient times
//! its multiplicity factorial, see [`TruncatedSeries::jet_coordinate`].
//!
//! Every binary operation returns a series whose trust order is the smaller
//! of the two inputs; differentiation lowers the trust order by one.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::error::{JetError, Result};
use crate::multi_index::MultiIndex;
use crate::scalar::{self, Scalar};

/// Monomial table for a fixed number of variables and maximal degree.
pub(crate) struct Layout {
    m: usize,
    order: usize,
    exps: Vec<u8>,
    offsets: Vec<usize>,
    lookup: HashMap<Vec<u8>, usize>,
    /// `(i, j, k)` with `mono(i) * mono(j) = mono(k)` and degree within range.
    products: Vec<(u32, u32, u32)>,
    /// For each non-constant monomial: a predecessor index and the axis that was removed.
    pred: Vec<(u32, u8)>,
    /// Per axis: `(src, dst, exponent)` of the formal partial derivative.
    partials: Vec<Vec<(u32, u32, u32)>>,
}

impl Layout {
    fn build(m: usize, order: usize) -> Layout {
        let mut exps = Vec::new();
        let mut offsets = Vec::with_capacity(order + 2);
        fn rec(m: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<u8>) {
            if cur.len() + 1 == m {
                cur.push(left as u8);
                out.extend_from_slice(cur);
                cur.pop();
                return;
            }
            for e in (0..=left).rev() {
                cur.push(e as u8);
                rec(m, left - e, cur, out);
                cur.pop();
            }
        }
        for d in 0..=order {
            offsets.push(if m == 0 { exps.len() } else { exps.len() / m });
            if m == 0 {
                if d == 0 {
                    // the single empty monomial; encoded by count only
                }
            } else {
                rec(m, d, &mut Vec::with_capacity(m), &mut exps);
            }
        }
        let count = if m == 0 { 1 } else { exps.len() / m };
        offsets.push(count);
        let mono = |i: usize| -> &[u8] { &exps[i * m..(i + 1) * m] };
        let mut lookup = HashMap::with_capacity(count);
        for i in 0..count {
            lookup.insert(mono(i).to_vec(), i);
        }
        let degree_of = |i: usize| -> usize { offsets.partition_point(|&o| o <= i) - 1 };
        let mut products = Vec::new();
        for i in 0..count {
            let di = degree_of(i);
            for j in 0..offsets[order - di + 1].min(count) {
                let e: Vec<u8> = mono(i).iter().zip(mono(j)).map(|(a, b)| a + b).collect();
                products.push((i as u32, j as u32, lookup[&e] as u32));
            }
        }
        let mut pred = vec![(0u32, 0u8); count];
        for (i, p) in pred.iter_mut().enumerate().skip(1) {
            let e = mono(i);
            let axis = e.iter().position(|&x| x > 0).unwrap();
            let mut q = e.to_vec();
            q[axis] -= 1;
            *p = (lookup[&q] as u32, axis as u8);
        }
        let mut partials = vec![Vec::new(); m];
        for i in 0..count {
            let e = mono(i);
            for axis in 0..m {
                if e[axis] > 0 {
                    let mut q = e.to_vec();
                    q[axis] -= 1;
                    partials[axis].push((i as u32, lookup[&q] as u32, e[axis] as u32));
                }
            }
        }
        Layout {
            m,
            order,
            exps,
            offsets,
            lookup,
            products,
            pred,
            partials,
        }
    }

    fn get(m: usize, order: usize) -> Arc<Layout> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Layout>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(l) = cache.lock().unwrap().get(&(m, order)) {
            return l.clone();
        }
        let built = Arc::new(Layout::build(m, order));
        cache
            .lock()
            .unwrap()
            .entry((m, order))
            .or_insert(built)
            .clone()
    }

    fn count(&self) -> usize {
        self.offsets[self.order + 1]
    }

    fn exps_of(&self, i: usize) -> &[u8] {
        &self.exps[i * self.m..(i + 1) * self.m]
    }

    fn degree_of(&self, i: usize) -> usize {
        self.offsets.partition_point(|&o| o <= i) - 1
    }
}

/// Multivariate polynomial truncated at a total degree (its trust order).
#[derive(Clone)]
pub struct TruncatedSeries {
    layout: Arc<Layout>,
    coeffs: Vec<Scalar>,
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.m() == other.m() && self.order() == other.order() && self.coeffs == other.coeffs
    }
}

impl Eq for TruncatedSeries {}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series(m={}, order={}: ", self.m(), self.order())?;
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*x^{:?}", c, e)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl TruncatedSeries {
    pub fn zero(m: usize, order: usize) -> Self {
        let layout = Layout::get(m, order);
        let coeffs = vec![Scalar::zero(); layout.count()];
        TruncatedSeries { layout, coeffs }
    }

    pub fn constant(m: usize, order: usize, c: Scalar) -> Self {
        let mut s = Self::zero(m, order);
        s.coeffs[0] = c;
        s
    }

    /// The coordinate function `x^axis` (0-based axis).
    pub fn variable(m: usize, order: usize, axis: usize) -> Self {
        let mut s = Self::zero(m, order);
        if order >= 1 {
            let mut e = vec![0u8; m];
            e[axis] = 1;
            let i = s.layout.lookup[&e];
            s.coeffs[i] = Scalar::one();
        }
        s
    }

    pub fn monomial(m: usize, order: usize, index: &MultiIndex, coeff: Scalar) -> Self {
        let mut s = Self::zero(m, order);
        if index.order() <= order {
            s.set_coeff(index, coeff);
        }
        s
    }

    pub fn m(&self) -> usize {
        self.layout.m
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn constant_term(&self) -> &Scalar {
        &self.coeffs[0]
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Scalar] {
        &mut self.coeffs
    }

    fn index_of(&self, index: &MultiIndex) -> Option<usize> {
        if index.order() > self.order() || index.max_label().is_some_and(|l| l >= self.m()) {
            return None;
        }
        self.layout.lookup.get(&index.exponents(self.m())).copied()
    }

    /// Monomial coefficient; zero beyond the trust order.
    pub fn coeff(&self, index: &MultiIndex) -> Scalar {
        self.index_of(index)
            .map(|i| self.coeffs[i].clone())
            .unwrap_or_else(Scalar::zero)
    }

    /// Panics when `index` is beyond the trust order or the base dimension.
    pub fn set_coeff(&mut self, index: &MultiIndex, value: Scalar) {
        let i = self
            .index_of(index)
            .unwrap_or_else(|| panic!("multi-index {index} outside series range"));
        self.coeffs[i] = value;
    }

    /// Derivative value at the origin: coefficient times multiplicity factorial.
    pub fn jet_coordinate(&self, index: &MultiIndex) -> Scalar {
        self.coeff(index) * Scalar::from_integer(index.multiplicity_factorial())
    }

    pub fn set_jet_coordinate(&mut self, index: &MultiIndex, value: Scalar) {
        let c = value / Scalar::from_integer(index.multiplicity_factorial());
        self.set_coeff(index, c);
    }

    /// Nonzero terms as `(multi-index, coefficient)` in storage order.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, &Scalar)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (MultiIndex::from_exponents(self.layout.exps_of(i)), c))
    }

    /// All multi-indices of the layout up to the trust order, storage order.
    pub fn monomials(&self) -> Vec<MultiIndex> {
        (0..self.len())
            .map(|i| MultiIndex::from_exponents(self.layout.exps_of(i)))
            .collect()
    }

    /// Drops every coefficient above degree `k`.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k > self.order() {
            return Err(JetError::InsufficientOrder {
                what: "series truncation".into(),
                needed: k,
                available: self.order(),
            });
        }
        Ok(self.truncated(k))
    }

    pub(crate) fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.order());
        if k == self.order() {
            return self.clone();
        }
        let layout = Layout::get(self.m(), k);
        let coeffs = self.coeffs[..layout.count()].to_vec();
        TruncatedSeries { layout, coeffs }
    }

    /// Same polynomial at order `k >= self.order()`, higher coefficients zero.
    pub fn padded(&self, k: usize) -> Self {
        if k <= self.order() {
            return self.truncated(k);
        }
        let mut out = Self::zero(self.m(), k);
        out.coeffs[..self.coeffs.len()].clone_from_slice(&self.coeffs);
        out
    }

    /// Homogeneous part of degree `d` (as a series of the same order).
    pub fn homogeneous_part(&self, d: usize) -> Self {
        let mut out = Self::zero(self.m(), self.order());
        if d <= self.order() {
            let (lo, hi) = (self.layout.offsets[d], self.layout.offsets[d + 1]);
            out.coeffs[lo..hi].clone_from_slice(&self.coeffs[lo..hi]);
        }
        out
    }

    /// Same series with every coefficient of degree `>= d` removed.
    pub fn below_degree(&self, d: usize) -> Self {
        let mut out = self.clone();
        if d <= self.order() {
            for c in &mut out.coeffs[self.layout.offsets[d]..] {
                c.set_zero();
            }
        }
        out
    }

    fn check_m(&self, other: &Self) -> Result<()> {
        if self.m() != other.m() {
            return Err(JetError::DimensionMismatch {
                expected: self.m(),
                found: other.m(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_m(other)?;
        Ok(self.add_unchecked(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_m(other)?;
        Ok(self.add_unchecked(other, true))
    }

    fn add_unchecked(&self, other: &Self, negate: bool) -> Self {
        let order = self.order().min(other.order());
        let mut out = self.truncated(order);
        for (d, s) in out.coeffs.iter_mut().zip(&other.coeffs) {
            if !s.is_zero() {
                if negate {
                    *d -= s;
                } else {
                    *d += s;
                }
            }
        }
        out
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_m(other)?;
        let order = self.order().min(other.order());
        let mut out = Self::zero(self.m(), order);
        out.add_product(self, other);
        Ok(out)
    }

    /// `self += a * b` truncated at `self`'s order, which must not exceed theirs.
    pub fn add_product(&mut self, a: &Self, b: &Self) {
        self.accumulate_product(a, b, None);
    }

    /// `self += factor * a * b`.
    pub fn add_scaled_product(&mut self, factor: &Scalar, a: &Self, b: &Self) {
        self.accumulate_product(a, b, Some(factor));
    }

    fn accumulate_product(&mut self, a: &Self, b: &Self, factor: Option<&Scalar>) {
        assert!(
            a.m() == self.m() && b.m() == self.m(),
            "base dimension mismatch in series product"
        );
        assert!(
            a.order() >= self.order() && b.order() >= self.order(),
            "series product target order exceeds operand trust order"
        );
        let layout = self.layout.clone();
        let ca = &a.coeffs;
        let cb = &b.coeffs;
        let n = layout.count();
        let a_nonzero: Vec<bool> = ca[..n].iter().map(|c| !c.is_zero()).collect();
        if !a_nonzero.iter().any(|&x| x) || cb[..n].iter().all(Zero::is_zero) {
            return;
        }
        for &(i, j, k) in &layout.products {
            let (i, j) = (i as usize, j as usize);
            if !a_nonzero[i] || cb[j].is_zero() {
                continue;
            }
            let p = &ca[i] * &cb[j];
            match factor {
                Some(f) => self.coeffs[k as usize] += p * f,
                None => self.coeffs[k as usize] += p,
            }
        }
    }

    /// `self += factor * a` (with `a` truncated to `self`'s order).
    pub fn add_scaled(&mut self, factor: &Scalar, a: &Self) {
        assert!(a.m() == self.m() && a.order() >= self.order());
        if factor.is_zero() {
            return;
        }
        for (d, s) in self.coeffs.iter_mut().zip(&a.coeffs) {
            if !s.is_zero() {
                *d += s * factor;
            }
        }
    }

    pub fn scale(&self, factor: &Scalar) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            if !c.is_zero() {
                *c *= factor;
            }
        }
        out
    }

    /// Formal partial derivative along a 0-based axis; trust order drops by one.
    pub fn partial(&self, axis: usize) -> Result<Self> {
        if self.order() == 0 {
            return Err(JetError::InsufficientOrder {
                what: "partial derivative".into(),
                needed: 1,
                available: 0,
            });
        }
        if axis >= self.m() {
            return Err(JetError::IndexOutOfRange(format!(
                "axis {} in dimension {}",
                axis + 1,
                self.m()
            )));
        }
        let mut out = Self::zero(self.m(), self.order() - 1);
        let limit = out.len();
        for &(src, dst, e) in &self.layout.partials[axis] {
            let (src, dst) = (src as usize, dst as usize);
            if dst < limit && !self.coeffs[src].is_zero() {
                out.coeffs[dst] = &self.coeffs[src] * Scalar::from_integer(e.into());
            }
        }
        Ok(out)
    }

    /// Value of the polynomial at a rational point.
    pub fn evaluate(&self, point: &[Scalar]) -> Scalar {
        let mut total = Scalar::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = c.clone();
            for (axis, &e) in self.layout.exps_of(i).iter().enumerate() {
                for _ in 0..e {
                    term *= &point[axis];
                }
            }
            total += term;
        }
        total
    }

    pub(crate) fn degree_of_slot(&self, i: usize) -> usize {
        self.layout.degree_of(i)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    /// Panics on mismatched base dimension; see [`TruncatedSeries::checked_add`].
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.checked_add(rhs).expect("series add")
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.checked_sub(rhs).expect("series sub")
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.checked_mul(rhs).expect("series mul")
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(&-Scalar::one())
    }
}

pub fn series_add(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.checked_add(b)
}

pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.checked_mul(b)
}

pub fn series_partial(a: &TruncatedSeries, axis: usize) -> Result<TruncatedSeries> {
    a.partial(axis)
}

/// Precomputed powers of an inner map, reusable for composing many outer series.
pub struct ComposePlan {
    m: usize,
    order: usize,
    vars: usize,
    powers: Vec<TruncatedSeries>,
}

impl ComposePlan {
    /// `inner` are the substituted series (one per outer variable); all must
    /// share the base dimension and have zero constant term.
    pub fn new(inner: &[TruncatedSeries]) -> Result<Self> {
        let vars = inner.len();
        let m = inner.first().map_or(0, |s| s.m());
        for (idx, s) in inner.iter().enumerate() {
            if s.m() != m {
                return Err(JetError::DimensionMismatch {
                    expected: m,
                    found: s.m(),
                });
            }
            if !s.constant_term().is_zero() {
                return Err(JetError::NonzeroConstantTerm { index: idx });
            }
        }
        let order = inner.iter().map(|s| s.order()).min().unwrap_or(0);
        let outer_layout = Layout::get(vars, order);
        let inner: Vec<TruncatedSeries> = inner.iter().map(|s| s.truncated(order)).collect();
        let mut powers: Vec<TruncatedSeries> = Vec::with_capacity(outer_layout.count());
        powers.push(TruncatedSeries::constant(m, order, Scalar::one()));
        for idx in 1..outer_layout.count() {
            let (p, axis) = outer_layout.pred[idx];
            let mut next = TruncatedSeries::zero(m, order);
            next.add_product(&powers[p as usize], &inner[axis as usize]);
            powers.push(next);
        }
        Ok(ComposePlan {
            m,
            order,
            vars,
            powers,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `outer ∘ inner`, truncated at the smaller trust order.
    pub fn apply(&self, outer: &TruncatedSeries) -> Result<TruncatedSeries> {
        if outer.m() != self.vars {
            return Err(JetError::DimensionMismatch {
                expected: self.vars,
                found: outer.m(),
            });
        }
        let order = self.order.min(outer.order());
        let mut out = TruncatedSeries::zero(self.m, order);
        let n_outer = Layout::get(self.vars, order).count();
        for (c, power) in outer.coeffs[..n_outer].iter().zip(&self.powers) {
            if !c.is_zero() {
                out.add_scaled(c, power);
            }
        }
        Ok(out)
    }
}

/// Substitutes `inner` (one series per variable of `outer`) into `outer`.
pub fn series_compose(outer: &TruncatedSeries, inner: &[TruncatedSeries]) -> Result<TruncatedSeries> {
    ComposePlan::new(inner)?.apply(outer)
}

/// Linear part of a map: `matrix[λ][μ]` is the coefficient of `x^μ` in component λ.
pub fn linear_part(map: &[TruncatedSeries]) -> Vec<Vec<Scalar>> {
    map.iter()
        .map(|s| {
            (0..s.m())
                .map(|mu| s.coeff(&MultiIndex::new(vec![mu])))
                .collect()
        })
        .collect()
}

/// The identity map of `R^m` as `m` series of the given order.
pub fn identity_map(m: usize, order: usize) -> Vec<TruncatedSeries> {
    (0..m).map(|a| TruncatedSeries::variable(m, order, a)).collect()
}

/// Compositional inverse of a map with zero constant term and invertible linear part.
///
/// With `map = L x + N(x)` the inverse solves `ψ = L⁻¹(x − N(ψ))`; each fixed-point
/// sweep fixes one more degree.
pub fn diffeo_invert(map: &[TruncatedSeries]) -> Result<Vec<TruncatedSeries>> {
    let m = map.len();
    for (i, s) in map.iter().enumerate() {
        if s.m() != m {
            return Err(JetError::DimensionMismatch {
                expected: m,
                found: s.m(),
            });
        }
        if !s.constant_term().is_zero() {
            return Err(JetError::NonzeroConstantTerm { index: i });
        }
    }
    let order = map.iter().map(|s| s.order()).min().unwrap_or(0);
    let lin = linear_part(map);
    let lin_inv = scalar::invert_matrix(&lin)
        .ok_or_else(|| JetError::Singular("linear part of diffeomorphism jet".into()))?;
    let apply_lin_inv = |v: &[TruncatedSeries]| -> Vec<TruncatedSeries> {
        (0..m)
            .map(|a| {
                let mut acc = TruncatedSeries::zero(m, order);
                for (b, vb) in v.iter().enumerate() {
                    acc.add_scaled(&lin_inv[a][b], vb);
                }
                acc
            })
            .collect()
    };
    let nonlinear: Vec<TruncatedSeries> = map
        .iter()
        .map(|s| {
            let mut t = s.truncated(order);
            for mu in 0..m {
                if order >= 1 {
                    t.set_coeff(&MultiIndex::new(vec![mu]), Scalar::zero());
                }
            }
            t
        })
        .collect();
    let x = identity_map(m, order);
    let mut psi = apply_lin_inv(&x);
    for _ in 1..order {
        let plan = ComposePlan::new(&psi)?;
        let rhs: Vec<TruncatedSeries> = nonlinear
            .iter()
            .zip(&x)
            .map(|(n, xa)| Ok(xa - &plan.apply(n)?))
            .collect::<Result<_>>()?;
        psi = apply_lin_inv(&rhs);
    }
    Ok(psi)
}

/// Square matrix of series.
pub type SeriesMatrix = Vec<Vec<TruncatedSeries>>;

pub fn matrix_mul(a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
    let n = a.len();
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    let m = a[0][0].m();
    let order = a
        .iter()
        .chain(b.iter())
        .flat_map(|r| r.iter().map(|s| s.order()))
        .min()
        .unwrap_or(0);
    (0..n)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let mut acc = TruncatedSeries::zero(m, order);
                    for k in 0..inner {
                        acc.add_product(&a[i][k], &b[k][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn matrix_identity(n: usize, m: usize, order: usize) -> SeriesMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        TruncatedSeries::constant(m, order, Scalar::one())
                    } else {
                        TruncatedSeries::zero(m, order)
                    }
                })
                .collect()
        })
        .collect()
}

/// Inverse of a matrix of series whose constant-term matrix is invertible.
///
/// Writes `M = M0 (I − E)` with `E` of positive degree and sums the Neumann
/// series of `E` up to the trust order.
pub fn matrix_series_inverse(matrix: &SeriesMatrix) -> Result<SeriesMatrix> {
    let n = matrix.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = matrix[0][0].m();
    for row in matrix {
        if row.len() != n {
            return Err(JetError::Precondition("matrix of series must be square".into()));
        }
        for s in row {
            if s.m() != m {
                return Err(JetError::DimensionMismatch {
                    expected: m,
                    found: s.m(),
                });
            }
        }
    }
    let order = matrix.iter().flatten().map(|s| s.order()).min().unwrap_or(0);
    let m0: Vec<Vec<Scalar>> = matrix
        .iter()
        .map(|r| r.iter().map(|s| s.constant_term().clone()).collect())
        .collect();
    let m0_inv = scalar::invert_matrix(&m0)
        .ok_or_else(|| JetError::Singular("constant term of series matrix".into()))?;
    let as_series = |a: &[Vec<Scalar>]| -> SeriesMatrix {
        a.iter()
            .map(|r| {
                r.iter()
                    .map(|c| TruncatedSeries::constant(m, order, c.clone()))
                    .collect()
            })
            .collect()
    };
    let m0_inv_s = as_series(&m0_inv);
    // E = I − M0⁻¹ M has zero constant term.
    let prod = matrix_mul(&m0_inv_s, matrix);
    let e: SeriesMatrix = prod
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, s)| {
                    let mut t = -s;
                    if i == j {
                        t.coeffs[0] += Scalar::one();
                    }
                    t
                })
                .collect()
        })
        .collect();
    // (I − E)⁻¹ = Σ E^k
    let mut term = matrix_identity(n, m, order);
    let mut acc = term.clone();
    for _ in 0..order {
        term = matrix_mul(&e, &term);
        for i in 0..n {
            for j in 0..n {
                let t = &term[i][j];
                acc[i][j].add_scaled(&Scalar::one(), t);
            }
        }
    }
    Ok(matrix_mul(&acc, &m0_inv_s))
}

/// Jacobian matrix `[λ][μ] = ∂_μ map[λ]`, one order lower.
pub fn jacobian(map: &[TruncatedSeries]) -> Result<SeriesMatrix> {
    map.iter()
        .map(|s| (0..s.m()).map(|mu| s.partial(mu)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    fn x(m: usize, n: usize, a: usize) -> TruncatedSeries {
        TruncatedSeries::variable(m, n, a)
    }
    fn c(m: usize, n: usize, v: Scalar) -> TruncatedSeries {
        TruncatedSeries::constant(m, n, v)
    }
    fn mono(m: usize, n: usize, labels: &[usize], v: Scalar) -> TruncatedSeries {
        TruncatedSeries::monomial(m, n, &MultiIndex::new(labels.to_vec()), v)
    }

    #[test]
    fn layout_prefix_property() {
        let big = Layout::get(3, 4);
        let small = Layout::get(3, 2);
        assert_eq!(&big.exps[..small.exps.len()], &small.exps[..]);
        assert_eq!(big.count(), 35);
        assert_eq!(small.count(), 10);
    }

    #[test]
    fn add_examples() {
        let a = &c(2, 2, int(1)) + &x(2, 2, 0);
        let b = &c(2, 2, int(2)) + &x(2, 2, 1);
        let expected = &(&c(2, 2, int(3)) + &x(2, 2, 0)) + &x(2, 2, 1);
        assert_eq!(series_add(&a, &b).unwrap(), expected);
        assert_eq!(series_add(&a, &TruncatedSeries::zero(2, 2)).unwrap(), a);
        let h = series_add(&mono(1, 3, &[0, 0], frac(1, 2)), &mono(1, 3, &[0, 0], frac(1, 3))).unwrap();
        assert_eq!(h, mono(1, 3, &[0, 0], frac(5, 6)));
        assert!(series_add(&a, &x(3, 2, 0)).is_err());
    }

    #[test]
    fn add_takes_min_order() {
        let s = series_add(&x(2, 3, 0), &x(2, 1, 1)).unwrap();
        assert_eq!(s.order(), 1);
    }

    #[test]
    fn mul_examples() {
        let one = c(1, 2, int(1));
        let p = series_mul(&(&one + &x(1, 2, 0)), &(&one - &x(1, 2, 0))).unwrap();
        assert_eq!(p, &one - &mono(1, 2, &[0, 0], int(1)));
        let a = &x(2, 3, 0) + &mono(2, 3, &[0, 1], int(4));
        assert_eq!(series_mul(&a, &c(2, 3, int(1))).unwrap(), a);
        let s = &x(2, 2, 0) + &x(2, 2, 1);
        let sq = series_mul(&s, &s).unwrap();
        let expected = &(&mono(2, 2, &[0, 0], int(1)) + &mono(2, 2, &[0, 1], int(2))) + &mono(2, 2, &[1, 1], int(1));
        assert_eq!(sq, expected);
    }

    #[test]
    fn compose_examples() {
        let outer = mono(2, 2, &[0, 0], int(1));
        let inner = vec![&x(2, 2, 0) + &x(2, 2, 1), x(2, 2, 1)];
        let s = &x(2, 2, 0) + &x(2, 2, 1);
        assert_eq!(series_compose(&outer, &inner).unwrap(), &s * &s);
        let general = &(&mono(2, 3, &[0, 1], int(3)) + &x(2, 3, 1)) + &c(2, 3, int(2));
        assert_eq!(series_compose(&general, &identity_map(2, 3)).unwrap(), general);
        let inner1 = vec![&x(1, 3, 0) + &mono(1, 3, &[0, 0], int(1))];
        assert_eq!(series_compose(&x(1, 3, 0), &inner1).unwrap(), inner1[0]);
        let bad = vec![&x(1, 3, 0) + &c(1, 3, int(1))];
        assert_eq!(
            series_compose(&x(1, 3, 0), &bad).unwrap_err(),
            JetError::NonzeroConstantTerm { index: 0 }
        );
    }

    #[test]
    fn invert_examples() {
        assert_eq!(diffeo_invert(&identity_map(3, 3)).unwrap(), identity_map(3, 3));
        let f = vec![&x(1, 2, 0) + &mono(1, 2, &[0, 0], int(1))];
        let g = diffeo_invert(&f).unwrap();
        assert_eq!(g, vec![&x(1, 2, 0) - &mono(1, 2, &[0, 0], int(1))]);
        // back-substitution oracle
        assert_eq!(series_compose(&f[0], &g).unwrap(), x(1, 2, 0));
        let lin = vec![x(1, 2, 0).scale(&int(2))];
        assert_eq!(diffeo_invert(&lin).unwrap(), vec![x(1, 2, 0).scale(&frac(1, 2))]);
        let singular = vec![x(2, 2, 0), x(2, 2, 0)];
        assert!(matches!(diffeo_invert(&singular), Err(JetError::Singular(_))));
    }

    #[test]
    fn partial_examples() {
        assert_eq!(
            mono(2, 3, &[0, 0], int(1)).partial(0).unwrap(),
            mono(2, 2, &[0], int(2))
        );
        assert!(x(2, 3, 0).partial(1).unwrap().is_zero());
        let a = &mono(2, 3, &[0, 1], int(1)) + &x(2, 3, 0).scale(&int(3));
        assert_eq!(a.partial(0).unwrap(), &x(2, 2, 1) + &c(2, 2, int(3)));
        assert!(c(2, 0, int(1)).partial(0).is_err());
    }

    #[test]
    fn matrix_inverse_examples() {
        let id = matrix_identity(2, 2, 3);
        assert_eq!(matrix_series_inverse(&id).unwrap(), id);
        let one_plus_x = vec![vec![&c(1, 2, int(1)) + &x(1, 2, 0)]];
        let inv = matrix_series_inverse(&one_plus_x).unwrap();
        let expected = &(&c(1, 2, int(1)) - &x(1, 2, 0)) + &mono(1, 2, &[0, 0], int(1));
        assert_eq!(inv[0][0], expected);
        assert_eq!(matrix_mul(&one_plus_x, &inv), matrix_identity(1, 1, 2));
        let diag = vec![
            vec![c(2, 1, int(2)), TruncatedSeries::zero(2, 1)],
            vec![TruncatedSeries::zero(2, 1), c(2, 1, int(3))],
        ];
        let inv = matrix_series_inverse(&diag).unwrap();
        assert_eq!(inv[0][0], c(2, 1, frac(1, 2)));
        assert_eq!(inv[1][1], c(2, 1, frac(1, 3)));
        assert!(inv[0][1].is_zero());
        let singular = vec![vec![x(1, 2, 0)]];
        assert!(matches!(matrix_series_inverse(&singular), Err(JetError::Singular(_))));
    }

    #[test]
    fn jet_coordinate_conversion() {
        let s = mono(2, 2, &[0, 0], frac(1, 2));
        assert_eq!(s.jet_coordinate(&MultiIndex::new(vec![0, 0])), int(1));
        let mut t = TruncatedSeries::zero(2, 3);
        t.set_jet_coordinate(&MultiIndex::new(vec![1, 1, 1]), int(12));
        assert_eq!(t.coeff(&MultiIndex::new(vec![1, 1, 1])), int(2));
    }
}
