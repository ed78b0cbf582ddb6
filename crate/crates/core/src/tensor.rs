//! Tensor-field jets with declared valence and slot symmetries.

use std::fmt;

use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{JetError, Result};
use crate::multi_index::MultiIndex;
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

/// Kind of a tensor slot. Fiber slots range over `1..=n`, base slots over `1..=m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SlotKind {
    FiberUp,
    FiberDown,
    BaseUp,
    BaseDown,
}

impl SlotKind {
    pub fn is_fiber(self) -> bool {
        matches!(self, SlotKind::FiberUp | SlotKind::FiberDown)
    }

    pub fn range(self, m: usize, n: usize) -> usize {
        if self.is_fiber() {
            n
        } else {
            m
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            SlotKind::FiberUp => "fu",
            SlotKind::FiberDown => "fd",
            SlotKind::BaseUp => "bu",
            SlotKind::BaseDown => "bd",
        }
    }

    pub fn from_code(code: &str) -> Option<SlotKind> {
        Some(match code {
            "fu" => SlotKind::FiberUp,
            "fd" => SlotKind::FiberDown,
            "bu" => SlotKind::BaseUp,
            "bd" => SlotKind::BaseDown,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymmetryKind {
    Symmetric,
    Antisymmetric,
}

/// A declared (anti)symmetry over a set of slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SlotGroup {
    pub kind: SymmetryKind,
    pub slots: Vec<usize>,
}

/// Ordered slot list plus declared symmetry groups.
///
/// The last `appended` slots are covariant base slots produced by covariant
/// differentiation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Valence {
    slots: Vec<SlotKind>,
    appended: usize,
    groups: Vec<SlotGroup>,
}

impl Valence {
    pub fn new(slots: Vec<SlotKind>, appended: usize, groups: Vec<SlotGroup>) -> Result<Self> {
        if appended > slots.len() || slots[slots.len() - appended..].iter().any(|&k| k != SlotKind::BaseDown) {
            return Err(JetError::ValenceMismatch(
                "appended slots must be trailing covariant base slots".into(),
            ));
        }
        let mut seen = vec![false; slots.len()];
        for g in &groups {
            if g.slots.len() < 2 {
                return Err(JetError::ValenceMismatch("symmetry group needs two slots".into()));
            }
            for &s in &g.slots {
                if s >= slots.len() {
                    return Err(JetError::IndexOutOfRange(format!("slot {s} in symmetry group")));
                }
                if seen[s] {
                    return Err(JetError::ValenceMismatch(format!(
                        "slot {s} appears in more than one symmetry group"
                    )));
                }
                seen[s] = true;
            }
            let fiber = slots[g.slots[0]].is_fiber();
            if g.slots.iter().any(|&s| slots[s].is_fiber() != fiber) {
                return Err(JetError::MixedSlotRange(format!("{:?}", g.slots)));
            }
        }
        Ok(Valence {
            slots,
            appended,
            groups,
        })
    }

    /// `p1` fiber-up, `q1` fiber-down, `p2` base-up, `q2` base-down slots, in that order.
    pub fn standard(p1: usize, q1: usize, p2: usize, q2: usize) -> Self {
        let mut slots = vec![SlotKind::FiberUp; p1];
        slots.extend(std::iter::repeat(SlotKind::FiberDown).take(q1));
        slots.extend(std::iter::repeat(SlotKind::BaseUp).take(p2));
        slots.extend(std::iter::repeat(SlotKind::BaseDown).take(q2));
        Valence {
            slots,
            appended: 0,
            groups: Vec::new(),
        }
    }

    pub fn scalar() -> Self {
        Self::standard(0, 0, 0, 0)
    }

    /// `Λ_μ^λ_ν`, symmetric in the covariant slots.
    pub fn classical_connection() -> Self {
        Valence {
            slots: vec![SlotKind::BaseDown, SlotKind::BaseUp, SlotKind::BaseDown],
            appended: 0,
            groups: vec![SlotGroup {
                kind: SymmetryKind::Symmetric,
                slots: vec![0, 2],
            }],
        }
    }

    /// `K_j^i_λ`.
    pub fn linear_connection() -> Self {
        Valence {
            slots: vec![SlotKind::FiberDown, SlotKind::FiberUp, SlotKind::BaseDown],
            appended: 0,
            groups: Vec::new(),
        }
    }

    /// `w_ν^ρ_λμσ1..σi`, antisymmetric in λμ.
    pub fn classical_curvature(i: usize) -> Self {
        Valence {
            slots: vec![
                SlotKind::BaseDown,
                SlotKind::BaseUp,
                SlotKind::BaseDown,
                SlotKind::BaseDown,
            ],
            appended: 0,
            groups: vec![SlotGroup {
                kind: SymmetryKind::Antisymmetric,
                slots: vec![2, 3],
            }],
        }
        .with_appended(i)
    }

    /// `u_j^i_λμσ1..σi`, antisymmetric in λμ.
    pub fn linear_curvature(i: usize) -> Self {
        Valence {
            slots: vec![
                SlotKind::FiberDown,
                SlotKind::FiberUp,
                SlotKind::BaseDown,
                SlotKind::BaseDown,
            ],
            appended: 0,
            groups: vec![SlotGroup {
                kind: SymmetryKind::Antisymmetric,
                slots: vec![2, 3],
            }],
        }
        .with_appended(i)
    }

    pub fn with_appended(&self, d: usize) -> Self {
        let mut v = self.clone();
        v.slots.extend(std::iter::repeat(SlotKind::BaseDown).take(d));
        v.appended += d;
        v
    }

    /// Same valence with the appended slots removed.
    pub fn without_appended(&self) -> Self {
        let mut v = self.clone();
        v.slots.truncate(self.slots.len() - self.appended);
        v.appended = 0;
        v
    }

    pub fn slots(&self) -> &[SlotKind] {
        &self.slots
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn appended(&self) -> usize {
        self.appended
    }

    pub fn groups(&self) -> &[SlotGroup] {
        &self.groups
    }

    fn count(&self, kind: SlotKind) -> usize {
        self.slots[..self.slots.len() - self.appended]
            .iter()
            .filter(|&&k| k == kind)
            .count()
    }

    pub fn p1(&self) -> usize {
        self.count(SlotKind::FiberUp)
    }

    pub fn q1(&self) -> usize {
        self.count(SlotKind::FiberDown)
    }

    pub fn p2(&self) -> usize {
        self.count(SlotKind::BaseUp)
    }

    pub fn q2(&self) -> usize {
        self.count(SlotKind::BaseDown)
    }

    pub fn ranges(&self, m: usize, n: usize) -> Vec<usize> {
        self.slots.iter().map(|k| k.range(m, n)).collect()
    }
}

impl fmt::Display for Valence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes: Vec<&str> = self.slots.iter().map(|k| k.code()).collect();
        write!(f, "[{}] d={}", codes.join(","), self.appended)?;
        for g in &self.groups {
            let tag = match g.kind {
                SymmetryKind::Symmetric => "sym",
                SymmetryKind::Antisymmetric => "alt",
            };
            let s: Vec<String> = g.slots.iter().map(|s| (s + 1).to_string()).collect();
            write!(f, " {tag}({})", s.join(","))?;
        }
        Ok(())
    }
}

/// All permutations of `0..k` with their signs.
pub(crate) fn permutations(k: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out.into_iter()
        .map(|p| {
            let mut inversions = 0;
            for a in 0..k {
                for b in a + 1..k {
                    if p[a] > p[b] {
                        inversions += 1;
                    }
                }
            }
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            (p, sign)
        })
        .collect()
}

/// Row-major enumeration helper for component index tuples.
#[derive(Debug, Clone)]
pub struct IndexSpace {
    ranges: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl IndexSpace {
    pub fn new(ranges: Vec<usize>) -> Self {
        let mut strides = vec![1; ranges.len()];
        for a in (0..ranges.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * ranges[a + 1];
        }
        let size = ranges.iter().product();
        IndexSpace {
            ranges,
            strides,
            size,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn ranges(&self) -> &[usize] {
        &self.ranges
    }

    pub fn stride(&self, slot: usize) -> usize {
        self.strides[slot]
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn checked_flat(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.ranges.len() || idx.iter().zip(&self.ranges).any(|(i, r)| i >= r) {
            return Err(JetError::IndexOutOfRange(format!(
                "component {:?} for ranges {:?}",
                idx.iter().map(|i| i + 1).collect::<Vec<_>>(),
                self.ranges
            )));
        }
        Ok(self.flat(idx))
    }

    pub fn tuple(&self, mut flat: usize) -> Vec<usize> {
        let mut t = vec![0; self.ranges.len()];
        for a in (0..self.ranges.len()).rev() {
            t[a] = flat % self.ranges[a];
            flat /= self.ranges[a];
        }
        t
    }

    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.size).map(|f| self.tuple(f))
    }
}

/// Jet of a tensor field: one truncated series per component.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorFieldJet {
    m: usize,
    n: usize,
    valence: Valence,
    order: usize,
    comps: Vec<TruncatedSeries>,
}

impl fmt::Debug for TensorFieldJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TensorFieldJet(m={}, n={}, {}, order={}",
            self.m, self.n, self.valence, self.order
        )?;
        let space = self.index_space();
        for (i, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                write!(f, "; {:?}: {:?}", space.tuple(i), c)?;
            }
        }
        write!(f, ")")
    }
}

impl TensorFieldJet {
    pub fn zero(m: usize, n: usize, valence: Valence, order: usize) -> Self {
        let size = IndexSpace::new(valence.ranges(m, n)).size();
        TensorFieldJet {
            m,
            n,
            valence,
            order,
            comps: vec![TruncatedSeries::zero(m, order); size],
        }
    }

    /// Builds a jet from components in row-major order; no symmetry check.
    pub fn from_components(
        m: usize,
        n: usize,
        valence: Valence,
        comps: Vec<TruncatedSeries>,
    ) -> Result<Self> {
        let size = IndexSpace::new(valence.ranges(m, n)).size();
        if comps.len() != size {
            return Err(JetError::ValenceMismatch(format!(
                "expected {size} components, found {}",
                comps.len()
            )));
        }
        let order = comps.iter().map(|c| c.order()).min().unwrap_or(0);
        for c in &comps {
            if c.m() != m {
                return Err(JetError::DimensionMismatch {
                    expected: m,
                    found: c.m(),
                });
            }
        }
        let comps = comps.into_iter().map(|c| c.truncated(order)).collect();
        Ok(TensorFieldJet {
            m,
            n,
            valence,
            order,
            comps,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn valence(&self) -> &Valence {
        &self.valence
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn index_space(&self) -> IndexSpace {
        IndexSpace::new(self.valence.ranges(self.m, self.n))
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [TruncatedSeries] {
        &mut self.comps
    }

    pub fn into_components(self) -> Vec<TruncatedSeries> {
        self.comps
    }

    /// Component by 0-based index tuple; panics when out of range.
    pub fn component(&self, idx: &[usize]) -> &TruncatedSeries {
        &self.comps[self.index_space().checked_flat(idx).expect("component index")]
    }

    pub fn component_mut(&mut self, idx: &[usize]) -> &mut TruncatedSeries {
        let f = self.index_space().checked_flat(idx).expect("component index");
        &mut self.comps[f]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// Replaces the valence (same slot list) by one with different declared groups.
    pub fn with_valence(mut self, valence: Valence) -> Result<Self> {
        if valence.slots() != self.valence.slots() {
            return Err(JetError::ValenceMismatch(format!(
                "cannot relabel {} as {}",
                self.valence, valence
            )));
        }
        self.valence = valence;
        Ok(self)
    }

    pub fn project(&self, k: usize) -> Result<Self> {
        if k > self.order {
            return Err(JetError::InsufficientOrder {
                what: "jet projection".into(),
                needed: k,
                available: self.order,
            });
        }
        Ok(self.projected(k))
    }

    /// Re-reads the jet at order `k`, zero above the current order.
    pub fn padded(&self, k: usize) -> Self {
        TensorFieldJet {
            m: self.m,
            n: self.n,
            valence: self.valence.clone(),
            order: k,
            comps: self.comps.iter().map(|c| c.padded(k)).collect(),
        }
    }

    pub(crate) fn projected(&self, k: usize) -> Self {
        let k = k.min(self.order);
        TensorFieldJet {
            m: self.m,
            n: self.n,
            valence: self.valence.clone(),
            order: k,
            comps: self.comps.iter().map(|c| c.truncated(k)).collect(),
        }
    }

    /// Derivative value at the origin of component `idx` along `deriv`.
    pub fn jet_coordinate(&self, idx: &[usize], deriv: &MultiIndex) -> Result<Scalar> {
        let f = self.index_space().checked_flat(idx)?;
        self.check_deriv(deriv)?;
        Ok(self.comps[f].jet_coordinate(deriv))
    }

    pub fn set_jet_coordinate(&mut self, idx: &[usize], deriv: &MultiIndex, value: Scalar) -> Result<()> {
        let f = self.index_space().checked_flat(idx)?;
        self.check_deriv(deriv)?;
        self.comps[f].set_jet_coordinate(deriv, value);
        Ok(())
    }

    fn check_deriv(&self, deriv: &MultiIndex) -> Result<()> {
        if deriv.order() > self.order {
            return Err(JetError::InsufficientOrder {
                what: "jet coordinate".into(),
                needed: deriv.order(),
                available: self.order,
            });
        }
        if let Some(l) = deriv.max_label() {
            if l >= self.m {
                return Err(JetError::IndexOutOfRange(format!("derivative label {}", l + 1)));
            }
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.m != other.m {
            return Err(JetError::DimensionMismatch {
                expected: self.m,
                found: other.m,
            });
        }
        if self.n != other.n {
            return Err(JetError::FiberMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.valence.slots() != other.valence.slots() {
            return Err(JetError::ValenceMismatch(format!(
                "{} vs {}",
                self.valence, other.valence
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let comps: Vec<_> = self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect();
        Self::from_components(self.m, self.n, self.valence.clone(), comps)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let comps: Vec<_> = self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect();
        Self::from_components(self.m, self.n, self.valence.clone(), comps)
    }

    pub fn scale(&self, factor: &Scalar) -> Self {
        let mut out = self.clone();
        for c in &mut out.comps {
            *c = c.scale(factor);
        }
        out
    }

    fn slot_average(&self, slots: &[usize], antisymmetric: bool) -> Result<Self> {
        let ranges = self.valence.ranges(self.m, self.n);
        for &s in slots {
            if s >= ranges.len() {
                return Err(JetError::IndexOutOfRange(format!("slot {}", s + 1)));
            }
        }
        if let Some(&first) = slots.first() {
            let fiber = self.valence.slots()[first].is_fiber();
            if slots.iter().any(|&s| self.valence.slots()[s].is_fiber() != fiber) {
                return Err(JetError::MixedSlotRange(format!(
                    "{:?}",
                    slots.iter().map(|s| s + 1).collect::<Vec<_>>()
                )));
            }
        }
        if slots.len() < 2 {
            return Ok(self.clone());
        }
        let perms = permutations(slots.len());
        let weight = Scalar::new(1.into(), crate::scalar::factorial(slots.len()));
        let space = self.index_space();
        let mut comps = Vec::with_capacity(space.size());
        for t in space.tuples() {
            let mut acc = TruncatedSeries::zero(self.m, self.order);
            let mut src = t.clone();
            for (p, sign) in &perms {
                for (q, &s) in slots.iter().enumerate() {
                    src[s] = t[slots[p[q]]];
                }
                let c = &self.comps[space.flat(&src)];
                let f = if antisymmetric && *sign < 0 { -weight.clone() } else { weight.clone() };
                acc.add_scaled(&f, c);
            }
            comps.push(acc);
        }
        Ok(TensorFieldJet {
            m: self.m,
            n: self.n,
            valence: self.valence.clone(),
            order: self.order,
            comps,
        })
    }

    /// Averaged symmetrization over the named slots.
    pub fn symmetrize_slots(&self, slots: &[usize]) -> Result<Self> {
        self.slot_average(slots, false)
    }

    /// Averaged antisymmetrization over the named slots.
    pub fn alternate_slots(&self, slots: &[usize]) -> Result<Self> {
        self.slot_average(slots, true)
    }

    /// Applies every declared symmetry group.
    pub fn impose_symmetries(&self) -> Self {
        let mut out = self.clone();
        for g in self.valence.groups().to_vec() {
            out = match g.kind {
                SymmetryKind::Symmetric => out.symmetrize_slots(&g.slots),
                SymmetryKind::Antisymmetric => out.alternate_slots(&g.slots),
            }
            .expect("declared groups are valid");
        }
        out
    }

    /// Checks every declared symmetry exactly, on every Taylor coefficient.
    pub fn audit(&self) -> Result<()> {
        let space = self.index_space();
        for g in self.valence.groups() {
            for t in space.tuples() {
                for a in 0..g.slots.len() {
                    for b in a + 1..g.slots.len() {
                        let mut swapped = t.clone();
                        swapped.swap(g.slots[a], g.slots[b]);
                        let x = &self.comps[space.flat(&t)];
                        let y = &self.comps[space.flat(&swapped)];
                        let ok = match g.kind {
                            SymmetryKind::Symmetric => x == y,
                            SymmetryKind::Antisymmetric => (x + y).is_zero(),
                        };
                        if !ok {
                            return Err(JetError::SymmetryViolation(format!(
                                "component {:?} under slots ({},{})",
                                t.iter().map(|i| i + 1).collect::<Vec<_>>(),
                                g.slots[a] + 1,
                                g.slots[b] + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Pseudo-random jet; monomial coefficients are `p/q` with `|p|, q <= bound`.
    pub fn random(m: usize, n: usize, valence: Valence, order: usize, seed: u64, bound: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(&mut rng, m, n, valence, order, bound)
    }

    pub fn random_with<R: Rng>(rng: &mut R, m: usize, n: usize, valence: Valence, order: usize, bound: u64) -> Self {
        let mut out = Self::zero(m, n, valence, order);
        for c in &mut out.comps {
            for x in c.coeffs_mut() {
                *x = random_scalar(rng, bound);
            }
        }
        out.impose_symmetries()
    }
}

/// Random rational `p/q` with `|p| <= bound`, `1 <= q <= bound`; zero when `bound == 0`.
pub fn random_scalar<R: Rng>(rng: &mut R, bound: u64) -> Scalar {
    if bound == 0 {
        return Scalar::zero();
    }
    let b = bound as i64;
    let p = rng.gen_range(-b..=b);
    let q = rng.gen_range(1..=b);
    Scalar::new(p.into(), q.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    #[test]
    fn alternate_by_hand() {
        let mut t = TensorFieldJet::zero(2, 1, Valence::standard(0, 0, 0, 2), 0);
        t.set_jet_coordinate(&[0, 1], &MultiIndex::empty(), int(1)).unwrap();
        let a = t.alternate_slots(&[0, 1]).unwrap();
        assert_eq!(a.jet_coordinate(&[0, 1], &MultiIndex::empty()).unwrap(), frac(1, 2));
        assert_eq!(a.jet_coordinate(&[1, 0], &MultiIndex::empty()).unwrap(), frac(-1, 2));
        let s = t.symmetrize_slots(&[0, 1]).unwrap();
        assert!(s.alternate_slots(&[0, 1]).unwrap().is_zero());
        assert_eq!(s.symmetrize_slots(&[0, 1]).unwrap(), s);
    }

    #[test]
    fn mixed_range_rejected() {
        let t = TensorFieldJet::zero(2, 2, Valence::standard(1, 0, 0, 1), 0);
        assert!(matches!(t.symmetrize_slots(&[0, 1]), Err(JetError::MixedSlotRange(_))));
    }

    #[test]
    fn random_is_deterministic_and_symmetric() {
        let v = Valence::classical_connection();
        let a = TensorFieldJet::random(2, 1, v.clone(), 2, 5, 4);
        let b = TensorFieldJet::random(2, 1, v.clone(), 2, 5, 4);
        assert_eq!(a, b);
        a.audit().unwrap();
        assert!(TensorFieldJet::random(2, 1, v, 2, 5, 0).is_zero());
    }

    #[test]
    fn jet_coordinate_factorial() {
        let mut t = TensorFieldJet::zero(2, 1, Valence::scalar(), 2);
        t.components_mut()[0] = TruncatedSeries::monomial(2, 2, &MultiIndex::new(vec![0, 0]), frac(1, 2));
        assert_eq!(t.jet_coordinate(&[], &MultiIndex::new(vec![0, 0])).unwrap(), int(1));
        assert!(t.jet_coordinate(&[], &MultiIndex::new(vec![0, 0, 0])).is_err());
    }

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().map(|(_, s)| s).sum::<i32>(), 0);
    }
}
