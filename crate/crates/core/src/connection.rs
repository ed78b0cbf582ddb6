//! Classical and linear connection jets, and their symmetrized top parts.

use std::collections::HashMap;

use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{JetError, Result};
use crate::multi_index::MultiIndex;
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;
use crate::tensor::{TensorFieldJet, Valence};

/// Jet of a classical (torsion-free) connection `Λ_μ^λ_ν`, stored at `[μ, λ, ν]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalConnectionJet {
    field: TensorFieldJet,
}

impl ClassicalConnectionJet {
    /// Checks the valence and the `μν` symmetry.
    pub fn new(field: TensorFieldJet) -> Result<Self> {
        if field.valence() != &Valence::classical_connection() {
            return Err(JetError::ValenceMismatch(format!(
                "classical connection needs {}, found {}",
                Valence::classical_connection(),
                field.valence()
            )));
        }
        field.audit()?;
        Ok(ClassicalConnectionJet { field })
    }

    pub(crate) fn new_unchecked(field: TensorFieldJet) -> Self {
        ClassicalConnectionJet { field }
    }

    pub fn zero(m: usize, order: usize) -> Self {
        ClassicalConnectionJet {
            field: TensorFieldJet::zero(m, 0, Valence::classical_connection(), order),
        }
    }

    pub fn random(m: usize, order: usize, seed: u64, bound: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(&mut rng, m, order, bound)
    }

    pub fn random_with<R: Rng>(rng: &mut R, m: usize, order: usize, bound: u64) -> Self {
        ClassicalConnectionJet {
            field: TensorFieldJet::random_with(rng, m, 0, Valence::classical_connection(), order, bound),
        }
    }

    pub fn m(&self) -> usize {
        self.field.m()
    }

    pub fn order(&self) -> usize {
        self.field.order()
    }

    pub fn field(&self) -> &TensorFieldJet {
        &self.field
    }

    pub fn into_field(self) -> TensorFieldJet {
        self.field
    }

    /// `Λ_μ^λ_ν` as a series.
    pub fn symbol(&self, mu: usize, lambda: usize, nu: usize) -> &TruncatedSeries {
        self.field.component(&[mu, lambda, nu])
    }

    pub fn jet_coordinate(&self, mu: usize, lambda: usize, nu: usize, deriv: &MultiIndex) -> Result<Scalar> {
        self.field.jet_coordinate(&[mu, lambda, nu], deriv)
    }

    /// Sets a jet coordinate together with its symmetric partner.
    pub fn set_jet_coordinate(&mut self, mu: usize, lambda: usize, nu: usize, deriv: &MultiIndex, value: Scalar) -> Result<()> {
        self.field.set_jet_coordinate(&[mu, lambda, nu], deriv, value.clone())?;
        self.field.set_jet_coordinate(&[nu, lambda, mu], deriv, value)
    }

    pub fn project(&self, k: usize) -> Result<Self> {
        Ok(ClassicalConnectionJet {
            field: self.field.project(k)?,
        })
    }

    pub fn padded(&self, k: usize) -> Self {
        ClassicalConnectionJet {
            field: self.field.padded(k),
        }
    }
}

/// Jet of a linear connection `K_j^i_λ`, stored at `[j, i, λ]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConnectionJet {
    field: TensorFieldJet,
}

impl LinearConnectionJet {
    pub fn new(field: TensorFieldJet) -> Result<Self> {
        if field.valence() != &Valence::linear_connection() {
            return Err(JetError::ValenceMismatch(format!(
                "linear connection needs {}, found {}",
                Valence::linear_connection(),
                field.valence()
            )));
        }
        Ok(LinearConnectionJet { field })
    }

    pub(crate) fn new_unchecked(field: TensorFieldJet) -> Self {
        LinearConnectionJet { field }
    }

    pub fn zero(m: usize, n: usize, order: usize) -> Self {
        LinearConnectionJet {
            field: TensorFieldJet::zero(m, n, Valence::linear_connection(), order),
        }
    }

    pub fn random(m: usize, n: usize, order: usize, seed: u64, bound: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(&mut rng, m, n, order, bound)
    }

    pub fn random_with<R: Rng>(rng: &mut R, m: usize, n: usize, order: usize, bound: u64) -> Self {
        LinearConnectionJet {
            field: TensorFieldJet::random_with(rng, m, n, Valence::linear_connection(), order, bound),
        }
    }

    pub fn m(&self) -> usize {
        self.field.m()
    }

    pub fn n(&self) -> usize {
        self.field.n()
    }

    pub fn order(&self) -> usize {
        self.field.order()
    }

    pub fn field(&self) -> &TensorFieldJet {
        &self.field
    }

    pub fn into_field(self) -> TensorFieldJet {
        self.field
    }

    /// `K_j^i_λ` as a series.
    pub fn symbol(&self, j: usize, i: usize, lambda: usize) -> &TruncatedSeries {
        self.field.component(&[j, i, lambda])
    }

    pub fn jet_coordinate(&self, j: usize, i: usize, lambda: usize, deriv: &MultiIndex) -> Result<Scalar> {
        self.field.jet_coordinate(&[j, i, lambda], deriv)
    }

    pub fn set_jet_coordinate(&mut self, j: usize, i: usize, lambda: usize, deriv: &MultiIndex, value: Scalar) -> Result<()> {
        self.field.set_jet_coordinate(&[j, i, lambda], deriv, value)
    }

    pub fn project(&self, k: usize) -> Result<Self> {
        Ok(LinearConnectionJet {
            field: self.field.project(k)?,
        })
    }

    pub fn padded(&self, k: usize) -> Self {
        LinearConnectionJet {
            field: self.field.padded(k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConnectionKind {
    Classical,
    Linear,
}

/// Totally symmetrized jet coordinates of a connection, one table per degree.
///
/// Classical entries are keyed by `[λ]` and a symmetric multi-index of size
/// `t + 2` (for connection order `t`); linear entries by `[j, i]` and a
/// multi-index of size `t + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricJetPart {
    kind: ConnectionKind,
    m: usize,
    n: usize,
    degrees: Vec<HashMap<(Vec<usize>, MultiIndex), Scalar>>,
}

impl SymmetricJetPart {
    pub fn kind(&self) -> ConnectionKind {
        self.kind
    }

    /// Number of connection orders covered.
    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    fn shift(&self) -> usize {
        match self.kind {
            ConnectionKind::Classical => 2,
            ConnectionKind::Linear => 1,
        }
    }

    /// Value for connection order `t`, upper component `comp`, symmetric indices `s`.
    pub fn get(&self, t: usize, comp: &[usize], s: &MultiIndex) -> Scalar {
        self.degrees
            .get(t)
            .and_then(|d| d.get(&(comp.to_vec(), s.clone())))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.iter().all(|d| d.values().all(Zero::is_zero))
    }

    fn comps(&self) -> Vec<Vec<usize>> {
        match self.kind {
            ConnectionKind::Classical => (0..self.m).map(|l| vec![l]).collect(),
            ConnectionKind::Linear => (0..self.n)
                .flat_map(|j| (0..self.n).map(move |i| vec![j, i]))
                .collect(),
        }
    }

    /// All entries of order `t` in a deterministic order.
    pub fn entries(&self, t: usize) -> Vec<(Vec<usize>, MultiIndex, Scalar)> {
        let mut out = Vec::new();
        for comp in self.comps() {
            for s in MultiIndex::all_of_order(self.m, t + self.shift()) {
                let v = self.get(t, &comp, &s);
                out.push((comp.clone(), s, v));
            }
        }
        out
    }
}

/// Symmetrization of the jet coordinate table `X[a][b; D]` over all of `(a, b, D)`.
pub(crate) fn classical_sym_value(lambda_jet: &ClassicalConnectionJet, lambda: usize, s: &MultiIndex) -> Scalar {
    let labels = s.labels();
    let t = labels.len() - 2;
    let denom = Scalar::from_integer(((t + 2) * (t + 1)).into());
    let mut acc = Scalar::zero();
    let exps = s.exponents(lambda_jet.m());
    for a in 0..lambda_jet.m() {
        if exps[a] == 0 {
            continue;
        }
        for b in 0..lambda_jet.m() {
            let avail = exps[b] as i64 - if a == b { 1 } else { 0 };
            if avail <= 0 {
                continue;
            }
            let mut rest = exps.clone();
            rest[a] -= 1;
            rest[b] -= 1;
            let d = MultiIndex::from_exponents(&rest);
            let w = Scalar::from_integer((exps[a] as i64 * avail).into());
            acc += w * lambda_jet.symbol(a, lambda, b).jet_coordinate(&d);
        }
    }
    acc / denom
}

pub(crate) fn linear_sym_value(k_jet: &LinearConnectionJet, j: usize, i: usize, s: &MultiIndex) -> Scalar {
    let t = s.order() - 1;
    let exps = s.exponents(k_jet.m());
    let mut acc = Scalar::zero();
    for a in 0..k_jet.m() {
        if exps[a] == 0 {
            continue;
        }
        let mut rest = exps.clone();
        rest[a] -= 1;
        let d = MultiIndex::from_exponents(&rest);
        acc += Scalar::from_integer((exps[a] as i64).into()) * k_jet.symbol(j, i, a).jet_coordinate(&d);
    }
    acc / Scalar::from_integer(((t + 1) as i64).into())
}

/// Symmetrized top jet coordinates of `Λ` for every order `0..=s`.
pub fn symmetrize_classical(lambda: &ClassicalConnectionJet) -> SymmetricJetPart {
    let m = lambda.m();
    let degrees = (0..=lambda.order())
        .map(|t| {
            let mut table = HashMap::new();
            for l in 0..m {
                for s in MultiIndex::all_of_order(m, t + 2) {
                    let v = classical_sym_value(lambda, l, &s);
                    table.insert((vec![l], s), v);
                }
            }
            table
        })
        .collect();
    SymmetricJetPart {
        kind: ConnectionKind::Classical,
        m,
        n: 0,
        degrees,
    }
}

/// Symmetrized top jet coordinates of `K` for every order `0..=r`.
pub fn symmetrize_linear(k: &LinearConnectionJet) -> SymmetricJetPart {
    let (m, n) = (k.m(), k.n());
    let degrees = (0..=k.order())
        .map(|t| {
            let mut table = HashMap::new();
            for j in 0..n {
                for i in 0..n {
                    for s in MultiIndex::all_of_order(m, t + 1) {
                        let v = linear_sym_value(k, j, i, &s);
                        table.insert((vec![j, i], s), v);
                    }
                }
            }
            table
        })
        .collect();
    SymmetricJetPart {
        kind: ConnectionKind::Linear,
        m,
        n,
        degrees,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn classical_symmetry_enforced() {
        let l = ClassicalConnectionJet::random(3, 2, 9, 5);
        l.field().audit().unwrap();
        let mut bad = l.field().clone();
        bad.set_jet_coordinate(&[0, 0, 1], &MultiIndex::empty(), int(99)).unwrap();
        assert!(ClassicalConnectionJet::new(bad).is_err());
    }

    #[test]
    fn order_zero_symmetrization_copies() {
        let l = ClassicalConnectionJet::random(2, 0, 3, 5);
        let s = symmetrize_classical(&l);
        for mu in 0..2 {
            for lam in 0..2 {
                for nu in 0..2 {
                    let v = s.get(0, &[lam], &MultiIndex::new(vec![mu, nu]));
                    assert_eq!(v, l.jet_coordinate(mu, lam, nu, &MultiIndex::empty()).unwrap());
                }
            }
        }
    }

    #[test]
    fn brute_force_symmetrization() {
        // only Λ_1^1_2,1 = 6 (and its symmetric partner Λ_2^1_1,1)
        let mut l = ClassicalConnectionJet::zero(2, 1);
        l.set_jet_coordinate(0, 0, 1, &MultiIndex::new(vec![0]), int(6)).unwrap();
        let s = symmetrize_classical(&l);
        // average over the 6 orderings of (1,1,2) placed as (μ, ν; ρ)
        let orderings = [[0, 0, 1], [0, 1, 0], [1, 0, 0], [0, 0, 1], [0, 1, 0], [1, 0, 0]];
        let mut acc = Scalar::zero();
        for o in orderings {
            acc += l.jet_coordinate(o[0], 0, o[1], &MultiIndex::new(vec![o[2]])).unwrap();
        }
        let expected = acc / int(6);
        assert_eq!(s.get(1, &[0], &MultiIndex::new(vec![0, 0, 1])), expected);
        assert_eq!(expected, int(4));
    }

    #[test]
    fn linear_symmetrization_brute_force() {
        let k = LinearConnectionJet::random(2, 2, 2, 4, 5);
        let s = symmetrize_linear(&k);
        let target = MultiIndex::new(vec![0, 1, 1]);
        let labels = target.labels().to_vec();
        let mut acc = Scalar::zero();
        for (p, _) in crate::tensor::permutations(3) {
            let t: Vec<usize> = p.iter().map(|&q| labels[q]).collect();
            acc += k.jet_coordinate(1, 0, t[0], &MultiIndex::new(t[1..].to_vec())).unwrap();
        }
        assert_eq!(s.get(2, &[1, 0], &target), acc / int(6));
    }
}
