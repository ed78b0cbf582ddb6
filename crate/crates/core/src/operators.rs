//! Sample differential operators, and checks of factorization and equivariance.
//!
//! Natural samples are assembled from equivariant primitives. Probes read raw
//! jet coordinates and serve as negative controls.

use std::fmt;

use num_traits::Zero;

use crate::connection::{ClassicalConnectionJet, LinearConnectionJet};
use crate::covariant::{
    covariant_differential, curvature_classical, curvature_linear, formal_curvature_map_classical,
    formal_curvature_map_linear, tensor_product_curvature_action,
};
use crate::error::{JetError, Result};
use crate::group::{act_on_classical, act_on_linear, act_on_tensor, WGroupElement};
use crate::multi_index::MultiIndex;
use crate::reduction::{reconstruct_first, reconstruct_second, reduce_first, reduce_second};
use crate::scalar::{format_scalar, Scalar};
use crate::series::TruncatedSeries;
use crate::tensor::{SlotKind, TensorFieldJet, Valence};

/// Connection jets with an optional tensor field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetSet {
    pub lambda: ClassicalConnectionJet,
    pub k: LinearConnectionJet,
    pub phi: Option<TensorFieldJet>,
}

impl JetSet {
    pub fn new(lambda: ClassicalConnectionJet, k: LinearConnectionJet, phi: Option<TensorFieldJet>) -> Result<Self> {
        if lambda.m() != k.m() {
            return Err(JetError::DimensionMismatch {
                expected: lambda.m(),
                found: k.m(),
            });
        }
        if let Some(p) = &phi {
            if p.m() != k.m() {
                return Err(JetError::DimensionMismatch {
                    expected: k.m(),
                    found: p.m(),
                });
            }
            if p.n() != k.n() {
                return Err(JetError::FiberMismatch {
                    expected: k.n(),
                    found: p.n(),
                });
            }
        }
        Ok(JetSet { lambda, k, phi })
    }

    pub fn m(&self) -> usize {
        self.lambda.m()
    }

    pub fn n(&self) -> usize {
        self.k.n()
    }

    pub fn act(&self, g: &WGroupElement) -> Result<JetSet> {
        Ok(JetSet {
            lambda: act_on_classical(g, &self.lambda)?,
            k: act_on_linear(g, &self.k)?,
            phi: self.phi.as_ref().map(|p| act_on_tensor(g, p)).transpose()?,
        })
    }

    /// Canonical representative with the same reduced data at level `k`.
    pub fn reduce_reconstruct(&self, k: usize) -> Result<JetSet> {
        match &self.phi {
            None => {
                let (l, kj) = reconstruct_first(&reduce_first(&self.lambda, &self.k, k)?)?;
                Ok(JetSet {
                    lambda: l,
                    k: kj,
                    phi: None,
                })
            }
            Some(p) => {
                let (l, kj, ph) = reconstruct_second(&reduce_second(&self.lambda, &self.k, p, k)?)?;
                Ok(JetSet {
                    lambda: l,
                    k: kj,
                    phi: Some(ph),
                })
            }
        }
    }
}

/// How an operator's value transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Tensor,
    Classical,
    Linear,
    /// Raw coordinate, compared as is.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Recipe {
    RK,
    RL,
    NablaRK,
    NablaRL,
    TrR2,
    RicciL,
    NablaRLxRK,
    K0,
    Lambda0,
    PhiValue,
    NablaPhi,
    CurvatureOnPhi,
    Jet1Phi,
    RawK11,
    RawKTop,
    RawLambdaTop,
    RawPhiTop,
}

/// Jet order a recipe reads; `Top` means the full order of the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderNeed {
    None,
    Fixed(usize),
    Top,
}

impl fmt::Display for OrderNeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderNeed::None => write!(f, "-"),
            OrderNeed::Fixed(k) => write!(f, "{k}"),
            OrderNeed::Top => write!(f, "top"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleOperator {
    pub name: &'static str,
    pub natural: bool,
    /// Smallest reduction level at which a natural operator factors.
    pub target_order: usize,
    pub lambda_order: OrderNeed,
    pub k_order: OrderNeed,
    pub phi_order: OrderNeed,
    pub output: OutputKind,
    recipe: Recipe,
}

const fn op(
    name: &'static str,
    recipe: Recipe,
    natural: bool,
    target_order: usize,
    orders: (OrderNeed, OrderNeed, OrderNeed),
    output: OutputKind,
) -> SampleOperator {
    SampleOperator {
        name,
        natural,
        target_order,
        lambda_order: orders.0,
        k_order: orders.1,
        phi_order: orders.2,
        output,
        recipe,
    }
}

use OrderNeed::{Fixed, None as No, Top};

pub const OPERATORS: &[SampleOperator] = &[
    op("RK", Recipe::RK, true, 1, (No, Fixed(1), No), OutputKind::Tensor),
    op("RL", Recipe::RL, true, 1, (Fixed(1), No, No), OutputKind::Tensor),
    op("nablaRK", Recipe::NablaRK, true, 1, (Fixed(0), Fixed(2), No), OutputKind::Tensor),
    op("nablaRL", Recipe::NablaRL, true, 1, (Fixed(2), No, No), OutputKind::Tensor),
    op("trR2", Recipe::TrR2, true, 1, (No, Fixed(1), No), OutputKind::Tensor),
    op("ricciL", Recipe::RicciL, true, 1, (Fixed(1), No, No), OutputKind::Tensor),
    op("nablaRLxRK", Recipe::NablaRLxRK, true, 1, (Fixed(2), Fixed(1), No), OutputKind::Tensor),
    op("K0", Recipe::K0, true, 1, (No, Fixed(0), No), OutputKind::Linear),
    op("Lambda0", Recipe::Lambda0, true, 2, (Fixed(0), No, No), OutputKind::Classical),
    op("PhiVal", Recipe::PhiValue, true, 1, (No, No, Fixed(0)), OutputKind::Tensor),
    op("nablaPhi", Recipe::NablaPhi, true, 1, (Fixed(0), Fixed(0), Fixed(1)), OutputKind::Tensor),
    op("RPhi", Recipe::CurvatureOnPhi, true, 1, (Fixed(1), Fixed(1), Fixed(0)), OutputKind::Tensor),
    op("jet1Phi", Recipe::Jet1Phi, true, 2, (No, No, Fixed(1)), OutputKind::Tensor),
    op("rawK11", Recipe::RawK11, false, 0, (No, Fixed(2), No), OutputKind::Raw),
    op("rawKtop", Recipe::RawKTop, false, 0, (No, Top, No), OutputKind::Raw),
    op("rawLtop", Recipe::RawLambdaTop, false, 0, (Top, No, No), OutputKind::Raw),
    op("rawPhiTop", Recipe::RawPhiTop, false, 0, (No, No, Top), OutputKind::Raw),
];

pub fn operator(name: &str) -> Result<SampleOperator> {
    OPERATORS
        .iter()
        .find(|o| o.name == name)
        .copied()
        .ok_or_else(|| JetError::Precondition(format!("unknown operator {name}")))
}

impl SampleOperator {
    pub fn uses_field(&self) -> bool {
        self.phi_order != OrderNeed::None
    }
}

fn need(order: usize, what: &str, available: usize) -> Result<()> {
    if available < order {
        return Err(JetError::InsufficientOrder {
            what: what.into(),
            needed: order,
            available,
        });
    }
    Ok(())
}

fn lam_at(jets: &JetSet, o: usize) -> Result<ClassicalConnectionJet> {
    need(o, "classical jet", jets.lambda.order())?;
    jets.lambda.project(o)
}

fn k_at(jets: &JetSet, o: usize) -> Result<LinearConnectionJet> {
    need(o, "linear jet", jets.k.order())?;
    jets.k.project(o)
}

fn phi_at(jets: &JetSet, o: usize) -> Result<TensorFieldJet> {
    let p = jets
        .phi
        .as_ref()
        .ok_or_else(|| JetError::Precondition("operator needs a tensor field".into()))?;
    need(o, "field jet", p.order())?;
    p.project(o)
}

fn raw(m: usize, n: usize, v: Scalar) -> Result<TensorFieldJet> {
    TensorFieldJet::from_components(m, n, Valence::scalar(), vec![TruncatedSeries::constant(m, 0, v)])
}

/// `T[ν,λ,μ,σ,j,i,τ] = Σ_ρ w1[ν,ρ,λ,μ,σ] u0[j,i,ρ,τ]`.
pub fn contract_nabla_rl_with_rk(w1: &TensorFieldJet, u0: &TensorFieldJet) -> Result<TensorFieldJet> {
    let (m, n) = (w1.m(), u0.n());
    use SlotKind::*;
    let valence = Valence::new(vec![BaseDown, BaseDown, BaseDown, BaseDown, FiberDown, FiberUp, BaseDown], 0, vec![])?;
    let order = w1.order().min(u0.order());
    let space = crate::tensor::IndexSpace::new(valence.ranges(m, n));
    let mut comps = Vec::with_capacity(space.size());
    for idx in space.tuples() {
        let (nu, l, mu, s, j, i, t) = (idx[0], idx[1], idx[2], idx[3], idx[4], idx[5], idx[6]);
        let mut acc = TruncatedSeries::zero(m, order);
        for rho in 0..m {
            acc.add_product(w1.component(&[nu, rho, l, mu, s]), u0.component(&[j, i, rho, t]));
        }
        comps.push(acc);
    }
    TensorFieldJet::from_components(m, n, valence, comps)
}

/// Evaluates `op` at the origin; inputs are projected to the declared orders first.
pub fn evaluate(op: &SampleOperator, jets: &JetSet) -> Result<TensorFieldJet> {
    let v = evaluate_raw(op, jets)?;
    if op.output == OutputKind::Tensor && v.n() != jets.n() {
        let valence = v.valence().clone();
        return TensorFieldJet::from_components(v.m(), jets.n(), valence, v.into_components());
    }
    Ok(v)
}

fn evaluate_raw(op: &SampleOperator, jets: &JetSet) -> Result<TensorFieldJet> {
    let (m, n) = (jets.m(), jets.n());
    let bd = |k: usize| Valence::new(vec![SlotKind::BaseDown; k], 0, vec![]);
    match op.recipe {
        Recipe::RK => Ok(formal_curvature_map_linear(None, &k_at(jets, 1)?, 0)?.value().clone()),
        Recipe::RL => Ok(formal_curvature_map_classical(&lam_at(jets, 1)?, 0)?.value().clone()),
        Recipe::NablaRK => Ok(formal_curvature_map_linear(Some(&lam_at(jets, 0)?), &k_at(jets, 2)?, 1)?
            .value()
            .clone()),
        Recipe::NablaRL => Ok(formal_curvature_map_classical(&lam_at(jets, 2)?, 1)?.value().clone()),
        Recipe::TrR2 => {
            let u = formal_curvature_map_linear(None, &k_at(jets, 1)?, 0)?;
            let valence = bd(4)?;
            let space = crate::tensor::IndexSpace::new(valence.ranges(m, n));
            let mut comps = Vec::new();
            for idx in space.tuples() {
                let mut acc = Scalar::zero();
                for i in 0..n {
                    for j in 0..n {
                        acc += u.get(&[j, i, idx[0], idx[1]]) * u.get(&[i, j, idx[2], idx[3]]);
                    }
                }
                comps.push(TruncatedSeries::constant(m, 0, acc));
            }
            TensorFieldJet::from_components(m, n, valence, comps)
        }
        Recipe::RicciL => {
            let w = formal_curvature_map_classical(&lam_at(jets, 1)?, 0)?;
            let valence = bd(2)?;
            let space = crate::tensor::IndexSpace::new(valence.ranges(m, n));
            let mut comps = Vec::new();
            for idx in space.tuples() {
                let mut acc = Scalar::zero();
                for rho in 0..m {
                    acc += w.get(&[idx[0], rho, rho, idx[1]]);
                }
                comps.push(TruncatedSeries::constant(m, 0, acc));
            }
            TensorFieldJet::from_components(m, n, valence, comps)
        }
        Recipe::NablaRLxRK => {
            let w1 = formal_curvature_map_classical(&lam_at(jets, 2)?, 1)?;
            let u0 = formal_curvature_map_linear(None, &k_at(jets, 1)?, 0)?;
            contract_nabla_rl_with_rk(w1.value(), u0.value())
        }
        Recipe::K0 => Ok(k_at(jets, 0)?.into_field()),
        Recipe::Lambda0 => Ok(lam_at(jets, 0)?.into_field()),
        Recipe::PhiValue => phi_at(jets, 0),
        Recipe::NablaPhi => Ok(covariant_differential(&phi_at(jets, 1)?, Some(&k_at(jets, 0)?), Some(&lam_at(jets, 0)?))?),
        Recipe::CurvatureOnPhi => {
            let u = curvature_linear(&k_at(jets, 1)?)?;
            let w = curvature_classical(&lam_at(jets, 1)?)?;
            tensor_product_curvature_action(&phi_at(jets, 0)?, Some(&u), Some(&w))?.project(0)
        }
        Recipe::Jet1Phi => phi_at(jets, 1),
        Recipe::RawK11 => raw(m, n, k_at(jets, 2)?.jet_coordinate(0, 0, 0, &MultiIndex::new(vec![0, 0]))?),
        Recipe::RawKTop => {
            let r = jets.k.order();
            raw(m, n, jets.k.jet_coordinate(0, 0, 0, &MultiIndex::new(vec![0; r]))?)
        }
        Recipe::RawLambdaTop => {
            let s = jets.lambda.order();
            raw(m, n, jets.lambda.jet_coordinate(0, 0, 0, &MultiIndex::new(vec![0; s]))?)
        }
        Recipe::RawPhiTop => {
            let p = phi_at(jets, 0)?;
            let full = jets.phi.as_ref().expect("checked");
            let idx = vec![0; p.valence().rank()];
            raw(m, n, full.jet_coordinate(&idx, &MultiIndex::new(vec![0; full.order()]))?)
        }
    }
}

/// Outcome of comparing two operator values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub op: String,
    pub natural: bool,
    /// Number of jet coordinates where the two sides differ.
    pub nonzero: usize,
    /// First differing coordinate, as `[idx|deriv] difference`.
    pub first: Option<String>,
}

impl CheckReport {
    pub fn equal(&self) -> bool {
        self.nonzero == 0
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.natural { "natural" } else { "probe" };
        if self.equal() {
            write!(f, "{} ({kind}): residual = 0", self.op)
        } else {
            write!(
                f,
                "{} ({kind}): residual != 0 at {} coordinates, first {}",
                self.op,
                self.nonzero,
                self.first.as_deref().unwrap_or("?")
            )
        }
    }
}

fn compare(op: &SampleOperator, a: &TensorFieldJet, b: &TensorFieldJet) -> Result<CheckReport> {
    let diff = a.checked_sub(&b.clone().with_valence(a.valence().clone())?)?;
    let mut nonzero = 0;
    let mut first = None;
    for (idx, c) in diff.index_space().tuples().zip(diff.components()) {
        for (d, v) in c.terms() {
            if v.is_zero() {
                continue;
            }
            nonzero += 1;
            if first.is_none() {
                let jet = v * Scalar::from_integer(d.multiplicity_factorial());
                let labels: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
                let derivs: Vec<String> = d.labels().iter().map(|i| (i + 1).to_string()).collect();
                first = Some(format!("[{}|{}] {}", labels.join(","), derivs.join(","), format_scalar(&jet)));
            }
        }
    }
    Ok(CheckReport {
        op: op.name.to_string(),
        natural: op.natural,
        nonzero,
        first,
    })
}

/// Compares `op(jets)` with `op(reconstruct(reduce(jets, k)))`.
pub fn factorization_check(op: &SampleOperator, jets: &JetSet, k: usize) -> Result<CheckReport> {
    if op.uses_field() && jets.phi.is_none() {
        return Err(JetError::Precondition(format!("{} needs a tensor field", op.name)));
    }
    let canon = jets.reduce_reconstruct(k)?;
    compare(op, &evaluate(op, jets)?, &evaluate(op, &canon)?)
}

/// Compares `op(g · jets)` with `g · op(jets)`.
pub fn equivariance_check(op: &SampleOperator, jets: &JetSet, g: &WGroupElement) -> Result<CheckReport> {
    let value = evaluate(op, jets)?;
    let moved = evaluate(op, &jets.act(g)?)?;
    let expected = match op.output {
        OutputKind::Tensor => act_on_tensor(g, &value)?,
        OutputKind::Classical => act_on_classical(g, &ClassicalConnectionJet::new(value)?)?.into_field(),
        OutputKind::Linear => act_on_linear(g, &LinearConnectionJet::new(value)?)?.into_field(),
        OutputKind::Raw => value,
    };
    compare(op, &moved, &expected)
}

/// One pinned negative-control case: `probe` at level `k` on the jets drawn from `seed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeCase {
    pub probe: String,
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub r: usize,
    pub field_order: Option<usize>,
    pub k: usize,
    pub seed: u64,
    pub expect_differs: bool,
}

/// Pinned seeds and expected outcomes for the probes.
pub const PROBE_MANIFEST: &str = include_str!("../data/probes.manifest");

pub fn probe_manifest() -> Result<Vec<ProbeCase>> {
    let mut out = Vec::new();
    for (ln, line) in PROBE_MANIFEST.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let bad = || JetError::Precondition(format!("probe manifest line {}: {line}", ln + 1));
        if f.len() != 9 {
            return Err(bad());
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
        out.push(ProbeCase {
            probe: f[0].to_string(),
            m: num(f[1])?,
            n: num(f[2])?,
            s: num(f[3])?,
            r: num(f[4])?,
            field_order: if f[5] == "-" { None } else { Some(num(f[5])?) },
            k: num(f[6])?,
            seed: f[7].parse().map_err(|_| bad())?,
            expect_differs: match f[8] {
                "differs" => true,
                "equal" => false,
                _ => return Err(bad()),
            },
        });
    }
    Ok(out)
}

/// Standard random jets for a seed: `Λ` from `seed`, `K` from `seed + 1`, `Φ` from `seed + 2`.
pub fn seeded_jets(
    m: usize,
    n: usize,
    s: usize,
    r: usize,
    field: Option<(Valence, usize)>,
    seed: u64,
    bound: u64,
) -> JetSet {
    JetSet {
        lambda: ClassicalConnectionJet::random(m, s, seed, bound),
        k: LinearConnectionJet::random(m, n, r, seed.wrapping_add(1), bound),
        phi: field.map(|(v, o)| TensorFieldJet::random(m, n, v, o, seed.wrapping_add(2), bound)),
    }
}

/// Runs one manifest entry; returns whether the observed outcome matches.
pub fn run_probe_case(case: &ProbeCase) -> Result<(bool, CheckReport)> {
    let op = operator(&case.probe)?;
    let field = case.field_order.map(|o| (Valence::standard(1, 0, 0, 0), o));
    let jets = seeded_jets(case.m, case.n, case.s, case.r, field, case.seed, 5);
    let report = factorization_check(&op, &jets, case.k)?;
    Ok((report.equal() != case.expect_differs, report))
}
