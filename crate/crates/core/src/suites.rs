//! Named, seeded check batteries shared by the CLI and the acceptance run.
//!
//! Every check is exact: a check passes only when a residual vanishes in
//! rational arithmetic.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::connection::{ClassicalConnectionJet, LinearConnectionJet};
use crate::covariant::{
    covariant_differential, curvature_classical, curvature_linear, formal_curvature_map_classical,
    formal_curvature_map_linear, iterated_covariant_differential, tensor_product_curvature_action,
};
use crate::error::Result;
use crate::group::{act_on_classical, act_on_linear, act_on_tensor, make_kernel_element_from, WGroupElement};
use crate::identities::{
    bianchi_first_classical_residual, bianchi_generalized_linear_residual, bianchi_second_classical_residual,
    ricci_identity_residual,
};
use crate::multi_index::MultiIndex;
use crate::operators::{factorization_check, probe_manifest, run_probe_case, JetSet, OrderNeed, OPERATORS};
use crate::reduction::{
    group_orders, orbit_solve, reconstruct_first_with, reconstruct_second_with_report, reduce_first, reduce_second,
    ricci_equation_residuals, SolveReport,
};
use crate::scalar::{frac, int, zero, Scalar};
use crate::series::{diffeo_invert, identity_map, series_compose, TruncatedSeries};
use crate::solver::{classical_plan, linear_plan};
use crate::tensor::{random_scalar, TensorFieldJet, Valence};

/// Parameters of one suite run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub m: usize,
    pub n: usize,
    /// Largest jet order exercised.
    pub order: usize,
    pub seed: u64,
    pub samples: usize,
}

impl SuiteConfig {
    pub fn new(m: usize, n: usize, order: usize, seed: u64, samples: usize) -> Self {
        SuiteConfig {
            m,
            n,
            order,
            seed,
            samples,
        }
    }

    fn rng(&self, sample: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(1_000_003).wrapping_add(sample as u64))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks > 0
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.checks += other.checks;
        self.failures.extend(other.failures);
    }
}

/// Tally of one sample.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn reports(&mut self, reports: &[SolveReport], ctx: &str) {
        for r in reports {
            self.check(r.full_rank(), || {
                format!("{ctx}: {} order {} rank {} < {} unknowns", r.stage, r.order, r.rank, r.unknowns)
            });
        }
    }
}

pub const SUITES: &[&str] = &[
    "series",
    "group",
    "convention",
    "bianchi",
    "ricci",
    "curvature-formula",
    "identities",
    "equivariance",
    "reduction",
    "second",
    "solver",
    "probes",
];

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let sample: fn(&SuiteConfig, usize) -> Result<Tally> = match name {
        "series" => series_sample,
        "group" => group_sample,
        "convention" => convention_sample,
        "bianchi" => bianchi_sample,
        "ricci" => ricci_sample,
        "curvature-formula" => curvature_formula_sample,
        "identities" => identities_sample,
        "equivariance" => equivariance_sample,
        "reduction" => |c, i| reduction_sample(c, i, false),
        "second" => second_sample,
        "solver" => |c, i| reduction_sample(c, i, true),
        "probes" => return Ok(probes_suite()),
        other => {
            return Err(crate::error::JetError::Precondition(format!(
                "unknown suite {other}; known: {}",
                SUITES.join(", ")
            )))
        }
    };
    let tallies: Vec<(usize, Result<Tally>)> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| (i, sample(cfg, i)))
        .collect();
    let mut report = SuiteReport {
        name: name.to_string(),
        ..Default::default()
    };
    for (i, t) in tallies {
        match t {
            Ok(t) => {
                report.checks += t.checks;
                report.failures.extend(
                    t.failures
                        .into_iter()
                        .map(|f| format!("m={} n={} sample {i}: {f}", cfg.m, cfg.n)),
                );
            }
            Err(e) => {
                report.checks += 1;
                report.failures.push(format!("m={} n={} sample {i}: error: {e}", cfg.m, cfg.n));
            }
        }
    }
    Ok(report)
}

fn random_series<R: Rng>(rng: &mut R, m: usize, order: usize) -> TruncatedSeries {
    TensorFieldJet::random_with(rng, m, 0, Valence::scalar(), order, 6).components()[0].clone()
}

fn series_sample(cfg: &SuiteConfig, i: usize) -> Result<Tally> {
    let mut rng = cfg.rng(i);
    let mut t = Tally::default();
    let (m, order) = (cfg.m, 1 + i % cfg.order.max(1));
    let a = random_series(&mut rng, m, order);
    let b = random_series(&mut rng, m, order);
    let c = random_series(&mut rng, m, order);
    t.check(&(&a * &b) * &c == &a * &(&b * &c), || "associativity".into());
    t.check(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), || "distributivity".into());
    for axis in 0..m {
        let lhs = (&a * &b).partial(axis)?;
        let rhs = &(&a.partial(axis)? * &b.truncate(order - 1)?) + &(&a.truncate(order - 1)? * &b.partial(axis)?);
        t.check(lhs == rhs, || format!("Leibniz along axis {}", axis + 1));
    }
    let phi: Vec<TruncatedSeries> = identity_map(m, order)
        .into_iter()
        .map(|x| {
            let e = random_series(&mut rng, m, order);
            &x + &(&e - &e.below_degree(2))
        })
        .collect();
    let f = a.clone();
    let fphi = series_compose(&f, &phi)?;
    for axis in 0..m {
        let mut rhs = TruncatedSeries::zero(m, order - 1);
        for (b_axis, comp) in phi.iter().enumerate() {
            rhs.add_product(&series_compose(&f.partial(b_axis)?, &phi)?, &comp.partial(axis)?);
        }
        t.check(fphi.partial(axis)? == rhs, || format!("chain rule along axis {}", axis + 1));
    }
    let psi = diffeo_invert(&phi)?;
    let id = identity_map(m, order);
    for l in 0..m {
        t.check(series_compose(&phi[l], &psi)? == id[l], || "phi o phi^-1".into());
        t.check(series_compose(&psi[l], &phi)? == id[l], || "phi^-1 o phi".into());
    }
    Ok(t)
}

fn group_sample(cfg: &SuiteConfig, i: usize) -> Result<Tally> {
    let mut rng = cfg.rng(i);
    let mut t = Tally::default();
    let (m, n) = (cfg.m, cfg.n);
    let top = cfg.order.clamp(1, 4);
    let o = 1 + i % top;
    let g1 = WGroupElement::random_with(&mut rng, m, n, o, o, 3);
    let g2 = WGroupElement::random_with(&mut rng, m, n, o, o, 3);
    let g3 = WGroupElement::random_with(&mut rng, m, n, o, o, 3);
    t.check(g1.mul(&g2)?.mul(&g3)? == g1.mul(&g2.mul(&g3)?)?, || format!("associativity at order {o}"));
    let inv = g1.inv()?;
    t.check(g1.mul(&inv)?.is_identity() && inv.mul(&g1)?.is_identity(), || format!("inverse at order {o}"));
    t.check(inv.inv()? == g1, || "double inverse".into());
    let g12 = g1.mul(&g2)?;
    if o >= 2 {
        let lam = ClassicalConnectionJet::random_with(&mut rng, m, o - 2, 4);
        let lhs = act_on_classical(&g12, &lam)?;
        t.check(lhs == act_on_classical(&g1, &act_on_classical(&g2, &lam)?)?, || {
            format!("classical left action at order {}", o - 2)
        });
    }
    let k = LinearConnectionJet::random_with(&mut rng, m, n, o - 1, 4);
    t.check(act_on_linear(&g12, &k)? == act_on_linear(&g1, &act_on_linear(&g2, &k)?)?, || {
        format!("linear left action at order {}", o - 1)
    });
    let valences = field_valences();
    let v = valences[i % valences.len()].clone();
    let phi = TensorFieldJet::random_with(&mut rng, m, n, v.clone(), o - 1, 4);
    t.check(act_on_tensor(&g12, &phi)? == act_on_tensor(&g1, &act_on_tensor(&g2, &phi)?)?, || {
        format!("tensor left action, valence {v}")
    });
    Ok(t)
}

fn random_multi_index<R: Rng>(rng: &mut R, m: usize, order: usize) -> MultiIndex {
    MultiIndex::new((0..order).map(|_| rng.gen_range(0..m)).collect())
}

fn convention_sample(cfg: &SuiteConfig, i: usize) -> Result<Tally> {
    let mut rng = cfg.rng(i);
    let mut t = Tally::default();
    let (m, n) = (cfg.m, cfg.n);
    let s = i % cfg.order.clamp(1, 4);
    // classical: base coefficients of degree s + 2 shift Λ's order-s coordinates
    let lam = ClassicalConnectionJet::random_with(&mut rng, m, s, 5);
    let coords: Vec<(usize, MultiIndex, Scalar)> = (0..3)
        .map(|_| (rng.gen_range(0..m), random_multi_index(&mut rng, m, s + 2), random_scalar(&mut rng, 6)))
        .collect();
    let h = make_kernel_element_from(m, n, s + 2, s + 1, &coords, &[])?;
    let out = act_on_classical(&h, &lam)?;
    for mu in 0..m {
        for l in 0..m {
            for nu in 0..m {
                for tt in 0..=s {
                    for d in MultiIndex::all_of_order(m, tt) {
                        let shift = if tt == s {
                            h.base().jet_coordinate(l, &d.with(mu).with(nu))
                        } else {
                            zero()
                        };
                        let delta = out.jet_coordinate(mu, l, nu, &d)? - lam.jet_coordinate(mu, l, nu, &d)?;
                        t.check(delta == shift, || format!("classical shift at ({mu},{l},{nu}) d={d}"));
                    }
                }
            }
        }
    }
    // linear: gauge coefficients of degree r + 1 shift K's order-r coordinates
    let r = s;
    let k = LinearConnectionJet::random_with(&mut rng, m, n, r, 5);
    let coords: Vec<(usize, usize, MultiIndex, Scalar)> = (0..3)
        .map(|_| {
            (
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                random_multi_index(&mut rng, m, r + 1),
                random_scalar(&mut rng, 6),
            )
        })
        .collect();
    let h = make_kernel_element_from(m, n, r + 1, r + 1, &[], &coords)?;
    let out = act_on_linear(&h, &k)?;
    for j in 0..n {
        for ii in 0..n {
            for l in 0..m {
                for tt in 0..=r {
                    for d in MultiIndex::all_of_order(m, tt) {
                        let shift = if tt == r {
                            h.gauge().jet_coordinate(ii, j, &d.with(l))
                        } else {
                            zero()
                        };
                        let delta = out.jet_coordinate(j, ii, l, &d)? - k.jet_coordinate(j, ii, l, &d)?;
                        t.check(delta == shift, || format!("linear shift at ({j},{ii},{l}) d={d}"));
                    }
                }
            }
        }
    }
    Ok(t)
}

fn bianchi_sample(cfg: &SuiteConfig, i: usize) -> Result<Tally> {
    let mut rng = cfg.rng(i);
    let mut t = Tally::default();
    let (m, n) = (cfg.m, cfg.n);
    let top = cfg.order.clamp(2, 4);
    let s = 2 + i % (top - 1);
    let lam = ClassicalConnectionJet::random_with(&mut rng, m, s, 5);
    let k = LinearConnectionJet::random_with(&mut rng, m, n, s, 5);
    let w = curvature_classical(&lam)?;
    t.check(bianchi_first_classical_residual(&w)?.is_zero(), || format!("first Bianchi, s={s}"));
    let dw = covariant_differential(&w, None, Some(&lam))?;
    t.check(bianchi_second_classical_residual(&dw)?.is_zero(), || format!("second Bianchi, s={s}"));
    let u = curvature_linear(&k)?;
    let du = covariant_differential(&u, Some(&k), Some(&lam))?;
    t.check(bianchi_generalized_linear_residual(&du)?.is_zero(), || format!("generalized Bianchi, r={s}"));
    Ok(t)
}

/// Valences with at most three slots used across the suites.
pub fn field_valences() -> Vec<Valence> {
    vec![
        Valence::scalar(),
        Valence::standard(1, 0, 0, 0),
        Valence::standard(0, 1, 0, 0),
        Valence::standard(0, 0, 1, 0),
        Valence::standard(0, 0, 0, 1),
        Valence::standard(1, 1, 0, 0),
        Valence::standard(0, 1, 0, 1),
        Valence::standard(1, 0, 1, 0),
        Valence::standard(0, 0, 1, 1),
        Valence::standard(1, 1, 0, 1),
        Valence::standard(0, 0, 0, 3),
        Valence::standard(2, 0, 1, 0),
    ]
}

fn ricci_sample(cfg: &SuiteConfig, i: usize) -> Result<Tally> {
    let mut rng = cfg.rng(i);
    let mut t = Tally::default();
    let (m, n) = (cfg.m, cfg.n);
    let order = 2 + i % cfg.order.clamp(1, 2);
    let lam = ClassicalConnectionJet::random_with(&mut rng, m, order, 5);
    let k = LinearConnectionJet::random_with(&mut rng, m, n, order, 5);
    let valences = field_valences();
    let v = valences[i % valences.len()].clone();
    let phi = TensorFieldJet::random_with(&mut rng, m, n, v.clone(), order + 1, 5);
    t.check(ricci_identity_residual(&phi, Some(&k), Some(&lam))?.is_zero(), || {
        format!("Ricci identity, valence {v}")
    });
    Ok(t)
}

fn curvature_formula_sample(cfg: &SuiteConfig, i: usize) -> Result<Tally> {
    let mut rng = cfg.rng(i);
    let mut t = Tally::default();
    let (m, n) = (cfg.m, cfg.n);
    let r = 3;
    let lam = ClassicalConnectionJet::random_with(&mut rng, m, r, 5);
    let k = LinearConnectionJet::random_with(&mut rng, m, n, r, 5);
    let u = curvature_linear(&k)?;
    let w = curvature_classical(&lam)?;
    let d2 = iterated_covariant_differential(&u, Some(&k), Some(&lam), 2)?;
    let alt = d2.alternate_slots(&[4, 5])?;
    let order = alt.order();
    let uc = |a: usize, b: usize, c: usize, d: usize| u.component(&[a, b, c, d]).truncate(order);
    let wc = |a: usize, b: usize, c: usize, d: usize| w.component(&[a, b, c, d]).truncate(order);
    let half = frac(-1, 2);
    for idx in alt.index_space().tuples() {
        let (j, ii, l, mu, s1, s2) = (idx[0], idx[1], idx[2], idx[3], idx[4], idx[5]);
        let mut expected = TruncatedSeries::zero(m, order);
        for p in 0..n {
            expected = &expected - &(&uc(j, p, s1, s2)? * &uc(p, ii, l, mu)?);
            expected = &expected + &(&uc(p, ii, s1, s2)? * &uc(j, p, l, mu)?);
        }
        for o in 0..m {
            expected = &expected - &(&wc(l, o, s1, s2)? * &uc(j, ii, o, mu)?);
            expected = &expected - &(&wc(mu, o, s1, s2)? * &uc(j, ii, l, o)?);
        }
        t.check(alt.component(&idx) == &expected.scale(&half), || format!("explicit formula at {idx:?}"));
    }
    let action = tensor_product_curvature_action(&u, Some(&u), Some(&w))?;
    t.check(alt == action.scale(&half).project(order)?, || "engine action form".into());
    Ok(t)
}

fn identities_sample(cfg: &SuiteConfig, i: usize) -> Result<Tally> {
    let mut t = bianchi_sample(cfg, i)?;
    for part in [ricci_sample(cfg, i)?, curvature_formula_sample(cfg, i)?] {
        t.checks += part.checks;
        t.failures.extend(part.failures);
    }
    Ok(t)
}

fn equivariance_sample(cfg: &SuiteConfig, i: usize) -> Result<Tally> {
    let mut rng = cfg.rng(i);
    let mut t = Tally::default();
    let (m, n) = (cfg.m, cfg.n);
    let top = cfg.order.clamp(1, 4);
    let d = i % top;
    let lam = ClassicalConnectionJet::random_with(&mut rng, m, d + 1, 4);
    let k = LinearConnectionJet::random_with(&mut rng, m, n, d + 1, 4);
    let g = WGroupElement::random_with(&mut rng, m, n, d + 3, d + 2, 3);
    let (gl, gk) = (act_on_classical(&g, &lam)?, act_on_linear(&g, &k)?);
    let wc = formal_curvature_map_classical(&lam, d)?;
    t.check(
        formal_curvature_map_classical(&gl, d)?.value() == &act_on_tensor(&g, wc.value())?,
        || format!("classical curvature map of order {d}"),
    );
    let ul = formal_curvature_map_linear(Some(&lam), &k, d)?;
    t.check(
        formal_curvature_map_linear(Some(&gl), &gk, d)?.value() == &act_on_tensor(&g, ul.value())?,
        || format!("linear curvature map of order {d}"),
    );
    let valences = field_valences();
    let v = valences[i % valences.len()].clone();
    let phi = TensorFieldJet::random_with(&mut rng, m, n, v.clone(), d, 4);
    let lhs = iterated_covariant_differential(&act_on_tensor(&g, &phi)?, Some(&gk), Some(&gl), d)?;
    let rhs = act_on_tensor(&g, &iterated_covariant_differential(&phi, Some(&k), Some(&lam), d)?)?;
    t.check(lhs == rhs, || format!("{d}-fold covariant differential, valence {v}"));
    Ok(t)
}

/// Admissible `(s, r, k)` triples with `s, r <= 4`.
pub fn first_reduction_orders(max: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for k in 1..=3 {
        for s in 0..=max {
            for r in 0..=max {
                if s + 2 >= k && r + 1 >= k && s + 2 >= r {
                    out.push((s, r, k));
                }
            }
        }
    }
    out
}

fn reduction_sample(cfg: &SuiteConfig, i: usize, trace_only: bool) -> Result<Tally> {
    let mut rng = cfg.rng(i);
    let mut t = Tally::default();
    let (m, n) = (cfg.m, cfg.n);
    let mut orders = first_reduction_orders(cfg.order.min(4));
    orders.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed));
    let (s, r, k) = orders[i % orders.len()];
    let ctx = format!("(s,r,k)=({s},{r},{k})");
    let lam = ClassicalConnectionJet::random_with(&mut rng, m, s, 5);
    let kj = LinearConnectionJet::random_with(&mut rng, m, n, r, 5);
    let d = reduce_first(&lam, &kj, k)?;
    let (l2, k2, reports) = reconstruct_first_with(&d, None, None)?;
    t.reports(&reports, &ctx);
    if trace_only {
        return Ok(t);
    }
    t.check(reduce_first(&l2, &k2, k)? == d, || format!("{ctx}: reduce o reconstruct"));
    let (l3, k3, _) = reconstruct_first_with(&reduce_first(&l2, &k2, k)?, None, None)?;
    t.check(l3 == l2 && k3 == k2, || format!("{ctx}: canonical representative is a fixed point"));

    let (t1, t2) = group_orders(s, r);
    let h = WGroupElement::random_kernel_with(&mut rng, m, n, t1, t2, k, 3)?;
    let (hl, hk) = (act_on_classical(&h, &lam)?, act_on_linear(&h, &kj)?);
    t.check(reduce_first(&hl, &hk, k)? == d, || format!("{ctx}: kernel invariance"));
    match orbit_solve((&hl, &hk), (&lam, &kj), k)? {
        Some(found) => t.check(
            act_on_classical(&found, &lam)? == hl && act_on_linear(&found, &kj)? == hk,
            || format!("{ctx}: orbit element does not map the pair"),
        ),
        None => t.check(false, || format!("{ctx}: orbit solver missed a same-orbit pair")),
    }
    let other = ClassicalConnectionJet::random_with(&mut rng, m, s, 5);
    let other_k = LinearConnectionJet::random_with(&mut rng, m, n, r, 5);
    if reduce_first(&other, &other_k, k)? != d {
        t.check(orbit_solve((&lam, &kj), (&other, &other_k), k)?.is_none(), || {
            format!("{ctx}: orbit solver joined distinct orbits")
        });
    }

    let jets = JetSet::new(lam, kj, None)?;
    for op in OPERATORS.iter().filter(|o| o.natural && !o.uses_field() && o.target_order <= k) {
        if !fits(op.lambda_order, s) || !fits(op.k_order, r) {
            continue;
        }
        let rep = factorization_check(op, &jets, k)?;
        t.check(rep.equal(), || format!("{ctx}: {rep}"));
    }
    Ok(t)
}

fn fits(need: OrderNeed, have: usize) -> bool {
    match need {
        OrderNeed::Fixed(o) => o <= have,
        _ => true,
    }
}

/// Admissible `(s1, s2, r, k)` for the second reduction with `r <= 3`, mixed orders included.
pub fn second_reduction_orders() -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for r in 0..=3usize {
        for k in 1..=(r + 1).min(3) {
            for s1 in r.saturating_sub(1)..=3 {
                for s2 in r.saturating_sub(1)..=3 {
                    if s1 + 2 >= s2 && s1 + 2 >= k && s2 + 2 >= k {
                        out.push((s1, s2, r, k));
                    }
                }
            }
        }
    }
    out
}

fn second_sample(cfg: &SuiteConfig, i: usize) -> Result<Tally> {
    let mut rng = cfg.rng(i);
    let mut t = Tally::default();
    let (m, n) = (cfg.m, cfg.n);
    let mut orders = second_reduction_orders();
    orders.retain(|o| o.0 <= cfg.order && o.1 <= cfg.order);
    orders.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xf1e1d));
    // keep mixed orders in every run
    orders.sort_by_key(|o| o.0 == o.1);
    let (s1, s2, r, k) = if i % 2 == 0 {
        orders[(i / 2) % orders.len()]
    } else {
        orders[orders.len() - 1 - (i / 2) % orders.len()]
    };
    let valences = [
        Valence::standard(1, 0, 0, 0),
        Valence::standard(0, 1, 0, 1),
        Valence::standard(1, 1, 0, 0),
    ];
    let v = valences[i % 3].clone();
    let ctx = format!("(s1,s2,r,k)=({s1},{s2},{r},{k}) valence {v}");
    let lam = ClassicalConnectionJet::random_with(&mut rng, m, s1, 4);
    let kj = LinearConnectionJet::random_with(&mut rng, m, n, s2, 4);
    let phi = TensorFieldJet::random_with(&mut rng, m, n, v.clone(), r, 4);
    let d = reduce_second(&lam, &kj, &phi, k)?;
    let residuals = ricci_equation_residuals(&d)?;
    t.check(residuals.iter().all(|x| x.residual.is_zero()), || format!("{ctx}: Ricci equations"));
    let (l2, k2, p2, reports) = reconstruct_second_with_report(&d)?;
    t.reports(&reports, &ctx);
    t.check(reduce_second(&l2, &k2, &p2, k)? == d, || format!("{ctx}: reduce o reconstruct"));

    let (t1, t2) = group_orders(s1, s2);
    let (t1, t2) = (t1.max(r + 1).max(k), t2.max(r).max(k));
    let h = WGroupElement::random_kernel_with(&mut rng, m, n, t1, t2, k, 3)?;
    let moved = reduce_second(&act_on_classical(&h, &lam)?, &act_on_linear(&h, &kj)?, &act_on_tensor(&h, &phi)?, k)?;
    t.check(moved == d, || format!("{ctx}: kernel invariance"));

    // single-coordinate perturbation of ∇^iΦ(0) along two distinct derivative labels
    let i0 = k.max(2);
    if i0 <= r && m >= 2 {
        let mut bad = d.clone();
        let base = bad.phi_low.valence().rank();
        let target = &mut bad.phi_diffs[i0 - k];
        let mut idx = vec![0; base + i0];
        idx[base] = 1;
        let cur = target.component(&idx).constant_term().clone();
        target.set_jet_coordinate(&idx, &MultiIndex::empty(), cur + int(1))?;
        let res = ricci_equation_residuals(&bad)?;
        t.check(res.iter().any(|x| !x.residual.is_zero()), || format!("{ctx}: perturbation not detected"));
    }

    let jets = JetSet::new(lam, kj, Some(phi))?;
    for op in OPERATORS.iter().filter(|o| o.natural && o.target_order <= k) {
        if !fits(op.lambda_order, s1) || !fits(op.k_order, s2) || !fits(op.phi_order, r) {
            continue;
        }
        let rep = factorization_check(op, &jets, k)?;
        t.check(rep.equal(), || format!("{ctx}: {rep}"));
    }
    Ok(t)
}

/// Pinned negative controls from the manifest.
pub fn probes_suite() -> SuiteReport {
    let mut report = SuiteReport {
        name: "probes".into(),
        ..Default::default()
    };
    let cases = match probe_manifest() {
        Ok(c) => c,
        Err(e) => {
            report.checks = 1;
            report.failures.push(e.to_string());
            return report;
        }
    };
    for case in cases {
        report.checks += 1;
        match run_probe_case(&case) {
            Ok((true, _)) => {}
            Ok((false, rep)) => report
                .failures
                .push(format!("{} k={} seed {}: unexpected outcome: {rep}", case.probe, case.k, case.seed)),
            Err(e) => report.failures.push(format!("{} seed {}: error: {e}", case.probe, case.seed)),
        }
    }
    report
}

/// Solver plans for every `(m, t)` used by the reductions have full column rank.
pub fn plan_rank_report(max_m: usize, max_t: usize) -> SuiteReport {
    let mut report = SuiteReport {
        name: "plans".into(),
        ..Default::default()
    };
    for m in 1..=max_m {
        for t in 0..=max_t {
            let c = classical_plan(m, t);
            report.checks += 1;
            if c.plan.rank() != c.plan.unknowns() {
                report.failures.push(format!("classical plan m={m} t={t}: rank {} of {}", c.plan.rank(), c.plan.unknowns()));
            }
            if t >= 1 {
                let l = linear_plan(m, t);
                report.checks += 1;
                if l.plan.rank() != l.plan.unknowns() {
                    report.failures.push(format!("linear plan m={m} t={t}: rank {} of {}", l.plan.rank(), l.plan.unknowns()));
                }
            }
        }
    }
    report
}
