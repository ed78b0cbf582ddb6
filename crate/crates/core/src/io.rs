//! Versioned text format for jets, group elements and reduced data.
//!
//! ```text
//! jetcalc 1
//! begin classical m=2 order=1
//! L[1,1,2|] 3/4
//! L[2,1,1|] 3/4
//! L[1,2,1|2] -1/2
//! end
//! ```
//!
//! Entries are nonzero jet coordinates `label[component|derivative] n/d` with
//! 1-based indices; derivative labels are sorted. Blocks nest.

use std::fmt::Write as _;

use num_traits::Zero;

use crate::connection::{ClassicalConnectionJet, ConnectionKind, LinearConnectionJet};
use crate::covariant::CurvatureDifferentialData;
use crate::error::{JetError, Result};
use crate::group::{DiffeoJet, GaugeJet, WGroupElement};
use crate::multi_index::MultiIndex;
use crate::operators::JetSet;
use crate::reduction::{ReducedDataFirst, ReducedDataSecond};
use crate::scalar::{format_scalar, parse_scalar, Scalar};
use crate::series::TruncatedSeries;
use crate::tensor::{SlotGroup, SlotKind, SymmetryKind, TensorFieldJet, Valence};

pub const FORMAT_VERSION: u32 = 1;
const HEADER: &str = "jetcalc";

/// Anything that can be stored in a jet file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Tensor(TensorFieldJet),
    Classical(ClassicalConnectionJet),
    Linear(LinearConnectionJet),
    Curvature(CurvatureDifferentialData),
    Group(WGroupElement),
    Jets(JetSet),
    ReducedFirst(ReducedDataFirst),
    ReducedSecond(ReducedDataSecond),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Tensor(_) => "tensor",
            Document::Classical(_) => "classical",
            Document::Linear(_) => "linear",
            Document::Curvature(_) => "curvature",
            Document::Group(_) => "group",
            Document::Jets(_) => "jets",
            Document::ReducedFirst(_) => "reduced-first",
            Document::ReducedSecond(_) => "reduced-second",
        }
    }
}

pub fn encode(doc: &Document) -> String {
    let mut out = format!("{HEADER} {FORMAT_VERSION}\n");
    match doc {
        Document::Tensor(t) => write_tensor(&mut out, t, "tensor", "T", &[]),
        Document::Classical(l) => write_classical(&mut out, l),
        Document::Linear(k) => write_linear(&mut out, k),
        Document::Curvature(c) => write_curvature(&mut out, c),
        Document::Group(g) => write_group(&mut out, g),
        Document::Jets(j) => write_jets(&mut out, j),
        Document::ReducedFirst(d) => write_reduced_first(&mut out, d),
        Document::ReducedSecond(d) => write_reduced_second(&mut out, d),
    }
    out
}

fn join(v: &[usize]) -> String {
    v.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn write_series_entries(out: &mut String, label: &str, idx: &[usize], s: &TruncatedSeries) {
    for (d, c) in s.terms() {
        if c.is_zero() {
            continue;
        }
        let jet = c * Scalar::from_integer(d.multiplicity_factorial());
        let _ = writeln!(out, "{label}[{}|{}] {}", join(idx), join(d.labels()), format_scalar(&jet));
    }
}

fn slots_code(v: &Valence) -> String {
    if v.slots().is_empty() {
        return "-".into();
    }
    v.slots().iter().map(|s| s.code()).collect::<Vec<_>>().join(",")
}

fn groups_code(v: &Valence) -> String {
    if v.groups().is_empty() {
        return "-".into();
    }
    v.groups()
        .iter()
        .map(|g| {
            let kind = match g.kind {
                SymmetryKind::Symmetric => "sym",
                SymmetryKind::Antisymmetric => "alt",
            };
            format!("{kind}:{}", join(&g.slots))
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn write_tensor(out: &mut String, t: &TensorFieldJet, kind: &str, label: &str, extra: &[(&str, String)]) {
    let v = t.valence();
    let _ = write!(out, "begin {kind}");
    for (k, val) in extra {
        let _ = write!(out, " {k}={val}");
    }
    let _ = writeln!(
        out,
        " m={} n={} order={} slots={} appended={} groups={}",
        t.m(),
        t.n(),
        t.order(),
        slots_code(v),
        v.appended(),
        groups_code(v)
    );
    for (idx, c) in t.index_space().tuples().zip(t.components()) {
        write_series_entries(out, label, &idx, c);
    }
    out.push_str("end\n");
}

fn write_field_entries(out: &mut String, t: &TensorFieldJet, label: &str) {
    for (idx, c) in t.index_space().tuples().zip(t.components()) {
        write_series_entries(out, label, &idx, c);
    }
}

fn write_classical(out: &mut String, l: &ClassicalConnectionJet) {
    let _ = writeln!(out, "begin classical m={} order={}", l.m(), l.order());
    write_field_entries(out, l.field(), "L");
    out.push_str("end\n");
}

fn write_linear(out: &mut String, k: &LinearConnectionJet) {
    let _ = writeln!(out, "begin linear m={} n={} order={}", k.m(), k.n(), k.order());
    write_field_entries(out, k.field(), "K");
    out.push_str("end\n");
}

fn curvature_label(kind: ConnectionKind) -> (&'static str, &'static str) {
    match kind {
        ConnectionKind::Classical => ("classical", "w"),
        ConnectionKind::Linear => ("linear", "u"),
    }
}

fn write_curvature(out: &mut String, c: &CurvatureDifferentialData) {
    let (kind, label) = curvature_label(c.kind());
    let v = c.value();
    let _ = writeln!(out, "begin curvature kind={kind} i={} m={} n={}", c.order(), v.m(), v.n());
    write_field_entries(out, v, label);
    out.push_str("end\n");
}

fn write_group(out: &mut String, g: &WGroupElement) {
    let (t1, t2) = g.orders();
    let _ = writeln!(out, "begin group m={} n={} base-order={t1} gauge-order={t2}", g.m(), g.n());
    for (l, s) in g.base().components().iter().enumerate() {
        write_series_entries(out, "x", &[l], s);
    }
    for (i, row) in g.gauge().matrix().iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            write_series_entries(out, "A", &[i, j], s);
        }
    }
    out.push_str("end\n");
}

fn write_jets(out: &mut String, j: &JetSet) {
    let _ = writeln!(out, "begin jets m={} n={}", j.m(), j.n());
    write_classical(out, &j.lambda);
    write_linear(out, &j.k);
    if let Some(p) = &j.phi {
        write_tensor(out, p, "tensor", "T", &[]);
    }
    out.push_str("end\n");
}

fn write_reduced_first(out: &mut String, d: &ReducedDataFirst) {
    let _ = writeln!(out, "begin reduced-first m={} n={} s={} r={} k={}", d.m, d.n, d.s, d.r, d.k);
    if let Some(l) = &d.lambda_low {
        write_classical(out, l);
    }
    write_linear(out, &d.k_low);
    for c in d.w.iter().chain(&d.u) {
        write_curvature(out, c);
    }
    out.push_str("end\n");
}

fn write_reduced_second(out: &mut String, d: &ReducedDataSecond) {
    let _ = writeln!(out, "begin reduced-second field-order={}", d.r);
    write_reduced_first(out, &d.connections);
    write_tensor(out, &d.phi_low, "tensor", "T", &[]);
    for (p, v) in d.phi_diffs.iter().enumerate() {
        write_tensor(out, v, "differential", "V", &[("i", (d.k() + p).to_string())]);
    }
    out.push_str("end\n");
}

#[derive(Debug)]
struct Entry {
    line: usize,
    label: String,
    idx: Vec<usize>,
    deriv: MultiIndex,
    value: Scalar,
}

#[derive(Debug)]
struct Block {
    kind: String,
    line: usize,
    attrs: Vec<(String, String)>,
    entries: Vec<Entry>,
    children: Vec<Block>,
}

struct Ctx {
    path: String,
    line: usize,
}

impl Ctx {
    fn err(&self, message: impl Into<String>) -> JetError {
        JetError::Format {
            line: self.line,
            path: self.path.clone(),
            message: message.into(),
        }
    }

    fn at(&self, line: usize) -> Ctx {
        Ctx {
            path: self.path.clone(),
            line,
        }
    }

    fn child(&self, b: &Block, pos: usize) -> Ctx {
        Ctx {
            path: format!("{}/{}#{}", self.path, b.kind, pos + 1),
            line: b.line,
        }
    }

    fn wrap(&self, e: JetError) -> JetError {
        match e {
            JetError::Format { .. } => e,
            other => self.err(other.to_string()),
        }
    }
}

fn parse_list(text: &str, ctx: &Ctx) -> Result<Vec<usize>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|p| match p.trim().parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => Err(ctx.err(format!("bad index '{p}' (indices are 1-based)"))),
        })
        .collect()
}

fn parse_entry(line: &str, ctx: &Ctx) -> Result<Entry> {
    let open = line.find('[').ok_or_else(|| ctx.err("entry needs label[component|derivative] value"))?;
    let close = line.find(']').ok_or_else(|| ctx.err("unterminated index bracket"))?;
    if close < open {
        return Err(ctx.err("malformed index bracket"));
    }
    let label = line[..open].trim().to_string();
    let inside = &line[open + 1..close];
    let (comp, deriv) = inside.split_once('|').ok_or_else(|| ctx.err("index needs '|' between component and derivative"))?;
    let value_text = line[close + 1..].trim();
    let value = parse_scalar(value_text).ok_or_else(|| ctx.err(format!("bad rational '{value_text}'")))?;
    let deriv_labels = parse_list(deriv, ctx)?;
    if deriv_labels.windows(2).any(|w| w[0] > w[1]) {
        return Err(ctx.err("derivative labels must be sorted"));
    }
    Ok(Entry {
        line: ctx.line,
        label,
        idx: parse_list(comp, ctx)?,
        deriv: MultiIndex::new(deriv_labels),
        value,
    })
}

fn parse_blocks(text: &str) -> Result<Block> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let top = Ctx {
        path: String::new(),
        line: 1,
    };
    let (hl, header) = lines.next().ok_or_else(|| top.err("empty file"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(HEADER) {
        return Err(top.at(hl).err(format!("missing '{HEADER} <version>' header")));
    }
    match parts.next().map(str::parse::<u32>) {
        Some(Ok(FORMAT_VERSION)) => {}
        Some(Ok(v)) => return Err(top.at(hl).err(format!("unsupported schema version {v}"))),
        _ => return Err(top.at(hl).err("unreadable schema version")),
    }
    let mut stack: Vec<Block> = Vec::new();
    let mut roots = Vec::new();
    for (ln, line) in lines {
        let ctx = Ctx {
            path: stack.iter().map(|b| b.kind.as_str()).collect::<Vec<_>>().join("/"),
            line: ln,
        };
        if let Some(rest) = line.strip_prefix("begin ") {
            let mut words = rest.split_whitespace();
            let kind = words.next().ok_or_else(|| ctx.err("block without kind"))?.to_string();
            let mut attrs = Vec::new();
            for w in words {
                let (k, v) = w.split_once('=').ok_or_else(|| ctx.err(format!("attribute '{w}' needs key=value")))?;
                attrs.push((k.to_string(), v.to_string()));
            }
            stack.push(Block {
                kind,
                line: ln,
                attrs,
                entries: Vec::new(),
                children: Vec::new(),
            });
        } else if line == "end" {
            let b = stack.pop().ok_or_else(|| ctx.err("'end' without 'begin'"))?;
            match stack.last_mut() {
                Some(parent) => parent.children.push(b),
                None => roots.push(b),
            }
        } else {
            let e = parse_entry(line, &ctx)?;
            stack.last_mut().ok_or_else(|| ctx.err("entry outside any block"))?.entries.push(e);
        }
    }
    if let Some(b) = stack.last() {
        return Err(top.at(b.line).err(format!("block '{}' is never closed", b.kind)));
    }
    if roots.len() != 1 {
        return Err(top.err(format!("expected exactly one top-level block, found {}", roots.len())));
    }
    Ok(roots.pop().unwrap())
}

impl Block {
    fn attr(&self, key: &str, ctx: &Ctx) -> Result<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| ctx.err(format!("missing attribute '{key}'")))
    }

    fn num(&self, key: &str, ctx: &Ctx) -> Result<usize> {
        let v = self.attr(key, ctx)?;
        v.parse().map_err(|_| ctx.err(format!("attribute '{key}' is not a number: '{v}'")))
    }

    fn expect(&self, kind: &str, ctx: &Ctx) -> Result<()> {
        if self.kind != kind {
            return Err(ctx.err(format!("expected '{kind}' block, found '{}'", self.kind)));
        }
        Ok(())
    }

    fn no_children(&self, ctx: &Ctx) -> Result<()> {
        if !self.children.is_empty() {
            return Err(ctx.err(format!("'{}' block cannot contain nested blocks", self.kind)));
        }
        Ok(())
    }
}

fn parse_valence(b: &Block, ctx: &Ctx) -> Result<Valence> {
    let slots_text = b.attr("slots", ctx)?;
    let slots = if slots_text == "-" {
        Vec::new()
    } else {
        slots_text
            .split(',')
            .map(|c| SlotKind::from_code(c).ok_or_else(|| ctx.err(format!("unknown slot kind '{c}'"))))
            .collect::<Result<Vec<_>>>()?
    };
    let appended = b.num("appended", ctx)?;
    let groups_text = b.attr("groups", ctx)?;
    let mut groups = Vec::new();
    if groups_text != "-" {
        for g in groups_text.split(';') {
            let (kind, list) = g.split_once(':').ok_or_else(|| ctx.err(format!("bad symmetry group '{g}'")))?;
            let kind = match kind {
                "sym" => SymmetryKind::Symmetric,
                "alt" => SymmetryKind::Antisymmetric,
                _ => return Err(ctx.err(format!("unknown symmetry '{kind}'"))),
            };
            groups.push(SlotGroup {
                kind,
                slots: parse_list(list, ctx)?,
            });
        }
    }
    Valence::new(slots, appended, groups).map_err(|e| ctx.wrap(e))
}

fn fill_tensor(b: &Block, t: &mut TensorFieldJet, label: &str, ctx: &Ctx) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for e in &b.entries {
        let ectx = ctx.at(e.line);
        if e.label != label {
            return Err(ectx.err(format!("expected label '{label}', found '{}'", e.label)));
        }
        if e.idx.len() != t.valence().rank() {
            return Err(ectx.err(format!("component needs {} indices, found {}", t.valence().rank(), e.idx.len())));
        }
        if !seen.insert((e.idx.clone(), e.deriv.clone())) {
            return Err(ectx.err("duplicate entry"));
        }
        t.set_jet_coordinate(&e.idx, &e.deriv, e.value.clone()).map_err(|err| ectx.wrap(err))?;
    }
    t.audit().map_err(|e| ctx.wrap(e))
}

fn read_tensor(b: &Block, ctx: &Ctx, kind: &str, label: &str) -> Result<TensorFieldJet> {
    b.expect(kind, ctx)?;
    b.no_children(ctx)?;
    let valence = parse_valence(b, ctx)?;
    let mut t = TensorFieldJet::zero(b.num("m", ctx)?, b.num("n", ctx)?, valence, b.num("order", ctx)?);
    fill_tensor(b, &mut t, label, ctx)?;
    Ok(t)
}

fn read_classical(b: &Block, ctx: &Ctx) -> Result<ClassicalConnectionJet> {
    b.expect("classical", ctx)?;
    b.no_children(ctx)?;
    let mut t = TensorFieldJet::zero(b.num("m", ctx)?, 0, Valence::classical_connection(), b.num("order", ctx)?);
    fill_tensor(b, &mut t, "L", ctx)?;
    ClassicalConnectionJet::new(t).map_err(|e| ctx.wrap(e))
}

fn read_linear(b: &Block, ctx: &Ctx) -> Result<LinearConnectionJet> {
    b.expect("linear", ctx)?;
    b.no_children(ctx)?;
    let mut t = TensorFieldJet::zero(
        b.num("m", ctx)?,
        b.num("n", ctx)?,
        Valence::linear_connection(),
        b.num("order", ctx)?,
    );
    fill_tensor(b, &mut t, "K", ctx)?;
    LinearConnectionJet::new(t).map_err(|e| ctx.wrap(e))
}

fn read_curvature(b: &Block, ctx: &Ctx) -> Result<CurvatureDifferentialData> {
    b.expect("curvature", ctx)?;
    b.no_children(ctx)?;
    let i = b.num("i", ctx)?;
    let (kind, valence, label) = match b.attr("kind", ctx)? {
        "classical" => (ConnectionKind::Classical, Valence::classical_curvature(i), "w"),
        "linear" => (ConnectionKind::Linear, Valence::linear_curvature(i), "u"),
        other => return Err(ctx.err(format!("unknown curvature kind '{other}'"))),
    };
    let mut t = TensorFieldJet::zero(b.num("m", ctx)?, b.num("n", ctx)?, valence, 0);
    fill_tensor(b, &mut t, label, ctx)?;
    CurvatureDifferentialData::new(kind, i, t).map_err(|e| ctx.wrap(e))
}

fn read_group(b: &Block, ctx: &Ctx) -> Result<WGroupElement> {
    b.expect("group", ctx)?;
    b.no_children(ctx)?;
    let (m, n) = (b.num("m", ctx)?, b.num("n", ctx)?);
    let (t1, t2) = (b.num("base-order", ctx)?, b.num("gauge-order", ctx)?);
    let mut map = vec![TruncatedSeries::zero(m, t1); m];
    let mut matrix = vec![vec![TruncatedSeries::zero(m, t2); n]; n];
    let mut seen = std::collections::HashSet::new();
    for e in &b.entries {
        let ectx = ctx.at(e.line);
        if !seen.insert((e.label.clone(), e.idx.clone(), e.deriv.clone())) {
            return Err(ectx.err("duplicate entry"));
        }
        if e.deriv.max_label().is_some_and(|l| l >= m) {
            return Err(ectx.err(format!("derivative label out of range 1..={m}")));
        }
        let target = match (e.label.as_str(), e.idx.as_slice()) {
            ("x", [l]) if *l < m => (&mut map[*l], t1),
            ("A", [i, j]) if *i < n && *j < n => (&mut matrix[*i][*j], t2),
            _ => return Err(ectx.err(format!("unexpected entry '{}' with {} indices", e.label, e.idx.len()))),
        };
        if e.deriv.order() > target.1 {
            return Err(ectx.err(format!("derivative order {} above {}", e.deriv.order(), target.1)));
        }
        target.0.set_jet_coordinate(&e.deriv, e.value.clone());
    }
    let base = DiffeoJet::new(map).map_err(|e| ctx.wrap(e))?;
    let gauge = if n == 0 {
        GaugeJet::identity(m, 0, t2)
    } else {
        GaugeJet::new(m, matrix).map_err(|e| ctx.wrap(e))?
    };
    WGroupElement::new(base, gauge).map_err(|e| ctx.wrap(e))
}

fn read_jets(b: &Block, ctx: &Ctx) -> Result<JetSet> {
    b.expect("jets", ctx)?;
    if !b.entries.is_empty() {
        return Err(ctx.at(b.entries[0].line).err("'jets' block holds only nested blocks"));
    }
    let kids = &b.children;
    if kids.len() < 2 || kids.len() > 3 {
        return Err(ctx.err("'jets' needs classical, linear and an optional tensor block"));
    }
    let lambda = read_classical(&kids[0], &ctx.child(&kids[0], 0))?;
    let k = read_linear(&kids[1], &ctx.child(&kids[1], 1))?;
    let phi = kids
        .get(2)
        .map(|t| read_tensor(t, &ctx.child(t, 2), "tensor", "T"))
        .transpose()?;
    let jets = JetSet::new(lambda, k, phi).map_err(|e| ctx.wrap(e))?;
    if jets.m() != b.num("m", ctx)? || jets.n() != b.num("n", ctx)? {
        return Err(ctx.err("dimensions differ from the nested blocks"));
    }
    Ok(jets)
}

fn read_reduced_first(b: &Block, ctx: &Ctx) -> Result<ReducedDataFirst> {
    b.expect("reduced-first", ctx)?;
    let (m, n, s, r, k) = (
        b.num("m", ctx)?,
        b.num("n", ctx)?,
        b.num("s", ctx)?,
        b.num("r", ctx)?,
        b.num("k", ctx)?,
    );
    let mut pos = 0;
    let kids = &b.children;
    let lambda_low = if kids.first().is_some_and(|c| c.kind == "classical") {
        pos = 1;
        Some(read_classical(&kids[0], &ctx.child(&kids[0], 0))?)
    } else {
        None
    };
    let kb = kids.get(pos).ok_or_else(|| ctx.err("missing linear block"))?;
    let k_low = read_linear(kb, &ctx.child(kb, pos))?;
    let mut w = Vec::new();
    let mut u = Vec::new();
    for (p, c) in kids.iter().enumerate().skip(pos + 1) {
        let d = read_curvature(c, &ctx.child(c, p))?;
        match d.kind() {
            ConnectionKind::Classical => w.push(d),
            ConnectionKind::Linear => u.push(d),
        }
    }
    Ok(ReducedDataFirst {
        m,
        n,
        s,
        r,
        k,
        lambda_low,
        k_low,
        w,
        u,
    })
}

fn read_reduced_second(b: &Block, ctx: &Ctx) -> Result<ReducedDataSecond> {
    b.expect("reduced-second", ctx)?;
    let r = b.num("field-order", ctx)?;
    let kids = &b.children;
    if kids.len() < 2 {
        return Err(ctx.err("'reduced-second' needs reduced-first and tensor blocks"));
    }
    let connections = read_reduced_first(&kids[0], &ctx.child(&kids[0], 0))?;
    let phi_low = read_tensor(&kids[1], &ctx.child(&kids[1], 1), "tensor", "T")?;
    let mut phi_diffs = Vec::new();
    for (p, c) in kids.iter().enumerate().skip(2) {
        let cctx = ctx.child(c, p);
        let i = c.num("i", &cctx)?;
        if i != connections.k + phi_diffs.len() {
            return Err(cctx.err(format!("differential of order {i} out of sequence")));
        }
        phi_diffs.push(read_tensor(c, &cctx, "differential", "V")?);
    }
    Ok(ReducedDataSecond {
        connections,
        r,
        phi_low,
        phi_diffs,
    })
}

pub fn decode(text: &str) -> Result<Document> {
    let root = parse_blocks(text)?;
    let ctx = Ctx {
        path: root.kind.clone(),
        line: root.line,
    };
    Ok(match root.kind.as_str() {
        "tensor" => Document::Tensor(read_tensor(&root, &ctx, "tensor", "T")?),
        "classical" => Document::Classical(read_classical(&root, &ctx)?),
        "linear" => Document::Linear(read_linear(&root, &ctx)?),
        "curvature" => Document::Curvature(read_curvature(&root, &ctx)?),
        "group" => Document::Group(read_group(&root, &ctx)?),
        "jets" => Document::Jets(read_jets(&root, &ctx)?),
        "reduced-first" => Document::ReducedFirst(read_reduced_first(&root, &ctx)?),
        "reduced-second" => Document::ReducedSecond(read_reduced_second(&root, &ctx)?),
        other => return Err(ctx.err(format!("unknown block kind '{other}'"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doc_example_parses() {
        let text = "jetcalc 1\nbegin classical m=2 order=1\nL[1,1,2|] 3/4\nL[2,1,1|] 3/4\nL[1,2,1|2] -1/2\nend\n";
        let Document::Classical(l) = decode(text).unwrap() else {
            panic!("wrong kind")
        };
        assert_eq!(l.jet_coordinate(0, 0, 1, &MultiIndex::empty()).unwrap(), Scalar::new(3.into(), 4.into()));
        assert_eq!(l.jet_coordinate(0, 1, 0, &MultiIndex::new(vec![1])).unwrap(), Scalar::new((-1).into(), 2.into()));
    }
}
