//! Group, curve and fact registries.
//!
//! Groups: `<label> <modulus> <gen>;<gen>;...` with generators written `[a,b,c,d]`.
//!
//! Curves: `<label> [a1,a2,a3,a4,a6] rank=<r> torsion=<t1[,t2]> gens=(x,y);...`, free generators
//! first, then one generator per invariant factor. `torsion=1` is the trivial group.
//!
//! Facts are keyed by a group label or a product of labels `A*B`; a named product label stands
//! for its product key. Records:
//!
//! - `name <label> <A*B>`: the registry group `<label>` is conjugate to A x B.
//! - `xh <key> <curve>` or `xh <key> rank=<r> [note]`: the elliptic curve X_H, or its rank.
//! - `xh <key> via=<key2> [note]`: H is contained in H2 with X_H -> X_H2 an isogeny of genus-one curves.
//! - `witness <curve> <key> N=<n>`: the mod-n image of the curve is conjugate to H.
//! - `curious <key> <note>`: attestation that H is curious.
//! - `equiv <key> <key2>`: H is curious exactly when H2 is.
//! - `isogeny <domain> <kernel> <codomain> <point> <c1,c2,...>`: the degree-2 isogeny with the given
//!   kernel sends the point to the combination of the codomain generators.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

use crate::arith::factorize;
use crate::curve::{mazur_validate, EllipticCurve, Point};
use crate::invariants::label_check;
use crate::mat2::Mat2;
use crate::subgroup::{GroupError, Subgroup};

pub const SHIPPED_GROUPS: &str = include_str!("../data/groups.txt");
pub const SHIPPED_CURVES: &str = include_str!("../data/curves.txt");
pub const SHIPPED_FACTS: &str = include_str!("../data/facts.txt");

/// Largest prime used for the Frobenius check of image witnesses.
pub const WITNESS_PRIME_BOUND: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("registry validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("cannot read {0}: {1}")]
    Io(String, String),
}

#[derive(Debug, Clone)]
pub struct GroupEntry {
    pub label: String,
    pub group: Subgroup,
}

#[derive(Debug, Clone)]
pub struct CurveEntry {
    pub label: String,
    pub curve: EllipticCurve,
    pub rank: u32,
    /// Invariant factors, empty for the trivial group.
    pub torsion: Vec<u64>,
    /// Free generators followed by torsion generators.
    pub gens: Vec<Point>,
}

impl CurveEntry {
    pub fn free_gens(&self) -> &[Point] {
        &self.gens[..self.rank as usize]
    }

    pub fn torsion_gens(&self) -> &[Point] {
        &self.gens[self.rank as usize..]
    }
}

/// Where the rank of X_H comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XhSource {
    Curve(String),
    Rank(u32),
    Via(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XhRecord {
    pub source: XhSource,
    pub note: String,
}

/// A curve whose mod-N image is conjugate to the group with the given key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownImageWitness {
    pub curve: String,
    pub key: String,
    pub modulus: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsogenyFact {
    pub domain: String,
    pub kernel: Point,
    pub codomain: String,
    pub point: Point,
    pub expected: Vec<i64>,
}

/// Validated, read-only registries.
#[derive(Debug, Clone, Default)]
pub struct Registries {
    pub groups: Vec<GroupEntry>,
    pub curves: BTreeMap<String, CurveEntry>,
    /// Product key of each named product label.
    pub names: BTreeMap<String, String>,
    pub xh: BTreeMap<String, XhRecord>,
    pub witnesses: Vec<KnownImageWitness>,
    pub curious: BTreeMap<String, String>,
    pub equiv: BTreeMap<String, String>,
    pub isogenies: Vec<IsogenyFact>,
    index: BTreeMap<String, usize>,
}

fn parse_err(file: &str, line: usize, message: impl Into<String>) -> RegistryError {
    RegistryError::Parse {
        file: file.to_string(),
        line,
        message: message.into(),
    }
}

/// Non-comment lines with their 1-based line numbers.
fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Reads and validates the three registry files.
pub fn load_registries(groups: &Path, curves: &Path, facts: &Path) -> Result<Registries, RegistryError> {
    let read =
        |p: &Path| std::fs::read_to_string(p).map_err(|e| RegistryError::Io(p.display().to_string(), e.to_string()));
    Registries::from_texts(
        (&groups.display().to_string(), &read(groups)?),
        (&curves.display().to_string(), &read(curves)?),
        (&facts.display().to_string(), &read(facts)?),
    )
}

impl Registries {
    /// The registries compiled into the library.
    pub fn shipped() -> Result<Registries, RegistryError> {
        Registries::from_texts(
            ("groups.txt", SHIPPED_GROUPS),
            ("curves.txt", SHIPPED_CURVES),
            ("facts.txt", SHIPPED_FACTS),
        )
    }

    /// Parses and validates registries given as (file name, contents) pairs.
    pub fn from_texts(
        groups: (&str, &str),
        curves: (&str, &str),
        facts: (&str, &str),
    ) -> Result<Registries, RegistryError> {
        let mut reg = Registries::default();
        reg.parse_groups(groups.0, groups.1)?;
        reg.parse_curves(curves.0, curves.1)?;
        reg.parse_facts(facts.0, facts.1)?;
        let failures = reg.validate();
        if failures.is_empty() {
            Ok(reg)
        } else {
            Err(RegistryError::Validation(failures))
        }
    }

    fn parse_groups(&mut self, file: &str, text: &str) -> Result<(), RegistryError> {
        for (line, l) in records(text) {
            let fields: Vec<&str> = l.split_whitespace().collect();
            let [label, modulus, gens] = fields[..] else {
                return Err(parse_err(file, line, "expected <label> <modulus> <generators>"));
            };
            let n: u64 = modulus
                .parse()
                .map_err(|_| parse_err(file, line, format!("bad modulus {modulus:?}")))?;
            let gens = gens
                .split(';')
                .map(|g| Mat2::parse(g, n))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| parse_err(file, line, e.to_string()))?;
            let group = Subgroup::generate(n, &gens)
                .map_err(|e| parse_err(file, line, e.to_string()))?
                .with_label(label);
            if self.index.insert(label.to_string(), self.groups.len()).is_some() {
                return Err(parse_err(file, line, format!("duplicate group {label}")));
            }
            self.groups.push(GroupEntry {
                label: label.to_string(),
                group,
            });
        }
        Ok(())
    }

    fn parse_curves(&mut self, file: &str, text: &str) -> Result<(), RegistryError> {
        for (line, l) in records(text) {
            let fields: Vec<&str> = l.split_whitespace().collect();
            let [label, coeffs, rank, torsion, gens] = fields[..] else {
                return Err(parse_err(
                    file,
                    line,
                    "expected <label> [a1,...,a6] rank= torsion= gens=",
                ));
            };
            let err = |m: String| parse_err(file, line, m);
            let curve: EllipticCurve = coeffs
                .parse()
                .map_err(|e: crate::curve::CurveError| err(e.to_string()))?;
            let rank: u32 = rank
                .strip_prefix("rank=")
                .and_then(|r| r.parse().ok())
                .ok_or_else(|| err(format!("bad rank field {rank:?}")))?;
            let torsion_text = torsion
                .strip_prefix("torsion=")
                .ok_or_else(|| err(format!("bad torsion field {torsion:?}")))?;
            let mut structure = Vec::new();
            for t in torsion_text.split(',').filter(|t| !t.is_empty()) {
                let m: u64 = t.parse().map_err(|_| err(format!("bad torsion factor {t:?}")))?;
                if m != 1 {
                    structure.push(m);
                }
            }
            let gens_text = gens
                .strip_prefix("gens=")
                .ok_or_else(|| err(format!("bad gens field {gens:?}")))?;
            let points = gens_text
                .split(';')
                .filter(|g| !g.is_empty())
                .map(|g| g.parse::<Point>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| err(e.to_string()))?;
            if self.curves.contains_key(label) {
                return Err(err(format!("duplicate curve {label}")));
            }
            self.curves.insert(
                label.to_string(),
                CurveEntry {
                    label: label.to_string(),
                    curve: curve.with_label(label),
                    rank,
                    torsion: structure,
                    gens: points,
                },
            );
        }
        Ok(())
    }

    fn parse_facts(&mut self, file: &str, text: &str) -> Result<(), RegistryError> {
        let mut pending_names = Vec::new();
        let mut rest = Vec::new();
        for (line, l) in records(text) {
            let mut it = l.splitn(2, char::is_whitespace);
            let kind = it.next().unwrap_or_default();
            let body = it.next().unwrap_or_default().trim();
            if kind == "name" {
                pending_names.push((line, body));
            } else {
                rest.push((line, kind, body));
            }
        }
        for (line, body) in pending_names {
            let f: Vec<&str> = body.split_whitespace().collect();
            let [label, key] = f[..] else {
                return Err(parse_err(file, line, "expected name <label> <A*B>"));
            };
            let key = self.product_key(key).map_err(|m| parse_err(file, line, m))?;
            if !self.index.contains_key(label) {
                return Err(parse_err(file, line, format!("unknown group {label}")));
            }
            self.names.insert(label.to_string(), key);
        }
        for (line, kind, body) in rest {
            let err = |m: String| parse_err(file, line, m);
            let mut f = body.split_whitespace();
            let mut next = |what: &str| f.next().ok_or_else(|| err(format!("missing {what}")));
            match kind {
                "xh" => {
                    let key = self.canonical(next("key")?).map_err(err)?;
                    let src = next("curve, rank= or via=")?;
                    let note = body.split_whitespace().skip(2).collect::<Vec<_>>().join(" ");
                    let source = if let Some(r) = src.strip_prefix("rank=") {
                        XhSource::Rank(r.parse().map_err(|_| err(format!("bad rank {r:?}")))?)
                    } else if let Some(k) = src.strip_prefix("via=") {
                        XhSource::Via(self.canonical(k).map_err(err)?)
                    } else {
                        XhSource::Curve(src.to_string())
                    };
                    if self.xh.insert(key.clone(), XhRecord { source, note }).is_some() {
                        return Err(err(format!("duplicate xh record for {key}")));
                    }
                }
                "witness" => {
                    let curve = next("curve")?.to_string();
                    let key = self.canonical(next("key")?).map_err(err)?;
                    let n = next("N=")?;
                    let modulus = n
                        .strip_prefix("N=")
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err(format!("bad modulus {n:?}")))?;
                    self.witnesses.push(KnownImageWitness { curve, key, modulus });
                }
                "curious" => {
                    let key = self.canonical(next("key")?).map_err(err)?;
                    let note = body.split_whitespace().skip(1).collect::<Vec<_>>().join(" ");
                    self.curious.insert(key, note);
                }
                "equiv" => {
                    let a = self.canonical(next("key")?).map_err(err)?;
                    let b = self.canonical(next("key")?).map_err(err)?;
                    self.equiv.insert(a, b);
                }
                "isogeny" => {
                    let domain = next("domain")?.to_string();
                    let kernel = next("kernel")?
                        .parse()
                        .map_err(|e: crate::curve::CurveError| err(e.to_string()))?;
                    let codomain = next("codomain")?.to_string();
                    let point = next("point")?
                        .parse()
                        .map_err(|e: crate::curve::CurveError| err(e.to_string()))?;
                    let expected = next("coefficients")?
                        .split(',')
                        .map(|c| c.parse::<i64>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| err("bad coefficients".into()))?;
                    self.isogenies.push(IsogenyFact {
                        domain,
                        kernel,
                        codomain,
                        point,
                        expected,
                    });
                }
                other => return Err(err(format!("unknown record type {other:?}"))),
            }
        }
        Ok(())
    }

    /// Normalizes `A*B` (each a registry label) without resolving names.
    fn product_key(&self, key: &str) -> Result<String, String> {
        for part in key.split('*') {
            if !self.index.contains_key(part) {
                return Err(format!("unknown group {part:?} in {key:?}"));
            }
        }
        Ok(key.to_string())
    }

    /// The product key for a label, a named product label, or a product of labels.
    pub fn canonical(&self, key: &str) -> Result<String, String> {
        if let Some(k) = self.names.get(key) {
            return Ok(k.clone());
        }
        self.product_key(key)
    }

    pub fn group(&self, label: &str) -> Option<&Subgroup> {
        self.index.get(label).map(|&i| &self.groups[i].group)
    }

    /// The named product label for a product key, if any.
    pub fn name_of(&self, key: &str) -> Option<&str> {
        self.names
            .iter()
            .find(|(_, k)| k.as_str() == key)
            .map(|(l, _)| l.as_str())
    }

    /// The factor groups of a canonical key.
    pub fn factors(&self, key: &str) -> Result<Vec<&Subgroup>, String> {
        let key = self.canonical(key)?;
        key.split('*')
            .map(|p| self.group(p).ok_or_else(|| format!("unknown group {p:?}")))
            .collect()
    }

    /// The group of a key, formed as a product when needed.
    pub fn resolve(&self, key: &str, cap: usize) -> Result<Subgroup, GroupError> {
        if let Some(h) = self.group(key) {
            return Ok(h.clone());
        }
        let factors = self.factors(key).map_err(GroupError::Precondition)?;
        let mut h = factors[0].clone();
        for f in &factors[1..] {
            h = Subgroup::product(&h, f, cap)?;
        }
        Ok(h.with_label(key))
    }

    /// Registry groups whose level is a power of `p`.
    pub fn prime_power_groups(&self, p: u64) -> Vec<&GroupEntry> {
        self.groups
            .iter()
            .filter(|g| {
                let f = factorize(g.group.modulus());
                f.len() == 1 && f[0].0 == p
            })
            .collect()
    }

    /// All validation failures; empty when the registries are consistent.
    fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for g in &self.groups {
            let report = label_check(&g.label, &g.group);
            if !report.pass {
                out.push(format!("group {report}"));
            }
        }
        for c in self.curves.values() {
            out.extend(validate_curve(c));
        }
        for (label, key) in &self.names {
            if let Err(m) = self.check_name(label, key) {
                out.push(format!("name {label}: {m}"));
            }
        }
        for (key, rec) in &self.xh {
            match &rec.source {
                XhSource::Curve(c) if !self.curves.contains_key(c) => out.push(format!("xh {key}: unknown curve {c}")),
                XhSource::Via(sup) => {
                    if let Err(m) = self.check_contained(key, sup) {
                        out.push(format!("xh {key}: {m}"));
                    }
                }
                _ => {}
            }
        }
        for w in &self.witnesses {
            if let Err(m) = self.check_witness(w) {
                out.push(format!("witness {} {}: {m}", w.curve, w.key));
            }
        }
        for (a, b) in &self.equiv {
            if self.factors(a).map(|f| f.len()) != self.factors(b).map(|f| f.len()) {
                out.push(format!("equiv {a} {b}: different number of factors"));
            }
        }
        for f in &self.isogenies {
            for (c, p) in [
                (&f.domain, Some(&f.point)),
                (&f.domain, Some(&f.kernel)),
                (&f.codomain, None),
            ] {
                match (self.curves.get(c), p) {
                    (None, _) => out.push(format!("isogeny {} -> {}: unknown curve {c}", f.domain, f.codomain)),
                    (Some(e), Some(p)) if !e.curve.on_curve(p) => {
                        out.push(format!("isogeny {} -> {}: {p} is not on {c}", f.domain, f.codomain))
                    }
                    _ => {}
                }
            }
        }
        out
    }

    fn check_name(&self, label: &str, key: &str) -> Result<(), String> {
        let h = self.group(label).ok_or("unknown group")?;
        let factors = self.factors(key)?;
        let order: usize = factors.iter().map(|f| f.order()).product();
        if h.order() != order {
            return Err(format!("order {} differs from product order {order}", h.order()));
        }
        for f in factors {
            let reduced = h.reduce(f.modulus()).map_err(|e| e.to_string())?;
            match Subgroup::are_conjugate(&reduced, f) {
                Ok(Some(_)) => {}
                Ok(None) => {
                    return Err(format!(
                        "reduction mod {} is not conjugate to {}",
                        f.modulus(),
                        f.label().unwrap_or("?")
                    ))
                }
                Err(e) => return Err(e.to_string()),
            }
        }
        Ok(())
    }

    /// H(key) is conjugate into H(sup), factor by factor.
    fn check_contained(&self, key: &str, sup: &str) -> Result<(), String> {
        let a = self.factors(key)?;
        let b = self.factors(sup)?;
        if a.len() != b.len() {
            return Err(format!("{key} and {sup} have different numbers of factors"));
        }
        for (x, y) in a.iter().zip(&b) {
            if x.modulus() != y.modulus() {
                return Err(format!("factor levels differ between {key} and {sup}"));
            }
            match Subgroup::conjugate_into(x, y) {
                Ok(Some(_)) => {}
                Ok(None) => {
                    return Err(format!(
                        "{} is not conjugate into {}",
                        x.label().unwrap_or("?"),
                        y.label().unwrap_or("?")
                    ))
                }
                Err(e) => return Err(e.to_string()),
            }
        }
        Ok(())
    }

    /// The curve exists, the level matches, and Frobenius traces at good primes fit H.
    fn check_witness(&self, w: &KnownImageWitness) -> Result<(), String> {
        let c = self.curves.get(&w.curve).ok_or("unknown curve")?;
        let factors = self.factors(&w.key)?;
        let level: u64 = factors.iter().map(|f| f.modulus()).product();
        if level != w.modulus {
            return Err(format!("group level {level} differs from N={}", w.modulus));
        }
        let signatures = trace_det_pairs(&factors);
        for p in primes_below(WITNESS_PRIME_BOUND) {
            if w.modulus.is_multiple_of(p) {
                continue;
            }
            let Some(ap) = crate::curve::frobenius_trace(&c.curve, p) else {
                continue;
            };
            let pair = (ap.rem_euclid(w.modulus as i64) as u64, p % w.modulus);
            if !signatures.contains(&pair) {
                return Err(format!("Frobenius at {p} has (trace, det) = {pair:?}, not in H"));
            }
        }
        Ok(())
    }
}

fn validate_curve(c: &CurveEntry) -> Vec<String> {
    let mut out = Vec::new();
    let tag = format!("curve {}", c.label);
    if !mazur_validate(&c.torsion) {
        out.push(format!("{tag}: torsion {:?} is not an allowed structure", c.torsion));
    }
    if c.gens.len() != c.rank as usize + c.torsion.len() {
        out.push(format!(
            "{tag}: expected {} generators, found {}",
            c.rank as usize + c.torsion.len(),
            c.gens.len()
        ));
        return out;
    }
    for p in &c.gens {
        if !c.curve.on_curve(p) {
            out.push(format!("{tag}: {p} is not on the curve"));
        }
    }
    if !out.is_empty() {
        return out;
    }
    for (p, &m) in c.torsion_gens().iter().zip(&c.torsion) {
        let order = c.curve.point_order(p, 12).ok().flatten();
        if order != Some(m) {
            out.push(format!(
                "{tag}: torsion generator {p} has order {order:?}, expected {m}"
            ));
        }
    }
    for p in c.free_gens() {
        if c.curve.point_order(p, 12).ok().flatten().is_some() {
            out.push(format!("{tag}: free generator {p} is torsion"));
        }
    }
    out
}

/// The set of (trace, det) of a direct product, combined by the Chinese remainder theorem.
pub fn trace_det_pairs(factors: &[&Subgroup]) -> BTreeSet<(u64, u64)> {
    let mut acc: BTreeSet<(u64, u64)> = [(0, 0)].into_iter().collect();
    let mut m = 1u64;
    for f in factors {
        let n = f.modulus();
        let local: BTreeSet<(u64, u64)> = f
            .elements()
            .iter()
            .map(|x| (x.trace() as u64, x.det() as u64))
            .collect();
        let mut next = BTreeSet::new();
        for &(t, d) in &acc {
            for &(t2, d2) in &local {
                let ct = crate::arith::crt(t, m, t2, n).expect("coprime levels");
                let cd = crate::arith::crt(d, m, d2, n).expect("coprime levels");
                next.insert((ct, cd));
            }
        }
        acc = next;
        m *= n;
    }
    acc
}

fn primes_below(n: u64) -> impl Iterator<Item = u64> {
    (2..n).filter(|&p| (2..).take_while(|d| d * d <= p).all(|d| p % d != 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GROUPS: &str = "3.3.0.1 3 [2,1,2,2];[1,0,0,2]\n5.5.0.1 5 [2,0,0,1];[1,4,1,1]\n";

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "# header\n3.3.0.1 3 [2,1,2,2];[1,0,0,2]\n5.5.0.1 5\n";
        let err = Registries::from_texts(("g", bad), ("c", ""), ("f", "")).unwrap_err();
        assert!(matches!(err, RegistryError::Parse { line: 3, .. }), "{err}");
        let err = Registries::from_texts(
            ("g", GROUPS),
            ("c", "1.a1 [0,0,0,0,0] rank=0 torsion=1 gens="),
            ("f", ""),
        )
        .unwrap_err();
        assert!(matches!(err, RegistryError::Parse { line: 1, .. }), "{err}");
        let err = Registries::from_texts(("g", GROUPS), ("c", ""), ("f", "\nbogus 1")).unwrap_err();
        assert!(matches!(err, RegistryError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn mislabeled_group_is_rejected() {
        let groups = format!("{GROUPS}15.15.1.1 15 [1,1,0,1];[2,0,0,1];[1,0,0,2]\n");
        let err = Registries::from_texts(("g", &groups), ("c", ""), ("f", "")).unwrap_err();
        let RegistryError::Validation(v) = err else {
            panic!("expected validation error")
        };
        assert_eq!(v.len(), 1);
        assert!(v[0].starts_with("group 15.15.1.1"), "{v:?}");
    }

    #[test]
    fn off_curve_generator_is_rejected() {
        let curves = "576.e2 [0,0,0,-60,176] rank=1 torsion=2 gens=(10,24);(4,1)\n";
        let err = Registries::from_texts(("g", GROUPS), ("c", curves), ("f", "")).unwrap_err();
        let RegistryError::Validation(v) = err else {
            panic!("expected validation error")
        };
        assert_eq!(v, vec!["curve 576.e2: (4,1) is not on the curve".to_string()]);
    }

    #[test]
    fn names_are_checked_by_reduction() {
        let ok = format!("{GROUPS}15.15.1.1 15 [11,10,5,11];[1,0,0,11];[7,0,0,1];[1,9,6,1]\n");
        let reg = Registries::from_texts(("g", &ok), ("c", ""), ("f", "name 15.15.1.1 3.3.0.1*5.5.0.1")).unwrap();
        assert_eq!(reg.canonical("15.15.1.1").unwrap(), "3.3.0.1*5.5.0.1");
        assert_eq!(reg.name_of("3.3.0.1*5.5.0.1"), Some("15.15.1.1"));
        let err = Registries::from_texts(("g", &ok), ("c", ""), ("f", "name 15.15.1.1 5.5.0.1*3.3.0.1*3.3.0.1"));
        assert!(err.is_err());
    }

    #[test]
    fn shipped_registries_load() {
        let reg = Registries::shipped().unwrap();
        assert!(reg.group("13.14.0.1").is_some());
        assert!(reg.curves.contains_key("832.f2"));
        assert!(reg
            .witnesses
            .iter()
            .any(|w| w.curve == "11094.g2" && w.key == "8.2.0.1*13.28.0.1" && w.modulus == 104));
    }

    #[test]
    fn frobenius_check_rejects_a_wrong_witness() {
        let reg = Registries::shipped().unwrap();
        let w = KnownImageWitness {
            curve: "225.c2".into(),
            key: "8.2.0.1*13.28.0.1".into(),
            modulus: 104,
        };
        assert!(reg.check_witness(&w).is_err());
    }
}
