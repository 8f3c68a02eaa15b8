//! Curiosity verdicts for products of prime-power level groups.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::covers::genus_one_subgroup;
use crate::curve::{apply_scaling, minimal_scaling_match, mw_decompose, two_isogeny, CurveError, Point};
use crate::invariants::{CurveInvariants, InvariantError};
use crate::registry::{IsogenyFact, Registries, XhSource};
use crate::subgroup::{GroupError, Subgroup};

/// Primes whose prime-power level groups are in the registry.
pub const SUPPORTED_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Bound on the free coefficient searched when decomposing isogeny images.
pub const DECOMPOSITION_BOUND: i64 = 50;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("prime {0} is not one of 2, 3, 5, 7, 11, 13")]
    UnknownPrime(u64),
    #[error("expected one or two distinct primes, got {0:?}")]
    BadPrimeList(Vec<u64>),
    #[error("no X_H record for {0}")]
    MissingCurveData(String),
    #[error("{0}")]
    Registry(String),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    NotApplicable,
    NotCuriousGenusGe2,
    NotCuriousGenus0,
    NotCuriousRank0,
    NotCuriousPigeonhole,
    NotCuriousWitnessCurve,
    Curious,
    UnknownNeedsData,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::NotApplicable => "NOT_APPLICABLE",
            Status::NotCuriousGenusGe2 => "NOT_CURIOUS_GENUS_GE_2",
            Status::NotCuriousGenus0 => "NOT_CURIOUS_GENUS_0",
            Status::NotCuriousRank0 => "NOT_CURIOUS_RANK_0",
            Status::NotCuriousPigeonhole => "NOT_CURIOUS_PIGEONHOLE",
            Status::NotCuriousWitnessCurve => "NOT_CURIOUS_WITNESS_CURVE",
            Status::Curious => "CURIOUS",
            Status::UnknownNeedsData => "UNKNOWN_NEEDS_DATA",
        };
        f.write_str(s)
    }
}

/// A product of registry groups of coprime prime-power levels.
#[derive(Debug, Clone)]
pub struct Candidate {
    /// Factor labels joined by `*`.
    pub key: String,
    /// Named product label when the registry has one, otherwise the key.
    pub label: String,
    pub invariants: CurveInvariants,
}

#[derive(Debug, Clone)]
pub struct CuriosityVerdict {
    pub key: String,
    pub label: String,
    pub invariants: CurveInvariants,
    /// Rank of X_H when the genus is one.
    pub rank: Option<u32>,
    pub status: Status,
    pub evidence: Vec<String>,
}

impl fmt::Display for CuriosityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inv = &self.invariants;
        write!(
            f,
            "{} {} level={} index={} genus={}",
            self.label, self.status, inv.level, inv.index, inv.genus
        )?;
        if self.label != self.key {
            write!(f, " product={}", self.key)?;
        }
        write!(f, " | {}", self.evidence.join("; "))
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyReport {
    pub primes: Vec<u64>,
    pub verdicts: Vec<CuriosityVerdict>,
}

impl ClassifyReport {
    /// Labels of the CURIOUS verdicts, in report order.
    pub fn curious(&self) -> Vec<&str> {
        self.verdicts
            .iter()
            .filter(|v| v.status == Status::Curious)
            .map(|v| v.label.as_str())
            .collect()
    }

    pub fn count(&self, status: Status) -> usize {
        self.verdicts.iter().filter(|v| v.status == status).count()
    }
}

/// Orders labels by their numeric fields, then by the text.
pub fn label_order(a: &str, b: &str) -> Ordering {
    let nums = |s: &str| -> Vec<u64> {
        s.split(|c: char| !c.is_ascii_digit())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().unwrap_or(u64::MAX))
            .collect()
    };
    nums(a).cmp(&nums(b)).then_with(|| a.cmp(b))
}

fn check_primes(primes: &[u64]) -> Result<Vec<u64>, ClassifyError> {
    let mut ps = primes.to_vec();
    ps.sort_unstable();
    ps.dedup();
    if ps.is_empty() || ps.len() > 2 || ps.len() != primes.len() {
        return Err(ClassifyError::BadPrimeList(primes.to_vec()));
    }
    if let Some(&p) = ps.iter().find(|p| !SUPPORTED_PRIMES.contains(p)) {
        return Err(ClassifyError::UnknownPrime(p));
    }
    Ok(ps)
}

/// Registry groups of `p`-power level with conjugate duplicates removed.
fn factor_list(reg: &Registries, p: u64) -> Result<Vec<&Subgroup>, ClassifyError> {
    let mut out: Vec<&Subgroup> = Vec::new();
    for g in reg.prime_power_groups(p) {
        let mut duplicate = false;
        for h in &out {
            if h.modulus() == g.group.modulus() && Subgroup::are_conjugate(h, &g.group)?.is_some() {
                duplicate = true;
                break;
            }
        }
        if !duplicate {
            out.push(&g.group);
        }
    }
    Ok(out)
}

/// All products of registry groups of the given prime-power levels.
pub fn enumerate_candidates(reg: &Registries, primes: &[u64]) -> Result<Vec<Candidate>, ClassifyError> {
    let ps = check_primes(primes)?;
    let lists = ps.iter().map(|&p| factor_list(reg, p)).collect::<Result<Vec<_>, _>>()?;
    let mut combos: Vec<Vec<&Subgroup>> = vec![vec![]];
    for list in &lists {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                list.iter().map(move |g| {
                    let mut c = c.clone();
                    c.push(*g);
                    c
                })
            })
            .collect();
    }
    let mut out = combos
        .into_par_iter()
        .map(|factors| {
            let key = factors
                .iter()
                .map(|g| g.label().unwrap_or("?"))
                .collect::<Vec<_>>()
                .join("*");
            let invariants = CurveInvariants::of_product(&factors)?;
            let label = reg.name_of(&key).unwrap_or(&key).to_string();
            Ok(Candidate { key, label, invariants })
        })
        .collect::<Result<Vec<_>, ClassifyError>>()?;
    out.sort_by(|a, b| label_order(&a.label, &b.label).then_with(|| a.key.cmp(&b.key)));
    Ok(out)
}

/// Rank of X_H from the registry, following `via` links.
fn xh_rank(reg: &Registries, key: &str, evidence: &mut Vec<String>) -> Result<u32, ClassifyError> {
    let mut key = key.to_string();
    for _ in 0..8 {
        let rec = reg
            .xh
            .get(&key)
            .ok_or_else(|| ClassifyError::MissingCurveData(key.clone()))?;
        let note = if rec.note.is_empty() {
            String::new()
        } else {
            format!(" ({})", rec.note)
        };
        match &rec.source {
            XhSource::Curve(c) => {
                let entry = reg
                    .curves
                    .get(c)
                    .ok_or_else(|| ClassifyError::MissingCurveData(c.clone()))?;
                evidence.push(format!("X_H is {c} of rank {}{note}", entry.rank));
                return Ok(entry.rank);
            }
            XhSource::Rank(r) => {
                evidence.push(format!("X_H has rank {r}{note}"));
                return Ok(*r);
            }
            XhSource::Via(sup) => {
                evidence.push(format!(
                    "X_H is isogenous to X_H' for H' = {}{note}",
                    reg.name_of(sup).unwrap_or(sup)
                ));
                key = sup.clone();
            }
        }
    }
    Err(ClassifyError::Registry(format!("xh chain from {key} is too long")))
}

/// Decision ladder for one candidate.
pub fn curiosity_status(reg: &Registries, c: &Candidate, cap: usize) -> Result<CuriosityVerdict, ClassifyError> {
    status_of(reg, c, cap, 0)
}

fn status_of(reg: &Registries, c: &Candidate, cap: usize, depth: usize) -> Result<CuriosityVerdict, ClassifyError> {
    let inv = c.invariants;
    let mut evidence = Vec::new();
    let mut rank = None;
    let status = if !inv.admissible {
        evidence.push("H is not admissible".into());
        Status::NotApplicable
    } else if inv.genus >= 2 {
        evidence.push(format!("genus {} >= 2, finitely many points (Faltings)", inv.genus));
        Status::NotCuriousGenusGe2
    } else if inv.genus == 0 {
        evidence.push("genus 0 with a rational point, thin complement (Hilbert irreducibility)".into());
        Status::NotCuriousGenus0
    } else {
        let r = xh_rank(reg, &c.key, &mut evidence)?;
        rank = Some(r);
        genus_one_status(reg, c, r, cap, depth, &mut evidence)?
    };
    Ok(CuriosityVerdict {
        key: c.key.clone(),
        label: c.label.clone(),
        invariants: inv,
        rank,
        status,
        evidence,
    })
}

fn genus_one_status(
    reg: &Registries,
    c: &Candidate,
    rank: u32,
    cap: usize,
    depth: usize,
    evidence: &mut Vec<String>,
) -> Result<Status, ClassifyError> {
    if rank == 0 {
        evidence.push("finitely many rational points".into());
        return Ok(Status::NotCuriousRank0);
    }
    if let Some(w) = reg.witnesses.iter().find(|w| w.key == c.key) {
        evidence.push(format!("mod-{} image of {} is H", w.modulus, w.curve));
        return Ok(Status::NotCuriousWitnessCurve);
    }
    let h = reg.resolve(&c.key, cap)?;
    let search = genus_one_subgroup(&h, cap)?;
    match &search.witness {
        None => {
            evidence.push(format!(
                "no proper admissible subgroup of genus < 2 (abelian quotient of order {})",
                search.quotient_order
            ));
            return Ok(Status::NotCuriousPigeonhole);
        }
        Some(k) => {
            let inv = CurveInvariants::compute(k)?;
            evidence.push(format!(
                "proper admissible subgroup of genus 1 at {}.{}.{}",
                inv.level, inv.index, inv.genus
            ));
        }
    }
    if let Some(note) = reg.curious.get(&c.key) {
        evidence.push(format!("covering argument attested: {note}"));
        return Ok(Status::Curious);
    }
    if let Some(other) = reg.equiv.get(&c.key) {
        if depth > 4 {
            return Err(ClassifyError::Registry(format!(
                "equivalence chain from {} is too long",
                c.key
            )));
        }
        let factors = reg.factors(other).map_err(ClassifyError::Registry)?;
        let invariants = CurveInvariants::of_product(&factors)?;
        let label = reg.name_of(other).unwrap_or(other).to_string();
        let target = Candidate {
            key: other.clone(),
            label: label.clone(),
            invariants,
        };
        let v = status_of(reg, &target, cap, depth + 1)?;
        evidence.push(format!("curious exactly when {label} is, which is {}", v.status));
        if v.status == Status::Curious {
            return Ok(Status::Curious);
        }
    }
    evidence.push("no decisive record".into());
    Ok(Status::UnknownNeedsData)
}

/// Verdicts for every candidate of the given primes, ordered by label.
pub fn classify(reg: &Registries, primes: &[u64], cap: usize) -> Result<ClassifyReport, ClassifyError> {
    let candidates = enumerate_candidates(reg, primes)?;
    let verdicts = candidates
        .par_iter()
        .map(|c| curiosity_status(reg, c, cap))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ClassifyReport {
        primes: check_primes(primes)?,
        verdicts,
    })
}

/// Outcome of one isogeny fact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactResult {
    pub fact: IsogenyFact,
    pub image: Option<Point>,
    pub found: Option<Vec<i64>>,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for FactResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fa = &self.fact;
        let status = if self.passed { "PASS" } else { "FAIL" };
        let expected = fa.expected.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        write!(
            f,
            "{status} {} -[{}]-> {}: {} expected ({expected})",
            fa.domain, fa.kernel, fa.codomain, fa.point
        )?;
        if let Some(found) = &self.found {
            let found = found.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
            write!(f, " found ({found})")?;
        }
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

/// Checks each recorded isogeny fact; failures are reported, never raised.
pub fn verify_isogeny_facts(reg: &Registries) -> Vec<FactResult> {
    reg.isogenies.iter().map(|f| verify_fact(reg, f)).collect()
}

pub fn verify_fact(reg: &Registries, fact: &IsogenyFact) -> FactResult {
    let mut result = FactResult {
        fact: fact.clone(),
        image: None,
        found: None,
        passed: false,
        detail: String::new(),
    };
    match image_coefficients(reg, fact) {
        Ok((image, coeffs)) => {
            result.passed = coeffs == fact.expected;
            result.image = Some(image);
            result.found = Some(coeffs);
        }
        Err(e) => result.detail = e,
    }
    result
}

fn image_coefficients(reg: &Registries, fact: &IsogenyFact) -> Result<(Point, Vec<i64>), String> {
    let dom = reg
        .curves
        .get(&fact.domain)
        .ok_or_else(|| format!("unknown curve {}", fact.domain))?;
    let cod = reg
        .curves
        .get(&fact.codomain)
        .ok_or_else(|| format!("unknown curve {}", fact.codomain))?;
    let err = |e: CurveError| e.to_string();
    let phi = two_isogeny(&dom.curve, &fact.kernel).map_err(err)?;
    let target = cod.curve.short_model();
    let (u, r) =
        minimal_scaling_match(&phi.codomain, &target).ok_or("codomain is not isomorphic to the registry curve")?;
    let image = cod
        .curve
        .from_short(&apply_scaling(&phi.eval(&fact.point).map_err(err)?, &u, &r));
    let free = cod.free_gens().first().cloned().unwrap_or(Point::Infinity);
    let coeffs = mw_decompose(&cod.curve, &image, &free, cod.torsion_gens(), DECOMPOSITION_BOUND).map_err(err)?;
    Ok((image, coeffs))
}
