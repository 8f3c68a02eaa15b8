//! Finitely generated subgroups of GL(2, Z/NZ) and the structural operations on them.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::hash::{BuildHasherDefault, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{divisors, factorize, gl2_order, phi, prime_power_parts, unit_generators};
use crate::mat2::{Gl2Error, Mat2};

/// Default bound on the number of elements a closure may materialize.
pub const DEFAULT_CAP: usize = 20_000_000;

/// Counts of (trace, det, order) over the elements of a group.
pub type Fingerprint = Vec<((u32, u32, u64), usize)>;

/// Largest modulus for which a brute-force conjugator scan is attempted.
pub const CONJUGACY_MAX_MODULUS: u32 = 120;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error(transparent)]
    Gl2(#[from] Gl2Error),
    #[error("closure exceeded cap {cap} after {partial} elements")]
    CapExceeded { cap: usize, partial: usize },
    #[error("unsupported subgroup index {0}")]
    UnsupportedIndex(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Multiplicative hasher for packed matrix keys.
#[derive(Default, Clone, Copy)]
pub struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(8) ^ b as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        }
    }
    fn write_u64(&mut self, k: u64) {
        self.0 = (k ^ (k >> 29)).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (k >> 32);
    }
}

pub type KeySet = HashSet<u64, BuildHasherDefault<KeyHasher>>;
pub type KeyMap<V> = HashMap<u64, V, BuildHasherDefault<KeyHasher>>;

/// A subgroup of GL(2, Z/NZ) together with its materialized element set.
#[derive(Clone)]
pub struct Subgroup {
    modulus: u32,
    generators: Vec<Mat2>,
    elements: Arc<Vec<Mat2>>,
    keys: Arc<KeySet>,
    label: Option<String>,
}

impl std::fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Subgroup")
            .field("modulus", &self.modulus)
            .field("order", &self.order())
            .field("label", &self.label)
            .field("generators", &self.generators)
            .finish()
    }
}

impl Subgroup {
    /// Breadth-first closure of `generators` under right multiplication.
    pub fn closure(modulus: u64, generators: &[Mat2], cap: usize) -> Result<Subgroup, GroupError> {
        let id = Mat2::identity(modulus)?;
        for g in generators {
            if g.modulus() as u64 != modulus {
                return Err(Gl2Error::ModulusMismatch(modulus as u32, g.modulus()).into());
            }
            if !g.is_invertible() {
                return Err(Gl2Error::NotInvertible(g.to_string(), g.det(), g.modulus()).into());
            }
        }
        let mut keys = KeySet::default();
        let mut elements = vec![id];
        keys.insert(id.key());
        let mut head = 0;
        while head < elements.len() {
            let x = elements[head];
            head += 1;
            for g in generators {
                let y = x.mul_same(g);
                if keys.insert(y.key()) {
                    if elements.len() >= cap {
                        return Err(GroupError::CapExceeded {
                            cap,
                            partial: elements.len(),
                        });
                    }
                    elements.push(y);
                }
            }
        }
        Ok(Subgroup {
            modulus: modulus as u32,
            generators: generators.to_vec(),
            elements: Arc::new(elements),
            keys: Arc::new(keys),
            label: None,
        })
    }

    /// Closure with the default cap.
    pub fn generate(modulus: u64, generators: &[Mat2]) -> Result<Subgroup, GroupError> {
        Subgroup::closure(modulus, generators, DEFAULT_CAP)
    }

    /// GL(2, Z/nZ), generated by the two standard SL2 generators and diagonal units.
    pub fn full(n: u64, cap: usize) -> Result<Subgroup, GroupError> {
        Subgroup::closure(n, &gl2_generators(n)?, cap)
    }

    /// SL(2, Z/nZ), generated by T and S.
    pub fn special(n: u64, cap: usize) -> Result<Subgroup, GroupError> {
        Subgroup::closure(n, &[Mat2::new(n, [1, 1, 0, 1])?, Mat2::new(n, [0, -1, 1, 0])?], cap)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn modulus(&self) -> u64 {
        self.modulus as u64
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Index in GL(2, Z/NZ).
    pub fn index(&self) -> u64 {
        gl2_order(self.modulus as u64) / self.order() as u64
    }

    pub fn contains(&self, x: &Mat2) -> bool {
        x.modulus() == self.modulus && self.keys.contains(&x.key())
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.modulus == other.modulus && self.generators.iter().all(|g| other.contains(g))
    }

    pub fn contains_minus_id(&self) -> bool {
        self.keys.contains(&minus_id(self.modulus).key())
    }

    /// Sorted determinant image.
    pub fn det_image(&self) -> Vec<u32> {
        let mut dets = BTreeSet::new();
        let mut frontier = vec![1 % self.modulus];
        dets.insert(1 % self.modulus);
        let gen_dets: Vec<u64> = self.generators.iter().map(|g| g.det() as u64).collect();
        while let Some(d) = frontier.pop() {
            for &g in &gen_dets {
                let e = (d as u64 * g % self.modulus as u64) as u32;
                if dets.insert(e) {
                    frontier.push(e);
                }
            }
        }
        dets.into_iter().collect()
    }

    pub fn det_image_is_full(&self) -> bool {
        self.det_image().len() as u64 == phi(self.modulus as u64)
    }

    /// Whether some element is conjugate to diag(1,-1) or [[1,1],[0,-1]].
    pub fn has_complex_conjugation(&self) -> bool {
        let n = self.modulus as u64;
        if n <= 2 {
            // the references reduce to Id and [[1,1],[0,1]] mod 2
            return n == 1 || self.elements.iter().any(|z| is_conjugation_like(z, n));
        }
        self.elements.iter().any(|z| is_conjugation_like(z, n))
    }

    /// Image of the subgroup under reduction to a divisor `m`.
    pub fn reduce(&self, m: u64) -> Result<Subgroup, GroupError> {
        let gens = self
            .generators
            .iter()
            .map(|g| g.reduce(m))
            .collect::<Result<Vec<_>, _>>()?;
        Subgroup::generate(m, &gens)
    }

    /// Smallest divisor M of N such that the group is the full preimage of its reduction mod M.
    pub fn level(&self) -> Result<u64, GroupError> {
        let n = self.modulus as u64;
        let total = gl2_order(n);
        for m in divisors(n) {
            let kernel = total / gl2_order(m);
            let reduced = if m == 1 { 1 } else { self.reduce(m)?.order() as u64 };
            if reduced * kernel == self.order() as u64 {
                return Ok(m);
            }
        }
        Ok(n)
    }

    /// Full preimage under reduction from `target` to the current modulus.
    pub fn preimage(&self, target: u64, cap: usize) -> Result<Subgroup, GroupError> {
        let mut gens = self
            .generators
            .iter()
            .map(|g| g.lift(target))
            .collect::<Result<Vec<_>, _>>()?;
        gens.extend(kernel_generators(self.modulus as u64, target)?);
        Subgroup::closure(target, &gens, cap)
    }

    /// The direct product A x B inside GL(2, Z/MNZ) for coprime moduli.
    pub fn product(a: &Subgroup, b: &Subgroup, cap: usize) -> Result<Subgroup, GroupError> {
        let (m, n) = (a.modulus(), b.modulus());
        if m.gcd(&n) != 1 {
            return Err(Gl2Error::NonCoprimeModuli(a.modulus, b.modulus).into());
        }
        let id_m = Mat2::identity(m)?;
        let id_n = Mat2::identity(n)?;
        let mut gens = Vec::new();
        for g in &a.generators {
            gens.push(Mat2::crt_combine(g, &id_n)?);
        }
        for g in &b.generators {
            gens.push(Mat2::crt_combine(&id_m, g)?);
        }
        Subgroup::closure(m * n, &gens, cap)
    }

    /// Adds generators and recloses.
    pub fn extend(&self, extra: &[Mat2], cap: usize) -> Result<Subgroup, GroupError> {
        let mut gens = self.generators.clone();
        for x in extra {
            if !self.contains(x) {
                gens.push(*x);
            }
        }
        if gens.len() == self.generators.len() {
            return Ok(self.clone());
        }
        Subgroup::closure(self.modulus as u64, &gens, cap)
    }

    /// The subgroup ⟨H, -Id⟩.
    pub fn with_minus_id(&self, cap: usize) -> Result<Subgroup, GroupError> {
        self.extend(&[minus_id(self.modulus)], cap)
    }

    /// Elements of determinant one.
    pub fn sl2_part(&self) -> Vec<Mat2> {
        let one = 1 % self.modulus;
        self.elements.iter().copied().filter(|x| x.det() == one).collect()
    }

    /// Smallest subgroup containing `seeds` that is normalized by every generator.
    pub fn normal_closure(&self, seeds: &[Mat2], cap: usize) -> Result<Subgroup, GroupError> {
        let n = self.modulus as u64;
        let mut gens: Vec<Mat2> = Vec::new();
        for s in seeds {
            if !s.is_identity() && !gens.contains(s) {
                gens.push(*s);
            }
        }
        let mut sub = Subgroup::closure(n, &gens, cap)?;
        let conj: Vec<(Mat2, Mat2)> = self
            .generators
            .iter()
            .map(|g| Ok((*g, g.inv()?)))
            .collect::<Result<_, Gl2Error>>()?;
        loop {
            let mut added = Vec::new();
            for s in &gens {
                for (g, gi) in &conj {
                    let c = gi.mul_same(s).mul_same(g);
                    if !sub.contains(&c) && !added.contains(&c) {
                        added.push(c);
                    }
                }
            }
            if added.is_empty() {
                return Ok(sub);
            }
            gens.extend(added);
            sub = Subgroup::closure(n, &gens, cap)?;
        }
    }

    /// Multiset fingerprint of (trace, det, element order), invariant under conjugation.
    pub fn fingerprint(&self) -> Fingerprint {
        let mut counts: HashMap<(u32, u32, u64), usize> = HashMap::new();
        let triples: Vec<(u32, u32, u64)> = self
            .elements
            .par_iter()
            .map(|x| (x.trace(), x.det(), x.order().expect("group elements are invertible")))
            .collect();
        for t in triples {
            *counts.entry(t).or_default() += 1;
        }
        let mut v: Vec<_> = counts.into_iter().collect();
        v.sort_unstable();
        v
    }

    /// A matrix x with x H1 x^-1 = H2, if one exists.
    pub fn are_conjugate(h1: &Subgroup, h2: &Subgroup) -> Result<Option<Mat2>, GroupError> {
        if h1.modulus != h2.modulus {
            return Err(Gl2Error::ModulusMismatch(h1.modulus, h2.modulus).into());
        }
        if h1.order() != h2.order() || h1.det_image() != h2.det_image() {
            return Ok(None);
        }
        if h1.fingerprint() != h2.fingerprint() {
            return Ok(None);
        }
        Subgroup::conjugate_into(h1, h2)
    }

    /// A matrix x with x H1 x^-1 contained in H2, if one exists.
    pub fn conjugate_into(h1: &Subgroup, h2: &Subgroup) -> Result<Option<Mat2>, GroupError> {
        if h1.modulus != h2.modulus {
            return Err(Gl2Error::ModulusMismatch(h1.modulus, h2.modulus).into());
        }
        if !h2.order().is_multiple_of(h1.order()) {
            return Ok(None);
        }
        if h1.is_subgroup_of(h2) {
            return Ok(Some(Mat2::identity(h1.modulus as u64)?));
        }
        let n = h1.modulus;
        if n > CONJUGACY_MAX_MODULUS {
            return Err(GroupError::CapExceeded {
                cap: CONJUGACY_MAX_MODULUS as usize,
                partial: n as usize,
            });
        }
        let parts = prime_power_parts(n as u64);
        if parts.len() > 1 {
            return conjugate_into_by_parts(h1, h2, &parts);
        }
        let gens = h1.generators.clone();
        let found = (0..n).into_par_iter().find_map_first(|a| {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let x = Mat2::from_raw(n, [a, b, c, d]);
                        let Ok(xi) = x.inv() else { continue };
                        if gens.iter().all(|g| h2.contains(&x.mul_same(g).mul_same(&xi))) {
                            return Some(x);
                        }
                    }
                }
            }
            None
        });
        Ok(found)
    }

    /// All subgroups of index `n` (2 or 3).
    pub fn subgroups_of_index(&self, n: usize, cap: usize) -> Result<Vec<Subgroup>, GroupError> {
        match n {
            2 => self.index_two_subgroups(cap),
            3 => self.index_three_subgroups(cap),
            _ => Err(GroupError::UnsupportedIndex(n)),
        }
    }

    fn index_two_subgroups(&self, cap: usize) -> Result<Vec<Subgroup>, GroupError> {
        let gens = &self.generators;
        let mut seeds: Vec<Mat2> = gens.iter().map(|g| g.mul_same(g)).collect();
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                seeds.push(commutator(a, b)?);
            }
        }
        let k0 = self.normal_closure(&seeds, cap)?;
        let cosets = CosetLabels::new(self, &k0);
        let q = cosets.count();
        // coordinates of each coset in (Z/2)^r
        let mut coord: Vec<Option<u32>> = vec![None; q];
        let id_label = cosets.label_of(&Mat2::identity(self.modulus as u64)?);
        coord[id_label] = Some(0);
        let mut span = vec![id_label];
        let mut rank = 0u32;
        for c in 0..q {
            if coord[c].is_some() {
                continue;
            }
            let rep = cosets.reps[c];
            let mut new = Vec::new();
            for &s in &span {
                let t = cosets.label_of(&cosets.reps[s].mul_same(&rep));
                coord[t] = Some(coord[s].unwrap() | 1 << rank);
                new.push(t);
            }
            span.extend(new);
            rank += 1;
        }
        let mut out = Vec::new();
        for f in 1u32..(1 << rank) {
            let inside: Vec<bool> = coord.iter().map(|c| (c.unwrap() & f).count_ones() % 2 == 0).collect();
            out.push(self.subgroup_from_cosets(&cosets, &inside));
        }
        Ok(out)
    }

    fn index_three_subgroups(&self, cap: usize) -> Result<Vec<Subgroup>, GroupError> {
        let n = self.modulus as u64;
        let gens = &self.generators;
        let mut comms = Vec::new();
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                comms.push(commutator(a, b)?);
            }
        }
        let derived = self.normal_closure(&comms, cap)?;
        let dg = derived.generators().to_vec();
        let mut comms2 = Vec::new();
        for (i, a) in dg.iter().enumerate() {
            for b in &dg[i + 1..] {
                comms2.push(commutator(a, b)?);
            }
        }
        let mut v = self.normal_closure(&comms2, cap)?;
        for x in self.elements.iter() {
            let y = x.pow(6);
            if !v.contains(&y) {
                v = v.extend(&[y], cap)?;
            }
        }
        let cosets = CosetLabels::new(self, &v);
        let q = cosets.count();
        let id_label = cosets.label_of(&Mat2::identity(n)?);
        // a small generating set of the quotient keeps the search at 6^rank
        let mut qgens: Vec<Mat2> = Vec::new();
        let mut reached = vec![false; q];
        reached[id_label] = true;
        for g in gens {
            if reached[cosets.label_of(g)] {
                continue;
            }
            qgens.push(*g);
            let mut stack: Vec<usize> = (0..q).filter(|&c| reached[c]).collect();
            while let Some(c) = stack.pop() {
                for h in &qgens {
                    let t = cosets.label_of(&cosets.reps[c].mul_same(h));
                    if !reached[t] {
                        reached[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        let act: Vec<Vec<usize>> = (0..q)
            .map(|c| {
                qgens
                    .iter()
                    .map(|g| cosets.label_of(&cosets.reps[c].mul_same(g)))
                    .collect()
            })
            .collect();
        let s3 = symmetric3();
        let s = qgens.len();
        let mut found: BTreeSet<Vec<bool>> = BTreeSet::new();
        let mut choice = vec![0usize; s];
        'outer: loop {
            if let Some(img) = pull_back(&act, id_label, &choice, &s3) {
                let images: Vec<[u8; 3]> = choice.iter().map(|&k| s3[k]).collect();
                if is_transitive(&images) {
                    for p in 0..3u8 {
                        let inside: Vec<bool> = img.iter().map(|perm| perm[p as usize] == p).collect();
                        found.insert(inside);
                    }
                }
            }
            for slot in choice.iter_mut() {
                *slot += 1;
                if *slot < 6 {
                    continue 'outer;
                }
                *slot = 0;
            }
            break;
        }
        Ok(found
            .iter()
            .map(|inside| self.subgroup_from_cosets(&cosets, inside))
            .collect())
    }

    /// The union of the selected cosets, with Schreier generators from a transversal.
    fn subgroup_from_cosets(&self, cosets: &CosetLabels, inside: &[bool]) -> Subgroup {
        let elements: Vec<Mat2> = self
            .elements
            .iter()
            .copied()
            .filter(|x| inside[cosets.label_of(x)])
            .collect();
        let sub_keys: KeySet = elements.iter().map(Mat2::key).collect();
        // transversal of the new subgroup: walk the Schreier graph of right cosets
        let id = Mat2::identity(self.modulus as u64).expect("valid modulus");
        let mut reps = vec![id];
        let mut gens_out: Vec<Mat2> = Vec::new();
        let find = |reps: &[Mat2], x: &Mat2| -> Option<usize> {
            reps.iter().position(|r| {
                let ri = r.inv().expect("invertible");
                sub_keys.contains(&x.mul_same(&ri).key())
            })
        };
        let mut i = 0;
        while i < reps.len() {
            let r = reps[i];
            for g in &self.generators {
                let rg = r.mul_same(g);
                match find(&reps, &rg) {
                    Some(j) => {
                        let s = rg.mul_same(&reps[j].inv().expect("invertible"));
                        if !s.is_identity() && !gens_out.contains(&s) {
                            gens_out.push(s);
                        }
                    }
                    None => reps.push(rg),
                }
            }
            i += 1;
        }
        Subgroup {
            modulus: self.modulus,
            generators: gens_out,
            elements: Arc::new(elements),
            keys: Arc::new(sub_keys),
            label: None,
        }
    }

    /// Subgroups K of G = ⟨H, -Id⟩ with ⟨K, -Id⟩ = G.
    pub fn quadratic_twists(&self, cap: usize) -> Result<Vec<Subgroup>, GroupError> {
        if self.modulus < 3 {
            return Err(GroupError::Precondition("quadratic twists need modulus >= 3".into()));
        }
        let g = self.with_minus_id(cap)?;
        let mut out = vec![g.clone()];
        for k in g.subgroups_of_index(2, cap)? {
            if !k.contains_minus_id() {
                out.push(k);
            }
        }
        Ok(out)
    }
}

/// Every x in GL(2, Z/qZ) with x H1 x^-1 contained in H2.
fn conjugators(h1: &Subgroup, h2: &Subgroup) -> Vec<Mat2> {
    let n = h1.modulus;
    let gens = &h1.generators;
    (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut out = Vec::new();
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let x = Mat2::from_raw(n, [a, b, c, d]);
                        let Ok(xi) = x.inv() else { continue };
                        if gens.iter().all(|g| h2.contains(&x.mul_same(g).mul_same(&xi))) {
                            out.push(x);
                        }
                    }
                }
            }
            out
        })
        .collect()
}

/// Conjugacy into H2 searched one prime-power part at a time and glued by CRT.
fn conjugate_into_by_parts(h1: &Subgroup, h2: &Subgroup, parts: &[u64]) -> Result<Option<Mat2>, GroupError> {
    let mut acc = conjugators(&h1.reduce(parts[0])?, &h2.reduce(parts[0])?);
    let mut m = parts[0];
    for (i, &q) in parts.iter().enumerate().skip(1) {
        let local = conjugators(&h1.reduce(q)?, &h2.reduce(q)?);
        m *= q;
        let last = i + 1 == parts.len();
        let (g1, g2) = if last {
            (h1.clone(), h2.clone())
        } else {
            (h1.reduce(m)?, h2.reduce(m)?)
        };
        let ok = |x: &Mat2| {
            let xi = x.inv().expect("CRT of invertible matrices");
            g1.generators.iter().all(|g| g2.contains(&x.mul_same(g).mul_same(&xi)))
        };
        let glue = |a: &Mat2, b: &Mat2| Mat2::crt_combine(a, b).expect("coprime parts");
        if last {
            return Ok(acc
                .par_iter()
                .find_map_first(|a| local.iter().map(|b| glue(a, b)).find(|x| ok(x))));
        }
        acc = acc
            .par_iter()
            .flat_map_iter(|a| local.iter().map(|b| glue(a, b)).filter(|x| ok(x)).collect::<Vec<_>>())
            .collect();
    }
    Ok(acc.into_iter().next())
}

/// Groups up to conjugacy in GL(2, Z/NZ): keeps the first representative of each class.
pub fn dedupe_conjugates(groups: Vec<Subgroup>) -> Result<Vec<Subgroup>, GroupError> {
    let mut reps: Vec<(Subgroup, Vec<u32>, Option<Fingerprint>)> = Vec::new();
    for g in groups {
        let det = g.det_image();
        let mut fp = None;
        let mut duplicate = false;
        for (r, rdet, rfp) in reps.iter_mut() {
            if r.order() != g.order() || *rdet != det {
                continue;
            }
            let gfp = fp.get_or_insert_with(|| g.fingerprint());
            let rf = rfp.get_or_insert_with(|| r.fingerprint());
            if rf != gfp {
                continue;
            }
            if Subgroup::conjugate_into(&g, r)?.is_some() {
                duplicate = true;
                break;
            }
        }
        if !duplicate {
            reps.push((g, det, fp));
        }
    }
    Ok(reps.into_iter().map(|(g, _, _)| g).collect())
}

/// Partition of a group into cosets of a normal subgroup.
pub(crate) struct CosetLabels {
    labels: KeyMap<u32>,
    pub(crate) reps: Vec<Mat2>,
}

impl CosetLabels {
    pub(crate) fn new(h: &Subgroup, k: &Subgroup) -> CosetLabels {
        let mut labels = KeyMap::default();
        labels.reserve(h.order());
        let mut reps = Vec::new();
        for x in h.elements.iter() {
            if labels.contains_key(&x.key()) {
                continue;
            }
            let c = reps.len() as u32;
            reps.push(*x);
            for y in k.elements.iter() {
                labels.insert(x.mul_same(y).key(), c);
            }
        }
        CosetLabels { labels, reps }
    }

    pub(crate) fn count(&self) -> usize {
        self.reps.len()
    }

    pub(crate) fn label_of(&self, x: &Mat2) -> usize {
        self.labels[&x.key()] as usize
    }
}

fn symmetric3() -> Vec<[u8; 3]> {
    vec![[0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]]
}

fn compose(p: &[u8; 3], q: &[u8; 3]) -> [u8; 3] {
    // apply p, then q
    [q[p[0] as usize], q[p[1] as usize], q[p[2] as usize]]
}

fn is_transitive(images: &[[u8; 3]]) -> bool {
    let mut seen = [true, false, false];
    let mut stack = vec![0u8];
    while let Some(x) = stack.pop() {
        for p in images {
            let y = p[x as usize];
            if !seen[y as usize] {
                seen[y as usize] = true;
                stack.push(y);
            }
        }
    }
    seen.iter().all(|&b| b)
}

/// Extends generator images to a map on the quotient; None if inconsistent.
fn pull_back(act: &[Vec<usize>], id: usize, choice: &[usize], s3: &[[u8; 3]]) -> Option<Vec<[u8; 3]>> {
    let q = act.len();
    let mut img: Vec<Option<[u8; 3]>> = vec![None; q];
    img[id] = Some([0, 1, 2]);
    let mut stack = vec![id];
    while let Some(c) = stack.pop() {
        let pc = img[c].unwrap();
        for (i, &t) in act[c].iter().enumerate() {
            let want = compose(&pc, &s3[choice[i]]);
            match img[t] {
                Some(existing) if existing != want => return None,
                Some(_) => {}
                None => {
                    img[t] = Some(want);
                    stack.push(t);
                }
            }
        }
    }
    Some(img.into_iter().map(|p| p.expect("quotient is connected")).collect())
}

fn commutator(a: &Mat2, b: &Mat2) -> Result<Mat2, Gl2Error> {
    Ok(a.inv()?.mul_same(&b.inv()?).mul_same(a).mul_same(b))
}

fn minus_id(n: u32) -> Mat2 {
    Mat2::minus_identity(n as u64).expect("valid modulus")
}

/// Generators of GL(2, Z/nZ).
pub fn gl2_generators(n: u64) -> Result<Vec<Mat2>, Gl2Error> {
    let mut gens = vec![Mat2::new(n, [1, 1, 0, 1])?, Mat2::new(n, [0, -1, 1, 0])?];
    for u in unit_generators(n) {
        gens.push(Mat2::new(n, [u as i64, 0, 0, 1])?);
    }
    Ok(gens)
}

/// Generators of the kernel of GL(2, Z/target) -> GL(2, Z/m).
pub fn kernel_generators(m: u64, target: u64) -> Result<Vec<Mat2>, Gl2Error> {
    if m == 0 || !target.is_multiple_of(m) {
        return Err(Gl2Error::NotADivisor(m as u32, target as u32));
    }
    let mut out = Vec::new();
    for (p, a) in factorize(target) {
        let pa = p.pow(a);
        let rest = target / pa;
        let embed = |x: Mat2| -> Result<Mat2, Gl2Error> { Mat2::crt_combine(&x, &Mat2::identity(rest)?) };
        let b = factorize(m).into_iter().find(|&(q, _)| q == p).map_or(0, |(_, e)| e);
        if b == 0 {
            for g in gl2_generators(pa)? {
                out.push(embed(g)?);
            }
        } else {
            for c in b..a {
                let s = p.pow(c) as i64;
                for e in [[1 + s, 0, 0, 1], [1, s, 0, 1], [1, 0, s, 1], [1, 0, 0, 1 + s]] {
                    out.push(embed(Mat2::new(pa, e)?)?);
                }
            }
        }
    }
    Ok(out)
}

fn two_power_classes(q: u64) -> Arc<KeySet> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<KeySet>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().expect("cache lock").get(&q) {
        return c.clone();
    }
    let gens = gl2_generators(q).expect("valid modulus");
    let conj: Vec<(Mat2, Mat2)> = gens.iter().map(|g| (*g, g.inv().expect("invertible"))).collect();
    let mut set = KeySet::default();
    let mut stack = Vec::new();
    for e in [[1, 0, 0, -1], [1, 1, 0, -1]] {
        let r = Mat2::new(q, e).expect("valid modulus");
        if set.insert(r.key()) {
            stack.push(r);
        }
    }
    while let Some(x) = stack.pop() {
        for (g, gi) in &conj {
            let y = g.mul_same(&x).mul_same(gi);
            if set.insert(y.key()) {
                stack.push(y);
            }
        }
    }
    let set = Arc::new(set);
    cache.lock().expect("cache lock").insert(q, set.clone());
    set
}

/// Whether `z` is GL2-conjugate to diag(1,-1) or [[1,1],[0,-1]] modulo `n`.
pub fn is_conjugation_like(z: &Mat2, n: u64) -> bool {
    if n == 1 {
        return true;
    }
    let is_two_part_ok = |q: u64| two_power_classes(q).contains(&z.reduce(q).expect("divisor").key());
    if n == 2 {
        return is_two_part_ok(2);
    }
    if z.det() as u64 != n - 1 || !z.mul_same(z).is_identity() {
        return false;
    }
    prime_power_parts(n).into_iter().all(|q| {
        if q % 2 == 0 {
            is_two_part_ok(q)
        } else {
            (z.trace() as u64).is_multiple_of(q)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: u64, e: [i64; 4]) -> Mat2 {
        Mat2::new(n, e).unwrap()
    }

    fn gen(n: u64, es: &[[i64; 4]]) -> Subgroup {
        Subgroup::generate(n, &es.iter().map(|e| m(n, *e)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn closures() {
        assert_eq!(gen(5, &[[1, 1, 0, 1]]).order(), 5);
        assert_eq!(Subgroup::full(3, DEFAULT_CAP).unwrap().order(), 48);
        assert_eq!(Subgroup::full(8, DEFAULT_CAP).unwrap().order(), 1536);
        assert_eq!(Subgroup::special(13, DEFAULT_CAP).unwrap().order(), 2184);
        let err = Subgroup::closure(7, &gl2_generators(7).unwrap(), 100).unwrap_err();
        assert!(matches!(err, GroupError::CapExceeded { cap: 100, .. }));
    }

    #[test]
    fn predicates() {
        let triv = Subgroup::generate(5, &[]).unwrap();
        assert!(!triv.contains_minus_id());
        let pm = gen(8, &[[-1, 0, 0, -1]]);
        assert!(pm.contains_minus_id());
        assert!(!pm.has_complex_conjugation());
        assert!(Subgroup::full(5, DEFAULT_CAP).unwrap().det_image_is_full());
        assert!(!Subgroup::special(5, DEFAULT_CAP).unwrap().det_image_is_full());
        assert!(gen(4, &[[1, 0, 0, -1]]).has_complex_conjugation());
        assert!(Subgroup::full(16, DEFAULT_CAP).unwrap().has_complex_conjugation());
        assert!(gen(4, &[[1, 1, 0, -1]]).has_complex_conjugation());
        // -Id mod 4 squares to Id with det 1, never a conjugation
        assert!(!gen(12, &[[-1, 0, 0, -1], [5, 0, 0, 5]]).has_complex_conjugation());
    }

    #[test]
    fn levels_and_preimages() {
        let g8 = Subgroup::full(8, DEFAULT_CAP).unwrap();
        assert_eq!(g8.level().unwrap(), 1);
        let ker = Subgroup::generate(2, &[]).unwrap().preimage(4, DEFAULT_CAP).unwrap();
        assert_eq!(ker.order(), 16);
        let full = Subgroup::full(2, DEFAULT_CAP)
            .unwrap()
            .preimage(4, DEFAULT_CAP)
            .unwrap();
        assert_eq!(full.order(), 96);
        assert_eq!(full.level().unwrap(), 1);
        let borel = gen(3, &[[1, 1, 0, 1], [2, 0, 0, 1], [1, 0, 0, 2]]);
        let lifted = borel.preimage(24, DEFAULT_CAP).unwrap();
        assert_eq!(lifted.index(), 4);
        assert_eq!(lifted.level().unwrap(), 3);
        let p = borel.preimage(9, DEFAULT_CAP).unwrap();
        assert_eq!(p.order(), 12 * 81);
    }

    #[test]
    fn products() {
        let a = Subgroup::full(2, DEFAULT_CAP).unwrap();
        let b = Subgroup::full(3, DEFAULT_CAP).unwrap();
        let p = Subgroup::product(&a, &b, DEFAULT_CAP).unwrap();
        assert_eq!(p.order(), 288);
        assert_eq!(p.level().unwrap(), 1);
        let borel = gen(3, &[[1, 1, 0, 1], [2, 0, 0, 1], [1, 0, 0, 2]]);
        let c = gen(2, &[[1, 1, 1, 0]]);
        let q = Subgroup::product(&c, &borel, DEFAULT_CAP).unwrap();
        assert_eq!(q.order(), 3 * 12);
        assert_eq!(q.reduce(3).unwrap().order(), 12);
        assert_eq!(q.reduce(2).unwrap().order(), 3);
    }

    #[test]
    fn conjugacy() {
        let up = gen(5, &[[1, 1, 0, 1]]);
        let low = gen(5, &[[1, 0, 1, 1]]);
        let x = Subgroup::are_conjugate(&up, &low).unwrap().unwrap();
        assert!(low.contains(&x.mul_same(&m(5, [1, 1, 0, 1])).mul_same(&x.inv().unwrap())));
        assert!(Subgroup::are_conjugate(&up, &up).unwrap().is_some());
        let diag = gen(5, &[[2, 0, 0, 1]]);
        let scal = gen(5, &[[2, 0, 0, 2]]);
        assert!(Subgroup::are_conjugate(&diag, &scal).unwrap().is_none());
    }

    #[test]
    fn low_index() {
        let c4 = gen(4, &[[1, 1, 0, 1]]);
        assert_eq!(c4.subgroups_of_index(2, DEFAULT_CAP).unwrap().len(), 1);
        let c9 = gen(9, &[[1, 1, 0, 1]]);
        assert_eq!(c9.subgroups_of_index(3, DEFAULT_CAP).unwrap().len(), 1);
        let g3 = Subgroup::full(3, DEFAULT_CAP).unwrap();
        assert_eq!(g3.subgroups_of_index(2, DEFAULT_CAP).unwrap().len(), 1);
        let g2 = Subgroup::full(2, DEFAULT_CAP).unwrap();
        assert_eq!(g2.subgroups_of_index(3, DEFAULT_CAP).unwrap().len(), 3);
        assert_eq!(g2.subgroups_of_index(2, DEFAULT_CAP).unwrap().len(), 1);
        assert!(matches!(
            g2.subgroups_of_index(5, DEFAULT_CAP),
            Err(GroupError::UnsupportedIndex(5))
        ));
    }

    #[test]
    fn twists() {
        let pm = gen(8, &[[-1, 0, 0, -1]]);
        let t = pm.quadratic_twists(DEFAULT_CAP).unwrap();
        let orders: Vec<usize> = t.iter().map(Subgroup::order).collect();
        assert_eq!(orders, vec![2, 1]);
        let h = gen(5, &[[2, 0, 0, 1], [1, 0, 0, 2], [1, 1, 0, 1]]);
        let ts = h.quadratic_twists(DEFAULT_CAP).unwrap();
        assert!(ts.iter().any(|k| k.order() == h.order() && h.is_subgroup_of(k)));
        for k in &ts {
            assert_eq!(k.with_minus_id(DEFAULT_CAP).unwrap().order(), h.order());
        }
        assert!(gen(2, &[]).quadratic_twists(DEFAULT_CAP).is_err());
    }
}
