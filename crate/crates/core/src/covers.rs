//! Proper admissible subgroups of a genus-one group whose modular curve is also of genus one.
//!
//! A subgroup K of H with X_H of genus one has genus one exactly when X_K -> X_H is unramified.
//! Unramified covers of a genus-one curve are abelian, and K ∩ SL2 is normal in H whenever K has
//! full determinant, so every such K contains the normal subgroup V of H generated by -Id, the
//! cusp and elliptic stabilizers of Γ_H = H ∩ SL2, and the commutator subgroup of Γ_H. Conversely
//! every subgroup containing V gives an unramified cover. The search therefore runs in H/V.

use std::collections::HashSet;

use crate::arith::unit_generators;
use crate::invariants::{coset_table, CosetAction, InvariantError};
use crate::mat2::Mat2;
use crate::subgroup::{is_conjugation_like, CosetLabels, Subgroup};

/// Outcome of the search for genus-one proper admissible subgroups.
#[derive(Debug, Clone)]
pub struct CoverSearch {
    /// Order of H/V.
    pub quotient_order: usize,
    /// A proper admissible subgroup of genus one, if one exists.
    pub witness: Option<Subgroup>,
}

/// Searches for a proper admissible subgroup of `h` of genus one.
///
/// Requires `h` admissible of genus one.
pub fn genus_one_subgroup(h: &Subgroup, cap: usize) -> Result<CoverSearch, InvariantError> {
    if !crate::invariants::is_admissible(h) {
        return Err(InvariantError::Precondition("group is not admissible".into()));
    }
    let n = h.modulus();
    let (reps, action) = coset_table(h)?;
    let (genus, ..) = crate::invariants::genus_from_action(&action)?;
    if genus != 1 {
        return Err(InvariantError::Precondition(format!("genus is {genus}, expected 1")));
    }
    let seeds = ramification_elements(n, &reps, &action)?;
    let mut v = h.normal_closure(&seeds, cap)?;
    let schreier = schreier_generators(n, &reps, &action)?;
    for (i, a) in schreier.iter().enumerate() {
        for b in &schreier[i + 1..] {
            let c = a.inv()?.mul(&b.inv()?)?.mul(a)?.mul(b)?;
            if !v.contains(&c) {
                let mut gens = v.generators().to_vec();
                gens.push(c);
                v = h.normal_closure(&gens, cap)?;
            }
        }
    }
    let cosets = CosetLabels::new(h, &v);
    let q = cosets.count();
    let table: Vec<Vec<usize>> = (0..q)
        .map(|a| {
            (0..q)
                .map(|b| cosets.label_of(&cosets.reps[a].mul(&cosets.reps[b]).expect("same modulus")))
                .collect()
        })
        .collect();
    let one = 1 % n as u32;
    let identity = cosets.label_of(&Mat2::identity(n)?);
    let kernel: Vec<usize> = (0..q).filter(|&a| cosets.reps[a].det() == one).collect();
    let mut det_lifts = Vec::new();
    for u in unit_generators(n) {
        let lift = (0..q)
            .find(|&a| cosets.reps[a].det() as u64 == u % n)
            .ok_or_else(|| InvariantError::Precondition("determinant not surjective".into()))?;
        det_lifts.push(lift);
    }
    let mut conj: Vec<usize> = Vec::new();
    let mut seen = vec![false; q];
    for x in h.elements() {
        if is_conjugation_like(x, n) {
            let c = cosets.label_of(x);
            if !seen[c] {
                seen[c] = true;
                conj.push(c);
            }
        }
    }
    let closure_size = |gens: &[usize]| -> Vec<usize> {
        let mut inside = vec![false; q];
        inside[identity] = true;
        let mut members = vec![identity];
        let mut i = 0;
        while i < members.len() {
            for &g in gens {
                let y = table[members[i]][g];
                if !inside[y] {
                    inside[y] = true;
                    members.push(y);
                }
            }
            i += 1;
        }
        members
    };
    let s = det_lifts.len();
    let k = kernel.len();
    let total = k.checked_pow(s as u32).unwrap_or(usize::MAX);
    let mut tried: HashSet<Vec<usize>> = HashSet::new();
    for &c in &conj {
        for code in 0..total {
            let mut gens = vec![c];
            let mut r = code;
            for &d in &det_lifts {
                gens.push(table[d][kernel[r % k]]);
                r /= k;
            }
            let mut key = gens.clone();
            key.sort_unstable();
            if !tried.insert(key) {
                continue;
            }
            let members = closure_size(&gens);
            if members.len() < q {
                let mut out: Vec<Mat2> = v.generators().to_vec();
                out.extend(gens.iter().map(|&g| cosets.reps[g]));
                let witness = Subgroup::closure(n, &out, cap)?;
                return Ok(CoverSearch {
                    quotient_order: q,
                    witness: Some(witness),
                });
            }
        }
    }
    Ok(CoverSearch {
        quotient_order: q,
        witness: None,
    })
}

/// Stabilizers of cusps and elliptic points, conjugated back into Γ_H, together with -Id.
fn ramification_elements(n: u64, reps: &[Mat2], a: &CosetAction) -> Result<Vec<Mat2>, InvariantError> {
    let s = Mat2::new(n, [0, -1, 1, 0])?;
    let r = Mat2::new(n, [0, -1, 1, -1])?;
    let t = Mat2::new(n, [1, 1, 0, 1])?;
    let mut out = vec![Mat2::minus_identity(n)?];
    for (i, g) in reps.iter().enumerate() {
        let gi = g.inv()?;
        if a.s[i] as usize == i {
            out.push(g.mul(&s)?.mul(&gi)?);
        }
        if a.r[i] as usize == i {
            out.push(g.mul(&r)?.mul(&gi)?);
        }
    }
    let mut seen = vec![false; reps.len()];
    for start in 0..reps.len() {
        if seen[start] {
            continue;
        }
        let mut width = 0u64;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = a.t[x] as usize;
            width += 1;
        }
        let g = &reps[start];
        out.push(g.mul(&t.pow(width))?.mul(&g.inv()?)?);
    }
    Ok(out)
}

/// Schreier generators of Γ_H from the coset table on S and T.
fn schreier_generators(n: u64, reps: &[Mat2], a: &CosetAction) -> Result<Vec<Mat2>, InvariantError> {
    let s = Mat2::new(n, [0, -1, 1, 0])?;
    let t = Mat2::new(n, [1, 1, 0, 1])?;
    let mut out: Vec<Mat2> = Vec::new();
    for (i, g) in reps.iter().enumerate() {
        for (y, perm) in [(&s, &a.s), (&t, &a.t)] {
            let j = perm[i] as usize;
            let z = g.mul(y)?.mul(&reps[j].inv()?)?;
            if !z.is_identity() && !out.contains(&z) {
                out.push(z);
            }
        }
    }
    Ok(out)
}
