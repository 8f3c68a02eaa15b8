//! Index, genus and admissibility of the modular curve attached to a subgroup.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::arith::{divisors, factorize, phi, unit_generators};
use crate::mat2::{Gl2Error, Mat2};
use crate::subgroup::{GroupError, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("genus formula not integral: d={d} e2={e2} e3={e3} c={c}")]
    Integrality { d: usize, e2: usize, e3: usize, c: usize },
    #[error("malformed label {0:?}")]
    Label(String),
}

impl From<Gl2Error> for InvariantError {
    fn from(e: Gl2Error) -> Self {
        InvariantError::Group(e.into())
    }
}

/// Permutations induced by S, R and T on the right cosets of H ∩ SL2 in SL2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetAction {
    pub s: Vec<u32>,
    pub r: Vec<u32>,
    pub t: Vec<u32>,
}

impl CosetAction {
    pub fn degree(&self) -> usize {
        self.t.len()
    }

    pub fn fixed_points(perm: &[u32]) -> usize {
        perm.iter().enumerate().filter(|(i, &p)| *i as u32 == p).count()
    }

    pub fn cycle_count(perm: &[u32]) -> usize {
        let mut seen = vec![false; perm.len()];
        let mut cycles = 0;
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = perm[x] as usize;
            }
        }
        cycles
    }

    /// Action on pairs of cosets, for a direct product of groups of coprime levels.
    pub fn product(a: &CosetAction, b: &CosetAction) -> CosetAction {
        let db = b.degree() as u32;
        let pair = |pa: &[u32], pb: &[u32]| -> Vec<u32> {
            pa.iter().flat_map(|&x| pb.iter().map(move |&y| x * db + y)).collect()
        };
        CosetAction {
            s: pair(&a.s, &b.s),
            r: pair(&a.r, &b.r),
            t: pair(&a.t, &b.t),
        }
    }
}

/// Level, index, genus and admissibility of X_H, with the ramification counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveInvariants {
    pub level: u64,
    pub index: u64,
    pub genus: u64,
    pub admissible: bool,
    pub nu2: usize,
    pub nu3: usize,
    pub cusps: usize,
}

impl CurveInvariants {
    pub fn compute(h: &Subgroup) -> Result<CurveInvariants, InvariantError> {
        let action = coset_action(h)?;
        let (genus, nu2, nu3, cusps) = genus_from_action(&action)?;
        Ok(CurveInvariants {
            level: h.level()?,
            index: action.degree() as u64,
            genus,
            admissible: is_admissible(h),
            nu2,
            nu3,
            cusps,
        })
    }

    /// Invariants of the direct product of groups of pairwise coprime levels, without forming it.
    pub fn of_product(factors: &[&Subgroup]) -> Result<CurveInvariants, InvariantError> {
        let (first, rest) = factors
            .split_first()
            .ok_or_else(|| InvariantError::Precondition("empty product".into()))?;
        let mut action = coset_action(first)?;
        let mut level = first.level()?;
        for h in rest {
            let l = h.level()?;
            if num_integer::gcd(level, l) != 1 {
                return Err(InvariantError::Precondition(format!(
                    "levels {level} and {l} are not coprime"
                )));
            }
            action = CosetAction::product(&action, &coset_action(h)?);
            level *= l;
        }
        let (genus, nu2, nu3, cusps) = genus_from_action(&action)?;
        Ok(CurveInvariants {
            level,
            index: action.degree() as u64,
            genus,
            admissible: factors.iter().all(|h| is_admissible(h)),
            nu2,
            nu3,
            cusps,
        })
    }

    pub fn triple(&self) -> (u64, u64, u64) {
        (self.level, self.index, self.genus)
    }
}

/// Conjunction of the three admissibility conditions.
pub fn is_admissible(h: &Subgroup) -> bool {
    h.contains_minus_id() && h.det_image_is_full() && h.has_complex_conjugation()
}

/// Enumerates right cosets of H ∩ SL2 in SL2(Z/NZ) on the Schreier graph of S and T.
pub fn coset_action(h: &Subgroup) -> Result<CosetAction, InvariantError> {
    Ok(coset_table(h)?.1)
}

/// Coset representatives together with the induced permutations.
pub(crate) fn coset_table(h: &Subgroup) -> Result<(Vec<Mat2>, CosetAction), InvariantError> {
    if !h.contains_minus_id() {
        return Err(InvariantError::Precondition("-Id is not in H".into()));
    }
    if !h.det_image_is_full() {
        return Err(InvariantError::Precondition("det image is not full".into()));
    }
    let n = h.modulus();
    let s = Mat2::new(n, [0, -1, 1, 0])?;
    let r = Mat2::new(n, [0, -1, 1, -1])?;
    let t = Mat2::new(n, [1, 1, 0, 1])?;
    let expected = h.index() as usize;
    let mut reps = vec![Mat2::identity(n)?];
    let mut inv_reps = vec![Mat2::identity(n)?];
    let find = |reps_inv: &[Mat2], y: &Mat2| -> Option<usize> {
        reps_inv
            .iter()
            .position(|ri| h.contains(&y.mul(ri).expect("same modulus")))
    };
    let mut i = 0;
    while i < reps.len() {
        for g in [&s, &t] {
            let y = reps[i].mul(g)?;
            if find(&inv_reps, &y).is_none() {
                inv_reps.push(y.inv()?);
                reps.push(y);
            }
        }
        i += 1;
    }
    if reps.len() != expected {
        return Err(InvariantError::Precondition(format!(
            "coset count {} differs from index {expected}",
            reps.len()
        )));
    }
    let perm_of = |g: &Mat2| -> Result<Vec<u32>, InvariantError> {
        reps.iter()
            .map(|x| {
                let y = x.mul(g)?;
                find(&inv_reps, &y)
                    .map(|j| j as u32)
                    .ok_or_else(|| InvariantError::Precondition("coset table not closed".into()))
            })
            .collect()
    };
    let action = CosetAction {
        s: perm_of(&s)?,
        r: perm_of(&r)?,
        t: perm_of(&t)?,
    };
    Ok((reps, action))
}

/// (genus, nu2, nu3, cusps) from the coset permutations.
pub fn genus_from_action(a: &CosetAction) -> Result<(u64, usize, usize, usize), InvariantError> {
    let d = a.degree();
    let e2 = CosetAction::fixed_points(&a.s);
    let e3 = CosetAction::fixed_points(&a.r);
    let c = CosetAction::cycle_count(&a.t);
    let twelve_g = 12 + d as i64 - 3 * e2 as i64 - 4 * e3 as i64 - 6 * c as i64;
    if twelve_g < 0 || twelve_g % 12 != 0 {
        return Err(InvariantError::Integrality { d, e2, e3, c });
    }
    Ok(((twelve_g / 12) as u64, e2, e3, c))
}

pub fn genus(h: &Subgroup) -> Result<u64, InvariantError> {
    Ok(genus_from_action(&coset_action(h)?)?.0)
}

/// Preimage of the upper-triangular Borel subgroup mod n.
pub fn borel(n: u64) -> Result<Subgroup, GroupError> {
    let mut gens = vec![Mat2::new(n, [1, 1, 0, 1])?];
    for u in unit_generators(n) {
        gens.push(Mat2::new(n, [u as i64, 0, 0, 1])?);
        gens.push(Mat2::new(n, [1, 0, 0, u as i64])?);
    }
    Subgroup::generate(n, &gens)
}

/// Genus of X0(N) from the closed-form index, elliptic point and cusp counts.
pub fn x0_genus_oracle(n: u64) -> u64 {
    let fac = factorize(n);
    let mu: u64 = fac.iter().fold(n, |acc, &(p, _)| acc / p * (p + 1));
    let nu2: u64 = if n.is_multiple_of(4) {
        0
    } else {
        fac.iter()
            .map(|&(p, _)| {
                if p == 2 {
                    1
                } else if p % 4 == 1 {
                    2
                } else {
                    0
                }
            })
            .product()
    };
    let nu3: u64 = if n.is_multiple_of(9) {
        0
    } else {
        fac.iter()
            .map(|&(p, _)| {
                if p == 3 {
                    1
                } else if p % 3 == 1 {
                    2
                } else {
                    0
                }
            })
            .product()
    };
    let cusps: u64 = divisors(n).into_iter().map(|d| phi(num_integer::gcd(d, n / d))).sum();
    let twelve_g = 12 + mu as i64 - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * cusps as i64;
    (twelve_g / 12) as u64
}

/// A modular curve label `N.i.g.n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub level: u64,
    pub index: u64,
    pub genus: u64,
    pub ordinal: u64,
}

impl FromStr for Label {
    type Err = InvariantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<u64> = s
            .split('.')
            .map(|p| p.parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|_| InvariantError::Label(s.to_string()))?;
        match parts[..] {
            [level, index, genus, ordinal] => Ok(Label {
                level,
                index,
                genus,
                ordinal,
            }),
            _ => Err(InvariantError::Label(s.to_string())),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}.{}", self.level, self.index, self.genus, self.ordinal)
    }
}

/// Outcome of comparing a label with the invariants of its group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelReport {
    pub label: String,
    pub computed: Option<(u64, u64, u64)>,
    pub pass: bool,
    pub note: Option<String>,
}

impl fmt::Display for LabelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let computed = match self.computed {
            Some((n, i, g)) => format!("{n}.{i}.{g}"),
            None => "?".to_string(),
        };
        let status = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{} computed={} status={}", self.label, computed, status)?;
        if let Some(note) = &self.note {
            write!(f, " ({note})")?;
        }
        Ok(())
    }
}

/// Compares level, index and genus of `h` with the first three label fields.
///
/// Names that are not of the form `N.i.g.n` only need their invariants to be computable.
pub fn label_check(label: &str, h: &Subgroup) -> LabelReport {
    let computed = CurveInvariants::compute(h).map(|inv| inv.triple());
    match (computed, label.parse::<Label>()) {
        (Err(e), _) => LabelReport {
            label: label.to_string(),
            computed: None,
            pass: false,
            note: Some(e.to_string()),
        },
        (Ok(t), Ok(l)) => LabelReport {
            label: label.to_string(),
            computed: Some(t),
            pass: t == (l.level, l.index, l.genus),
            note: None,
        },
        (Ok(t), Err(_)) => LabelReport {
            label: label.to_string(),
            computed: Some(t),
            pass: true,
            note: Some("unlabeled".into()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgroup::DEFAULT_CAP;

    #[test]
    fn trivial_level() {
        let g = Subgroup::full(2, DEFAULT_CAP).unwrap();
        let a = coset_action(&g).unwrap();
        assert_eq!(a.degree(), 1);
        for n in 2..=16 {
            assert_eq!(genus(&Subgroup::full(n, DEFAULT_CAP).unwrap()).unwrap(), 0, "n={n}");
        }
    }

    #[test]
    fn borel_eleven() {
        let b = borel(11).unwrap();
        let a = coset_action(&b).unwrap();
        assert_eq!(a.degree(), 12);
        let inv = CurveInvariants::compute(&b).unwrap();
        assert_eq!(inv.triple(), (11, 12, 1));
        assert_eq!((inv.nu2, inv.nu3, inv.cusps), (0, 0, 2));
        // S^2 = -Id acts trivially
        let s2: Vec<u32> = a.s.iter().map(|&i| a.s[i as usize]).collect();
        assert!(s2.iter().enumerate().all(|(i, &j)| i as u32 == j));
    }

    #[test]
    fn oracle_values() {
        assert_eq!(x0_genus_oracle(1), 0);
        assert_eq!(x0_genus_oracle(11), 1);
        assert_eq!(x0_genus_oracle(21), 1);
        assert_eq!(x0_genus_oracle(37), 2);
        assert_eq!(x0_genus_oracle(50), 2);
    }

    #[test]
    fn preconditions() {
        let sl = Subgroup::special(5, DEFAULT_CAP).unwrap();
        assert!(matches!(coset_action(&sl), Err(InvariantError::Precondition(_))));
        assert!(!is_admissible(&sl));
        assert!(is_admissible(&Subgroup::full(16, DEFAULT_CAP).unwrap()));
    }

    #[test]
    fn labels() {
        let l: Label = "15.15.1.1".parse().unwrap();
        assert_eq!((l.level, l.index, l.genus, l.ordinal), (15, 15, 1, 1));
        assert!("15.15.1".parse::<Label>().is_err());
        let b = borel(11).unwrap();
        assert!(label_check("11.12.1.1", &b).pass);
        let bad = label_check("11.12.0.1", &b);
        assert!(!bad.pass);
        assert_eq!(bad.to_string(), "11.12.0.1 computed=11.12.1 status=FAIL");
    }

    #[test]
    fn product_invariants_match_the_formed_product() {
        let b3 = borel(3).unwrap();
        let b7 = borel(7).unwrap();
        let formed = Subgroup::product(&b3, &b7, DEFAULT_CAP).unwrap();
        let direct = CurveInvariants::of_product(&[&b3, &b7]).unwrap();
        assert_eq!(direct, CurveInvariants::compute(&formed).unwrap());
        assert_eq!(direct.triple(), (21, 32, 1));
        let b9 = borel(9).unwrap();
        assert!(CurveInvariants::of_product(&[&b3, &b9]).is_err());
    }
}
