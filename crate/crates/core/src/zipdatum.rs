//! Zip data (types I and J, frame element z, twist γⁿ) and flagged zip data.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::CocharVec;
use crate::rootsystem::{RootDatum, VectorSide};
use crate::subset::SimpleSet;
use crate::weyl::WeylElt;

/// How the type of P is given to [`zip_from_cochar`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeSpec {
    Subset(SimpleSet),
    /// An anti-dominant cocharacter μ; I = {α ∈ Δ : ⟨α, μ⟩ = 0}.
    Cocharacter(CocharVec),
}

#[derive(Clone, Debug)]
pub struct ZipDatum {
    rd: Arc<RootDatum>,
    n: u32,
    p: u64,
    q: BigInt,
    i: SimpleSet,
    j: SimpleSet,
    z: WeylElt,
    /// Type of the parabolic whose opposite, twisted by φⁿ, gives the
    /// unipotent radical of Q (set for data coming from a cocharacter and
    /// for their flagged descendants).
    opposite_of: Option<SimpleSet>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameViolation {
    /// z(α) < 0 for a simple root α ∈ J, so z ∉ Wᴶ.
    NotMinimalInJ { simple: usize },
    /// z⁻¹(β) has the wrong sign for a root β ∈ Φ_{γⁿ(I)}.
    LeviBorelMismatch { root: Vec<i64> },
    /// z⁻¹(γⁿ(α)) is not a simple root of J for some α ∈ I, or |I| ≠ |J|.
    TypeMismatch { detail: String },
    /// z(β) is not a root of Q for some β ∈ Φ⁺, so ᶻB ⊄ Q.
    BorelNotInQ { root: Vec<i64> },
}

impl fmt::Display for FrameViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameViolation::NotMinimalInJ { simple } => {
                write!(f, "z ∉ Wᴶ: z(α{}) is negative", simple + 1)
            }
            FrameViolation::LeviBorelMismatch { root } => {
                write!(
                    f,
                    "frame axiom fails: z(Φ⁺) ∩ Φ_γⁿ(I) ≠ Φ⁺_γⁿ(I) at root {root:?}"
                )
            }
            FrameViolation::TypeMismatch { detail } => write!(f, "z⁻¹(γⁿ(I)) ≠ J: {detail}"),
            FrameViolation::BorelNotInQ { root } => {
                write!(
                    f,
                    "frame axiom fails: ᶻB ⊄ Q, z maps a positive root to {root:?}"
                )
            }
        }
    }
}

/// Dimension bookkeeping for a datum and a sub-type I0 ⊂ I.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimReport {
    pub dim_g: i64,
    pub dim_b: i64,
    pub dim_p: i64,
    pub dim_p0: i64,
    pub dim_p_over_p0: i64,
    pub dim_e: i64,
    pub dim_e_z0: i64,
    pub dim_e_hat_p0: i64,
    pub dim_m_cap_v0: i64,
    pub dim_l_over_p0l: i64,
}

#[derive(Clone, Debug)]
pub struct FlaggedZipDatum {
    pub base: ZipDatum,
    pub i0: SimpleSet,
    pub j0: SimpleSet,
    pub z0: ZipDatum,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Writes q = pⁿ with p prime.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut r, mut n) = (q, 0);
    while r % p == 0 {
        r /= p;
        n += 1;
    }
    (r == 1).then_some((p, n))
}

/// −w₀(K), the opposition involution applied to a set of simple roots.
pub fn opposition(rd: &RootDatum, k: SimpleSet) -> SimpleSet {
    let w0 = rd.longest();
    SimpleSet::from_indices(k.iter().map(|i| {
        let v: Vec<i64> = w0
            .act(&rd.simple_roots()[i], VectorSide::Character)
            .iter()
            .map(|x| -x)
            .collect();
        (0..rd.num_simple())
            .find(|&j| rd.simple_roots()[j].0 == v)
            .expect("opposition preserves Δ")
    }))
}

/// Zip datum attached to a cocharacter: J = −w₀(γⁿ(I)), z = w₀ w_{0,J}.
pub fn zip_from_cochar(rd: Arc<RootDatum>, ty: &TypeSpec, n: u32, p: u64) -> Result<ZipDatum> {
    let i = match ty {
        TypeSpec::Subset(s) => {
            if !s.is_subset(rd.all_simple()) {
                return Err(Error::NotSubset {
                    sub: s.to_string(),
                    sup: rd.all_simple().to_string(),
                });
            }
            *s
        }
        TypeSpec::Cocharacter(mu) => {
            rd.check_rank(mu.len())?;
            let mut s = SimpleSet::EMPTY;
            for (k, a) in rd.simple_roots().iter().enumerate() {
                let v = crate::lattice::dot(a, mu);
                if v > 0 {
                    return Err(Error::NotAntiDominant {
                        index: k + 1,
                        value: v,
                    });
                }
                if v == 0 {
                    s.insert(k);
                }
            }
            s
        }
    };
    check_np(n, p)?;
    let j = opposition(&rd, rd.galois_subset(n as i64, i));
    let z = rd.compose(&rd.longest(), &rd.longest_element(j));
    let zd = ZipDatum {
        q: BigInt::from(p).pow(n),
        rd,
        n,
        p,
        i,
        j,
        z,
        opposite_of: Some(i),
    };
    let bad = zd.validate_frame();
    if !bad.is_empty() {
        return Err(Error::InvalidFrame(
            bad.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    Ok(zd)
}

fn check_np(n: u32, p: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::BadExponent);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

impl ZipDatum {
    /// A datum given by its shadow directly; accepted iff the frame axioms hold.
    pub fn new(
        rd: Arc<RootDatum>,
        n: u32,
        p: u64,
        i: SimpleSet,
        j: SimpleSet,
        z: WeylElt,
    ) -> Result<ZipDatum> {
        check_np(n, p)?;
        for s in [i, j] {
            if !s.is_subset(rd.all_simple()) {
                return Err(Error::NotSubset {
                    sub: s.to_string(),
                    sup: rd.all_simple().to_string(),
                });
            }
        }
        let zd = ZipDatum {
            q: BigInt::from(p).pow(n),
            rd,
            n,
            p,
            i,
            j,
            z,
            opposite_of: None,
        };
        let bad = zd.validate_frame();
        if !bad.is_empty() {
            return Err(Error::InvalidFrame(
                bad.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            ));
        }
        Ok(zd)
    }

    /// Same datum with another frame element, not validated.
    pub fn with_frame_unchecked(&self, z: WeylElt) -> ZipDatum {
        ZipDatum { z, ..self.clone() }
    }

    /// Same datum with another prime.
    pub fn with_prime(&self, p: u64) -> Result<ZipDatum> {
        check_np(self.n, p)?;
        Ok(ZipDatum {
            p,
            q: BigInt::from(p).pow(self.n),
            ..self.clone()
        })
    }

    pub fn rd(&self) -> &RootDatum {
        &self.rd
    }

    pub fn rd_arc(&self) -> &Arc<RootDatum> {
        &self.rd
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn i(&self) -> SimpleSet {
        self.i
    }

    pub fn j(&self) -> SimpleSet {
        self.j
    }

    pub fn z(&self) -> &WeylElt {
        &self.z
    }

    pub fn opposite_of(&self) -> Option<SimpleSet> {
        self.opposite_of
    }

    /// γⁿ applied to a set of simple roots.
    pub fn twist_subset(&self, k: SimpleSet) -> SimpleSet {
        self.rd.galois_subset(self.n as i64, k)
    }

    /// ψ(u) = z⁻¹ γⁿ(u) z, the Frobenius conjugation transported through the frame.
    pub fn psi(&self, u: &WeylElt) -> WeylElt {
        let rd = &self.rd;
        let g = rd.galois_conjugate(self.n as i64, u);
        rd.compose(&rd.compose(&rd.inverse(&self.z), &g), &self.z)
    }

    pub fn validate_frame(&self) -> Vec<FrameViolation> {
        let rd = &*self.rd;
        let mut out = Vec::new();
        for a in self.j.iter() {
            if rd.is_right_descent(&self.z, a) {
                out.push(FrameViolation::NotMinimalInJ { simple: a });
            }
        }
        let gi = self.twist_subset(self.i);
        for k in 0..rd.roots().len() {
            if rd.root_in(k, gi) {
                let pre = self
                    .z
                    .act_inverse(&rd.root(k).vector, VectorSide::Character);
                if rd.is_positive_vector(&pre) != rd.is_positive(k) {
                    out.push(FrameViolation::LeviBorelMismatch {
                        root: rd.root(k).vector.0.clone(),
                    });
                }
            }
        }
        if self.i.len() != self.j.len() {
            out.push(FrameViolation::TypeMismatch {
                detail: format!("|I| = {}, |J| = {}", self.i.len(), self.j.len()),
            });
        }
        for a in gi.iter() {
            let pre = self
                .z
                .act_inverse(&rd.simple_roots()[a], VectorSide::Character);
            match (0..rd.num_simple()).find(|&b| rd.simple_roots()[b].0 == pre) {
                Some(b) if self.j.contains(b) => {}
                _ => out.push(FrameViolation::TypeMismatch {
                    detail: format!("z⁻¹(α{}) = {:?} is not a simple root of J", a + 1, pre),
                }),
            }
        }
        if let Some(orig) = self.opposite_of {
            let g_orig = self.twist_subset(orig);
            for r in rd.positive_roots() {
                let img = self.z.act(&r.vector, VectorSide::Character);
                let x = rd.root_index(&img).expect("Weyl elements permute roots");
                let in_q = rd.root_in(x, gi) || (rd.is_positive(x) == rd.root_in(x, g_orig));
                if !in_q {
                    out.push(FrameViolation::BorelNotInQ { root: img });
                }
            }
        }
        out
    }

    /// The flagged datum for a sub-type I0 ⊂ I, with J0 = z⁻¹(γⁿ(I0)).
    pub fn flag_datum(&self, i0: SimpleSet) -> Result<FlaggedZipDatum> {
        if !i0.is_subset(self.i) {
            return Err(Error::NotSubset {
                sub: i0.to_string(),
                sup: self.i.to_string(),
            });
        }
        let rd = &*self.rd;
        let mut j0 = SimpleSet::EMPTY;
        for a in self.twist_subset(i0).iter() {
            let pre = self
                .z
                .act_inverse(&rd.simple_roots()[a], VectorSide::Character);
            match (0..rd.num_simple()).find(|&b| rd.simple_roots()[b].0 == pre) {
                Some(b) => j0.insert(b),
                None => {
                    return Err(Error::Convention(format!(
                        "z⁻¹(γⁿ(α{})) is not a simple root",
                        a + 1
                    )));
                }
            }
        }
        let z0 = ZipDatum {
            i: i0,
            j: j0,
            ..self.clone()
        };
        let bad = z0.validate_frame();
        if !bad.is_empty() {
            return Err(Error::Convention(format!(
                "induced datum fails the frame axioms: {}",
                bad.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            )));
        }
        Ok(FlaggedZipDatum {
            base: self.clone(),
            i0,
            j0,
            z0,
        })
    }

    pub fn dims(&self) -> DimReport {
        dim_report(self, self.i, self.j)
    }

    /// Structural equality of the shadows (root datum compared by identity).
    pub fn same_shadow(&self, other: &ZipDatum) -> bool {
        Arc::ptr_eq(&self.rd, &other.rd)
            && self.n == other.n
            && self.p == other.p
            && self.i == other.i
            && self.j == other.j
            && self.z == other.z
            && self.opposite_of == other.opposite_of
    }
}

impl FlaggedZipDatum {
    pub fn dims(&self) -> DimReport {
        dim_report(&self.base, self.i0, self.j0)
    }
}

fn dim_report(z: &ZipDatum, i0: SimpleSet, j0: SimpleSet) -> DimReport {
    let rd = z.rd();
    let rank = rd.rank() as i64;
    let npos = rd.num_positive() as i64;
    let pi = rd.count_positive_in(z.i()) as i64;
    let pj = rd.count_positive_in(z.j()) as i64;
    let pi0 = rd.count_positive_in(i0) as i64;
    let pj0 = rd.count_positive_in(j0) as i64;
    let dim_g = rank + 2 * npos;
    let dim_b = rank + npos;
    let dim_p = dim_b + pi;
    let dim_p0 = dim_b + pi0;
    DimReport {
        dim_g,
        dim_b,
        dim_p,
        dim_p0,
        dim_p_over_p0: pi - pi0,
        dim_e: dim_p + (npos - pj),
        dim_e_z0: dim_p0 + (npos - pj0),
        dim_e_hat_p0: dim_p0 + (npos - pj),
        dim_m_cap_v0: pj - pj0,
        dim_l_over_p0l: pi - pi0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsystem::{build_root_datum, DatumSpec};

    fn c3() -> ZipDatum {
        let rd = Arc::new(RootDatum::preset("C3").unwrap());
        zip_from_cochar(rd, &TypeSpec::Subset(SimpleSet::from_indices([0, 2])), 1, 2).unwrap()
    }

    #[test]
    fn c3_frame() {
        let z = c3();
        assert_eq!(z.rd().to_bracket(z.z()).unwrap(), "[563]");
        assert_eq!(z.j(), SimpleSet::from_indices([0, 2]));
        assert!(z.validate_frame().is_empty());
    }

    #[test]
    fn c3_identity_frame_rejected() {
        let z = c3();
        let bad = z.with_frame_unchecked(z.rd().identity());
        let v = bad.validate_frame();
        assert!(
            v.iter()
                .any(|x| matches!(x, FrameViolation::BorelNotInQ { .. })),
            "{v:?}"
        );
    }

    #[test]
    fn regular_gl4() {
        let rd = Arc::new(RootDatum::preset("GL4").unwrap());
        let z = zip_from_cochar(
            rd.clone(),
            &TypeSpec::Cocharacter(CocharVec(vec![0, 1, 2, 3])),
            1,
            3,
        )
        .unwrap();
        assert!(z.i().is_empty() && z.j().is_empty());
        assert_eq!(z.z(), &rd.longest());
        let err = zip_from_cochar(
            rd,
            &TypeSpec::Cocharacter(CocharVec(vec![1, 0, 0, 0])),
            1,
            3,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotAntiDominant { .. }));
    }

    #[test]
    fn twisted_a3() {
        let rd = Arc::new(
            build_root_datum(&DatumSpec::preset_with_galois("A3", vec![2, 1, 0], 2)).unwrap(),
        );
        let z = zip_from_cochar(rd, &TypeSpec::Subset(SimpleSet::from_indices([0])), 1, 5).unwrap();
        assert_eq!(z.j(), SimpleSet::from_indices([0]));
    }

    #[test]
    fn hand_built_datum_accepted_by_axioms() {
        // Q = P and z = e satisfy the axioms when nothing forces Q opposite to P.
        let rd = Arc::new(RootDatum::preset("C3").unwrap());
        let i = SimpleSet::from_indices([0]);
        let ok = ZipDatum::new(rd.clone(), 1, 2, i, i, rd.identity());
        assert!(ok.is_ok());
        // J differs from the cocharacter recipe (which gives J = I here) yet is valid.
        let z = rd.parse_label("[132]").unwrap();
        let zd = ZipDatum::new(
            rd.clone(),
            1,
            2,
            SimpleSet::from_indices([1]),
            SimpleSet::from_indices([1]),
            z,
        );
        assert!(zd.is_err());
        let w0 = rd.longest();
        assert!(ZipDatum::new(rd, 1, 4, i, i, w0).is_err());
    }

    #[test]
    fn flag_data() {
        let z = c3();
        let f = z.flag_datum(SimpleSet::from_indices([0])).unwrap();
        assert_eq!(f.j0, SimpleSet::from_indices([0]));
        let f = z.flag_datum(SimpleSet::EMPTY).unwrap();
        assert!(f.j0.is_empty());
        let f = z.flag_datum(z.i()).unwrap();
        assert_eq!(f.j0, z.j());
        assert!(z.flag_datum(SimpleSet::from_indices([1])).is_err());
    }

    #[test]
    fn c3_dims() {
        let d = c3().dims();
        assert_eq!((d.dim_g, d.dim_b, d.dim_p), (21, 12, 14));
        let f = c3().flag_datum(SimpleSet::EMPTY).unwrap().dims();
        assert_eq!(f.dim_p_over_p0, 2);
        assert_eq!(f.dim_p_over_p0, f.dim_e_z0 - f.dim_e_hat_p0);
        assert_eq!(f.dim_p_over_p0, f.dim_m_cap_v0);
    }

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(7) && !is_prime(1) && !is_prime(9));
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(12), None);
    }
}
