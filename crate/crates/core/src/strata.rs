//! Zip strata, fine and coarse flag strata, the twisted closure order and
//! its Hasse diagram.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::subset::SimpleSet;
use crate::weyl::{CosetSide, WeylElt};
use crate::zipdatum::{FlaggedZipDatum, ZipDatum};

/// Which parametrization a label belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    /// w ∈ ᴵW.
    I,
    /// w ∈ Wᴶ.
    J,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub label: WeylElt,
    pub side: Side,
    pub length: usize,
    pub variety_dim: i64,
    pub stack_dim: i64,
}

/// Direction in which the twisted relation is read. `Transposed` swaps the
/// two arguments and exists to show that the printed diagram pins the
/// direction down.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ClosureDirection {
    #[default]
    Standard,
    Transposed,
}

#[derive(Clone, Debug)]
pub struct StrataPoset {
    pub strata: Vec<Stratum>,
    /// Cover relations (lower, upper) as indices into `strata`.
    pub edges: Vec<(usize, usize)>,
    relation: Vec<Vec<bool>>,
}

impl StrataPoset {
    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    /// Full order relation: `leq(a, b)` iff stratum a lies in the closure of b.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.relation[a][b]
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| (0..self.len()).all(|b| b == a || !self.leq(b, a)))
            .collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| (0..self.len()).all(|b| b == a || !self.leq(a, b)))
            .collect()
    }

    pub fn index_of(&self, w: &WeylElt) -> Option<usize> {
        self.strata.iter().position(|s| &s.label == w)
    }
}

/// Transitive reduction of a reflexive relation given as a matrix.
pub fn cover_edges(relation: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let n = relation.len();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b || !relation[a][b] {
                continue;
            }
            let between = (0..n).any(|c| c != a && c != b && relation[a][c] && relation[c][b]);
            if !between {
                edges.push((a, b));
            }
        }
    }
    edges
}

fn make_strata(z: &ZipDatum, elements: Vec<WeylElt>, side: Side) -> Vec<Stratum> {
    let d = z.dims();
    elements
        .into_iter()
        .map(|w| {
            let l = w.length() as i64;
            Stratum {
                length: w.length(),
                side,
                variety_dim: l + d.dim_p,
                stack_dim: l + d.dim_p - d.dim_g,
                label: w,
            }
        })
        .collect()
}

/// One stratum per element of ᴵW (or Wᴶ), ordered by (ℓ, canonical word).
pub fn zip_strata(z: &ZipDatum, side: Side) -> Vec<Stratum> {
    let rd = z.rd();
    let reps = match side {
        Side::I => rd.coset_reps(z.i(), CosetSide::Left),
        Side::J => rd.coset_reps(z.j(), CosetSide::Right),
    };
    make_strata(z, reps.elements, side)
}

/// {u·w·ψ(u)⁻¹ : u ∈ W_I}, deduplicated and sorted by (ℓ, word).
pub fn twisted_class(z: &ZipDatum, w: &WeylElt) -> Vec<WeylElt> {
    twisted_class_over(z, w, &z.rd().parabolic_elements(z.i()))
}

fn twisted_class_over(z: &ZipDatum, w: &WeylElt, wi: &[WeylElt]) -> Vec<WeylElt> {
    let rd = z.rd();
    let mut out: Vec<WeylElt> = Vec::new();
    for u in wi {
        let x = rd.compose(&rd.compose(u, w), &rd.inverse(&z.psi(u)));
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    out
}

fn check_in_iw(z: &ZipDatum, w: &WeylElt) -> Result<()> {
    if !z.rd().is_min_left(w, z.i()) {
        return Err(Error::LabelOutside {
            label: z.rd().label(w),
            set: format!("ᴵW for I = {}", z.i()),
        });
    }
    Ok(())
}

/// `a` lies in the closure of the stratum of `b`: ∃u ∈ W_I with u·a·ψ(u)⁻¹ ≤ b.
pub fn closure_leq(z: &ZipDatum, a: &WeylElt, b: &WeylElt) -> Result<bool> {
    closure_leq_with(z, a, b, ClosureDirection::Standard)
}

pub fn closure_leq_with(
    z: &ZipDatum,
    a: &WeylElt,
    b: &WeylElt,
    dir: ClosureDirection,
) -> Result<bool> {
    check_in_iw(z, a)?;
    check_in_iw(z, b)?;
    let (a, b) = match dir {
        ClosureDirection::Standard => (a, b),
        ClosureDirection::Transposed => (b, a),
    };
    let rd = z.rd();
    Ok(twisted_class(z, a)
        .iter()
        .any(|x| x.length() <= b.length() && rd.bruhat_leq(x, b)))
}

fn twisted_relation(z: &ZipDatum, labels: &[WeylElt]) -> Vec<Vec<bool>> {
    let rd = z.rd();
    let wi = rd.parabolic_elements(z.i());
    labels
        .par_iter()
        .map(|a| {
            let class = twisted_class_over(z, a, &wi);
            labels
                .iter()
                .map(|b| {
                    class
                        .iter()
                        .any(|x| x.length() <= b.length() && rd.bruhat_leq(x, b))
                })
                .collect()
        })
        .collect()
}

pub fn hasse_diagram(z: &ZipDatum) -> StrataPoset {
    hasse_diagram_with(z, ClosureDirection::Standard)
}

pub fn hasse_diagram_with(z: &ZipDatum, dir: ClosureDirection) -> StrataPoset {
    let strata = zip_strata(z, Side::I);
    poset_over(z, strata, dir)
}

fn poset_over(z: &ZipDatum, strata: Vec<Stratum>, dir: ClosureDirection) -> StrataPoset {
    let labels: Vec<WeylElt> = strata.iter().map(|s| s.label.clone()).collect();
    let mut relation = twisted_relation(z, &labels);
    if dir == ClosureDirection::Transposed {
        let n = relation.len();
        relation = (0..n)
            .map(|a| (0..n).map(|b| relation[b][a]).collect())
            .collect();
    }
    let edges = cover_edges(&relation);
    StrataPoset {
        strata,
        edges,
        relation,
    }
}

/// Fine flag strata: strata of Z0 with dimensions measured against the base P.
pub fn fine_strata(fz: &FlaggedZipDatum) -> Vec<Stratum> {
    let d = fz.base.dims();
    zip_strata(&fz.z0, Side::I)
        .into_iter()
        .map(|s| {
            let l = s.length as i64;
            Stratum {
                variety_dim: l + d.dim_p,
                stack_dim: l + d.dim_p - d.dim_g,
                ..s
            }
        })
        .collect()
}

pub fn fine_poset(fz: &FlaggedZipDatum) -> StrataPoset {
    poset_over(&fz.z0, fine_strata(fz), ClosureDirection::Standard)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoarseStratum {
    pub label: WeylElt,
    pub i_w: SimpleSet,
    pub length: usize,
    /// ℓ(w) + ℓ(w_{0,J0}) − ℓ(w_{0,I_w}) − dim P0, as printed.
    pub paper_dim: i64,
    /// ℓ(w) + ℓ(w_{0,I0}) + ℓ(w_{0,J0}) − ℓ(w_{0,I_w}) + dim B + dim(L/P_{0,L}).
    pub derived_dim: i64,
}

pub fn coarse_strata(fz: &FlaggedZipDatum) -> Vec<CoarseStratum> {
    let rd = fz.base.rd();
    let d = fz.dims();
    let l0 = |k: SimpleSet| rd.count_positive_in(k) as i64;
    rd.double_coset_reps(fz.i0, fz.j0)
        .elements
        .into_iter()
        .map(|(w, iw)| {
            let l = w.length() as i64;
            CoarseStratum {
                length: w.length(),
                paper_dim: l + l0(fz.j0) - l0(iw) - d.dim_p0,
                derived_dim: l + l0(fz.i0) + l0(fz.j0) - l0(iw) + d.dim_b + d.dim_l_over_p0l,
                label: w,
                i_w: iw,
            }
        })
        .collect()
}

/// Coarse strata with the Bruhat order restricted to double-coset representatives.
pub fn coarse_poset(
    fz: &FlaggedZipDatum,
) -> (Vec<CoarseStratum>, Vec<Vec<bool>>, Vec<(usize, usize)>) {
    let rd = fz.base.rd();
    let strata = coarse_strata(fz);
    let relation: Vec<Vec<bool>> = strata
        .iter()
        .map(|a| {
            strata
                .iter()
                .map(|b| rd.bruhat_leq(&a.label, &b.label))
                .collect()
        })
        .collect();
    let edges = cover_edges(&relation);
    (strata, relation, edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub minimal: bool,
    pub cominimal: bool,
}

/// Minimal / cominimal status of a fine stratum w ∈ ᴵ⁰W relative to I0 ⊂ I0' ⊂ I.
pub fn classify_stratum(
    fz: &FlaggedZipDatum,
    w: &WeylElt,
    i0p: SimpleSet,
) -> Result<Classification> {
    if !fz.i0.is_subset(i0p) || !i0p.is_subset(fz.base.i()) {
        return Err(Error::NotSubset {
            sub: format!("{} ⊂ {}", fz.i0, i0p),
            sup: fz.base.i().to_string(),
        });
    }
    let rd = fz.base.rd();
    if !rd.is_min_left(w, fz.i0) {
        return Err(Error::LabelOutside {
            label: rd.label(w),
            set: format!("ᴵ⁰W for I0 = {}", fz.i0),
        });
    }
    let j0p = fz.base.flag_datum(i0p)?.j0;
    Ok(Classification {
        minimal: rd.is_min_left(w, i0p),
        cominimal: rd.is_min_right(w, j0p),
    })
}

/// Image of the fine stratum w at level I1 under the projection to level I0.
pub fn project_stratum(z: &ZipDatum, i1: SimpleSet, i0: SimpleSet, w: &WeylElt) -> Result<Stratum> {
    if !i1.is_subset(i0) {
        return Err(Error::NotSubset {
            sub: i1.to_string(),
            sup: i0.to_string(),
        });
    }
    let f1 = z.flag_datum(i1)?;
    let f0 = z.flag_datum(i0)?;
    let rd = z.rd();
    if !rd.is_min_left(w, i1) && !rd.is_min_right(w, f1.j0) {
        return Err(Error::LabelOutside {
            label: rd.label(w),
            set: format!("ᴵ¹W ∪ Wᴶ¹ for I1 = {i1}"),
        });
    }
    let side = if rd.is_min_left(w, i0) {
        Side::I
    } else if rd.is_min_right(w, f0.j0) {
        Side::J
    } else {
        let mut cands: Vec<WeylElt> = twisted_class(&f0.z0, w)
            .into_iter()
            .filter(|x| rd.is_min_left(x, i0))
            .collect();
        let coset_min = rd
            .coset_reps(i0, CosetSide::Left)
            .elements
            .into_iter()
            .find(|x| {
                rd.parabolic_elements(i0)
                    .iter()
                    .any(|u| &rd.compose(u, x) == w)
            });
        if let Some(c) = coset_min {
            if !cands.contains(&c) {
                cands.push(c);
            }
        }
        cands.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        return Err(Error::NotMinimal {
            label: rd.label(w),
            candidates: cands.iter().map(|x| rd.label(x)).collect(),
        });
    };
    let d = z.dims();
    let l = w.length() as i64;
    Ok(Stratum {
        label: w.clone(),
        side,
        length: w.length(),
        variety_dim: l + d.dim_p,
        stack_dim: l + d.dim_p - d.dim_g,
    })
}

/// The Wᴶ-label of the stratum labelled w ∈ ᴵW: the unique element of the
/// twisted W_I-class of w lying in Wᴶ with the same length.
pub fn cross_label(z: &ZipDatum, w: &WeylElt) -> Result<WeylElt> {
    check_in_iw(z, w)?;
    let rd = z.rd();
    let hits: Vec<WeylElt> = twisted_class(z, w)
        .into_iter()
        .filter(|x| x.length() == w.length() && rd.is_min_right(x, z.j()))
        .collect();
    match hits.as_slice() {
        [one] => Ok(one.clone()),
        _ => Err(Error::Convention(format!(
            "{} candidate Wᴶ-labels of length {} for {}",
            hits.len(),
            w.length(),
            rd.label(w)
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsystem::RootDatum;
    use crate::zipdatum::{zip_from_cochar, TypeSpec};
    use std::sync::Arc;

    fn c3() -> ZipDatum {
        let rd = Arc::new(RootDatum::preset("C3").unwrap());
        zip_from_cochar(rd, &TypeSpec::Subset(SimpleSet::from_indices([0, 2])), 1, 2).unwrap()
    }

    #[test]
    fn c3_strata_counts() {
        let z = c3();
        let s = zip_strata(&z, Side::I);
        assert_eq!(s.len(), 12);
        assert_eq!(s.first().unwrap().variety_dim, 14);
        assert_eq!(s.last().unwrap().variety_dim, 21);
        assert_eq!(s.last().unwrap().length, 7);
        assert_eq!(zip_strata(&z, Side::J).len(), 12);
    }

    #[test]
    fn c3_closure_examples() {
        let z = c3();
        let rd = z.rd();
        let l = |t: &str| rd.parse_label(t).unwrap();
        assert!(closure_leq(&z, &l("[142]"), &l("[241]")).unwrap());
        assert!(!closure_leq(&z, &l("[231]"), &l("[153]")).unwrap());
        assert!(!closure_leq(&z, &l("[153]"), &l("[231]")).unwrap());
        assert!(closure_leq(&z, &l("[123]"), &l("[563]")).unwrap());
        assert!(closure_leq(&z, &l("[213]"), &l("[563]")).is_err());
    }

    #[test]
    fn c3_hasse_edges() {
        let z = c3();
        let poset = hasse_diagram(&z);
        let rd = z.rd();
        let mut edges: Vec<(String, String)> = poset
            .edges
            .iter()
            .map(|&(a, b)| {
                (
                    rd.label(&poset.strata[a].label),
                    rd.label(&poset.strata[b].label),
                )
            })
            .collect();
        edges.sort();
        let mut want: Vec<(String, String)> = [
            ("123", "132"),
            ("132", "142"),
            ("132", "231"),
            ("231", "241"),
            ("142", "241"),
            ("142", "153"),
            ("153", "351"),
            ("153", "263"),
            ("241", "263"),
            ("241", "351"),
            ("263", "362"),
            ("351", "362"),
            ("351", "451"),
            ("362", "462"),
            ("451", "462"),
            ("462", "563"),
        ]
        .iter()
        .map(|(a, b)| (format!("[{a}]"), format!("[{b}]")))
        .collect();
        want.sort();
        assert_eq!(edges, want);
        let flipped = hasse_diagram_with(&z, ClosureDirection::Transposed);
        assert_ne!(flipped.edges, poset.edges);
    }

    #[test]
    fn cross_label_c3() {
        let z = c3();
        let rd = z.rd();
        let strata = zip_strata(&z, Side::I);
        let mut images = Vec::new();
        for s in &strata {
            let x = cross_label(&z, &s.label).unwrap();
            assert_eq!(x.length(), s.length);
            assert!(rd.is_min_right(&x, z.j()));
            images.push(x);
        }
        images.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        images.dedup();
        assert_eq!(images.len(), 12);
        assert!(cross_label(&z, &rd.identity()).unwrap().is_identity());
    }

    #[test]
    fn classify_and_project() {
        let z = c3();
        let rd = z.rd();
        let borel = z.flag_datum(SimpleSet::EMPTY).unwrap();
        let w = rd.parse_label("[351]").unwrap();
        let c = classify_stratum(&borel, &w, z.i()).unwrap();
        assert!(c.minimal);
        let e = classify_stratum(&borel, &rd.identity(), z.i()).unwrap();
        assert!(e.minimal && e.cominimal);
        let p = project_stratum(&z, SimpleSet::EMPTY, z.i(), &w).unwrap();
        assert_eq!(p.label, w);
        assert_eq!(p.side, Side::I);
        let s1 = rd.simple_reflection(0);
        let s3 = rd.simple_reflection(2);
        let bad = rd.compose(&s1, &s3);
        match project_stratum(&z, SimpleSet::EMPTY, z.i(), &bad) {
            Err(Error::NotMinimal { candidates, .. }) => assert!(!candidates.is_empty()),
            other => panic!("{other:?}"),
        }
        assert!(classify_stratum(&borel, &w, SimpleSet::from_indices([1])).is_err());
    }

    #[test]
    fn coarse_at_borel_matches_fine() {
        let z = c3();
        let f = z.flag_datum(SimpleSet::EMPTY).unwrap();
        let fine = fine_strata(&f);
        let coarse = coarse_strata(&f);
        assert_eq!(fine.len(), coarse.len());
        for (a, b) in fine.iter().zip(&coarse) {
            assert_eq!(a.label, b.label);
            assert_eq!(a.variety_dim, b.derived_dim);
        }
        assert_eq!(fine.iter().map(|s| s.stack_dim).max(), Some(2));
    }
}
