#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::Arc;

use zipstrata::lattice::IntMat;
use zipstrata::zipdatum::{zip_from_cochar, TypeSpec};
use zipstrata::{RootDatum, SimpleSet, WeylElt, ZipDatum};

pub const SMALL_GROUPS: [&str; 5] = ["A1", "A2", "B2", "A3", "C3"];

pub fn rd(name: &str) -> Arc<RootDatum> {
    Arc::new(RootDatum::preset(name).unwrap())
}

pub fn unitary_a3() -> Arc<RootDatum> {
    Arc::new(
        zipstrata::build_root_datum(&zipstrata::DatumSpec::preset_with_galois(
            "A3",
            vec![2, 1, 0],
            2,
        ))
        .unwrap(),
    )
}

pub fn twisted(name: &str, perm: Vec<usize>, order: u32) -> Arc<RootDatum> {
    Arc::new(
        zipstrata::build_root_datum(&zipstrata::DatumSpec::preset_with_galois(name, perm, order))
            .unwrap(),
    )
}

pub fn c3(p: u64) -> ZipDatum {
    zip_from_cochar(
        rd("C3"),
        &TypeSpec::Subset(SimpleSet::from_indices([0, 2])),
        1,
        p,
    )
    .unwrap()
}

pub fn cochar(rd: &Arc<RootDatum>, i: SimpleSet, p: u64) -> ZipDatum {
    zip_from_cochar(rd.clone(), &TypeSpec::Subset(i), 1, p).unwrap()
}

/// Matrices of all products of subwords of the reduced word of w.
pub fn subword_products(rd: &RootDatum, w: &WeylElt) -> HashSet<IntMat> {
    let mut set: HashSet<IntMat> = HashSet::new();
    set.insert(IntMat::identity(rd.rank()));
    for &s in w.word() {
        let m = &rd.simple_reflection_matrices(s).0;
        let next: Vec<IntMat> = set.iter().map(|x| x.mul(m)).collect();
        set.extend(next);
    }
    set
}

/// Minimal-length representatives of W_K\W, found by scanning each coset.
pub fn brute_left_reps(rd: &RootDatum, k: SimpleSet) -> HashSet<WeylElt> {
    let wk = rd.parabolic_elements(k);
    rd.all_elements()
        .iter()
        .map(|w| {
            wk.iter()
                .map(|u| rd.compose(u, w))
                .min_by_key(|x| x.length())
                .unwrap()
        })
        .collect()
}

pub fn brute_right_reps(rd: &RootDatum, k: SimpleSet) -> HashSet<WeylElt> {
    let wk = rd.parabolic_elements(k);
    rd.all_elements()
        .iter()
        .map(|w| {
            wk.iter()
                .map(|u| rd.compose(w, u))
                .min_by_key(|x| x.length())
                .unwrap()
        })
        .collect()
}

/// Minimal-length representatives of W_A\W/W_B.
pub fn brute_double_reps(rd: &RootDatum, a: SimpleSet, b: SimpleSet) -> HashSet<WeylElt> {
    let wa = rd.parabolic_elements(a);
    let wb = rd.parabolic_elements(b);
    rd.all_elements()
        .iter()
        .map(|w| {
            wa.iter()
                .flat_map(|u| wb.iter().map(move |v| (u, v)))
                .map(|(u, v)| rd.compose(&rd.compose(u, w), v))
                .min_by_key(|x| x.length())
                .unwrap()
        })
        .collect()
}
