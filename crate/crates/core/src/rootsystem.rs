//! Based root data with explicit root and coroot vectors, and a finite-order
//! diagram automorphism modelling the Galois twist.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{dot, CharVec, CocharVec, IntMat};
use crate::subset::{SimpleSet, MAX_SIMPLE};

/// Hard cap on the number of roots produced by enumeration.
pub const ROOT_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorSide {
    Character,
    Cocharacter,
}

/// One irreducible (or torus) factor of a preset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    GL(usize),
}

impl Factor {
    fn parse(tok: &str) -> Option<Factor> {
        let (kind, digits) = if let Some(rest) = tok.strip_prefix("GL") {
            ("GL", rest)
        } else {
            tok.split_at(tok.char_indices().nth(1).map_or(tok.len(), |(i, _)| i))
        };
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let n: usize = digits.parse().ok()?;
        let f = match kind {
            "A" if n >= 1 => Factor::A(n),
            "B" if n >= 1 => Factor::B(n),
            "C" if n >= 1 => Factor::C(n),
            "D" if n >= 2 => Factor::D(n),
            "GL" if n >= 1 => Factor::GL(n),
            _ => return None,
        };
        Some(f)
    }

    fn rank(self) -> usize {
        match self {
            Factor::A(n) => n + 1,
            Factor::B(n) | Factor::C(n) | Factor::D(n) | Factor::GL(n) => n,
        }
    }

    /// Simple roots and coroots in the factor's own e_i coordinates.
    fn simple_data(self) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
        let r = self.rank();
        let e = |i: usize, j: Option<(usize, i64)>, c: i64| {
            let mut v = vec![0; r];
            v[i] = c;
            if let Some((j, s)) = j {
                v[j] = s;
            }
            v
        };
        let chain = |len: usize| -> Vec<Vec<i64>> {
            (0..len).map(|i| e(i, Some((i + 1, -1)), 1)).collect()
        };
        match self {
            Factor::A(n) => (chain(n), chain(n)),
            Factor::GL(n) => (chain(n - 1), chain(n - 1)),
            Factor::B(n) => {
                let (mut a, mut c) = (chain(n - 1), chain(n - 1));
                a.push(e(n - 1, None, 1));
                c.push(e(n - 1, None, 2));
                (a, c)
            }
            Factor::C(n) => {
                let (mut a, mut c) = (chain(n - 1), chain(n - 1));
                a.push(e(n - 1, None, 2));
                c.push(e(n - 1, None, 1));
                (a, c)
            }
            Factor::D(n) => {
                let mut a = chain(n - 1);
                a.push(e(n - 2, Some((n - 1, 1)), 1));
                (a.clone(), a)
            }
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::A(n) => write!(f, "A{n}"),
            Factor::B(n) => write!(f, "B{n}"),
            Factor::C(n) => write!(f, "C{n}"),
            Factor::D(n) => write!(f, "D{n}"),
            Factor::GL(n) => write!(f, "GL{n}"),
        }
    }
}

/// A named preset: a product of classical factors plus an optional central torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preset {
    pub factors: Vec<Factor>,
    pub central_rank: usize,
}

impl Preset {
    pub fn parse(name: &str, central_rank: usize) -> Result<Preset> {
        let factors = name
            .split('x')
            .map(|t| Factor::parse(t.trim()).ok_or_else(|| Error::UnknownPreset(name.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if factors.is_empty() {
            return Err(Error::UnknownPreset(name.to_string()));
        }
        Ok(Preset {
            factors,
            central_rank,
        })
    }

    /// Rank n when the preset is a single B_n or C_n without extra torus.
    pub fn signed_permutation_rank(&self) -> Option<usize> {
        match (self.factors.as_slice(), self.central_rank) {
            ([Factor::B(n)], 0) | ([Factor::C(n)], 0) => Some(*n),
            _ => None,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.factors.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", names.join("x"))?;
        if self.central_rank > 0 {
            write!(f, "+T{}", self.central_rank)?;
        }
        Ok(())
    }
}

/// Input description of the Galois twist. `perm` is 0-based on Δ.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GaloisSpec {
    pub perm: Vec<usize>,
    pub order: u32,
    pub matrix: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DatumSpec {
    Preset {
        name: String,
        central_rank: usize,
        galois: Option<GaloisSpec>,
    },
    Explicit {
        rank: usize,
        simple_roots: Vec<Vec<i64>>,
        simple_coroots: Vec<Vec<i64>>,
        cartan: Option<Vec<Vec<i64>>>,
        galois: Option<GaloisSpec>,
    },
}

impl DatumSpec {
    pub fn preset(name: &str) -> DatumSpec {
        DatumSpec::Preset {
            name: name.to_string(),
            central_rank: 0,
            galois: None,
        }
    }

    pub fn preset_with_galois(name: &str, perm: Vec<usize>, order: u32) -> DatumSpec {
        DatumSpec::Preset {
            name: name.to_string(),
            central_rank: 0,
            galois: Some(GaloisSpec {
                perm,
                order,
                matrix: None,
            }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Root {
    pub vector: CharVec,
    pub coroot: CocharVec,
    /// Coordinates in the basis Δ.
    pub coeffs: Vec<i64>,
}

impl Root {
    pub fn height(&self) -> i64 {
        self.coeffs.iter().sum()
    }
}

#[derive(Clone, Debug)]
struct Galois {
    perm: Vec<usize>,
    order: u32,
    char_pows: Vec<IntMat>,
    cochar_pows: Vec<IntMat>,
}

impl Galois {
    fn slot(&self, k: i64) -> usize {
        k.rem_euclid(self.order as i64) as usize
    }
}

#[derive(Clone, Debug)]
pub struct RootDatum {
    rank: usize,
    simple_roots: Vec<CharVec>,
    simple_coroots: Vec<CocharVec>,
    cartan: Vec<Vec<i64>>,
    galois: Galois,
    preset: Option<Preset>,
    roots: Vec<Root>,
    npos: usize,
    index: HashMap<Vec<i64>, usize>,
    negation: Vec<usize>,
    galois_on_roots: Vec<usize>,
    reflections: Vec<(IntMat, IntMat)>,
}

pub fn build_root_datum(spec: &DatumSpec) -> Result<RootDatum> {
    match spec {
        DatumSpec::Preset {
            name,
            central_rank,
            galois,
        } => {
            let preset = Preset::parse(name, *central_rank)?;
            let rank: usize = preset.factors.iter().map(|f| f.rank()).sum::<usize>() + central_rank;
            let (mut simple, mut cosimple) = (Vec::new(), Vec::new());
            let mut offset = 0;
            for f in &preset.factors {
                let (a, c) = f.simple_data();
                let pad = |v: Vec<i64>| {
                    let mut out = vec![0; rank];
                    out[offset..offset + v.len()].copy_from_slice(&v);
                    out
                };
                simple.extend(a.into_iter().map(pad));
                cosimple.extend(c.into_iter().map(pad));
                offset += f.rank();
            }
            RootDatum::assemble(rank, simple, cosimple, None, galois.as_ref(), Some(preset))
        }
        DatumSpec::Explicit {
            rank,
            simple_roots,
            simple_coroots,
            cartan,
            galois,
        } => RootDatum::assemble(
            *rank,
            simple_roots.clone(),
            simple_coroots.clone(),
            cartan.as_ref(),
            galois.as_ref(),
            None,
        ),
    }
}

impl RootDatum {
    /// Shorthand for a split preset.
    pub fn preset(name: &str) -> Result<RootDatum> {
        build_root_datum(&DatumSpec::preset(name))
    }

    fn assemble(
        rank: usize,
        simple: Vec<Vec<i64>>,
        cosimple: Vec<Vec<i64>>,
        cartan_in: Option<&Vec<Vec<i64>>>,
        galois: Option<&GaloisSpec>,
        preset: Option<Preset>,
    ) -> Result<RootDatum> {
        let r = simple.len();
        if cosimple.len() != r {
            return Err(Error::InvalidDatum(format!(
                "{} simple roots but {} simple coroots",
                r,
                cosimple.len()
            )));
        }
        if r > MAX_SIMPLE {
            return Err(Error::InvalidDatum(format!(
                "at most {MAX_SIMPLE} simple roots are supported"
            )));
        }
        for v in simple.iter().chain(&cosimple) {
            if v.len() != rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    got: v.len(),
                });
            }
        }
        let cartan: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..r).map(|j| dot(&simple[j], &cosimple[i])).collect())
            .collect();
        for i in 0..r {
            if cartan[i][i] != 2 {
                return Err(Error::InvalidDatum(format!(
                    "⟨α{0}, α{0}∨⟩ = {1}, expected 2",
                    i + 1,
                    cartan[i][i]
                )));
            }
            for j in 0..r {
                if i != j && (cartan[i][j] > 0 || (cartan[i][j] == 0) != (cartan[j][i] == 0)) {
                    return Err(Error::InvalidDatum(format!(
                        "invalid Cartan entry at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if let Some(c) = cartan_in {
            if *c != cartan {
                return Err(Error::InvalidDatum(
                    "supplied Cartan matrix disagrees with the root vectors".into(),
                ));
            }
        }
        if integer_rank(&simple) < r || integer_rank(&cosimple) < r {
            return Err(Error::InvalidDatum(
                "simple roots or coroots are linearly dependent".into(),
            ));
        }

        let reflections: Vec<(IntMat, IntMat)> = (0..r)
            .map(|i| {
                (
                    IntMat::reflection(&simple[i], &cosimple[i]),
                    IntMat::reflection(&cosimple[i], &simple[i]),
                )
            })
            .collect();

        // Breadth-first closure of Δ under simple reflections.
        let mut found: Vec<Root> = Vec::new();
        let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        for i in 0..r {
            let mut coeffs = vec![0; r];
            coeffs[i] = 1;
            index.insert(simple[i].clone(), found.len());
            queue.push_back(found.len());
            found.push(Root {
                vector: CharVec(simple[i].clone()),
                coroot: CocharVec(cosimple[i].clone()),
                coeffs,
            });
        }
        while let Some(k) = queue.pop_front() {
            for i in 0..r {
                let root = &found[k];
                let c = dot(&root.vector, &cosimple[i]);
                let v = reflections[i].0.apply(&root.vector);
                let cv = reflections[i].1.apply(&root.coroot);
                let mut coeffs = root.coeffs.clone();
                coeffs[i] -= c;
                match index.get(&v) {
                    Some(&old) => {
                        if found[old].coeffs != coeffs || found[old].coroot.0 != cv {
                            return Err(Error::InvalidDatum(
                                "root enumeration is inconsistent".into(),
                            ));
                        }
                    }
                    None => {
                        if found.len() >= ROOT_CAP {
                            return Err(Error::RootCap(ROOT_CAP));
                        }
                        if !(coeffs.iter().all(|&x| x >= 0) || coeffs.iter().all(|&x| x <= 0)) {
                            return Err(Error::InvalidDatum(
                                "a root has coefficients of mixed sign".into(),
                            ));
                        }
                        index.insert(v.clone(), found.len());
                        queue.push_back(found.len());
                        found.push(Root {
                            vector: CharVec(v),
                            coroot: CocharVec(cv),
                            coeffs,
                        });
                    }
                }
            }
        }

        let (mut pos, mut neg): (Vec<Root>, Vec<Root>) =
            found.into_iter().partition(|x| x.height() > 0);
        if pos.len() != neg.len() {
            return Err(Error::InvalidDatum("root set is not symmetric".into()));
        }
        pos.sort_by(|a, b| {
            a.height()
                .cmp(&b.height())
                .then_with(|| b.coeffs.cmp(&a.coeffs))
        });
        neg = pos
            .iter()
            .map(|x| Root {
                vector: x.vector.neg(),
                coroot: x.coroot.neg(),
                coeffs: x.coeffs.iter().map(|c| -c).collect(),
            })
            .collect();
        let npos = pos.len();
        let roots: Vec<Root> = pos.into_iter().chain(neg).collect();
        let index: HashMap<Vec<i64>, usize> = roots
            .iter()
            .enumerate()
            .map(|(k, x)| (x.vector.0.clone(), k))
            .collect();
        let negation = (0..roots.len())
            .map(|k| if k < npos { k + npos } else { k - npos })
            .collect();

        let galois = build_galois(rank, &simple, &cosimple, galois)?;
        let galois_on_roots = roots
            .iter()
            .map(|x| {
                index
                    .get(&galois.char_pows[1 % galois.order as usize].apply(&x.vector))
                    .copied()
                    .ok_or_else(|| Error::InvalidGalois("γ does not preserve the root set".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        for (k, &g) in galois_on_roots.iter().enumerate() {
            if (k < npos) != (g < npos) {
                return Err(Error::InvalidGalois(
                    "γ does not preserve positivity".into(),
                ));
            }
        }

        Ok(RootDatum {
            rank,
            simple_roots: simple.into_iter().map(CharVec).collect(),
            simple_coroots: cosimple.into_iter().map(CocharVec).collect(),
            cartan,
            galois,
            preset,
            roots,
            npos,
            index,
            negation,
            galois_on_roots,
            reflections,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_simple(&self) -> usize {
        self.simple_roots.len()
    }

    pub fn all_simple(&self) -> SimpleSet {
        SimpleSet::full(self.num_simple())
    }

    pub fn simple_roots(&self) -> &[CharVec] {
        &self.simple_roots
    }

    pub fn simple_coroots(&self) -> &[CocharVec] {
        &self.simple_coroots
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn preset_tag(&self) -> Option<&Preset> {
        self.preset.as_ref()
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    /// Φ⁺ ordered by height, then by Δ-coordinates in decreasing lexicographic order.
    pub fn positive_roots(&self) -> &[Root] {
        &self.roots[..self.npos]
    }

    pub fn num_positive(&self) -> usize {
        self.npos
    }

    pub fn root(&self, idx: usize) -> &Root {
        &self.roots[idx]
    }

    pub fn root_index(&self, v: &[i64]) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn is_positive(&self, idx: usize) -> bool {
        idx < self.npos
    }

    /// Sign of a vector that is known to be a root.
    pub fn is_positive_vector(&self, v: &[i64]) -> bool {
        match self.root_index(v) {
            Some(k) => k < self.npos,
            None => panic!("vector {v:?} is not a root"),
        }
    }

    pub fn negate(&self, idx: usize) -> usize {
        self.negation[idx]
    }

    /// Index of the simple root α_i.
    pub fn simple_index(&self, i: usize) -> usize {
        self.index[&self.simple_roots[i].0]
    }

    /// The root lies in Φ_K, i.e. its Δ-support is inside K.
    pub fn root_in(&self, idx: usize, k: SimpleSet) -> bool {
        self.roots[idx]
            .coeffs
            .iter()
            .enumerate()
            .all(|(i, &c)| c == 0 || k.contains(i))
    }

    /// |Φ_K⁺|.
    pub fn count_positive_in(&self, k: SimpleSet) -> usize {
        (0..self.npos).filter(|&x| self.root_in(x, k)).count()
    }

    pub fn pairing(&self, chi: &CharVec, cochar: &CocharVec) -> Result<i64> {
        self.check_rank(chi.len())?;
        crate::lattice::pairing(chi, cochar)
    }

    pub fn check_rank(&self, len: usize) -> Result<()> {
        if len != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: len,
            });
        }
        Ok(())
    }

    /// s_α applied to a character (`v − ⟨v, α∨⟩α`) or a cocharacter (`v − ⟨α, v⟩α∨`).
    pub fn reflect(&self, alpha: &[i64], v: &[i64], side: VectorSide) -> Result<Vec<i64>> {
        self.check_rank(v.len())?;
        let k = self.root_index(alpha).ok_or(Error::NotARoot)?;
        Ok(self.reflect_by_index(k, v, side))
    }

    pub fn reflect_by_index(&self, k: usize, v: &[i64], side: VectorSide) -> Vec<i64> {
        let r = &self.roots[k];
        let (a, b) = match side {
            VectorSide::Character => (&r.vector.0, &r.coroot.0),
            VectorSide::Cocharacter => (&r.coroot.0, &r.vector.0),
        };
        let c = dot(v, b);
        v.iter().zip(a).map(|(x, y)| x - c * y).collect()
    }

    pub fn simple_reflection_matrices(&self, i: usize) -> &(IntMat, IntMat) {
        &self.reflections[i]
    }

    pub fn galois_order(&self) -> u32 {
        self.galois.order
    }

    pub fn is_split(&self) -> bool {
        self.galois.char_pows.iter().all(|m| m.is_identity())
    }

    /// 0-based permutation of Δ induced by γ.
    pub fn galois_perm(&self) -> &[usize] {
        &self.galois.perm
    }

    /// Matrix of γ^k on X*(T) (any integer k).
    pub fn galois_matrix(&self, k: i64, side: VectorSide) -> &IntMat {
        let s = self.galois.slot(k);
        match side {
            VectorSide::Character => &self.galois.char_pows[s],
            VectorSide::Cocharacter => &self.galois.cochar_pows[s],
        }
    }

    pub fn apply_galois(&self, k: i64, v: &[i64], side: VectorSide) -> Vec<i64> {
        self.galois_matrix(k, side).apply(v)
    }

    /// Index of γ^k applied to a simple root index.
    pub fn galois_simple(&self, k: i64, i: usize) -> usize {
        let mut x = i;
        for _ in 0..self.galois.slot(k) {
            x = self.galois.perm[x];
        }
        x
    }

    pub fn galois_subset(&self, k: i64, set: SimpleSet) -> SimpleSet {
        SimpleSet::from_indices(set.iter().map(|i| self.galois_simple(k, i)))
    }

    /// Index of γ(β) for a root index β.
    pub fn galois_root(&self, k: usize) -> usize {
        self.galois_on_roots[k]
    }

    /// Smallest m ≥ 1 with γ^{km} = id on X*(T).
    pub fn galois_power_order(&self, k: i64) -> u32 {
        let d = self.galois.order;
        (1..=d)
            .find(|&m| {
                self.galois_matrix(k * m as i64, VectorSide::Character)
                    .is_identity()
            })
            .unwrap_or(d)
    }
}

/// Rank over ℚ by fraction-free elimination.
fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let (a, b) = (m[rank][c], m[i][c]);
                let pivot_row = m[rank].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x = *x * a - y * b;
                }
                let g = m[i].iter().fold(0i128, |g, &x| gcd128(g, x));
                if g > 1 {
                    m[i].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn build_galois(
    rank: usize,
    simple: &[Vec<i64>],
    cosimple: &[Vec<i64>],
    spec: Option<&GaloisSpec>,
) -> Result<Galois> {
    let r = simple.len();
    let identity = GaloisSpec {
        perm: (0..r).collect(),
        order: 1,
        matrix: None,
    };
    let spec = spec.unwrap_or(&identity);
    if spec.order == 0 {
        return Err(Error::InvalidGalois("order must be positive".into()));
    }
    let mut seen = vec![false; r];
    if spec.perm.len() != r
        || spec
            .perm
            .iter()
            .any(|&x| x >= r || std::mem::replace(&mut seen[x], true))
    {
        return Err(Error::InvalidGalois(
            "perm is not a permutation of the simple roots".into(),
        ));
    }
    let matrix = match &spec.matrix {
        Some(rows) => IntMat::from_rows(rows)
            .map_err(|_| Error::InvalidGalois("matrix has the wrong shape".into()))?,
        None if spec.perm.iter().enumerate().all(|(i, &x)| i == x) => IntMat::identity(rank),
        None => signed_permutation_for(rank, simple, cosimple, &spec.perm).ok_or_else(|| {
            Error::InvalidGalois(
                "no signed coordinate permutation realizes perm; supply a matrix".into(),
            )
        })?,
    };
    if matrix.dim() != rank {
        return Err(Error::InvalidGalois("matrix has the wrong shape".into()));
    }
    if !matrix.pow(spec.order).is_identity() {
        return Err(Error::InvalidGalois(format!(
            "γ^{} is not the identity",
            spec.order
        )));
    }
    let comatrix = matrix.pow(spec.order - 1).transpose();
    for i in 0..r {
        let j = spec.perm[i];
        if matrix.apply(&simple[i]) != simple[j] {
            return Err(Error::InvalidGalois(format!(
                "γ(α{}) is not α{}",
                i + 1,
                j + 1
            )));
        }
        if comatrix.apply(&cosimple[i]) != cosimple[j] {
            return Err(Error::InvalidGalois(format!(
                "γ(α{}∨) is not α{}∨",
                i + 1,
                j + 1
            )));
        }
    }
    let d = spec.order as usize;
    let char_pows: Vec<IntMat> = (0..d).map(|k| matrix.pow(k as u32)).collect();
    let cochar_pows: Vec<IntMat> = (0..d).map(|k| comatrix.pow(k as u32)).collect();
    Ok(Galois {
        perm: spec.perm.clone(),
        order: spec.order,
        char_pows,
        cochar_pows,
    })
}

/// Searches for a signed permutation of coordinates mapping α_i to α_{perm(i)}
/// (and coroots likewise), preferring fixed coordinates.
fn signed_permutation_for(
    rank: usize,
    simple: &[Vec<i64>],
    cosimple: &[Vec<i64>],
    perm: &[usize],
) -> Option<IntMat> {
    fn consistent(
        img: &[Option<(usize, i64)>],
        rank: usize,
        vecs: &[Vec<i64>],
        perm: &[usize],
    ) -> bool {
        for (i, v) in vecs.iter().enumerate() {
            if v.iter()
                .enumerate()
                .any(|(j, &c)| c != 0 && img[j].is_none())
            {
                continue;
            }
            let mut out = vec![0; rank];
            for (j, &c) in v.iter().enumerate() {
                if c != 0 {
                    let (k, s) = img[j].unwrap();
                    out[k] += s * c;
                }
            }
            if out != vecs[perm[i]] {
                return false;
            }
        }
        true
    }
    fn search(
        j: usize,
        img: &mut Vec<Option<(usize, i64)>>,
        used: &mut Vec<bool>,
        rank: usize,
        simple: &[Vec<i64>],
        cosimple: &[Vec<i64>],
        perm: &[usize],
    ) -> bool {
        if j == rank {
            return true;
        }
        let order = std::iter::once(j).chain((0..rank).filter(|&k| k != j));
        for k in order {
            if used[k] {
                continue;
            }
            for s in [1, -1] {
                img[j] = Some((k, s));
                used[k] = true;
                if consistent(img, rank, simple, perm)
                    && consistent(img, rank, cosimple, perm)
                    && search(j + 1, img, used, rank, simple, cosimple, perm)
                {
                    return true;
                }
                used[k] = false;
                img[j] = None;
            }
        }
        false
    }
    let mut img = vec![None; rank];
    let mut used = vec![false; rank];
    if !search(0, &mut img, &mut used, rank, simple, cosimple, perm) {
        return None;
    }
    let mut rows = vec![vec![0; rank]; rank];
    for (j, x) in img.iter().enumerate() {
        let (k, s) = x.unwrap();
        rows[k][j] = s;
    }
    IntMat::from_rows(&rows).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c3_roots() {
        let rd = RootDatum::preset("C3").unwrap();
        assert_eq!(rd.roots().len(), 18);
        assert_eq!(rd.num_positive(), 9);
        assert_eq!(rd.simple_roots()[2].0, vec![0, 0, 2]);
        for v in [
            [1, -1, 0],
            [0, 1, -1],
            [0, 0, 2],
            [1, 1, 0],
            [2, 0, 0],
            [-1, 0, 1],
        ] {
            assert!(rd.root_index(&v).is_some(), "{v:?}");
        }
    }

    #[test]
    fn a1_and_gl4() {
        let a1 = RootDatum::preset("A1").unwrap();
        assert_eq!(a1.roots().len(), 2);
        let gl4 = RootDatum::preset("GL4").unwrap();
        assert_eq!(gl4.rank(), 4);
        assert_eq!(gl4.roots().len(), 12);
        assert_eq!(gl4.num_positive(), 6);
    }

    #[test]
    fn product_and_central_rank() {
        let rd = RootDatum::preset("C3xGL1").unwrap();
        assert_eq!(rd.rank(), 4);
        assert_eq!(rd.num_simple(), 3);
        let spec = DatumSpec::Preset {
            name: "B2".into(),
            central_rank: 2,
            galois: None,
        };
        let rd = build_root_datum(&spec).unwrap();
        assert_eq!(rd.rank(), 4);
        assert_eq!(rd.roots().len(), 8);
        assert!(RootDatum::preset("E6").is_err());
        assert!(RootDatum::preset("D1").is_err());
    }

    #[test]
    fn reflections() {
        let rd = RootDatum::preset("C3").unwrap();
        let a = [0, 0, 2];
        assert_eq!(
            rd.reflect(&a, &a, VectorSide::Character).unwrap(),
            vec![0, 0, -2]
        );
        assert_eq!(
            rd.reflect(&a, &[0, 0, 1], VectorSide::Character).unwrap(),
            vec![0, 0, -1]
        );
        assert_eq!(
            rd.reflect(&a, &[1, 1, 0], VectorSide::Character).unwrap(),
            vec![1, 1, 0]
        );
        assert_eq!(
            rd.reflect(&[1, 0, 0], &[1, 0, 0], VectorSide::Character),
            Err(Error::NotARoot)
        );
    }

    #[test]
    fn pairing_examples() {
        let rd = RootDatum::preset("C3").unwrap();
        let p = |c: [i64; 3], d: [i64; 3]| {
            rd.pairing(&CharVec(c.to_vec()), &CocharVec(d.to_vec()))
                .unwrap()
        };
        assert_eq!(p([1, 0, 0], [1, -1, 0]), 1);
        assert_eq!(p([1, 1, 0], [1, 1, 0]), 2);
        assert_eq!(p([0, 0, 0], [1, 1, 0]), 0);
        assert!(rd
            .pairing(&CharVec(vec![1]), &CocharVec(vec![1, 0, 0]))
            .is_err());
    }

    #[test]
    fn coroots_pair_to_two() {
        for name in ["A3", "B3", "C3", "D4", "GL4", "B2xA1"] {
            let rd = RootDatum::preset(name).unwrap();
            for r in rd.roots() {
                assert_eq!(dot(&r.vector, &r.coroot), 2, "{name}");
            }
        }
    }

    #[test]
    fn diagram_flip_on_a3() {
        let rd = build_root_datum(&DatumSpec::preset_with_galois("A3", vec![2, 1, 0], 2)).unwrap();
        let a1 = rd.simple_roots()[0].clone();
        assert_eq!(
            rd.apply_galois(1, &a1, VectorSide::Character),
            rd.simple_roots()[2].0
        );
        assert_eq!(rd.apply_galois(2, &a1, VectorSide::Character), a1.0);
        assert_eq!(rd.galois_simple(1, 0), 2);
        assert!(!rd.is_split());
    }

    #[test]
    fn bad_galois_rejected() {
        let r = build_root_datum(&DatumSpec::preset_with_galois("B2", vec![1, 0], 2));
        assert!(matches!(r, Err(Error::InvalidGalois(_))));
        let r = build_root_datum(&DatumSpec::preset_with_galois("A3", vec![2, 1, 0], 3));
        assert!(matches!(r, Err(Error::InvalidGalois(_))));
    }

    #[test]
    fn explicit_datum_checks() {
        // Cartan entries -1 and -4 give an affine, hence infinite, Weyl group.
        let spec = DatumSpec::Explicit {
            rank: 3,
            simple_roots: vec![vec![1, 0, 0], vec![0, 1, 0]],
            simple_coroots: vec![vec![2, -1, 0], vec![-4, 2, 1]],
            cartan: None,
            galois: None,
        };
        assert_eq!(
            build_root_datum(&spec).unwrap_err(),
            Error::RootCap(ROOT_CAP)
        );
        let spec = DatumSpec::Explicit {
            rank: 2,
            simple_roots: vec![vec![1, 0], vec![0, 1]],
            simple_coroots: vec![vec![2, -1], vec![-1, 2]],
            cartan: Some(vec![vec![2, -1], vec![-1, 2]]),
            galois: None,
        };
        assert_eq!(build_root_datum(&spec).unwrap().roots().len(), 6);
        let spec = DatumSpec::Explicit {
            rank: 2,
            simple_roots: vec![vec![1, 0], vec![0, 1]],
            simple_coroots: vec![vec![2, 0], vec![0, 3]],
            cartan: None,
            galois: None,
        };
        assert!(matches!(
            build_root_datum(&spec),
            Err(Error::InvalidDatum(_))
        ));
    }
}
