//! Weyl group elements, Bruhat order and parabolic coset combinatorics.

use std::collections::{HashSet, VecDeque};
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::lattice::IntMat;
use crate::rootsystem::{RootDatum, VectorSide};
use crate::subset::SimpleSet;

/// A Weyl group element, normalized as its action on X*(T).
///
/// The action on X_*(T) and the lexicographically least reduced word are
/// carried along; equality and hashing only look at the character action.
#[derive(Clone, Debug)]
pub struct WeylElt {
    act: IntMat,
    coact: IntMat,
    word: Vec<usize>,
}

impl PartialEq for WeylElt {
    fn eq(&self, other: &Self) -> bool {
        self.act == other.act
    }
}

impl Eq for WeylElt {}

impl Hash for WeylElt {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.act.hash(state)
    }
}

impl WeylElt {
    pub fn length(&self) -> usize {
        self.word.len()
    }

    /// Lexicographically least reduced word (0-based simple indices).
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn matrix(&self) -> &IntMat {
        &self.act
    }

    pub fn comatrix(&self) -> &IntMat {
        &self.coact
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    pub fn act(&self, v: &[i64], side: VectorSide) -> Vec<i64> {
        match side {
            VectorSide::Character => self.act.apply(v),
            VectorSide::Cocharacter => self.coact.apply(v),
        }
    }

    /// Action of the inverse, without building it.
    pub fn act_inverse(&self, v: &[i64], side: VectorSide) -> Vec<i64> {
        match side {
            VectorSide::Character => self.coact.transpose().apply(v),
            VectorSide::Cocharacter => self.act.transpose().apply(v),
        }
    }

    /// Sort key used for every deterministic listing: (ℓ, canonical word).
    pub fn sort_key(&self) -> (usize, &[usize]) {
        (self.word.len(), &self.word)
    }

    /// Word rendered as `s1s2s1`, or `e` for the identity.
    pub fn word_label(&self) -> String {
        if self.word.is_empty() {
            "e".to_string()
        } else {
            self.word.iter().map(|i| format!("s{}", i + 1)).collect()
        }
    }
}

/// Which parabolic quotient a coset listing represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CosetSide {
    /// ᴷW: minimal representatives of W_K\W.
    Left,
    /// Wᴷ: minimal representatives of W/W_K.
    Right,
}

#[derive(Clone, Debug)]
pub struct CosetReps {
    pub subset: SimpleSet,
    pub side: CosetSide,
    pub elements: Vec<WeylElt>,
}

#[derive(Clone, Debug)]
pub struct DoubleCosetReps {
    pub left: SimpleSet,
    pub right: SimpleSet,
    /// Each representative with its I_w.
    pub elements: Vec<(WeylElt, SimpleSet)>,
}

fn sort_elements(v: &mut [WeylElt]) {
    v.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

impl RootDatum {
    pub fn identity(&self) -> WeylElt {
        let n = self.rank();
        WeylElt {
            act: IntMat::identity(n),
            coact: IntMat::identity(n),
            word: Vec::new(),
        }
    }

    fn finish(&self, act: IntMat, coact: IntMat) -> WeylElt {
        let word = self.canonical_word(&coact);
        WeylElt { act, coact, word }
    }

    /// Greedy left-descent stripping; the smallest descent is taken each time,
    /// which yields the lexicographically least reduced word.
    fn canonical_word(&self, coact: &IntMat) -> Vec<usize> {
        let mut cur_co = coact.clone();
        let mut word = Vec::new();
        loop {
            let inv = cur_co.transpose();
            let desc = (0..self.num_simple())
                .find(|&i| !self.is_positive_vector(&inv.apply(&self.simple_roots()[i])));
            match desc {
                Some(i) => {
                    word.push(i);
                    cur_co = self.simple_reflection_matrices(i).1.mul(&cur_co);
                }
                None => break,
            }
        }
        word
    }

    pub fn simple_reflection(&self, i: usize) -> WeylElt {
        let (a, c) = self.simple_reflection_matrices(i).clone();
        WeylElt {
            act: a,
            coact: c,
            word: vec![i],
        }
    }

    /// s_β for a root index β.
    pub fn reflection(&self, root: usize) -> WeylElt {
        let r = self.root(root);
        let act = IntMat::reflection(&r.vector, &r.coroot);
        let coact = IntMat::reflection(&r.coroot, &r.vector);
        self.finish(act, coact)
    }

    /// Product of simple reflections, left to right (0-based indices).
    pub fn from_word(&self, word: &[usize]) -> Result<WeylElt> {
        let n = self.rank();
        let (mut act, mut coact) = (IntMat::identity(n), IntMat::identity(n));
        for &i in word {
            if i >= self.num_simple() {
                return Err(Error::IndexOutOfRange(i));
            }
            let (a, c) = self.simple_reflection_matrices(i);
            act = act.mul(a);
            coact = coact.mul(c);
        }
        Ok(self.finish(act, coact))
    }

    /// Interprets an integer matrix acting on X*(T) as a Weyl group element.
    pub fn weyl_from_matrix(&self, m: &IntMat) -> Result<WeylElt> {
        if m.dim() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                got: m.dim(),
            });
        }
        let mut cur = m.clone();
        let mut letters = Vec::new();
        'outer: for _ in 0..=self.num_positive() {
            for i in 0..self.num_simple() {
                let img = cur.apply(&self.simple_roots()[i]);
                match self.root_index(&img) {
                    None => return Err(Error::NotInWeylGroup),
                    Some(k) if !self.is_positive(k) => {
                        letters.push(i);
                        cur = cur.mul(&self.simple_reflection_matrices(i).0);
                        continue 'outer;
                    }
                    _ => {}
                }
            }
            break;
        }
        if !cur.is_identity() {
            return Err(Error::NotInWeylGroup);
        }
        letters.reverse();
        let w = self.from_word(&letters)?;
        debug_assert_eq!(&w.act, m);
        Ok(w)
    }

    pub fn compose(&self, a: &WeylElt, b: &WeylElt) -> WeylElt {
        self.finish(a.act.mul(&b.act), a.coact.mul(&b.coact))
    }

    pub fn inverse(&self, a: &WeylElt) -> WeylElt {
        self.finish(a.coact.transpose(), a.act.transpose())
    }

    /// γ^k w γ^{-k}.
    pub fn galois_conjugate(&self, k: i64, w: &WeylElt) -> WeylElt {
        if k.rem_euclid(self.galois_order() as i64) == 0 {
            return w.clone();
        }
        let g = self.galois_matrix(k, VectorSide::Character);
        let gi = self.galois_matrix(-k, VectorSide::Character);
        let h = self.galois_matrix(k, VectorSide::Cocharacter);
        let hi = self.galois_matrix(-k, VectorSide::Cocharacter);
        self.finish(g.mul(&w.act).mul(gi), h.mul(&w.coact).mul(hi))
    }

    pub fn is_left_descent(&self, w: &WeylElt, i: usize) -> bool {
        !self.is_positive_vector(&w.act_inverse(&self.simple_roots()[i], VectorSide::Character))
    }

    pub fn is_right_descent(&self, w: &WeylElt, i: usize) -> bool {
        !self.is_positive_vector(&w.act.apply(&self.simple_roots()[i]))
    }

    pub fn left_mul_simple(&self, i: usize, w: &WeylElt) -> WeylElt {
        let (a, c) = self.simple_reflection_matrices(i);
        self.finish(a.mul(&w.act), c.mul(&w.coact))
    }

    pub fn right_mul_simple(&self, w: &WeylElt, i: usize) -> WeylElt {
        let (a, c) = self.simple_reflection_matrices(i);
        self.finish(w.act.mul(a), w.coact.mul(c))
    }

    /// Length by counting inversions; agrees with the word length.
    pub fn inversion_count(&self, w: &WeylElt) -> usize {
        self.positive_roots()
            .iter()
            .filter(|r| !self.is_positive_vector(&w.act.apply(&r.vector)))
            .count()
    }

    /// Bruhat order by the descent recursion: for a left descent s of w,
    /// x ≤ w iff sx ≤ sw when s is a descent of x, and x ≤ sw otherwise.
    pub fn bruhat_leq(&self, x: &WeylElt, w: &WeylElt) -> bool {
        let (mut x, mut w) = (x.clone(), w.clone());
        loop {
            if x.length() > w.length() {
                return false;
            }
            if w.is_identity() {
                return x.is_identity();
            }
            if x.is_identity() {
                return true;
            }
            let s = w.word[0];
            w = self.left_mul_simple(s, &w);
            if self.is_left_descent(&x, s) {
                x = self.left_mul_simple(s, &x);
            }
        }
    }

    /// All elements of W_K, sorted by (ℓ, word).
    pub fn parabolic_elements(&self, k: SimpleSet) -> Vec<WeylElt> {
        let mut seen: HashSet<WeylElt> = HashSet::new();
        let mut queue = VecDeque::from([self.identity()]);
        seen.insert(self.identity());
        while let Some(w) = queue.pop_front() {
            for i in k.iter() {
                let v = self.right_mul_simple(&w, i);
                if seen.insert(v.clone()) {
                    queue.push_back(v);
                }
            }
        }
        let mut out: Vec<WeylElt> = seen.into_iter().collect();
        sort_elements(&mut out);
        out
    }

    pub fn all_elements(&self) -> Vec<WeylElt> {
        self.parabolic_elements(self.all_simple())
    }

    pub fn is_min_left(&self, w: &WeylElt, k: SimpleSet) -> bool {
        k.iter().all(|i| !self.is_left_descent(w, i))
    }

    pub fn is_min_right(&self, w: &WeylElt, k: SimpleSet) -> bool {
        k.iter().all(|i| !self.is_right_descent(w, i))
    }

    /// Minimal coset representatives, grown from e by length-increasing
    /// multiplications that stay descent-free on K.
    pub fn coset_reps(&self, k: SimpleSet, side: CosetSide) -> CosetReps {
        let mut seen: HashSet<WeylElt> = HashSet::from([self.identity()]);
        let mut queue = VecDeque::from([self.identity()]);
        let mut out = vec![self.identity()];
        while let Some(w) = queue.pop_front() {
            for i in 0..self.num_simple() {
                let v = match side {
                    CosetSide::Left if !self.is_right_descent(&w, i) => {
                        self.right_mul_simple(&w, i)
                    }
                    CosetSide::Right if !self.is_left_descent(&w, i) => self.left_mul_simple(i, &w),
                    _ => continue,
                };
                let ok = match side {
                    CosetSide::Left => self.is_min_left(&v, k),
                    CosetSide::Right => self.is_min_right(&v, k),
                };
                if ok && seen.insert(v.clone()) {
                    out.push(v.clone());
                    queue.push_back(v);
                }
            }
        }
        sort_elements(&mut out);
        CosetReps {
            subset: k,
            side,
            elements: out,
        }
    }

    /// w_{0,K}.
    pub fn longest_element(&self, k: SimpleSet) -> WeylElt {
        let mut w = self.identity();
        'grow: loop {
            for i in k.iter() {
                if !self.is_right_descent(&w, i) {
                    w = self.right_mul_simple(&w, i);
                    continue 'grow;
                }
            }
            return w;
        }
    }

    pub fn longest(&self) -> WeylElt {
        self.longest_element(self.all_simple())
    }

    /// E_w: positive roots α with ℓ(w s_α) = ℓ(w) − 1, in the order of Φ⁺.
    pub fn lower_reflections(&self, w: &WeylElt) -> Vec<usize> {
        if w.is_identity() {
            return Vec::new();
        }
        (0..self.num_positive())
            .filter(|&k| {
                // ℓ(w s_α) < ℓ(w) iff w(α) < 0; only then can the drop be exactly one.
                !self.is_positive_vector(&w.act.apply(&self.root(k).vector))
                    && self.compose(w, &self.reflection(k)).length() + 1 == w.length()
            })
            .collect()
    }

    /// I_w = J0 ∩ w⁻¹ I0 w: simple roots β of J0 with w(β) ∈ Φ_{I0}.
    pub fn i_w(&self, w: &WeylElt, i0: SimpleSet, j0: SimpleSet) -> SimpleSet {
        SimpleSet::from_indices(j0.iter().filter(|&b| {
            let img = w.act.apply(&self.simple_roots()[b]);
            self.root_index(&img).is_some_and(|k| self.root_in(k, i0))
        }))
    }

    /// Minimal representatives of W_{I0}\W/W_{J0}, with I_w.
    pub fn double_coset_reps(&self, i0: SimpleSet, j0: SimpleSet) -> DoubleCosetReps {
        let elements = self
            .coset_reps(i0, CosetSide::Left)
            .elements
            .into_iter()
            .filter(|w| self.is_min_right(w, j0))
            .map(|w| {
                let iw = self.i_w(&w, i0, j0);
                (w, iw)
            })
            .collect();
        DoubleCosetReps {
            left: i0,
            right: j0,
            elements,
        }
    }

    /// Parses `e`, `s1s2s1`, or bracket notation for B/C presets.
    pub fn parse_label(&self, text: &str) -> Result<WeylElt> {
        let t = text.trim();
        if t.starts_with('[') {
            return self.from_bracket(t);
        }
        if t == "e" {
            return Ok(self.identity());
        }
        let body = t
            .strip_prefix('s')
            .ok_or_else(|| Error::BadLabel(text.to_string()))?;
        let word = body
            .split('s')
            .map(|d| match d.parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i - 1),
                _ => Err(Error::BadLabel(text.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        self.from_word(&word)
    }

    /// Bracket notation where available, canonical word otherwise.
    pub fn label(&self, w: &WeylElt) -> String {
        self.to_bracket(w).unwrap_or_else(|_| w.word_label())
    }

    /// Signed-permutation notation for B_n / C_n.
    ///
    /// Writing f(j) = e_j for j ≤ n and f(j) = −e_{2n+1−j} for j > n, the
    /// bracket [σ(1)…σ(n)] denotes the element w with w⁻¹(e_i) = f(σ(i)).
    pub fn to_bracket(&self, w: &WeylElt) -> Result<String> {
        let n = self
            .preset_tag()
            .and_then(|p| p.signed_permutation_rank())
            .ok_or(Error::BracketUnsupported)?;
        let inv = w.coact.transpose();
        let mut digits = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            let img = inv.apply(&e);
            let (j, s) = img
                .iter()
                .enumerate()
                .find(|(_, &x)| x != 0)
                .map(|(j, &x)| (j, x))
                .unwrap();
            digits.push(if s > 0 { j + 1 } else { 2 * n - j });
        }
        let sep = if 2 * n > 9 { " " } else { "" };
        Ok(format!(
            "[{}]",
            digits
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(sep)
        ))
    }

    pub fn from_bracket(&self, text: &str) -> Result<WeylElt> {
        let n = self
            .preset_tag()
            .and_then(|p| p.signed_permutation_rank())
            .ok_or(Error::BracketUnsupported)?;
        let bad = || Error::BadLabel(text.to_string());
        let inner = text
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(bad)?;
        let digits: Vec<usize> = if inner.contains(char::is_whitespace) {
            inner
                .split_whitespace()
                .map(|d| d.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            inner
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        if digits.len() != n {
            return Err(bad());
        }
        let mut used = vec![false; n];
        let mut rows = vec![vec![0; n]; n];
        for (i, &d) in digits.iter().enumerate() {
            if d == 0 || d > 2 * n {
                return Err(bad());
            }
            let (j, s) = if d <= n { (d - 1, 1) } else { (2 * n - d, -1) };
            if std::mem::replace(&mut used[j], true) {
                return Err(bad());
            }
            // Column i of w⁻¹ is s·e_j, so row i of w = column i of w⁻¹ transposed.
            rows[i][j] = s;
        }
        self.weyl_from_matrix(&IntMat::from_rows(&rows)?)
    }
}
