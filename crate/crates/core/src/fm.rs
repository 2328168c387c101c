//! Exact Fourier–Motzkin elimination for homogeneous strict systems
//! `a_k · t > 0`, with replayable infeasibility certificates.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Outcome of a strict feasibility decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrictOutcome {
    /// A rational point satisfying every strict inequality.
    Feasible(Vec<BigRational>),
    /// Nonnegative, nonzero integer multipliers y with Σ y_k a_k = 0, so that
    /// summing the inequalities yields 0 > 0.
    Infeasible(Vec<BigInt>),
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<BigInt>,
    /// Multipliers over the original rows producing `coeffs`.
    origin: Vec<BigInt>,
}

impl Row {
    fn normalize(mut self) -> Row {
        let g = self
            .coeffs
            .iter()
            .chain(&self.origin)
            .fold(BigInt::zero(), |g, x| g.gcd(x));
        if !g.is_zero() && !g.is_one() {
            for x in self.coeffs.iter_mut().chain(self.origin.iter_mut()) {
                *x /= &g;
            }
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

fn dedupe(rows: Vec<Row>) -> Vec<Row> {
    let mut seen = HashSet::new();
    rows.into_iter()
        .filter(|r| {
            // Positive rescaling of the coefficient part keeps the same half-space.
            let g = r.coeffs.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if g.is_zero() {
                return true;
            }
            seen.insert(r.coeffs.iter().map(|x| x / &g).collect::<Vec<BigInt>>())
        })
        .collect()
}

/// Decides feasibility of `{ a_k · t > 0 }` over ℚ^dim.
pub fn solve_strict(rows: &[Vec<BigInt>], dim: usize) -> StrictOutcome {
    let m = rows.len();
    let mut sys: Vec<Row> = rows
        .iter()
        .enumerate()
        .map(|(k, a)| {
            assert_eq!(a.len(), dim, "row width");
            let mut origin = vec![BigInt::zero(); m];
            origin[k] = BigInt::one();
            Row {
                coeffs: a.clone(),
                origin,
            }
            .normalize()
        })
        .collect();
    sys = dedupe(sys);

    // stages[k] is the system in variables 0..=k before eliminating k.
    let mut stages: Vec<Vec<Row>> = Vec::with_capacity(dim);
    for var in (0..dim).rev() {
        if let Some(bad) = sys.iter().find(|r| r.is_zero()) {
            return StrictOutcome::Infeasible(bad.origin.clone());
        }
        stages.push(sys.clone());
        let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), Vec::new());
        for r in sys {
            match r.coeffs[var].sign() {
                num_bigint::Sign::Plus => pos.push(r),
                num_bigint::Sign::Minus => neg.push(r),
                num_bigint::Sign::NoSign => keep.push(r),
            }
        }
        for p in &pos {
            for n in &neg {
                let a = -n.coeffs[var].clone();
                let b = p.coeffs[var].clone();
                let coeffs = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .map(|(x, y)| &a * x + &b * y)
                    .collect();
                let origin = p
                    .origin
                    .iter()
                    .zip(&n.origin)
                    .map(|(x, y)| &a * x + &b * y)
                    .collect();
                keep.push(Row { coeffs, origin }.normalize());
            }
        }
        sys = dedupe(keep);
    }
    if let Some(bad) = sys.iter().find(|r| r.is_zero()) {
        return StrictOutcome::Infeasible(bad.origin.clone());
    }
    stages.reverse();

    let mut t: Vec<BigRational> = vec![BigRational::zero(); dim];
    for (var, stage) in stages.iter().enumerate() {
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for r in stage {
            let c = BigRational::from_integer(r.coeffs[var].clone());
            if c.is_zero() {
                continue;
            }
            let rest: BigRational = (0..var)
                .map(|k| BigRational::from_integer(r.coeffs[k].clone()) * &t[k])
                .sum();
            let bound = -rest / &c;
            if c.is_positive() {
                lo = Some(match lo {
                    Some(l) if l >= bound => l,
                    _ => bound,
                });
            } else {
                hi = Some(match hi {
                    Some(h) if h <= bound => h,
                    _ => bound,
                });
            }
        }
        t[var] = pick_inside(lo.as_ref(), hi.as_ref());
    }
    StrictOutcome::Feasible(t)
}

/// A small value strictly inside (lo, hi), preferring 0 and integers.
fn pick_inside(lo: Option<&BigRational>, hi: Option<&BigRational>) -> BigRational {
    let zero = BigRational::zero();
    let inside = |x: &BigRational| lo.is_none_or(|l| x > l) && hi.is_none_or(|h| x < h);
    if inside(&zero) {
        return zero;
    }
    let one = BigRational::one();
    match (lo, hi) {
        (Some(l), None) => l.floor() + one,
        (None, Some(h)) => h.ceil() - one,
        (Some(l), Some(h)) => {
            let up = l.floor() + &one;
            if &up < h {
                return up;
            }
            let down = h.ceil() - &one;
            if &down > l {
                return down;
            }
            (l + h) / BigRational::from_integer(BigInt::from(2))
        }
        (None, None) => zero,
    }
}

/// Checks that y ≥ 0, y ≠ 0 and Σ y_k a_k = 0.
pub fn certificate_holds(rows: &[Vec<BigInt>], dim: usize, y: &[BigInt]) -> bool {
    if y.len() != rows.len() || y.iter().any(|v| v.is_negative()) || y.iter().all(Zero::is_zero) {
        return false;
    }
    (0..dim).all(|j| {
        rows.iter()
            .zip(y)
            .map(|(a, v)| &a[j] * v)
            .sum::<BigInt>()
            .is_zero()
    })
}

pub fn witness_holds(rows: &[Vec<BigInt>], t: &[BigRational]) -> bool {
    rows.iter().all(|a| {
        a.iter()
            .zip(t)
            .map(|(x, y)| BigRational::from_integer(x.clone()) * y)
            .sum::<BigRational>()
            .is_positive()
    })
}

/// Rescales a rational vector to a primitive integer vector with the same direction.
pub fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Integer basis of the rational nullspace of `rows` (each row has `dim` entries),
/// returned as basis vectors.
pub fn nullspace_basis(rows: &[Vec<i64>], dim: usize) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..dim {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][c].recip();
        for x in m[rank].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != rank && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[rank].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    (0..dim)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![BigRational::zero(); dim];
            v[free] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][free].clone();
            }
            primitive(&v)
        })
        .collect()
}
