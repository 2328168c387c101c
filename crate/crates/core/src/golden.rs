//! Replays the embedded worked example and diffs it against the stored values.

use std::sync::Arc;

use serde::Deserialize;

use crate::error::Result;
use crate::lattice::CharVec;
use crate::rootsystem::RootDatum;
use crate::sections::{
    calibrated_reading, char_section_verdict_with, gln_certificate, purity_report, NAlphaReading,
    PurityOptions,
};
use crate::strata::{hasse_diagram_with, ClosureDirection};
use crate::subset::SimpleSet;
use crate::zipdatum::{zip_from_cochar, TypeSpec};

const GOLDEN: &str = include_str!("../golden/golden.json");

#[derive(Deserialize)]
struct Golden {
    c3: C3Golden,
    gln: GlnGolden,
}

#[derive(Deserialize)]
struct C3Golden {
    preset: String,
    #[serde(rename = "I")]
    i: SimpleSet,
    frame: FrameGolden,
    generators: std::collections::BTreeMap<String, String>,
    strata: Vec<(String, usize)>,
    edges: Vec<(String, String)>,
    n_alpha: NAlphaGolden,
    purity: PurityGolden,
}

#[derive(Deserialize)]
struct FrameGolden {
    z: String,
    w0: String,
    w0_length: usize,
    w0_levi: String,
    w0_levi_length: usize,
}

#[derive(Deserialize)]
struct NAlphaGolden {
    w: String,
    chi: Vec<i64>,
    neighbors: Vec<String>,
    values: Vec<RootValues>,
}

#[derive(Deserialize)]
struct RootValues {
    root: Vec<i64>,
    by_prime: Vec<(u64, i64)>,
}

#[derive(Deserialize)]
struct PurityGolden {
    p: u64,
    failing: Vec<String>,
}

#[derive(Deserialize)]
struct GlnGolden {
    blocks: Vec<usize>,
    q: u64,
    lambda: Vec<i64>,
    uniform: bool,
}

/// A deliberate convention change used to show that the golden data pins it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    TransposedClosure,
    Reading(NAlphaReading),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenCheck {
    pub name: String,
    pub pass: bool,
    /// Expected and actual values on mismatch.
    pub diff: Option<(String, String)>,
}

#[derive(Clone, Debug)]
pub struct GoldenReport {
    pub reading: NAlphaReading,
    pub checks: Vec<GoldenCheck>,
}

impl GoldenReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn check<T: PartialEq + std::fmt::Debug>(out: &mut Vec<GoldenCheck>, name: &str, want: T, got: T) {
    let pass = want == got;
    out.push(GoldenCheck {
        name: name.to_string(),
        pass,
        diff: (!pass).then(|| (format!("{want:?}"), format!("{got:?}"))),
    });
}

pub fn run_golden(mutation: Option<Mutation>) -> Result<GoldenReport> {
    let g: Golden = serde_json::from_str(GOLDEN).expect("embedded golden data parses");
    let reading = match mutation {
        Some(Mutation::Reading(r)) => r,
        _ => calibrated_reading(),
    };
    let dir = match mutation {
        Some(Mutation::TransposedClosure) => ClosureDirection::Transposed,
        _ => ClosureDirection::Standard,
    };
    let mut out = Vec::new();
    let c = &g.c3;
    let rd = Arc::new(RootDatum::preset(&c.preset)?);
    let z = zip_from_cochar(rd.clone(), &TypeSpec::Subset(c.i), 1, 2)?;
    let lab = |w: &crate::weyl::WeylElt| rd.label(w);

    let w0 = rd.longest();
    let wl = rd.longest_element(c.i);
    check(&mut out, "frame z", c.frame.z.clone(), lab(z.z()));
    check(
        &mut out,
        "w0",
        (c.frame.w0.clone(), c.frame.w0_length),
        (lab(&w0), w0.length()),
    );
    check(
        &mut out,
        "w0 of L",
        (c.frame.w0_levi.clone(), c.frame.w0_levi_length),
        (lab(&wl), wl.length()),
    );
    for (name, want) in &c.generators {
        let got = if name == "e" {
            lab(&rd.identity())
        } else {
            let i: usize = name
                .trim_start_matches('s')
                .parse()
                .expect("generator names are s<k>");
            lab(&rd.simple_reflection(i - 1))
        };
        check(&mut out, &format!("generator {name}"), want.clone(), got);
    }

    let poset = hasse_diagram_with(&z, dir);
    let mut strata: Vec<(String, usize)> = poset
        .strata
        .iter()
        .map(|s| (lab(&s.label), s.length))
        .collect();
    strata.sort();
    let mut want_strata = c.strata.clone();
    want_strata.sort();
    check(&mut out, "strata", want_strata, strata);
    let mut want_edges = c.edges.clone();
    want_edges.sort();
    let mut got_edges: Vec<(String, String)> = poset
        .edges
        .iter()
        .map(|&(a, b)| (lab(&poset.strata[a].label), lab(&poset.strata[b].label)))
        .collect();
    got_edges.sort();
    check(&mut out, "hasse edges", want_edges, got_edges);

    let na = &c.n_alpha;
    let w = rd.parse_label(&na.w)?;
    let ew = rd.lower_reflections(&w);
    let mut want_roots: Vec<Vec<i64>> = na.values.iter().map(|v| v.root.clone()).collect();
    want_roots.sort();
    let mut got_roots: Vec<Vec<i64>> = ew.iter().map(|&k| rd.root(k).vector.0.clone()).collect();
    got_roots.sort();
    check(&mut out, "E_w roots", want_roots, got_roots);
    let mut want_nb = na.neighbors.clone();
    want_nb.sort();
    let mut got_nb: Vec<String> = ew
        .iter()
        .map(|&k| lab(&rd.compose(&w, &rd.reflection(k))))
        .collect();
    got_nb.sort();
    check(&mut out, "E_w neighbors", want_nb, got_nb);
    let chi = CharVec(na.chi.clone());
    let primes: Vec<u64> = na
        .values
        .first()
        .map(|v| v.by_prime.iter().map(|x| x.0).collect())
        .unwrap_or_default();
    for p in primes {
        let zp = z.with_prime(p)?;
        let verdict = char_section_verdict_with(&zp, &w, &chi, reading)?;
        let want: Vec<(Vec<i64>, String)> = na
            .values
            .iter()
            .map(|v| {
                let val = v.by_prime.iter().find(|x| x.0 == p).map_or(0, |x| x.1);
                (v.root.clone(), val.to_string())
            })
            .collect();
        let got: Vec<(Vec<i64>, String)> = na
            .values
            .iter()
            .map(|v| {
                let val = rd
                    .root_index(&v.root)
                    .and_then(|k| verdict.multiplicities.iter().find(|m| m.0 == k))
                    .map_or_else(|| "absent".to_string(), |m| m.1.to_string());
                (v.root.clone(), val)
            })
            .collect();
        check(&mut out, &format!("n_alpha at p={p}"), want, got);
    }

    let zp = z.with_prime(c.purity.p)?;
    let rep = purity_report(
        &zp,
        &PurityOptions {
            reading: Some(reading),
            box_radius: 1,
            ..Default::default()
        },
    )?;
    let failing: Vec<String> = rep
        .cones
        .iter()
        .filter(|k| !k.feasible)
        .map(|k| lab(&k.label))
        .collect();
    check(
        &mut out,
        &format!("purity failures at p={}", c.purity.p),
        c.purity.failing.clone(),
        failing,
    );

    let gl = &g.gln;
    let cert = gln_certificate(&gl.blocks, gl.q)?;
    check(
        &mut out,
        "GL lambda",
        gl.lambda.clone(),
        cert.lambda.0.clone(),
    );
    let rep = purity_report(
        &cert.datum,
        &PurityOptions {
            reading: Some(reading),
            hints: vec![cert.lambda.clone()],
            box_radius: 1,
            ..Default::default()
        },
    )?;
    check(&mut out, "GL uniform", gl.uniform, rep.uniform);

    Ok(GoldenReport {
        reading,
        checks: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_passes() {
        let rep = run_golden(None).unwrap();
        for c in &rep.checks {
            assert!(c.pass, "{}: {:?}", c.name, c.diff);
        }
    }

    #[test]
    fn mutations_fail() {
        let t = run_golden(Some(Mutation::TransposedClosure)).unwrap();
        assert!(!t.pass());
        assert!(t.checks.iter().any(|c| c.name == "hasse edges" && !c.pass));
        let v = run_golden(Some(Mutation::Reading(NAlphaReading::Verbatim))).unwrap();
        assert!(!v.pass());
        assert!(v
            .checks
            .iter()
            .any(|c| c.name.starts_with("n_alpha") && !c.pass));
    }
}
