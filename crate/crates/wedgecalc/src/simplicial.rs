//! Simplicial complexes on `[m]` and the homology series of polyhedral
//! products `(X,∗)^K`.
//!
//! Faces are bitmasks (bit `i-1` is vertex `i`); all input and output is
//! 1-indexed.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::SpaceExpr;
use crate::series::{reduced_series, FieldTag, GradedSeries, SeriesError};

pub const MAX_VERTICES: usize = 20;

pub type Face = u32;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SimplicialError {
    #[error("at most {MAX_VERTICES} vertices are supported, got {0}")]
    TooManyVertices(usize),
    #[error("vertex {vertex} is outside [1, {m}]")]
    VertexOutOfRange { vertex: usize, m: usize },
    #[error("face {0} has a subset that is not a face")]
    NotDownwardClosed(String),
    #[error("{0} is not a missing face")]
    NotAMissingFace(String),
    #[error("missing face {0} has fewer than two vertices")]
    MissingFaceTooSmall(String),
    #[error("expected {expected} spaces, got {found}")]
    WrongSpaceCount { expected: usize, found: usize },
    #[error("entry {0} is not a suspension")]
    NotASuspension(String),
    #[error("invalid complex JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub fn face_vertices(f: Face) -> Vec<usize> {
    (0..32).filter(|i| f & (1 << i) != 0).map(|i| i + 1).collect()
}

pub fn face_string(f: Face) -> String {
    let vs: Vec<String> = face_vertices(f).iter().map(ToString::to_string).collect();
    format!("{{{}}}", vs.join(","))
}

fn face_mask(vertices: &[usize], m: usize) -> Result<Face, SimplicialError> {
    vertices.iter().try_fold(0, |acc, &v| {
        if v == 0 || v > m {
            Err(SimplicialError::VertexOutOfRange { vertex: v, m })
        } else {
            Ok(acc | 1 << (v - 1))
        }
    })
}

fn check_m(m: usize) -> Result<(), SimplicialError> {
    if m > MAX_VERTICES {
        Err(SimplicialError::TooManyVertices(m))
    } else {
        Ok(())
    }
}

/// Iterates over all submasks of `f`, including `0` and `f`.
fn submasks(f: Face) -> impl Iterator<Item = Face> {
    let mut next = Some(f);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & f) };
        Some(cur)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    m: usize,
    faces: BTreeSet<Face>,
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    m: usize,
    facets: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// A complex from an explicit face list; the empty face is added.
    pub fn new(m: usize, faces: &[Vec<usize>]) -> Result<SimplicialComplex, SimplicialError> {
        check_m(m)?;
        let mut set = BTreeSet::from([0]);
        for f in faces {
            set.insert(face_mask(f, m)?);
        }
        for &f in &set {
            for v in 0..m {
                if f & (1 << v) != 0 && !set.contains(&(f & !(1 << v))) {
                    return Err(SimplicialError::NotDownwardClosed(face_string(f)));
                }
            }
        }
        Ok(SimplicialComplex { m, faces: set })
    }

    /// The downward closure of `facets`.
    pub fn from_facets(m: usize, facets: &[Vec<usize>]) -> Result<SimplicialComplex, SimplicialError> {
        check_m(m)?;
        let mut faces = BTreeSet::from([0]);
        for f in facets {
            faces.extend(submasks(face_mask(f, m)?));
        }
        Ok(SimplicialComplex { m, faces })
    }

    /// `m` isolated vertices.
    pub fn points(m: usize) -> SimplicialComplex {
        let facets: Vec<Vec<usize>> = (1..=m).map(|v| vec![v]).collect();
        SimplicialComplex::from_facets(m, &facets).expect("valid")
    }

    /// The full simplex on `[m]`.
    pub fn simplex(m: usize) -> SimplicialComplex {
        SimplicialComplex::from_facets(m, &[(1..=m).collect()]).expect("valid")
    }

    /// The boundary of the simplex on `[m]`.
    pub fn simplex_boundary(m: usize) -> SimplicialComplex {
        let facets: Vec<Vec<usize>> =
            (1..=m).map(|skip| (1..=m).filter(|&v| v != skip).collect()).collect();
        SimplicialComplex::from_facets(m, &facets).expect("valid")
    }

    pub fn from_json(text: &str) -> Result<SimplicialComplex, SimplicialError> {
        let raw: ComplexJson =
            serde_json::from_str(text).map_err(|e| SimplicialError::Json(e.to_string()))?;
        SimplicialComplex::from_facets(raw.m, &raw.facets)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ComplexJson {
            m: self.m,
            facets: self.facets(),
        })
        .expect("serializable")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn faces(&self) -> impl Iterator<Item = Face> + '_ {
        self.faces.iter().copied()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn contains(&self, vertices: &[usize]) -> bool {
        face_mask(vertices, self.m).is_ok_and(|f| self.faces.contains(&f))
    }

    pub fn contains_mask(&self, f: Face) -> bool {
        self.faces.contains(&f)
    }

    /// Maximal faces, sorted.
    pub fn facets(&self) -> Vec<Vec<usize>> {
        self.faces
            .iter()
            .filter(|&&f| f != 0)
            .filter(|&&f| (0..self.m).all(|v| f & (1 << v) != 0 || !self.faces.contains(&(f | 1 << v))))
            .map(|&f| face_vertices(f))
            .collect()
    }

    /// Minimal non-faces: `σ ∉ K` with every proper subset in `K`.
    pub fn missing_faces(&self) -> Vec<Vec<usize>> {
        let mut out = BTreeSet::new();
        for &f in &self.faces {
            for v in 0..self.m {
                let s = f | 1 << v;
                if s == f || self.faces.contains(&s) {
                    continue;
                }
                if (0..self.m)
                    .filter(|u| s & (1 << u) != 0)
                    .all(|u| self.faces.contains(&(s & !(1 << u))))
                {
                    out.insert(s);
                }
            }
        }
        sorted_faces(out)
    }

    /// `K ∪ S` for a set `S` of missing faces of `K`.
    pub fn add_faces(&self, s: &[Vec<usize>]) -> Result<SimplicialComplex, SimplicialError> {
        let missing: BTreeSet<Face> = self
            .missing_faces()
            .iter()
            .map(|f| face_mask(f, self.m))
            .collect::<Result<_, _>>()?;
        let mut faces = self.faces.clone();
        for f in s {
            let mask = face_mask(f, self.m)?;
            if !missing.contains(&mask) {
                return Err(SimplicialError::NotAMissingFace(face_string(mask)));
            }
            faces.insert(mask);
        }
        Ok(SimplicialComplex { m: self.m, faces })
    }

    /// Faces of dimension at most `t`.
    pub fn skeleton(&self, t: usize) -> SimplicialComplex {
        SimplicialComplex {
            m: self.m,
            faces: self.faces.iter().copied().filter(|f| f.count_ones() as usize <= t + 1).collect(),
        }
    }

    /// `K_I`, kept on the same vertex set so that vertices outside `I` are ghosts.
    pub fn full_subcomplex(&self, vertices: &[usize]) -> Result<SimplicialComplex, SimplicialError> {
        let mask = face_mask(vertices, self.m)?;
        Ok(SimplicialComplex {
            m: self.m,
            faces: self.faces.iter().copied().filter(|f| f & !mask == 0).collect(),
        })
    }
}

impl fmt::Display for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let facets: Vec<String> = self
            .facets()
            .iter()
            .map(|fc| format!("{{{}}}", fc.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "K[m={}; {}]", self.m, facets.join(" "))
    }
}

fn sorted_faces(set: BTreeSet<Face>) -> Vec<Vec<usize>> {
    let mut v: Vec<Vec<usize>> = set.into_iter().map(face_vertices).collect();
    v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    v
}

/// Parses a face list such as `[[1,2],[2,3]]`.
pub fn parse_face_list(text: &str) -> Result<Vec<Vec<usize>>, SimplicialError> {
    serde_json::from_str(text).map_err(|e| SimplicialError::Json(e.to_string()))
}

fn check_spaces(k: &SimplicialComplex, spaces: &[SpaceExpr]) -> Result<(), SimplicialError> {
    if spaces.len() != k.m {
        return Err(SimplicialError::WrongSpaceCount {
            expected: k.m,
            found: spaces.len(),
        });
    }
    Ok(())
}

fn reduced_all(
    spaces: &[SpaceExpr],
    field: FieldTag,
    cap: usize,
) -> Result<Vec<GradedSeries>, SimplicialError> {
    Ok(spaces.iter().map(|x| reduced_series(x, field, cap)).collect::<Result<_, _>>()?)
}

fn face_product(f: Face, xs: &[GradedSeries], field: FieldTag, cap: usize) -> GradedSeries {
    face_vertices(f).iter().fold(GradedSeries::one(field, cap), |acc, &v| {
        acc.mul(&xs[v - 1]).expect("same field")
    })
}

/// Reduced homology series of `(X,∗)^K`: the sum over nonempty faces of the
/// products of the reduced entry series.
pub fn polyprod_series(
    k: &SimplicialComplex,
    spaces: &[SpaceExpr],
    field: FieldTag,
    cap: usize,
) -> Result<GradedSeries, SimplicialError> {
    check_spaces(k, spaces)?;
    let xs = reduced_all(spaces, field, cap)?;
    let mut acc = GradedSeries::zero(field, cap);
    for f in k.faces().filter(|&f| f != 0) {
        acc = acc.add(&face_product(f, &xs, field, cap))?;
    }
    Ok(acc)
}

/// Sum over `σ ∈ S` of the products of reduced entry series.
pub fn missing_face_sum(
    s: &[Vec<usize>],
    spaces: &[SpaceExpr],
    field: FieldTag,
    cap: usize,
) -> Result<GradedSeries, SimplicialError> {
    let xs = reduced_all(spaces, field, cap)?;
    let mut acc = GradedSeries::zero(field, cap);
    for f in s {
        acc = acc.add(&face_product(face_mask(f, spaces.len())?, &xs, field, cap))?;
    }
    Ok(acc)
}

/// `A = ∨_{σ∈S} Σ^{k-2} X_{i_1} ∧ ... ∧ X_{i_k}`, with `k = |σ|`; no
/// suspension node is emitted when `k = 2`.
pub fn missing_face_wedge(
    k: &SimplicialComplex,
    s: &[Vec<usize>],
    spaces: &[SpaceExpr],
) -> Result<SpaceExpr, SimplicialError> {
    check_spaces(k, spaces)?;
    let mut summands = Vec::new();
    for f in s {
        let mask = face_mask(f, k.m)?;
        let vs = face_vertices(mask);
        if vs.len() < 2 {
            return Err(SimplicialError::MissingFaceTooSmall(face_string(mask)));
        }
        let smash = SpaceExpr::Smash(vs.iter().map(|&v| spaces[v - 1].clone()).collect());
        summands.push(match vs.len() {
            2 => smash,
            k => SpaceExpr::suspend(smash, k as u32 - 2),
        });
    }
    Ok(match summands.len() {
        0 => SpaceExpr::Point,
        1 => summands.pop().expect("one summand"),
        _ => SpaceExpr::Wedge(summands),
    })
}

/// Desuspends every polyhedral-product entry.
pub fn desuspend_entries(spaces: &[SpaceExpr]) -> Result<Vec<SpaceExpr>, SimplicialError> {
    spaces
        .iter()
        .map(|x| x.desuspend().ok_or_else(|| SimplicialError::NotASuspension(x.render())))
        .collect()
}

/// `∏ 1/(1 - x̃_i) · reduced(ΣA)`.
pub fn polywh_domain_series(
    spaces: &[SpaceExpr],
    a: &SpaceExpr,
    field: FieldTag,
    cap: usize,
) -> Result<GradedSeries, SimplicialError> {
    let mut acc = reduced_series(&SpaceExpr::suspend(a.clone(), 1), field, cap)?;
    for x in reduced_all(spaces, field, cap)? {
        let geom = GradedSeries::one(field, cap).sub(&x)?.invert()?;
        acc = acc.mul(&geom)?;
    }
    Ok(acc)
}

/// The wedge `∨_k ∨_{i_1 ≤ ... ≤ i_k} X_{i_1} ∧ ... ∧ X_{i_k} ∧ ΣA`, listed
/// summand by summand up to `cap`, with its series.
pub fn polywh_domain_enumerated(
    spaces: &[SpaceExpr],
    a: &SpaceExpr,
    field: FieldTag,
    cap: usize,
) -> Result<(GradedSeries, Vec<SpaceExpr>), SimplicialError> {
    let sigma_a = SpaceExpr::suspend(a.clone(), 1);
    let base = reduced_series(&sigma_a, field, cap)?;
    let xs = reduced_all(spaces, field, cap)?;
    let mut total = GradedSeries::zero(field, cap);
    let mut summands = Vec::new();
    let Some(base_low) = base.lowest_degree() else {
        return Ok((total, summands));
    };
    let lows: Vec<Option<usize>> = xs.iter().map(GradedSeries::lowest_degree).collect();
    for seq in monotone_sequences(&lows, base_low, cap) {
        let mut factors: Vec<SpaceExpr> = seq.iter().map(|&i| spaces[i].clone()).collect();
        factors.push(sigma_a.clone());
        summands.push(if factors.len() == 1 {
            sigma_a.clone()
        } else {
            SpaceExpr::Smash(factors)
        });
    }
    for s in &summands {
        total = total.add(&reduced_series(s, field, cap)?)?;
    }
    Ok((total, summands))
}

/// All sequences `i_1 ≤ ... ≤ i_k` (including the empty one) whose lowest
/// degrees `lows[i_j]`, added to `base`, stay within `cap`. Indices with no
/// nonzero degree, or a zero lowest degree, are skipped.
pub fn monotone_sequences(lows: &[Option<usize>], base: usize, cap: usize) -> Vec<Vec<usize>> {
    fn go(lows: &[Option<usize>], start: usize, low: usize, cap: usize, seq: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(seq.clone());
        for i in start..lows.len() {
            let Some(l) = lows[i] else { continue };
            if l == 0 || low + l > cap {
                continue;
            }
            seq.push(i);
            go(lows, i, low + l, cap, seq, out);
            seq.pop();
        }
    }
    let mut out = Vec::new();
    if base <= cap {
        go(lows, 0, base, cap, &mut Vec::new(), &mut out);
    }
    out
}
