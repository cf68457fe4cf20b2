//! The fiber polyhedron `P_δ` and its vertices.
//!
//! `P_δ` is the set of nonnegative `χ̃ ∈ ℝ^{2n}` whose restriction to `G` is
//! `δ`. Each integral vertex `v` gives a Koszul generator monomial
//! `f̃_v = ∏ x_j^{v_j} ∏ ∂_j^{v_{n+j}}` of weight `δ`.

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::intmat::{solve_rational, ZMatrix};
use crate::lattice::{Character, LatticeError, TildeCharacter, TorusAction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("non-unimodular input slipped through: basic solution {0} is not integral")]
    NonIntegralVertex(String),
    #[error("empty polyhedron: P_delta has no vertices")]
    EmptyPolyhedron,
    #[error("no admissible delta with max-norm <= {radius}; increase radius")]
    NoAdmissibleDelta { radius: i64 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberPolyhedron {
    action: TorusAction,
    delta: Character,
    /// `d × 2n` matrix `[Aᵀ | -Aᵀ]`.
    equalities: Vec<Vec<i64>>,
}

/// A vertex of `P_δ`; coordinates are nonnegative integers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex(pub Vec<i64>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexMonomial {
    pub x_exponents: Vec<u32>,
    pub d_exponents: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NStats {
    pub per_vertex: Vec<u64>,
    pub n_delta: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinN {
    pub delta: Character,
    pub n_value: u64,
    pub radius: i64,
    pub admissible_scanned: usize,
}

pub fn build_p(action: &TorusAction, delta: &Character) -> Result<FiberPolyhedron, LatticeError> {
    action.check_character(delta)?;
    let (n, d) = (action.n(), action.d());
    let equalities = (0..d)
        .map(|k| {
            (0..2 * n)
                .map(|c| if c < n { action.weight(c)[k] } else { -action.weight(c - n)[k] })
                .collect()
        })
        .collect();
    Ok(FiberPolyhedron {
        action: action.clone(),
        delta: delta.clone(),
        equalities,
    })
}

impl FiberPolyhedron {
    pub fn action(&self) -> &TorusAction {
        &self.action
    }

    pub fn delta(&self) -> &Character {
        &self.delta
    }

    pub fn equalities(&self) -> &[Vec<i64>] {
        &self.equalities
    }

    pub fn rhs(&self) -> &[i64] {
        &self.delta.0
    }

    pub fn contains(&self, point: &[i64]) -> bool {
        point.len() == 2 * self.action.n()
            && point.iter().all(|&x| x >= 0)
            && self
                .equalities
                .iter()
                .zip(self.rhs())
                .all(|(row, &b)| row.iter().zip(point).map(|(a, x)| a * x).sum::<i64>() == b)
    }
}

/// All vertices of `P_δ`, sorted and duplicate-free. Enumerates column bases
/// of the equality matrix and keeps the nonnegative basic solutions.
pub fn enumerate_vertices(poly: &FiberPolyhedron) -> Result<Vec<Vertex>, PolytopeError> {
    let d = poly.equalities.len();
    let width = 2 * poly.action.n();
    let m = ZMatrix::from_i64(&poly.equalities, width);
    let rhs: Vec<BigInt> = poly.rhs().iter().map(|&x| BigInt::from(x)).collect();
    let mut out = Vec::new();
    for basis in (0..width).combinations(d) {
        let sub = m.select_cols(&basis);
        let Some(sol) = solve_rational(&sub, &rhs) else {
            continue;
        };
        if sol.iter().any(|x| x.is_negative()) {
            continue;
        }
        if sol.iter().any(|x| !x.is_integer()) {
            return Err(PolytopeError::NonIntegralVertex(format!(
                "[{}] on columns {:?}",
                sol.iter().join(", "),
                basis
            )));
        }
        let mut coords = vec![0i64; width];
        for (&c, x) in basis.iter().zip(&sol) {
            coords[c] = x.to_integer().to_i64().expect("vertex coordinate fits i64");
        }
        out.push(Vertex(coords));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Convenience: `enumerate_vertices(build_p(action, delta))`.
pub fn vertices_of(action: &TorusAction, delta: &Character) -> Result<Vec<Vertex>, PolytopeError> {
    enumerate_vertices(&build_p(action, delta)?)
}

impl Vertex {
    pub fn n(&self) -> usize {
        self.0.len() / 2
    }

    pub fn x_exponent(&self, j: usize) -> u32 {
        self.0[j] as u32
    }

    pub fn d_exponent(&self, j: usize) -> u32 {
        self.0[self.n() + j] as u32
    }

    pub fn as_tilde(&self) -> TildeCharacter {
        TildeCharacter(self.0.clone())
    }

    /// Coordinates with `v_j ≠ v_{n+j}`.
    pub fn support_difference(&self) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.0[j] != self.0[self.n() + j]).collect()
    }

    /// Bitmask of nonzero coordinates in `𝔸^{2n}`.
    pub fn support_mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .fold(0u64, |m, (i, _)| m | (1 << i))
    }
}

pub fn vertex_monomial(v: &Vertex) -> VertexMonomial {
    let n = v.n();
    VertexMonomial {
        x_exponents: (0..n).map(|j| v.x_exponent(j)).collect(),
        d_exponents: (0..n).map(|j| v.d_exponent(j)).collect(),
    }
}

impl VertexMonomial {
    pub fn is_constant(&self) -> bool {
        self.x_exponents.iter().chain(&self.d_exponents).all(|&e| e == 0)
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (j, &e) in self.x_exponents.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("x{}", j + 1)),
                _ => parts.push(format!("x{}^{}", j + 1, e)),
            }
        }
        for (j, &e) in self.d_exponents.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("d{}", j + 1)),
                _ => parts.push(format!("d{}^{}", j + 1, e)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// `N_i = max_j v_i[j]` and `N(δ) = max_i N_i`.
pub fn n_stats(vertices: &[Vertex]) -> Result<NStats, PolytopeError> {
    if vertices.is_empty() {
        return Err(PolytopeError::EmptyPolyhedron);
    }
    let per_vertex: Vec<u64> = vertices
        .iter()
        .map(|v| v.0.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0))
        .collect();
    let n_delta = *per_vertex.iter().max().unwrap();
    Ok(NStats { per_vertex, n_delta })
}

/// Minimises `N(δ)` over admissible `δ` with `‖δ‖_∞ ≤ radius`. Ties go to
/// the lexicographically smallest `δ`.
pub fn search_min_n(action: &TorusAction, radius: i64) -> Result<MinN, PolytopeError> {
    let mut best: Option<(u64, Character)> = None;
    let mut scanned = 0;
    for coords in (0..action.d()).map(|_| -radius..=radius).multi_cartesian_product() {
        let delta = Character(coords);
        if !action.is_admissible_parameter(&delta) {
            continue;
        }
        let vertices = vertices_of(action, &delta)?;
        let Ok(stats) = n_stats(&vertices) else {
            continue;
        };
        scanned += 1;
        if best.as_ref().is_none_or(|(n, _)| stats.n_delta < *n) {
            best = Some((stats.n_delta, delta));
        }
    }
    match best {
        Some((n_value, delta)) => Ok(MinN {
            delta,
            n_value,
            radius,
            admissible_scanned: scanned,
        }),
        None => Err(PolytopeError::NoAdmissibleDelta { radius }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_action;

    fn diagonal() -> TorusAction {
        build_action(&[vec![1], vec![1]]).unwrap()
    }

    fn triangle() -> TorusAction {
        build_action(&[vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap()
    }

    #[test]
    fn equality_system() {
        let p = build_p(&diagonal(), &Character(vec![1])).unwrap();
        assert_eq!(p.equalities(), &[vec![1, 1, -1, -1]]);
        assert_eq!(p.rhs(), &[1]);
        let p0 = build_p(&diagonal(), &Character(vec![0])).unwrap();
        assert_eq!(p0.equalities(), p.equalities());
        assert_eq!(p0.rhs(), &[0]);
        let t = build_p(&triangle(), &Character(vec![1, 1])).unwrap();
        assert_eq!(t.equalities(), &[vec![1, 0, 1, -1, 0, -1], vec![0, 1, 1, 0, -1, -1]]);
        assert!(build_p(&triangle(), &Character(vec![1])).is_err());
    }

    #[test]
    fn desk_vertices() {
        let v = vertices_of(&diagonal(), &Character(vec![1])).unwrap();
        assert_eq!(v, vec![Vertex(vec![0, 1, 0, 0]), Vertex(vec![1, 0, 0, 0])]);
        let v2 = vertices_of(&diagonal(), &Character(vec![2])).unwrap();
        assert_eq!(v2, vec![Vertex(vec![0, 2, 0, 0]), Vertex(vec![2, 0, 0, 0])]);
        let t = vertices_of(&triangle(), &Character(vec![1, 1])).unwrap();
        assert_eq!(
            t,
            vec![Vertex(vec![0, 0, 1, 0, 0, 0]), Vertex(vec![1, 1, 0, 0, 0, 0])]
        );
        let z = vertices_of(&diagonal(), &Character(vec![0])).unwrap();
        assert_eq!(z, vec![Vertex(vec![0, 0, 0, 0])]);
    }

    #[test]
    fn monomials() {
        let m = vertex_monomial(&Vertex(vec![1, 0, 0, 0]));
        assert_eq!(m.x_exponents, vec![1, 0]);
        assert_eq!(m.d_exponents, vec![0, 0]);
        assert_eq!(m.render(), "x1");
        assert_eq!(vertex_monomial(&Vertex(vec![0, 0, 1, 0])).render(), "d1");
        assert!(vertex_monomial(&Vertex(vec![0; 4])).is_constant());
    }

    #[test]
    fn n_statistics() {
        let v = vertices_of(&diagonal(), &Character(vec![1])).unwrap();
        assert_eq!(n_stats(&v).unwrap(), NStats { per_vertex: vec![1, 1], n_delta: 1 });
        let v2 = vertices_of(&diagonal(), &Character(vec![2])).unwrap();
        assert_eq!(n_stats(&v2).unwrap().n_delta, 2);
        assert_eq!(n_stats(&[Vertex(vec![0; 4])]).unwrap().n_delta, 0);
        assert_eq!(n_stats(&[]), Err(PolytopeError::EmptyPolyhedron));
    }

    #[test]
    fn min_n_search() {
        let r = search_min_n(&diagonal(), 3).unwrap();
        assert_eq!((r.delta.clone(), r.n_value), (Character(vec![-1]), 1));
        assert_eq!(search_min_n(&diagonal(), 1).unwrap().n_value, 1);
        let t = search_min_n(&triangle(), 2).unwrap();
        assert_eq!(t.n_value, 2);
        assert_eq!(t.delta, Character(vec![-2, -1]));
        let t5 = search_min_n(&triangle(), 5).unwrap();
        assert_eq!((t5.delta, t5.n_value), (Character(vec![-2, -1]), 2));
        let t1 = search_min_n(&triangle(), 1).unwrap();
        assert_eq!((t1.delta, t1.n_value), (Character(vec![-1, 1]), 2));
        assert_eq!(
            search_min_n(&triangle(), 0),
            Err(PolytopeError::NoAdmissibleDelta { radius: 0 })
        );
    }

    #[test]
    fn non_unimodular_is_reported() {
        // pi = [[2,-1]]; delta = 1 gives the basic solution x2 = 1/2.
        let skew = build_action(&[vec![1], vec![2]]).unwrap();
        let err = vertices_of(&skew, &Character(vec![1])).unwrap_err();
        assert!(matches!(err, PolytopeError::NonIntegralVertex(_)));
    }
}
