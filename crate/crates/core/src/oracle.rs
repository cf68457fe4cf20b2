//! Cross-checks between independent computation paths.

use serde::{Deserialize, Serialize};

use crate::morita::{common_roots_brute, common_roots_solve, systems_for, Direction, GuardExceeded};
use crate::polytope::Vertex;
use crate::weyl::{
    factor_system_fg, factor_system_gf, f_tilde, g_tilde, normal_order_dx, normal_order_xd, weyl_multiply,
    CoefficientDomain, WeylElement,
};

const Z: CoefficientDomain = CoefficientDomain::Integer;

/// `xᵐ∂ᵐ` and `∂ᵐxᵐ` multiplied out against the expanded root products.
pub fn check_normal_ordering(m: u32) -> bool {
    let x = WeylElement::x(1, Z, 0, m);
    let d = WeylElement::d(1, Z, 0, m);
    weyl_multiply(&x, &d).ok() == Some(normal_order_xd(m).to_weyl(Z))
        && weyl_multiply(&d, &x).ok() == Some(normal_order_dx(m).to_weyl(Z))
}

/// The factored form of `f̃ᵃg̃ᵃ` (or `g̃ᵃf̃ᵃ`) against the product itself.
pub fn check_factor_system(v: &Vertex, a: u32, direction: Direction) -> bool {
    let f = f_tilde(v, a, Z);
    let g = g_tilde(v, a, Z);
    let (product, sys) = match direction {
        Direction::Fg => (weyl_multiply(&f, &g), factor_system_fg(v, a)),
        Direction::Gf => (weyl_multiply(&g, &f), factor_system_gf(v, a)),
    };
    product.ok() == Some(sys.to_weyl(Z))
}

/// Box solver against full enumeration for one `(vertices, a, direction, p)`.
pub fn check_solver(
    vertices: &[Vertex],
    a: u32,
    direction: Direction,
    n: usize,
    p: u64,
    guard: u64,
) -> Result<bool, GuardExceeded> {
    let systems = systems_for(vertices, a, direction);
    let brute = common_roots_brute(&systems, n, p, guard)?;
    Ok(common_roots_solve(&systems, n, p).points() == brute)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}
