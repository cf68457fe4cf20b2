//! Exact localization certificates for hypertoric quantum Hamiltonian
//! reductions in characteristic `p`.
//!
//! The modules follow the computation: [`lattice`] (torus actions, walls),
//! [`polytope`] (the fiber polyhedron and its vertices), [`weyl`] (normal
//! ordering into Euler factors), [`morita`] (common roots, bad sets,
//! certificates and their verification), [`stability`] (unstable locus and
//! Koszul data) and [`io`] (input files, reports, the CLI dispatcher).
//!
//! ```
//! use hyperloc::lattice::{build_action, Character};
//! use hyperloc::morita::{CertContext, Strategy};
//!
//! let action = build_action(&[vec![1], vec![1]]).unwrap();
//! let ctx = CertContext::new(&action, &Character(vec![1]), 7).unwrap();
//! assert_eq!(ctx.certified_count(Strategy::Direct), 2);
//! ```

pub mod fp;
pub mod io;
pub mod lattice;
pub mod morita;
pub mod oracle;
pub mod polytope;
pub mod stability;
pub mod weyl;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/polytope.md")]
    mod polytope {}
    #[doc = include_str!("../../../book/src/weyl.md")]
    mod weyl {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
