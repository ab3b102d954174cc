//! Signature toolkit built around sigma protocols with oblivious commitments.
//!
//! The library provides:
//!
//! * [`sigma`] — the generic three-move protocol abstraction: transcripts,
//!   honest runs, forked runs, and the oblivious-commitment interface
//!   (a commitment samplable from public randomness plus a randomness
//!   re-sampler, so a hash oracle can stand in for the verifier).
//! * [`gq`] — the Guillou-Quisquater protocol with a factoring trapdoor,
//!   the fast integer-arithmetic instantiation.
//! * [`lattice`] — a trapdoored Lyubashevsky-style identification
//!   scheme: gadget trapdoor key generation, discrete-Gaussian preimage
//!   sampling for oblivious commitments, and rejection-sampled responses.
//! * [`fs`] — the Fiat-Shamir transform of any such protocol into a
//!   signature scheme, with a compact `(r, rsp)` wire form.
//! * [`oracle`] — classical random-oracle machinery: lazy oracles,
//!   semi-constant distributions, and point reprogramming.
//! * [`reduction`] — an executable game pipeline that measures forgery,
//!   landing and extraction rates against the closed-form bounds.

pub mod bits;
pub mod error;
pub mod fs;
pub mod gq;
pub mod lattice;
pub mod oracle;
pub mod reduction;
pub mod sigma;
pub mod stats;

pub use bits::BitString;
pub use error::SigmaError;
