//! Exact enumeration of Carmichael numbers and the statistics built on top of
//! the enumerated sets.
//!
//! The crate is organised in layers. [`arith`] supplies the integer kernel:
//! overflow-safe modular arithmetic, deterministic primality for the full
//! `u64` range, factorization and a segmented sieve. [`carmichael`] defines
//! the Korselt predicate and the per-number invariants (λ, φ, index, Lehmer
//! index) together with a brute-force Fermat oracle that is deliberately
//! independent of everything else. The enumeration engines live in
//! [`search`] (depth-first over ascending prime prefixes) and [`largeprime`]
//! (arithmetic-progression scan when the largest prime factor dominates).
//! [`store`] persists result sets in a line format with checkpoint/resume,
//! and [`stats`] reduces result sets to the published tables.
//!
//! Everything is exact: counts and memberships come from integer arithmetic
//! only, and floating point appears solely in derived presentation columns.

pub mod arith;
pub mod carmichael;
pub mod largeprime;
pub mod search;
pub mod stats;
pub mod store;

pub use arith::{factorize, Factorization, Sieve};
pub use carmichael::{is_carmichael, CarmichaelRecord, LehmerIndex};
pub use search::SearchConfig;
