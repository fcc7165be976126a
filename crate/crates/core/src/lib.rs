//! Exact enumeration, counting and verification of fixed k-omino towers.
//!
//! A tower is a stack of horizontal `1 x k` blocks on a contiguous base,
//! every block resting on a block one level below. The crate enumerates
//! towers exhaustively, counts them in closed form, and checks the counting
//! formulas, their generating function and a reduction bijection against
//! each other.

pub mod bijection;
pub mod count;
pub mod enumerate;
pub mod error;
pub mod hyperid;
pub mod series;
pub mod tower;
pub mod verify;

pub use count::{ExactInteger, ExactRational};
pub use enumerate::TowerClassParams;
pub use error::{Error, Result};
pub use tower::{Block, Tower};
pub use verify::VerificationReport;
