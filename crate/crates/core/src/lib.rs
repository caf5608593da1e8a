//! Exact enumeration of associative and semi-magic squares.
//!
//! The associative counter splits an odd-order square into a three-row
//! center block and mirrored outer row pairs, tabulates each side by its
//! partial column sums, and joins the two tables. The semi-magic counter
//! splits an even-order square into upper and lower halves the same way.
//! A backtracking oracle and direct block enumerators provide independent
//! ground truth; the runner partitions pair IDs into checkpointed jobs.

pub mod assoc;
pub mod error;
pub mod families;
pub mod numberset;
pub mod oracle;
pub mod perm;
pub mod profile;
pub mod runner;
pub mod semi;
pub mod square;

pub use error::{Error, Result};
pub use numberset::NumberSet;
pub use profile::{combine, Profile, ProfileTable};
pub use square::{
    apply_symmetric_perm, canonicalize, classify, complement_constant, is_canonical, magic_sum, orbit,
    symmetric_row_perms, DihedralOp, Square, SquareFlags, SymmetricPermutation,
};
