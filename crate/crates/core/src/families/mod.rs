//! Generators and closed-form spectral analyzers for the structured families
//! on which the inequality is proven: normal pairs, the d = 4 anti-diagonal
//! block family, and the scaled-permutation family.

mod family1;
mod family2;
mod normal;
mod scalar;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::ConstrainedPair;

pub use family1::{
    family1_blocks, family1_blocks_eigs, family1_eigs_closed_form, family1_matrices, random_family1_spec, Family1Spec,
};
pub use family2::{
    cyclic_shift, family2_lambda1_bound, family2_matrices, family2_rank1_eigs, family2_rank1_pair,
    random_family2_rank1, random_family2_spec, Family2Rank1, Family2Spec,
};
pub use normal::{normal_objective, pp_ab_maximum, random_normal_spec, NormalSpec};
pub use scalar::{
    basic_inequality_gap, case5_f1, case5_f2, case5_grid_max, case5_lambda, case5_parametrized, case5_x_breakpoints,
    family2_d5_grid_max, family2_d5_objective, golden_section_max, scalar_inequality_check, Case5Max, Case5Range,
    D5Max, DEFAULT_GRID_POINTS,
};

/// A serialized family instance, tagged by `"family"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FamilySpec {
    Normal(NormalSpec),
    Family1(Family1Spec),
    Family2(Family2Spec),
}

impl FamilySpec {
    pub fn to_pair(&self) -> Result<ConstrainedPair> {
        match self {
            FamilySpec::Normal(s) => s.to_pair(),
            FamilySpec::Family1(s) => family1_matrices(s),
            FamilySpec::Family2(s) => family2_matrices(s),
        }
    }
}

/// Eigenvalues `(larger, smaller)` of the PSD block `[[p, z], [z*, q]]` with
/// `|z|² = c`. The larger root uses the cancellation-free discriminant
/// `(p - q)² + 4c`; the smaller one comes from the product of roots.
pub(crate) fn psd_block_eigs(p: f64, q: f64, c: f64) -> (f64, f64) {
    let larger = 0.5 * (p + q + ((p - q).powi(2) + 4.0 * c).sqrt());
    let smaller = if larger > 0.0 {
        ((p * q - c) / larger).max(0.0)
    } else {
        0.0
    };
    (larger, smaller)
}
