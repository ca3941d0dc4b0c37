use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

use super::TransitionTable;

/// Boundary condition of the expected-messages recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "kebab-case")
)]
pub enum CapacityConvention {
    /// A cycle ends on the arrival that pushes the count past σ; that
    /// arrival is counted. `E[N_σ]` is computed like any other state.
    #[default]
    Strict,
    /// `E[N_b] = 0` for every `b >= σ`: reaching σ ends the count.
    Literal,
}

/// `E[N_b]` for `b = 0..=σ`: expected new messages, counted from a filter
/// with `b` bits set, until the cycle ends.
///
/// ```text
/// E[N_b] = (1 + Σ_{j=1}^{k} τ(b, b+j) E[N_{b+j}]) / (1 - τ(b, b))
/// ```
///
/// Overflowing transitions continue with zero. Only non-retaining tables
/// qualify: a retaining cycle does not start from an empty filter.
pub fn expected_capacity_profile(
    table: &TransitionTable,
    convention: CapacityConvention,
) -> Result<Vec<f64>> {
    if table.variant().retains() {
        return Err(Error::Unsupported(
            "expected capacity is only modeled for non-retaining filters",
        ));
    }
    let sigma = table.sigma();
    let mut expected = vec![0.0; sigma + 1];
    if sigma == 0 {
        return Ok(expected);
    }
    let last = match convention {
        CapacityConvention::Strict => sigma,
        CapacityConvention::Literal => sigma - 1,
    };
    for b in (0..=last).rev() {
        let row = table.forward_row(b);
        let onward: f64 = row
            .iter()
            .enumerate()
            .skip(1)
            .map(|(d, &p)| p * expected[b + d])
            .sum();
        let leave = 1.0 - row[0];
        if leave <= 0.0 {
            return Err(Error::NumericalFailure("state with no way out"));
        }
        expected[b] = (1.0 + onward) / leave;
    }
    Ok(expected)
}

/// `E[N_0]`, the expected number of new messages per cycle. Zero when
/// `σ = 0`.
pub fn expected_capacity(table: &TransitionTable, convention: CapacityConvention) -> Result<f64> {
    Ok(expected_capacity_profile(table, convention)?[0])
}
