#pragma once

#include <cstdint>

// Numerical tolerances used across the library. State-level quantities
// (norms, traces, Hermiticity) are held to 1e-12; operator-algebra checks
// (idempotence, orthogonality, completeness of projector sets) to 1e-10,
// leaving headroom for products of matrices up to the dense budget.
namespace qdarwin::tol {

inline constexpr double state = 1e-12;
inline constexpr double projector = 1e-10;

// Born-rule values in [-probability_clamp, 0) clamp to zero; anything more
// negative is treated as a logic error, not rounding.
inline constexpr double probability_clamp = 1e-12;

// Measurement outcomes with probability at or below this are excluded from
// conditional averages (measure-zero convention).
inline constexpr double null_outcome = 1e-14;

inline constexpr double distribution_sum = 1e-10;

// Minimum Gram-matrix eigenvalue for branch states to count as linearly
// independent.
inline constexpr double gram_rank = 1e-10;

// Slack applied when counting fragments against a redundancy threshold, so
// delta = 0 does not flap on last-bit rounding.
inline constexpr double counting_slack = 1e-12;

// Largest Hilbert-space dimension the dense representation will materialize.
inline constexpr std::int64_t dense_budget = std::int64_t{1} << 14;

}  // namespace qdarwin::tol
