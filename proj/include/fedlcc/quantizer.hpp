#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fedlcc/field.hpp"

namespace fedlcc {

/// A real vector embedded in F_p^d: round(2^q * x), negatives wrapped to the
/// upper half of the field.
struct QuantizedSample {
    std::vector<FieldElement> coords;
    std::size_t dim() const { return coords.size(); }
};

/// Which power of two divides a decoded field distance on the way back to the
/// real domain. TwoQ is the self-consistent choice for squared distances of
/// 2^q-scaled values; Q keeps the literal single factor for comparison.
enum class DequantExponent { TwoQ, Q };

QuantizedSample real_to_field(std::span<const double> x, const FieldParams& params);

/// Decode one field-domain squared distance to a real value. Values in the
/// upper half of the field map to negatives, which a squared distance can
/// only produce under an infeasible (wrapped) configuration; callers treat a
/// negative result as that warning.
double field_distance_to_real(FieldElement d, const FieldParams& params,
                              DequantExponent exponent = DequantExponent::TwoQ);

struct FeasibilityBound {
    double max_abs_value = 0.0;          // largest |x| over the dataset
    long double max_sq_distance_field = 0.0;  // 2^(2q) * 4 * d * max_abs^2
    long double headroom = 0.0;          // (p-1)/2 minus the bound
    bool feasible() const { return headroom > 0; }
};

/// Bound check only; never throws.
FeasibilityBound compute_feasibility(double max_abs, std::size_t dim,
                                     const FieldParams& params);

/// Throws InfeasibleError (suggesting a workable p or q) when the bound has
/// no headroom.
FeasibilityBound check_feasibility(double max_abs, std::size_t dim,
                                   const FieldParams& params);

}  // namespace fedlcc
