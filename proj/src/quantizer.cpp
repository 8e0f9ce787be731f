#include "fedlcc/quantizer.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fedlcc {

QuantizedSample real_to_field(std::span<const double> x, const FieldParams& params) {
    QuantizedSample out;
    out.coords.reserve(x.size());
    const double scale = std::ldexp(1.0, static_cast<int>(params.q()));
    const double limit = static_cast<double>(params.half());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]))
            throw DataError("non-finite value at coordinate " + std::to_string(i));
        const double scaled = scale * x[i];
        if (std::abs(scaled) >= limit - 0.5)
            throw InfeasibleError("coordinate " + std::to_string(i) + " (value " +
                                  std::to_string(x[i]) +
                                  ") exceeds the representable range for p=" +
                                  std::to_string(params.p()) +
                                  ", q=" + std::to_string(params.q()));
        const long long r = std::llround(scaled);  // rounds halves away from zero
        out.coords.push_back(params.from_signed(r));
    }
    return out;
}

double field_distance_to_real(FieldElement d, const FieldParams& params,
                              DequantExponent exponent) {
    const unsigned shift =
        exponent == DequantExponent::TwoQ ? 2 * params.q() : params.q();
    const double scale = std::ldexp(1.0, -static_cast<int>(shift));
    if (d.v < params.half()) return static_cast<double>(d.v) * scale;
    // Upper half of the field decodes negative; impossible for a genuine
    // squared distance, so the caller sees the wraparound symptom directly.
    return -static_cast<double>(params.p() - d.v) * scale;
}

FeasibilityBound compute_feasibility(double max_abs, std::size_t dim,
                                     const FieldParams& params) {
    FeasibilityBound b;
    b.max_abs_value = max_abs;
    const long double two_2q = std::ldexp(1.0L, static_cast<int>(2 * params.q()));
    b.max_sq_distance_field =
        two_2q * 4.0L * static_cast<long double>(dim) *
        static_cast<long double>(max_abs) * static_cast<long double>(max_abs);
    b.headroom = static_cast<long double>(params.half()) - b.max_sq_distance_field;
    return b;
}

namespace {

std::uint64_t next_prime_at_least(std::uint64_t n) {
    if (n < 3) return 3;
    if (n % 2 == 0) ++n;
    while (!is_prime_u64(n)) n += 2;
    return n;
}

}  // namespace

FeasibilityBound check_feasibility(double max_abs, std::size_t dim,
                                   const FieldParams& params) {
    FeasibilityBound b = compute_feasibility(max_abs, dim, params);
    if (b.feasible()) return b;

    // Largest q that leaves headroom under this p, if any.
    const long double base_bound = 4.0L * static_cast<long double>(dim) *
                                   static_cast<long double>(max_abs) *
                                   static_cast<long double>(max_abs);
    int best_q = -1;
    for (int q = static_cast<int>(params.q()); q >= 0; --q) {
        if (std::ldexp(base_bound, 2 * q) < static_cast<long double>(params.half())) {
            best_q = q;
            break;
        }
    }
    std::string hint;
    if (best_q >= 0) {
        hint = "; q <= " + std::to_string(best_q) + " would fit under this p";
    } else {
        const long double need = 2.0L * b.max_sq_distance_field + 2.0L;
        if (need < (long double)(std::uint64_t{1} << 62)) {
            hint = "; the smallest workable prime at this q is p >= " +
                   std::to_string(next_prime_at_least(static_cast<std::uint64_t>(need)));
        } else {
            hint = "; no u64 prime fits this q, lower q or rescale the data";
        }
    }
    throw InfeasibleError(
        "quantization range overflow: 2^(2q)*4*d*max|x|^2 = " +
        std::to_string(static_cast<double>(b.max_sq_distance_field)) +
        " exceeds (p-1)/2 = " + std::to_string(params.half()) + hint);
}

}  // namespace fedlcc
