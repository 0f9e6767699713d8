#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference implementation and an
// AVX2 variant; the dispatcher picks AVX2 when the CPU supports it. Both variants use the
// same operation order (no FMA), so results are bit-identical.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "rllp/types.hpp"

namespace rllp::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);
bool isa_available(Isa isa);

/// ISA used by the dispatching entry points. Setting RLLP_FORCE_SCALAR=1 in the
/// environment, or calling force_isa(Isa::Scalar), selects the reference path.
Isa active_isa();
void force_isa(std::optional<Isa> isa);

/// Structure-of-arrays view of a point set.
struct PointsView {
    const double* xs = nullptr;
    const double* ys = nullptr;
    const double* zs = nullptr;
    std::size_t size = 0;
};

/// For every point p_i: range[i] = |p_i - origin|, along[i] = (p_i - origin) . direction.
/// `range` and `along` must hold points.size elements.
void range_and_along(PointsView points, Vec3 origin, Vec3 direction, std::span<double> range,
                     std::span<double> along);

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;  // population convention
    double min = 0.0;
    double max = 0.0;
};

/// Two-pass mean / population standard deviation plus extrema. Empty input yields zeros.
Moments moments(std::span<const double> values);

namespace scalar {
void range_and_along(PointsView points, Vec3 origin, Vec3 direction, std::span<double> range,
                     std::span<double> along);
Moments moments(std::span<const double> values);
}  // namespace scalar

namespace avx2 {
void range_and_along(PointsView points, Vec3 origin, Vec3 direction, std::span<double> range,
                     std::span<double> along);
Moments moments(std::span<const double> values);
}  // namespace avx2

}  // namespace rllp::kernels
