#include "rllp/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "rllp/error.hpp"

namespace rllp::kernels {

namespace {

// -1: no override.
std::atomic<int> g_forced{-1};

bool env_forces_scalar() {
    const char* v = std::getenv("RLLP_FORCE_SCALAR");
    return v != nullptr && std::strcmp(v, "0") != 0 && v[0] != '\0';
}

void check_sizes(PointsView points, std::span<double> range, std::span<double> along) {
    if (range.size() < points.size || along.size() < points.size) {
        throw Error(ErrorCode::InvalidArgument, "range_and_along output spans too small");
    }
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
    if (isa == Isa::Scalar) return true;
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() {
    const int forced = g_forced.load(std::memory_order_relaxed);
    if (forced >= 0) return static_cast<Isa>(forced);
    static const Isa detected =
        (!env_forces_scalar() && isa_available(Isa::Avx2)) ? Isa::Avx2 : Isa::Scalar;
    return detected;
}

void force_isa(std::optional<Isa> isa) {
    if (isa && !isa_available(*isa)) {
        throw Error(ErrorCode::InvalidArgument, "requested ISA not supported on this CPU");
    }
    g_forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

void range_and_along(PointsView points, Vec3 origin, Vec3 direction, std::span<double> range,
                     std::span<double> along) {
    check_sizes(points, range, along);
    if (active_isa() == Isa::Avx2) {
        avx2::range_and_along(points, origin, direction, range, along);
    } else {
        scalar::range_and_along(points, origin, direction, range, along);
    }
}

Moments moments(std::span<const double> values) {
    return active_isa() == Isa::Avx2 ? avx2::moments(values) : scalar::moments(values);
}

namespace scalar {

void range_and_along(PointsView points, Vec3 origin, Vec3 direction, std::span<double> range,
                     std::span<double> along) {
    check_sizes(points, range, along);
    for (std::size_t i = 0; i < points.size; ++i) {
        const double dx = points.xs[i] - origin.x;
        const double dy = points.ys[i] - origin.y;
        const double dz = points.zs[i] - origin.z;
        range[i] = std::sqrt(dx * dx + dy * dy + dz * dz);
        along[i] = dx * direction.x + dy * direction.y + dz * direction.z;
    }
}

// Sums are accumulated in four interleaved lanes, matching the AVX2 register layout.
Moments moments(std::span<const double> values) {
    Moments m;
    const std::size_t n = values.size();
    if (n == 0) return m;
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    double lo = values[0];
    double hi = values[0];
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        for (int l = 0; l < 4; ++l) {
            lane[l] += values[i + l];
            lo = std::min(lo, values[i + l]);
            hi = std::max(hi, values[i + l]);
        }
    }
    double sum = (lane[0] + lane[2]) + (lane[1] + lane[3]);
    for (; i < n; ++i) {
        sum += values[i];
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
    }
    const double mean = sum / static_cast<double>(n);

    double sq[4] = {0.0, 0.0, 0.0, 0.0};
    i = 0;
    for (; i + 4 <= n; i += 4) {
        for (int l = 0; l < 4; ++l) {
            const double d = values[i + l] - mean;
            sq[l] += d * d;
        }
    }
    double ss = (sq[0] + sq[2]) + (sq[1] + sq[3]);
    for (; i < n; ++i) {
        const double d = values[i] - mean;
        ss += d * d;
    }
    m.mean = mean;
    m.stddev = std::sqrt(ss / static_cast<double>(n));
    m.min = lo;
    m.max = hi;
    return m;
}

}  // namespace scalar

}  // namespace rllp::kernels
