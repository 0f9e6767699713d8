#include <cmath>

#include "rllp/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define RLLP_AVX2_TARGET __attribute__((target("avx2")))
#endif

namespace rllp::kernels::avx2 {

#ifdef RLLP_AVX2_TARGET

RLLP_AVX2_TARGET
void range_and_along(PointsView points, Vec3 origin, Vec3 direction, std::span<double> range,
                     std::span<double> along) {
    const std::size_t n = points.size;
    double* out_range = range.data();
    double* out_along = along.data();
    const __m256d ox = _mm256_set1_pd(origin.x);
    const __m256d oy = _mm256_set1_pd(origin.y);
    const __m256d oz = _mm256_set1_pd(origin.z);
    const __m256d ux = _mm256_set1_pd(direction.x);
    const __m256d uy = _mm256_set1_pd(direction.y);
    const __m256d uz = _mm256_set1_pd(direction.z);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(points.xs + i), ox);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(points.ys + i), oy);
        const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(points.zs + i), oz);
        const __m256d r2 = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), _mm256_mul_pd(dz, dz));
        _mm256_storeu_pd(out_range + i, _mm256_sqrt_pd(r2));
        const __m256d a = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(dx, ux), _mm256_mul_pd(dy, uy)), _mm256_mul_pd(dz, uz));
        _mm256_storeu_pd(out_along + i, a);
    }
    for (; i < n; ++i) {
        const double dx = points.xs[i] - origin.x;
        const double dy = points.ys[i] - origin.y;
        const double dz = points.zs[i] - origin.z;
        out_range[i] = std::sqrt(dx * dx + dy * dy + dz * dz);
        out_along[i] = dx * direction.x + dy * direction.y + dz * direction.z;
    }
}

namespace {

RLLP_AVX2_TARGET
inline double hsum_pairwise(__m256d v) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, v);
    return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

}  // namespace

RLLP_AVX2_TARGET
Moments moments(std::span<const double> values) {
    Moments m;
    const std::size_t n = values.size();
    if (n == 0) return m;
    const double* v = values.data();
    __m256d acc = _mm256_setzero_pd();
    __m256d lo4 = _mm256_set1_pd(v[0]);
    __m256d hi4 = lo4;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(v + i);
        acc = _mm256_add_pd(acc, x);
        lo4 = _mm256_min_pd(lo4, x);
        hi4 = _mm256_max_pd(hi4, x);
    }
    double sum = hsum_pairwise(acc);
    alignas(32) double lo_l[4];
    alignas(32) double hi_l[4];
    _mm256_store_pd(lo_l, lo4);
    _mm256_store_pd(hi_l, hi4);
    double lo = lo_l[0];
    double hi = hi_l[0];
    for (int l = 1; l < 4; ++l) {
        lo = lo_l[l] < lo ? lo_l[l] : lo;
        hi = hi_l[l] > hi ? hi_l[l] : hi;
    }
    for (; i < n; ++i) {
        sum += v[i];
        lo = v[i] < lo ? v[i] : lo;
        hi = v[i] > hi ? v[i] : hi;
    }
    const double mean = sum / static_cast<double>(n);

    const __m256d mean4 = _mm256_set1_pd(mean);
    __m256d sq = _mm256_setzero_pd();
    i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(v + i), mean4);
        sq = _mm256_add_pd(sq, _mm256_mul_pd(d, d));
    }
    double ss = hsum_pairwise(sq);
    for (; i < n; ++i) {
        const double d = v[i] - mean;
        ss += d * d;
    }
    m.mean = mean;
    m.stddev = std::sqrt(ss / static_cast<double>(n));
    m.min = lo;
    m.max = hi;
    return m;
}

#else

void range_and_along(PointsView points, Vec3 origin, Vec3 direction, std::span<double> range,
                     std::span<double> along) {
    scalar::range_and_along(points, origin, direction, range, along);
}

Moments moments(std::span<const double> values) { return scalar::moments(values); }

#endif

}  // namespace rllp::kernels::avx2
