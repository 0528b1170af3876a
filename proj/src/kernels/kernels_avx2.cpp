#if defined(__x86_64__) || defined(__i386__)

#include "domectl/kernels.hpp"

#include <cassert>
#include <immintrin.h>

#define DOMECTL_AVX2 __attribute__((target("avx2")))

namespace domectl::kernels::avx2 {

namespace {

// Fixed lane reduction order: (l0+l2) + (l1+l3), matching hadd semantics.
DOMECTL_AVX2 inline double reduce(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    __m128d swap = _mm_unpackhi_pd(s, s);
    return _mm_cvtsd_f64(_mm_add_sd(s, swap));
}

} // namespace

DOMECTL_AVX2 double sum(std::span<const double> x) {
    const std::size_t n = x.size();
    const double* p = x.data();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(p + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(p + i + 4));
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(p + i));
    }
    double acc = reduce(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        acc += p[i];
    }
    return acc;
}

DOMECTL_AVX2 double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    const std::size_t n = x.size();
    const double* px = x.data();
    const double* py = y.data();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(px + i + 4), _mm256_loadu_pd(py + i + 4)));
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i)));
    }
    double acc = reduce(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        acc += px[i] * py[i];
    }
    return acc;
}

DOMECTL_AVX2 void axpy(double a, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    const std::size_t n = x.size();
    const double* px = x.data();
    double* py = y.data();
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yv = _mm256_loadu_pd(py + i);
        yv = _mm256_add_pd(yv, _mm256_mul_pd(av, _mm256_loadu_pd(px + i)));
        _mm256_storeu_pd(py + i, yv);
    }
    for (; i < n; ++i) {
        py[i] += a * px[i];
    }
}

DOMECTL_AVX2 void clip_max(std::span<double> dst, std::span<const double> src, double clip) {
    assert(dst.size() == src.size());
    const std::size_t n = dst.size();
    double* pd = dst.data();
    const double* ps = src.data();
    const __m256d clipv = _mm256_set1_pd(clip);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d clipped = _mm256_min_pd(_mm256_loadu_pd(ps + i), clipv);
        _mm256_storeu_pd(pd + i, _mm256_max_pd(_mm256_loadu_pd(pd + i), clipped));
    }
    for (; i < n; ++i) {
        const double clipped = ps[i] < clip ? ps[i] : clip;
        pd[i] = pd[i] > clipped ? pd[i] : clipped;
    }
}

DOMECTL_AVX2 void squared_distances(std::span<const double> xs, std::span<const double> ys, double px,
                                    double py, std::span<double> out) {
    assert(xs.size() == ys.size() && xs.size() == out.size());
    const std::size_t n = xs.size();
    const __m256d pxv = _mm256_set1_pd(px);
    const __m256d pyv = _mm256_set1_pd(py);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs.data() + i), pxv);
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys.data() + i), pyv);
        _mm256_storeu_pd(out.data() + i, _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
    }
    for (; i < n; ++i) {
        const double dx = xs[i] - px;
        const double dy = ys[i] - py;
        out[i] = dx * dx + dy * dy;
    }
}

} // namespace domectl::kernels::avx2

#endif // x86
