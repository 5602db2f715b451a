// AVX2 variants of the hot loops. Compiled only on x86-64 (see CMake); the
// dispatcher checks cpu support before routing here.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "graphonflow/ops.hpp"

namespace gf::ops::detail {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

const __m256d kAbsMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffll));

}  // namespace

double sum_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

double abs_sum_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_and_pd(_mm256_loadu_pd(a + i), kAbsMask));
    double s = hsum(acc);
    for (; i < n; ++i) s += std::fabs(a[i]);
    return s;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sumsq_diff_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_max_pd(acc, _mm256_and_pd(d, kAbsMask));
    }
    double m = hmax(acc);
    for (; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

double masked_step_clip_avx2(const double* w, const double* phi, const std::uint8_t* mask,
                             double* out, std::size_t n, double tau, double lo, double hi) {
    const __m256d vtau = _mm256_set1_pd(tau);
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vhi = _mm256_set1_pd(hi);
    __m256d vover = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vw = _mm256_loadu_pd(w + i);
        const __m256d vphi = _mm256_loadu_pd(phi + i);
        // widen 4 mask bytes to a lane predicate
        __m128i mb = _mm_cvtsi32_si128(*reinterpret_cast<const int*>(mask + i));
        __m256i m64 = _mm256_cvtepu8_epi64(mb);
        const __m256d active =
            _mm256_castsi256_pd(_mm256_cmpgt_epi64(m64, _mm256_setzero_si256()));
        // mul+sub (not fma) so results match the scalar reference bit-for-bit
        const __m256d stepped = _mm256_sub_pd(vw, _mm256_mul_pd(vtau, vphi));
        const __m256d cand = _mm256_blendv_pd(vw, stepped, active);
        const __m256d clipped = _mm256_min_pd(vhi, _mm256_max_pd(vlo, cand));
        vover = _mm256_max_pd(vover, _mm256_and_pd(_mm256_sub_pd(cand, clipped), kAbsMask));
        _mm256_storeu_pd(out + i, clipped);
    }
    double overshoot = hmax(vover);
    for (; i < n; ++i) {
        const double cand = mask[i] ? w[i] - tau * phi[i] : w[i];
        const double clipped = std::min(hi, std::max(lo, cand));
        overshoot = std::max(overshoot, std::fabs(cand - clipped));
        out[i] = clipped;
    }
    return overshoot;
}

void opprod_avx2(const double* a, const double* b, double* c, int k) {
    const std::size_t kk = static_cast<std::size_t>(k);
    std::memset(c, 0, kk * kk * sizeof(double));
    const double inv_k = 1.0 / static_cast<double>(k);
    for (int i = 0; i < k; ++i) {
        double* ci = c + static_cast<std::size_t>(i) * k;
        for (int l = 0; l < k; ++l) {
            const __m256d ail = _mm256_set1_pd(a[static_cast<std::size_t>(i) * k + l]);
            const double* bl = b + static_cast<std::size_t>(l) * k;
            int j = 0;
            for (; j + 4 <= k; j += 4) {
                __m256d cj = _mm256_loadu_pd(ci + j);
                cj = _mm256_fmadd_pd(ail, _mm256_loadu_pd(bl + j), cj);
                _mm256_storeu_pd(ci + j, cj);
            }
            // fma in the tail too, or the result loses exact symmetry
            for (; j < k; ++j)
                ci[j] = std::fma(a[static_cast<std::size_t>(i) * k + l], bl[j], ci[j]);
        }
        const __m256d vs = _mm256_set1_pd(inv_k);
        int j = 0;
        for (; j + 4 <= k; j += 4)
            _mm256_storeu_pd(ci + j, _mm256_mul_pd(_mm256_loadu_pd(ci + j), vs));
        for (; j < k; ++j) ci[j] *= inv_k;
    }
}

}  // namespace gf::ops::detail

#endif  // x86-64
