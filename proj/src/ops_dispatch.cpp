#include "graphonflow/ops.hpp"

#include <stdexcept>

namespace gf::ops {

#if defined(__x86_64__) || defined(_M_X64)
#define GF_HAVE_AVX2_BUILD 1
namespace detail {
double sum_avx2(const double*, std::size_t);
double abs_sum_avx2(const double*, std::size_t);
double dot_avx2(const double*, const double*, std::size_t);
double sumsq_diff_avx2(const double*, const double*, std::size_t);
double max_abs_diff_avx2(const double*, const double*, std::size_t);
double masked_step_clip_avx2(const double*, const double*, const std::uint8_t*,
                             double*, std::size_t, double, double, double);
void opprod_avx2(const double*, const double*, double*, int);
}  // namespace detail
#endif

namespace {

Backend detect() {
#ifdef GF_HAVE_AVX2_BUILD
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Backend::Avx2;
#endif
    return Backend::Scalar;
}

Backend g_backend = detect();

bool supported(Backend b) {
    switch (b) {
        case Backend::Scalar: return true;
        case Backend::Avx2:
#ifdef GF_HAVE_AVX2_BUILD
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::Neon: return false;  // TODO: NEON variants once an aarch64 box is in CI
    }
    return false;
}

}  // namespace

Backend active_backend() { return g_backend; }

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "?";
}

void force_backend(Backend b) {
    if (!supported(b)) throw std::runtime_error("backend not supported on this cpu");
    g_backend = b;
}

void reset_backend() { g_backend = detect(); }

double sum(const double* a, std::size_t n) {
#ifdef GF_HAVE_AVX2_BUILD
    if (g_backend == Backend::Avx2) return detail::sum_avx2(a, n);
#endif
    return detail::sum_scalar(a, n);
}

double abs_sum(const double* a, std::size_t n) {
#ifdef GF_HAVE_AVX2_BUILD
    if (g_backend == Backend::Avx2) return detail::abs_sum_avx2(a, n);
#endif
    return detail::abs_sum_scalar(a, n);
}

double dot(const double* a, const double* b, std::size_t n) {
#ifdef GF_HAVE_AVX2_BUILD
    if (g_backend == Backend::Avx2) return detail::dot_avx2(a, b, n);
#endif
    return detail::dot_scalar(a, b, n);
}

double sumsq_diff(const double* a, const double* b, std::size_t n) {
#ifdef GF_HAVE_AVX2_BUILD
    if (g_backend == Backend::Avx2) return detail::sumsq_diff_avx2(a, b, n);
#endif
    return detail::sumsq_diff_scalar(a, b, n);
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
#ifdef GF_HAVE_AVX2_BUILD
    if (g_backend == Backend::Avx2) return detail::max_abs_diff_avx2(a, b, n);
#endif
    return detail::max_abs_diff_scalar(a, b, n);
}

double masked_step_clip(const double* w, const double* phi, const std::uint8_t* mask,
                        double* out, std::size_t n, double tau, double lo, double hi) {
#ifdef GF_HAVE_AVX2_BUILD
    if (g_backend == Backend::Avx2)
        return detail::masked_step_clip_avx2(w, phi, mask, out, n, tau, lo, hi);
#endif
    return detail::masked_step_clip_scalar(w, phi, mask, out, n, tau, lo, hi);
}

void opprod(const double* a, const double* b, double* c, int k) {
#ifdef GF_HAVE_AVX2_BUILD
    if (g_backend == Backend::Avx2) return detail::opprod_avx2(a, b, c, k);
#endif
    detail::opprod_scalar(a, b, c, k);
}

}  // namespace gf::ops
