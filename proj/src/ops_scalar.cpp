#include <algorithm>
#include <cmath>
#include <vector>

#include "graphonflow/ops.hpp"

namespace gf::ops::detail {

double sum_scalar(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

double abs_sum_scalar(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i]);
    return s;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sumsq_diff_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

double masked_step_clip_scalar(const double* w, const double* phi, const std::uint8_t* mask,
                               double* out, std::size_t n, double tau, double lo, double hi) {
    double overshoot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cand = mask[i] ? w[i] - tau * phi[i] : w[i];
        const double clipped = std::min(hi, std::max(lo, cand));
        overshoot = std::max(overshoot, std::fabs(cand - clipped));
        out[i] = clipped;
    }
    return overshoot;
}

void opprod_scalar(const double* a, const double* b, double* c, int k) {
    const double inv_k = 1.0 / static_cast<double>(k);
    // ikj loop order keeps the inner loop contiguous
    std::fill(c, c + static_cast<std::size_t>(k) * k, 0.0);
    for (int i = 0; i < k; ++i) {
        double* ci = c + static_cast<std::size_t>(i) * k;
        for (int l = 0; l < k; ++l) {
            const double ail = a[static_cast<std::size_t>(i) * k + l];
            const double* bl = b + static_cast<std::size_t>(l) * k;
            for (int j = 0; j < k; ++j) ci[j] += ail * bl[j];
        }
        for (int j = 0; j < k; ++j) ci[j] *= inv_k;
    }
}

}  // namespace gf::ops::detail
