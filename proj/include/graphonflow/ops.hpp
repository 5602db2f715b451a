#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops used by the flow, metric, and functional code.
// Each primitive has a scalar reference implementation and, where the
// hardware supports it, an AVX2 (x86) or NEON (aarch64) variant selected at
// runtime. The variants are equivalence-tested against the reference in
// tests/test_ops.cpp.

namespace gf::ops {

enum class Backend { Scalar, Avx2, Neon };

Backend active_backend();
const char* backend_name(Backend b);

// Force a specific backend (tests only). Throws if unsupported on this CPU.
void force_backend(Backend b);
void reset_backend();

double sum(const double* a, std::size_t n);
double abs_sum(const double* a, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sumsq_diff(const double* a, const double* b, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);

// out[i] = clip(w[i] - tau*phi[i]*mask[i], lo, hi); returns the largest
// clipped overshoot |candidate - clipped|.
double masked_step_clip(const double* w, const double* phi, const std::uint8_t* mask,
                        double* out, std::size_t n, double tau, double lo, double hi);

// C = (A*B)/k for row-major k-by-k matrices (the kernel operator product).
void opprod(const double* a, const double* b, double* c, int k);

namespace detail {
double sum_scalar(const double*, std::size_t);
double abs_sum_scalar(const double*, std::size_t);
double dot_scalar(const double*, const double*, std::size_t);
double sumsq_diff_scalar(const double*, const double*, std::size_t);
double max_abs_diff_scalar(const double*, const double*, std::size_t);
double masked_step_clip_scalar(const double*, const double*, const std::uint8_t*,
                               double*, std::size_t, double, double, double);
void opprod_scalar(const double*, const double*, double*, int);
}  // namespace detail

}  // namespace gf::ops
