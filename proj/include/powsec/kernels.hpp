#pragma once

// Hot inner loops with a scalar reference and an AVX2 variant chosen at
// runtime. Both variants perform the same floating-point operations in the
// same order, so results are bit-identical; tests assert this.
//
// Set POWSEC_SIMD=scalar in the environment to force the reference path.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace powsec::kernels {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa) noexcept;

/// Best variant supported by this CPU and build, honoring POWSEC_SIMD.
Isa active_isa();
bool isa_available(Isa isa) noexcept;

/// Expected-value rows for a Jacobi Bellman sweep, one row per
/// (state, action) pair, four successors per row (structure of arrays).
struct BellmanBatch {
    std::vector<double> reward;
    std::array<std::vector<double>, 4> prob;
    std::array<std::vector<std::int32_t>, 4> next;

    std::size_t size() const noexcept { return reward.size(); }
    void push(double r, const std::array<double, 4>& p, const std::array<std::int32_t, 4>& n);
};

/// Dot product with four interleaved partial sums: lane j accumulates the
/// indices i = j (mod 4), lanes combine as (s0 + s1) + (s2 + s3), and the
/// remainder is added last in index order.
double dot(std::span<const double> a, std::span<const double> b);
double dot(Isa isa, std::span<const double> a, std::span<const double> b);

/// q[i] = reward[i] + gamma * (((p0 v[n0] + p1 v[n1]) + p2 v[n2]) + p3 v[n3]).
void bellman_q(const BellmanBatch& batch, std::span<const double> value, double gamma, std::span<double> q);
void bellman_q(Isa isa, const BellmanBatch& batch, std::span<const double> value, double gamma,
               std::span<double> q);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void bellman_q(const BellmanBatch& batch, const double* value, double gamma, double* q);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void bellman_q(const BellmanBatch& batch, const double* value, double gamma, double* q);
}  // namespace avx2

}  // namespace powsec::kernels
