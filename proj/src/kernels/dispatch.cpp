#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "powsec/kernels.hpp"

namespace powsec::kernels {

const char* isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(POWSEC_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

Isa active_isa() {
    static const Isa chosen = [] {
        if (const char* env = std::getenv("POWSEC_SIMD"); env && std::string_view(env) == "scalar")
            return Isa::Scalar;
        return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
    }();
    return chosen;
}

void BellmanBatch::push(double r, const std::array<double, 4>& p, const std::array<std::int32_t, 4>& n) {
    reward.push_back(r);
    for (std::size_t k = 0; k < 4; ++k) {
        prob[k].push_back(p[k]);
        next[k].push_back(n[k]);
    }
}

double dot(Isa isa, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
#ifdef POWSEC_HAVE_AVX2_TU
    if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) return avx2::dot(a.data(), b.data(), a.size());
#endif
    (void)isa;
    return scalar::dot(a.data(), b.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) { return dot(active_isa(), a, b); }

void bellman_q(Isa isa, const BellmanBatch& batch, std::span<const double> value, double gamma,
               std::span<double> q) {
    if (q.size() != batch.size()) throw std::invalid_argument("bellman_q: output size mismatch");
#ifdef POWSEC_HAVE_AVX2_TU
    if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) {
        avx2::bellman_q(batch, value.data(), gamma, q.data());
        return;
    }
#endif
    (void)isa;
    scalar::bellman_q(batch, value.data(), gamma, q.data());
}

void bellman_q(const BellmanBatch& batch, std::span<const double> value, double gamma, std::span<double> q) {
    bellman_q(active_isa(), batch, value, gamma, q);
}

}  // namespace powsec::kernels
