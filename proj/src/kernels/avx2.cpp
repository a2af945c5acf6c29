// Compiled with -mavx2 -mno-fma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "powsec/kernels.hpp"

namespace powsec::kernels::avx2 {

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, prod);
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void bellman_q(const BellmanBatch& batch, const double* value, double gamma, double* q) {
    const std::size_t n = batch.size();
    const double* r = batch.reward.data();
    const double* p0 = batch.prob[0].data();
    const double* p1 = batch.prob[1].data();
    const double* p2 = batch.prob[2].data();
    const double* p3 = batch.prob[3].data();
    const std::int32_t* n0 = batch.next[0].data();
    const std::int32_t* n1 = batch.next[1].data();
    const std::int32_t* n2 = batch.next[2].data();
    const std::int32_t* n3 = batch.next[3].data();
    const __m256d g = _mm256_set1_pd(gamma);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const auto idx = [](const std::int32_t* p) {
            return _mm_loadu_si128(reinterpret_cast<const __m128i*>(p));
        };
        const __m256d v0 = _mm256_i32gather_pd(value, idx(n0 + i), 8);
        const __m256d v1 = _mm256_i32gather_pd(value, idx(n1 + i), 8);
        const __m256d v2 = _mm256_i32gather_pd(value, idx(n2 + i), 8);
        const __m256d v3 = _mm256_i32gather_pd(value, idx(n3 + i), 8);
        __m256d e = _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(p0 + i), v0),
                                  _mm256_mul_pd(_mm256_loadu_pd(p1 + i), v1));
        e = _mm256_add_pd(e, _mm256_mul_pd(_mm256_loadu_pd(p2 + i), v2));
        e = _mm256_add_pd(e, _mm256_mul_pd(_mm256_loadu_pd(p3 + i), v3));
        _mm256_storeu_pd(q + i, _mm256_add_pd(_mm256_loadu_pd(r + i), _mm256_mul_pd(g, e)));
    }
    for (; i < n; ++i) {
        double e = p0[i] * value[n0[i]] + p1[i] * value[n1[i]];
        e = e + p2[i] * value[n2[i]];
        e = e + p3[i] * value[n3[i]];
        q[i] = r[i] + gamma * e;
    }
}

}  // namespace powsec::kernels::avx2
