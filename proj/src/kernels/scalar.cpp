#include "powsec/kernels.hpp"

namespace powsec::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
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
    for (std::size_t i = 0; i < n; ++i) {
        double e = p0[i] * value[n0[i]] + p1[i] * value[n1[i]];
        e = e + p2[i] * value[n2[i]];
        e = e + p3[i] * value[n3[i]];
        q[i] = r[i] + gamma * e;
    }
}

}  // namespace powsec::kernels::scalar
