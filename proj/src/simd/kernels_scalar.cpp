#include "flatlab/simd.hpp"

namespace flatlab::simd {
namespace {

double norm2(const double* w, const cplx* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (w ? w[i] : 1.0) * std::norm(x[i]);
    return s;
}

cplx dot(const double* w, const cplx* x, const cplx* y, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w ? w[i] : 1.0;
        re += wi * (x[i].real() * y[i].real() + x[i].imag() * y[i].imag());
        im += wi * (x[i].real() * y[i].imag() - x[i].imag() * y[i].real());
    }
    return {re, im};
}

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby(const cplx* x, cplx b, cplx* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

void scale(const double* s, const cplx* x, cplx* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = s[i] * x[i];
}

void box_apply(const cplx* lo, const cplx* hi, double cs, double ct, cplx* out, std::size_t n) {
    const cplx ict(0.0, ct);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = (j + 1 == n) ? 0 : j + 1;
        out[j] = cs * (hi[j] + hi[k] - lo[j] - lo[k]) + ict * (lo[k] + hi[k] - lo[j] - hi[j]);
    }
}

void box_adjoint(const cplx* y, double cs, double ct, cplx* lo, cplx* hi, std::size_t n) {
    const cplx a(-cs, ct), b(-cs, -ct), c(cs, ct), d(cs, -ct);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t p = (j == 0) ? n - 1 : j - 1;
        lo[j] += a * y[j] + b * y[p];
        hi[j] += c * y[j] + d * y[p];
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable t{Isa::scalar, norm2, dot, axpy, xpby, scale, box_apply, box_adjoint};
    return t;
}

}  // namespace flatlab::simd
