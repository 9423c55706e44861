// AVX2 variants of the grid kernels. Complex values are handled as
// interleaved (re, im) doubles, two per 256-bit register.

#include "flatlab/simd.hpp"

#if defined(__x86_64__) && defined(__GNUC__)
#define FLATLAB_HAVE_AVX2_TU 1
#include <immintrin.h>
#endif

namespace flatlab::simd {

#ifdef FLATLAB_HAVE_AVX2_TU

#pragma GCC push_options
#pragma GCC target("avx2,fma")

namespace {

inline __m256d dup_weights(const double* w) {
    const __m128d v = _mm_loadu_pd(w);
    return _mm256_permute4x64_pd(_mm256_castpd128_pd256(v), 0x50);
}

inline __m256d swap_ri(__m256d x) { return _mm256_permute_pd(x, 0x5); }

// (ar + i ai) * x for two packed complex values
inline __m256d cmul(__m256d ar, __m256d ai, __m256d x) {
    return _mm256_addsub_pd(_mm256_mul_pd(ar, x), _mm256_mul_pd(ai, swap_ri(x)));
}

inline double hsum(__m256d v) {
    alignas(32) double t[4];
    _mm256_store_pd(t, v);
    return (t[0] + t[1]) + (t[2] + t[3]);
}

double norm2(const double* w, const cplx* xc, std::size_t n) {
    const double* x = reinterpret_cast<const double*>(xc);
    __m256d acc = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(x + 2 * i);
        const __m256d wv = w ? dup_weights(w + i) : one;
        acc = _mm256_fmadd_pd(_mm256_mul_pd(wv, v), v, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += (w ? w[i] : 1.0) * (x[2 * i] * x[2 * i] + x[2 * i + 1] * x[2 * i + 1]);
    return s;
}

cplx dot(const double* w, const cplx* xc, const cplx* yc, std::size_t n) {
    const double* x = reinterpret_cast<const double*>(xc);
    const double* y = reinterpret_cast<const double*>(yc);
    __m256d re = _mm256_setzero_pd();
    __m256d im = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d wv = w ? dup_weights(w + i) : one;
        const __m256d xv = _mm256_mul_pd(wv, _mm256_loadu_pd(x + 2 * i));
        const __m256d yv = _mm256_loadu_pd(y + 2 * i);
        re = _mm256_fmadd_pd(xv, yv, re);
        im = _mm256_fmadd_pd(xv, swap_ri(yv), im);
    }
    alignas(32) double t[4];
    _mm256_store_pd(t, im);
    double sr = hsum(re);
    double si = (t[0] - t[1]) + (t[2] - t[3]);
    for (; i < n; ++i) {
        const double wi = w ? w[i] : 1.0;
        const double xr = x[2 * i], xi = x[2 * i + 1], yr = y[2 * i], yi = y[2 * i + 1];
        sr += wi * (xr * yr + xi * yi);
        si += wi * (xr * yi - xi * yr);
    }
    return {sr, si};
}

void axpy(cplx a, const cplx* xc, cplx* yc, std::size_t n) {
    const double* x = reinterpret_cast<const double*>(xc);
    double* y = reinterpret_cast<double*>(yc);
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d yv = _mm256_loadu_pd(y + 2 * i);
        _mm256_storeu_pd(y + 2 * i, _mm256_add_pd(yv, cmul(ar, ai, _mm256_loadu_pd(x + 2 * i))));
    }
    for (; i < n; ++i) {
        const double xr = x[2 * i], xi = x[2 * i + 1];
        y[2 * i] += a.real() * xr - a.imag() * xi;
        y[2 * i + 1] += a.real() * xi + a.imag() * xr;
    }
}

void xpby(const cplx* xc, cplx b, cplx* yc, std::size_t n) {
    const double* x = reinterpret_cast<const double*>(xc);
    double* y = reinterpret_cast<double*>(yc);
    const __m256d br = _mm256_set1_pd(b.real());
    const __m256d bi = _mm256_set1_pd(b.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d yv = _mm256_loadu_pd(y + 2 * i);
        _mm256_storeu_pd(y + 2 * i, _mm256_add_pd(_mm256_loadu_pd(x + 2 * i), cmul(br, bi, yv)));
    }
    for (; i < n; ++i) {
        const double yr = y[2 * i], yi = y[2 * i + 1];
        y[2 * i] = x[2 * i] + b.real() * yr - b.imag() * yi;
        y[2 * i + 1] = x[2 * i + 1] + b.real() * yi + b.imag() * yr;
    }
}

void scale(const double* s, const cplx* xc, cplx* yc, std::size_t n) {
    const double* x = reinterpret_cast<const double*>(xc);
    double* y = reinterpret_cast<double*>(yc);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        _mm256_storeu_pd(y + 2 * i, _mm256_mul_pd(dup_weights(s + i), _mm256_loadu_pd(x + 2 * i)));
    for (; i < n; ++i) {
        y[2 * i] = s[i] * x[2 * i];
        y[2 * i + 1] = s[i] * x[2 * i + 1];
    }
}

inline void box_one(const double* lo, const double* hi, double cs, double ct, double* out,
                    std::size_t j, std::size_t k) {
    const double ar = hi[2 * j] + hi[2 * k] - lo[2 * j] - lo[2 * k];
    const double ai = hi[2 * j + 1] + hi[2 * k + 1] - lo[2 * j + 1] - lo[2 * k + 1];
    const double br = lo[2 * k] + hi[2 * k] - lo[2 * j] - hi[2 * j];
    const double bi = lo[2 * k + 1] + hi[2 * k + 1] - lo[2 * j + 1] - hi[2 * j + 1];
    out[2 * j] = cs * ar - ct * bi;
    out[2 * j + 1] = cs * ai + ct * br;
}

void box_apply(const cplx* loc, const cplx* hic, double cs, double ct, cplx* outc, std::size_t n) {
    const double* lo = reinterpret_cast<const double*>(loc);
    const double* hi = reinterpret_cast<const double*>(hic);
    double* out = reinterpret_cast<double*>(outc);
    const __m256d vcs = _mm256_set1_pd(cs);
    const __m256d vct = _mm256_set1_pd(ct);
    std::size_t j = 0;
    for (; j + 3 <= n; j += 2) {
        const __m256d l0 = _mm256_loadu_pd(lo + 2 * j);
        const __m256d l1 = _mm256_loadu_pd(lo + 2 * j + 2);
        const __m256d h0 = _mm256_loadu_pd(hi + 2 * j);
        const __m256d h1 = _mm256_loadu_pd(hi + 2 * j + 2);
        const __m256d a = _mm256_sub_pd(_mm256_add_pd(h0, h1), _mm256_add_pd(l0, l1));
        const __m256d b = _mm256_sub_pd(_mm256_add_pd(l1, h1), _mm256_add_pd(l0, h0));
        // i*ct*b = addsub(0, ct*swap(b))
        const __m256d ib = _mm256_addsub_pd(_mm256_setzero_pd(), _mm256_mul_pd(vct, swap_ri(b)));
        _mm256_storeu_pd(out + 2 * j, _mm256_fmadd_pd(vcs, a, ib));
    }
    for (; j < n; ++j) box_one(lo, hi, cs, ct, out, j, j + 1 == n ? 0 : j + 1);
}

void box_adjoint(const cplx* yc, double cs, double ct, cplx* loc, cplx* hic, std::size_t n) {
    const double* y = reinterpret_cast<const double*>(yc);
    double* lo = reinterpret_cast<double*>(loc);
    double* hi = reinterpret_cast<double*>(hic);
    auto one = [&](std::size_t j) {
        const std::size_t p = (j == 0) ? n - 1 : j - 1;
        const double yr = y[2 * j], yi = y[2 * j + 1], pr = y[2 * p], pi = y[2 * p + 1];
        // lo += (-cs + i ct) y_j + (-cs - i ct) y_p ; hi += (cs + i ct) y_j + (cs - i ct) y_p
        lo[2 * j] += -cs * yr - ct * yi - cs * pr + ct * pi;
        lo[2 * j + 1] += -cs * yi + ct * yr - cs * pi - ct * pr;
        hi[2 * j] += cs * yr - ct * yi + cs * pr + ct * pi;
        hi[2 * j + 1] += cs * yi + ct * yr + cs * pi - ct * pr;
    };
    if (n == 0) return;
    one(0);
    const __m256d vcs = _mm256_set1_pd(cs);
    const __m256d vct = _mm256_set1_pd(ct);
    std::size_t j = 1;
    for (; j + 2 <= n; j += 2) {
        const __m256d yj = _mm256_loadu_pd(y + 2 * j);
        const __m256d yp = _mm256_loadu_pd(y + 2 * j - 2);
        const __m256d s = _mm256_mul_pd(vcs, _mm256_add_pd(yj, yp));
        // i*ct*(yj - yp)
        const __m256d d = _mm256_sub_pd(yj, yp);
        const __m256d id = _mm256_addsub_pd(_mm256_setzero_pd(), _mm256_mul_pd(vct, swap_ri(d)));
        _mm256_storeu_pd(lo + 2 * j, _mm256_add_pd(_mm256_loadu_pd(lo + 2 * j), _mm256_sub_pd(id, s)));
        _mm256_storeu_pd(hi + 2 * j, _mm256_add_pd(_mm256_loadu_pd(hi + 2 * j), _mm256_add_pd(s, id)));
    }
    for (; j < n; ++j) one(j);
}

}  // namespace

#pragma GCC pop_options

const KernelTable* avx2_kernels() {
    static const KernelTable t{Isa::avx2, norm2, dot, axpy, xpby, scale, box_apply, box_adjoint};
    return &t;
}

#else

const KernelTable* avx2_kernels() { return nullptr; }

#endif

}  // namespace flatlab::simd
