#pragma once

#include <complex>
#include <cstddef>

namespace flatlab::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

// Kernels used by the grid solver. All arrays may alias only where noted.
struct KernelTable {
    Isa isa;
    // sum_i w[i] |x[i]|^2; w may be null
    double (*weighted_norm2)(const double* w, const cplx* x, std::size_t n);
    // sum_i w[i] conj(x[i]) y[i]; w may be null (unit weights)
    cplx (*weighted_dot)(const double* w, const cplx* x, const cplx* y, std::size_t n);
    // y += a x
    void (*axpy)(cplx a, const cplx* x, cplx* y, std::size_t n);
    // y = x + b y
    void (*xpby)(const cplx* x, cplx b, cplx* y, std::size_t n);
    // y = s x, s real per entry; y may alias x
    void (*scale)(const double* s, const cplx* x, cplx* y, std::size_t n);
    // Box stencil between two adjacent rings of a periodic polar grid:
    // out[j] = cs*(hi[j]+hi[j+1]-lo[j]-lo[j+1]) + i*ct*(lo[j+1]+hi[j+1]-lo[j]-hi[j])
    void (*box_apply)(const cplx* lo, const cplx* hi, double cs, double ct, cplx* out, std::size_t n);
    // Adjoint of box_apply accumulated into lo and hi.
    void (*box_adjoint)(const cplx* y, double cs, double ct, cplx* lo, cplx* hi, std::size_t n);
};

const KernelTable& scalar_kernels();
// Null when the binary was built without AVX2 support.
const KernelTable* avx2_kernels();

bool cpu_has_avx2();

// Best table for this CPU; FLATLAB_SIMD=scalar forces the reference path.
const KernelTable& active();

const char* isa_name(Isa isa);

}  // namespace flatlab::simd
