#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace monofem::kernels {

using cplx = std::complex<double>;

// Hot inner loops for element-wise energy accumulation. Arrays are
// interleaved complex doubles (re, im). A scalar reference implementation
// always exists; on x86-64 an AVX2+FMA variant is selected at runtime.
// Within one backend the accumulation order is fixed, so results do not
// depend on thread count.

// sum_i conj(a[i]) * b[i]
cplx cdotc(std::size_t n, const cplx* a, const cplx* b);

// sum_i conj(ax[i])*bx[i] + conj(ay[i])*by[i]
cplx cdotc2(std::size_t n, const cplx* ax, const cplx* ay,
            const cplx* bx, const cplx* by);

// hx_i = w00_i*gx_i + w01_i*gy_i and hy_i = w10_i*gx_i + w11_i*gy_i,
// i.e. a per-entry complex 2x2 matrix applied to a gradient field.
void apply_weight(std::size_t n, const cplx* w00, const cplx* w01,
                  const cplx* w10, const cplx* w11, const cplx* gx,
                  const cplx* gy, cplx* hx, cplx* hy);

// Name of the active backend: "avx2" or "scalar".
std::string_view backend();

// Select a backend by name: "auto" re-detects, "scalar" forces the
// reference kernels, "avx2" throws if unsupported by the CPU or build.
// The MONOFEM_KERNELS environment variable applies the same override at
// startup. Intended for equivalence tests and benchmarking.
void force_backend(std::string_view name);

// True when the AVX2 variant is compiled in and the CPU supports it.
bool avx2_available();

}  // namespace monofem::kernels
