// AVX2+FMA variants of the accumulation kernels. Compiled with
// -mavx2 -mfma and reached only through the runtime dispatch in
// kernels.cpp, so the rest of the library stays baseline-ISA.

#include <immintrin.h>

#include <cstddef>

#include "monofem/kernels.hpp"

namespace monofem::kernels::detail {

namespace {

// One register holds two complex doubles [re0, im0, re1, im1].
// For conj(a)*b we accumulate a*b (pairs sum to the real part) and
// a*swap(b) (pairs differenced give the imaginary part).
inline cplx reduce_conj(__m256d acc_re, __m256d acc_im) {
  alignas(32) double r[4], m[4];
  _mm256_store_pd(r, acc_re);
  _mm256_store_pd(m, acc_im);
  return {(r[0] + r[1]) + (r[2] + r[3]), (m[0] - m[1]) + (m[2] - m[3])};
}

// Full complex multiply of register pairs: (ar+i*ai)(br+i*bi).
inline __m256d cmul(__m256d a, __m256d b) {
  __m256d are = _mm256_movedup_pd(a);               // [ar, ar, ...]
  __m256d aim = _mm256_permute_pd(a, 0xF);          // [ai, ai, ...]
  __m256d bsw = _mm256_permute_pd(b, 0x5);          // [bi, br, ...]
  return _mm256_fmaddsub_pd(are, b, _mm256_mul_pd(aim, bsw));
}

}  // namespace

cplx cdotc_avx2(std::size_t n, const cplx* a, const cplx* b) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re0 = _mm256_setzero_pd(), acc_im0 = _mm256_setzero_pd();
  __m256d acc_re1 = _mm256_setzero_pd(), acc_im1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d a0 = _mm256_loadu_pd(pa + 2 * i);
    __m256d b0 = _mm256_loadu_pd(pb + 2 * i);
    acc_re0 = _mm256_fmadd_pd(a0, b0, acc_re0);
    acc_im0 = _mm256_fmadd_pd(a0, _mm256_permute_pd(b0, 0x5), acc_im0);
    __m256d a1 = _mm256_loadu_pd(pa + 2 * i + 4);
    __m256d b1 = _mm256_loadu_pd(pb + 2 * i + 4);
    acc_re1 = _mm256_fmadd_pd(a1, b1, acc_re1);
    acc_im1 = _mm256_fmadd_pd(a1, _mm256_permute_pd(b1, 0x5), acc_im1);
  }
  for (; i + 2 <= n; i += 2) {
    __m256d a0 = _mm256_loadu_pd(pa + 2 * i);
    __m256d b0 = _mm256_loadu_pd(pb + 2 * i);
    acc_re0 = _mm256_fmadd_pd(a0, b0, acc_re0);
    acc_im0 = _mm256_fmadd_pd(a0, _mm256_permute_pd(b0, 0x5), acc_im0);
  }
  cplx sum = reduce_conj(_mm256_add_pd(acc_re0, acc_re1),
                         _mm256_add_pd(acc_im0, acc_im1));
  for (; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    sum += cplx{ar * br + ai * bi, ar * bi - ai * br};
  }
  return sum;
}

cplx cdotc2_avx2(std::size_t n, const cplx* ax, const cplx* ay, const cplx* bx,
                 const cplx* by) {
  const double* pax = reinterpret_cast<const double*>(ax);
  const double* pay = reinterpret_cast<const double*>(ay);
  const double* pbx = reinterpret_cast<const double*>(bx);
  const double* pby = reinterpret_cast<const double*>(by);
  __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();
  __m256d acc_re2 = _mm256_setzero_pd(), acc_im2 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d a0 = _mm256_loadu_pd(pax + 2 * i);
    __m256d b0 = _mm256_loadu_pd(pbx + 2 * i);
    acc_re = _mm256_fmadd_pd(a0, b0, acc_re);
    acc_im = _mm256_fmadd_pd(a0, _mm256_permute_pd(b0, 0x5), acc_im);
    __m256d a1 = _mm256_loadu_pd(pay + 2 * i);
    __m256d b1 = _mm256_loadu_pd(pby + 2 * i);
    acc_re2 = _mm256_fmadd_pd(a1, b1, acc_re2);
    acc_im2 = _mm256_fmadd_pd(a1, _mm256_permute_pd(b1, 0x5), acc_im2);
  }
  cplx sum = reduce_conj(_mm256_add_pd(acc_re, acc_re2),
                         _mm256_add_pd(acc_im, acc_im2));
  for (; i < n; ++i) {
    const double xr = pax[2 * i], xi = pax[2 * i + 1];
    const double ur = pbx[2 * i], ui = pbx[2 * i + 1];
    const double yr = pay[2 * i], yi = pay[2 * i + 1];
    const double vr = pby[2 * i], vi = pby[2 * i + 1];
    sum += cplx{xr * ur + xi * ui, xr * ui - xi * ur};
    sum += cplx{yr * vr + yi * vi, yr * vi - yi * vr};
  }
  return sum;
}

void apply_weight_avx2(std::size_t n, const cplx* w00, const cplx* w01,
                       const cplx* w10, const cplx* w11, const cplx* gx,
                       const cplx* gy, cplx* hx, cplx* hy) {
  const double* p00 = reinterpret_cast<const double*>(w00);
  const double* p01 = reinterpret_cast<const double*>(w01);
  const double* p10 = reinterpret_cast<const double*>(w10);
  const double* p11 = reinterpret_cast<const double*>(w11);
  const double* pgx = reinterpret_cast<const double*>(gx);
  const double* pgy = reinterpret_cast<const double*>(gy);
  double* phx = reinterpret_cast<double*>(hx);
  double* phy = reinterpret_cast<double*>(hy);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d x = _mm256_loadu_pd(pgx + 2 * i);
    __m256d y = _mm256_loadu_pd(pgy + 2 * i);
    __m256d rx = _mm256_add_pd(cmul(_mm256_loadu_pd(p00 + 2 * i), x),
                               cmul(_mm256_loadu_pd(p01 + 2 * i), y));
    __m256d ry = _mm256_add_pd(cmul(_mm256_loadu_pd(p10 + 2 * i), x),
                               cmul(_mm256_loadu_pd(p11 + 2 * i), y));
    _mm256_storeu_pd(phx + 2 * i, rx);
    _mm256_storeu_pd(phy + 2 * i, ry);
  }
  for (; i < n; ++i) {
    const cplx x = gx[i], y = gy[i];
    hx[i] = w00[i] * x + w01[i] * y;
    hy[i] = w10[i] * x + w11[i] * y;
  }
}

}  // namespace monofem::kernels::detail
