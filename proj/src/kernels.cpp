#include "monofem/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace monofem::kernels {

namespace {

cplx cdotc_scalar(std::size_t n, const cplx* a, const cplx* b) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

cplx cdotc2_scalar(std::size_t n, const cplx* ax, const cplx* ay,
                   const cplx* bx, const cplx* by) {
  const double* pax = reinterpret_cast<const double*>(ax);
  const double* pay = reinterpret_cast<const double*>(ay);
  const double* pbx = reinterpret_cast<const double*>(bx);
  const double* pby = reinterpret_cast<const double*>(by);
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = pax[2 * i], xi = pax[2 * i + 1];
    const double ur = pbx[2 * i], ui = pbx[2 * i + 1];
    re += xr * ur + xi * ui;
    im += xr * ui - xi * ur;
    const double yr = pay[2 * i], yi = pay[2 * i + 1];
    const double vr = pby[2 * i], vi = pby[2 * i + 1];
    re += yr * vr + yi * vi;
    im += yr * vi - yi * vr;
  }
  return {re, im};
}

void apply_weight_scalar(std::size_t n, const cplx* w00, const cplx* w01,
                         const cplx* w10, const cplx* w11, const cplx* gx,
                         const cplx* gy, cplx* hx, cplx* hy) {
  for (std::size_t i = 0; i < n; ++i) {
    const cplx x = gx[i], y = gy[i];
    hx[i] = w00[i] * x + w01[i] * y;
    hy[i] = w10[i] * x + w11[i] * y;
  }
}

struct Dispatch {
  cplx (*cdotc)(std::size_t, const cplx*, const cplx*);
  cplx (*cdotc2)(std::size_t, const cplx*, const cplx*, const cplx*,
                 const cplx*);
  void (*apply_weight)(std::size_t, const cplx*, const cplx*, const cplx*,
                       const cplx*, const cplx*, const cplx*, cplx*, cplx*);
  const char* name;
};

constexpr Dispatch kScalar{cdotc_scalar, cdotc2_scalar, apply_weight_scalar,
                           "scalar"};

}  // namespace

#if defined(MONOFEM_HAVE_AVX2)
namespace detail {
cplx cdotc_avx2(std::size_t n, const cplx* a, const cplx* b);
cplx cdotc2_avx2(std::size_t n, const cplx* ax, const cplx* ay, const cplx* bx,
                 const cplx* by);
void apply_weight_avx2(std::size_t n, const cplx* w00, const cplx* w01,
                       const cplx* w10, const cplx* w11, const cplx* gx,
                       const cplx* gy, cplx* hx, cplx* hy);
}  // namespace detail
#endif

namespace {

bool cpu_has_avx2() {
#if defined(MONOFEM_HAVE_AVX2) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

#if defined(MONOFEM_HAVE_AVX2)
constexpr Dispatch kAvx2{detail::cdotc_avx2, detail::cdotc2_avx2,
                         detail::apply_weight_avx2, "avx2"};
#endif

const Dispatch* detect() {
#if defined(MONOFEM_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

const Dispatch* initial_dispatch() {
  if (const char* env = std::getenv("MONOFEM_KERNELS")) {
    const std::string name(env);
    if (name == "scalar") return &kScalar;
#if defined(MONOFEM_HAVE_AVX2)
    if (name == "avx2" && cpu_has_avx2()) return &kAvx2;
#endif
  }
  return detect();
}

const Dispatch* g_dispatch = initial_dispatch();

}  // namespace

cplx cdotc(std::size_t n, const cplx* a, const cplx* b) {
  return g_dispatch->cdotc(n, a, b);
}

cplx cdotc2(std::size_t n, const cplx* ax, const cplx* ay, const cplx* bx,
            const cplx* by) {
  return g_dispatch->cdotc2(n, ax, ay, bx, by);
}

void apply_weight(std::size_t n, const cplx* w00, const cplx* w01,
                  const cplx* w10, const cplx* w11, const cplx* gx,
                  const cplx* gy, cplx* hx, cplx* hy) {
  g_dispatch->apply_weight(n, w00, w01, w10, w11, gx, gy, hx, hy);
}

std::string_view backend() { return g_dispatch->name; }

void force_backend(std::string_view name) {
  if (name == "auto") {
    g_dispatch = detect();
    return;
  }
  if (name == "scalar") {
    g_dispatch = &kScalar;
    return;
  }
#if defined(MONOFEM_HAVE_AVX2)
  if (name == "avx2") {
    if (!cpu_has_avx2())
      throw std::runtime_error("kernels: CPU does not support AVX2");
    g_dispatch = &kAvx2;
    return;
  }
#endif
  throw std::runtime_error("kernels: unknown backend '" + std::string(name) +
                           "'");
}

bool avx2_available() {
#if defined(MONOFEM_HAVE_AVX2)
  return cpu_has_avx2();
#else
  return false;
#endif
}

}  // namespace monofem::kernels
