#include "relecho/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace relecho::kern {

namespace scalar {

double norm2(const cplx* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  return s;
}

cplx cdotc(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void cscale(cplx alpha, cplx* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= alpha;
}

void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void conj_mul_acc(const cplx* a, const cplx* b, cplx* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += std::conj(a[i]) * b[i];
}

void rmul_acc(const double* r, const cplx* x, cplx alpha, cplx* acc,
              std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += alpha * (r[i] * x[i]);
}

}  // namespace scalar

namespace {

Backend make_scalar() {
  return Backend{"scalar",        scalar::norm2, scalar::cdotc,
                 scalar::caxpy,   scalar::cscale, scalar::cmul,
                 scalar::conj_mul_acc, scalar::rmul_acc};
}

Backend make_avx2() {
  return Backend{"avx2",        avx2::norm2, avx2::cdotc,
                 avx2::caxpy,   avx2::cscale, avx2::cmul,
                 avx2::conj_mul_acc, avx2::rmul_acc};
}

Backend choose() {
  const char* env = std::getenv("RELECHO_KERNELS");
  if (env && std::strcmp(env, "scalar") == 0) return make_scalar();
  if (avx2::supported()) return make_avx2();
  return make_scalar();
}

}  // namespace

const Backend& active() {
  static const Backend b = choose();
  return b;
}

}  // namespace relecho::kern
