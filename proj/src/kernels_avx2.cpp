// AVX2+FMA kernel variants. Built with per-function target attributes so the
// translation unit compiles on any x86-64 toolchain; dispatch guards execution.

#include "relecho/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace relecho::kern::avx2 {

bool supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

#define RELECHO_AVX2 __attribute__((target("avx2,fma")))

namespace {

RELECHO_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

}  // namespace

RELECHO_AVX2 double norm2(const cplx* a, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(p + 2 * i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i)
    s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  return s;
}

RELECHO_AVX2 cplx cdotc(const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    // [ar*br, ai*bi, ...] sums to the real part
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    // [ar*bi, ai*br, ...] with odd lanes negated sums to the imag part
    acc_im = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0x5), acc_im);
  }
  const __m256d odd_neg = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  double re = hsum(acc_re);
  double im = hsum(_mm256_xor_pd(acc_im, odd_neg));
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

RELECHO_AVX2 void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(px + 2 * i);
    __m256d vy = _mm256_loadu_pd(py + 2 * i);
    __m256d prod = _mm256_addsub_pd(_mm256_mul_pd(ar, vx),
                                    _mm256_mul_pd(ai, _mm256_permute_pd(vx, 0x5)));
    _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(vy, prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

RELECHO_AVX2 void cscale(cplx alpha, cplx* a, std::size_t n) {
  double* p = reinterpret_cast<double*>(a);
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(p + 2 * i);
    __m256d prod = _mm256_addsub_pd(_mm256_mul_pd(ar, v),
                                    _mm256_mul_pd(ai, _mm256_permute_pd(v, 0x5)));
    _mm256_storeu_pd(p + 2 * i, prod);
  }
  for (; i < n; ++i) a[i] *= alpha;
}

RELECHO_AVX2 void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* po = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    __m256d a_re = _mm256_movedup_pd(va);
    __m256d a_im = _mm256_permute_pd(va, 0xF);
    __m256d prod = _mm256_addsub_pd(_mm256_mul_pd(a_re, vb),
                                    _mm256_mul_pd(a_im, _mm256_permute_pd(vb, 0x5)));
    _mm256_storeu_pd(po + 2 * i, prod);
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

RELECHO_AVX2 void conj_mul_acc(const cplx* a, const cplx* b, cplx* acc,
                               std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* pc = reinterpret_cast<double*>(acc);
  const __m256d neg = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    __m256d a_re = _mm256_movedup_pd(va);
    __m256d a_im = _mm256_permute_pd(va, 0xF);
    // conj(a)*b: re = ar*br + ai*bi, im = ar*bi - ai*br
    __m256d u = _mm256_xor_pd(_mm256_mul_pd(a_im, _mm256_permute_pd(vb, 0x5)), neg);
    __m256d prod = _mm256_addsub_pd(_mm256_mul_pd(a_re, vb), u);
    __m256d vc = _mm256_loadu_pd(pc + 2 * i);
    _mm256_storeu_pd(pc + 2 * i, _mm256_add_pd(vc, prod));
  }
  for (; i < n; ++i) acc[i] += std::conj(a[i]) * b[i];
}

RELECHO_AVX2 void rmul_acc(const double* r, const cplx* x, cplx alpha,
                           cplx* acc, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  double* pc = reinterpret_cast<double*>(acc);
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m128d r01 = _mm_loadu_pd(r + i);
    __m256d rr = _mm256_permute4x64_pd(_mm256_castpd128_pd256(r01), 0x50);
    __m256d t = _mm256_mul_pd(rr, _mm256_loadu_pd(px + 2 * i));
    __m256d prod = _mm256_addsub_pd(_mm256_mul_pd(ar, t),
                                    _mm256_mul_pd(ai, _mm256_permute_pd(t, 0x5)));
    __m256d vc = _mm256_loadu_pd(pc + 2 * i);
    _mm256_storeu_pd(pc + 2 * i, _mm256_add_pd(vc, prod));
  }
  for (; i < n; ++i) acc[i] += alpha * (r[i] * x[i]);
}

#undef RELECHO_AVX2

}  // namespace relecho::kern::avx2

#else  // non-x86: fall back to the scalar reference

namespace relecho::kern::avx2 {
bool supported() { return false; }
double norm2(const cplx* a, std::size_t n) { return scalar::norm2(a, n); }
cplx cdotc(const cplx* a, const cplx* b, std::size_t n) {
  return scalar::cdotc(a, b, n);
}
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  scalar::caxpy(alpha, x, y, n);
}
void cscale(cplx alpha, cplx* a, std::size_t n) { scalar::cscale(alpha, a, n); }
void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  scalar::cmul(a, b, out, n);
}
void conj_mul_acc(const cplx* a, const cplx* b, cplx* acc, std::size_t n) {
  scalar::conj_mul_acc(a, b, acc, n);
}
void rmul_acc(const double* r, const cplx* x, cplx alpha, cplx* acc,
              std::size_t n) {
  scalar::rmul_acc(r, x, alpha, acc, n);
}
}  // namespace relecho::kern::avx2

#endif
