#pragma once
#include <complex>
#include <cstddef>
#include <vector>

// Data-parallel inner loops used by grid quadrature, field reconstruction and
// current assembly. Scalar reference kernels are the semantic definition; the
// AVX2 variants are selected at runtime when the CPU supports them and are
// equivalence-tested against the scalar ones. Array arguments never alias
// unless a kernel says otherwise.

namespace relecho::kern {

using cplx = std::complex<double>;

namespace scalar {
double norm2(const cplx* a, std::size_t n);
cplx cdotc(const cplx* a, const cplx* b, std::size_t n);
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
void cscale(cplx alpha, cplx* a, std::size_t n);
// out = a .* b
void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n);
// acc += conj(a) .* b
void conj_mul_acc(const cplx* a, const cplx* b, cplx* acc, std::size_t n);
// acc += alpha * (r .* x), r real
void rmul_acc(const double* r, const cplx* x, cplx alpha, cplx* acc,
              std::size_t n);
}  // namespace scalar

namespace avx2 {
bool supported();
double norm2(const cplx* a, std::size_t n);
cplx cdotc(const cplx* a, const cplx* b, std::size_t n);
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
void cscale(cplx alpha, cplx* a, std::size_t n);
void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n);
void conj_mul_acc(const cplx* a, const cplx* b, cplx* acc, std::size_t n);
void rmul_acc(const double* r, const cplx* x, cplx alpha, cplx* acc,
              std::size_t n);
}  // namespace avx2

struct Backend {
  const char* name;
  double (*norm2)(const cplx*, std::size_t);
  cplx (*cdotc)(const cplx*, const cplx*, std::size_t);
  void (*caxpy)(cplx, const cplx*, cplx*, std::size_t);
  void (*cscale)(cplx, cplx*, std::size_t);
  void (*cmul)(const cplx*, const cplx*, cplx*, std::size_t);
  void (*conj_mul_acc)(const cplx*, const cplx*, cplx*, std::size_t);
  void (*rmul_acc)(const double*, const cplx*, cplx, cplx*, std::size_t);
};

// Active backend, chosen once per process. RELECHO_KERNELS=scalar|avx2
// overrides the cpuid-based choice (avx2 request falls back to scalar if the
// CPU lacks it).
const Backend& active();

inline double norm2(const cplx* a, std::size_t n) { return active().norm2(a, n); }
inline cplx cdotc(const cplx* a, const cplx* b, std::size_t n) {
  return active().cdotc(a, b, n);
}
inline void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  active().caxpy(alpha, x, y, n);
}
inline void cscale(cplx alpha, cplx* a, std::size_t n) {
  active().cscale(alpha, a, n);
}
inline void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  active().cmul(a, b, out, n);
}
inline void conj_mul_acc(const cplx* a, const cplx* b, cplx* acc,
                         std::size_t n) {
  active().conj_mul_acc(a, b, acc, n);
}
inline void rmul_acc(const double* r, const cplx* x, cplx alpha, cplx* acc,
                     std::size_t n) {
  active().rmul_acc(r, x, alpha, acc, n);
}

inline double norm2(const std::vector<cplx>& a) { return norm2(a.data(), a.size()); }
inline cplx cdotc(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  return cdotc(a.data(), b.data(), a.size());
}

}  // namespace relecho::kern
