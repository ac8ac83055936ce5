#include "f2gan/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace f2gan::kernels {
namespace {

Backend detect_backend() {
  Backend b = avx2_supported() ? Backend::avx2 : Backend::scalar;
  if (const char* env = std::getenv("F2GAN_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) b = Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) b = Backend::avx2;
  }
  return b;
}

Backend& backend_slot() {
  static Backend b = detect_backend();
  return b;
}

}  // namespace

bool avx2_supported() {
#ifdef F2GAN_HAVE_AVX2_TU
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend active_backend() { return backend_slot(); }

bool set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_supported()) return false;
  backend_slot() = b;
  return true;
}

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

const Ops& ops(Backend b) {
#ifdef F2GAN_HAVE_AVX2_TU
  if (b == Backend::avx2) return detail::avx2_ops();
#endif
  (void)b;
  return detail::scalar_ops();
}

const Ops& ops() { return ops(backend_slot()); }

}  // namespace f2gan::kernels
