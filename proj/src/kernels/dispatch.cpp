#include "qflat/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace qflat::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &scalar::log_integrand, &scalar::moments,
                              &scalar::centered};
#ifdef QFLAT_HAVE_AVX2_KERNELS
constexpr KernelTable kAvx2{Isa::Avx2, &avx2::log_integrand, &avx2::moments, &avx2::centered};
#endif

bool cpu_has_avx2() {
#ifdef QFLAT_HAVE_AVX2_KERNELS
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("QFLAT_KERNEL"); env != nullptr && *env != '\0') {
    const std::string_view v(env);
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && cpu_has_avx2()) return Isa::Avx2;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

}  // namespace

bool available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return cpu_has_avx2();
  }
  return false;
}

const KernelTable& table(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return kScalar;
    case Isa::Avx2:
#ifdef QFLAT_HAVE_AVX2_KERNELS
      if (cpu_has_avx2()) return kAvx2;
#endif
      throw std::invalid_argument("AVX2/FMA kernels are not available on this CPU");
  }
  throw std::invalid_argument("unknown kernel ISA");
}

Isa default_isa() {
  static const Isa isa = detect();
  return isa;
}

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "?";
}

Isa parse_isa(std::string_view text) {
  if (text == "scalar") return Isa::Scalar;
  if (text == "avx2") return Isa::Avx2;
  if (text == "auto") return default_isa();
  throw std::invalid_argument("unknown kernel '" + std::string(text) + "'");
}

}  // namespace qflat::kernels
