#pragma once

#include <span>
#include <string_view>

namespace qflat::kernels {

enum class Isa { Scalar, Avx2 };

/// Shape of the log-integrand
///   L(t) = -t^2/tau + t_power ln t + kappa ln(sh t / t) + nu ln ch t
///          + ln |P(-sh^2 t)|
/// evaluated by the node kernels. coeffs are the ascending coefficients of
/// x -> P(-x), i.e. (-1)^j c_j, so the kernels only ever see x = sh^2 t >= 0.
struct LogIntegrand {
  double inv_tau = 1.0;
  double t_power = 0.0;
  double kappa = 0.0;
  double nu = 0.0;
  std::span<const double> coeffs;
};

struct Moments {
  double m0 = 0.0;  // sum w s e^{L - shift}
  double m1 = 0.0;  // ... times u
  double m2 = 0.0;  // ... times u^2
};

/// Writes L(t_i) into log_abs and the sign of P(-sh^2 t_i) (+1, -1 or 0)
/// into sign. All spans have the same length; t_i >= 0.
using LogIntegrandFn = void (*)(const LogIntegrand&, std::span<const double> t,
                                std::span<double> log_abs, std::span<double> sign);

/// Weighted sums of sign_i e^{log_abs_i - shift} u_i^k, k = 0, 1, 2.
using MomentsFn = Moments (*)(std::span<const double> weights,
                              std::span<const double> log_abs,
                              std::span<const double> sign,
                              std::span<const double> u, double shift);

/// Weighted sum of sign_i e^{log_abs_i - shift} (u_i - mean)^2.
using CenteredFn = double (*)(std::span<const double> weights,
                              std::span<const double> log_abs,
                              std::span<const double> sign,
                              std::span<const double> u, double shift, double mean);

struct KernelTable {
  Isa isa;
  LogIntegrandFn log_integrand;
  MomentsFn moments;
  CenteredFn centered;
};

bool available(Isa isa);

/// Table for the requested ISA; throws std::invalid_argument if the CPU
/// cannot run it.
const KernelTable& table(Isa isa);

/// Best available ISA, unless QFLAT_KERNEL=scalar|avx2 overrides it. Read once.
Isa default_isa();

std::string_view name(Isa isa);

/// Parses "scalar", "avx2" or "auto" (= default_isa()).
Isa parse_isa(std::string_view text);

namespace scalar {
void log_integrand(const LogIntegrand&, std::span<const double>, std::span<double>,
                   std::span<double>);
Moments moments(std::span<const double>, std::span<const double>,
                std::span<const double>, std::span<const double>, double);
double centered(std::span<const double>, std::span<const double>,
                std::span<const double>, std::span<const double>, double, double);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define QFLAT_HAVE_AVX2_KERNELS 1
namespace avx2 {
void log_integrand(const LogIntegrand&, std::span<const double>, std::span<double>,
                   std::span<double>);
Moments moments(std::span<const double>, std::span<const double>,
                std::span<const double>, std::span<const double>, double);
double centered(std::span<const double>, std::span<const double>,
                std::span<const double>, std::span<const double>, double, double);
}  // namespace avx2
#endif

}  // namespace qflat::kernels
