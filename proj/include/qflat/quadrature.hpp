#pragma once

#include "qflat/kernels.hpp"
#include "qflat/spaces.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace qflat {

/// Exponents and Gaussian width of
///   Q_P(tau) = int_0^inf e^{-t^2/tau} P(-sh^2 t) t^mu sh(t)^kappa ch(t)^nu dt.
/// Requires mu + kappa > -1 and tau > 0.
struct QPParams {
  double mu = 0.0;
  double kappa = 0.0;
  double nu = 0.0;
  double tau = 1.0;
};

// Parameter box for the radial integrals.
inline constexpr int kMaxDegree = 16;
inline constexpr int kMaxDimension = 16;
inline constexpr double kMaxTau = 400.0;
inline constexpr double kMinTol = 1e-13;
inline constexpr double kMaxTol = 1e-4;

struct QuadOptions {
  double tol = 1e-12;  // relative
  kernels::Isa isa = kernels::default_isa();
  std::size_t max_panels = 20000;
};

/// Integrals in this regime easily exceed double range (e^{28900} at the edge
/// of the parameter box), so the result is carried as sign * e^{log_value};
/// value and abs_error saturate to infinity when out of range.
struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t nodes = 0;
  double truncation_T = 0.0;
  double log_value = 0.0;
  int sign = 0;
  double rel_error = 0.0;
  bool converged = false;
};

/// Q together with its first two log-derivatives in tau, computed by
/// differentiating under the integral sign on one adaptive mesh.
struct LogDerivatives {
  QuadratureResult q;
  double d1 = 0.0;  // (log Q)'
  double d2 = 0.0;  // (log Q)''
  double digits_lost = 0.0;
  bool cancellation = false;  // d2 lost more than 6 digits
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadratureResult best)
      : std::runtime_error(what), best_(best) {}
  const QuadratureResult& best() const noexcept { return best_; }

 private:
  QuadratureResult best_;
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// The integrand of Q_P at t >= 0 (P as ascending double coefficients),
/// evaluated in log form through the regrouped factorization
/// t^{r-1} [P(-sh^2 t)(sh t/t)^kappa ch(t)^nu]. Throws OverflowError when the
/// value exceeds double range.
double integrand(std::span<const double> P, const QPParams& params, double t);

/// The same integrand as the plain product e^{-t^2/tau} P t^mu sh^kappa ch^nu.
double integrand_direct(std::span<const double> P, const QPParams& params, double t);

/// The regrouped product e^{-t^2/tau} t^{r-1} f_P(t) with the sh(t)/t series
/// below t = 1e-4.
double integrand_regrouped(std::span<const double> P, const QPParams& params, double t);

/// ln of the analytic bound on int_T^inf |integrand| dt.
double log_tail_bound(std::span<const double> P, const QPParams& params, double T);

QuadratureResult q_p(std::span<const double> P, const QPParams& params,
                     const QuadOptions& options = {});

LogDerivatives q_p_derivatives(std::span<const double> P, const QPParams& params,
                               const QuadOptions& options = {});

/// q_chi(tau) for isotype n: Q_{P_n} with mu = kappa = (m-1)/2, nu = m_beta/2.
QuadratureResult q_chi(const RootData& space, int n, double tau,
                       const QuadOptions& options = {});

LogDerivatives q_chi_derivatives(const RootData& space, int n, double tau,
                                 const QuadOptions& options = {});

/// (log q_chi)' for order 1, (log q_chi)'' for order 2.
double dlogq(const RootData& space, int n, double tau, int order,
             const QuadOptions& options = {});

/// ln p_chi(s) with c_chi = 1:
/// Vol(S^{m-1}) 2^{m/2} / (B^m (Im s)^{m/2}) q_chi(B^2 Im s).
double log_p_chi(const RootData& space, int n, std::complex<double> s,
                 const QuadOptions& options = {});

double p_chi(const RootData& space, int n, std::complex<double> s,
             const QuadOptions& options = {});

}  // namespace qflat
