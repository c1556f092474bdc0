#include "qflat/quadrature.hpp"

#include "qflat/hypergeom.hpp"
#include "qflat/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

namespace qflat {

namespace {

constexpr std::size_t kOrder = 16;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct GaussLegendre {
  std::array<double, kOrder> x{};
  std::array<double, kOrder> w{};
};

GaussLegendre build_gauss_legendre() {
  GaussLegendre g;
  const int n = static_cast<int>(kOrder);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    g.x[static_cast<std::size_t>(i)] = x;
    g.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

const GaussLegendre& gauss16() {
  static const GaussLegendre g = build_gauss_legendre();
  return g;
}

// A panel is either linear in t or, for the first panel of a non-smooth
// t^{r-1} start, linear in v = t^r (where the Jacobian absorbs t^{r-1}).
enum class PanelKind { Linear, Power };

struct Panel {
  double lo = 0.0;
  double hi = 0.0;
  PanelKind kind = PanelKind::Linear;
  kernels::Moments whole, left, right;
  bool alive = true;
};

kernels::Moments operator+(const kernels::Moments& a, const kernels::Moments& b) {
  return {a.m0 + b.m0, a.m1 + b.m1, a.m2 + b.m2};
}

struct NodeBuffers {
  std::array<double, kOrder> t{}, weight{}, u{}, log_abs{}, sign{};
};

class Integrator {
 public:
  Integrator(std::span<const double> P, const QPParams& params, const QuadOptions& options)
      : params_(params), options_(options), kernels_(&kernels::table(options.isa)) {
    if (P.empty()) throw std::invalid_argument("polynomial must have at least one coefficient");
    if (static_cast<int>(P.size()) - 1 > kMaxDegree)
      throw std::invalid_argument("polynomial degree outside the parameter box (<= 16)");
    if (!(params.tau > 0.0) || !std::isfinite(params.tau))
      throw std::invalid_argument("tau must be positive");
    if (params.tau > kMaxTau)
      throw std::invalid_argument("tau outside the parameter box (<= 400)");
    if (!(params.mu + params.kappa > -1.0))
      throw std::invalid_argument("mu + kappa must exceed -1");
    if (!(options.tol >= kMinTol && options.tol <= kMaxTol))
      throw std::invalid_argument("tolerance must lie in [1e-13, 1e-4]");

    signed_.reserve(P.size());
    for (std::size_t j = 0; j < P.size(); ++j) signed_.push_back(j % 2 == 0 ? P[j] : -P[j]);
    degree_ = static_cast<int>(P.size()) - 1;
    r_ = params.mu + params.kappa + 1.0;
    const double tp = r_ - 1.0;
    power_start_ = tp != std::floor(tp) || tp < 0.0;

    linear_ = {1.0 / params.tau, tp, params.kappa, params.nu, signed_};
    reduced_ = {1.0 / params.tau, 0.0, params.kappa, params.nu, signed_};
    inv_tau2_ = 1.0 / (params.tau * params.tau);
  }

  LogDerivatives run(bool want_derivatives) {
    const double tau = params_.tau;
    const double sqrt_tau = std::sqrt(tau);
    const double cut = std::log(1.0 / options_.tol) + 40.0;

    // Truncation point: Gaussian decay must beat the e^{(kappa+nu+2n)t} growth
    // by ln(1/tol) + 40.
    const double growth = params_.kappa + params_.nu + 2.0 * degree_;
    const double root = 0.5 * (growth * tau + std::sqrt(growth * growth * tau * tau + 4.0 * tau * cut));
    T_ = std::max(8.0 * sqrt_tau, root);

    locate_peak(cut);
    seed_panels();
    refine();

    // Extend the truncation point until the analytic tail bound is below
    // tol/2 of the integral.
    for (int extension = 0; extension < 64; ++extension) {
      const double log_total = shift_ + std::log(std::fabs(total_.m0));
      const double log_tail = log_tail_bound(P(), params_, T_);
      if (log_tail <= std::log(0.5 * options_.tol) + log_total) break;
      const double old_T = T_;
      T_ += 4.0 * sqrt_tau;
      add_panel(old_T, T_, PanelKind::Linear);
      refine();
    }
    return finish(want_derivatives);
  }

 private:
  std::span<const double> P() const { return original_; }

 public:
  void set_original(std::span<const double> P) { original_ = P; }

 private:
  // Evaluates the log-integrand at a single point (linear variable).
  double log_at(double t) const {
    double out = 0.0;
    double sg = 0.0;
    kernels_->log_integrand(linear_, std::span<const double>(&t, 1), std::span<double>(&out, 1),
                            std::span<double>(&sg, 1));
    return sg == 0.0 ? -kInf : out;
  }

  void locate_peak(double cut) {
    const double sqrt_tau = std::sqrt(params_.tau);
    const auto count = static_cast<std::size_t>(
        std::clamp(std::ceil(16.0 * T_ / sqrt_tau), 512.0, 65536.0));
    grid_t_.resize(count);
    grid_log_.resize(count);
    std::vector<double> sg(count);
    const double h = T_ / static_cast<double>(count);
    for (std::size_t j = 0; j < count; ++j) grid_t_[j] = h * (static_cast<double>(j) + 0.5);
    kernels_->log_integrand(linear_, grid_t_, grid_log_, sg);
    for (std::size_t j = 0; j < count; ++j)
      if (sg[j] == 0.0 || std::isnan(grid_log_[j])) grid_log_[j] = -kInf;

    std::size_t best = 0;
    for (std::size_t j = 1; j < count; ++j)
      if (grid_log_[j] > grid_log_[best]) best = j;
    double peak = grid_log_[best];
    if (!std::isfinite(peak)) throw std::domain_error("integrand vanishes on the whole grid");

    // Golden-section refinement inside the bracketing grid cells.
    double lo = best == 0 ? 0.5 * h * 1e-3 : grid_t_[best - 1];
    double hi = best + 1 == count ? T_ : grid_t_[best + 1];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = log_at(x1);
    double f2 = log_at(x2);
    for (int iter = 0; iter < 60; ++iter) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = log_at(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = log_at(x1);
      }
    }
    peak = std::max({peak, f1, f2});
    shift_ = peak;

    std::size_t first = count;
    std::size_t last = 0;
    for (std::size_t j = 0; j < count; ++j) {
      if (grid_log_[j] >= peak - cut) {
        first = std::min(first, j);
        last = j;
      }
    }
    window_lo_ = first == 0 ? 0.0 : grid_t_[first - 1];
    window_hi_ = last + 1 >= count ? T_ : grid_t_[last + 1];

    // Each log-integrand value carries rounding of order eps * (largest term);
    // no mesh refinement can push the relative error below that.
    const double edge = window_hi_;
    const double rate = std::fabs(params_.mu) + std::fabs(params_.kappa) +
                        std::fabs(params_.nu) + 2.0 * degree_;
    const double scale = edge * edge / params_.tau + rate * edge + 1.0;
    noise_ = 8.0 * std::numeric_limits<double>::epsilon() * scale;
  }

  void seed_panels() {
    const double width = std::min(std::sqrt(0.5 * params_.tau), 0.5);
    if (window_lo_ > 0.0) add_panel(0.0, window_lo_, PanelKind::Linear);
    const double span = window_hi_ - window_lo_;
    const auto pieces =
        static_cast<std::size_t>(std::clamp(std::ceil(span / width), 1.0, 2048.0));
    for (std::size_t i = 0; i < pieces; ++i) {
      const double a = window_lo_ + span * static_cast<double>(i) / static_cast<double>(pieces);
      const double b = i + 1 == pieces
                           ? window_hi_
                           : window_lo_ + span * static_cast<double>(i + 1) / static_cast<double>(pieces);
      add_panel(a, b, PanelKind::Linear);
    }
    if (window_hi_ < T_) add_panel(window_hi_, T_, PanelKind::Linear);
  }

  // Adds a panel given in t; a panel starting at 0 switches to the power
  // variable when the t^{r-1} factor is not smooth.
  void add_panel(double a, double b, PanelKind kind) {
    Panel p;
    p.kind = kind;
    if (a == 0.0 && power_start_) {
      p.kind = PanelKind::Power;
      p.lo = 0.0;
      p.hi = std::pow(b, r_);
    } else {
      p.lo = a;
      p.hi = b;
    }
    p.whole = evaluate(p.lo, p.hi, p.kind);
    split_estimates(p);
    push(std::move(p));
  }

  void split_estimates(Panel& p) {
    const double mid = 0.5 * (p.lo + p.hi);
    p.left = evaluate(p.lo, mid, p.kind);
    p.right = evaluate(mid, p.hi, p.kind);
  }

  void fill_nodes(double lo, double hi, PanelKind kind, NodeBuffers& buf) const {
    const auto& g = gauss16();
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < kOrder; ++i) {
      const double s = mid + half * g.x[i];
      double t = s;
      double w = half * g.w[i];
      if (kind == PanelKind::Power) {
        t = std::pow(s, 1.0 / r_);
        w /= r_;
      }
      buf.t[i] = t;
      buf.weight[i] = w;
      buf.u[i] = t * t * inv_tau2_;
    }
    kernels_->log_integrand(kind == PanelKind::Power ? reduced_ : linear_, buf.t, buf.log_abs,
                            buf.sign);
    nodes_ += kOrder;
  }

  kernels::Moments evaluate(double lo, double hi, PanelKind kind) {
    NodeBuffers buf;
    fill_nodes(lo, hi, kind, buf);
    return kernels_->moments(buf.weight, buf.log_abs, buf.sign, buf.u, shift_);
  }

  double panel_error(const Panel& p, int k) const {
    const kernels::Moments est = p.left + p.right;
    switch (k) {
      case 0: return std::fabs(p.whole.m0 - est.m0);
      case 1: return std::fabs(p.whole.m1 - est.m1);
      default: return std::fabs(p.whole.m2 - est.m2);
    }
  }

  double normalized_error(const Panel& p) const {
    const std::array<double, 3> totals = {std::fabs(total_.m0), std::fabs(total_.m1),
                                          std::fabs(total_.m2)};
    double e = 0.0;
    for (int k = 0; k < 3; ++k)
      if (totals[static_cast<std::size_t>(k)] > 0.0)
        e = std::max(e, panel_error(p, k) / totals[static_cast<std::size_t>(k)]);
    return e;
  }

  void push(Panel p) {
    const kernels::Moments est = p.left + p.right;
    total_ = total_ + est;
    error_ = error_ + kernels::Moments{panel_error(p, 0), panel_error(p, 1), panel_error(p, 2)};
    panels_.push_back(std::move(p));
    const std::size_t index = panels_.size() - 1;
    queue_.push({normalized_error(panels_[index]), index});
  }

  bool converged() const {
    const double budget = std::max(0.5 * options_.tol, noise_);
    return error_.m0 <= budget * std::fabs(total_.m0) &&
           error_.m1 <= budget * std::fabs(total_.m1) &&
           error_.m2 <= budget * std::fabs(total_.m2);
  }

  void refine() {
    recompute_totals();
    if (live_panels() > options_.max_panels)
      throw QuadratureError("initial mesh exceeds the panel budget", failed_result());
    while (!converged()) {
      if (live_panels() >= options_.max_panels) {
        throw QuadratureError("quadrature did not converge within the panel budget",
                              failed_result());
      }
      if (queue_.empty()) break;
      const std::size_t index = queue_.top().index;
      queue_.pop();
      Panel& parent = panels_[index];
      if (!parent.alive) continue;
      parent.alive = false;
      const double mid = 0.5 * (parent.lo + parent.hi);
      Panel a{parent.lo, mid, parent.kind, parent.left, {}, {}, true};
      Panel b{mid, parent.hi, parent.kind, parent.right, {}, {}, true};
      const kernels::Moments est = parent.left + parent.right;
      total_ = {total_.m0 - est.m0, total_.m1 - est.m1, total_.m2 - est.m2};
      error_ = {error_.m0 - panel_error(parent, 0), error_.m1 - panel_error(parent, 1),
                error_.m2 - panel_error(parent, 2)};
      split_estimates(a);
      split_estimates(b);
      push(std::move(a));
      push(std::move(b));
      if (panels_.size() % 256 == 0) recompute_totals();
    }
    recompute_totals();
  }

  std::size_t live_panels() const {
    return static_cast<std::size_t>(
        std::count_if(panels_.begin(), panels_.end(), [](const Panel& p) { return p.alive; }));
  }

  // Ordered (by position) Neumaier summation of the live panels.
  std::vector<const Panel*> ordered() const {
    std::vector<const Panel*> live;
    for (const auto& p : panels_)
      if (p.alive) live.push_back(&p);
    std::sort(live.begin(), live.end(), [](const Panel* a, const Panel* b) {
      if (a->kind != b->kind) return a->kind == PanelKind::Power;
      return a->lo < b->lo;
    });
    return live;
  }

  void recompute_totals() {
    struct Neumaier {
      double sum = 0.0, c = 0.0;
      void add(double x) {
        const double t = sum + x;
        c += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
      }
      double value() const { return sum + c; }
    };
    Neumaier s0, s1, s2;
    kernels::Moments err;
    for (const Panel* p : ordered()) {
      const kernels::Moments est = p->left + p->right;
      s0.add(est.m0);
      s1.add(est.m1);
      s2.add(est.m2);
      err.m0 += panel_error(*p, 0);
      err.m1 += panel_error(*p, 1);
      err.m2 += panel_error(*p, 2);
    }
    total_ = {s0.value(), s1.value(), s2.value()};
    error_ = err;
  }

  QuadratureResult make_result() const {
    QuadratureResult r;
    r.nodes = nodes_;
    r.truncation_T = T_;
    const double I0 = total_.m0;
    r.sign = I0 > 0.0 ? 1 : (I0 < 0.0 ? -1 : 0);
    r.log_value = shift_ + std::log(std::fabs(I0));
    const double tail = std::exp(log_tail_bound(P(), params_, T_) - r.log_value);
    r.rel_error = (I0 != 0.0 ? std::max(error_.m0 / std::fabs(I0), noise_) : kInf) + tail;
    r.value = r.sign * std::exp(r.log_value);
    r.abs_error = r.rel_error * std::fabs(r.value);
    r.converged = converged();
    return r;
  }

  QuadratureResult failed_result() const {
    QuadratureResult r = make_result();
    r.converged = false;
    return r;
  }

  LogDerivatives finish(bool want_derivatives) {
    LogDerivatives out;
    out.q = make_result();
    const double I0 = total_.m0;
    const double mean = total_.m1 / I0;
    out.d1 = mean;
    if (want_derivatives) {
      double centered = 0.0;
      for (const Panel* p : ordered()) {
        const double mid = 0.5 * (p->lo + p->hi);
        for (auto [a, b] : {std::pair{p->lo, mid}, std::pair{mid, p->hi}}) {
          NodeBuffers buf;
          fill_nodes(a, b, p->kind, buf);
          centered += kernels_->centered(buf.weight, buf.log_abs, buf.sign, buf.u, shift_, mean);
        }
      }
      out.q.nodes = nodes_;
      const double variance = centered / I0;
      const double drift = 2.0 * mean / params_.tau;
      out.d2 = variance - drift;
      const double scale = std::max(std::fabs(variance), std::fabs(drift));
      out.digits_lost = out.d2 != 0.0 ? std::log10(scale / std::fabs(out.d2)) : kInf;
      out.cancellation = out.digits_lost > 6.0;
    }
    return out;
  }

  struct QueueEntry {
    double error;
    std::size_t index;
    bool operator<(const QueueEntry& o) const {
      if (error != o.error) return error < o.error;
      return index > o.index;  // earlier panels first on ties
    }
  };

  QPParams params_;
  QuadOptions options_;
  const kernels::KernelTable* kernels_;
  std::span<const double> original_;
  std::vector<double> signed_;
  int degree_ = 0;
  double r_ = 1.0;
  bool power_start_ = false;
  kernels::LogIntegrand linear_;
  kernels::LogIntegrand reduced_;
  double inv_tau2_ = 1.0;

  double T_ = 0.0;
  double shift_ = 0.0;
  double window_lo_ = 0.0;
  double window_hi_ = 0.0;
  double noise_ = 0.0;
  std::vector<double> grid_t_, grid_log_;

  std::vector<Panel> panels_;
  std::priority_queue<QueueEntry> queue_;
  kernels::Moments total_;
  kernels::Moments error_;
  mutable std::size_t nodes_ = 0;
};

LogDerivatives integrate(std::span<const double> P, const QPParams& params,
                         const QuadOptions& options, bool derivatives) {
  Integrator integrator(P, params, options);
  integrator.set_original(P);
  return integrator.run(derivatives);
}

double horner(std::span<const double> P, double x) {
  double acc = 0.0;
  for (auto it = P.rbegin(); it != P.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double sinhc(double t) {
  if (t < 1e-4) {
    const double t2 = t * t;
    return 1.0 + t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sinh(t) / t;
}

QPParams chi_qp_params(const RootData& space, int n, double tau) {
  if (n < 0 || n > kMaxDegree) throw std::invalid_argument("isotype index outside the parameter box (0..16)");
  if (space.m > kMaxDimension) throw std::invalid_argument("dimension outside the parameter box (<= 16)");
  const double h = 0.5 * (space.m - 1);
  return {h, h, 0.5 * space.m_beta, tau};
}

}  // namespace

double integrand(std::span<const double> P, const QPParams& params, double t) {
  if (t < 0.0) throw std::invalid_argument("integrand: t must be nonnegative");
  if (P.empty()) throw std::invalid_argument("polynomial must have at least one coefficient");
  std::vector<double> flipped(P.begin(), P.end());
  for (std::size_t j = 1; j < flipped.size(); j += 2) flipped[j] = -flipped[j];
  const double tp = params.mu + params.kappa;
  const kernels::LogIntegrand f{1.0 / params.tau, t == 0.0 && tp == 0.0 ? 0.0 : tp, params.kappa,
                                params.nu, flipped};
  double log_abs = 0.0;
  double sign = 0.0;
  kernels::scalar::log_integrand(f, std::span<const double>(&t, 1), std::span<double>(&log_abs, 1),
                                 std::span<double>(&sign, 1));
  if (log_abs > std::log(std::numeric_limits<double>::max()))
    throw OverflowError("integrand exceeds double range at t = " + std::to_string(t));
  return sign * std::exp(log_abs);
}

double integrand_direct(std::span<const double> P, const QPParams& params, double t) {
  const double sh = std::sinh(t);
  return std::exp(-t * t / params.tau) * horner(P, -sh * sh) * std::pow(t, params.mu) *
         std::pow(sh, params.kappa) * std::pow(std::cosh(t), params.nu);
}

double integrand_regrouped(std::span<const double> P, const QPParams& params, double t) {
  const double sh = std::sinh(t);
  const double f = horner(P, -sh * sh) * std::pow(sinhc(t), params.kappa) *
                   std::pow(std::cosh(t), params.nu);
  return std::exp(-t * t / params.tau) * std::pow(t, params.mu + params.kappa) * f;
}

double log_tail_bound(std::span<const double> P, const QPParams& params, double T) {
  double norm = 0.0;
  for (double c : P) norm += std::fabs(c);
  if (norm == 0.0) return -kInf;
  const int degree = static_cast<int>(P.size()) - 1;
  const double tau = params.tau;
  // For t >= T: t^mu <= e^{mu t} (mu >= 0) or T^mu; sh^kappa <= e^{kappa t} or
  // sh(T)^kappa; ch^nu <= e^{nu t} or 1; |P(-sh^2 t)| <= |P|_1 e^{2 n t}.
  double log_const = std::log(norm);
  if (params.mu < 0.0) log_const += params.mu * std::log(T);
  if (params.kappa < 0.0) log_const += params.kappa * std::log(std::sinh(T));
  const double rate = std::max(params.mu, 0.0) + std::max(params.kappa, 0.0) +
                      std::max(params.nu, 0.0) + 2.0 * degree;
  // int_T^inf e^{-t^2/tau + rate t} dt = e^{rate^2 tau/4} sqrt(tau) (sqrt(pi)/2) erfc(z)
  const double z = (T - 0.5 * rate * tau) / std::sqrt(tau);
  double log_erfc = 0.0;
  if (z < 5.0) {
    log_erfc = std::log(std::erfc(z));
  } else {
    log_erfc = -z * z - std::log(z * std::sqrt(std::numbers::pi));  // erfc(z) < e^{-z^2}/(z sqrt(pi))
  }
  return log_const + 0.25 * rate * rate * tau + 0.5 * std::log(tau) +
         std::log(0.5 * std::sqrt(std::numbers::pi)) + log_erfc;
}

QuadratureResult q_p(std::span<const double> P, const QPParams& params,
                     const QuadOptions& options) {
  return integrate(P, params, options, false).q;
}

LogDerivatives q_p_derivatives(std::span<const double> P, const QPParams& params,
                               const QuadOptions& options) {
  return integrate(P, params, options, true);
}

QuadratureResult q_chi(const RootData& space, int n, double tau, const QuadOptions& options) {
  const QPParams params = chi_qp_params(space, n, tau);
  const std::vector<double> P = chi_poly(space, n).to_doubles();
  return q_p(P, params, options);
}

LogDerivatives q_chi_derivatives(const RootData& space, int n, double tau,
                                 const QuadOptions& options) {
  const QPParams params = chi_qp_params(space, n, tau);
  const std::vector<double> P = chi_poly(space, n).to_doubles();
  return q_p_derivatives(P, params, options);
}

double dlogq(const RootData& space, int n, double tau, int order, const QuadOptions& options) {
  if (order != 1 && order != 2) throw std::invalid_argument("dlogq: order must be 1 or 2");
  const LogDerivatives d = q_chi_derivatives(space, n, tau, options);
  return order == 1 ? d.d1 : d.d2;
}

double log_p_chi(const RootData& space, int n, std::complex<double> s,
                 const QuadOptions& options) {
  const double im = s.imag();
  if (!(im > 0.0)) throw std::invalid_argument("p_chi: Im s must be positive");
  const double tau = space.B * space.B * im;
  const QuadratureResult q = q_chi(space, n, tau, options);
  const double m = space.m;
  return std::log(sphere_volume(space.m)) + 0.5 * m * std::numbers::ln2 - m * std::log(space.B) -
         0.5 * m * std::log(im) + q.log_value;
}

double p_chi(const RootData& space, int n, std::complex<double> s, const QuadOptions& options) {
  return std::exp(log_p_chi(space, n, s, options));
}

}  // namespace qflat
