#include "qflat/flatness.hpp"

#include "qflat/hypergeom.hpp"
#include "qflat/parallel.hpp"
#include "qflat/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qflat {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Flat: return "flat";
    case Verdict::ProjectivelyFlatOnly: return "projectively_flat_only";
    case Verdict::NotProjectivelyFlat: return "not_projectively_flat";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(ProjectiveVerdict v) {
  switch (v) {
    case ProjectiveVerdict::Consistent: return "consistent";
    case ProjectiveVerdict::NotProjectivelyFlat: return "not_projectively_flat";
    case ProjectiveVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(FlatVerdict v) {
  switch (v) {
    case FlatVerdict::Flat: return "flat";
    case FlatVerdict::NotFlat: return "not_flat";
    case FlatVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(FlatMode mode) {
  return mode == FlatMode::Literal ? "literal" : "prefactor_corrected";
}

bool CurvatureMatrix::all_valid() const {
  return std::all_of(cells.begin(), cells.end(), [](const CurvatureCell& c) { return c.valid; });
}

CurvatureMatrix curvature_samples(const RootData& space, int n_max,
                                  std::span<const double> tau_grid, const QuadOptions& options,
                                  int threads) {
  if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
  if (n_max > kMaxDegree) throw std::invalid_argument("n_max outside the parameter box (<= 16)");
  if (tau_grid.empty()) throw std::invalid_argument("tau grid must not be empty");
  for (double tau : tau_grid) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    if (tau > kMaxTau) throw std::invalid_argument("tau outside the parameter box (<= 400)");
  }

  CurvatureMatrix matrix;
  matrix.n_max = n_max;
  matrix.tau_grid.assign(tau_grid.begin(), tau_grid.end());
  const std::size_t columns = tau_grid.size();
  matrix.cells.resize(static_cast<std::size_t>(n_max + 1) * columns);

  parallel_for(matrix.cells.size(), threads, [&](std::size_t index) {
    CurvatureCell& cell = matrix.cells[index];
    cell.n = static_cast<int>(index / columns);
    cell.tau = tau_grid[index % columns];
    try {
      const LogDerivatives d = q_chi_derivatives(space, cell.n, cell.tau, options);
      cell.q = d.q;
      cell.d1 = d.d1;
      cell.d2 = d.d2;
      cell.cancellation = d.cancellation;
      cell.valid = std::isfinite(d.d2) && d.q.converged;
      if (!cell.valid) cell.error = "non-finite curvature";
    } catch (const QuadratureError& e) {
      cell.q = e.best();
      cell.error = e.what();
    } catch (const OverflowError& e) {
      cell.error = e.what();
    } catch (const std::domain_error& e) {
      cell.error = e.what();
    }
  });
  return matrix;
}

double max_chi_deviation(const CurvatureMatrix& matrix) {
  double worst = 0.0;
  for (std::size_t col = 0; col < matrix.tau_grid.size(); ++col) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int n = 0; n <= matrix.n_max; ++n) {
      const CurvatureCell& cell = matrix.at(n, col);
      if (!cell.valid) continue;
      lo = std::min(lo, cell.d2);
      hi = std::max(hi, cell.d2);
    }
    if (hi >= lo) worst = std::max(worst, hi - lo);
  }
  return worst;
}

double flat_residual(const CurvatureMatrix& matrix, const RootData& space, FlatMode mode) {
  double worst = 0.0;
  for (const CurvatureCell& cell : matrix.cells) {
    if (!cell.valid) continue;
    const double target =
        mode == FlatMode::PrefactorCorrected ? -0.5 * space.m / (cell.tau * cell.tau) : 0.0;
    worst = std::max(worst, std::fabs(cell.d2 - target));
  }
  return worst;
}

ProjectiveVerdict classify(double deviation) {
  if (deviation <= kPassThreshold) return ProjectiveVerdict::Consistent;
  if (deviation >= kFailThreshold) return ProjectiveVerdict::NotProjectivelyFlat;
  return ProjectiveVerdict::Inconclusive;
}

namespace {

FlatVerdict classify_flat(double residual) {
  if (residual <= kPassThreshold) return FlatVerdict::Flat;
  if (residual >= kFailThreshold) return FlatVerdict::NotFlat;
  return FlatVerdict::Inconclusive;
}

// One refinement step: tolerance / 100, clamped to the supported minimum.
// Returns false when the tolerance cannot be tightened any further.
bool refine(QuadOptions& options) {
  const double next = std::max(options.tol / 100.0, kMinTol);
  if (next >= options.tol) return false;
  options.tol = next;
  return true;
}

}  // namespace

ProjectiveResult projective_test(const RootData& space, int n_max,
                                 std::span<const double> tau_grid, const QuadOptions& options,
                                 int threads) {
  if (n_max < 1) throw std::invalid_argument("projective_test needs n_max >= 1");
  QuadOptions opts = options;
  ProjectiveResult result;
  for (int pass = 0; pass < 2; ++pass) {
    const CurvatureMatrix matrix = curvature_samples(space, n_max, tau_grid, opts, threads);
    result.max_chi_deviation = max_chi_deviation(matrix);
    result.tol_used = opts.tol;
    result.verdict = matrix.all_valid() || result.max_chi_deviation >= kFailThreshold
                         ? classify(result.max_chi_deviation)
                         : ProjectiveVerdict::Inconclusive;
    if (result.verdict != ProjectiveVerdict::Inconclusive || !refine(opts)) break;
  }
  return result;
}

FlatResult flat_test(const RootData& space, int n_max, std::span<const double> tau_grid,
                     const QuadOptions& options, FlatMode mode, int threads) {
  if (n_max < 1) throw std::invalid_argument("flat_test needs n_max >= 1");
  QuadOptions opts = options;
  FlatResult result;
  result.mode = mode;
  for (int pass = 0; pass < 2; ++pass) {
    const CurvatureMatrix matrix = curvature_samples(space, n_max, tau_grid, opts, threads);
    result.residual = flat_residual(matrix, space, mode);
    result.verdict = matrix.all_valid() || result.residual >= kFailThreshold
                         ? classify_flat(result.residual)
                         : FlatVerdict::Inconclusive;
    if (result.verdict != FlatVerdict::Inconclusive || !refine(opts)) break;
  }
  return result;
}

double ExactRhs::approx() const {
  return to_double(coefficient) * std::sqrt(radicand.get_d());
}

std::string ExactRhs::describe() const {
  if (rational()) return to_string(coefficient);
  const std::string root = "sqrt(" + radicand.get_str() + ")";
  if (coefficient == 1) return "irrational:" + root;
  return "irrational:" + to_string(coefficient) + "*" + root;
}

namespace {

// x = s^2 f with f squarefree; returns {s, f}.
std::pair<mpz_class, mpz_class> split_square(mpz_class x) {
  mpz_class s = 1;
  for (mpz_class d = 2; d * d <= x; ++d) {
    const mpz_class d2 = d * d;
    while (x % d2 == 0) {
      x /= d2;
      s *= d;
    }
  }
  return {s, x};
}

Rational power(const Rational& base, const mpz_class& exponent) {
  if (exponent >= 0) return pow(base, exponent.get_ui());
  const Rational inverse = 1 / base;
  return pow(inverse, mpz_class(-exponent).get_ui());
}

}  // namespace

CentralityEntry centrality_entry(const Rational& A, const Rational& c, const Rational& mu,
                                 int n) {
  if (n < 1) throw std::invalid_argument("centrality is checked for n >= 1");
  const Rational twice_mu = 2 * mu;
  if (twice_mu.get_den() != 1)
    throw std::invalid_argument("centrality_entry: mu must be an integer or half-integer");

  CentralityEntry entry;
  entry.n = n;
  Rational lhs = rising_factorial(A + n, static_cast<unsigned>(n)) /
                 rising_factorial(c, static_cast<unsigned>(n));
  lhs.canonicalize();
  entry.lhs = lhs;

  Rational rho = A / (A + 2 * n);
  rho.canonicalize();
  const Rational four_n = pow(Rational(4), static_cast<unsigned long>(n));
  const mpz_class twice = twice_mu.get_num();
  if (twice % 2 == 0) {
    entry.rhs.coefficient = four_n * power(rho, twice / 2);
    entry.rhs.radicand = 1;
  } else {
    // mu = k + 1/2: sqrt(p/q) = s sqrt(f) / q where p q = s^2 f.
    const mpz_class k = (twice - 1) / 2;
    const auto [s, f] = split_square(rho.get_num() * rho.get_den());
    entry.rhs.coefficient = four_n * power(rho, k) * Rational(s, rho.get_den());
    entry.rhs.radicand = f;
  }
  entry.rhs.coefficient.canonicalize();
  entry.pass = entry.rhs.rational() && entry.lhs == entry.rhs.coefficient;
  return entry;
}

std::vector<CentralityEntry> centrality_check(const RootData& space, std::span<const int> n_set) {
  std::vector<CentralityEntry> out;
  out.reserve(n_set.size());
  for (int n : n_set) {
    if (n < 1) throw std::invalid_argument("centrality n values must be positive integers");
    const ChiParams p = chi_params(space, n);
    out.push_back(centrality_entry(p.A, p.c, p.mu, n));
  }
  return out;
}

RationalityArgument rationality_argument(const RootData& space) {
  const ChiParams p = chi_params(space, 0);
  if (p.A.get_den() != 1 || p.A <= 0)
    throw std::invalid_argument("rationality argument needs a positive integer A");
  RationalityArgument arg;
  arg.n_used = static_cast<int>(2 * p.A.get_num().get_si());
  arg.entry = centrality_entry(p.A, p.c, p.mu, arg.n_used);
  arg.lhs_rational = true;
  arg.rhs_rational = arg.entry.rhs.rational();
  arg.conclusion = arg.rhs_rational ? "test passes to next stage" : "m must be odd";
  return arg;
}

double parameter_constraints(double mu, double kappa, double nu) {
  return (nu + kappa + 1.0) / (mu + kappa + 1.0) -
         2.0 * std::pow((nu + kappa) / (nu + kappa + 2.0), mu);
}

DimensionSolution solve_dimension_equation(int m_max) {
  if (m_max < 3) throw std::invalid_argument("solve_dimension_equation needs m_max >= 3");
  DimensionSolution out;
  for (int m = 3; m <= m_max; m += 2) {
    const unsigned long k = static_cast<unsigned long>((m - 1) / 2);
    mpz_class lhs;
    mpz_class rhs;
    mpz_ui_pow_ui(lhs.get_mpz_t(), k + 1, k);
    mpz_ui_pow_ui(rhs.get_mpz_t(), k, k);
    if (lhs == 2 * rhs) out.solutions.push_back(m);
    out.m_values.push_back(m);
    out.g_values.push_back(std::pow(1.0 + 1.0 / static_cast<double>(k), static_cast<double>(k)));
  }
  // g(m) < g(m+2)  <=>  (k+1)^{2k+1} < (k+2)^{k+1} k^k
  out.strictly_increasing = true;
  for (std::size_t i = 0; i + 1 < out.m_values.size(); ++i) {
    const unsigned long k = static_cast<unsigned long>((out.m_values[i] - 1) / 2);
    mpz_class left;
    mpz_class a;
    mpz_class b;
    mpz_ui_pow_ui(left.get_mpz_t(), k + 1, 2 * k + 1);
    mpz_ui_pow_ui(a.get_mpz_t(), k + 2, k + 1);
    mpz_ui_pow_ui(b.get_mpz_t(), k, k);
    if (!(left < a * b)) out.strictly_increasing = false;
  }
  return out;
}

namespace {

void evaluate_numeric(FlatnessReport& report, const ScanOptions& options) {
  QuadOptions quad = options.quad;
  for (int pass = 0; pass < 2; ++pass) {
    report.curvature =
        curvature_samples(report.space, report.n_max, report.tau_grid, quad, options.threads);
    report.numeric_evaluated = true;
    report.numeric_failed = !report.curvature.all_valid();
    report.max_chi_deviation = max_chi_deviation(report.curvature);
    report.prefactor_residual =
        flat_residual(report.curvature, report.space, FlatMode::PrefactorCorrected);
    report.literal_residual = flat_residual(report.curvature, report.space, FlatMode::Literal);
    const double residual = report.mode == FlatMode::Literal ? report.literal_residual
                                                             : report.prefactor_residual;
    const bool inconclusive =
        classify(report.max_chi_deviation) == ProjectiveVerdict::Inconclusive ||
        (classify(report.max_chi_deviation) == ProjectiveVerdict::Consistent &&
         classify_flat(residual) == FlatVerdict::Inconclusive);
    if (!inconclusive || !refine(quad)) break;
  }
}

Verdict numeric_verdict(const FlatnessReport& report) {
  const ProjectiveVerdict pv = classify(report.max_chi_deviation);
  if (pv == ProjectiveVerdict::NotProjectivelyFlat) return Verdict::NotProjectivelyFlat;
  if (report.numeric_failed || pv == ProjectiveVerdict::Inconclusive) return Verdict::Inconclusive;
  if (report.n_max < 1) return Verdict::Inconclusive;
  const double residual =
      report.mode == FlatMode::Literal ? report.literal_residual : report.prefactor_residual;
  switch (classify_flat(residual)) {
    case FlatVerdict::Flat: return Verdict::Flat;
    case FlatVerdict::NotFlat: return Verdict::ProjectivelyFlatOnly;
    case FlatVerdict::Inconclusive: return Verdict::Inconclusive;
  }
  return Verdict::Inconclusive;
}

}  // namespace

FlatnessReport flatness_report(const RootData& space, const ScanOptions& options) {
  FlatnessReport report;
  report.space = space;
  report.n_max = options.n_max;
  report.tau_grid = options.tau_grid;
  report.mode = options.mode;
  report.curvature.n_max = options.n_max;
  report.curvature.tau_grid = options.tau_grid;

  std::vector<int> ns;
  for (int n = 1; n <= options.n_max; ++n) ns.push_back(n);
  report.centrality = centrality_check(space, ns);
  report.rationality = rationality_argument(space);
  for (const CentralityEntry& e : report.centrality) {
    if (!e.pass) {
      report.exact_witness = e;
      break;
    }
  }
  if (!report.exact_witness && !report.rationality.entry.pass)
    report.exact_witness = report.rationality.entry;

  if (!(options.exact_only && report.exact_witness)) evaluate_numeric(report, options);

  if (report.exact_witness) {
    report.verdict = Verdict::NotProjectivelyFlat;
  } else {
    report.verdict = numeric_verdict(report);
  }
  return report;
}

std::vector<FlatnessReport> theorem_scan(std::span<const RootData> spaces,
                                         const ScanOptions& options) {
  if (spaces.empty()) throw std::invalid_argument("theorem_scan needs at least one space");
  std::vector<FlatnessReport> reports;
  reports.reserve(spaces.size());
  for (const RootData& space : spaces) {
    try {
      reports.push_back(flatness_report(space, options));
    } catch (const std::exception& e) {
      FlatnessReport failed;
      failed.space = space;
      failed.n_max = options.n_max;
      failed.tau_grid = options.tau_grid;
      failed.mode = options.mode;
      failed.numeric_failed = true;
      failed.verdict = Verdict::Inconclusive;
      failed.error = e.what();
      reports.push_back(std::move(failed));
    }
  }
  return reports;
}

}  // namespace qflat
