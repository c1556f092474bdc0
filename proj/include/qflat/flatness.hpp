#pragma once

#include "qflat/quadrature.hpp"
#include "qflat/rational.hpp"
#include "qflat/spaces.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qflat {

enum class Verdict { Flat, ProjectivelyFlatOnly, NotProjectivelyFlat, Inconclusive };
enum class ProjectiveVerdict { Consistent, NotProjectivelyFlat, Inconclusive };
enum class FlatVerdict { Flat, NotFlat, Inconclusive };

/// PrefactorCorrected tests (log q)'' == -(m/2)/tau^2, i.e. flatness of
/// log(tau^{-m/2} q); Literal tests (log q)'' == 0 as printed.
enum class FlatMode { PrefactorCorrected, Literal };

std::string to_string(Verdict v);
std::string to_string(ProjectiveVerdict v);
std::string to_string(FlatVerdict v);
std::string to_string(FlatMode mode);

// Numeric decision thresholds on curvature spreads and residuals.
inline constexpr double kPassThreshold = 1e-6;
inline constexpr double kFailThreshold = 1e-3;

struct CurvatureCell {
  int n = 0;
  double tau = 0.0;
  bool valid = false;
  double d2 = 0.0;  // (log q_n)''(tau)
  double d1 = 0.0;
  QuadratureResult q;
  bool cancellation = false;
  std::string error;
};

/// Rows n = 0..n_max, columns tau_grid, row-major.
struct CurvatureMatrix {
  int n_max = 0;
  std::vector<double> tau_grid;
  std::vector<CurvatureCell> cells;

  const CurvatureCell& at(int n, std::size_t column) const {
    return cells[static_cast<std::size_t>(n) * tau_grid.size() + column];
  }
  bool all_valid() const;
};

/// Evaluates (log q_n)'' on the grid. Quadrature failures mark the cell invalid
/// instead of aborting. Cells are independent and may run on `threads` workers.
CurvatureMatrix curvature_samples(const RootData& space, int n_max,
                                  std::span<const double> tau_grid,
                                  const QuadOptions& options = {}, int threads = 1);

struct ProjectiveResult {
  ProjectiveVerdict verdict = ProjectiveVerdict::Inconclusive;
  double max_chi_deviation = 0.0;
  double tol_used = 0.0;
};

/// Spread of (log q_n)'' across n, maximized over tau.
double max_chi_deviation(const CurvatureMatrix& matrix);

/// max over (n, tau) of |(log q_n)'' + (m/2)/tau^2| (PrefactorCorrected) or
/// |(log q_n)''| (Literal).
double flat_residual(const CurvatureMatrix& matrix, const RootData& space, FlatMode mode);

ProjectiveVerdict classify(double deviation);

/// Refines the quadrature tolerance once (by 100x) when the first pass is
/// inconclusive. Requires n_max >= 1.
ProjectiveResult projective_test(const RootData& space, int n_max,
                                 std::span<const double> tau_grid,
                                 const QuadOptions& options = {}, int threads = 1);

struct FlatResult {
  FlatVerdict verdict = FlatVerdict::Inconclusive;
  double residual = 0.0;
  FlatMode mode = FlatMode::PrefactorCorrected;
};

FlatResult flat_test(const RootData& space, int n_max, std::span<const double> tau_grid,
                     const QuadOptions& options = {},
                     FlatMode mode = FlatMode::PrefactorCorrected, int threads = 1);

/// Right-hand side 4^n (A/(A+2n))^mu of the centrality identity, exact.
/// For half-integer mu it is coefficient * sqrt(radicand) with a squarefree
/// radicand; it is rational iff radicand == 1.
struct ExactRhs {
  Rational coefficient;
  mpz_class radicand = 1;
  bool rational() const { return radicand == 1; }
  double approx() const;
  /// "p/q" when rational, else "irrational:<coef>*sqrt(<radicand>)".
  std::string describe() const;
};

struct CentralityEntry {
  int n = 0;
  Rational lhs;
  ExactRhs rhs;
  bool pass = false;
};

/// Gamma(A+2n)/Gamma(A+n) * Gamma(c)/Gamma(c+n) versus 4^n (A/(A+2n))^mu.
/// mu must be an integer or half-integer.
CentralityEntry centrality_entry(const Rational& A, const Rational& c, const Rational& mu,
                                 int n);

std::vector<CentralityEntry> centrality_check(const RootData& space,
                                              std::span<const int> n_set);

struct RationalityArgument {
  int n_used = 0;  // 2A
  bool lhs_rational = true;
  bool rhs_rational = false;
  CentralityEntry entry;
  std::string conclusion;
};

/// Centrality at n = 2A, where A/(A+2n) = 1/5 and the right side is
/// 4^{2A} 5^{-mu}: rational iff mu is an integer iff m is odd.
RationalityArgument rationality_argument(const RootData& space);

/// (nu+kappa+1)/(mu+kappa+1) - 2 ((nu+kappa)/(nu+kappa+2))^mu; zero whenever a
/// central sequence exists for these parameters.
double parameter_constraints(double mu, double kappa, double nu);

struct DimensionSolution {
  std::vector<int> solutions;
  std::vector<int> m_values;     // odd m scanned
  std::vector<double> g_values;  // g(m) = (1 + 2/(m-1))^{(m-1)/2}
  bool strictly_increasing = false;  // exact comparisons g(m) < g(m+2)
};

/// Odd m in [3, m_max] with 2 = ((m+1)/(m-1))^{(m-1)/2}, decided exactly as
/// (k+1)^k == 2 k^k for k = (m-1)/2.
DimensionSolution solve_dimension_equation(int m_max);

struct ScanOptions {
  int n_max = 5;
  std::vector<double> tau_grid = {0.25, 0.5, 1.0, 2.0, 4.0};
  QuadOptions quad{};
  FlatMode mode = FlatMode::PrefactorCorrected;
  int threads = 1;
  bool exact_only = false;  // skip quadrature once an exact witness exists
};

struct FlatnessReport {
  RootData space;
  int n_max = 0;
  std::vector<double> tau_grid;
  FlatMode mode = FlatMode::PrefactorCorrected;
  CurvatureMatrix curvature;
  bool numeric_evaluated = false;
  bool numeric_failed = false;
  double max_chi_deviation = 0.0;
  double prefactor_residual = 0.0;
  double literal_residual = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<CentralityEntry> centrality;
  RationalityArgument rationality;
  std::optional<CentralityEntry> exact_witness;
  std::string error;  // set when the space could not be evaluated at all
};

FlatnessReport flatness_report(const RootData& space, const ScanOptions& options);

/// One report per space, in input order. Throws std::invalid_argument for an
/// empty list.
std::vector<FlatnessReport> theorem_scan(std::span<const RootData> spaces,
                                         const ScanOptions& options);

}  // namespace qflat
