#pragma once

#include "qflat/flatness.hpp"
#include "qflat/kernels.hpp"
#include "qflat/spaces.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qflat::cli {

enum class Subcommand { List, QTable, Curvature, Centrality, Scan, VerifyAsymptotics };
enum class Format { Csv, Json };

std::string to_string(Subcommand s);

struct RunConfig {
  Subcommand subcommand = Subcommand::List;
  std::vector<std::string> selectors;
  std::vector<RootData> spaces;
  std::vector<int> n_values;
  std::vector<double> taus;
  double tol = 1e-12;
  std::size_t max_panels = 20000;
  Format format = Format::Csv;
  std::string output;  // empty: standard output
  FlatMode mode = FlatMode::PrefactorCorrected;
  int threads = 1;
  bool expect_theorem = false;
  bool timestamps = false;
  bool exact_only = false;
  kernels::Isa isa = kernels::Isa::Scalar;
};

/// Either a validated config, or the text to print and the exit code to use
/// (0 for --help, 1 for usage and range errors).
struct ParseResult {
  std::optional<RunConfig> config;
  int exit_code = 0;
  std::string message;
};

/// argv[0] is the program name. QFLAT_THREADS supplies the default worker
/// count; --threads overrides it.
ParseResult parse_args(const std::vector<std::string>& argv);

/// Expands "0..3", "0,2,5" or "4" into a list of integers.
std::vector<int> parse_index_set(const std::string& text);

/// Renders a value known only as sign * e^{log_value} in %.8e style.
std::string format_scientific(int sign, double log_value);
std::string format_double(double value);

/// Runs the subcommand and writes exactly one document to `out`.
/// Exit codes: 0 ok, 1 configuration error, 2 some cell failed,
/// 3 scan verdicts differ from the expected pattern (--expect-theorem).
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// execute() with the sink chosen by config.output.
int run(const RunConfig& config);

}  // namespace qflat::cli
