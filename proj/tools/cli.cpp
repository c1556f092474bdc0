#include "cli.hpp"

#include "qflat/asymptotics.hpp"
#include "qflat/hypergeom.hpp"
#include "qflat/parallel.hpp"
#include "qflat/quadrature.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qflat::cli {

using Json = nlohmann::ordered_json;
using qflat::to_string;

namespace {

constexpr const char* kToolName = "qflat";
constexpr const char* kVersion = "1.0.0";

const std::vector<double> kDefaultGrid = {0.25, 0.5, 1.0, 2.0, 4.0};

// Probes used by verify-asymptotics.
constexpr double kWatsonTau = 1e-2;
constexpr double kWatsonHalfTau = 5e-3;
constexpr double kLargeTau = 100.0;
constexpr double kLargerTau = 400.0;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

double parse_real(const std::string& token, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    throw UsageError(what + ": cannot parse '" + token + "' as a number");
  }
  if (used != token.size()) throw UsageError(what + ": cannot parse '" + token + "' as a number");
  return value;
}

int parse_int(const std::string& token) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(token, &used);
  } catch (const std::exception&) {
    throw UsageError("cannot parse '" + token + "' as an integer");
  }
  if (used != token.size()) throw UsageError("cannot parse '" + token + "' as an integer");
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  std::istringstream in(text);
  while (std::getline(in, current, sep))
    if (!current.empty()) parts.push_back(current);
  return parts;
}

std::vector<double> parse_taus(const std::vector<std::string>& raw) {
  std::vector<double> taus;
  for (const auto& chunk : raw) {
    for (const auto& token : split(chunk, ',')) {
      const double tau = parse_real(token, "--tau");
      if (!(tau > 0.0) || !std::isfinite(tau)) throw UsageError("tau must be positive");
      if (tau > kMaxTau) throw UsageError("tau must be <= 400 (parameter box)");
      taus.push_back(tau);
    }
  }
  return taus;
}

std::vector<RootData> resolve_spaces(const std::vector<std::string>& selectors) {
  std::vector<RootData> spaces;
  for (const auto& chunk : selectors) {
    for (const auto& token : split(chunk, ',')) {
      if (token == "all") {
        const auto catalog = default_catalog();
        spaces.insert(spaces.end(), catalog.begin(), catalog.end());
        continue;
      }
      RootData space;
      try {
        space = parse_space(token);
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("unknown space selector: ") + e.what());
      }
      if (space.m > kMaxDimension)
        throw UsageError("space " + token + " has dimension " + std::to_string(space.m) +
                         " > 16 (parameter box)");
      spaces.push_back(space);
    }
  }
  return spaces;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Sphere: return "sphere";
    case Family::ComplexProjective: return "complex_projective";
    case Family::QuaternionicProjective: return "quaternionic_projective";
    case Family::CayleyPlane: return "cayley_plane";
  }
  return "sphere";
}

// RFC 4180: quote fields containing separators, quotes or line breaks.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_field(fields[i]);
  }
  out << '\n';
}

std::string format_value(const QuadratureResult& q) {
  if (std::isfinite(q.value) && q.value != 0.0) return format_double(q.value);
  return format_scientific(q.sign, q.log_value);
}

std::string format_abs_error(const QuadratureResult& q) {
  if (std::isfinite(q.abs_error) && (q.abs_error != 0.0 || q.rel_error == 0.0))
    return format_double(q.abs_error);
  if (q.sign == 0 || !(q.rel_error > 0.0)) return format_double(q.abs_error);
  return format_scientific(1, q.log_value + std::log(q.rel_error));
}

Json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json rational_json(const Rational& q) { return to_string(q); }

Json entry_json(const CentralityEntry& e) {
  Json j;
  j["n"] = e.n;
  j["lhs"] = rational_json(e.lhs);
  j["lhs_exact"] = true;
  j["rhs"] = e.rhs.describe();
  j["rhs_exact"] = e.rhs.rational();
  j["rhs_approx"] = e.rhs.approx();
  j["pass"] = e.pass;
  return j;
}

struct Cell {
  RootData space;
  int n = 0;
  double tau = 0.0;
  bool ok = false;
  LogDerivatives d;
  std::string error;
};

std::vector<Cell> compute_cells(const RunConfig& config, const QuadOptions& quad) {
  std::vector<Cell> cells;
  for (const auto& space : config.spaces)
    for (int n : config.n_values)
      for (double tau : config.taus) {
        Cell c;
        c.space = space;
        c.n = n;
        c.tau = tau;
        cells.push_back(c);
      }
  parallel_for(cells.size(), config.threads, [&](std::size_t i) {
    Cell& c = cells[i];
    try {
      c.d = q_chi_derivatives(c.space, c.n, c.tau, quad);
      c.ok = std::isfinite(c.d.d2);
      if (!c.ok) c.error = "non-finite curvature";
    } catch (const QuadratureError& e) {
      c.d.q = e.best();
      c.error = e.what();
    } catch (const OverflowError& e) {
      c.error = e.what();
    } catch (const std::domain_error& e) {
      c.error = e.what();
    }
  });
  return cells;
}

double prefactor_residual(const Cell& c) {
  return c.d.d2 + 0.5 * c.space.m / (c.tau * c.tau);
}

Json parameters_json(const RunConfig& config) {
  Json p;
  Json spaces = Json::array();
  for (const auto& s : config.spaces) spaces.push_back(s.name());
  p["spaces"] = spaces;
  p["n"] = config.n_values;
  p["tau"] = config.taus;
  p["tol"] = config.tol;
  p["mode"] = to_string(config.mode);
  p["kernel"] = std::string(kernels::name(config.isa));
  return p;
}

Json document_header(const RunConfig& config) {
  Json doc;
  doc["tool"] = kToolName;
  doc["version"] = kVersion;
  doc["command"] = to_string(config.subcommand);
  if (config.timestamps) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    doc["generated_at"] = buf;
  }
  doc["parameters"] = parameters_json(config);
  return doc;
}

QuadOptions quad_options(const RunConfig& config) {
  QuadOptions q;
  q.tol = config.tol;
  q.isa = config.isa;
  q.max_panels = config.max_panels;
  return q;
}

int run_list(const RunConfig& config, std::ostream& out) {
  if (config.format == Format::Csv) {
    csv_row(out, {"space", "family", "m", "m_beta", "m_half", "A", "c", "mu", "kappa", "nu"});
    for (const auto& s : config.spaces) {
      const ChiParams p = chi_params(s, 0);
      csv_row(out, {s.name(), family_name(s.family), std::to_string(s.m), std::to_string(s.m_beta),
                    std::to_string(s.m_half), to_string(p.A), to_string(p.c), to_string(p.mu),
                    to_string(p.kappa), to_string(p.nu)});
    }
    return 0;
  }
  Json doc = document_header(config);
  Json results = Json::array();
  for (const auto& s : config.spaces) {
    const ChiParams p = chi_params(s, 0);
    Json j;
    j["space"] = s.name();
    j["family"] = family_name(s.family);
    j["m"] = s.m;
    j["m_beta"] = s.m_beta;
    j["m_half"] = s.m_half;
    j["A"] = rational_json(p.A);
    j["c"] = rational_json(p.c);
    j["mu"] = rational_json(p.mu);
    j["kappa"] = rational_json(p.kappa);
    j["nu"] = rational_json(p.nu);
    results.push_back(j);
  }
  doc["results"] = results;
  out << doc.dump(2) << '\n';
  return 0;
}

int run_grid(const RunConfig& config, std::ostream& out) {
  const bool curvature = config.subcommand == Subcommand::Curvature;
  const std::vector<Cell> cells = compute_cells(config, quad_options(config));
  const bool any_failed =
      std::any_of(cells.begin(), cells.end(), [](const Cell& c) { return !c.ok; });

  if (config.format == Format::Csv) {
    std::vector<std::string> header = {"space", "n", "tau", "q", "abs_err", "dlogq2"};
    if (curvature) header.push_back("prefactor_residual");
    csv_row(out, header);
    for (const Cell& c : cells) {
      std::vector<std::string> row = {c.space.name(), std::to_string(c.n), format_double(c.tau)};
      if (c.ok) {
        row.push_back(format_value(c.d.q));
        row.push_back(format_abs_error(c.d.q));
        row.push_back(format_double(c.d.d2));
        if (curvature) row.push_back(format_double(prefactor_residual(c)));
      } else {
        row.insert(row.end(), curvature ? 4 : 3, "nan");
      }
      csv_row(out, row);
    }
  } else {
    Json doc = document_header(config);
    Json results = Json::array();
    for (const Cell& c : cells) {
      Json j;
      j["space"] = c.space.name();
      j["n"] = c.n;
      j["tau"] = c.tau;
      j["status"] = c.ok ? "ok" : "failed";
      j["q"] = c.ok ? json_number(c.d.q.value) : Json(nullptr);
      j["log_q"] = c.ok ? json_number(c.d.q.log_value) : Json(nullptr);
      j["abs_err"] = c.ok ? json_number(c.d.q.abs_error) : Json(nullptr);
      j["rel_err"] = c.ok ? json_number(c.d.q.rel_error) : Json(nullptr);
      j["dlogq1"] = c.ok ? json_number(c.d.d1) : Json(nullptr);
      j["dlogq2"] = c.ok ? json_number(c.d.d2) : Json(nullptr);
      if (curvature) j["prefactor_residual"] = c.ok ? json_number(prefactor_residual(c)) : Json(nullptr);
      j["cancellation"] = c.d.cancellation;
      j["nodes"] = c.d.q.nodes;
      j["truncation_T"] = c.d.q.truncation_T;
      if (!c.ok) j["error"] = c.error;
      results.push_back(j);
    }
    doc["results"] = results;
    out << doc.dump(2) << '\n';
  }
  return any_failed ? 2 : 0;
}

int run_centrality(const RunConfig& config, std::ostream& out) {
  struct Row {
    RootData space;
    std::vector<CentralityEntry> entries;
  };
  std::vector<Row> rows;
  for (const auto& s : config.spaces) rows.push_back({s, centrality_check(s, config.n_values)});

  if (config.format == Format::Csv) {
    csv_row(out, {"space", "n", "lhs", "rhs", "rhs_exact", "pass"});
    for (const Row& r : rows)
      for (const auto& e : r.entries)
        csv_row(out, {r.space.name(), std::to_string(e.n), to_string(e.lhs), e.rhs.describe(),
                      e.rhs.rational() ? "true" : "false", e.pass ? "true" : "false"});
    return 0;
  }
  Json doc = document_header(config);
  Json results = Json::array();
  for (const Row& r : rows) {
    Json j;
    j["space"] = r.space.name();
    Json entries = Json::array();
    for (const auto& e : r.entries) entries.push_back(entry_json(e));
    j["entries"] = entries;
    j["all_pass"] = std::all_of(r.entries.begin(), r.entries.end(),
                                [](const CentralityEntry& e) { return e.pass; });
    results.push_back(j);
  }
  doc["results"] = results;
  out << doc.dump(2) << '\n';
  return 0;
}

Verdict expected_verdict(const RootData& space) {
  return space.family == Family::Sphere && space.size == 3 ? Verdict::Flat
                                                           : Verdict::NotProjectivelyFlat;
}

int run_scan(const RunConfig& config, std::ostream& out) {
  ScanOptions opts;
  opts.n_max = *std::max_element(config.n_values.begin(), config.n_values.end());
  opts.tau_grid = config.taus;
  opts.quad = quad_options(config);
  opts.mode = config.mode;
  opts.threads = config.threads;
  opts.exact_only = config.exact_only;
  const std::vector<FlatnessReport> reports = theorem_scan(config.spaces, opts);

  bool any_failed = false;
  bool matches = true;
  for (const auto& r : reports) {
    if (r.numeric_failed || !r.error.empty()) any_failed = true;
    if (r.verdict != expected_verdict(r.space)) matches = false;
  }

  if (config.format == Format::Csv) {
    csv_row(out, {"space", "verdict", "max_chi_deviation", "prefactor_residual", "literal_residual",
                  "witness_n", "witness_lhs", "witness_rhs", "numeric_status"});
    for (const auto& r : reports) {
      const bool numeric = r.numeric_evaluated;
      const std::string status = !r.error.empty() ? "error"
                                 : !numeric       ? "skipped"
                                 : r.numeric_failed ? "failed"
                                                    : "ok";
      csv_row(out, {r.space.name(), to_string(r.verdict),
                    numeric ? format_double(r.max_chi_deviation) : "nan",
                    numeric ? format_double(r.prefactor_residual) : "nan",
                    numeric ? format_double(r.literal_residual) : "nan",
                    r.exact_witness ? std::to_string(r.exact_witness->n) : "",
                    r.exact_witness ? to_string(r.exact_witness->lhs) : "",
                    r.exact_witness ? r.exact_witness->rhs.describe() : "", status});
    }
  } else {
    Json doc = document_header(config);
    Json results = Json::array();
    for (const auto& r : reports) {
      Json j;
      j["space"] = r.space.name();
      j["m"] = r.space.m;
      j["m_beta"] = r.space.m_beta;
      j["m_half"] = r.space.m_half;
      j["verdict"] = to_string(r.verdict);
      j["mode"] = to_string(r.mode);
      j["n_max"] = r.n_max;

      Json numeric;
      numeric["evaluated"] = r.numeric_evaluated;
      numeric["failed"] = r.numeric_failed;
      numeric["max_chi_deviation"] = r.numeric_evaluated ? json_number(r.max_chi_deviation) : Json(nullptr);
      numeric["prefactor_residual"] = r.numeric_evaluated ? json_number(r.prefactor_residual) : Json(nullptr);
      numeric["literal_residual"] = r.numeric_evaluated ? json_number(r.literal_residual) : Json(nullptr);
      Json curvature = Json::array();
      if (r.numeric_evaluated) {
        for (int n = 0; n <= r.curvature.n_max; ++n) {
          Json row = Json::array();
          for (std::size_t col = 0; col < r.curvature.tau_grid.size(); ++col) {
            const CurvatureCell& cell = r.curvature.at(n, col);
            row.push_back(cell.valid ? json_number(cell.d2) : Json(nullptr));
          }
          curvature.push_back(row);
        }
      }
      numeric["curvature"] = curvature;
      j["numeric"] = numeric;

      j["exact_witness"] = r.exact_witness ? entry_json(*r.exact_witness) : Json(nullptr);
      Json centrality = Json::array();
      for (const auto& e : r.centrality) centrality.push_back(entry_json(e));
      j["centrality"] = centrality;
      if (r.error.empty()) {
        Json rat;
        rat["n_used"] = r.rationality.n_used;
        rat["lhs_rational"] = r.rationality.lhs_rational;
        rat["rhs_rational"] = r.rationality.rhs_rational;
        rat["entry"] = entry_json(r.rationality.entry);
        rat["conclusion"] = r.rationality.conclusion;
        j["rationality"] = rat;
      } else {
        j["rationality"] = nullptr;
        j["error"] = r.error;
      }
      results.push_back(j);
    }
    doc["results"] = results;

    const DimensionSolution dim = solve_dimension_equation(99);
    Json d;
    d["m_max"] = 99;
    d["solutions"] = dim.solutions;
    d["strictly_increasing"] = dim.strictly_increasing;
    doc["dimension_equation"] = d;

    Json expect;
    expect["checked"] = config.expect_theorem;
    expect["matches"] = matches;
    doc["expected_pattern"] = expect;
    out << doc.dump(2) << '\n';
  }
  if (any_failed) return 2;
  if (config.expect_theorem && !matches) return 3;
  return 0;
}

struct AsymptoticRow {
  RootData space;
  int n = 0;
  bool ok = false;
  std::string error;
  double watson_err = 0.0;       // at kWatsonTau
  double watson_err_half = 0.0;  // at kWatsonHalfTau
  double watson_ratio = 0.0;
  bool watson_pass = false;
  bool large_applicable = false;
  double large_ratio = 0.0;   // at kLargeTau
  double larger_ratio = 0.0;  // at kLargerTau
  bool large_pass = false;
};

AsymptoticRow verify_cell(const RootData& space, int n, const QuadOptions& quad) {
  AsymptoticRow row;
  row.space = space;
  row.n = n;
  const ChiParams p = chi_params(space, n);
  const double mu = to_double(p.mu);
  const double kappa = to_double(p.kappa);
  const double nu = to_double(p.nu);
  const std::vector<double> P = chi_poly(space, n).to_doubles();

  auto watson_error = [&](double tau) {
    const double q = q_chi(space, n, tau, quad).value;
    return std::fabs(q - watson2(P, mu, kappa, nu, tau)) / q;
  };
  row.watson_err = watson_error(kWatsonTau);
  row.watson_err_half = watson_error(kWatsonHalfTau);
  row.watson_ratio = row.watson_err_half / row.watson_err;
  row.watson_pass = row.watson_err < 1e-2 && row.watson_ratio >= 0.15 && row.watson_ratio <= 0.35;

  row.large_applicable = nu > 0.0 && kappa > 0.0;
  if (row.large_applicable) {
    const QuadratureResult a = q_chi(space, n, kLargeTau, quad);
    const QuadratureResult b = q_chi(space, n, kLargerTau, quad);
    row.large_ratio = std::exp(a.log_value - log_qp_large_tau(P, mu, kappa, nu, kLargeTau));
    row.larger_ratio = std::exp(b.log_value - log_qp_large_tau(P, mu, kappa, nu, kLargerTau));
    const double dev = std::fabs(row.large_ratio - 1.0);
    const double dev_larger = std::fabs(row.larger_ratio - 1.0);
    // Where the leading term is exact, both deviations sit at the quadrature
    // error and cannot be ordered.
    const bool exact = dev <= 4.0 * a.rel_error && dev_larger <= 4.0 * b.rel_error;
    row.large_pass = row.large_ratio >= 0.8 && row.large_ratio <= 1.2 && (dev_larger < dev || exact);
  }
  row.ok = true;
  return row;
}

int run_verify(const RunConfig& config, std::ostream& out) {
  const QuadOptions quad = quad_options(config);
  std::vector<AsymptoticRow> rows;
  for (const auto& s : config.spaces)
    for (int n : config.n_values) {
      AsymptoticRow r;
      r.space = s;
      r.n = n;
      rows.push_back(r);
    }
  parallel_for(rows.size(), config.threads, [&](std::size_t i) {
    try {
      rows[i] = verify_cell(rows[i].space, rows[i].n, quad);
    } catch (const QuadratureError& e) {
      rows[i].error = e.what();
    } catch (const OverflowError& e) {
      rows[i].error = e.what();
    }
  });
  const bool any_failed =
      std::any_of(rows.begin(), rows.end(), [](const AsymptoticRow& r) { return !r.ok; });

  if (config.format == Format::Csv) {
    csv_row(out, {"space", "n", "watson_err_1e-2", "watson_err_5e-3", "watson_ratio", "watson_pass",
                  "large_ratio_100", "large_ratio_400", "large_pass"});
    for (const auto& r : rows) {
      if (!r.ok) {
        csv_row(out, {r.space.name(), std::to_string(r.n), "nan", "nan", "nan", "false", "nan",
                      "nan", "false"});
        continue;
      }
      csv_row(out, {r.space.name(), std::to_string(r.n), format_double(r.watson_err),
                    format_double(r.watson_err_half), format_double(r.watson_ratio),
                    r.watson_pass ? "true" : "false",
                    r.large_applicable ? format_double(r.large_ratio) : "",
                    r.large_applicable ? format_double(r.larger_ratio) : "",
                    r.large_applicable ? (r.large_pass ? "true" : "false") : "n/a"});
    }
  } else {
    Json doc = document_header(config);
    Json results = Json::array();
    for (const auto& r : rows) {
      Json j;
      j["space"] = r.space.name();
      j["n"] = r.n;
      j["status"] = r.ok ? "ok" : "failed";
      Json w;
      w["err_1e-2"] = r.ok ? json_number(r.watson_err) : Json(nullptr);
      w["err_5e-3"] = r.ok ? json_number(r.watson_err_half) : Json(nullptr);
      w["ratio"] = r.ok ? json_number(r.watson_ratio) : Json(nullptr);
      w["pass"] = r.watson_pass;
      j["watson"] = w;
      Json l;
      l["applicable"] = r.large_applicable;
      l["ratio_100"] = r.ok && r.large_applicable ? json_number(r.large_ratio) : Json(nullptr);
      l["ratio_400"] = r.ok && r.large_applicable ? json_number(r.larger_ratio) : Json(nullptr);
      l["pass"] = r.large_pass;
      j["large_tau"] = l;
      if (!r.ok) j["error"] = r.error;
      results.push_back(j);
    }
    doc["results"] = results;
    out << doc.dump(2) << '\n';
  }
  return any_failed ? 2 : 0;
}

}  // namespace

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::List: return "list";
    case Subcommand::QTable: return "qtable";
    case Subcommand::Curvature: return "curvature";
    case Subcommand::Centrality: return "centrality";
    case Subcommand::Scan: return "scan";
    case Subcommand::VerifyAsymptotics: return "verify-asymptotics";
  }
  return "list";
}

std::vector<int> parse_index_set(const std::string& text) {
  std::vector<int> values;
  for (const auto& token : split(text, ',')) {
    const auto dots = token.find("..");
    if (dots == std::string::npos) {
      values.push_back(parse_int(token));
      continue;
    }
    const int lo = parse_int(token.substr(0, dots));
    const int hi = parse_int(token.substr(dots + 2));
    if (hi < lo) throw UsageError("empty range '" + token + "'");
    for (int n = lo; n <= hi; ++n) values.push_back(n);
  }
  if (values.empty()) throw UsageError("empty index set");
  return values;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8e", value);
  return buf;
}

std::string format_scientific(int sign, double log_value) {
  if (sign == 0) return format_double(0.0);
  if (std::isnan(log_value)) return "nan";
  if (std::isinf(log_value)) return log_value > 0 ? (sign > 0 ? "inf" : "-inf") : format_double(0.0);
  const double l10 = log_value / std::numbers::ln10;
  long long exponent = static_cast<long long>(std::floor(l10));
  double mantissa = std::pow(10.0, l10 - static_cast<double>(exponent));
  char digits[32];
  std::snprintf(digits, sizeof digits, "%.8f", mantissa);
  if (digits[0] == '1' && digits[1] == '0') {
    ++exponent;
    std::snprintf(digits, sizeof digits, "%.8f", mantissa / 10.0);
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%se%c%02lld", sign < 0 ? "-" : "", digits,
                exponent < 0 ? '-' : '+', exponent < 0 ? -exponent : exponent);
  return buf;
}

ParseResult parse_args(const std::vector<std::string>& argv) {
  ParseResult result;
  if (argv.empty()) {
    result.exit_code = 1;
    result.message = "error: empty argument vector\n";
    return result;
  }

  CLI::App app{"Curvature of quantum Hilbert fields on rank-1 symmetric spaces", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  struct Raw {
    std::vector<std::string> space;
    std::vector<std::string> spaces;
    std::string n;
    std::vector<std::string> tau;
    double tol = 1e-12;
    std::size_t max_panels = 20000;
    std::string format;
    std::string output;
    std::string mode = "prefactor_corrected";
    int threads = 0;
    bool expect_theorem = false;
    bool timestamps = false;
    bool exact_only = false;
    std::string kernel = "auto";
  } raw;

  struct Spec {
    Subcommand sub;
    const char* name;
    const char* help;
  };
  const std::vector<Spec> specs = {
      {Subcommand::List, "list", "List the space catalog with its root data"},
      {Subcommand::QTable, "qtable", "Tabulate q_n(tau) and (log q_n)''(tau)"},
      {Subcommand::Curvature, "curvature", "Curvature grid (log q_n)'' with prefactor residuals"},
      {Subcommand::Centrality, "centrality", "Exact centrality certificates per isotype"},
      {Subcommand::Scan, "scan", "Flatness verdict for each space"},
      {Subcommand::VerifyAsymptotics, "verify-asymptotics",
       "Compare quadrature with the small- and large-tau asymptotic laws"},
  };
  std::vector<std::pair<CLI::App*, Subcommand>> subs;
  for (const Spec& s : specs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--space", raw.space, "Space selector: S<m>, CP<n>, HP<n>, OP2 or all");
    sub->add_option("--spaces", raw.spaces, "Comma-separated selectors, or all");
    if (s.sub != Subcommand::List) {
      sub->add_option("--n", raw.n, "Isotype indices: 3, 0..3 or 0,2,5");
    }
    if (s.sub == Subcommand::QTable || s.sub == Subcommand::Curvature ||
        s.sub == Subcommand::Scan) {
      sub->add_option("--tau", raw.tau, "Comma-separated tau values");
    }
    if (s.sub != Subcommand::List && s.sub != Subcommand::Centrality) {
      sub->add_option("--tol", raw.tol, "Relative quadrature tolerance in [1e-13, 1e-4]");
      sub->add_option("--max-panels", raw.max_panels, "Panel budget per integral (default 20000)");
      sub->add_option("--threads", raw.threads, "Worker threads (default: QFLAT_THREADS or 1)");
      sub->add_option("--kernel", raw.kernel, "Node kernel: auto, scalar or avx2");
    }
    if (s.sub == Subcommand::Scan || s.sub == Subcommand::Curvature) {
      sub->add_option("--mode", raw.mode, "Flatness criterion: prefactor_corrected or literal");
    }
    if (s.sub == Subcommand::Scan) {
      sub->add_flag("--expect-theorem", raw.expect_theorem,
                    "Exit 0 only if S3 is flat and every other space is not projectively flat");
      sub->add_flag("--exact-only", raw.exact_only,
                    "Skip quadrature for spaces that already have an exact witness");
    }
    sub->add_option("--format", raw.format, "Output format: csv or json");
    sub->add_option("--output,-o", raw.output, "Write to this file instead of standard output");
    sub->add_flag("--timestamps", raw.timestamps, "Include a generation timestamp (JSON)");
    subs.emplace_back(sub, s.sub);
  }

  std::vector<const char*> cargv;
  cargv.reserve(argv.size());
  for (const auto& a : argv) cargv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp&) {
    std::string help = app.help();
    for (auto& [sub, kind] : subs)
      if (sub->parsed()) help = sub->help();
    result.message = help;
    return result;
  } catch (const CLI::CallForVersion&) {
    result.message = std::string(kVersion) + "\n";
    return result;
  } catch (const CLI::ParseError& e) {
    result.exit_code = 1;
    result.message = std::string("error: ") + e.what() + "\n" + app.help();
    return result;
  }

  RunConfig config;
  for (auto& [sub, kind] : subs)
    if (sub->parsed()) config.subcommand = kind;

  try {
    std::vector<std::string> selectors = raw.space;
    selectors.insert(selectors.end(), raw.spaces.begin(), raw.spaces.end());
    if (selectors.empty()) selectors.push_back("all");
    config.selectors = selectors;
    config.spaces = resolve_spaces(selectors);
    if (config.spaces.empty()) throw UsageError("no spaces selected");

    config.taus = raw.tau.empty() ? kDefaultGrid : parse_taus(raw.tau);

    switch (config.subcommand) {
      case Subcommand::QTable: config.n_values = {0, 1, 2, 3}; break;
      case Subcommand::Curvature:
      case Subcommand::Scan: config.n_values = {0, 1, 2, 3, 4, 5}; break;
      case Subcommand::Centrality: config.n_values = {1, 2, 3, 4, 5}; break;
      case Subcommand::VerifyAsymptotics: config.n_values = {0, 1, 2, 3}; break;
      case Subcommand::List: break;
    }
    if (!raw.n.empty()) config.n_values = parse_index_set(raw.n);
    for (int n : config.n_values) {
      if (n < 0) throw UsageError("n must be nonnegative");
      if (n > kMaxDegree) throw UsageError("n must be <= 16 (parameter box)");
      if (config.subcommand == Subcommand::Centrality && n < 1)
        throw UsageError("centrality needs n >= 1");
    }

    if (!(raw.tol >= kMinTol && raw.tol <= kMaxTol))
      throw UsageError("tol must lie in [1e-13, 1e-4]");
    config.tol = raw.tol;
    if (raw.max_panels < 1) throw UsageError("max-panels must be positive");
    config.max_panels = raw.max_panels;

    if (raw.format.empty()) {
      config.format = config.subcommand == Subcommand::Scan ||
                              config.subcommand == Subcommand::Centrality
                          ? Format::Json
                          : Format::Csv;
    } else if (raw.format == "csv") {
      config.format = Format::Csv;
    } else if (raw.format == "json") {
      config.format = Format::Json;
    } else {
      throw UsageError("format must be csv or json");
    }

    if (raw.mode == "prefactor_corrected") {
      config.mode = FlatMode::PrefactorCorrected;
    } else if (raw.mode == "literal") {
      config.mode = FlatMode::Literal;
    } else {
      throw UsageError("mode must be prefactor_corrected or literal");
    }

    int threads = raw.threads;
    if (threads == 0) {
      threads = 1;
      if (const char* env = std::getenv("QFLAT_THREADS"); env != nullptr && *env != '\0') {
        try {
          threads = parse_int(env);
        } catch (const UsageError&) {
          throw UsageError("QFLAT_THREADS must be a positive integer");
        }
      }
    }
    if (threads < 1) throw UsageError("threads must be a positive integer");
    config.threads = threads;

    try {
      config.isa = kernels::parse_isa(raw.kernel);
      if (!kernels::available(config.isa))
        throw UsageError("kernel " + raw.kernel + " is not supported on this CPU");
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }

    config.output = raw.output;
    config.expect_theorem = raw.expect_theorem;
    config.timestamps = raw.timestamps;
    config.exact_only = raw.exact_only;
  } catch (const UsageError& e) {
    result.exit_code = 1;
    result.message = std::string("error: ") + e.what() + "\n";
    return result;
  }
  result.config = config;
  return result;
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    switch (config.subcommand) {
      case Subcommand::List: return run_list(config, out);
      case Subcommand::QTable:
      case Subcommand::Curvature: return run_grid(config, out);
      case Subcommand::Centrality: return run_centrality(config, out);
      case Subcommand::Scan: return run_scan(config, out);
      case Subcommand::VerifyAsymptotics: return run_verify(config, out);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int run(const RunConfig& config) {
  if (config.output.empty()) return execute(config, std::cout, std::cerr);
  std::ostringstream buffer;
  const int code = execute(config, buffer, std::cerr);
  std::ofstream file(config.output, std::ios::binary);
  if (!file) {
    std::cerr << "error: cannot open " << config.output << " for writing\n";
    return 1;
  }
  file << buffer.str();
  return code;
}

}  // namespace qflat::cli
