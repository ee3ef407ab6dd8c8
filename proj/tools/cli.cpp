#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "greenfcc/green_series.hpp"
#include "greenfcc/quadrature.hpp"

namespace greenfcc::cli {

namespace {

using Record = nlohmann::ordered_json;

struct Settings {
  std::optional<double> t;
  double gamma = 1.0;
  std::vector<int> lmn;
  std::vector<std::string> methods;
  std::string accel = "none";
  double tol = 1e-10;
  int n_max = kDefaultMaxTerms;
  int l_max = kDefaultMaxTerms;
  std::string format = "json";
  std::string out_path;
  int nodes = QuadratureSpec{}.nodes_per_axis;
  int subdivisions = QuadratureSpec{}.subdivisions_per_axis;
  int corner_levels = QuadratureSpec{}.corner_refinement_levels;
  int threads = 1;
  bool no_timing = false;
  std::vector<double> t_range;
  std::vector<double> gamma_range;
  int terms = 30;
};

/// Invalid flag values; reported with exit code 1 like parse errors.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Site {
  int l;
  int m;
  int n;
};

/// Writes records as JSON lines or as CSV with a header taken from the first
/// record's keys.
class RecordWriter {
 public:
  RecordWriter(std::string format, std::ostream& out) : csv_(format == "csv"), out_(out) {}

  void write(const Record& record) {
    if (!csv_) {
      out_ << record.dump() << '\n';
      return;
    }
    if (!header_written_) {
      bool first = true;
      for (const auto& item : record.items()) {
        out_ << (first ? "" : ",") << quote(item.key());
        first = false;
      }
      out_ << "\r\n";
      header_written_ = true;
    }
    bool first = true;
    for (const auto& item : record.items()) {
      out_ << (first ? "" : ",") << csv_field(item.value());
      first = false;
    }
    out_ << "\r\n";
  }

 private:
  static std::string quote(const std::string& text) {
    if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (const char c : text) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }

  static std::string csv_field(const Record& value) {
    if (value.is_null()) return "";
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    if (value.is_number_integer()) return std::to_string(value.get<long long>());
    if (value.is_number_float()) {
      const double x = value.get<double>();
      if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
      if (std::isnan(x)) return "nan";
      char buffer[32];
      std::snprintf(buffer, sizeof buffer, "%.17g", x);
      return buffer;
    }
    if (value.is_string()) return quote(value.get<std::string>());
    return quote(value.dump());
  }

  bool csv_;
  bool header_written_ = false;
  std::ostream& out_;
};

void add_common_options(CLI::App& command, Settings& settings) {
  command.add_option("--t", settings.t, "Energy-like parameter t");
  command.add_option("--gamma", settings.gamma, "Anisotropy gamma (1 for the isotropic lattice)")->capture_default_str();
  command.add_option("--lmn", settings.lmn, "Site indices L M N (repeatable in sweep)")
      ->expected(3)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  command.add_option("--method", settings.methods, "series5, series6 or quadrature")->delimiter(',');
  command.add_option("--accel", settings.accel, "none, wynn or aitken")->capture_default_str();
  command.add_option("--tol", settings.tol, "Absolute tolerance")->capture_default_str();
  command.add_option("--n-max", settings.n_max, "Outer truncation cap (hard cap 1000)")->capture_default_str();
  command.add_option("--l-max", settings.l_max, "Inner truncation cap of series6")->capture_default_str();
  command.add_option("--format", settings.format, "json or csv")->capture_default_str();
  command.add_option("--out", settings.out_path, "Output file (default stdout)");
  command.add_option("--nodes", settings.nodes, "Quadrature nodes per axis")->capture_default_str();
  command.add_option("--subdivisions", settings.subdivisions, "Quadrature cells per axis")->capture_default_str();
  command.add_option("--corner-levels", settings.corner_levels, "Dyadic corner refinement depth")
      ->capture_default_str();
  command.add_option("--threads", settings.threads, "Worker threads")->capture_default_str();
}

Acceleration accel_of(const Settings& settings) {
  const auto parsed = parse_acceleration(settings.accel);
  if (!parsed) throw UsageError("unknown --accel value: " + settings.accel);
  return *parsed;
}

std::vector<Method> methods_of(const Settings& settings, std::vector<Method> fallback) {
  if (settings.methods.empty()) return fallback;
  std::vector<Method> methods;
  for (const auto& name : settings.methods) {
    const auto parsed = parse_method(name);
    if (!parsed) throw UsageError("unknown --method value: " + name);
    methods.push_back(*parsed);
  }
  return methods;
}

std::vector<Site> sites_of(const Settings& settings) {
  if (settings.lmn.empty()) return {{0, 0, 0}};
  if (settings.lmn.size() % 3 != 0) throw UsageError("--lmn takes three integers");
  std::vector<Site> sites;
  for (std::size_t i = 0; i < settings.lmn.size(); i += 3) {
    sites.push_back({settings.lmn[i], settings.lmn[i + 1], settings.lmn[i + 2]});
  }
  return sites;
}

void check_common(const Settings& settings) {
  if (settings.format != "json" && settings.format != "csv") throw UsageError("--format must be json or csv");
  if (settings.threads < 1) throw UsageError("--threads must be positive");
}

double require_t(const Settings& settings) {
  if (!settings.t) throw UsageError("--t is required");
  return *settings.t;
}

SeriesOptions series_options(const Settings& settings) {
  SeriesOptions options;
  options.tol = settings.tol;
  options.n_max = settings.n_max;
  options.l_max = settings.l_max;
  options.accel = accel_of(settings);
  return options;
}

QuadratureSpec quadrature_spec(const Settings& settings) {
  QuadratureSpec spec;
  spec.nodes_per_axis = settings.nodes;
  spec.subdivisions_per_axis = settings.subdivisions;
  spec.corner_refinement_levels = settings.corner_levels;
  spec.target_tol = settings.tol;
  spec.threads = settings.threads;
  return spec;
}

/// Grid values start + k step for k = 0, 1, ... up to stop (inclusive, with a
/// relative slack of 1e-9 steps).
std::vector<double> range_values(const std::vector<double>& range, const char* flag) {
  if (range.size() != 3) throw UsageError(std::string(flag) + " takes START STOP STEP");
  const double start = range[0];
  const double stop = range[1];
  const double step = range[2];
  if (!(step > 0.0) || !(start <= stop) || !std::isfinite(start) || !std::isfinite(stop)) {
    throw UsageError(std::string(flag) + " describes an empty range");
  }
  std::vector<double> values;
  for (long k = 0;; ++k) {
    const double value = start + static_cast<double>(k) * step;
    if (value > stop + 1e-9 * step) break;
    values.push_back(value);
  }
  return values;
}

/// Evaluates one point with one method, sharing series tables when given.
SeriesEvaluation evaluate(Method method, const GreenParams& params, const Settings& settings,
                          const SeriesTables* tables5 = nullptr, const SeriesTables* tables6 = nullptr) {
  switch (method) {
    case Method::series5:
      return tables5 ? evaluate_series5(params, series_options(settings), *tables5)
                     : evaluate_series5(params, series_options(settings));
    case Method::series6:
      return tables6 ? evaluate_series6(params, series_options(settings), *tables6)
                     : evaluate_series6(params, series_options(settings));
    case Method::quadrature: return green_by_quadrature(params, quadrature_spec(settings));
  }
  throw std::logic_error("unhandled method");
}

Record echo(const GreenParams& params) {
  Record record;
  record["t"] = params.t;
  record["gamma"] = params.gamma;
  record["l"] = params.l;
  record["m"] = params.m;
  record["n"] = params.n;
  return record;
}

template <typename Work>
void run_indexed(int count, int threads, Work&& work) {
  if (threads <= 1 || count <= 1) {
    for (int index = 0; index < count; ++index) work(index);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (int w = 0; w < std::min(threads, count); ++w) {
    pool.emplace_back([&] {
      for (int index = next++; index < count; index = next++) work(index);
    });
  }
}

int cmd_eval(const Settings& settings, RecordWriter& writer, std::ostream& err) {
  const auto methods = methods_of(settings, {Method::series5});
  if (methods.size() != 1) throw UsageError("eval takes a single --method");
  const auto sites = sites_of(settings);
  if (sites.size() != 1) throw UsageError("eval takes a single --lmn");
  const GreenParams params{require_t(settings), settings.gamma, sites[0].l, sites[0].m, sites[0].n};
  const Acceleration accel = accel_of(settings);

  const auto start = std::chrono::steady_clock::now();
  SeriesEvaluation result;
  try {
    result = evaluate(methods[0], params, settings);
  } catch (const DomainError& error) {
    err << "domain error: " << error.what() << '\n';
    return kFailure;
  }
  const auto stop = std::chrono::steady_clock::now();

  Record record = echo(params);
  record["method"] = to_string(result.method);
  record["accel"] = to_string(methods[0] == Method::quadrature ? Acceleration::none : accel);
  record["value"] = result.value;
  record["abs_error_estimate"] = result.abs_error_estimate;
  record["terms_used"] = result.terms_used;
  record["converged"] = result.converged;
  if (settings.no_timing) {
    record["wall_time_ms"] = nullptr;
  } else {
    record["wall_time_ms"] = std::chrono::duration<double, std::milli>(stop - start).count();
  }
  writer.write(record);
  return result.converged ? kOk : kNotConverged;
}

int cmd_sweep(const Settings& settings, RecordWriter& writer) {
  const auto methods = methods_of(settings, {Method::series5});
  const auto sites = sites_of(settings);
  const std::vector<double> t_values =
      settings.t_range.empty() ? std::vector<double>{require_t(settings)} : range_values(settings.t_range, "--t-range");
  const std::vector<double> gamma_values = settings.gamma_range.empty()
                                               ? std::vector<double>{settings.gamma}
                                               : range_values(settings.gamma_range, "--gamma-range");
  (void)accel_of(settings);

  std::vector<GreenParams> grid;
  for (const double gamma : gamma_values) {
    for (const auto& site : sites) {
      for (const double t : t_values) grid.push_back({t, gamma, site.l, site.m, site.n});
    }
  }
  int max_site = 0;
  for (const auto& site : sites) max_site = std::max({max_site, site.l, site.m, site.n});

  const SeriesOptions options = series_options(settings);
  std::unique_ptr<SeriesTables> tables5;
  std::unique_ptr<SeriesTables> tables6;
  if (std::find(methods.begin(), methods.end(), Method::series5) != methods.end()) {
    tables5 = std::make_unique<SeriesTables>(SeriesTables::for_series5(options.n_max, max_site));
  }
  if (std::find(methods.begin(), methods.end(), Method::series6) != methods.end()) {
    tables6 = std::make_unique<SeriesTables>(SeriesTables::for_series6(options.n_max, options.l_max, max_site));
  }

  struct Cell {
    std::optional<SeriesEvaluation> result;
    std::string status;
  };
  const int count = static_cast<int>(grid.size() * methods.size());
  std::vector<Cell> cells(static_cast<std::size_t>(count));
  run_indexed(count, settings.threads, [&](int index) {
    const auto& params = grid[static_cast<std::size_t>(index) / methods.size()];
    const Method method = methods[static_cast<std::size_t>(index) % methods.size()];
    auto& cell = cells[static_cast<std::size_t>(index)];
    try {
      cell.result = evaluate(method, params, settings, tables5.get(), tables6.get());
      cell.status = cell.result->converged ? "ok" : "not_converged";
    } catch (const DomainError& error) {
      cell.status = std::string("domain_error: ") + error.what();
    }
  });

  const bool paired = methods.size() > 1;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    Record record = echo(grid[p]);
    for (std::size_t q = 0; q < methods.size(); ++q) {
      const auto& cell = cells[p * methods.size() + q];
      const std::string suffix = paired ? "_" + std::string(to_string(methods[q])) : "";
      if (!paired) record["method"] = to_string(methods[q]);
      record["value" + suffix] = cell.result ? Record(cell.result->value) : Record(nullptr);
      record["error" + suffix] = cell.result ? Record(cell.result->abs_error_estimate) : Record(nullptr);
      record["terms" + suffix] = cell.result ? Record(cell.result->terms_used) : Record(nullptr);
      record["converged" + suffix] = cell.result ? Record(cell.result->converged) : Record(false);
      record["status" + suffix] = cell.status;
    }
    writer.write(record);
  }
  return kOk;
}

int cmd_compare(const Settings& settings, RecordWriter& writer, std::ostream& err) {
  const auto methods = methods_of(settings, {Method::series5, Method::series6, Method::quadrature});
  const auto sites = sites_of(settings);
  if (sites.size() != 1) throw UsageError("compare takes a single --lmn");
  const GreenParams params{require_t(settings), settings.gamma, sites[0].l, sites[0].m, sites[0].n};
  const Acceleration accel = accel_of(settings);

  std::vector<SeriesEvaluation> results;
  try {
    for (const Method method : methods) results.push_back(evaluate(method, params, settings));
  } catch (const DomainError& error) {
    err << "domain error: " << error.what() << '\n';
    return kFailure;
  }
  bool all_converged = true;
  for (std::size_t q = 0; q < methods.size(); ++q) {
    const auto& result = results[q];
    Record record = echo(params);
    record["method"] = to_string(result.method);
    record["accel"] = to_string(methods[q] == Method::quadrature ? Acceleration::none : accel);
    record["value"] = result.value;
    record["abs_error_estimate"] = result.abs_error_estimate;
    record["terms_used"] = result.terms_used;
    record["converged"] = result.converged;
    record["difference"] = result.value - results.front().value;
    writer.write(record);
    all_converged = all_converged && result.converged;
  }
  return all_converged ? kOk : kNotConverged;
}

int cmd_convergence(const Settings& settings, RecordWriter& writer, std::ostream& err) {
  const auto methods = methods_of(settings, {Method::series5});
  if (methods.size() != 1 || methods[0] == Method::quadrature) {
    throw UsageError("convergence takes a single series --method");
  }
  const auto sites = sites_of(settings);
  if (sites.size() != 1) throw UsageError("convergence takes a single --lmn");
  const GreenParams params{require_t(settings), settings.gamma, sites[0].l, sites[0].m, sites[0].n};
  if (settings.terms < 1) throw UsageError("--terms must be positive");

  std::vector<ConvergenceRow> rows;
  try {
    rows = convergence_trace(methods[0], params, series_options(settings), settings.terms);
  } catch (const DomainError& error) {
    err << "domain error: " << error.what() << '\n';
    return kFailure;
  }
  for (const auto& row : rows) {
    Record record = echo(params);
    record["method"] = to_string(methods[0]);
    record["accel"] = settings.accel;
    record["i"] = row.index;
    record["term"] = row.term;
    record["partial_sum"] = row.partial_sum;
    record["tail_bound"] = row.tail_bound;
    record["accelerated_estimate"] = row.accelerated_estimate;
    writer.write(record);
  }
  return kOk;
}

struct ConfigEntry {
  std::string key;
  std::vector<std::string> values;
};

std::vector<ConfigEntry> config_entries(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw UsageError("cannot open config file " + path);
  std::vector<ConfigEntry> entries;
  std::string line;
  while (std::getline(file, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto equals = line.find('=');
    if (equals == std::string::npos) throw UsageError("config line without '=': " + line);
    ConfigEntry entry;
    entry.key = line.substr(first, equals - first);
    entry.key.erase(entry.key.find_last_not_of(" \t") + 1);
    std::istringstream values(line.substr(equals + 1));
    std::string value;
    while (values >> value) entry.values.push_back(value);
    entries.push_back(std::move(entry));
  }
  return entries;
}

/// Splices `--config FILE` entries in after the subcommand. A key also given on
/// the command line is skipped, so explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> expanded;
  std::optional<std::string> config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      expanded.push_back(args[i]);
    }
  }
  if (!config_path || expanded.empty()) return expanded;

  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(expanded.begin(), expanded.end(), [&](const std::string& token) {
      return token == flag || token.rfind(flag + "=", 0) == 0;
    });
  };
  std::vector<std::string> injected;
  for (const auto& entry : config_entries(*config_path)) {
    if (given(entry.key)) continue;
    injected.push_back("--" + entry.key);
    injected.insert(injected.end(), entry.values.begin(), entry.values.end());
  }
  expanded.insert(expanded.begin() + 1, injected.begin(), injected.end());
  return expanded;
}

}  // namespace

std::vector<std::string> config_tokens(const std::string& path) {
  std::vector<std::string> tokens;
  for (const auto& entry : config_entries(path)) {
    tokens.push_back("--" + entry.key);
    tokens.insert(tokens.end(), entry.values.begin(), entry.values.end());
  }
  return tokens;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Settings settings;
  CLI::App app{"Face-centred cubic lattice Green function G(t, l, m, n; gamma)", "greenfcc"};
  app.require_subcommand(1, 1);

  auto* eval = app.add_subcommand("eval", "Evaluate one point");
  add_common_options(*eval, settings);
  eval->add_flag("--no-timing", settings.no_timing, "Emit wall_time_ms as null");

  auto* sweep = app.add_subcommand("sweep", "Evaluate a parameter grid");
  add_common_options(*sweep, settings);
  sweep->add_option("--t-range", settings.t_range, "START STOP STEP")->expected(3);
  sweep->add_option("--gamma-range", settings.gamma_range, "START STOP STEP")->expected(3);

  auto* compare = app.add_subcommand("compare", "Evaluate one point with several methods");
  add_common_options(*compare, settings);

  auto* convergence = app.add_subcommand("convergence", "Per-term convergence table");
  add_common_options(*convergence, settings);
  convergence->add_option("--terms", settings.terms, "Number of outer terms")->capture_default_str();

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& error) {
    err << error.what() << "\n\n" << app.help();
    return kFailure;
  } catch (const UsageError& error) {
    err << error.what() << "\n\n" << app.help();
    return kFailure;
  }

  try {
    check_common(settings);
    std::ofstream file;
    if (!settings.out_path.empty()) {
      file.open(settings.out_path);
      if (!file) throw UsageError("cannot open output file " + settings.out_path);
    }
    RecordWriter writer(settings.format, settings.out_path.empty() ? out : file);
    if (eval->parsed()) return cmd_eval(settings, writer, err);
    if (sweep->parsed()) return cmd_sweep(settings, writer);
    if (compare->parsed()) return cmd_compare(settings, writer, err);
    return cmd_convergence(settings, writer, err);
  } catch (const UsageError& error) {
    err << error.what() << "\n\n" << app.help();
    return kFailure;
  } catch (const DomainError& error) {
    err << "domain error: " << error.what() << '\n';
    return kFailure;
  } catch (const std::invalid_argument& error) {
    err << "invalid argument: " << error.what() << '\n';
    return kFailure;
  }
}

}  // namespace greenfcc::cli
