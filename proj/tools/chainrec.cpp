// Copyright 2026 The chainrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// chainrec: record detection, exact tables, simulation and verification.
//
//   chainrec detect   --in marks.csv --out flags.csv
//   chainrec exact    --d 2 --n 50 [--table chain|strong|weak|chain-count|strong-count|weak-count|all]
//   chainrec simulate --d 2 --n 100 --replicates 10000 --seed 42 [--method sojourn] [--quantity chain-count]
//   chainrec limits   --what y|window --d 2 --replicates 1000 --seed 1
//   chainrec verify   --suite exact|oracle|asymptotic|all [--out DIR]
//
// Every command also accepts --config FILE, a flat key=value file whose keys
// are long option names; flags given on the command line take precedence.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "chainrec/acceptance.hpp"
#include "chainrec/csv_io.hpp"
#include "chainrec/exact_tables.hpp"
#include "chainrec/experiments.hpp"
#include "chainrec/report.hpp"
#include "chainrec/version.hpp"

namespace {

using namespace chainrec;
namespace fs = std::filesystem;

constexpr const char* kOutputDirEnv = "CHAINREC_OUTPUT_DIR";

struct Options {
  std::string configPath;
  std::optional<unsigned> d;
  std::optional<std::uint64_t> n;
  std::optional<double> t;
  std::optional<std::uint64_t> replicates;
  std::uint64_t seed = 1;
  std::string in = "-";
  std::string out;
  std::string suite = "all";
  std::vector<std::string> tolerances;
  unsigned workers = 0;
  std::string method = "sojourn";
  std::string quantity = "chain-count";
  std::string format = "json";
  std::string traceOut;
  std::string table = "chain";
  std::string what = "y";
  double b0 = 1.0;
  double sLo = 0.25, sHi = 1.0, tHi = 4.0;
};

// Applies key=value lines to options of `sub` that were not given on the
// command line.
void applyConfig(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path);
  std::string line;
  for (std::size_t lineNo = 1; std::getline(in, line); ++lineNo) {
    auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw InputError(path + ":" + std::to_string(lineNo) + ": expected key=value");
    const std::string key(detail::trim(text.substr(0, eq)));
    const std::string value(detail::trim(text.substr(eq + 1)));
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw InputError(path + ":" + std::to_string(lineNo) + ": unknown key '" + key + "' for " + sub.get_name());
    }
    if (opt->count() == 0) {
      opt->add_result(value);
      opt->run_callback();
    }
  }
}

std::map<std::string, double> parseTolerances(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("--tolerance expects KEY=VAL, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    try {
      std::size_t used = 0;
      const double v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
      out[key] = v;
    } catch (const std::exception&) {
      throw InputError("--tolerance value for '" + key + "' is not a number");
    }
  }
  return out;
}

double takeTolerance(std::map<std::string, double>& tol, const std::string& key, double fallback) {
  auto it = tol.find(key);
  if (it == tol.end()) return fallback;
  const double v = it->second;
  tol.erase(it);
  return v;
}

void rejectLeftovers(const std::map<std::string, double>& tol, const std::string& command) {
  if (!tol.empty()) throw InputError("unknown --tolerance key '" + tol.begin()->first + "' for " + command);
}

void writeText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

unsigned requireD(const Options& o) {
  if (!o.d || *o.d == 0) throw InputError("--d is required and must be >= 1");
  return *o.d;
}

ExactLimits exactLimitsFrom(std::map<std::string, double>& tol) {
  ExactLimits limits;
  limits.nCap = static_cast<std::uint32_t>(takeTolerance(tol, "n_cap", limits.nCap));
  limits.digitCeiling = static_cast<std::uint32_t>(takeTolerance(tol, "digit_ceiling", limits.digitCeiling));
  return limits;
}

int runDetect(const Options& o) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (o.in != "-") {
    file.open(o.in);
    if (!file) throw InputError("cannot open " + o.in);
    in = &file;
  }
  const std::string comment = headerComment("detect", {{"in", o.in}}, std::nullopt);
  if (o.out.empty() || o.out == "-") {
    detectCsv(*in, std::cout, comment);
    return 0;
  }
  std::ofstream out(o.out, std::ios::binary);
  if (!out) throw InputError("cannot write " + o.out);
  try {
    detectCsv(*in, out, comment);
  } catch (...) {
    out.close();
    fs::remove(o.out);
    throw;
  }
  return 0;
}

int runExact(const Options& o) {
  const unsigned d = requireD(o);
  if (!o.n) throw InputError("--n (largest index) is required");
  auto tol = parseTolerances(o.tolerances);
  const ExactLimits limits = exactLimitsFrom(tol);
  rejectLeftovers(tol, "exact");
  auto comment = [&](ExactTable t) {
    return headerComment("exact", {{"d", std::to_string(d)}, {"n", std::to_string(*o.n)}, {"table", std::string(toString(t))},
                                   {"n_cap", std::to_string(limits.nCap)}},
                         std::nullopt);
  };
  if (o.table == "all") {
    if (o.out.empty() || o.out == "-") throw InputError("--table all needs --out DIR");
    fs::create_directories(o.out);
    for (auto t : kAllExactTables) {
      writeText((fs::path(o.out) / (std::string(toString(t)) + ".csv")).string(),
                renderExactTable(t, d, *o.n, comment(t), limits));
    }
    return 0;
  }
  const ExactTable t = parseExactTable(o.table);
  writeText(o.out, renderExactTable(t, d, *o.n, comment(t), limits));
  return 0;
}

int runSimulate(const Options& o) {
  SimulationRequest r;
  r.quantity = parseQuantity(o.quantity);
  r.method = parseMethod(o.method);
  r.d = requireD(o);
  r.n = o.n;
  r.t = o.t;
  r.initialState = o.b0;
  if (!o.replicates) throw InputError("--replicates is required");
  r.replicates = *o.replicates;
  r.seed = o.seed;
  r.workers = o.workers;
  if (!o.tolerances.empty()) throw InputError("simulate takes no --tolerance keys");
  if (o.format != "json" && o.format != "csv") throw InputError("--format must be json or csv");
  r.validate();
  const std::string comment = headerComment("simulate", r.params(), r.seed, r.replicates);
  const auto summary = runSimulation(r);
  writeText(o.out, o.format == "json" ? renderSummaryJson(summary, comment) : renderSummaryCsv(summary, comment));
  if (!o.traceOut.empty()) {
    std::ostringstream traces;
    writeTraces(r, traces, comment);
    writeText(o.traceOut, traces.str());
  }
  return 0;
}

int runLimits(const Options& o) {
  LimitsRequest r;
  r.d = requireD(o);
  if (!o.replicates || *o.replicates == 0) throw InputError("--replicates is required and must be >= 1");
  r.replicates = *o.replicates;
  r.seed = o.seed;
  r.workers = o.workers;
  auto tol = parseTolerances(o.tolerances);
  std::ostringstream out;
  if (o.what == "y") {
    r.tolerance = takeTolerance(tol, "y", 1e-12);
    rejectLeftovers(tol, "limits --what y");
    if (!(r.tolerance > 0.0)) throw InputError("tolerance y must be > 0");
    out << "# "
        << headerComment("limits", {{"what", "y"}, {"d", std::to_string(r.d)}, {"tol", formatDouble(r.tolerance)}},
                         r.seed, r.replicates)
        << "\n";
    for (double y : sampleYs(r)) out << formatDouble(y) << "\n";
  } else if (o.what == "window") {
    r.tolerance = takeTolerance(tol, "window", 1e-10);
    rejectLeftovers(tol, "limits --what window");
    if (!(r.tolerance > 0.0)) throw InputError("tolerance window must be > 0");
    const LimitWindow w{o.sLo, o.sHi, o.tHi};
    if (!(w.sLo > 0.0 && w.sHi >= w.sLo && w.tHi > 0.0)) throw InputError("window needs 0 < s-lo <= s-hi and t-hi > 0");
    out << "# "
        << headerComment("limits",
                         {{"what", "window"}, {"d", std::to_string(r.d)}, {"s_lo", formatDouble(w.sLo)},
                          {"s_hi", formatDouble(w.sHi)}, {"t_hi", formatDouble(w.tHi)}, {"tol", formatDouble(r.tolerance)}},
                         r.seed, r.replicates)
        << "\n";
    out << "window,xi,sigma\n";
    for (const auto& [i, p] : sampleWindows(r, w)) {
      out << i << ',' << formatDouble(p.xi) << ',' << formatDouble(p.sigma) << "\n";
    }
  } else {
    throw InputError("--what must be y or window");
  }
  writeText(o.out, out.str());
  return 0;
}

int runVerify(const Options& o) {
  const auto ids = suiteCriteria(o.suite);
  if (!o.tolerances.empty()) throw InputError("verify tolerances are fixed; --tolerance is not accepted");
  std::string dir = o.out;
  if (dir.empty()) {
    const char* env = std::getenv(kOutputDirEnv);
    dir = env != nullptr && *env != '\0' ? env : ".";
  }
  fs::create_directories(dir);
  AcceptanceOptions options;
  options.seed = o.seed;
  options.workers = o.workers;
  std::vector<CriterionResult> results;
  for (int id : ids) {
    const auto start = std::chrono::steady_clock::now();
    results.push_back(runCriterion(id, options));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto& r = results.back();
    std::cout << (r.pass ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.name << "\n";
    std::cerr << "      " << r.detail << " [" << formatDouble(std::round(seconds * 100) / 100) << " s]\n";
  }
  const std::string comment = headerComment("verify", {{"suite", o.suite}}, o.seed);
  writeText((fs::path(dir) / "report.json").string(), renderReportJson(results, comment));
  writeText((fs::path(dir) / "report.csv").string(), renderReportCsv(results, comment));
  const bool all = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chain, weak, strong and marginal records in the unit cube: detection, exact laws, simulation"};
  app.set_version_flag("--version", std::string(chainrec::kVersion));
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.configPath, "Flat key=value file; command-line flags win");
    sub->add_option("--out", o.out, "Output file (directory for verify and exact --table all); '-' = stdout");
    sub->add_option("--tolerance", o.tolerances, "Override KEY=VAL (repeatable)");
  };
  auto randomness = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Root seed")->capture_default_str();
    sub->add_option("--workers", o.workers, "Worker threads, 0 = all cores (never changes output)")
        ->capture_default_str();
  };

  auto* detect = app.add_subcommand("detect", "Classify marks read from CSV (header x1,...,xd)");
  common(detect);
  detect->add_option("--in", o.in, "Input CSV, '-' = stdin")->capture_default_str();

  auto* exact = app.add_subcommand("exact", "Exact record probabilities and expected counts, n = 1..N");
  common(exact);
  exact->add_option("--d", o.d, "Dimension");
  exact->add_option("--n", o.n, "Largest index N (<= n_cap, default 500)");
  exact->add_option("--table", o.table, "chain, strong, weak, chain-count, strong-count, weak-count or all")
      ->capture_default_str();
  exact->footer("Tolerance keys: n_cap, digit_ceiling.");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate with standard error");
  common(simulate);
  randomness(simulate);
  simulate->add_option("--d", o.d, "Dimension");
  simulate->add_option("--n", o.n, "Index horizon (chain-count, record-indicator, renewal-count)");
  simulate->add_option("--t", o.t, "Time horizon (height, jumps, compensator)");
  simulate->add_option("--replicates", o.replicates, "Replicates");
  simulate->add_option("--method", o.method, "direct, sojourn or insertion")->capture_default_str();
  simulate->add_option("--quantity", o.quantity,
                       "chain-count, record-indicator, renewal-count, height, jumps or compensator")
      ->capture_default_str();
  simulate->add_option("--b0", o.b0, "Initial state of the height process")->capture_default_str();
  simulate->add_option("--format", o.format, "json or csv")->capture_default_str();
  simulate->add_option("--trace-out", o.traceOut, "Also write replicate,k,T_k,H_k traces here");
  simulate->footer(
      "Invalid combinations: --n with height/jumps/compensator; --t with chain-count/record-indicator/renewal-count;\n"
      "record-indicator with --method insertion; --trace-out with --method insertion or a --t quantity.");

  auto* limits = app.add_subcommand("limits", "Samples of the limit variable Y or windows of the limit point process");
  common(limits);
  randomness(limits);
  limits->add_option("--d", o.d, "Dimension");
  limits->add_option("--replicates", o.replicates, "Number of Y samples or windows");
  limits->add_option("--what", o.what, "y or window")->capture_default_str();
  limits->add_option("--s-lo", o.sLo, "Window lower height")->capture_default_str();
  limits->add_option("--s-hi", o.sHi, "Window upper height")->capture_default_str();
  limits->add_option("--t-hi", o.tHi, "Window time bound")->capture_default_str();
  limits->footer("Tolerance keys: y (series remainder, default 1e-12), window (sigma tail, default 1e-10).");

  auto* verify = app.add_subcommand("verify", "Run the acceptance battery; writes report.json and report.csv");
  common(verify);
  randomness(verify);
  verify->add_option("--suite", o.suite, "exact, oracle, asymptotic or all")->capture_default_str();
  verify->footer(std::string("Output directory: --out, else $") + kOutputDirEnv + ", else the current directory.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!o.configPath.empty()) applyConfig(*sub, o.configPath);
    if (sub == detect) return runDetect(o);
    if (sub == exact) return runExact(o);
    if (sub == simulate) return runSimulate(o);
    if (sub == limits) return runLimits(o);
    return runVerify(o);
  } catch (const std::exception& e) {
    std::cerr << "chainrec " << sub->get_name() << ": " << e.what() << "\n";
    return 2;
  }
}
