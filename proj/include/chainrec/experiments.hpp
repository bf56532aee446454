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

#pragma once

// Reproducible simulation runs behind the `simulate` and `limits` commands:
// request -> replicate samples -> ExperimentSummary, plus the CSV/JSON
// renderings. Replicate i of a request always draws from
// RngStream(seed, deriveStreamId(tag, i)) where tag = requestTag(request).

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "chainrec/error.hpp"
#include "chainrec/samplers.hpp"
#include "chainrec/stats.hpp"
#include "chainrec/version.hpp"

namespace chainrec {

enum class Method { Direct, Sojourn, Insertion };

enum class Quantity {
  ChainCount,       // N_n
  RecordIndicator,  // 1{chain record at index n}
  RenewalCount,     // K_n
  Height,           // B_t
  Jumps,            // chain records of the Poisson-paced process by time t
  Compensator,      // integral of B_s over [0, t]
};

inline std::string_view toString(Method m) {
  switch (m) {
    case Method::Direct: return "direct";
    case Method::Sojourn: return "sojourn";
    case Method::Insertion: return "insertion";
  }
  return "?";
}

inline std::string_view toString(Quantity q) {
  switch (q) {
    case Quantity::ChainCount: return "chain-count";
    case Quantity::RecordIndicator: return "record-indicator";
    case Quantity::RenewalCount: return "renewal-count";
    case Quantity::Height: return "height";
    case Quantity::Jumps: return "jumps";
    case Quantity::Compensator: return "compensator";
  }
  return "?";
}

inline Method parseMethod(std::string_view s) {
  for (auto m : {Method::Direct, Method::Sojourn, Method::Insertion}) {
    if (toString(m) == s) return m;
  }
  throw InputError("unknown method '" + std::string(s) + "' (direct, sojourn, insertion)");
}

inline Quantity parseQuantity(std::string_view s) {
  for (auto q : {Quantity::ChainCount, Quantity::RecordIndicator, Quantity::RenewalCount, Quantity::Height,
                 Quantity::Jumps, Quantity::Compensator}) {
    if (toString(q) == s) return q;
  }
  throw InputError("unknown quantity '" + std::string(s) +
                   "' (chain-count, record-indicator, renewal-count, height, jumps, compensator)");
}

inline bool needsIndexHorizon(Quantity q) {
  return q == Quantity::ChainCount || q == Quantity::RecordIndicator || q == Quantity::RenewalCount;
}

/// Shortest decimal that round-trips to the same double.
inline std::string formatDouble(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

struct SimulationRequest {
  Quantity quantity = Quantity::ChainCount;
  Method method = Method::Sojourn;
  unsigned d = 0;
  std::optional<std::uint64_t> n;
  std::optional<double> t;
  double initialState = 1.0;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;  // never part of the output

  void validate() const {
    if (d == 0) throw InputError("--d is required and must be >= 1");
    if (replicates == 0) throw InputError("--replicates must be >= 1");
    if (needsIndexHorizon(quantity)) {
      if (!n || *n == 0) throw InputError(std::string(toString(quantity)) + " needs --n >= 1");
      if (t) throw InputError(std::string(toString(quantity)) + " takes --n, not --t");
      if (quantity == Quantity::RecordIndicator && method == Method::Insertion) {
        throw InputError("record-indicator is available for the direct and sojourn methods only");
      }
    } else {
      if (!t || !(*t > 0.0)) throw InputError(std::string(toString(quantity)) + " needs --t > 0");
      if (n) throw InputError(std::string(toString(quantity)) + " takes --t, not --n");
      if (!(initialState > 0.0)) throw InputError("initial state must be > 0");
    }
  }

  /// Parameters that define the experiment, in a canonical order.
  std::map<std::string, std::string> params() const {
    std::map<std::string, std::string> p{{"d", std::to_string(d)}, {"quantity", std::string(toString(quantity))}};
    if (needsIndexHorizon(quantity)) {
      p["n"] = std::to_string(*n);
      p["method"] = std::string(toString(method));
    } else {
      p["t"] = formatDouble(*t);
      p["b0"] = formatDouble(initialState);
    }
    return p;
  }
};

inline std::string requestTag(const SimulationRequest& r) { return experimentTag("simulate", r.params()); }

inline ChainRecordTrace simulateTrace(RngStream& rng, Method method, unsigned d, std::uint64_t n) {
  switch (method) {
    case Method::Direct: return simulateDirect(rng, d, n);
    case Method::Sojourn: return simulateSojourn(rng, d, n);
    case Method::Insertion: break;
  }
  throw InputError("the insertion construction does not produce a trace");
}

/// One replicate's value for the request.
inline double sampleReplicate(const SimulationRequest& r, RngStream& rng) {
  switch (r.quantity) {
    case Quantity::ChainCount:
      if (r.method == Method::Insertion) return static_cast<double>(simulateInsertion(rng, r.d, *r.n));
      return static_cast<double>(simulateTrace(rng, r.method, r.d, *r.n).count());
    case Quantity::RecordIndicator:
      return simulateTrace(rng, r.method, r.d, *r.n).recordAt(*r.n) ? 1.0 : 0.0;
    case Quantity::RenewalCount: {
      if (r.method == Method::Insertion) return static_cast<double>(simulateInsertionRun(rng, r.d, *r.n).renewalCount);
      auto trace = simulateTrace(rng, r.method, r.d, *r.n);
      return static_cast<double>(renewalCount(trace, *r.n, rng));
    }
    case Quantity::Height:
      return simulatePoissonPaced(rng, r.d, *r.t, r.initialState).finalState();
    case Quantity::Jumps:
      return static_cast<double>(simulatePoissonPaced(rng, r.d, *r.t, r.initialState).jumpCount());
    case Quantity::Compensator: {
      const auto path = simulatePoissonPaced(rng, r.d, *r.t, r.initialState);
      return path.integral(*r.t);
    }
  }
  return 0.0;
}

inline std::vector<double> simulateSamples(const SimulationRequest& r) {
  r.validate();
  const std::string tag = requestTag(r);
  return collect([&](RngStream& rng) { return sampleReplicate(r, rng); }, r.replicates, r.seed, tag, r.workers);
}

/// Summary of the request; a single replicate yields no standard error.
inline ExperimentSummary runSimulation(const SimulationRequest& r) {
  const auto samples = simulateSamples(r);
  return summarize(std::string(toString(r.quantity)), samples, r.seed, r.params());
}

inline std::string headerComment(std::string_view command, const std::map<std::string, std::string>& params,
                                 std::optional<std::uint64_t> seed, std::optional<std::uint64_t> replicates = {}) {
  std::string s = "chainrec " + std::string(kVersion) + " " + std::string(command);
  for (const auto& [k, v] : params) s += " " + k + "=" + v;
  if (replicates) s += " replicates=" + std::to_string(*replicates);
  if (seed) s += " seed=" + std::to_string(*seed);
  return s;
}

inline std::string renderSummaryJson(const ExperimentSummary& s, std::string_view comment) {
  nlohmann::ordered_json j;
  j["comment"] = comment;
  j["estimator"] = s.estimator;
  j["value"] = s.value;
  if (s.stdError) j["stdError"] = *s.stdError;
  else j["stdError"] = nullptr;
  j["replicates"] = s.replicates;
  j["seed"] = s.seed;
  j["params"] = s.params;
  return j.dump(2) + "\n";
}

inline std::string renderSummaryCsv(const ExperimentSummary& s, std::string_view comment) {
  std::ostringstream out;
  out << "# " << comment << "\n";
  out << "estimator,value,std_error,replicates,seed,params\n";
  std::string params;
  for (const auto& [k, v] : s.params) params += (params.empty() ? "" : ";") + k + "=" + v;
  out << s.estimator << ',' << formatDouble(s.value) << ',' << (s.stdError ? formatDouble(*s.stdError) : "NA") << ','
      << s.replicates << ',' << s.seed << ',' << params << "\n";
  return out.str();
}

/// CSV `replicate,k,T_k,H_k` for the first `replicates` traces of the request.
inline void writeTraces(const SimulationRequest& r, std::ostream& out, std::string_view comment) {
  r.validate();
  if (!needsIndexHorizon(r.quantity) || r.method == Method::Insertion) {
    throw InputError("trace dumps need the direct or sojourn method with --n");
  }
  const std::string tag = requestTag(r);
  out << "# " << comment << "\n";
  out << "replicate,k,T_k,H_k\n";
  for (std::uint64_t i = 0; i < r.replicates; ++i) {
    RngStream rng(r.seed, deriveStreamId(tag, i));
    const auto trace = simulateTrace(rng, r.method, r.d, *r.n);
    for (std::size_t k = 0; k < trace.recordTimes.size(); ++k) {
      out << i << ',' << (k + 1) << ',' << trace.recordTimes[k] << ',' << formatDouble(trace.heights[k]) << '\n';
    }
  }
}

struct LimitsRequest {
  unsigned d = 0;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  double tolerance = 1e-12;
  unsigned workers = 1;
};

/// Y samples, one per replicate.
inline std::vector<double> sampleYs(const LimitsRequest& r) {
  if (r.d == 0) throw InputError("--d is required and must be >= 1");
  const std::string tag = experimentTag("limits-y", {{"d", std::to_string(r.d)}, {"tol", formatDouble(r.tolerance)}});
  return collect([&](RngStream& rng) { return sampleY(rng, r.d, r.tolerance).value; }, r.replicates, r.seed, tag,
                 r.workers);
}

/// Points of `replicates` independent windows of the limit point process,
/// as (window index, point) pairs.
inline std::vector<std::pair<std::uint64_t, LimitPoint>> sampleWindows(const LimitsRequest& r, const LimitWindow& w) {
  if (r.d == 0) throw InputError("--d is required and must be >= 1");
  const std::string tag = experimentTag("limits-window", {{"d", std::to_string(r.d)},
                                                          {"s_lo", formatDouble(w.sLo)},
                                                          {"s_hi", formatDouble(w.sHi)},
                                                          {"t_hi", formatDouble(w.tHi)},
                                                          {"tol", formatDouble(r.tolerance)}});
  auto windows = runReplicates(r.replicates, r.workers, [&](std::size_t i) {
    RngStream rng(r.seed, deriveStreamId(tag, i));
    return sampleLimitProcess(rng, r.d, w, r.tolerance).points;
  });
  std::vector<std::pair<std::uint64_t, LimitPoint>> out;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    for (const auto& p : windows[i]) out.emplace_back(i, p);
  }
  return out;
}

}  // namespace chainrec
