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

// Acceptance report: one entry per criterion, rendered as JSON and as a CSV
// mirror. Reports carry no timing information so reruns are byte-identical.

#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "chainrec/experiments.hpp"

namespace chainrec {

struct CriterionResult {
  int id = 0;
  std::string name;
  std::string oracle;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

inline std::string renderReportJson(const std::vector<CriterionResult>& results, std::string_view comment) {
  nlohmann::ordered_json j;
  j["comment"] = comment;
  j["criteria"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json e;
    e["id"] = r.id;
    e["name"] = r.name;
    e["oracle"] = r.oracle;
    e["value"] = r.value;
    e["target"] = r.target;
    e["tolerance"] = r.tolerance;
    e["pass"] = r.pass;
    e["detail"] = r.detail;
    j["criteria"].push_back(std::move(e));
  }
  bool all = true;
  for (const auto& r : results) all = all && r.pass;
  j["pass"] = all;
  return j.dump(2) + "\n";
}

namespace detail {
inline std::string csvQuote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}
}  // namespace detail

inline std::string renderReportCsv(const std::vector<CriterionResult>& results, std::string_view comment) {
  std::ostringstream out;
  out << "# " << comment << "\n";
  out << "id,name,oracle,value,target,tolerance,pass,detail\n";
  for (const auto& r : results) {
    out << r.id << ',' << detail::csvQuote(r.name) << ',' << detail::csvQuote(r.oracle) << ','
        << formatDouble(r.value) << ',' << formatDouble(r.target) << ',' << formatDouble(r.tolerance) << ','
        << (r.pass ? 1 : 0) << ',' << detail::csvQuote(r.detail) << "\n";
  }
  return out.str();
}

}  // namespace chainrec
