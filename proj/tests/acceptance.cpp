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


// Runs every acceptance criterion once and prints one line per criterion.
// Exit status is nonzero if any criterion fails or overruns its time budget.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>

#include "chainrec/acceptance.hpp"

namespace {

// Wall-clock budgets in seconds.
const std::map<int, double> kBudget{{1, 10},  {2, 10},  {3, 30},  {4, 60},  {5, 60},   {6, 600},
                                    {7, 600}, {8, 300}, {9, 120}, {10, 600}, {11, 300}, {12, 600}};

}  // namespace

int main(int argc, char** argv) {
  chainrec::AcceptanceOptions options;
  if (argc > 1) options.workers = static_cast<unsigned>(std::strtoul(argv[1], nullptr, 10));
  int failures = 0;
  for (int id : chainrec::suiteCriteria("all")) {
    const auto start = std::chrono::steady_clock::now();
    chainrec::CriterionResult r;
    try {
      r = chainrec::runCriterion(id, options);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "error";
      r.detail = e.what();
      r.pass = false;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool inBudget = seconds <= kBudget.at(id);
    const bool pass = r.pass && inBudget;
    failures += pass ? 0 : 1;
    std::printf("%s criterion %2d  %-44s value=%-12.6g target=%-10.6g tol=%-10.6g time=%.1fs%s\n", pass ? "PASS" : "FAIL",
                id, r.name.c_str(), r.value, r.target, r.tolerance, seconds, inBudget ? "" : " (over budget)");
    std::printf("      oracle: %s; %s\n", r.oracle.c_str(), r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%s: %d of %zu criteria failed\n", failures ? "FAIL" : "PASS", failures, kBudget.size());
  return failures ? 1 : 0;
}
