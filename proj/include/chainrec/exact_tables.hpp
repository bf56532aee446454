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

// CSV tables of exact probabilities and expected counts:
//   n,p_exact_fraction,p_exact_decimal15      (probability tables)
//   n,e_exact_fraction,e_exact_decimal15      (expected-count tables)
// Fractions are num/den in lowest terms; decimals have 15 significant
// digits, rounded half-to-even from the exact value.

#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "chainrec/exact_engine.hpp"

namespace chainrec {

enum class ExactTable { Chain, Strong, Weak, ChainCount, StrongCount, WeakCount };

inline constexpr ExactTable kAllExactTables[] = {ExactTable::Chain,      ExactTable::Strong,      ExactTable::Weak,
                                                 ExactTable::ChainCount, ExactTable::StrongCount, ExactTable::WeakCount};

inline std::string_view toString(ExactTable t) {
  switch (t) {
    case ExactTable::Chain: return "chain";
    case ExactTable::Strong: return "strong";
    case ExactTable::Weak: return "weak";
    case ExactTable::ChainCount: return "chain-count";
    case ExactTable::StrongCount: return "strong-count";
    case ExactTable::WeakCount: return "weak-count";
  }
  return "?";
}

inline ExactTable parseExactTable(std::string_view s) {
  for (auto t : kAllExactTables) {
    if (toString(t) == s) return t;
  }
  throw InputError("unknown table '" + std::string(s) +
                   "' (chain, strong, weak, chain-count, strong-count, weak-count)");
}

inline bool isCountTable(ExactTable t) {
  return t == ExactTable::ChainCount || t == ExactTable::StrongCount || t == ExactTable::WeakCount;
}

/// Values for n = 1..nMax.
inline std::vector<ExactRational> exactColumn(ExactTable table, unsigned d, std::uint64_t nMax,
                                              const ExactLimits& limits = {}) {
  detail::requireDimension(d);
  detail::requireIndex(nMax, limits);
  auto cumulative = [](std::vector<ExactRational> v) {
    for (std::size_t i = 1; i < v.size(); ++i) v[i] += v[i - 1];
    return v;
  };
  switch (table) {
    case ExactTable::Chain: return chainRecordProbs(d, nMax, limits);
    case ExactTable::Weak: return weakRecordProbs(d, nMax, limits);
    case ExactTable::WeakCount: return expectedWeakCounts(d, nMax, limits);
    case ExactTable::ChainCount: return cumulative(chainRecordProbs(d, nMax, limits));
    case ExactTable::Strong:
    case ExactTable::StrongCount: {
      std::vector<ExactRational> v;
      v.reserve(nMax);
      for (std::uint64_t n = 1; n <= nMax; ++n) v.push_back(strongRecordProb(d, n));
      return table == ExactTable::Strong ? v : cumulative(std::move(v));
    }
  }
  return {};
}

inline std::string renderExactTable(ExactTable table, unsigned d, std::uint64_t nMax, std::string_view comment,
                                    const ExactLimits& limits = {}) {
  const auto values = exactColumn(table, d, nMax, limits);
  const char* prefix = isCountTable(table) ? "e" : "p";
  std::ostringstream out;
  if (!comment.empty()) out << "# " << comment << "\n";
  out << "n," << prefix << "_exact_fraction," << prefix << "_exact_decimal15\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << (i + 1) << ',' << values[i].toFractionString() << ',' << values[i].toDecimalString(15) << '\n';
  }
  return out.str();
}

}  // namespace chainrec
