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

// Marks in the unit cube, the strict componentwise order on them, and
// streaming detectors for chain, weak, strong and marginal lower records.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chainrec/error.hpp"

namespace chainrec {

/// A point of the unit cube [0,1]^d, d >= 1.
class Mark {
 public:
  explicit Mark(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw InputError("mark must have dimension >= 1");
    for (double c : coords_) {
      if (!(c >= 0.0 && c <= 1.0)) {
        throw InputError("mark coordinate " + std::to_string(c) + " outside [0,1]");
      }
    }
  }
  Mark(std::initializer_list<double> coords) : Mark(std::vector<double>(coords)) {}

  std::size_t dimension() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

  friend bool operator==(const Mark&, const Mark&) = default;

 private:
  std::vector<double> coords_;
};

namespace detail {

inline void requireSameDimension(std::size_t a, std::size_t b) {
  if (a != b) {
    throw InputError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

// x <= y componentwise (x "weakly below" y).
inline bool lowerOrEqual(std::span<const double> x, std::span<const double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > y[i]) return false;
  }
  return true;
}

inline bool lowerStrictOrder(std::span<const double> x, std::span<const double> y) {
  return lowerOrEqual(x, y) && !std::equal(x.begin(), x.end(), y.begin());
}

}  // namespace detail

/// x ≺ y: x != y and x[i] <= y[i] for every coordinate.
inline bool dominates(const Mark& x, const Mark& y) {
  detail::requireSameDimension(x.dimension(), y.dimension());
  return detail::lowerStrictOrder(x.coords(), y.coords());
}

/// Reversed order on arbitrary real vectors: x != y and x[i] >= y[i] for all i.
inline bool dominatesUpper(std::span<const double> x, std::span<const double> y) {
  detail::requireSameDimension(x.size(), y.size());
  return detail::lowerStrictOrder(y, x);
}

/// Product of coordinates; the Lebesgue measure of the lower section of x.
inline double height(const Mark& x) {
  double h = 1.0;
  for (double c : x.coords()) h *= c;
  return h;
}

/// Componentwise x -> -log x. Lower chain records of the input are the upper
/// chain records of the output.
inline std::vector<std::vector<double>> logTransform(std::span<const Mark> marks) {
  std::vector<std::vector<double>> out;
  out.reserve(marks.size());
  for (const Mark& m : marks) {
    std::vector<double> v(m.dimension());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (m[i] <= 0.0) throw DomainError("log transform of a zero coordinate");
      v[i] = -std::log(m[i]);
      if (v[i] == 0.0) v[i] = 0.0;  // normalise -0.0
    }
    out.push_back(std::move(v));
  }
  return out;
}

struct RecordFlags {
  std::uint64_t index = 0;  // 1-based
  bool chain = false;
  bool weak = false;
  bool strong = false;
  std::vector<bool> marginal;

  bool anyMarginal() const {
    return std::find(marginal.begin(), marginal.end(), true) != marginal.end();
  }
  friend bool operator==(const RecordFlags&, const RecordFlags&) = default;
};

struct RecordCounts {
  std::uint64_t chain = 0;
  std::uint64_t weak = 0;
  std::uint64_t strong = 0;
  std::vector<std::uint64_t> marginal;
};

/// Streaming classifier. Memory is O(d) plus the current Pareto front; the
/// processed history itself is never stored.
///
/// Ties: a mark equal to an earlier mark is never a record of any kind, and
/// a coordinate equal to the running minimum is not a marginal record.
class RecordDetector {
 public:
  explicit RecordDetector(std::size_t dimension)
      : dimension_(dimension), componentMins_(dimension, 0.0) {
    if (dimension == 0) throw InputError("dimension must be >= 1");
    counts_.marginal.assign(dimension, 0);
  }

  RecordFlags process(const Mark& x) {
    detail::requireSameDimension(dimension_, x.dimension());
    RecordFlags flags;
    flags.index = ++processed_;
    flags.marginal.assign(dimension_, false);

    if (processed_ == 1) {
      flags.chain = flags.weak = flags.strong = true;
      std::fill(flags.marginal.begin(), flags.marginal.end(), true);
      lastChain_ = x;
      front_.push_back(x);
      std::copy(x.coords().begin(), x.coords().end(), componentMins_.begin());
      tally(flags);
      return flags;
    }

    flags.chain = detail::lowerStrictOrder(x.coords(), lastChain_->coords());
    if (flags.chain) lastChain_ = x;

    // Some earlier mark is <= x iff some current minimal element is.
    flags.weak = std::none_of(front_.begin(), front_.end(), [&](const Mark& f) {
      return detail::lowerOrEqual(f.coords(), x.coords());
    });
    if (flags.weak) {
      std::erase_if(front_, [&](const Mark& f) { return detail::lowerOrEqual(x.coords(), f.coords()); });
      front_.push_back(x);
    }

    flags.strong = true;
    for (std::size_t i = 0; i < dimension_; ++i) {
      if (x[i] < componentMins_[i]) {
        flags.marginal[i] = true;
        componentMins_[i] = x[i];
      } else {
        flags.strong = false;
      }
    }
    tally(flags);
    return flags;
  }

  std::size_t dimension() const noexcept { return dimension_; }
  std::uint64_t processed() const noexcept { return processed_; }
  const std::optional<Mark>& lastChainRecord() const noexcept { return lastChain_; }
  const std::vector<Mark>& paretoFront() const noexcept { return front_; }
  std::span<const double> componentMins() const noexcept { return componentMins_; }
  const RecordCounts& counts() const noexcept { return counts_; }

 private:
  void tally(const RecordFlags& f) {
    counts_.chain += f.chain;
    counts_.weak += f.weak;
    counts_.strong += f.strong;
    for (std::size_t i = 0; i < dimension_; ++i) counts_.marginal[i] += f.marginal[i];
  }

  std::size_t dimension_;
  std::uint64_t processed_ = 0;
  std::optional<Mark> lastChain_;
  std::vector<Mark> front_;
  std::vector<double> componentMins_;
  RecordCounts counts_;
};

/// Chain-record detection alone, for the hot simulation loop.
class ChainDetector {
 public:
  /// True iff `coords` is a chain record; the first call always is.
  bool process(std::span<const double> coords) {
    if (last_.empty()) {
      last_.assign(coords.begin(), coords.end());
      return true;
    }
    detail::requireSameDimension(last_.size(), coords.size());
    if (!detail::lowerStrictOrder(coords, last_)) return false;
    std::copy(coords.begin(), coords.end(), last_.begin());
    return true;
  }
  std::span<const double> last() const noexcept { return last_; }

 private:
  std::vector<double> last_;
};

/// Batch classification; a pure function of `marks`.
inline std::vector<RecordFlags> classifySequence(std::span<const Mark> marks) {
  if (marks.empty()) throw InputError("cannot classify an empty sequence");
  RecordDetector detector(marks.front().dimension());
  std::vector<RecordFlags> out;
  out.reserve(marks.size());
  for (const Mark& m : marks) out.push_back(detector.process(m));
  return out;
}

/// 1-based indices of lower chain records.
inline std::vector<std::uint64_t> chainRecordIndices(std::span<const Mark> marks) {
  std::vector<std::uint64_t> out;
  ChainDetector detector;
  for (std::size_t i = 0; i < marks.size(); ++i) {
    if (detector.process(marks[i].coords())) out.push_back(i + 1);
  }
  return out;
}

/// 1-based indices of upper chain records (beating the last record means
/// being componentwise >= it and different).
inline std::vector<std::uint64_t> upperChainRecordIndices(std::span<const std::vector<double>> points) {
  std::vector<std::uint64_t> out;
  const std::vector<double>* last = nullptr;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (last == nullptr || dominatesUpper(points[i], *last)) {
      last = &points[i];
      out.push_back(i + 1);
    }
  }
  return out;
}

}  // namespace chainrec
