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

// CSV surfaces of the record detectors.
//
//   input:  header `x1,...,xd`, one mark per row, decimal floats.
//   output: `index,chain,weak,strong,marginal_mask`, booleans as 0/1 and the
//           mask as a d-character 0/1 string (coordinate 1 first).
//
// Lines starting with '#' are comments on input; written files start with one.

#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "chainrec/error.hpp"
#include "chainrec/record_core.hpp"

namespace chainrec {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> splitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline InputError lineError(std::size_t line, const std::string& what) {
  return InputError("line " + std::to_string(line) + ": " + what);
}

}  // namespace detail

/// Incremental reader: validates the header, then yields one Mark per row.
class MarkCsvReader {
 public:
  explicit MarkCsvReader(std::istream& in) : in_(in) { readHeader(); }

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t lineNumber() const noexcept { return line_; }

  /// False at end of input.
  bool next(std::optional<Mark>& out) {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      std::string_view text = detail::trim(raw);
      if (text.empty() || text.front() == '#') continue;
      auto fields = detail::splitFields(text);
      if (fields.size() != dimension_) {
        throw detail::lineError(line_, "expected " + std::to_string(dimension_) + " fields, got " +
                                           std::to_string(fields.size()));
      }
      std::vector<double> coords(dimension_);
      for (std::size_t i = 0; i < dimension_; ++i) {
        auto f = fields[i];
        auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), coords[i]);
        if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
          throw detail::lineError(line_, "malformed number '" + std::string(f) + "'");
        }
      }
      try {
        out.emplace(std::move(coords));
      } catch (const InputError& e) {
        throw detail::lineError(line_, e.what());
      }
      return true;
    }
    return false;
  }

 private:
  void readHeader() {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      std::string_view text = detail::trim(raw);
      if (text.empty() || text.front() == '#') continue;
      auto fields = detail::splitFields(text);
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] != "x" + std::to_string(i + 1)) {
          throw detail::lineError(line_, "header must be x1,...,xd; found '" + std::string(fields[i]) + "'");
        }
      }
      dimension_ = fields.size();
      return;
    }
    throw InputError("empty input: missing header x1,...,xd");
  }

  std::istream& in_;
  std::size_t dimension_ = 0;
  std::size_t line_ = 0;
};

inline std::vector<Mark> readMarksCsv(std::istream& in) {
  MarkCsvReader reader(in);
  std::vector<Mark> marks;
  std::optional<Mark> m;
  while (reader.next(m)) marks.push_back(std::move(*m));
  return marks;
}

inline void writeFlagsHeader(std::ostream& out) { out << "index,chain,weak,strong,marginal_mask\n"; }

inline void writeFlagsRow(std::ostream& out, const RecordFlags& f) {
  out << f.index << ',' << int(f.chain) << ',' << int(f.weak) << ',' << int(f.strong) << ',';
  for (bool b : f.marginal) out << (b ? '1' : '0');
  out << '\n';
}

/// Streams marks from `in` through a RecordDetector into `out`. Returns the
/// number of rows classified. An input without data rows is an error.
inline std::uint64_t detectCsv(std::istream& in, std::ostream& out, std::string_view commentLine = {}) {
  MarkCsvReader reader(in);
  if (!commentLine.empty()) out << "# " << commentLine << '\n';
  writeFlagsHeader(out);
  RecordDetector detector(reader.dimension());
  std::optional<Mark> m;
  while (reader.next(m)) writeFlagsRow(out, detector.process(*m));
  if (detector.processed() == 0) throw InputError("no marks after header");
  return detector.processed();
}

}  // namespace chainrec
