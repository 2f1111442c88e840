// Copyright 2026 The kpzlab Authors
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

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kpz/experiments.hpp"

namespace kpzlab {

/// 17 significant digits, enough to round-trip any binary64.
std::string fmt17(double v);

std::uint64_t fnv1a64(std::string_view bytes);

/// Comment block heading every output file.
struct Provenance {
  std::string version;
  std::string subcommand;
  std::uint64_t config_hash = 0;
  std::uint64_t master_seed = 0;
  std::string resolved_config;  ///< compact JSON, one line

  std::string csv_header() const;
  nlohmann::json as_json() const;
};

nlohmann::json report_json(const kpz::ValidationReport& r);

/// Collects output files in memory and writes them only on commit(), each via
/// a temporary file renamed into place. Nothing reaches the disk when a run
/// fails before commit().
class OutputSet {
 public:
  void add(std::string name, std::string contents);
  /// Creates `dir` if needed. Throws std::runtime_error on I/O failure after
  /// removing anything it wrote.
  void commit(const std::string& dir) const;

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace kpzlab
