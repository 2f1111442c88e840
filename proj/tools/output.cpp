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
#include "output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace kpzlab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string Provenance::csv_header() const {
  std::string out;
  out += "# kpzlab " + version + "\n";
  out += "# subcommand: " + subcommand + "\n";
  out += "# config_hash: fnv1a64:" + hex(config_hash) + "\n";
  out += "# master_seed: " + std::to_string(master_seed) + "\n";
  out += "# config: " + resolved_config + "\n";
  return out;
}

json Provenance::as_json() const {
  return {{"version", version},
          {"subcommand", subcommand},
          {"config_hash", "fnv1a64:" + hex(config_hash)},
          {"master_seed", master_seed},
          {"config", json::parse(resolved_config)}};
}

json report_json(const kpz::ValidationReport& r) {
  json details = json::object();
  for (const auto& [k, v] : r.details) details[k] = v;
  return {{"name", r.name},
          {"statistic_name", r.statistic_name},
          {"statistic", r.statistic},
          {"relation", r.relation},
          {"threshold", r.threshold},
          {"pass", r.pass},
          {"expected_failure", r.expected_failure},
          {"runtime_seconds", r.runtime_seconds},
          {"seeds", r.seeds},
          {"details", details}};
}

void OutputSet::add(std::string name, std::string contents) {
  files_.emplace_back(std::move(name), std::move(contents));
}

void OutputSet::commit(const std::string& dir) const {
  fs::create_directories(dir);
  std::vector<fs::path> staged;
  auto discard = [&] {
    std::error_code ec;
    for (const auto& p : staged) fs::remove(p, ec);
  };
  for (const auto& [name, contents] : files_) {
    const fs::path tmp = fs::path(dir) / (name + ".tmp");
    staged.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary);
    out << contents;
    out.close();
    if (!out) {
      discard();
      throw std::runtime_error("cannot write " + tmp.string());
    }
  }
  std::vector<fs::path> done;
  for (const auto& [name, contents] : files_) {
    std::error_code ec;
    const fs::path target = fs::path(dir) / name;
    fs::rename(fs::path(dir) / (name + ".tmp"), target, ec);
    if (ec) {
      discard();
      for (const auto& p : done) fs::remove(p, ec);
      throw std::runtime_error("cannot rename into " + target.string());
    }
    done.push_back(target);
  }
}

}  // namespace kpzlab
