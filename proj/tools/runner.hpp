// Copyright 2026 The qphase Authors
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
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qphase/qstate.hpp"

namespace qphase::cli {

/// Schema violation at a JSON field path such as "params.T_values[2]".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline constexpr int kSchemaVersion = 1;

struct ExperimentConfig {
  std::string kind;
  std::string name;
  std::uint64_t seed = 0;
  nlohmann::json params;  // validated, with defaults filled in
};

std::vector<std::string> experiment_kinds();
/// Default parameters of a kind.
nlohmann::json default_params(const std::string& kind);
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Table {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string render() const;
};

struct RunResult {
  std::vector<Table> tables;
  nlohmann::json summary;
};

RunResult run_experiment(const ExperimentConfig& config, int workers = 1);
/// Writes every table and <name>.json into `out_dir`; files are staged and renamed only after all of
/// them were written.
void write_result(const RunResult& result, const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Entry point of the command-line tool; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace qphase::cli
