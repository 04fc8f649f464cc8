// Copyright 2026 The cvkrotov Authors
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

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "cvkrotov/chain.hpp"

namespace cvk::tools {

/// Writes `# config-hash: <hash>`, a header row, then rows of numbers
/// printed with %.17g.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
            const std::vector<std::string>& columns);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<double>& values);

 private:
  std::FILE* file_;
  std::size_t n_columns_;
  std::filesystem::path path_;
};

std::string format_number(double x);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // data[column][row]

  /// Index of `name`; throws ConfigError naming the column if absent.
  std::size_t column(const std::string& name) const;
};

/// Parses a CSV written by CsvWriter: comment lines starting with '#' are
/// skipped. Empty cells and non-numeric cells raise ConfigError naming
/// the column.
CsvTable read_csv(const std::filesystem::path& path);

/// Channel count of a controls table (columns t, c1_raw, c1_clamped, ...).
int control_channel_count(const CsvTable& table);

/// Raw control amplitudes; the t column must match the grid's bin edges.
ControlGrid controls_from_table(const CsvTable& table, int n_channels, const TimeGrid& grid);

}  // namespace cvk::tools
