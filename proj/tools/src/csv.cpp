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

#include "cvkrotov/tools/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cvkrotov/tools/config.hpp"

namespace cvk::tools {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
                     const std::vector<std::string>& columns)
    : file_(std::fopen(path.c_str(), "w")), n_columns_(columns.size()), path_(path) {
  if (!file_) throw std::runtime_error("cannot write '" + path.string() + "'");
  std::fprintf(file_, "# config-hash: %s\n", config_hash.c_str());
  for (std::size_t i = 0; i < columns.size(); ++i)
    std::fprintf(file_, "%s%s", i ? "," : "", columns[i].c_str());
  std::fputc('\n', file_);
}

CsvWriter::~CsvWriter() {
  if (file_) std::fclose(file_);
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != n_columns_)
    throw std::logic_error("CsvWriter: row width mismatch in " + path_.string());
  for (std::size_t i = 0; i < values.size(); ++i)
    std::fprintf(file_, "%s%.17g", i ? "," : "", values[i]);
  std::fputc('\n', file_);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ConfigError({"missing column '" + name + "'"});
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open '" + path.string() + "'"});
  CsvTable t;
  std::string line;
  bool header = false;
  std::vector<std::string> errors;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    auto cells = split(line);
    if (!header) {
      for (auto& c : cells) t.columns.push_back(trim(c));
      t.data.resize(t.columns.size());
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size()) {
      errors.push_back(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(t.columns.size()) + " cells, found " +
                       std::to_string(cells.size()));
      continue;
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string c = trim(cells[i]);
      if (c.empty()) {
        errors.push_back("column '" + t.columns[i] + "' is empty at line " + std::to_string(line_no));
        continue;
      }
      try {
        std::size_t used = 0;
        const double x = std::stod(c, &used);
        if (used != c.size() || !std::isfinite(x)) throw std::invalid_argument(c);
        t.data[i].push_back(x);
      } catch (const std::exception&) {
        errors.push_back("column '" + t.columns[i] + "' has a non-numeric value '" + c +
                         "' at line " + std::to_string(line_no));
      }
    }
  }
  if (!header) errors.push_back(path.string() + ": no header row");
  if (!errors.empty()) throw ConfigError(errors);
  return t;
}

int control_channel_count(const CsvTable& table) {
  if (table.columns.empty() || table.columns[0] != "t")
    throw ConfigError({"controls file: first column must be 't'"});
  if ((table.columns.size() - 1) % 2 != 0 || table.columns.size() < 3)
    throw ConfigError({"controls file: expected t followed by c<i>_raw, c<i>_clamped pairs"});
  const int n = static_cast<int>((table.columns.size() - 1) / 2);
  for (int l = 1; l <= n; ++l) {
    table.column("c" + std::to_string(l) + "_raw");
    table.column("c" + std::to_string(l) + "_clamped");
  }
  return n;
}

ControlGrid controls_from_table(const CsvTable& table, int n_channels, const TimeGrid& grid) {
  const int found = control_channel_count(table);
  if (found != n_channels)
    throw ConfigError({"controls file has " + std::to_string(found) + " channels, chain needs " +
                       std::to_string(n_channels)});
  const auto& t = table.data[table.column("t")];
  if (static_cast<int>(t.size()) != grid.n_steps)
    throw ConfigError({"controls file has " + std::to_string(t.size()) + " rows, grid has " +
                       std::to_string(grid.n_steps) + " bins"});
  for (int k = 0; k < grid.n_steps; ++k)
    if (std::abs(t[k] - grid.time(k)) > 1e-9 * std::max(1.0, grid.horizon))
      throw ConfigError({"controls file: t at row " + std::to_string(k + 1) +
                         " does not match the grid"});
  ControlGrid c(n_channels, grid.n_steps);
  for (int l = 0; l < n_channels; ++l) {
    const auto& col = table.data[table.column("c" + std::to_string(l + 1) + "_raw")];
    for (int k = 0; k < grid.n_steps; ++k) c(l, k) = col[k];
  }
  return c;
}

}  // namespace cvk::tools
