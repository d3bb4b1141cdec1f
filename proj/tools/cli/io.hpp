// Copyright 2026 The Subgrape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef SUBGRAPE_CLI_IO_HPP
#define SUBGRAPE_CLI_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "subgrape/engine.hpp"
#include "subgrape/model.hpp"

namespace subgrape::cli {

inline constexpr int kTableVersion = 1;

class IoError : public std::runtime_error {
   public:
    IoError(const std::filesystem::path &path, const std::string &message)
        : std::runtime_error(path.string() + ": " + message), path_(path) {}
    const std::filesystem::path &path() const { return path_; }

   private:
    std::filesystem::path path_;
};

/// Creates the directory (and parents) if needed; throws IoError if it
/// cannot be created or written to.
void ensure_output_dir(const std::filesystem::path &dir);

void write_text(const std::filesystem::path &path, const std::string &text);
nlohmann::json read_json(const std::filesystem::path &path);

/// Pixel-level amplitudes, one row per pixel, %.17g so values round-trip.
void write_pulse(const std::filesystem::path &path, const Pulse &pulse, double pixel_ns);
Pulse read_pulse(const std::filesystem::path &path);

/// Sub-pixel field samples s[k][l] at one carrier phase.
void write_fields(const std::filesystem::path &path, const ControlProblem &problem, const Pulse &pulse,
                  double psi);

/// Comma-delimited table with a '#' header line carrying the table name and
/// schema version, then a column header.
class CsvTable {
   public:
    CsvTable(std::string name, std::vector<std::string> columns);
    void add_row(const std::vector<std::string> &cells);
    std::string str() const;

   private:
    std::string name_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

}  // namespace subgrape::cli

#endif
