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


#include "io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace subgrape::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) {
        out.push_back(cell);
    }
    return out;
}

double parse_double(const std::string &text, const fs::path &path, int line) {
    double x = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw IoError(path, "line " + std::to_string(line) + ": cannot parse '" + text + "' as a number");
    }
    return x;
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void ensure_output_dir(const fs::path &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError(dir, "cannot create output directory" + (ec ? ": " + ec.message() : std::string()));
    }
    fs::path probe = dir / ".subgrape_write_test";
    {
        std::ofstream out(probe);
        if (!out) {
            throw IoError(dir, "output directory is not writable");
        }
    }
    fs::remove(probe, ec);
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) {
        throw IoError(path, "write failed");
    }
}

nlohmann::json read_json(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(path, "cannot open");
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw IoError(path, e.what());
    }
}

CsvTable::CsvTable(std::string name, std::vector<std::string> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {}

void CsvTable::add_row(const std::vector<std::string> &cells) {
    if (cells.size() != columns_.size()) {
        throw std::logic_error("CsvTable: row width does not match header");
    }
    rows_.push_back(cells);
}

std::string CsvTable::str() const {
    std::ostringstream out;
    out << "# subgrape " << name_ << " v" << kTableVersion << "\n";
    for (size_t i = 0; i < columns_.size(); i++) {
        out << (i ? "," : "") << columns_[i];
    }
    out << "\n";
    for (const auto &row : rows_) {
        for (size_t i = 0; i < row.size(); i++) {
            out << (i ? "," : "") << row[i];
        }
        out << "\n";
    }
    return out.str();
}

void write_pulse(const fs::path &path, const Pulse &pulse, double pixel_ns) {
    std::vector<std::string> cols{"pixel", "t_start_ns"};
    for (int k = 0; k < pulse.controls(); k++) {
        cols.push_back("u" + std::to_string(k) + "_rad_per_ns");
    }
    CsvTable table("pulse", cols);
    for (int j = 0; j < pulse.pixels(); j++) {
        std::vector<std::string> row{std::to_string(j), format_double(j * pixel_ns)};
        for (int k = 0; k < pulse.controls(); k++) {
            row.push_back(format_double(pulse.values(k, j)));
        }
        table.add_row(row);
    }
    std::ostringstream head;
    head << "# pixel_ns=" << format_double(pixel_ns) << " padding=" << pulse.padding << " controls=" << pulse.controls()
         << "\n";
    std::string body = table.str();
    // Metadata goes right after the version line.
    auto first = body.find('\n') + 1;
    write_text(path, body.substr(0, first) + head.str() + body.substr(first));
}

Pulse read_pulse(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(path, "cannot open pulse file");
    }
    std::string line;
    int line_no = 0;
    int padding = -1;
    int controls = -1;
    bool header_seen = false;
    std::vector<std::vector<double>> columns;
    while (std::getline(in, line)) {
        line_no++;
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            for (const auto &tok : split(line.substr(1), ' ')) {
                auto eq = tok.find('=');
                if (eq == std::string::npos) {
                    continue;
                }
                std::string key = tok.substr(0, eq);
                std::string val = tok.substr(eq + 1);
                if (key == "padding") {
                    padding = static_cast<int>(parse_double(val, path, line_no));
                } else if (key == "controls") {
                    controls = static_cast<int>(parse_double(val, path, line_no));
                }
            }
            continue;
        }
        auto cells = split(line, ',');
        if (!header_seen) {
            header_seen = true;
            if (controls < 0) {
                controls = static_cast<int>(cells.size()) - 2;
            }
            if (static_cast<int>(cells.size()) != controls + 2 || controls < 1) {
                throw IoError(path, "line " + std::to_string(line_no) + ": unexpected column header");
            }
            columns.resize(controls);
            continue;
        }
        if (static_cast<int>(cells.size()) != controls + 2) {
            throw IoError(path, "line " + std::to_string(line_no) + ": expected " + std::to_string(controls + 2) +
                                    " columns");
        }
        for (int k = 0; k < controls; k++) {
            columns[k].push_back(parse_double(cells[k + 2], path, line_no));
        }
    }
    if (!header_seen || columns.empty() || columns[0].empty()) {
        throw IoError(path, "no pulse data");
    }
    Pulse p;
    p.padding = std::max(padding, 0);
    p.values.resize(controls, static_cast<Eigen::Index>(columns[0].size()));
    for (int k = 0; k < controls; k++) {
        for (size_t j = 0; j < columns[k].size(); j++) {
            p.values(k, static_cast<Eigen::Index>(j)) = columns[k][j];
        }
    }
    return p;
}

void write_fields(const fs::path &path, const ControlProblem &problem, const Pulse &pulse, double psi) {
    SampledProblem sampled(problem, psi);
    Eigen::MatrixXd s = sampled.fields(pulse);
    std::vector<std::string> cols{"sub_pixel", "t_ns"};
    for (int k = 0; k < s.rows(); k++) {
        cols.push_back("s" + std::to_string(k) + "_rad_per_ns");
    }
    CsvTable table("fields", cols);
    for (int l = 0; l < s.cols(); l++) {
        std::vector<std::string> row{std::to_string(l), format_double(problem.grid.sample_time(l))};
        for (int k = 0; k < s.rows(); k++) {
            row.push_back(format_double(s(k, l)));
        }
        table.add_row(row);
    }
    std::string body = table.str();
    auto first = body.find('\n') + 1;
    std::string meta = "# psi=" + format_double(psi) + " n_sub=" + std::to_string(problem.grid.n_sub) + "\n";
    write_text(path, body.substr(0, first) + meta + body.substr(first));
}

}  // namespace subgrape::cli
