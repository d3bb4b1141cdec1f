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

#include "subgrape/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "subgrape/error.hpp"

namespace subgrape {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr double kQuadratureTolerance = 1e-8;

void require_grid(const TimeGrid &grid) {
    if (grid.pixels < 1 || grid.n_sub < 1 || !(grid.pixel_width > 0.0) ||
        !std::isfinite(grid.pixel_width)) {
        throw InvalidArgument("TimeGrid", "pixels >= 1, n_sub >= 1 and pixel_width > 0 required");
    }
}

// Distance (in pixels) from time t to the interval [j, j+1) * pixel_width.
double pixel_distance(double t, int j, double pixel_width) {
    double x = t / pixel_width;
    if (x < j) {
        return j - x;
    }
    if (x > j + 1) {
        return x - (j + 1);
    }
    return 0.0;
}

// Columns whose interval lies within `reach` pixels of time t.
std::pair<int, int> columns_within(double t, int reach, const TimeGrid &grid) {
    double x = t / grid.pixel_width;
    int lo = std::max(0, static_cast<int>(std::floor(x)) - reach - 1);
    int hi = std::min(grid.pixels - 1, static_cast<int>(std::floor(x)) + reach + 1);
    while (lo <= hi && pixel_distance(t, lo, grid.pixel_width) > reach) {
        lo++;
    }
    while (hi >= lo && pixel_distance(t, hi, grid.pixel_width) > reach) {
        hi--;
    }
    return {lo, hi};
}

// (1/pi) * int_0^inf (F(w) - F_inf) sin(c w) / w dw. The residual may decay
// only algebraically (Butterworth tails go like w^-n), so a truncated panel
// rule would need ~1e4 bandwidths of range; the double-exponential Fourier
// rule handles the slow tail directly. *error is an absolute estimate.
double sine_integral(boost::math::quadrature::ooura_fourier_sin<double> &rule,
                     const FilterResponse &filter, double c, double *error) {
    *error = 0.0;
    if (c == 0.0) {
        return 0.0;
    }
    auto f = [&](double w) { return (filter.response(w) - filter.high_frequency_limit) / w; };
    auto [value, rel] = rule.integrate(f, std::abs(c));
    if (!std::isfinite(value)) {
        throw NumericalError("general_filter: frequency integral diverged");
    }
    if (value != 0.0) {
        *error = std::abs(value) * rel / kPi;
    }
    return (c > 0.0 ? value : -value) / kPi;
}

}  // namespace

double gaussian_omega0_from_bandwidth(double bandwidth_ghz) {
    return 2.0 * kPi * bandwidth_ghz / kGaussianThreeDbRatio;
}

int filter_padding(double omega_b, double pixel_width) {
    if (!(omega_b > 0.0) || !(pixel_width > 0.0)) {
        throw InvalidArgument("filter bandwidth", "bandwidth and pixel width must be positive");
    }
    // Absorb rounding so exact ratios such as 2pi / (2pi * 0.25) stay at 4.
    return static_cast<int>(std::ceil(2.0 * kPi / (omega_b * pixel_width) - 1e-9));
}

FilterResponse FilterResponse::gaussian(double omega0) {
    FilterResponse f;
    f.response = [omega0](double w) { return std::exp(-(w * w) / (omega0 * omega0)); };
    f.bandwidth = kGaussianThreeDbRatio * omega0;
    return f;
}

FilterResponse FilterResponse::all_pass() {
    FilterResponse f;
    f.response = [](double) { return 1.0; };
    f.high_frequency_limit = 1.0;
    return f;
}

FilterResponse FilterResponse::butterworth(double cutoff, int order) {
    FilterResponse f;
    f.response = [cutoff, order](double w) {
        return 1.0 / std::sqrt(1.0 + std::pow(std::abs(w) / cutoff, 2 * order));
    };
    f.bandwidth = cutoff;
    return f;
}

std::optional<double> FilterResponse::three_db_frequency() const {
    if (bandwidth) {
        return bandwidth;
    }
    double f0 = response(0.0);
    double level = f0 / std::sqrt(2.0);
    if (!(f0 > 0.0) || !(high_frequency_limit < level)) {
        return std::nullopt;
    }
    double hi = 1e-3;
    while (response(hi) > level) {
        hi *= 2.0;
        if (hi > 1e9) {
            return std::nullopt;
        }
    }
    double lo = hi / 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; i++) {
        double mid = 0.5 * (lo + hi);
        (response(mid) > level ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

const char *to_string(TransferKind kind) {
    switch (kind) {
        case TransferKind::piecewise_constant:
            return "piecewise_constant";
        case TransferKind::cubic_spline:
            return "cubic_spline";
        case TransferKind::gaussian_filter:
            return "gaussian_filter";
        case TransferKind::general_filter:
            return "general_filter";
        case TransferKind::carrier:
            return "carrier";
        case TransferKind::fourier:
            return "fourier";
    }
    return "unknown";
}

TransferSpec TransferSpec::piecewise_constant() { return TransferSpec{}; }

TransferSpec TransferSpec::cubic_spline() {
    TransferSpec s;
    s.kind = TransferKind::cubic_spline;
    return s;
}

TransferSpec TransferSpec::gaussian_filter(double omega0) {
    TransferSpec s;
    s.kind = TransferKind::gaussian_filter;
    s.omega0 = omega0;
    return s;
}

TransferSpec TransferSpec::gaussian_filter_bandwidth(double bandwidth_ghz) {
    return gaussian_filter(gaussian_omega0_from_bandwidth(bandwidth_ghz));
}

TransferSpec TransferSpec::general_filter(FilterResponse filter) {
    TransferSpec s;
    s.kind = TransferKind::general_filter;
    s.filter = std::move(filter);
    return s;
}

TransferSpec TransferSpec::carrier(CarrierFunction f, TransferSpec base) {
    TransferSpec s;
    s.kind = TransferKind::carrier;
    s.carrier_fn = std::move(f);
    s.base = std::make_shared<const TransferSpec>(std::move(base));
    return s;
}

TransferSpec TransferSpec::cosine_carrier(double omega, TransferSpec base) {
    return carrier([omega](double t, double psi) { return std::cos(omega * t + psi); },
                   std::move(base));
}

TransferSpec TransferSpec::fourier(std::vector<double> frequencies) {
    TransferSpec s;
    s.kind = TransferKind::fourier;
    s.frequencies = std::move(frequencies);
    return s;
}

int TransferSpec::padding(double pixel_width) const {
    switch (kind) {
        case TransferKind::piecewise_constant:
        case TransferKind::fourier:
            return 0;
        case TransferKind::cubic_spline:
            return 2;
        case TransferKind::gaussian_filter:
            return filter_padding(kGaussianThreeDbRatio * omega0, pixel_width);
        case TransferKind::general_filter: {
            auto wb = filter.three_db_frequency();
            return wb ? filter_padding(*wb, pixel_width) : 0;
        }
        case TransferKind::carrier:
            return base ? base->padding(pixel_width) : 0;
    }
    return 0;
}

bool TransferSpec::phase_dependent() const { return kind == TransferKind::carrier; }

void TransferSpec::validate() const {
    switch (kind) {
        case TransferKind::gaussian_filter:
            if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
                throw InvalidArgument("transfer.omega0", "Gaussian reference frequency must be positive");
            }
            break;
        case TransferKind::general_filter:
            if (!filter.response) {
                throw InvalidArgument("transfer.filter", "missing frequency response");
            }
            break;
        case TransferKind::carrier:
            if (!carrier_fn || !base) {
                throw InvalidArgument("transfer.carrier", "carrier needs a function and a base transfer");
            }
            if (base->kind == TransferKind::carrier || base->kind == TransferKind::fourier) {
                throw InvalidArgument("transfer.carrier.base", "base must be a time-indexed smoothing transfer");
            }
            base->validate();
            break;
        case TransferKind::fourier:
            if (frequencies.empty()) {
                throw InvalidArgument("transfer.frequencies", "frequency list must be nonempty");
            }
            for (double w : frequencies) {
                if (!std::isfinite(w)) {
                    throw InvalidArgument("transfer.frequencies", "frequencies must be finite");
                }
            }
            break;
        default:
            break;
    }
}

TransferMatrix::TransferMatrix(int rows, int cols, int padding)
    : rows_(0), cols_(cols), padding_(padding) {
    row_offsets_.reserve(static_cast<size_t>(rows) + 1);
}

std::span<const TransferMatrix::Entry> TransferMatrix::row(int l) const {
    return {entries_.data() + row_offsets_[l], entries_.data() + row_offsets_[l + 1]};
}

void TransferMatrix::append_row(std::span<const Entry> entries) {
    for (const auto &e : entries) {
        if (e.value != 0.0) {
            entries_.push_back(e);
        }
    }
    row_offsets_.push_back(entries_.size());
    rows_++;
}

Eigen::VectorXd TransferMatrix::apply(const Eigen::VectorXd &u) const {
    if (u.size() != cols_) {
        std::ostringstream msg;
        msg << "expected " << cols_ << " amplitudes, got " << u.size();
        throw InvalidArgument("TransferMatrix::apply", msg.str());
    }
    Eigen::VectorXd s = Eigen::VectorXd::Zero(rows_);
    for (int l = 0; l < rows_; l++) {
        double acc = 0.0;
        for (const auto &e : row(l)) {
            acc += e.value * u[e.column];
        }
        s[l] = acc;
    }
    return s;
}

Eigen::VectorXd TransferMatrix::apply_transpose(const Eigen::VectorXd &grad_s) const {
    if (grad_s.size() != rows_) {
        std::ostringstream msg;
        msg << "expected " << rows_ << " sub-pixel values, got " << grad_s.size();
        throw InvalidArgument("TransferMatrix::apply_transpose", msg.str());
    }
    Eigen::VectorXd g = Eigen::VectorXd::Zero(cols_);
    for (int l = 0; l < rows_; l++) {
        for (const auto &e : row(l)) {
            g[e.column] += e.value * grad_s[l];
        }
    }
    return g;
}

Eigen::MatrixXd TransferMatrix::dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
    for (int l = 0; l < rows_; l++) {
        for (const auto &e : row(l)) {
            d(l, e.column) = e.value;
        }
    }
    return d;
}

Eigen::VectorXd TransferMatrix::row_sums() const {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(rows_);
    for (int l = 0; l < rows_; l++) {
        for (const auto &e : row(l)) {
            sums[l] += e.value;
        }
    }
    return sums;
}

double TransferMatrix::bandwidth(const TimeGrid &grid) const {
    double worst = 0.0;
    for (int l = 0; l < rows_; l++) {
        for (const auto &e : row(l)) {
            worst = std::max(worst, pixel_distance(grid.sample_time(l), e.column, grid.pixel_width));
        }
    }
    return worst;
}

TransferMatrix TransferMatrix::scaled_rows(const Eigen::VectorXd &factors) const {
    TransferMatrix out(rows_, cols_, padding_);
    std::vector<Entry> scratch;
    for (int l = 0; l < rows_; l++) {
        scratch.assign(row(l).begin(), row(l).end());
        for (auto &e : scratch) {
            e.value *= factors[l];
        }
        out.append_row(scratch);
    }
    return out;
}

TransferMatrix build_piecewise_constant(const TimeGrid &grid) {
    require_grid(grid);
    TransferMatrix t(grid.sub_pixels(), grid.pixels, 0);
    for (int l = 0; l < grid.sub_pixels(); l++) {
        TransferMatrix::Entry e{l / grid.n_sub, 1.0};
        t.append_row({&e, 1});
    }
    return t;
}

TransferMatrix build_cubic_spline(const TimeGrid &grid) {
    require_grid(grid);
    TransferMatrix t(grid.sub_pixels(), grid.pixels, 2);
    std::vector<TransferMatrix::Entry> row;
    for (int l = 0; l < grid.sub_pixels(); l++) {
        // Pixel amplitudes sit at pixel centres; find the centre j' at or before t.
        double position = grid.sample_time(l) / grid.pixel_width - 0.5;
        int jp = static_cast<int>(std::floor(position));
        double x = position - jp;
        double x2 = x * x;
        double x3 = x2 * x;
        const double weights[4] = {
            -0.5 * x * (x - 1.0) * (x - 1.0),
            1.0 + 1.5 * x3 - 2.5 * x2,
            0.5 * x + 2.0 * x2 - 1.5 * x3,
            0.5 * x3 - 0.5 * x2,
        };
        row.clear();
        for (int i = 0; i < 4; i++) {
            int j = jp - 1 + i;
            if (j >= 0 && j < grid.pixels) {
                row.push_back({j, weights[i]});
            }
        }
        t.append_row(row);
    }
    return t;
}

TransferMatrix build_gaussian_filter(const TimeGrid &grid, double omega0) {
    require_grid(grid);
    if (!(omega0 > 0.0)) {
        throw InvalidArgument("omega0", "Gaussian reference frequency must be positive");
    }
    int reach = filter_padding(kGaussianThreeDbRatio * omega0, grid.pixel_width);
    TransferMatrix t(grid.sub_pixels(), grid.pixels, reach);
    std::vector<TransferMatrix::Entry> row;
    for (int l = 0; l < grid.sub_pixels(); l++) {
        double tl = grid.sample_time(l);
        auto [lo, hi] = columns_within(tl, reach, grid);
        row.clear();
        for (int j = lo; j <= hi; j++) {
            double v = 0.5 * (std::erf(omega0 * (tl - j * grid.pixel_width) / 2.0) -
                              std::erf(omega0 * (tl - (j + 1) * grid.pixel_width) / 2.0));
            row.push_back({j, v});
        }
        t.append_row(row);
    }
    return t;
}

TransferMatrix build_general_filter(const TimeGrid &grid, const FilterResponse &filter) {
    require_grid(grid);
    if (!filter.response) {
        throw InvalidArgument("filter", "missing frequency response");
    }
    auto wb = filter.three_db_frequency();
    int reach = wb ? filter_padding(*wb, grid.pixel_width) : grid.pixels;
    int padding = wb ? reach : 0;

    boost::math::quadrature::ooura_fourier_sin<double> rule(1e-12);

    // Every argument c is a half-integer multiple of the sub-pixel width.
    const double half_sub = 0.5 * grid.sub_width();
    std::unordered_map<long long, double> cache;
    double worst_error = 0.0;
    auto integral = [&](double c) {
        long long key = std::llround(c / half_sub);
        auto it = cache.find(key);
        if (it != cache.end()) {
            return it->second;
        }
        double err = 0.0;
        double value = sine_integral(rule, filter, key * half_sub, &err);
        worst_error = std::max(worst_error, err);
        // Ideal step part: (F_inf/pi) int_0^inf sin(cw)/w dw = F_inf sign(c)/2.
        if (key != 0) {
            value += 0.5 * filter.high_frequency_limit * (key > 0 ? 1.0 : -1.0);
        }
        cache.emplace(key, value);
        return value;
    };

    TransferMatrix t(grid.sub_pixels(), grid.pixels, padding);
    std::vector<TransferMatrix::Entry> row;
    for (int l = 0; l < grid.sub_pixels(); l++) {
        double tl = grid.sample_time(l);
        auto [lo, hi] = columns_within(tl, reach, grid);
        row.clear();
        for (int j = lo; j <= hi; j++) {
            // cos(a w) sin(b w) = [sin((b+a) w) + sin((b-a) w)] / 2
            double left = tl - j * grid.pixel_width;          // b + a
            double right = (j + 1) * grid.pixel_width - tl;   // b - a
            row.push_back({j, integral(left) + integral(right)});
        }
        t.append_row(row);
    }
    if (worst_error > kQuadratureTolerance) {
        std::ostringstream msg;
        msg << "general_filter: quadrature reached only " << worst_error << " (target "
            << kQuadratureTolerance << ")";
        throw NumericalError(msg.str());
    }
    return t;
}

TransferMatrix build_carrier(const TimeGrid &grid, const CarrierFunction &f,
                             const TransferMatrix &base, double psi) {
    require_grid(grid);
    if (base.rows() != grid.sub_pixels()) {
        throw InvalidArgument("carrier base", "base transfer built on a different grid");
    }
    Eigen::VectorXd factors(grid.sub_pixels());
    for (int l = 0; l < grid.sub_pixels(); l++) {
        factors[l] = f(grid.sample_time(l), psi);
    }
    return base.scaled_rows(factors);
}

TransferMatrix build_fourier(const TimeGrid &grid, std::span<const double> frequencies) {
    require_grid(grid);
    if (frequencies.empty()) {
        throw InvalidArgument("frequencies", "frequency list must be nonempty");
    }
    TransferMatrix t(grid.sub_pixels(), static_cast<int>(frequencies.size()), 0);
    std::vector<TransferMatrix::Entry> row(frequencies.size());
    for (int l = 0; l < grid.sub_pixels(); l++) {
        double tl = grid.sample_time(l);
        for (size_t j = 0; j < frequencies.size(); j++) {
            row[j] = {static_cast<int>(j), std::sin(frequencies[j] * tl)};
        }
        t.append_row(row);
    }
    return t;
}

TransferMatrix build_transfer(const TransferSpec &spec, const TimeGrid &grid, double psi) {
    spec.validate();
    switch (spec.kind) {
        case TransferKind::piecewise_constant:
            return build_piecewise_constant(grid);
        case TransferKind::cubic_spline:
            return build_cubic_spline(grid);
        case TransferKind::gaussian_filter:
            return build_gaussian_filter(grid, spec.omega0);
        case TransferKind::general_filter:
            return build_general_filter(grid, spec.filter);
        case TransferKind::carrier:
            return build_carrier(grid, spec.carrier_fn, build_transfer(*spec.base, grid, psi), psi);
        case TransferKind::fourier:
            return build_fourier(grid, spec.frequencies);
    }
    throw InvalidArgument("transfer.kind", "unknown transfer kind");
}

}  // namespace subgrape
