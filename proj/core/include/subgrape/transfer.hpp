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

#ifndef SUBGRAPE_TRANSFER_HPP
#define SUBGRAPE_TRANSFER_HPP

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "subgrape/grid.hpp"

namespace subgrape {

/// Ratio between the -3 dB (power) frequency of a Gaussian filter
/// exp(-w^2/w0^2) and its reference frequency w0.
inline constexpr double kGaussianThreeDbRatio = 0.5887;

/// Reference frequency w0 (rad/ns) of a Gaussian filter whose -3 dB
/// bandwidth is `bandwidth_ghz` (cyclic).
double gaussian_omega0_from_bandwidth(double bandwidth_ghz);

/// Number of zero pixels needed on each side of a filtered pulse:
/// ceil(2 pi / (omega_b * pixel_width)).
int filter_padding(double omega_b, double pixel_width);

/// Even, real frequency response F(w) of a linear filter.
struct FilterResponse {
    std::function<double(double)> response;
    /// lim_{w -> inf} F(w). 1 for an ideal all-pass, 0 for any low-pass.
    double high_frequency_limit = 0.0;
    /// -3 dB angular frequency (rad/ns). Located numerically when absent;
    /// a response that never drops 3 dB gets no truncation and no padding.
    std::optional<double> bandwidth;

    static FilterResponse gaussian(double omega0);
    static FilterResponse all_pass();
    /// 1 / sqrt(1 + (w / wc)^(2 order)): amplitude response of a Butterworth
    /// low-pass with cutoff wc.
    static FilterResponse butterworth(double cutoff, int order);

    /// Returns the bandwidth, estimating it from F(0)/sqrt(2) if needed.
    std::optional<double> three_db_frequency() const;
};

/// Carrier multiplying the transferred field, f(t, psi).
using CarrierFunction = std::function<double(double t, double psi)>;

enum class TransferKind {
    piecewise_constant,
    cubic_spline,
    gaussian_filter,
    general_filter,
    carrier,
    fourier,
};

const char *to_string(TransferKind kind);

/// Description of how one control's pixel amplitudes become sub-pixel
/// field samples. Build one with the named constructors.
struct TransferSpec {
    TransferKind kind = TransferKind::piecewise_constant;
    double omega0 = 0.0;                         // gaussian_filter
    FilterResponse filter;                       // general_filter
    CarrierFunction carrier_fn;                  // carrier
    std::shared_ptr<const TransferSpec> base;    // carrier
    std::vector<double> frequencies;             // fourier, rad/ns

    static TransferSpec piecewise_constant();
    static TransferSpec cubic_spline();
    static TransferSpec gaussian_filter(double omega0);
    static TransferSpec gaussian_filter_bandwidth(double bandwidth_ghz);
    static TransferSpec general_filter(FilterResponse filter);
    static TransferSpec carrier(CarrierFunction f, TransferSpec base);
    /// cos(omega t + psi) carrier.
    static TransferSpec cosine_carrier(double omega, TransferSpec base);
    static TransferSpec fourier(std::vector<double> frequencies);

    /// Zero pixels required at each end of the pulse (n_r).
    int padding(double pixel_width) const;
    /// Whether the built matrix depends on the carrier phase.
    bool phase_dependent() const;

    /// Throws InvalidArgument if parameters are out of range.
    void validate() const;
};

/// Sparse row-major matrix T[l][j] mapping pixel amplitudes u_j to
/// sub-pixel field samples s_l = sum_j T[l][j] u_j.
class TransferMatrix {
   public:
    struct Entry {
        int column;
        double value;
    };

    TransferMatrix() = default;
    TransferMatrix(int rows, int cols, int padding);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    /// Zero-control margin (pixels) this transfer expects on each side.
    int padding() const { return padding_; }

    std::span<const Entry> row(int l) const;
    size_t nonzeros() const { return entries_.size(); }

    /// Rows must be appended in order. Exact zeros are dropped.
    void append_row(std::span<const Entry> entries);

    /// s = T u. Throws InvalidArgument on size mismatch.
    Eigen::VectorXd apply(const Eigen::VectorXd &u) const;
    /// g_u = T^T g_s, the chain rule through a linear transfer.
    Eigen::VectorXd apply_transpose(const Eigen::VectorXd &grad_s) const;

    Eigen::MatrixXd dense() const;
    Eigen::VectorXd row_sums() const;

    /// Largest distance, in pixels, between a sample time and the time
    /// interval of a pixel it depends on. Only meaningful for time-indexed
    /// columns.
    double bandwidth(const TimeGrid &grid) const;

    /// Returns a copy whose row l is multiplied by factors[l].
    TransferMatrix scaled_rows(const Eigen::VectorXd &factors) const;

   private:
    int rows_ = 0;
    int cols_ = 0;
    int padding_ = 0;
    std::vector<size_t> row_offsets_{0};
    std::vector<Entry> entries_;
};

TransferMatrix build_piecewise_constant(const TimeGrid &grid);
TransferMatrix build_cubic_spline(const TimeGrid &grid);
TransferMatrix build_gaussian_filter(const TimeGrid &grid, double omega0);
TransferMatrix build_general_filter(const TimeGrid &grid, const FilterResponse &filter);
TransferMatrix build_carrier(const TimeGrid &grid, const CarrierFunction &f,
                             const TransferMatrix &base, double psi);
TransferMatrix build_fourier(const TimeGrid &grid, std::span<const double> frequencies);

/// Dispatches on spec.kind. `psi` only matters for carrier transfers.
TransferMatrix build_transfer(const TransferSpec &spec, const TimeGrid &grid, double psi = 0.0);

}  // namespace subgrape

#endif
