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

#ifndef SUBGRAPE_GRID_HPP
#define SUBGRAPE_GRID_HPP

namespace subgrape {

/// Two-level time discretization: `pixels` control pixels of width
/// `pixel_width` (ns), each split into `n_sub` integration sub-pixels.
///
/// The sub-pixel width is always derived from the pixel width, so
/// sub_pixels() * sub_width() reproduces duration() up to rounding.
struct TimeGrid {
    int pixels = 1;
    double pixel_width = 1.0;
    int n_sub = 1;
    /// Sample time-dependent quantities at l*dt instead of (l + 1/2)*dt.
    bool sample_at_left_edge = false;

    int sub_pixels() const { return pixels * n_sub; }
    double sub_width() const { return pixel_width / n_sub; }
    double duration() const { return pixels * pixel_width; }

    /// Time (ns) at which sub-pixel l is sampled.
    double sample_time(int l) const {
        return (sample_at_left_edge ? l : l + 0.5) * sub_width();
    }

    /// Same grid with `factor` times more sub-pixels per pixel.
    TimeGrid refined(int factor) const {
        TimeGrid g = *this;
        g.n_sub *= factor;
        return g;
    }
};

}  // namespace subgrape

#endif
