// SPDX-License-Identifier: Apache-2.0
//
// rsbf - robust rate-splitting beamforming for short-packet downlink MISO
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Finite-blocklength (normal approximation) rate model.
//
//   R(xi) = ln(1 + xi) - sqrt(V(xi)) * D,    V(xi) = 1 - (1 + xi)^-2,
//   D = Qinv(epsilon) / sqrt(L).
//
// R is decreasing on [0, v0] and increasing on [v0, inf) with
// v0 = sqrt((1 + sqrt(1 + 4 D^2)) / 2) - 1. Rates are in nats/s/Hz.

#pragma once

#include "rsbf/core.hpp"

#include <vector>

namespace rsbf::fbl
{

/// Gaussian tail probability Q(x) = erfc(x / sqrt 2) / 2.
double q_func(double x);

/// Inverse of Q on (0, 1), by bisection on erfc. Throws std::domain_error outside (0, 1).
double q_inv(double epsilon);

/// Channel dispersion 1 - (1 + xi)^-2. Throws std::domain_error for xi < 0.
double dispersion(double xi);

// Penalty coefficient D = Qinv(epsilon) / sqrt(L); D = 0 is the Shannon limit.
struct FblPenalty
{
    double D = 0.0;
    int L = 0;            // 0 for the infinite-blocklength limit
    double epsilon = 0.0;

    static FblPenalty finite(double epsilon, int L);
    static FblPenalty infinite();
};

double fbl_rate(double xi, double D);
double fbl_rate(double xi, const FblPenalty &penalty);

/// v0(D), the minimiser of fbl_rate over xi >= 0.
double stationary_point(double D);

/// Unique xi >= v0 with fbl_rate(xi, D) = r, bisected on [v0, e^(r + 4D)] to 1e-10.
double target_sinr_bisect(double r, double D);

struct SeriesResult
{
    double value = 0.0;   // target SINR
    double b = 0.0;       // generalized Lambert W value
    int terms = 0;        // series terms summed
    bool converged = false;
};

/// Target SINR via the generalized Lambert-W series for
///   e^b (b - 2D)(b + 2D) = -4 D^2 e^(-2r),   xi = e^(r + b/2) - 1.
/// Terms are summed until one falls below 1e-12 in magnitude or 50 terms are used;
/// converged = false when the partial sums have not settled (callers fall back to
/// target_sinr_bisect). D = 0 returns the Shannon inverse e^r - 1 directly.
SeriesResult target_sinr_series(double r, double D);

/// Per-user penalties for the configured blocklength and BLER; all zeros (Shannon
/// rate) when finite_blocklength is false.
std::vector<double> penalties(const SystemConfig &cfg, bool finite_blocklength = true);

}  // namespace rsbf::fbl
