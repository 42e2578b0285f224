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

// Reference computations for tests, written independently of the library:
// long double arithmetic, Newton iterations instead of bisection, and no
// calls into rsbf.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle
{

using ld = long double;

inline constexpr ld kPi = 3.141592653589793238462643383279502884L;

/// Q^{-1}(eps) by Newton on Q(x) - eps, Q'(x) = -phi(x), started from a
/// logistic-style guess.
inline double q_inv(double eps)
{
    ld x = std::sqrt(-2.0L * std::log(static_cast<ld>(eps)));
    x -= (2.515517L + 0.802853L * x + 0.010328L * x * x) /
         (1.0L + 1.432788L * x + 0.189269L * x * x + 0.001308L * x * x * x);
    for (int i = 0; i < 60; ++i)
    {
        const ld q = 0.5L * std::erfc(x / std::sqrt(2.0L));
        const ld phi = std::exp(-x * x / 2.0L) / std::sqrt(2.0L * kPi);
        const ld step = (q - static_cast<ld>(eps)) / phi;
        x += step;
        if (std::fabs(step) < 1e-18L)
            break;
    }
    return static_cast<double>(x);
}

/// Q^{-1}(eps) / sqrt(L)
inline double penalty(double eps, int L) { return q_inv(eps) / std::sqrt(static_cast<double>(L)); }

inline ld rate(ld xi, ld D)
{
    const ld v = 1.0L - 1.0L / ((1.0L + xi) * (1.0L + xi));
    return std::log1p(xi) - D * std::sqrt(v);
}

/// Minimiser of the rate over xi >= 0 by golden-section search on [0, 1].
inline double stationary_point(double D)
{
    ld a = 0.0L, b = 1.0L;
    const ld g = (std::sqrt(5.0L) - 1.0L) / 2.0L;
    ld c = b - g * (b - a), d = a + g * (b - a);
    for (int i = 0; i < 200; ++i)
    {
        if (rate(c, D) < rate(d, D))
            b = d;
        else
            a = c;
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    return static_cast<double>((a + b) / 2.0L);
}

/// Target SINR on the increasing branch: Newton from the Shannon inverse, safeguarded
/// to stay right of the stationary point.
inline double target_sinr(double r, double D)
{
    const ld v0 = stationary_point(D);
    ld xi = std::max<ld>(std::expm1(static_cast<ld>(r) + 2.0L * D), v0 + 1e-3L);
    for (int i = 0; i < 200; ++i)
    {
        const ld u = 1.0L + xi;
        const ld s = std::sqrt(1.0L - 1.0L / (u * u));
        const ld f = std::log(u) - D * s - r;
        const ld df = 1.0L / u - D / (u * u * u * s);
        ld next = xi - f / df;
        if (next <= v0)
            next = (xi + v0) / 2.0L;
        if (std::fabs(next - xi) < 1e-20L * std::max<ld>(1.0L, xi))
        {
            xi = next;
            break;
        }
        xi = next;
    }
    return static_cast<double>(xi);
}

/// Cosine of the angle between two complex vectors, |a^H b| / (||a|| ||b||).
inline double correlation(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b)
{
    return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

/// Single-user matched-filter Shannon rate ln(1 + P ||h||^2 / sigma^2).
inline double matched_filter_rate(const Eigen::VectorXcd &h, double P, double sigma2)
{
    return std::log1p(P * h.squaredNorm() / sigma2);
}

/// Point in the complex ball of radius delta around zero: on the sphere when
/// boundary is set, otherwise with radius delta * u^(1 / 2M).
inline Eigen::VectorXcd ball_point(int M, double delta, bool boundary, std::mt19937_64 &rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXcd v(M);
    for (int i = 0; i < M; ++i)
        v(i) = {n(rng), n(rng)};
    const double radius = boundary ? delta : delta * std::pow(u(rng), 1.0 / (2.0 * M));
    return v / v.norm() * radius;
}

}  // namespace oracle
