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

#include "rsbf/fbl_math.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rsbf::fbl
{

double q_func(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double q_inv(double epsilon)
{
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::domain_error("q_inv: epsilon must lie in (0, 1)");
    if (epsilon == 0.5)
        return 0.0;

    // Q is strictly decreasing; Q(-40) = 1 and Q(40) = 0 in double precision.
    double lo = -40.0, hi = 40.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        if (q_func(mid) > epsilon)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double dispersion(double xi)
{
    if (!(xi >= 0.0))
        throw std::domain_error("dispersion: SINR must be nonnegative");
    const double u = 1.0 + xi;
    return 1.0 - 1.0 / (u * u);
}

FblPenalty FblPenalty::finite(double epsilon, int L)
{
    if (L < 1)
        throw std::domain_error("FblPenalty: blocklength must be >= 1");
    return {q_inv(epsilon) / std::sqrt(static_cast<double>(L)), L, epsilon};
}

FblPenalty FblPenalty::infinite() { return {0.0, 0, 0.0}; }

double fbl_rate(double xi, double D)
{
    if (!(xi >= 0.0))
        throw std::domain_error("fbl_rate: SINR must be nonnegative");
    if (D == 0.0)
        return std::log1p(xi);
    return std::log1p(xi) - std::sqrt(dispersion(xi)) * D;
}

double fbl_rate(double xi, const FblPenalty &penalty) { return fbl_rate(xi, penalty.D); }

double stationary_point(double D)
{
    if (!(D >= 0.0))
        throw std::domain_error("stationary_point: D must be nonnegative");
    return std::sqrt((1.0 + std::sqrt(1.0 + 4.0 * D * D)) / 2.0) - 1.0;
}

double target_sinr_bisect(double r, double D)
{
    if (!(r >= 0.0) || !(D >= 0.0))
        throw std::domain_error("target_sinr_bisect: requires r >= 0 and D >= 0");
    if (D == 0.0)
        return std::expm1(r);

    // fbl_rate(v0) <= 0 <= r, and fbl_rate(e^(r+4D)) > r + 3D.
    double lo = stationary_point(D);
    double hi = std::exp(r + 4.0 * D);
    for (int it = 0; it < 400 && hi - lo > 1e-12; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        if (fbl_rate(mid, D) < r)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace
{

double log_sum_exp(double a, double b)
{
    if (a == -std::numeric_limits<double>::infinity())
        return b;
    if (b == -std::numeric_limits<double>::infinity())
        return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

SeriesResult target_sinr_series(double r, double D)
{
    if (!(r >= 0.0) || !(D >= 0.0))
        throw std::domain_error("target_sinr_series: requires r >= 0 and D >= 0");

    SeriesResult out;
    if (D == 0.0)
    {
        out.value = std::expm1(r);
        out.converged = true;
        return out;
    }

    // W(t1, t2; mu) = t1 - sum_m 1/(m m!) (mu m e^-t1 / (t2 - t1))^m
    //                     * sum_{n=0}^{m-1} (m-1+n)! / (n! (m-1-n)!) (-1 / (m (t2 - t1)))^n
    // with t1 = 2D, t2 = -2D, mu = -4 D^2 e^-2r. Both bases are positive here, so
    // every term is positive and is accumulated in log space.
    const double t1 = 2.0 * D;
    const double gap = -4.0 * D;  // t2 - t1
    const double mu = -4.0 * D * D * std::exp(-2.0 * r);

    constexpr int kMaxTerms = 50;
    constexpr double kTermTol = 1e-12;

    double sum = 0.0;
    double last = std::numeric_limits<double>::infinity();
    int m = 1;
    for (; m <= kMaxTerms; ++m)
    {
        const double md = static_cast<double>(m);
        const double log_base = std::log(mu * md * std::exp(-t1) / gap);
        const double log_x = std::log(-1.0 / (md * gap));

        double log_inner = -std::numeric_limits<double>::infinity();
        for (int n = 0; n <= m - 1; ++n)
        {
            const double nd = static_cast<double>(n);
            const double lt = std::lgamma(md + nd) - std::lgamma(nd + 1.0) - std::lgamma(md - nd) + nd * log_x;
            log_inner = log_sum_exp(log_inner, lt);
        }
        const double log_term = -std::log(md) - std::lgamma(md + 1.0) + md * log_base + log_inner;
        last = std::exp(log_term);
        if (!std::isfinite(last))
            break;
        sum += last;
        if (last < kTermTol)
            break;
    }

    out.terms = std::min(m, kMaxTerms);
    out.b = t1 - sum;
    out.converged = std::isfinite(last) && last < kTermTol && std::isfinite(out.b) && out.b >= 0.0;
    out.value = std::expm1(r + 0.5 * out.b);
    return out;
}

std::vector<double> penalties(const SystemConfig &cfg, bool finite_blocklength)
{
    std::vector<double> D(static_cast<std::size_t>(cfg.K), 0.0);
    if (!finite_blocklength)
        return D;
    for (std::size_t k = 0; k < D.size(); ++k)
        D[k] = FblPenalty::finite(cfg.epsilon[k], cfg.L).D;
    return D;
}

}  // namespace rsbf::fbl
