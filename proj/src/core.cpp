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

#include "rsbf/core.hpp"

#include <cmath>
#include <numeric>

namespace rsbf
{

SystemConfig SystemConfig::uniform(int M, int K, int L, double epsilon, double P_max, double sigma2,
                                   double delta, double alpha, double d)
{
    SystemConfig cfg;
    cfg.M = M;
    cfg.K = K;
    cfg.L = L;
    cfg.P_max = P_max;
    cfg.d = d;
    const auto k = static_cast<std::size_t>(std::max(K, 0));
    cfg.epsilon.assign(k, epsilon);
    cfg.sigma2.assign(k, sigma2);
    cfg.delta.assign(k, delta);
    cfg.alpha.assign(k, alpha);
    return cfg;
}

SystemConfig validate_config(const SystemConfig &cfg)
{
    if (cfg.M < 1)
        throw ConfigError("M", "antenna count must be >= 1");
    if (cfg.K < 1)
        throw ConfigError("K", "user count must be >= 1");
    if (cfg.L < 1)
        throw ConfigError("L", "blocklength must be >= 1");

    const auto K = static_cast<std::size_t>(cfg.K);
    if (cfg.epsilon.size() != K)
        throw ConfigError("epsilon", "expected one value per user");
    if (cfg.sigma2.size() != K)
        throw ConfigError("sigma2", "expected one value per user");
    if (cfg.delta.size() != K)
        throw ConfigError("delta", "expected one value per user");
    if (cfg.alpha.size() != K)
        throw ConfigError("alpha", "expected one value per user");

    for (double e : cfg.epsilon)
        if (!(e > 0.0 && e < 0.5))
            throw ConfigError("epsilon", "epsilon out of range (0, 0.5)");
    if (!(cfg.P_max > 0.0) || !std::isfinite(cfg.P_max))
        throw ConfigError("P_max", "power budget must be positive");
    for (double s : cfg.sigma2)
        if (!(s > 0.0) || !std::isfinite(s))
            throw ConfigError("sigma2", "noise power must be positive");
    for (double r : cfg.delta)
        if (!(r >= 0.0) || !std::isfinite(r))
            throw ConfigError("delta", "negative radius");
    for (double a : cfg.alpha)
        if (!(a >= 0.0 && a <= 1.0))
            throw ConfigError("alpha", "CSIT quality exponent out of range [0, 1]");
    if (!(cfg.d >= 0.0))
        throw ConfigError("d", "error-scaling coefficient must be nonnegative");
    return cfg;
}

double effective_radius(double d, double P, double alpha)
{
    if (d < 0.0 || !(P > 0.0) || alpha < 0.0 || alpha > 1.0)
        throw std::domain_error("effective_radius: requires d >= 0, P > 0, alpha in [0, 1]");
    return d * std::pow(P, -alpha);
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

void ChannelSet::check() const
{
    if (M < 1)
        throw std::invalid_argument("ChannelSet: M must be >= 1");
    if (h_hat.size() != delta.size())
        throw std::invalid_argument("ChannelSet: one radius per user required");
    for (const auto &h : h_hat)
        if (h.size() != M)
            throw std::invalid_argument("ChannelSet: channel length differs from M");
    for (double r : delta)
        if (!(r >= 0.0))
            throw std::invalid_argument("ChannelSet: negative radius");
}

double BeamformerSet::power() const
{
    double p = w_c.size() > 0 ? w_c.squaredNorm() : 0.0;
    for (const auto &wk : w)
        p += wk.squaredNorm();
    return p;
}

double BeamformerSet::common_rate_sum() const { return std::accumulate(c.begin(), c.end(), 0.0); }

double LiftedSolution::trace_power() const
{
    double p = W_c.size() > 0 ? W_c.trace().real() : 0.0;
    for (const auto &Wk : W)
        p += Wk.trace().real();
    return p;
}

std::string_view to_string(SchemeId id)
{
    switch (id)
    {
    case SchemeId::RbRsFbl:
        return "RB-RS-FBL";
    case SchemeId::RbNoRsFbl:
        return "RB-NoRS-FBL";
    case SchemeId::NoRbRsFbl:
        return "NoRB-RS-FBL";
    case SchemeId::RbRsIfbl:
        return "RB-RS-IFBL";
    }
    return "unknown";
}

SchemeId parse_scheme(std::string_view name)
{
    for (auto id : {SchemeId::RbRsFbl, SchemeId::RbNoRsFbl, SchemeId::NoRbRsFbl, SchemeId::RbRsIfbl})
        if (to_string(id) == name)
            return id;
    throw std::invalid_argument("unknown scheme: " + std::string(name));
}

double hermitian_defect(const CMat &W)
{
    if (W.size() == 0)
        return 0.0;
    return (W - W.adjoint()).cwiseAbs().maxCoeff();
}

CMat hermitian_part(const CMat &W) { return 0.5 * (W + W.adjoint()); }

}  // namespace rsbf
