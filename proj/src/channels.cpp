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

#include "rsbf/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace rsbf::channels
{

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace
{

// CN(0, 1): real and imaginary parts N(0, 1/2).
CVec complex_gaussian(int M, std::mt19937_64 &rng)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    CVec v(M);
    for (int i = 0; i < M; ++i)
    {
        const double re = n(rng);
        const double im = n(rng);
        v(i) = cdouble(re, im);
    }
    return v;
}

std::vector<double> radii_or_zero(const std::vector<double> &delta, int K)
{
    if (delta.empty())
        return std::vector<double>(static_cast<std::size_t>(K), 0.0);
    if (static_cast<int>(delta.size()) != K)
        throw std::invalid_argument("channels: expected one radius per user");
    return delta;
}

}  // namespace

ChannelSet sample_rayleigh(int M, int K, std::uint64_t seed, const std::vector<double> &delta)
{
    if (M < 1 || K < 1)
        throw std::invalid_argument("sample_rayleigh: M and K must be >= 1");
    std::mt19937_64 rng(seed);
    ChannelSet out;
    out.M = M;
    out.delta = radii_or_zero(delta, K);
    out.h_hat.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
        out.h_hat.push_back(complex_gaussian(M, rng));
    return out;
}

ChannelSet correlated_pair(double gamma, double theta, int M, const std::vector<double> &delta)
{
    if (M != 4)
        throw std::invalid_argument("correlated_pair: only M = 4 is defined");
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("correlated_pair: gamma must lie in (0, 1]");
    ChannelSet out;
    out.M = M;
    out.delta = radii_or_zero(delta, 2);
    CVec h1 = CVec::Ones(M);
    CVec h2(M);
    for (int m = 0; m < M; ++m)
        h2(m) = gamma * std::polar(1.0, m * theta);
    out.h_hat = {h1, h2};
    return out;
}

CVec sample_perturbation(double delta, int M, std::mt19937_64 &rng, PerturbationMode mode)
{
    if (!(delta >= 0.0))
        throw std::invalid_argument("sample_perturbation: negative radius");
    if (delta == 0.0)
        return CVec::Zero(M);

    CVec dir = complex_gaussian(M, rng);
    double n = dir.norm();
    while (n == 0.0)
    {
        dir = complex_gaussian(M, rng);
        n = dir.norm();
    }
    dir /= n;

    if (mode == PerturbationMode::Boundary)
        return delta * dir;

    // Uniform in the ball of real dimension 2M: radius = delta * U^(1/2M).
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double radius = delta * std::pow(u(rng), 1.0 / (2.0 * M));
    return radius * dir;
}

CVec sample_perturbation(double delta, int M, std::uint64_t seed, PerturbationMode mode)
{
    std::mt19937_64 rng(seed);
    return sample_perturbation(delta, M, rng, mode);
}

ChannelRealization sample_realization(const ChannelSet &channels, std::uint64_t seed, PerturbationMode mode)
{
    std::mt19937_64 rng(seed);
    ChannelRealization out;
    out.h_hat = channels.h_hat;
    out.delta = channels.delta;
    for (int k = 0; k < channels.K(); ++k)
        out.h_true.push_back(channels.h_hat[k] + sample_perturbation(channels.delta[k], channels.M, rng, mode));
    return out;
}

ChannelSet with_radius(ChannelSet channels, double delta)
{
    for (auto &r : channels.delta)
        r = delta;
    return channels;
}

nlohmann::json to_json(const ChannelSet &channels)
{
    nlohmann::json doc;
    doc["M"] = channels.M;
    doc["K"] = channels.K();
    auto h = nlohmann::json::array();
    for (const auto &hk : channels.h_hat)
    {
        auto v = nlohmann::json::array();
        for (int m = 0; m < hk.size(); ++m)
            v.push_back({hk(m).real(), hk(m).imag()});
        h.push_back(v);
    }
    doc["h_hat"] = h;
    doc["delta"] = channels.delta;
    return doc;
}

ChannelSet channel_set_from_json(const nlohmann::json &doc)
{
    ChannelSet out;
    out.M = doc.at("M").get<int>();
    const int K = doc.at("K").get<int>();
    const auto &h = doc.at("h_hat");
    if (static_cast<int>(h.size()) != K)
        throw std::invalid_argument("channel set: h_hat has " + std::to_string(h.size()) + " users, K = " +
                                    std::to_string(K));
    for (const auto &hk : h)
    {
        CVec v(static_cast<Eigen::Index>(hk.size()));
        for (std::size_t m = 0; m < hk.size(); ++m)
            v(static_cast<Eigen::Index>(m)) = cdouble(hk[m].at(0).get<double>(), hk[m].at(1).get<double>());
        out.h_hat.push_back(std::move(v));
    }
    out.delta = doc.at("delta").get<std::vector<double>>();
    out.check();
    return out;
}

}  // namespace rsbf::channels
