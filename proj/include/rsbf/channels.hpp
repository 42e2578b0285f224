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

#pragma once

#include "rsbf/core.hpp"

#include <json.hpp>

#include <cstdint>
#include <random>

namespace rsbf::channels
{

enum class PerturbationMode
{
    Interior,  // uniform in the complex ball
    Boundary,  // uniform on the sphere ||dh|| = delta
};

// Estimated channels together with one admissible true channel per user.
struct ChannelRealization
{
    std::vector<CVec> h_true;
    std::vector<CVec> h_hat;
    std::vector<double> delta;
};

/// splitmix64 mix of (seed, index); used to derive per-sample and per-realization seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// K i.i.d. CN(0, I_M) estimates. The radii are taken from `delta` (length K, or
/// empty for all zeros).
ChannelSet sample_rayleigh(int M, int K, std::uint64_t seed, const std::vector<double> &delta = {});

/// h1 = [1, 1, 1, 1]^T and h2 = gamma [1, e^{j theta}, e^{j 2 theta}, e^{j 3 theta}]^T.
/// Only M = 4 is supported.
ChannelSet correlated_pair(double gamma, double theta, int M = 4, const std::vector<double> &delta = {});

CVec sample_perturbation(double delta, int M, std::mt19937_64 &rng, PerturbationMode mode);
CVec sample_perturbation(double delta, int M, std::uint64_t seed, PerturbationMode mode);

/// Draws one admissible true channel per user inside the uncertainty balls.
ChannelRealization sample_realization(const ChannelSet &channels, std::uint64_t seed,
                                      PerturbationMode mode = PerturbationMode::Interior);

/// Returns a copy with every radius replaced by `delta`.
ChannelSet with_radius(ChannelSet channels, double delta);

nlohmann::json to_json(const ChannelSet &channels);
ChannelSet channel_set_from_json(const nlohmann::json &doc);

}  // namespace rsbf::channels
