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

// Certified and sampled worst-case rates of a rank-one design, and the four
// scheme drivers built on the CCCP pipeline.
//
// The certified SINR bounds use the closed-form worst cases over the balls
//   signal       >= (|h_hat^H w| - delta ||w||)_+^2
//   interference <= sum_j (|h_hat^H w_j| + delta ||w_j||)^2 + sigma^2.

#pragma once

#include "rsbf/algorithms.hpp"
#include "rsbf/core.hpp"

#include <cstdint>
#include <vector>

namespace rsbf::schemes
{

enum class Stream
{
    Common,   // common stream decoded at user k (all private streams interfere)
    Private,  // private stream of user k after SIC
};

/// Certified lower bound on the SINR of `stream` at user k over the uncertainty ball.
double worst_case_sinr_lb(const BeamformerSet &b, const ChannelSet &channels, const SystemConfig &cfg, Stream stream,
                          int k);

/// fbl_rate of worst_case_sinr_lb (D = 0 when finite_blocklength is false).
double worst_case_rate_lb(const BeamformerSet &b, const ChannelSet &channels, const SystemConfig &cfg, Stream stream,
                          int k, bool finite_blocklength = true);

/// Exact rate of `stream` at user k for one realised channel h.
double exact_rate(const BeamformerSet &b, const CVec &h, double sigma2, double D, Stream stream, int k);

/// Minimum of exact_rate over n_samples perturbed channels (half on the sphere,
/// half inside the ball), drawn from derived seeds of `seed`.
double sampled_worst_case(const BeamformerSet &b, const ChannelSet &channels, const SystemConfig &cfg,
                          int n_samples, std::uint64_t seed, Stream stream, int k, bool finite_blocklength = true);

struct DesignEvaluation
{
    std::vector<double> common_lb;   // per-user certified common rates
    std::vector<double> private_lb;  // per-user certified private rates
    double common_min = 0.0;         // min_k common_lb (0 without a common beamformer)
    double min_rate = 0.0;           // min_k c_k + private_lb[k]
    bool feasible = false;           // sum c <= common_min and every private_lb >= 0
};

/// Tolerance applied to both feasibility inequalities.
inline constexpr double kFeasibilityTol = 1e-9;

DesignEvaluation evaluate_design(const BeamformerSet &b, const ChannelSet &channels, const SystemConfig &cfg,
                                 bool finite_blocklength = true);

/// Minimum (minimum = true) or maximum of (h_hat + e)^H A (h_hat + e) over ||e|| <= delta,
/// for Hermitian A >= 0, by the secular equation of the trust-region problem.
double ball_extreme(const CMat &A, const CVec &h_hat, double delta, bool minimum);

/// Objective of the rank-relaxed problem at a lifted point: every user's common and
/// private rate from the joint worst cases of the matrix quadratics, and the best
/// split c >= 0 with sum c <= min_k common rate. Without a common stream the split is 0.
double relaxation_value(const LiftedSolution &l, const ChannelSet &channels, const SystemConfig &cfg, bool common,
                        bool finite_blocklength = true);

struct SchemeSettings
{
    algo::CccpSettings cccp;
    int n_starts = 1;
    std::vector<BeamformerSet> extra_starts;  // e.g. designs from neighbouring grid points
};

/// Model flags of a scheme: RB-NoRS-FBL drops the common stream, RB-RS-IFBL uses D = 0.
sdr::ModelFlags scheme_flags(SchemeId id);

/// Runs the transformed pipeline of `id`. NoRB-RS-FBL is designed for zero radii and
/// evaluated under channels.delta; the others are designed and evaluated under
/// channels.delta. The best design over all starts is kept.
SchemeResult run_scheme(SchemeId id, const SystemConfig &cfg, const ChannelSet &channels,
                        const SchemeSettings &settings, std::uint64_t seed);

struct FeasibilityCount
{
    int feasible = 0;
    int total = 0;
    std::vector<SchemeResult> results;
};

/// run_scheme on n_realizations Rayleigh channel sets with radii cfg.delta.
FeasibilityCount feasibility_count(SchemeId id, const SystemConfig &cfg, int n_realizations, std::uint64_t seed,
                                   const SchemeSettings &settings = {});

}  // namespace rsbf::schemes
