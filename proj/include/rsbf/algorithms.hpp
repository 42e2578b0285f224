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

// Feasible-point search, the CCCP outer loop, rank-one extraction and
// Gaussian randomization.
//
// Every convex program is solved on power-normalised data (P_max -> 1,
// sigma^2 -> sigma^2 / P_max); results are mapped back to physical units.

#pragma once

#include "rsbf/conic_ir.hpp"
#include "rsbf/core.hpp"
#include "rsbf/sdr_builder.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rsbf::algo
{

struct CccpSettings
{
    double tol = 1e-6;
    int max_iters = 100;
    int randomization_draws = 200;
    double rank_one_ratio_threshold = 1e-4;
    double c0_cap = 0.1;       // c_k^(0) ~ U[0, c0_cap]
    int init_retries = 5;      // c^(0) halvings after an infeasible start
    double momentum_cap = 0.9; // extrapolation weight cap for expansion points, 0 disables
    conic::SolverSettings solver;

    void check() const;
};

// Raised when no initial point is found after every retry.
class InfeasibleStart : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct FeasibleStart
{
    BeamformerSet beamformers;   // c holds the (possibly shrunk) c^(0)
    sdr::ExpansionPoint point;
    int attempts = 0;
    double margin = 0.0;         // optimal margin of the last initialization program
    std::string label;
};

/// x, y, beta of a rank-one design via the closed-form worst cases. Throws
/// sdr::DegeneratePoint if some |h_hat^H w| <= delta ||w|| for a used beamformer.
sdr::ExpansionPoint expansion_from_beamformers(const SystemConfig &cfg, const ChannelSet &channels,
                                               const BeamformerSet &b, const sdr::ModelFlags &flags = {});

/// Turns an arbitrary design into a start: scales it to full power, shrinks c to
/// the certified common rate and builds the expansion point.
FeasibleStart start_from_beamformers(const SystemConfig &cfg, const ChannelSet &channels, BeamformerSet b,
                                     const sdr::ModelFlags &flags = {}, std::string label = "given");

FeasibleStart feasible_point_search(const SystemConfig &cfg, const ChannelSet &channels, std::uint64_t seed,
                                    const sdr::ModelFlags &flags = {}, const CccpSettings &settings = {});

struct RankOne
{
    CVec w;
    double ratio = 0.0;  // lambda_2 / lambda_1, 0 for a zero matrix
};

RankOne extract_rank_one(const CMat &W);

struct RandomizedDesign
{
    BeamformerSet design;
    bool feasible = false;
    bool rank_one = false;      // every lifted matrix passed the ratio test
    double min_rate = 0.0;      // certified min_k c_k + private rate
    int candidates = 0;
};

/// Principal-eigenvector candidate plus `draws` Gaussian candidates w ~ CN(0, W),
/// each scaled to the power budget and scored by its certified min rate after c is
/// shrunk to the certified common rate and private beamformers with a negative
/// certified rate are switched off. feasible = false when no candidate keeps a
/// decodable common stream while the relaxation carried a positive common rate.
RandomizedDesign gaussian_randomize(const LiftedSolution &lifted, const SystemConfig &cfg,
                                    const ChannelSet &channels, int draws, std::uint64_t seed,
                                    const sdr::ModelFlags &flags = {}, double rank_one_ratio_threshold = 1e-4);

struct CccpOutcome
{
    LiftedSolution lifted;  // physical units
    SchemeResult result;
    RunTrace trace;
};

CccpOutcome cccp_solve(const SystemConfig &cfg, const ChannelSet &channels, const CccpSettings &settings,
                       const FeasibleStart &start, const sdr::ModelFlags &flags = {}, std::uint64_t seed = 0);

/// Solves one subproblem at the given power normalisation; the returned lifted
/// solution is in physical units. `warm` (physical units) seeds the solver.
struct ScaledSolve
{
    conic::SolveOutcome outcome;
    LiftedSolution lifted;
};
ScaledSolve solve_subproblem(const SystemConfig &cfg, const ChannelSet &channels, const sdr::ExpansionPoint &point,
                             const sdr::ModelFlags &flags, double scale, const LiftedSolution *warm,
                             const conic::SolverSettings &solver);

}  // namespace rsbf::algo
