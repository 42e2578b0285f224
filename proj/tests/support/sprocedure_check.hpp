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

// Random robust-quadratic instances: solve a small program whose only link between
// the matrix variable and the ball is one S-Procedure LMI, then sample the ball.

#pragma once

#include "rsbf/channels.hpp"
#include "rsbf/conic_ir.hpp"
#include "rsbf/sdr_builder.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <random>

namespace sproc
{

struct Outcome
{
    bool certified = false;      // solver reported Optimal
    double bound = 0.0;          // certified threshold (lower) or cap (upper)
    double worst_violation = 0;  // max over samples of the amount the quadratic misses the bound
};

// lower = true:  maximise s subject to h^H W h >= s on the ball, tr W <= 1, W >= 0.
// lower = false: minimise c subject to h^H W h <= c on the ball, tr W = 1, W >= 0,
//                W >= w0 w0^H / 2 for a random unit w0 (keeps the optimum away from 0).
inline Outcome run(int M, std::uint64_t seed, bool lower, int samples)
{
    using namespace rsbf;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> radius(0.05, 0.8);
    const CVec h_hat = channels::sample_rayleigh(M, 1, seed).h_hat.front();
    const double delta = radius(rng) * h_hat.norm();  // ball excludes the origin

    conic::ConicProblem p;
    const auto idx = sdr::add_hermitian_variable(p, M, "W");
    const int bound = p.add_variable("bound");
    const int lambda = p.add_variable("lambda");
    const conic::HermitianAffine W = sdr::hermitian_variable(idx, M);

    conic::Terms trace;
    for (int i = 0; i < M; ++i)
        trace.push_back({idx[static_cast<std::size_t>(i)], 1.0});  // diagonal entries come first
    conic::HermitianAffine psd = W;
    if (lower)
        p.linear_constraints.push_back({trace, conic::Relation::LessEqual, 1.0, "trace"});
    else
    {
        p.linear_constraints.push_back({trace, conic::Relation::Equal, 1.0, "trace"});
        CVec w0 = oracle::ball_point(M, 1.0, true, rng);
        psd.add_constant(-0.5 * (w0 * w0.adjoint()));
    }
    p.psd_blocks.push_back({psd, "W psd"});
    p.linear_constraints.push_back({{{lambda, -1.0}}, conic::Relation::LessEqual, 0.0, "lambda >= 0"});
    p.linear_constraints.push_back({{{bound, 1.0}}, conic::Relation::LessEqual, 100.0, "bound cap"});
    p.linear_constraints.push_back({{{bound, -1.0}}, conic::Relation::LessEqual, 100.0, "bound floor"});

    const auto blk = lower ? sdr::lmi_lower_bound(W, h_hat, delta, conic::AffineExpr::var(bound), lambda)
                           : sdr::lmi_upper_bound(W, h_hat, delta, conic::AffineExpr::var(bound), lambda);
    p.psd_blocks.push_back({blk.body, "s-procedure"});
    p.objective = {{bound, lower ? 1.0 : -1.0}};

    const auto sol = conic::solve(p);
    Outcome out;
    out.certified = sol.status == conic::SolveStatus::Optimal;
    if (!out.certified)
        return out;
    const CMat Wv = sdr::hermitian_value(idx, M, sol.primal);
    out.bound = sol.primal[static_cast<std::size_t>(bound)];
    out.worst_violation = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i)
    {
        const CVec h = h_hat + oracle::ball_point(M, delta, i % 2 == 0, rng);
        const double q = std::real(h.dot(Wv * h));
        out.worst_violation = std::max(out.worst_violation, lower ? out.bound - q : q - out.bound);
    }
    return out;
}

}  // namespace sproc
