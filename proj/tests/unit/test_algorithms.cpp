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

#include "rsbf/algorithms.hpp"

#include "rsbf/channels.hpp"
#include "rsbf/schemes.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace rsbf;
using Catch::Approx;

namespace
{

SystemConfig reference_config(double delta) { return SystemConfig::uniform(4, 2, 1000, 1e-5, 1000.0, 0.01, delta); }

}  // namespace

TEST_CASE("settings are validated")
{
    algo::CccpSettings s;
    CHECK_NOTHROW(s.check());
    s.tol = 0.0;
    CHECK_THROWS_AS(s.check(), std::invalid_argument);
    s = {};
    s.max_iters = 0;
    CHECK_THROWS_AS(s.check(), std::invalid_argument);
    s = {};
    s.momentum_cap = 1.0;
    CHECK_THROWS_AS(s.check(), std::invalid_argument);
    s.momentum_cap = -0.1;
    CHECK_THROWS_AS(s.check(), std::invalid_argument);
}

TEST_CASE("rank-one extraction")
{
    CVec w(3);
    w << cdouble(1, 1), cdouble(0, 2), cdouble(-1, 0);
    const CMat W = w * w.adjoint();
    const auto r = algo::extract_rank_one(W);
    CHECK(r.ratio < 1e-12);
    CHECK((r.w * r.w.adjoint() - W).norm() < 1e-10);

    CMat full = W + 0.5 * CMat::Identity(3, 3);
    CHECK(algo::extract_rank_one(full).ratio > 0.05);
    CHECK(algo::extract_rank_one(CMat::Zero(3, 3)).ratio == 0.0);
}

TEST_CASE("expansion point of a rank-one design matches the closed-form worst cases")
{
    const auto cfg = reference_config(0.01);
    const auto ch = channels::sample_rayleigh(4, 2, 12, cfg.delta);
    BeamformerSet b;
    b.w_c = ch.h_hat[0] + ch.h_hat[1];
    b.w = {ch.h_hat[0], ch.h_hat[1]};
    b.c = {0.0, 0.0};
    const auto pt = algo::expansion_from_beamformers(cfg, ch, b);
    for (int k = 0; k < 2; ++k)
    {
        const double sinr_p = schemes::worst_case_sinr_lb(b, ch, cfg, schemes::Stream::Private, k);
        const double sinr_c = schemes::worst_case_sinr_lb(b, ch, cfg, schemes::Stream::Common, k);
        CHECK(pt.beta_p[k] == Approx(sinr_p).epsilon(1e-9));
        CHECK(pt.beta_c[k] == Approx(sinr_c).epsilon(1e-9));
        CHECK(std::exp(pt.x_p[k] - pt.y_p[k]) == Approx(sinr_p).epsilon(1e-9));
    }

    const auto big = channels::with_radius(ch, 10.0);
    CHECK_THROWS_AS(algo::expansion_from_beamformers(cfg, big, b), sdr::DegeneratePoint);
}

TEST_CASE("initial point search and CCCP on a seeded instance")
{
    const auto cfg = reference_config(0.01);
    const auto ch = channels::sample_rayleigh(4, 2, channels::derive_seed(5, 0), cfg.delta);
    algo::CccpSettings settings;
    const auto start = algo::feasible_point_search(cfg, ch, 77, {}, settings);
    CHECK(start.beamformers.power() <= cfg.P_max * (1.0 + 1e-9));
    CHECK_NOTHROW(start.point.check());
    const auto ev0 = schemes::evaluate_design(start.beamformers, ch, cfg);
    CHECK(ev0.feasible);

    const auto out = algo::cccp_solve(cfg, ch, settings, start, {}, 3);
    const auto &trace = out.result.objective_trace;
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i)
        CHECK(trace[i] >= trace[i - 1] - 1e-8);
    CHECK(out.trace.converged);
    CHECK(out.result.feasible);
    CHECK(out.result.design.power() <= cfg.P_max + 1e-9);
    const auto ev = schemes::evaluate_design(out.result.design, ch, cfg);
    CHECK(ev.min_rate == Approx(out.result.min_rate).epsilon(1e-12));
    CHECK(out.result.min_rate >= ev0.min_rate - 1e-6);
    CHECK(out.trace.randomized);
    CHECK(out.trace.randomized_power <= cfg.P_max + 1e-9);
}

TEST_CASE("extrapolated expansion points keep the trace monotone and match the plain iteration")
{
    const auto cfg = reference_config(0.005);
    const auto ch = channels::sample_rayleigh(4, 2, channels::derive_seed(2024, 2), cfg.delta);
    algo::CccpSettings plain;
    plain.momentum_cap = 0.0;
    const auto start = algo::feasible_point_search(cfg, ch, 4, {}, plain);
    const auto slow = algo::cccp_solve(cfg, ch, plain, start, {}, 1);
    const auto fast = algo::cccp_solve(cfg, ch, {}, start, {}, 1);
    const auto &trace = fast.result.objective_trace;
    for (std::size_t i = 1; i < trace.size(); ++i)
        CHECK(trace[i] >= trace[i - 1] - 1e-8);
    CHECK(fast.trace.converged);
    CHECK(fast.result.iterations <= slow.result.iterations);
    CHECK(fast.result.relaxation_objective >= slow.result.relaxation_objective - 1e-3);
}

TEST_CASE("the final relaxation value is tight and bounds the randomized design")
{
    for (std::uint64_t r = 0; r < 3; ++r)
    {
        const auto cfg = reference_config(0.01);
        const auto ch = channels::sample_rayleigh(4, 2, channels::derive_seed(9, r), cfg.delta);
        const auto start = algo::feasible_point_search(cfg, ch, 5);
        const auto out = algo::cccp_solve(cfg, ch, {}, start, {}, 6);
        const double exact = schemes::relaxation_value(out.lifted, ch, cfg, !out.trace.common_dropped);
        CHECK(exact >= out.trace.relaxation_objective - 1e-7);
        CHECK(out.trace.randomized_min_rate <= exact + 1e-6);
    }
}

TEST_CASE("an idle common stream is dropped instead of pinning power at its zero-rate crossing")
{
    // Low SNR with a wide ball: the common stream cannot carry rate.
    const auto cfg = SystemConfig::uniform(4, 2, 1000, 1e-5, 1.0, 1.0, 0.1);
    const auto ch = channels::sample_rayleigh(4, 2, channels::derive_seed(2024, 2), cfg.delta);
    const auto start = algo::feasible_point_search(cfg, ch, 100);
    const auto out = algo::cccp_solve(cfg, ch, {}, start, {}, 5);
    CHECK(out.trace.common_dropped);
    CHECK(out.trace.converged);
    const auto &trace = out.result.objective_trace;
    for (std::size_t i = 1; i < trace.size(); ++i)
        CHECK(trace[i] >= trace[i - 1] - 1e-8);
    CHECK(out.lifted.W_c.norm() == 0.0);
    CHECK(out.trace.randomized_min_rate <= out.trace.relaxation_objective + 1e-6);

    // The private-only scheme reaches the same value from its own start.
    sdr::ModelFlags nors;
    nors.rate_splitting = false;
    const auto s2 = algo::feasible_point_search(cfg, ch, 100, nors);
    const auto o2 = algo::cccp_solve(cfg, ch, {}, s2, nors, 5);
    CHECK(out.result.min_rate >= o2.result.min_rate - 1e-5);
}

TEST_CASE("Gaussian randomization respects the budget on a full-rank relaxation")
{
    const auto cfg = reference_config(0.005);
    const auto ch = channels::sample_rayleigh(4, 2, 31, cfg.delta);
    const auto start = algo::feasible_point_search(cfg, ch, 8);
    const auto out = algo::cccp_solve(cfg, ch, {}, start, {}, 2);

    LiftedSolution mixed = out.lifted;
    const double p = mixed.trace_power();
    for (auto &W : mixed.W)
        W = 0.8 * W + 0.2 * (p / (3.0 * cfg.M)) * CMat::Identity(cfg.M, cfg.M);
    mixed.W_c = 0.8 * mixed.W_c + 0.2 * (p / (3.0 * cfg.M)) * CMat::Identity(cfg.M, cfg.M);
    const auto rd = algo::gaussian_randomize(mixed, cfg, ch, 100, 9);
    CHECK_FALSE(rd.rank_one);
    CHECK(rd.candidates >= 100);
    CHECK(rd.design.power() <= cfg.P_max + 1e-9);
    const auto ev = schemes::evaluate_design(rd.design, ch, cfg);
    CHECK(ev.min_rate == Approx(rd.min_rate).epsilon(1e-12));
    CHECK(rd.feasible == ev.feasible);
}

TEST_CASE("no-rate-splitting flags keep the common stream off")
{
    const auto cfg = reference_config(0.01);
    const auto ch = channels::sample_rayleigh(4, 2, 44, cfg.delta);
    sdr::ModelFlags flags;
    flags.rate_splitting = false;
    const auto start = algo::feasible_point_search(cfg, ch, 1, flags);
    const auto out = algo::cccp_solve(cfg, ch, {}, start, flags, 1);
    CHECK(out.result.design.w_c.norm() == 0.0);
    CHECK(out.result.common_rate_sum == 0.0);
    CHECK(out.result.feasible);
}
