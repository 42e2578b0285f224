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

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace rsbf;
using Catch::Approx;

TEST_CASE("q_inv matches an independent Newton inversion")
{
    for (double eps : {1e-9, 1e-7, 1e-5, 1e-3, 0.01, 0.1, 0.3, 0.49})
        CHECK(fbl::q_inv(eps) == Approx(oracle::q_inv(eps)).epsilon(1e-11));
    CHECK(fbl::q_inv(0.5) == Approx(0.0).margin(1e-12));
    CHECK(fbl::q_inv(1e-5) == Approx(4.26489079392).epsilon(1e-11));
    CHECK(fbl::q_func(fbl::q_inv(1e-4)) == Approx(1e-4).epsilon(1e-10));
    CHECK_THROWS_AS(fbl::q_inv(0.0), std::domain_error);
    CHECK_THROWS_AS(fbl::q_inv(1.0), std::domain_error);
}

TEST_CASE("penalty and rate at a reference point")
{
    const auto p = fbl::FblPenalty::finite(1e-5, 1000);
    CHECK(p.D == Approx(oracle::penalty(1e-5, 1000)).epsilon(1e-11));
    CHECK(p.D == Approx(0.1348676888).epsilon(1e-9));
    CHECK(fbl::fbl_rate(10.0, p) == Approx(2.263586045).epsilon(1e-9));
    CHECK(fbl::FblPenalty::infinite().D == 0.0);
    CHECK_THROWS_AS(fbl::FblPenalty::finite(1e-5, 0), std::domain_error);
}

TEST_CASE("rate reductions and Shannon dominance")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lxi(-6.0, 6.0), ld(0.0, 0.5);
    for (int i = 0; i < 1000; ++i)
    {
        const double xi = std::pow(10.0, lxi(rng));
        const double D = ld(rng);
        CHECK(fbl::fbl_rate(xi, 0.0) == std::log1p(xi));
        CHECK(fbl::fbl_rate(0.0, D) == 0.0);
        CHECK(fbl::fbl_rate(xi, D) <= std::log1p(xi) + 1e-12);
        CHECK(fbl::fbl_rate(xi, D) == Approx(static_cast<double>(oracle::rate(xi, D))).margin(1e-12));
    }
    CHECK_THROWS_AS(fbl::fbl_rate(-1e-3, 0.1), std::domain_error);
}

TEST_CASE("dispersion")
{
    CHECK(fbl::dispersion(0.0) == 0.0);
    CHECK(fbl::dispersion(1.0) == Approx(0.75));
    CHECK_THROWS_AS(fbl::dispersion(-0.5), std::domain_error);
}

TEST_CASE("stationary point is the minimiser of the rate")
{
    for (double D : {0.01, 0.05, 0.1348676888, 0.3})
        CHECK(fbl::stationary_point(D) == Approx(oracle::stationary_point(D)).epsilon(1e-7));
    CHECK(fbl::stationary_point(0.1348676888) == Approx(0.008895).epsilon(1e-3));
    CHECK(fbl::stationary_point(0.0) == 0.0);
}

TEST_CASE("bisection inversion agrees with the Newton oracle")
{
    for (int L : {200, 1000, 3000})
        for (double eps : {1e-5, 1e-3})
            for (double r : {0.0, 0.5, 1.0, 2.0})
            {
                const double D = oracle::penalty(eps, L);
                const double got = fbl::target_sinr_bisect(r, D);
                CHECK(got == Approx(oracle::target_sinr(r, D)).epsilon(1e-9));
                CHECK(fbl::fbl_rate(got, D) == Approx(r).margin(1e-9));
                CHECK(got >= fbl::stationary_point(D));
            }
    const double D = oracle::penalty(1e-5, 1000);
    CHECK(fbl::target_sinr_bisect(1.0, D) == Approx(2.0882400010614).epsilon(1e-10));
    CHECK(fbl::target_sinr_bisect(0.0, D) == Approx(0.03575436720256222).epsilon(1e-8));
    CHECK(fbl::target_sinr_bisect(1.0, 0.0) == Approx(std::expm1(1.0)).epsilon(1e-10));
    CHECK_THROWS_AS(fbl::target_sinr_bisect(-0.1, D), std::domain_error);
}

TEST_CASE("series inversion matches wherever it converges")
{
    int converged = 0;
    for (int L : {200, 1000, 3000})
        for (double eps : {1e-5, 1e-3})
            for (double r : {0.5, 1.0, 2.0, 4.0})
            {
                const double D = oracle::penalty(eps, L);
                const auto s = fbl::target_sinr_series(r, D);
                if (!s.converged)
                    continue;
                ++converged;
                CHECK(s.value == Approx(oracle::target_sinr(r, D)).epsilon(1e-6));
            }
    CHECK(converged > 0);
    const auto shannon = fbl::target_sinr_series(1.5, 0.0);
    CHECK(shannon.converged);
    CHECK(shannon.value == Approx(std::expm1(1.5)).epsilon(1e-14));
}

TEST_CASE("penalties per user")
{
    auto cfg = SystemConfig::uniform(4, 2, 1000, 1e-5, 1000.0, 0.01, 0.0);
    cfg.epsilon[1] = 1e-3;
    const auto D = fbl::penalties(cfg);
    REQUIRE(D.size() == 2);
    CHECK(D[0] == Approx(oracle::penalty(1e-5, 1000)).epsilon(1e-11));
    CHECK(D[1] == Approx(oracle::penalty(1e-3, 1000)).epsilon(1e-11));
    CHECK(fbl::penalties(cfg, false) == std::vector<double>{0.0, 0.0});
}
