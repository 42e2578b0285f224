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

#include "rsbf/schemes.hpp"

#include "rsbf/channels.hpp"
#include "rsbf/fbl_math.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace rsbf::schemes
{

namespace
{

double penalty(const SystemConfig &cfg, int k, bool finite_blocklength)
{
    return finite_blocklength ? fbl::FblPenalty::finite(cfg.epsilon[static_cast<std::size_t>(k)], cfg.L).D : 0.0;
}

const CVec &signal_beam(const BeamformerSet &b, Stream stream, int k)
{
    return stream == Stream::Common ? b.w_c : b.w[static_cast<std::size_t>(k)];
}

}  // namespace

double worst_case_sinr_lb(const BeamformerSet &b, const ChannelSet &channels, const SystemConfig &cfg, Stream stream,
                          int k)
{
    const auto uk = static_cast<std::size_t>(k);
    const CVec &h = channels.h_hat[uk];
    const double delta = channels.delta[uk];
    const CVec &w = signal_beam(b, stream, k);
    const double s = std::max(0.0, std::abs(h.dot(w)) - delta * w.norm());
    double den = cfg.sigma2[uk];
    for (std::size_t j = 0; j < b.w.size(); ++j)
    {
        if (stream == Stream::Private && j == uk)
            continue;
        const double a = std::abs(h.dot(b.w[j])) + delta * b.w[j].norm();
        den += a * a;
    }
    return s * s / den;
}

double worst_case_rate_lb(const BeamformerSet &b, const ChannelSet &channels, const SystemConfig &cfg, Stream stream,
                          int k, bool finite_blocklength)
{
    return fbl::fbl_rate(worst_case_sinr_lb(b, channels, cfg, stream, k), penalty(cfg, k, finite_blocklength));
}

double exact_rate(const BeamformerSet &b, const CVec &h, double sigma2, double D, Stream stream, int k)
{
    const CVec &w = signal_beam(b, stream, k);
    const double s = std::norm(h.dot(w));
    double den = sigma2;
    for (std::size_t j = 0; j < b.w.size(); ++j)
        if (!(stream == Stream::Private && j == static_cast<std::size_t>(k)))
            den += std::norm(h.dot(b.w[j]));
    return fbl::fbl_rate(s / den, D);
}

double sampled_worst_case(const BeamformerSet &b, const ChannelSet &channels, const SystemConfig &cfg, int n_samples,
                          std::uint64_t seed, Stream stream, int k, bool finite_blocklength)
{
    if (n_samples < 1)
        throw std::invalid_argument("sampled_worst_case: n_samples must be >= 1");
    const auto uk = static_cast<std::size_t>(k);
    const double D = penalty(cfg, k, finite_blocklength);
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i)
    {
        const auto mode = i % 2 == 0 ? channels::PerturbationMode::Boundary : channels::PerturbationMode::Interior;
        const CVec dh = channels::sample_perturbation(channels.delta[uk], channels.M,
                                                      channels::derive_seed(seed, static_cast<std::uint64_t>(i)), mode);
        worst = std::min(worst, exact_rate(b, channels.h_hat[uk] + dh, cfg.sigma2[uk], D, stream, k));
    }
    return worst;
}

DesignEvaluation evaluate_design(const BeamformerSet &b, const ChannelSet &channels, const SystemConfig &cfg,
                                 bool finite_blocklength)
{
    DesignEvaluation ev;
    const int K = channels.K();
    ev.common_min = std::numeric_limits<double>::infinity();
    ev.min_rate = std::numeric_limits<double>::infinity();
    bool private_ok = true;
    for (int k = 0; k < K; ++k)
    {
        const double rc = worst_case_rate_lb(b, channels, cfg, Stream::Common, k, finite_blocklength);
        const double rp = worst_case_rate_lb(b, channels, cfg, Stream::Private, k, finite_blocklength);
        ev.common_lb.push_back(rc);
        ev.private_lb.push_back(rp);
        ev.common_min = std::min(ev.common_min, rc);
        const double ck = b.c.empty() ? 0.0 : b.c[static_cast<std::size_t>(k)];
        ev.min_rate = std::min(ev.min_rate, ck + rp);
        private_ok = private_ok && rp >= -kFeasibilityTol;
    }
    ev.feasible = b.common_rate_sum() <= ev.common_min + kFeasibilityTol && private_ok;
    return ev;
}

double ball_extreme(const CMat &A, const CVec &h_hat, double delta, bool minimum)
{
    if (!(delta >= 0.0))
        throw std::invalid_argument("ball_extreme: negative radius");
    const Eigen::SelfAdjointEigenSolver<CMat> es(A);
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    const Eigen::VectorXd b2 = (es.eigenvectors().adjoint() * h_hat).cwiseAbs2();
    const auto n = lam.size();
    const double top = lam(n - 1);
    if (top <= 0.0)
        return 0.0;
    if (delta == 0.0)
        return lam.dot(b2);
    const double bnorm = std::sqrt(b2.sum());

    // Squared step length at multiplier nu and the matching quadratic value.
    auto step2 = [&](double nu) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const double d = minimum ? lam(i) + nu : nu - lam(i);
            if (lam(i) > 0.0 && b2(i) > 0.0)
                s += d > 0.0 ? lam(i) * lam(i) * b2(i) / (d * d) : std::numeric_limits<double>::infinity();
        }
        return s;
    };
    auto value = [&](double nu) {
        double q = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const double d = minimum ? lam(i) + nu : nu - lam(i);
            if (b2(i) > 0.0 && lam(i) > 0.0)
                q += lam(i) * nu * nu * b2(i) / (d * d);
        }
        return q;
    };

    const double d2 = delta * delta;
    double lo = minimum ? 0.0 : top;
    if (step2(lo) <= d2)
    {
        if (minimum)
            return 0.0;  // the ball reaches the null space of A
        // Hard case: the remaining length goes along the top eigenvector.
        double q = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (lam(i) < top && b2(i) > 0.0)
                q += lam(i) * top * top * b2(i) / ((top - lam(i)) * (top - lam(i)));
        return q + top * (d2 - step2(top));
    }
    double hi = lo + top * bnorm / delta;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it)
    {
        const double mid = 0.5 * (lo + hi);
        (step2(mid) > d2 ? lo : hi) = mid;
    }
    return value(hi);
}

double relaxation_value(const LiftedSolution &l, const ChannelSet &channels, const SystemConfig &cfg, bool common,
                        bool finite_blocklength)
{
    const int K = channels.K();
    const int M = channels.M;
    CMat all = CMat::Zero(M, M);
    for (const auto &W : l.W)
        all += W;
    std::vector<double> rp(static_cast<std::size_t>(K));
    double rc = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k)
    {
        const auto uk = static_cast<std::size_t>(k);
        const CVec &h = channels.h_hat[uk];
        const double delta = channels.delta[uk];
        const double s2 = cfg.sigma2[uk];
        const double D = penalty(cfg, k, finite_blocklength);
        const CMat others = all - l.W[uk];
        const double sig_p = ball_extreme(l.W[uk], h, delta, true);
        rp[uk] = fbl::fbl_rate(sig_p / (ball_extreme(others, h, delta, false) + s2), D);
        if (common)
        {
            const double sig_c = ball_extreme(l.W_c, h, delta, true);
            rc = std::min(rc, fbl::fbl_rate(sig_c / (ball_extreme(all, h, delta, false) + s2), D));
        }
    }
    const double floor = *std::min_element(rp.begin(), rp.end());
    if (!common || !(rc > 0.0))
        return floor;
    // Largest t with sum_k (t - rp_k)_+ <= rc.
    std::vector<double> sorted = rp;
    std::sort(sorted.begin(), sorted.end());
    double used = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i)
    {
        const double next = i + 1 < sorted.size() ? sorted[i + 1] : std::numeric_limits<double>::infinity();
        const double t = sorted[i] + (rc - used) / static_cast<double>(i + 1);
        if (t <= next)
            return t;
        used += static_cast<double>(i + 1) * (next - sorted[i]);
    }
    return floor;
}

sdr::ModelFlags scheme_flags(SchemeId id)
{
    sdr::ModelFlags f;
    f.rate_splitting = id != SchemeId::RbNoRsFbl;
    f.finite_blocklength = id != SchemeId::RbRsIfbl;
    return f;
}

namespace
{

bool improves(const SchemeResult &cand, const SchemeResult &best, bool have)
{
    if (!have)
        return true;
    if (cand.feasible != best.feasible)
        return cand.feasible;
    return cand.min_rate > best.min_rate;
}

// Gives a design without a common stream a small common beamformer so it can seed
// the rate-splitting pipeline.
BeamformerSet with_common_seed(BeamformerSet b, const ChannelSet &channels)
{
    if (b.w_c.size() == channels.M && b.w_c.norm() > 0.0)
        return b;
    CVec dir = CVec::Zero(channels.M);
    for (const auto &h : channels.h_hat)
        dir += h / h.norm();
    if (dir.norm() == 0.0)
        dir = channels.h_hat.front();
    const double p = b.power();
    b.w_c = dir / dir.norm() * std::sqrt(0.01 * p);
    for (auto &w : b.w)
        w *= std::sqrt(0.99);
    b.c.assign(b.w.size(), 0.0);
    return b;
}

}  // namespace

SchemeResult run_scheme(SchemeId id, const SystemConfig &cfg, const ChannelSet &channels,
                        const SchemeSettings &settings, std::uint64_t seed)
{
    const auto t0 = std::chrono::steady_clock::now();
    const sdr::ModelFlags flags = scheme_flags(id);
    const bool nonrobust = id == SchemeId::NoRbRsFbl;
    const ChannelSet design_channels = nonrobust ? channels::with_radius(channels, 0.0) : channels;
    SystemConfig design_cfg = cfg;
    design_cfg.delta = design_channels.delta;

    SchemeResult best;
    bool have = false;
    std::vector<RunTrace> runs;

    auto consider = [&](SchemeResult r) {
        if (improves(r, best, have))
        {
            best = std::move(r);
            have = true;
        }
    };

    for (int s = 0; s < std::max(1, settings.n_starts); ++s)
    {
        const auto start_seed = channels::derive_seed(seed, static_cast<std::uint64_t>(s));
        try
        {
            auto start = algo::feasible_point_search(design_cfg, design_channels, start_seed, flags, settings.cccp);
            start.label = "search " + std::to_string(s);
            auto out = algo::cccp_solve(design_cfg, design_channels, settings.cccp, start, flags,
                                        channels::derive_seed(start_seed, 1));
            runs.push_back(out.trace);
            consider(std::move(out.result));
        }
        catch (const algo::InfeasibleStart &e)
        {
            RunTrace t;
            t.start_label = "search " + std::to_string(s) + " failed: " + e.what();
            runs.push_back(std::move(t));
        }
    }

    for (std::size_t e = 0; e < settings.extra_starts.size(); ++e)
    {
        const BeamformerSet &given = settings.extra_starts[e];
        if (static_cast<int>(given.w.size()) != cfg.K)
            continue;
        const std::string label = "given " + std::to_string(e);

        // The design itself is a candidate; so is the CCCP run started from it.
        BeamformerSet as_is = given;
        if (!flags.rate_splitting)
        {
            as_is.w_c = CVec::Zero(cfg.M);
            as_is.c.assign(static_cast<std::size_t>(cfg.K), 0.0);
        }
        if (as_is.w_c.size() != cfg.M)
            as_is.w_c = CVec::Zero(cfg.M);
        if (as_is.c.size() != static_cast<std::size_t>(cfg.K))
            as_is.c.assign(static_cast<std::size_t>(cfg.K), 0.0);
        const auto ev = evaluate_design(as_is, design_channels, design_cfg, flags.finite_blocklength);
        if (ev.feasible && as_is.power() <= cfg.P_max * (1.0 + 1e-12))
        {
            SchemeResult r;
            r.design = as_is;
            r.min_rate = ev.min_rate;
            r.common_rate_sum = as_is.common_rate_sum();
            r.feasible = true;
            r.rank_one = true;
            r.objective_trace = {ev.min_rate};
            r.relaxation_objective = ev.min_rate;
            consider(std::move(r));
        }

        try
        {
            BeamformerSet seed_design = flags.rate_splitting ? with_common_seed(given, design_channels) : given;
            auto start = algo::start_from_beamformers(design_cfg, design_channels, seed_design, flags, label);
            auto out = algo::cccp_solve(design_cfg, design_channels, settings.cccp, start, flags,
                                        channels::derive_seed(seed, 1000 + e));
            runs.push_back(out.trace);
            consider(std::move(out.result));
        }
        catch (const sdr::DegeneratePoint &)
        {
        }
    }

    if (!have)
    {
        best.feasible = false;
        best.min_rate = 0.0;
        best.design.w_c = CVec::Zero(cfg.M);
        best.design.w.assign(static_cast<std::size_t>(cfg.K), CVec::Zero(cfg.M));
        best.design.c.assign(static_cast<std::size_t>(cfg.K), 0.0);
    }
    else if (nonrobust)
    {
        const auto ev = evaluate_design(best.design, channels, cfg, flags.finite_blocklength);
        best.min_rate = ev.min_rate;
        best.feasible = ev.feasible;
    }
    best.scheme_id = id;
    best.common_rate_sum = best.design.common_rate_sum();
    best.runs = std::move(runs);
    best.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return best;
}

FeasibilityCount feasibility_count(SchemeId id, const SystemConfig &cfg, int n_realizations, std::uint64_t seed,
                                   const SchemeSettings &settings)
{
    if (n_realizations < 1)
        throw std::invalid_argument("feasibility_count: n_realizations must be >= 1");
    FeasibilityCount out;
    for (int r = 0; r < n_realizations; ++r)
    {
        const auto rs = channels::derive_seed(seed, static_cast<std::uint64_t>(r));
        const ChannelSet ch = channels::sample_rayleigh(cfg.M, cfg.K, rs, cfg.delta);
        auto res = run_scheme(id, cfg, ch, settings, rs);
        out.feasible += res.feasible ? 1 : 0;
        ++out.total;
        out.results.push_back(std::move(res));
    }
    return out;
}

}  // namespace rsbf::schemes
