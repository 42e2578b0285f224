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
#include "rsbf/fbl_math.hpp"
#include "rsbf/schemes.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace rsbf::algo
{

using schemes::Stream;

void CccpSettings::check() const
{
    if (!(tol > 0.0))
        throw std::invalid_argument("CccpSettings: tol must be positive");
    if (max_iters < 1)
        throw std::invalid_argument("CccpSettings: max_iters must be >= 1");
    if (randomization_draws < 1)
        throw std::invalid_argument("CccpSettings: randomization_draws must be >= 1");
    if (!(rank_one_ratio_threshold >= 0.0))
        throw std::invalid_argument("CccpSettings: rank_one_ratio_threshold must be nonnegative");
    if (!(c0_cap >= 0.0) || init_retries < 0)
        throw std::invalid_argument("CccpSettings: invalid initialization settings");
    if (!(momentum_cap >= 0.0) || !(momentum_cap < 1.0))
        throw std::invalid_argument("CccpSettings: momentum_cap must lie in [0, 1)");
}

namespace
{

SystemConfig scaled_config(SystemConfig cfg, double s)
{
    cfg.P_max *= s;
    for (auto &v : cfg.sigma2)
        v *= s;
    return cfg;
}

sdr::ExpansionPoint scaled_point(sdr::ExpansionPoint p, double s)
{
    const double ls = std::log(s);
    for (auto *v : {&p.x_c, &p.y_c, &p.x_p, &p.y_p})
        for (auto &e : *v)
            e += ls;
    return p;
}

LiftedSolution scaled_lifted(LiftedSolution l, double s)
{
    const double ls = std::log(s);
    l.W_c *= s;
    for (auto &W : l.W)
        W *= s;
    for (auto *v : {&l.t_c, &l.q_c, &l.t_p, &l.q_p, &l.lambda_c, &l.lambda_bar_c, &l.lambda_p, &l.lambda_bar_p})
        for (auto &e : *v)
            e *= s;
    for (auto *v : {&l.x_c, &l.y_c, &l.x_p, &l.y_p})
        for (auto &e : *v)
            e += ls;
    return l;
}

double csum(const std::vector<double> &c) { return std::accumulate(c.begin(), c.end(), 0.0); }

void scale_to_budget(BeamformerSet &b, double P)
{
    const double p = b.power();
    if (p > 0.0)
    {
        const double a = std::sqrt(P / p);
        b.w_c *= a;
        for (auto &w : b.w)
            w *= a;
    }
}

bool acceptable(conic::SolveStatus s) { return s == conic::SolveStatus::Optimal; }

// Lifted point of a rank-one start (physical units); multipliers are left at zero
// and recovered by the solver's phase I.
LiftedSolution lifted_from_start(const SystemConfig &cfg, const FeasibleStart &start, const sdr::ModelFlags &flags)
{
    const auto &b = start.beamformers;
    const auto &p = start.point;
    const std::vector<double> D = fbl::penalties(cfg, flags.finite_blocklength);
    LiftedSolution l;
    l.W_c = b.w_c * b.w_c.adjoint();
    for (const auto &w : b.w)
        l.W.push_back(w * w.adjoint());
    l.c = b.c;
    l.beta_c = p.beta_c;
    l.x_c = p.x_c;
    l.y_c = p.y_c;
    for (std::size_t k = 0; k < p.x_c.size(); ++k)
    {
        l.t_c.push_back(std::exp(p.x_c[k]));
        l.q_c.push_back(std::exp(p.y_c[k]));
    }
    l.beta_p = p.beta_p;
    l.x_p = p.x_p;
    l.y_p = p.y_p;
    l.t = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < p.x_p.size(); ++k)
    {
        l.t_p.push_back(std::exp(p.x_p[k]));
        l.q_p.push_back(std::exp(p.y_p[k]));
        const double ck = flags.rate_splitting ? b.c[k] : 0.0;
        l.t = std::min(l.t, ck + fbl::fbl_rate(p.beta_p[k], D[k]));
    }
    const std::size_t K = b.w.size();
    l.lambda_c.assign(flags.rate_splitting ? K : 0, 0.0);
    l.lambda_bar_c.assign(flags.rate_splitting ? K : 0, 0.0);
    l.lambda_p.assign(K, 0.0);
    l.lambda_bar_p.assign(K, 0.0);
    return l;
}

// Eigen-decomposition with the spectrum clipped at zero.
struct Spectrum
{
    CMat V;
    Eigen::VectorXd lambda;  // ascending
};

Spectrum spectrum(const CMat &W)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(W));
    return {es.eigenvectors(), es.eigenvalues().cwiseMax(0.0)};
}

CVec draw(const Spectrum &s, std::mt19937_64 &rng)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    CVec z(s.lambda.size());
    for (Eigen::Index i = 0; i < z.size(); ++i)
    {
        const double re = n(rng);
        const double im = n(rng);
        z(i) = cdouble(re, im) * std::sqrt(s.lambda(i));
    }
    return s.V * z;
}

CVec principal(const Spectrum &s)
{
    const auto last = s.lambda.size() - 1;
    return s.V.col(last) * std::sqrt(s.lambda(last));
}

// Largest common rate that may be dropped with the common stream without flagging
// the design as undecodable.
constexpr double kCommonLossTol = 1e-6;

struct Finalized
{
    BeamformerSet design;
    schemes::DesignEvaluation eval;
    bool common_ok = true;
};

// Shrinks c to the certified common rate and switches off streams whose certified
// rate is negative.
Finalized finalize(BeamformerSet b, const SystemConfig &cfg, const ChannelSet &channels, bool common,
                   bool finite_blocklength)
{
    Finalized f;
    const int K = cfg.K;
    if (!common)
    {
        b.w_c = CVec::Zero(cfg.M);
        b.c.assign(static_cast<std::size_t>(K), 0.0);
    }
    auto ev = schemes::evaluate_design(b, channels, cfg, finite_blocklength);
    for (int k = 0; k < K; ++k)
        if (ev.private_lb[static_cast<std::size_t>(k)] < 0.0)
            b.w[static_cast<std::size_t>(k)].setZero();
    ev = schemes::evaluate_design(b, channels, cfg, finite_blocklength);
    if (common)
    {
        const double s = csum(b.c);
        if (ev.common_min < 0.0)
        {
            f.common_ok = !(s > kCommonLossTol);
            b.w_c.setZero();
            b.c.assign(static_cast<std::size_t>(K), 0.0);
        }
        else if (s > ev.common_min)
        {
            const double a = ev.common_min / s;
            for (auto &c : b.c)
                c *= a;
        }
        ev = schemes::evaluate_design(b, channels, cfg, finite_blocklength);
    }
    f.design = std::move(b);
    f.eval = std::move(ev);
    return f;
}

bool better(const Finalized &a, const Finalized &b)
{
    const bool fa = a.common_ok && a.eval.feasible, fb = b.common_ok && b.eval.feasible;
    if (fa != fb)
        return fa;
    return a.eval.min_rate > b.eval.min_rate;
}

// Expansion point at the tight auxiliary values of a subproblem optimum:
// x = ln t, y = ln q and beta = e^(x - y) wherever the rate is increasing in beta.
// The point stays feasible for the exact constraints at the same objective.
sdr::ExpansionPoint tightened_expansion(const LiftedSolution &l, const std::vector<double> &D)
{
    sdr::ExpansionPoint p = sdr::expansion_from_lifted(l);
    auto tighten = [](std::vector<double> &beta, std::vector<double> &x, std::vector<double> &y,
                      const std::vector<double> &t, const std::vector<double> &q, const std::vector<double> &D) {
        for (std::size_t k = 0; k < beta.size(); ++k)
        {
            if (!(t[k] > 0.0) || !(q[k] > 0.0))
                continue;
            const double xt = std::max(x[k], std::log(t[k]));
            const double yt = std::min(y[k], std::log(q[k]));
            x[k] = xt;
            y[k] = yt;
            if (beta[k] >= fbl::stationary_point(D[k]))
                beta[k] = std::max(beta[k], std::exp(xt - yt));
        }
    };
    tighten(p.beta_c, p.x_c, p.y_c, l.t_c, l.q_c, D);
    tighten(p.beta_p, p.x_p, p.y_p, l.t_p, l.q_p, D);
    return p;
}

// p + w (p - prev), with betas kept above the minorant floor.
sdr::ExpansionPoint extrapolated(const sdr::ExpansionPoint &p, const sdr::ExpansionPoint &prev, double w)
{
    sdr::ExpansionPoint e = p;
    auto step = [w](std::vector<double> &v, const std::vector<double> &a, const std::vector<double> &b) {
        for (std::size_t k = 0; k < v.size(); ++k)
            v[k] = a[k] + w * (a[k] - b[k]);
    };
    step(e.beta_c, p.beta_c, prev.beta_c);
    step(e.x_c, p.x_c, prev.x_c);
    step(e.y_c, p.y_c, prev.y_c);
    step(e.beta_p, p.beta_p, prev.beta_p);
    step(e.x_p, p.x_p, prev.x_p);
    step(e.y_p, p.y_p, prev.y_p);
    for (auto *beta : {&e.beta_c, &e.beta_p})
        for (double &b : *beta)
            b = std::max(b, sdr::kBetaFloor);
    return e;
}

}  // namespace

sdr::ExpansionPoint expansion_from_beamformers(const SystemConfig &cfg, const ChannelSet &channels,
                                               const BeamformerSet &b, const sdr::ModelFlags &flags)
{
    const int K = cfg.K;
    sdr::ExpansionPoint p;
    auto signal = [&](const CVec &w, int k) {
        const auto uk = static_cast<std::size_t>(k);
        const double s = std::abs(channels.h_hat[uk].dot(w)) - channels.delta[uk] * w.norm();
        if (!(s > 0.0))
            throw sdr::DegeneratePoint("expansion point: |h^H w| <= delta ||w|| for user " + std::to_string(k));
        return 2.0 * std::log(s);
    };
    auto interference = [&](int k, int skip) {
        const auto uk = static_cast<std::size_t>(k);
        double sum = cfg.sigma2[uk];
        for (int j = 0; j < K; ++j)
            if (j != skip)
            {
                const CVec &w = b.w[static_cast<std::size_t>(j)];
                const double a = std::abs(channels.h_hat[uk].dot(w)) + channels.delta[uk] * w.norm();
                sum += a * a;
            }
        return std::log(sum);
    };
    for (int k = 0; k < K; ++k)
    {
        if (flags.rate_splitting)
        {
            const double x = signal(b.w_c, k), y = interference(k, -1);
            p.x_c.push_back(x);
            p.y_c.push_back(y);
            p.beta_c.push_back(std::exp(x - y));
        }
        const double x = signal(b.w[static_cast<std::size_t>(k)], k), y = interference(k, k);
        p.x_p.push_back(x);
        p.y_p.push_back(y);
        p.beta_p.push_back(std::exp(x - y));
    }
    return p;
}

FeasibleStart start_from_beamformers(const SystemConfig &cfg, const ChannelSet &channels, BeamformerSet b,
                                     const sdr::ModelFlags &flags, std::string label)
{
    const int K = cfg.K;
    if (static_cast<int>(b.w.size()) != K)
        throw std::invalid_argument("start_from_beamformers: wrong number of private beamformers");
    if (!flags.rate_splitting)
    {
        b.w_c = CVec::Zero(cfg.M);
        b.c.assign(static_cast<std::size_t>(K), 0.0);
    }
    if (b.c.size() != static_cast<std::size_t>(K))
        b.c.assign(static_cast<std::size_t>(K), 0.0);
    scale_to_budget(b, cfg.P_max);
    if (flags.rate_splitting)
    {
        const auto ev = schemes::evaluate_design(b, channels, cfg, flags.finite_blocklength);
        const double s = csum(b.c);
        if (ev.common_min < 0.0)
            throw sdr::DegeneratePoint("start: common stream not decodable");
        if (s > ev.common_min)
            for (auto &c : b.c)
                c *= ev.common_min / s;
    }
    FeasibleStart start;
    start.point = expansion_from_beamformers(cfg, channels, b, flags);
    start.beamformers = std::move(b);
    start.label = std::move(label);
    return start;
}

RankOne extract_rank_one(const CMat &W)
{
    const Spectrum s = spectrum(W);
    const auto n = s.lambda.size();
    RankOne r;
    r.w = principal(s);
    const double l1 = s.lambda(n - 1);
    r.ratio = (l1 > 0.0 && n > 1) ? s.lambda(n - 2) / l1 : 0.0;
    return r;
}

FeasibleStart feasible_point_search(const SystemConfig &cfg, const ChannelSet &channels, std::uint64_t seed,
                                    const sdr::ModelFlags &flags, const CccpSettings &settings)
{
    settings.check();
    validate_config(cfg);
    const int K = cfg.K, M = cfg.M;
    const bool common = flags.rate_splitting;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> c0(static_cast<std::size_t>(K), 0.0);
    if (common)
        for (auto &c : c0)
            c = settings.c0_cap * u(rng);

    const std::vector<double> D = fbl::penalties(cfg, flags.finite_blocklength);
    const double scale = 1.0 / cfg.P_max;
    const SystemConfig scfg = scaled_config(cfg, scale);
    std::string last;

    for (int attempt = 0; attempt <= settings.init_retries; ++attempt)
    {
        std::vector<double> a_c, a_p;
        for (int k = 0; k < K; ++k)
        {
            if (common)
                a_c.push_back(fbl::target_sinr_bisect(csum(c0), D[static_cast<std::size_t>(k)]));
            a_p.push_back(fbl::target_sinr_bisect(0.0, D[static_cast<std::size_t>(k)]));
        }
        const auto sp = sdr::assemble_feasibility(scfg, channels, c0, a_c, a_p, flags);
        const auto out = conic::solve(sp.problem, settings.solver);
        const bool solved = out.status == conic::SolveStatus::Optimal || out.status == conic::SolveStatus::Inaccurate;
        const double margin = solved ? out.primal[static_cast<std::size_t>(sp.layout.margin)] : -1.0;
        if (!solved || margin < 0.0)
        {
            last = "initialization program " + std::string(conic::to_string(out.status)) +
                   ", margin " + std::to_string(margin / scale);
            for (auto &c : c0)
                c *= 0.5;
            continue;
        }

        const LiftedSolution lifted = scaled_lifted(sdr::unpack(sp.layout, out.primal), 1.0 / scale);
        Spectrum sc;
        if (common)
            sc = spectrum(lifted.W_c);
        std::vector<Spectrum> sp_k;
        for (const auto &W : lifted.W)
            sp_k.push_back(spectrum(W));

        // Candidates meeting every target rank by certified private rate, the others
        // by their worst target ratio.
        auto score = [&](const BeamformerSet &b) {
            double s = std::numeric_limits<double>::infinity();
            for (int k = 0; k < K; ++k)
            {
                if (common)
                    s = std::min(s, schemes::worst_case_sinr_lb(b, channels, cfg, Stream::Common, k) /
                                        a_c[static_cast<std::size_t>(k)]);
                s = std::min(s, schemes::worst_case_sinr_lb(b, channels, cfg, Stream::Private, k) /
                                    a_p[static_cast<std::size_t>(k)]);
            }
            if (s < 1.0)
                return s;
            double r = std::numeric_limits<double>::infinity();
            for (int k = 0; k < K; ++k)
                r = std::min(r, schemes::worst_case_rate_lb(b, channels, cfg, Stream::Private, k,
                                                            flags.finite_blocklength));
            return 1.0 + std::max(0.0, r);
        };

        std::mt19937_64 draw_rng(channels::derive_seed(seed, 7919 + static_cast<std::uint64_t>(attempt)));
        BeamformerSet best;
        double best_score = -1.0;
        for (int d = 0; d <= settings.randomization_draws; ++d)
        {
            BeamformerSet b;
            b.w_c = common ? (d == 0 ? principal(sc) : draw(sc, draw_rng)) : CVec::Zero(M);
            for (const auto &s : sp_k)
                b.w.push_back(d == 0 ? principal(s) : draw(s, draw_rng));
            b.c = c0;
            scale_to_budget(b, cfg.P_max);
            const double s = score(b);
            if (s > best_score)
            {
                best_score = s;
                best = std::move(b);
            }
        }
        try
        {
            FeasibleStart start = start_from_beamformers(cfg, channels, best, flags, "search");
            start.attempts = attempt + 1;
            start.margin = margin / scale;
            return start;
        }
        catch (const sdr::DegeneratePoint &e)
        {
            last = e.what();
        }
        for (auto &c : c0)
            c *= 0.5;
    }
    throw InfeasibleStart("no feasible initial point after " + std::to_string(settings.init_retries + 1) +
                          " attempts: " + last);
}

RandomizedDesign gaussian_randomize(const LiftedSolution &lifted, const SystemConfig &cfg, const ChannelSet &channels,
                                    int draws, std::uint64_t seed, const sdr::ModelFlags &flags,
                                    double rank_one_ratio_threshold)
{
    const bool common = flags.rate_splitting;
    const int M = cfg.M;
    RandomizedDesign out;
    out.rank_one = true;
    Spectrum sc;
    if (common)
    {
        sc = spectrum(lifted.W_c);
        out.rank_one = extract_rank_one(lifted.W_c).ratio <= rank_one_ratio_threshold;
    }
    std::vector<Spectrum> sp;
    for (const auto &W : lifted.W)
    {
        sp.push_back(spectrum(W));
        out.rank_one = out.rank_one && extract_rank_one(W).ratio <= rank_one_ratio_threshold;
    }

    std::mt19937_64 rng(seed);
    Finalized best;
    bool have = false;
    const int n = out.rank_one ? 0 : draws;
    for (int d = 0; d <= n; ++d)
    {
        BeamformerSet b;
        b.w_c = common ? (d == 0 ? principal(sc) : draw(sc, rng)) : CVec::Zero(M);
        for (const auto &s : sp)
            b.w.push_back(d == 0 ? principal(s) : draw(s, rng));
        b.c = lifted.c;
        scale_to_budget(b, cfg.P_max);
        Finalized f = finalize(std::move(b), cfg, channels, common, flags.finite_blocklength);
        ++out.candidates;
        if (!have || better(f, best))
        {
            best = std::move(f);
            have = true;
        }
    }
    out.design = std::move(best.design);
    out.min_rate = best.eval.min_rate;
    out.feasible = best.common_ok && best.eval.feasible;
    return out;
}

ScaledSolve solve_subproblem(const SystemConfig &cfg, const ChannelSet &channels, const sdr::ExpansionPoint &point,
                             const sdr::ModelFlags &flags, double scale, const LiftedSolution *warm,
                             const conic::SolverSettings &solver)
{
    const auto sp = sdr::assemble_subproblem(scaled_config(cfg, scale), channels, scaled_point(point, scale), flags);
    conic::SolverSettings settings = solver;
    if (warm)
        settings.initial_point = sdr::pack(sp.layout, sp.problem.n_vars, scaled_lifted(*warm, scale));
    ScaledSolve r;
    r.outcome = conic::solve(sp.problem, settings);
    if (!r.outcome.primal.empty())
        r.lifted = scaled_lifted(sdr::unpack(sp.layout, r.outcome.primal), 1.0 / scale);
    return r;
}

CccpOutcome cccp_solve(const SystemConfig &cfg, const ChannelSet &channels, const CccpSettings &settings,
                       const FeasibleStart &start, const sdr::ModelFlags &flags, std::uint64_t seed)
{
    settings.check();
    const auto t0 = std::chrono::steady_clock::now();
    const double scale = 1.0 / cfg.P_max;
    const std::vector<double> D = fbl::penalties(cfg, flags.finite_blocklength);

    CccpOutcome out;
    LiftedSolution cur = lifted_from_start(cfg, start, flags);
    double t_prev = cur.t;
    out.trace.objective_trace.push_back(t_prev);
    out.trace.start_label = start.label;
    sdr::ExpansionPoint point = start.point;
    sdr::ModelFlags active = flags;
    bool solved_any = false;

    // One subproblem solve at an expansion point, retried at a coarser scale when inaccurate.
    auto attempt = [&](const sdr::ExpansionPoint &at, ScaledSolve &r) -> bool {
        try
        {
            r = solve_subproblem(cfg, channels, at, active, scale, &cur, settings.solver);
            if (!acceptable(r.outcome.status) && r.outcome.status != conic::SolveStatus::Infeasible)
            {
                auto retry = solve_subproblem(cfg, channels, at, active, 10.0 * scale, &cur, settings.solver);
                if (acceptable(retry.outcome.status) || retry.outcome.status == conic::SolveStatus::Inaccurate)
                    r = std::move(retry);
            }
            return acceptable(r.outcome.status) || r.outcome.status == conic::SolveStatus::Inaccurate;
        }
        catch (const sdr::DegeneratePoint &)
        {
            return false;
        }
    };

    // CCCP iterations from `point` until the tolerance test, a solver failure or the budget.
    auto iterate = [&]() {
        sdr::ExpansionPoint previous_point = point;
        int accelerated = 0;
        bool moved = false;
        while (out.trace.iterations < settings.max_iters)
        {
            // Every minorant is a global tangent, so any expansion point gives a conservative
            // subproblem. The extrapolated point is kept only when it beats the standard step's
            // acceptance test; otherwise the standard point is solved as well.
            ScaledSolve r;
            bool ok = false;
            const double w = std::min(settings.momentum_cap, accelerated / (accelerated + 3.0));
            if (w > 0.0)
                ok = attempt(extrapolated(point, previous_point, w), r) && r.lifted.t - t_prev > settings.tol;
            if (ok)
                ++accelerated;
            else
            {
                ok = attempt(point, r);
                accelerated = moved ? 1 : 0;
            }
            if (!ok)
                return;
            ++out.trace.iterations;
            const double t_new = r.lifted.t;
            if (!(t_new >= t_prev))
            {
                // The incumbent is optimal for its own linearization up to solver accuracy.
                out.trace.objective_trace.push_back(t_prev);
                out.trace.converged = true;
                return;
            }
            out.trace.objective_trace.push_back(t_new);
            cur = std::move(r.lifted);
            solved_any = moved = true;
            previous_point = point;
            point = tightened_expansion(cur, D);
            const bool done = t_new - t_prev <= settings.tol;
            t_prev = t_new;
            if (done)
            {
                out.trace.converged = true;
                return;
            }
        }
    };

    iterate();

    // A common stream carrying no rate is held at the zero crossing of its FBL rate,
    // a component of the feasible set that cannot reach W_c = 0. Dropping it keeps the
    // private part feasible at the same expansion point, so the iteration continues
    // monotonically on the private-only model.
    if (solved_any && out.trace.converged && active.rate_splitting && csum(cur.c) <= kCommonLossTol &&
        cur.W_c.trace().real() > 0.0)
    {
        active.rate_splitting = false;
        cur.W_c.setZero();
        cur.c.assign(cur.c.size(), 0.0);
        for (auto *v : {&cur.beta_c, &cur.x_c, &cur.y_c, &cur.t_c, &cur.q_c, &cur.lambda_c, &cur.lambda_bar_c})
            v->clear();
        point = tightened_expansion(cur, D);
        out.trace.converged = false;
        out.trace.common_dropped = true;
        iterate();
    }

    Finalized start_design =
        finalize(start.beamformers, cfg, channels, flags.rate_splitting, flags.finite_blocklength);
    RandomizedDesign rd;
    if (solved_any)
        rd = gaussian_randomize(cur, cfg, channels, settings.randomization_draws, seed, active,
                                settings.rank_one_ratio_threshold);
    if (solved_any)
    {
        out.trace.randomized = true;
        out.trace.rank_one = rd.rank_one;
        out.trace.relaxation_objective = t_prev;
        out.trace.randomized_min_rate = rd.min_rate;
        out.trace.randomized_power = rd.design.power();
    }
    const bool rd_ok = solved_any && rd.feasible;
    const bool start_ok = start_design.common_ok && start_design.eval.feasible;

    SchemeResult &res = out.result;
    if (solved_any && (rd_ok || !start_ok) && (rd_ok != start_ok || rd.min_rate >= start_design.eval.min_rate))
    {
        res.design = rd.design;
        res.min_rate = rd.min_rate;
        res.feasible = rd.feasible;
        res.rank_one = rd.rank_one;
    }
    else
    {
        res.design = start_design.design;
        res.min_rate = start_design.eval.min_rate;
        res.feasible = start_ok;
        res.rank_one = !solved_any || rd.rank_one;
    }
    res.common_rate_sum = res.design.common_rate_sum();
    res.iterations = out.trace.iterations;
    res.objective_trace = out.trace.objective_trace;
    res.relaxation_objective = t_prev;
    res.runs = {out.trace};
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.lifted = std::move(cur);
    return out;
}

}  // namespace rsbf::algo
