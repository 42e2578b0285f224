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

// Acceptance suite. Each criterion prints its measurements followed by one line
//   criterion N: PASS|FAIL <summary>
// Usage: acceptance [--criterion N]... [--state-dir DIR]   (no --criterion runs all ten)

#include "rsbf/channels.hpp"
#include "rsbf/experiment.hpp"
#include "rsbf/fbl_math.hpp"
#include "rsbf/schemes.hpp"

#include "oracles.hpp"
#include "sprocedure_check.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace ex = rsbf::experiment;
using nlohmann::json;
using rsbf::SchemeId;

namespace
{

std::filesystem::path g_state_dir = "acceptance_state";
constexpr std::uint64_t kSeed = 2024;

struct Verdict
{
    bool pass = true;
    std::string summary;

    void require(bool ok, const std::string &what)
    {
        if (!ok)
        {
            pass = false;
            std::printf("  violated: %s\n", what.c_str());
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char *f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---- shared experiment plumbing ------------------------------------------

json reference_system(double delta)
{
    return {{"M", 4}, {"K", 2}, {"L", 1000}, {"epsilon", 1e-5}, {"P_max", 1000.0}, {"noise_dbm", -20.0},
            {"delta", delta}};
}

// Saves every CCCP run's final relaxation and randomized design for criterion 9.
void save_relaxations(int criterion, const ex::Output &out)
{
    json runs = json::array();
    for (const auto &row : out.rows)
        for (const auto &run : row.result.runs)
            if (run.randomized)
                runs.push_back({{"scheme", std::string(rsbf::to_string(row.scheme))},
                                {"realization", row.realization},
                                {"grid_value", row.grid_value},
                                {"rank_one", run.rank_one},
                                {"relaxation_objective", run.relaxation_objective},
                                {"randomized_min_rate", run.randomized_min_rate},
                                {"randomized_power", run.randomized_power},
                                {"P_max", row.system.P_max}});
    std::filesystem::create_directories(g_state_dir);
    std::ofstream(g_state_dir / ("criterion_" + std::to_string(criterion) + "_runs.json")) << runs.dump() << "\n";
}

ex::Output run_config(int criterion, const json &doc)
{
    const auto cfg = ex::parse_config(doc);
    auto out = ex::run_experiment(cfg, ex::worker_count());
    save_relaxations(criterion, out);
    for (const auto &row : out.rows)
        if (row.failed)
            std::printf("  run failed: %s realization %d grid %g: %s\n", std::string(rsbf::to_string(row.scheme)).c_str(),
                        row.realization, row.grid_value, row.error.c_str());
    return out;
}

// Rows of one scheme at one alpha, keyed by grid value.
std::map<double, std::vector<const ex::Row *>> by_grid(const ex::Output &out, SchemeId id, double alpha = -1.0)
{
    std::map<double, std::vector<const ex::Row *>> m;
    for (const auto &row : out.rows)
        if (row.scheme == id && (alpha < 0.0 || row.alpha == alpha))
            m[row.grid_value].push_back(&row);
    return m;
}

double mean_rate(const std::vector<const ex::Row *> &rows)
{
    double s = 0.0;
    for (const auto *r : rows)
        s += r->result.min_rate;
    return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}

// ---- criteria --------------------------------------------------------------

Verdict criterion_1()
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(kSeed);
    std::uniform_real_distribution<double> lxi(-8.0, 8.0), dd(0.0, 1.0);
    int shannon_exact = 0, zero_exact = 0, dominated = 0;
    double worst = -INFINITY;
    for (int i = 0; i < 1000; ++i)
    {
        const double xi = std::pow(10.0, lxi(rng));
        const double D = dd(rng);
        shannon_exact += rsbf::fbl::fbl_rate(xi, 0.0) == std::log1p(xi) ? 1 : 0;
        zero_exact += rsbf::fbl::fbl_rate(0.0, D) == 0.0 ? 1 : 0;
        const double excess = rsbf::fbl::fbl_rate(xi, D) - std::log1p(xi);
        worst = std::max(worst, excess);
        dominated += excess <= 1e-12 ? 1 : 0;
    }
    const double elapsed = seconds_since(t0);
    std::printf("  D = 0 reduction exact on %d/1000, zero SINR exact on %d/1000, dominance on %d/1000 (max excess %.3g)\n",
                shannon_exact, zero_exact, dominated, worst);
    v.require(shannon_exact == 1000, "fbl_rate(xi, 0) == ln(1 + xi)");
    v.require(zero_exact == 1000, "fbl_rate(0, D) == 0");
    v.require(dominated == 1000, "fbl_rate(xi, D) <= ln(1 + xi) + 1e-12");
    v.require(elapsed < 1.0, "runtime < 1 s");
    v.summary = "FBL rate reductions and Shannon dominance (" + fmt("%.3f s", elapsed) + ")";
    return v;
}

Verdict criterion_2()
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    int cells = 0, converged = 0;
    double worst_bisect = 0.0, worst_series = 0.0;
    std::printf("  %6s %8s %5s %18s %18s %s\n", "L", "eps", "r", "bisection", "series", "series status");
    for (int L : {200, 1000, 3000})
        for (double eps : {1e-5, 1e-3})
            for (double r : {0.0, 0.5, 1.0, 2.0})
            {
                ++cells;
                const double D = rsbf::fbl::FblPenalty::finite(eps, L).D;
                const double g = rsbf::fbl::target_sinr_bisect(r, D);
                worst_bisect = std::max(worst_bisect, std::abs(rsbf::fbl::fbl_rate(g, D) - r));
                const auto s = rsbf::fbl::target_sinr_series(r, D);
                const double ref = oracle::target_sinr(r, D);
                std::string status = "non-convergent";
                if (s.converged)
                {
                    ++converged;
                    const double err = std::abs(s.value - ref) / std::max(1.0, std::abs(ref));
                    worst_series = std::max(worst_series, err);
                    status = "converged, rel err " + fmt("%.2e", err);
                }
                std::printf("  %6d %8.0e %5.1f %18.12f %18.12f %s\n", L, eps, r, g, s.converged ? s.value : NAN,
                            status.c_str());
            }
    const double elapsed = seconds_since(t0);
    std::printf("  max |fbl_rate(bisect) - r| = %.3g; series converged on %d/%d cells, max rel err %.3g\n", worst_bisect,
                converged, cells, worst_series);
    v.require(cells == 24, "24-point grid");
    v.require(worst_bisect <= 1e-9, "bisection residual <= 1e-9");
    v.require(worst_series <= 1e-6, "series matches oracle to 1e-6 where it converges");
    v.require(elapsed < 10.0, "runtime < 10 s");
    v.summary = "SINR inversion on 24 cells, series converged on " + std::to_string(converged) + " (" +
                fmt("%.2f s", elapsed) + ")";
    return v;
}

Verdict criterion_3()
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    int certified = 0, sound = 0;
    double worst = -INFINITY;
    for (int i = 0; i < 20; ++i)
        for (bool lower : {true, false})
        {
            const auto out = sproc::run(2, rsbf::channels::derive_seed(kSeed, static_cast<std::uint64_t>(i)), lower,
                                        100000);
            if (!out.certified)
                continue;
            ++certified;
            worst = std::max(worst, out.worst_violation);
            sound += out.worst_violation <= 1e-6 ? 1 : 0;
        }
    const double elapsed = seconds_since(t0);
    std::printf("  %d/40 LMIs certified (20 instances x lower and upper bound); sound on %d; max violation %.3g\n",
                certified, sound, worst);
    v.require(certified == 40, "every instance certified by the solver");
    v.require(sound == certified, "sampled violation <= 1e-6 at 1e5 ball points");
    v.require(elapsed < 120.0, "runtime < 2 min");
    v.summary = "S-Procedure soundness on 20 instances (" + fmt("%.1f s", elapsed) + ")";
    return v;
}

json convergence_config()
{
    return {{"experiment", "convergence"}, {"system", reference_system(0.0)},
            {"grid", {0.005, 0.010, 0.015, 0.020, 0.025}}, {"n_realizations", 10}, {"seed", kSeed}};
}

Verdict criterion_4()
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = run_config(4, convergence_config());
    const double elapsed = seconds_since(t0);
    int monotone = 0, within = 0, total = 0, max_iters = 0;
    double worst_step = 0.0;
    std::vector<double> means;
    for (const auto &[delta, rows] : by_grid(out, SchemeId::RbRsFbl))
    {
        int slow = 0;
        for (const auto *r : rows)
        {
            ++total;
            const auto &t = r->result.objective_trace;
            double step = 0.0;
            for (std::size_t i = 1; i < t.size(); ++i)
                step = std::min(step, t[i] - t[i - 1]);
            worst_step = std::min(worst_step, step);
            monotone += step >= -1e-8 ? 1 : 0;
            const bool conv = !r->failed && !r->result.runs.empty() && r->result.runs.front().converged &&
                              r->result.iterations <= 50;
            within += conv ? 1 : 0;
            slow += conv ? 0 : 1;
            max_iters = std::max(max_iters, r->result.iterations);
        }
        means.push_back(mean_rate(rows));
        std::printf("  delta %.3f: mean min-rate %.6f, not converged within 50 iterations: %d/%zu\n", delta,
                    means.back(), slow, rows.size());
    }
    bool nonincreasing = true;
    for (std::size_t i = 1; i < means.size(); ++i)
        nonincreasing = nonincreasing && means[i] <= means[i - 1];
    std::printf("  monotone traces %d/%d (worst step %.3g), converged within 50 iterations %d/%d (max %d)\n",
                monotone, total, worst_step, within, total, max_iters);
    v.require(total == 50, "50 runs");
    v.require(out.failures == 0, "no failed runs");
    v.require(monotone == total, "objective trace nondecreasing (>= -1e-8 per step)");
    v.require(within == total, "convergence within 50 iterations at tol 1e-6");
    v.require(nonincreasing, "mean converged min-rate nonincreasing in delta");
    v.require(elapsed < 1200.0, "runtime < 20 min");
    v.summary = "CCCP convergence over 5 radii x 10 realizations (" + fmt("%.0f s", elapsed) + ")";
    return v;
}

json robustness_config()
{
    return {{"experiment", "robustness"}, {"system", reference_system(0.0)},
            {"grid", {0.0, 1e-12, 1e-10, 1e-8, 1e-4}}, {"schemes", {"RB-RS-FBL", "NoRB-RS-FBL"}},
            {"n_realizations", 20}, {"seed", kSeed}};
}

Verdict criterion_5()
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = run_config(5, robustness_config());
    const double elapsed = seconds_since(t0);
    auto count = [](const std::vector<const ex::Row *> &rows) {
        int n = 0;
        for (const auto *r : rows)
            n += r->result.feasible ? 1 : 0;
        return n;
    };
    const auto rb = by_grid(out, SchemeId::RbRsFbl);
    const auto norb = by_grid(out, SchemeId::NoRbRsFbl);
    bool all_rb = true, nonincreasing = true;
    int prev = 1 << 30;
    for (const auto &[d2, rows] : rb)
    {
        const int n_rb = count(rows), n_no = count(norb.at(d2));
        std::printf("  delta^2 %-6g RB-RS-FBL %2d/%zu   NoRB-RS-FBL %2d/%zu\n", d2, n_rb, rows.size(), n_no,
                    norb.at(d2).size());
        all_rb = all_rb && n_rb == 20 && rows.size() == 20;
        nonincreasing = nonincreasing && n_no <= prev;
        prev = n_no;
    }
    v.require(rb.size() == 5, "5 grid points");
    v.require(all_rb, "RB-RS-FBL feasible on 20/20 realizations at every radius");
    v.require(nonincreasing, "NoRB-RS-FBL feasible count nonincreasing in delta^2");
    v.require(elapsed < 1800.0, "runtime < 30 min");
    v.summary = "robust feasibility counts (" + fmt("%.0f s", elapsed) + ")";
    return v;
}

json pair_config(const std::string &kind)
{
    json sys = reference_system(0.001);
    json doc = {{"experiment", kind},
                {"system", sys},
                {"channels", {{"model", "correlated"}, {"gamma", 0.9}, {"theta", 7.0 * std::numbers::pi / 36.0}}},
                {"n_realizations", 1},
                {"seed", kSeed}};
    if (kind == "sweep-blocklength")
    {
        doc["grid"] = {200, 500, 1000, 2000, 3000, 1000000};
        doc["schemes"] = {"RB-RS-FBL", "RB-NoRS-FBL", "RB-RS-IFBL"};
    }
    else
    {
        doc["grid"] = {1e-7, 1e-6, 1e-5, 1e-4, 1e-3};
        doc["schemes"] = {"RB-RS-FBL", "RB-NoRS-FBL"};
    }
    return doc;
}

// Nondecreasing with the solver tolerance as slack.
bool nondecreasing(const std::vector<double> &v, double slack = 1e-6)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[i - 1] - slack)
            return false;
    return true;
}

Verdict criterion_6()
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = run_config(6, pair_config("sweep-blocklength"));
    const double elapsed = seconds_since(t0);
    const auto rs = by_grid(out, SchemeId::RbRsFbl);
    const auto nors = by_grid(out, SchemeId::RbNoRsFbl);
    const auto ifbl = by_grid(out, SchemeId::RbRsIfbl);
    std::vector<double> r_rs, r_nors, csum;
    bool dominates = true;
    std::printf("  %8s %12s %12s %12s %12s\n", "L", "RB-RS-FBL", "common sum", "RB-NoRS-FBL", "RB-RS-IFBL");
    for (const auto &[L, rows] : rs)
    {
        const double a = rows.front()->result.min_rate, b = nors.at(L).front()->result.min_rate;
        std::printf("  %8.0f %12.6f %12.6f %12.6f %12.6f\n", L, a, rows.front()->result.common_rate_sum, b,
                    ifbl.at(L).front()->result.min_rate);
        if (L > 3000)
            continue;
        r_rs.push_back(a);
        r_nors.push_back(b);
        csum.push_back(rows.front()->result.common_rate_sum);
        dominates = dominates && a >= b - 1e-6;
    }
    const double long_block = rs.at(1e6).front()->result.min_rate;
    const double shannon = ifbl.at(1e6).front()->result.min_rate;
    const double rel = std::abs(long_block - shannon) / shannon;
    std::printf("  L = 1e6: RB-RS-FBL %.6f vs RB-RS-IFBL %.6f (relative gap %.4f)\n", long_block, shannon, rel);
    v.require(r_rs.size() == 5, "5 finite blocklengths");
    v.require(nondecreasing(r_rs), "RB-RS-FBL min-rate nondecreasing in L");
    v.require(nondecreasing(r_nors), "RB-NoRS-FBL min-rate nondecreasing in L");
    v.require(dominates, "RB-RS-FBL >= RB-NoRS-FBL at every L (1e-6 slack)");
    v.require(rel <= 0.01, "L = 1e6 within 1% of RB-RS-IFBL");
    v.require(nondecreasing(csum), "common-rate sum nondecreasing in L");
    v.require(elapsed < 900.0, "runtime < 15 min");
    v.summary = "blocklength trends on the correlated pair (" + fmt("%.0f s", elapsed) + ")";
    return v;
}

Verdict criterion_7()
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = run_config(7, pair_config("sweep-bler"));
    const double elapsed = seconds_since(t0);
    std::vector<double> r_rs, r_nors, csum;
    const auto nors = by_grid(out, SchemeId::RbNoRsFbl);
    std::printf("  %8s %12s %12s %12s\n", "eps", "RB-RS-FBL", "common sum", "RB-NoRS-FBL");
    for (const auto &[eps, rows] : by_grid(out, SchemeId::RbRsFbl))
    {
        r_rs.push_back(rows.front()->result.min_rate);
        csum.push_back(rows.front()->result.common_rate_sum);
        r_nors.push_back(nors.at(eps).front()->result.min_rate);
        std::printf("  %8.0e %12.6f %12.6f %12.6f\n", eps, r_rs.back(), csum.back(), r_nors.back());
    }
    v.require(r_rs.size() == 5, "5 BLER values");
    v.require(nondecreasing(r_rs), "RB-RS-FBL min-rate nondecreasing in epsilon");
    v.require(nondecreasing(r_nors), "RB-NoRS-FBL min-rate nondecreasing in epsilon");
    v.require(nondecreasing(csum), "common-rate sum nondecreasing in epsilon");
    v.require(elapsed < 600.0, "runtime < 10 min");
    v.summary = "BLER trends on the correlated pair (" + fmt("%.0f s", elapsed) + ")";
    return v;
}

json snr_config()
{
    return {{"experiment", "sweep-snr"},
            {"system",
             {{"M", 4}, {"K", 2}, {"L", 1000}, {"epsilon", 1e-5}, {"P_max", 1.0}, {"sigma2", 1.0}, {"d", 0.1}}},
            {"grid", {0.0, 10.0, 20.0, 30.0}},
            {"alphas", {0.2, 0.6, 1.0}},
            {"n_realizations", 10},
            {"seed", kSeed}};
}

Verdict criterion_8()
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = run_config(8, snr_config());
    const double elapsed = seconds_since(t0);
    bool in_p = true;
    std::vector<double> at_top;
    for (double alpha : {0.2, 0.6, 1.0})
    {
        std::vector<double> means;
        std::printf("  alpha %.1f:", alpha);
        for (const auto &[snr, rows] : by_grid(out, SchemeId::RbRsFbl, alpha))
        {
            means.push_back(mean_rate(rows));
            std::printf("  %2.0f dB %.6f", snr, means.back());
        }
        std::printf("\n");
        in_p = in_p && means.size() == 4 && nondecreasing(means, 0.0);
        at_top.push_back(means.empty() ? 0.0 : means.back());
    }
    v.require(in_p, "mean min-rate nondecreasing in P for every alpha");
    v.require(nondecreasing(at_top, 0.0), "mean min-rate nondecreasing in alpha at the highest P");
    v.require(out.failures == 0, "no failed runs");
    v.require(elapsed < 1200.0, "runtime < 20 min");
    v.summary = "SNR and CSIT-quality trends (" + fmt("%.0f s", elapsed) + ")";
    return v;
}

Verdict criterion_9()
{
    Verdict v;
    const std::map<int, std::function<json()>> configs = {{4, convergence_config},
                                                          {5, robustness_config},
                                                          {6, [] { return pair_config("sweep-blocklength"); }},
                                                          {7, [] { return pair_config("sweep-bler"); }},
                                                          {8, snr_config}};
    int relaxations = 0, rank_one = 0, non_rank_one = 0, sound = 0;
    double worst_rate = -INFINITY, worst_power = -INFINITY;
    for (const auto &[c, make] : configs)
    {
        const auto path = g_state_dir / ("criterion_" + std::to_string(c) + "_runs.json");
        if (!std::filesystem::exists(path))
        {
            std::printf("  no recorded runs for criterion %d; running it\n", c);
            run_config(c, make());
        }
        const json runs = json::parse(std::ifstream(path));
        int local = 0;
        for (const auto &r : runs)
        {
            ++relaxations;
            const double power_excess = r["randomized_power"].get<double>() - r["P_max"].get<double>();
            worst_power = std::max(worst_power, power_excess);
            if (r["rank_one"].get<bool>())
            {
                ++rank_one;
                continue;
            }
            ++non_rank_one;
            ++local;
            const double excess = r["randomized_min_rate"].get<double>() - r["relaxation_objective"].get<double>();
            worst_rate = std::max(worst_rate, excess);
            const bool ok = excess <= 1e-6 && power_excess <= 1e-9;
            sound += ok ? 1 : 0;
            if (!ok)
                std::printf("  criterion %d %s realization %d grid %g: randomized %.9f vs relaxation %.9f\n", c,
                            r["scheme"].get<std::string>().c_str(), r["realization"].get<int>(),
                            r["grid_value"].get<double>(), r["randomized_min_rate"].get<double>(),
                            r["relaxation_objective"].get<double>());
        }
        std::printf("  criterion %d: %zu relaxations, %d not rank-one\n", c, runs.size(), local);
    }
    const double fraction = relaxations ? static_cast<double>(rank_one) / relaxations : 0.0;
    std::printf("  rank-one tightness fraction %.4f (%d/%d); non-rank-one sound %d/%d; max rate excess %.3g; max "
                "power excess %.3g\n",
                fraction, rank_one, relaxations, sound, non_rank_one, worst_rate, worst_power);
    v.require(relaxations > 0, "relaxations recorded");
    v.require(sound == non_rank_one, "randomized min-rate <= relaxation + 1e-6 on every non-rank-one relaxation");
    v.require(worst_power <= 1e-9, "randomized power <= P_max + 1e-9");
    v.summary = "randomization soundness, rank-one fraction " + fmt("%.4f", fraction);
    return v;
}

Verdict criterion_10()
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    bool monotone = true, converged = true;
    for (std::uint64_t r = 0; r < 3; ++r)
    {
        const auto seed = rsbf::channels::derive_seed(kSeed, r);
        const auto cfg = rsbf::SystemConfig::uniform(4, 1, 1000000, 1e-5, 1000.0, 0.01, 0.0);
        const auto ch = rsbf::channels::sample_rayleigh(4, 1, seed, cfg.delta);
        const auto res = rsbf::schemes::run_scheme(SchemeId::RbRsFbl, cfg, ch, {}, seed);
        const double ref = oracle::matched_filter_rate(ch.h_hat[0], cfg.P_max, cfg.sigma2[0]);
        const double rel = std::abs(res.min_rate - ref) / ref;
        bool stopped = false;
        for (const auto &run : res.runs)
        {
            stopped = stopped || run.converged;
            for (std::size_t i = 1; i < run.objective_trace.size(); ++i)
                monotone = monotone && run.objective_trace[i] >= run.objective_trace[i - 1] - 1e-8;
        }
        worst = std::max(worst, rel);
        converged = converged && stopped;
        std::printf("  channel %llu: rate %.6f, matched filter %.6f, relative gap %.5f, %d iterations, "
                    "tolerance stop %s\n",
                    static_cast<unsigned long long>(r), res.min_rate, ref, rel, res.iterations, stopped ? "yes" : "no");
    }
    const double elapsed = seconds_since(t0);
    v.require(monotone, "objective trace nondecreasing");
    v.require(converged, "CCCP stopped on the tolerance test");
    v.require(worst <= 0.02, "within 2% of ln(1 + P ||h||^2 / sigma^2)");
    v.require(elapsed < 60.0, "runtime < 1 min");
    v.summary = "single-user sanity, max relative gap " + fmt("%.5f", worst) + " (" + fmt("%.1f s", elapsed) + ")";
    return v;
}

}  // namespace

int main(int argc, char **argv)
{
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i)
    {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc)
            wanted.push_back(std::atoi(argv[++i]));
        else if (a == "--state-dir" && i + 1 < argc)
            g_state_dir = argv[++i];
        else
        {
            std::fprintf(stderr, "usage: acceptance [--criterion N]... [--state-dir DIR]\n");
            return 2;
        }
    }
    if (wanted.empty())
        for (int i = 1; i <= 10; ++i)
            wanted.push_back(i);

    const std::map<int, std::function<Verdict()>> all = {
        {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4}, {5, criterion_5},
        {6, criterion_6}, {7, criterion_7}, {8, criterion_8}, {9, criterion_9}, {10, criterion_10}};
    bool ok = true;
    for (int n : wanted)
    {
        const auto it = all.find(n);
        if (it == all.end())
        {
            std::fprintf(stderr, "unknown criterion %d\n", n);
            return 2;
        }
        std::printf("criterion %d\n", n);
        Verdict v;
        try
        {
            v = it->second();
        }
        catch (const std::exception &e)
        {
            v.pass = false;
            v.summary = std::string("exception: ") + e.what();
        }
        std::printf("criterion %d: %s %s\n", n, v.pass ? "PASS" : "FAIL", v.summary.c_str());
        std::fflush(stdout);
        ok = ok && v.pass;
    }
    return ok ? 0 : 1;
}
