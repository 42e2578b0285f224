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

#include "rsbf/experiment.hpp"

#include "rsbf/channels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

namespace rsbf::experiment
{

using nlohmann::json;

namespace
{

constexpr std::pair<Kind, std::string_view> kKinds[] = {
    {Kind::Convergence, "convergence"},
    {Kind::Robustness, "robustness"},
    {Kind::SweepBlocklength, "sweep-blocklength"},
    {Kind::SweepBler, "sweep-bler"},
    {Kind::SweepSnr, "sweep-snr"},
    {Kind::SingleSolve, "single-solve"},
};

bool is_sweep(Kind k)
{
    return k == Kind::SweepBlocklength || k == Kind::SweepBler || k == Kind::SweepSnr;
}

bool has_grid(Kind k) { return k != Kind::SingleSolve; }

std::vector<SchemeId> default_schemes(Kind k)
{
    switch (k)
    {
    case Kind::Robustness:
        return {SchemeId::RbRsFbl, SchemeId::NoRbRsFbl};
    case Kind::SweepBlocklength:
        return {SchemeId::RbRsFbl, SchemeId::RbNoRsFbl, SchemeId::RbRsIfbl};
    case Kind::SweepBler:
        return {SchemeId::RbRsFbl, SchemeId::RbNoRsFbl};
    default:
        return {SchemeId::RbRsFbl};
    }
}

// ---- config parsing -------------------------------------------------------

double number(const json &v, const std::string &field)
{
    if (!v.is_number())
        throw ConfigError(field, "expected a number");
    return v.get<double>();
}

int integer(const json &v, const std::string &field)
{
    if (!v.is_number_integer() && !(v.is_number() && std::floor(v.get<double>()) == v.get<double>()))
        throw ConfigError(field, "expected an integer");
    return static_cast<int>(v.get<double>());
}

// A scalar applies to every user; an array must have one entry per user.
std::vector<double> per_user(const json &v, int K, const std::string &field)
{
    if (v.is_number())
        return std::vector<double>(static_cast<std::size_t>(K), v.get<double>());
    if (!v.is_array())
        throw ConfigError(field, "expected a number or an array of " + std::to_string(K) + " numbers");
    if (static_cast<int>(v.size()) != K)
        throw ConfigError(field, "expected " + std::to_string(K) + " entries, got " + std::to_string(v.size()));
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

void reject_unknown(const json &obj, std::initializer_list<std::string_view> known, const std::string &prefix)
{
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError(prefix + it.key(), "unknown field");
}

SystemConfig parse_system(const json &s)
{
    if (!s.is_object())
        throw ConfigError("system", "expected an object");
    reject_unknown(s, {"M", "K", "L", "epsilon", "P_max", "sigma2", "noise_dbm", "delta", "alpha", "d"}, "system.");
    for (const char *key : {"M", "K", "L", "epsilon", "P_max"})
        if (!s.contains(key))
            throw ConfigError(std::string("system.") + key, "missing");
    if (s.contains("sigma2") == s.contains("noise_dbm"))
        throw ConfigError("system.sigma2", "give exactly one of sigma2 (linear mW) and noise_dbm");

    SystemConfig cfg;
    cfg.M = integer(s["M"], "system.M");
    cfg.K = integer(s["K"], "system.K");
    if (cfg.K < 1)
        throw ConfigError("system.K", "must be >= 1");
    cfg.L = integer(s["L"], "system.L");
    cfg.epsilon = per_user(s["epsilon"], cfg.K, "system.epsilon");
    cfg.P_max = number(s["P_max"], "system.P_max");
    if (s.contains("sigma2"))
        cfg.sigma2 = per_user(s["sigma2"], cfg.K, "system.sigma2");
    else
    {
        cfg.sigma2 = per_user(s["noise_dbm"], cfg.K, "system.noise_dbm");
        for (auto &v : cfg.sigma2)
            v = dbm_to_mw(v);
    }
    cfg.delta = s.contains("delta") ? per_user(s["delta"], cfg.K, "system.delta")
                                    : std::vector<double>(static_cast<std::size_t>(cfg.K), 0.0);
    cfg.alpha = s.contains("alpha") ? per_user(s["alpha"], cfg.K, "system.alpha")
                                    : std::vector<double>(static_cast<std::size_t>(cfg.K), 0.0);
    cfg.d = s.contains("d") ? number(s["d"], "system.d") : 0.0;
    try
    {
        validate_config(cfg);
    }
    catch (const ConfigError &e)
    {
        throw ConfigError("system." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
    }
    return cfg;
}

std::vector<CVec> parse_given_channels(const json &h, int M, int K)
{
    if (!h.is_array() || static_cast<int>(h.size()) != K)
        throw ConfigError("channels.h_hat", "expected " + std::to_string(K) + " channel vectors");
    std::vector<CVec> out;
    for (std::size_t k = 0; k < h.size(); ++k)
    {
        const std::string field = "channels.h_hat[" + std::to_string(k) + "]";
        if (!h[k].is_array() || static_cast<int>(h[k].size()) != M)
            throw ConfigError(field, "expected " + std::to_string(M) + " [re, im] pairs");
        CVec v(M);
        for (int m = 0; m < M; ++m)
        {
            const auto &e = h[k][static_cast<std::size_t>(m)];
            if (!e.is_array() || e.size() != 2)
                throw ConfigError(field, "entries must be [re, im] pairs");
            v(m) = cdouble(number(e[0], field), number(e[1], field));
        }
        out.push_back(std::move(v));
    }
    return out;
}

algo::CccpSettings parse_cccp(const json &c)
{
    if (!c.is_object())
        throw ConfigError("cccp", "expected an object");
    reject_unknown(c, {"tol", "max_iters", "randomization_draws", "rank_one_ratio_threshold", "c0_cap", "init_retries",
                       "momentum_cap"},
                   "cccp.");
    algo::CccpSettings s;
    if (c.contains("tol"))
        s.tol = number(c["tol"], "cccp.tol");
    if (c.contains("max_iters"))
        s.max_iters = integer(c["max_iters"], "cccp.max_iters");
    if (c.contains("randomization_draws"))
        s.randomization_draws = integer(c["randomization_draws"], "cccp.randomization_draws");
    if (c.contains("rank_one_ratio_threshold"))
        s.rank_one_ratio_threshold = number(c["rank_one_ratio_threshold"], "cccp.rank_one_ratio_threshold");
    if (c.contains("c0_cap"))
        s.c0_cap = number(c["c0_cap"], "cccp.c0_cap");
    if (c.contains("init_retries"))
        s.init_retries = integer(c["init_retries"], "cccp.init_retries");
    if (c.contains("momentum_cap"))
        s.momentum_cap = number(c["momentum_cap"], "cccp.momentum_cap");
    try
    {
        s.check();
    }
    catch (const std::exception &e)
    {
        throw ConfigError("cccp", e.what());
    }
    return s;
}

// ---- grid points ----------------------------------------------------------

struct Point
{
    int grid_index = 0;
    double grid_value = 0.0;
    double alpha = 0.0;
    SystemConfig system;
};

std::vector<double> uniform(const SystemConfig &s, double v) { return std::vector<double>(static_cast<std::size_t>(s.K), v); }

// Grid points in continuation order: each point's designs remain admissible at the next one.
std::vector<Point> grid_points(const ExperimentConfig &c)
{
    std::vector<Point> pts;
    const SystemConfig &base = c.system;
    auto push = [&](int i, double g, double alpha, SystemConfig s) {
        pts.push_back({i, g, alpha, std::move(s)});
    };
    switch (c.kind)
    {
    case Kind::SingleSolve:
        push(0, 0.0, base.alpha.front(), base);
        break;
    case Kind::Convergence:
    case Kind::Robustness:
        for (std::size_t i = 0; i < c.grid.size(); ++i)
        {
            SystemConfig s = base;
            const double g = c.grid[i];
            s.delta = uniform(s, c.kind == Kind::Robustness ? std::sqrt(g) : g);
            push(static_cast<int>(i), g, base.alpha.front(), std::move(s));
        }
        std::stable_sort(pts.begin(), pts.end(), [](const Point &a, const Point &b) {
            return a.system.delta.front() > b.system.delta.front();
        });
        break;
    case Kind::SweepBlocklength:
        for (std::size_t i = 0; i < c.grid.size(); ++i)
        {
            SystemConfig s = base;
            s.L = static_cast<int>(c.grid[i]);
            push(static_cast<int>(i), c.grid[i], base.alpha.front(), std::move(s));
        }
        std::stable_sort(pts.begin(), pts.end(), [](const Point &a, const Point &b) { return a.system.L < b.system.L; });
        break;
    case Kind::SweepBler:
        for (std::size_t i = 0; i < c.grid.size(); ++i)
        {
            SystemConfig s = base;
            s.epsilon = uniform(s, c.grid[i]);
            push(static_cast<int>(i), c.grid[i], base.alpha.front(), std::move(s));
        }
        std::stable_sort(pts.begin(), pts.end(),
                         [](const Point &a, const Point &b) { return a.system.epsilon.front() < b.system.epsilon.front(); });
        break;
    case Kind::SweepSnr:
    {
        std::vector<double> alphas = c.alphas;
        std::sort(alphas.begin(), alphas.end());
        std::vector<std::size_t> order(c.grid.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return c.grid[a] < c.grid[b]; });
        for (double alpha : alphas)
            for (std::size_t i : order)
            {
                SystemConfig s = base;
                s.P_max = s.sigma2.front() * std::pow(10.0, c.grid[i] / 10.0);
                s.alpha = uniform(s, alpha);
                s.delta = uniform(s, effective_radius(s.d, s.P_max, alpha));
                push(static_cast<int>(i), c.grid[i], alpha, std::move(s));
            }
        break;
    }
    }
    return pts;
}

// Order in which schemes are solved at one point: later schemes start from earlier designs.
int dependency_rank(SchemeId id)
{
    switch (id)
    {
    case SchemeId::RbNoRsFbl:
        return 0;
    case SchemeId::RbRsFbl:
        return 1;
    case SchemeId::RbRsIfbl:
        return 2;
    case SchemeId::NoRbRsFbl:
        return 3;
    }
    return 4;
}

ChannelSet realization_channels(const ExperimentConfig &c, std::uint64_t seed)
{
    switch (c.channel_model)
    {
    case ChannelModel::Rayleigh:
        return channels::sample_rayleigh(c.system.M, c.system.K, seed, c.system.delta);
    case ChannelModel::Correlated:
        return channels::correlated_pair(c.gamma, c.theta, c.system.M, c.system.delta);
    case ChannelModel::Given:
    {
        ChannelSet ch;
        ch.M = c.system.M;
        ch.h_hat = c.given_channels;
        ch.delta = c.system.delta;
        return ch;
    }
    }
    return {};
}

ChannelSet at_radii(ChannelSet ch, const std::vector<double> &delta)
{
    ch.delta = delta;
    return ch;
}

// Everything a non-robust design depends on (the radii are not part of it).
std::string nonrobust_key(const SystemConfig &s)
{
    std::ostringstream o;
    o.precision(17);
    o << s.L << '|' << s.P_max;
    for (double e : s.epsilon)
        o << '|' << e;
    for (double v : s.sigma2)
        o << '|' << v;
    return o.str();
}

std::vector<Row> run_realization(const ExperimentConfig &c, int r, const std::vector<Point> &points,
                                 const std::vector<SchemeId> &schemes)
{
    const std::uint64_t rseed = channels::derive_seed(c.seed, static_cast<std::uint64_t>(r));
    const ChannelSet base_channels = realization_channels(c, rseed);
    std::vector<Row> rows;

    std::map<SchemeId, std::vector<BeamformerSet>> previous;  // designs of the preceding points
    std::map<std::pair<int, double>, std::map<SchemeId, BeamformerSet>> by_point;
    std::map<std::string, SchemeResult> nonrobust;

    for (std::size_t p = 0; p < points.size(); ++p)
    {
        const Point &pt = points[p];
        const ChannelSet ch = at_radii(base_channels, pt.system.delta);
        std::map<SchemeId, BeamformerSet> here;
        for (SchemeId id : schemes)
        {
            Row row;
            row.experiment = std::string(to_string(c.kind));
            row.scheme = id;
            row.realization = r;
            row.seed = rseed;
            row.system = pt.system;
            row.delta = pt.system.delta.front();
            row.alpha = pt.alpha;
            row.grid_value = pt.grid_value;
            row.channels = ch;

            schemes::SchemeSettings settings;
            settings.cccp = c.cccp;
            settings.n_starts = c.n_starts;
            if (c.continuation)
                for (const auto &b : previous[id])
                    settings.extra_starts.push_back(b);
            // A design of a more restricted scheme at the same point is admissible here.
            if (id == SchemeId::RbRsFbl && here.count(SchemeId::RbNoRsFbl))
                settings.extra_starts.push_back(here[SchemeId::RbNoRsFbl]);
            if (id == SchemeId::RbRsIfbl && here.count(SchemeId::RbRsFbl))
                settings.extra_starts.push_back(here[SchemeId::RbRsFbl]);

            const std::uint64_t run_seed =
                channels::derive_seed(rseed, static_cast<std::uint64_t>(pt.grid_index) * 8 + static_cast<std::uint64_t>(id));
            try
            {
                if (id == SchemeId::NoRbRsFbl)
                {
                    const std::string key = nonrobust_key(pt.system);
                    auto it = nonrobust.find(key);
                    if (it == nonrobust.end())
                        it = nonrobust.emplace(key, schemes::run_scheme(id, pt.system, ch, settings, rseed)).first;
                    row.result = it->second;
                    const auto ev = schemes::evaluate_design(row.result.design, ch, pt.system, true);
                    row.result.min_rate = ev.min_rate;
                    row.result.feasible = ev.feasible;
                }
                else
                {
                    row.result = schemes::run_scheme(id, pt.system, ch, settings, run_seed);
                }
                row.relaxation_gap = row.result.min_rate - row.result.relaxation_objective;
                here[id] = row.result.design;
            }
            catch (const std::exception &e)
            {
                row.failed = true;
                row.error = e.what();
                row.result.scheme_id = id;
                row.result.feasible = false;
            }
            rows.push_back(std::move(row));
        }
        for (const auto &[id, b] : here)
            previous[id].assign(1, b);
        // sweep-snr chains over P within one alpha and over alpha at one P.
        if (c.kind == Kind::SweepSnr)
        {
            by_point[{pt.grid_index, pt.alpha}] = here;
            if (p + 1 < points.size())
            {
                const Point &next = points[p + 1];
                if (next.alpha != pt.alpha)
                    previous.clear();
                for (const auto &[key, designs] : by_point)
                    if (key.first == next.grid_index && key.second < next.alpha)
                        for (const auto &[id, b] : designs)
                            previous[id].push_back(b);
            }
        }
    }
    return rows;
}

json system_json(const SystemConfig &s)
{
    return {{"M", s.M}, {"K", s.K}, {"L", s.L}, {"epsilon", s.epsilon}, {"P_max", s.P_max},
            {"sigma2", s.sigma2}, {"delta", s.delta}, {"alpha", s.alpha}, {"d", s.d}};
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json summarize(const ExperimentConfig &c, const std::vector<Row> &rows, const std::vector<SchemeId> &schemes)
{
    json groups = json::array();
    std::vector<double> alphas = c.kind == Kind::SweepSnr ? c.alphas : std::vector<double>{c.system.alpha.front()};
    const std::vector<double> grid = has_grid(c.kind) ? c.grid : std::vector<double>{0.0};
    int non_rank_one = 0, rank_one = 0, solved = 0, relaxations = 0;
    double worst_excess = -std::numeric_limits<double>::infinity();
    double worst_power = -std::numeric_limits<double>::infinity();
    for (const Row &r : rows)
    {
        if (r.failed)
            continue;
        ++solved;
        for (const RunTrace &run : r.result.runs)
        {
            if (!run.randomized)
                continue;
            ++relaxations;
            if (run.rank_one)
                ++rank_one;
            else
            {
                ++non_rank_one;
                worst_excess = std::max(worst_excess, run.randomized_min_rate - run.relaxation_objective);
            }
            worst_power = std::max(worst_power, run.randomized_power - r.system.P_max);
        }
    }

    for (SchemeId id : schemes)
        for (double alpha : alphas)
            for (double g : grid)
            {
                std::vector<const Row *> sel;
                for (const Row &r : rows)
                    if (r.scheme == id && r.grid_value == g && r.alpha == alpha)
                        sel.push_back(&r);
                json grp;
                grp["scheme"] = std::string(to_string(id));
                grp["grid_value"] = g;
                if (c.kind == Kind::SweepSnr)
                    grp["alpha"] = alpha;
                int n = 0, failed = 0, feasible = 0, r1 = 0;
                double rate = 0.0, csum = 0.0, iters = 0.0;
                std::size_t longest = 0;
                for (const Row *r : sel)
                {
                    if (r->failed)
                    {
                        ++failed;
                        continue;
                    }
                    ++n;
                    rate += r->result.min_rate;
                    csum += r->result.common_rate_sum;
                    iters += r->result.iterations;
                    feasible += r->result.feasible ? 1 : 0;
                    r1 += r->result.rank_one ? 1 : 0;
                    longest = std::max(longest, r->result.objective_trace.size());
                }
                grp["runs"] = static_cast<int>(sel.size());
                grp["failed"] = failed;
                grp["feasible"] = feasible;
                grp["mean_min_rate"] = n ? rate / n : 0.0;
                grp["mean_common_rate_sum"] = n ? csum / n : 0.0;
                grp["mean_iterations"] = n ? iters / n : 0.0;
                grp["rank_one_fraction"] = n ? static_cast<double>(r1) / n : 0.0;
                if (c.kind == Kind::Convergence && n > 0)
                {
                    std::vector<double> mean(longest, 0.0);
                    for (const Row *r : sel)
                    {
                        if (r->failed || r->result.objective_trace.empty())
                            continue;
                        const auto &t = r->result.objective_trace;
                        for (std::size_t i = 0; i < longest; ++i)
                            mean[i] += (i < t.size() ? t[i] : t.back()) / n;
                    }
                    grp["mean_trace"] = mean;
                }
                groups.push_back(std::move(grp));
            }

    json s;
    s["experiment"] = std::string(to_string(c.kind));
    s["seed"] = c.seed;
    s["n_realizations"] = c.n_realizations;
    s["n_starts"] = c.n_starts;
    s["system"] = system_json(c.system);
    s["groups"] = std::move(groups);
    s["rows"] = static_cast<int>(rows.size());
    s["failures"] = static_cast<int>(rows.size()) - solved;
    json rnd;
    rnd["rank_one"] = rank_one;
    rnd["non_rank_one"] = non_rank_one;
    rnd["rank_one_fraction"] = relaxations ? static_cast<double>(rank_one) / relaxations : 0.0;
    rnd["max_rate_above_relaxation_non_rank_one"] = non_rank_one ? json(worst_excess) : json(nullptr);
    rnd["max_power_excess"] = relaxations ? json(worst_power) : json(nullptr);
    s["randomization"] = std::move(rnd);
    return s;
}

}  // namespace

std::string_view to_string(Kind kind)
{
    for (const auto &[k, name] : kKinds)
        if (k == kind)
            return name;
    return "unknown";
}

Kind parse_kind(std::string_view name)
{
    for (const auto &[k, n] : kKinds)
        if (n == name)
            return k;
    throw ConfigError("experiment", "unknown experiment '" + std::string(name) + "'");
}

ExperimentConfig parse_config(const json &doc)
{
    if (!doc.is_object())
        throw ConfigError("(root)", "expected a JSON object");
    reject_unknown(doc,
                   {"experiment", "system", "grid", "alphas", "schemes", "channels", "n_realizations", "n_starts",
                    "seed", "output_path", "continuation", "record_timing", "cccp"},
                   "");
    ExperimentConfig c;
    if (!doc.contains("experiment") || !doc["experiment"].is_string())
        throw ConfigError("experiment", "missing or not a string");
    c.kind = parse_kind(doc["experiment"].get<std::string>());
    if (!doc.contains("system"))
        throw ConfigError("system", "missing");
    c.system = parse_system(doc["system"]);

    if (doc.contains("grid"))
    {
        const auto &g = doc["grid"];
        if (!g.is_array())
            throw ConfigError("grid", "expected an array of numbers");
        for (std::size_t i = 0; i < g.size(); ++i)
            c.grid.push_back(number(g[i], "grid[" + std::to_string(i) + "]"));
    }
    if (has_grid(c.kind) && c.grid.empty())
        throw ConfigError("grid", "must be nonempty for " + std::string(to_string(c.kind)));
    for (std::size_t i = 0; i < c.grid.size(); ++i)
    {
        const double g = c.grid[i];
        const std::string field = "grid[" + std::to_string(i) + "]";
        SystemConfig probe = c.system;
        switch (c.kind)
        {
        case Kind::Convergence:
            probe.delta = uniform(probe, g);
            break;
        case Kind::Robustness:
            if (!(g >= 0.0))
                throw ConfigError(field, "delta^2 must be >= 0");
            probe.delta = uniform(probe, std::sqrt(g));
            break;
        case Kind::SweepBlocklength:
            if (std::floor(g) != g || g < 1.0 || g > 2e9)
                throw ConfigError(field, "blocklength must be a positive integer");
            probe.L = static_cast<int>(g);
            break;
        case Kind::SweepBler:
            probe.epsilon = uniform(probe, g);
            break;
        case Kind::SweepSnr:
            if (!std::isfinite(g))
                throw ConfigError(field, "SNR must be finite");
            break;
        case Kind::SingleSolve:
            break;
        }
        try
        {
            validate_config(probe);
        }
        catch (const ConfigError &e)
        {
            throw ConfigError(field, std::string(e.what()));
        }
    }

    if (c.kind == Kind::SweepSnr)
    {
        if (doc.contains("alphas"))
        {
            const auto &a = doc["alphas"];
            if (!a.is_array() || a.empty())
                throw ConfigError("alphas", "expected a nonempty array");
            for (std::size_t i = 0; i < a.size(); ++i)
            {
                const double v = number(a[i], "alphas[" + std::to_string(i) + "]");
                if (!(v >= 0.0 && v <= 1.0))
                    throw ConfigError("alphas[" + std::to_string(i) + "]", "must lie in [0, 1]");
                c.alphas.push_back(v);
            }
        }
        else
            c.alphas = {c.system.alpha.front()};
        if (!(c.system.d > 0.0))
            throw ConfigError("system.d", "sweep-snr needs d > 0");
    }
    else if (doc.contains("alphas"))
        throw ConfigError("alphas", "only used by sweep-snr");

    if (doc.contains("schemes"))
    {
        const auto &s = doc["schemes"];
        if (!s.is_array() || s.empty())
            throw ConfigError("schemes", "expected a nonempty array of scheme names");
        for (std::size_t i = 0; i < s.size(); ++i)
        {
            if (!s[i].is_string())
                throw ConfigError("schemes[" + std::to_string(i) + "]", "expected a scheme name");
            try
            {
                c.schemes.push_back(parse_scheme(s[i].get<std::string>()));
            }
            catch (const std::exception &e)
            {
                throw ConfigError("schemes[" + std::to_string(i) + "]", e.what());
            }
        }
    }
    else
        c.schemes = default_schemes(c.kind);

    c.theta = 7.0 * M_PI / 36.0;
    if (doc.contains("channels"))
    {
        const auto &ch = doc["channels"];
        if (!ch.is_object() || !ch.contains("model") || !ch["model"].is_string())
            throw ConfigError("channels.model", "expected \"rayleigh\", \"correlated\" or \"given\"");
        reject_unknown(ch, {"model", "gamma", "theta", "h_hat"}, "channels.");
        const std::string model = ch["model"].get<std::string>();
        if (model == "rayleigh")
            c.channel_model = ChannelModel::Rayleigh;
        else if (model == "correlated")
        {
            c.channel_model = ChannelModel::Correlated;
            if (ch.contains("gamma"))
                c.gamma = number(ch["gamma"], "channels.gamma");
            if (ch.contains("theta"))
                c.theta = number(ch["theta"], "channels.theta");
            if (c.system.M != 4 || c.system.K != 2)
                throw ConfigError("channels.model", "the correlated pair needs M = 4 and K = 2");
            if (!(c.gamma > 0.0 && c.gamma <= 1.0))
                throw ConfigError("channels.gamma", "must lie in (0, 1]");
        }
        else if (model == "given")
        {
            c.channel_model = ChannelModel::Given;
            if (!ch.contains("h_hat"))
                throw ConfigError("channels.h_hat", "missing");
            c.given_channels = parse_given_channels(ch["h_hat"], c.system.M, c.system.K);
        }
        else
            throw ConfigError("channels.model", "unknown model '" + model + "'");
    }

    if (doc.contains("n_realizations"))
        c.n_realizations = integer(doc["n_realizations"], "n_realizations");
    if (c.n_realizations < 1)
        throw ConfigError("n_realizations", "must be >= 1");
    if (doc.contains("n_starts"))
        c.n_starts = integer(doc["n_starts"], "n_starts");
    if (c.n_starts < 1)
        throw ConfigError("n_starts", "must be >= 1");
    if (doc.contains("seed"))
    {
        if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0))
            throw ConfigError("seed", "expected a nonnegative integer");
        c.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("output_path"))
    {
        if (!doc["output_path"].is_string())
            throw ConfigError("output_path", "expected a string");
        c.output_path = doc["output_path"].get<std::string>();
    }
    c.continuation = is_sweep(c.kind);
    if (doc.contains("continuation"))
    {
        if (!doc["continuation"].is_boolean())
            throw ConfigError("continuation", "expected true or false");
        c.continuation = doc["continuation"].get<bool>();
    }
    if (doc.contains("record_timing"))
    {
        if (!doc["record_timing"].is_boolean())
            throw ConfigError("record_timing", "expected true or false");
        c.record_timing = doc["record_timing"].get<bool>();
    }
    if (doc.contains("cccp"))
        c.cccp = parse_cccp(doc["cccp"]);
    return c;
}

ExperimentConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config", "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw ConfigError("config", path + ":" + std::to_string(line) + ": " + e.what());
    }
    return parse_config(doc);
}

int worker_count()
{
    if (const char *env = std::getenv("RSBF_WORKERS"))
    {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

Output run_experiment(const ExperimentConfig &config, int workers)
{
    std::vector<SchemeId> schemes = config.schemes;
    std::stable_sort(schemes.begin(), schemes.end(),
                     [](SchemeId a, SchemeId b) { return dependency_rank(a) < dependency_rank(b); });
    const std::vector<Point> points = grid_points(config);
    const int n = config.n_realizations;
    std::vector<std::vector<Row>> per(static_cast<std::size_t>(n));

    std::atomic<int> next{0};
    auto work = [&] {
        for (int r = next++; r < n; r = next++)
            per[static_cast<std::size_t>(r)] = run_realization(config, r, points, schemes);
    };
    const int w = std::clamp(workers, 1, n);
    {
        std::vector<std::jthread> pool;
        for (int i = 1; i < w; ++i)
            pool.emplace_back(work);
        work();
    }

    // Deterministic order: realization, then scheme as configured, then alpha, then grid as configured.
    Output out;
    for (auto &rows : per)
    {
        std::vector<Row> sorted = std::move(rows);
        std::stable_sort(sorted.begin(), sorted.end(), [&](const Row &a, const Row &b) {
            const auto ia = std::find(config.schemes.begin(), config.schemes.end(), a.scheme) - config.schemes.begin();
            const auto ib = std::find(config.schemes.begin(), config.schemes.end(), b.scheme) - config.schemes.begin();
            if (ia != ib)
                return ia < ib;
            if (a.alpha != b.alpha)
                return a.alpha < b.alpha;
            const auto ga = std::find(config.grid.begin(), config.grid.end(), a.grid_value) - config.grid.begin();
            const auto gb = std::find(config.grid.begin(), config.grid.end(), b.grid_value) - config.grid.begin();
            return ga < gb;
        });
        for (auto &r : sorted)
        {
            out.failures += r.failed ? 1 : 0;
            out.rows.push_back(std::move(r));
        }
    }
    out.summary = summarize(config, out.rows, config.schemes);
    return out;
}

std::string csv_header()
{
    return "experiment,scheme,realization,seed,M,K,L,epsilon,P_max,sigma2,delta,alpha,grid_value,iterations,min_rate,"
           "common_rate_sum,feasible,rank_one,solve_ms";
}

std::string csv_line(const Row &r, bool record_timing)
{
    std::ostringstream o;
    const auto &s = r.system;
    o << r.experiment << ',' << to_string(r.scheme) << ',' << r.realization << ',' << r.seed << ',' << s.M << ','
      << s.K << ',' << s.L << ',' << fmt(s.epsilon.front()) << ',' << fmt(s.P_max) << ',' << fmt(s.sigma2.front())
      << ',' << fmt(r.delta) << ',' << fmt(r.alpha) << ',' << fmt(r.grid_value) << ',' << r.result.iterations << ','
      << (r.failed ? std::string("nan") : fmt(r.result.min_rate)) << ',' << fmt(r.result.common_rate_sum) << ','
      << (r.result.feasible ? 1 : 0) << ',' << (r.result.rank_one ? 1 : 0) << ',';
    if (record_timing)
        o << fmt(r.result.wall_time * 1e3);
    return o.str();
}

std::string to_csv(const Output &out, bool record_timing)
{
    std::string s = csv_header() + "\n";
    for (const auto &r : out.rows)
        s += csv_line(r, record_timing) + "\n";
    return s;
}

json design_to_json(const BeamformerSet &b)
{
    auto vec = [](const CVec &v) {
        json a = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i)
            a.push_back({v(i).real(), v(i).imag()});
        return a;
    };
    json w = json::array();
    for (const auto &wk : b.w)
        w.push_back(vec(wk));
    return {{"w_c", vec(b.w_c)}, {"w", w}, {"c", b.c}};
}

BeamformerSet design_from_json(const json &doc)
{
    auto vec = [](const json &a) {
        CVec v(static_cast<Eigen::Index>(a.size()));
        for (std::size_t i = 0; i < a.size(); ++i)
            v(static_cast<Eigen::Index>(i)) = cdouble(a[i].at(0).get<double>(), a[i].at(1).get<double>());
        return v;
    };
    BeamformerSet b;
    b.w_c = vec(doc.at("w_c"));
    for (const auto &wk : doc.at("w"))
        b.w.push_back(vec(wk));
    b.c = doc.at("c").get<std::vector<double>>();
    return b;
}

json designs_document(const Output &out)
{
    json rows = json::array();
    for (std::size_t i = 0; i < out.rows.size(); ++i)
    {
        const Row &r = out.rows[i];
        json j;
        j["row"] = i;
        j["scheme"] = std::string(to_string(r.scheme));
        j["realization"] = r.realization;
        j["grid_value"] = r.grid_value;
        j["alpha"] = r.alpha;
        j["system"] = system_json(r.system);
        j["channels"] = channels::to_json(r.channels);
        j["finite_blocklength"] = schemes::scheme_flags(r.scheme).finite_blocklength;
        j["min_rate"] = r.failed ? json(nullptr) : json(r.result.min_rate);
        j["relaxation_objective"] = r.result.relaxation_objective;
        j["design"] = design_to_json(r.result.design);
        if (r.failed)
            j["error"] = r.error;
        rows.push_back(std::move(j));
    }
    return {{"rows", rows}};
}

std::string traces_csv(const Output &out)
{
    std::string s = "experiment,scheme,realization,grid_value,iteration,objective\n";
    for (const auto &r : out.rows)
        for (std::size_t i = 0; i < r.result.objective_trace.size(); ++i)
            s += r.experiment + "," + std::string(to_string(r.scheme)) + "," + std::to_string(r.realization) + "," +
                 fmt(r.grid_value) + "," + std::to_string(i) + "," + fmt(r.result.objective_trace[i]) + "\n";
    return s;
}

WrittenFiles write_outputs(const Output &out, const ExperimentConfig &config, const std::string &dir)
{
    std::filesystem::create_directories(dir);
    const std::string stem = (std::filesystem::path(dir) / std::string(to_string(config.kind))).string();
    WrittenFiles f{stem + ".csv", stem + "_summary.json", stem + "_designs.json", ""};
    auto write = [](const std::string &path, const std::string &text) {
        std::ofstream o(path, std::ios::binary);
        if (!o)
            throw std::runtime_error("cannot write '" + path + "'");
        o << text;
    };
    write(f.csv, to_csv(out, config.record_timing));
    write(f.summary, out.summary.dump(2) + "\n");
    write(f.designs, designs_document(out).dump() + "\n");
    if (config.kind == Kind::Convergence)
    {
        f.traces = stem + "_traces.csv";
        write(f.traces, traces_csv(out));
    }
    return f;
}

}  // namespace rsbf::experiment
