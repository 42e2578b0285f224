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

#include "rsbf/sdr_builder.hpp"

#include "rsbf/fbl_math.hpp"

#include <cmath>

namespace rsbf::sdr
{

using conic::AffineExpr;
using conic::ConicProblem;
using conic::HermitianAffine;
using conic::LinearConstraint;
using conic::Relation;

void ExpansionPoint::check() const
{
    auto finite = [](const std::vector<double> &v, const char *name) {
        for (double e : v)
            if (!std::isfinite(e))
                throw DegeneratePoint(std::string("expansion point: non-finite ") + name);
    };
    finite(beta_c, "beta_c");
    finite(x_c, "x_c");
    finite(y_c, "y_c");
    finite(beta_p, "beta_p");
    finite(x_p, "x_p");
    finite(y_p, "y_p");
    for (double b : beta_c)
        if (b < 0.0)
            throw DegeneratePoint("expansion point: negative beta_c");
    for (double b : beta_p)
        if (b < 0.0)
            throw DegeneratePoint("expansion point: negative beta_p");
}

AffineMinorant minorant_dispersion(double beta0, double D)
{
    if (!(beta0 > 1e-12))
        throw DegeneratePoint("minorant_dispersion: expansion point too close to 0");
    const double u = 1.0 + beta0;
    const double root = std::sqrt(fbl::dispersion(beta0));
    AffineMinorant m;
    m.anchor = beta0;
    m.value = -D * root;
    m.slope = -D / (root * u * u * u);
    return m;
}

ExpDiffMinorant minorant_exp_diff(double x0, double y0)
{
    if (!std::isfinite(x0) || !std::isfinite(y0))
        throw DegeneratePoint("minorant_exp_diff: non-finite expansion point");
    if (x0 - y0 > 700.0)
        throw DegeneratePoint("minorant_exp_diff: exponent overflow");
    return {x0, y0, std::exp(x0 - y0)};
}

AffineMinorant minorant_exp(double y0)
{
    if (!std::isfinite(y0))
        throw DegeneratePoint("minorant_exp: non-finite expansion point");
    if (y0 > 700.0)
        throw DegeneratePoint("minorant_exp: exponent overflow");
    const double e = std::exp(y0);
    return {y0, e, e};
}

namespace
{

// diag(delta I, 1) [[A, A h], [h^H A, h^H A h]] diag(delta I, 1)
CMat lift_term(const CMat &A, const CVec &h, double delta)
{
    const auto M = A.rows();
    CMat out(M + 1, M + 1);
    const CVec Ah = A * h;
    out.topLeftCorner(M, M) = delta * delta * A;
    out.topRightCorner(M, 1) = delta * Ah;
    out.bottomLeftCorner(1, M) = delta * Ah.adjoint();
    out(M, M) = cdouble(h.dot(Ah).real(), 0.0);
    return out;
}

CMat quad_term(const CMat &A, const CVec &h)
{
    CMat out(1, 1);
    out(0, 0) = cdouble(h.dot(A * h).real(), 0.0);
    return out;
}

}  // namespace

LmiBlock lmi_lower_bound(const HermitianAffine &A, const CVec &h_hat, double delta, const AffineExpr &threshold,
                         int multiplier_var, LmiKind kind)
{
    if (!(delta >= 0.0))
        throw std::invalid_argument("lmi_lower_bound: negative radius");
    const int M = A.size;
    if (h_hat.size() != M)
        throw std::invalid_argument("lmi_lower_bound: channel length differs from matrix order");

    LmiBlock blk;
    blk.kind = kind;
    if (delta == 0.0)
    {
        blk.size = 1;
        blk.body = HermitianAffine(1);
        blk.body.constant = quad_term(A.constant, h_hat);
        for (const auto &[i, Ai] : A.terms)
            blk.body.add(i, quad_term(Ai, h_hat));
    }
    else
    {
        if (multiplier_var < 0)
            throw std::invalid_argument("lmi_lower_bound: positive radius needs a multiplier variable");
        blk.size = M + 1;
        blk.body = HermitianAffine(M + 1);
        blk.body.constant = lift_term(A.constant, h_hat, delta);
        for (const auto &[i, Ai] : A.terms)
            blk.body.add(i, lift_term(Ai, h_hat, delta));
        CMat L = CMat::Zero(M + 1, M + 1);
        L.topLeftCorner(M, M).setIdentity();
        L(M, M) = -1.0;
        blk.body.add(multiplier_var, L);
    }
    const int corner = blk.size - 1;
    blk.body.constant(corner, corner) -= threshold.constant;
    for (const auto &[i, c] : threshold.terms)
    {
        CMat E = CMat::Zero(blk.size, blk.size);
        E(corner, corner) = -c;
        blk.body.add(i, E);
    }
    return blk;
}

LmiBlock lmi_upper_bound(const HermitianAffine &B, const CVec &h_hat, double delta, const AffineExpr &cap,
                         int multiplier_var, LmiKind kind)
{
    HermitianAffine negB = B;
    negB *= -1.0;
    return lmi_lower_bound(negB, h_hat, delta, -1.0 * cap, multiplier_var, kind);
}

std::vector<int> add_hermitian_variable(ConicProblem &p, int M, const std::string &name)
{
    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(M * M));
    for (int i = 0; i < M; ++i)
        idx.push_back(p.add_variable(name + "[" + std::to_string(i) + "," + std::to_string(i) + "]"));
    for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j)
        {
            const std::string at = "[" + std::to_string(i) + "," + std::to_string(j) + "]";
            idx.push_back(p.add_variable("re " + name + at));
            idx.push_back(p.add_variable("im " + name + at));
        }
    return idx;
}

HermitianAffine hermitian_variable(const std::vector<int> &idx, int M)
{
    HermitianAffine X(M);
    std::size_t k = 0;
    for (int i = 0; i < M; ++i)
    {
        CMat E = CMat::Zero(M, M);
        E(i, i) = 1.0;
        X.add(idx[k++], E);
    }
    for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j)
        {
            CMat Re = CMat::Zero(M, M);
            Re(i, j) = 1.0;
            Re(j, i) = 1.0;
            X.add(idx[k++], Re);
            CMat Im = CMat::Zero(M, M);
            Im(i, j) = cdouble(0.0, 1.0);
            Im(j, i) = cdouble(0.0, -1.0);
            X.add(idx[k++], Im);
        }
    return X;
}

CMat hermitian_value(const std::vector<int> &idx, int M, std::span<const double> x)
{
    CMat W = CMat::Zero(M, M);
    if (idx.empty())
        return W;
    std::size_t k = 0;
    for (int i = 0; i < M; ++i)
        W(i, i) = x[static_cast<std::size_t>(idx[k++])];
    for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j)
        {
            const double re = x[static_cast<std::size_t>(idx[k++])];
            const double im = x[static_cast<std::size_t>(idx[k++])];
            W(i, j) = cdouble(re, im);
            W(j, i) = cdouble(re, -im);
        }
    return W;
}

void set_hermitian_value(const std::vector<int> &idx, const CMat &W, std::span<double> x)
{
    const auto M = static_cast<int>(W.rows());
    std::size_t k = 0;
    for (int i = 0; i < M; ++i)
        x[static_cast<std::size_t>(idx[k++])] = W(i, i).real();
    for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j)
        {
            const cdouble v = 0.5 * (W(i, j) + std::conj(W(j, i)));
            x[static_cast<std::size_t>(idx[k++])] = v.real();
            x[static_cast<std::size_t>(idx[k++])] = v.imag();
        }
}

namespace
{

std::vector<int> scalars(ConicProblem &p, int K, const std::string &name)
{
    std::vector<int> idx;
    for (int k = 0; k < K; ++k)
        idx.push_back(p.add_variable(name + "[" + std::to_string(k) + "]"));
    return idx;
}

// Multipliers only for users with a positive radius.
std::vector<int> multipliers(ConicProblem &p, const ChannelSet &ch, const std::string &name)
{
    std::vector<int> idx;
    for (int k = 0; k < ch.K(); ++k)
        idx.push_back(ch.delta[k] > 0.0 ? p.add_variable(name + "[" + std::to_string(k) + "]") : -1);
    return idx;
}

void nonnegative(ConicProblem &p, const std::vector<int> &idx, const std::string &label)
{
    for (int i : idx)
        if (i >= 0)
            p.linear_constraints.push_back({{{i, -1.0}}, Relation::LessEqual, 0.0, label});
}

void add_block(Subproblem &sp, LmiBlock blk, const std::string &label)
{
    sp.problem.psd_blocks.push_back({blk.body, label});
    sp.lmis.push_back(std::move(blk));
}

void add_common_matrices(Subproblem &sp, const SystemConfig &cfg, bool common)
{
    auto &L = sp.layout;
    auto &p = sp.problem;
    L.M = cfg.M;
    L.K = cfg.K;
    L.common = common;
    if (common)
        L.W_c = add_hermitian_variable(p, cfg.M, "W_c");
    for (int k = 0; k < cfg.K; ++k)
        L.W.push_back(add_hermitian_variable(p, cfg.M, "W_" + std::to_string(k)));
}

void add_power_and_psd(Subproblem &sp, const SystemConfig &cfg)
{
    auto &L = sp.layout;
    auto &p = sp.problem;
    LinearConstraint power{{}, Relation::LessEqual, cfg.P_max, "power"};
    auto diag = [&](const std::vector<int> &idx) {
        for (int i = 0; i < cfg.M; ++i)
            power.row.emplace_back(idx[static_cast<std::size_t>(i)], 1.0);
    };
    if (L.common)
    {
        diag(L.W_c);
        p.psd_blocks.push_back({hermitian_variable(L.W_c, cfg.M), "W_c psd"});
    }
    for (int k = 0; k < cfg.K; ++k)
    {
        diag(L.W[k]);
        p.psd_blocks.push_back({hermitian_variable(L.W[k], cfg.M), "W_" + std::to_string(k) + " psd"});
    }
    p.linear_constraints.push_back(std::move(power));
}

HermitianAffine sum_private(const VariableLayout &L, int M, int skip)
{
    HermitianAffine S(M);
    for (int j = 0; j < L.K; ++j)
        if (j != skip)
            S += hermitian_variable(L.W[j], M);
    return S;
}

void check_inputs(const SystemConfig &cfg, const ChannelSet &channels)
{
    validate_config(cfg);
    channels.check();
    if (channels.M != cfg.M || channels.K() != cfg.K)
        throw std::invalid_argument("channel set dimensions differ from the configuration");
}

}  // namespace

Subproblem assemble_subproblem(const SystemConfig &cfg, const ChannelSet &channels, const ExpansionPoint &point,
                               const ModelFlags &flags)
{
    check_inputs(cfg, channels);
    point.check();
    const int K = cfg.K, M = cfg.M;
    const bool common = flags.rate_splitting;
    auto sized = [&](const std::vector<double> &v) { return static_cast<int>(v.size()) == K; };
    if (!sized(point.beta_p) || !sized(point.x_p) || !sized(point.y_p) ||
        (common && (!sized(point.beta_c) || !sized(point.x_c) || !sized(point.y_c))))
        throw std::invalid_argument("assemble_subproblem: expansion point has wrong length");

    const std::vector<double> D = fbl::penalties(cfg, flags.finite_blocklength);

    Subproblem sp;
    auto &p = sp.problem;
    auto &L = sp.layout;
    add_common_matrices(sp, cfg, common);
    if (common)
        L.c = scalars(p, K, "c");
    L.t = p.add_variable("t");
    if (common)
    {
        L.beta_c = scalars(p, K, "beta_c");
        L.x_c = scalars(p, K, "x_c");
        L.y_c = scalars(p, K, "y_c");
        L.t_c = scalars(p, K, "t_c");
        L.q_c = scalars(p, K, "q_c");
        L.lambda_c = multipliers(p, channels, "lambda_c");
        L.lambda_bar_c = multipliers(p, channels, "lambda_bar_c");
    }
    L.beta_p = scalars(p, K, "beta_p");
    L.x_p = scalars(p, K, "x_p");
    L.y_p = scalars(p, K, "y_p");
    L.t_p = scalars(p, K, "t_p");
    L.q_p = scalars(p, K, "q_p");
    L.lambda_p = multipliers(p, channels, "lambda_p");
    L.lambda_bar_p = multipliers(p, channels, "lambda_bar_p");

    p.objective = {{L.t, 1.0}};
    const HermitianAffine Z = sum_private(L, M, -1);

    for (int k = 0; k < K; ++k)
    {
        const auto uk = static_cast<std::size_t>(k);
        const std::string tag = "[" + std::to_string(k) + "]";
        const CVec &h = channels.h_hat[uk];
        const double delta = channels.delta[uk];
        const double s2 = cfg.sigma2[uk];

        if (common)
        {
            // sum_j c_j - f2hat(beta_c) <= ln(1 + beta_c)
            const auto f2 = minorant_dispersion(std::max(point.beta_c[uk], kBetaFloor), D[uk]);
            AffineExpr v(-(f2.value - f2.slope * f2.anchor));
            for (int j : L.c)
                v.add(j, 1.0);
            v.add(L.beta_c[uk], -f2.slope);
            p.log_hypographs.push_back({AffineExpr::var(L.beta_c[uk]), v, "common rate" + tag});

            // beta_c <= f1hat(x_c, y_c)
            const auto f1 = minorant_exp_diff(point.x_c[uk], point.y_c[uk]);
            p.linear_constraints.push_back({{{L.beta_c[uk], 1.0}, {L.x_c[uk], -f1.value}, {L.y_c[uk], f1.value}},
                                            Relation::LessEqual,
                                            f1.value * (1.0 - f1.anchor_x + f1.anchor_y),
                                            "common beta" + tag});

            p.exp_epigraphs.push_back({AffineExpr::var(L.x_c[uk]), AffineExpr::var(L.t_c[uk]), "common signal" + tag});

            // q_c <= f3hat(y_c)
            const auto f3 = minorant_exp(point.y_c[uk]);
            p.linear_constraints.push_back({{{L.q_c[uk], 1.0}, {L.y_c[uk], -f3.slope}},
                                            Relation::LessEqual,
                                            f3.value - f3.slope * f3.anchor,
                                            "common interference" + tag});

            add_block(sp,
                      lmi_lower_bound(hermitian_variable(L.W_c, M), h, delta, AffineExpr::var(L.t_c[uk]),
                                      L.lambda_c[uk], LmiKind::Gamma),
                      "Gamma" + tag);
            AffineExpr cap = AffineExpr::var(L.q_c[uk]);
            cap.constant = -s2;
            add_block(sp, lmi_upper_bound(Z, h, delta, cap, L.lambda_bar_c[uk], LmiKind::Psi), "Psi" + tag);
        }

        // t - c_k - f4hat(beta_p) <= ln(1 + beta_p)
        const auto f4 = minorant_dispersion(std::max(point.beta_p[uk], kBetaFloor), D[uk]);
        AffineExpr v(-(f4.value - f4.slope * f4.anchor));
        v.add(L.t, 1.0);
        if (common)
            v.add(L.c[uk], -1.0);
        v.add(L.beta_p[uk], -f4.slope);
        p.log_hypographs.push_back({AffineExpr::var(L.beta_p[uk]), v, "private rate" + tag});

        const auto f6 = minorant_exp_diff(point.x_p[uk], point.y_p[uk]);
        p.linear_constraints.push_back({{{L.beta_p[uk], 1.0}, {L.x_p[uk], -f6.value}, {L.y_p[uk], f6.value}},
                                        Relation::LessEqual,
                                        f6.value * (1.0 - f6.anchor_x + f6.anchor_y),
                                        "private beta" + tag});

        p.exp_epigraphs.push_back({AffineExpr::var(L.x_p[uk]), AffineExpr::var(L.t_p[uk]), "private signal" + tag});

        const auto f5 = minorant_exp(point.y_p[uk]);
        p.linear_constraints.push_back({{{L.q_p[uk], 1.0}, {L.y_p[uk], -f5.slope}},
                                        Relation::LessEqual,
                                        f5.value - f5.slope * f5.anchor,
                                        "private interference" + tag});

        add_block(sp,
                  lmi_lower_bound(hermitian_variable(L.W[uk], M), h, delta, AffineExpr::var(L.t_p[uk]),
                                  L.lambda_p[uk], LmiKind::Omega),
                  "Omega" + tag);
        AffineExpr cap = AffineExpr::var(L.q_p[uk]);
        cap.constant = -s2;
        add_block(sp, lmi_upper_bound(sum_private(L, M, k), h, delta, cap, L.lambda_bar_p[uk], LmiKind::Theta),
                  "Theta" + tag);
    }

    add_power_and_psd(sp, cfg);
    nonnegative(p, L.c, "c >= 0");
    nonnegative(p, L.lambda_c, "multiplier >= 0");
    nonnegative(p, L.lambda_bar_c, "multiplier >= 0");
    nonnegative(p, L.lambda_p, "multiplier >= 0");
    nonnegative(p, L.lambda_bar_p, "multiplier >= 0");
    return sp;
}

Subproblem assemble_feasibility(const SystemConfig &cfg, const ChannelSet &channels, const std::vector<double> &c0,
                                std::vector<double> a_c, std::vector<double> a_p, const ModelFlags &flags)
{
    check_inputs(cfg, channels);
    const int K = cfg.K, M = cfg.M;
    const bool common = flags.rate_splitting;
    if (common && static_cast<int>(c0.size()) != K)
        throw std::invalid_argument("assemble_feasibility: c0 must have one entry per user");
    for (double c : c0)
        if (!(c >= 0.0))
            throw std::invalid_argument("assemble_feasibility: c0 must be nonnegative");

    const std::vector<double> D = fbl::penalties(cfg, flags.finite_blocklength);
    double csum = 0.0;
    for (double c : c0)
        csum += c;
    if (common && a_c.empty())
        for (int k = 0; k < K; ++k)
            a_c.push_back(fbl::target_sinr_bisect(csum, D[static_cast<std::size_t>(k)]));
    if (a_p.empty())
        for (int k = 0; k < K; ++k)
            a_p.push_back(fbl::target_sinr_bisect(0.0, D[static_cast<std::size_t>(k)]));
    if ((common && static_cast<int>(a_c.size()) != K) || static_cast<int>(a_p.size()) != K)
        throw std::invalid_argument("assemble_feasibility: target vectors must have one entry per user");

    Subproblem sp;
    auto &p = sp.problem;
    auto &L = sp.layout;
    add_common_matrices(sp, cfg, common);
    L.margin = p.add_variable("margin");
    if (common)
        L.lambda_c = multipliers(p, channels, "eta_c");
    L.lambda_p = multipliers(p, channels, "eta_p");
    p.objective = {{L.margin, 1.0}};

    for (int k = 0; k < K; ++k)
    {
        const auto uk = static_cast<std::size_t>(k);
        const std::string tag = "[" + std::to_string(k) + "]";
        const CVec &h = channels.h_hat[uk];
        const double delta = channels.delta[uk];
        const double s2 = cfg.sigma2[uk];
        if (common)
        {
            HermitianAffine U = sum_private(L, M, -1);
            U *= -a_c[uk];
            U += hermitian_variable(L.W_c, M);
            AffineExpr thr = AffineExpr::var(L.margin);
            thr.constant = s2 * a_c[uk];
            add_block(sp, lmi_lower_bound(U, h, delta, thr, L.lambda_c[uk], LmiKind::XiCommon), "Xi_c" + tag);
        }
        HermitianAffine Q = sum_private(L, M, k);
        Q *= -a_p[uk];
        Q += hermitian_variable(L.W[uk], M);
        AffineExpr thr = AffineExpr::var(L.margin);
        thr.constant = s2 * a_p[uk];
        add_block(sp, lmi_lower_bound(Q, h, delta, thr, L.lambda_p[uk], LmiKind::XiPrivate), "Xi_p" + tag);
    }
    add_power_and_psd(sp, cfg);
    nonnegative(p, L.lambda_c, "multiplier >= 0");
    nonnegative(p, L.lambda_p, "multiplier >= 0");
    return sp;
}

LiftedSolution unpack(const VariableLayout &L, std::span<const double> x)
{
    LiftedSolution s;
    s.W_c = L.common ? hermitian_value(L.W_c, L.M, x) : CMat::Zero(L.M, L.M);
    for (const auto &idx : L.W)
        s.W.push_back(hermitian_value(idx, L.M, x));
    auto read = [&](const std::vector<int> &idx) {
        std::vector<double> v;
        for (int i : idx)
            v.push_back(i >= 0 ? x[static_cast<std::size_t>(i)] : 0.0);
        return v;
    };
    s.c = L.c.empty() ? std::vector<double>(static_cast<std::size_t>(L.K), 0.0) : read(L.c);
    s.t = L.t >= 0 ? x[static_cast<std::size_t>(L.t)] : (L.margin >= 0 ? x[static_cast<std::size_t>(L.margin)] : 0.0);
    s.beta_c = read(L.beta_c);
    s.x_c = read(L.x_c);
    s.y_c = read(L.y_c);
    s.t_c = read(L.t_c);
    s.q_c = read(L.q_c);
    s.beta_p = read(L.beta_p);
    s.x_p = read(L.x_p);
    s.y_p = read(L.y_p);
    s.t_p = read(L.t_p);
    s.q_p = read(L.q_p);
    s.lambda_c = read(L.lambda_c);
    s.lambda_bar_c = read(L.lambda_bar_c);
    s.lambda_p = read(L.lambda_p);
    s.lambda_bar_p = read(L.lambda_bar_p);
    return s;
}

std::vector<double> pack(const VariableLayout &L, int n_vars, const LiftedSolution &s)
{
    std::vector<double> x(static_cast<std::size_t>(n_vars), 0.0);
    if (L.common)
        set_hermitian_value(L.W_c, s.W_c, x);
    for (std::size_t k = 0; k < L.W.size(); ++k)
        set_hermitian_value(L.W[k], s.W[k], x);
    auto write = [&](const std::vector<int> &idx, const std::vector<double> &v) {
        for (std::size_t k = 0; k < idx.size() && k < v.size(); ++k)
            if (idx[k] >= 0)
                x[static_cast<std::size_t>(idx[k])] = v[k];
    };
    write(L.c, s.c);
    if (L.t >= 0)
        x[static_cast<std::size_t>(L.t)] = s.t;
    write(L.beta_c, s.beta_c);
    write(L.x_c, s.x_c);
    write(L.y_c, s.y_c);
    write(L.t_c, s.t_c);
    write(L.q_c, s.q_c);
    write(L.beta_p, s.beta_p);
    write(L.x_p, s.x_p);
    write(L.y_p, s.y_p);
    write(L.t_p, s.t_p);
    write(L.q_p, s.q_p);
    write(L.lambda_c, s.lambda_c);
    write(L.lambda_bar_c, s.lambda_bar_c);
    write(L.lambda_p, s.lambda_p);
    write(L.lambda_bar_p, s.lambda_bar_p);
    return x;
}

ExpansionPoint expansion_from_lifted(const LiftedSolution &s)
{
    return {s.beta_c, s.x_c, s.y_c, s.beta_p, s.x_p, s.y_p};
}

}  // namespace rsbf::sdr
