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

// Primal log-barrier path-following method.
//
// Equalities are eliminated through a null-space basis, leaving
//   minimize f.z  s.t.  G z <= h,  exp(u_j(z)) <= v_j(z),  F_b(z) >= 0,  |z_i| <= R
// with barrier
//   phi(z) = -sum log(h - Gz) - sum [log(log v - u) + log v] - sum log det F_b
//            - sum log(R^2 - z_i^2).
// Each centering step uses damped Newton (step 1 / (1 + lambda) outside the
// quadratic region), which needs no function values, only domain checks.
// Phase I minimises a common slack s over the relaxed constraints.

#include "rsbf/conic_ir.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsbf::conic
{
namespace
{

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct ExpRow
{
    VectorXd au, av;
    double bu = 0.0, bv = 0.0;
};

struct PsdRow
{
    int size = 0;
    MatrixXd F0;
    std::vector<int> idx;
    std::vector<MatrixXd> F;
};

struct Barrier
{
    int n = 0;
    MatrixXd G;
    VectorXd h;
    std::vector<ExpRow> exps;
    std::vector<PsdRow> psds;
    VectorXd f;
    double box = 1e8;
    int boxed = 0;  // the box applies to z[0 .. boxed)

    double nu() const
    {
        double v = static_cast<double>(G.rows()) + 2.0 * static_cast<double>(exps.size()) + 2.0 * boxed;
        for (const auto &p : psds)
            v += p.size;
        return v;
    }

    MatrixXd psd_value(const PsdRow &p, const VectorXd &z) const
    {
        MatrixXd F = p.F0;
        for (std::size_t j = 0; j < p.idx.size(); ++j)
            F.noalias() += z(p.idx[j]) * p.F[j];
        return F;
    }

    bool in_domain(const VectorXd &z) const
    {
        if (!z.allFinite())
            return false;
        for (int i = 0; i < boxed; ++i)
            if (!(std::abs(z(i)) < box))
                return false;
        if (G.rows() > 0 && !((h - G * z).array() > 0.0).all())
            return false;
        for (const auto &e : exps)
        {
            const double u = e.au.dot(z) + e.bu;
            const double v = e.av.dot(z) + e.bv;
            if (!(v > 0.0) || !(std::log(v) - u > 0.0))
                return false;
        }
        for (const auto &p : psds)
        {
            Eigen::LLT<MatrixXd> llt(psd_value(p, z));
            if (llt.info() != Eigen::Success || !llt.matrixLLT().diagonal().allFinite() ||
                (llt.matrixLLT().diagonal().array() <= 0.0).any())
                return false;
        }
        return true;
    }

    // phi(z), +inf outside the domain.
    double value(const VectorXd &z) const
    {
        constexpr double inf = std::numeric_limits<double>::infinity();
        if (!z.allFinite())
            return inf;
        double phi = 0.0;
        for (int i = 0; i < boxed; ++i)
        {
            const double a = box - z(i), b = box + z(i);
            if (!(a > 0.0 && b > 0.0))
                return inf;
            phi -= std::log(a) + std::log(b);
        }
        if (G.rows() > 0)
        {
            const VectorXd r = h - G * z;
            if (!(r.array() > 0.0).all())
                return inf;
            phi -= r.array().log().sum();
        }
        for (const auto &e : exps)
        {
            const double u = e.au.dot(z) + e.bu;
            const double v = e.av.dot(z) + e.bv;
            if (!(v > 0.0) || !(std::log(v) - u > 0.0))
                return inf;
            phi -= std::log(std::log(v) - u) + std::log(v);
        }
        for (const auto &p : psds)
        {
            Eigen::LLT<MatrixXd> llt(psd_value(p, z));
            if (llt.info() != Eigen::Success)
                return inf;
            const VectorXd d = llt.matrixLLT().diagonal();
            if (!d.allFinite() || (d.array() <= 0.0).any())
                return inf;
            phi -= 2.0 * d.array().log().sum();
        }
        return std::isfinite(phi) ? phi : inf;
    }

    bool derivatives(const VectorXd &z, VectorXd &g, MatrixXd &H) const
    {
        g = VectorXd::Zero(n);
        H = MatrixXd::Zero(n, n);
        for (int i = 0; i < boxed; ++i)
        {
            const double a = box - z(i), b = box + z(i);
            if (!(a > 0.0 && b > 0.0))
                return false;
            g(i) += 1.0 / a - 1.0 / b;
            H(i, i) += 1.0 / (a * a) + 1.0 / (b * b);
        }
        if (G.rows() > 0)
        {
            const VectorXd r = h - G * z;
            if (!(r.array() > 0.0).all())
                return false;
            const VectorXd inv = r.cwiseInverse();
            g.noalias() += G.transpose() * inv;
            const MatrixXd Gs = inv.asDiagonal() * G;
            H.noalias() += Gs.transpose() * Gs;
        }
        for (const auto &e : exps)
        {
            const double u = e.au.dot(z) + e.bu;
            const double v = e.av.dot(z) + e.bv;
            if (!(v > 0.0))
                return false;
            const double q = std::log(v) - u;
            if (!(q > 0.0))
                return false;
            const double du = 1.0 / q;
            const double dv = -1.0 / (v * q) - 1.0 / v;
            const double huu = 1.0 / (q * q);
            const double huv = -1.0 / (v * q * q);
            const double hvv = 1.0 / (v * v * q) + 1.0 / (v * v * q * q) + 1.0 / (v * v);
            g.noalias() += du * e.au + dv * e.av;
            H.noalias() += huu * e.au * e.au.transpose();
            H.noalias() += huv * (e.au * e.av.transpose() + e.av * e.au.transpose());
            H.noalias() += hvv * e.av * e.av.transpose();
        }
        for (const auto &p : psds)
        {
            Eigen::LLT<MatrixXd> llt(psd_value(p, z));
            if (llt.info() != Eigen::Success)
                return false;
            const auto L = llt.matrixL();
            const int s = p.size;
            const auto m = static_cast<Eigen::Index>(p.idx.size());
            MatrixXd V(static_cast<Eigen::Index>(s) * s, m);
            for (Eigen::Index j = 0; j < m; ++j)
            {
                MatrixXd X = L.solve(p.F[static_cast<std::size_t>(j)]);
                MatrixXd S = L.solve(X.transpose());
                g(p.idx[static_cast<std::size_t>(j)]) -= S.trace();
                V.col(j) = Eigen::Map<const VectorXd>(S.data(), S.size());
            }
            const MatrixXd Hb = V.transpose() * V;
            for (Eigen::Index a = 0; a < m; ++a)
                for (Eigen::Index b = 0; b < m; ++b)
                    H(p.idx[static_cast<std::size_t>(a)], p.idx[static_cast<std::size_t>(b)]) += Hb(a, b);
        }
        return g.allFinite() && H.allFinite();
    }
};

bool newton_direction(const MatrixXd &H, const VectorXd &grad, VectorXd &dz)
{
    const auto n = H.rows();
    VectorXd d(n);
    for (Eigen::Index i = 0; i < n; ++i)
        d(i) = H(i, i) > 0.0 ? 1.0 / std::sqrt(H(i, i)) : 1.0;
    MatrixXd Hs = d.asDiagonal() * H * d.asDiagonal();
    const VectorXd rhs = -(d.asDiagonal() * grad);
    double jitter = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt)
    {
        if (jitter > 0.0)
            Hs.diagonal().array() += jitter;
        Eigen::LDLT<MatrixXd> ldlt(Hs);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive())
        {
            const VectorXd y = ldlt.solve(rhs);
            if (y.allFinite())
            {
                dz = d.asDiagonal() * y;
                return true;
            }
        }
        jitter = jitter == 0.0 ? 1e-14 : jitter * 100.0;
    }
    return false;
}

struct CenterOutcome
{
    bool ok = true;
    double lambda2 = 0.0;
};

CenterOutcome center(const Barrier &B, VectorXd &z, double tau, int &budget, int &steps)
{
    constexpr int kMaxSteps = 80;
    constexpr double kTol = 1e-9;
    VectorXd g, dz;
    MatrixXd H;
    CenterOutcome out;
    double fz = tau * B.f.dot(z) + B.value(z);
    double floor_prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < kMaxSteps; ++it)
    {
        if (budget <= 0)
            return out;
        if (!B.derivatives(z, g, H))
            return {false, out.lambda2};
        const VectorXd grad = tau * B.f + g;
        if (!newton_direction(H, grad, dz))
            return {false, out.lambda2};
        out.lambda2 = std::max(0.0, -grad.dot(dz));
        if (out.lambda2 <= kTol)
            return out;
        if (out.lambda2 < 1e-6)
        {
            // Below this level the decrement is dominated by rounding once it stops shrinking.
            if (out.lambda2 > 0.25 * floor_prev)
                return out;
            floor_prev = out.lambda2;
        }
        // Backtracking on the barrier value; rounding can hide the decrease once
        // lambda is tiny, so small steps inside the domain are accepted as is.
        double a = 1.0;
        VectorXd zn;
        double fn = 0.0;
        int halvings = 0;
        for (; halvings < 60; ++halvings, a *= 0.5)
        {
            zn = z + a * dz;
            fn = tau * B.f.dot(zn) + B.value(zn);
            if (!std::isfinite(fn))
                continue;
            if (fn <= fz - 0.25 * a * out.lambda2 || out.lambda2 < 1e-6)
                break;
        }
        if (halvings == 60)
            return out;  // stalled; keep the last interior point
        z = zn;
        fz = fn;
        --budget;
        ++steps;
        if (a * dz.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + z.lpNorm<Eigen::Infinity>()))
            return out;
    }
    return out;
}

// tau making z closest to central: argmin_tau || tau f + g ||_{H^-1}.
double central_tau(const Barrier &B, const VectorXd &z)
{
    VectorXd g;
    MatrixXd H;
    if (!B.derivatives(z, g, H))
        return 1.0;
    Eigen::LDLT<MatrixXd> ldlt(H);
    if (ldlt.info() != Eigen::Success)
        return 1.0;
    const VectorXd Hf = ldlt.solve(B.f);
    const double ff = B.f.dot(Hf);
    if (!(ff > 0.0) || !std::isfinite(ff))
        return 1.0;
    const double tau = -g.dot(Hf) / ff;
    if (!std::isfinite(tau))
        return 1.0;
    return std::clamp(tau, 1e-3, 1e6);
}

Barrier phase_one(const Barrier &B, double floor)
{
    Barrier P;
    P.n = B.n + 1;
    P.box = B.box;
    P.boxed = B.n;
    P.G = MatrixXd::Zero(B.G.rows() + 1, P.n);
    P.h = VectorXd::Zero(B.G.rows() + 1);
    if (B.G.rows() > 0)
    {
        P.G.topLeftCorner(B.G.rows(), B.n) = B.G;
        P.G.block(0, B.n, B.G.rows(), 1).setConstant(-1.0);
        P.h.head(B.G.rows()) = B.h;
    }
    P.G(B.G.rows(), B.n) = -1.0;  // s >= -floor
    P.h(B.G.rows()) = floor;
    for (const auto &e : B.exps)
    {
        ExpRow r;
        r.au = VectorXd::Zero(P.n);
        r.av = VectorXd::Zero(P.n);
        r.au.head(B.n) = e.au;
        r.av.head(B.n) = e.av;
        r.au(B.n) = -1.0;
        r.av(B.n) = 1.0;
        r.bu = e.bu;
        r.bv = e.bv;
        P.exps.push_back(std::move(r));
    }
    for (const auto &p : B.psds)
    {
        PsdRow r = p;
        r.idx.push_back(B.n);
        r.F.push_back(MatrixXd::Identity(p.size, p.size));
        P.psds.push_back(std::move(r));
    }
    P.f = VectorXd::Zero(P.n);
    P.f(B.n) = 1.0;
    return P;
}

// Smallest s placing (z, s) inside the phase I domain, with some margin.
double initial_slack(const Barrier &P, const VectorXd &z)
{
    VectorXd zs(P.n);
    zs.head(P.n - 1) = z;
    const auto last = static_cast<Eigen::Index>(P.n - 1);
    double need = 0.0;
    // Rows other than the floor row.
    for (Eigen::Index r = 0; r + 1 < P.G.rows(); ++r)
        need = std::max(need, P.G.row(r).head(last).dot(z) - P.h(r));
    for (const auto &p : P.psds)
    {
        MatrixXd F = p.F0;
        for (std::size_t j = 0; j + 1 < p.idx.size(); ++j)
            F.noalias() += z(p.idx[j]) * p.F[j];
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(F, Eigen::EigenvaluesOnly);
        need = std::max(need, -es.eigenvalues().minCoeff());
    }
    double s = 1.0 + 1.5 * need;
    for (int it = 0; it < 200; ++it)
    {
        zs(last) = s;
        if (P.in_domain(zs))
            return s;
        s = 2.0 * s + 1.0;
    }
    return std::numeric_limits<double>::infinity();
}

struct Lowered
{
    Barrier B;
    VectorXd x_part;  // particular solution of the equalities
    MatrixXd N;       // null-space basis, x = x_part + N z (identity when no equalities)
    bool eliminated = false;
    bool consistent = true;
};

VectorXd dense_row(const Terms &terms, int n)
{
    VectorXd a = VectorXd::Zero(n);
    for (const auto &[i, c] : terms)
        a(i) += c;
    return a;
}

Lowered lower(const ConicProblem &p, double box)
{
    Lowered out;
    const int n = p.n_vars;

    std::vector<const LinearConstraint *> eqs, ineqs;
    for (const auto &row : p.linear_constraints)
        (row.relation == Relation::Equal ? eqs : ineqs).push_back(&row);

    int dim = n;
    if (!eqs.empty())
    {
        MatrixXd A(static_cast<Eigen::Index>(eqs.size()), n);
        VectorXd b(static_cast<Eigen::Index>(eqs.size()));
        for (std::size_t r = 0; r < eqs.size(); ++r)
        {
            A.row(static_cast<Eigen::Index>(r)) = dense_row(eqs[r]->row, n).transpose();
            b(static_cast<Eigen::Index>(r)) = eqs[r]->rhs;
        }
        Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const double thr = 1e-12 * std::max(1.0, svd.singularValues().size() ? svd.singularValues()(0) : 0.0);
        int rank = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > thr)
                ++rank;
        svd.setThreshold(thr / std::max(1.0, svd.singularValues().size() ? svd.singularValues()(0) : 1.0));
        out.x_part = svd.solve(b);
        out.consistent = (A * out.x_part - b).norm() <= 1e-9 * (1.0 + b.norm());
        out.N = svd.matrixV().rightCols(n - rank);
        out.eliminated = true;
        dim = n - rank;
    }
    else
    {
        out.x_part = VectorXd::Zero(n);
    }

    auto map_row = [&](const VectorXd &a, double c, VectorXd &row, double &constant) {
        if (out.eliminated)
        {
            row = out.N.transpose() * a;
            constant = c + a.dot(out.x_part);
        }
        else
        {
            row = a;
            constant = c;
        }
    };

    Barrier &B = out.B;
    B.n = dim;
    B.box = box;
    B.boxed = dim;
    B.G = MatrixXd::Zero(static_cast<Eigen::Index>(ineqs.size() + p.log_hypographs.size()), dim);
    B.h = VectorXd::Zero(B.G.rows());
    Eigen::Index r = 0;
    for (const auto *row : ineqs)
    {
        VectorXd g;
        double c;
        map_row(dense_row(row->row, n), 0.0, g, c);
        B.G.row(r) = g.transpose();
        B.h(r) = row->rhs - c;
        ++r;
    }
    auto add_exp = [&](const AffineExpr &u, const AffineExpr &v) {
        ExpRow e;
        map_row(dense_row(u.terms, n), u.constant, e.au, e.bu);
        map_row(dense_row(v.terms, n), v.constant, e.av, e.bv);
        B.exps.push_back(std::move(e));
    };
    for (const auto &e : p.exp_epigraphs)
        add_exp(e.u, e.v);
    for (const auto &lh : p.log_hypographs)
    {
        // v <= ln(1 + u)  <=>  exp(v) <= 1 + u; plus u >= 0 as a linear row.
        AffineExpr one_plus_u = lh.u;
        one_plus_u.constant += 1.0;
        add_exp(lh.v, one_plus_u);
        VectorXd g;
        double c;
        map_row(-dense_row(lh.u.terms, n), -lh.u.constant, g, c);
        B.G.row(r) = g.transpose();
        B.h(r) = -c;
        ++r;
    }
    for (const auto &blk : p.psd_blocks)
    {
        const SymmetricAffine S = real_embedding(blk.map);
        PsdRow row;
        row.size = S.size;
        if (!out.eliminated)
        {
            row.F0 = S.constant;
            for (const auto &[i, Fi] : S.terms)
            {
                if (Fi.cwiseAbs().maxCoeff() == 0.0)
                    continue;
                row.idx.push_back(i);
                row.F.push_back(Fi);
            }
        }
        else
        {
            row.F0 = S.constant;
            for (const auto &[i, Fi] : S.terms)
                row.F0 += out.x_part(i) * Fi;
            for (int j = 0; j < dim; ++j)
            {
                MatrixXd Fj = MatrixXd::Zero(S.size, S.size);
                for (const auto &[i, Fi] : S.terms)
                    if (out.N(i, j) != 0.0)
                        Fj += out.N(i, j) * Fi;
                if (Fj.cwiseAbs().maxCoeff() > 1e-14)
                {
                    row.idx.push_back(j);
                    row.F.push_back(std::move(Fj));
                }
            }
        }
        B.psds.push_back(std::move(row));
    }
    VectorXd c;
    double c0;
    map_row(-dense_row(p.objective, n), 0.0, c, c0);
    B.f = c;
    return out;
}

VectorXd to_original(const Lowered &L, const VectorXd &z)
{
    return L.eliminated ? VectorXd(L.x_part + L.N * z) : z;
}

}  // namespace

SolveOutcome solve(const ConicProblem &problem, const SolverSettings &settings)
{
    problem.check();
    SolveOutcome out;
    const Lowered L = lower(problem, settings.box_radius);
    if (!L.consistent)
    {
        out.status = SolveStatus::Infeasible;
        out.message = "inconsistent equality constraints";
        return out;
    }
    const Barrier &B = L.B;
    int budget = settings.max_newton_steps;
    int steps = 0;

    auto finish = [&](const VectorXd &z, double gap, SolveStatus hint, std::string msg) {
        const VectorXd x = to_original(L, z);
        out.primal.assign(x.data(), x.data() + x.size());
        out.objective_value = 0.0;
        for (const auto &[i, c] : problem.objective)
            out.objective_value += c * x(i);
        out.primal_residual = max_violation(problem, out.primal);
        out.duality_gap = gap;
        out.relative_gap = gap / std::max(1.0, std::abs(out.objective_value));
        out.newton_steps = steps;
        out.message = std::move(msg);
        const bool boxed = B.n > 0 && z.lpNorm<Eigen::Infinity>() > 0.5 * B.box;
        if (hint != SolveStatus::Optimal || boxed)
            out.status = boxed ? SolveStatus::Failed : hint;
        else if (out.relative_gap <= settings.accept_tol && out.primal_residual <= settings.accept_tol)
            out.status = SolveStatus::Optimal;
        else if (out.relative_gap <= settings.inaccurate_tol && out.primal_residual <= settings.inaccurate_tol)
            out.status = SolveStatus::Inaccurate;
        else
            out.status = SolveStatus::Failed;
        if (boxed)
            out.message = "unbounded direction hit the variable box";
        return out;
    };

    VectorXd z = VectorXd::Zero(B.n);
    bool warm = false;
    if (!settings.initial_point.empty() && static_cast<int>(settings.initial_point.size()) == problem.n_vars)
    {
        const VectorXd x0 = Eigen::Map<const VectorXd>(settings.initial_point.data(), problem.n_vars);
        VectorXd z0 = L.eliminated ? VectorXd(L.N.transpose() * (x0 - L.x_part)) : x0;
        if (z0.allFinite())
        {
            warm = B.in_domain(z0);
            z = z0.cwiseMax(-0.5 * B.box).cwiseMin(0.5 * B.box);
        }
    }

    if (!warm && !B.in_domain(z))
    {
        const Barrier P = phase_one(B, 1.0);
        const double s0 = initial_slack(P, z);
        if (!std::isfinite(s0))
            return finish(z, std::numeric_limits<double>::infinity(), SolveStatus::Failed,
                          "phase I could not find a starting slack");
        VectorXd zs(P.n);
        zs.head(B.n) = z;
        zs(B.n) = s0;
        double tau = 1.0 / std::max(1.0, s0);
        const double nu1 = P.nu();
        bool found = false;
        for (int outer = 0; outer < 200; ++outer)
        {
            const CenterOutcome c = center(P, zs, tau, budget, steps);
            if (zs(B.n) < 0.0 && B.in_domain(zs.head(B.n)))
            {
                found = true;
                break;
            }
            if (!c.ok)
                return finish(zs.head(B.n), std::numeric_limits<double>::infinity(), SolveStatus::Failed,
                              "phase I numerical breakdown");
            const double lower_bound = zs(B.n) - nu1 / tau;
            if (lower_bound > 0.0)
            {
                out.status = SolveStatus::Infeasible;
                out.message = "phase I certificate: minimal slack >= " + std::to_string(lower_bound);
                out.newton_steps = steps;
                return out;
            }
            if (nu1 / tau < 1e-13 * std::max(1.0, s0) || budget <= 0)
            {
                out.newton_steps = steps;
                if (zs(B.n) > 1e-10 * std::max(1.0, s0))
                {
                    out.status = SolveStatus::Infeasible;
                    out.message = "phase I optimum positive";
                }
                else
                {
                    out.status = SolveStatus::Failed;
                    out.message = "no strictly feasible point found";
                }
                return out;
            }
            tau *= settings.growth;
        }
        if (!found)
            return finish(zs.head(B.n), std::numeric_limits<double>::infinity(), SolveStatus::Failed,
                          "phase I iteration limit");
        z = zs.head(B.n);
    }

    const double nu = B.nu();
    double tau = central_tau(B, z);
    double gap = std::numeric_limits<double>::infinity();
    bool healthy = true;
    int recenterings = 0;
    for (int outer = 0; outer < 400; ++outer)
    {
        const CenterOutcome c = center(B, z, tau, budget, steps);
        if (!c.ok)
        {
            healthy = false;
            break;
        }
        // Suboptimality bound of an approximately centred point.
        const double lambda = std::sqrt(c.lambda2);
        if (lambda < 0.5)
            gap = (nu + lambda * (lambda + std::sqrt(nu)) / (1.0 - lambda)) / tau;
        if (budget <= 0)
            break;
        if (lambda >= 0.5)
        {
            if (++recenterings > 20)
            {
                healthy = false;
                break;
            }
            continue;
        }
        const double obj = -B.f.dot(z);
        if (gap <= settings.gap_tol * std::max(1.0, std::abs(obj)))
            break;
        tau *= settings.growth;
    }
    return finish(z, gap, SolveStatus::Optimal, healthy ? "" : "numerical breakdown during centering");
}

}  // namespace rsbf::conic
