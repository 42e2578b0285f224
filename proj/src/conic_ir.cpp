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

#include "rsbf/conic_ir.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsbf::conic
{

AffineExpr AffineExpr::var(int index, double coef)
{
    AffineExpr e;
    e.terms.emplace_back(index, coef);
    return e;
}

AffineExpr &AffineExpr::add(int index, double coef)
{
    for (auto &[i, c] : terms)
        if (i == index)
        {
            c += coef;
            return *this;
        }
    terms.emplace_back(index, coef);
    return *this;
}

AffineExpr &AffineExpr::operator+=(const AffineExpr &other)
{
    for (const auto &[i, c] : other.terms)
        add(i, c);
    constant += other.constant;
    return *this;
}

AffineExpr &AffineExpr::operator-=(const AffineExpr &other)
{
    for (const auto &[i, c] : other.terms)
        add(i, -c);
    constant -= other.constant;
    return *this;
}

AffineExpr &AffineExpr::operator*=(double s)
{
    for (auto &term : terms)
        term.second *= s;
    constant *= s;
    return *this;
}

double AffineExpr::eval(std::span<const double> x) const
{
    double v = constant;
    for (const auto &[i, c] : terms)
        v += c * x[static_cast<std::size_t>(i)];
    return v;
}

AffineExpr operator+(AffineExpr a, const AffineExpr &b) { return a += b; }
AffineExpr operator-(AffineExpr a, const AffineExpr &b) { return a -= b; }
AffineExpr operator*(double s, AffineExpr a) { return a *= s; }

HermitianAffine::HermitianAffine(int n) : size(n), constant(CMat::Zero(n, n)) {}

HermitianAffine &HermitianAffine::add(int index, const CMat &coef)
{
    for (auto &[i, F] : terms)
        if (i == index)
        {
            F += coef;
            return *this;
        }
    terms.emplace_back(index, coef);
    return *this;
}

HermitianAffine &HermitianAffine::add_constant(const CMat &c)
{
    constant += c;
    return *this;
}

HermitianAffine &HermitianAffine::operator+=(const HermitianAffine &other)
{
    if (other.size != size)
        throw std::invalid_argument("HermitianAffine: size mismatch");
    constant += other.constant;
    for (const auto &[i, F] : other.terms)
        add(i, F);
    return *this;
}

HermitianAffine &HermitianAffine::operator*=(double s)
{
    constant *= s;
    for (auto &term : terms)
        term.second *= s;
    return *this;
}

CMat HermitianAffine::eval(std::span<const double> x) const
{
    CMat F = constant;
    for (const auto &[i, Fi] : terms)
        F += x[static_cast<std::size_t>(i)] * Fi;
    return F;
}

Eigen::MatrixXd SymmetricAffine::eval(std::span<const double> x) const
{
    Eigen::MatrixXd F = constant;
    for (const auto &[i, Fi] : terms)
        F += x[static_cast<std::size_t>(i)] * Fi;
    return F;
}

int ConicProblem::add_variable(std::string name)
{
    var_names.resize(static_cast<std::size_t>(n_vars));
    var_names.push_back(std::move(name));
    return n_vars++;
}

namespace
{

void check_terms(const Terms &terms, int n, const std::string &where)
{
    for (const auto &[i, c] : terms)
    {
        if (i < 0 || i >= n)
            throw std::invalid_argument(where + ": variable index " + std::to_string(i) + " out of range");
        if (!std::isfinite(c))
            throw std::invalid_argument(where + ": non-finite coefficient");
    }
}

}  // namespace

void ConicProblem::check() const
{
    if (n_vars < 0)
        throw std::invalid_argument("ConicProblem: negative variable count");
    check_terms(objective, n_vars, "objective");
    for (const auto &row : linear_constraints)
        check_terms(row.row, n_vars, "linear '" + row.label + "'");
    for (const auto &e : exp_epigraphs)
    {
        check_terms(e.u.terms, n_vars, "exp '" + e.label + "'");
        check_terms(e.v.terms, n_vars, "exp '" + e.label + "'");
    }
    for (const auto &e : log_hypographs)
    {
        check_terms(e.u.terms, n_vars, "log '" + e.label + "'");
        check_terms(e.v.terms, n_vars, "log '" + e.label + "'");
    }
    for (const auto &b : psd_blocks)
    {
        const auto &F = b.map;
        if (F.constant.rows() != F.size || F.constant.cols() != F.size)
            throw std::invalid_argument("psd '" + b.label + "': constant has wrong shape");
        if (hermitian_defect(F.constant) > 1e-9 * (1.0 + F.constant.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("psd '" + b.label + "': constant not Hermitian");
        for (const auto &[i, Fi] : F.terms)
        {
            if (i < 0 || i >= n_vars)
                throw std::invalid_argument("psd '" + b.label + "': variable index out of range");
            if (Fi.rows() != F.size || Fi.cols() != F.size)
                throw std::invalid_argument("psd '" + b.label + "': coefficient has wrong shape");
            if (hermitian_defect(Fi) > 1e-9 * (1.0 + Fi.cwiseAbs().maxCoeff()))
                throw std::invalid_argument("psd '" + b.label + "': coefficient not Hermitian");
        }
    }
}

std::string_view to_string(SolveStatus status)
{
    switch (status)
    {
    case SolveStatus::Optimal:
        return "optimal";
    case SolveStatus::Infeasible:
        return "infeasible";
    case SolveStatus::Inaccurate:
        return "inaccurate";
    case SolveStatus::Failed:
        return "failed";
    }
    return "unknown";
}

Eigen::MatrixXd real_embedding(const CMat &H)
{
    const auto n = H.rows();
    Eigen::MatrixXd E(2 * n, 2 * n);
    E.topLeftCorner(n, n) = H.real();
    E.topRightCorner(n, n) = -H.imag();
    E.bottomLeftCorner(n, n) = H.imag();
    E.bottomRightCorner(n, n) = H.real();
    return E;
}

SymmetricAffine real_embedding(const HermitianAffine &H)
{
    SymmetricAffine out;
    out.size = 2 * H.size;
    out.constant = real_embedding(H.constant);
    out.terms.reserve(H.terms.size());
    for (const auto &[i, Fi] : H.terms)
        out.terms.emplace_back(i, real_embedding(Fi));
    return out;
}

double max_violation(const ConicProblem &problem, std::span<const double> x)
{
    double worst = 0.0;
    auto dot = [&](const Terms &t) {
        double v = 0.0;
        for (const auto &[i, c] : t)
            v += c * x[static_cast<std::size_t>(i)];
        return v;
    };
    for (const auto &row : problem.linear_constraints)
    {
        const double lhs = dot(row.row) - row.rhs;
        worst = std::max(worst, row.relation == Relation::Equal ? std::abs(lhs) : lhs);
    }
    for (const auto &e : problem.exp_epigraphs)
    {
        // exp(u) <= v measured in log space where v > 0, which is scale free.
        const double u = e.u.eval(x), v = e.v.eval(x);
        worst = std::max(worst, v > 0.0 ? u - std::log(v) : std::exp(u) - v);
    }
    for (const auto &e : problem.log_hypographs)
    {
        const double u = e.u.eval(x), v = e.v.eval(x);
        worst = std::max(worst, -u);
        worst = std::max(worst, u > -1.0 ? v - std::log1p(u) : std::numeric_limits<double>::infinity());
    }
    for (const auto &b : problem.psd_blocks)
    {
        const CMat F = hermitian_part(b.map.eval(x));
        Eigen::SelfAdjointEigenSolver<CMat> es(F, Eigen::EigenvaluesOnly);
        worst = std::max(worst, -es.eigenvalues().minCoeff());
    }
    return worst;
}

namespace
{

nlohmann::json dense(const Eigen::MatrixXd &A)
{
    auto rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < A.rows(); ++r)
    {
        auto row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < A.cols(); ++c)
            row.push_back(A(r, c));
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json terms_json(const Terms &t)
{
    auto out = nlohmann::json::array();
    for (const auto &[i, c] : t)
        out.push_back({i, c});
    return out;
}

nlohmann::json affine_json(const AffineExpr &e)
{
    return {{"terms", terms_json(e.terms)}, {"constant", e.constant}};
}

}  // namespace

nlohmann::json dump(const ConicProblem &problem)
{
    nlohmann::json doc;
    doc["n_vars"] = problem.n_vars;
    doc["var_names"] = problem.var_names;
    doc["objective"] = terms_json(problem.objective);
    auto lin = nlohmann::json::array();
    for (const auto &row : problem.linear_constraints)
        lin.push_back({{"label", row.label},
                       {"row", terms_json(row.row)},
                       {"relation", row.relation == Relation::Equal ? "=" : "<="},
                       {"rhs", row.rhs}});
    doc["linear_constraints"] = lin;
    auto ex = nlohmann::json::array();
    for (const auto &e : problem.exp_epigraphs)
        ex.push_back({{"label", e.label}, {"u", affine_json(e.u)}, {"v", affine_json(e.v)}});
    doc["exp_epigraphs"] = ex;
    auto lg = nlohmann::json::array();
    for (const auto &e : problem.log_hypographs)
        lg.push_back({{"label", e.label}, {"u", affine_json(e.u)}, {"v", affine_json(e.v)}});
    doc["log_hypographs"] = lg;
    auto psd = nlohmann::json::array();
    for (const auto &b : problem.psd_blocks)
    {
        nlohmann::json blk;
        blk["label"] = b.label;
        blk["size"] = b.map.size;
        blk["constant_re"] = dense(b.map.constant.real());
        blk["constant_im"] = dense(b.map.constant.imag());
        auto terms = nlohmann::json::array();
        for (const auto &[i, Fi] : b.map.terms)
            terms.push_back({{"var", i}, {"re", dense(Fi.real())}, {"im", dense(Fi.imag())}});
        blk["terms"] = terms;
        psd.push_back(blk);
    }
    doc["psd_blocks"] = psd;
    return doc;
}

}  // namespace rsbf::conic
