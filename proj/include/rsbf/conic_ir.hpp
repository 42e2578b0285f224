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

// Solver-agnostic description of a convex program
//
//   maximize    objective . x
//   subject to  linear rows            a . x {<=, =} b
//               exponential epigraphs  exp(u(x)) <= v(x)
//               log hypographs         v(x) <= ln(1 + u(x)),  u(x) >= 0
//               Hermitian LMIs         F0 + sum_i x_i F_i  >= 0
//
// with every u, v affine in x. solve() hands the problem to the built-in
// barrier interior-point backend; complex LMIs reach it through the real
// symmetric embedding [[Re F, -Im F], [Im F, Re F]].

#pragma once

#include "rsbf/core.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rsbf::conic
{

using Terms = std::vector<std::pair<int, double>>;

struct AffineExpr
{
    Terms terms;
    double constant = 0.0;

    AffineExpr() = default;
    explicit AffineExpr(double c) : constant(c) {}
    static AffineExpr var(int index, double coef = 1.0);

    AffineExpr &add(int index, double coef);
    AffineExpr &operator+=(const AffineExpr &other);
    AffineExpr &operator-=(const AffineExpr &other);
    AffineExpr &operator*=(double s);

    double eval(std::span<const double> x) const;
};

AffineExpr operator+(AffineExpr a, const AffineExpr &b);
AffineExpr operator-(AffineExpr a, const AffineExpr &b);
AffineExpr operator*(double s, AffineExpr a);

enum class Relation
{
    LessEqual,
    Equal,
};

struct LinearConstraint
{
    Terms row;
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
    std::string label;
};

// exp(u) <= v
struct ExpEpigraph
{
    AffineExpr u, v;
    std::string label;
};

// v <= ln(1 + u), u >= 0
struct LogHypograph
{
    AffineExpr u, v;
    std::string label;
};

// F(x) = constant + sum_i x_i F_i, every matrix Hermitian of order `size`.
struct HermitianAffine
{
    int size = 0;
    CMat constant;
    std::vector<std::pair<int, CMat>> terms;

    HermitianAffine() = default;
    explicit HermitianAffine(int n);

    /// Adds coef to the coefficient matrix of variable `index` (merging repeated indices).
    HermitianAffine &add(int index, const CMat &coef);
    HermitianAffine &add_constant(const CMat &c);
    HermitianAffine &operator+=(const HermitianAffine &other);
    HermitianAffine &operator*=(double s);

    CMat eval(std::span<const double> x) const;
};

struct SymmetricAffine
{
    int size = 0;
    Eigen::MatrixXd constant;
    std::vector<std::pair<int, Eigen::MatrixXd>> terms;

    Eigen::MatrixXd eval(std::span<const double> x) const;
};

struct PsdBlock
{
    HermitianAffine map;
    std::string label;
};

struct ConicProblem
{
    int n_vars = 0;
    Terms objective;  // maximised
    std::vector<LinearConstraint> linear_constraints;
    std::vector<ExpEpigraph> exp_epigraphs;
    std::vector<LogHypograph> log_hypographs;
    std::vector<PsdBlock> psd_blocks;
    std::vector<std::string> var_names;  // optional, for debug dumps

    int add_variable(std::string name = {});

    /// Throws std::invalid_argument if an expression references a variable >= n_vars
    /// or a block matrix is not Hermitian.
    void check() const;
};

enum class SolveStatus
{
    Optimal,
    Infeasible,
    Inaccurate,
    Failed,
};

std::string_view to_string(SolveStatus status);

struct SolveOutcome
{
    SolveStatus status = SolveStatus::Failed;
    std::vector<double> primal;
    double objective_value = 0.0;
    double primal_residual = 0.0;   // max constraint violation at `primal`
    double duality_gap = 0.0;       // absolute gap bound nu / tau
    double relative_gap = 0.0;      // duality_gap / max(1, |objective_value|)
    int newton_steps = 0;
    std::string message;
};

struct SolverSettings
{
    double gap_tol = 1e-8;       // target relative gap
    double accept_tol = 1e-7;    // Optimal requires gap and residual below this
    double inaccurate_tol = 1e-4;
    double box_radius = 1e8;     // |x_i| <= box_radius keeps the barrier problem bounded
    double growth = 15.0;        // barrier parameter update factor
    int max_newton_steps = 2000;
    std::vector<double> initial_point;  // used when strictly feasible, skipping phase I
};

SolveOutcome solve(const ConicProblem &problem, const SolverSettings &settings = {});

/// [[Re H, -Im H], [Im H, Re H]]; H >= 0 iff the embedding is >= 0, and the
/// embedding's spectrum is that of H with every eigenvalue doubled.
Eigen::MatrixXd real_embedding(const CMat &H);
SymmetricAffine real_embedding(const HermitianAffine &H);

/// Largest violation of any constraint at x (0 when x is feasible).
double max_violation(const ConicProblem &problem, std::span<const double> x);

/// Debug dump, one field per constraint class with dense matrices as nested arrays.
nlohmann::json dump(const ConicProblem &problem);

}  // namespace rsbf::conic
