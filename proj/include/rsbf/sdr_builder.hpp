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

// Problem-specific construction of the lifted convex programs.
//
// Per user k the relaxed max-min problem carries two SINR chains,
//
//   common:   e^{x_c} <= t_c <= min_h h^H W_c h,
//             q_c >= max_h h^H Z_k h + sigma^2,     Z_k = sum_j W_j,
//             beta_c <= e^{x_c - y_c},  q_c <= e^{y_c},
//             sum_j c_j <= ln(1 + beta_c) - D sqrt(1 - (1 + beta_c)^-2)
//   private:  the same with W_k, N_k = sum_{j != k} W_j and t - c_k on the left,
//
// where the robust min/max over the uncertainty ball are S-Procedure LMIs and
// the convex right-hand sides are replaced by first-order minorants around an
// expansion point.
//
// Hermitian M x M matrix variables use M^2 real scalars: the M diagonal
// entries followed by (Re, Im) of every strictly upper entry in row order.
//
// A zero uncertainty radius makes the S-Procedure multiplier unbounded, so the
// block is replaced by its exact limit, the scalar inequality
// h^H A h - threshold >= 0 (a 1 x 1 block without multiplier variable).

#pragma once

#include "rsbf/conic_ir.hpp"
#include "rsbf/core.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace rsbf::sdr
{

// Raised when a minorant cannot be formed at the requested point.
class DegeneratePoint : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

struct ExpansionPoint
{
    std::vector<double> beta_c, x_c, y_c;
    std::vector<double> beta_p, x_p, y_p;

    /// Throws DegeneratePoint if any entry is non-finite or a beta is negative.
    void check() const;
};

/// Smallest beta used as an expansion point for the dispersion minorant.
inline constexpr double kBetaFloor = 1e-6;

// value + slope * (u - anchor)
struct AffineMinorant
{
    double anchor = 0.0;
    double value = 0.0;
    double slope = 0.0;

    double operator()(double u) const { return value + slope * (u - anchor); }
};

// value * (1 + (x - anchor_x) - (y - anchor_y))
struct ExpDiffMinorant
{
    double anchor_x = 0.0, anchor_y = 0.0;
    double value = 0.0;

    double operator()(double x, double y) const { return value * (1.0 + (x - anchor_x) - (y - anchor_y)); }
};

/// Tangent of beta -> -D sqrt(1 - (1 + beta)^-2) at beta0. Throws DegeneratePoint for beta0 <= 1e-12.
AffineMinorant minorant_dispersion(double beta0, double D);

/// Tangent of (x, y) -> e^{x - y} at (x0, y0). Throws DegeneratePoint if x0 - y0 > 700.
ExpDiffMinorant minorant_exp_diff(double x0, double y0);

/// Tangent of y -> e^y at y0. Throws DegeneratePoint if y0 > 700.
AffineMinorant minorant_exp(double y0);

enum class LmiKind
{
    Gamma,      // common signal lower bound, A = W_c
    Psi,        // common interference upper bound, B = Z_k
    Omega,      // private signal lower bound, A = W_k
    Theta,      // private interference upper bound, B = N_k
    XiCommon,   // initialization, A = W_c - a_c Z_k
    XiPrivate,  // initialization, A = W_k - a_p N_k
};

struct LmiBlock
{
    int size = 0;  // M + 1, or 1 for a zero radius
    conic::HermitianAffine body;
    LmiKind kind = LmiKind::Gamma;
};

/// Certifies h^H A h >= threshold for every ||h - h_hat|| <= delta:
///   [[delta^2 A + mu I, delta A h_hat], [delta h_hat^H A, h_hat^H A h_hat - mu - threshold]] >= 0,
/// the S-Procedure LMI with multiplier lambda = mu / delta^2 after the congruence diag(delta I, 1).
/// mu stays bounded as delta -> 0. multiplier_var is ignored (and may be -1) when delta == 0.
LmiBlock lmi_lower_bound(const conic::HermitianAffine &A, const CVec &h_hat, double delta,
                         const conic::AffineExpr &threshold, int multiplier_var, LmiKind kind = LmiKind::Gamma);

/// Certifies h^H B h <= cap over the same ball: the lower-bound block for -B and -cap.
LmiBlock lmi_upper_bound(const conic::HermitianAffine &B, const CVec &h_hat, double delta,
                         const conic::AffineExpr &cap, int multiplier_var, LmiKind kind = LmiKind::Psi);

/// Appends an M x M Hermitian matrix variable and returns its M^2 scalar indices.
std::vector<int> add_hermitian_variable(conic::ConicProblem &p, int M, const std::string &name);

/// The matrix-valued affine map X(x) of a Hermitian variable block.
conic::HermitianAffine hermitian_variable(const std::vector<int> &idx, int M);

/// Reads the Hermitian matrix of a variable block out of a primal vector.
CMat hermitian_value(const std::vector<int> &idx, int M, std::span<const double> x);

/// Writes a Hermitian matrix into the scalar slots of a variable block.
void set_hermitian_value(const std::vector<int> &idx, const CMat &W, std::span<double> x);

struct ModelFlags
{
    bool rate_splitting = true;       // false: no common stream, c pinned to 0
    bool finite_blocklength = true;   // false: D = 0 (Shannon rate)
};

// Index of every scalar in the assembled problem; -1 / empty for absent ones.
struct VariableLayout
{
    int M = 0, K = 0;
    bool common = true;
    std::vector<int> W_c;
    std::vector<std::vector<int>> W;
    std::vector<int> c;
    int t = -1;
    int margin = -1;  // feasibility problems only

    std::vector<int> beta_c, x_c, y_c, t_c, q_c;
    std::vector<int> beta_p, x_p, y_p, t_p, q_p;
    std::vector<int> lambda_c, lambda_bar_c, lambda_p, lambda_bar_p;
};

struct Subproblem
{
    conic::ConicProblem problem;
    VariableLayout layout;
    std::vector<LmiBlock> lmis;
};

/// Convex program solved at every iteration: maximise t around `point`.
/// Penalties D_k come from cfg (zero when finite_blocklength is false).
Subproblem assemble_subproblem(const SystemConfig &cfg, const ChannelSet &channels, const ExpansionPoint &point,
                               const ModelFlags &flags = {});

/// Initialization problem for fixed common rates c0: the robust SINR-target LMIs
/// with a margin m subtracted from every block corner, maximising m. m >= 0 at the
/// optimum means the targets are robustly attainable. Empty target vectors are
/// filled from c0 with fbl::target_sinr_bisect.
Subproblem assemble_feasibility(const SystemConfig &cfg, const ChannelSet &channels, const std::vector<double> &c0,
                                std::vector<double> a_c = {}, std::vector<double> a_p = {},
                                const ModelFlags &flags = {});

LiftedSolution unpack(const VariableLayout &layout, std::span<const double> x);

/// Writes a lifted point into a primal vector of the layout's problem (for warm starts).
std::vector<double> pack(const VariableLayout &layout, int n_vars, const LiftedSolution &s);

/// (beta, x, y) of a subproblem solution, the next expansion point.
ExpansionPoint expansion_from_lifted(const LiftedSolution &s);

}  // namespace rsbf::sdr
