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

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rsbf
{

using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Raised by validate_config(). field() names the offending SystemConfig field.
class ConfigError : public std::invalid_argument
{
public:
    ConfigError(std::string field, const std::string &what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string &field() const noexcept { return field_; }

private:
    std::string field_;
};

// System parameters shared by every stage of the design pipeline.
// All rates are in nats/s/Hz, powers in mW, noise in linear mW.
// Per-user vectors have length K.
struct SystemConfig
{
    int M = 4;                    // transmit antennas
    int K = 2;                    // single-antenna users
    int L = 1000;                 // blocklength in channel uses (common and private)
    std::vector<double> epsilon;  // block error rate per user, in (0, 0.5)
    double P_max = 1000.0;        // power budget [mW]
    std::vector<double> sigma2;   // noise power per user [mW, linear]
    std::vector<double> delta;    // uncertainty radius per user
    std::vector<double> alpha;    // CSIT quality exponent per user, in [0, 1]
    double d = 0.0;               // error-scaling coefficient for delta = d * P^-alpha

    /// Uniform configuration: every per-user field takes the same value.
    static SystemConfig uniform(int M, int K, int L, double epsilon, double P_max, double sigma2,
                                double delta, double alpha = 0.0, double d = 0.0);
};

/// Returns cfg unchanged if every invariant holds, throws ConfigError on the first violation.
SystemConfig validate_config(const SystemConfig &cfg);

/// d * P^-alpha
double effective_radius(double d, double P, double alpha);

/// dBm to linear mW.
double dbm_to_mw(double dbm);

// Estimated channels and the radius of the uncertainty ball around each.
struct ChannelSet
{
    int M = 0;
    std::vector<CVec> h_hat;
    std::vector<double> delta;

    int K() const { return static_cast<int>(h_hat.size()); }
    void check() const;
};

// Rank-one design: common beamformer, private beamformers and rate split (nats/s/Hz).
struct BeamformerSet
{
    CVec w_c;
    std::vector<CVec> w;
    std::vector<double> c;

    double power() const;
    double common_rate_sum() const;
};

// Lifted (SDR) solution of the per-iteration convex program, including the
// auxiliary chain variables and S-Procedure multipliers.
struct LiftedSolution
{
    CMat W_c;
    std::vector<CMat> W;
    std::vector<double> c;
    double t = 0.0;

    std::vector<double> beta_c, x_c, y_c, t_c, q_c;
    std::vector<double> beta_p, x_p, y_p, t_p, q_p;
    std::vector<double> lambda_c, lambda_bar_c, lambda_p, lambda_bar_p;

    double trace_power() const;
};

enum class SchemeId
{
    RbRsFbl,    // robust rate-splitting, finite blocklength (the proposed design)
    RbNoRsFbl,  // robust, no rate-splitting (c = 0, no common stream)
    NoRbRsFbl,  // non-robust: designed for delta = 0, evaluated under the true delta
    RbRsIfbl,   // robust rate-splitting with the Shannon rate (D = 0)
};

std::string_view to_string(SchemeId id);
SchemeId parse_scheme(std::string_view name);

// Outcome of one CCCP run started from one initial point.
struct RunTrace
{
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
    bool common_dropped = false;  // an idle common stream was removed and the run continued without it
    std::string start_label;

    // Final relaxation and the design recovered from it by randomization.
    bool randomized = false;            // false when no subproblem was solved
    bool rank_one = true;
    double relaxation_objective = 0.0;
    double randomized_min_rate = 0.0;
    double randomized_power = 0.0;
};

struct SchemeResult
{
    SchemeId scheme_id = SchemeId::RbRsFbl;
    double min_rate = 0.0;            // certified worst-case min user rate of `design`
    double common_rate_sum = 0.0;     // sum of c_k in `design`
    int iterations = 0;
    std::vector<double> objective_trace;
    bool feasible = false;
    bool rank_one = false;
    double wall_time = 0.0;           // seconds

    double relaxation_objective = 0.0;  // final t of the relaxed subproblem
    BeamformerSet design;
    std::vector<RunTrace> runs;        // every CCCP run that contributed a candidate
};

/// ||W - W^H||_max
double hermitian_defect(const CMat &W);

/// (W + W^H) / 2
CMat hermitian_part(const CMat &W);

}  // namespace rsbf
