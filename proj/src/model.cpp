// SPDX-License-Identifier: Apache-2.0
//
// pathfuse: robust fusion of ABG path-loss models
// Copyright (C) 2026 The pathfuse authors
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

#include "pathfuse/model.hpp"

#include <cmath>
#include <sstream>

#include "pathfuse/errors.hpp"

namespace pathfuse {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::SingularSystem: return "singular system";
    case ErrorKind::Convergence: return "convergence failure";
    case ErrorKind::ConsensusFailure: return "consensus failure";
    case ErrorKind::DegenerateData: return "degenerate data";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Data: return "data error";
    case ErrorKind::Range: return "range error";
    case ErrorKind::Contract: return "contract error";
    case ErrorKind::Metric: return "metric error";
    }
    return "error";
}

std::string_view to_string(Environment env)
{
    return env == Environment::NLOS ? "NLOS" : "LOS";
}

std::string_view to_string(Scenario scenario)
{
    switch (scenario) {
    case Scenario::UMiSC: return "UMiSC";
    case Scenario::UMiOS: return "UMiOS";
    case Scenario::UMa: return "UMa";
    }
    return "?";
}

std::string_view to_string(DataType type)
{
    switch (type) {
    case DataType::Measurement: return "M";
    case DataType::RayTracing: return "R";
    case DataType::Mixed: return "M+R";
    }
    return "?";
}

Environment parse_environment(std::string_view text)
{
    if (text == "NLOS") return Environment::NLOS;
    if (text == "LOS") return Environment::LOS;
    throw Error(ErrorKind::Config, "unknown environment '" + std::string(text) + "'");
}

Scenario parse_scenario(std::string_view text)
{
    if (text == "UMiSC") return Scenario::UMiSC;
    if (text == "UMiOS") return Scenario::UMiOS;
    if (text == "UMa") return Scenario::UMa;
    throw Error(ErrorKind::Config, "unknown scenario '" + std::string(text) + "'");
}

DataType parse_data_type(std::string_view text)
{
    if (text == "M") return DataType::Measurement;
    if (text == "R") return DataType::RayTracing;
    if (text == "M+R" || text == "M,R" || text == "M, R") return DataType::Mixed;
    throw Error(ErrorKind::Config, "unknown data type '" + std::string(text) + "'");
}

ModelOrder order_from_int(int order)
{
    switch (order) {
    case 1: return ModelOrder::First;
    case 2: return ModelOrder::Second;
    case 3: return ModelOrder::Third;
    }
    throw Error(ErrorKind::Config, "model order must be 1, 2 or 3 (got " + std::to_string(order) + ")");
}

void SourceModel::validate() const
{
    auto fail = [this](const std::string& why) {
        throw Error(ErrorKind::Data, "source model '" + id + "': " + why);
    };
    if (id.empty()) fail("empty id");
    if (!(dist_min_m > 0.0)) fail("dist_min must be positive");
    if (!(dist_min_m < dist_max_m)) fail("dist_min must be below dist_max");
    if (!(frequency_ghz > 0.0)) fail("frequency must be positive");
    if (!(sigma_db > 0.0)) fail("sigma must be positive");
    if (n_points < 1) fail("n_points must be at least 1");
    for (double v : {alpha, beta_db, gamma})
        if (!std::isfinite(v)) fail("non-finite coefficient");
}

// --- CoefficientSet -------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 10> kNames = {
    "alpha1", "beta", "gamma1", "alpha2", "delta", "gamma2", "alpha3", "eta", "zeta", "gamma3"};

}  // namespace

std::string_view coefficient_name(ModelOrder order, std::size_t index)
{
    if (index >= parameter_count(order))
        throw Error(ErrorKind::Contract, "coefficient index out of range");
    if (order == ModelOrder::First) {
        constexpr std::array<std::string_view, 3> abg = {"alpha", "beta", "gamma"};
        return abg[index];
    }
    return kNames[index];
}

CoefficientSet::CoefficientSet(ModelOrder order, std::vector<double> values)
    : order_(order), values_(std::move(values))
{
    if (values_.size() != parameter_count(order_)) {
        std::ostringstream os;
        os << "order-" << to_int(order_) << " coefficient set needs " << parameter_count(order_)
           << " values, got " << values_.size();
        throw Error(ErrorKind::Contract, os.str());
    }
    for (double v : values_)
        if (!std::isfinite(v)) throw Error(ErrorKind::Contract, "non-finite coefficient");
}

CoefficientSet CoefficientSet::zeros(ModelOrder order)
{
    return CoefficientSet(order, std::vector<double>(parameter_count(order), 0.0));
}

CoefficientSet CoefficientSet::abg(double alpha, double beta, double gamma)
{
    return CoefficientSet(ModelOrder::First, {alpha, beta, gamma});
}

CoefficientSet CoefficientSet::promoted(ModelOrder to) const
{
    if (to_int(to) < to_int(order_))
        throw Error(ErrorKind::Contract, "cannot demote a coefficient set");
    std::vector<double> v(parameter_count(to), 0.0);
    std::copy(values_.begin(), values_.end(), v.begin());
    return CoefficientSet(to, std::move(v));
}

std::string_view CoefficientSet::name(std::size_t i) const { return coefficient_name(order_, i); }

Eigen::VectorXd CoefficientSet::as_vector() const
{
    return Eigen::Map<const Eigen::VectorXd>(values_.data(), static_cast<Eigen::Index>(values_.size()));
}

// --- prediction -----------------------------------------------------------

namespace {

void check_inputs(double d, double f)
{
    if (!(d > 0.0) || !(f > 0.0) || !std::isfinite(d) || !std::isfinite(f)) {
        std::ostringstream os;
        os << "distance and frequency must be positive and finite (d=" << d << " m, f=" << f << " GHz)";
        throw Error(ErrorKind::Domain, os.str());
    }
}

void check_order(const CoefficientSet& c, ModelOrder expected)
{
    if (c.order() != expected)
        throw Error(ErrorKind::Contract, "coefficient set has order " + std::to_string(to_int(c.order())) +
                                             ", expected " + std::to_string(to_int(expected)));
}

double finite_or_throw(double value)
{
    if (!std::isfinite(value)) throw Error(ErrorKind::Domain, "prediction is not finite");
    return value;
}

}  // namespace

double predict_abg(const CoefficientSet& c, double distance_m, double frequency_ghz)
{
    check_order(c, ModelOrder::First);
    check_inputs(distance_m, frequency_ghz);
    const double ld = std::log10(distance_m);
    const double lf = std::log10(frequency_ghz);
    return finite_or_throw(10.0 * c[0] * ld + c[1] + 10.0 * c[2] * lf);
}

double predict_ewabg2(const CoefficientSet& c, double distance_m, double frequency_ghz)
{
    check_order(c, ModelOrder::Second);
    check_inputs(distance_m, frequency_ghz);
    const double ld = std::log10(distance_m);
    const double lf = std::log10(frequency_ghz);
    const double linear = 10.0 * c[0] * ld + c[1] + 10.0 * c[2] * lf;
    const double quadratic = 100.0 * (c[3] * ld * ld + c[4] * ld * lf + c[5] * lf * lf);
    return finite_or_throw(linear + quadratic);
}

double predict_ewabg3(const CoefficientSet& c, double distance_m, double frequency_ghz)
{
    check_order(c, ModelOrder::Third);
    check_inputs(distance_m, frequency_ghz);
    const double ld = std::log10(distance_m);
    const double lf = std::log10(frequency_ghz);
    const double linear = 10.0 * c[0] * ld + c[1] + 10.0 * c[2] * lf;
    const double quadratic = 100.0 * (c[3] * ld * ld + c[4] * ld * lf + c[5] * lf * lf);
    const double cubic =
        1000.0 * (c[6] * ld * ld * ld + c[7] * ld * ld * lf + c[8] * ld * lf * lf + c[9] * lf * lf * lf);
    return finite_or_throw(linear + quadratic + cubic);
}

double predict(const CoefficientSet& c, double distance_m, double frequency_ghz)
{
    switch (c.order()) {
    case ModelOrder::First: return predict_abg(c, distance_m, frequency_ghz);
    case ModelOrder::Second: return predict_ewabg2(c, distance_m, frequency_ghz);
    case ModelOrder::Third: return predict_ewabg3(c, distance_m, frequency_ghz);
    }
    throw Error(ErrorKind::Contract, "invalid model order");
}

double predict(const SourceModel& m, double distance_m)
{
    return predict_abg(CoefficientSet::abg(m.alpha, m.beta_db, m.gamma), distance_m, m.frequency_ghz);
}

// --- design matrix --------------------------------------------------------

std::vector<double> design_row(ModelOrder order, double distance_m, double frequency_ghz)
{
    check_inputs(distance_m, frequency_ghz);
    const double ld = 10.0 * std::log10(distance_m);
    const double lf = 10.0 * std::log10(frequency_ghz);
    std::vector<double> row{ld, 1.0, lf};
    row.reserve(parameter_count(order));
    if (to_int(order) >= 2) {
        row.insert(row.end(), {ld * ld, ld * lf, lf * lf});
    }
    if (to_int(order) >= 3) {
        row.insert(row.end(), {ld * ld * ld, ld * ld * lf, ld * lf * lf, lf * lf * lf});
    }
    return row;
}

DesignSystem build_design_system(std::span<const PathLossSample> samples, ModelOrder order)
{
    const auto p = static_cast<Eigen::Index>(parameter_count(order));
    const auto n = static_cast<Eigen::Index>(samples.size());
    if (n < p) {
        throw Error(ErrorKind::InsufficientData, "order-" + std::to_string(to_int(order)) + " fit needs at least " +
                                                     std::to_string(p) + " samples, got " + std::to_string(n));
    }
    DesignSystem sys{Eigen::MatrixXd(n, p), Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = samples[static_cast<std::size_t>(i)];
        const auto row = design_row(order, s.distance_m, s.frequency_ghz);
        for (Eigen::Index j = 0; j < p; ++j) sys.X(i, j) = row[static_cast<std::size_t>(j)];
        sys.y(i) = s.path_loss_db;
        sys.w(i) = s.weight;
    }
    return sys;
}

}  // namespace pathfuse
