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

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pathfuse {

// Units throughout: distance in metres, frequency in GHz, losses in dB.

enum class Environment { NLOS, LOS };
enum class Scenario { UMiSC, UMiOS, UMa };
enum class DataType { Measurement, RayTracing, Mixed };

std::string_view to_string(Environment env);
std::string_view to_string(Scenario scenario);
std::string_view to_string(DataType type);
Environment parse_environment(std::string_view text);
Scenario parse_scenario(std::string_view text);
DataType parse_data_type(std::string_view text);

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    bool ordered() const noexcept { return lo <= hi; }
};

/// Polynomial order of the log-distance/log-frequency model.
enum class ModelOrder : int { First = 1, Second = 2, Third = 3 };

ModelOrder order_from_int(int order);
constexpr int to_int(ModelOrder order) noexcept { return static_cast<int>(order); }

/// Number of coefficients: 3, 6 or 10.
constexpr std::size_t parameter_count(ModelOrder order) noexcept
{
    switch (order) {
    case ModelOrder::First: return 3;
    case ModelOrder::Second: return 6;
    case ModelOrder::Third: return 10;
    }
    return 0;
}

/// A published single-source ABG model (one registry row).
struct SourceModel {
    std::string id;
    Environment environment = Environment::NLOS;
    Scenario scenario = Scenario::UMiSC;
    double frequency_ghz = 0.0;
    std::string source;
    DataType data_type = DataType::Measurement;
    int n_points = 1;
    double dist_min_m = 0.0;
    double dist_max_m = 0.0;
    double alpha = 0.0;
    double beta_db = 0.0;
    double gamma = 0.0;
    double sigma_db = 0.0;

    /// Throws Error(Data) when an invariant is violated.
    void validate() const;
};

struct PathLossSample {
    double distance_m = 0.0;
    double frequency_ghz = 0.0;
    double path_loss_db = 0.0;
    std::string source_id;
    double weight = 1.0;
};

/// Coefficients in canonical column order
///   [alpha1, beta, gamma1, alpha2, delta, gamma2, alpha3, eta, zeta, gamma3]
/// truncated to 3 (first order) or 6 (second order) entries.
class CoefficientSet {
public:
    CoefficientSet(ModelOrder order, std::vector<double> values);

    static CoefficientSet zeros(ModelOrder order);
    static CoefficientSet abg(double alpha, double beta, double gamma);

    ModelOrder order() const noexcept { return order_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_.at(i); }

    /// Same polynomial expressed at a higher order (extra terms zero).
    CoefficientSet promoted(ModelOrder to) const;

    /// Column name for index i at this order ("alpha", "beta", "gamma" at order 1).
    std::string_view name(std::size_t i) const;

    Eigen::VectorXd as_vector() const;

private:
    ModelOrder order_;
    std::vector<double> values_;
};

/// Canonical coefficient names; first-order models use alpha/beta/gamma.
std::string_view coefficient_name(ModelOrder order, std::size_t index);

struct FittedModel {
    CoefficientSet coefficients = CoefficientSet::zeros(ModelOrder::First);
    double sigma_db = 0.0;
    bool gas_corrected = false;
    Interval freq_range_ghz;
    Interval dist_range_m;
    std::vector<std::string> provenance;
};

// Mean predictions (the fluctuation term is excluded). All throw
// Error(Domain) for non-positive d or f, or a non-finite result, and
// Error(Contract) when the coefficient order does not match.
double predict_abg(const CoefficientSet& c, double distance_m, double frequency_ghz);
double predict_ewabg2(const CoefficientSet& c, double distance_m, double frequency_ghz);
double predict_ewabg3(const CoefficientSet& c, double distance_m, double frequency_ghz);

/// Dispatches on c.order().
double predict(const CoefficientSet& c, double distance_m, double frequency_ghz);

/// Mean prediction of a source model's own ABG surface.
double predict(const SourceModel& m, double distance_m);

/// One design-matrix row with L[x] = 10 log10(x):
///   order 1: [Ld, 1, Lf]
///   order 2: + [Ld^2, Ld Lf, Lf^2]
///   order 3: + [Ld^3, Ld^2 Lf, Ld Lf^2, Lf^3]
std::vector<double> design_row(ModelOrder order, double distance_m, double frequency_ghz);

struct DesignSystem {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXd w;
};

/// Throws Error(InsufficientData) when samples.size() < parameter_count(order).
DesignSystem build_design_system(std::span<const PathLossSample> samples, ModelOrder order);

}  // namespace pathfuse
