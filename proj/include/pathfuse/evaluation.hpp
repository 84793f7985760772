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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pathfuse/atmosphere.hpp"
#include "pathfuse/model.hpp"
#include "pathfuse/pipeline.hpp"
#include "pathfuse/synthesis.hpp"

namespace pathfuse {

// ---- metrics -----------------------------------------------------------

/// sqrt(sum w r^2 / sum w). Throws Error(Metric) for empty input, mismatched
/// sizes, negative weights or an all-zero weight vector.
double weighted_rms(std::span<const double> residuals, std::span<const double> weights);

/// Weighted standard deviation of the residuals of `samples` against the
/// raw coefficient surface (no gas handling).
double weighted_std(const CoefficientSet& coefficients, std::span<const PathLossSample> samples,
                    std::span<const double> weights);

/// Same against a fitted model. When the model is gas corrected and a table
/// is given, predictions include the restored gas loss.
double weighted_std(const FittedModel& model, std::span<const PathLossSample> samples, std::span<const double> weights,
                    const GasAttenuationTable* gas = nullptr);

/// Percentage change 100 (contaminated - clean) / clean. Throws Error(Metric)
/// for a non-positive baseline.
double error_ratio(double sigma_contaminated, double sigma_clean);

// ---- methods -----------------------------------------------------------

struct Method {
    std::string label;
    PipelineConfig pipeline;
};

/// Single ABG fitted to the pooled corpus, no filter, no gas correction.
Method pooled_abg_method(WeightingPolicy weighting = WeightingPolicy::Identity);
/// First-order weighted fit.
Method wabg_method(WeightingPolicy weighting = WeightingPolicy::Mixture);
/// Full pipeline: Theil-Sen filter, Mixture weights.
Method ewabg_method(ModelOrder order = ModelOrder::Second, bool gas_correction = true);

/// Fits `method` on `corpus` with the method's pipeline seed replaced by `seed`.
PipelineResult fit_method(const Method& method, std::span<const PathLossSample> corpus, const SourceCatalog& catalog,
                          std::uint64_t seed);

// ---- leave-one-out -----------------------------------------------------

struct LoocvConfig {
    Method method = ewabg_method();
    SynthesisSpec synthesis = experiment_synthesis_spec(0);
    bool skip_failed_folds = false;
};

struct LoocvFold {
    std::string held_out;
    std::size_t n_test = 0;
    double sigma = 0.0;
    std::optional<std::string> error;
};

struct LoocvResult {
    double sigma = 0.0;
    std::vector<LoocvFold> folds;
};

/// Fits on corpora synthesised from all models but one and scores the fit
/// (unit weights) on the held-out model's corpus. The returned sigma is the
/// fold mean weighted by held-out corpus size. A failing fold rethrows
/// unless skip_failed_folds is set, in which case it is recorded and left
/// out of the mean.
LoocvResult loocv_detailed(std::span<const SourceModel> models, const LoocvConfig& cfg);
double loocv(std::span<const SourceModel> models, const LoocvConfig& cfg);

// ---- reports -----------------------------------------------------------

struct EvaluationReport {
    std::string scenario;
    std::string band;
    std::string method;
    std::string column;                          // e.g. "sigma", "sigma_with", "ratio_50m"
    double sigma = 0.0;                          // mean over trials
    std::optional<double> sigma_orig;            // published sigma of the original model
    std::optional<double> published;             // published value of this cell
    std::optional<double> error_ratio_percent;   // vs per-trial clean baseline
    std::optional<double> error_ratio_published; // vs the published clean value
    int trials = 1;
    std::uint64_t seed = 0;
    std::optional<CoefficientSet> coefficients;  // mean over trials
    std::vector<double> trial_values;
    std::vector<double> trial_ratios;
};

struct SurfaceGrid {
    std::string label;
    std::vector<double> distances_m;
    std::vector<double> frequencies_ghz;
    Eigen::MatrixXd path_loss_db;   // rows: distance, cols: frequency
    long nonmonotone_f = 0;         // adjacent pairs where P decreases with f
    long nonmonotone_d = 0;         // adjacent pairs where P decreases with d
    long nonmonotone_f_1_18 = 0;    // as nonmonotone_f, restricted to 1..18 GHz
    double max_second_difference = 0.0;  // in (log d, log f) coordinates
};

SurfaceGrid evaluate_surface(const std::string& label, const CoefficientSet& coefficients,
                             std::vector<double> distances_m, std::vector<double> frequencies_ghz);

enum class ExperimentKind { OrderStudy, RobustStudy, IntegrationStudy, OutlierStudy };

std::string_view to_string(ExperimentKind kind);  // "table2" .. "table5"
ExperimentKind parse_experiment_kind(std::string_view text);

struct ExperimentSpec {
    ExperimentKind which = ExperimentKind::IntegrationStudy;
    std::vector<Scenario> scenarios;   // empty: all three
    std::vector<Interval> bands;       // empty: default bands per scenario
    int trials = 10;
    std::vector<double> outlier_bands_m{50.0, 30.0, 5.0};
    std::uint64_t seed = 1;
    SynthesisSpec synthesis = experiment_synthesis_spec(0);  // seed replaced per trial
    OutlierSpec outliers;                               // band width and seed replaced per cell
    bool ewabg_gas_correction = true;
    WeightingPolicy pooled_weighting = WeightingPolicy::SourcePoints;
    WeightingPolicy wabg_weighting = WeightingPolicy::Mixture;

    void validate() const;
};

struct ExperimentResult {
    ExperimentKind which{};
    std::vector<EvaluationReport> rows;
    std::vector<SurfaceGrid> grids;
};

std::vector<Interval> default_bands(Scenario scenario);
std::string band_label(const Interval& band);

/// Published comparison values shipped as data.
class ReferenceTable {
public:
    struct Entry {
        std::string table, scenario, band, method, column;
        double value = 0.0;
    };

    explicit ReferenceTable(std::vector<Entry> entries);
    static ReferenceTable load(const std::filesystem::path& path);
    static const ReferenceTable& standard();

    std::optional<double> lookup(std::string_view table, std::string_view scenario, std::string_view band,
                                 std::string_view method, std::string_view column) const;
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
};

/// Registry subset: models of `scenario` whose frequency lies in `band`.
std::vector<SourceModel> select_models(std::span<const SourceModel> registry, Scenario scenario, const Interval& band);

/// Order study: order-3, order-2 and first-order weighted fits on the
/// street-canyon set without the 18 GHz Nokia/AAU model, scored on that
/// model's corpus and by leave-one-out; plus surface grids of trial 0.
ExperimentResult run_order_study(std::span<const SourceModel> registry, const ExperimentSpec& spec);

/// Robust-estimator study on the 2.9 GHz Qualcomm street-canyon model with
/// gamma pinned to 2: six regressors with and without injected outliers.
ExperimentResult run_robust_study(std::span<const SourceModel> registry, const ExperimentSpec& spec);

/// Pooled ABG, WABG and EWABG per scenario and band.
ExperimentResult run_integration_study(std::span<const SourceModel> registry, const ExperimentSpec& spec);

/// Same three methods on clean and contaminated corpora per outlier band.
ExperimentResult run_outlier_study(std::span<const SourceModel> registry, const ExperimentSpec& spec);

ExperimentResult run_experiment(std::span<const SourceModel> registry, const ExperimentSpec& spec);

/// Mean OLS sigma of the robust study's contaminated corpora for a given
/// outlier magnitude scale.
double robust_study_ols_sigma(std::span<const SourceModel> registry, const ExperimentSpec& spec, double magnitude);

/// Bisection on the magnitude scale until robust_study_ols_sigma hits
/// `target_sigma`.
double calibrate_outlier_magnitude(std::span<const SourceModel> registry, const ExperimentSpec& spec,
                                   double target_sigma, double lo = 0.0, double hi = 60.0, double tol = 1e-4);

}  // namespace pathfuse
