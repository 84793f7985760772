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
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pathfuse/atmosphere.hpp"
#include "pathfuse/estimators.hpp"
#include "pathfuse/model.hpp"

namespace pathfuse {

/// Per-source weighting of the least-squares residuals.
///   Identity         w = 1
///   InverseVariance  w = 1 / sigma_j^2
///   BalanceCount     w = 1 / n_j
///   Mixture          w = 1 / (n_j sigma_j^2)
///   SourcePoints     w = N_j / n_j, N_j the source's published point count
///                    (pooling the original datasets at their true sizes)
/// n_j is the number of samples of source j in the corpus being fitted.
enum class WeightingPolicy { Identity, InverseVariance, BalanceCount, Mixture, SourcePoints };

std::string_view to_string(WeightingPolicy policy);
WeightingPolicy parse_weighting_policy(std::string_view text);

struct SourceStats {
    double sigma_db = 0.0;
    int n_points = 0;
};

using SourceCatalog = std::map<std::string, SourceStats, std::less<>>;

SourceCatalog make_catalog(std::span<const SourceModel> models);

/// Weights normalised to mean 1. Throws Error(Data) for an unknown source id.
std::vector<double> compute_weights(std::span<const PathLossSample> samples, const SourceCatalog& catalog,
                                    WeightingPolicy policy);

enum class FilterScope { PerSource, Pooled };

std::string_view to_string(FilterScope scope);
FilterScope parse_filter_scope(std::string_view text);

struct PipelineConfig {
    ModelOrder order = ModelOrder::Second;
    WeightingPolicy weighting = WeightingPolicy::Mixture;
    /// Outlier filter. Unset, OLS or WLS: no filtering.
    std::optional<RegressorConfig> robust = regressor_config(RegressorKind::TheilSen);
    /// Samples with |residual| above this many robust scales are dropped.
    double outlier_threshold = 3.0;
    /// PerSource fits the robust regressor to each source's samples with a
    /// first-order design and thresholds against that source's own scale.
    /// Pooled fits it once to the full order-p design.
    FilterScope filter_scope = FilterScope::PerSource;
    bool gas_correction = true;
    Interval freq_band{0.0, std::numeric_limits<double>::infinity()};
    /// Fix gamma1 to this value and drop every frequency-dependent term.
    /// For single-frequency corpora, whose frequency columns are collinear.
    std::optional<double> pinned_gamma;
    /// With k distinct frequencies in the band, fix every term whose power
    /// of log f exceeds k - 1 to zero. Otherwise such corpora are singular.
    bool drop_unidentified_frequency_terms = true;
    std::uint64_t seed = 0;

    void validate() const;
};

struct PipelineResult {
    FittedModel model;
    FitDiagnostics diagnostics;              // coefficients, mask over in-band samples
    std::vector<PathLossSample> survivors;   // in-band inliers, original (gas-included) losses
    std::vector<double> survivor_weights;
    std::size_t n_in_band = 0;
    std::size_t n_outliers = 0;
};

/// Power of log f in design column `index` of the canonical order.
int frequency_degree(std::size_t index);

/// Columns kept when the corpus has `distinct_frequencies` distinct values
/// (all columns when the count exceeds the order).
std::vector<std::size_t> identifiable_columns(ModelOrder order, std::size_t distinct_frequencies);

/// Column indices kept by pinned_design_system.
std::vector<std::size_t> distance_only_columns(ModelOrder order);

/// Design system restricted to `columns`. With a pinned gamma, gamma * Lf
/// is moved to the left-hand side.
DesignSystem reduced_design_system(std::span<const PathLossSample> samples, ModelOrder order,
                                   const std::vector<std::size_t>& columns, std::optional<double> pinned_gamma);

/// Distance-only columns with gamma1 fixed to `gamma`.
DesignSystem pinned_design_system(std::span<const PathLossSample> samples, ModelOrder order, double gamma);

/// Band selection, optional gas removal, robust outlier filter, weights,
/// weighted LS on the survivors, weighted standard deviation of the
/// survivors. Throws Error(InsufficientData) when fewer than p + 1 samples
/// survive, Error(SingularSystem) from the solve.
PipelineResult fit_pathloss_model(std::span<const PathLossSample> corpus, const SourceCatalog& catalog,
                                  const PipelineConfig& cfg,
                                  const GasAttenuationTable& gas = GasAttenuationTable::standard());

/// First-order weighted fit: no robust filter, no gas correction.
FittedModel fit_wabg(std::span<const PathLossSample> corpus, const SourceCatalog& catalog, WeightingPolicy policy);

}  // namespace pathfuse
