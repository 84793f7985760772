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

#include "pathfuse/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pathfuse/errors.hpp"
#include "pathfuse/evaluation.hpp"
#include "pathfuse/rng.hpp"

namespace pathfuse {

std::string_view to_string(FilterScope scope)
{
    return scope == FilterScope::PerSource ? "per-source" : "pooled";
}

FilterScope parse_filter_scope(std::string_view text)
{
    if (text == "per-source") return FilterScope::PerSource;
    if (text == "pooled") return FilterScope::Pooled;
    throw Error(ErrorKind::Config, "unknown filter scope '" + std::string(text) + "'");
}

std::string_view to_string(WeightingPolicy policy)
{
    switch (policy) {
    case WeightingPolicy::Identity: return "identity";
    case WeightingPolicy::InverseVariance: return "inverse-variance";
    case WeightingPolicy::BalanceCount: return "balance-count";
    case WeightingPolicy::Mixture: return "mixture";
    case WeightingPolicy::SourcePoints: return "source-points";
    }
    return "?";
}

WeightingPolicy parse_weighting_policy(std::string_view text)
{
    if (text == "identity") return WeightingPolicy::Identity;
    if (text == "inverse-variance" || text == "sigma") return WeightingPolicy::InverseVariance;
    if (text == "balance-count" || text == "count") return WeightingPolicy::BalanceCount;
    if (text == "mixture") return WeightingPolicy::Mixture;
    if (text == "source-points") return WeightingPolicy::SourcePoints;
    throw Error(ErrorKind::Config, "unknown weighting policy '" + std::string(text) + "'");
}

SourceCatalog make_catalog(std::span<const SourceModel> models)
{
    SourceCatalog catalog;
    for (const auto& m : models) catalog[m.id] = {m.sigma_db, m.n_points};
    return catalog;
}

std::vector<double> compute_weights(std::span<const PathLossSample> samples, const SourceCatalog& catalog,
                                    WeightingPolicy policy)
{
    std::map<std::string_view, std::size_t> counts;
    for (const auto& s : samples) ++counts[s.source_id];
    std::vector<double> w(samples.size(), 1.0);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& id = samples[i].source_id;
        const auto it = catalog.find(id);
        if (it == catalog.end()) throw Error(ErrorKind::Data, "sample " + std::to_string(i) + ": unknown source '" + id + "'");
        const double sigma = it->second.sigma_db;
        const auto n = static_cast<double>(counts[id]);
        switch (policy) {
        case WeightingPolicy::Identity: w[i] = 1.0; break;
        case WeightingPolicy::InverseVariance: w[i] = 1.0 / (sigma * sigma); break;
        case WeightingPolicy::BalanceCount: w[i] = 1.0 / n; break;
        case WeightingPolicy::Mixture: w[i] = 1.0 / (n * sigma * sigma); break;
        case WeightingPolicy::SourcePoints: w[i] = static_cast<double>(it->second.n_points) / n; break;
        }
        if (!std::isfinite(w[i]) || !(w[i] > 0.0))
            throw Error(ErrorKind::Data, "source '" + id + "' yields an invalid weight");
    }
    if (!w.empty()) {
        double mean = 0.0;
        for (double v : w) mean += v;
        mean /= static_cast<double>(w.size());
        for (double& v : w) v /= mean;
    }
    return w;
}

void PipelineConfig::validate() const
{
    if (!freq_band.ordered()) throw Error(ErrorKind::Config, "frequency band must be ordered");
    if (!(outlier_threshold > 0.0)) throw Error(ErrorKind::Config, "outlier threshold must be > 0");
    if (robust) robust->validate();
    if (pinned_gamma && !std::isfinite(*pinned_gamma)) throw Error(ErrorKind::Config, "pinned gamma must be finite");
}

int frequency_degree(std::size_t index)
{
    static constexpr int degree[] = {0, 0, 1, 0, 1, 2, 0, 1, 2, 3};
    if (index >= std::size(degree)) throw Error(ErrorKind::Contract, "design column index out of range");
    return degree[index];
}

std::vector<std::size_t> identifiable_columns(ModelOrder order, std::size_t distinct_frequencies)
{
    std::vector<std::size_t> cols;
    for (std::size_t k = 0; k < parameter_count(order); ++k)
        if (static_cast<std::size_t>(frequency_degree(k)) < std::max<std::size_t>(distinct_frequencies, 1)) cols.push_back(k);
    return cols;
}

std::vector<std::size_t> distance_only_columns(ModelOrder order)
{
    return identifiable_columns(order, 1);
}

DesignSystem reduced_design_system(std::span<const PathLossSample> samples, ModelOrder order,
                                   const std::vector<std::size_t>& columns, std::optional<double> pinned_gamma)
{
    if (samples.size() < columns.size()) {
        throw Error(ErrorKind::InsufficientData, "fit needs at least " + std::to_string(columns.size()) + " samples, got " +
                                                     std::to_string(samples.size()));
    }
    const auto n = static_cast<Eigen::Index>(samples.size());
    DesignSystem sys{Eigen::MatrixXd(n, static_cast<Eigen::Index>(columns.size())), Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = samples[static_cast<std::size_t>(i)];
        const auto row = design_row(order, s.distance_m, s.frequency_ghz);
        for (std::size_t k = 0; k < columns.size(); ++k) sys.X(i, static_cast<Eigen::Index>(k)) = row[columns[k]];
        sys.y(i) = s.path_loss_db - (pinned_gamma ? *pinned_gamma * row[2] : 0.0);
        sys.w(i) = s.weight;
    }
    return sys;
}

DesignSystem pinned_design_system(std::span<const PathLossSample> samples, ModelOrder order, double gamma)
{
    return reduced_design_system(samples, order, distance_only_columns(order), gamma);
}

namespace {

std::size_t distinct_frequencies(std::span<const PathLossSample> samples)
{
    std::set<double> f;
    for (const auto& s : samples) f.insert(s.frequency_ghz);
    return f.size();
}

std::vector<std::size_t> columns_for(std::span<const PathLossSample> samples, const PipelineConfig& cfg)
{
    if (cfg.pinned_gamma) return distance_only_columns(cfg.order);
    if (!cfg.drop_unidentified_frequency_terms) return identifiable_columns(cfg.order, parameter_count(cfg.order));
    return identifiable_columns(cfg.order, distinct_frequencies(samples));
}

CoefficientSet expand(const Eigen::VectorXd& reduced, const std::vector<std::size_t>& cols, const PipelineConfig& cfg)
{
    std::vector<double> full(parameter_count(cfg.order), 0.0);
    for (std::size_t k = 0; k < cols.size(); ++k) full[cols[k]] = reduced(static_cast<Eigen::Index>(k));
    if (cfg.pinned_gamma) full[2] = *cfg.pinned_gamma;
    return CoefficientSet(cfg.order, std::move(full));
}

bool filters(const PipelineConfig& cfg)
{
    return cfg.robust && cfg.robust->kind != RegressorKind::OLS && cfg.robust->kind != RegressorKind::WLS;
}

}  // namespace

PipelineResult fit_pathloss_model(std::span<const PathLossSample> corpus, const SourceCatalog& catalog,
                                  const PipelineConfig& cfg, const GasAttenuationTable& gas)
{
    cfg.validate();

    // (1) band selection
    std::vector<PathLossSample> in_band;
    for (const auto& s : corpus)
        if (cfg.freq_band.contains(s.frequency_ghz)) in_band.push_back(s);
    const auto cols = columns_for(in_band, cfg);
    const auto p = cols.size();
    if (in_band.size() < p + 1) {
        throw Error(ErrorKind::InsufficientData, "only " + std::to_string(in_band.size()) +
                                                     " samples inside the frequency band; need " +
                                                     std::to_string(p + 1));
    }

    // (2) gas removal
    const std::vector<PathLossSample> working = cfg.gas_correction ? remove_gas_loss(gas, in_band) : in_band;

    // (3) robust outlier filter
    std::vector<bool> keep(working.size(), true);
    FitDiagnostics robust_diag;
    if (filters(cfg)) {
        auto rc = *cfg.robust;
        const auto mark = [&](const std::vector<std::size_t>& members, ModelOrder order,
                              const std::vector<std::size_t>& columns, std::uint64_t seed) {
            std::vector<PathLossSample> part;
            for (auto i : members) part.push_back(working[i]);
            const auto sys = reduced_design_system(part, order, columns, cfg.pinned_gamma);
            rc.seed = seed;
            robust_diag = fit_regressor(sys.X, sys.y, sys.w, rc);
            const Eigen::VectorXd r = sys.y - sys.X * robust_diag.coefficients;
            std::vector<double> rv(r.data(), r.data() + r.size());
            const double limit = cfg.outlier_threshold * mad_scale(rv);
            for (std::size_t k = 0; k < members.size(); ++k) keep[members[k]] = std::abs(rv[k]) <= limit;
        };
        if (cfg.filter_scope == FilterScope::Pooled) {
            std::vector<std::size_t> all(working.size());
            std::iota(all.begin(), all.end(), std::size_t{0});
            mark(all, cfg.order, cols, cfg.seed);
        } else {
            std::map<std::string, std::vector<std::size_t>> groups;
            for (std::size_t i = 0; i < working.size(); ++i) groups[working[i].source_id].push_back(i);
            for (const auto& [id, members] : groups) {
                std::vector<PathLossSample> part;
                for (auto i : members) part.push_back(working[i]);
                const auto c = cfg.pinned_gamma ? distance_only_columns(ModelOrder::First)
                                                : identifiable_columns(ModelOrder::First, distinct_frequencies(part));
                // Too few samples to tell outliers apart: keep the source whole.
                if (members.size() < c.size() + 2) continue;
                mark(members, ModelOrder::First, c, derive_seed(cfg.seed, id));
            }
        }
    }

    PipelineResult result;
    result.n_in_band = working.size();
    std::vector<PathLossSample> kept;
    for (std::size_t i = 0; i < working.size(); ++i) {
        if (!keep[i]) continue;
        kept.push_back(working[i]);
        result.survivors.push_back(in_band[i]);
    }
    result.n_outliers = working.size() - kept.size();
    if (kept.size() < p + 1) {
        throw Error(ErrorKind::InsufficientData, "only " + std::to_string(kept.size()) +
                                                     " samples survive outlier filtering; need " + std::to_string(p + 1));
    }

    // (4) weights, (5) weighted LS
    result.survivor_weights = compute_weights(kept, catalog, cfg.weighting);
    for (std::size_t i = 0; i < kept.size(); ++i) kept[i].weight = result.survivor_weights[i];
    const auto sys = reduced_design_system(kept, cfg.order, cols, cfg.pinned_gamma);
    const Eigen::VectorXd coef = solve_wls(sys.X, sys.y, sys.w);

    // (6) weighted standard deviation on the survivors
    auto& model = result.model;
    model.coefficients = expand(coef, cols, cfg);
    model.gas_corrected = cfg.gas_correction;
    model.sigma_db = weighted_std(model.coefficients, kept, result.survivor_weights);
    const auto [fmin, fmax] = std::minmax_element(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        return a.frequency_ghz < b.frequency_ghz;
    });
    const auto [dmin, dmax] = std::minmax_element(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        return a.distance_m < b.distance_m;
    });
    model.freq_range_ghz = {fmin->frequency_ghz, fmax->frequency_ghz};
    model.dist_range_m = {dmin->distance_m, dmax->distance_m};
    std::set<std::string> ids;
    for (const auto& s : kept) ids.insert(s.source_id);
    model.provenance.assign(ids.begin(), ids.end());

    auto& d = result.diagnostics;
    d.coefficients = model.coefficients.as_vector();
    d.inlier_mask = keep;
    d.residual_wsd = model.sigma_db;
    d.condition_estimate = condition_estimate(sys.X, sys.w);
    d.iterations_used = robust_diag.iterations_used;
    d.lambda = robust_diag.lambda;
    d.lambda1 = robust_diag.lambda1;
    return result;
}

FittedModel fit_wabg(std::span<const PathLossSample> corpus, const SourceCatalog& catalog, WeightingPolicy policy)
{
    PipelineConfig cfg;
    cfg.order = ModelOrder::First;
    cfg.weighting = policy;
    cfg.robust.reset();
    cfg.gas_correction = false;
    return fit_pathloss_model(corpus, catalog, cfg).model;
}

}  // namespace pathfuse
