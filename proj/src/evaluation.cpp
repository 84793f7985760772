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

#include "pathfuse/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pathfuse/errors.hpp"

namespace pathfuse {

double weighted_rms(std::span<const double> residuals, std::span<const double> weights)
{
    if (residuals.empty()) throw Error(ErrorKind::Metric, "weighted_std: no samples");
    if (residuals.size() != weights.size()) throw Error(ErrorKind::Metric, "weighted_std: residual/weight size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        if (!(weights[i] >= 0.0)) throw Error(ErrorKind::Metric, "weighted_std: negative or NaN weight");
        num += weights[i] * residuals[i] * residuals[i];
        den += weights[i];
    }
    if (!(den > 0.0)) throw Error(ErrorKind::Metric, "weighted_std: weights sum to zero");
    return std::sqrt(num / den);
}

double weighted_std(const CoefficientSet& coefficients, std::span<const PathLossSample> samples,
                    std::span<const double> weights)
{
    std::vector<double> r(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        r[i] = samples[i].path_loss_db - predict(coefficients, samples[i].distance_m, samples[i].frequency_ghz);
    return weighted_rms(r, weights);
}

double weighted_std(const FittedModel& model, std::span<const PathLossSample> samples, std::span<const double> weights,
                    const GasAttenuationTable* gas)
{
    if (!model.gas_corrected || gas == nullptr) return weighted_std(model.coefficients, samples, weights);
    std::vector<double> r(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        r[i] = samples[i].path_loss_db - restore_gas_loss(*gas, model, samples[i].distance_m, samples[i].frequency_ghz);
    return weighted_rms(r, weights);
}

double error_ratio(double sigma_contaminated, double sigma_clean)
{
    if (!(sigma_clean > 0.0)) throw Error(ErrorKind::Metric, "error_ratio: baseline sigma must be > 0");
    return 100.0 * (sigma_contaminated - sigma_clean) / sigma_clean;
}

// ---- methods -----------------------------------------------------------

Method pooled_abg_method(WeightingPolicy weighting)
{
    Method m{"Sun16", {}};
    m.pipeline.order = ModelOrder::First;
    m.pipeline.weighting = weighting;
    m.pipeline.robust.reset();
    m.pipeline.gas_correction = false;
    return m;
}

Method wabg_method(WeightingPolicy weighting)
{
    Method m = pooled_abg_method(weighting);
    m.label = "WABG";
    return m;
}

Method ewabg_method(ModelOrder order, bool gas_correction)
{
    Method m{"EWABG", {}};
    m.pipeline.order = order;
    m.pipeline.weighting = WeightingPolicy::Mixture;
    m.pipeline.robust = regressor_config(RegressorKind::TheilSen);
    m.pipeline.gas_correction = gas_correction;
    if (order == ModelOrder::Third) m.label = "EWABG3";
    return m;
}

PipelineResult fit_method(const Method& method, std::span<const PathLossSample> corpus, const SourceCatalog& catalog,
                          std::uint64_t seed)
{
    PipelineConfig cfg = method.pipeline;
    cfg.seed = seed;
    return fit_pathloss_model(corpus, catalog, cfg);
}

// ---- leave-one-out -----------------------------------------------------

LoocvResult loocv_detailed(std::span<const SourceModel> models, const LoocvConfig& cfg)
{
    if (models.size() < 3) throw Error(ErrorKind::InsufficientData, "leave-one-out needs at least 3 models");
    const auto catalog = make_catalog(models);
    LoocvResult out;
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < models.size(); ++k) {
        std::vector<SourceModel> train;
        for (std::size_t j = 0; j < models.size(); ++j)
            if (j != k) train.push_back(models[j]);
        const SourceModel& held = models[k];
        LoocvFold fold{held.id, 0, 0.0, std::nullopt};
        try {
            const auto corpus = synthesize_corpus(train, cfg.synthesis);
            const auto test = synthesize_corpus(std::span(&held, 1), cfg.synthesis);
            const auto fit = fit_method(cfg.method, corpus, catalog, derive_seed(cfg.synthesis.seed, "loocv", k));
            const std::vector<double> unit(test.size(), 1.0);
            fold.n_test = test.size();
            fold.sigma = weighted_std(fit.model, test, unit, &GasAttenuationTable::standard());
        } catch (const Error& e) {
            if (!cfg.skip_failed_folds) throw;
            fold.error = std::string(to_string(e.kind())) + ": " + e.what();
        }
        if (!fold.error) {
            num += static_cast<double>(fold.n_test) * fold.sigma;
            den += static_cast<double>(fold.n_test);
        }
        out.folds.push_back(std::move(fold));
    }
    if (!(den > 0.0)) throw Error(ErrorKind::InsufficientData, "every leave-one-out fold failed");
    out.sigma = num / den;
    return out;
}

double loocv(std::span<const SourceModel> models, const LoocvConfig& cfg)
{
    return loocv_detailed(models, cfg).sigma;
}

// ---- surfaces ----------------------------------------------------------

SurfaceGrid evaluate_surface(const std::string& label, const CoefficientSet& coefficients,
                             std::vector<double> distances_m, std::vector<double> frequencies_ghz)
{
    SurfaceGrid g;
    g.label = label;
    g.distances_m = std::move(distances_m);
    g.frequencies_ghz = std::move(frequencies_ghz);
    const auto nd = static_cast<Eigen::Index>(g.distances_m.size());
    const auto nf = static_cast<Eigen::Index>(g.frequencies_ghz.size());
    g.path_loss_db.resize(nd, nf);
    for (Eigen::Index i = 0; i < nd; ++i)
        for (Eigen::Index j = 0; j < nf; ++j)
            g.path_loss_db(i, j) = predict(coefficients, g.distances_m[static_cast<std::size_t>(i)],
                                           g.frequencies_ghz[static_cast<std::size_t>(j)]);
    const auto& P = g.path_loss_db;
    for (Eigen::Index i = 0; i < nd; ++i) {
        for (Eigen::Index j = 0; j + 1 < nf; ++j) {
            if (P(i, j + 1) < P(i, j)) {
                ++g.nonmonotone_f;
                if (g.frequencies_ghz[static_cast<std::size_t>(j)] >= 1.0 &&
                    g.frequencies_ghz[static_cast<std::size_t>(j + 1)] <= 18.0)
                    ++g.nonmonotone_f_1_18;
            }
        }
    }
    for (Eigen::Index j = 0; j < nf; ++j)
        for (Eigen::Index i = 0; i + 1 < nd; ++i)
            if (P(i + 1, j) < P(i, j)) ++g.nonmonotone_d;

    // Second differences in log coordinates, normalised by the log steps.
    // Zero for a surface that is affine in (log d, log f).
    const auto ld = [&](Eigen::Index i) { return std::log10(g.distances_m[static_cast<std::size_t>(i)]); };
    const auto lf = [&](Eigen::Index j) { return std::log10(g.frequencies_ghz[static_cast<std::size_t>(j)]); };
    double worst = 0.0;
    for (Eigen::Index i = 0; i < nd; ++i) {
        for (Eigen::Index j = 1; j + 1 < nf; ++j) {
            const double s1 = (P(i, j + 1) - P(i, j)) / (lf(j + 1) - lf(j));
            const double s0 = (P(i, j) - P(i, j - 1)) / (lf(j) - lf(j - 1));
            worst = std::max(worst, std::abs(s1 - s0));
        }
    }
    for (Eigen::Index j = 0; j < nf; ++j) {
        for (Eigen::Index i = 1; i + 1 < nd; ++i) {
            const double s1 = (P(i + 1, j) - P(i, j)) / (ld(i + 1) - ld(i));
            const double s0 = (P(i, j) - P(i - 1, j)) / (ld(i) - ld(i - 1));
            worst = std::max(worst, std::abs(s1 - s0));
        }
    }
    g.max_second_difference = worst;
    return g;
}

// ---- specs -------------------------------------------------------------

std::string_view to_string(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::OrderStudy: return "table2";
    case ExperimentKind::RobustStudy: return "table3";
    case ExperimentKind::IntegrationStudy: return "table4";
    case ExperimentKind::OutlierStudy: return "table5";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(std::string_view text)
{
    if (text == "table2" || text == "order") return ExperimentKind::OrderStudy;
    if (text == "table3" || text == "robust") return ExperimentKind::RobustStudy;
    if (text == "table4" || text == "integration") return ExperimentKind::IntegrationStudy;
    if (text == "table5" || text == "outliers") return ExperimentKind::OutlierStudy;
    throw Error(ErrorKind::Config, "unknown experiment '" + std::string(text) + "'");
}

void ExperimentSpec::validate() const
{
    if (trials < 1) throw Error(ErrorKind::Config, "trials must be >= 1");
    for (const auto& b : bands)
        if (!b.ordered()) throw Error(ErrorKind::Config, "experiment band must be ordered");
    if (outlier_bands_m.empty()) throw Error(ErrorKind::Config, "outlier_bands must not be empty");
    for (double w : outlier_bands_m)
        if (!(w > 0.0)) throw Error(ErrorKind::Config, "outlier band widths must be > 0");
    synthesis.validate();
    outliers.validate();
}

std::vector<Interval> default_bands(Scenario scenario)
{
    switch (scenario) {
    case Scenario::UMiSC: return {{2.0, 18.0}, {28.0, 73.5}, {2.0, 73.5}};
    case Scenario::UMiOS: return {{2.0, 18.0}, {29.0, 60.0}, {2.0, 60.0}};
    case Scenario::UMa: return {{2.0, 18.0}, {28.5, 73.5}, {2.0, 73.5}};
    }
    return {};
}

std::string band_label(const Interval& band)
{
    std::ostringstream os;
    os << band.lo << '-' << band.hi;
    return os.str();
}

std::vector<SourceModel> select_models(std::span<const SourceModel> registry, Scenario scenario, const Interval& band)
{
    std::vector<SourceModel> out;
    for (const auto& m : registry)
        if (m.scenario == scenario && band.contains(m.frequency_ghz)) out.push_back(m);
    return out;
}

// ---- reference constants -----------------------------------------------

ReferenceTable::ReferenceTable(std::vector<Entry> entries) : entries_(std::move(entries)) {}

ReferenceTable ReferenceTable::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Data, "cannot open reference table '" + path.string() + "'");
    std::vector<Entry> entries;
    std::string line;
    bool header = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "table,scenario,band,method,column,value")
                throw Error(ErrorKind::Data, path.string() + ": unexpected header");
            header = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 6) throw Error(ErrorKind::Data, path.string() + ":" + std::to_string(lineno) + ": expected 6 fields");
        Entry e{f[0], f[1], f[2], f[3], f[4], 0.0};
        try {
            e.value = std::stod(f[5]);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Data, path.string() + ":" + std::to_string(lineno) + ": bad value '" + f[5] + "'");
        }
        entries.push_back(std::move(e));
    }
    return ReferenceTable(std::move(entries));
}

const ReferenceTable& ReferenceTable::standard()
{
    static const ReferenceTable table = load(data_dir() / "reference_constants.csv");
    return table;
}

std::optional<double> ReferenceTable::lookup(std::string_view table, std::string_view scenario, std::string_view band,
                                             std::string_view method, std::string_view column) const
{
    for (const auto& e : entries_)
        if (e.table == table && e.scenario == scenario && e.band == band && e.method == method && e.column == column)
            return e.value;
    return std::nullopt;
}

}  // namespace pathfuse
