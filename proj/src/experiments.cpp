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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pathfuse/errors.hpp"
#include "pathfuse/evaluation.hpp"
#include "pathfuse/rng.hpp"

namespace pathfuse {

namespace {

constexpr std::string_view kHeldOutModel = "UMiSC-NokiaAAU-18";
constexpr std::string_view kRobustModel = "UMiSC-Qualcomm-2.9";
constexpr double kRobustGamma = 2.0;

double mean(const std::vector<double>& v)
{
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<Scenario> scenarios_of(const ExperimentSpec& spec)
{
    if (!spec.scenarios.empty()) return spec.scenarios;
    return {Scenario::UMiSC, Scenario::UMiOS, Scenario::UMa};
}

std::vector<Interval> bands_of(const ExperimentSpec& spec, Scenario scenario)
{
    return spec.bands.empty() ? default_bands(scenario) : spec.bands;
}

const SourceModel& find_model(std::span<const SourceModel> registry, std::string_view id)
{
    for (const auto& m : registry)
        if (m.id == id) return m;
    throw Error(ErrorKind::Data, "registry has no model '" + std::string(id) + "'");
}

std::string width_label(double w)
{
    std::ostringstream os;
    os << w << 'm';
    return os.str();
}

SynthesisSpec trial_synthesis(const ExperimentSpec& spec, const std::string& tag, int trial)
{
    SynthesisSpec s = spec.synthesis;
    s.seed = derive_seed(spec.seed, tag, static_cast<std::uint64_t>(trial));
    return s;
}

CoefficientSet mean_coefficients(const std::vector<CoefficientSet>& sets)
{
    std::vector<double> acc(sets.front().size(), 0.0);
    for (const auto& c : sets)
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c[i];
    for (double& v : acc) v /= static_cast<double>(sets.size());
    return CoefficientSet(sets.front().order(), std::move(acc));
}

std::vector<Method> integration_methods(const ExperimentSpec& spec)
{
    return {pooled_abg_method(spec.pooled_weighting), wabg_method(spec.wabg_weighting),
            ewabg_method(ModelOrder::Second, spec.ewabg_gas_correction)};
}

std::vector<double> grid_range(double lo, double hi, double step)
{
    std::vector<double> v;
    for (int i = 0;; ++i) {
        const double x = lo + step * i;
        if (x > hi + 1e-9) break;
        v.push_back(x);
    }
    return v;
}

struct RobustTrial {
    std::vector<PathLossSample> clean;
    std::vector<PathLossSample> contaminated;
};

RobustTrial robust_trial(const SourceModel& model, const ExperimentSpec& spec, const OutlierSpec& outliers, int t)
{
    RobustTrial tr;
    tr.clean = synthesize_corpus(std::span(&model, 1), trial_synthesis(spec, "table3", t));
    auto rng = make_rng(spec.seed, "table3/outliers", static_cast<std::uint64_t>(t));
    tr.contaminated = inject_outliers(tr.clean, outliers, rng).samples;
    return tr;
}

double rms_of(const DesignSystem& sys, const Eigen::VectorXd& coef)
{
    return std::sqrt((sys.y - sys.X * coef).squaredNorm() / static_cast<double>(sys.y.size()));
}

}  // namespace

ExperimentResult run_order_study(std::span<const SourceModel> registry, const ExperimentSpec& spec)
{
    spec.validate();
    const auto& ref = ReferenceTable::standard();
    std::vector<SourceModel> all;
    for (const auto& m : registry)
        if (m.scenario == Scenario::UMiSC) all.push_back(m);
    const SourceModel& held = find_model(all, kHeldOutModel);
    std::vector<SourceModel> train;
    for (const auto& m : all)
        if (m.id != kHeldOutModel) train.push_back(m);
    const auto catalog = make_catalog(registry);

    auto m3 = ewabg_method(ModelOrder::Third, spec.ewabg_gas_correction);
    auto m2 = ewabg_method(ModelOrder::Second, spec.ewabg_gas_correction);
    m2.label = "EWABG2";
    const std::vector<Method> methods{m3, m2, wabg_method(spec.wabg_weighting)};

    ExperimentResult out;
    out.which = ExperimentKind::OrderStudy;
    std::vector<std::vector<double>> s18(methods.size()), sloo(methods.size());
    const auto gas = &GasAttenuationTable::standard();
    for (int t = 0; t < spec.trials; ++t) {
        const auto synth = trial_synthesis(spec, "table2", t);
        const auto corpus = synthesize_corpus(train, synth);
        const auto test = synthesize_corpus(std::span(&held, 1), synth);
        const std::vector<double> unit(test.size(), 1.0);
        for (std::size_t k = 0; k < methods.size(); ++k) {
            const auto fit = fit_method(methods[k], corpus, catalog, derive_seed(synth.seed, "fit", k));
            s18[k].push_back(weighted_std(fit.model, test, unit, gas));
            sloo[k].push_back(loocv(all, LoocvConfig{methods[k], synth, false}));
            if (t == 0) {
                out.grids.push_back(evaluate_surface(methods[k].label, fit.model.coefficients,
                                                     grid_range(10.0, 300.0, 10.0), grid_range(1.0, 80.0, 1.0)));
            }
        }
    }
    for (std::size_t k = 0; k < methods.size(); ++k) {
        for (const auto& [band, values] : {std::pair{"18GHz", &s18[k]}, std::pair{"LOOCV", &sloo[k]}}) {
            EvaluationReport r;
            r.scenario = "UMiSC";
            r.band = band;
            r.method = methods[k].label;
            r.column = "sigma";
            r.sigma = mean(*values);
            r.published = ref.lookup("table2", "UMiSC", band, methods[k].label, "sigma");
            r.trials = spec.trials;
            r.seed = spec.seed;
            r.trial_values = *values;
            out.rows.push_back(std::move(r));
        }
    }
    return out;
}

double robust_study_ols_sigma(std::span<const SourceModel> registry, const ExperimentSpec& spec, double magnitude)
{
    const SourceModel& model = find_model(registry, kRobustModel);
    OutlierSpec outliers = spec.outliers;
    outliers.magnitude_scale = magnitude;
    double acc = 0.0;
    for (int t = 0; t < spec.trials; ++t) {
        const auto tr = robust_trial(model, spec, outliers, t);
        const auto sys = pinned_design_system(tr.contaminated, ModelOrder::First, kRobustGamma);
        acc += rms_of(sys, solve_ols(sys.X, sys.y));
    }
    return acc / spec.trials;
}

double calibrate_outlier_magnitude(std::span<const SourceModel> registry, const ExperimentSpec& spec,
                                   double target_sigma, double lo, double hi, double tol)
{
    double flo = robust_study_ols_sigma(registry, spec, lo) - target_sigma;
    const double fhi = robust_study_ols_sigma(registry, spec, hi) - target_sigma;
    if (flo > 0.0 || fhi < 0.0) throw Error(ErrorKind::Range, "calibration target is not bracketed");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = robust_study_ols_sigma(registry, spec, mid) - target_sigma;
        if (fmid < 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ExperimentResult run_robust_study(std::span<const SourceModel> registry, const ExperimentSpec& spec)
{
    spec.validate();
    const auto& ref = ReferenceTable::standard();
    const SourceModel& model = find_model(registry, kRobustModel);
    const auto catalog = make_catalog(registry);
    const std::vector<RegressorKind> kinds{RegressorKind::OLS,        RegressorKind::Lasso,  RegressorKind::Ridge,
                                           RegressorKind::ElasticNet, RegressorKind::RANSAC, RegressorKind::TheilSen};

    std::vector<std::vector<double>> with(kinds.size()), without(kinds.size());
    for (int t = 0; t < spec.trials; ++t) {
        const auto tr = robust_trial(model, spec, spec.outliers, t);
        const std::uint64_t fit_seed = derive_seed(spec.seed, "table3/fit", static_cast<std::uint64_t>(t));
        for (int pass = 0; pass < 2; ++pass) {
            const auto& corpus = pass == 0 ? tr.contaminated : tr.clean;
            auto& sink = pass == 0 ? with : without;
            const auto sys = pinned_design_system(corpus, ModelOrder::First, kRobustGamma);
            for (std::size_t k = 0; k < kinds.size(); ++k) {
                double sigma = 0.0;
                if (kinds[k] == RegressorKind::TheilSen) {
                    PipelineConfig cfg;
                    cfg.order = ModelOrder::First;
                    cfg.weighting = WeightingPolicy::Identity;
                    cfg.robust = regressor_config(RegressorKind::TheilSen);
                    cfg.gas_correction = false;
                    cfg.pinned_gamma = kRobustGamma;
                    cfg.seed = fit_seed;
                    sigma = fit_pathloss_model(corpus, catalog, cfg).model.sigma_db;
                } else {
                    RegressorConfig rc;
                    rc.kind = kinds[k];
                    rc.tune_penalty = true;
                    rc.seed = fit_seed;
                    const auto d = fit_regressor(sys.X, sys.y, sys.w, rc);
                    sigma = rms_of(sys, d.coefficients);
                }
                sink[k].push_back(sigma);
            }
        }
    }

    ExperimentResult out;
    out.which = ExperimentKind::RobustStudy;
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        for (const auto& [column, values] : {std::pair{"sigma_with", &with[k]}, std::pair{"sigma_without", &without[k]}}) {
            EvaluationReport r;
            r.scenario = "UMiSC";
            r.band = "2.9";
            r.method = std::string(to_string(kinds[k]));
            r.column = column;
            r.sigma = mean(*values);
            r.published = ref.lookup("table3", "UMiSC", "2.9", r.method, column);
            r.trials = spec.trials;
            r.seed = spec.seed;
            r.trial_values = *values;
            out.rows.push_back(std::move(r));
        }
    }
    return out;
}

ExperimentResult run_integration_study(std::span<const SourceModel> registry, const ExperimentSpec& spec)
{
    spec.validate();
    const auto& ref = ReferenceTable::standard();
    const auto catalog = make_catalog(registry);
    const auto methods = integration_methods(spec);
    ExperimentResult out;
    out.which = ExperimentKind::IntegrationStudy;
    for (Scenario scenario : scenarios_of(spec)) {
        const std::string scen(to_string(scenario));
        for (const auto& band : bands_of(spec, scenario)) {
            const auto models = select_models(registry, scenario, band);
            if (models.empty()) throw Error(ErrorKind::Config, "no models in band " + band_label(band) + " for " + scen);
            const std::string cell = scen + "/" + band_label(band);
            std::vector<std::vector<double>> sig(methods.size());
            std::vector<std::vector<CoefficientSet>> coefs(methods.size());
            for (int t = 0; t < spec.trials; ++t) {
                const auto synth = trial_synthesis(spec, "table4/" + cell, t);
                const auto corpus = synthesize_corpus(models, synth);
                for (std::size_t k = 0; k < methods.size(); ++k) {
                    const auto fit = fit_method(methods[k], corpus, catalog, derive_seed(synth.seed, "fit", k));
                    sig[k].push_back(fit.model.sigma_db);
                    coefs[k].push_back(fit.model.coefficients);
                }
            }
            for (std::size_t k = 0; k < methods.size(); ++k) {
                EvaluationReport r;
                r.scenario = scen;
                r.band = band_label(band);
                r.method = methods[k].label;
                r.column = "sigma";
                r.sigma = mean(sig[k]);
                r.sigma_orig = ref.lookup("table4", scen, r.band, r.method, "sigma_orig");
                r.published = ref.lookup("table4", scen, r.band, r.method, "sigma_exp");
                r.trials = spec.trials;
                r.seed = spec.seed;
                r.coefficients = mean_coefficients(coefs[k]);
                r.trial_values = sig[k];
                out.rows.push_back(std::move(r));
            }
        }
    }
    return out;
}

ExperimentResult run_outlier_study(std::span<const SourceModel> registry, const ExperimentSpec& spec)
{
    spec.validate();
    const auto& ref = ReferenceTable::standard();
    const auto catalog = make_catalog(registry);
    const auto methods = integration_methods(spec);
    const auto& widths = spec.outlier_bands_m;
    ExperimentResult out;
    out.which = ExperimentKind::OutlierStudy;
    for (Scenario scenario : scenarios_of(spec)) {
        const std::string scen(to_string(scenario));
        for (const auto& band : bands_of(spec, scenario)) {
            const auto models = select_models(registry, scenario, band);
            if (models.empty()) throw Error(ErrorKind::Config, "no models in band " + band_label(band) + " for " + scen);
            const std::string cell = scen + "/" + band_label(band);
            // [method][width] -> per-trial values
            std::vector<std::vector<std::vector<double>>> sig(methods.size(), std::vector<std::vector<double>>(widths.size()));
            auto rat = sig;
            for (int t = 0; t < spec.trials; ++t) {
                const auto synth = trial_synthesis(spec, "table5/" + cell, t);
                const auto clean = synthesize_corpus(models, synth);
                std::vector<double> base(methods.size());
                for (std::size_t k = 0; k < methods.size(); ++k)
                    base[k] = fit_method(methods[k], clean, catalog, derive_seed(synth.seed, "fit", k)).model.sigma_db;
                for (std::size_t b = 0; b < widths.size(); ++b) {
                    OutlierSpec os = spec.outliers;
                    os.band_width_m = widths[b];
                    os.seed = derive_seed(spec.seed, "table5/" + cell + "/" + width_label(widths[b]),
                                          static_cast<std::uint64_t>(t));
                    const auto dirty = inject_outliers_per_source(clean, os).samples;
                    for (std::size_t k = 0; k < methods.size(); ++k) {
                        const double s =
                            fit_method(methods[k], dirty, catalog, derive_seed(synth.seed, "fit", k)).model.sigma_db;
                        sig[k][b].push_back(s);
                        rat[k][b].push_back(error_ratio(s, base[k]));
                    }
                }
            }
            for (std::size_t k = 0; k < methods.size(); ++k) {
                for (std::size_t b = 0; b < widths.size(); ++b) {
                    EvaluationReport r;
                    r.scenario = scen;
                    r.band = band_label(band);
                    r.method = methods[k].label;
                    r.column = width_label(widths[b]);
                    r.sigma = mean(sig[k][b]);
                    r.error_ratio_percent = mean(rat[k][b]);
                    r.published = ref.lookup("table5", scen, r.band, r.method, "sigma_" + r.column);
                    if (const auto clean_pub = ref.lookup("table4", scen, r.band, r.method, "sigma_exp"))
                        r.error_ratio_published = error_ratio(r.sigma, *clean_pub);
                    r.trials = spec.trials;
                    r.seed = spec.seed;
                    r.trial_values = sig[k][b];
                    r.trial_ratios = rat[k][b];
                    out.rows.push_back(std::move(r));
                }
            }
        }
    }
    return out;
}

ExperimentResult run_experiment(std::span<const SourceModel> registry, const ExperimentSpec& spec)
{
    switch (spec.which) {
    case ExperimentKind::OrderStudy: return run_order_study(registry, spec);
    case ExperimentKind::RobustStudy: return run_robust_study(registry, spec);
    case ExperimentKind::IntegrationStudy: return run_integration_study(registry, spec);
    case ExperimentKind::OutlierStudy: return run_outlier_study(registry, spec);
    }
    throw Error(ErrorKind::Config, "unknown experiment");
}

}  // namespace pathfuse
