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

#include "pathfuse/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "pathfuse/acceptance.hpp"
#include "pathfuse/atmosphere.hpp"
#include "pathfuse/errors.hpp"
#include "pathfuse/estimators.hpp"

namespace pathfuse {

int exit_code_for(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Range:
    case ErrorKind::Domain: return kExitConfig;
    case ErrorKind::Data: return kExitData;
    default: return kExitNumeric;
    }
}

RunConfig run_config_from_json(const json& j)
{
    if (!j.is_object()) throw Error(ErrorKind::Config, "run config: expected a JSON object");
    RunConfig c;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "pipeline") c.pipeline = pipeline_config_from_json(value, c.pipeline);
            else if (key == "synthesis") c.synthesis = synthesis_spec_from_json(value, c.synthesis);
            else if (key == "outliers") c.outliers = outlier_spec_from_json(value, c.outliers);
            else if (key == "experiment") c.experiment = experiment_spec_from_json(value, c.experiment);
            else if (key == "out_dir") c.out_dir = value.get<std::string>();
            else if (key == "format") c.format = value.get<std::string>();
            else throw Error(ErrorKind::Config, "run config: unknown key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("run config: ") + e.what());
    }
    if (c.format != "all" && c.format != "json" && c.format != "csv")
        throw Error(ErrorKind::Config, "run config: format must be all, json or csv");
    return c;
}

json to_json(const RunConfig& c)
{
    json j;
    j["pipeline"] = to_json(c.pipeline);
    j["synthesis"] = to_json(c.synthesis);
    j["outliers"] = to_json(c.outliers);
    j["experiment"] = to_json(c.experiment);
    j["out_dir"] = c.out_dir;
    j["format"] = c.format;
    return j;
}

SourceCatalog catalog_for_samples(std::span<const PathLossSample> samples, std::span<const SourceModel> registry)
{
    std::map<std::string, std::vector<PathLossSample>> by_source;
    for (const auto& s : samples) by_source[s.source_id].push_back(s);
    SourceCatalog cat;
    for (const auto& [id, group] : by_source) {
        const auto n = static_cast<int>(group.size());
        auto it = std::find_if(registry.begin(), registry.end(), [&](const SourceModel& m) { return m.id == id; });
        if (it != registry.end()) {
            cat[id] = {it->sigma_db, n};
            continue;
        }
        std::set<double> freqs;
        for (const auto& s : group) freqs.insert(s.frequency_ghz);
        const auto cols = identifiable_columns(ModelOrder::First, freqs.size());
        double sigma = 1.0;
        if (group.size() > cols.size()) {
            const auto sys = reduced_design_system(group, ModelOrder::First, cols, std::nullopt);
            const Eigen::VectorXd r = sys.y - sys.X * solve_ols(sys.X, sys.y);
            const double s = std::sqrt(r.squaredNorm() / static_cast<double>(group.size() - cols.size()));
            if (s > 0.0) sigma = s;
        }
        cat[id] = {sigma, n};
    }
    return cat;
}

namespace {

Interval parse_band(const std::string& text)
{
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) throw std::invalid_argument(text);
        Interval band{std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
        if (!(band.lo > 0.0) || !band.ordered()) throw std::invalid_argument(text);
        return band;
    } catch (const std::exception&) {
        throw Error(ErrorKind::Config, "--band: expected lo:hi with 0 < lo <= hi, got '" + text + "'");
    }
}

std::string band_text(const Interval& b)
{
    return format_double(b.lo) + ":" + format_double(b.hi);
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
    f << content;
}

std::string fixed2(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

struct Common {
    std::optional<std::string> config;
    std::optional<std::string> registry;

    void add_to(CLI::App* cmd)
    {
        cmd->add_option("--config", config, "RunConfig JSON file");
        cmd->add_option("--registry", registry, "source model CSV (default: bundled table)");
    }

    RunConfig run_config() const
    {
        if (!config) return {};
        std::ifstream f(*config);
        if (!f) throw Error(ErrorKind::Config, "--config: cannot open '" + *config + "'");
        json j;
        try {
            j = json::parse(f);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::Config, "--config: " + std::string(e.what()));
        }
        return run_config_from_json(j);
    }

    std::vector<SourceModel> models() const
    {
        return registry ? load_registry(*registry) : standard_registry();
    }
};

struct SynthFlags {
    std::optional<int> points;
    std::optional<std::string> sampling;
    std::optional<double> noise_scale;

    void add_to(CLI::App* cmd)
    {
        cmd->add_option("--points", points, "samples per model (uniform and log sampling)");
        cmd->add_option("--sampling", sampling, "distance sampling: grid|uniform|log");
        cmd->add_option("--noise-scale", noise_scale, "multiplier on each model's sigma");
    }

    void apply(SynthesisSpec& s) const
    {
        if (points) s.points_per_model = *points;
        if (sampling) s.distance_sampling = parse_distance_sampling(*sampling);
        if (noise_scale) s.noise_scale = *noise_scale;
    }
};

std::vector<SourceModel> models_in_band(std::span<const SourceModel> registry, Scenario scenario,
                                        const Interval& band)
{
    auto models = select_models(registry, scenario, band);
    if (models.empty())
        throw Error(ErrorKind::Config, "no models in band " + band_text(band) + " for " + std::string(to_string(scenario)));
    return models;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Fuse published path-loss models into one wideband model"};
    app.name("pathfuse");
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "synthesize a sample corpus from the source models");
    Common synth_common;
    SynthFlags synth_flags;
    std::string synth_scenario;
    std::optional<std::string> synth_band, synth_out;
    std::uint64_t synth_seed = 0;
    synth_common.add_to(synth);
    synth_flags.add_to(synth);
    synth->add_option("--scenario", synth_scenario, "UMiSC|UMiOS|UMa")->required();
    synth->add_option("--band", synth_band, "frequency band lo:hi in GHz");
    synth->add_option("--seed", synth_seed, "random seed");
    synth->add_option("--out", synth_out, "output CSV (default: stdout)");

    // fit
    auto* fit = app.add_subcommand("fit", "fit a path-loss model");
    Common fit_common;
    SynthFlags fit_flags;
    std::optional<std::string> fit_samples, fit_scenario, fit_band, fit_out, fit_weighting, fit_robust, fit_gas,
        fit_scope;
    std::optional<int> fit_order;
    std::optional<double> fit_threshold;
    std::optional<std::uint64_t> fit_seed;
    fit_common.add_to(fit);
    fit_flags.add_to(fit);
    fit->add_option("--samples", fit_samples, "sample CSV to fit");
    fit->add_option("--scenario", fit_scenario, "synthesize from the registry for this scenario");
    fit->add_option("--band", fit_band, "frequency band lo:hi in GHz");
    fit->add_option("--order", fit_order, "model order 1|2|3");
    fit->add_option("--weighting", fit_weighting, "identity|inverse-variance|balance-count|mixture|source-points");
    fit->add_option("--robust", fit_robust, "none|theil-sen|ransac");
    fit->add_option("--threshold", fit_threshold, "outlier threshold in robust scales");
    fit->add_option("--filter-scope", fit_scope, "per-source|pooled");
    fit->add_option("--gas", fit_gas, "on|off");
    fit->add_option("--seed", fit_seed, "random seed");
    fit->add_option("--out", fit_out, "output JSON (default: stdout)");
    fit->get_option("--samples")->excludes(fit->get_option("--scenario"));

    // predict
    auto* pred = app.add_subcommand("predict", "evaluate a fitted model");
    std::string pred_model;
    double pred_d = 0.0, pred_f = 0.0;
    bool pred_extrapolate = false;
    pred->add_option("--model", pred_model, "model JSON written by fit")->required();
    pred->add_option("--d", pred_d, "distance in m")->required();
    pred->add_option("--f", pred_f, "frequency in GHz")->required();
    pred->add_flag("--extrapolate", pred_extrapolate, "allow d/f outside the model's working range");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run one of the reproduction experiments");
    Common exp_common;
    std::optional<std::string> exp_which, exp_out_dir, exp_format;
    std::optional<int> exp_trials;
    std::optional<std::uint64_t> exp_seed;
    exp_common.add_to(exp);
    exp->add_option("--which", exp_which, "table2|table3|table4|table5");
    exp->add_option("--trials", exp_trials, "Monte-Carlo trials");
    exp->add_option("--seed", exp_seed, "random seed");
    exp->add_option("--out-dir", exp_out_dir, "directory for report files");
    exp->add_option("--format", exp_format, "report files to write: all|json|csv");

    // gas
    auto* gas = app.add_subcommand("gas", "atmospheric gas attenuation");
    std::optional<double> gas_f;
    std::optional<std::string> gas_range;
    double gas_d = 1000.0;
    gas->add_option("--f", gas_f, "frequency in GHz");
    gas->add_option("--f-range", gas_range, "lo:hi:step in GHz");
    gas->add_option("--d", gas_d, "distance in m");
    gas->get_option("--f")->excludes(gas->get_option("--f-range"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (synth->parsed()) {
            RunConfig cfg = synth_common.run_config();
            synth_flags.apply(cfg.synthesis);
            cfg.synthesis.seed = synth_seed;
            cfg.synthesis.validate();
            const auto registry = synth_common.models();
            const auto scenario = parse_scenario(synth_scenario);
            const Interval band = synth_band ? parse_band(*synth_band) : Interval{0.0, 1e9};
            const auto models = models_in_band(registry, scenario, band);
            const auto corpus = synthesize_corpus(models, cfg.synthesis);
            std::map<std::string, int> counts;
            for (const auto& s : corpus) ++counts[s.source_id];
            for (const auto& [id, n] : counts) err << id << ": " << n << " samples\n";
            if (synth_out) {
                std::ostringstream os;
                write_samples(os, corpus);
                write_file(*synth_out, os.str());
            } else {
                write_samples(out, corpus);
            }
            return kExitOk;
        }

        if (fit->parsed()) {
            RunConfig cfg = fit_common.run_config();
            auto& p = cfg.pipeline;
            if (fit_order) p.order = order_from_int(*fit_order);
            if (fit_weighting) p.weighting = parse_weighting_policy(*fit_weighting);
            if (fit_robust) {
                if (*fit_robust == "none") p.robust.reset();
                else p.robust = regressor_config(parse_regressor_kind(*fit_robust));
            }
            if (fit_threshold) p.outlier_threshold = *fit_threshold;
            if (fit_scope) p.filter_scope = parse_filter_scope(*fit_scope);
            if (fit_gas) {
                if (*fit_gas != "on" && *fit_gas != "off") throw Error(ErrorKind::Config, "--gas: expected on or off");
                p.gas_correction = *fit_gas == "on";
            }
            if (fit_seed) p.seed = cfg.synthesis.seed = *fit_seed;
            fit_flags.apply(cfg.synthesis);
            const auto registry = fit_common.models();
            std::optional<Interval> band;
            if (fit_band) band = parse_band(*fit_band);
            std::vector<PathLossSample> corpus;
            if (fit_samples) {
                corpus = load_samples(*fit_samples);
                if (band) p.freq_band = *band;
            } else {
                if (!fit_scenario) throw Error(ErrorKind::Config, "fit: give --samples or --scenario");
                cfg.synthesis.validate();
                corpus = synthesize_corpus(
                    models_in_band(registry, parse_scenario(*fit_scenario), band.value_or(Interval{0.0, 1e9})),
                    cfg.synthesis);
            }
            p.validate();
            const auto res = fit_pathloss_model(corpus, catalog_for_samples(corpus, registry), p);
            json j = to_json(res.model);
            j["n_samples"] = corpus.size();
            j["n_in_band"] = res.n_in_band;
            j["n_inliers"] = res.survivors.size();
            j["n_outliers"] = res.n_outliers;
            j["config"] = to_json(cfg);
            const std::string text = j.dump(2) + "\n";
            if (fit_out) write_file(*fit_out, text);
            else out << text;
            return kExitOk;
        }

        if (pred->parsed()) {
            std::ifstream f(pred_model);
            if (!f) throw Error(ErrorKind::Config, "--model: cannot open '" + pred_model + "'");
            json j;
            try {
                j = json::parse(f);
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorKind::Data, "--model: " + std::string(e.what()));
            }
            const auto model = fitted_model_from_json(j);
            const auto outside = [](const Interval& r, double x) { return r.hi > 0.0 && !r.contains(x); };
            if (outside(model.dist_range_m, pred_d) || outside(model.freq_range_ghz, pred_f)) {
                const std::string msg = "d=" + format_double(pred_d) + " m, f=" + format_double(pred_f) +
                                        " GHz is outside the model range d " + band_text(model.dist_range_m) +
                                        " m, f " + band_text(model.freq_range_ghz) + " GHz";
                if (!pred_extrapolate) throw Error(ErrorKind::Config, msg + " (use --extrapolate)");
                err << "warning: extrapolating: " << msg << "\n";
            }
            const double pl = model.gas_corrected ? restore_gas_loss(GasAttenuationTable::standard(), model, pred_d, pred_f)
                                                  : predict(model.coefficients, pred_d, pred_f);
            out << fixed2(pl) << "\n";
            return kExitOk;
        }

        if (exp->parsed()) {
            RunConfig cfg = exp_common.run_config();
            auto& spec = cfg.experiment;
            if (exp_which) spec.which = parse_experiment_kind(*exp_which);
            if (exp_trials) spec.trials = *exp_trials;
            if (exp_seed) spec.seed = *exp_seed;
            if (exp_out_dir) cfg.out_dir = *exp_out_dir;
            if (exp_format) {
                if (*exp_format != "all" && *exp_format != "json" && *exp_format != "csv")
                    throw Error(ErrorKind::Config, "--format: expected all, json or csv");
                cfg.format = *exp_format;
            }
            spec.validate();
            const auto registry = exp_common.models();
            const auto result = run_experiment(registry, spec);
            const auto check = check_experiment(result);

            const std::filesystem::path dir(cfg.out_dir);
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            if (ec) throw Error(ErrorKind::Config, "--out-dir: cannot create '" + dir.string() + "'");
            const std::string stem(to_string(spec.which));
            const json config = to_json(cfg);
            if (cfg.format != "csv") {
                json j;
                j["config"] = config;
                j["seed"] = spec.seed;
                j["result"] = to_json(result);
                json checks = json::array();
                for (const auto& c : check.checks) checks.push_back({{"passed", c.passed}, {"check", c.text}});
                j["acceptance"] = {{"passed", check.passed()}, {"checks", checks}};
                write_file(dir / (stem + ".json"), j.dump(2) + "\n");
            }
            if (cfg.format != "json") {
                const std::string header = "# config: " + config.dump() + "\n";
                std::ostringstream report;
                write_report_csv(report, result);
                write_file(dir / (stem + ".csv"), header + report.str());
                if (spec.which == ExperimentKind::IntegrationStudy) {
                    std::ostringstream coefs;
                    write_coefficients_csv(coefs, result);
                    write_file(dir / (stem + "_coefficients.csv"), header + coefs.str());
                }
                for (const auto& g : result.grids) {
                    std::ostringstream grid;
                    write_grid_csv(grid, g);
                    write_file(dir / (stem + "_grid_" + g.label + ".csv"), grid.str());
                }
            }
            for (const auto& c : check.checks) out << (c.passed ? "PASS " : "FAIL ") << c.text << "\n";
            out << (check.passed() ? "PASS " : "FAIL ") << stem << ": " << check.name << "\n";
            return check.passed() ? kExitOk : kExitAcceptance;
        }

        if (gas->parsed()) {
            const auto& table = GasAttenuationTable::standard();
            if (!(gas_d > 0.0)) throw Error(ErrorKind::Config, "--d must be positive");
            if (gas_f) {
                out << fixed2(table.gas_loss(gas_d, *gas_f)) << "\n";
                return kExitOk;
            }
            if (!gas_range) throw Error(ErrorKind::Config, "gas: give --f or --f-range");
            double lo = 0, hi = 0, step = 0;
            char c1 = 0, c2 = 0;
            std::istringstream is(*gas_range);
            if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0.0) || hi < lo)
                throw Error(ErrorKind::Config, "--f-range: expected lo:hi:step, got '" + *gas_range + "'");
            out << "freq_ghz,atten_db_per_km,loss_db\n";
            const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
            for (long i = 0; i <= n; ++i) {
                const double f = lo + static_cast<double>(i) * step;
                out << format_double(f) << ',' << format_double(table.specific_attenuation(f)) << ','
                    << format_double(table.gas_loss(gas_d, f)) << "\n";
            }
            return kExitOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitConfig;
}

}  // namespace pathfuse
