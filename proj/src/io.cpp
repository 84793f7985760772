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

#include "pathfuse/io.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <type_traits>

#include "pathfuse/errors.hpp"

namespace pathfuse {

namespace {

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

struct Where {
    const std::string& name;
    int line;
    [[noreturn]] void fail(const std::string& what) const
    {
        throw Error(ErrorKind::Data, name + ":" + std::to_string(line) + ": " + what);
    }
};

double parse_number(const std::string& text, const char* field, const Where& at)
{
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty())
        at.fail(std::string("field '") + field + "': not a number: '" + text + "'");
    return v;
}

int parse_int(const std::string& text, const char* field, const Where& at)
{
    int v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty())
        at.fail(std::string("field '") + field + "': not an integer: '" + text + "'");
    return v;
}

template <class F>
auto wrap_field(const char* field, const Where& at, F&& f)
{
    try {
        return f();
    } catch (const Error& e) {
        at.fail(std::string("field '") + field + "': " + e.what());
    }
}

std::ifstream open_input(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Data, "cannot open '" + path.string() + "'");
    return in;
}

}  // namespace

std::string format_double(double x)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

// ---- CSV ---------------------------------------------------------------

std::vector<SourceModel> read_registry(std::istream& in, const std::string& name)
{
    static const std::vector<std::string> header{"id",         "env",        "scenario", "freq_ghz", "source",
                                                 "n_points",   "dist_min_m", "dist_max_m", "type",   "alpha",
                                                 "beta_db",    "gamma",      "sigma_db"};
    std::vector<SourceModel> out;
    std::set<std::string> ids;
    std::string line;
    bool seen_header = false;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (line.empty() || line[0] == '#' || line == "\r") continue;
        const Where at{name, lineno};
        const auto f = split_csv(line);
        if (!seen_header) {
            if (f != header) at.fail("unexpected registry header");
            seen_header = true;
            continue;
        }
        if (f.size() != header.size())
            at.fail("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
        SourceModel m;
        m.id = f[0];
        m.environment = wrap_field("env", at, [&] { return parse_environment(f[1]); });
        m.scenario = wrap_field("scenario", at, [&] { return parse_scenario(f[2]); });
        m.frequency_ghz = parse_number(f[3], "freq_ghz", at);
        m.source = f[4];
        m.n_points = parse_int(f[5], "n_points", at);
        m.dist_min_m = parse_number(f[6], "dist_min_m", at);
        m.dist_max_m = parse_number(f[7], "dist_max_m", at);
        m.data_type = wrap_field("type", at, [&] { return parse_data_type(f[8]); });
        m.alpha = parse_number(f[9], "alpha", at);
        m.beta_db = parse_number(f[10], "beta_db", at);
        m.gamma = parse_number(f[11], "gamma", at);
        m.sigma_db = parse_number(f[12], "sigma_db", at);
        try {
            m.validate();
        } catch (const Error& e) {
            at.fail(e.what());
        }
        if (!ids.insert(m.id).second) at.fail("duplicate id '" + m.id + "'");
        out.push_back(std::move(m));
    }
    if (!seen_header) throw Error(ErrorKind::Data, name + ": missing registry header");
    return out;
}

std::vector<SourceModel> load_registry(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return read_registry(in, path.string());
}

const std::vector<SourceModel>& standard_registry()
{
    static const std::vector<SourceModel> registry = load_registry(data_dir() / "table1_nlos.csv");
    return registry;
}

std::vector<PathLossSample> read_samples(std::istream& in, const std::string& name)
{
    static const std::vector<std::string> header{"distance_m", "freq_ghz", "path_loss_db", "source_id"};
    std::vector<PathLossSample> out;
    std::string line;
    bool seen_header = false;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (line.empty() || line[0] == '#' || line == "\r") continue;
        const Where at{name, lineno};
        const auto f = split_csv(line);
        if (!seen_header) {
            if (f != header) at.fail("unexpected sample header");
            seen_header = true;
            continue;
        }
        if (f.size() != header.size()) at.fail("expected 4 fields, got " + std::to_string(f.size()));
        PathLossSample s;
        s.distance_m = parse_number(f[0], "distance_m", at);
        s.frequency_ghz = parse_number(f[1], "freq_ghz", at);
        s.path_loss_db = parse_number(f[2], "path_loss_db", at);
        s.source_id = f[3];
        if (!(s.distance_m > 0.0) || !std::isfinite(s.distance_m)) at.fail("field 'distance_m' must be > 0");
        if (!(s.frequency_ghz > 0.0) || !std::isfinite(s.frequency_ghz)) at.fail("field 'freq_ghz' must be > 0");
        if (!std::isfinite(s.path_loss_db)) at.fail("field 'path_loss_db' must be finite");
        if (s.source_id.empty()) at.fail("field 'source_id' is empty");
        out.push_back(std::move(s));
    }
    if (!seen_header) throw Error(ErrorKind::Data, name + ": missing sample header");
    return out;
}

std::vector<PathLossSample> load_samples(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return read_samples(in, path.string());
}

void write_samples(std::ostream& out, std::span<const PathLossSample> samples)
{
    out << "distance_m,freq_ghz,path_loss_db,source_id\n";
    for (const auto& s : samples)
        out << format_double(s.distance_m) << ',' << format_double(s.frequency_ghz) << ','
            << format_double(s.path_loss_db) << ',' << s.source_id << '\n';
}

// ---- JSON helpers ------------------------------------------------------

namespace {

class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where))
    {
        if (!j.is_object()) fail("expected an object");
        for (const auto& [k, v] : j.items()) keys_.insert(k);
    }
    ~Reader() noexcept(false)
    {
        if (!keys_.empty() && std::uncaught_exceptions() == 0) fail("unknown key '" + *keys_.begin() + "'");
    }

    template <class T>
    void get(const char* key, T& out)
    {
        if (!j_.contains(key)) return;
        keys_.erase(key);
        if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>)
            if (!j_.at(key).is_number_integer()) fail(std::string("key '") + key + "' must be an integer");
        try {
            out = j_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            fail(std::string("key '") + key + "' has the wrong type");
        }
    }
    template <class T>
    void get_optional(const char* key, std::optional<T>& out)
    {
        if (!j_.contains(key)) return;
        keys_.erase(key);
        if (j_.at(key).is_null()) {
            out.reset();
            return;
        }
        T v{};
        try {
            v = j_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            fail(std::string("key '") + key + "' has the wrong type");
        }
        out = v;
    }
    template <class F>
    void get_with(const char* key, F&& f)
    {
        if (!j_.contains(key)) return;
        keys_.erase(key);
        try {
            f(j_.at(key));
        } catch (const nlohmann::json::exception&) {
            fail(std::string("key '") + key + "' has the wrong type");
        } catch (const Error& e) {
            fail(std::string("key '") + key + "': " + e.what());
        }
    }
    bool has(const char* key) const { return j_.contains(key); }

    [[noreturn]] void fail(const std::string& what) const { throw Error(ErrorKind::Config, where_ + ": " + what); }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> keys_;
};

json interval_json(const Interval& i)
{
    return json::array({i.lo, i.hi});
}

Interval interval_from(const json& j)
{
    if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::Config, "expected [lo, hi]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json optional_json(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

}  // namespace

json to_json(const CoefficientSet& c)
{
    json j = json::object();
    for (std::size_t i = 0; i < c.size(); ++i) j[std::string(c.name(i))] = c[i];
    return j;
}

json to_json(const FittedModel& m)
{
    json j;
    j["order"] = to_int(m.coefficients.order());
    j["coefficients"] = to_json(m.coefficients);
    j["sigma_db"] = m.sigma_db;
    j["gas_corrected"] = m.gas_corrected;
    j["freq_range_ghz"] = interval_json(m.freq_range_ghz);
    j["dist_range_m"] = interval_json(m.dist_range_m);
    j["provenance"] = m.provenance;
    return j;
}

FittedModel fitted_model_from_json(const json& j)
{
    try {
        FittedModel m;
        const auto order = order_from_int(j.at("order").get<int>());
        const auto& cj = j.at("coefficients");
        std::vector<double> values(parameter_count(order));
        for (std::size_t i = 0; i < values.size(); ++i) {
            const std::string name(coefficient_name(order, i));
            if (!cj.contains(name)) throw Error(ErrorKind::Data, "model JSON: missing coefficient '" + name + "'");
            values[i] = cj.at(name).get<double>();
        }
        if (cj.size() != values.size()) throw Error(ErrorKind::Data, "model JSON: unexpected coefficient count");
        m.coefficients = CoefficientSet(order, std::move(values));
        m.sigma_db = j.value("sigma_db", 0.0);
        m.gas_corrected = j.value("gas_corrected", false);
        if (j.contains("freq_range_ghz")) m.freq_range_ghz = interval_from(j.at("freq_range_ghz"));
        if (j.contains("dist_range_m")) m.dist_range_m = interval_from(j.at("dist_range_m"));
        if (j.contains("provenance")) m.provenance = j.at("provenance").get<std::vector<std::string>>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Data, std::string("model JSON: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Data) throw;
        throw Error(ErrorKind::Data, std::string("model JSON: ") + e.what());
    }
}

json to_json(const RegressorConfig& c)
{
    json j;
    j["kind"] = to_string(c.kind);
    j["lambda"] = c.lambda;
    j["lambda1"] = c.lambda1;
    j["lambda2"] = c.lambda2;
    j["ransac_iters"] = c.ransac_iters;
    j["ransac_inlier_threshold"] = optional_json(c.ransac_inlier_threshold);
    j["theilsen_subsets"] = c.theilsen_subsets;
    j["kfold_k"] = c.kfold_k;
    j["tune_penalty"] = c.tune_penalty;
    j["seed"] = c.seed;
    j["tol"] = c.tol;
    j["max_iters"] = c.max_iters;
    return j;
}

RegressorConfig regressor_config_from_json(const json& j, RegressorConfig c)
{
    Reader r(j, "robust");
    r.get_with("kind", [&](const json& v) { c.kind = parse_regressor_kind(v.get<std::string>()); });
    r.get("lambda", c.lambda);
    r.get("lambda1", c.lambda1);
    r.get("lambda2", c.lambda2);
    r.get("ransac_iters", c.ransac_iters);
    r.get_optional("ransac_inlier_threshold", c.ransac_inlier_threshold);
    r.get("theilsen_subsets", c.theilsen_subsets);
    r.get("kfold_k", c.kfold_k);
    r.get("tune_penalty", c.tune_penalty);
    r.get("seed", c.seed);
    r.get("tol", c.tol);
    r.get("max_iters", c.max_iters);
    return c;
}

json to_json(const PipelineConfig& c)
{
    json j;
    j["order"] = to_int(c.order);
    j["weighting"] = to_string(c.weighting);
    j["robust"] = c.robust ? to_json(*c.robust) : json(nullptr);
    j["outlier_threshold"] = c.outlier_threshold;
    j["filter_scope"] = to_string(c.filter_scope);
    j["gas_correction"] = c.gas_correction;
    j["freq_band"] = std::isfinite(c.freq_band.hi) ? interval_json(c.freq_band) : json(nullptr);
    j["pinned_gamma"] = optional_json(c.pinned_gamma);
    j["drop_unidentified_frequency_terms"] = c.drop_unidentified_frequency_terms;
    j["seed"] = c.seed;
    return j;
}

PipelineConfig pipeline_config_from_json(const json& j, PipelineConfig c)
{
    Reader r(j, "pipeline");
    r.get_with("order", [&](const json& v) { c.order = order_from_int(v.get<int>()); });
    r.get_with("weighting", [&](const json& v) { c.weighting = parse_weighting_policy(v.get<std::string>()); });
    r.get_with("robust", [&](const json& v) {
        if (v.is_null())
            c.robust.reset();
        else
            c.robust = regressor_config_from_json(v, c.robust.value_or(RegressorConfig{}));
    });
    r.get("outlier_threshold", c.outlier_threshold);
    r.get_with("filter_scope", [&](const json& v) { c.filter_scope = parse_filter_scope(v.get<std::string>()); });
    r.get("gas_correction", c.gas_correction);
    r.get_with("freq_band", [&](const json& v) {
        c.freq_band = v.is_null() ? Interval{0.0, std::numeric_limits<double>::infinity()} : interval_from(v);
    });
    r.get_optional("pinned_gamma", c.pinned_gamma);
    r.get("drop_unidentified_frequency_terms", c.drop_unidentified_frequency_terms);
    r.get("seed", c.seed);
    return c;
}

json to_json(const SynthesisSpec& s)
{
    json j;
    j["points_per_model"] = s.points_per_model;
    j["distance_sampling"] = to_string(s.distance_sampling);
    j["noise_scale"] = s.noise_scale;
    j["seed"] = s.seed;
    return j;
}

SynthesisSpec synthesis_spec_from_json(const json& j, SynthesisSpec s)
{
    Reader r(j, "synthesis");
    r.get("points_per_model", s.points_per_model);
    r.get_with("distance_sampling",
               [&](const json& v) { s.distance_sampling = parse_distance_sampling(v.get<std::string>()); });
    r.get("noise_scale", s.noise_scale);
    r.get("seed", s.seed);
    return s;
}

json to_json(const OutlierSpec& s)
{
    json j;
    j["rho"] = s.rho;
    j["band_width_m"] = s.band_width_m;
    j["band_center_m"] = optional_json(s.band_center_m);
    j["contamination_fraction"] = s.contamination_fraction;
    j["magnitude_scale"] = s.magnitude_scale;
    j["seed"] = s.seed;
    return j;
}

OutlierSpec outlier_spec_from_json(const json& j, OutlierSpec s)
{
    Reader r(j, "outliers");
    r.get("rho", s.rho);
    r.get("band_width_m", s.band_width_m);
    r.get_optional("band_center_m", s.band_center_m);
    r.get("contamination_fraction", s.contamination_fraction);
    r.get("magnitude_scale", s.magnitude_scale);
    r.get("seed", s.seed);
    return s;
}

json to_json(const ExperimentSpec& s)
{
    json j;
    j["which"] = to_string(s.which);
    json sc = json::array();
    for (auto v : s.scenarios) sc.push_back(to_string(v));
    j["scenarios"] = sc;
    json bands = json::array();
    for (const auto& b : s.bands) bands.push_back(interval_json(b));
    j["bands"] = bands;
    j["trials"] = s.trials;
    j["outlier_bands_m"] = s.outlier_bands_m;
    j["seed"] = s.seed;
    j["synthesis"] = to_json(s.synthesis);
    j["outliers"] = to_json(s.outliers);
    j["ewabg_gas_correction"] = s.ewabg_gas_correction;
    j["pooled_weighting"] = to_string(s.pooled_weighting);
    j["wabg_weighting"] = to_string(s.wabg_weighting);
    return j;
}

ExperimentSpec experiment_spec_from_json(const json& j, ExperimentSpec s)
{
    Reader r(j, "experiment");
    r.get_with("which", [&](const json& v) { s.which = parse_experiment_kind(v.get<std::string>()); });
    r.get_with("scenarios", [&](const json& v) {
        s.scenarios.clear();
        for (const auto& e : v) s.scenarios.push_back(parse_scenario(e.get<std::string>()));
    });
    r.get_with("bands", [&](const json& v) {
        s.bands.clear();
        for (const auto& e : v) s.bands.push_back(interval_from(e));
    });
    r.get("trials", s.trials);
    r.get("outlier_bands_m", s.outlier_bands_m);
    r.get("seed", s.seed);
    r.get_with("synthesis", [&](const json& v) { s.synthesis = synthesis_spec_from_json(v, s.synthesis); });
    r.get_with("outliers", [&](const json& v) { s.outliers = outlier_spec_from_json(v, s.outliers); });
    r.get("ewabg_gas_correction", s.ewabg_gas_correction);
    r.get_with("pooled_weighting", [&](const json& v) { s.pooled_weighting = parse_weighting_policy(v.get<std::string>()); });
    r.get_with("wabg_weighting", [&](const json& v) { s.wabg_weighting = parse_weighting_policy(v.get<std::string>()); });
    return s;
}

json to_json(const EvaluationReport& r)
{
    json j;
    j["scenario"] = r.scenario;
    j["band"] = r.band;
    j["method"] = r.method;
    j["column"] = r.column;
    j["sigma"] = r.sigma;
    j["published"] = optional_json(r.published);
    j["sigma_orig"] = optional_json(r.sigma_orig);
    j["error_ratio_percent"] = optional_json(r.error_ratio_percent);
    j["error_ratio_published"] = optional_json(r.error_ratio_published);
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["coefficients"] = r.coefficients ? to_json(*r.coefficients) : json(nullptr);
    j["trial_values"] = r.trial_values;
    if (!r.trial_ratios.empty()) j["trial_ratios"] = r.trial_ratios;
    return j;
}

json to_json(const SurfaceGrid& g)
{
    json j;
    j["label"] = g.label;
    j["distances_m"] = interval_json({g.distances_m.front(), g.distances_m.back()});
    j["frequencies_ghz"] = interval_json({g.frequencies_ghz.front(), g.frequencies_ghz.back()});
    j["nonmonotone_f"] = g.nonmonotone_f;
    j["nonmonotone_d"] = g.nonmonotone_d;
    j["nonmonotone_f_1_18"] = g.nonmonotone_f_1_18;
    j["max_second_difference"] = g.max_second_difference;
    return j;
}

json to_json(const ExperimentResult& result)
{
    json j;
    j["which"] = to_string(result.which);
    json rows = json::array();
    for (const auto& r : result.rows) rows.push_back(to_json(r));
    j["rows"] = rows;
    if (!result.grids.empty()) {
        json grids = json::array();
        for (const auto& g : result.grids) grids.push_back(to_json(g));
        j["grids"] = grids;
    }
    return j;
}

// ---- reports -----------------------------------------------------------

namespace {

std::string opt_cell(const std::optional<double>& v)
{
    return v ? format_double(*v) : std::string();
}

}  // namespace

void write_report_csv(std::ostream& out, const ExperimentResult& result)
{
    out << "scenario,band,method,column,sigma,published,sigma_orig,error_ratio_percent,error_ratio_published,trials,seed\n";
    for (const auto& r : result.rows) {
        out << r.scenario << ',' << r.band << ',' << r.method << ',' << r.column << ',' << format_double(r.sigma) << ','
            << opt_cell(r.published) << ',' << opt_cell(r.sigma_orig) << ',' << opt_cell(r.error_ratio_percent) << ','
            << opt_cell(r.error_ratio_published) << ',' << r.trials << ',' << r.seed << '\n';
    }
}

void write_coefficients_csv(std::ostream& out, const ExperimentResult& result)
{
    ModelOrder top = ModelOrder::First;
    for (const auto& r : result.rows)
        if (r.coefficients && to_int(r.coefficients->order()) > to_int(top)) top = r.coefficients->order();
    out << "scenario,band,method,order";
    for (std::size_t i = 0; i < parameter_count(top); ++i) out << ',' << coefficient_name(top, i);
    out << ",sigma\n";
    for (const auto& r : result.rows) {
        if (!r.coefficients) continue;
        const auto full = r.coefficients->promoted(top);
        out << r.scenario << ',' << r.band << ',' << r.method << ',' << to_int(r.coefficients->order());
        for (std::size_t i = 0; i < full.size(); ++i) out << ',' << format_double(full[i]);
        out << ',' << format_double(r.sigma) << '\n';
    }
}

void write_grid_csv(std::ostream& out, const SurfaceGrid& grid)
{
    out << "d,f,pl_db\n";
    for (std::size_t i = 0; i < grid.distances_m.size(); ++i)
        for (std::size_t k = 0; k < grid.frequencies_ghz.size(); ++k)
            out << format_double(grid.distances_m[i]) << ',' << format_double(grid.frequencies_ghz[k]) << ','
                << format_double(grid.path_loss_db(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))) << '\n';
}

}  // namespace pathfuse
