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

#include "pathfuse/atmosphere.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pathfuse/errors.hpp"

namespace pathfuse {

std::filesystem::path data_dir()
{
    if (const char* env = std::getenv("PATHFUSE_DATA_DIR"); env && *env) return env;
    return PATHFUSE_DEFAULT_DATA_DIR;
}

GasAttenuationTable::GasAttenuationTable(std::vector<Entry> entries, AtmosphericConditions conditions)
    : entries_(std::move(entries)), conditions_(conditions)
{
    if (entries_.size() < 2) throw Error(ErrorKind::Data, "gas table needs at least two entries");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (!(e.atten_db_per_km > 0.0) || !std::isfinite(e.atten_db_per_km))
            throw Error(ErrorKind::Data, "gas table row " + std::to_string(i) + ": attenuation must be positive");
        if (i > 0 && !(e.frequency_ghz > entries_[i - 1].frequency_ghz))
            throw Error(ErrorKind::Data, "gas table row " + std::to_string(i) + ": frequencies must strictly increase");
    }
    if (entries_.front().frequency_ghz > 1.0 || entries_.back().frequency_ghz < 100.0)
        throw Error(ErrorKind::Data, "gas table must cover at least 1-100 GHz");
}

GasAttenuationTable GasAttenuationTable::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Data, "cannot open gas table '" + path.string() + "'");
    std::vector<Entry> entries;
    AtmosphericConditions cond;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream toks(line.substr(1));
            std::string tok;
            while (toks >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const auto key = tok.substr(0, eq);
                const double value = std::strtod(tok.c_str() + eq + 1, nullptr);
                if (key == "pressure_hpa") cond.pressure_hpa = value;
                else if (key == "temperature_c") cond.temperature_c = value;
                else if (key == "water_vapour_g_m3") cond.water_vapour_g_m3 = value;
            }
            continue;
        }
        if (!header_seen && line.rfind("freq_ghz", 0) == 0) {
            header_seen = true;
            continue;
        }
        Entry e{};
        char comma = 0;
        std::istringstream row(line);
        if (!(row >> e.frequency_ghz >> comma >> e.atten_db_per_km) || comma != ',')
            throw Error(ErrorKind::Data, path.string() + ":" + std::to_string(lineno) + ": malformed row");
        entries.push_back(e);
    }
    return GasAttenuationTable(std::move(entries), cond);
}

const GasAttenuationTable& GasAttenuationTable::standard()
{
    static const GasAttenuationTable table = load(data_dir() / "itu_p676_standard.csv");
    return table;
}

double GasAttenuationTable::specific_attenuation(double frequency_ghz) const
{
    const auto r = range();
    if (!(frequency_ghz >= r.lo && frequency_ghz <= r.hi)) {
        std::ostringstream os;
        os << "frequency " << frequency_ghz << " GHz outside gas table range [" << r.lo << ", " << r.hi << "]";
        throw Error(ErrorKind::Range, os.str());
    }
    const auto hi = std::lower_bound(entries_.begin(), entries_.end(), frequency_ghz,
                                     [](const Entry& e, double f) { return e.frequency_ghz < f; });
    if (hi->frequency_ghz == frequency_ghz) return hi->atten_db_per_km;
    const auto lo = hi - 1;
    const double t = (frequency_ghz - lo->frequency_ghz) / (hi->frequency_ghz - lo->frequency_ghz);
    const double log_att = (1.0 - t) * std::log10(lo->atten_db_per_km) + t * std::log10(hi->atten_db_per_km);
    return std::pow(10.0, log_att);
}

double GasAttenuationTable::gas_loss(double distance_m, double frequency_ghz) const
{
    if (!(distance_m > 0.0)) throw Error(ErrorKind::Domain, "distance must be positive");
    return specific_attenuation(frequency_ghz) * distance_m / 1000.0;
}

std::vector<PathLossSample> remove_gas_loss(const GasAttenuationTable& table, std::span<const PathLossSample> samples)
{
    std::vector<PathLossSample> out(samples.begin(), samples.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        try {
            out[i].path_loss_db -= table.gas_loss(out[i].distance_m, out[i].frequency_ghz);
        } catch (const Error& e) {
            throw Error(e.kind(), "sample " + std::to_string(i) + " (" + out[i].source_id + "): " + e.what());
        }
    }
    return out;
}

double restore_gas_loss(const GasAttenuationTable& table, const FittedModel& model, double distance_m,
                        double frequency_ghz)
{
    if (!model.gas_corrected)
        throw Error(ErrorKind::Contract, "restore_gas_loss called on a model fitted without gas correction");
    return predict(model.coefficients, distance_m, frequency_ghz) + table.gas_loss(distance_m, frequency_ghz);
}

}  // namespace pathfuse
