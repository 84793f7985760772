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

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pathfuse/model.hpp"

namespace pathfuse {

struct AtmosphericConditions {
    double pressure_hpa = 1013.25;
    double temperature_c = 15.0;
    double water_vapour_g_m3 = 7.5;
};

/// Specific attenuation of atmospheric gases (oxygen + water vapour) versus
/// frequency, interpolated linearly in log10(attenuation). Immutable after
/// construction.
class GasAttenuationTable {
public:
    struct Entry {
        double frequency_ghz;
        double atten_db_per_km;
    };

    /// Throws Error(Data) if frequencies are not strictly increasing, an
    /// attenuation is not positive, or [1, 100] GHz is not covered.
    GasAttenuationTable(std::vector<Entry> entries, AtmosphericConditions conditions = {});

    /// Reads `freq_ghz,atten_db_per_km` CSV. Lines starting with '#' are
    /// comments; `key=value` tokens in them override the default conditions.
    static GasAttenuationTable load(const std::filesystem::path& path);

    /// The bundled standard-atmosphere table (data_dir()/itu_p676_standard.csv).
    static const GasAttenuationTable& standard();

    std::span<const Entry> entries() const noexcept { return entries_; }
    const AtmosphericConditions& conditions() const noexcept { return conditions_; }
    Interval range() const noexcept { return {entries_.front().frequency_ghz, entries_.back().frequency_ghz}; }

    /// dB/km. Throws Error(Range) outside the table.
    double specific_attenuation(double frequency_ghz) const;

    /// specific_attenuation(f) * d / 1000, in dB.
    double gas_loss(double distance_m, double frequency_ghz) const;

private:
    std::vector<Entry> entries_;
    AtmosphericConditions conditions_;
};

/// Copy of `samples` with the gas loss subtracted from every path loss.
/// Throws Error(Range) naming the first out-of-table sample.
std::vector<PathLossSample> remove_gas_loss(const GasAttenuationTable& table, std::span<const PathLossSample> samples);

/// Prediction of a gas-corrected model with the gas loss added back.
/// Throws Error(Contract) if the model is not gas corrected.
double restore_gas_loss(const GasAttenuationTable& table, const FittedModel& model, double distance_m,
                        double frequency_ghz);

/// Bundled data directory: $PATHFUSE_DATA_DIR if set, else the build-time default.
std::filesystem::path data_dir();

}  // namespace pathfuse
