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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathfuse/evaluation.hpp"
#include "pathfuse/model.hpp"
#include "pathfuse/pipeline.hpp"
#include "pathfuse/synthesis.hpp"

namespace pathfuse {

using json = nlohmann::ordered_json;

// ---- CSV ---------------------------------------------------------------

/// Registry rows `id,env,scenario,freq_ghz,source,n_points,dist_min_m,
/// dist_max_m,type,alpha,beta_db,gamma,sigma_db`. Lines starting with '#'
/// are skipped. Errors name the file, line and field.
std::vector<SourceModel> read_registry(std::istream& in, const std::string& name);
std::vector<SourceModel> load_registry(const std::filesystem::path& path);
const std::vector<SourceModel>& standard_registry();

/// Sample rows `distance_m,freq_ghz,path_loss_db,source_id`.
std::vector<PathLossSample> read_samples(std::istream& in, const std::string& name);
std::vector<PathLossSample> load_samples(const std::filesystem::path& path);
void write_samples(std::ostream& out, std::span<const PathLossSample> samples);

/// Shortest round-trip text for a double.
std::string format_double(double x);

// ---- JSON --------------------------------------------------------------

json to_json(const CoefficientSet& c);
json to_json(const FittedModel& m);
FittedModel fitted_model_from_json(const json& j);

json to_json(const RegressorConfig& c);
json to_json(const PipelineConfig& c);
json to_json(const SynthesisSpec& s);
json to_json(const OutlierSpec& s);
json to_json(const ExperimentSpec& s);
json to_json(const EvaluationReport& r);
json to_json(const SurfaceGrid& g);  // summary only, no grid values

/// Each reads an object produced by the matching to_json, applying it on
/// top of `base`. Unknown keys and wrongly typed values throw Error(Config).
RegressorConfig regressor_config_from_json(const json& j, RegressorConfig base = {});
PipelineConfig pipeline_config_from_json(const json& j, PipelineConfig base = {});
SynthesisSpec synthesis_spec_from_json(const json& j, SynthesisSpec base = {});
OutlierSpec outlier_spec_from_json(const json& j, OutlierSpec base = {});
ExperimentSpec experiment_spec_from_json(const json& j, ExperimentSpec base = {});

// ---- reports -----------------------------------------------------------

/// One row per report: scenario,band,method,column,sigma,published,sigma_orig,
/// error_ratio_percent,error_ratio_published,trials,seed.
void write_report_csv(std::ostream& out, const ExperimentResult& result);

/// Fitted coefficients per scenario, band and method, one column per
/// coefficient name of the highest order present.
void write_coefficients_csv(std::ostream& out, const ExperimentResult& result);

/// `d,f,pl_db` rows.
void write_grid_csv(std::ostream& out, const SurfaceGrid& grid);

json to_json(const ExperimentResult& result);

}  // namespace pathfuse
