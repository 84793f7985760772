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

#include <iosfwd>
#include <string>

#include "pathfuse/errors.hpp"
#include "pathfuse/evaluation.hpp"
#include "pathfuse/io.hpp"
#include "pathfuse/pipeline.hpp"
#include "pathfuse/synthesis.hpp"

namespace pathfuse {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitData = 3,
    kExitNumeric = 4,
    kExitAcceptance = 5,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Everything a run can be configured with. Read from `--config`; command
/// line flags override individual fields.
struct RunConfig {
    PipelineConfig pipeline;
    SynthesisSpec synthesis = experiment_synthesis_spec(0);
    OutlierSpec outliers;
    ExperimentSpec experiment;
    std::string out_dir = ".";
    std::string format = "all";  // all | json | csv
};

/// Unknown keys and wrong types raise Error(Config).
RunConfig run_config_from_json(const json& j);
json to_json(const RunConfig& c);

/// Source statistics for fitting a sample file. Ids found in the registry
/// use its sigma; other ids get the residual deviation of a first-order fit
/// to their own samples.
SourceCatalog catalog_for_samples(std::span<const PathLossSample> samples, std::span<const SourceModel> registry);

/// Entry point of the `pathfuse` tool.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pathfuse
