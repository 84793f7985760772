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
#include <span>
#include <string>
#include <vector>

#include "pathfuse/evaluation.hpp"

namespace pathfuse {

// Tolerances of the reproduction checks.
inline constexpr double kOrderStudyTolDb = 0.4;
inline constexpr double kRobustStudyTolDb = 0.15;
inline constexpr double kIntegrationTolDb = 0.3;
inline constexpr double kRobustNoOutlierTargetDb = 3.62;
inline constexpr double kRobustNoOutlierTolDb = 0.10;
inline constexpr double kRobustTheilSenTargetDb = 3.90;
inline constexpr double kRobustOlsAnchorDb = 4.749;
inline constexpr double kOutlierEwabgMaxRatio = 2.0;
inline constexpr double kOutlierEwabgMaxRatioException = 6.0;
inline constexpr double kOutlierPooledMinRatio = 10.0;
inline constexpr std::uint64_t kAcceptanceSeed = 1;
inline constexpr int kAcceptanceTrials = 10;

struct CheckLine {
    bool passed = false;
    std::string text;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    std::vector<CheckLine> checks;

    bool passed() const;
    void add(bool ok, std::string text);
};

CriterionResult check_closed_form(std::uint64_t seed, int corpora_per_order = 1000);
CriterionResult check_degeneracy(std::uint64_t seed);
CriterionResult check_robust_study(const ExperimentResult& result);
CriterionResult check_order_study(const ExperimentResult& result);
CriterionResult check_integration_study(const ExperimentResult& result);
CriterionResult check_outlier_study(const ExperimentResult& result);
CriterionResult check_gas_round_trip(std::uint64_t seed, int samples = 100000);
CriterionResult check_rayleigh(std::uint64_t seed, int draws = 1000000);
CriterionResult check_properties(std::uint64_t first_seed, int seeds = 10);

/// The reproduction check matching result.which.
CriterionResult check_experiment(const ExperimentResult& result);

/// All nine criteria with the pinned seed and trial count.
std::vector<CriterionResult> run_acceptance(std::span<const SourceModel> registry,
                                            std::uint64_t seed = kAcceptanceSeed, int trials = kAcceptanceTrials);

}  // namespace pathfuse
