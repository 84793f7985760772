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

#include <stdexcept>
#include <string>
#include <vector>

namespace pathfuse {

/// Failure classes. The CLI maps these onto its exit codes.
enum class ErrorKind {
    Domain,            // non-positive distance/frequency, non-finite prediction
    InsufficientData,  // fewer samples than parameters
    SingularSystem,    // normal equations numerically singular
    Convergence,       // iterative solver hit its iteration cap
    ConsensusFailure,  // RANSAC found no usable consensus set
    DegenerateData,    // Theil-Sen could not find enough nonsingular subsets
    Config,
    Data,
    Range,             // frequency outside a lookup table
    Contract,          // precondition on a model or object violated
    Metric,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised by the iterative penalized solvers; carries the last iterate.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> last_iterate)
        : Error(ErrorKind::Convergence, what), last_(std::move(last_iterate)) {}

    const std::vector<double>& last_iterate() const noexcept { return last_; }

private:
    std::vector<double> last_;
};

}  // namespace pathfuse
