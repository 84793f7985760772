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

#include <cstdio>
#include <cstdlib>
#include <exception>

#include "pathfuse/acceptance.hpp"
#include "pathfuse/io.hpp"

int main(int argc, char** argv)
{
    using namespace pathfuse;
    const bool verbose = argc > 1 && std::string_view(argv[1]) == "-v";
    try {
        const auto results = run_acceptance(standard_registry(), kAcceptanceSeed, kAcceptanceTrials);
        int failed = 0;
        for (const auto& c : results) {
            std::printf("%s criterion %d: %s\n", c.passed() ? "PASS" : "FAIL", c.id, c.name.c_str());
            for (const auto& line : c.checks)
                if (verbose || !line.passed) std::printf("    %s %s\n", line.passed ? "ok  " : "FAIL", line.text.c_str());
            failed += !c.passed();
        }
        std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
        return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
    } catch (const std::exception& e) {
        std::printf("FAIL acceptance run aborted: %s\n", e.what());
        return EXIT_FAILURE;
    }
}
