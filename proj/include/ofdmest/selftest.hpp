// SPDX-License-Identifier: Apache-2.0
//
// User-facing self-test: the independent-oracle checks at reduced sizes,
// plus config-dependent diagnostics (no-ISI bound, tap energy, beta).
#pragma once

#include "ofdmest/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ofdmest {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail; // failure diagnostic, empty on pass
};

struct SelftestHooks {
    // test hook: pretend the 16-QAM beta constant is this value
    std::optional<double> beta_override;
};

std::vector<CheckResult> run_selftest(const RunConfig& cfg, const SelftestHooks& hooks = {});

} // namespace ofdmest
