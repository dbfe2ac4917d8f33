#pragma once
// Deterministic invariant suite: every check is a mathematical identity or
// cross-representation consistency statement that must hold exactly (up to the
// stated tolerance) independent of any Monte Carlo run. Designed to finish in
// well under a minute.

#include <functional>
#include <string>
#include <vector>

namespace mesocov {

struct SelfTestResult {
    std::string name;
    bool pass = false;
    std::string detail; // achieved error / expected vs got on failure
};

using SelfTestReporter = std::function<void(const SelfTestResult&)>;

// Runs every check; invokes the reporter (if given) after each one.
// Returns all results; overall pass iff every result passes.
std::vector<SelfTestResult> run_selftests(const SelfTestReporter& report = {});

bool all_passed(const std::vector<SelfTestResult>& results);

} // namespace mesocov
