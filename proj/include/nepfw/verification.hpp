#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace nepfw {

/// Outcome of one self-check: how many cases ran and how many failed.
struct CheckResult {
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string detail;
    bool passed() const noexcept { return failures == 0 && cases > 0; }
};

/// Oracle brute-force comparisons, reduction identities, the scalar
/// recursion lemma and the per-iteration descent inequality.
std::vector<CheckResult> verify_suite(std::uint64_t seed);

/// Rate-envelope checks: the sublinear bound, the linear bound under the
/// fixed schedule, and the stochastic variant's mean gap.
std::vector<CheckResult> envelope_suite(std::uint64_t seed, int replications = 10);

}  // namespace nepfw
