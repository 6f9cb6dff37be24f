#pragma once

#include <cstddef>
#include <cstdint>

#include "corridor/model.hpp"

namespace corridor {

struct GeneralDpOptions {
    // Maximum number of memoized path subsets before giving up.
    std::size_t state_budget = std::size_t{1} << 22;
    // Re-derive the removal identity J(P \ X) = J(P) \ J_hit(X, P) and the
    // two-sided decomposition at every expansion (slow; for tests).
    bool check_invariants = false;
};

struct GeneralDpStats {
    std::size_t states = 0;  // distinct memoized subsets
};

// Exact minimum over arbitrary possession families by recursive decomposition of
// the remaining path set: pay for the chosen possession, then either recurse on
// the remainder or, when every remaining job lies fully on one side, split into
// the two independent sides. At most 64 distinct paths.
Solution solve_general(const Instance& inst, const GeneralDpOptions& opts = {},
                       GeneralDpStats* stats = nullptr);

}  // namespace corridor
