#pragma once

#include <cstddef>

#include "corridor/model.hpp"

namespace corridor {

struct OracleOptions {
    // Upper bound on the product of family sizes enumerated by brute_force.
    std::size_t product_budget = 10'000'000;
    // Upper bound on the path-universe size for brute_force_hitting.
    int universe_budget = 24;
};

// Number of possession combinations brute_force would enumerate (capped at 2^63).
std::size_t enumeration_product(const Instance& inst);

// Exhaustive minimum: one possession per job, minimizing the size of the union.
// Tie-break among optima: the union containing the lowest differing path in canonical
// order wins, and among equal unions the earliest combination in family order.
// Parallelized over the first job's choices when OpenMP is available; results are
// reduced in choice order and are therefore identical to the serial version.
Solution brute_force(const Instance& inst, const OracleOptions& opts = {});

// Single-threaded reference implementation with identical output.
Solution brute_force_serial(const Instance& inst, const OracleOptions& opts = {});

// Independent cross-check: smallest path set X (by subset enumeration in increasing
// cardinality) such that every job has a possession contained in X.
Solution brute_force_hitting(const Instance& inst, const OracleOptions& opts = {});

}  // namespace corridor
