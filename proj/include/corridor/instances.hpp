#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corridor/model.hpp"

namespace corridor {

// ---------------------------------------------------------------------------
// Random one-direction window instances
// ---------------------------------------------------------------------------

struct GenSpec {
    int n = 30;              // job count
    int length_classes = 2;  // distinct window lengths drawn from {1,2,3,5,7,11}
    std::uint64_t seed = 0;
};

// Deterministic from the seed: draws `length_classes` distinct lengths from the
// palette {1,2,3,5,7,11}; sets m = ceil(n * mean(lengths) / 2), raised to the largest
// chosen length so every job fits; each job draws its length from the chosen set and
// (first, last) uniformly from [1, m], redrawing both until first <= last and
// last - first + 1 >= length. Emitted in abstract index form (families are sliding
// windows of up paths).
Instance generate(const GenSpec& spec);

// Same draw, then jobs are sorted by (first, last) and each last is raised to the
// running maximum, so sorting by first also sorts by last (ids follow the new order).
Instance generate_ordered(const GenSpec& spec);

// ---------------------------------------------------------------------------
// Random corridor instances
// ---------------------------------------------------------------------------

struct RunsGenSpec {
    int n = 30;
    int ratio = 4;  // travel / headway
    std::uint64_t seed = 0;
};

// Bidirectional geometric instance whose families are chronological runs of single
// paths: every job closes one point of the corridor for an instant window, placed so
// consecutive crossings alternate between directions half a headway apart. Paths per
// direction grow linearly with n. Every possession family consists of single paths.
Instance generate_runs(const RunsGenSpec& spec);

struct GeoGenSpec {
    int n = 5;
    int m = 6;  // paths per direction
    std::uint64_t seed = 0;
};

// Small bidirectional geometric instance with genuine location bands; families can
// have possessions of any size. Intended for cross-checks against the oracle.
Instance generate_geometric(const GeoGenSpec& spec);

// ---------------------------------------------------------------------------
// Pair-hitting instances (unit horizontal segments vs. axis-parallel lines)
// ---------------------------------------------------------------------------

// Job j is satisfied by vertical line a_j or a_j + 1, or by horizontal line b_j.
struct HhpInstance {
    std::vector<int> A;
    std::vector<int> B;  // same length as A
};

HhpInstance parse_hhp(const std::string& json_text);  // {"A":[...],"B":[...]}
std::string emit_hhp(const HhpInstance& h);

// Embeds the pair-hitting instance into a corridor instance such that job j's
// possession family is exactly [{u_{a_j}}, {d_{b_j}}, {u_{a_j+1}}] (asserted after
// construction). Optima coincide.
Instance hhp_to_msp(const HhpInstance& h);

// Exhaustive optimum: min |X| + |Y| with X a set of values hitting {a_j, a_j+1} and
// Y covering the b_j of the unhit jobs. Requires values <= 12 and n <= 8.
int brute_force_hhp(const HhpInstance& h);

// Uniform random instance with n jobs and values in [1, max_value].
HhpInstance random_hhp(int n, int max_value, std::uint64_t seed);

}  // namespace corridor
