#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corridor/errors.hpp"
#include "corridor/rational.hpp"

namespace corridor {

// ---------------------------------------------------------------------------
// Train paths
// ---------------------------------------------------------------------------

enum class Direction : std::uint8_t { Up = 0, Down = 1 };

// One train path. Up path i runs from (i*headway, 0) to (i*headway + travel, length);
// down path i runs from (i*headway, length) to (i*headway + travel, 0). Indices are
// 1-based and range over [1, m] per direction.
struct PathId {
    Direction dir = Direction::Up;
    int index = 0;

    friend bool operator==(const PathId&, const PathId&) = default;
};

// Canonical order: all up paths by index, then all down paths by index. Used for set
// representations, bitmask layouts, JSON arrays and lexicographic tie-breaks.
inline bool canonical_less(const PathId& a, const PathId& b) {
    if (a.dir != b.dir) return a.dir == Direction::Up;
    return a.index < b.index;
}

// Chronological order: by start time (index), up paths before down paths on ties.
// The first path of a set is its minimum in this order.
inline bool chrono_less(const PathId& a, const PathId& b) {
    if (a.index != b.index) return a.index < b.index;
    return a.dir == Direction::Up && b.dir == Direction::Down;
}

std::string path_name(const PathId& p);          // "u3" / "d5"
PathId parse_path_name(const std::string& name); // throws parse_error

// ---------------------------------------------------------------------------
// Timetable
// ---------------------------------------------------------------------------

enum class CrossingMode : std::uint8_t { Geometric, Explicit };
enum class DirectionsUsed : std::uint8_t { Up, Down, Both };

// Equidistant bidirectional timetable on a corridor [0, length]. In Geometric mode all
// path relations are derived from the line geometry with exact rationals. In Explicit
// mode the opposite-direction crossing relation is given by an index window instead:
// up i crosses down k iff -w_down <= i - k <= w_up (used by abstract instances whose
// crossing pattern cannot be realized by a single travel time).
struct Timetable {
    Rational length;   // corridor length L > 0
    Rational headway;  // start spacing between consecutive same-direction paths, > 0
    Rational travel;   // time a path needs to traverse the corridor, > 0
    int m = 0;         // number of paths per direction
    CrossingMode mode = CrossingMode::Geometric;
    int w_down = 0;    // Explicit mode only
    int w_up = 0;      // Explicit mode only
    DirectionsUsed directions = DirectionsUsed::Both;

    bool uses(Direction d) const {
        if (directions == DirectionsUsed::Both) return true;
        return (directions == DirectionsUsed::Up) == (d == Direction::Up);
    }
};

// Exact path relations. Same-direction paths never intersect. "Left of" means the
// whole path lies strictly earlier than the other (no shared point); in geometric mode
// u_i is left of d_k iff i*headway + travel < k*headway, symmetric in the other order.
bool paths_cross(const Timetable& tt, const PathId& a, const PathId& b);
bool path_left_of(const Timetable& tt, const PathId& a, const PathId& b);

// Half planes of an anchor: in_left_half = same direction with smaller index, or
// opposite direction entirely left of the anchor; in_right_half mirrored.
bool in_left_half(const Timetable& tt, const PathId& anchor, const PathId& p);
bool in_right_half(const Timetable& tt, const PathId& anchor, const PathId& p);

// ---------------------------------------------------------------------------
// Jobs and possessions
// ---------------------------------------------------------------------------

// A maintenance job: executed without preemption during [s, s+processing] for a chosen
// start s in [release, deadline - processing], closing the location band
// [band_lo, band_hi] (a subset of [0, length]).
struct Job {
    int id = 0;
    Rational release;     // r
    Rational deadline;    // d
    Rational processing;  // p
    Rational band_lo;     // ls
    Rational band_hi;     // le
    bool has_geometry = true;  // false for id-only jobs of abstract instances
};

// A possession: the set of paths cancelled by one start choice, in canonical order.
using Possession = std::vector<PathId>;

// The family of minimal possessions of one job, in chronological order of the earliest
// start producing each one. A family consisting of a single empty possession means the
// job can run without cancelling anything (and is dropped by reduce_instance).
struct PossessionFamily {
    int job_id = 0;
    std::vector<Possession> possessions;
    std::vector<Rational> witness_starts;  // parallel to possessions; empty if abstract
};

struct Instance {
    Timetable tt;
    std::vector<Job> jobs;
    // Families supplied by the input (abstract instance) instead of derived from the
    // geometry. Empty for geometric instances.
    std::vector<PossessionFamily> given_families;

    bool is_abstract() const { return !given_families.empty(); }
};

// ---------------------------------------------------------------------------
// Solutions and spans
// ---------------------------------------------------------------------------

struct Solution {
    int objective = 0;                    // |cancelled|
    std::vector<PathId> cancelled;        // canonical order
    std::map<int, Possession> chosen;     // job id -> selected possession
    std::map<int, Rational> starts;       // job id -> start time, when known
};

// A span: a set of paths, connected in the adjacency graph, cancelled as one unit.
using Span = std::vector<PathId>;

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Time interval [first, second] during which the job's band blocks the given path
// (the path crosses the band). Geometric mode only.
std::pair<Rational, Rational> crossing_window(const Timetable& tt, const Job& job,
                                              const PathId& path);

// Paths conflicting with the job when it starts at s (closed-interval convention: a
// boundary touch is a conflict). Throws model_error if s is outside
// [release, deadline - processing]. Geometric mode only.
Possession cancelled_paths(const Timetable& tt, const Job& job, const Rational& start);

// Sweeps the start window and returns the family of minimal possessions with witness
// starts. If some start cancels nothing, the family is a single empty possession.
PossessionFamily possession_family(const Timetable& tt, const Job& job);

// The job's family: given one for abstract instances, derived otherwise.
PossessionFamily effective_family(const Instance& inst, const Job& job);
std::vector<PossessionFamily> effective_families(const Instance& inst);

// ---------------------------------------------------------------------------
// Instance reduction
// ---------------------------------------------------------------------------

enum class RemovalReason : std::uint8_t { EmptyPossession, Dominated };

struct RemovalRecord {
    int job_id = 0;
    RemovalReason reason = RemovalReason::EmptyPossession;
    int keeper_id = 0;          // Dominated only
    PossessionFamily family;    // family of the removed job, for re-expansion
};

struct ReducedInstance {
    Instance instance;                 // kept jobs; families materialized and pruned
    std::vector<RemovalRecord> removed;
};

// Applies, in order: deduplication and superset removal inside each family; dropping of
// jobs that can run for free (empty possession achievable); pairwise job domination
// (drop j' when some kept j satisfies: every possession of j contains a possession of
// j'). Solutions of the reduced instance extend to the original at equal objective.
ReducedInstance reduce_instance(const Instance& inst);

// Re-adds removed jobs to a solution of the reduced instance (no objective change).
Solution expand_solution(const ReducedInstance& red, Solution sol);

// ---------------------------------------------------------------------------
// Adjacency and spans
// ---------------------------------------------------------------------------

// Two distinct paths are adjacent when some horizontal segment (a piece of track at one
// location) meets exactly those two. Same direction: |index difference| == 1. Opposite
// directions, geometric mode: |i - k| * headway < headway + travel. Explicit mode:
// the crossing window itself.
bool are_adjacent(const Timetable& tt, const PathId& a, const PathId& b);

// All spans (connected sets in the adjacency graph) with size <= max_size, canonically
// ordered. Throws resource_error when more than `budget` spans would be produced.
std::vector<Span> enumerate_spans(const Timetable& tt, int max_size, std::size_t budget);

// Same, restricted to connected sets using only the given vertices.
std::vector<Span> enumerate_spans(const Timetable& tt, const std::vector<PathId>& vertices,
                                  int max_size, std::size_t budget);

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

Instance parse_instance(const std::string& json_text);
std::string emit_instance(const Instance& inst);       // canonical form
std::string instance_digest(const Instance& inst);     // fnv1a64 hex of canonical form

std::string emit_solution(const Solution& sol);
Solution parse_solution(const std::string& json_text);

// ---------------------------------------------------------------------------
// Small helpers shared by the solvers
// ---------------------------------------------------------------------------

inline void sort_canonical(Possession& p) {
    std::sort(p.begin(), p.end(), [](const PathId& a, const PathId& b) { return canonical_less(a, b); });
}

bool is_subset(const Possession& a, const Possession& b);  // canonical-sorted inputs

// Union of possessions, canonical order.
Possession union_of(const std::vector<Possession>& sets);

// Builds a Solution from one chosen possession index per job (instance job order).
// Starts are filled from family witnesses when available.
Solution assemble_solution(const Instance& inst, const std::vector<PossessionFamily>& fams,
                           const std::vector<int>& choice_per_job);

}  // namespace corridor
