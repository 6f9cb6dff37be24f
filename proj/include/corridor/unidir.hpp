#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "corridor/model.hpp"

namespace corridor {

// A job over a single direction whose family is the full set of length-`len`
// index windows [s, s+len-1] with first <= s <= last-len+1.
struct UnidirJob {
    int id = 0;
    int first = 1;  // earliest path index the job may use
    int last = 1;   // latest path index the job may use
    int len = 1;    // paths blocked per possession

    int latest_start() const { return last - len + 1; }
    int earliest_end() const { return first + len - 1; }
};

struct UnidirInstance {
    Direction dir = Direction::Up;
    int m = 0;  // paths in this direction
    std::vector<UnidirJob> jobs;
};

// Extracts the window form from an instance whose effective families all live in one
// direction and are exactly sliding windows. Throws model_error otherwise (mixed
// directions, gaps, unequal lengths, or an empty possession).
UnidirInstance extract_unidir(const Instance& inst);

struct UnidirRemoval {
    int job_id = 0;
    int keeper_id = 0;
    UnidirJob job;
};

// Removes every job whose demand is implied by a kept one: keep j, drop j' when
// len' <= len, first' <= first + len - len', last' >= last - len + len' (any window
// of j contains a window of j'). Identical jobs keep the smaller id.
UnidirInstance normalize_unidir(const UnidirInstance& uni,
                                std::vector<UnidirRemoval>* removals = nullptr);

// Candidate index sets that suffice for the interval decomposition.
struct UnidirCandidates {
    std::vector<int> latest_starts;            // one per job: last - len + 1
    std::vector<int> earliest_ends;            // one per job: first + len - 1
    std::map<int, std::vector<int>> span_ends; // per latest start i: i + len_j - 1 over feasible j
    std::vector<int> interval_starts;          // left endpoints reachable by the recursion
    std::vector<int> interval_ends;            // right endpoints reachable by the recursion
};
UnidirCandidates unidir_candidates(const UnidirInstance& uni);

struct UnidirDpStats {
    std::size_t states = 0;
};

// Chosen window start per job id, plus the number of distinct blocked paths.
struct WindowAssignment {
    int objective = 0;
    std::map<int, int> start_of;
};

// Exact interval dynamic program: split on a longest remaining job, trying its
// release start plus every latest start of a job as the window position.
WindowAssignment solve_unidir_windows(const UnidirInstance& uni, UnidirDpStats* stats = nullptr);

// Full pipeline: extract, normalize, solve, re-expand, map windows back to paths.
Solution solve_unidir(const Instance& inst, UnidirDpStats* stats = nullptr);

// True when sorting by release start also sorts by deadline (ties by id), i.e. the
// jobs can be simultaneously ordered by both endpoints.
bool is_ordered(const UnidirInstance& uni);

// Shortest-path formulation for ordered instances: nodes 0..n over jobs sorted by
// (first, last, id); an arc v -> w covers jobs v+1..w with one span whose width is
// beta(v, w) - alpha(v) + 1.
struct OrderedDigraph {
    std::vector<UnidirJob> sorted;  // 1-based conceptually; sorted[k] is job k+1
    std::vector<int> alpha;         // alpha[v], v in [0, n-1]: earliest useful span start
    int weight(int v, int w) const; // span width for arc v -> w, 0 <= v < w <= n
};
OrderedDigraph build_ordered_digraph(const UnidirInstance& uni);

struct OrderedStats {
    std::size_t nodes = 0;
    std::size_t arcs = 0;
};

WindowAssignment solve_ordered_windows(const UnidirInstance& uni, OrderedStats* stats = nullptr);

// Full pipeline via the ordered digraph; model_error when the order does not exist.
Solution solve_ordered(const Instance& inst, OrderedStats* stats = nullptr);

}  // namespace corridor
