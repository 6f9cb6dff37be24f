#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "corridor/model.hpp"

namespace corridor {

struct BlocksOptions {
    // Members of a block must not precede its anchor: a down-anchored block only takes
    // up paths with a strictly larger index, an up-anchored block only takes down paths
    // with an index at least the anchor's.
    bool prune_member_order = true;
    // Among blocks with the same anchor that hit exactly the same jobs, keep only the
    // cheapest (ties: the member set containing the lowest differing path).
    bool prune_equal_coverage = true;
    // Candidate members per block beyond the anchor; larger pools abort.
    int max_pool = 18;
    std::size_t node_budget = 2'000'000;
    // Re-validate every kept block against the literal leading-block definition.
    bool check_blocks = false;
};

struct BlocksStats {
    std::size_t nodes = 0;  // digraph nodes excluding the sink
    std::size_t arcs = 0;
    std::size_t terminal_arcs = 0;
    std::size_t subsets_tested = 0;
};

// Per-job chronological path lists for instances where every possession is one path.
struct SingletonFamilies {
    std::vector<int> ids;                    // job ids, ascending
    std::vector<std::vector<PathId>> paths;  // chronological per job
};
SingletonFamilies extract_singleton(const Instance& inst);

// The chronologically last family path per direction: once processing has moved past
// every other family member, these are the only ones that can still be blocked.
std::vector<PathId> direction_tails(const std::vector<PathId>& fam);

// A block: its chronologically first path (the anchor) plus paths crossing the anchor.
struct Block {
    PathId anchor;                // index 0: the empty source block
    std::vector<PathId> members;  // canonical order; contains the anchor when nonempty
};

// Literal classification of the given jobs (positions into sf) against a block:
// hit = family touches the block; left/right = untouched with the whole family
// confined to that half of the anchor. covers_all: every job landed in some bucket.
struct JobSplit {
    std::vector<std::size_t> hit;
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    bool covers_all = false;
};
JobSplit classify_jobs(const Timetable& tt, const SingletonFamilies& sf,
                       const std::vector<std::size_t>& remaining, const Block& b);

// Leading: the classification covers every remaining job and none of them lies
// strictly left of the anchor.
bool is_leading_block(const Timetable& tt, const SingletonFamilies& sf,
                      const std::vector<std::size_t>& remaining, const Block& b);

// First-path candidates for the next block once `first` is the earliest path still
// relevant: same-direction and opposite-direction paths from `first` up to the first
// opposite path beyond its crossing reach (and the same-direction paths crossing
// that one). Canonical order, clipped to the timetable.
std::vector<PathId> candidate_anchors(const Timetable& tt, const PathId& first);

struct BlockNode {
    Block block;
    // (target, cost); target == SIZE_MAX is the sink, cost = member count of target.
    std::vector<std::pair<std::size_t, int>> out;
};

struct BlockDigraph {
    std::vector<BlockNode> nodes;  // nodes[0] is the source
    BlocksStats stats;
};

BlockDigraph build_block_digraph(const Instance& inst, const BlocksOptions& opts = {});

std::string digraph_dot(const BlockDigraph& dg);

Solution solve_blocks(const Instance& inst, const BlocksOptions& opts = {},
                      BlocksStats* stats = nullptr);

}  // namespace corridor
