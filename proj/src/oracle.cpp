#include "corridor/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "corridor/errors.hpp"

namespace corridor {

namespace {

struct MaskContext {
    std::vector<PathId> paths;                       // canonical order, bit i = paths[i]
    std::vector<std::vector<std::uint64_t>> masks;   // per job, per possession
    std::vector<PossessionFamily> fams;
};

MaskContext build_masks(const Instance& inst) {
    MaskContext ctx;
    ctx.fams = effective_families(inst);
    std::vector<PathId> all;
    for (const auto& fam : ctx.fams)
        for (const auto& pos : fam.possessions)
            for (const auto& p : pos) all.push_back(p);
    sort_canonical(all);
    all.erase(std::unique(all.begin(), all.end()), all.end());
    if (all.size() > 64)
        throw resource_error("brute force supports at most 64 distinct paths, got " +
                             std::to_string(all.size()));
    ctx.paths = std::move(all);
    auto bit_of = [&](const PathId& p) {
        auto it = std::lower_bound(ctx.paths.begin(), ctx.paths.end(), p, canonical_less);
        return static_cast<std::size_t>(it - ctx.paths.begin());
    };
    for (const auto& fam : ctx.fams) {
        std::vector<std::uint64_t> ms;
        for (const auto& pos : fam.possessions) {
            std::uint64_t m = 0;
            for (const auto& p : pos) m |= std::uint64_t{1} << bit_of(p);
            ms.push_back(m);
        }
        ctx.masks.push_back(std::move(ms));
    }
    return ctx;
}

int popcount64(std::uint64_t v) { return __builtin_popcountll(v); }

// True when union a beats union b: fewer paths, or (equal count) a contains the
// lowest path in canonical order on which the two differ.
bool union_better(std::uint64_t a, std::uint64_t b) {
    const int pa = popcount64(a);
    const int pb = popcount64(b);
    if (pa != pb) return pa < pb;
    const std::uint64_t diff = a ^ b;
    if (diff == 0) return false;
    return (a & (diff & (~diff + 1))) != 0;
}

struct Best {
    bool found = false;
    std::uint64_t mask = ~std::uint64_t{0};
    std::vector<int> choices;
};

// Depth-first product enumeration over jobs [depth, n); candices are visited in
// family order so the first optimum encountered wins ties among equal unions.
void enumerate_from(const MaskContext& ctx, std::size_t depth, std::uint64_t acc,
                    std::vector<int>& current, Best& best) {
    if (best.found && popcount64(acc) > popcount64(best.mask)) {
        // The union can only grow; prune dominated prefixes.
        return;
    }
    if (depth == ctx.masks.size()) {
        if (!best.found || union_better(acc, best.mask)) {
            best.found = true;
            best.mask = acc;
            best.choices = current;
        }
        return;
    }
    for (int c = 0; c < static_cast<int>(ctx.masks[depth].size()); ++c) {
        current.push_back(c);
        enumerate_from(ctx, depth + 1, acc | ctx.masks[depth][c], current, best);
        current.pop_back();
    }
}

Solution assemble(const Instance& inst, const MaskContext& ctx, const Best& best) {
    Solution sol;
    std::uint64_t m = best.mask;
    for (std::size_t i = 0; i < ctx.paths.size(); ++i)
        if (m & (std::uint64_t{1} << i)) sol.cancelled.push_back(ctx.paths[i]);
    sol.objective = static_cast<int>(sol.cancelled.size());
    for (std::size_t j = 0; j < inst.jobs.size(); ++j) {
        const int c = best.choices[j];
        const auto& fam = ctx.fams[j];
        sol.chosen[inst.jobs[j].id] = fam.possessions[c];
        if (fam.witness_starts.size() == fam.possessions.size() && !fam.witness_starts.empty())
            sol.starts[inst.jobs[j].id] = fam.witness_starts[c];
    }
    return sol;
}

void check_budget(const Instance& inst, const OracleOptions& opts) {
    const std::size_t prod = enumeration_product(inst);
    if (prod > opts.product_budget)
        throw resource_error("enumeration product " + std::to_string(prod) +
                             " exceeds budget " + std::to_string(opts.product_budget));
}

Solution brute_force_impl(const Instance& inst, const OracleOptions& opts, bool parallel) {
    check_budget(inst, opts);
    MaskContext ctx = build_masks(inst);
    const std::size_t n = ctx.masks.size();
    Best best;
    if (n == 0) {
        best.found = true;
        best.mask = 0;
        return assemble(inst, ctx, best);
    }
    const int first = static_cast<int>(ctx.masks[0].size());
    std::vector<Best> per_choice(static_cast<std::size_t>(first));
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
        for (int c = 0; c < first; ++c) {
            std::vector<int> cur{c};
            enumerate_from(ctx, 1, ctx.masks[0][c], cur, per_choice[static_cast<std::size_t>(c)]);
        }
#else
        parallel = false;
#endif
    }
    if (!parallel) {
        for (int c = 0; c < first; ++c) {
            std::vector<int> cur{c};
            enumerate_from(ctx, 1, ctx.masks[0][c], cur, per_choice[static_cast<std::size_t>(c)]);
        }
    }
    // Deterministic reduction in choice order, independent of thread scheduling.
    for (int c = 0; c < first; ++c) {
        const Best& b = per_choice[static_cast<std::size_t>(c)];
        if (!b.found) continue;
        if (!best.found || union_better(b.mask, best.mask)) best = b;
    }
    if (!best.found) throw model_error("no feasible possession combination");
    return assemble(inst, ctx, best);
}

}  // namespace

std::size_t enumeration_product(const Instance& inst) {
    const auto fams = effective_families(inst);
    std::size_t prod = 1;
    const std::size_t cap = std::size_t{1} << 63;
    for (const auto& fam : fams) {
        const std::size_t k = fam.possessions.size();
        if (k == 0) throw model_error("job with an empty possession family");
        if (prod > cap / std::max<std::size_t>(k, 1)) return cap;
        prod *= k;
    }
    return prod;
}

Solution brute_force(const Instance& inst, const OracleOptions& opts) {
    return brute_force_impl(inst, opts, true);
}

Solution brute_force_serial(const Instance& inst, const OracleOptions& opts) {
    return brute_force_impl(inst, opts, false);
}

Solution brute_force_hitting(const Instance& inst, const OracleOptions& opts) {
    MaskContext ctx = build_masks(inst);
    const int u = static_cast<int>(ctx.paths.size());
    if (u > opts.universe_budget)
        throw resource_error("hitting-set universe of " + std::to_string(u) +
                             " paths exceeds budget " + std::to_string(opts.universe_budget));
    const std::size_t n = ctx.masks.size();

    auto feasible = [&](std::uint64_t x) {
        for (std::size_t j = 0; j < n; ++j) {
            bool ok = false;
            for (std::uint64_t fm : ctx.masks[j])
                if ((fm & ~x) == 0) { ok = true; break; }
            if (!ok) return false;
        }
        return true;
    };

    // Enumerate subsets in increasing cardinality; within one cardinality in
    // lexicographic order of the sorted path-index tuples.
    std::uint64_t found = 0;
    bool have = false;
    for (int k = 0; k <= u && !have; ++k) {
        std::vector<int> idx(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
        while (true) {
            std::uint64_t x = 0;
            for (int i : idx) x |= std::uint64_t{1} << i;
            if (feasible(x)) {
                found = x;
                have = true;
                break;
            }
            int pos = k - 1;
            while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == u - k + pos) --pos;
            if (pos < 0) break;
            ++idx[static_cast<std::size_t>(pos)];
            for (int i = pos + 1; i < k; ++i)
                idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
        }
    }
    if (!have) throw model_error("no feasible path set covers every job");

    Best best;
    best.found = true;
    best.mask = found;
    for (std::size_t j = 0; j < n; ++j) {
        int pick = -1;
        for (int c = 0; c < static_cast<int>(ctx.masks[j].size()); ++c)
            if ((ctx.masks[j][static_cast<std::size_t>(c)] & ~found) == 0) { pick = c; break; }
        if (pick < 0) throw model_error("internal: cover lost a job");
        best.choices.push_back(pick);
    }
    Solution sol = assemble(inst, ctx, best);
    // At minimum cardinality the chosen possessions use every path of the set.
    std::uint64_t used = 0;
    for (std::size_t j = 0; j < n; ++j)
        used |= ctx.masks[j][static_cast<std::size_t>(best.choices[j])];
    if (used != found) throw model_error("internal: minimal cover has unused paths");
    return sol;
}

}  // namespace corridor
