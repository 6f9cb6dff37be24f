#include "corridor/blocks.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <sstream>

#include "corridor/errors.hpp"
#include "corridor/rational.hpp"

namespace corridor {

namespace {

Direction opposite(Direction d) {
    return d == Direction::Up ? Direction::Down : Direction::Up;
}

// Integer image of the timetable geometry. All block computations round crossing
// reaches to whole indices; folding floor(travel/headway) once keeps the hot loops
// free of exact-rational arithmetic (anchor indices are integers, and
// floor(i + r) == i + floor(r), ceil(i - r) == i - floor(r) for integer i).
struct TtGeo {
    CrossingMode mode;
    int w_up = 0, w_down = 0, m = 0;
    int reach = 0;  // floor(travel / headway); geometric mode only
    explicit TtGeo(const Timetable& tt)
        : mode(tt.mode), w_up(tt.w_up), w_down(tt.w_down), m(tt.m) {
        if (tt.mode == CrossingMode::Geometric)
            reach = rational_floor(tt.travel / tt.headway).convert_to<int>();
    }
};

// Largest index T such that the paths of direction d in the right half of `anchor`
// are exactly those with index > T.
int right_threshold(const TtGeo& geo, const PathId& anchor, Direction d) {
    if (anchor.index == 0) return 0;
    if (d == anchor.dir) return anchor.index;
    if (geo.mode == CrossingMode::Explicit)
        return anchor.index + (anchor.dir == Direction::Up ? geo.w_down : geo.w_up);
    return anchor.index + geo.reach;
}

// Opposite-direction index range crossing path p, clipped to [1, m].
std::pair<int, int> crossing_span(const TtGeo& geo, const PathId& p) {
    int lo, hi;
    if (geo.mode == CrossingMode::Explicit) {
        if (p.dir == Direction::Up) {
            lo = p.index - geo.w_up;
            hi = p.index + geo.w_down;
        } else {
            lo = p.index - geo.w_down;
            hi = p.index + geo.w_up;
        }
    } else {
        lo = p.index - geo.reach;
        hi = p.index + geo.reach;
    }
    return {std::max(lo, 1), std::min(hi, geo.m)};
}

std::vector<PathId> candidate_anchors_geo(const TtGeo& geo, const PathId& first) {
    if (first.index <= 0) throw model_error("candidate_anchors needs a real path");
    const int i = first.index;
    int i1, i2;  // first opposite index beyond reach; last same-dir index crossing it
    if (geo.mode == CrossingMode::Explicit) {
        i1 = i + (first.dir == Direction::Up ? geo.w_down : geo.w_up) + 1;
        i2 = i1 + (first.dir == Direction::Up ? geo.w_up : geo.w_down);
    } else {
        i1 = i + geo.reach + 1;
        i2 = i1 + geo.reach;
    }
    std::vector<PathId> out;
    for (int k = i; k <= std::min(first.dir == Direction::Up ? i2 : i1, geo.m); ++k)
        out.push_back({Direction::Up, k});
    for (int k = i; k <= std::min(first.dir == Direction::Up ? i1 : i2, geo.m); ++k)
        out.push_back({Direction::Down, k});
    std::sort(out.begin(), out.end(),
              [](const PathId& a, const PathId& b) { return canonical_less(a, b); });
    return out;
}

int enc_path(const Timetable& tt, const PathId& p) {
    return (p.dir == Direction::Up ? 0 : tt.m + 1) + p.index;
}

struct Ctx {
    const Timetable& tt;
    TtGeo geo;
    SingletonFamilies sf;
    std::size_t n = 0;
    // Per direction, per index: sorted job positions whose family contains the path,
    // and those whose tail set contains it.
    std::vector<std::vector<std::size_t>> own[2];
    std::vector<std::vector<std::size_t>> star[2];
    std::vector<int> star_idx[2];  // ascending indices with at least one tail owner
    // Per direction: (tail index, job position), ascending by (index, job).
    std::vector<std::pair<int, std::size_t>> tails[2];
    // Per job: tail index per direction, 0 when the direction is absent.
    std::vector<int> tail_of[2];

    static int d2i(Direction d) { return d == Direction::Up ? 0 : 1; }

    explicit Ctx(const Instance& inst) : tt(inst.tt), geo(inst.tt), sf(extract_singleton(inst)) {
        n = sf.ids.size();
        for (int d = 0; d < 2; ++d) {
            own[d].assign(static_cast<std::size_t>(tt.m) + 1, {});
            star[d].assign(static_cast<std::size_t>(tt.m) + 1, {});
            tail_of[d].assign(n, 0);
        }
        for (std::size_t j = 0; j < n; ++j) {
            for (const PathId& p : sf.paths[j])
                own[d2i(p.dir)][static_cast<std::size_t>(p.index)].push_back(j);
            for (const PathId& t : direction_tails(sf.paths[j])) {
                const int d = d2i(t.dir);
                star[d][static_cast<std::size_t>(t.index)].push_back(j);
                tail_of[d][j] = t.index;
                tails[d].push_back({t.index, j});
            }
        }
        for (int d = 0; d < 2; ++d) {
            std::sort(tails[d].begin(), tails[d].end());
            for (int i = 1; i <= tt.m; ++i)
                if (!star[d][static_cast<std::size_t>(i)].empty()) star_idx[d].push_back(i);
        }
    }

    const std::vector<std::size_t>& owners(const PathId& p) const {
        return own[d2i(p.dir)][static_cast<std::size_t>(p.index)];
    }
    const std::vector<std::size_t>& tail_owners(const PathId& p) const {
        return star[d2i(p.dir)][static_cast<std::size_t>(p.index)];
    }
};

bool contains(const std::vector<std::size_t>& sorted, std::size_t v) {
    return std::binary_search(sorted.begin(), sorted.end(), v);
}

struct Builder {
    const Ctx& ctx;
    const BlocksOptions& opts;
    BlockDigraph dg;
    // A node is a block plus the set of already-covered jobs that still reach past
    // its anchor. Labelling nodes with the block alone is wrong: a member of an
    // earlier block may cross a later anchor, so a job covered upstream can look
    // pending again when the remaining set is recomputed from the block only.
    // Everything covered that does NOT reach past the anchor stays irrelevant
    // forever (thresholds grow along arcs), so this residue is all the history
    // the continuation needs.
    std::vector<std::vector<std::size_t>> residue;
    std::map<std::vector<int>, std::size_t> node_of;
    std::queue<std::size_t> work;

    Builder(const Ctx& c, const BlocksOptions& o) : ctx(c), opts(o) {}

    std::vector<int> key_of(const Block& b, const std::vector<std::size_t>& covered) const {
        std::vector<int> k{enc_path(ctx.tt, b.anchor)};
        for (const PathId& p : b.members) k.push_back(enc_path(ctx.tt, p));
        k.push_back(-1);
        for (std::size_t j : covered) k.push_back(static_cast<int>(j));
        return k;
    }

    std::size_t intern(const Block& b, std::vector<std::size_t> covered) {
        auto key = key_of(b, covered);
        auto it = node_of.find(key);
        if (it != node_of.end()) return it->second;
        if (dg.nodes.size() >= opts.node_budget)
            throw resource_error("block digraph exceeded the node budget of " +
                                 std::to_string(opts.node_budget));
        const std::size_t idx = dg.nodes.size();
        dg.nodes.push_back(BlockNode{b, {}});
        residue.push_back(std::move(covered));
        node_of.emplace(std::move(key), idx);
        work.push(idx);
        return idx;
    }

    std::vector<std::size_t> hit_jobs(const std::vector<PathId>& members) const {
        std::vector<std::size_t> out;
        for (const PathId& p : members) {
            const auto& o = ctx.owners(p);
            out.insert(out.end(), o.begin(), o.end());
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    // Some job outside `covered` still has a tail in the right half of `anchor`?
    bool has_remaining(const PathId& anchor, const std::vector<std::size_t>& covered) const {
        for (int d = 0; d < 2; ++d) {
            const int t = right_threshold(ctx.geo, anchor,
                                          d == 0 ? Direction::Up : Direction::Down);
            const auto& list = ctx.tails[d];
            for (std::size_t i = list.size(); i-- > 0;) {
                if (list[i].first <= t) break;
                if (!contains(covered, list[i].second)) return true;
            }
        }
        return false;
    }

    // Chronologically first tail path beyond the anchor owned by a pending job.
    std::optional<PathId> first_relevant(const PathId& anchor,
                                         const std::vector<std::size_t>& covered) const {
        std::optional<PathId> best;
        for (int d = 0; d < 2; ++d) {
            const Direction dir = d == 0 ? Direction::Up : Direction::Down;
            const int t = right_threshold(ctx.geo, anchor, dir);
            const auto& idxs = ctx.star_idx[d];
            for (auto it = std::upper_bound(idxs.begin(), idxs.end(), t); it != idxs.end();
                 ++it) {
                bool live = false;
                for (std::size_t j : ctx.star[d][static_cast<std::size_t>(*it)])
                    if (!contains(covered, j)) { live = true; break; }
                if (!live) continue;
                const PathId cand{dir, *it};
                if (!best || cand.index < best->index ||
                    (cand.index == best->index && dir == Direction::Up))
                    best = cand;
                break;
            }
        }
        return best;
    }

    bool relevant_tail(const PathId& p, const std::vector<std::size_t>& covered) const {
        for (std::size_t j : ctx.tail_owners(p))
            if (!contains(covered, j)) return true;
        return false;
    }

    // Pending jobs whose every tail lies at or before the right threshold of
    // `next_anchor` (i.e. jobs that must be hit by the very next block).
    std::vector<std::size_t> blockers_for(const PathId& anchor, const PathId& next_anchor,
                                          const std::vector<std::size_t>& covered) const {
        const int tu = right_threshold(ctx.geo, next_anchor, Direction::Up);
        const int td = right_threshold(ctx.geo, next_anchor, Direction::Down);
        std::vector<std::size_t> out;
        for (int d = 0; d < 2; ++d) {
            const Direction dir = d == 0 ? Direction::Up : Direction::Down;
            const int from = right_threshold(ctx.geo, anchor, dir);
            const int to = d == 0 ? tu : td;
            const auto& idxs = ctx.star_idx[d];
            for (auto it = std::upper_bound(idxs.begin(), idxs.end(), from);
                 it != idxs.end() && *it <= to; ++it) {
                for (std::size_t j : ctx.star[d][static_cast<std::size_t>(*it)]) {
                    if (contains(covered, j)) continue;
                    const int ju = ctx.tail_of[0][j];
                    const int jd = ctx.tail_of[1][j];
                    if (ju <= tu && jd <= td) out.push_back(j);
                }
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    // All pending jobs with a tail beyond `anchor` (for literal re-checks only).
    std::vector<std::size_t> remaining_jobs(const PathId& anchor,
                                            const std::vector<std::size_t>& covered) const {
        const int tu = right_threshold(ctx.geo, anchor, Direction::Up);
        const int td = right_threshold(ctx.geo, anchor, Direction::Down);
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < ctx.n; ++j) {
            if (contains(covered, j)) continue;
            if (ctx.tail_of[0][j] > tu || ctx.tail_of[1][j] > td) out.push_back(j);
        }
        return out;
    }

    void expand(std::size_t u) {
        const Block blk = dg.nodes[u].block;  // copy: nodes may reallocate below
        std::vector<std::size_t> covered = hit_jobs(blk.members);
        covered.insert(covered.end(), residue[u].begin(), residue[u].end());
        std::sort(covered.begin(), covered.end());
        covered.erase(std::unique(covered.begin(), covered.end()), covered.end());
        if (!has_remaining(blk.anchor, covered)) {
            dg.nodes[u].out.push_back({SIZE_MAX, 0});
            ++dg.stats.arcs;
            ++dg.stats.terminal_arcs;
            return;
        }
        const std::optional<PathId> first = first_relevant(blk.anchor, covered);
        if (!first) throw model_error("internal: remaining job without a relevant tail");
        std::vector<std::size_t> literal_remaining;
        if (opts.check_blocks) literal_remaining = remaining_jobs(blk.anchor, covered);

        for (const PathId& next : candidate_anchors_geo(ctx.geo, *first)) {
            if (next.index <= right_threshold(ctx.geo, blk.anchor, next.dir)) continue;
            if (!relevant_tail(next, covered)) continue;
            expand_candidate(u, blk, covered, next, literal_remaining);
        }
    }

    void expand_candidate(std::size_t u, const Block& blk,
                          const std::vector<std::size_t>& covered, const PathId& next,
                          const std::vector<std::size_t>& literal_remaining) {
        // Member pool: the anchor plus opposite tails crossing it that are still
        // relevant and inside the right half of the current anchor.
        const Direction od = opposite(next.dir);
        auto [lo, hi] = crossing_span(ctx.geo, next);
        if (opts.prune_member_order)
            lo = std::max(lo, next.dir == Direction::Down ? next.index + 1 : next.index);
        lo = std::max(lo, right_threshold(ctx.geo, blk.anchor, od) + 1);
        std::vector<PathId> pool{next};
        for (int k = lo; k <= hi; ++k) {
            const PathId q{od, k};
            if (!ctx.tail_owners(q).empty() && relevant_tail(q, covered)) pool.push_back(q);
        }
        if (static_cast<int>(pool.size()) - 1 > opts.max_pool)
            throw resource_error("member pool of " + std::to_string(pool.size() - 1) +
                                 " paths exceeds the limit of " + std::to_string(opts.max_pool));
        std::sort(pool.begin(), pool.end(),
                  [](const PathId& a, const PathId& b) { return canonical_less(a, b); });
        std::size_t anchor_pos = 0;
        while (!(pool[anchor_pos] == next)) ++anchor_pos;

        const std::vector<std::size_t> blockers = blockers_for(blk.anchor, next, covered);
        std::vector<std::uint32_t> blocker_mask;
        for (std::size_t j : blockers) {
            std::uint32_t pm = 0;
            for (std::size_t t = 0; t < pool.size(); ++t)
                if (contains(ctx.owners(pool[t]), j)) pm |= std::uint32_t{1} << t;
            if (pm == 0) return;  // this job cannot be hit: no block anchored here leads
            blocker_mask.push_back(pm);
        }

        // Job coverage of each pool element, over the jobs that are still pending.
        // Jobs already covered must not influence the equal-coverage pruning: two
        // blocks that differ only on finished jobs have identical continuations.
        std::vector<std::size_t> local;
        for (const PathId& p : pool)
            for (std::size_t j : ctx.owners(p))
                if (!contains(covered, j)) local.push_back(j);
        std::sort(local.begin(), local.end());
        local.erase(std::unique(local.begin(), local.end()), local.end());
        const std::size_t words = (local.size() + 63) / 64;
        std::vector<std::vector<std::uint64_t>> cover(pool.size(),
                                                      std::vector<std::uint64_t>(words, 0));
        for (std::size_t t = 0; t < pool.size(); ++t)
            for (std::size_t j : ctx.owners(pool[t])) {
                const auto it = std::lower_bound(local.begin(), local.end(), j);
                if (it == local.end() || *it != j) continue;
                const std::size_t pos = static_cast<std::size_t>(it - local.begin());
                cover[t][pos / 64] |= std::uint64_t{1} << (pos % 64);
            }

        std::vector<std::size_t> free_bits;
        for (std::size_t t = 0; t < pool.size(); ++t)
            if (t != anchor_pos) free_bits.push_back(t);
        const std::uint32_t anchor_bit = std::uint32_t{1} << anchor_pos;

        auto mask_better = [](std::uint32_t a, std::uint32_t b) {
            const int pa = __builtin_popcount(a);
            const int pb = __builtin_popcount(b);
            if (pa != pb) return pa < pb;
            const std::uint32_t diff = a ^ b;
            if (diff == 0) return false;
            return (a & (diff & (~diff + 1))) != 0;
        };

        std::map<std::vector<std::uint64_t>, std::uint32_t> best_for_coverage;
        std::vector<std::uint32_t> kept;
        std::vector<std::uint64_t> cov(words);
        for (std::uint64_t s = 0; s < (std::uint64_t{1} << free_bits.size()); ++s) {
            std::uint32_t mask = anchor_bit;
            for (std::size_t b = 0; b < free_bits.size(); ++b)
                if (s & (std::uint64_t{1} << b)) mask |= std::uint32_t{1} << free_bits[b];
            ++dg.stats.subsets_tested;
            bool leading = true;
            for (std::uint32_t pm : blocker_mask)
                if ((pm & mask) == 0) { leading = false; break; }
            if (!leading) continue;
            if (opts.check_blocks) {
                Block b2{next, {}};
                for (std::size_t t = 0; t < pool.size(); ++t)
                    if (mask & (std::uint32_t{1} << t)) b2.members.push_back(pool[t]);
                if (!is_leading_block(ctx.tt, ctx.sf, literal_remaining, b2))
                    throw model_error("internal: fast leading-block test disagrees with "
                                      "the literal definition");
            }
            if (!opts.prune_equal_coverage) {
                kept.push_back(mask);
                continue;
            }
            std::fill(cov.begin(), cov.end(), 0);
            for (std::size_t t = 0; t < pool.size(); ++t)
                if (mask & (std::uint32_t{1} << t))
                    for (std::size_t w = 0; w < words; ++w) cov[w] |= cover[t][w];
            auto it = best_for_coverage.find(cov);
            if (it == best_for_coverage.end()) best_for_coverage.emplace(cov, mask);
            else if (mask_better(mask, it->second)) it->second = mask;
        }
        if (opts.prune_equal_coverage)
            for (const auto& kv : best_for_coverage) kept.push_back(kv.second);
        std::sort(kept.begin(), kept.end(), mask_better);

        // Covered jobs that still reach past the child's anchor must travel with it;
        // everything else in `covered` is out of reach for good.
        const int ctu = right_threshold(ctx.geo, next, Direction::Up);
        const int ctd = right_threshold(ctx.geo, next, Direction::Down);
        std::vector<std::size_t> reaching;
        for (std::size_t j : covered)
            if (ctx.tail_of[0][j] > ctu || ctx.tail_of[1][j] > ctd) reaching.push_back(j);

        for (std::uint32_t mask : kept) {
            Block child{next, {}};
            for (std::size_t t = 0; t < pool.size(); ++t)
                if (mask & (std::uint32_t{1} << t)) child.members.push_back(pool[t]);
            std::vector<std::size_t> child_res;
            for (std::size_t j : reaching) {
                bool own = false;
                for (const PathId& q : child.members)
                    if (contains(ctx.owners(q), j)) { own = true; break; }
                if (!own) child_res.push_back(j);
            }
            const std::size_t v = intern(child, std::move(child_res));
            dg.nodes[u].out.push_back({v, static_cast<int>(child.members.size())});
            ++dg.stats.arcs;
        }
    }
};

}  // namespace

SingletonFamilies extract_singleton(const Instance& inst) {
    const auto fams = effective_families(inst);
    SingletonFamilies sf;
    for (std::size_t j = 0; j < fams.size(); ++j) {
        std::vector<PathId> paths;
        for (const auto& pos : fams[j].possessions) {
            if (pos.size() != 1)
                throw model_error("job " + std::to_string(inst.jobs[j].id) +
                                  " has a possession with " + std::to_string(pos.size()) +
                                  " paths; the block solver needs single-path possessions");
            paths.push_back(pos.front());
        }
        sf.ids.push_back(inst.jobs[j].id);
        sf.paths.push_back(std::move(paths));
    }
    return sf;
}

std::vector<PathId> direction_tails(const std::vector<PathId>& fam) {
    bool have_up = false, have_dn = false;
    PathId up{}, dn{};
    for (const PathId& p : fam) {
        if (p.dir == Direction::Up) {
            up = p;
            have_up = true;
        } else {
            dn = p;
            have_dn = true;
        }
    }
    std::vector<PathId> out;
    if (have_up) out.push_back(up);
    if (have_dn) out.push_back(dn);
    sort_canonical(out);
    return out;
}

JobSplit classify_jobs(const Timetable& tt, const SingletonFamilies& sf,
                       const std::vector<std::size_t>& remaining, const Block& b) {
    JobSplit split;
    split.covers_all = true;
    for (std::size_t j : remaining) {
        bool hit = false;
        for (const PathId& p : sf.paths[j])
            if (std::find(b.members.begin(), b.members.end(), p) != b.members.end()) {
                hit = true;
                break;
            }
        if (hit) {
            split.hit.push_back(j);
            continue;
        }
        bool left = false, right = false;
        for (const PathId& p : sf.paths[j]) {
            if (in_left_half(tt, b.anchor, p)) left = true;
            if (in_right_half(tt, b.anchor, p)) right = true;
        }
        if (left) split.left.push_back(j);
        if (right) split.right.push_back(j);
        if (!left && !right) split.covers_all = false;
    }
    return split;
}

bool is_leading_block(const Timetable& tt, const SingletonFamilies& sf,
                      const std::vector<std::size_t>& remaining, const Block& b) {
    const JobSplit split = classify_jobs(tt, sf, remaining, b);
    // With the anchor inside the block, families that are crossing runs can never
    // reach both strict halves.
    std::vector<std::size_t> both;
    std::set_intersection(split.left.begin(), split.left.end(), split.right.begin(),
                          split.right.end(), std::back_inserter(both));
    if (!both.empty())
        throw model_error("job " + std::to_string(sf.ids[both.front()]) +
                          " reaches both sides of the anchor; families are not crossing runs");
    return split.covers_all && split.left.empty();
}

std::vector<PathId> candidate_anchors(const Timetable& tt, const PathId& first) {
    return candidate_anchors_geo(TtGeo(tt), first);
}

BlockDigraph build_block_digraph(const Instance& inst, const BlocksOptions& opts) {
    Ctx ctx(inst);
    Builder builder(ctx, opts);
    Block source;
    source.anchor = PathId{Direction::Up, 0};
    builder.intern(source, {});
    while (!builder.work.empty()) {
        const std::size_t u = builder.work.front();
        builder.work.pop();
        builder.expand(u);
    }
    builder.dg.stats.nodes = builder.dg.nodes.size();
    return std::move(builder.dg);
}

std::string digraph_dot(const BlockDigraph& dg) {
    std::ostringstream os;
    os << "digraph blocks {\n  rankdir=LR;\n";
    auto label = [&](std::size_t i) {
        if (i == SIZE_MAX) return std::string("D");
        if (dg.nodes[i].block.anchor.index == 0) return std::string("O");
        std::string s = "{";
        const auto& mem = dg.nodes[i].block.members;
        for (std::size_t k = 0; k < mem.size(); ++k) {
            if (k) s += ",";
            s += path_name(mem[k]);
        }
        return s + "}";
    };
    auto id = [](std::size_t i) {
        return i == SIZE_MAX ? std::string("nD") : "n" + std::to_string(i);
    };
    for (std::size_t i = 0; i < dg.nodes.size(); ++i)
        os << "  " << id(i) << " [label=\"" << label(i) << "\"];\n";
    os << "  nD [label=\"D\"];\n";
    for (std::size_t i = 0; i < dg.nodes.size(); ++i)
        for (const auto& [t, c] : dg.nodes[i].out)
            os << "  " << id(i) << " -> " << id(t) << " [label=\"" << c << "\"];\n";
    os << "}\n";
    return os.str();
}

Solution solve_blocks(const Instance& inst, const BlocksOptions& opts, BlocksStats* stats) {
    BlockDigraph dg = build_block_digraph(inst, opts);
    if (stats) *stats = dg.stats;

    // Arcs strictly increase the anchor index, so index order is topological.
    std::vector<std::size_t> order(dg.nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Block& ba = dg.nodes[a].block;
        const Block& bb = dg.nodes[b].block;
        if (ba.anchor.index != bb.anchor.index) return ba.anchor.index < bb.anchor.index;
        if (ba.anchor.dir != bb.anchor.dir) return ba.anchor.dir == Direction::Up;
        return std::lexicographical_compare(ba.members.begin(), ba.members.end(),
                                            bb.members.begin(), bb.members.end(),
                                            canonical_less);
    });

    const long long inf = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> dist(dg.nodes.size(), inf);
    std::vector<std::size_t> pred(dg.nodes.size(), SIZE_MAX);
    long long sink_dist = inf;
    std::size_t sink_pred = SIZE_MAX;
    dist[0] = 0;
    for (std::size_t u : order) {
        if (dist[u] >= inf) continue;
        for (const auto& [t, c] : dg.nodes[u].out) {
            const long long nd = dist[u] + c;
            if (t == SIZE_MAX) {
                if (nd < sink_dist) {
                    sink_dist = nd;
                    sink_pred = u;
                }
            } else if (nd < dist[t]) {
                dist[t] = nd;
                pred[t] = u;
            }
        }
    }
    if (sink_dist >= inf) throw model_error("no feasible block sequence found");

    std::vector<Possession> cancelled_blocks;
    for (std::size_t u = sink_pred; u != SIZE_MAX; u = pred[u])
        if (dg.nodes[u].block.anchor.index != 0)
            cancelled_blocks.push_back(dg.nodes[u].block.members);
    const Possession cancelled = union_of(cancelled_blocks);
    if (static_cast<long long>(cancelled.size()) != sink_dist)
        throw model_error("internal: blocks on the shortest path overlap");

    const auto fams = effective_families(inst);
    std::vector<int> choice(inst.jobs.size(), -1);
    for (std::size_t j = 0; j < inst.jobs.size(); ++j) {
        for (std::size_t c = 0; c < fams[j].possessions.size(); ++c) {
            const PathId& p = fams[j].possessions[c].front();
            if (std::binary_search(cancelled.begin(), cancelled.end(), p, canonical_less)) {
                choice[j] = static_cast<int>(c);
                break;
            }
        }
        if (choice[j] < 0)
            throw model_error("internal: job " + std::to_string(inst.jobs[j].id) +
                              " not covered by the chosen blocks");
    }
    Solution sol = assemble_solution(inst, fams, choice);
    if (sol.objective != static_cast<int>(sink_dist))
        throw model_error("internal: reconstruction disagrees with the shortest path");
    return sol;
}

}  // namespace corridor
