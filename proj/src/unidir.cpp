#include "corridor/unidir.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "corridor/errors.hpp"

namespace corridor {

namespace {

std::string job_tag(int id) { return "job " + std::to_string(id); }

}  // namespace

UnidirInstance extract_unidir(const Instance& inst) {
    const auto fams = effective_families(inst);
    UnidirInstance uni;
    uni.m = inst.tt.m;
    bool dir_set = false;
    if (inst.tt.directions == DirectionsUsed::Up) {
        uni.dir = Direction::Up;
        dir_set = true;
    } else if (inst.tt.directions == DirectionsUsed::Down) {
        uni.dir = Direction::Down;
        dir_set = true;
    }
    for (std::size_t j = 0; j < fams.size(); ++j) {
        const auto& fam = fams[j];
        const int id = inst.jobs[j].id;
        int len = -1;
        std::vector<int> starts;
        for (const auto& pos : fam.possessions) {
            if (pos.empty())
                throw model_error(job_tag(id) + " can run for free; reduce the instance first");
            for (const auto& p : pos) {
                if (!dir_set) {
                    uni.dir = p.dir;
                    dir_set = true;
                } else if (p.dir != uni.dir) {
                    throw model_error("paths of more than one direction; not unidirectional");
                }
            }
            for (std::size_t k = 1; k < pos.size(); ++k)
                if (pos[k].index != pos[k - 1].index + 1)
                    throw model_error(job_tag(id) + " has a non-contiguous possession");
            if (len < 0) len = static_cast<int>(pos.size());
            else if (len != static_cast<int>(pos.size()))
                throw model_error(job_tag(id) + " has possessions of different lengths");
            starts.push_back(pos.front().index);
        }
        for (std::size_t k = 1; k < starts.size(); ++k)
            if (starts[k] != starts[k - 1] + 1)
                throw model_error(job_tag(id) + " is not a sliding window family");
        UnidirJob uj;
        uj.id = id;
        uj.len = len;
        uj.first = starts.front();
        uj.last = starts.back() + len - 1;
        uni.jobs.push_back(uj);
    }
    return uni;
}

UnidirInstance normalize_unidir(const UnidirInstance& uni, std::vector<UnidirRemoval>* removals) {
    // keeper k implies removed r when every window of k contains a window of r
    auto implied_by = [](const UnidirJob& k, const UnidirJob& r) {
        return r.len <= k.len && r.first <= k.first + k.len - r.len &&
               r.last >= k.last - k.len + r.len;
    };
    std::vector<UnidirJob> jobs = uni.jobs;
    std::sort(jobs.begin(), jobs.end(),
              [](const UnidirJob& a, const UnidirJob& b) { return a.id < b.id; });
    std::vector<bool> kept(jobs.size(), true);
    std::vector<UnidirRemoval> recs;
    // Descending id so that on mutual implication the smaller id survives; the
    // relation is transitive, hence one pass suffices.
    for (std::size_t r = jobs.size(); r-- > 0;) {
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            if (k == r || !kept[k]) continue;
            if (implied_by(jobs[k], jobs[r])) {
                kept[r] = false;
                recs.push_back({jobs[r].id, jobs[k].id, jobs[r]});
                break;
            }
        }
    }
    UnidirInstance out;
    out.dir = uni.dir;
    out.m = uni.m;
    for (std::size_t i = 0; i < jobs.size(); ++i)
        if (kept[i]) out.jobs.push_back(jobs[i]);
    if (removals) *removals = std::move(recs);
    return out;
}

UnidirCandidates unidir_candidates(const UnidirInstance& uni) {
    UnidirCandidates c;
    auto push_unique = [](std::vector<int>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    for (const auto& j : uni.jobs) {
        c.latest_starts.push_back(j.latest_start());
        c.earliest_ends.push_back(j.earliest_end());
    }
    push_unique(c.latest_starts);
    push_unique(c.earliest_ends);
    for (int i : c.latest_starts) {
        std::vector<int> ends;
        for (const auto& j : uni.jobs)
            if (j.first <= i && i <= j.latest_start()) ends.push_back(i + j.len - 1);
        push_unique(ends);
        c.span_ends[i] = std::move(ends);
    }
    std::vector<int> ts{1};
    std::vector<int> te{uni.m};
    for (const auto& j : uni.jobs) {
        ts.push_back(j.first + j.len);
        te.push_back(j.latest_start() - 1);
        te.push_back(j.first - 1);
        for (const auto& j2 : uni.jobs) ts.push_back(j2.latest_start() + j.len);
    }
    auto clip = [&](std::vector<int>& v) {
        v.erase(std::remove_if(v.begin(), v.end(),
                               [&](int x) { return x < 1 || x > uni.m; }),
                v.end());
    };
    clip(ts);
    clip(te);
    push_unique(ts);
    push_unique(te);
    c.interval_starts = std::move(ts);
    c.interval_ends = std::move(te);
    return c;
}

namespace {

struct IntervalSolver {
    const UnidirInstance& uni;
    UnidirCandidates cand;
    std::unordered_set<int> start_set, end_set;
    std::vector<int> try_starts;  // global latest starts, sorted
    struct Entry {
        int cost = 0;
        int job_pos = -1;  // position in uni.jobs, -1 when no job remains
        int start = 0;
    };
    std::unordered_map<std::int64_t, Entry> memo;

    explicit IntervalSolver(const UnidirInstance& u) : uni(u) {
        cand = unidir_candidates(u);
        start_set.insert(cand.interval_starts.begin(), cand.interval_starts.end());
        end_set.insert(cand.interval_ends.begin(), cand.interval_ends.end());
        try_starts = cand.latest_starts;
    }

    std::int64_t key(int a, int b) const {
        return static_cast<std::int64_t>(a) * (uni.m + 2) + b;
    }

    bool in_interval(const UnidirJob& j, int a, int b) const {
        return j.earliest_end() >= a && j.latest_start() <= b;
    }

    int solve(int a, int b) {
        if (a > b) return 0;
        auto it = memo.find(key(a, b));
        if (it != memo.end()) return it->second.cost;
        if (start_set.find(a) == start_set.end() || end_set.find(b) == end_set.end())
            throw model_error("internal: interval endpoints escaped the candidate sets");
        Entry e;
        int pick = -1;
        for (std::size_t j = 0; j < uni.jobs.size(); ++j)
            if (in_interval(uni.jobs[j], a, b) &&
                (pick < 0 || uni.jobs[j].len > uni.jobs[static_cast<std::size_t>(pick)].len))
                pick = static_cast<int>(j);
        if (pick < 0) {
            memo.emplace(key(a, b), e);
            return 0;
        }
        const UnidirJob& jj = uni.jobs[static_cast<std::size_t>(pick)];
        e.job_pos = pick;
        std::vector<int> ss{jj.first};
        for (int s : try_starts)
            if (s >= jj.first && s <= jj.latest_start()) ss.push_back(s);
        std::sort(ss.begin(), ss.end());
        ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
        int best = -1;
        for (int s : ss) {
            const int xe = s + jj.len - 1;
            const int overlap = std::min(b, xe) - std::max(a, s) + 1;
            if (overlap <= 0)
                throw model_error("internal: a window of the splitting job misses the interval");
            const int val = overlap + solve(a, std::min(b, s - 1)) + solve(std::max(a, xe + 1), b);
            if (best < 0 || val < best) {
                best = val;
                e.start = s;
            }
        }
        e.cost = best;
        memo.emplace(key(a, b), e);
        return best;
    }

    void reconstruct(int a, int b, std::map<int, int>& start_of) {
        if (a > b) return;
        const Entry& e = memo.at(key(a, b));
        if (e.job_pos < 0) return;
        const UnidirJob& jj = uni.jobs[static_cast<std::size_t>(e.job_pos)];
        const int s = e.start;
        const int xe = s + jj.len - 1;
        start_of[jj.id] = s;
        // Every remaining job with a window inside the paid stretch exits here.
        for (const auto& j2 : uni.jobs) {
            if (start_of.count(j2.id)) continue;
            if (!in_interval(j2, a, b)) continue;
            for (int t = j2.first; t <= j2.latest_start(); ++t) {
                const int lo = std::max(t, a);
                const int hi = std::min(t + j2.len - 1, b);
                if (lo > hi || (lo >= s && hi <= xe)) {
                    start_of[j2.id] = t;
                    break;
                }
            }
        }
        reconstruct(a, std::min(b, s - 1), start_of);
        reconstruct(std::max(a, xe + 1), b, start_of);
    }
};

int union_size(const UnidirInstance& uni, const std::map<int, int>& start_of) {
    std::vector<char> used(static_cast<std::size_t>(uni.m) + 2, 0);
    for (const auto& j : uni.jobs) {
        const auto it = start_of.find(j.id);
        if (it == start_of.end()) throw model_error("internal: unassigned " + job_tag(j.id));
        for (int p = it->second; p < it->second + j.len; ++p)
            used[static_cast<std::size_t>(p)] = 1;
    }
    int total = 0;
    for (char u : used) total += u;
    return total;
}

// Maps window starts back to possessions of the original (pre-extraction) instance.
Solution windows_to_solution(const Instance& inst, const WindowAssignment& wa) {
    const auto fams = effective_families(inst);
    std::vector<int> choice(inst.jobs.size(), -1);
    for (std::size_t j = 0; j < inst.jobs.size(); ++j) {
        const auto it = wa.start_of.find(inst.jobs[j].id);
        if (it == wa.start_of.end())
            throw model_error("internal: no window for " + job_tag(inst.jobs[j].id));
        const int first = fams[j].possessions.front().front().index;
        choice[j] = it->second - first;
    }
    Solution sol = assemble_solution(inst, fams, choice);
    if (sol.objective != wa.objective)
        throw model_error("internal: path mapping changed the objective");
    return sol;
}

void expand_windows(const std::vector<UnidirRemoval>& removals, WindowAssignment& wa) {
    for (auto it = removals.rbegin(); it != removals.rend(); ++it) {
        const auto kit = wa.start_of.find(it->keeper_id);
        if (kit == wa.start_of.end())
            throw model_error("internal: keeper " + std::to_string(it->keeper_id) + " missing");
        wa.start_of[it->job_id] = std::max(it->job.first, kit->second);
    }
}

}  // namespace

WindowAssignment solve_unidir_windows(const UnidirInstance& uni, UnidirDpStats* stats) {
    WindowAssignment wa;
    if (uni.jobs.empty()) return wa;
    IntervalSolver solver(uni);
    const int value = solver.solve(1, uni.m);
    if (stats) stats->states = solver.memo.size();
    solver.reconstruct(1, uni.m, wa.start_of);
    wa.objective = union_size(uni, wa.start_of);
    if (wa.objective != value)
        throw model_error("internal: reconstruction (" + std::to_string(wa.objective) +
                          ") disagrees with value " + std::to_string(value));
    return wa;
}

Solution solve_unidir(const Instance& inst, UnidirDpStats* stats) {
    const UnidirInstance uni = extract_unidir(inst);
    std::vector<UnidirRemoval> removals;
    const UnidirInstance slim = normalize_unidir(uni, &removals);
    WindowAssignment wa = solve_unidir_windows(slim, stats);
    expand_windows(removals, wa);
    const int total = union_size(uni, wa.start_of);
    if (total != wa.objective)
        throw model_error("internal: re-adding implied jobs changed the objective");
    return windows_to_solution(inst, wa);
}

bool is_ordered(const UnidirInstance& uni) {
    std::vector<UnidirJob> jobs = uni.jobs;
    std::sort(jobs.begin(), jobs.end(), [](const UnidirJob& a, const UnidirJob& b) {
        if (a.first != b.first) return a.first < b.first;
        if (a.last != b.last) return a.last < b.last;
        return a.id < b.id;
    });
    for (std::size_t i = 1; i < jobs.size(); ++i)
        if (jobs[i].last < jobs[i - 1].last) return false;
    return true;
}

int OrderedDigraph::weight(int v, int w) const {
    const int a = alpha[static_cast<std::size_t>(v)];
    int beta = -1;
    for (int j = v; j < w; ++j) {
        const UnidirJob& job = sorted[static_cast<std::size_t>(j)];
        beta = std::max(beta, std::max(job.first, a) + job.len - 1);
    }
    return beta - a + 1;
}

OrderedDigraph build_ordered_digraph(const UnidirInstance& uni) {
    if (!is_ordered(uni))
        throw model_error("jobs cannot be ordered by release and deadline simultaneously");
    OrderedDigraph dg;
    dg.sorted = uni.jobs;
    std::sort(dg.sorted.begin(), dg.sorted.end(), [](const UnidirJob& a, const UnidirJob& b) {
        if (a.first != b.first) return a.first < b.first;
        if (a.last != b.last) return a.last < b.last;
        return a.id < b.id;
    });
    const std::size_t n = dg.sorted.size();
    dg.alpha.assign(n, 0);
    int run = 0;
    for (std::size_t v = n; v-- > 0;) {
        const int ls = dg.sorted[v].latest_start();
        run = (v + 1 == n) ? ls : std::min(run, ls);
        dg.alpha[v] = run;
    }
    return dg;
}

WindowAssignment solve_ordered_windows(const UnidirInstance& uni, OrderedStats* stats) {
    WindowAssignment wa;
    if (uni.jobs.empty()) return wa;
    const OrderedDigraph dg = build_ordered_digraph(uni);
    const int n = static_cast<int>(dg.sorted.size());
    const int inf = std::numeric_limits<int>::max() / 2;
    std::vector<int> dist(static_cast<std::size_t>(n) + 1, inf);
    std::vector<int> pred(static_cast<std::size_t>(n) + 1, -1);
    dist[0] = 0;
    std::size_t arcs = 0;
    for (int v = 0; v < n; ++v) {
        if (dist[static_cast<std::size_t>(v)] >= inf) continue;
        const int a = dg.alpha[static_cast<std::size_t>(v)];
        int beta = -1;
        for (int w = v + 1; w <= n; ++w) {
            const UnidirJob& job = dg.sorted[static_cast<std::size_t>(w - 1)];
            beta = std::max(beta, std::max(job.first, a) + job.len - 1);
            const int cand = dist[static_cast<std::size_t>(v)] + (beta - a + 1);
            ++arcs;
            if (cand < dist[static_cast<std::size_t>(w)]) {
                dist[static_cast<std::size_t>(w)] = cand;
                pred[static_cast<std::size_t>(w)] = v;
            }
        }
    }
    if (stats) {
        stats->nodes = static_cast<std::size_t>(n) + 1;
        stats->arcs = arcs;
    }
    // Walk the shortest path backwards, assigning each hop's jobs into its span.
    int w = n;
    while (w > 0) {
        const int v = pred[static_cast<std::size_t>(w)];
        if (v < 0) throw model_error("internal: missing predecessor");
        const int a = dg.alpha[static_cast<std::size_t>(v)];
        for (int j = v + 1; j <= w; ++j) {
            const UnidirJob& job = dg.sorted[static_cast<std::size_t>(j - 1)];
            wa.start_of[job.id] = std::max(job.first, a);
        }
        w = v;
    }
    wa.objective = union_size(uni, wa.start_of);
    // Hop spans are disjoint and fully used at an optimum, so the union of the
    // chosen windows must account for the whole distance.
    if (wa.objective != dist[static_cast<std::size_t>(n)])
        throw model_error("internal: span reconstruction (" + std::to_string(wa.objective) +
                          ") disagrees with distance " +
                          std::to_string(dist[static_cast<std::size_t>(n)]));
    return wa;
}

Solution solve_ordered(const Instance& inst, OrderedStats* stats) {
    const UnidirInstance uni = extract_unidir(inst);
    std::vector<UnidirRemoval> removals;
    const UnidirInstance slim = normalize_unidir(uni, &removals);
    WindowAssignment wa = solve_ordered_windows(slim, stats);
    expand_windows(removals, wa);
    const int total = union_size(uni, wa.start_of);
    if (total != wa.objective)
        throw model_error("internal: re-adding implied jobs changed the objective");
    return windows_to_solution(inst, wa);
}

}  // namespace corridor
