#include "corridor/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "corridor/digest.hpp"

namespace corridor {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Path names
// ---------------------------------------------------------------------------

std::string path_name(const PathId& p) {
    return (p.dir == Direction::Up ? "u" : "d") + std::to_string(p.index);
}

PathId parse_path_name(const std::string& name) {
    if (name.size() < 2 || (name[0] != 'u' && name[0] != 'd'))
        throw parse_error("bad path name: " + name);
    for (std::size_t i = 1; i < name.size(); ++i)
        if (name[i] < '0' || name[i] > '9') throw parse_error("bad path name: " + name);
    PathId p;
    p.dir = name[0] == 'u' ? Direction::Up : Direction::Down;
    try {
        p.index = std::stoi(name.substr(1));
    } catch (const std::exception&) {
        throw parse_error("bad path index: " + name);
    }
    if (p.index <= 0) throw parse_error("path index must be positive: " + name);
    return p;
}

// ---------------------------------------------------------------------------
// Path relations
// ---------------------------------------------------------------------------

bool paths_cross(const Timetable& tt, const PathId& a, const PathId& b) {
    if (a.dir == b.dir) return a.index == b.index;  // parallel lines
    const int ui = a.dir == Direction::Up ? a.index : b.index;
    const int di = a.dir == Direction::Up ? b.index : a.index;
    if (tt.mode == CrossingMode::Explicit)
        return -tt.w_down <= ui - di && ui - di <= tt.w_up;
    // The crossing point exists iff |i - k| * headway <= travel.
    const Rational gap = tt.headway * (ui >= di ? ui - di : di - ui);
    return gap <= tt.travel;
}

bool path_left_of(const Timetable& tt, const PathId& a, const PathId& b) {
    if (a.dir == b.dir) return a.index < b.index;
    const bool a_is_up = a.dir == Direction::Up;
    const int ui = a_is_up ? a.index : b.index;
    const int di = a_is_up ? b.index : a.index;
    if (tt.mode == CrossingMode::Explicit)
        return a_is_up ? (ui - di < -tt.w_down) : (ui - di > tt.w_up);
    // up i is left of down k iff it ends before k starts: i*H + T < k*H; mirrored
    // for down left of up.
    if (a_is_up) return tt.headway * ui + tt.travel < tt.headway * di;
    return tt.headway * di + tt.travel < tt.headway * ui;
}

bool in_left_half(const Timetable& tt, const PathId& anchor, const PathId& p) {
    if (anchor.index == 0) return true;  // null anchor: every path qualifies
    if (p.dir == anchor.dir) return p.index < anchor.index;
    return path_left_of(tt, p, anchor);
}

bool in_right_half(const Timetable& tt, const PathId& anchor, const PathId& p) {
    if (anchor.index == 0) return true;
    if (p.dir == anchor.dir) return p.index > anchor.index;
    return path_left_of(tt, anchor, p);
}

// ---------------------------------------------------------------------------
// Crossing windows and cancelled paths
// ---------------------------------------------------------------------------

std::pair<Rational, Rational> crossing_window(const Timetable& tt, const Job& job,
                                              const PathId& path) {
    if (tt.mode != CrossingMode::Geometric)
        throw model_error("crossing_window requires a geometric timetable");
    if (!job.has_geometry) throw model_error("job has no geometry");
    const Rational base = tt.headway * path.index;
    const Rational lo_frac = job.band_lo / tt.length;
    const Rational hi_frac = job.band_hi / tt.length;
    if (path.dir == Direction::Up)
        return {base + lo_frac * tt.travel, base + hi_frac * tt.travel};
    return {base + (1 - hi_frac) * tt.travel, base + (1 - lo_frac) * tt.travel};
}

namespace {

// Smallest and largest path index of direction `dir` whose crossing window can
// touch an occupation [s, s + p] for any s in [s0, s1]. Crossing windows shift by
// one headway per index, so everything outside this range is conflict-free.
std::pair<int, int> conflict_index_range(const Timetable& tt, const Job& job, Direction dir,
                                         const Rational& s0, const Rational& s1) {
    const Rational lo_frac = job.band_lo / tt.length;
    const Rational hi_frac = job.band_hi / tt.length;
    const Rational a = dir == Direction::Up ? Rational(lo_frac * tt.travel)
                                            : Rational((1 - hi_frac) * tt.travel);
    const Rational b = dir == Direction::Up ? Rational(hi_frac * tt.travel)
                                            : Rational((1 - lo_frac) * tt.travel);
    BigInt lo_i = rational_ceil((s0 - b) / tt.headway);
    BigInt hi_i = rational_floor((s1 + job.processing - a) / tt.headway);
    if (lo_i < 1) lo_i = 1;
    if (hi_i > tt.m) hi_i = tt.m;
    if (hi_i < lo_i) return {1, 0};
    return {lo_i.convert_to<int>(), hi_i.convert_to<int>()};
}

}  // namespace

Possession cancelled_paths(const Timetable& tt, const Job& job, const Rational& start) {
    if (start < job.release || start > job.deadline - job.processing)
        throw model_error("start outside the feasible window of job " + std::to_string(job.id));
    Possession out;
    const Rational end = start + job.processing;
    for (Direction dir : {Direction::Up, Direction::Down}) {
        if (!tt.uses(dir)) continue;
        const auto [ilo, ihi] = conflict_index_range(tt, job, dir, start, start);
        for (int i = ilo; i <= ihi; ++i) {
            const PathId p{dir, i};
            const auto [t1, t2] = crossing_window(tt, job, p);
            if (t1 <= end && t2 >= start) out.push_back(p);
        }
    }
    sort_canonical(out);
    return out;
}

PossessionFamily possession_family(const Timetable& tt, const Job& job) {
    const Rational lo = job.release;
    const Rational hi = job.deadline - job.processing;
    if (lo > hi) throw model_error("job " + std::to_string(job.id) + " has an empty start window");

    // Path {dir,i} is cancelled by the occupation [s, s+p] exactly for the starts s
    // in [t1 - p, t2] (its crossing window shifted by the processing time). The
    // cancelled set is therefore constant between breakpoints of these closed
    // intervals; a sweep over the breakpoints, recording the active set both at
    // each breakpoint and on each open gap, observes every achievable possession.
    struct StartInterval {
        PathId path;
        Rational from, to;
    };
    std::vector<StartInterval> ivs;
    std::set<Rational> breakpoints{lo, hi};
    for (Direction dir : {Direction::Up, Direction::Down}) {
        if (!tt.uses(dir)) continue;
        const auto [ilo, ihi] = conflict_index_range(tt, job, dir, lo, hi);
        for (int i = ilo; i <= ihi; ++i) {
            const auto [t1, t2] = crossing_window(tt, job, {dir, i});
            Rational from = t1 - job.processing;
            Rational to = t2;
            if (from > hi || to < lo) continue;
            if (from < lo) from = lo;
            if (to > hi) to = hi;
            ivs.push_back({{dir, i}, from, to});
            breakpoints.insert(from);
            breakpoints.insert(to);
        }
    }
    std::sort(ivs.begin(), ivs.end(), [](const StartInterval& x, const StartInterval& y) {
        return x.from < y.from;
    });

    PossessionFamily fam;
    fam.job_id = job.id;
    std::vector<std::pair<Possession, Rational>> seen;  // first witness per distinct set
    auto record = [&](const Possession& ps, const Rational& witness) {
        for (const auto& [q, w] : seen)
            if (q == ps) return;
        seen.emplace_back(ps, witness);
    };
    const std::vector<Rational> bp(breakpoints.begin(), breakpoints.end());
    std::vector<StartInterval> active;
    std::size_t next_iv = 0;
    for (std::size_t bi = 0; bi < bp.size(); ++bi) {
        const Rational& b = bp[bi];
        while (next_iv < ivs.size() && ivs[next_iv].from <= b) active.push_back(ivs[next_iv++]);
        active.erase(std::remove_if(active.begin(), active.end(),
                                    [&](const StartInterval& iv) { return iv.to < b; }),
                     active.end());
        Possession at_point;
        for (const StartInterval& iv : active) at_point.push_back(iv.path);
        sort_canonical(at_point);
        record(at_point, b);
        if (bi + 1 == bp.size()) break;
        Possession on_gap;
        for (const StartInterval& iv : active)
            if (iv.to > b) on_gap.push_back(iv.path);
        sort_canonical(on_gap);
        record(on_gap, (b + bp[bi + 1]) / 2);
    }
    // Keep only minimal sets. An achievable empty possession dominates everything.
    for (const auto& [cand, w] : seen) {
        bool minimal = true;
        for (const auto& [other, ow] : seen) {
            if (&other == &cand) continue;
            if (other != cand && is_subset(other, cand)) { minimal = false; break; }
        }
        if (minimal) {
            fam.possessions.push_back(cand);
            fam.witness_starts.push_back(w);
        }
    }
    // Chronological order by witness start (samples were already increasing, but the
    // minimality filter keeps the original first-seen order stable anyway).
    std::vector<std::size_t> order(fam.possessions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return fam.witness_starts[a] < fam.witness_starts[b];
    });
    PossessionFamily sorted;
    sorted.job_id = fam.job_id;
    for (std::size_t idx : order) {
        sorted.possessions.push_back(fam.possessions[idx]);
        sorted.witness_starts.push_back(fam.witness_starts[idx]);
    }
    return sorted;
}

PossessionFamily effective_family(const Instance& inst, const Job& job) {
    if (inst.is_abstract()) {
        for (const auto& fam : inst.given_families)
            if (fam.job_id == job.id) return fam;
        throw model_error("no family for job " + std::to_string(job.id));
    }
    return possession_family(inst.tt, job);
}

std::vector<PossessionFamily> effective_families(const Instance& inst) {
    std::vector<PossessionFamily> out;
    out.reserve(inst.jobs.size());
    for (const Job& j : inst.jobs) out.push_back(effective_family(inst, j));
    return out;
}

// ---------------------------------------------------------------------------
// Set helpers
// ---------------------------------------------------------------------------

bool is_subset(const Possession& a, const Possession& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end(),
                         [](const PathId& x, const PathId& y) { return canonical_less(x, y); });
}

Possession union_of(const std::vector<Possession>& sets) {
    Possession out;
    for (const auto& s : sets) out.insert(out.end(), s.begin(), s.end());
    sort_canonical(out);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Solution assemble_solution(const Instance& inst, const std::vector<PossessionFamily>& fams,
                           const std::vector<int>& choice_per_job) {
    if (fams.size() != inst.jobs.size() || choice_per_job.size() != inst.jobs.size())
        throw model_error("assemble_solution: size mismatch");
    Solution sol;
    std::vector<Possession> picked;
    for (std::size_t j = 0; j < inst.jobs.size(); ++j) {
        const auto& fam = fams[j];
        const int c = choice_per_job[j];
        if (c < 0 || static_cast<std::size_t>(c) >= fam.possessions.size())
            throw model_error("assemble_solution: choice out of range for job " +
                              std::to_string(inst.jobs[j].id));
        sol.chosen[inst.jobs[j].id] = fam.possessions[static_cast<std::size_t>(c)];
        picked.push_back(fam.possessions[static_cast<std::size_t>(c)]);
        if (fam.witness_starts.size() == fam.possessions.size() && !fam.witness_starts.empty())
            sol.starts[inst.jobs[j].id] = fam.witness_starts[static_cast<std::size_t>(c)];
    }
    sol.cancelled = union_of(picked);
    sol.objective = static_cast<int>(sol.cancelled.size());
    return sol;
}

// ---------------------------------------------------------------------------
// Instance reduction
// ---------------------------------------------------------------------------

namespace {

// Removes duplicates and non-minimal possessions, preserving chronological order.
void prune_family(PossessionFamily& fam) {
    const bool has_witness = fam.witness_starts.size() == fam.possessions.size();
    std::vector<Possession> kept;
    std::vector<Rational> kept_w;
    for (std::size_t i = 0; i < fam.possessions.size(); ++i) {
        const auto& cand = fam.possessions[i];
        bool drop = false;
        for (std::size_t j = 0; j < fam.possessions.size() && !drop; ++j) {
            if (i == j) continue;
            const auto& other = fam.possessions[j];
            if (other == cand) {
                drop = j < i;  // duplicate: keep the first occurrence
            } else if (is_subset(other, cand)) {
                drop = true;
            }
        }
        if (!drop) {
            kept.push_back(cand);
            if (has_witness) kept_w.push_back(fam.witness_starts[i]);
        }
    }
    fam.possessions = std::move(kept);
    fam.witness_starts = std::move(kept_w);
}

// True when every possession of `outer` contains some possession of `inner` (then
// `inner` is satisfied for free by any choice of `outer`).
bool dominates(const PossessionFamily& outer, const PossessionFamily& inner) {
    for (const auto& r : outer.possessions) {
        bool covered = false;
        for (const auto& rp : inner.possessions)
            if (is_subset(rp, r)) { covered = true; break; }
        if (!covered) return false;
    }
    return true;
}

}  // namespace

ReducedInstance reduce_instance(const Instance& inst) {
    ReducedInstance out;
    out.instance.tt = inst.tt;

    std::vector<PossessionFamily> fams = effective_families(inst);
    for (auto& f : fams) prune_family(f);

    // Drop jobs that can run without cancelling anything.
    std::vector<Job> jobs;
    std::vector<PossessionFamily> kept;
    for (std::size_t i = 0; i < inst.jobs.size(); ++i) {
        const bool free_run = fams[i].possessions.size() == 1 && fams[i].possessions[0].empty();
        if (free_run) {
            RemovalRecord rec;
            rec.job_id = inst.jobs[i].id;
            rec.reason = RemovalReason::EmptyPossession;
            rec.family = fams[i];
            out.removed.push_back(std::move(rec));
        } else {
            jobs.push_back(inst.jobs[i]);
            kept.push_back(fams[i]);
        }
    }

    // Pairwise domination, processed by descending id so that mutually dominating
    // (e.g. identical) jobs keep the smaller id.
    std::vector<std::size_t> order(jobs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return jobs[a].id > jobs[b].id; });
    std::vector<bool> removed(jobs.size(), false);
    for (std::size_t idx : order) {
        int keeper = 0;
        for (std::size_t other = 0; other < jobs.size(); ++other) {
            if (other == idx || removed[other]) continue;
            if (dominates(kept[other], kept[idx])) {
                if (keeper == 0 || jobs[other].id < keeper) keeper = jobs[other].id;
            }
        }
        if (keeper != 0) {
            removed[idx] = true;
            RemovalRecord rec;
            rec.job_id = jobs[idx].id;
            rec.reason = RemovalReason::Dominated;
            rec.keeper_id = keeper;
            rec.family = kept[idx];
            out.removed.push_back(std::move(rec));
        }
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (removed[i]) continue;
        out.instance.jobs.push_back(jobs[i]);
        out.instance.given_families.push_back(kept[i]);
    }
    return out;
}

Solution expand_solution(const ReducedInstance& red, Solution sol) {
    for (auto it = red.removed.rbegin(); it != red.removed.rend(); ++it) {
        const RemovalRecord& rec = *it;
        if (rec.reason == RemovalReason::EmptyPossession) {
            sol.chosen[rec.job_id] = {};
            if (!rec.family.witness_starts.empty())
                sol.starts[rec.job_id] = rec.family.witness_starts[0];
            continue;
        }
        const auto keeper_it = sol.chosen.find(rec.keeper_id);
        if (keeper_it == sol.chosen.end())
            throw model_error("keeper " + std::to_string(rec.keeper_id) + " missing from solution");
        bool assigned = false;
        for (std::size_t i = 0; i < rec.family.possessions.size(); ++i) {
            if (is_subset(rec.family.possessions[i], keeper_it->second)) {
                sol.chosen[rec.job_id] = rec.family.possessions[i];
                if (i < rec.family.witness_starts.size())
                    sol.starts[rec.job_id] = rec.family.witness_starts[i];
                assigned = true;
                break;
            }
        }
        if (!assigned)
            throw model_error("domination record for job " + std::to_string(rec.job_id) +
                              " is inconsistent with the keeper's choice");
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Adjacency and spans
// ---------------------------------------------------------------------------

bool are_adjacent(const Timetable& tt, const PathId& a, const PathId& b) {
    if (a == b) return false;
    if (a.dir == b.dir) {
        const int diff = a.index - b.index;
        return diff == 1 || diff == -1;
    }
    if (tt.mode == CrossingMode::Explicit) return paths_cross(tt, a, b);
    // A horizontal segment meeting exactly the two paths exists iff the signed
    // horizontal gap, which sweeps (k-i)*headway +/- travel over the corridor, comes
    // strictly within one headway of zero.
    const int ui = a.dir == Direction::Up ? a.index : b.index;
    const int di = a.dir == Direction::Up ? b.index : a.index;
    const Rational gap = tt.headway * (ui >= di ? ui - di : di - ui);
    return gap < tt.headway + tt.travel;
}

namespace {

struct SpanEnumerator {
    const std::vector<PathId>& verts;
    const std::vector<std::vector<int>>& adj;  // neighbour indices, ascending
    int max_size;
    std::size_t budget;
    std::vector<Span>* out;

    void emit(const std::vector<int>& members) {
        if (out->size() >= budget)
            throw resource_error("span enumeration exceeds budget of " + std::to_string(budget));
        Span s;
        s.reserve(members.size());
        for (int v : members) s.push_back(verts[v]);
        sort_canonical(s);
        out->push_back(std::move(s));
    }

    // Enumerates every connected superset of `members` (all >= root) exactly once:
    // after a candidate has been explored it is banned from the remaining branches.
    void grow(std::vector<int>& members, std::vector<int> frontier, std::vector<bool>& banned,
              std::vector<bool>& in_set, int root) {
        emit(members);
        if (static_cast<int>(members.size()) == max_size) return;
        std::vector<int> local_bans;
        for (std::size_t fi = 0; fi < frontier.size(); ++fi) {
            const int v = frontier[fi];
            if (banned[v] || in_set[v]) continue;
            members.push_back(v);
            in_set[v] = true;
            std::vector<int> next = frontier;
            for (int w : adj[v])
                if (w > root && !in_set[w] && !banned[w]) next.push_back(w);
            grow(members, std::move(next), banned, in_set, root);
            in_set[v] = false;
            members.pop_back();
            banned[v] = true;
            local_bans.push_back(v);
        }
        for (int v : local_bans) banned[v] = false;
    }
};

}  // namespace

std::vector<Span> enumerate_spans(const Timetable& tt, const std::vector<PathId>& vertices,
                                  int max_size, std::size_t budget) {
    std::vector<PathId> verts = vertices;
    sort_canonical(verts);
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    const int n = static_cast<int>(verts.size());
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && are_adjacent(tt, verts[i], verts[j])) adj[i].push_back(j);

    std::vector<Span> out;
    SpanEnumerator en{verts, adj, max_size, budget, &out};
    std::vector<bool> banned(n, false), in_set(n, false);
    for (int root = 0; root < n; ++root) {
        std::vector<int> members{root};
        std::vector<int> frontier;
        for (int w : adj[root])
            if (w > root) frontier.push_back(w);
        in_set[root] = true;
        en.grow(members, std::move(frontier), banned, in_set, root);
        in_set[root] = false;
    }
    std::sort(out.begin(), out.end(), [](const Span& a, const Span& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                            [](const PathId& x, const PathId& y) { return canonical_less(x, y); });
    });
    return out;
}

std::vector<Span> enumerate_spans(const Timetable& tt, int max_size, std::size_t budget) {
    std::vector<PathId> verts;
    for (Direction dir : {Direction::Up, Direction::Down}) {
        if (!tt.uses(dir)) continue;
        for (int i = 1; i <= tt.m; ++i) verts.push_back({dir, i});
    }
    return enumerate_spans(tt, verts, max_size, budget);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

Rational rational_from_json(const json& v, const std::string& what) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    throw parse_error("expected rational (string or integer) for " + what);
}

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw parse_error("unknown key '" + it.key() + "' in " + where);
    }
}

}  // namespace

namespace {
Instance parse_instance_impl(const json& doc);
}

Instance parse_instance(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const std::exception& e) {
        throw parse_error(std::string("invalid JSON: ") + e.what());
    }
    try {
        return parse_instance_impl(doc);
    } catch (const json::exception& e) {
        throw parse_error(std::string("malformed instance: ") + e.what());
    }
}

namespace {
Instance parse_instance_impl(const json& doc) {
    if (!doc.is_object()) throw parse_error("instance must be a JSON object");
    require_keys(doc, {"timetable", "jobs", "families"}, "instance");
    if (!doc.contains("timetable") || !doc.contains("jobs"))
        throw parse_error("instance requires 'timetable' and 'jobs'");

    Instance inst;
    const json& tj = doc["timetable"];
    if (!tj.is_object()) throw parse_error("'timetable' must be an object");
    require_keys(tj, {"L", "delta_headway", "delta_travel", "m", "mode", "crossing_window", "directions"},
                 "timetable");
    Timetable& tt = inst.tt;
    tt.mode = CrossingMode::Geometric;
    if (tj.contains("mode")) {
        const std::string mode = tj["mode"].get<std::string>();
        if (mode == "geometric") tt.mode = CrossingMode::Geometric;
        else if (mode == "explicit") tt.mode = CrossingMode::Explicit;
        else throw parse_error("unknown timetable mode: " + mode);
    }
    tt.length = tj.contains("L") ? rational_from_json(tj["L"], "L") : Rational(1);
    tt.headway = tj.contains("delta_headway") ? rational_from_json(tj["delta_headway"], "delta_headway")
                                              : Rational(1);
    tt.travel = tj.contains("delta_travel") ? rational_from_json(tj["delta_travel"], "delta_travel")
                                            : Rational(1);
    if (!tj.contains("m") || !tj["m"].is_number_integer())
        throw parse_error("timetable requires integer 'm'");
    tt.m = tj["m"].get<int>();
    if (tt.m < 0) throw parse_error("'m' must be nonnegative");
    if (tt.length <= 0 || tt.headway <= 0 || tt.travel <= 0)
        throw parse_error("timetable lengths must be positive");
    if (tt.mode == CrossingMode::Explicit) {
        if (!tj.contains("crossing_window") || !tj["crossing_window"].is_array() ||
            tj["crossing_window"].size() != 2)
            throw parse_error("explicit mode requires 'crossing_window': [w_down, w_up]");
        tt.w_down = tj["crossing_window"][0].get<int>();
        tt.w_up = tj["crossing_window"][1].get<int>();
        if (tt.w_down < 0 || tt.w_up < 0) throw parse_error("crossing window must be nonnegative");
    } else if (tj.contains("crossing_window")) {
        throw parse_error("'crossing_window' is only valid in explicit mode");
    }
    if (tj.contains("directions")) {
        const std::string d = tj["directions"].get<std::string>();
        if (d == "up") tt.directions = DirectionsUsed::Up;
        else if (d == "down") tt.directions = DirectionsUsed::Down;
        else if (d == "both") tt.directions = DirectionsUsed::Both;
        else throw parse_error("unknown directions value: " + d);
    }

    if (!doc["jobs"].is_array()) throw parse_error("'jobs' must be an array");
    std::set<int> ids;
    for (const json& jj : doc["jobs"]) {
        if (!jj.is_object()) throw parse_error("job entries must be objects");
        require_keys(jj, {"id", "r", "d", "p", "ls", "le"}, "job");
        if (!jj.contains("id") || !jj["id"].is_number_integer())
            throw parse_error("every job requires an integer 'id'");
        Job job;
        job.id = jj["id"].get<int>();
        if (job.id <= 0) throw parse_error("job ids must be positive");
        if (!ids.insert(job.id).second)
            throw parse_error("duplicate job id " + std::to_string(job.id));
        const bool any_geom = jj.contains("r") || jj.contains("d") || jj.contains("p") ||
                              jj.contains("ls") || jj.contains("le");
        const bool all_geom = jj.contains("r") && jj.contains("d") && jj.contains("p") &&
                              jj.contains("ls") && jj.contains("le");
        if (any_geom && !all_geom)
            throw parse_error("job " + std::to_string(job.id) + " has partial geometry");
        job.has_geometry = all_geom;
        if (all_geom) {
            job.release = rational_from_json(jj["r"], "r");
            job.deadline = rational_from_json(jj["d"], "d");
            job.processing = rational_from_json(jj["p"], "p");
            job.band_lo = rational_from_json(jj["ls"], "ls");
            job.band_hi = rational_from_json(jj["le"], "le");
            if (job.processing < 0) throw parse_error("processing time must be nonnegative");
            if (job.band_lo < 0 || job.band_hi > tt.length || job.band_lo > job.band_hi)
                throw parse_error("band of job " + std::to_string(job.id) +
                                  " must satisfy 0 <= ls <= le <= L");
        }
        inst.jobs.push_back(std::move(job));
    }

    if (doc.contains("families")) {
        if (!doc["families"].is_array()) throw parse_error("'families' must be an array");
        std::set<int> fam_ids;
        for (const json& fj : doc["families"]) {
            require_keys(fj, {"job", "possessions"}, "family");
            if (!fj.contains("job") || !fj.contains("possessions"))
                throw parse_error("family requires 'job' and 'possessions'");
            PossessionFamily fam;
            fam.job_id = fj["job"].get<int>();
            if (!ids.count(fam.job_id))
                throw parse_error("family for unknown job " + std::to_string(fam.job_id));
            if (!fam_ids.insert(fam.job_id).second)
                throw parse_error("duplicate family for job " + std::to_string(fam.job_id));
            for (const json& pj : fj["possessions"]) {
                if (!pj.is_array()) throw parse_error("possessions must be arrays of path names");
                Possession ps;
                for (const json& name : pj) {
                    PathId p = parse_path_name(name.get<std::string>());
                    if (p.index > tt.m)
                        throw parse_error("path index out of range: " + path_name(p));
                    if (!tt.uses(p.dir))
                        throw parse_error("path direction not used by this timetable: " + path_name(p));
                    ps.push_back(p);
                }
                sort_canonical(ps);
                ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
                fam.possessions.push_back(std::move(ps));
            }
            if (fam.possessions.empty())
                throw parse_error("family of job " + std::to_string(fam.job_id) + " is empty");
            inst.given_families.push_back(std::move(fam));
        }
        for (int id : ids)
            if (!fam_ids.count(id))
                throw parse_error("abstract instance lacks a family for job " + std::to_string(id));
        std::sort(inst.given_families.begin(), inst.given_families.end(),
                  [](const PossessionFamily& a, const PossessionFamily& b) { return a.job_id < b.job_id; });
    } else {
        for (const Job& j : inst.jobs)
            if (!j.has_geometry)
                throw parse_error("job " + std::to_string(j.id) +
                                  " lacks geometry and the instance has no families");
    }
    std::sort(inst.jobs.begin(), inst.jobs.end(), [](const Job& a, const Job& b) { return a.id < b.id; });
    return inst;
}
}  // namespace

std::string emit_instance(const Instance& inst) {
    json doc = json::object();
    json tj = json::object();
    const Timetable& tt = inst.tt;
    tj["L"] = format_rational(tt.length);
    tj["delta_headway"] = format_rational(tt.headway);
    tj["delta_travel"] = format_rational(tt.travel);
    tj["m"] = tt.m;
    tj["mode"] = tt.mode == CrossingMode::Geometric ? "geometric" : "explicit";
    if (tt.mode == CrossingMode::Explicit) tj["crossing_window"] = json::array({tt.w_down, tt.w_up});
    if (tt.directions != DirectionsUsed::Both)
        tj["directions"] = tt.directions == DirectionsUsed::Up ? "up" : "down";
    doc["timetable"] = std::move(tj);

    json jobs = json::array();
    for (const Job& j : inst.jobs) {
        json jj = json::object();
        jj["id"] = j.id;
        if (j.has_geometry) {
            jj["r"] = format_rational(j.release);
            jj["d"] = format_rational(j.deadline);
            jj["p"] = format_rational(j.processing);
            jj["ls"] = format_rational(j.band_lo);
            jj["le"] = format_rational(j.band_hi);
        }
        jobs.push_back(std::move(jj));
    }
    doc["jobs"] = std::move(jobs);

    if (inst.is_abstract()) {
        json fams = json::array();
        for (const auto& fam : inst.given_families) {
            json fj = json::object();
            fj["job"] = fam.job_id;
            json plist = json::array();
            for (const auto& ps : fam.possessions) {
                json pj = json::array();
                for (const PathId& p : ps) pj.push_back(path_name(p));
                plist.push_back(std::move(pj));
            }
            fj["possessions"] = std::move(plist);
            fams.push_back(std::move(fj));
        }
        doc["families"] = std::move(fams);
    }
    return doc.dump();
}

std::string instance_digest(const Instance& inst) { return fnv1a64_hex(emit_instance(inst)); }

std::string emit_solution(const Solution& sol) {
    json doc = json::object();
    doc["objective"] = sol.objective;
    json cancelled = json::array();
    for (const PathId& p : sol.cancelled) cancelled.push_back(path_name(p));
    doc["cancelled"] = std::move(cancelled);
    json chosen = json::object();
    for (const auto& [id, ps] : sol.chosen) {
        json pj = json::array();
        for (const PathId& p : ps) pj.push_back(path_name(p));
        chosen[std::to_string(id)] = std::move(pj);
    }
    doc["chosen"] = std::move(chosen);
    if (!sol.starts.empty()) {
        json starts = json::object();
        for (const auto& [id, s] : sol.starts) starts[std::to_string(id)] = format_rational(s);
        doc["starts"] = std::move(starts);
    }
    return doc.dump();
}

Solution parse_solution(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const std::exception& e) {
        throw parse_error(std::string("invalid JSON: ") + e.what());
    }
    try {
        require_keys(doc, {"objective", "cancelled", "chosen", "starts"}, "solution");
        Solution sol;
        sol.objective = doc.at("objective").get<int>();
        for (const json& name : doc.at("cancelled"))
            sol.cancelled.push_back(parse_path_name(name.get<std::string>()));
        if (doc.contains("chosen")) {
            for (auto it = doc["chosen"].begin(); it != doc["chosen"].end(); ++it) {
                Possession ps;
                for (const json& name : it.value()) ps.push_back(parse_path_name(name.get<std::string>()));
                sol.chosen[std::stoi(it.key())] = std::move(ps);
            }
        }
        if (doc.contains("starts")) {
            for (auto it = doc["starts"].begin(); it != doc["starts"].end(); ++it)
                sol.starts[std::stoi(it.key())] = rational_from_json(it.value(), "start");
        }
        return sol;
    } catch (const json::exception& e) {
        throw parse_error(std::string("malformed solution: ") + e.what());
    }
}

}  // namespace corridor
