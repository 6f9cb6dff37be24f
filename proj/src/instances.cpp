#include "corridor/instances.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

#include "corridor/errors.hpp"
#include "corridor/rng.hpp"

namespace corridor {

namespace {

using nlohmann::json;

constexpr int kPalette[] = {1, 2, 3, 5, 7, 11};

struct WindowJob {
    int first = 1;
    int last = 1;
    int len = 1;
};

std::vector<WindowJob> draw_window_jobs(const GenSpec& spec, int* m_out) {
    if (spec.n < 1) throw model_error("generator needs at least one job");
    if (spec.length_classes < 1 || spec.length_classes > 6)
        throw model_error("length_classes must be between 1 and 6");
    Rng rng(spec.seed);

    std::vector<int> pool(std::begin(kPalette), std::end(kPalette));
    std::vector<int> chosen;
    for (int c = 0; c < spec.length_classes; ++c) {
        const std::size_t i = static_cast<std::size_t>(rng.below(pool.size()));
        chosen.push_back(pool[i]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
    }
    int sum = 0;
    int longest = 0;
    for (int v : chosen) {
        sum += v;
        longest = std::max(longest, v);
    }
    int m = rational_ceil(Rational(spec.n * sum, 2 * static_cast<int>(chosen.size())))
                .convert_to<int>();
    m = std::max(m, longest);

    std::vector<WindowJob> jobs;
    for (int j = 0; j < spec.n; ++j) {
        WindowJob wj;
        wj.len = chosen[static_cast<std::size_t>(rng.below(chosen.size()))];
        do {
            wj.first = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
            wj.last = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
        } while (wj.first > wj.last || wj.last - wj.first + 1 < wj.len);
        jobs.push_back(wj);
    }
    *m_out = m;
    return jobs;
}

Instance windows_to_instance(const std::vector<WindowJob>& jobs, int m) {
    // Families are written out one window at a time, so the memory bill is the
    // sum of window count times window length. Refuse absurd requests up front
    // instead of letting the allocator die half way through.
    std::size_t cells = 0;
    for (const WindowJob& wj : jobs)
        cells += static_cast<std::size_t>(wj.last - wj.first + 2) *
                 static_cast<std::size_t>(wj.len);
    if (cells > 50'000'000)
        throw resource_error("generated families would hold " + std::to_string(cells) +
                             " path entries; reduce the job count");
    Instance inst;
    inst.tt.length = 1;
    inst.tt.headway = 1;
    inst.tt.travel = 1;
    inst.tt.m = m;
    inst.tt.mode = CrossingMode::Geometric;
    inst.tt.directions = DirectionsUsed::Up;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        Job job;
        job.id = static_cast<int>(j) + 1;
        job.has_geometry = false;
        inst.jobs.push_back(job);

        PossessionFamily fam;
        fam.job_id = job.id;
        for (int s = jobs[j].first; s + jobs[j].len - 1 <= jobs[j].last; ++s) {
            Possession ps;
            for (int t = s; t < s + jobs[j].len; ++t) ps.push_back({Direction::Up, t});
            fam.possessions.push_back(std::move(ps));
        }
        inst.given_families.push_back(std::move(fam));
    }
    return inst;
}

}  // namespace

Instance generate(const GenSpec& spec) {
    int m = 0;
    const auto jobs = draw_window_jobs(spec, &m);
    return windows_to_instance(jobs, m);
}

Instance generate_ordered(const GenSpec& spec) {
    int m = 0;
    auto jobs = draw_window_jobs(spec, &m);
    std::sort(jobs.begin(), jobs.end(), [](const WindowJob& a, const WindowJob& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.last < b.last;
    });
    for (std::size_t j = 1; j < jobs.size(); ++j)
        jobs[j].last = std::max(jobs[j].last, jobs[j - 1].last);
    return windows_to_instance(jobs, m);
}

Instance generate_runs(const RunsGenSpec& spec) {
    if (spec.n < 1) throw model_error("generator needs at least one job");
    if (spec.ratio < 1) throw model_error("travel/headway ratio must be at least 1");
    Rng rng(spec.seed);

    const int ratio = spec.ratio;
    const int m = std::max(2 * spec.n, 2 * ratio + 8);

    Instance inst;
    inst.tt.length = 1;
    inst.tt.headway = 1;
    inst.tt.travel = ratio;
    inst.tt.m = m;
    inst.tt.mode = CrossingMode::Geometric;
    inst.tt.directions = DirectionsUsed::Both;

    for (int j = 0; j < spec.n; ++j) {
        // Band point chosen so path crossings alternate directions exactly half a
        // headway apart: the up fraction of a crossing instant is always 1/4.
        const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(ratio)));
        const Rational x(4 * t + 1, 4 * ratio);
        const int c0 = static_cast<int>(rng.range(ratio + 1, m - ratio - 2));
        const Rational r = c0 + Rational(static_cast<int>(rng.below(8)), 8);
        const int span = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(ratio)));

        Job job;
        job.id = j + 1;
        job.release = r;
        job.deadline = r + span;
        job.processing = Rational(1, 2);
        job.band_lo = x;
        job.band_hi = x;
        inst.jobs.push_back(job);
    }
    return inst;
}

Instance generate_geometric(const GeoGenSpec& spec) {
    if (spec.n < 1) throw model_error("generator needs at least one job");
    if (spec.m < 1) throw model_error("generator needs at least one path per direction");
    Rng rng(spec.seed);

    Instance inst;
    inst.tt.length = 1;
    inst.tt.headway = 1;
    inst.tt.travel = Rational(1 + static_cast<int>(rng.below(5)), 2);  // 1/2 .. 5/2
    inst.tt.m = spec.m;
    inst.tt.mode = CrossingMode::Geometric;
    inst.tt.directions = DirectionsUsed::Both;

    for (int j = 0; j < spec.n; ++j) {
        const Rational lo(static_cast<int>(rng.below(8)), 8);
        const Rational hi = std::min(lo + Rational(1 + static_cast<int>(rng.below(3)), 8),
                                     Rational(1));
        const Rational r(static_cast<int>(rng.below(static_cast<std::uint64_t>(8 * spec.m))), 8);
        const Rational dur(1 + static_cast<int>(rng.below(16)), 8);  // 1/8 .. 2
        Rational p(1 + static_cast<int>(rng.below(8)), 8);
        if (p > dur) p = dur;

        Job job;
        job.id = j + 1;
        job.release = r;
        job.deadline = r + dur;
        job.processing = p;
        job.band_lo = lo;
        job.band_hi = hi;
        inst.jobs.push_back(job);
    }
    return inst;
}

// ---------------------------------------------------------------------------
// Pair-hitting instances
// ---------------------------------------------------------------------------

HhpInstance parse_hhp(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("bad JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("A") || !doc.contains("B"))
        throw parse_error("pair-hitting instance requires 'A' and 'B' arrays");
    HhpInstance h;
    for (const json& v : doc["A"]) {
        if (!v.is_number_integer()) throw parse_error("'A' must hold integers");
        h.A.push_back(v.get<int>());
    }
    for (const json& v : doc["B"]) {
        if (!v.is_number_integer()) throw parse_error("'B' must hold integers");
        h.B.push_back(v.get<int>());
    }
    if (h.A.size() != h.B.size()) throw parse_error("'A' and 'B' must have equal length");
    if (h.A.empty()) throw parse_error("pair-hitting instance is empty");
    for (std::size_t j = 0; j < h.A.size(); ++j)
        if (h.A[j] < 1 || h.B[j] < 1) throw parse_error("values must be positive");
    return h;
}

std::string emit_hhp(const HhpInstance& h) {
    json doc = json::object();
    doc["A"] = h.A;
    doc["B"] = h.B;
    return doc.dump();
}

Instance hhp_to_msp(const HhpInstance& h) {
    if (h.A.size() != h.B.size() || h.A.empty())
        throw model_error("pair-hitting instance must have equal nonempty value lists");
    int spread = 0;
    int top = 0;
    for (std::size_t j = 0; j < h.A.size(); ++j) {
        if (h.A[j] < 1 || h.B[j] < 1) throw model_error("values must be positive");
        spread = std::max(spread, std::abs(h.A[j] - h.B[j]));
        top = std::max({top, h.A[j], h.B[j]});
    }
    const int L = 2 + spread;
    const int m = 1 + top;

    Instance inst;
    inst.tt.length = L;
    inst.tt.headway = 1;
    inst.tt.travel = L;
    inst.tt.m = m;
    inst.tt.mode = CrossingMode::Geometric;
    inst.tt.directions = DirectionsUsed::Both;

    for (std::size_t j = 0; j < h.A.size(); ++j) {
        const int a = h.A[j];
        const int b = h.B[j];
        const Rational T = Rational(L + a + b, 2);
        Job job;
        job.id = static_cast<int>(j) + 1;
        job.release = T - Rational(1, 2);
        job.deadline = T + 1;
        job.processing = Rational(3, 5);
        job.band_lo = Rational(2 * (L - a + b) - 1, 4);  // (L - a + b)/2 - 1/4
        job.band_hi = job.band_lo;
        inst.jobs.push_back(job);
    }

    // The construction stands or falls with this: each family must be exactly the
    // three single-path alternatives.
    for (std::size_t j = 0; j < h.A.size(); ++j) {
        const PossessionFamily fam = possession_family(inst.tt, inst.jobs[j]);
        std::vector<Possession> got = fam.possessions;
        std::sort(got.begin(), got.end(), [](const Possession& a, const Possession& b) {
            return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                                canonical_less);
        });
        const std::vector<Possession> want = {
            {{Direction::Up, h.A[j]}},
            {{Direction::Up, h.A[j] + 1}},
            {{Direction::Down, h.B[j]}},
        };
        if (got != want)
            throw model_error("internal: embedded family of job " +
                              std::to_string(inst.jobs[j].id) +
                              " is not the three expected alternatives");
    }
    return inst;
}

int brute_force_hhp(const HhpInstance& h) {
    const std::size_t n = h.A.size();
    if (n != h.B.size() || n == 0) throw model_error("bad pair-hitting instance");
    if (n > 8) throw resource_error("pair-hitting brute force handles at most 8 jobs");
    for (std::size_t j = 0; j < n; ++j)
        if (h.A[j] > 12 || h.B[j] > 12 || h.A[j] < 1 || h.B[j] < 1)
            throw resource_error("pair-hitting brute force handles values 1..12 only");

    std::vector<int> xcand;
    for (std::size_t j = 0; j < n; ++j) {
        xcand.push_back(h.A[j]);
        xcand.push_back(h.A[j] + 1);
    }
    std::sort(xcand.begin(), xcand.end());
    xcand.erase(std::unique(xcand.begin(), xcand.end()), xcand.end());

    const std::size_t u = xcand.size();
    int best = static_cast<int>(n) + 1;  // taking every b_j is always feasible
    {
        std::set<int> all_b(h.B.begin(), h.B.end());
        best = static_cast<int>(all_b.size());
    }
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << u); ++mask) {
        int xcost = 0;
        for (std::uint64_t v = mask; v; v &= v - 1) ++xcost;
        std::set<int> y;
        for (std::size_t j = 0; j < n; ++j) {
            bool hit = false;
            for (std::size_t i = 0; i < u && !hit; ++i)
                if ((mask >> i) & 1)
                    if (xcand[i] == h.A[j] || xcand[i] == h.A[j] + 1) hit = true;
            if (!hit) y.insert(h.B[j]);
        }
        best = std::min(best, xcost + static_cast<int>(y.size()));
    }
    return best;
}

HhpInstance random_hhp(int n, int max_value, std::uint64_t seed) {
    if (n < 1 || max_value < 1) throw model_error("bad pair-hitting generator parameters");
    Rng rng(seed);
    HhpInstance h;
    for (int j = 0; j < n; ++j) {
        h.A.push_back(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_value))));
        h.B.push_back(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_value))));
    }
    return h;
}

}  // namespace corridor
