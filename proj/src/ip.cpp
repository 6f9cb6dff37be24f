#include "corridor/ip.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <cstdio>
#include <cstdlib>

#include "corridor/errors.hpp"
#include "corridor/unidir.hpp"

namespace corridor {

namespace {

bool possession_less(const Possession& a, const Possession& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        canonical_less);
}

std::string join_names(const Possession& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += "_";
        s += path_name(p[i]);
    }
    return s;
}

std::vector<PathId> family_paths(const std::vector<PossessionFamily>& fams) {
    std::vector<PathId> all;
    for (const auto& fam : fams)
        for (const auto& pos : fam.possessions)
            for (const auto& p : pos) all.push_back(p);
    sort_canonical(all);
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

// Window starts allowed per job under the restricted start rule: the job's own
// release plus every job's latest start that is feasible for it.
std::vector<std::set<int>> restricted_starts(const UnidirInstance& uni) {
    std::vector<int> latest;
    for (const auto& j : uni.jobs) latest.push_back(j.latest_start());
    std::vector<std::set<int>> allowed(uni.jobs.size());
    for (std::size_t j = 0; j < uni.jobs.size(); ++j) {
        allowed[j].insert(uni.jobs[j].first);
        for (int s : latest)
            if (s >= uni.jobs[j].first && s <= uni.jobs[j].latest_start()) allowed[j].insert(s);
    }
    return allowed;
}

}  // namespace

IpModel build_pim(const Instance& inst, bool restrict_starts) {
    const auto fams = effective_families(inst);
    IpModel model;
    model.form = "path-possession";

    const std::vector<PathId> paths = family_paths(fams);
    std::map<Possession, int, bool (*)(const Possession&, const Possession&)> pos_var(
        possession_less);
    std::vector<int> path_var;
    for (const PathId& p : paths) {
        IpVar v;
        v.name = "y_" + path_name(p);
        v.cost = 1;
        v.kind = VarKind::PathUse;
        v.span = {p};
        path_var.push_back(static_cast<int>(model.vars.size()));
        model.vars.push_back(std::move(v));
    }
    auto path_index = [&](const PathId& p) {
        auto it = std::lower_bound(paths.begin(), paths.end(), p, canonical_less);
        return path_var[static_cast<std::size_t>(it - paths.begin())];
    };

    std::vector<std::set<int>> allowed;
    if (restrict_starts) allowed = restricted_starts(extract_unidir(inst));

    // Pick variables, shared between jobs with identical possessions.
    std::vector<std::vector<int>> covers(fams.size());
    for (std::size_t j = 0; j < fams.size(); ++j) {
        for (const auto& pos : fams[j].possessions) {
            if (restrict_starts) {
                const int start = pos.front().index;
                if (!allowed[j].count(start)) continue;
            }
            Possession key = pos;
            sort_canonical(key);
            auto it = pos_var.find(key);
            int idx;
            if (it == pos_var.end()) {
                IpVar v;
                v.name = key.empty() ? "x_none" : "x_" + join_names(key);
                v.cost = 0;
                v.kind = VarKind::PossessionPick;
                v.span = key;
                idx = static_cast<int>(model.vars.size());
                model.vars.push_back(std::move(v));
                pos_var.emplace(std::move(key), idx);
            } else {
                idx = it->second;
            }
            covers[j].push_back(idx);
        }
        if (covers[j].empty())
            throw model_error("job " + std::to_string(inst.jobs[j].id) +
                              " lost every possession under the start restriction");
    }

    for (std::size_t j = 0; j < fams.size(); ++j) {
        LpRow row;
        for (int idx : covers[j]) row.terms.push_back({idx, Rational(1)});
        row.sense = RowSense::Ge;
        row.rhs = 1;
        model.rows.push_back(std::move(row));
        model.row_names.push_back("cover_" + std::to_string(inst.jobs[j].id));
    }
    for (std::size_t k = 0; k < model.vars.size(); ++k) {
        if (model.vars[k].kind != VarKind::PossessionPick) continue;
        for (const PathId& p : model.vars[k].span) {
            LpRow row;
            row.terms.push_back({path_index(p), Rational(1)});
            row.terms.push_back({static_cast<int>(k), Rational(-1)});
            row.sense = RowSense::Ge;
            row.rhs = 0;
            model.rows.push_back(std::move(row));
            model.row_names.push_back("link_" + model.vars[k].name + "_" + path_name(p));
        }
    }
    return model;
}

IpModel build_scm(const Instance& inst, std::size_t span_budget) {
    const auto fams = effective_families(inst);
    IpModel model;
    model.form = "span-cover";

    const std::vector<PathId> paths = family_paths(fams);
    bool all_single = true;
    for (const auto& fam : fams)
        for (const auto& pos : fam.possessions)
            if (pos.size() != 1) all_single = false;

    std::vector<Span> spans;
    if (all_single) {
        for (const PathId& p : paths) spans.push_back({p});
    } else {
        spans = enumerate_spans(inst.tt, paths, static_cast<int>(paths.size()), span_budget);
    }
    for (const Span& s : spans) {
        IpVar v;
        v.name = "s_" + join_names(s);
        v.cost = static_cast<int>(s.size());
        v.kind = VarKind::SpanPick;
        v.span = s;
        model.vars.push_back(std::move(v));
    }
    for (std::size_t j = 0; j < fams.size(); ++j) {
        bool free_run = false;
        for (const auto& pos : fams[j].possessions)
            if (pos.empty()) free_run = true;
        if (free_run) continue;  // satisfiable without any span
        LpRow row;
        for (std::size_t k = 0; k < model.vars.size(); ++k) {
            bool cover = false;
            for (const auto& pos : fams[j].possessions)
                if (is_subset(pos, model.vars[k].span)) { cover = true; break; }
            if (cover) row.terms.push_back({static_cast<int>(k), Rational(1)});
        }
        if (row.terms.empty())
            throw model_error("job " + std::to_string(inst.jobs[j].id) +
                              " is not coverable by any span");
        row.sense = RowSense::Ge;
        row.rhs = 1;
        model.rows.push_back(std::move(row));
        model.row_names.push_back("cover_" + std::to_string(inst.jobs[j].id));
    }
    return model;
}

IpModel build_uniscm(const Instance& inst, bool restricted) {
    const UnidirInstance uni = extract_unidir(inst);
    IpModel model;
    model.form = "window-cover";

    std::vector<std::pair<int, int>> intervals;
    if (!restricted) {
        for (int i = 1; i <= uni.m; ++i)
            for (int k = i; k <= uni.m; ++k) intervals.push_back({i, k});
    } else {
        const UnidirCandidates cand = unidir_candidates(uni);
        std::set<std::pair<int, int>> seen;
        for (int i : cand.latest_starts) {
            std::vector<int> ends = cand.span_ends.at(i);
            ends.insert(ends.end(), cand.earliest_ends.begin(), cand.earliest_ends.end());
            for (int k : ends)
                if (k >= i && k <= uni.m) seen.insert({i, k});
        }
        intervals.assign(seen.begin(), seen.end());
    }

    for (const auto& [i, k] : intervals) {
        IpVar v;
        Span s;
        for (int t = i; t <= k; ++t) s.push_back({uni.dir, t});
        v.name = "s_" + path_name({uni.dir, i}) +
                 (k > i ? "_" + path_name({uni.dir, k}) : std::string());
        v.cost = k - i + 1;
        v.kind = VarKind::SpanPick;
        v.span = std::move(s);
        model.vars.push_back(std::move(v));
    }
    for (std::size_t j = 0; j < uni.jobs.size(); ++j) {
        const UnidirJob& job = uni.jobs[j];
        LpRow row;
        for (std::size_t k = 0; k < model.vars.size(); ++k) {
            const int lo = model.vars[k].span.front().index;
            const int hi = model.vars[k].span.back().index;
            // the interval admits a full window of the job
            if (std::min(hi, job.last) - std::max(lo, job.first) + 1 >= job.len)
                row.terms.push_back({static_cast<int>(k), Rational(1)});
        }
        if (row.terms.empty())
            throw model_error("job " + std::to_string(job.id) +
                              " is not coverable by any interval");
        row.sense = RowSense::Ge;
        row.rhs = 1;
        model.rows.push_back(std::move(row));
        model.row_names.push_back("cover_" + std::to_string(job.id));
    }
    return model;
}

IpModel dominate_columns(const IpModel& model) {
    if (model.form == "path-possession")
        throw model_error("column domination applies to pure covering forms only");
    const std::size_t nv = model.vars.size();
    // coverage sets from the rows
    std::vector<std::vector<int>> covered(nv);
    for (std::size_t r = 0; r < model.rows.size(); ++r)
        for (const auto& [v, c] : model.rows[r].terms)
            covered[static_cast<std::size_t>(v)].push_back(static_cast<int>(r));
    std::vector<bool> keep(nv, true);
    for (std::size_t a = 0; a < nv; ++a) {
        if (!keep[a]) continue;
        for (std::size_t b = 0; b < nv; ++b) {
            if (a == b || !keep[b] || !keep[a]) continue;
            // b absorbs a: not costlier, covers at least as much; ties keep the earlier
            if (model.vars[b].cost > model.vars[a].cost) continue;
            if (!std::includes(covered[b].begin(), covered[b].end(), covered[a].begin(),
                               covered[a].end()))
                continue;
            if (model.vars[b].cost == model.vars[a].cost && covered[b] == covered[a] && b > a)
                continue;
            keep[a] = false;
        }
    }
    IpModel out;
    out.form = model.form;
    std::vector<int> remap(nv, -1);
    for (std::size_t v = 0; v < nv; ++v)
        if (keep[v]) {
            remap[v] = static_cast<int>(out.vars.size());
            out.vars.push_back(model.vars[v]);
        }
    for (std::size_t r = 0; r < model.rows.size(); ++r) {
        LpRow row;
        for (const auto& [v, c] : model.rows[r].terms)
            if (remap[static_cast<std::size_t>(v)] >= 0)
                row.terms.push_back({remap[static_cast<std::size_t>(v)], c});
        row.sense = model.rows[r].sense;
        row.rhs = model.rows[r].rhs;
        if (row.terms.empty()) throw model_error("domination removed every cover of a row");
        out.rows.push_back(std::move(row));
        out.row_names.push_back(model.row_names[r]);
    }
    return out;
}

LpReport lp_relaxation(const IpModel& model) {
    LpProblem lp;
    lp.num_vars = static_cast<int>(model.vars.size());
    for (const auto& v : model.vars) lp.objective.push_back(v.cost);
    lp.rows = model.rows;
    const LpOutcome out = lp_solve_exact(lp);
    if (!out.feasible) throw model_error("relaxation is infeasible");
    LpReport rep;
    rep.value = out.value;
    rep.x = out.x;
    rep.pivots = out.pivots;
    return rep;
}

namespace {

// The row-generation LP over path variables (min 1·y, one covering row per
// generated cut, y >= 0) is maintained through its dual: max 1·u subject to
// cuts^T u <= 1, u >= 0. Each generated cut is one new dual column and the
// all-slack basis is feasible from the first round, so no phase 1 is ever
// needed. Pivoting on exact rationals dominates the runtime at benchmark
// sizes, so the simplex itself runs on a floating-point tableau that merely
// proposes a basis; the optimum is reconstructed and verified exactly from
// that basis (a rational solve over the basic cut columns only). The exact
// pivoting engine below stays as the fallback for the rare case where the
// proposed basis fails verification.
class ExactCutTab {
  public:
    explicit ExactCutTab(std::size_t paths) : m_(paths), tab_(paths) {
        for (std::size_t i = 0; i < m_; ++i) {
            tab_[i].assign(m_, Rational(0));
            tab_[i][i] = 1;
            basis_.push_back(static_cast<int>(i));
            rhs_.push_back(Rational(1));
        }
        cost_.assign(m_, Rational(0));
    }

    // Adds the dual column of a covering row; coeff maps path index to its
    // multiplicity in the row. The column enters nonbasic, so the basis and
    // the right-hand sides are untouched.
    void add_cut(const std::map<int, int>& coeff) {
        // Column relative to the current basis: B^-1 a, assembled from the
        // slack columns (slack p's tableau column is column p of B^-1).
        std::vector<Rational> col(m_, Rational(0));
        for (const auto& [p, k] : coeff) {
            for (std::size_t i = 0; i < m_; ++i) {
                const Rational& v = tab_[i][static_cast<std::size_t>(p)];
                if (v != 0) col[i] += k * v;
            }
        }
        for (std::size_t i = 0; i < m_; ++i) tab_[i].push_back(std::move(col[i]));
        cost_.push_back(Rational(-1));
    }

    // Primal simplex from the current basis. Most-negative-reduced-cost rule
    // with a fallback to Bland's rule after a stretch of degenerate pivots,
    // which keeps termination guaranteed.
    void reoptimize() {
        std::size_t stalled = 0;
        Rational last = objective();
        for (;;) {
            std::vector<Rational> cb(m_);
            bool any_cb = false;
            for (std::size_t i = 0; i < m_; ++i) {
                cb[i] = cost_[static_cast<std::size_t>(basis_[i])];
                if (cb[i] != 0) any_cb = true;
            }
            const bool bland = stalled > 64;
            std::size_t enter = cols();
            Rational enter_rc;
            for (std::size_t j = 0; j < cols(); ++j) {
                Rational rc = cost_[j];
                if (any_cb)
                    for (std::size_t i = 0; i < m_; ++i)
                        if (cb[i] != 0) rc -= cb[i] * tab_[i][j];
                if (rc < 0 && (enter == cols() || (!bland && rc < enter_rc))) {
                    enter = j;
                    enter_rc = rc;
                    if (bland) break;
                }
            }
            if (enter == cols()) return;
            std::size_t leave = m_;
            for (std::size_t i = 0; i < m_; ++i) {
                if (tab_[i][enter] <= 0) continue;
                if (leave == m_) {
                    leave = i;
                    continue;
                }
                const Rational diff =
                    rhs_[i] * tab_[leave][enter] - rhs_[leave] * tab_[i][enter];
                if (diff < 0 || (diff == 0 && basis_[i] < basis_[leave])) leave = i;
            }
            if (leave == m_)
                throw model_error("internal: generated rows became infeasible");
            pivot(leave, enter);
            const Rational now = objective();
            stalled = (now == last) ? stalled + 1 : 0;
            last = now;
        }
    }

    // Value of the covering LP (= the dual maximum at the current optimum).
    Rational cover_value() const { return -objective(); }

    // Optimal covering-LP point: y_p is the reduced cost of slack column p.
    std::vector<Rational> path_values() const {
        std::vector<Rational> y(m_, Rational(0));
        for (std::size_t i = 0; i < m_; ++i) {
            const Rational& cb = cost_[static_cast<std::size_t>(basis_[i])];
            if (cb == 0) continue;
            for (std::size_t p = 0; p < m_; ++p)
                if (tab_[i][p] != 0) y[p] -= cb * tab_[i][p];
        }
        return y;
    }

    const std::vector<int>& basis() const { return basis_; }
    const std::vector<std::vector<Rational>>& tab() const { return tab_; }
    const std::vector<Rational>& rhs() const { return rhs_; }

  private:
    std::size_t cols() const { return cost_.size(); }

    Rational objective() const {
        Rational v = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            const Rational& cb = cost_[static_cast<std::size_t>(basis_[i])];
            if (cb != 0) v += cb * rhs_[i];
        }
        return v;
    }

    void pivot(std::size_t r, std::size_t c) {
        const Rational p = tab_[r][c];
        for (auto& v : tab_[r]) v /= p;
        rhs_[r] /= p;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            const Rational f = tab_[i][c];
            if (f == 0) continue;
            for (std::size_t j = 0; j < cols(); ++j)
                if (tab_[r][j] != 0) tab_[i][j] -= f * tab_[r][j];
            rhs_[i] -= f * rhs_[r];
        }
        basis_[r] = static_cast<int>(c);
    }

    std::size_t m_;
    std::vector<std::vector<Rational>> tab_;
    std::vector<Rational> rhs_;
    std::vector<Rational> cost_;
    std::vector<int> basis_;
};

// Solves the square rational system a·x = b by elimination; returns false
// when the matrix is singular.
bool solve_square(std::vector<std::vector<Rational>> a, std::vector<Rational> b,
                  std::vector<Rational>& x) {
    const std::size_t k = b.size();
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        while (piv < k && a[piv][c] == 0) ++piv;
        if (piv == k) return false;
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = c + 1; r < k; ++r) {
            if (a[r][c] == 0) continue;
            const Rational f = a[r][c] / a[c][c];
            for (std::size_t j = c; j < k; ++j)
                if (a[c][j] != 0) a[r][j] -= f * a[c][j];
            b[r] -= f * b[c];
        }
    }
    x.assign(k, Rational(0));
    for (std::size_t r = k; r-- > 0;) {
        Rational v = std::move(b[r]);
        for (std::size_t j = r + 1; j < k; ++j)
            if (a[r][j] != 0) v -= a[r][j] * x[j];
        x[r] = v / a[r][r];
    }
    return true;
}

struct CutLpPoint {
    std::vector<Rational> y;
    Rational value;
};

class DualCutLp {
  public:
    explicit DualCutLp(std::size_t paths) : m_(paths), tab_(paths) {
        for (std::size_t i = 0; i < m_; ++i) {
            tab_[i].assign(m_, 0.0);
            tab_[i][i] = 1.0;
            basis_.push_back(static_cast<int>(i));
            rhs_.push_back(1.0);
        }
    }

    std::size_t cuts() const { return cuts_.size(); }

    void add_cut(const std::map<int, int>& coeff) {
        std::vector<double> col(m_, 0.0);
        for (const auto& [p, k] : coeff)
            for (std::size_t i = 0; i < m_; ++i)
                col[i] += k * tab_[i][static_cast<std::size_t>(p)];
        for (std::size_t i = 0; i < m_; ++i) tab_[i].push_back(col[i]);
        cuts_.push_back(coeff);
    }

    // Floating-point primal simplex. It only proposes a basis: every number
    // that leaves this class is re-derived exactly from that basis, so the
    // tolerances here affect speed, never correctness.
    void reoptimize() {
        std::size_t stalled = 0;
        double last = objective();
        for (std::size_t iter = 0; iter < 100000; ++iter) {
            const std::size_t n = cols();
            std::vector<double> cb(m_);
            for (std::size_t i = 0; i < m_; ++i)
                cb[i] = basis_[i] >= static_cast<int>(m_) ? -1.0 : 0.0;
            const bool bland = stalled > 64;
            std::size_t enter = n;
            double enter_rc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                double rc = j < m_ ? 0.0 : -1.0;
                for (std::size_t i = 0; i < m_; ++i)
                    if (cb[i] != 0.0) rc -= cb[i] * tab_[i][j];
                if (rc >= -1e-9) continue;
                if (enter == n || (!bland && rc < enter_rc)) {
                    enter = j;
                    enter_rc = rc;
                    if (bland) break;
                }
            }
            if (enter == n) return;
            std::size_t leave = m_;
            double best = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                if (tab_[i][enter] <= 1e-11) continue;
                const double ratio = rhs_[i] / tab_[i][enter];
                if (leave == m_ || ratio < best - 1e-12 ||
                    (ratio < best + 1e-12 && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m_) return;
            pivot(leave, enter);
            ++pivots;
            const double now = objective();
            stalled = std::abs(now - last) < 1e-12 ? stalled + 1 : 0;
            last = now;
        }
    }

    // Current float approximation of the covering point, for cheap
    // separation between exact certifications.
    std::vector<double> approx_path_values() const {
        std::vector<double> y(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < static_cast<int>(m_)) continue;
            for (std::size_t p = 0; p < m_; ++p) y[p] += tab_[i][p];
        }
        return y;
    }

    // Exact optimum of the LP over the current cut set. Reconstructs the
    // point the proposed basis defines and verifies optimality; if the basis
    // fails the check, re-solves exactly from scratch and refreshes the float
    // state from the exact result.
    CutLpPoint exact_point() {
        CutLpPoint pt;
        if (try_recover(pt)) return pt;
        if (std::getenv("CORRIDOR_LP_DEBUG"))
            std::fprintf(stderr, "[pim_lp] recovery failed (%s), exact rebuild with %zu cuts\n",
                         fail_, cuts_.size());
        ++rebuilds;
        ExactCutTab exact(m_);
        for (const auto& coeff : cuts_) exact.add_cut(coeff);
        exact.reoptimize();
        pt.y = exact.path_values();
        pt.value = exact.cover_value();
        basis_ = exact.basis();
        for (std::size_t i = 0; i < m_; ++i) {
            rhs_[i] = exact.rhs()[i].convert_to<double>();
            for (std::size_t j = 0; j < cols(); ++j)
                tab_[i][j] = exact.tab()[i][j].convert_to<double>();
        }
        return pt;
    }

    std::size_t pivots = 0;
    std::size_t rebuilds = 0;

  private:
    std::size_t cols() const { return m_ + cuts_.size(); }

    double objective() const {
        double v = 0.0;
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= static_cast<int>(m_)) v -= rhs_[i];
        return v;
    }

    void pivot(std::size_t r, std::size_t c) {
        const double p = tab_[r][c];
        for (auto& v : tab_[r]) v /= p;
        rhs_[r] /= p;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = tab_[i][c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < cols(); ++j) tab_[i][j] -= f * tab_[r][j];
            rhs_[i] -= f * rhs_[r];
            tab_[i][c] = 0.0;
        }
        tab_[r][c] = 1.0;
        basis_[r] = static_cast<int>(c);
    }

    // A basis of the dual splits into basic slacks and basic cut columns.
    // Zero dual prices sit on every row whose slack is basic; the prices on
    // the remaining rows solve M^T u = -1 where M is the square submatrix
    // of the basic cut columns on those rows, and the basic primal values
    // solve M x = 1. The basis is optimal iff x and the leftover slacks are
    // nonnegative and every column prices out nonnegatively, all checked in
    // exact arithmetic.
    bool try_recover(CutLpPoint& out) const {
        const std::size_t none = static_cast<std::size_t>(-1);
        std::vector<char> slack_basic(m_, 0);
        std::vector<std::size_t> basic_cuts;
        for (int c : basis_) {
            if (c < static_cast<int>(m_))
                slack_basic[static_cast<std::size_t>(c)] = 1;
            else
                basic_cuts.push_back(static_cast<std::size_t>(c) - m_);
        }
        std::vector<std::size_t> rows;
        std::vector<std::size_t> row_pos(m_, none);
        for (std::size_t p = 0; p < m_; ++p) {
            if (slack_basic[p]) continue;
            row_pos[p] = rows.size();
            rows.push_back(p);
        }
        const std::size_t k = basic_cuts.size();
        if (rows.size() != k) return fail("row count");

        std::vector<std::vector<Rational>> M(k, std::vector<Rational>(k, Rational(0)));
        std::vector<std::vector<Rational>> Mt(k, std::vector<Rational>(k, Rational(0)));
        for (std::size_t c = 0; c < k; ++c) {
            for (const auto& [p, v] : cuts_[basic_cuts[c]]) {
                const std::size_t r = row_pos[static_cast<std::size_t>(p)];
                if (r == none) continue;
                M[r][c] = v;
                Mt[c][r] = v;
            }
        }
        std::vector<Rational> x, u;
        if (!solve_square(std::move(M), std::vector<Rational>(k, Rational(1)), x))
            return fail("singular basis");
        if (!solve_square(std::move(Mt), std::vector<Rational>(k, Rational(-1)), u))
            return fail("singular basis");

        for (const Rational& v : x)
            if (v < 0) return fail("negative basic value");
        std::vector<Rational> slack(m_, Rational(1));
        for (std::size_t c = 0; c < k; ++c)
            for (const auto& [p, v] : cuts_[basic_cuts[c]])
                slack[static_cast<std::size_t>(p)] -= v * x[c];
        for (std::size_t p = 0; p < m_; ++p)
            if (slack_basic[p] && slack[p] < 0) return fail("negative slack");
        for (const Rational& v : u)
            if (v > 0) return fail("positive price");
        for (const auto& cut : cuts_) {
            Rational dot = 0;
            for (const auto& [p, v] : cut) {
                const std::size_t r = row_pos[static_cast<std::size_t>(p)];
                if (r != none) dot += v * u[r];
            }
            if (dot > -1) return fail("underpriced cut");
        }

        out.y.assign(m_, Rational(0));
        for (std::size_t r = 0; r < k; ++r) out.y[rows[r]] = -u[r];
        out.value = 0;
        for (const Rational& v : x) out.value += v;
        return true;
    }

    bool fail(const char* why) const {
        fail_ = why;
        return false;
    }

    mutable const char* fail_ = "";
    std::size_t m_;
    std::vector<std::vector<double>> tab_;
    std::vector<double> rhs_;
    std::vector<int> basis_;
    std::vector<std::map<int, int>> cuts_;
};

}  // namespace

Rational pim_lp_value(const Instance& inst, std::size_t round_budget) {
    const auto fams = effective_families(inst);
    const std::vector<PathId> paths = family_paths(fams);
    auto path_index = [&](const PathId& p) {
        auto it = std::lower_bound(paths.begin(), paths.end(), p, canonical_less);
        return static_cast<int>(it - paths.begin());
    };

    // Jobs owning an empty possession need no paths at all.
    std::vector<std::size_t> live;
    for (std::size_t j = 0; j < fams.size(); ++j) {
        bool free_run = false;
        for (const auto& pos : fams[j].possessions)
            if (pos.empty()) free_run = true;
        if (!free_run) live.push_back(j);
    }

    // The job's cheapest covering row under the point y: the cheapest member
    // of each possession, summed, with the pick multiplicities as the row.
    auto undercover = [&](std::size_t j, const auto& y) {
        std::pair<std::decay_t<decltype(y[0])>, std::map<int, int>> r{0, {}};
        for (const auto& pos : fams[j].possessions) {
            if (pos.empty()) continue;
            int best = path_index(pos.front());
            for (const PathId& p : pos) {
                const int idx = path_index(p);
                if (y[static_cast<std::size_t>(idx)] < y[static_cast<std::size_t>(best)])
                    best = idx;
            }
            r.first += y[static_cast<std::size_t>(best)];
            ++r.second[best];
        }
        return r;
    };

    DualCutLp lp(paths.size());
    std::set<std::map<int, int>> seen;
    for (std::size_t round = 0;; ++round) {
        if (round >= round_budget)
            throw resource_error("row generation exceeded " + std::to_string(round_budget) +
                                 " rounds");

        // Cheap float separation first. A row is valid no matter how the
        // member prices were approximated, so this never risks exactness; it
        // only decides which rows to try next.
        const std::vector<double> yf = lp.approx_path_values();
        bool added = false;
        for (std::size_t j : live) {
            auto [total, coeff] = undercover(j, yf);
            if (total >= 1.0 - 1e-6) continue;
            if (coeff.empty())
                throw model_error("internal: generated rows became infeasible");
            if (seen.insert(coeff).second) {
                lp.add_cut(coeff);
                added = true;
            }
        }
        if (added) {
            lp.reoptimize();
            continue;
        }

        // The float point separates nothing new: certify exactly. A job the
        // exact point leaves undercovered always yields a genuinely new row,
        // because the certified point satisfies every row generated so far.
        const CutLpPoint pt = lp.exact_point();
        bool exact_added = false;
        for (std::size_t j : live) {
            auto [total, coeff] = undercover(j, pt.y);
            if (total >= 1) continue;
            if (coeff.empty())
                throw model_error("internal: generated rows became infeasible");
            if (!seen.insert(coeff).second)
                throw model_error("internal: row generation repeated a covering row");
            lp.add_cut(coeff);
            exact_added = true;
        }
        if (!exact_added) {
            if (std::getenv("CORRIDOR_LP_DEBUG"))
                std::fprintf(stderr, "[pim_lp] paths=%zu rounds=%zu cuts=%zu pivots=%zu rebuilds=%zu\n",
                             paths.size(), round, lp.cuts(), lp.pivots, lp.rebuilds);
            return pt.value;
        }
        lp.reoptimize();
    }
}

namespace {

bool is_branchable(const IpModel& model, std::size_t v) {
    if (model.form == "path-possession") return model.vars[v].kind == VarKind::PathUse;
    return true;
}

// Per job, the variables whose selection covers it, read off the cover rows.
// Jobs without a cover row (free to run) get an empty list.
std::vector<std::vector<int>> cover_lists(const Instance& inst, const IpModel& model,
                                          const std::vector<PossessionFamily>& fams) {
    std::map<int, std::size_t> by_id;
    for (std::size_t j = 0; j < inst.jobs.size(); ++j) by_id[inst.jobs[j].id] = j;
    std::vector<std::vector<int>> out(fams.size());
    for (std::size_t r = 0; r < model.rows.size(); ++r) {
        if (model.row_names[r].rfind("cover_", 0) != 0) continue;
        const int id = std::stoi(model.row_names[r].substr(6));
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw model_error("internal: cover row for unknown job " + std::to_string(id));
        for (const auto& [v, c] : model.rows[r].terms) out[it->second].push_back(v);
    }
    return out;
}

// Chosen selection vars -> one possession per job -> Solution.
Solution decode_selection(const Instance& inst, const std::vector<PossessionFamily>& fams,
                          const IpModel& model, const std::vector<int>& picked) {
    std::vector<int> choice(fams.size(), -1);
    for (std::size_t j = 0; j < fams.size(); ++j) {
        for (std::size_t c = 0; c < fams[j].possessions.size() && choice[j] < 0; ++c) {
            Possession key = fams[j].possessions[c];
            sort_canonical(key);
            if (key.empty()) {  // runs for free
                choice[j] = static_cast<int>(c);
                break;
            }
            for (int k : picked) {
                const IpVar& v = model.vars[static_cast<std::size_t>(k)];
                const bool ok = model.form == "path-possession"
                                    ? key == v.span
                                    : is_subset(key, v.span);
                if (ok) {
                    choice[j] = static_cast<int>(c);
                    break;
                }
            }
        }
        if (choice[j] < 0)
            throw model_error("internal: decode left job " +
                              std::to_string(inst.jobs[j].id) + " uncovered");
    }
    return assemble_solution(inst, fams, choice);
}

struct RoundResult {
    Rational value;
    std::vector<int> picked;
};

// Deterministic rounding: per job pick its covering variable with the largest LP
// value (ties to the lowest index).
RoundResult round_cover(const IpModel& model, const std::vector<std::vector<int>>& covers,
                        const std::vector<Rational>& x) {
    std::set<int> picked;
    for (std::size_t j = 0; j < covers.size(); ++j) {
        if (covers[j].empty()) continue;  // free job, no cover row
        bool covered = false;
        for (int k : covers[j])
            if (picked.count(k)) { covered = true; break; }
        if (covered) continue;
        int best = covers[j].front();
        for (int k : covers[j])
            if (x[static_cast<std::size_t>(k)] > x[static_cast<std::size_t>(best)]) best = k;
        picked.insert(best);
    }
    RoundResult r;
    r.picked.assign(picked.begin(), picked.end());
    if (model.form == "path-possession") {
        Possession all;
        for (int k : r.picked) {
            const auto& s = model.vars[static_cast<std::size_t>(k)].span;
            all.insert(all.end(), s.begin(), s.end());
        }
        sort_canonical(all);
        all.erase(std::unique(all.begin(), all.end()), all.end());
        r.value = static_cast<int>(all.size());
    } else {
        r.value = 0;
        for (int k : r.picked) r.value += model.vars[static_cast<std::size_t>(k)].cost;
    }
    return r;
}

}  // namespace

BbResult bb_solve(const Instance& inst, const IpModel& model, const BbOptions& opts) {
    const auto fams = effective_families(inst);
    const auto covers = cover_lists(inst, model, fams);

    LpProblem base;
    base.num_vars = static_cast<int>(model.vars.size());
    for (const auto& v : model.vars) base.objective.push_back(v.cost);
    base.rows = model.rows;

    struct Node {
        std::vector<std::pair<int, int>> fixes;  // (var, 0/1)
        Rational bound;
        std::vector<Rational> x;
    };

    auto solve_node = [&](const std::vector<std::pair<int, int>>& fixes)
        -> std::pair<bool, LpOutcome> {
        LpProblem lp = base;
        for (const auto& [v, val] : fixes) {
            LpRow row;
            row.terms.push_back({v, Rational(1)});
            row.sense = RowSense::Eq;
            row.rhs = val;
            lp.rows.push_back(std::move(row));
        }
        LpOutcome out = lp_solve_exact(lp);
        return {out.feasible, std::move(out)};
    };

    std::map<std::pair<Rational, std::size_t>, Node> queue;
    std::size_t next_id = 0;
    std::size_t created = 0;

    auto push_node = [&](std::vector<std::pair<int, int>> fixes) {
        auto [feasible, out] = solve_node(fixes);
        if (!feasible) return;
        Node nd;
        nd.fixes = std::move(fixes);
        nd.bound = out.value;
        nd.x = std::move(out.x);
        queue.emplace(std::make_pair(nd.bound, next_id++), std::move(nd));
        ++created;
    };

    push_node({});
    if (queue.empty()) throw model_error("model is infeasible");

    const auto started = std::chrono::steady_clock::now();
    auto out_of_time = [&] {
        if (opts.time_budget_ms == 0) return false;
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
        return static_cast<std::size_t>(elapsed) > opts.time_budget_ms;
    };

    BbResult res;
    while (!queue.empty()) {
        const auto it = queue.begin();
        const Rational bound = it->first.first;
        Node node = std::move(it->second);
        queue.erase(it);
        ++res.nodes;

        // integral in the branchable variables?
        int branch_var = -1;
        Rational branch_dist(-1);
        for (std::size_t v = 0; v < node.x.size(); ++v) {
            if (!is_branchable(model, v)) continue;
            const Rational frac = node.x[v] - rational_floor(node.x[v]);
            const Rational dist = frac <= Rational(1, 2) ? frac : 1 - frac;
            if (dist == 0) continue;
            if (dist > branch_dist) {
                branch_dist = dist;
                branch_var = static_cast<int>(v);
            }
        }
        if (branch_var < 0) {
            // Best-first: the first integral node proves optimality.
            std::vector<int> picked;
            for (std::size_t v = 0; v < node.x.size(); ++v) {
                if (node.x[v] == 0) continue;
                if (model.form == "path-possession") {
                    if (model.vars[v].kind == VarKind::PathUse && node.x[v] == 1)
                        picked.push_back(static_cast<int>(v));
                } else if (node.x[v] == 1) {
                    picked.push_back(static_cast<int>(v));
                }
            }
            res.optimal = true;
            res.incumbent_value = bound;
            res.best_bound = bound;
            if (model.form == "path-possession") {
                // selection = admitted possessions contained in the chosen path set
                Possession chosen;
                for (int k : picked)
                    chosen.push_back(model.vars[static_cast<std::size_t>(k)].span.front());
                sort_canonical(chosen);
                std::vector<int> choice(fams.size(), -1);
                for (std::size_t j = 0; j < fams.size(); ++j) {
                    for (std::size_t c = 0; c < fams[j].possessions.size(); ++c) {
                        Possession key = fams[j].possessions[c];
                        sort_canonical(key);
                        bool admitted = false;
                        for (int k : covers[j])
                            if (model.vars[static_cast<std::size_t>(k)].span == key) {
                                admitted = true;
                                break;
                            }
                        if (admitted && is_subset(key, chosen)) {
                            choice[j] = static_cast<int>(c);
                            break;
                        }
                    }
                    if (choice[j] < 0)
                        throw model_error("internal: integral point misses job " +
                                          std::to_string(inst.jobs[j].id));
                }
                res.solution = assemble_solution(inst, fams, choice);
            } else {
                res.solution = decode_selection(inst, fams, model, picked);
            }
            if (Rational(res.solution.objective) != res.incumbent_value)
                throw model_error("internal: optimal selection wastes capacity (" +
                                  std::to_string(res.solution.objective) + " used vs " +
                                  format_rational(res.incumbent_value) + " paid)");
            return res;
        }

        if (created >= opts.node_budget || out_of_time()) {
            if (opts.require_optimal)
                throw resource_error("branch and bound exceeded its budget (" +
                                     std::to_string(created) + " nodes)");
            const RoundResult rr = round_cover(model, covers, node.x);
            res.optimal = false;
            res.incumbent_value = rr.value;
            res.best_bound = bound;  // smallest bound: this node came off a best-first queue
            res.solution = decode_selection(inst, fams, model, rr.picked);
            return res;
        }

        for (int val : {1, 0}) {
            std::vector<std::pair<int, int>> fixes = node.fixes;
            fixes.push_back({branch_var, val});
            push_node(std::move(fixes));
        }
    }
    throw model_error("branch and bound exhausted the tree without an integral point");
}

BbResult bb_solve_pim_cut(const Instance& inst, const BbOptions& opts) {
    const auto fams = effective_families(inst);
    const std::vector<PathId> paths = family_paths(fams);
    auto path_index = [&](const PathId& p) {
        auto it = std::lower_bound(paths.begin(), paths.end(), p, canonical_less);
        return static_cast<int>(it - paths.begin());
    };
    std::vector<std::size_t> live;
    for (std::size_t j = 0; j < fams.size(); ++j) {
        bool free_run = false;
        for (const auto& pos : fams[j].possessions)
            if (pos.empty()) free_run = true;
        if (!free_run) live.push_back(j);
    }

    std::vector<LpRow> rows;  // grows; every row is valid for all integral selections

    struct Node {
        std::vector<std::pair<int, int>> fixes;
        Rational bound;
        std::vector<Rational> x;
    };

    auto solve_node = [&](const std::vector<std::pair<int, int>>& fixes) -> LpOutcome {
        LpProblem lp;
        lp.num_vars = static_cast<int>(paths.size());
        lp.objective.assign(paths.size(), Rational(1));
        lp.rows = rows;
        for (const auto& [v, val] : fixes) {
            LpRow row;
            row.terms.push_back({v, Rational(1)});
            row.sense = RowSense::Eq;
            row.rhs = val;
            lp.rows.push_back(std::move(row));
        }
        return lp_solve_exact(lp);
    };

    // Violated pick-combination rows at integral y (deterministic argmin choices).
    auto separate = [&](const std::vector<Rational>& y) {
        std::size_t added = 0;
        for (std::size_t j : live) {
            Rational total = 0;
            std::vector<int> argmin;
            for (const auto& pos : fams[j].possessions) {
                int best = path_index(pos.front());
                for (const PathId& p : pos) {
                    const int idx = path_index(p);
                    if (y[static_cast<std::size_t>(idx)] < y[static_cast<std::size_t>(best)])
                        best = idx;
                }
                total += y[static_cast<std::size_t>(best)];
                argmin.push_back(best);
            }
            if (total < 1) {
                LpRow row;
                for (int idx : argmin) row.terms.push_back({idx, Rational(1)});
                row.sense = RowSense::Ge;
                row.rhs = 1;
                rows.push_back(std::move(row));
                ++added;
            }
        }
        return added;
    };

    std::map<std::pair<Rational, std::size_t>, Node> queue;
    std::size_t next_id = 0;
    std::size_t created = 0;
    auto push_node = [&](std::vector<std::pair<int, int>> fixes) {
        const LpOutcome out = solve_node(fixes);
        if (!out.feasible) return;
        Node nd;
        nd.fixes = std::move(fixes);
        nd.bound = out.value;
        nd.x = out.x;
        queue.emplace(std::make_pair(nd.bound, next_id++), std::move(nd));
        ++created;
    };
    push_node({});

    const auto started = std::chrono::steady_clock::now();
    auto out_of_time = [&] {
        if (opts.time_budget_ms == 0) return false;
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
        return static_cast<std::size_t>(elapsed) > opts.time_budget_ms;
    };

    auto decode = [&](const Possession& chosen) {
        std::vector<int> choice(fams.size(), -1);
        for (std::size_t j = 0; j < fams.size(); ++j) {
            for (std::size_t c = 0; c < fams[j].possessions.size(); ++c) {
                Possession key = fams[j].possessions[c];
                sort_canonical(key);
                if (is_subset(key, chosen)) {
                    choice[j] = static_cast<int>(c);
                    break;
                }
            }
            if (choice[j] < 0)
                throw model_error("internal: decode left job " +
                                  std::to_string(inst.jobs[j].id) + " uncovered");
        }
        return assemble_solution(inst, fams, choice);
    };

    // Deterministic greedy incumbent from fractional y: per job, the possession whose
    // weakest path value is largest (ties: family order).
    auto round_incumbent = [&](const std::vector<Rational>& y) {
        Possession chosen;
        std::vector<bool> in(paths.size(), false);
        for (std::size_t j : live) {
            bool done = false;
            for (const auto& pos : fams[j].possessions) {
                bool all = true;
                for (const PathId& p : pos)
                    if (!in[static_cast<std::size_t>(path_index(p))]) { all = false; break; }
                if (all) { done = true; break; }
            }
            if (done) continue;
            std::size_t pick = 0;
            Rational pick_min;
            for (std::size_t c = 0; c < fams[j].possessions.size(); ++c) {
                Rational mn = 2;
                for (const PathId& p : fams[j].possessions[c]) {
                    const auto& v = y[static_cast<std::size_t>(path_index(p))];
                    if (v < mn) mn = v;
                }
                if (c == 0 || mn > pick_min) {
                    pick = c;
                    pick_min = mn;
                }
            }
            for (const PathId& p : fams[j].possessions[pick])
                in[static_cast<std::size_t>(path_index(p))] = true;
        }
        for (std::size_t k = 0; k < paths.size(); ++k)
            if (in[k]) chosen.push_back(paths[k]);
        return chosen;
    };

    BbResult res;
    while (!queue.empty()) {
        const auto it = queue.begin();
        Node node = std::move(it->second);
        queue.erase(it);
        ++res.nodes;

        int branch_var = -1;
        Rational branch_dist(-1);
        for (std::size_t v = 0; v < node.x.size(); ++v) {
            const Rational frac = node.x[v] - rational_floor(node.x[v]);
            const Rational dist = frac <= Rational(1, 2) ? frac : 1 - frac;
            if (dist == 0) continue;
            if (dist > branch_dist) {
                branch_dist = dist;
                branch_var = static_cast<int>(v);
            }
        }

        if (branch_var < 0) {
            // Integral: either genuinely feasible (stop: best-first proves optimality)
            // or missing rows — add them and re-solve this node under the new rows.
            if (separate(node.x) > 0) {
                const LpOutcome out = solve_node(node.fixes);
                if (out.feasible) {
                    Node nd;
                    nd.fixes = std::move(node.fixes);
                    nd.bound = out.value;
                    nd.x = out.x;
                    queue.emplace(std::make_pair(nd.bound, next_id++), std::move(nd));
                }
                continue;
            }
            Possession chosen;
            for (std::size_t v = 0; v < node.x.size(); ++v)
                if (node.x[v] == 1) chosen.push_back(paths[v]);
            res.optimal = true;
            res.incumbent_value = node.bound;
            res.best_bound = node.bound;
            res.solution = decode(chosen);
            if (Rational(res.solution.objective) != res.incumbent_value)
                throw model_error("internal: optimal selection wastes capacity (" +
                                  std::to_string(res.solution.objective) + " used vs " +
                                  format_rational(res.incumbent_value) + " paid)");
            return res;
        }

        if (created >= opts.node_budget || out_of_time()) {
            if (opts.require_optimal)
                throw resource_error("branch and bound exceeded its budget (" +
                                     std::to_string(created) + " nodes)");
            const Possession chosen = round_incumbent(node.x);
            res.optimal = false;
            res.incumbent_value = static_cast<int>(chosen.size());
            res.best_bound = node.bound;
            res.solution = decode(chosen);
            return res;
        }

        for (int val : {1, 0}) {
            std::vector<std::pair<int, int>> fixes = node.fixes;
            fixes.push_back({branch_var, val});
            push_node(std::move(fixes));
        }
    }
    // Every job can be covered by selecting all paths, so the root never goes
    // infeasible; an empty queue means every branch was exhausted.
    throw model_error("branch and bound exhausted the tree without a feasible point");
}

std::string emit_lp_file(const IpModel& model) {
    auto int_str = [](const Rational& r) {
        if (denominator(r) != 1)
            throw model_error("LP file export needs integer coefficients, got " +
                              format_rational(r));
        std::ostringstream os;
        os << numerator(r);
        return os.str();
    };
    std::ostringstream os;
    os << "\\ " << model.form << " model\n";
    os << "Minimize\n obj:";
    std::size_t on_line = 0;
    bool first = true;
    for (const auto& v : model.vars) {
        if (v.cost == 0) continue;
        os << (first ? " " : " + ") << int_str(v.cost) << " " << v.name;
        first = false;
        if (++on_line % 8 == 0) os << "\n     ";
    }
    if (first) os << " 0 " << (model.vars.empty() ? "x0" : model.vars.front().name);
    os << "\nSubject To\n";
    for (std::size_t r = 0; r < model.rows.size(); ++r) {
        os << " " << model.row_names[r] << ":";
        for (std::size_t t = 0; t < model.rows[r].terms.size(); ++t) {
            const auto& [v, c] = model.rows[r].terms[t];
            if (c < 0)
                os << " - " << (c == -1 ? "" : int_str(-c) + " ")
                   << model.vars[static_cast<std::size_t>(v)].name;
            else
                os << (t == 0 ? " " : " + ") << (c == 1 ? "" : int_str(c) + " ")
                   << model.vars[static_cast<std::size_t>(v)].name;
            if ((t + 1) % 8 == 0 && t + 1 < model.rows[r].terms.size()) os << "\n     ";
        }
        const char* sense = model.rows[r].sense == RowSense::Ge
                                ? ">="
                                : (model.rows[r].sense == RowSense::Le ? "<=" : "=");
        os << " " << sense << " " << int_str(model.rows[r].rhs) << "\n";
    }
    os << "Binary\n";
    on_line = 0;
    for (const auto& v : model.vars) {
        os << " " << v.name;
        if (++on_line % 8 == 0) os << "\n";
    }
    if (on_line % 8 != 0) os << "\n";
    os << "End\n";
    return os.str();
}

Rational relative_gap(const Rational& value, const Rational& reference) {
    if (reference == 0) throw model_error("relative gap needs a nonzero reference");
    return (reference - value) / reference;
}

}  // namespace corridor
