#include "corridor/simplex.hpp"

#include <algorithm>

#include "corridor/errors.hpp"

namespace corridor {

namespace {

struct Tableau {
    // rows x (cols + 1); last column is the right-hand side
    std::vector<std::vector<Rational>> t;
    std::vector<int> basis;        // basic column per row
    std::vector<Rational> cost;    // per column, current phase
    std::vector<bool> blocked;     // columns that may never enter (artificials in phase 2)
    std::size_t pivots = 0;

    std::size_t rows() const { return t.size(); }
    std::size_t cols() const { return t.empty() ? 0 : t[0].size() - 1; }

    void pivot(std::size_t r, std::size_t c) {
        ++pivots;
        const Rational p = t[r][c];
        for (auto& v : t[r]) v /= p;
        for (std::size_t i = 0; i < rows(); ++i) {
            if (i == r) continue;
            const Rational f = t[i][c];
            if (f == 0) continue;
            for (std::size_t j = 0; j <= cols(); ++j) t[i][j] -= f * t[r][j];
        }
        basis[r] = static_cast<int>(c);
    }

    Rational reduced_cost(std::size_t j) const {
        Rational rc = cost[j];
        for (std::size_t i = 0; i < rows(); ++i) {
            const Rational cb = cost[static_cast<std::size_t>(basis[i])];
            if (cb != 0) rc -= cb * t[i][j];
        }
        return rc;
    }

    // Most-negative-reduced-cost rule, falling back to Bland's rule while a
    // run of degenerate pivots lasts so cycling stays impossible.
    std::size_t degen_streak = 0;

    bool iterate() {
        // cache basic costs once per iteration
        std::vector<Rational> cb(rows());
        bool any_cb = false;
        for (std::size_t i = 0; i < rows(); ++i) {
            cb[i] = cost[static_cast<std::size_t>(basis[i])];
            if (cb[i] != 0) any_cb = true;
        }
        const bool bland = degen_streak > 64;
        std::size_t enter = cols();
        Rational enter_rc;
        for (std::size_t j = 0; j < cols(); ++j) {
            if (blocked[j]) continue;
            Rational rc = cost[j];
            if (any_cb)
                for (std::size_t i = 0; i < rows(); ++i)
                    if (cb[i] != 0) rc -= cb[i] * t[i][j];
            if (rc < 0 && (enter == cols() || (!bland && rc < enter_rc))) {
                enter = j;
                enter_rc = std::move(rc);
                if (bland) break;
            }
        }
        if (enter == cols()) return false;  // optimal
        std::size_t leave = rows();
        Rational best;
        for (std::size_t i = 0; i < rows(); ++i) {
            if (t[i][enter] <= 0) continue;
            const Rational ratio = t[i][cols()] / t[i][enter];
            if (leave == rows() || ratio < best ||
                (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == rows()) throw model_error("linear program is unbounded");
        degen_streak = (best == 0) ? degen_streak + 1 : 0;
        pivot(leave, enter);
        return true;
    }
};

}  // namespace

LpOutcome lp_solve_exact(const LpProblem& lp) {
    const std::size_t m = lp.rows.size();
    const std::size_t n = static_cast<std::size_t>(lp.num_vars);

    // Orient every row to a nonnegative right-hand side.
    std::vector<LpRow> rows = lp.rows;
    std::vector<bool> flipped(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        if (rows[i].rhs < 0) {
            flipped[i] = true;
            rows[i].rhs = -rows[i].rhs;
            for (auto& [v, c] : rows[i].terms) c = -c;
            if (rows[i].sense == RowSense::Le) rows[i].sense = RowSense::Ge;
            else if (rows[i].sense == RowSense::Ge) rows[i].sense = RowSense::Le;
        }
    }

    // Column layout: structural | one slack/surplus per inequality | artificials.
    std::vector<int> own_col(m, -1);   // slack (Le) or surplus (Ge) column
    std::vector<int> art_col(m, -1);
    std::size_t cols = n;
    for (std::size_t i = 0; i < m; ++i)
        if (rows[i].sense != RowSense::Eq) own_col[i] = static_cast<int>(cols++);
    for (std::size_t i = 0; i < m; ++i)
        if (rows[i].sense != RowSense::Le) art_col[i] = static_cast<int>(cols++);

    Tableau tab;
    tab.t.assign(m, std::vector<Rational>(cols + 1, Rational(0)));
    tab.basis.assign(m, 0);
    tab.blocked.assign(cols, false);
    for (std::size_t i = 0; i < m; ++i) {
        for (const auto& [v, c] : rows[i].terms) {
            if (v < 0 || static_cast<std::size_t>(v) >= n)
                throw model_error("row references an unknown variable");
            tab.t[i][static_cast<std::size_t>(v)] += c;
        }
        tab.t[i][cols] = rows[i].rhs;
        if (own_col[i] >= 0)
            tab.t[i][static_cast<std::size_t>(own_col[i])] =
                rows[i].sense == RowSense::Le ? 1 : -1;
        if (art_col[i] >= 0) {
            tab.t[i][static_cast<std::size_t>(art_col[i])] = 1;
            tab.basis[i] = art_col[i];
        } else {
            tab.basis[i] = own_col[i];
        }
    }

    // Phase 1: minimize the sum of artificials.
    bool need_phase1 = false;
    tab.cost.assign(cols, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
        if (art_col[i] >= 0) {
            tab.cost[static_cast<std::size_t>(art_col[i])] = 1;
            need_phase1 = true;
        }
    LpOutcome out;
    if (need_phase1) {
        while (tab.iterate()) {
        }
        Rational infeas = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (art_col[i] >= 0 && tab.basis[i] == art_col[i]) infeas += tab.t[i][cols];
        if (infeas != 0) {
            out.feasible = false;
            out.pivots = tab.pivots;
            return out;
        }
        // Drive artificials that linger in the basis at value zero out of it.
        for (std::size_t i = 0; i < m; ++i) {
            if (art_col[i] < 0 || tab.basis[i] != art_col[i]) continue;
            for (std::size_t j = 0; j < cols; ++j) {
                const bool artificial =
                    std::find(art_col.begin(), art_col.end(), static_cast<int>(j)) !=
                    art_col.end();
                if (artificial) continue;
                if (tab.t[i][j] != 0) {
                    tab.pivot(i, j);
                    break;
                }
            }
        }
    }

    // Phase 2: the real objective; artificial columns stay only to expose the duals.
    tab.cost.assign(cols, Rational(0));
    for (std::size_t j = 0; j < n; ++j) tab.cost[j] = lp.objective[j];
    for (std::size_t i = 0; i < m; ++i)
        if (art_col[i] >= 0) tab.blocked[static_cast<std::size_t>(art_col[i])] = true;
    while (tab.iterate()) {
    }

    out.feasible = true;
    out.pivots = tab.pivots;
    out.x.assign(n, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
        if (tab.basis[i] >= 0 && static_cast<std::size_t>(tab.basis[i]) < n)
            out.x[static_cast<std::size_t>(tab.basis[i])] = tab.t[i][cols];
    out.value = 0;
    for (std::size_t j = 0; j < n; ++j)
        if (out.x[j] != 0) out.value += lp.objective[j] * out.x[j];

    // Duals from the reduced costs of each row's own column (or its artificial).
    out.duals.assign(m, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
        Rational y;
        if (own_col[i] >= 0) {
            const Rational rc = tab.reduced_cost(static_cast<std::size_t>(own_col[i]));
            y = rows[i].sense == RowSense::Le ? -rc : rc;
        } else {
            y = -tab.reduced_cost(static_cast<std::size_t>(art_col[i]));
        }
        out.duals[i] = flipped[i] ? -y : y;
    }
    Rational dual_value = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (out.duals[i] != 0) dual_value += out.duals[i] * lp.rows[i].rhs;
    if (dual_value != out.value)
        throw model_error("internal: duality gap in the exact simplex");
    return out;
}

}  // namespace corridor
