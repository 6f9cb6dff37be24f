#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "corridor/rational.hpp"

namespace corridor {

enum class RowSense { Le, Ge, Eq };

struct LpRow {
    std::vector<std::pair<int, Rational>> terms;  // (variable index, coefficient)
    RowSense sense = RowSense::Ge;
    Rational rhs;
};

// minimize c'x subject to the rows, x >= 0
struct LpProblem {
    int num_vars = 0;
    std::vector<Rational> objective;
    std::vector<LpRow> rows;
};

struct LpOutcome {
    bool feasible = false;
    Rational value;
    std::vector<Rational> x;
    std::vector<Rational> duals;  // one per row, original orientation
    std::size_t pivots = 0;
};

// Exact two-phase primal simplex over rationals with Bland's rule. Verifies strong
// duality (b'y == c'x) on every solve; throws model_error on an unbounded problem.
LpOutcome lp_solve_exact(const LpProblem& lp);

}  // namespace corridor
