#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "corridor/model.hpp"
#include "corridor/simplex.hpp"

namespace corridor {

enum class VarKind { PathUse, PossessionPick, SpanPick };

struct IpVar {
    std::string name;
    Rational cost;
    VarKind kind = VarKind::PathUse;
    Possession span;  // PathUse: that path; PossessionPick: the possession; SpanPick: the span
};

struct IpModel {
    // "path-possession": per-path use vars + per-possession pick vars with linking rows.
    // "span-cover": one var per connected span, covering rows only.
    // "window-cover": one var per index interval of a one-direction instance.
    std::string form;
    std::vector<IpVar> vars;
    std::vector<LpRow> rows;
    std::vector<std::string> row_names;
};

// Minimize the number of used paths; every job picks a possession; a pick forces
// every path it needs. `restrict_starts` keeps only possessions whose window start
// is the job's release or some job's latest start (one-direction instances only).
IpModel build_pim(const Instance& inst, bool restrict_starts = false);

// Minimize the total size of chosen spans; a span covers a job when it contains one
// of its possessions. Instances whose possessions are all single paths use single-path
// spans only; otherwise all connected spans over the family paths are enumerated.
IpModel build_scm(const Instance& inst, std::size_t span_budget = 2'000'000);

// Interval form of the span model for one-direction sliding-window instances.
// `restricted` keeps only intervals starting at a latest start, ending at a
// reachable window end or earliest end.
IpModel build_uniscm(const Instance& inst, bool restricted = false);

// Drops every span column whose coverage is contained in a cheaper-or-equal column
// (pure covering forms only; ties keep the earlier column).
IpModel dominate_columns(const IpModel& model);

struct LpReport {
    Rational value;
    std::vector<Rational> x;
    std::size_t pivots = 0;
};

// Exact LP relaxation of the model (throws model_error when infeasible).
LpReport lp_relaxation(const IpModel& model);

// Value of the path-possession relaxation computed with rows generated on demand in
// the path variables only: add a violated pick-combination row until none remains.
Rational pim_lp_value(const Instance& inst, std::size_t round_budget = 10'000);

struct BbOptions {
    std::size_t node_budget = 20'000;
    std::size_t time_budget_ms = 0;  // wall-clock limit; 0 means none
    // With a budget hit: throw (true) or return the rounded incumbent (false).
    bool require_optimal = true;
};

struct BbResult {
    Solution solution;
    Rational incumbent_value;  // objective of the incumbent in the model
    Rational best_bound;       // proven lower bound
    std::size_t nodes = 0;
    bool optimal = false;
};

// Exact best-first branch and bound by variable fixing; branches on the most
// fractional branchable variable (path vars for the path-possession form, span vars
// otherwise), ties to the lowest index. Deterministic.
BbResult bb_solve(const Instance& inst, const IpModel& model, const BbOptions& opts = {});

// Same optimum as bb_solve over build_pim, but working in the path variables only,
// with pick-combination rows added on demand (integral nodes that leave a job
// uncovered get a new row and are re-queued). Scales to instances whose explicit
// path-possession model would be too large to pivot exactly.
BbResult bb_solve_pim_cut(const Instance& inst, const BbOptions& opts = {});

// CPLEX-style LP file with binary variable declarations.
std::string emit_lp_file(const IpModel& model);

// (reference - value) / reference; throws model_error when reference is zero.
Rational relative_gap(const Rational& value, const Rational& reference);

}  // namespace corridor
