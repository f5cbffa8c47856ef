#pragma once

#include "rampflex/lp_problem.hpp"

#include <cstddef>

namespace rampflex {

struct SimplexOptions {
    double feasibility_tol = 1e-6;   // on equilibrated rows, absolute
    double optimality_tol = 1e-9;    // on reduced costs
    double pivot_tol = 1e-9;         // smallest tableau entry accepted as a pivot
    std::size_t max_iterations = 200000;
};

/// Bounded-variable primal simplex on a dense exchange tableau.
///
/// Rows are equilibrated by their largest coefficient and given slack
/// variables in [0, +inf). Nonbasic structurals start at the point of their
/// box closest to zero. Phase one minimises the sum of bound violations of the
/// basic variables; phase two minimises f'x. Pricing is Dantzig's rule, with
/// Bland's rule taking over for entering and leaving choices while pivots are
/// degenerate, so the method terminates and is a pure function of its input.
///
/// A problem whose optimum leans on a sentinel bound (|bound| >= 1e9 with a
/// nonzero reduced cost pushing through it) is reported as UNBOUNDED.
///
/// Throws std::invalid_argument when validate_lp reports any diagnostic.
LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options = {});

}  // namespace rampflex
