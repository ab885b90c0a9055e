#pragma once

#include <vector>

#include "aoi/correlated.hpp"
#include "aoi/stage_game.hpp"

namespace aoi {

struct LpInstance {
  std::vector<double> ages;
  SlotLengths sl;
};

struct LpSolution {
  ProbabilityVector vector;
  double objective = 0.0;
};

// Exact solver for the one-stage problem, independent of the closed forms:
// maximizes the sum of expected payoffs over the simplex intersected with
// the n individual-rationality half-spaces. Enumerates every basic feasible
// solution of the (n+2)-variable LP (the simplex equality plus n+1 active
// constraints drawn from nonnegativity and IR) and returns the best vertex.
// Exact up to linear-solve rounding; requires n <= 8. Throws
// std::logic_error if no feasible vertex exists (cannot happen for valid
// instances; any occurrence is a solver bug).
LpSolution solve_exact(const LpInstance& inst);

// Best feasible point on the uniform simplex grid with `resolution`
// subdivisions. Sanity check for the vertex enumerator: its objective can
// trail solve_exact's by at most O(1/resolution) times the coefficient
// spread, and never exceeds it.
LpSolution grid_refine(const LpInstance& inst, int resolution);

}  // namespace aoi
