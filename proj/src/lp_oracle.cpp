#include "aoi/lp_oracle.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aoi {
namespace {

constexpr double kFeasSlack = 1e-9;   // allowed constraint violation
constexpr double kPivotEps = 1e-11;   // singular-system threshold

// Linear description of one instance, over variables
// x = (p_1 .. p_n, p_I, p_C):
//   expected age of source k:  E_k(x) = age_rows[k] . x
//   individual rationality:    E_k(x) <= bounds[k]
//   objective (maximize):      obj . x  ( = -sum_k E_k(x) )
struct Coefficients {
  std::vector<std::vector<double>> age_rows;
  std::vector<double> bounds;
  std::vector<double> obj;
};

Coefficients build_coefficients(const LpInstance& inst) {
  const int n = static_cast<int>(inst.ages.size());
  const int dim = n + 2;
  Coefficients c;
  c.age_rows.assign(n, std::vector<double>(dim, 0.0));
  c.bounds.resize(n);
  c.obj.assign(dim, 0.0);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      c.age_rows[k][j] =
          (j == k) ? inst.sl.success : inst.ages[k] + inst.sl.success;
    }
    c.age_rows[k][n] = inst.ages[k] + inst.sl.idle;
    c.age_rows[k][n + 1] = inst.ages[k] + inst.sl.collision;
    c.bounds[k] = -minmax_payoff(inst.ages[k], n, inst.sl);
    for (int i = 0; i < dim; ++i) c.obj[i] -= c.age_rows[k][i];
  }
  return c;
}

// Gaussian elimination with partial pivoting on [A | b]; returns false if
// the system is singular at kPivotEps.
bool solve_linear(std::vector<std::vector<double>>& a, std::vector<double>& b,
                  std::vector<double>& x) {
  const int dim = static_cast<int>(b.size());
  for (int col = 0; col < dim; ++col) {
    int pivot = col;
    for (int r = col + 1; r < dim; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < kPivotEps) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < dim; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int cc = col; cc < dim; ++cc) a[r][cc] -= f * a[col][cc];
      b[r] -= f * b[col];
    }
  }
  x.assign(dim, 0.0);
  for (int r = dim - 1; r >= 0; --r) {
    double acc = b[r];
    for (int cc = r + 1; cc < dim; ++cc) acc -= a[r][cc] * x[cc];
    x[r] = acc / a[r][r];
  }
  return true;
}

bool feasible_point(const Coefficients& c, const std::vector<double>& x) {
  for (double v : x) {
    if (v < -kFeasSlack) return false;
  }
  for (std::size_t k = 0; k < c.age_rows.size(); ++k) {
    double e = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) e += c.age_rows[k][i] * x[i];
    if (e > c.bounds[k] + kFeasSlack) return false;
  }
  return true;
}

ProbabilityVector to_vector(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size()) - 2;
  ProbabilityVector p;
  p.success.resize(n);
  auto clamp01 = [](double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); };
  for (int k = 0; k < n; ++k) p.success[k] = clamp01(x[k]);
  p.idle = clamp01(x[n]);
  p.collision = clamp01(x[n + 1]);
  return p;
}

double sum_payoff(const ProbabilityVector& p, const LpInstance& inst) {
  const std::vector<double> u = expected_payoffs(p, inst.ages, inst.sl);
  return std::accumulate(u.begin(), u.end(), 0.0);
}

}  // namespace

LpSolution solve_exact(const LpInstance& inst) {
  check_ages(inst.ages, inst.sl);
  const int n = static_cast<int>(inst.ages.size());
  if (n > 8) {
    throw std::invalid_argument("solve_exact supports at most 8 sources");
  }
  const int dim = n + 2;
  const int num_ineq = 2 * n + 2;  // dim nonnegativity rows + n IR rows
  const Coefficients c = build_coefficients(inst);

  bool found = false;
  double best_obj = 0.0;
  std::vector<double> best_x;

  // Walk (n+1)-subsets of the inequality constraints in lexicographic
  // order; together with the simplex equality each nonsingular subset pins
  // one candidate vertex. Ties keep the first vertex found.
  std::vector<int> pick(dim - 1);
  std::iota(pick.begin(), pick.end(), 0);
  std::vector<std::vector<double>> a;
  std::vector<double> b, x;
  for (;;) {
    a.assign(dim, std::vector<double>(dim, 1.0));  // row 0: sum(x) = 1
    b.assign(dim, 0.0);
    b[0] = 1.0;
    for (int r = 0; r < dim - 1; ++r) {
      const int idx = pick[r];
      if (idx < dim) {
        for (int i = 0; i < dim; ++i) a[r + 1][i] = (i == idx) ? 1.0 : 0.0;
        b[r + 1] = 0.0;
      } else {
        a[r + 1] = c.age_rows[idx - dim];
        b[r + 1] = c.bounds[idx - dim];
      }
    }
    if (solve_linear(a, b, x) && feasible_point(c, x)) {
      double obj = 0.0;
      for (int i = 0; i < dim; ++i) obj += c.obj[i] * x[i];
      if (!found || obj > best_obj) {
        found = true;
        best_obj = obj;
        best_x = x;
      }
    }

    // next combination
    int pos = dim - 2;
    while (pos >= 0 && pick[pos] == num_ineq - (dim - 1) + pos) --pos;
    if (pos < 0) break;
    ++pick[pos];
    for (int r = pos + 1; r < dim - 1; ++r) pick[r] = pick[r - 1] + 1;
  }

  if (!found) {
    throw std::logic_error(
        "no feasible vertex found; the one-stage LP is never infeasible, "
        "this is a solver bug");
  }
  LpSolution sol;
  sol.vector = to_vector(best_x);
  sol.objective = sum_payoff(sol.vector, inst);
  return sol;
}

LpSolution grid_refine(const LpInstance& inst, int resolution) {
  check_ages(inst.ages, inst.sl);
  if (resolution < 1) throw std::invalid_argument("resolution must be >= 1");
  const int dim = static_cast<int>(inst.ages.size()) + 2;
  const Coefficients c = build_coefficients(inst);
  const double inv_res = 1.0 / resolution;

  bool found = false;
  double best_obj = 0.0;
  std::vector<double> x(dim, 0.0), best_x;

  // Enumerate all compositions of `resolution` into dim nonnegative parts.
  auto walk = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == dim - 1) {
      x[pos] = remaining * inv_res;
      if (feasible_point(c, x)) {
        double obj = 0.0;
        for (int i = 0; i < dim; ++i) obj += c.obj[i] * x[i];
        if (!found || obj > best_obj) {
          found = true;
          best_obj = obj;
          best_x = x;
        }
      }
      return;
    }
    for (int count = 0; count <= remaining; ++count) {
      x[pos] = count * inv_res;
      self(self, pos + 1, remaining - count);
    }
  };
  walk(walk, 0, resolution);

  if (!found) {
    throw std::logic_error("no feasible grid point; solver bug");
  }
  LpSolution sol;
  sol.vector = to_vector(best_x);
  sol.objective = sum_payoff(sol.vector, inst);
  return sol;
}

}  // namespace aoi
