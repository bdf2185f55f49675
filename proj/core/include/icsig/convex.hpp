#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "icsig/channel.hpp"
#include "icsig/constellation.hpp"
#include "icsig/metrics.hpp"

namespace icsig {

/// Twice-differentiable scalar function of the solver variable, used both for
/// objectives and for constraints in the form f(x) <= 0.
class SmoothFunction {
 public:
  virtual ~SmoothFunction() = default;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  /// Overwrites g with the gradient at x.
  virtual void gradient(const Eigen::VectorXd& x, Eigen::VectorXd& g) const = 0;
  /// Accumulates h += w * hessian(x).
  virtual void add_hessian(const Eigen::VectorXd& x, double w,
                           Eigen::MatrixXd& h) const = 0;
};

/// 0.5 x^T H x + c^T x + r with a constant Hessian stored as symmetric
/// triplets. Covers every quadratic constraint and objective in this module.
class QuadraticFunction final : public SmoothFunction {
 public:
  explicit QuadraticFunction(int dimension)
      : linear_(Eigen::VectorXd::Zero(dimension)) {}

  /// Adds w * (u^T x_idx)^2 to the form.
  void add_rank1(const std::vector<int>& idx, const Eigen::VectorXd& u, double w);
  /// Adds w * x_i^2.
  void add_square(int i, double w);
  void add_linear(int i, double v) { linear_[i] += v; }
  void add_constant(double v) { constant_ += v; }

  double value(const Eigen::VectorXd& x) const override;
  void gradient(const Eigen::VectorXd& x, Eigen::VectorXd& g) const override;
  void add_hessian(const Eigen::VectorXd& x, double w, Eigen::MatrixXd& h) const override;

  /// Smallest eigenvalue of the quadratic term (dense assembly; build-time
  /// convexity guard).
  double min_quad_eigenvalue() const;

 private:
  struct Triplet {
    int i, j;
    double v;  // contribution to H(i,j); symmetric pairs stored explicitly
  };
  std::vector<Triplet> quad_;
  Eigen::VectorXd linear_;
  double constant_ = 0.0;
};

struct BarrierOptions {
  double mu_initial = 1.0;
  double mu_final = 1e-9;
  double mu_factor = 0.1;
  int max_newton_per_stage = 200;
  double newton_tol = 1e-13;  // stage ends when decrement^2 / 2 drops below
  double stationarity_target = 1e-9;  // gradient polish goal on the last stage
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  bool record_trace = false;
};

struct TraceRow {
  int stage = 0;
  int newton_iter = 0;
  double mu = 0.0;
  double objective = 0.0;
  double decrement = 0.0;
  double merit = 0.0;  // barrier merit after the accepted step
};

struct SolverPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd duals;  // one multiplier per constraint
};

struct SolveInfo {
  bool converged = false;
  int newton_iterations = 0;
  double kkt_residual = 0.0;
  std::vector<TraceRow> trace;
};

/// min objective(x) s.t. constraints[i](x) <= 0. Convex by construction.
struct BarrierProblem {
  int dimension = 0;
  std::unique_ptr<SmoothFunction> objective;
  std::vector<std::unique_ptr<SmoothFunction>> constraints;
};

/// Log-barrier interior point with damped Newton steps. x0 must be strictly
/// feasible. Deterministic: fixed barrier schedule, no randomness. Throws
/// SolverError when a stage exceeds the Newton budget.
SolverPoint barrier_solve(const BarrierProblem& problem, const Eigen::VectorXd& x0,
                          const BarrierOptions& options = {},
                          SolveInfo* info = nullptr);

/// Max of the stationarity / primal feasibility / complementary slackness
/// residual norms at the given primal-dual point.
double kkt_residual(const BarrierProblem& problem, const SolverPoint& point);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

// ---------------------------------------------------------------------------
// Inner subproblems of the alternating precoder designs.
// ---------------------------------------------------------------------------

/// Epigraph program: min alpha subject to, for every user k and constraint
/// row i,
///   sigma_k^2/2 |b_ki|^2
///     + sum_{l != k} |h_kl|^2 [ (b_ki^T J(phi_kl) a_l1)^2 + (b_ki^T J(phi_kl) a_l2)^2 ]
///     - 2 |h_kk| b_ki^T A_k q_ki  <=  alpha,
/// and trace(A_k A_k^T) <= P_k. Variables: [alpha, vec(A_1..A_K)].
struct SubproblemPs1 {
  int users = 0;
  std::vector<int> row_counts;
  Eigen::VectorXd budgets;
  BarrierProblem problem;

  static SubproblemPs1 build(const ChannelRealization& ch,
                             const std::vector<Eigen::Matrix2Xd>& b,
                             const std::vector<DifferenceMatrix>& rows);

  Eigen::VectorXd pack(const PrecoderSet& p, double alpha) const;
  PrecoderSet extract(const Eigen::VectorXd& x) const;
  /// Max over (k,i) of the constraint left-hand side at the given precoders.
  double max_constraint_lhs(const PrecoderSet& p) const;
};

struct Ps1Solution {
  PrecoderSet precoders;
  double alpha = 0.0;
  SolverPoint point;
  SolveInfo info;
};

Ps1Solution solve_ps1(const SubproblemPs1& sp, const PrecoderSet& warm_start,
                      const BarrierOptions& options = {});

/// Same data as Ps1 but over the full difference rows, with one slack t_ki
/// per row:
///   quadratic(k,i) <= -t_ki^2,  t_ki >= 0,
///   (1/D_k) sum_i Q(t_ki / 2) <= t,    trace(A_k A_k^T) <= P_k.
/// Variables: [t, vec(A), t_ki...]. Rows whose b column is numerically zero
/// are pinned to t_ki = 0 and contribute Q(0) to the SER constraint.
struct SubproblemPs2 {
  int users = 0;
  std::vector<int> row_counts;
  Eigen::VectorXd budgets;
  std::vector<std::vector<bool>> pinned;   // per user, per row
  std::vector<std::vector<int>> t_index;   // variable index or -1 when pinned
  BarrierProblem problem;
  // build inputs, kept for the phase-I restart in solve_ps2
  ChannelRealization channel;
  std::vector<Eigen::Matrix2Xd> aux;
  std::vector<DifferenceMatrix> difference_rows;

  static SubproblemPs2 build(const ChannelRealization& ch,
                             const std::vector<Eigen::Matrix2Xd>& b,
                             const std::vector<DifferenceMatrix>& rows);

  int a_offset() const { return 1; }
  int dimension() const { return problem.dimension; }
  PrecoderSet extract(const Eigen::VectorXd& x) const;
  /// Quadratic part g_ki(A) (without the t^2 term) for every row.
  std::vector<Eigen::VectorXd> quadratic_lhs(const PrecoderSet& p) const;
};

struct Ps2Solution {
  PrecoderSet precoders;
  std::vector<Eigen::VectorXd> t_values;  // per user, D_k entries (pinned = 0)
  double t = 0.0;                          // epigraph value (max SER bound)
  bool clipped = false;                    // any t rounded up from below zero
  SolverPoint point;
  SolveInfo info;
};

Ps2Solution solve_ps2(const SubproblemPs2& sp, const PrecoderSet& warm_start,
                      const BarrierOptions& options = {});

}  // namespace icsig
