#include "icsig/convex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace icsig {

// ---------------------------------------------------------------------------
// QuadraticFunction
// ---------------------------------------------------------------------------

void QuadraticFunction::add_rank1(const std::vector<int>& idx,
                                  const Eigen::VectorXd& u, double w) {
  for (std::size_t m = 0; m < idx.size(); ++m)
    for (std::size_t n = 0; n < idx.size(); ++n)
      quad_.push_back({idx[m], idx[n], 2.0 * w * u[static_cast<int>(m)] *
                                            u[static_cast<int>(n)]});
}

void QuadraticFunction::add_square(int i, double w) {
  quad_.push_back({i, i, 2.0 * w});
}

double QuadraticFunction::value(const Eigen::VectorXd& x) const {
  double v = constant_ + linear_.dot(x);
  for (const Triplet& t : quad_) v += 0.5 * t.v * x[t.i] * x[t.j];
  return v;
}

void QuadraticFunction::gradient(const Eigen::VectorXd& x, Eigen::VectorXd& g) const {
  g = linear_;
  for (const Triplet& t : quad_) g[t.i] += t.v * x[t.j];
}

void QuadraticFunction::add_hessian(const Eigen::VectorXd&, double w,
                                    Eigen::MatrixXd& h) const {
  for (const Triplet& t : quad_) h(t.i, t.j) += w * t.v;
}

double QuadraticFunction::min_quad_eigenvalue() const {
  const int n = static_cast<int>(linear_.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (const Triplet& t : quad_) h(t.i, t.j) += t.v;
  if (h.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

namespace {

/// (1/D) sum_i Q(t_i / 2) + base - t_epigraph <= 0.
class SerBoundConstraint final : public SmoothFunction {
 public:
  SerBoundConstraint(std::vector<int> t_indices, int epigraph_index, double inv_d,
                     double base)
      : t_indices_(std::move(t_indices)),
        epigraph_index_(epigraph_index),
        inv_d_(inv_d),
        base_(base) {}

  double value(const Eigen::VectorXd& x) const override {
    double v = base_ - x[epigraph_index_];
    for (int i : t_indices_) v += inv_d_ * qfunc(0.5 * x[i]);
    return v;
  }

  void gradient(const Eigen::VectorXd& x, Eigen::VectorXd& g) const override {
    g.setZero();
    g[epigraph_index_] = -1.0;
    // dQ(t/2)/dt = -phi(t/2)/2
    for (int i : t_indices_) g[i] = -0.5 * inv_d_ * normal_pdf(0.5 * x[i]);
  }

  void add_hessian(const Eigen::VectorXd& x, double w, Eigen::MatrixXd& h) const override {
    // d^2 Q(t/2)/dt^2 = (t/2) phi(t/2) / 4
    for (int i : t_indices_)
      h(i, i) += w * 0.25 * inv_d_ * 0.5 * x[i] * normal_pdf(0.5 * x[i]);
  }

 private:
  std::vector<int> t_indices_;
  int epigraph_index_;
  double inv_d_;
  double base_;
};

// Barrier merit in mu-scaled form, f0 + mu * sum -log(-f_i), so the
// objective keeps its natural scale throughout the schedule.
double evaluate_merit(const BarrierProblem& problem, double mu,
                      const Eigen::VectorXd& x, bool* feasible) {
  double barrier = 0.0;
  *feasible = true;
  for (const auto& c : problem.constraints) {
    const double f = c->value(x);
    if (!(f < 0.0)) {
      *feasible = false;
      return std::numeric_limits<double>::infinity();
    }
    barrier -= std::log(-f);
  }
  return problem.objective->value(x) + mu * barrier;
}

}  // namespace

// ---------------------------------------------------------------------------
// Barrier solver
// ---------------------------------------------------------------------------

SolverPoint barrier_solve(const BarrierProblem& problem, const Eigen::VectorXd& x0,
                          const BarrierOptions& options, SolveInfo* info) {
  const int n = problem.dimension;
  const int m = static_cast<int>(problem.constraints.size());
  Eigen::VectorXd x = x0;

  {
    bool feasible = true;
    evaluate_merit(problem, 1.0, x, &feasible);
    if (!feasible) throw SolverError("barrier solve: start point is not strictly feasible", 0.0);
  }

  SolveInfo local;
  SolveInfo& out = info ? *info : local;
  out = SolveInfo{};

  Eigen::VectorXd grad(n), gi(n), step(n), xtrial(n);
  Eigen::MatrixXd hess(n, n);

  int stage = 0;
  for (double mu = options.mu_initial; mu >= options.mu_final * (1.0 - 1e-12);
       mu *= options.mu_factor, ++stage) {
    const bool last_stage = mu * options.mu_factor < options.mu_final * (1.0 - 1e-12);
    bool stage_done = false;
    double decrement2 = 0.0;
    double best_grad_norm = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < options.max_newton_per_stage; ++iter) {
      // assemble barrier gradient and Hessian (mu-scaled form)
      problem.objective->gradient(x, grad);
      hess.setZero();
      problem.objective->add_hessian(x, 1.0, hess);
      for (int i = 0; i < m; ++i) {
        const SmoothFunction& c = *problem.constraints[i];
        const double f = c.value(x);
        c.gradient(x, gi);
        const double dual = mu / (-f);
        grad.noalias() += dual * gi;
        hess.noalias() += (dual / (-f)) * (gi * gi.transpose());
        c.add_hessian(x, dual, hess);
      }

      // Newton direction with an escalating ridge fallback
      double ridge = 0.0;
      for (;;) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(
            ridge > 0.0 ? Eigen::MatrixXd(hess + ridge * Eigen::MatrixXd::Identity(n, n))
                        : hess);
        step = ldlt.solve(-grad);
        if (ldlt.info() == Eigen::Success && step.allFinite()) break;
        ridge = ridge == 0.0 ? 1e-10 * std::max(1.0, hess.trace() / n) : ridge * 100.0;
        if (ridge > 1e6)
          throw SolverError("barrier solve: Newton system is numerically singular",
                            grad.norm());
      }

      decrement2 = -grad.dot(step);
      if (decrement2 * 0.5 <= options.newton_tol) {
        // The decrement bounds the centering gap, but stiff active-constraint
        // curvature can hide a sizeable stationarity vector behind a tiny
        // step. On the last stage keep taking (cheap, feasible) steps while
        // the gradient still shrinks; it is the KKT stationarity certificate.
        const double grad_norm = grad.lpNorm<Eigen::Infinity>();
        if (!last_stage || grad_norm <= options.stationarity_target ||
            grad_norm >= 0.5 * best_grad_norm) {
          stage_done = true;
          break;
        }
        best_grad_norm = std::min(best_grad_norm, grad_norm);
      }

      bool accepted = false;
      if (decrement2 <= 1e-4) {
        // quadratic-convergence region: merit differences fall below the
        // floating-point resolution, so step on feasibility alone
        double beta = 1.0;
        for (int bt = 0; bt < options.max_backtracks; ++bt) {
          xtrial = x + beta * step;
          bool feasible = true;
          evaluate_merit(problem, mu, xtrial, &feasible);
          if (feasible) {
            accepted = true;
            break;
          }
          beta *= options.backtrack;
        }
      } else {
        bool start_feasible = true;
        const double merit0 = evaluate_merit(problem, mu, x, &start_feasible);
        const double slope = grad.dot(step);  // negative
        double beta = 1.0;
        for (int bt = 0; bt < options.max_backtracks; ++bt) {
          xtrial = x + beta * step;
          bool feasible = true;
          const double merit = evaluate_merit(problem, mu, xtrial, &feasible);
          if (feasible && merit <= merit0 + options.armijo_c * beta * slope) {
            accepted = true;
            break;
          }
          beta *= options.backtrack;
        }
      }
      if (!accepted)
        throw SolverError("barrier solve: line search failed", decrement2);

      x = xtrial;
      ++out.newton_iterations;
      if (options.record_trace) {
        bool dummy = true;
        out.trace.push_back({stage, iter, mu, problem.objective->value(x),
                             decrement2, evaluate_merit(problem, mu, x, &dummy)});
      }
    }
    if (!stage_done)
      throw SolverError("barrier solve: Newton budget exhausted at mu=" +
                            std::to_string(mu),
                        decrement2);
  }

  SolverPoint point;
  point.x = x;
  point.duals.resize(m);
  const double mu_end = options.mu_final;
  for (int i = 0; i < m; ++i)
    point.duals[i] = mu_end / (-problem.constraints[i]->value(x));

  // dual polish: refit the multipliers of the near-active constraints by
  // least squares (with active-set pruning of negative weights) so the
  // stationarity certificate is not limited by the floating-point floor of
  // the last Newton stage; keep the polished duals only if they certify a
  // smaller residual
  const double raw_residual = kkt_residual(problem, point);
  const double max_dual = point.duals.maxCoeff();
  std::vector<int> active;
  for (int i = 0; i < m; ++i)
    if (point.duals[i] >= 1e-6 * max_dual) active.push_back(i);
  SolverPoint polished = point;
  for (int round = 0; round < 8 && !active.empty(); ++round) {
    Eigen::MatrixXd g_active(n, active.size());
    for (std::size_t j = 0; j < active.size(); ++j) {
      problem.constraints[active[j]]->gradient(x, gi);
      g_active.col(static_cast<Eigen::Index>(j)) = gi;
    }
    problem.objective->gradient(x, grad);
    const Eigen::VectorXd ls = g_active.colPivHouseholderQr().solve(-grad);
    std::vector<int> keep;
    for (std::size_t j = 0; j < active.size(); ++j)
      if (ls[static_cast<Eigen::Index>(j)] >= 0.0) keep.push_back(active[j]);
    if (keep.size() == active.size()) {
      for (std::size_t j = 0; j < active.size(); ++j)
        polished.duals[active[j]] = ls[static_cast<Eigen::Index>(j)];
      break;
    }
    active.swap(keep);
  }
  const double polished_residual = kkt_residual(problem, polished);
  if (polished_residual < raw_residual) point = polished;

  out.converged = true;
  out.kkt_residual = std::min(polished_residual, raw_residual);
  return point;
}

double kkt_residual(const BarrierProblem& problem, const SolverPoint& point) {
  const int n = problem.dimension;
  const int m = static_cast<int>(problem.constraints.size());
  Eigen::VectorXd stat(n), gi(n);
  problem.objective->gradient(point.x, stat);
  double feas = 0.0;
  double comp = 0.0;
  for (int i = 0; i < m; ++i) {
    const SmoothFunction& c = *problem.constraints[i];
    const double f = c.value(point.x);
    c.gradient(point.x, gi);
    stat.noalias() += point.duals[i] * gi;
    feas = std::max(feas, f);
    comp = std::max(comp, std::abs(point.duals[i] * f));
  }
  return std::max({stat.lpNorm<Eigen::Infinity>(), std::max(feas, 0.0), comp});
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "stage,iteration,mu,objective,decrement,merit\n";
  char buf[160];
  for (const TraceRow& row : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.3e,%.12e,%.6e,%.12e\n", row.stage,
                  row.newton_iter, row.mu, row.objective, row.decrement, row.merit);
    out << buf;
  }
}

// ---------------------------------------------------------------------------
// Subproblem assembly
// ---------------------------------------------------------------------------

namespace {

constexpr double kPowerShrink = 1e-7;  // strict-interior margin on the budget
constexpr double kTLowerBound = 1e-12;

int a_index(int user, int row, int col) { return 1 + 4 * user + 2 * col + row; }

void add_row_terms(QuadraticFunction& q, const ChannelRealization& ch, int k,
                   const Eigen::Vector2d& b, const Eigen::Vector2d& row) {
  q.add_constant(0.5 * ch.noise_powers[k] * b.squaredNorm());
  for (int l = 0; l < ch.users; ++l) {
    if (l == k) continue;
    const Eigen::Vector2d u = rotation(relative_phase(ch, k, l)).transpose() * b;
    const double w = ch.magnitudes(k, l) * ch.magnitudes(k, l);
    q.add_rank1({a_index(l, 0, 0), a_index(l, 1, 0)}, u, w);
    q.add_rank1({a_index(l, 0, 1), a_index(l, 1, 1)}, u, w);
  }
  const double hkk = ch.magnitudes(k, k);
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n)
      q.add_linear(a_index(k, m, n), -2.0 * hkk * b[m] * row[n]);
}

std::unique_ptr<QuadraticFunction> make_power_constraint(int dim, int user, double budget) {
  auto q = std::make_unique<QuadraticFunction>(dim);
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) q->add_square(a_index(user, m, n), 1.0);
  q->add_constant(-budget);
  return q;
}

void check_convexity(const BarrierProblem& problem) {
  for (const auto& c : problem.constraints) {
    if (const auto* q = dynamic_cast<const QuadraticFunction*>(c.get())) {
      if (q->min_quad_eigenvalue() < -1e-12)
        throw std::logic_error("subproblem constraint has an indefinite quadratic term");
    }
  }
}

void validate_inputs(const ChannelRealization& ch,
                     const std::vector<Eigen::Matrix2Xd>& b,
                     const std::vector<DifferenceMatrix>& rows) {
  if (static_cast<int>(b.size()) != ch.users ||
      static_cast<int>(rows.size()) != ch.users)
    throw ConfigError("per-user auxiliary/row data does not match the user count");
  for (int k = 0; k < ch.users; ++k) {
    if (ch.power_budgets[k] <= 0.0 || ch.noise_powers[k] <= 0.0)
      throw ConfigError("power budgets and noise powers must be positive");
    if (b[k].cols() != rows[k].count())
      throw ConfigError("auxiliary matrix column count must match the row count");
    if (!b[k].allFinite())
      throw ConfigError("auxiliary matrix must be finite");
  }
}

PrecoderSet shrink_to_interior(const PrecoderSet& p, const Eigen::VectorXd& budgets) {
  PrecoderSet out = p;
  for (int k = 0; k < out.users(); ++k) {
    const double tr = out.matrices[k].squaredNorm();
    const double cap = budgets[k] * (1.0 - kPowerShrink);
    if (tr > cap) out.matrices[k] *= std::sqrt(cap / tr);
  }
  return out;
}

Eigen::VectorXd pack_precoders(int dim, const PrecoderSet& p, double head) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  x[0] = head;
  for (int k = 0; k < p.users(); ++k)
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n) x[a_index(k, m, n)] = p.matrices[k](m, n);
  return x;
}

PrecoderSet extract_precoders(const Eigen::VectorXd& x, int users) {
  PrecoderSet p;
  p.matrices.resize(users);
  for (int k = 0; k < users; ++k)
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n) p.matrices[k](m, n) = x[a_index(k, m, n)];
  return p;
}

}  // namespace

SubproblemPs1 SubproblemPs1::build(const ChannelRealization& ch,
                                   const std::vector<Eigen::Matrix2Xd>& b,
                                   const std::vector<DifferenceMatrix>& rows) {
  validate_inputs(ch, b, rows);
  SubproblemPs1 sp;
  sp.users = ch.users;
  sp.budgets = ch.power_budgets;
  const int dim = 1 + 4 * ch.users;
  sp.problem.dimension = dim;
  auto objective = std::make_unique<QuadraticFunction>(dim);
  objective->add_linear(0, 1.0);  // minimize alpha
  sp.problem.objective = std::move(objective);

  for (int k = 0; k < ch.users; ++k) {
    sp.row_counts.push_back(rows[k].count());
    for (int i = 0; i < rows[k].count(); ++i) {
      auto q = std::make_unique<QuadraticFunction>(dim);
      add_row_terms(*q, ch, k, b[k].col(i), rows[k].rows[i]);
      q->add_linear(0, -1.0);  // ... <= alpha
      sp.problem.constraints.push_back(std::move(q));
    }
  }
  for (int k = 0; k < ch.users; ++k)
    sp.problem.constraints.push_back(make_power_constraint(dim, k, ch.power_budgets[k]));
  check_convexity(sp.problem);
  return sp;
}

Eigen::VectorXd SubproblemPs1::pack(const PrecoderSet& p, double alpha) const {
  return pack_precoders(problem.dimension, p, alpha);
}

PrecoderSet SubproblemPs1::extract(const Eigen::VectorXd& x) const {
  return extract_precoders(x, users);
}

double SubproblemPs1::max_constraint_lhs(const PrecoderSet& p) const {
  const Eigen::VectorXd x = pack(p, 0.0);
  double worst = -std::numeric_limits<double>::infinity();
  int idx = 0;
  for (int k = 0; k < users; ++k)
    for (int i = 0; i < row_counts[k]; ++i, ++idx)
      worst = std::max(worst, problem.constraints[idx]->value(x));
  return worst;
}

Ps1Solution solve_ps1(const SubproblemPs1& sp, const PrecoderSet& warm_start,
                      const BarrierOptions& options) {
  const PrecoderSet start = shrink_to_interior(warm_start, sp.budgets);
  Eigen::VectorXd x0 = sp.pack(start, 0.0);
  double max_g = -std::numeric_limits<double>::infinity();
  int idx = 0;
  for (int k = 0; k < sp.users; ++k)
    for (int i = 0; i < sp.row_counts[k]; ++i, ++idx)
      max_g = std::max(max_g, sp.problem.constraints[idx]->value(x0));
  x0[0] = max_g + 1.0 + 0.1 * std::abs(max_g);

  Ps1Solution sol;
  sol.point = barrier_solve(sp.problem, x0, options, &sol.info);
  sol.precoders = sp.extract(sol.point.x);
  sol.alpha = sol.point.x[0];
  return sol;
}

SubproblemPs2 SubproblemPs2::build(const ChannelRealization& ch,
                                   const std::vector<Eigen::Matrix2Xd>& b,
                                   const std::vector<DifferenceMatrix>& rows) {
  validate_inputs(ch, b, rows);
  SubproblemPs2 sp;
  sp.users = ch.users;
  sp.budgets = ch.power_budgets;
  sp.channel = ch;
  sp.aux = b;
  sp.difference_rows = rows;

  int dim = 1 + 4 * ch.users;
  sp.pinned.resize(ch.users);
  sp.t_index.resize(ch.users);
  for (int k = 0; k < ch.users; ++k) {
    sp.row_counts.push_back(rows[k].count());
    for (int i = 0; i < rows[k].count(); ++i) {
      const bool pin = b[k].col(i).norm() <= 1e-14;
      sp.pinned[k].push_back(pin);
      sp.t_index[k].push_back(pin ? -1 : dim++);
    }
  }
  sp.problem.dimension = dim;
  auto objective = std::make_unique<QuadraticFunction>(dim);
  objective->add_linear(0, 1.0);  // minimize t
  sp.problem.objective = std::move(objective);

  // quadratic rows: g_ki(A) + t_ki^2 <= 0
  for (int k = 0; k < ch.users; ++k)
    for (int i = 0; i < sp.row_counts[k]; ++i) {
      if (sp.pinned[k][i]) continue;
      auto q = std::make_unique<QuadraticFunction>(dim);
      add_row_terms(*q, ch, k, b[k].col(i), rows[k].rows[i]);
      q->add_square(sp.t_index[k][i], 1.0);
      sp.problem.constraints.push_back(std::move(q));
    }
  // per-user SER bound
  for (int k = 0; k < ch.users; ++k) {
    std::vector<int> tvars;
    int n_pinned = 0;
    for (int i = 0; i < sp.row_counts[k]; ++i) {
      if (sp.pinned[k][i])
        ++n_pinned;
      else
        tvars.push_back(sp.t_index[k][i]);
    }
    const double inv_d = 1.0 / sp.row_counts[k];
    sp.problem.constraints.push_back(std::make_unique<SerBoundConstraint>(
        std::move(tvars), 0, inv_d, 0.5 * n_pinned * inv_d));
  }
  // t_ki lower bounds
  for (int k = 0; k < ch.users; ++k)
    for (int i = 0; i < sp.row_counts[k]; ++i) {
      if (sp.pinned[k][i]) continue;
      auto q = std::make_unique<QuadraticFunction>(dim);
      q->add_linear(sp.t_index[k][i], -1.0);
      q->add_constant(kTLowerBound);
      sp.problem.constraints.push_back(std::move(q));
    }
  for (int k = 0; k < ch.users; ++k)
    sp.problem.constraints.push_back(make_power_constraint(dim, k, ch.power_budgets[k]));
  check_convexity(sp.problem);
  return sp;
}

PrecoderSet SubproblemPs2::extract(const Eigen::VectorXd& x) const {
  return extract_precoders(x, users);
}

std::vector<Eigen::VectorXd> SubproblemPs2::quadratic_lhs(const PrecoderSet& p) const {
  // evaluate the quadratic constraints with all t variables at zero
  Eigen::VectorXd x = pack_precoders(problem.dimension, p, 0.0);
  std::vector<Eigen::VectorXd> g(users);
  int idx = 0;
  for (int k = 0; k < users; ++k) {
    g[k] = Eigen::VectorXd::Zero(row_counts[k]);
    for (int i = 0; i < row_counts[k]; ++i) {
      if (pinned[k][i]) continue;  // constant zero row
      g[k][i] = problem.constraints[idx]->value(x);
      ++idx;
    }
  }
  return g;
}

Ps2Solution solve_ps2(const SubproblemPs2& sp, const PrecoderSet& warm_start,
                      const BarrierOptions& options) {
  PrecoderSet start = shrink_to_interior(warm_start, sp.budgets);
  std::vector<Eigen::VectorXd> g = sp.quadratic_lhs(start);

  auto min_slack = [&sp](const std::vector<Eigen::VectorXd>& lhs) {
    double slack = std::numeric_limits<double>::infinity();
    for (int k = 0; k < sp.users; ++k)
      for (int i = 0; i < sp.row_counts[k]; ++i)
        if (!sp.pinned[k][i]) slack = std::min(slack, -lhs[k][i]);
    return slack;
  };

  if (min_slack(g) <= 4e-24) {
    // The warm start is outside {A : g_ki(A) < 0}. Phase I: minimize the
    // worst quadratic row over the power region (the Ps1 program on the same
    // data) and restart from its solution.
    const SubproblemPs1 phase1 =
        SubproblemPs1::build(sp.channel, sp.aux, sp.difference_rows);
    const Ps1Solution relaxed = solve_ps1(phase1, start, options);
    start = shrink_to_interior(relaxed.precoders, sp.budgets);
    g = sp.quadratic_lhs(start);
    if (min_slack(g) <= 4e-24)
      throw SolverError("ps2: no strictly feasible slack exists", min_slack(g));
  }

  Eigen::VectorXd x0 = pack_precoders(sp.problem.dimension, start, 0.0);
  double worst_ser = 0.0;
  for (int k = 0; k < sp.users; ++k) {
    double ser = 0.0;
    for (int i = 0; i < sp.row_counts[k]; ++i) {
      if (sp.pinned[k][i]) {
        ser += 0.5;
        continue;
      }
      const double slack = -g[k][i];
      const double t0 = std::max(0.9 * std::sqrt(slack), 2.0 * kTLowerBound);
      x0[sp.t_index[k][i]] = t0;
      ser += qfunc(0.5 * t0);
    }
    worst_ser = std::max(worst_ser, ser / sp.row_counts[k]);
  }
  x0[0] = worst_ser + std::max(1e-9, 0.05 * worst_ser);

  Ps2Solution sol;
  sol.point = barrier_solve(sp.problem, x0, options, &sol.info);
  sol.precoders = sp.extract(sol.point.x);
  sol.t = sol.point.x[0];
  sol.t_values.resize(sp.users);
  for (int k = 0; k < sp.users; ++k) {
    sol.t_values[k] = Eigen::VectorXd::Zero(sp.row_counts[k]);
    for (int i = 0; i < sp.row_counts[k]; ++i) {
      if (sp.pinned[k][i]) continue;
      double t = sol.point.x[sp.t_index[k][i]];
      if (t < 0.0) {
        t = 0.0;
        sol.clipped = true;
      }
      sol.t_values[k][i] = t;
    }
  }
  return sol;
}

}  // namespace icsig
