#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ohmpath/augment.hpp"
#include "ohmpath/error.hpp"
#include "ohmpath/network.hpp"

namespace ohmpath {

/// Weights of the two penalty terms plus the positive-part exponent.
/// p=2 keeps the objective continuously differentiable where currents
/// cross zero; p=1 reproduces the plain positive-part sums. Both have the
/// same zero set.
struct PenaltyWeights {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  int exponent = 2;
};

inline void check_weights(const PenaltyWeights& w) {
  if (!(w.alpha1 > 0.0) || !(w.alpha2 > 0.0))
    fail(ErrorCode::InvalidParameter, "penalty weights must be positive");
  if (w.exponent != 1 && w.exponent != 2)
    fail(ErrorCode::InvalidParameter, "exponent must be 1 or 2");
}

struct PenaltyReport {
  std::vector<double> outflow_per_node;
  std::vector<double> branch_per_node;
  std::vector<double> inflow_per_node;  // positive-part incoming flow, diagnostic
  double l_outflow{};
  double l_branch{};
  double total{};
  std::optional<std::vector<double>> gradient;
};

namespace detail {

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

inline double pow_p(double x, int p) { return p == 1 ? x : x * x; }

/// Per-node sums of w = (J^+)^p over outgoing arcs: S (= the out-flow O_i)
/// and the sum of squares of w, which closes the pairwise branching sum:
///   B_i = sum_{k<l} w_k w_l = (S^2 - sum w^2) / 2.
struct NodeFlow {
  std::vector<double> outflow;
  std::vector<double> sum_w_sq;
  std::vector<double> inflow;
};

inline NodeFlow node_flows(const NetworkSolution& sol, int p) {
  NodeFlow flow;
  const std::size_t n = sol.potentials.size();
  flow.outflow.assign(n, 0.0);
  flow.sum_w_sq.assign(n, 0.0);
  flow.inflow.assign(n, 0.0);
  for (std::size_t k = 0; k < sol.arcs.size(); ++k) {
    const Arc& arc = sol.arcs[k];
    double w_fwd = pow_p(positive_part(sol.current[k]), p);
    double w_rev = pow_p(positive_part(-sol.current[k]), p);
    flow.outflow[arc.u] += w_fwd;
    flow.outflow[arc.v] += w_rev;
    flow.sum_w_sq[arc.u] += w_fwd * w_fwd;
    flow.sum_w_sq[arc.v] += w_rev * w_rev;
    flow.inflow[arc.u] += w_rev;
    flow.inflow[arc.v] += w_fwd;
  }
  return flow;
}

inline double outflow_target(int node, int v_out) { return node == v_out ? 0.0 : 1.0; }

}  // namespace detail

/// Out-flow at one node: sum over incident arcs of (J^+)^p, oriented out.
inline double outflow(const NetworkSolution& sol, int node, int p) {
  if (node < 0 || node >= static_cast<int>(sol.potentials.size()))
    fail(ErrorCode::UnknownNode, "node " + std::to_string(node));
  double total = 0.0;
  for (std::size_t k = 0; k < sol.arcs.size(); ++k) {
    if (sol.arcs[k].u == node)
      total += detail::pow_p(detail::positive_part(sol.current[k]), p);
    else if (sol.arcs[k].v == node)
      total += detail::pow_p(detail::positive_part(-sol.current[k]), p);
  }
  return total;
}

/// Out-flow penalty: squared deviation from unit out-flow everywhere
/// except the sink, which must emit nothing.
inline double l_outflow(const NetworkSolution& sol, const AugmentedGraph& ag, int p) {
  detail::NodeFlow flow = detail::node_flows(sol, p);
  double total = 0.0;
  for (int node = 0; node < ag.n_total; ++node) {
    double deviation = flow.outflow[node] - detail::outflow_target(node, ag.v_out);
    total += deviation * deviation;
  }
  return total;
}

/// Branching penalty: pairwise products of positive outgoing currents,
/// summed over nodes. Zero iff no node feeds two arcs at once.
inline double l_branch(const NetworkSolution& sol, const AugmentedGraph& ag, int p) {
  detail::NodeFlow flow = detail::node_flows(sol, p);
  double total = 0.0;
  for (int node = 0; node < ag.n_total; ++node)
    total += std::max(0.0, 0.5 * (flow.outflow[node] * flow.outflow[node] - flow.sum_w_sq[node]));
  return total;
}

/// Gradient of the total objective with respect to the base conductances,
/// via one adjoint solve against the factorized Dirichlet system.
/// Coordinates of forced-zero arcs are identically zero.
inline std::vector<double> gradient(const AugmentedGraph& ag, const ConductanceConfig& g,
                                    const PenaltyWeights& weights, const Tolerances& tol = {}) {
  check_weights(weights);
  check_conductance_range(g);
  const int p = weights.exponent;

  EffectiveConductances ge = effective(ag, g);
  detail::DirichletSystem sys = detail::build_dirichlet(ag, ge, tol);
  std::vector<double> grad(ag.base_arc_count(), 0.0);
  if (!sys.powered) return grad;  // open circuit: locally constant objective

  // potentials and currents, as in solve_network
  std::vector<double> phi(ag.n_total, 0.0);
  Eigen::VectorXd phi_interior = detail::solve_checked(sys, sys.rhs, tol);
  for (std::size_t row = 0; row < sys.interior.size(); ++row)
    phi[sys.interior[row]] = phi_interior(static_cast<Eigen::Index>(row));
  phi[ag.v_in] = static_cast<double>(ag.n_total - 1);

  const int arc_count = ag.full_arc_count();
  std::vector<double> current(arc_count);
  std::vector<bool> node_powered(ag.n_total, false);
  for (int node = 0; node < ag.n_total; ++node)
    node_powered[node] = sys.parts.label[node] == sys.parts.powered_label;
  for (int k = 0; k < arc_count; ++k) {
    const Arc& arc = ag.full.arcs[k];
    current[k] = ge.values[k] * (phi[arc.u] - phi[arc.v]);
    if (ge.values[k] > tol.eps_g) {
      if (ge.values[k] < 10.0 * tol.eps_g && node_powered[arc.u])
        fail(ErrorCode::NonSmoothPoint,
             "conducting arc within the component-detection threshold");
      if (p == 1 && std::abs(current[k]) <= tol.tol_current)
        fail(ErrorCode::NonSmoothPoint,
             "zero current on a conducting arc makes p=1 non-differentiable");
    }
  }

  // out-flow sums per node
  std::vector<double> out_sum(ag.n_total, 0.0);
  std::vector<double> w_fwd(arc_count), w_rev(arc_count);
  for (int k = 0; k < arc_count; ++k) {
    w_fwd[k] = detail::pow_p(detail::positive_part(current[k]), p);
    w_rev[k] = detail::pow_p(detail::positive_part(-current[k]), p);
    out_sum[ag.full.arcs[k].u] += w_fwd[k];
    out_sum[ag.full.arcs[k].v] += w_rev[k];
  }

  // sensitivity of the objective to each directed current:
  //   dTotal/dw = 2*alpha1*(O_i - t_i) + alpha2*(O_i - w),  dw/dJ = p*(J^+)^{p-1}
  auto current_sensitivity = [&](int node, double w, double j_signed) {
    double dw_dj = p == 1 ? (j_signed > 0.0 ? 1.0 : 0.0)
                          : 2.0 * detail::positive_part(j_signed);
    if (dw_dj == 0.0) return 0.0;
    double dtotal_dw =
        2.0 * weights.alpha1 * (out_sum[node] - detail::outflow_target(node, ag.v_out)) +
        weights.alpha2 * (out_sum[node] - w);
    return dtotal_dw * dw_dj;
  };
  std::vector<double> p_fwd(arc_count), p_rev(arc_count);
  for (int k = 0; k < arc_count; ++k) {
    const Arc& arc = ag.full.arcs[k];
    p_fwd[k] = current_sensitivity(arc.u, w_fwd[k], current[k]);
    p_rev[k] = current_sensitivity(arc.v, w_rev[k], -current[k]);
  }

  // adjoint right-hand side: dTotal/dphi_k restricted to interior nodes
  Eigen::VectorXd adjoint_rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.interior.size()));
  for (int k = 0; k < arc_count; ++k) {
    const Arc& arc = ag.full.arcs[k];
    double weighted = ge.values[k] * (p_fwd[k] - p_rev[k]);
    if (int row = sys.interior_index[arc.u]; row >= 0) adjoint_rhs(row) += weighted;
    if (int row = sys.interior_index[arc.v]; row >= 0) adjoint_rhs(row) -= weighted;
  }
  Eigen::VectorXd lambda_interior = detail::solve_checked(sys, adjoint_rhs, tol);
  std::vector<double> lambda(ag.n_total, 0.0);
  for (std::size_t row = 0; row < sys.interior.size(); ++row)
    lambda[sys.interior[row]] = lambda_interior(static_cast<Eigen::Index>(row));

  for (int k = 0; k < ag.base_arc_count(); ++k) {
    if (ag.forced_zero_mask[k]) continue;
    int full_k = ag.base_arc_in_full[k];
    const Arc& arc = ag.full.arcs[full_k];
    double drop = phi[arc.u] - phi[arc.v];
    double direct = (p_fwd[full_k] - p_rev[full_k]) * drop;
    double through_solve = 0.0;
    if (node_powered[arc.u] && node_powered[arc.v])
      through_solve = -(lambda[arc.u] - lambda[arc.v]) * drop;
    grad[k] = direct + through_solve;
  }
  return grad;
}

/// Evaluates the total objective: one network solve, then both penalties.
inline PenaltyReport objective(const AugmentedGraph& ag, const ConductanceConfig& g,
                               const PenaltyWeights& weights, const Tolerances& tol = {},
                               bool with_gradient = false) {
  check_weights(weights);
  NetworkSolution sol = solve_network(ag, g, tol);
  detail::NodeFlow flow = detail::node_flows(sol, weights.exponent);

  PenaltyReport report;
  report.outflow_per_node = flow.outflow;
  report.inflow_per_node = flow.inflow;
  report.branch_per_node.resize(ag.n_total);
  for (int node = 0; node < ag.n_total; ++node) {
    double deviation = flow.outflow[node] - detail::outflow_target(node, ag.v_out);
    report.l_outflow += deviation * deviation;
    report.branch_per_node[node] =
        std::max(0.0, 0.5 * (flow.outflow[node] * flow.outflow[node] - flow.sum_w_sq[node]));
    report.l_branch += report.branch_per_node[node];
  }
  report.total = weights.alpha1 * report.l_outflow + weights.alpha2 * report.l_branch;
  if (with_gradient) report.gradient = gradient(ag, g, weights, tol);
  return report;
}

}  // namespace ohmpath
