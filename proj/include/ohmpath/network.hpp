#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ohmpath/augment.hpp"
#include "ohmpath/error.hpp"
#include "ohmpath/graph.hpp"

namespace ohmpath {

/// Numerical thresholds of the network solve.
struct Tolerances {
  double eps_g = 1e-12;          // conductances below this count as absent arcs
  double tol_current = 1e-9;     // |J| above this puts an arc in the support
  double tol_kcl = 1e-9;         // Kirchhoff residual bound at interior nodes
  double solver_residual = 1e-12;  // relative residual accepted from the solve
};

/// Conductances over the full arc set: the base configuration extended by
/// unit values on the added terminal arcs, with forced-zero arcs pinned.
struct EffectiveConductances {
  std::vector<double> values;  // indexed by full arc order
};

inline void check_conductance_range(const ConductanceConfig& g) {
  for (double value : g.values)
    if (!(value >= 0.0 && value <= 1.0))
      fail(ErrorCode::ConductanceOutOfRange,
           "conductance " + std::to_string(value) + " outside [0,1]");
}

inline EffectiveConductances effective(const AugmentedGraph& ag, const ConductanceConfig& g) {
  check_dimension(ag, g);
  EffectiveConductances ge;
  ge.values.assign(ag.full_arc_count(), 1.0);  // added arcs stay at 1
  for (int k = 0; k < ag.base_arc_count(); ++k)
    ge.values[ag.base_arc_in_full[k]] = ag.forced_zero_mask[k] ? 0.0 : g.values[k];
  return ge;
}

/// Connected components of the subgraph spanned by arcs with conductance
/// above eps_g. Labels are dense, assigned in order of the smallest node.
struct ComponentPartition {
  std::vector<int> label;
  int count{};
  bool terminals_connected{};
  int powered_label{-1};  // label shared by v_in and v_out, -1 if split
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(int size) : parent_(size) {
    for (int i = 0; i < size; ++i) parent_[i] = i;
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

inline ComponentPartition conducting_components(const AugmentedGraph& ag,
                                                const EffectiveConductances& ge,
                                                double eps_g) {
  detail::UnionFind uf(ag.n_total);
  for (int k = 0; k < ag.full_arc_count(); ++k)
    if (ge.values[k] > eps_g) uf.unite(ag.full.arcs[k].u, ag.full.arcs[k].v);

  ComponentPartition parts;
  parts.label.assign(ag.n_total, -1);
  for (int node = 0; node < ag.n_total; ++node) {
    int root = uf.find(node);
    if (parts.label[root] < 0) parts.label[root] = parts.count++;
    parts.label[node] = parts.label[root];
  }
  parts.terminals_connected = parts.label[ag.v_in] == parts.label[ag.v_out];
  if (parts.terminals_connected) parts.powered_label = parts.label[ag.v_in];
  return parts;
}

/// Potentials, directed currents and the conducting structure produced by
/// one network solve. Currents are stored on the canonical (u < v)
/// orientation of each full arc; the reverse orientation is the negation.
struct NetworkSolution {
  std::vector<double> potentials;  // per node of the full graph
  std::vector<Arc> arcs;           // full arc list, canonical orientation
  std::vector<double> current;     // J_(u,v) per arc
  std::vector<int> component;      // conducting-component label per node
  int component_count{};
  std::vector<bool> powered;       // node lies in the component joining the terminals
  bool has_powered_component{};
  std::vector<Arc> support;        // arcs with |J| above tol_current
  int v_in{}, v_out{};
  double kcl_residual{};           // max interior Kirchhoff residual

  /// Signed current for the ordered pair (i,j); 0 for non-adjacent pairs.
  double current_of(int i, int j) const {
    if (i == j) return 0.0;
    Arc a = i < j ? Arc{i, j} : Arc{j, i};
    auto it = std::lower_bound(arcs.begin(), arcs.end(), a);
    if (it == arcs.end() || *it != a) return 0.0;
    double value = current[static_cast<std::size_t>(it - arcs.begin())];
    return i < j ? value : -value;
  }
};

namespace detail {

/// Reduced Dirichlet system on the powered component: interior rows of the
/// weighted Laplacian, boundary columns moved to the right-hand side.
struct DirichletSystem {
  ComponentPartition parts;
  std::vector<int> interior;        // interior node ids, ascending
  std::vector<int> interior_index;  // node id -> row, -1 elsewhere
  Eigen::MatrixXd laplacian;
  Eigen::VectorXd rhs;
  Eigen::LDLT<Eigen::MatrixXd> factorization;
  bool powered{};

  bool is_interior(int node) const { return interior_index[node] >= 0; }
};

inline DirichletSystem build_dirichlet(const AugmentedGraph& ag,
                                       const EffectiveConductances& ge,
                                       const Tolerances& tol) {
  DirichletSystem sys;
  sys.parts = conducting_components(ag, ge, tol.eps_g);
  sys.powered = sys.parts.terminals_connected;
  sys.interior_index.assign(ag.n_total, -1);
  if (!sys.powered) return sys;

  for (int node = 0; node < ag.n_total; ++node) {
    if (sys.parts.label[node] != sys.parts.powered_label) continue;
    if (node == ag.v_in || node == ag.v_out) continue;
    sys.interior_index[node] = static_cast<int>(sys.interior.size());
    sys.interior.push_back(node);
  }

  const int m = static_cast<int>(sys.interior.size());
  const double boundary_in = static_cast<double>(ag.n_total - 1);
  sys.laplacian = Eigen::MatrixXd::Zero(m, m);
  sys.rhs = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < ag.full_arc_count(); ++k) {
    double conductance = ge.values[k];
    if (conductance <= tol.eps_g) continue;
    const Arc& arc = ag.full.arcs[k];
    int ru = sys.interior_index[arc.u];
    int rv = sys.interior_index[arc.v];
    if (ru >= 0) sys.laplacian(ru, ru) += conductance;
    if (rv >= 0) sys.laplacian(rv, rv) += conductance;
    if (ru >= 0 && rv >= 0) {
      sys.laplacian(ru, rv) -= conductance;
      sys.laplacian(rv, ru) -= conductance;
    } else if (ru >= 0 && arc.v == ag.v_in) {
      sys.rhs(ru) += conductance * boundary_in;
    } else if (rv >= 0 && arc.u == ag.v_in) {
      sys.rhs(rv) += conductance * boundary_in;
    }
    // v_out sits at potential 0 and contributes nothing to the rhs
  }
  sys.factorization.compute(sys.laplacian);
  return sys;
}

inline Eigen::VectorXd solve_checked(const DirichletSystem& sys, const Eigen::VectorXd& rhs,
                                     const Tolerances& tol) {
  if (sys.factorization.info() != Eigen::Success)
    fail(ErrorCode::SolverFailure, "factorization of the reduced system failed");
  Eigen::VectorXd x = sys.factorization.solve(rhs);
  double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
  double residual = (sys.laplacian * x - rhs).lpNorm<Eigen::Infinity>();
  if (!(residual <= tol.solver_residual * scale))
    fail(ErrorCode::SolverFailure,
         "reduced system residual " + std::to_string(residual) +
             " (conductance spread too large for eps_g?)");
  return x;
}

}  // namespace detail

/// Solves the Dirichlet problem on the powered component (v_in held at
/// N-1, v_out grounded) and fills in currents by Ohm's law. When the
/// terminals sit in different conducting components everything is zero.
inline NetworkSolution solve_network(const AugmentedGraph& ag, const ConductanceConfig& g,
                                     const Tolerances& tol = {}) {
  check_conductance_range(g);
  EffectiveConductances ge = effective(ag, g);
  detail::DirichletSystem sys = detail::build_dirichlet(ag, ge, tol);

  NetworkSolution sol;
  sol.arcs = ag.full.arcs;
  sol.component = sys.parts.label;
  sol.component_count = sys.parts.count;
  sol.v_in = ag.v_in;
  sol.v_out = ag.v_out;
  sol.potentials.assign(ag.n_total, 0.0);
  sol.powered.assign(ag.n_total, false);
  sol.has_powered_component = sys.powered;

  if (sys.powered) {
    Eigen::VectorXd phi = detail::solve_checked(sys, sys.rhs, tol);
    for (std::size_t row = 0; row < sys.interior.size(); ++row)
      sol.potentials[sys.interior[row]] = phi(static_cast<Eigen::Index>(row));
    sol.potentials[ag.v_in] = static_cast<double>(ag.n_total - 1);
    sol.potentials[ag.v_out] = 0.0;
    for (int node = 0; node < ag.n_total; ++node)
      sol.powered[node] = sys.parts.label[node] == sys.parts.powered_label;
  }

  sol.current.resize(ag.full_arc_count());
  for (int k = 0; k < ag.full_arc_count(); ++k) {
    const Arc& arc = ag.full.arcs[k];
    sol.current[k] = ge.values[k] * (sol.potentials[arc.u] - sol.potentials[arc.v]);
    if (std::abs(sol.current[k]) > tol.tol_current) sol.support.push_back(arc);
  }

  // interior Kirchhoff residual, kept as a diagnostic
  std::vector<double> net(ag.n_total, 0.0);
  for (int k = 0; k < ag.full_arc_count(); ++k) {
    net[ag.full.arcs[k].u] += sol.current[k];
    net[ag.full.arcs[k].v] -= sol.current[k];
  }
  for (int node = 0; node < ag.n_total; ++node)
    if (sol.powered[node] && node != ag.v_in && node != ag.v_out)
      sol.kcl_residual = std::max(sol.kcl_residual, std::abs(net[node]));

  return sol;
}

/// Signed currents on the arcs incident to a node, oriented out of it,
/// ordered by neighbor id.
inline std::vector<std::pair<int, double>> current_out(const NetworkSolution& sol, int node) {
  if (node < 0 || node >= static_cast<int>(sol.potentials.size()))
    fail(ErrorCode::UnknownNode, "node " + std::to_string(node));
  std::vector<std::pair<int, double>> out;
  for (std::size_t k = 0; k < sol.arcs.size(); ++k) {
    if (sol.arcs[k].u == node)
      out.emplace_back(sol.arcs[k].v, sol.current[k]);
    else if (sol.arcs[k].v == node)
      out.emplace_back(sol.arcs[k].u, -sol.current[k]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// True iff the absolute current support is a Hamiltonian path between the
/// terminals (spanning, acyclic, exactly two leaves).
inline bool support_is_hp(const AugmentedGraph& ag, const NetworkSolution& sol) {
  return arcs_form_hp(ag.n_total, sol.support, ag.v_in, ag.v_out);
}

}  // namespace ohmpath
