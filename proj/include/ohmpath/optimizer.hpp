#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ohmpath/augment.hpp"
#include "ohmpath/error.hpp"
#include "ohmpath/penalty.hpp"

namespace ohmpath {

enum class InitScheme { UniformRandom, ConstantHalf, HyperplaneProjected };

inline std::string_view init_scheme_name(InitScheme scheme) {
  switch (scheme) {
    case InitScheme::UniformRandom: return "uniform";
    case InitScheme::ConstantHalf: return "constant-half";
    case InitScheme::HyperplaneProjected: return "hyperplane";
  }
  return "?";
}

struct OptimizerConfig {
  int starts = 32;
  int max_iters = 5000;
  double step_size = 0.1;     // initial backtracking step
  double armijo_c = 1e-4;
  double shrink = 0.5;
  double min_step = 1e-14;    // backtracking floor, treated as stationarity
  double tol_obj = 1e-10;
  double tol_step = 1e-12;
  std::uint64_t rng_seed = 0;
  InitScheme init = InitScheme::UniformRandom;
  PenaltyWeights weights{};
  Tolerances tolerances{};
  int threads = 0;            // 0: env OHMPATH_THREADS or hardware concurrency
};

inline void check_optimizer_config(const OptimizerConfig& cfg) {
  if (cfg.starts < 1) fail(ErrorCode::InvalidParameter, "starts must be >= 1");
  if (cfg.max_iters < 0) fail(ErrorCode::InvalidParameter, "max_iters must be >= 0");
  if (!(cfg.step_size > 0.0) || !(cfg.tol_obj > 0.0) || !(cfg.tol_step > 0.0))
    fail(ErrorCode::InvalidParameter, "step size and tolerances must be positive");
  check_weights(cfg.weights);
  if (cfg.weights.exponent != 2)
    fail(ErrorCode::InvalidParameter, "descent needs the smooth exponent p=2");
}

/// Clamp to the conductance cube; forced-zero coordinates go to 0.
inline ConductanceConfig project_box(const AugmentedGraph& ag, std::vector<double> v) {
  if (static_cast<int>(v.size()) != ag.base_arc_count())
    fail(ErrorCode::DimensionMismatch, "vector length != base arc count");
  for (int k = 0; k < ag.base_arc_count(); ++k)
    v[k] = ag.forced_zero_mask[k] ? 0.0 : std::clamp(v[k], 0.0, 1.0);
  return ConductanceConfig{std::move(v)};
}

/// Euclidean projection onto the cube intersected with the hyperplane on
/// which every target configuration lies (effective conductances summing
/// to N-1). Solved by bisection on the shift of the clamped projection.
inline ConductanceConfig project_hyperplane_box(const AugmentedGraph& ag,
                                                std::vector<double> v) {
  if (static_cast<int>(v.size()) != ag.base_arc_count())
    fail(ErrorCode::DimensionMismatch, "vector length != base arc count");

  std::vector<int> free_arcs;
  for (int k = 0; k < ag.base_arc_count(); ++k)
    if (!ag.forced_zero_mask[k]) free_arcs.push_back(k);

  // added arcs contribute |added| at unit conductance, so the free
  // coordinates must sum to N-1-|added|
  const double target =
      static_cast<double>(ag.n_total - 1) - static_cast<double>(ag.added_arcs.size());
  const double capacity = static_cast<double>(free_arcs.size());
  if (target < 0.0 || target > capacity)
    fail(ErrorCode::InfeasibleConstraint,
         "hyperplane needs a free-coordinate sum of " + std::to_string(target) +
             " but only " + std::to_string(free_arcs.size()) + " free arcs exist");

  auto clamped_sum = [&](double shift) {
    double sum = 0.0;
    for (int k : free_arcs) sum += std::clamp(v[k] - shift, 0.0, 1.0);
    return sum;
  };

  // clamped_sum is non-increasing in the shift; bracket and bisect
  double lo = -1.0, hi = 1.0;
  for (int k : free_arcs) {
    lo = std::min(lo, v[k] - 1.0);
    hi = std::max(hi, v[k]);
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-16; ++iter) {
    double mid = 0.5 * (lo + hi);
    (clamped_sum(mid) >= target ? lo : hi) = mid;
  }
  const double shift = 0.5 * (lo + hi);

  std::vector<double> out(ag.base_arc_count(), 0.0);
  for (int k : free_arcs) out[k] = std::clamp(v[k] - shift, 0.0, 1.0);
  return ConductanceConfig{std::move(out)};
}

enum class StartStatus { ReachedTolObj, ReachedTolStep, ReachedMaxIters };

inline std::string_view start_status_name(StartStatus status) {
  switch (status) {
    case StartStatus::ReachedTolObj: return "tol_obj";
    case StartStatus::ReachedTolStep: return "tol_step";
    case StartStatus::ReachedMaxIters: return "max_iters";
  }
  return "?";
}

struct StartRecord {
  int index{};
  ConductanceConfig initial;
  ConductanceConfig final_config;
  double final_value{};
  int iterations{};
  StartStatus status{};
  int nonsmooth_retries{};
  std::vector<double> trajectory;  // objective after each accepted iterate
};

enum class Classification { HamiltonianPathFound, LocalMinimumNonTarget, MaxItersExceeded };

inline std::string_view classification_name(Classification c) {
  switch (c) {
    case Classification::HamiltonianPathFound: return "HamiltonianPathFound";
    case Classification::LocalMinimumNonTarget: return "LocalMinimumNonTarget";
    case Classification::MaxItersExceeded: return "MaxItersExceeded";
  }
  return "?";
}

struct OptimizerRun {
  ConductanceConfig best_config;
  double best_value{};
  int best_start_index{};
  ConductanceConfig rounded;
  Classification classification{};
  std::vector<std::pair<int, double>> trajectory;  // best start, (iter, objective)
  std::vector<StartRecord> starts;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d4b49c2b51bc95ULL;
  return x ^ (x >> 31);
}

inline int resolve_thread_count(int requested, int starts) {
  int count = requested;
  if (count <= 0) {
    if (const char* env = std::getenv("OHMPATH_THREADS")) count = std::atoi(env);
    if (count <= 0) count = static_cast<int>(std::thread::hardware_concurrency());
    if (count <= 0) count = 1;
  }
  return std::max(1, std::min(count, starts));
}

inline ConductanceConfig round_config(const AugmentedGraph& ag, const ConductanceConfig& g) {
  ConductanceConfig rounded;
  rounded.values.resize(g.values.size());
  for (std::size_t k = 0; k < g.values.size(); ++k)
    rounded.values[k] = g.values[k] > 0.5 ? 1.0 : 0.0;  // ties round down
  return project_box(ag, std::move(rounded.values));
}

struct DescentProblem {
  const AugmentedGraph& ag;
  const OptimizerConfig& cfg;

  ConductanceConfig project(std::vector<double> v) const {
    return cfg.init == InitScheme::HyperplaneProjected
               ? project_hyperplane_box(ag, std::move(v))
               : project_box(ag, std::move(v));
  }

  double value(const ConductanceConfig& g) const {
    return objective(ag, g, cfg.weights, cfg.tolerances).total;
  }
};

inline StartRecord run_single_start(const DescentProblem& problem, int start_index) {
  const OptimizerConfig& cfg = problem.cfg;
  const AugmentedGraph& ag = problem.ag;
  std::mt19937_64 rng(splitmix64(cfg.rng_seed ^ splitmix64(start_index + 1)));

  StartRecord record;
  record.index = start_index;

  std::vector<double> init(ag.base_arc_count(), 0.5);
  if (cfg.init != InitScheme::ConstantHalf) {
    std::uniform_real_distribution<double> dist(0.25, 0.75);
    for (double& x : init) x = dist(rng);
  }
  ConductanceConfig g = problem.project(std::move(init));
  record.initial = g;

  double value = problem.value(g);
  record.trajectory.push_back(value);
  record.status = StartStatus::ReachedMaxIters;

  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    if (value <= cfg.tol_obj) {
      record.status = StartStatus::ReachedTolObj;
      break;
    }

    // gradient with nonsmooth-retry: nudge the iterate and try again
    std::vector<double> grad;
    bool have_gradient = false;
    for (int attempt = 0; attempt <= 3 && !have_gradient; ++attempt) {
      try {
        grad = gradient(ag, g, cfg.weights, cfg.tolerances);
        have_gradient = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonSmoothPoint || attempt == 3) throw;
        ++record.nonsmooth_retries;
        std::uniform_real_distribution<double> nudge(-1e-8, 1e-8);
        std::vector<double> shifted = g.values;
        for (double& x : shifted) x += nudge(rng);
        g = problem.project(std::move(shifted));
        value = problem.value(g);
      }
    }

    // backtracking projected step with the Armijo decrease test
    double step = cfg.step_size;
    ConductanceConfig candidate;
    double candidate_value = 0.0;
    bool accepted = false;
    while (step > cfg.min_step) {
      std::vector<double> moved = g.values;
      for (std::size_t k = 0; k < moved.size(); ++k) moved[k] -= step * grad[k];
      candidate = problem.project(std::move(moved));
      candidate_value = problem.value(candidate);
      double directional = 0.0;
      for (std::size_t k = 0; k < grad.size(); ++k)
        directional += grad[k] * (candidate.values[k] - g.values[k]);
      if (candidate_value <= value + cfg.armijo_c * std::min(0.0, directional)) {
        accepted = true;
        break;
      }
      step *= cfg.shrink;
    }
    if (!accepted) {  // no descent step exists at this scale: stationary
      record.status = StartStatus::ReachedTolStep;
      break;
    }

    double move = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k)
      move = std::max(move, std::abs(candidate.values[k] - g.values[k]));
    g = std::move(candidate);
    value = candidate_value;
    record.trajectory.push_back(value);
    if (move <= cfg.tol_step) {
      record.status = StartStatus::ReachedTolStep;
      ++iter;
      break;
    }
  }
  if (record.status == StartStatus::ReachedMaxIters && value <= cfg.tol_obj)
    record.status = StartStatus::ReachedTolObj;

  record.iterations = iter;
  record.final_config = std::move(g);
  record.final_value = value;
  return record;
}

}  // namespace detail

/// Multi-start projected gradient descent over the conductance cube.
/// Starts are independent (each owns an RNG stream derived from the seed
/// and its index) and run in parallel; results merge deterministically.
inline OptimizerRun optimize(const AugmentedGraph& ag, const OptimizerConfig& cfg) {
  check_optimizer_config(cfg);
  detail::DescentProblem problem{ag, cfg};

  std::vector<StartRecord> records(cfg.starts);
  const int threads = detail::resolve_thread_count(cfg.threads, cfg.starts);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&](int thread_index) {
    for (int s = thread_index; s < cfg.starts; s += threads) {
      try {
        records[s] = detail::run_single_start(problem, s);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& thread : pool) thread.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  OptimizerRun run;
  run.starts = std::move(records);
  run.best_start_index = 0;
  for (int s = 1; s < cfg.starts; ++s)
    if (run.starts[s].final_value < run.starts[run.best_start_index].final_value)
      run.best_start_index = s;
  const StartRecord& best = run.starts[run.best_start_index];
  run.best_config = best.final_config;
  run.best_value = best.final_value;
  for (std::size_t i = 0; i < best.trajectory.size(); ++i)
    run.trajectory.emplace_back(static_cast<int>(i), best.trajectory[i]);

  run.rounded = detail::round_config(ag, run.best_config);
  bool target = is_target_config(ag, run.rounded);
  if (target) {
    // independent confirmation: the rounded network must push its whole
    // current through one spanning path
    NetworkSolution check = solve_network(ag, run.rounded, cfg.tolerances);
    target = support_is_hp(ag, check);
  }
  if (target) {
    run.classification = Classification::HamiltonianPathFound;
  } else if (best.status == StartStatus::ReachedMaxIters) {
    run.classification = Classification::MaxItersExceeded;
  } else {
    run.classification = Classification::LocalMinimumNonTarget;
  }
  return run;
}

/// One row of the exhaustive vertex table: free-arc bits, objective value,
/// target-set membership.
struct BinaryRow {
  std::uint32_t mask{};
  double total{};
  bool in_target{};
};

struct BinaryTable {
  std::vector<int> free_arcs;   // base arc indices carrying the mask bits
  std::vector<BinaryRow> rows;  // sorted by objective, then mask
};

/// Reconstructs the full configuration encoded by a mask over free arcs.
inline ConductanceConfig config_from_mask(const AugmentedGraph& ag,
                                          const std::vector<int>& free_arcs,
                                          std::uint32_t mask) {
  ConductanceConfig g;
  g.values.assign(ag.base_arc_count(), 0.0);
  for (std::size_t bit = 0; bit < free_arcs.size(); ++bit)
    if (mask & (std::uint32_t{1} << bit)) g.values[free_arcs[bit]] = 1.0;
  return g;
}

/// Evaluates the objective at every binary configuration (forced-zero arcs
/// stay pinned). Quadratic blow-up guarded at 20 arcs.
inline BinaryTable enumerate_binary(const AugmentedGraph& ag, const PenaltyWeights& weights,
                                    std::size_t max_arcs = 20, const Tolerances& tol = {}) {
  check_weights(weights);
  if (ag.base.arcs.size() > max_arcs || ag.base.arcs.size() > 20)
    fail(ErrorCode::TooManyArcs,
         std::to_string(ag.base.arcs.size()) + " arcs exceed the enumeration guard");

  BinaryTable table;
  for (int k = 0; k < ag.base_arc_count(); ++k)
    if (!ag.forced_zero_mask[k]) table.free_arcs.push_back(k);

  const std::uint32_t configs = std::uint32_t{1} << table.free_arcs.size();
  table.rows.reserve(configs);
  for (std::uint32_t mask = 0; mask < configs; ++mask) {
    ConductanceConfig g = config_from_mask(ag, table.free_arcs, mask);
    BinaryRow row;
    row.mask = mask;
    row.total = objective(ag, g, weights, tol).total;
    row.in_target = is_target_config(ag, g);
    table.rows.push_back(row);
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const BinaryRow& a, const BinaryRow& b) {
    return a.total != b.total ? a.total < b.total : a.mask < b.mask;
  });
  return table;
}

}  // namespace ohmpath
