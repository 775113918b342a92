#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Core>

#include "copevolve/problem.hpp"
#include "copevolve/random.hpp"

namespace copevolve::solvers {

enum class SolverKind { DE, ES, PSO };

std::string_view to_string(SolverKind kind);
SolverKind parse_solver_kind(std::string_view name);

struct DeParams {
    double crossover_rate = 0.5;
    double scale_factor = 0.5;
    /// Quantile of the initial population's violations that seeds the epsilon level.
    double epsilon_quantile = 0.2;
    /// Fraction of the generation budget after which the epsilon level is 0.
    double epsilon_cutoff_fraction = 0.2;
    double epsilon_exponent = 5.0;
    /// Probability of a least-squares repair step on an infeasible trial.
    double gradient_repair_prob = 0.2;
    double gradient_step = 1e-6;
};

/// Unset members resolve to the dimension-dependent defaults at run time.
struct EsParams {
    std::optional<double> path_smoothing;       ///< c_c, default 1/(n+2)
    std::optional<double> constraint_reduction; ///< beta, default 0.1/(n+2)
    double target_success = 2.0 / 11.0;
    std::optional<double> damping;              ///< d, default 1 + n/2
    double initial_sigma_fraction = 0.2;        ///< of the mean box width
};

struct PsoParams {
    std::size_t subswarm_size = 8;
};

struct SolverConfig {
    SolverKind kind = SolverKind::DE;
    std::size_t population_size = 100;
    std::size_t max_fen = 300000;
    /// Solved once a feasible point with f(x) <= target_gap has been evaluated.
    double target_gap = 1e-2;
    DeParams de;
    EsParams es;
    PsoParams pso;

    /// Throws ContractViolation on any broken invariant.
    void validate() const;

    /// Defaults for one solver kind: DE pop 100, ES (1+1), PSO 64 in sub-swarms of 8.
    static SolverConfig defaults(SolverKind kind);
};

struct SolveOutcome {
    std::size_t fen = 0; ///< evaluations consumed; max_fen when unsolved
    bool solved = false;
    Vector best_x;
    double best_f = 0.0;
    double best_violation = 0.0;

    friend bool operator==(const SolveOutcome&, const SolveOutcome&) = default;
};

/// Objective value and total violation of one evaluated point.
struct Score {
    double f = 0.0;
    double phi = 0.0;
};

/// Epsilon-level comparison. `less` means lhs is better. Violations at or below
/// epsilon_level count as equal, so f decides; otherwise phi decides, then f.
std::weak_ordering epsilon_compare(const Score& lhs, const Score& rhs, double epsilon_level);

/// Feasibility rules: feasible beats infeasible, feasible pairs by f, infeasible by phi.
std::weak_ordering feasibility_compare(const Score& lhs, const Score& rhs);

/// Central-difference Jacobian of the constraint functions (rows) at x.
Eigen::MatrixXd numerical_gradient(const Problem& problem, std::span<const double> x, double h);

/// Same, but every perturbed point goes through `evaluator`, so a solver can meter it.
Eigen::MatrixXd numerical_gradient(std::span<const double> x, double h, std::size_t constraint_count,
                                   const std::function<Evaluation(std::span<const double>)>& evaluator);

SolveOutcome solve_de(const Problem& problem, const SolverConfig& config, Seed seed);
SolveOutcome solve_es(const Problem& problem, const SolverConfig& config, Seed seed);
SolveOutcome solve_pso(const Problem& problem, const SolverConfig& config, Seed seed);

/// Dispatches on config.kind.
SolveOutcome solve(const Problem& problem, const SolverConfig& config, Seed seed);

} // namespace copevolve::solvers
