#include "copevolve/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "copevolve/errors.hpp"

namespace copevolve::solvers {

std::string_view to_string(SolverKind kind) {
    switch (kind) {
    case SolverKind::DE:
        return "DE";
    case SolverKind::ES:
        return "ES";
    case SolverKind::PSO:
        return "PSO";
    }
    return "unknown";
}

SolverKind parse_solver_kind(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    if (upper == "DE") {
        return SolverKind::DE;
    }
    if (upper == "ES") {
        return SolverKind::ES;
    }
    if (upper == "PSO") {
        return SolverKind::PSO;
    }
    throw DataError("unknown solver '" + std::string(name) + "'");
}

void SolverConfig::validate() const {
    require(population_size > 0, "population_size must be positive");
    require(max_fen >= population_size, "max_fen must be at least population_size");
    require(target_gap > 0.0, "target_gap must be positive");
    switch (kind) {
    case SolverKind::DE:
        require(population_size >= 4, "DE needs a population of at least 4");
        require(de.crossover_rate >= 0.0 && de.crossover_rate <= 1.0, "CR must lie in [0, 1]");
        require(de.scale_factor > 0.0, "scale factor F must be positive");
        require(de.epsilon_quantile > 0.0 && de.epsilon_quantile < 1.0, "epsilon quantile must lie in (0, 1)");
        require(de.epsilon_cutoff_fraction >= 0.0 && de.epsilon_cutoff_fraction <= 1.0,
                "epsilon cutoff fraction must lie in [0, 1]");
        require(de.epsilon_exponent > 0.0, "epsilon exponent must be positive");
        require(de.gradient_repair_prob >= 0.0 && de.gradient_repair_prob <= 1.0,
                "gradient repair probability must lie in [0, 1]");
        require(de.gradient_step > 0.0, "gradient step must be positive");
        break;
    case SolverKind::ES:
        require(es.target_success > 0.0 && es.target_success < 1.0, "target success rate must lie in (0, 1)");
        require(es.initial_sigma_fraction > 0.0, "initial sigma fraction must be positive");
        require(!es.path_smoothing || (*es.path_smoothing > 0.0 && *es.path_smoothing <= 1.0),
                "c_c must lie in (0, 1]");
        require(!es.constraint_reduction || (*es.constraint_reduction > 0.0 && *es.constraint_reduction < 1.0),
                "beta must lie in (0, 1)");
        require(!es.damping || *es.damping > 0.0, "damping must be positive");
        break;
    case SolverKind::PSO:
        require(pso.subswarm_size > 0, "subswarm_size must be positive");
        require(population_size % pso.subswarm_size == 0,
                "swarm size " + std::to_string(population_size) + " is not divisible by sub-swarm size " +
                    std::to_string(pso.subswarm_size));
        break;
    }
}

SolverConfig SolverConfig::defaults(SolverKind kind) {
    SolverConfig c;
    c.kind = kind;
    switch (kind) {
    case SolverKind::DE:
        c.population_size = 100;
        break;
    case SolverKind::ES:
        c.population_size = 1;
        break;
    case SolverKind::PSO:
        c.population_size = 64;
        c.pso.subswarm_size = 8;
        break;
    }
    return c;
}

namespace {

void require_no_nan(const Score& s) {
    require(!std::isnan(s.f) && !std::isnan(s.phi), "NaN in comparison input");
}

} // namespace

std::weak_ordering epsilon_compare(const Score& lhs, const Score& rhs, double epsilon_level) {
    require_no_nan(lhs);
    require_no_nan(rhs);
    require(!std::isnan(epsilon_level) && epsilon_level >= 0.0, "epsilon level must be non-negative");
    require(lhs.phi >= 0.0 && rhs.phi >= 0.0, "violations must be non-negative");
    // Equivalent to lexicographic order on (phi <= eps ? 0 : phi, f).
    const double lp = lhs.phi <= epsilon_level ? 0.0 : lhs.phi;
    const double rp = rhs.phi <= epsilon_level ? 0.0 : rhs.phi;
    if (lp != rp) {
        return lp < rp ? std::weak_ordering::less : std::weak_ordering::greater;
    }
    return std::weak_order(lhs.f, rhs.f);
}

std::weak_ordering feasibility_compare(const Score& lhs, const Score& rhs) {
    require_no_nan(lhs);
    require_no_nan(rhs);
    const bool lf = lhs.phi <= 0.0;
    const bool rf = rhs.phi <= 0.0;
    if (lf != rf) {
        return lf ? std::weak_ordering::less : std::weak_ordering::greater;
    }
    if (!lf && lhs.phi != rhs.phi) {
        return lhs.phi < rhs.phi ? std::weak_ordering::less : std::weak_ordering::greater;
    }
    return std::weak_order(lhs.f, rhs.f);
}

Eigen::MatrixXd numerical_gradient(std::span<const double> x, double h, std::size_t constraint_count,
                                   const std::function<Evaluation(std::span<const double>)>& evaluator) {
    require(h > 0.0, "finite-difference step must be positive");
    const auto n = x.size();
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(constraint_count), static_cast<Eigen::Index>(n));
    Vector probe(x.begin(), x.end());
    for (std::size_t k = 0; k < n; ++k) {
        probe[k] = x[k] + h;
        const auto plus = evaluator(probe);
        probe[k] = x[k] - h;
        const auto minus = evaluator(probe);
        probe[k] = x[k];
        for (std::size_t i = 0; i < constraint_count; ++i) {
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                (plus.violations[i] - minus.violations[i]) / (2.0 * h);
        }
    }
    return jac;
}

Eigen::MatrixXd numerical_gradient(const Problem& problem, std::span<const double> x, double h) {
    require(x.size() == problem.dimension(), "dimension mismatch in numerical_gradient");
    return numerical_gradient(x, h, problem.constraints().size(),
                              [&](std::span<const double> p) { return evaluate(problem, p); });
}

namespace {

// Thrown by the meter once the run is solved or the budget is spent.
struct SearchStopped {};

/// Charges one FEN per evaluation and tracks the best in-box point under the
/// feasibility rules. Every solver evaluation goes through here.
class BudgetMeter {
public:
    BudgetMeter(const Problem& problem, const SolverConfig& config)
        : problem_(problem), max_fen_(config.max_fen), target_gap_(config.target_gap) {}

    Evaluation evaluate(std::span<const double> x) {
        if (fen_ >= max_fen_) {
            throw SearchStopped{};
        }
        auto e = copevolve::evaluate(problem_, x);
        ++fen_;
        if (problem_.bounds().contains(x)) {
            const Score s{e.objective_value, e.total_violation};
            if (best_x_.empty() || feasibility_compare(s, best_) < 0) {
                best_ = s;
                best_x_.assign(x.begin(), x.end());
            }
            if (e.feasible() && e.objective_value <= target_gap_) {
                solved_ = true;
            }
        }
        if (solved_ || fen_ >= max_fen_) {
            throw SearchStopped{};
        }
        return e;
    }

    std::function<Evaluation(std::span<const double>)> as_function() {
        return [this](std::span<const double> x) { return evaluate(x); };
    }

    SolveOutcome outcome() const {
        SolveOutcome out;
        out.solved = solved_;
        out.fen = solved_ ? fen_ : max_fen_;
        out.best_x = best_x_;
        out.best_f = best_.f;
        out.best_violation = best_.phi;
        return out;
    }

private:
    const Problem& problem_;
    std::size_t max_fen_;
    double target_gap_;
    std::size_t fen_ = 0;
    bool solved_ = false;
    Score best_;
    Vector best_x_;
};

Score score_of(const Evaluation& e) { return {e.objective_value, e.total_violation}; }

template <typename Body>
SolveOutcome run_metered(const Problem& problem, const SolverConfig& config, SolverKind expected, Body&& body) {
    require(config.kind == expected, "solver kind does not match the config");
    config.validate();
    BudgetMeter meter(problem, config);
    try {
        body(meter);
    } catch (const SearchStopped&) {
    }
    return meter.outcome();
}

Eigen::Map<const Eigen::VectorXd> as_eigen(const Vector& v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

// ---------------------------------------------------------------------------
// Differential evolution with epsilon-level selection and gradient repair.

struct DeMember {
    Vector x;
    Score score;
};

void de_body(const Problem& problem, const SolverConfig& config, Rng& rng, BudgetMeter& meter) {
    const auto& p = config.de;
    const auto n = problem.dimension();
    const auto np = config.population_size;

    std::vector<DeMember> pop(np);
    for (auto& m : pop) {
        m.x = sample_uniform(problem.bounds(), rng);
        m.score = score_of(meter.evaluate(m.x));
    }

    Vector phis(np);
    std::transform(pop.begin(), pop.end(), phis.begin(), [](const DeMember& m) { return m.score.phi; });
    std::sort(phis.begin(), phis.end());
    const double eps0 = phis[static_cast<std::size_t>(p.epsilon_quantile * static_cast<double>(np))];
    const double generation_budget = static_cast<double>(config.max_fen) / static_cast<double>(np);
    const double cutoff = p.epsilon_cutoff_fraction * generation_budget;

    auto meter_fn = meter.as_function();
    Vector trial(n);
    for (std::size_t gen = 0;; ++gen) {
        const double t = static_cast<double>(gen);
        const double eps = t < cutoff ? eps0 * std::pow(1.0 - t / cutoff, p.epsilon_exponent) : 0.0;

        for (std::size_t i = 0; i < np; ++i) {
            std::size_t r1, r2, r3;
            do { r1 = rng.index(np); } while (r1 == i);
            do { r2 = rng.index(np); } while (r2 == i || r2 == r1);
            do { r3 = rng.index(np); } while (r3 == i || r3 == r1 || r3 == r2);

            const std::size_t jrand = rng.index(n);
            for (std::size_t k = 0; k < n; ++k) {
                if (k == jrand || rng.uniform() < p.crossover_rate) {
                    trial[k] = pop[r1].x[k] + p.scale_factor * (pop[r2].x[k] - pop[r3].x[k]);
                } else {
                    trial[k] = pop[i].x[k];
                }
            }
            problem.bounds().clamp(trial);
            auto eval = meter.evaluate(trial);

            if (!eval.feasible() && rng.uniform() < p.gradient_repair_prob) {
                // One Gauss-Newton step on the violated constraints: J dx = -c, minimum norm.
                const auto jac = numerical_gradient(trial, p.gradient_step, problem.constraints().size(), meter_fn);
                std::vector<Eigen::Index> violated;
                for (std::size_t j = 0; j < eval.violations.size(); ++j) {
                    if (eval.violations[j] > 0.0) {
                        violated.push_back(static_cast<Eigen::Index>(j));
                    }
                }
                Eigen::MatrixXd jv(static_cast<Eigen::Index>(violated.size()), static_cast<Eigen::Index>(n));
                Eigen::VectorXd c(static_cast<Eigen::Index>(violated.size()));
                for (Eigen::Index r = 0; r < jv.rows(); ++r) {
                    jv.row(r) = jac.row(violated[static_cast<std::size_t>(r)]);
                    c(r) = eval.violations[static_cast<std::size_t>(violated[static_cast<std::size_t>(r)])];
                }
                const Eigen::VectorXd dx = jv.completeOrthogonalDecomposition().solve(-c);
                if (dx.allFinite()) {
                    for (std::size_t k = 0; k < n; ++k) {
                        trial[k] += dx(static_cast<Eigen::Index>(k));
                    }
                    problem.bounds().clamp(trial);
                    eval = meter.evaluate(trial);
                }
            }

            const Score s = score_of(eval);
            if (epsilon_compare(s, pop[i].score, eps) <= 0) {
                pop[i].x = trial;
                pop[i].score = s;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// (1+1)-CMA-ES with constraint-direction variance reduction.

void es_body(const Problem& problem, const SolverConfig& config, Rng& rng, BudgetMeter& meter) {
    const auto n = problem.dimension();
    const auto dn = static_cast<double>(n);
    const auto ni = static_cast<Eigen::Index>(n);
    const auto& p = config.es;

    const double c_c = p.path_smoothing.value_or(1.0 / (dn + 2.0));
    const double beta = p.constraint_reduction.value_or(0.1 / (dn + 2.0));
    const double damping = p.damping.value_or(1.0 + dn / 2.0);
    const double p_target = p.target_success;
    const double c_path = 2.0 / (dn + 2.0);
    const double c_succ = 1.0 / 12.0;
    const double c_cov = 2.0 / (dn * dn + 6.0);

    const auto& lo = problem.bounds().lower();
    const auto& hi = problem.bounds().upper();
    double mean_width = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mean_width += (hi[k] - lo[k]) / dn;
    }

    Vector x = sample_uniform(problem.bounds(), rng);
    Evaluation ex = meter.evaluate(x);

    double sigma = p.initial_sigma_fraction * mean_width;
    double p_succ = p_target;
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(ni, ni);
    Eigen::VectorXd path = Eigen::VectorXd::Zero(ni);
    std::vector<Eigen::VectorXd> fade(problem.constraints().size(), Eigen::VectorXd::Zero(ni));

    Eigen::VectorXd z(ni);
    Vector y(n);
    while (true) {
        for (Eigen::Index k = 0; k < ni; ++k) {
            z(k) = rng.normal();
        }
        const Eigen::VectorXd az = a * z;
        for (std::size_t k = 0; k < n; ++k) {
            y[k] = x[k] + sigma * az(static_cast<Eigen::Index>(k));
        }
        problem.bounds().clamp(y);
        // Clamping changes the realised step; adapt on what was actually taken.
        const Eigen::VectorXd step = (as_eigen(y) - as_eigen(x)) / sigma;

        const auto ey = meter.evaluate(y);

        bool success = false;
        if (ex.feasible()) {
            if (!ey.feasible()) {
                Eigen::MatrixXd shrink = Eigen::MatrixXd::Zero(ni, ni);
                int violated = 0;
                const auto lu = a.partialPivLu();
                for (std::size_t j = 0; j < fade.size(); ++j) {
                    if (ey.violations[j] > 0.0) {
                        fade[j] = (1.0 - c_c) * fade[j] + c_c * step;
                        const Eigen::VectorXd w = lu.solve(fade[j]);
                        const double ww = w.squaredNorm();
                        if (ww > 0.0 && std::isfinite(ww)) {
                            shrink += fade[j] * w.transpose() / ww;
                        }
                        ++violated;
                    }
                }
                if (violated > 0) {
                    a -= (beta / violated) * shrink;
                }
                if (!a.allFinite()) {
                    a.setIdentity();
                }
                continue;
            }
            success = ey.objective_value <= ex.objective_value;
        } else {
            success = epsilon_compare(score_of(ey), score_of(ex), 0.0) <= 0;
        }

        p_succ = (1.0 - c_succ) * p_succ + (success ? c_succ : 0.0);
        sigma *= std::exp((p_succ - p_target) / (damping * (1.0 - p_target)));
        sigma = std::clamp(sigma, 1e-300, 1e300);

        if (success) {
            x = y;
            ex = ey;
            path = (1.0 - c_path) * path + std::sqrt(c_path * (2.0 - c_path)) * step;
            const Eigen::VectorXd w = a.partialPivLu().solve(path);
            const double ww = w.squaredNorm();
            if (ww > 0.0 && std::isfinite(ww)) {
                const double sa = std::sqrt(1.0 - c_cov);
                a = sa * a + (sa / ww) * (std::sqrt(1.0 + c_cov * ww / (1.0 - c_cov)) - 1.0) * path * w.transpose();
            }
            if (!a.allFinite()) {
                a.setIdentity();
                path.setZero();
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Multi-swarm PSO with Gaussian coefficients and feasibility-rule leaders.

struct Particle {
    Vector x;
    Vector best_x;
    Score best;
};

void pso_body(const Problem& problem, const SolverConfig& config, Rng& rng, BudgetMeter& meter) {
    const auto n = problem.dimension();
    const auto np = config.population_size;
    const auto ns = config.pso.subswarm_size;

    std::vector<Particle> swarm(np);
    for (auto& pt : swarm) {
        pt.x = sample_uniform(problem.bounds(), rng);
        pt.best_x = pt.x;
        pt.best = score_of(meter.evaluate(pt.x));
    }

    std::vector<std::size_t> order(np);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::size_t> leader_of(np);
    while (true) {
        rng.shuffle(order.begin(), order.end());
        for (std::size_t g = 0; g < np; g += ns) {
            std::size_t leader = order[g];
            for (std::size_t k = g + 1; k < g + ns; ++k) {
                if (feasibility_compare(swarm[order[k]].best, swarm[leader].best) < 0) {
                    leader = order[k];
                }
            }
            for (std::size_t k = g; k < g + ns; ++k) {
                leader_of[order[k]] = leader;
            }
        }
        for (std::size_t idx : order) {
            auto& pt = swarm[idx];
            const auto& lead = swarm[leader_of[idx]].best_x;
            for (std::size_t k = 0; k < n; ++k) {
                const double v = std::abs(rng.normal()) * (pt.best_x[k] - pt.x[k]) +
                                 std::abs(rng.normal()) * (lead[k] - pt.x[k]);
                pt.x[k] += v;
            }
            problem.bounds().clamp(pt.x);
            const Score s = score_of(meter.evaluate(pt.x));
            if (feasibility_compare(s, pt.best) <= 0) {
                pt.best = s;
                pt.best_x = pt.x;
            }
        }
    }
}

} // namespace

SolveOutcome solve_de(const Problem& problem, const SolverConfig& config, Seed seed) {
    Rng rng(seed);
    return run_metered(problem, config, SolverKind::DE,
                       [&](BudgetMeter& meter) { de_body(problem, config, rng, meter); });
}

SolveOutcome solve_es(const Problem& problem, const SolverConfig& config, Seed seed) {
    Rng rng(seed);
    return run_metered(problem, config, SolverKind::ES,
                       [&](BudgetMeter& meter) { es_body(problem, config, rng, meter); });
}

SolveOutcome solve_pso(const Problem& problem, const SolverConfig& config, Seed seed) {
    Rng rng(seed);
    return run_metered(problem, config, SolverKind::PSO,
                       [&](BudgetMeter& meter) { pso_body(problem, config, rng, meter); });
}

SolveOutcome solve(const Problem& problem, const SolverConfig& config, Seed seed) {
    switch (config.kind) {
    case SolverKind::DE:
        return solve_de(problem, config, seed);
    case SolverKind::ES:
        return solve_es(problem, config, seed);
    case SolverKind::PSO:
        return solve_pso(problem, config, seed);
    }
    throw ContractViolation("unknown solver kind");
}

} // namespace copevolve::solvers
