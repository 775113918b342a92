#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copevolve/random.hpp"

namespace copevolve {

using Vector = std::vector<double>;

/// Box l_i <= x_i <= u_i with l_i < u_i.
class Bounds {
public:
    Bounds(Vector lower, Vector upper);

    /// Same [lo, hi] interval on every coordinate.
    static Bounds uniform(std::size_t dimension, double lo = -5.0, double hi = 5.0);

    const Vector& lower() const noexcept { return lower_; }
    const Vector& upper() const noexcept { return upper_; }
    std::size_t dimension() const noexcept { return lower_.size(); }

    bool contains(std::span<const double> x) const;
    void clamp(std::span<double> x) const;

    friend bool operator==(const Bounds&, const Bounds&) = default;

private:
    Vector lower_;
    Vector upper_;
};

/// Admissible range for evolved constraint coefficients.
struct CoefficientRange {
    double lo = -5.0;
    double hi = 5.0;

    friend bool operator==(const CoefficientRange&, const CoefficientRange&) = default;
};

enum class ConstraintKind { Linear, Quadratic };

std::string_view to_string(ConstraintKind kind);
ConstraintKind parse_constraint_kind(std::string_view name);

/// Inequality constraint g(x) <= 0 with
///   Linear:    g(x) = b + sum_k a_k x_k                 (coeffs length n)
///   Quadratic: g(x) = b + sum_k (a_{2k-1} x_k^2 + a_{2k} x_k)  (coeffs length 2n,
///              stored as interleaved (quadratic, linear) pairs per variable)
class Constraint {
public:
    Constraint(ConstraintKind kind, Vector coeffs, double offset);

    static Constraint linear(Vector coeffs, double offset) {
        return {ConstraintKind::Linear, std::move(coeffs), offset};
    }
    static Constraint quadratic(Vector coeffs, double offset) {
        return {ConstraintKind::Quadratic, std::move(coeffs), offset};
    }

    ConstraintKind kind() const noexcept { return kind_; }
    const Vector& coeffs() const noexcept { return coeffs_; }
    double offset() const noexcept { return offset_; }
    std::size_t dimension() const noexcept;

    /// Quadratic-term coefficients a_1, a_3, ... (quadratic kind only).
    Vector quadratic_terms() const;
    /// Linear-term coefficients a_2, a_4, ... (quadratic kind only).
    Vector linear_terms() const;

    double value(std::span<const double> x) const;

    /// True when the constraint satisfies the generator invariants: offset <= 0 and
    /// every coefficient inside `range`. Hand-built problems need not conform.
    bool conforms(const CoefficientRange& range) const;

    friend bool operator==(const Constraint&, const Constraint&) = default;

private:
    ConstraintKind kind_;
    Vector coeffs_;
    double offset_;
};

enum class Objective { Sphere, Ackley, Rosenbrock };

std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view name);

class Problem {
public:
    Problem(Objective objective, Bounds bounds, std::vector<Constraint> constraints = {});

    Objective objective() const noexcept { return objective_; }
    std::size_t dimension() const noexcept { return bounds_.dimension(); }
    const Bounds& bounds() const noexcept { return bounds_; }
    const std::vector<Constraint>& constraints() const noexcept { return constraints_; }

    /// Copy of this problem with one more constraint appended.
    Problem with_constraint(Constraint c) const;

    friend bool operator==(const Problem&, const Problem&) = default;

private:
    Objective objective_;
    Bounds bounds_;
    std::vector<Constraint> constraints_;
};

struct Evaluation {
    double objective_value = 0.0;
    Vector violations;           ///< g_i(x) per constraint, signed
    double total_violation = 0.0; ///< sum of positive parts

    bool feasible() const noexcept { return total_violation == 0.0; }
};

/// Shifted objective with global minimum 0 at the origin.
double evaluate_objective(const Problem& problem, std::span<const double> x);

Evaluation evaluate(const Problem& problem, std::span<const double> x);

/// Inside the box and no constraint violated.
bool is_feasible(const Problem& problem, std::span<const double> x);

/// |h| - epsilon: an equality constraint h(x) = 0 recast as an inequality value.
double transform_equality(double h_value, double epsilon = 1e-4);

/// Uniform point in the box, deterministic for a seed.
Vector sample_uniform(const Bounds& bounds, Seed seed);
Vector sample_uniform(const Bounds& bounds, Rng& rng);

} // namespace copevolve
