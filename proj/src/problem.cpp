#include "copevolve/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "copevolve/errors.hpp"

namespace copevolve {

namespace {

void require_dimension(std::size_t expected, std::size_t actual) {
    if (expected != actual) {
        throw ContractViolation("dimension mismatch: expected " + std::to_string(expected) +
                                ", got " + std::to_string(actual));
    }
}

double sphere(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) {
        sum += v * v;
    }
    return sum;
}

// Written as 20(1 - e^{-0.2r}) + (e - e^{mean cos}) so that the origin gives an exact zero.
double ackley(std::span<const double> x) {
    const auto n = static_cast<double>(x.size());
    double sq = 0.0;
    double cs = 0.0;
    for (double v : x) {
        sq += v * v;
        cs += std::cos(2.0 * std::numbers::pi * v);
    }
    const double radial = -20.0 * std::expm1(-0.2 * std::sqrt(sq / n));
    const double cosine = std::exp(1.0) - std::exp(cs / n);
    return std::max(0.0, radial + cosine);
}

// Evaluated at z = x + 1 so the minimizer moves from (1,...,1) to the origin.
double rosenbrock(std::span<const double> x) {
    if (x.size() == 1) {
        return x[0] * x[0];
    }
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double zi = x[i] + 1.0;
        const double zn = x[i + 1] + 1.0;
        const double a = zn - zi * zi;
        const double b = 1.0 - zi;
        sum += 100.0 * a * a + b * b;
    }
    return sum;
}

} // namespace

// ---------------------------------------------------------------------------
// Bounds

Bounds::Bounds(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    require(!lower_.empty(), "bounds must have positive dimension");
    require(lower_.size() == upper_.size(), "lower and upper bounds differ in length");
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        require(std::isfinite(lower_[i]) && std::isfinite(upper_[i]), "bounds must be finite");
        require(lower_[i] < upper_[i], "lower bound must be strictly below upper bound");
    }
}

Bounds Bounds::uniform(std::size_t dimension, double lo, double hi) {
    return {Vector(dimension, lo), Vector(dimension, hi)};
}

bool Bounds::contains(std::span<const double> x) const {
    require_dimension(dimension(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) {
            return false;
        }
    }
    return true;
}

void Bounds::clamp(std::span<double> x) const {
    require_dimension(dimension(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::clamp(x[i], lower_[i], upper_[i]);
    }
}

// ---------------------------------------------------------------------------
// Constraint

std::string_view to_string(ConstraintKind kind) {
    return kind == ConstraintKind::Linear ? "linear" : "quadratic";
}

ConstraintKind parse_constraint_kind(std::string_view name) {
    if (name == "linear") {
        return ConstraintKind::Linear;
    }
    if (name == "quadratic") {
        return ConstraintKind::Quadratic;
    }
    throw DataError("unknown constraint kind '" + std::string(name) + "'");
}

Constraint::Constraint(ConstraintKind kind, Vector coeffs, double offset)
    : kind_(kind), coeffs_(std::move(coeffs)), offset_(offset) {
    require(!coeffs_.empty(), "constraint needs at least one coefficient");
    require(kind_ == ConstraintKind::Linear || coeffs_.size() % 2 == 0,
            "quadratic constraint needs an even number of coefficients");
    require(std::isfinite(offset_), "constraint offset must be finite");
    for (double a : coeffs_) {
        require(std::isfinite(a), "constraint coefficients must be finite");
    }
}

std::size_t Constraint::dimension() const noexcept {
    return kind_ == ConstraintKind::Linear ? coeffs_.size() : coeffs_.size() / 2;
}

Vector Constraint::quadratic_terms() const {
    require(kind_ == ConstraintKind::Quadratic, "quadratic_terms on a linear constraint");
    Vector out;
    out.reserve(dimension());
    for (std::size_t k = 0; k < coeffs_.size(); k += 2) {
        out.push_back(coeffs_[k]);
    }
    return out;
}

Vector Constraint::linear_terms() const {
    require(kind_ == ConstraintKind::Quadratic, "linear_terms on a linear constraint");
    Vector out;
    out.reserve(dimension());
    for (std::size_t k = 1; k < coeffs_.size(); k += 2) {
        out.push_back(coeffs_[k]);
    }
    return out;
}

double Constraint::value(std::span<const double> x) const {
    require_dimension(dimension(), x.size());
    double g = offset_;
    if (kind_ == ConstraintKind::Linear) {
        for (std::size_t k = 0; k < x.size(); ++k) {
            g += coeffs_[k] * x[k];
        }
    } else {
        for (std::size_t k = 0; k < x.size(); ++k) {
            g += coeffs_[2 * k] * x[k] * x[k] + coeffs_[2 * k + 1] * x[k];
        }
    }
    return g;
}

bool Constraint::conforms(const CoefficientRange& range) const {
    if (offset_ > 0.0) {
        return false;
    }
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [&](double a) { return a >= range.lo && a <= range.hi; });
}

// ---------------------------------------------------------------------------
// Problem

std::string_view to_string(Objective objective) {
    switch (objective) {
    case Objective::Sphere:
        return "sphere";
    case Objective::Ackley:
        return "ackley";
    case Objective::Rosenbrock:
        return "rosenbrock";
    }
    return "unknown";
}

Objective parse_objective(std::string_view name) {
    if (name == "sphere") {
        return Objective::Sphere;
    }
    if (name == "ackley") {
        return Objective::Ackley;
    }
    if (name == "rosenbrock") {
        return Objective::Rosenbrock;
    }
    throw DataError("unknown objective '" + std::string(name) + "'");
}

Problem::Problem(Objective objective, Bounds bounds, std::vector<Constraint> constraints)
    : objective_(objective), bounds_(std::move(bounds)), constraints_(std::move(constraints)) {
    for (const auto& c : constraints_) {
        require(c.dimension() == dimension(), "constraint dimension differs from problem dimension");
    }
}

Problem Problem::with_constraint(Constraint c) const {
    auto constraints = constraints_;
    constraints.push_back(std::move(c));
    return {objective_, bounds_, std::move(constraints)};
}

// ---------------------------------------------------------------------------
// Evaluation

double evaluate_objective(const Problem& problem, std::span<const double> x) {
    require_dimension(problem.dimension(), x.size());
    switch (problem.objective()) {
    case Objective::Sphere:
        return sphere(x);
    case Objective::Ackley:
        return ackley(x);
    case Objective::Rosenbrock:
        return rosenbrock(x);
    }
    return sphere(x);
}

Evaluation evaluate(const Problem& problem, std::span<const double> x) {
    Evaluation e;
    e.objective_value = evaluate_objective(problem, x);
    e.violations.reserve(problem.constraints().size());
    for (const auto& c : problem.constraints()) {
        const double g = c.value(x);
        e.violations.push_back(g);
        if (g > 0.0) {
            e.total_violation += g;
        }
    }
    return e;
}

bool is_feasible(const Problem& problem, std::span<const double> x) {
    require_dimension(problem.dimension(), x.size());
    if (!problem.bounds().contains(x)) {
        return false;
    }
    return std::all_of(problem.constraints().begin(), problem.constraints().end(),
                       [&](const Constraint& c) { return c.value(x) <= 0.0; });
}

double transform_equality(double h_value, double epsilon) {
    require(epsilon > 0.0, "equality tolerance must be positive");
    return std::abs(h_value) - epsilon;
}

Vector sample_uniform(const Bounds& bounds, Rng& rng) {
    Vector x(bounds.dimension());
    for (std::size_t i = 0; i < x.size(); ++i) {
        // lower + (upper - lower) * u can round past upper for u close to 1.
        x[i] = std::min(rng.uniform(bounds.lower()[i], bounds.upper()[i]), bounds.upper()[i]);
    }
    return x;
}

Vector sample_uniform(const Bounds& bounds, Seed seed) {
    Rng rng(seed);
    return sample_uniform(bounds, rng);
}

} // namespace copevolve
