#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "copevolve/errors.hpp"
#include "copevolve/instance_io.hpp"
#include "copevolve/problem.hpp"

using namespace copevolve;

namespace {

Problem random_problem(Rng& rng, std::size_t n, std::size_t m) {
    std::vector<Constraint> cs;
    for (std::size_t j = 0; j < m; ++j) {
        const bool quad = rng.uniform() < 0.5;
        Vector coeffs(quad ? 2 * n : n);
        for (auto& c : coeffs) {
            c = rng.uniform(-5.0, 5.0);
        }
        cs.emplace_back(quad ? ConstraintKind::Quadratic : ConstraintKind::Linear, coeffs, rng.uniform(-10.0, 0.0));
    }
    const Objective objs[] = {Objective::Sphere, Objective::Ackley, Objective::Rosenbrock};
    return {objs[rng.index(3)], Bounds::uniform(n), cs};
}

} // namespace

TEST_CASE("objective values at known points") {
    const auto sphere = Problem(Objective::Sphere, Bounds::uniform(4));
    const Vector zero(4, 0.0);
    CHECK(evaluate_objective(sphere, zero) == 0.0);
    CHECK(evaluate_objective(Problem(Objective::Sphere, Bounds::uniform(2)), Vector{1.0, 2.0}) == 5.0);
    CHECK(evaluate_objective(Problem(Objective::Rosenbrock, Bounds::uniform(4)), zero) == 0.0);
    CHECK(evaluate_objective(Problem(Objective::Ackley, Bounds::uniform(4)), zero) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("shifted Rosenbrock matches the textbook form at x + 1") {
    const Problem p(Objective::Rosenbrock, Bounds::uniform(3));
    const Vector x{0.3, -1.2, 2.0};
    double expect = 0.0;
    for (std::size_t i = 0; i + 1 < 3; ++i) {
        const double zi = x[i] + 1.0;
        const double zn = x[i + 1] + 1.0;
        expect += 100.0 * (zn - zi * zi) * (zn - zi * zi) + (1.0 - zi) * (1.0 - zi);
    }
    CHECK(evaluate_objective(p, x) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("Ackley matches the textbook form") {
    const Problem p(Objective::Ackley, Bounds::uniform(3));
    const Vector x{0.5, -1.5, 2.5};
    double ss = 0.0;
    double cs = 0.0;
    for (double v : x) {
        ss += v * v;
        cs += std::cos(2.0 * M_PI * v);
    }
    const double expect = -20.0 * std::exp(-0.2 * std::sqrt(ss / 3.0)) - std::exp(cs / 3.0) + 20.0 + M_E;
    CHECK(evaluate_objective(p, x) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("objectives are non-negative and zero only at the origin") {
    Rng rng(11);
    for (auto obj : {Objective::Sphere, Objective::Ackley, Objective::Rosenbrock}) {
        const Problem p(obj, Bounds::uniform(5));
        for (int s = 0; s < 2000; ++s) {
            const auto x = sample_uniform(p.bounds(), rng);
            CHECK(evaluate_objective(p, x) > 0.0);
        }
    }
}

TEST_CASE("evaluate examples") {
    const Problem lin(Objective::Sphere, Bounds::uniform(1), {Constraint::linear({1.0}, -1.0)});
    const auto e = evaluate(lin, Vector{3.0});
    CHECK(e.violations == Vector{2.0});
    CHECK(e.total_violation == 2.0);
    CHECK_FALSE(e.feasible());

    const Problem quad(Objective::Sphere, Bounds::uniform(1), {Constraint::quadratic({1.0, 0.0}, -4.0)});
    const auto q = evaluate(quad, Vector{1.0});
    CHECK(q.violations == Vector{-3.0});
    CHECK(q.total_violation == 0.0);
}

TEST_CASE("total violation is the sum of positive parts") {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        const auto p = random_problem(rng, 3, 4);
        const auto x = sample_uniform(p.bounds(), rng);
        const auto e = evaluate(p, x);
        double phi = 0.0;
        bool all_ok = true;
        for (double g : e.violations) {
            phi += std::max(0.0, g);
            all_ok = all_ok && g <= 0.0;
        }
        CHECK(e.total_violation == doctest::Approx(phi));
        CHECK(e.total_violation >= 0.0);
        CHECK((e.total_violation == 0.0) == all_ok);
        CHECK(is_feasible(p, x) == all_ok);
    }
}

TEST_CASE("is_feasible examples") {
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        const auto p = random_problem(rng, 4, 3);
        CHECK(is_feasible(p, Vector(4, 0.0)));
    }
    const Problem p(Objective::Sphere, Bounds::uniform(2), {Constraint::linear({1.0, 0.0}, -1.0)});
    CHECK_FALSE(is_feasible(p, Vector{0.0, 6.0}));
    CHECK_FALSE(is_feasible(p, Vector{1.0 + 1e-9, 0.0}));
    CHECK(is_feasible(p, Vector{1.0, 0.0}));
}

TEST_CASE("linear constraints are affine") {
    Rng rng(17);
    for (int t = 0; t < 500; ++t) {
        Vector a(4);
        for (auto& v : a) {
            v = rng.uniform(-5.0, 5.0);
        }
        const auto c = Constraint::linear(a, rng.uniform(-5.0, 0.0));
        const auto x = sample_uniform(Bounds::uniform(4), rng);
        const auto y = sample_uniform(Bounds::uniform(4), rng);
        const double alpha = rng.uniform(-2.0, 3.0);
        Vector z(4);
        for (int i = 0; i < 4; ++i) {
            z[i] = alpha * x[i] + (1.0 - alpha) * y[i];
        }
        const double expect = alpha * c.value(x) + (1.0 - alpha) * c.value(y);
        CHECK(c.value(z) == doctest::Approx(expect).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("evaluation is deterministic") {
    Rng rng(2);
    const auto p = random_problem(rng, 5, 3);
    const auto x = sample_uniform(p.bounds(), rng);
    const auto a = evaluate(p, x);
    const auto b = evaluate(p, x);
    CHECK(a.objective_value == b.objective_value);
    CHECK(a.violations == b.violations);
    CHECK(a.total_violation == b.total_violation);
}

TEST_CASE("transform_equality examples") {
    CHECK(transform_equality(0.0, 1e-4) == doctest::Approx(-1e-4));
    CHECK(transform_equality(1e-4, 1e-4) == 0.0);
    CHECK(transform_equality(0.5, 1e-4) == doctest::Approx(0.4999));
    CHECK(transform_equality(-0.5, 1e-4) == doctest::Approx(0.4999));
}

TEST_CASE("sample_uniform") {
    const Bounds tiny({0.0}, {1e-12});
    for (Seed s = 0; s < 100; ++s) {
        const auto x = sample_uniform(tiny, s);
        CHECK(x[0] >= 0.0);
        CHECK(x[0] <= 1e-12);
    }
    CHECK(sample_uniform(Bounds::uniform(3), 42) == sample_uniform(Bounds::uniform(3), 42));

    Rng rng(9);
    const auto box = Bounds::uniform(3);
    Vector mean(3, 0.0);
    const int count = 100000;
    for (int s = 0; s < count; ++s) {
        const auto x = sample_uniform(box, rng);
        for (int i = 0; i < 3; ++i) {
            mean[i] += x[i] / count;
        }
    }
    for (double m : mean) {
        CHECK(std::abs(m) < 0.05);
    }
}

TEST_CASE("constructor contracts") {
    CHECK_THROWS_AS(Bounds({1.0}, {1.0}), ContractViolation);
    CHECK_THROWS_AS(Bounds({0.0, 0.0}, {1.0}), ContractViolation);
    CHECK_THROWS_AS(Constraint::quadratic({1.0, 2.0, 3.0}, 0.0), ContractViolation);
    CHECK_THROWS_AS(Constraint::linear({NAN}, 0.0), ContractViolation);
    CHECK_THROWS_AS(Problem(Objective::Sphere, Bounds::uniform(2), {Constraint::linear({1.0}, 0.0)}),
                    ContractViolation);
    CHECK_THROWS_AS(evaluate(Problem(Objective::Sphere, Bounds::uniform(2)), Vector{1.0}), ContractViolation);
    CHECK(Constraint::quadratic({1.0, 2.0, 3.0, 4.0}, 0.0).dimension() == 2);
}

TEST_CASE("generator conformance") {
    const CoefficientRange range;
    CHECK(Constraint::linear({-5.0, 5.0}, 0.0).conforms(range));
    CHECK_FALSE(Constraint::linear({-5.0, 5.1}, 0.0).conforms(range));
    CHECK_FALSE(Constraint::linear({1.0, 1.0}, 0.5).conforms(range));
}

TEST_CASE("instance text round-trip preserves problem and unknown meta") {
    Rng rng(21);
    for (int t = 0; t < 30; ++t) {
        Instance inst{random_problem(rng, 1 + rng.index(5), rng.index(4)),
                      {{"seed", 7}, {"custom", {{"nested", true}}}}};
        const auto text = format_instance(inst);
        const auto back = parse_instance(text);
        CHECK(back.problem == inst.problem);
        CHECK(back.meta == inst.meta);
        CHECK(format_instance(back) == text);
    }
}

TEST_CASE("instance parse errors are data errors") {
    CHECK_THROWS_AS(parse_instance("{not json"), DataError);
    CHECK_THROWS_AS(parse_instance(R"({"objective":"cube","dimension":1,"bounds":{"lower":[-1],"upper":[1]},"constraints":[]})"),
                    DataError);
    CHECK_THROWS_AS(parse_instance(R"({"objective":"sphere","dimension":2,"bounds":{"lower":[-1],"upper":[1]},"constraints":[]})"),
                    DataError);
    CHECK_THROWS_AS(
        parse_instance(R"({"objective":"sphere","dimension":1,"bounds":{"lower":[-1],"upper":[1]},"constraints":[{"kind":"cubic","coeffs":[1],"b":0}]})"),
        DataError);
    CHECK_THROWS_AS(read_instance("/nonexistent/instance.json"), DataError);
}

TEST_CASE("field names follow the instance file format") {
    const Instance inst{Problem(Objective::Ackley, Bounds::uniform(2), {Constraint::linear({1.0, -2.0}, -0.5)}),
                        {{"target_solver", "DE"}}};
    const auto j = to_json(inst);
    CHECK(j.at("objective") == "ackley");
    CHECK(j.at("dimension") == 2);
    CHECK(j.at("bounds").at("lower").size() == 2);
    CHECK(j.at("constraints")[0].at("kind") == "linear");
    CHECK(j.at("constraints")[0].at("b") == -0.5);
    CHECK(j.at("meta").at("target_solver") == "DE");
}

TEST_CASE("atomic file writes create directories and leave no temporaries") {
    const auto dir = std::filesystem::temp_directory_path() / "copevolve_test_io";
    std::filesystem::remove_all(dir);
    const auto path = dir / "a" / "b.json";
    const Instance inst{Problem(Objective::Sphere, Bounds::uniform(1)), {}};
    write_instance(path, inst);
    CHECK(read_instance(path).problem == inst.problem);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "a")) {
        ++files;
    }
    CHECK(files == 1);
    std::filesystem::remove_all(dir);
}
