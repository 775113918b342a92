#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "copevolve/errors.hpp"
#include "copevolve/features.hpp"
#include "copevolve/harness.hpp"
#include "copevolve/instance_io.hpp"
#include "copevolve/solvers.hpp"

namespace py = pybind11;
using namespace copevolve;

namespace {

py::object to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_python(const py::object& o) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict outcome_dict(const solvers::SolveOutcome& o) {
    py::dict d;
    d["fen"] = o.fen;
    d["solved"] = o.solved;
    d["best_x"] = o.best_x;
    d["best_f"] = o.best_f;
    d["best_violation"] = o.best_violation;
    return d;
}

py::dict features_dict(const features::FeatureVector& fv) {
    py::dict d;
    d["constraint_count"] = fv.constraint_count;
    d["stddev"] = fv.per_constraint_stddev;
    d["linear_term_stddev"] = fv.linear_term_stddev;
    py::list angles;
    for (const auto& a : fv.pairwise_angles_deg) {
        angles.append(py::make_tuple(a.first, a.second, a.degrees));
    }
    d["angles"] = angles;
    d["distances"] = fv.shortest_distances;
    d["feasibility_ratio"] = fv.feasibility_ratio;
    return d;
}

template <class T>
py::dict by_solver(const std::map<solvers::SolverKind, T>& m) {
    py::dict d;
    for (const auto& [k, v] : m) {
        d[py::str(std::string(solvers::to_string(k)))] = v;
    }
    return d;
}

const harness::ExperimentConfig& or_default(const harness::ExperimentConfig* config,
                                            std::optional<harness::ExperimentConfig>& fallback) {
    if (config) {
        return *config;
    }
    fallback = harness::load_config(harness::Preset::Desk, {}, {});
    return *fallback;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Evolving constrained problem instances that separate DE, ES and PSO";

    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NoBoundaryError>(m, "NoBoundaryError", PyExc_ArithmeticError);
    py::register_exception<UndefinedAngleError>(m, "UndefinedAngleError", PyExc_ArithmeticError);
    py::register_exception<UnsupportedKindError>(m, "UnsupportedKindError", PyExc_ArithmeticError);

    m.def("derive_seed", [](Seed base, const std::vector<std::uint64_t>& path) {
        return derive_seed(base, std::span<const std::uint64_t>(path));
    }, py::arg("base"), py::arg("path"));

    py::class_<Bounds>(m, "Bounds")
        .def(py::init<Vector, Vector>(), py::arg("lower"), py::arg("upper"))
        .def_static("uniform", &Bounds::uniform, py::arg("dimension"), py::arg("lo") = -5.0, py::arg("hi") = 5.0)
        .def_property_readonly("lower", &Bounds::lower)
        .def_property_readonly("upper", &Bounds::upper)
        .def_property_readonly("dimension", &Bounds::dimension)
        .def(py::self == py::self);

    py::class_<Constraint>(m, "Constraint")
        .def(py::init([](const std::string& kind, Vector coeffs, double offset) {
                 return Constraint(parse_constraint_kind(kind), std::move(coeffs), offset);
             }),
             py::arg("kind"), py::arg("coeffs"), py::arg("offset"))
        .def_static("linear", &Constraint::linear, py::arg("coeffs"), py::arg("offset"))
        .def_static("quadratic", &Constraint::quadratic, py::arg("coeffs"), py::arg("offset"))
        .def_property_readonly("kind", [](const Constraint& c) { return std::string(to_string(c.kind())); })
        .def_property_readonly("coeffs", &Constraint::coeffs)
        .def_property_readonly("offset", &Constraint::offset)
        .def_property_readonly("dimension", &Constraint::dimension)
        .def("value", [](const Constraint& c, const Vector& x) { return c.value(x); }, py::arg("x"))
        .def(py::self == py::self);

    py::class_<Problem>(m, "Problem")
        .def(py::init([](const std::string& objective, Bounds bounds, std::vector<Constraint> constraints) {
                 return Problem(parse_objective(objective), std::move(bounds), std::move(constraints));
             }),
             py::arg("objective"), py::arg("bounds"), py::arg("constraints") = std::vector<Constraint>{})
        .def_property_readonly("objective", [](const Problem& p) { return std::string(to_string(p.objective())); })
        .def_property_readonly("bounds", &Problem::bounds)
        .def_property_readonly("constraints", &Problem::constraints)
        .def_property_readonly("dimension", &Problem::dimension)
        .def("with_constraint", &Problem::with_constraint, py::arg("constraint"))
        .def("to_dict", [](const Problem& p) { return to_python(to_json(p)); })
        .def_static("from_dict", [](const py::object& o) { return problem_from_json(from_python(o)); })
        .def(py::self == py::self);

    m.def("evaluate", [](const Problem& p, const Vector& x) {
        const auto e = evaluate(p, x);
        py::dict d;
        d["objective"] = e.objective_value;
        d["violations"] = e.violations;
        d["total_violation"] = e.total_violation;
        d["feasible"] = e.feasible();
        return d;
    }, py::arg("problem"), py::arg("x"));

    m.def("read_instance", [](const std::filesystem::path& path) {
        const auto inst = read_instance(path);
        return py::make_tuple(inst.problem, to_python(inst.meta));
    }, py::arg("path"));
    m.def("write_instance", [](const std::filesystem::path& path, const Problem& p, const py::object& meta) {
        write_instance(path, Instance{p, meta.is_none() ? nlohmann::json::object() : from_python(meta)});
    }, py::arg("path"), py::arg("problem"), py::arg("meta") = py::none());

    py::class_<harness::ExperimentConfig>(m, "Config")
        .def_property_readonly("preset", [](const harness::ExperimentConfig& c) {
            return std::string(harness::to_string(c.preset));
        })
        .def_property_readonly("dimension", [](const harness::ExperimentConfig& c) { return c.dimension; })
        .def_property_readonly("document", [](const harness::ExperimentConfig& c) { return to_python(c.document); });

    m.def("load_config", [](const std::string& preset, const std::vector<std::string>& overrides,
                            const std::optional<std::filesystem::path>& config_file) {
        return harness::load_config(harness::parse_preset(preset), config_file.value_or(std::filesystem::path{}),
                                    overrides);
    }, py::arg("preset") = "desk", py::arg("overrides") = std::vector<std::string>{},
       py::arg("config_file") = py::none());

    m.def("solve", [](const Problem& p, const std::string& solver, Seed seed,
                      const harness::ExperimentConfig* config) {
        std::optional<harness::ExperimentConfig> fallback;
        const auto cfg = or_default(config, fallback).solver(solvers::parse_solver_kind(solver));
        py::gil_scoped_release release;
        const auto outcome = solvers::solve(p, cfg, seed);
        py::gil_scoped_acquire acquire;
        return outcome_dict(outcome);
    }, py::arg("problem"), py::arg("solver"), py::arg("seed"), py::arg("config") = nullptr);

    m.def("features", [](const Problem& p, double radius_fraction, std::size_t samples, Seed seed) {
        return features_dict(features::feature_vector(p, {radius_fraction, samples, seed}));
    }, py::arg("problem"), py::arg("radius_fraction") = 0.05, py::arg("samples") = 10000, py::arg("seed") = 0);
    m.def("shortest_distance", &features::shortest_distance, py::arg("constraint"));
    m.def("pairwise_angle", &features::pairwise_angle, py::arg("first"), py::arg("second"));
    m.def("feasibility_ratio", &features::feasibility_ratio, py::arg("problem"), py::arg("radius_fraction"),
          py::arg("samples"), py::arg("seed"));

    m.def("evolve_hard_instance", [](const harness::ExperimentConfig& config, const std::string& objective,
                                     const std::string& kind, std::size_t count, const std::string& target,
                                     Seed seed) {
        const harness::PipelineCell cell{parse_objective(objective), parse_constraint_kind(kind), count,
                                         solvers::parse_solver_kind(target)};
        harness::PipelineEntry entry = [&] {
            py::gil_scoped_release release;
            return harness::run_pipeline_cell(config, cell, seed);
        }();
        py::dict d;
        d["id"] = cell.id();
        d["problem"] = entry.instance->problem;
        d["meta"] = to_python(entry.instance->meta);
        d["training_fitness"] = entry.training_fitness;
        d["validation_fen"] = by_solver(entry.validation.median_fen);
        d["validation_success"] = by_solver(entry.validation.success_rate);
        d["features"] = features_dict(entry.features);
        return d;
    }, py::arg("config"), py::arg("objective"), py::arg("kind"), py::arg("count"), py::arg("target"),
       py::arg("seed"));

    m.def("run_pipeline", [](const harness::ExperimentConfig& config, Seed seed, const std::filesystem::path& out,
                             std::size_t workers) {
        harness::PipelineResult result = [&] {
            py::gil_scoped_release release;
            return harness::run_hardness_pipeline(config, seed, out, workers);
        }();
        py::list entries;
        for (const auto& e : result.entries) {
            py::dict d;
            d["id"] = e.cell.id();
            d["ok"] = e.ok;
            d["error"] = e.error;
            d["instance_file"] = e.instance_file;
            entries.append(d);
        }
        return entries;
    }, py::arg("config"), py::arg("seed"), py::arg("out_dir"), py::arg("workers") = 1);

    m.def("emit_report", [](const std::filesystem::path& results) {
        std::vector<std::string> out;
        for (const auto& p : harness::emit_report(results)) {
            out.push_back(p.string());
        }
        return out;
    }, py::arg("results_dir"));
}
