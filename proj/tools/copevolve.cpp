#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "copevolve/errors.hpp"
#include "copevolve/evolver.hpp"
#include "copevolve/features.hpp"
#include "copevolve/harness.hpp"
#include "copevolve/instance_io.hpp"
#include "copevolve/parallel.hpp"
#include "copevolve/solvers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace copevolve;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct Common {
    std::string preset = "desk";
    std::string config_file;
    std::vector<std::string> overrides;
    Seed seed = 0;
};

void add_common(CLI::App* cmd, Common& c, bool needs_seed) {
    cmd->add_option("--preset", c.preset, "Scale preset: desk or paper")->capture_default_str();
    cmd->add_option("--config", c.config_file, "JSON config file layered over the preset")->check(CLI::ExistingFile);
    cmd->add_option("--set", c.overrides, "Override a config field, e.g. evolver.generations=50");
    auto* seed = cmd->add_option("--seed", c.seed, "Master seed");
    if (needs_seed) {
        seed->required();
    }
}

harness::ExperimentConfig load(const Common& c) {
    return harness::load_config(harness::parse_preset(c.preset), c.config_file, c.overrides);
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        write_file_atomic(out, text);
    }
}

std::vector<fs::path> instance_files(const std::string& path) {
    if (!fs::exists(path)) {
        throw DataError("no such file or directory: " + path);
    }
    if (!fs::is_directory(path)) {
        return {path};
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(path)) {
        if (e.is_regular_file() && e.path().extension() == ".json") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

int run_solve(const Common& c, const std::string& instance_path, const std::string& solver, std::size_t repeats,
              const std::string& out) {
    const auto cfg = load(c);
    const auto inst = read_instance(instance_path);
    const auto kind = solvers::parse_solver_kind(solver);
    const auto& sc = cfg.solver(kind);
    json runs = json::array();
    Vector fens;
    std::size_t solved = 0;
    for (std::size_t r = 0; r < repeats; ++r) {
        const auto run_seed = derive_seed(c.seed, {r});
        const auto o = solvers::solve(inst.problem, sc, run_seed);
        runs.push_back({{"seed", run_seed},
                        {"fen", o.fen},
                        {"solved", o.solved},
                        {"best_f", o.best_f},
                        {"best_violation", o.best_violation},
                        {"best_x", o.best_x}});
        fens.push_back(static_cast<double>(o.fen));
        solved += o.solved ? 1 : 0;
    }
    const json doc = {{"instance", instance_path},
                      {"solver", std::string(solvers::to_string(kind))},
                      {"preset", c.preset},
                      {"seed", c.seed},
                      {"max_fen", sc.max_fen},
                      {"median_fen", evolver::median(fens)},
                      {"success_rate", static_cast<double>(solved) / static_cast<double>(repeats)},
                      {"runs", runs}};
    emit(out, doc.dump(2) + "\n");
    return kOk;
}

struct ShapeArgs {
    std::string objective = "sphere";
    std::string kind = "linear";
    std::size_t count = 1;
};

int run_evolve_single(const Common& c, const ShapeArgs& s, const std::string& solver, const std::string& direction,
                      const std::string& out) {
    auto cfg = load(c);
    const auto kind = solvers::parse_solver_kind(solver);
    evolver::Direction dir;
    if (direction == "hard") {
        dir = evolver::Direction::Harder;
    } else if (direction == "easy") {
        dir = evolver::Direction::Easier;
    } else {
        throw DataError("direction must be hard or easy");
    }
    const auto shape = evolver::InstanceTemplate::uniform(parse_objective(s.objective),
                                                          cfg.dimension, parse_constraint_kind(s.kind), s.count,
                                                          cfg.box);
    auto ec = cfg.evolver;
    ec.seed = c.seed;
    ec.threads = worker_count();
    const auto population = evolver::evolve_single(shape, cfg.solver(kind), dir, ec);

    json summary = {{"solver", std::string(solvers::to_string(kind))},
                    {"direction", direction},
                    {"preset", c.preset},
                    {"seed", c.seed},
                    {"instances", json::array()}};
    for (std::size_t i = 0; i < population.size(); ++i) {
        Instance inst{evolver::decode(population[i].genome),
                      {{"generator", "evolve-single"},
                       {"target_solver", std::string(solvers::to_string(kind))},
                       {"hardness", dir == evolver::Direction::Harder ? "single-objective-hard" : "easy"},
                       {"evolver_seed", c.seed},
                       {"seed", c.seed},
                       {"preset", c.preset},
                       {"rank", i},
                       {"fitness", population[i].fitness}}};
        char name[64];
        std::snprintf(name, sizeof name, "instances/%s-%s-%03zu.json", std::string(solvers::to_string(kind)).c_str(),
                      direction.c_str(), i);
        write_instance(fs::path(out) / name, inst);
        summary["instances"].push_back({{"file", name}, {"fitness", population[i].fitness}});
    }
    write_file_atomic(fs::path(out) / "summary.json", summary.dump(2) + "\n");
    return kOk;
}

int run_evolve_multi(const Common& c, const std::vector<std::string>& grid_overrides, const std::string& out) {
    auto common = c;
    common.overrides.insert(common.overrides.end(), grid_overrides.begin(), grid_overrides.end());
    const auto cfg = load(common);
    const auto result = harness::run_hardness_pipeline(cfg, c.seed, out, worker_count());
    std::size_t failed = 0;
    for (const auto& e : result.entries) {
        if (!e.ok) {
            ++failed;
            std::cerr << "cell " << e.cell.id() << " failed: " << e.error << "\n";
        }
    }
    std::cerr << result.entries.size() - failed << "/" << result.entries.size() << " cells completed\n";
    return kOk;
}

int run_cross_eval(const Common& c, const std::vector<std::string>& set_args, const std::vector<std::string>& names,
                   std::size_t repeats, const std::string& out) {
    const auto cfg = load(c);
    std::vector<harness::LabeledSet> sets;
    for (const auto& arg : set_args) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw DataError("instance set must look like LABEL=PATH: " + arg);
        }
        harness::LabeledSet set{arg.substr(0, eq), {}};
        for (const auto& f : instance_files(arg.substr(eq + 1))) {
            set.problems.push_back(read_instance(f).problem);
        }
        sets.push_back(std::move(set));
    }
    std::vector<solvers::SolverConfig> list;
    for (const auto& n : names) {
        list.push_back(cfg.solver(solvers::parse_solver_kind(n)));
    }
    const auto table =
        harness::run_cross_eval(sets, list, repeats ? repeats : cfg.cross_eval_repeats, c.seed, worker_count());
    emit(out, table.to_csv());
    return kOk;
}

int run_features(const Common& c, const std::vector<std::string>& inputs, const std::string& out) {
    const auto cfg = load(c);
    auto sampling = cfg.sampling;
    sampling.seed = c.seed;
    std::string csv;
    const auto& cols = features::report_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        csv += (i ? "," : "") + cols[i];
    }
    csv += '\n';
    for (const auto& input : inputs) {
        for (const auto& f : instance_files(input)) {
            const auto inst = read_instance(f);
            const auto fv = features::feature_vector(inst.problem, sampling);
            csv += features::report_row(f.stem().string(), inst.problem, fv, sampling) + '\n';
        }
    }
    emit(out, csv);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolve constrained problem instances that separate DE, ES and PSO, and extract their features"};
    app.require_subcommand(1);

    Common common;

    auto* solve = app.add_subcommand("solve", "Run one solver on an instance file");
    add_common(solve, common, true);
    std::string instance_path;
    std::string solver = "DE";
    std::size_t repeats = 1;
    std::string out;
    solve->add_option("--instance", instance_path, "Instance file")->required()->check(CLI::ExistingFile);
    solve->add_option("--solver", solver, "DE, ES or PSO")->capture_default_str();
    solve->add_option("--repeats", repeats, "Independent runs")->capture_default_str()->check(CLI::PositiveNumber);
    solve->add_option("--out", out, "Output JSON file (default stdout)");

    auto* single = app.add_subcommand("evolve-single", "Evolve instances hard or easy for one solver");
    add_common(single, common, true);
    ShapeArgs shape;
    std::string direction = "hard";
    std::string out_dir;
    single->add_option("--solver", solver, "DE, ES or PSO")->capture_default_str();
    single->add_option("--direction", direction, "hard or easy")->capture_default_str();
    single->add_option("--objective", shape.objective, "sphere, ackley or rosenbrock")->capture_default_str();
    single->add_option("--kind", shape.kind, "linear or quadratic")->capture_default_str();
    single->add_option("--count", shape.count, "Number of constraints")->capture_default_str();
    single->add_option("--out", out_dir, "Output directory")->required();

    auto* multi = app.add_subcommand("evolve-multi", "Run the hardness pipeline over the configured grid");
    add_common(multi, common, true);
    std::vector<std::string> objectives;
    std::vector<std::string> kinds;
    std::vector<std::string> counts;
    std::vector<std::string> targets;
    multi->add_option("--objective", objectives, "Restrict the grid to these objectives");
    multi->add_option("--kind", kinds, "Restrict the grid to these constraint kinds");
    multi->add_option("--count", counts, "Restrict the grid to these constraint counts");
    multi->add_option("--target", targets, "Restrict the grid to these target solvers");
    multi->add_option("--out", out_dir, "Output directory")->required();

    auto* cross = app.add_subcommand("cross-eval", "Median FEN of each solver on labelled instance sets");
    add_common(cross, common, true);
    std::vector<std::string> set_args;
    std::vector<std::string> solver_names{"DE", "ES", "PSO"};
    std::size_t cross_repeats = 0;
    cross->add_option("--instances", set_args, "LABEL=PATH, a file or a directory of instance files")->required();
    cross->add_option("--solvers", solver_names, "Solvers to evaluate")->capture_default_str();
    cross->add_option("--repeats", cross_repeats, "Runs per instance (default from config)");
    cross->add_option("--out", out, "Output CSV file (default stdout)");

    auto* feats = app.add_subcommand("features", "Feature report for instance files");
    add_common(feats, common, true);
    std::vector<std::string> inputs;
    feats->add_option("--instance", inputs, "Instance files or directories")->required();
    feats->add_option("--out", out, "Output CSV file (default stdout)");

    auto* report = app.add_subcommand("report", "Long-format CSVs and summary tables from a results directory");
    std::string results;
    report->add_option("--results", results, "Results directory holding manifest.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*solve) {
            return run_solve(common, instance_path, solver, repeats, out);
        }
        if (*single) {
            return run_evolve_single(common, shape, solver, direction, out_dir);
        }
        if (*multi) {
            std::vector<std::string> grid;
            auto join = [&grid](const char* key, const std::vector<std::string>& values, bool quote) {
                if (values.empty()) {
                    return;
                }
                std::string list = "[";
                for (std::size_t i = 0; i < values.size(); ++i) {
                    list += (i ? "," : "") + (quote ? "\"" + values[i] + "\"" : values[i]);
                }
                grid.push_back(std::string("pipeline.") + key + "=" + list + "]");
            };
            join("objectives", objectives, true);
            join("kinds", kinds, true);
            join("counts", counts, false);
            join("targets", targets, true);
            return run_evolve_multi(common, grid, out_dir);
        }
        if (*cross) {
            return run_cross_eval(common, set_args, solver_names, cross_repeats, out);
        }
        if (*feats) {
            return run_features(common, inputs, out);
        }
        if (*report) {
            for (const auto& p : harness::emit_report(results)) {
                std::cout << p.string() << "\n";
            }
            return kOk;
        }
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    } catch (const ContractViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}
