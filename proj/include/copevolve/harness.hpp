#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "copevolve/evolver.hpp"
#include "copevolve/features.hpp"
#include "copevolve/instance_io.hpp"
#include "copevolve/problem.hpp"
#include "copevolve/solvers.hpp"

namespace copevolve::harness {

enum class Preset { Desk, Paper };

Preset parse_preset(std::string_view name);
std::string_view to_string(Preset preset);

/// Full configuration document for a named preset. Every field may be
/// overridden through apply_overrides before resolving.
///   desk:  n = 5,  max_fen 20K,  DE pop 20, PSO 16/8, evolver pop 20 x 30 gens, R = 3
///   paper: n = 30, max_fen 300K, DE pop 100, PSO 64/8, evolver pop 40 x 5000 gens, R = 5
nlohmann::json preset_document(Preset preset);

/// Applies `key.path=value` overrides. Values parse as JSON when possible and
/// fall back to plain strings. Unknown keys are a DataError.
nlohmann::json apply_overrides(nlohmann::json doc, const std::vector<std::string>& assignments);

struct PipelineGrid {
    std::vector<Objective> objectives;
    std::vector<ConstraintKind> kinds;
    std::vector<std::size_t> counts;
    std::vector<solvers::SolverKind> targets;
    std::size_t validation_seeds = 10;
};

/// Resolved, validated experiment configuration.
struct ExperimentConfig {
    Preset preset = Preset::Desk;
    std::size_t dimension = 5;
    double box = 5.0;
    std::map<solvers::SolverKind, solvers::SolverConfig> solvers;
    evolver::EvolverConfig evolver;
    features::SamplingConfig sampling;
    PipelineGrid grid;
    std::size_t cross_eval_repeats = 10;
    nlohmann::json document; ///< the document this was resolved from

    const solvers::SolverConfig& solver(solvers::SolverKind kind) const { return solvers.at(kind); }
    std::vector<solvers::SolverConfig> all_solvers() const;
};

/// Throws DataError on malformed documents and ContractViolation on invalid values.
ExperimentConfig resolve_config(const nlohmann::json& document);

/// Preset document, then an optional config file layered on top, then overrides.
ExperimentConfig load_config(Preset preset, const std::filesystem::path& config_file,
                             const std::vector<std::string>& assignments);

// ---------------------------------------------------------------------------
// Cross evaluation

struct LabeledSet {
    std::string label;
    std::vector<Problem> problems;
};

struct CrossEvalCell {
    std::string set_label;
    solvers::SolverKind solver = solvers::SolverKind::DE;
    bool failed = false;
    std::string error;
    double median_fen = 0.0;
    double success_rate = 0.0;
    std::size_t runs = 0;
};

struct CrossEvalTable {
    std::vector<CrossEvalCell> cells; ///< set-major, solver-minor

    const CrossEvalCell& at(const std::string& label, solvers::SolverKind solver) const;
    std::string to_csv() const;
};

/// Each cell is the median FEN over (instances x repeats) of one solver on one set.
CrossEvalTable run_cross_eval(const std::vector<LabeledSet>& sets, const std::vector<solvers::SolverConfig>& solvers,
                              std::size_t repeats, Seed seed, std::size_t workers = 1);

// ---------------------------------------------------------------------------
// Hardness pipeline

struct ValidationResult {
    std::map<solvers::SolverKind, double> median_fen;
    std::map<solvers::SolverKind, double> success_rate;
};

/// Median FEN of every configured solver on `problem` over fresh seeds.
ValidationResult validate_instance(const Problem& problem, const ExperimentConfig& config, std::size_t seeds,
                                   Seed seed);

struct PipelineCell {
    Objective objective = Objective::Sphere;
    ConstraintKind kind = ConstraintKind::Linear;
    std::size_t count = 1;
    solvers::SolverKind target = solvers::SolverKind::DE;

    std::string id() const; ///< e.g. "sphere-linear-1c-DE-hard"
};

std::vector<PipelineCell> pipeline_cells(const PipelineGrid& grid);

struct PipelineEntry {
    PipelineCell cell;
    bool ok = false;
    std::string error;
    Seed evolver_seed = 0;
    std::string instance_file; ///< relative to the output directory
    std::vector<double> training_fitness;
    ValidationResult validation;
    features::FeatureVector features;
    std::optional<Instance> instance; ///< selected instance with its metadata
};

struct PipelineResult {
    std::vector<PipelineEntry> entries;
};

/// One DEMO run per grid cell; writes instances/<id>.json, manifest.json and
/// features.csv under `out_dir`. Cell failures are recorded, not thrown.
PipelineResult run_hardness_pipeline(const ExperimentConfig& config, Seed master_seed,
                                     const std::filesystem::path& out_dir, std::size_t workers = 1);

/// Evolves one cell, selects the most discriminating instance and validates it.
PipelineEntry run_pipeline_cell(const ExperimentConfig& config, const PipelineCell& cell, Seed evolver_seed);

/// Reads `<results>/manifest.json` and writes long-format feature CSVs and summary
/// tables under `<results>/report/`. Missing manifest is a DataError.
std::vector<std::filesystem::path> emit_report(const std::filesystem::path& results_dir);

/// Header of the long-format per-feature CSVs.
inline constexpr const char* kLongFormatHeader = "group,target_solver,n_constraints,value";

} // namespace copevolve::harness
