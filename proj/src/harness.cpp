#include "copevolve/harness.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "copevolve/errors.hpp"
#include "copevolve/instance_io.hpp"
#include "copevolve/parallel.hpp"

namespace copevolve::harness {

using nlohmann::json;
using solvers::SolverConfig;
using solvers::SolverKind;

namespace {

constexpr SolverKind kAllSolvers[] = {SolverKind::DE, SolverKind::ES, SolverKind::PSO};

std::string key_of(SolverKind kind) { return std::string(solvers::to_string(kind)); }

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

Preset parse_preset(std::string_view name) {
    const auto s = lower(std::string(name));
    if (s == "desk") {
        return Preset::Desk;
    }
    if (s == "paper") {
        return Preset::Paper;
    }
    throw DataError("unknown preset: " + std::string(name));
}

std::string_view to_string(Preset preset) { return preset == Preset::Desk ? "desk" : "paper"; }

json preset_document(Preset preset) {
    const bool desk = preset == Preset::Desk;
    const std::size_t max_fen = desk ? 20000 : 300000;
    const auto de = SolverConfig::defaults(SolverKind::DE);
    const auto es = SolverConfig::defaults(SolverKind::ES);

    json doc;
    doc["preset"] = std::string(to_string(preset));
    doc["dimension"] = desk ? 5 : 30;
    doc["box"] = 5.0;
    doc["solvers"]["DE"] = {
        {"population_size", desk ? 20 : 100},
        {"max_fen", max_fen},
        {"target_gap", 1e-2},
        {"crossover_rate", de.de.crossover_rate},
        {"scale_factor", de.de.scale_factor},
        {"epsilon_quantile", de.de.epsilon_quantile},
        {"epsilon_cutoff_fraction", de.de.epsilon_cutoff_fraction},
        {"epsilon_exponent", de.de.epsilon_exponent},
        {"gradient_repair_prob", de.de.gradient_repair_prob},
        {"gradient_step", de.de.gradient_step},
    };
    doc["solvers"]["ES"] = {
        {"max_fen", max_fen},
        {"target_gap", 1e-2},
        {"initial_sigma_fraction", es.es.initial_sigma_fraction},
        {"target_success", es.es.target_success},
        {"path_smoothing", nullptr},
        {"constraint_reduction", nullptr},
        {"damping", nullptr},
    };
    doc["solvers"]["PSO"] = {
        {"population_size", desk ? 16 : 64},
        {"subswarm_size", 8},
        {"max_fen", max_fen},
        {"target_gap", 1e-2},
    };
    doc["evolver"] = {
        {"population_size", desk ? 20 : 40},
        {"generations", desk ? 30 : 5000},
        {"crossover_rate", 0.5},
        {"scale_factor", 0.9},
        {"repeats", desk ? 3 : 5},
    };
    doc["features"] = {{"radius_fraction", 0.05}, {"samples", 10000}};
    doc["pipeline"] = {
        {"objectives", {"sphere", "ackley", "rosenbrock"}},
        {"kinds", {"linear", "quadratic"}},
        {"counts", {1, 2, 3, 4, 5}},
        {"targets", {"DE", "ES", "PSO"}},
        {"validation_seeds", 10},
    };
    doc["cross_eval"] = {{"repeats", desk ? 10 : 30}};
    return doc;
}

namespace {

json parse_value(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return text;
    }
}

void merge_known(json& base, const json& layer, const std::string& path) {
    if (!layer.is_object()) {
        throw DataError("config section '" + path + "' must be an object");
    }
    for (const auto& [key, value] : layer.items()) {
        const auto here = path.empty() ? key : path + "." + key;
        if (!base.contains(key)) {
            throw DataError("unknown config key: " + here);
        }
        if (base[key].is_object()) {
            merge_known(base[key], value, here);
        } else {
            base[key] = value;
        }
    }
}

template <typename T>
T get_field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) {
        throw DataError("missing config key: " + where + "." + key);
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw DataError("config key has the wrong type: " + where + "." + key);
    }
}

std::size_t get_count(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() < 0) {
        throw DataError("config key must be a non-negative integer: " + where + "." + key);
    }
    return j.at(key).get<std::size_t>();
}

std::optional<double> get_optional(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return std::nullopt;
    }
    return get_field<double>(j, key, where);
}

template <typename T, typename Parse>
std::vector<T> get_list(const json& j, const char* key, Parse parse) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        throw DataError(std::string("config key must be a list: pipeline.") + key);
    }
    std::vector<T> out;
    for (const auto& item : j.at(key)) {
        out.push_back(parse(item));
    }
    return out;
}

} // namespace

json apply_overrides(json doc, const std::vector<std::string>& assignments) {
    for (const auto& assignment : assignments) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw DataError("override must look like key=value: " + assignment);
        }
        const auto key = assignment.substr(0, eq);
        json* node = &doc;
        std::istringstream parts(key);
        std::string part;
        while (std::getline(parts, part, '.')) {
            if (!node->is_object() || !node->contains(part)) {
                throw DataError("unknown config key: " + key);
            }
            node = &(*node)[part];
        }
        if (node->is_object()) {
            throw DataError("cannot override a whole config section: " + key);
        }
        auto value = parse_value(assignment.substr(eq + 1));
        if (node->is_array() && !value.is_array()) {
            value = json::array({value});
        }
        *node = std::move(value);
    }
    return doc;
}

std::vector<SolverConfig> ExperimentConfig::all_solvers() const {
    std::vector<SolverConfig> out;
    for (const auto& [kind, config] : solvers) {
        out.push_back(config);
    }
    return out;
}

namespace {

ExperimentConfig resolve_document(const json& document) {
    if (!document.is_object()) {
        throw DataError("config must be an object");
    }
    ExperimentConfig cfg;
    cfg.document = document;
    cfg.preset = parse_preset(get_field<std::string>(document, "preset", "config"));
    cfg.dimension = get_count(document, "dimension", "config");
    cfg.box = get_field<double>(document, "box", "config");
    require(cfg.dimension >= 1, "dimension must be at least 1");
    require(cfg.box > 0.0, "box must be positive");

    const auto& sj = document.at("solvers");
    for (const auto kind : kAllSolvers) {
        const auto name = key_of(kind);
        const auto where = "solvers." + name;
        const auto& j = sj.at(name);
        auto sc = SolverConfig::defaults(kind);
        sc.max_fen = get_count(j, "max_fen", where);
        sc.target_gap = get_field<double>(j, "target_gap", where);
        switch (kind) {
        case SolverKind::DE:
            sc.population_size = get_count(j, "population_size", where);
            sc.de.crossover_rate = get_field<double>(j, "crossover_rate", where);
            sc.de.scale_factor = get_field<double>(j, "scale_factor", where);
            sc.de.epsilon_quantile = get_field<double>(j, "epsilon_quantile", where);
            sc.de.epsilon_cutoff_fraction = get_field<double>(j, "epsilon_cutoff_fraction", where);
            sc.de.epsilon_exponent = get_field<double>(j, "epsilon_exponent", where);
            sc.de.gradient_repair_prob = get_field<double>(j, "gradient_repair_prob", where);
            sc.de.gradient_step = get_field<double>(j, "gradient_step", where);
            break;
        case SolverKind::ES:
            sc.es.initial_sigma_fraction = get_field<double>(j, "initial_sigma_fraction", where);
            sc.es.target_success = get_field<double>(j, "target_success", where);
            sc.es.path_smoothing = get_optional(j, "path_smoothing", where);
            sc.es.constraint_reduction = get_optional(j, "constraint_reduction", where);
            sc.es.damping = get_optional(j, "damping", where);
            break;
        case SolverKind::PSO:
            sc.population_size = get_count(j, "population_size", where);
            sc.pso.subswarm_size = get_count(j, "subswarm_size", where);
            break;
        }
        sc.validate();
        cfg.solvers[kind] = sc;
    }

    const auto& ej = document.at("evolver");
    cfg.evolver.population_size = get_count(ej, "population_size", "evolver");
    cfg.evolver.generations = get_count(ej, "generations", "evolver");
    cfg.evolver.crossover_rate = get_field<double>(ej, "crossover_rate", "evolver");
    cfg.evolver.scale_factor = get_field<double>(ej, "scale_factor", "evolver");
    cfg.evolver.repeats = get_count(ej, "repeats", "evolver");
    cfg.evolver.validate();

    const auto& fj = document.at("features");
    cfg.sampling.radius_fraction = get_field<double>(fj, "radius_fraction", "features");
    cfg.sampling.samples = get_count(fj, "samples", "features");
    require(cfg.sampling.radius_fraction > 0.0 && cfg.sampling.radius_fraction <= 1.0,
            "features.radius_fraction must lie in (0, 1]");
    require(cfg.sampling.samples >= 1, "features.samples must be at least 1");

    const auto& pj = document.at("pipeline");
    auto as_string = [](const json& item) {
        if (!item.is_string()) {
            throw DataError("pipeline list entries must be strings");
        }
        return item.get<std::string>();
    };
    cfg.grid.objectives =
        get_list<Objective>(pj, "objectives", [&](const json& i) { return parse_objective(as_string(i)); });
    cfg.grid.kinds =
        get_list<ConstraintKind>(pj, "kinds", [&](const json& i) { return parse_constraint_kind(as_string(i)); });
    cfg.grid.counts = get_list<std::size_t>(pj, "counts", [](const json& i) {
        if (!i.is_number_integer() || i.get<long long>() < 1) {
            throw DataError("pipeline.counts entries must be positive integers");
        }
        return i.get<std::size_t>();
    });
    cfg.grid.targets =
        get_list<SolverKind>(pj, "targets", [&](const json& i) { return solvers::parse_solver_kind(as_string(i)); });
    cfg.grid.validation_seeds = get_count(pj, "validation_seeds", "pipeline");
    require(cfg.grid.validation_seeds >= 1, "pipeline.validation_seeds must be at least 1");

    cfg.cross_eval_repeats = get_count(document.at("cross_eval"), "repeats", "cross_eval");
    require(cfg.cross_eval_repeats >= 1, "cross_eval.repeats must be at least 1");
    return cfg;
}

} // namespace

ExperimentConfig resolve_config(const json& document) {
    try {
        return resolve_document(document);
    } catch (const json::exception& e) {
        throw DataError("malformed config: " + std::string(e.what()));
    }
}

ExperimentConfig load_config(Preset preset, const std::filesystem::path& config_file,
                             const std::vector<std::string>& assignments) {
    auto doc = preset_document(preset);
    if (!config_file.empty()) {
        json layer;
        try {
            layer = json::parse(read_file(config_file));
        } catch (const json::parse_error& e) {
            throw DataError("malformed config file " + config_file.string() + ": " + e.what());
        }
        if (layer.is_object() && layer.contains("preset")) {
            doc = preset_document(parse_preset(layer.at("preset").get<std::string>()));
        }
        merge_known(doc, layer, "");
    }
    return resolve_config(apply_overrides(std::move(doc), assignments));
}

// ---------------------------------------------------------------------------

const CrossEvalCell& CrossEvalTable::at(const std::string& label, SolverKind solver) const {
    for (const auto& cell : cells) {
        if (cell.set_label == label && cell.solver == solver) {
            return cell;
        }
    }
    throw ContractViolation("no cross-eval cell for " + label + "/" + key_of(solver));
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

} // namespace

std::string CrossEvalTable::to_csv() const {
    std::string out = "set,solver,median_fen,success_rate,runs,status,error\n";
    for (const auto& c : cells) {
        out += csv_quote(c.set_label) + ',' + key_of(c.solver) + ',';
        out += c.failed ? "null" : features::format_number(c.median_fen);
        out += ',';
        out += c.failed ? "null" : features::format_number(c.success_rate);
        out += ',' + std::to_string(c.runs) + ',' + (c.failed ? "failed" : "ok") + ',' + csv_quote(c.error) + '\n';
    }
    return out;
}

CrossEvalTable run_cross_eval(const std::vector<LabeledSet>& sets, const std::vector<SolverConfig>& solver_list,
                              std::size_t repeats, Seed seed, std::size_t workers) {
    require(!sets.empty(), "cross evaluation needs at least one instance set");
    require(!solver_list.empty(), "cross evaluation needs at least one solver");
    require(repeats >= 1, "repeats must be at least 1");

    CrossEvalTable table;
    for (const auto& set : sets) {
        for (const auto& sc : solver_list) {
            table.cells.push_back({set.label, sc.kind, false, {}, 0.0, 0.0, 0});
        }
    }
    parallel_for(table.cells.size(), workers, [&](std::size_t idx) {
        const auto s = idx / solver_list.size();
        const auto& set = sets[s];
        const auto& sc = solver_list[idx % solver_list.size()];
        auto& cell = table.cells[idx];
        try {
            require(!set.problems.empty(), "instance set '" + set.label + "' is empty");
            const auto dim = set.problems.front().dimension();
            for (const auto& p : set.problems) {
                require(p.dimension() == dim, "dimension mismatch within instance set '" + set.label + "'");
            }
            sc.validate();
            Vector fens;
            std::size_t solved = 0;
            for (std::size_t i = 0; i < set.problems.size(); ++i) {
                for (std::size_t r = 0; r < repeats; ++r) {
                    const auto out = solvers::solve(set.problems[i], sc, derive_seed(seed, {s, i, r}));
                    fens.push_back(static_cast<double>(out.fen));
                    solved += out.solved ? 1 : 0;
                }
            }
            cell.runs = fens.size();
            cell.median_fen = evolver::median(fens);
            cell.success_rate = static_cast<double>(solved) / static_cast<double>(fens.size());
        } catch (const std::exception& e) {
            cell.failed = true;
            cell.error = e.what();
        }
    });
    return table;
}

// ---------------------------------------------------------------------------

ValidationResult validate_instance(const Problem& problem, const ExperimentConfig& config, std::size_t seeds,
                                   Seed seed) {
    require(seeds >= 1, "validation needs at least one seed");
    ValidationResult result;
    for (const auto& [kind, sc] : config.solvers) {
        Vector fens;
        std::size_t solved = 0;
        for (std::size_t r = 0; r < seeds; ++r) {
            const auto out = solvers::solve(problem, sc, derive_seed(seed, {static_cast<std::uint64_t>(kind), r}));
            fens.push_back(static_cast<double>(out.fen));
            solved += out.solved ? 1 : 0;
        }
        result.median_fen[kind] = evolver::median(fens);
        result.success_rate[kind] = static_cast<double>(solved) / static_cast<double>(seeds);
    }
    return result;
}

std::string PipelineCell::id() const {
    return std::string(to_string(objective)) + "-" + std::string(to_string(kind)) + "-" + std::to_string(count) +
           "c-" + key_of(target) + "-hard";
}

std::vector<PipelineCell> pipeline_cells(const PipelineGrid& grid) {
    std::vector<PipelineCell> cells;
    for (const auto objective : grid.objectives) {
        for (const auto kind : grid.kinds) {
            for (const auto count : grid.counts) {
                for (const auto target : grid.targets) {
                    cells.push_back({objective, kind, count, target});
                }
            }
        }
    }
    return cells;
}

namespace {

constexpr std::uint64_t kValidationStream = 0x7A11D;
constexpr std::uint64_t kSamplingStream = 0xFEA7;

Seed cell_seed(Seed master, const PipelineCell& cell) {
    return derive_seed(master, {static_cast<std::uint64_t>(cell.objective), static_cast<std::uint64_t>(cell.kind),
                                cell.count, static_cast<std::uint64_t>(cell.target)});
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json features_json(const features::FeatureVector& fv) {
    json angles = json::array();
    for (const auto& a : fv.pairwise_angles_deg) {
        angles.push_back({{"first", a.first}, {"second", a.second}, {"degrees", optional_json(a.degrees)}});
    }
    json lin = json::array();
    for (const auto& v : fv.linear_term_stddev) {
        lin.push_back(optional_json(v));
    }
    json dist = json::array();
    for (const auto& v : fv.shortest_distances) {
        dist.push_back(optional_json(v));
    }
    return {{"stddev", fv.per_constraint_stddev}, {"linear_term_stddev", lin}, {"angles", angles},
            {"distances", dist},                   {"feasibility_ratio", fv.feasibility_ratio}};
}

json solver_map_json(const std::map<SolverKind, double>& m) {
    json out = json::object();
    for (const auto& [kind, v] : m) {
        out[key_of(kind)] = v;
    }
    return out;
}

} // namespace

PipelineEntry run_pipeline_cell(const ExperimentConfig& config, const PipelineCell& cell, Seed evolver_seed) {
    PipelineEntry entry;
    entry.cell = cell;
    entry.evolver_seed = evolver_seed;

    const auto shape = evolver::InstanceTemplate::uniform(cell.objective, config.dimension, cell.kind, cell.count,
                                                          config.box);
    std::vector<SolverConfig> others;
    for (const auto& [kind, sc] : config.solvers) {
        if (kind != cell.target) {
            others.push_back(sc);
        }
    }
    auto ec = config.evolver;
    ec.seed = evolver_seed;
    const auto front = evolver::evolve_multi(shape, config.solver(cell.target), others, ec);
    const auto best = evolver::select_discriminating_index(front);
    const auto problem = evolver::decode(front[best].genome);
    entry.training_fitness = front[best].fitness.values;
    entry.validation =
        validate_instance(problem, config, config.grid.validation_seeds, derive_seed(evolver_seed, {kValidationStream}));
    entry.features = features::feature_vector(problem, config.sampling);
    entry.ok = true;

    const json meta = {
        {"generator", "evolve-multi"},
        {"target_solver", key_of(cell.target)},
        {"hardness", "hard-for-target"},
        {"evolver_seed", evolver_seed},
        {"preset", std::string(to_string(config.preset))},
        {"training_fitness", entry.training_fitness},
        {"validation_fen", solver_map_json(entry.validation.median_fen)},
        {"validation_success", solver_map_json(entry.validation.success_rate)},
    };
    entry.instance = Instance{problem, meta};
    return entry;
}

PipelineResult run_hardness_pipeline(const ExperimentConfig& config, Seed master_seed,
                                     const std::filesystem::path& out_dir, std::size_t workers) {
    const auto cells = pipeline_cells(config.grid);
    auto cfg = config;
    cfg.sampling.seed = derive_seed(master_seed, {kSamplingStream});

    PipelineResult result;
    result.entries.resize(cells.size());
    std::vector<std::string> rows(cells.size());
    parallel_for(cells.size(), workers, [&](std::size_t i) {
        const auto& cell = cells[i];
        auto& entry = result.entries[i];
        entry.cell = cell;
        entry.evolver_seed = cell_seed(master_seed, cell);
        try {
            entry = run_pipeline_cell(cfg, cell, entry.evolver_seed);
            auto& inst = *entry.instance;
            inst.meta["seed"] = master_seed;
            inst.meta["instance_id"] = cell.id();
            entry.instance_file = "instances/" + cell.id() + ".json";
            write_instance(out_dir / entry.instance_file, inst);
            rows[i] = features::report_row(cell.id(), inst.problem, entry.features, cfg.sampling);
        } catch (const std::exception& e) {
            entry.ok = false;
            entry.error = e.what();
        }
    });

    json entries = json::array();
    std::string features_csv;
    std::string validation_csv = "instance_id,target_solver,DE,ES,PSO\n";
    {
        const auto& cols = features::report_columns();
        for (std::size_t c = 0; c < cols.size(); ++c) {
            features_csv += (c ? "," : "") + cols[c];
        }
        features_csv += '\n';
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& e = result.entries[i];
        json j = {
            {"id", e.cell.id()},
            {"objective", std::string(to_string(e.cell.objective))},
            {"kind", std::string(to_string(e.cell.kind))},
            {"n_constraints", e.cell.count},
            {"target_solver", key_of(e.cell.target)},
            {"evolver_seed", e.evolver_seed},
            {"status", e.ok ? "ok" : "failed"},
        };
        if (e.ok) {
            j["instance_file"] = e.instance_file;
            j["training_fitness"] = e.training_fitness;
            j["validation_fen"] = solver_map_json(e.validation.median_fen);
            j["validation_success"] = solver_map_json(e.validation.success_rate);
            j["features"] = features_json(e.features);
            features_csv += rows[i] + '\n';
            validation_csv += e.cell.id() + ',' + key_of(e.cell.target);
            for (const auto kind : kAllSolvers) {
                const auto it = e.validation.median_fen.find(kind);
                validation_csv += ',' + (it == e.validation.median_fen.end()
                                             ? std::string("null")
                                             : features::format_number(it->second));
            }
            validation_csv += '\n';
        } else {
            j["error"] = e.error;
        }
        entries.push_back(std::move(j));
    }
    const json manifest = {
        {"preset", std::string(to_string(cfg.preset))},
        {"master_seed", master_seed},
        {"sampling",
         {{"radius_fraction", cfg.sampling.radius_fraction},
          {"samples", cfg.sampling.samples},
          {"seed", cfg.sampling.seed}}},
        {"config", cfg.document},
        {"entries", entries},
    };
    write_file_atomic(out_dir / "features.csv", features_csv);
    write_file_atomic(out_dir / "validation.csv", validation_csv);
    write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return result;
}

// ---------------------------------------------------------------------------

namespace {

struct ReportKey {
    std::string group;
    std::string target;
    std::size_t count = 0;

    auto operator<=>(const ReportKey&) const = default;
};

std::string long_prefix(const ReportKey& k) { return k.group + ',' + k.target + ',' + std::to_string(k.count) + ','; }

std::string value_text(const json& v) {
    if (v.is_null()) {
        return "null";
    }
    return features::format_number(v.get<double>());
}

} // namespace

std::vector<std::filesystem::path> emit_report(const std::filesystem::path& results_dir) {
    const auto manifest_path = results_dir / "manifest.json";
    if (!std::filesystem::exists(manifest_path)) {
        throw DataError("no manifest at " + manifest_path.string());
    }
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const json::parse_error& e) {
        throw DataError("malformed manifest: " + std::string(e.what()));
    }
    const json entries = manifest.is_object() && manifest.contains("entries") ? manifest.at("entries") : json::array();
    if (!entries.is_array()) {
        throw DataError("manifest entries must be a list");
    }

    const std::string header = std::string(kLongFormatHeader) + '\n';
    std::string stddev = header;
    std::string linear_stddev = header;
    std::string distance = header;
    std::string angle = header;
    std::string feasibility = header;

    std::map<ReportKey, Vector> ratio_cells;
    std::map<ReportKey, std::vector<double>> angle_cells;
    std::map<ReportKey, json> validation_cells;
    std::set<std::size_t> counts;

    for (const auto& e : entries) {
        try {
            if (e.at("status").get<std::string>() != "ok") {
                continue;
            }
            const ReportKey key{e.at("objective").get<std::string>() + "-" + e.at("kind").get<std::string>(),
                                e.at("target_solver").get<std::string>(), e.at("n_constraints").get<std::size_t>()};
            const auto prefix = long_prefix(key);
            const auto& f = e.at("features");
            for (const auto& v : f.at("stddev")) {
                stddev += prefix + value_text(v) + '\n';
            }
            for (const auto& v : f.at("linear_term_stddev")) {
                if (!v.is_null()) {
                    linear_stddev += prefix + value_text(v) + '\n';
                }
            }
            for (const auto& v : f.at("distances")) {
                distance += prefix + value_text(v) + '\n';
            }
            auto& angle_list = angle_cells[key];
            for (const auto& a : f.at("angles")) {
                angle += prefix + value_text(a.at("degrees")) + '\n';
                if (!a.at("degrees").is_null()) {
                    angle_list.push_back(a.at("degrees").get<double>());
                }
            }
            const double ratio = f.at("feasibility_ratio").get<double>();
            feasibility += prefix + features::format_number(ratio) + '\n';
            ratio_cells[key].push_back(ratio);
            counts.insert(key.count);
            validation_cells[key] = e.at("validation_fen");
        } catch (const json::exception& ex) {
            throw DataError("malformed manifest entry: " + std::string(ex.what()));
        }
    }

    // Feasibility ratio: one row per (group, target), one column per constraint count.
    std::string ratio_table = "group,target_solver";
    for (const auto c : counts) {
        ratio_table += "," + std::to_string(c) + "c";
    }
    ratio_table += '\n';
    std::map<std::pair<std::string, std::string>, std::map<std::size_t, double>> ratio_rows;
    for (const auto& [key, values] : ratio_cells) {
        ratio_rows[{key.group, key.target}][key.count] =
            std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    }
    for (const auto& [gt, by_count] : ratio_rows) {
        ratio_table += gt.first + ',' + gt.second;
        for (const auto c : counts) {
            const auto it = by_count.find(c);
            ratio_table += ',' + (it == by_count.end() ? std::string("null") : features::format_number(it->second));
        }
        ratio_table += '\n';
    }

    std::string angle_table = "group,target_solver,n_constraints,angle_mean,angle_min,angle_max,pairs\n";
    for (const auto& [key, values] : angle_cells) {
        if (key.count < 2) {
            continue;
        }
        angle_table += long_prefix(key);
        if (values.empty()) {
            angle_table += "null,null,null,0\n";
            continue;
        }
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
        angle_table += features::format_number(mean) + ',' +
                       features::format_number(*std::min_element(values.begin(), values.end())) + ',' +
                       features::format_number(*std::max_element(values.begin(), values.end())) + ',' +
                       std::to_string(values.size()) + '\n';
    }

    std::string validation_table = "group,target_solver,n_constraints,DE,ES,PSO\n";
    for (const auto& [key, fen] : validation_cells) {
        validation_table += long_prefix(key);
        for (std::size_t s = 0; s < 3; ++s) {
            const auto name = key_of(kAllSolvers[s]);
            validation_table += (s ? "," : "") + (fen.contains(name) ? value_text(fen.at(name)) : std::string("null"));
        }
        validation_table += '\n';
    }

    const auto dir = results_dir / "report";
    const std::vector<std::pair<std::string, const std::string*>> files{
        {"stddev_long.csv", &stddev},
        {"linear_term_stddev_long.csv", &linear_stddev},
        {"distance_long.csv", &distance},
        {"angle_long.csv", &angle},
        {"feasibility_ratio_long.csv", &feasibility},
        {"feasibility_ratio_table.csv", &ratio_table},
        {"angle_table.csv", &angle_table},
        {"validation_fen_table.csv", &validation_table},
    };
    std::vector<std::filesystem::path> written;
    for (const auto& [name, content] : files) {
        write_file_atomic(dir / name, *content);
        written.push_back(dir / name);
    }
    return written;
}

} // namespace copevolve::harness
