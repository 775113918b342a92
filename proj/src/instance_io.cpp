#include "copevolve/instance_io.hpp"

#include <fstream>
#include <sstream>

#include "copevolve/errors.hpp"

namespace copevolve {

using nlohmann::json;

json to_json(const Problem& problem) {
    json constraints = json::array();
    for (const auto& c : problem.constraints()) {
        constraints.push_back({{"kind", std::string(to_string(c.kind()))},
                               {"coeffs", c.coeffs()},
                               {"b", c.offset()}});
    }
    return {{"objective", std::string(to_string(problem.objective()))},
            {"dimension", problem.dimension()},
            {"bounds", {{"lower", problem.bounds().lower()}, {"upper", problem.bounds().upper()}}},
            {"constraints", std::move(constraints)}};
}

Problem problem_from_json(const json& j) {
    try {
        const auto objective = parse_objective(j.at("objective").get<std::string>());
        const auto dimension = j.at("dimension").get<std::size_t>();
        Bounds bounds(j.at("bounds").at("lower").get<Vector>(), j.at("bounds").at("upper").get<Vector>());
        if (bounds.dimension() != dimension) {
            throw DataError("bounds length does not match dimension");
        }
        std::vector<Constraint> constraints;
        for (const auto& c : j.at("constraints")) {
            constraints.emplace_back(parse_constraint_kind(c.at("kind").get<std::string>()),
                                     c.at("coeffs").get<Vector>(), c.at("b").get<double>());
        }
        return {objective, std::move(bounds), std::move(constraints)};
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed instance: ") + e.what());
    } catch (const ContractViolation& e) {
        throw DataError(std::string("invalid instance: ") + e.what());
    }
}

json to_json(const Instance& instance) {
    auto j = to_json(instance.problem);
    j["meta"] = instance.meta.is_null() ? json::object() : instance.meta;
    return j;
}

Instance instance_from_json(const json& j) {
    Instance out{problem_from_json(j)};
    if (j.contains("meta")) {
        if (!j["meta"].is_object()) {
            throw DataError("instance 'meta' must be an object");
        }
        out.meta = j["meta"];
    }
    return out;
}

Instance parse_instance(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("instance is not valid JSON: ") + e.what());
    }
    return instance_from_json(j);
}

std::string format_instance(const Instance& instance) {
    return to_json(instance).dump(2) + "\n";
}

Instance read_instance(const std::filesystem::path& path) {
    return parse_instance(read_file(path));
}

void write_instance(const std::filesystem::path& path, const Instance& instance) {
    write_file_atomic(path, format_instance(instance));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError("cannot write '" + tmp.string() + "'");
        }
        out << content;
        if (!out.flush()) {
            throw DataError("short write to '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace copevolve
