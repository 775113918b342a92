// Acceptance suite: one PASS/FAIL line per criterion on stdout, details on stderr.
// Usage: acceptance [criterion ...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "copevolve/errors.hpp"
#include "copevolve/evolver.hpp"
#include "copevolve/features.hpp"
#include "copevolve/harness.hpp"
#include "copevolve/instance_io.hpp"
#include "copevolve/solvers.hpp"
#include "oracles.hpp"

using namespace copevolve;
using solvers::SolverConfig;
using solvers::SolverKind;
namespace fs = std::filesystem;

namespace {

const SolverKind kAll[] = {SolverKind::DE, SolverKind::ES, SolverKind::PSO};

std::string name(SolverKind k) { return std::string(solvers::to_string(k)); }

struct Verdict {
    bool pass = false;
    std::string summary;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <typename... Args>
std::string fmt(const char* pattern, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

double median_of(std::vector<double> v) { return evolver::median(std::move(v)); }

harness::ExperimentConfig desk() { return harness::resolve_config(harness::preset_document(harness::Preset::Desk)); }

// 1. Each solver solves unconstrained Sphere (n=5, 1e-2, 20K) in >= 90% of 30
//    runs with median FEN < 10K; total runtime < 60 s.
Verdict solver_sanity() {
    const Stopwatch clock;
    const auto cfg = desk();
    const Problem sphere(Objective::Sphere, Bounds::uniform(5));
    bool pass = true;
    std::string summary;
    for (auto kind : kAll) {
        auto sc = cfg.solver(kind);
        sc.max_fen = 20000;
        sc.target_gap = 1e-2;
        std::vector<double> fens;
        int solved = 0;
        for (std::uint64_t s = 0; s < 30; ++s) {
            const auto out = solvers::solve(sphere, sc, derive_seed(0xACCE, {s}));
            fens.push_back(static_cast<double>(out.fen));
            solved += out.solved ? 1 : 0;
        }
        const double med = median_of(fens);
        pass = pass && solved >= 27 && med < 10000.0;
        summary += fmt("%s %d/30 median %.0f; ", name(kind).c_str(), solved, med);
    }
    const double t = clock.seconds();
    pass = pass && t < 60.0;
    return {pass, summary + fmt("%.1fs (limit 60s)", t)};
}

// 2. Feature oracles.
Verdict feature_oracles() {
    Rng rng(0xFEA7);
    auto coeff = [&] { return rng.uniform(-5.0, 5.0); };

    int ratio_fail = 0;
    double ratio_worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        std::vector<Constraint> cs;
        const auto m = 1 + rng.index(3);
        for (std::size_t j = 0; j < m; ++j) {
            if (rng.uniform() < 0.5) {
                cs.push_back(Constraint::linear({coeff(), coeff()}, rng.uniform(-1.0, 0.0)));
            } else {
                cs.push_back(Constraint::quadratic({coeff(), coeff(), coeff(), coeff()}, rng.uniform(-0.3, 0.0)));
            }
        }
        const Problem p(Objective::Sphere, Bounds::uniform(2), cs);
        const double err = std::abs(features::feasibility_ratio(p, 0.05, 10000, derive_seed(1, {std::uint64_t(t)})) -
                                    oracle::grid_feasibility_ratio(p, 0.05, 401));
        ratio_worst = std::max(ratio_worst, err);
        ratio_fail += err <= 0.02 ? 0 : 1;
    }

    int quad_fail = 0;
    int quad_checked = 0;
    double quad_worst = 0.0;
    while (quad_checked < 20) {
        const std::size_t n = 1 + rng.index(3);
        Vector a(2 * n);
        for (auto& v : a) {
            v = coeff();
        }
        const auto c = Constraint::quadratic(a, rng.uniform(-5.0, -0.01));
        const auto expect = oracle::ray_scan_distance(c);
        std::optional<double> got;
        try {
            got = features::shortest_distance(c);
        } catch (const NoBoundaryError&) {
        }
        if (!expect) {
            quad_fail += got ? 1 : 0;
            continue;
        }
        ++quad_checked;
        const double err = got ? std::abs(*got - *expect) : oracle::kInf;
        quad_worst = std::max(quad_worst, err);
        quad_fail += err <= 1e-3 ? 0 : 1;
    }

    int linear_fail = 0;
    for (int t = 0; t < 1000; ++t) {
        Vector a(1 + rng.index(6));
        double norm = 0.0;
        for (auto& v : a) {
            v = coeff();
            norm += v * v;
        }
        const auto c = Constraint::linear(a, rng.uniform(-25.0, 0.0));
        linear_fail += std::abs(features::shortest_distance(c) - std::abs(c.offset()) / std::sqrt(norm)) <= 1e-12 ? 0 : 1;
    }

    int angle_fail = 0;
    const auto e1 = Constraint::linear({1.0, 0.0}, 0.0);
    const auto e2 = Constraint::linear({0.0, 1.0}, 0.0);
    const auto diag = Constraint::linear({1.0, 1.0}, 0.0);
    angle_fail += std::abs(features::pairwise_angle(e1, e1) - 0.0) <= 1e-9 ? 0 : 1;
    angle_fail += std::abs(features::pairwise_angle(e1, diag) - 45.0) <= 1e-9 ? 0 : 1;
    angle_fail += std::abs(features::pairwise_angle(e1, e2) - 90.0) <= 1e-9 ? 0 : 1;

    const bool pass = ratio_fail == 0 && quad_fail == 0 && linear_fail == 0 && angle_fail == 0;
    return {pass, fmt("ratio %d/20 within 0.02 (worst %.4f); quadratic distance %d/20 within 1e-3 (worst %.2e); "
                      "linear %d/1000 exact; angles %d/3",
                      20 - ratio_fail, ratio_worst, quad_checked - quad_fail, quad_worst, 1000 - linear_fail,
                      3 - angle_fail)};
}

// 3. Comparison and dominance laws on 1000 random inputs each.
Verdict comparison_laws() {
    Rng rng(0x1A3);
    auto score = [&] {
        return solvers::Score{static_cast<double>(rng.index(7)),
                              rng.uniform() < 0.3 ? 0.0 : 0.05 * static_cast<double>(rng.index(8))};
    };
    int eps_fail = 0;
    for (int t = 0; t < 1000; ++t) {
        const double eps = rng.uniform() < 0.5 ? 0.0 : 0.05 * static_cast<double>(rng.index(5));
        const auto a = score();
        const auto b = score();
        const auto c = score();
        const auto ab = solvers::epsilon_compare(a, b, eps);
        const auto ba = solvers::epsilon_compare(b, a, eps);
        const auto bc = solvers::epsilon_compare(b, c, eps);
        const auto ac = solvers::epsilon_compare(a, c, eps);
        bool ok = solvers::epsilon_compare(a, a, eps) == 0;
        ok = ok && (ab < 0) == (ba > 0) && (ab == 0) == (ba == 0);
        ok = ok && !(ab <= 0 && bc <= 0 && !(ac <= 0));
        ok = ok && !(ab == 0 && bc == 0 && ac != 0);
        ok = ok && solvers::feasibility_compare(a, b) == solvers::epsilon_compare(a, b, 0.0);
        eps_fail += ok ? 0 : 1;
    }

    auto population = [&](std::size_t size, std::size_t m) {
        std::vector<evolver::Orientation> orient(m);
        for (auto& o : orient) {
            o = rng.uniform() < 0.5 ? evolver::Orientation::Minimize : evolver::Orientation::Maximize;
        }
        std::vector<evolver::FitnessVector> pop;
        for (std::size_t i = 0; i < size; ++i) {
            Vector v(m);
            for (auto& x : v) {
                x = static_cast<double>(rng.index(6));
            }
            pop.push_back({v, orient});
        }
        return pop;
    };
    int dom_fail = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto p = population(3, 1 + rng.index(3));
        bool ok = evolver::dominates(p[0], p[1]) == oracle::dominates(p[0], p[1]);
        ok = ok && !evolver::dominates(p[0], p[0]);
        ok = ok && !(evolver::dominates(p[0], p[1]) && evolver::dominates(p[1], p[0]));
        ok = ok && !(evolver::dominates(p[0], p[1]) && evolver::dominates(p[1], p[2]) &&
                     !evolver::dominates(p[0], p[2]));
        dom_fail += ok ? 0 : 1;
    }
    int sort_fail = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto pop = population(1 + rng.index(50), 1 + rng.index(3));
        auto got = evolver::nondominated_sort(pop);
        auto expect = oracle::peel_fronts(pop);
        for (auto* fronts : {&got, &expect}) {
            for (auto& f : *fronts) {
                std::sort(f.begin(), f.end());
            }
        }
        sort_fail += got == expect ? 0 : 1;
    }
    return {eps_fail + dom_fail + sort_fail == 0,
            fmt("epsilon_compare failures %d/1000; dominates failures %d/1000; nondominated_sort failures %d/1000",
                eps_fail, dom_fail, sort_fail)};
}

// 4. Evolved Hard population median fitness >= 1.5 x Easy, per solver, over 5 evolver seeds.
Verdict hardness_gap() {
    const Stopwatch clock;
    const auto cfg = desk();
    const auto shape = evolver::InstanceTemplate::uniform(Objective::Sphere, 5, ConstraintKind::Linear, 1);
    bool pass = true;
    std::string summary;
    for (auto kind : kAll) {
        std::vector<double> hard_all;
        std::vector<double> easy_all;
        std::string per_seed;
        for (std::uint64_t s = 0; s < 5; ++s) {
            auto ec = cfg.evolver;
            ec.seed = derive_seed(0x4A4D, {static_cast<std::uint64_t>(kind), s});
            std::vector<double> hard;
            std::vector<double> easy;
            for (const auto& m : evolver::evolve_single(shape, cfg.solver(kind), evolver::Direction::Harder, ec)) {
                hard.push_back(m.fitness);
            }
            for (const auto& m : evolver::evolve_single(shape, cfg.solver(kind), evolver::Direction::Easier, ec)) {
                easy.push_back(m.fitness);
            }
            per_seed += fmt(" %.2f", median_of(hard) / median_of(easy));
            hard_all.insert(hard_all.end(), hard.begin(), hard.end());
            easy_all.insert(easy_all.end(), easy.begin(), easy.end());
        }
        const double h = median_of(hard_all);
        const double e = median_of(easy_all);
        const bool ok = h >= 1.5 * e;
        pass = pass && ok;
        summary += fmt("%s hard %.0f / easy %.0f = %.2f; ", name(kind).c_str(), h, e, h / e);
        std::fprintf(stderr, "  [4] %s per-seed hard/easy ratios:%s\n", name(kind).c_str(), per_seed.c_str());
    }
    const double t = clock.seconds();
    pass = pass && t < 1800.0;
    return {pass, summary + fmt("%.1fs (limit 1800s)", t)};
}

// 5. The selected DEMO instance is >= 1.3 x harder for its target than for every
//    other solver over 10 fresh seeds, in >= 4 of 5 evolver seeds, per target.
Verdict discrimination() {
    const Stopwatch clock;
    const auto cfg = desk();
    bool pass = true;
    std::string summary;
    for (auto target : kAll) {
        int hits = 0;
        for (std::uint64_t s = 0; s < 5; ++s) {
            const harness::PipelineCell cell{Objective::Sphere, ConstraintKind::Linear, 1, target};
            const auto entry = harness::run_pipeline_cell(cfg, cell, derive_seed(0xD15C, {s}));
            const auto& fen = entry.validation.median_fen;
            bool ok = true;
            double worst = oracle::kInf;
            for (auto other : kAll) {
                if (other != target) {
                    ok = ok && fen.at(target) >= 1.3 * fen.at(other);
                    worst = std::min(worst, fen.at(target) / fen.at(other));
                }
            }
            hits += ok ? 1 : 0;
            std::fprintf(stderr, "  [5] %s-hard seed %llu: DE %.0f ES %.0f PSO %.0f, min ratio %.2f %s\n",
                         name(target).c_str(), static_cast<unsigned long long>(s), fen.at(SolverKind::DE),
                         fen.at(SolverKind::ES), fen.at(SolverKind::PSO), worst, ok ? "ok" : "miss");
        }
        pass = pass && hits >= 4;
        summary += fmt("%s-hard %d/5; ", name(target).c_str(), hits);
    }
    const double t = clock.seconds();
    pass = pass && t < 3600.0;
    return {pass, summary + fmt("need >= 4/5 each; %.1fs (limit 3600s)", t)};
}

// 6. Directional feature trends over >= 10 evolved instances per target class.
Verdict feature_trends() {
    const auto cfg = desk();
    std::map<SolverKind, std::vector<double>> stddev;
    std::map<SolverKind, std::vector<double>> distance;
    std::map<SolverKind, std::vector<double>> ratio;
    std::map<SolverKind, int> instances;
    for (auto target : kAll) {
        for (std::size_t count = 1; count <= 5; ++count) {
            for (std::uint64_t s = 0; s < 2; ++s) {
                const harness::PipelineCell cell{Objective::Sphere, ConstraintKind::Linear, count, target};
                auto c = cfg;
                c.sampling.seed = 0x5A;
                const auto entry = harness::run_pipeline_cell(c, cell, derive_seed(0x7E4D, {count, s}));
                const auto& fv = entry.features;
                stddev[target].insert(stddev[target].end(), fv.per_constraint_stddev.begin(),
                                      fv.per_constraint_stddev.end());
                for (const auto& d : fv.shortest_distances) {
                    if (d) {
                        distance[target].push_back(*d);
                    }
                }
                ratio[target].push_back(fv.feasibility_ratio);
                ++instances[target];
            }
        }
    }
    auto med = [](const std::vector<double>& v) { return v.empty() ? std::nan("") : median_of(v); };
    const auto de = SolverKind::DE;
    const auto es = SolverKind::ES;
    const auto pso = SolverKind::PSO;
    const bool a = med(stddev[de]) > med(stddev[es]) && med(stddev[de]) > med(stddev[pso]);
    const bool b = med(distance[es]) < med(distance[de]) && med(distance[es]) < med(distance[pso]);
    const bool c = med(ratio[de]) < med(ratio[es]) && med(ratio[de]) < med(ratio[pso]);
    std::fprintf(stderr, "  [6] instances per class: DE %d, ES %d, PSO %d\n", instances[de], instances[es],
                 instances[pso]);
    return {a && b && c,
            fmt("(a) stddev DE %.3f vs ES %.3f, PSO %.3f %s; (b) distance ES %.3f vs DE %.3f, PSO %.3f %s; "
                "(c) feasibility DE %.4f vs ES %.4f, PSO %.4f %s",
                med(stddev[de]), med(stddev[es]), med(stddev[pso]), a ? "ok" : "WRONG ORDER", med(distance[es]),
                med(distance[de]), med(distance[pso]), b ? "ok" : "WRONG ORDER", med(ratio[de]), med(ratio[es]),
                med(ratio[pso]), c ? "ok" : "WRONG ORDER")};
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) {
            files[fs::relative(e.path(), root).string()] = read_file(e.path());
        }
    }
    return files;
}

// 7. Same master seed, byte-identical outputs (also across worker counts).
Verdict determinism() {
    auto cfg = harness::load_config(harness::Preset::Desk, {},
                                    {"pipeline.objectives=[\"sphere\",\"rosenbrock\"]", "pipeline.counts=[1,2]",
                                     "evolver.generations=5"});
    const auto base = fs::temp_directory_path() / "copevolve_acceptance_determinism";
    fs::remove_all(base);
    const auto a = base / "a";
    const auto b = base / "b";
    harness::run_hardness_pipeline(cfg, 2024, a, 1);
    harness::run_hardness_pipeline(cfg, 2024, b, 2);
    harness::emit_report(a);
    harness::emit_report(b);
    const auto ta = tree(a);
    const auto tb = tree(b);
    std::size_t instance_files = 0;
    for (const auto& [path, _] : ta) {
        instance_files += path.rfind("instances/", 0) == 0 ? 1 : 0;
    }
    const bool pipeline_same = ta == tb && instance_files == 24;

    std::vector<harness::LabeledSet> sets;
    for (const auto& [path, text] : ta) {
        if (path.rfind("instances/", 0) == 0) {
            sets.push_back({path, {parse_instance(text).problem}});
        }
    }
    sets.resize(4);
    const auto x1 = harness::run_cross_eval(sets, cfg.all_solvers(), 3, 77, 1).to_csv();
    const auto x2 = harness::run_cross_eval(sets, cfg.all_solvers(), 3, 77, 2).to_csv();

    const auto shape = evolver::InstanceTemplate::uniform(Objective::Ackley, 5, ConstraintKind::Quadratic, 2);
    auto ec = cfg.evolver;
    ec.seed = 31;
    const auto s1 = evolver::evolve_single(shape, cfg.solver(SolverKind::PSO), evolver::Direction::Harder, ec);
    ec.threads = 2;
    const auto s2 = evolver::evolve_single(shape, cfg.solver(SolverKind::PSO), evolver::Direction::Harder, ec);
    bool single_same = s1.size() == s2.size();
    for (std::size_t i = 0; single_same && i < s1.size(); ++i) {
        single_same = s1[i].genome == s2[i].genome && s1[i].fitness == s2[i].fitness;
    }
    fs::remove_all(base);
    return {pipeline_same && x1 == x2 && single_same,
            fmt("pipeline tree %s (%zu files, %zu instances); cross-eval table %s; evolve_single %s",
                pipeline_same ? "identical" : "DIFFERS", ta.size(), instance_files, x1 == x2 ? "identical" : "DIFFERS",
                single_same ? "identical" : "DIFFERS")};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"solver sanity", solver_sanity},
        {"feature oracles", feature_oracles},
        {"epsilon-comparison and dominance laws", comparison_laws},
        {"single-objective hardness gap", hardness_gap},
        {"multi-objective discrimination", discrimination},
        {"feature trends", feature_trends},
        {"determinism", determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.insert(std::atoi(argv[i]));
    }
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id)) {
            continue;
        }
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::printf("[%s] %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), v.summary.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
