#include "copevolve/evolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "copevolve/errors.hpp"
#include "copevolve/parallel.hpp"

namespace copevolve::evolver {

namespace {

std::size_t coeff_count(ConstraintKind kind, std::size_t n) {
    return kind == ConstraintKind::Linear ? n : 2 * n;
}

} // namespace

// ---------------------------------------------------------------------------
// Genome encoding

InstanceTemplate InstanceTemplate::uniform(Objective objective, std::size_t dimension, ConstraintKind kind,
                                           std::size_t count, double box) {
    InstanceTemplate t;
    t.objective = objective;
    t.bounds = Bounds::uniform(dimension, -box, box);
    t.kinds.assign(count, kind);
    return t;
}

std::size_t InstanceTemplate::gene_count() const {
    std::size_t total = 0;
    for (auto k : kinds) {
        total += coeff_count(k, dimension()) + 1;
    }
    return total;
}

Vector InstanceTemplate::gene_lower() const {
    Vector out;
    out.reserve(gene_count());
    const double offset_lo = -std::abs(coeff_range.hi) * static_cast<double>(dimension());
    for (auto k : kinds) {
        out.insert(out.end(), coeff_count(k, dimension()), coeff_range.lo);
        out.push_back(offset_lo);
    }
    return out;
}

Vector InstanceTemplate::gene_upper() const {
    Vector out;
    out.reserve(gene_count());
    for (auto k : kinds) {
        out.insert(out.end(), coeff_count(k, dimension()), coeff_range.hi);
        out.push_back(0.0);
    }
    return out;
}

Problem decode(const InstanceGenome& genome) {
    const auto& shape = genome.shape;
    require(genome.genes.size() == shape.gene_count(), "genome length does not match its template");
    std::vector<Constraint> constraints;
    constraints.reserve(shape.kinds.size());
    auto it = genome.genes.begin();
    for (auto kind : shape.kinds) {
        const auto m = static_cast<std::ptrdiff_t>(coeff_count(kind, shape.dimension()));
        constraints.emplace_back(kind, Vector(it, it + m), *(it + m));
        it += m + 1;
    }
    return {shape.objective, shape.bounds, std::move(constraints)};
}

InstanceGenome encode(const InstanceTemplate& shape, const Problem& problem) {
    require(problem.objective() == shape.objective, "objective differs from template");
    require(problem.bounds() == shape.bounds, "bounds differ from template");
    require(problem.constraints().size() == shape.kinds.size(), "constraint count differs from template");
    InstanceGenome g{shape, {}};
    g.genes.reserve(shape.gene_count());
    for (std::size_t j = 0; j < shape.kinds.size(); ++j) {
        const auto& c = problem.constraints()[j];
        require(c.kind() == shape.kinds[j], "constraint kind differs from template");
        g.genes.insert(g.genes.end(), c.coeffs().begin(), c.coeffs().end());
        g.genes.push_back(c.offset());
    }
    return g;
}

void clamp_genes(const InstanceTemplate& shape, Vector& genes) {
    require(genes.size() == shape.gene_count(), "genome length does not match its template");
    const auto lo = shape.gene_lower();
    const auto hi = shape.gene_upper();
    for (std::size_t i = 0; i < genes.size(); ++i) {
        genes[i] = std::clamp(genes[i], lo[i], hi[i]);
    }
}

InstanceGenome random_genome(const InstanceTemplate& shape, Rng& rng) {
    const auto lo = shape.gene_lower();
    const auto hi = shape.gene_upper();
    InstanceGenome g{shape, Vector(lo.size())};
    for (std::size_t i = 0; i < lo.size(); ++i) {
        g.genes[i] = std::min(rng.uniform(lo[i], hi[i]), hi[i]);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Fitness

void EvolverConfig::validate() const {
    require(population_size >= 4, "evolver population must be at least 4");
    require(crossover_rate >= 0.0 && crossover_rate <= 1.0, "evolver CR must lie in [0, 1]");
    require(scale_factor > 0.0, "evolver scale factor must be positive");
    require(repeats >= 1, "repeats must be at least 1");
}

double median(Vector values) {
    require(!values.empty(), "median of an empty set");
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double fen_fitness(const InstanceGenome& genome, const solvers::SolverConfig& solver, std::size_t repeats, Seed seed,
                   std::size_t threads) {
    require(repeats >= 1, "repeats must be at least 1");
    const auto problem = decode(genome);
    Vector fens(repeats);
    parallel_for(repeats, threads, [&](std::size_t r) {
        fens[r] = static_cast<double>(solvers::solve(problem, solver, derive_seed(seed, {r})).fen);
    });
    return median(std::move(fens));
}

FitnessVector multi_fitness(const InstanceGenome& genome, const solvers::SolverConfig& target,
                            const std::vector<solvers::SolverConfig>& others, std::size_t repeats, Seed seed,
                            std::size_t threads) {
    require(repeats >= 1, "repeats must be at least 1");
    const auto problem = decode(genome);
    const std::size_t m = others.size() + 1;
    std::vector<Vector> fens(m, Vector(repeats));
    parallel_for(m * repeats, threads, [&](std::size_t task) {
        const auto s = task / repeats;
        const auto r = task % repeats;
        const auto& cfg = s == 0 ? target : others[s - 1];
        fens[s][r] = static_cast<double>(solvers::solve(problem, cfg, derive_seed(seed, {s, r})).fen);
    });
    FitnessVector fv;
    for (std::size_t s = 0; s < m; ++s) {
        fv.values.push_back(median(std::move(fens[s])));
        fv.orientation.push_back(s == 0 ? Orientation::Maximize : Orientation::Minimize);
    }
    return fv;
}

namespace {

// DE/rand/1/bin trial from donors drawn out of [0, pool) excluding `target`.
Vector de_trial(const std::vector<const Vector*>& pool, std::size_t target, const EvolverConfig& config,
                const InstanceTemplate& shape, Rng& rng) {
    const auto n = pool.size();
    std::size_t r1, r2, r3;
    do { r1 = rng.index(n); } while (r1 == target);
    do { r2 = rng.index(n); } while (r2 == target || r2 == r1);
    do { r3 = rng.index(n); } while (r3 == target || r3 == r1 || r3 == r2);

    const auto& parent = *pool[target];
    Vector trial = parent;
    const std::size_t jrand = rng.index(parent.size());
    for (std::size_t k = 0; k < parent.size(); ++k) {
        if (k == jrand || rng.uniform() < config.crossover_rate) {
            trial[k] = (*pool[r1])[k] + config.scale_factor * ((*pool[r2])[k] - (*pool[r3])[k]);
        }
    }
    clamp_genes(shape, trial);
    return trial;
}

constexpr std::uint64_t kInitTag = 0x1417;
constexpr std::uint64_t kFitnessTag = 0xF17;

} // namespace

std::vector<ScoredGenome> evolve_single(const InstanceTemplate& shape, const solvers::SolverConfig& target,
                                        Direction direction, const EvolverConfig& config) {
    config.validate();
    target.validate();
    const auto np = config.population_size;
    const bool harder = direction == Direction::Harder;
    auto better_or_equal = [harder](double a, double b) { return harder ? a >= b : a <= b; };

    Rng rng(derive_seed(config.seed, {kInitTag}));
    std::vector<ScoredGenome> pop;
    pop.reserve(np);
    for (std::size_t i = 0; i < np; ++i) {
        pop.push_back({random_genome(shape, rng), 0.0});
    }
    for (std::size_t i = 0; i < np; ++i) {
        pop[i].fitness =
            fen_fitness(pop[i].genome, target, config.repeats, derive_seed(config.seed, {kFitnessTag, 0, i}), config.threads);
    }

    std::vector<const Vector*> pool(np);
    for (std::size_t gen = 1; gen <= config.generations; ++gen) {
        for (std::size_t i = 0; i < np; ++i) {
            for (std::size_t k = 0; k < np; ++k) {
                pool[k] = &pop[k].genome.genes;
            }
            InstanceGenome cand{shape, de_trial(pool, i, config, shape, rng)};
            const double fit =
                fen_fitness(cand, target, config.repeats, derive_seed(config.seed, {kFitnessTag, gen, i}), config.threads);
            if (better_or_equal(fit, pop[i].fitness)) {
                pop[i] = {std::move(cand), fit};
            }
        }
        if (config.on_generation) {
            config.on_generation({gen, np, np});
        }
    }

    std::stable_sort(pop.begin(), pop.end(), [harder](const ScoredGenome& a, const ScoredGenome& b) {
        return harder ? a.fitness > b.fitness : a.fitness < b.fitness;
    });
    return pop;
}

// ---------------------------------------------------------------------------
// Pareto machinery

bool dominates(const FitnessVector& u, const FitnessVector& v) {
    require(u.values.size() == v.values.size(), "fitness vectors differ in length");
    require(u.orientation == v.orientation, "fitness vectors differ in orientation");
    require(u.orientation.size() == u.values.size(), "orientation length differs from value length");
    bool strictly = false;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const bool maximise = u.orientation[i] == Orientation::Maximize;
        const double a = maximise ? -u.values[i] : u.values[i];
        const double b = maximise ? -v.values[i] : v.values[i];
        if (a > b) {
            return false;
        }
        strictly = strictly || a < b;
    }
    return strictly;
}

std::vector<std::vector<std::size_t>> nondominated_sort(const std::vector<FitnessVector>& population) {
    require(!population.empty(), "nondominated_sort of an empty population");
    const auto n = population.size();
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(population[p], population[q])) {
                dominated_by[p].push_back(q);
                ++domination_count[q];
            } else if (dominates(population[q], population[p])) {
                dominated_by[q].push_back(p);
                ++domination_count[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (domination_count[p] == 0) {
            fronts[0].push_back(p);
        }
    }
    for (std::size_t k = 0; !fronts[k].empty(); ++k) {
        std::vector<std::size_t> next;
        for (auto p : fronts[k]) {
            for (auto q : dominated_by[p]) {
                if (--domination_count[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

Vector crowding_distance(const std::vector<FitnessVector>& front) {
    require(!front.empty(), "crowding_distance of an empty front");
    const auto n = front.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    Vector dist(n, 0.0);
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), inf);
        return dist;
    }
    const auto m = front.front().values.size();
    std::vector<std::size_t> order(n);
    for (std::size_t obj = 0; obj < m; ++obj) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return front[a].values[obj] < front[b].values[obj];
        });
        dist[order.front()] = inf;
        dist[order.back()] = inf;
        const double range = front[order.back()].values[obj] - front[order.front()].values[obj];
        if (range <= 0.0) {
            continue;
        }
        for (std::size_t k = 1; k + 1 < n; ++k) {
            dist[order[k]] += (front[order[k + 1]].values[obj] - front[order[k - 1]].values[obj]) / range;
        }
    }
    return dist;
}

namespace {

// Keeps `keep` members: whole fronts first, the split front by descending crowding distance.
std::vector<MultiScoredGenome> truncate(std::vector<MultiScoredGenome> pop, std::size_t keep) {
    if (pop.size() <= keep) {
        return pop;
    }
    std::vector<FitnessVector> fits;
    fits.reserve(pop.size());
    for (const auto& m : pop) {
        fits.push_back(m.fitness);
    }
    std::vector<std::size_t> chosen;
    for (const auto& front : nondominated_sort(fits)) {
        if (chosen.size() + front.size() <= keep) {
            chosen.insert(chosen.end(), front.begin(), front.end());
            continue;
        }
        std::vector<FitnessVector> sub;
        for (auto idx : front) {
            sub.push_back(fits[idx]);
        }
        const auto crowd = crowding_distance(sub);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
        for (std::size_t k = 0; chosen.size() < keep; ++k) {
            chosen.push_back(front[order[k]]);
        }
        break;
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<MultiScoredGenome> out;
    out.reserve(keep);
    for (auto idx : chosen) {
        out.push_back(std::move(pop[idx]));
    }
    return out;
}

} // namespace

std::vector<MultiScoredGenome> evolve_multi(const InstanceTemplate& shape, const solvers::SolverConfig& target,
                                            const std::vector<solvers::SolverConfig>& others,
                                            const EvolverConfig& config) {
    require(!others.empty(), "evolve_multi needs at least one other solver");
    config.validate();
    target.validate();
    for (const auto& o : others) {
        o.validate();
    }
    const auto np = config.population_size;

    Rng rng(derive_seed(config.seed, {kInitTag}));
    std::vector<MultiScoredGenome> pop;
    pop.reserve(2 * np);
    for (std::size_t i = 0; i < np; ++i) {
        pop.push_back({random_genome(shape, rng), {}});
    }
    for (std::size_t i = 0; i < np; ++i) {
        pop[i].fitness = multi_fitness(pop[i].genome, target, others, config.repeats,
                                       derive_seed(config.seed, {kFitnessTag, 0, i}), config.threads);
    }

    std::vector<const Vector*> pool;
    for (std::size_t gen = 1; gen <= config.generations; ++gen) {
        for (std::size_t i = 0; i < np; ++i) {
            // Donors come from the live population, so replacements made earlier in
            // this generation feed straight into later candidates.
            pool.clear();
            for (const auto& m : pop) {
                pool.push_back(&m.genome.genes);
            }
            InstanceGenome cand{shape, de_trial(pool, i, config, shape, rng)};
            auto fit = multi_fitness(cand, target, others, config.repeats,
                                     derive_seed(config.seed, {kFitnessTag, gen, i}), config.threads);
            if (dominates(fit, pop[i].fitness)) {
                pop[i] = {std::move(cand), std::move(fit)};
            } else if (!dominates(pop[i].fitness, fit)) {
                pop.push_back({std::move(cand), std::move(fit)});
            }
        }
        const auto extended = pop.size();
        pop = truncate(std::move(pop), np);
        if (config.on_generation) {
            config.on_generation({gen, extended, pop.size()});
        }
    }

    std::vector<FitnessVector> fits;
    for (const auto& m : pop) {
        fits.push_back(m.fitness);
    }
    const auto fronts = nondominated_sort(fits);
    std::vector<MultiScoredGenome> first;
    for (auto idx : fronts.front()) {
        first.push_back(pop[idx]);
    }
    return first;
}

std::size_t select_discriminating_index(const std::vector<MultiScoredGenome>& front) {
    require(!front.empty(), "select_discriminating on an empty front");
    auto gap = [](const FitnessVector& f) {
        double worst_other = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < f.values.size(); ++k) {
            worst_other = std::max(worst_other, f.values[k]);
        }
        return f.values[0] - worst_other;
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < front.size(); ++i) {
        const double gi = gap(front[i].fitness);
        const double gb = gap(front[best].fitness);
        if (gi > gb || (gi == gb && front[i].fitness.values[0] > front[best].fitness.values[0])) {
            best = i;
        }
    }
    return best;
}

const InstanceGenome& select_discriminating(const std::vector<MultiScoredGenome>& front) {
    return front[select_discriminating_index(front)].genome;
}

} // namespace copevolve::evolver
