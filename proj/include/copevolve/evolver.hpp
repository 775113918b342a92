#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "copevolve/problem.hpp"
#include "copevolve/random.hpp"
#include "copevolve/solvers.hpp"

namespace copevolve::evolver {

/// Fixed shape of the instances being evolved: everything except the coefficients.
struct InstanceTemplate {
    Objective objective = Objective::Sphere;
    Bounds bounds = Bounds::uniform(5);
    std::vector<ConstraintKind> kinds;
    CoefficientRange coeff_range;

    static InstanceTemplate uniform(Objective objective, std::size_t dimension, ConstraintKind kind,
                                    std::size_t count, double box = 5.0);

    std::size_t dimension() const noexcept { return bounds.dimension(); }
    std::size_t gene_count() const;
    /// Per-gene box: coefficients in [coeff_lo, coeff_hi]; offsets in [-|coeff_hi| n, 0].
    Vector gene_lower() const;
    Vector gene_upper() const;

    friend bool operator==(const InstanceTemplate&, const InstanceTemplate&) = default;
};

/// Constraint coefficients of one instance, each constraint's coeffs followed by its offset b.
struct InstanceGenome {
    InstanceTemplate shape;
    Vector genes;

    friend bool operator==(const InstanceGenome&, const InstanceGenome&) = default;
};

Problem decode(const InstanceGenome& genome);
/// Throws ContractViolation when the problem does not fit the template.
InstanceGenome encode(const InstanceTemplate& shape, const Problem& problem);
void clamp_genes(const InstanceTemplate& shape, Vector& genes);
InstanceGenome random_genome(const InstanceTemplate& shape, Rng& rng);

enum class Orientation { Minimize, Maximize };

struct FitnessVector {
    Vector values;
    std::vector<Orientation> orientation;

    friend bool operator==(const FitnessVector&, const FitnessVector&) = default;
};

/// Observer hook for population bookkeeping; called once per generation.
struct GenerationReport {
    std::size_t generation = 0;
    std::size_t extended_size = 0;  ///< population size before truncation
    std::size_t truncated_size = 0; ///< population size after truncation
};

struct EvolverConfig {
    std::size_t population_size = 40;
    std::size_t generations = 5000;
    double crossover_rate = 0.5;
    double scale_factor = 0.9;
    std::size_t repeats = 5; ///< solver runs per fitness value (median taken)
    Seed seed = 0;
    std::size_t threads = 1; ///< workers for the solver runs behind one fitness value
    std::function<void(const GenerationReport&)> on_generation;

    void validate() const;
};

double median(Vector values);

/// Median FEN of `repeats` runs of `solver` on the decoded genome.
double fen_fitness(const InstanceGenome& genome, const solvers::SolverConfig& solver, std::size_t repeats, Seed seed,
                   std::size_t threads = 1);

enum class Direction { Harder, Easier };

struct ScoredGenome {
    InstanceGenome genome;
    double fitness = 0.0;
};

/// Single-objective DE/rand/1/bin on genomes; returns the final population best-first.
std::vector<ScoredGenome> evolve_single(const InstanceTemplate& shape, const solvers::SolverConfig& target,
                                        Direction direction, const EvolverConfig& config);

/// u no worse than v everywhere and strictly better somewhere, per orientation.
bool dominates(const FitnessVector& u, const FitnessVector& v);

/// Fronts of indices, first front first.
std::vector<std::vector<std::size_t>> nondominated_sort(const std::vector<FitnessVector>& population);

/// Boundary members get +inf; zero-range objectives contribute nothing.
Vector crowding_distance(const std::vector<FitnessVector>& front);

struct MultiScoredGenome {
    InstanceGenome genome;
    FitnessVector fitness; ///< [FEN(target) max, FEN(other_1) min, ...]
};

/// Fitness vector of one genome: target FEN maximised, every other FEN minimised.
FitnessVector multi_fitness(const InstanceGenome& genome, const solvers::SolverConfig& target,
                            const std::vector<solvers::SolverConfig>& others, std::size_t repeats, Seed seed,
                            std::size_t threads = 1);

/// DEMO: immediate replacement on dominance, extend otherwise, truncate by
/// front then crowding distance. Returns the final first front.
std::vector<MultiScoredGenome> evolve_multi(const InstanceTemplate& shape, const solvers::SolverConfig& target,
                                            const std::vector<solvers::SolverConfig>& others,
                                            const EvolverConfig& config);

/// Index of the member with the largest FEN(target) - max FEN(other);
/// ties go to the larger FEN(target), then to the lowest index.
std::size_t select_discriminating_index(const std::vector<MultiScoredGenome>& front);
const InstanceGenome& select_discriminating(const std::vector<MultiScoredGenome>& front);

} // namespace copevolve::evolver
