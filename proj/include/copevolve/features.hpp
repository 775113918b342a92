#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "copevolve/problem.hpp"
#include "copevolve/random.hpp"

namespace copevolve::features {

struct CoefficientSpread {
    double primary = 0.0;              ///< linear: std of a; quadratic: std of the x^2 coefficients
    std::optional<double> linear_term; ///< quadratic only: std of the x coefficients
};

/// Population standard deviation (divide by count).
double population_stddev(const Vector& values);

CoefficientSpread coefficient_stddev(const Constraint& constraint);

/// Angle in degrees, in [0, 180], between the normals of two linear constraints.
double pairwise_angle(const Constraint& c1, const Constraint& c2);

/// Euclidean distance from the origin to {x : g(x) = 0}. Linear: |b| / ||a||.
/// Quadratic: exact search over the separable structure. Throws NoBoundaryError
/// when g stays negative within radius 1e8.
double shortest_distance(const Constraint& constraint);

struct SamplingConfig {
    double radius_fraction = 0.05; ///< of the box half-width, per dimension
    std::size_t samples = 10000;
    Seed seed = 0;
};

/// Fraction of uniform samples in the box of half-width radius_fraction * (u - l) / 2
/// around the origin (intersected with the bounds) that violate no constraint.
double feasibility_ratio(const Problem& problem, double radius_fraction, std::size_t samples, Seed seed);

struct AnglePair {
    std::size_t first = 0;
    std::size_t second = 0;
    std::optional<double> degrees; ///< absent when a normal vector is zero

    friend bool operator==(const AnglePair&, const AnglePair&) = default;
};

struct FeatureVector {
    Vector per_constraint_stddev;
    std::vector<std::optional<double>> linear_term_stddev;
    std::vector<AnglePair> pairwise_angles_deg; ///< pairs of linear constraints, i < j
    std::vector<std::optional<double>> shortest_distances;
    double feasibility_ratio = 1.0;
    std::size_t constraint_count = 0;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// All features of one problem; undefined values are recorded as absent.
FeatureVector feature_vector(const Problem& problem, const SamplingConfig& sampling = {});

/// Column names of the per-instance feature report, in order.
const std::vector<std::string>& report_columns();

/// One CSV line (no trailing newline) for the feature report; absent values print as null.
std::string report_row(const std::string& instance_id, const Problem& problem, const FeatureVector& fv,
                       const SamplingConfig& sampling);

/// "linear", "quadratic", "mixed" or "none".
std::string constraint_kind_label(const Problem& problem);

/// Shortest round-trip decimal form, or "null" when absent.
std::string format_number(std::optional<double> value);

} // namespace copevolve::features
