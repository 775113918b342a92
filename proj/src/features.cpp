#include "copevolve/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

#include "copevolve/errors.hpp"

namespace copevolve::features {

double population_stddev(const Vector& values) {
    require(!values.empty(), "standard deviation of an empty set");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return std::sqrt(ss / n);
}

CoefficientSpread coefficient_stddev(const Constraint& constraint) {
    if (constraint.kind() == ConstraintKind::Linear) {
        return {population_stddev(constraint.coeffs()), std::nullopt};
    }
    return {population_stddev(constraint.quadratic_terms()), population_stddev(constraint.linear_terms())};
}

double pairwise_angle(const Constraint& c1, const Constraint& c2) {
    if (c1.kind() != ConstraintKind::Linear || c2.kind() != ConstraintKind::Linear) {
        throw UnsupportedKindError("angle is only defined between linear constraints");
    }
    require(c1.dimension() == c2.dimension(), "constraints differ in dimension");
    const auto& a = c1.coeffs();
    const auto& b = c2.coeffs();
    const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
    const double nb = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
    if (na == 0.0 || nb == 0.0) {
        throw UndefinedAngleError("angle undefined for a zero normal vector");
    }
    const double cosine = std::inner_product(a.begin(), a.end(), b.begin(), 0.0) / (na * nb);
    return std::acos(std::clamp(cosine, -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

namespace {

constexpr double kSearchRadius = 1e8;

/// max of sum_k (p_k x_k^2 + q_k x_k) over the ball ||x|| <= r, solved through the
/// secular equation x_k(mu) = q_k / (2 (mu - p_k)), ||x(mu)|| = r, mu >= max(p, 0).
double ball_maximum(const Vector& p, const Vector& q, double r) {
    const auto n = p.size();
    const double pmax = *std::max_element(p.begin(), p.end());
    const double floor_mu = std::max(pmax, 0.0);

    auto point_norm2 = [&](double mu) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (q[k] != 0.0) {
                const double x = q[k] / (2.0 * (mu - p[k]));
                s += x * x;
            }
        }
        return s;
    };
    auto value_at = [&](double mu) {
        double v = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (q[k] != 0.0) {
                const double x = q[k] / (2.0 * (mu - p[k]));
                v += p[k] * x * x + q[k] * x;
            }
        }
        return v;
    };

    // Unconstrained maximiser inside the ball (strictly concave case).
    if (pmax < 0.0 && point_norm2(0.0) <= r * r) {
        return value_at(0.0);
    }

    bool singular_direction = false; // some p_k == pmax carries q_k != 0
    for (std::size_t k = 0; k < n; ++k) {
        singular_direction = singular_direction || (p[k] == pmax && q[k] != 0.0);
    }

    if (!singular_direction && pmax >= 0.0) {
        // Hard case candidate: at mu = pmax the coordinates with p_k == pmax are free.
        double s = 0.0;
        double v = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (p[k] < pmax && q[k] != 0.0) {
                const double x = q[k] / (2.0 * (pmax - p[k]));
                s += x * x;
                v += p[k] * x * x + q[k] * x;
            }
        }
        if (s <= r * r) {
            return v + pmax * (r * r - s);
        }
    }

    double qnorm = 0.0;
    for (double v : q) {
        qnorm += v * v;
    }
    qnorm = std::sqrt(qnorm);
    if (qnorm == 0.0) {
        return std::max(pmax, 0.0) * r * r;
    }

    double lo = floor_mu;
    double hi = floor_mu + qnorm / (2.0 * r) + 1.0;
    while (point_norm2(hi) > r * r) {
        hi = floor_mu + 2.0 * (hi - floor_mu);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (point_norm2(mid) > r * r) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return value_at(hi);
}

} // namespace

double shortest_distance(const Constraint& constraint) {
    const double b = constraint.offset();
    if (constraint.kind() == ConstraintKind::Linear) {
        const auto& a = constraint.coeffs();
        const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
        if (na == 0.0) {
            if (b == 0.0) {
                return 0.0;
            }
            throw NoBoundaryError("constant constraint has no boundary");
        }
        return std::abs(b) / na;
    }

    if (b == 0.0) {
        return 0.0;
    }
    const auto p = constraint.quadratic_terms();
    const auto q = constraint.linear_terms();
    // Boundary distance is the smallest r with max_{||x||<=r} g(x) >= 0; for b > 0 the
    // origin is infeasible and the same holds with the inequality reversed.
    const double sign = b < 0.0 ? 1.0 : -1.0;
    Vector sp = p;
    Vector sq = q;
    for (std::size_t k = 0; k < p.size(); ++k) {
        sp[k] *= sign;
        sq[k] *= sign;
    }
    const double need = std::abs(b);

    double lo = 0.0;
    double hi = 1.0;
    while (ball_maximum(sp, sq, hi) < need) {
        lo = hi;
        hi *= 2.0;
        if (hi > kSearchRadius) {
            throw NoBoundaryError("constraint boundary not reached within the search radius");
        }
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (ball_maximum(sp, sq, mid) >= need) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double feasibility_ratio(const Problem& problem, double radius_fraction, std::size_t samples, Seed seed) {
    require(radius_fraction > 0.0 && radius_fraction <= 1.0, "radius_fraction must lie in (0, 1]");
    require(samples >= 1, "samples must be at least 1");
    if (problem.constraints().empty()) {
        return 1.0;
    }
    const auto n = problem.dimension();
    const auto& lower = problem.bounds().lower();
    const auto& upper = problem.bounds().upper();
    Vector lo(n);
    Vector hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = radius_fraction * (upper[i] - lower[i]) / 2.0;
        lo[i] = std::max(lower[i], -r);
        hi[i] = std::min(upper[i], r);
    }
    const Bounds region(lo, hi);

    Rng rng(seed);
    std::size_t feasible = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto x = sample_uniform(region, rng);
        const bool ok = std::all_of(problem.constraints().begin(), problem.constraints().end(),
                                    [&](const Constraint& c) { return c.value(x) <= 0.0; });
        feasible += ok ? 1 : 0;
    }
    return static_cast<double>(feasible) / static_cast<double>(samples);
}

FeatureVector feature_vector(const Problem& problem, const SamplingConfig& sampling) {
    FeatureVector fv;
    const auto& cs = problem.constraints();
    fv.constraint_count = cs.size();
    for (const auto& c : cs) {
        const auto spread = coefficient_stddev(c);
        fv.per_constraint_stddev.push_back(spread.primary);
        fv.linear_term_stddev.push_back(spread.linear_term);
        try {
            fv.shortest_distances.emplace_back(shortest_distance(c));
        } catch (const NoBoundaryError&) {
            fv.shortest_distances.emplace_back(std::nullopt);
        }
    }
    for (std::size_t i = 0; i < cs.size(); ++i) {
        for (std::size_t j = i + 1; j < cs.size(); ++j) {
            if (cs[i].kind() != ConstraintKind::Linear || cs[j].kind() != ConstraintKind::Linear) {
                continue;
            }
            AnglePair pair{i, j, std::nullopt};
            try {
                pair.degrees = pairwise_angle(cs[i], cs[j]);
            } catch (const UndefinedAngleError&) {
            }
            fv.pairwise_angles_deg.push_back(pair);
        }
    }
    fv.feasibility_ratio = feasibility_ratio(problem, sampling.radius_fraction, sampling.samples, sampling.seed);
    return fv;
}

const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> columns{
        "instance_id",   "objective",     "kind",        "n_constraints",     "stddev_mean",
        "stddev_min",    "stddev_max",    "angle_mean",  "angle_min",         "distance_mean",
        "distance_min",  "feasibility_ratio", "radius_fraction", "samples",   "seed"};
    return columns;
}

std::string format_number(std::optional<double> value) {
    if (!value || !std::isfinite(*value)) {
        return "null";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, *value);
    return {buf, res.ptr};
}

std::string constraint_kind_label(const Problem& problem) {
    const auto& cs = problem.constraints();
    if (cs.empty()) {
        return "none";
    }
    const auto first = cs.front().kind();
    const bool uniform = std::all_of(cs.begin(), cs.end(), [&](const Constraint& c) { return c.kind() == first; });
    return uniform ? std::string(to_string(first)) : "mixed";
}

namespace {

struct Summary {
    std::optional<double> mean;
    std::optional<double> min;
    std::optional<double> max;
};

Summary summarise(const std::vector<std::optional<double>>& values) {
    Vector present;
    for (const auto& v : values) {
        if (v) {
            present.push_back(*v);
        }
    }
    if (present.empty()) {
        return {};
    }
    return {std::accumulate(present.begin(), present.end(), 0.0) / static_cast<double>(present.size()),
            *std::min_element(present.begin(), present.end()), *std::max_element(present.begin(), present.end())};
}

} // namespace

std::string report_row(const std::string& instance_id, const Problem& problem, const FeatureVector& fv,
                       const SamplingConfig& sampling) {
    std::vector<std::optional<double>> stds(fv.per_constraint_stddev.begin(), fv.per_constraint_stddev.end());
    std::vector<std::optional<double>> angles;
    for (const auto& a : fv.pairwise_angles_deg) {
        angles.push_back(a.degrees);
    }
    const auto s = summarise(stds);
    const auto a = summarise(angles);
    const auto d = summarise(fv.shortest_distances);

    std::string row = instance_id;
    auto add = [&row](const std::string& field) {
        row += ',';
        row += field;
    };
    add(std::string(to_string(problem.objective())));
    add(constraint_kind_label(problem));
    add(std::to_string(fv.constraint_count));
    add(format_number(s.mean));
    add(format_number(s.min));
    add(format_number(s.max));
    add(format_number(a.mean));
    add(format_number(a.min));
    add(format_number(d.mean));
    add(format_number(d.min));
    add(format_number(fv.feasibility_ratio));
    add(format_number(sampling.radius_fraction));
    add(std::to_string(sampling.samples));
    add(std::to_string(sampling.seed));
    return row;
}

} // namespace copevolve::features
