#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "brava/graph.hpp"
#include "brava/rng.hpp"

namespace brava {

struct HyperbolicConfig {
  std::size_t n = 0;
  double gamma = 2.5;        // power-law exponent, > 2
  double avg_degree = 8.0;   // target mean degree
  double temperature = 0.0;  // 0 gives the threshold model; must be < 1
  std::uint64_t seed = 0;

  // Throws ConfigError on an invalid combination.
  void validate() const;
};

// (avg_degree, gamma) rows observed on real networks; the generator samples
// whole rows so the two values keep their observed pairing.
struct EmpiricalParamTable {
  struct Row {
    double avg_degree;
    double gamma;
  };
  std::vector<Row> rows;

  // 15 road, social and web networks (5 road, 10 social/web).
  static EmpiricalParamTable builtin();
  // CSV with header "avg_degree,gamma".
  static EmpiricalParamTable load_csv(const std::filesystem::path& path);
};

// Inverse CDF of the radial density alpha sinh(alpha r) / (cosh(alpha R) - 1).
double sample_radial(double alpha, double radius, double u);

struct PolarPoint {
  double r;
  double theta;
};

// Hyperbolic distance between points of a disk of curvature -zeta^2.
double hyperbolic_distance(PolarPoint p, PolarPoint q, double zeta = 1.0);

// Fermi-Dirac connection probability; a step function at distance == radius
// when temperature is 0.
double connection_probability(double distance, double radius, double temperature);

struct RadiusCalibration {
  double radius;
  double expected_degree;
};

/// Finds the disk radius whose expected mean degree matches `target_avg_degree`
/// within 5%, by bisection over [1, 4 ln n]. Radii are recomputed from the
/// fixed radial quantiles at every trial radius, so each trial is an exact
/// draw from the radial law at that radius. The expectation is evaluated over
/// all pairs of a uniform subsample of at most 2,000 nodes.
RadiusCalibration calibrate_radius(std::span<const double> radial_quantiles,
                                   std::span<const double> angles, double alpha,
                                   double target_avg_degree, double temperature,
                                   std::uint64_t seed);

// Expected mean degree at the given radius, same estimator as calibrate_radius.
double expected_mean_degree(std::span<const double> radial_quantiles,
                            std::span<const double> angles, double alpha, double radius,
                            double temperature, std::uint64_t seed);

inline constexpr std::size_t kCalibrationSubsample = 2000;

struct HyperbolicGraph {
  Graph graph;
  std::vector<PolarPoint> points;
  double radius = 0.0;
  double alpha = 0.0;
};

HyperbolicGraph generate_hyperbolic_detailed(const HyperbolicConfig& cfg);
inline Graph generate_hyperbolic(const HyperbolicConfig& cfg) {
  return generate_hyperbolic_detailed(cfg).graph;
}

// Preferential attachment from a star seed on attach_m + 1 nodes; each new node
// links to attach_m distinct existing nodes chosen proportionally to degree.
Graph generate_scale_free(std::size_t n, std::size_t attach_m, std::uint64_t seed);

// T ~ U(0, 0.5) and a uniformly chosen table row; n and seed come from the
// caller.
HyperbolicConfig sample_training_config(const EmpiricalParamTable& table, Rng& rng,
                                        std::size_t n, std::uint64_t seed);

}  // namespace brava
