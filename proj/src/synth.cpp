#include "brava/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "brava/error.hpp"
#include "brava/parallel.hpp"

namespace brava {

void HyperbolicConfig::validate() const {
  if (!(gamma > 2.0)) throw ConfigError("hyperbolic gamma must exceed 2");
  if (!(avg_degree > 0.0)) throw ConfigError("hyperbolic avg_degree must be positive");
  if (!(temperature >= 0.0 && temperature < 1.0)) {
    throw ConfigError("hyperbolic temperature must lie in [0, 1)");
  }
}

EmpiricalParamTable EmpiricalParamTable::builtin() {
  return {{
      // road networks
      {2.4140, 6.9798},   // road-euroroad
      {2.5677, 2.9640},   // road-usroads-48
      {7.1955, 2.5423},   // road-usroads
      {2.7852, 6.8398},   // roadNet-TX
      {2.0980, 7.9782},   // road-italy-osm
      // social and web networks
      {4.8159, 7.0192},   // p2p-Gnutella30
      {10.0202, 2.3982},  // email-Enron
      {15.3317, 2.5023},  // musae-github
      {12.1298, 2.2056},  // soc-Slashdot0811
      {32.4296, 2.4494},  // gemsec-Facebook
      {80.8684, 2.1334},  // twitch-gamers
      {6.6221, 3.5380},   // com-DBLP
      {6.6933, 2.4715},   // web-NotreDame
      {19.4080, 2.6299},  // web-BerkStan
      {76.2814, 2.2849},  // com-Orkut
  }};
}

EmpiricalParamTable EmpiricalParamTable::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open parameter table " + path.string());
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file", lineno);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "avg_degree,gamma") {
    throw ParseError(path.string() + ": expected header 'avg_degree,gamma'", lineno);
  }
  EmpiricalParamTable table;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    Row row{};
    char comma = 0;
    if (!(ss >> row.avg_degree >> comma >> row.gamma) || comma != ',') {
      throw ParseError(path.string() + ": expected 'avg_degree,gamma'", lineno);
    }
    if (!(row.gamma > 2.0) || !(row.avg_degree > 0.0)) {
      throw ParseError(path.string() + ": need avg_degree > 0 and gamma > 2", lineno);
    }
    table.rows.push_back(row);
  }
  if (table.rows.empty()) throw ParseError(path.string() + ": no rows");
  return table;
}

double sample_radial(double alpha, double radius, double u) {
  return std::acosh(1.0 + u * (std::cosh(alpha * radius) - 1.0)) / alpha;
}

double hyperbolic_distance(PolarPoint p, PolarPoint q, double zeta) {
  const double angle = std::numbers::pi - std::abs(std::numbers::pi - std::abs(p.theta - q.theta));
  const double arg = std::cosh(zeta * p.r) * std::cosh(zeta * q.r) -
                     std::sinh(zeta * p.r) * std::sinh(zeta * q.r) * std::cos(angle);
  return std::acosh(std::max(1.0, arg)) / zeta;
}

double connection_probability(double distance, double radius, double temperature) {
  if (temperature == 0.0) return distance < radius ? 1.0 : 0.0;
  return 1.0 / (1.0 + std::exp((distance - radius) / (2.0 * temperature)));
}

namespace {

// Per-node terms of the distance identity
//   cosh d = cosh r_u cosh r_v - sinh r_u sinh r_v (cos t_u cos t_v + sin t_u sin t_v).
struct PointCache {
  std::vector<double> ch, sh, c, s;

  PointCache(std::span<const double> radii, std::span<const double> angles)
      : ch(radii.size()), sh(radii.size()), c(radii.size()), s(radii.size()) {
    for (std::size_t i = 0; i < radii.size(); ++i) {
      ch[i] = std::cosh(radii[i]);
      sh[i] = std::sinh(radii[i]);
      c[i] = std::cos(angles[i]);
      s[i] = std::sin(angles[i]);
    }
  }

  double cosh_distance(std::size_t i, std::size_t j) const {
    return ch[i] * ch[j] - sh[i] * sh[j] * (c[i] * c[j] + s[i] * s[j]);
  }
};

// Beyond this distance above R the Fermi-Dirac probability is below 2^-54,
// which counter_uniform can never undercut.
double cutoff_cosh(double radius, double temperature) {
  if (temperature == 0.0) return std::cosh(radius);
  return std::cosh(radius + 2.0 * temperature * 54.0 * std::numbers::ln2);
}

double pair_probability(const PointCache& pc, std::size_t i, std::size_t j, double radius,
                        double temperature, double cutoff) {
  const double arg = pc.cosh_distance(i, j);
  if (temperature == 0.0) return arg < cutoff ? 1.0 : 0.0;
  if (arg >= cutoff) return 0.0;
  return connection_probability(std::acosh(std::max(1.0, arg)), radius, temperature);
}

std::vector<std::size_t> calibration_subsample(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (n <= kCalibrationSubsample) return all;
  std::vector<std::size_t> pick;
  pick.reserve(kCalibrationSubsample);
  Rng rng(derive_seed(seed, 0xca1b));
  std::sample(all.begin(), all.end(), std::back_inserter(pick), kCalibrationSubsample, rng);
  return pick;
}

double subsample_mean_degree(std::span<const double> quantiles, std::span<const double> angles,
                             std::span<const std::size_t> subset, double alpha, double radius,
                             double temperature) {
  const std::size_t s = subset.size();
  const std::size_t n = quantiles.size();
  if (s < 2) return 0.0;
  std::vector<double> r(s), th(s);
  for (std::size_t k = 0; k < s; ++k) {
    r[k] = sample_radial(alpha, radius, quantiles[subset[k]]);
    th[k] = angles[subset[k]];
  }
  const PointCache pc(r, th);
  const double cutoff = cutoff_cosh(radius, temperature);
  std::vector<double> partial(chunk_count(s), 0.0);
  parallel_chunks(s, [&](std::size_t begin, std::size_t end, std::size_t c) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < s; ++j) {
        acc += pair_probability(pc, i, j, radius, temperature, cutoff);
      }
    }
    partial[c] = acc;
  });
  const double total = std::accumulate(partial.begin(), partial.end(), 0.0);
  const double pairs = 0.5 * static_cast<double>(s) * static_cast<double>(s - 1);
  return static_cast<double>(n - 1) * total / pairs;
}

}  // namespace

double expected_mean_degree(std::span<const double> radial_quantiles,
                            std::span<const double> angles, double alpha, double radius,
                            double temperature, std::uint64_t seed) {
  const auto subset = calibration_subsample(radial_quantiles.size(), seed);
  return subsample_mean_degree(radial_quantiles, angles, subset, alpha, radius, temperature);
}

RadiusCalibration calibrate_radius(std::span<const double> radial_quantiles,
                                   std::span<const double> angles, double alpha,
                                   double target_avg_degree, double temperature,
                                   std::uint64_t seed) {
  const std::size_t n = radial_quantiles.size();
  if (n < 2 || angles.size() != n) throw ContractError("calibrate_radius needs >= 2 positions");
  const auto subset = calibration_subsample(n, seed);
  auto degree_at = [&](double radius) {
    return subsample_mean_degree(radial_quantiles, angles, subset, alpha, radius, temperature);
  };
  auto residual = [&](double deg) { return std::abs(deg - target_avg_degree) / target_avg_degree; };

  double lo = 1.0;
  double hi = std::max(lo, 4.0 * std::log(static_cast<double>(n)));
  double deg_lo = degree_at(lo);
  double deg_hi = degree_at(hi);
  // Mean degree decreases as the disk grows.
  if (target_avg_degree >= deg_lo || target_avg_degree <= deg_hi) {
    const bool low_side = target_avg_degree >= deg_lo;
    const double r = low_side ? lo : hi;
    const double d = low_side ? deg_lo : deg_hi;
    if (residual(d) <= 0.05) return {r, d};
    std::ostringstream msg;
    msg << "target mean degree " << target_avg_degree << " unreachable: radius in [" << lo << ", "
        << hi << "] gives mean degree in [" << deg_hi << ", " << deg_lo << "]";
    throw ConfigError(msg.str());
  }
  RadiusCalibration best{lo, deg_lo};
  if (residual(deg_hi) < residual(deg_lo)) best = {hi, deg_hi};
  for (int iter = 0; iter < 100 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double deg = degree_at(mid);
    if (residual(deg) < residual(best.expected_degree)) best = {mid, deg};
    if (residual(deg) <= 1e-3) break;
    if (deg > target_avg_degree) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (residual(best.expected_degree) > 0.05) {
    std::ostringstream msg;
    msg << "radius calibration stalled at mean degree " << best.expected_degree << " for target "
        << target_avg_degree;
    throw ConfigError(msg.str());
  }
  return best;
}

HyperbolicGraph generate_hyperbolic_detailed(const HyperbolicConfig& cfg) {
  cfg.validate();
  HyperbolicGraph out;
  out.alpha = (cfg.gamma - 1.0) / 2.0;  // zeta = 1
  const std::size_t n = cfg.n;
  if (n < 2) {
    out.graph = Graph::from_arcs(n, false, {});
    out.points.assign(n, PolarPoint{0.0, 0.0});
    return out;
  }
  Rng rng(derive_seed(cfg.seed, 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<double> quantiles(n), thetas(n);
  for (std::size_t i = 0; i < n; ++i) {
    quantiles[i] = unit(rng);
    thetas[i] = angle(rng);
  }
  const auto cal =
      calibrate_radius(quantiles, thetas, out.alpha, cfg.avg_degree, cfg.temperature, cfg.seed);
  out.radius = cal.radius;

  std::vector<double> radii(n);
  out.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    radii[i] = sample_radial(out.alpha, out.radius, quantiles[i]);
    out.points[i] = {radii[i], thetas[i]};
  }
  const PointCache pc(radii, thetas);
  const double cutoff = cutoff_cosh(out.radius, cfg.temperature);
  const std::uint64_t pair_seed = derive_seed(cfg.seed, 2);

  std::vector<std::vector<std::pair<NodeId, NodeId>>> partial(chunk_count(n));
  parallel_chunks(n, [&](std::size_t begin, std::size_t end, std::size_t c) {
    auto& arcs = partial[c];
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double p = pair_probability(pc, i, j, out.radius, cfg.temperature, cutoff);
        if (p <= 0.0) continue;
        if (p >= 1.0 || counter_uniform(pair_seed, i, j) < p) {
          arcs.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
        }
      }
    }
  });
  std::vector<std::pair<NodeId, NodeId>> arcs;
  for (auto& p : partial) arcs.insert(arcs.end(), p.begin(), p.end());
  out.graph = Graph::from_arcs(n, false, arcs);
  return out;
}

Graph generate_scale_free(std::size_t n, std::size_t attach_m, std::uint64_t seed) {
  if (attach_m < 1 || n <= attach_m) {
    throw ConfigError("scale-free generator needs n > attach_m >= 1");
  }
  Rng rng(derive_seed(seed, 3));
  std::vector<std::pair<NodeId, NodeId>> arcs;
  arcs.reserve(attach_m * (n - attach_m));
  // Each endpoint appears once per incident edge, so a uniform draw from this
  // list picks a node with probability proportional to its degree.
  std::vector<NodeId> endpoints;
  endpoints.reserve(2 * attach_m * (n - attach_m));
  for (NodeId leaf = 1; leaf <= attach_m; ++leaf) {
    arcs.emplace_back(0, leaf);
    endpoints.push_back(0);
    endpoints.push_back(leaf);
  }
  std::vector<NodeId> chosen;
  for (std::size_t v = attach_m + 1; v < n; ++v) {
    chosen.clear();
    std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
    while (chosen.size() < attach_m) {
      const NodeId t = endpoints[pick(rng)];
      if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) chosen.push_back(t);
    }
    for (NodeId t : chosen) {
      arcs.emplace_back(static_cast<NodeId>(v), t);
      endpoints.push_back(static_cast<NodeId>(v));
      endpoints.push_back(t);
    }
  }
  return Graph::from_arcs(n, false, arcs);
}

HyperbolicConfig sample_training_config(const EmpiricalParamTable& table, Rng& rng,
                                        std::size_t n, std::uint64_t seed) {
  if (table.rows.empty()) throw ConfigError("empty parameter table");
  std::uniform_real_distribution<double> temp(0.0, 0.5);
  double t = 0.0;
  while (t == 0.0) t = temp(rng);
  std::uniform_int_distribution<std::size_t> row(0, table.rows.size() - 1);
  const auto& r = table.rows[row(rng)];
  HyperbolicConfig cfg;
  cfg.n = n;
  cfg.gamma = r.gamma;
  cfg.avg_degree = r.avg_degree;
  cfg.temperature = t;
  cfg.seed = seed;
  return cfg;
}

}  // namespace brava
