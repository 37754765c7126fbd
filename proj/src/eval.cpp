#include "brava/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "brava/error.hpp"
#include "brava/graph.hpp"

namespace brava {

namespace {

std::uint64_t run_pairs(std::uint64_t len) { return len * (len - 1) / 2; }

// Sorts `idx` by key with a merge sort and returns the number of inversions
// (pairs i < j with key[idx_i] > key[idx_j]) in the input order.
std::uint64_t merge_count(std::vector<std::size_t>& idx, std::span<const double> key) {
  const std::size_t n = idx.size();
  std::vector<std::size_t> buf(n);
  std::uint64_t swaps = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (key[idx[j]] < key[idx[i]]) {
          swaps += mid - i;
          buf[k++] = idx[j++];
        } else {
          buf[k++] = idx[i++];
        }
      }
      while (i < mid) buf[k++] = idx[i++];
      while (j < hi) buf[k++] = idx[j++];
    }
    std::swap(idx, buf);
  }
  return swaps;
}

}  // namespace

std::uint64_t tied_pairs(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  std::uint64_t ties = 0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    ties += run_pairs(j - i);
    i = j;
  }
  return ties;
}

std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractError("kendall_tau_b needs equal lengths");
  const std::size_t n = x.size();
  if (n < 2) throw ContractError("kendall_tau_b needs at least two observations");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  std::uint64_t ties_x = 0, ties_xy = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && x[idx[j]] == x[idx[i]]) ++j;
    ties_x += run_pairs(j - i);
    for (std::size_t a = i; a < j;) {
      std::size_t b = a;
      while (b < j && y[idx[b]] == y[idx[a]]) ++b;
      ties_xy += run_pairs(b - a);
      a = b;
    }
    i = j;
  }
  // Within an x-tie run y is already ascending, so every inversion is a
  // discordant pair.
  const std::uint64_t discordant = merge_count(idx, y);
  std::uint64_t ties_y = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && y[idx[j]] == y[idx[i]]) ++j;
    ties_y += run_pairs(j - i);
    i = j;
  }
  const std::uint64_t total = run_pairs(n);
  const double not_tied_x = static_cast<double>(total - ties_x);
  const double not_tied_y = static_cast<double>(total - ties_y);
  if (not_tied_x == 0.0 || not_tied_y == 0.0) return std::nullopt;
  // C - D = total - ties_x - ties_y + ties_xy - 2 D
  const double c_minus_d = static_cast<double>(total + ties_xy) - static_cast<double>(ties_x) -
                           static_cast<double>(ties_y) - 2.0 * static_cast<double>(discordant);
  return c_minus_d / std::sqrt(not_tied_x * not_tied_y);
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractError("pearson needs equal lengths");
  if (x.size() < 2) throw ContractError("pearson needs at least two observations");
  // Streaming co-moment update (Welford).
  double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    mx += dx / k;
    my += dy / k;
    sxx += dx * (x[i] - mx);
    syy += dy * (y[i] - my);
    sxy += dx * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<std::size_t> min_rank(std::span<const double> scores, bool descending) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return descending ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) rank[idx[k]] = i + 1;
    i = j;
  }
  return rank;
}

double default_k_min(std::span<const double> degrees) {
  if (degrees.empty()) return 2.0;
  const double mean = std::accumulate(degrees.begin(), degrees.end(), 0.0) /
                      static_cast<double>(degrees.size());
  return std::max(2.0, std::ceil(mean));
}

double estimate_gamma(std::span<const double> degrees, std::optional<double> k_min) {
  const double kmin = k_min.value_or(default_k_min(degrees));
  if (kmin < 1.0) throw ContractError("k_min must be >= 1");
  std::size_t tail = 0;
  double sum = 0.0;
  double lo = INFINITY, hi = -INFINITY;
  for (double k : degrees) {
    if (k < kmin) continue;
    ++tail;
    sum += std::log(k / (kmin - 0.5));
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  if (tail < kMinTailSamples) {
    throw NumericError("insufficient tail: " + std::to_string(tail) + " degrees >= k_min " +
                       format_double(kmin) + ", need " + std::to_string(kMinTailSamples));
  }
  if (lo == hi || !(sum > 0.0)) {
    throw NumericError("degenerate tail: all tail degrees equal, exponent diverges");
  }
  return 1.0 + static_cast<double>(tail) / sum;
}

nlohmann::json RankingReport::summary_json() const {
  nlohmann::json j;
  j["tau_b"] = tau_b ? nlohmann::json(*tau_b) : nlohmann::json(nullptr);
  j["n"] = n;
  j["ties_pred"] = ties_pred;
  j["ties_true"] = ties_true;
  return j;
}

RankingReport make_ranking_report(std::span<const double> true_scores,
                                  std::span<const double> pred_scores,
                                  std::span<const std::int64_t> node_ids) {
  const std::size_t n = true_scores.size();
  if (pred_scores.size() != n) throw ContractError("true/predicted score length mismatch");
  if (!node_ids.empty() && node_ids.size() != n) throw ContractError("node id length mismatch");
  RankingReport r;
  r.n = n;
  const auto tr = min_rank(true_scores, true);
  const auto pr = min_rank(pred_scores, true);
  r.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.rows.push_back({node_ids.empty() ? static_cast<std::int64_t>(i) : node_ids[i], true_scores[i],
                      pred_scores[i], tr[i], pr[i],
                      static_cast<std::int64_t>(pr[i]) - static_cast<std::int64_t>(tr[i])});
  }
  r.tau_b = n >= 2 ? kendall_tau_b(true_scores, pred_scores) : std::nullopt;
  r.ties_true = tied_pairs(true_scores);
  r.ties_pred = tied_pairs(pred_scores);
  return r;
}

std::string format_tau(const std::optional<double>& tau) {
  return tau ? format_double(*tau) : std::string("undefined");
}

void write_ranking_report(const RankingReport& report, const std::filesystem::path& path) {
  std::string out = "node,true_score,pred_score,true_rank,pred_rank,delta\n";
  for (const auto& row : report.rows) {
    out += std::to_string(row.node) + "," + format_double(row.true_score) + "," +
           format_double(row.pred_score) + "," + std::to_string(row.true_rank) + "," +
           std::to_string(row.pred_rank) + "," + std::to_string(row.delta) + "\n";
  }
  out += "# summary tau_b=" + format_tau(report.tau_b) + " n=" + std::to_string(report.n) +
         " ties_true=" + std::to_string(report.ties_true) +
         " ties_pred=" + std::to_string(report.ties_pred) + "\n";
  write_file_atomic(path, out);
  auto json_path = path;
  json_path += ".json";
  write_file_atomic(json_path, report.summary_json().dump() + "\n");
}

RankingReport export_ranking_report(std::span<const double> true_scores,
                                    std::span<const double> pred_scores,
                                    const std::filesystem::path& path,
                                    std::span<const std::int64_t> node_ids) {
  auto report = make_ranking_report(true_scores, pred_scores, node_ids);
  write_ranking_report(report, path);
  return report;
}

namespace {

template <typename T>
T parse_field(std::string_view tok, const std::filesystem::path& path, std::size_t lineno) {
  T v{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(path.string() + ": bad field '" + std::string(tok) + "'", lineno);
  }
  return v;
}

}  // namespace

RankingReport load_ranking_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report " + path.string());
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line != "node,true_score,pred_score,true_rank,pred_rank,delta") {
    throw ParseError(path.string() + ": missing report header", lineno);
  }
  RankingReport r;
  bool have_summary = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.starts_with("# summary ")) {
      std::istringstream ss(line.substr(10));
      std::string kv;
      while (ss >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ParseError(path.string() + ": bad summary", lineno);
        const std::string key = kv.substr(0, eq);
        const std::string_view val = std::string_view(kv).substr(eq + 1);
        if (key == "tau_b") {
          r.tau_b = val == "undefined" ? std::nullopt
                                       : std::optional<double>(parse_field<double>(val, path, lineno));
        } else if (key == "n") {
          r.n = parse_field<std::size_t>(val, path, lineno);
        } else if (key == "ties_true") {
          r.ties_true = parse_field<std::uint64_t>(val, path, lineno);
        } else if (key == "ties_pred") {
          r.ties_pred = parse_field<std::uint64_t>(val, path, lineno);
        }
      }
      have_summary = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::string_view rest = line;
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      f.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    f.push_back(rest);
    if (f.size() != 6) throw ParseError(path.string() + ": expected 6 fields", lineno);
    r.rows.push_back({parse_field<std::int64_t>(f[0], path, lineno),
                      parse_field<double>(f[1], path, lineno), parse_field<double>(f[2], path, lineno),
                      parse_field<std::size_t>(f[3], path, lineno),
                      parse_field<std::size_t>(f[4], path, lineno),
                      parse_field<std::int64_t>(f[5], path, lineno)});
  }
  if (!have_summary) throw ParseError(path.string() + ": missing summary line");
  return r;
}

}  // namespace brava
