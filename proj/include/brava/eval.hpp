#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace brava {

/// Kendall tau-b in O(n log n): sort by (x, y), count tie runs, then count
/// discordant pairs as merge-sort inversions on y. Pairs tied in both vectors
/// count as neither x-ties nor y-ties. Returns nullopt when either vector is
/// constant (zero denominator).
std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y);

// Number of unordered index pairs with equal values.
std::uint64_t tied_pairs(std::span<const double> x);

// Sample Pearson correlation; nullopt for constant input.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

// Minimum-rank scheme: ties share the smallest rank of their block, e.g.
// ascending [10, 20, 20, 40] -> [1, 2, 2, 4]. With `descending`, the largest
// score gets rank 1.
std::vector<std::size_t> min_rank(std::span<const double> scores, bool descending = true);

// Discrete power-law exponent from the tail k >= k_min:
//   1 + n_tail / sum ln(k / (k_min - 0.5)).
// Throws on fewer than 50 tail samples or a tail without spread.
double estimate_gamma(std::span<const double> degrees, std::optional<double> k_min = std::nullopt);
double default_k_min(std::span<const double> degrees);

inline constexpr std::size_t kMinTailSamples = 50;

struct RankingRow {
  std::int64_t node;
  double true_score;
  double pred_score;
  std::size_t true_rank;
  std::size_t pred_rank;
  std::int64_t delta;  // pred_rank - true_rank

  friend bool operator==(const RankingRow&, const RankingRow&) = default;
};

struct RankingReport {
  std::vector<RankingRow> rows;
  std::optional<double> tau_b;
  std::size_t n = 0;
  std::uint64_t ties_true = 0;
  std::uint64_t ties_pred = 0;

  nlohmann::json summary_json() const;
  friend bool operator==(const RankingReport&, const RankingReport&) = default;
};

RankingReport make_ranking_report(std::span<const double> true_scores,
                                  std::span<const double> pred_scores,
                                  std::span<const std::int64_t> node_ids = {});

/// Writes the per-node CSV (header "node,true_score,pred_score,true_rank,
/// pred_rank,delta", then a trailing "# summary" comment line carrying tau_b)
/// and, next to it, `<path>.json` with the summary object.
RankingReport export_ranking_report(std::span<const double> true_scores,
                                    std::span<const double> pred_scores,
                                    const std::filesystem::path& path,
                                    std::span<const std::int64_t> node_ids = {});
void write_ranking_report(const RankingReport& report, const std::filesystem::path& path);
RankingReport load_ranking_report(const std::filesystem::path& path);

std::string format_tau(const std::optional<double>& tau);

}  // namespace brava
