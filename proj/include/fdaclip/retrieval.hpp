/**
 * @file retrieval.hpp
 * @brief Cosine similarity, symmetric cross-entropy loss, and R@K / rank metrics.
 */
#pragma once

#include <cstddef>
#include <json.hpp>
#include <span>
#include <vector>

#include "fdaclip/encode.hpp"

namespace fdaclip::retrieval {

/// videos x texts, row-major, double precision.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::size_t n_videos, std::size_t n_texts, double fill = 0.0);
  SimilarityMatrix(std::size_t n_videos, std::size_t n_texts, std::vector<double> values);

  [[nodiscard]] std::size_t n_videos() const noexcept { return rows_; }
  [[nodiscard]] std::size_t n_texts() const noexcept { return cols_; }
  [[nodiscard]] double at(std::size_t video, std::size_t text) const { return values_[video * cols_ + text]; }
  double& at(std::size_t video, std::size_t text) { return values_[video * cols_ + text]; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<const double> row(std::size_t video) const {
    return std::span(values_).subspan(video * cols_, cols_);
  }
  [[nodiscard]] std::vector<double> column(std::size_t text) const;

  friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// s[i][j] = dot(v_i, t_j) / sqrt(|v_i|^2 |t_j|^2).
SimilarityMatrix similarity_matrix(std::span<const encode::Embedding> videos,
                                   std::span<const encode::Embedding> texts);

struct LossTerms {
  double v2t = 0.0;
  double t2v = 0.0;
  double total = 0.0;  // (v2t + t2v) / 2
};

/**
 * Symmetric InfoNCE over a square batch with positives on the diagonal.
 * Logits are scale * s; the default scale 1 is the plain exp(s) form.
 */
LossTerms symmetric_ce_terms(const SimilarityMatrix& sim, double scale = 1.0);
double symmetric_ce_loss(const SimilarityMatrix& sim, double scale = 1.0);

/// dL/ds_ij = scale / (2B) * [(p_row_i(j) - d_ij) + (p_col_j(i) - d_ij)].
SimilarityMatrix symmetric_ce_grad(const SimilarityMatrix& sim, double scale = 1.0);

/**
 * 1 + number of candidates scoring strictly higher than the best positive.
 * Ties never push a positive down.
 */
std::size_t rank_of_target(std::span<const double> scores, std::span<const std::size_t> positives);

struct GroundTruth {
  std::vector<std::size_t> text_to_video;
  std::vector<std::vector<std::size_t>> video_to_texts;

  /// Derives video_to_texts; every video must own at least one text.
  static GroundTruth from_text_to_video(std::vector<std::size_t> text_to_video, std::size_t n_videos);
  void validate(std::size_t n_videos, std::size_t n_texts) const;
};

struct DirectionMetrics {
  double r_at_1 = 0.0;
  double r_at_5 = 0.0;
  double r_at_10 = 0.0;
  std::size_t median_rank = 0;
  double mean_rank = 0.0;

  friend bool operator==(const DirectionMetrics&, const DirectionMetrics&) = default;
};

/// Percent recall, lower median, and mean over per-query ranks.
DirectionMetrics summarize_ranks(std::span<const std::size_t> ranks);

struct RetrievalReport {
  DirectionMetrics t2v;
  DirectionMetrics v2t;
  double meta_sum = 0.0;

  friend bool operator==(const RetrievalReport&, const RetrievalReport&) = default;
};

/// Sum of R@1, R@5, R@10 over both directions.
double meta_sum(const DirectionMetrics& t2v, const DirectionMetrics& v2t);

/**
 * t2v: one query per text scored over the videos (column of @p sim).
 * v2t: one query per video scored over the texts (row), any caption counts.
 */
RetrievalReport evaluate(const SimilarityMatrix& sim, const GroundTruth& gt);

nlohmann::json to_json(const DirectionMetrics& m);
nlohmann::json to_json(const RetrievalReport& r);
RetrievalReport report_from_json(const nlohmann::json& j);

}  // namespace fdaclip::retrieval
