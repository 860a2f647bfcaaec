/**
 * @file retrieval.cpp
 * @brief Similarity, contrastive loss and retrieval metrics.
 */
#include "fdaclip/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fdaclip::retrieval {

namespace {

void require_square(const SimilarityMatrix& sim) {
  if (sim.n_videos() != sim.n_texts()) {
    throw std::invalid_argument("contrastive loss needs a square batch, got " + std::to_string(sim.n_videos()) +
                                "x" + std::to_string(sim.n_texts()));
  }
  if (sim.n_videos() == 0) throw std::invalid_argument("contrastive loss: empty batch");
}

// log-softmax normaliser of scale * x over a strided slice.
template <class Get>
double log_sum_exp(std::size_t n, double scale, Get get) {
  double mx = -INFINITY;
  for (std::size_t k = 0; k < n; ++k) mx = std::max(mx, scale * get(k));
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += std::exp(scale * get(k) - mx);
  return mx + std::log(sum);
}

}  // namespace

SimilarityMatrix::SimilarityMatrix(std::size_t n_videos, std::size_t n_texts, double fill)
    : rows_(n_videos), cols_(n_texts), values_(n_videos * n_texts, fill) {}

SimilarityMatrix::SimilarityMatrix(std::size_t n_videos, std::size_t n_texts, std::vector<double> values)
    : rows_(n_videos), cols_(n_texts), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) throw std::invalid_argument("similarity matrix: value count mismatch");
  for (double v : values_) {
    if (!std::isfinite(v)) throw DataError("similarity matrix: non-finite entry");
  }
}

std::vector<double> SimilarityMatrix::column(std::size_t text) const {
  std::vector<double> col(rows_);
  for (std::size_t i = 0; i < rows_; ++i) col[i] = at(i, text);
  return col;
}

SimilarityMatrix similarity_matrix(std::span<const encode::Embedding> videos,
                                   std::span<const encode::Embedding> texts) {
  auto squared_norms = [](std::span<const encode::Embedding> embs, std::size_t dim) {
    std::vector<double> out;
    for (const auto& e : embs) {
      if (e.dim() != dim) throw DataError("similarity_matrix: embedding dimensions differ");
      double sq = 0.0;
      for (float x : e.values) sq += static_cast<double>(x) * x;
      if (!(sq > 0.0)) throw DataError("similarity_matrix: zero-norm embedding");
      out.push_back(sq);
    }
    return out;
  };
  const std::size_t dim = !videos.empty() ? videos.front().dim() : (!texts.empty() ? texts.front().dim() : 0);
  auto vn = squared_norms(videos, dim);
  auto tn = squared_norms(texts, dim);

  SimilarityMatrix sim(videos.size(), texts.size());
  for (std::size_t i = 0; i < videos.size(); ++i) {
    for (std::size_t j = 0; j < texts.size(); ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < dim; ++k) dot += static_cast<double>(videos[i].values[k]) * texts[j].values[k];
      // sqrt(a*b) rather than sqrt(a)*sqrt(b): a vector against itself gives exactly 1.
      sim.at(i, j) = std::clamp(dot / std::sqrt(vn[i] * tn[j]), -1.0, 1.0);
    }
  }
  return sim;
}

LossTerms symmetric_ce_terms(const SimilarityMatrix& sim, double scale) {
  require_square(sim);
  const std::size_t b = sim.n_videos();
  LossTerms terms;
  for (std::size_t i = 0; i < b; ++i) {
    const double row_lse = log_sum_exp(b, scale, [&](std::size_t k) { return sim.at(i, k); });
    const double col_lse = log_sum_exp(b, scale, [&](std::size_t k) { return sim.at(k, i); });
    terms.v2t += row_lse - scale * sim.at(i, i);
    terms.t2v += col_lse - scale * sim.at(i, i);
  }
  terms.v2t /= static_cast<double>(b);
  terms.t2v /= static_cast<double>(b);
  terms.total = 0.5 * (terms.v2t + terms.t2v);
  return terms;
}

double symmetric_ce_loss(const SimilarityMatrix& sim, double scale) { return symmetric_ce_terms(sim, scale).total; }

SimilarityMatrix symmetric_ce_grad(const SimilarityMatrix& sim, double scale) {
  require_square(sim);
  const std::size_t b = sim.n_videos();
  std::vector<double> row_lse(b), col_lse(b);
  for (std::size_t i = 0; i < b; ++i) {
    row_lse[i] = log_sum_exp(b, scale, [&](std::size_t k) { return sim.at(i, k); });
    col_lse[i] = log_sum_exp(b, scale, [&](std::size_t k) { return sim.at(k, i); });
  }
  SimilarityMatrix grad(b, b);
  const double factor = scale / (2.0 * static_cast<double>(b));
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      const double logit = scale * sim.at(i, j);
      const double p_row = std::exp(logit - row_lse[i]);
      const double p_col = std::exp(logit - col_lse[j]);
      const double delta = i == j ? 1.0 : 0.0;
      grad.at(i, j) = factor * ((p_row - delta) + (p_col - delta));
    }
  }
  return grad;
}

std::size_t rank_of_target(std::span<const double> scores, std::span<const std::size_t> positives) {
  if (positives.empty()) throw std::invalid_argument("rank_of_target: no positives");
  double best = -INFINITY;
  for (auto p : positives) {
    if (p >= scores.size()) throw std::out_of_range("rank_of_target: positive index out of range");
    best = std::max(best, scores[p]);
  }
  std::size_t higher = 0;
  for (double s : scores) higher += s > best ? 1 : 0;
  return higher + 1;
}

GroundTruth GroundTruth::from_text_to_video(std::vector<std::size_t> text_to_video, std::size_t n_videos) {
  GroundTruth gt;
  gt.video_to_texts.resize(n_videos);
  for (std::size_t t = 0; t < text_to_video.size(); ++t) {
    if (text_to_video[t] >= n_videos) throw DataError("ground truth: text maps to unknown video");
    gt.video_to_texts[text_to_video[t]].push_back(t);
  }
  gt.text_to_video = std::move(text_to_video);
  gt.validate(n_videos, gt.text_to_video.size());
  return gt;
}

void GroundTruth::validate(std::size_t n_videos, std::size_t n_texts) const {
  if (text_to_video.size() != n_texts || video_to_texts.size() != n_videos) {
    throw DataError("ground truth shape does not match the similarity matrix");
  }
  for (auto v : text_to_video) {
    if (v >= n_videos) throw DataError("ground truth: video index out of range");
  }
  for (std::size_t v = 0; v < n_videos; ++v) {
    if (video_to_texts[v].empty()) throw DataError("ground truth: video " + std::to_string(v) + " has no captions");
    for (auto t : video_to_texts[v]) {
      if (t >= n_texts) throw DataError("ground truth: text index out of range");
    }
  }
}

DirectionMetrics summarize_ranks(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw std::invalid_argument("summarize_ranks: no queries");
  const auto n = static_cast<double>(ranks.size());
  auto recall = [&](std::size_t k) {
    auto hits = std::count_if(ranks.begin(), ranks.end(), [k](std::size_t r) { return r <= k; });
    return 100.0 * static_cast<double>(hits) / n;
  };
  DirectionMetrics m;
  m.r_at_1 = recall(1);
  m.r_at_5 = recall(5);
  m.r_at_10 = recall(10);
  std::vector<std::size_t> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  m.median_rank = sorted[(sorted.size() - 1) / 2];
  m.mean_rank = static_cast<double>(std::accumulate(sorted.begin(), sorted.end(), std::size_t{0})) / n;
  return m;
}

double meta_sum(const DirectionMetrics& t2v, const DirectionMetrics& v2t) {
  return t2v.r_at_1 + t2v.r_at_5 + t2v.r_at_10 + v2t.r_at_1 + v2t.r_at_5 + v2t.r_at_10;
}

RetrievalReport evaluate(const SimilarityMatrix& sim, const GroundTruth& gt) {
  gt.validate(sim.n_videos(), sim.n_texts());
  std::vector<std::size_t> t2v_ranks(sim.n_texts());
  for (std::size_t t = 0; t < sim.n_texts(); ++t) {
    const std::size_t positive[] = {gt.text_to_video[t]};
    t2v_ranks[t] = rank_of_target(sim.column(t), positive);
  }
  std::vector<std::size_t> v2t_ranks(sim.n_videos());
  for (std::size_t v = 0; v < sim.n_videos(); ++v) {
    v2t_ranks[v] = rank_of_target(sim.row(v), gt.video_to_texts[v]);
  }
  RetrievalReport report;
  report.t2v = summarize_ranks(t2v_ranks);
  report.v2t = summarize_ranks(v2t_ranks);
  report.meta_sum = meta_sum(report.t2v, report.v2t);
  return report;
}

nlohmann::json to_json(const DirectionMetrics& m) {
  return nlohmann::json{{"r_at_1", m.r_at_1},
                        {"r_at_5", m.r_at_5},
                        {"r_at_10", m.r_at_10},
                        {"median_rank", m.median_rank},
                        {"mean_rank", m.mean_rank}};
}

nlohmann::json to_json(const RetrievalReport& r) {
  return nlohmann::json{{"t2v", to_json(r.t2v)}, {"v2t", to_json(r.v2t)}, {"meta_sum", r.meta_sum}};
}

RetrievalReport report_from_json(const nlohmann::json& j) {
  auto direction = [](const nlohmann::json& d) {
    DirectionMetrics m;
    m.r_at_1 = d.at("r_at_1").get<double>();
    m.r_at_5 = d.at("r_at_5").get<double>();
    m.r_at_10 = d.at("r_at_10").get<double>();
    m.median_rank = d.at("median_rank").get<std::size_t>();
    m.mean_rank = d.at("mean_rank").get<double>();
    return m;
  };
  try {
    RetrievalReport r;
    r.t2v = direction(j.at("t2v"));
    r.v2t = direction(j.at("v2t"));
    r.meta_sum = j.at("meta_sum").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed retrieval report: ") + e.what());
  }
}

}  // namespace fdaclip::retrieval
