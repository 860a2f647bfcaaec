#include "fdaclip/encode.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fdaclip::encode {

void require_finite(const Embedding& e) {
  for (float v : e.values) {
    if (!std::isfinite(v)) throw DataError("embedding contains a non-finite value");
  }
}

Embedding pool_average(std::span<const Embedding> frame_embeddings) {
  if (frame_embeddings.empty()) throw std::invalid_argument("pool_average: no embeddings");
  const std::size_t d = frame_embeddings.front().dim();
  std::vector<double> acc(d, 0.0);
  for (const auto& e : frame_embeddings) {
    if (e.dim() != d) {
      throw DataError("pool_average: dimension " + std::to_string(e.dim()) + " != " + std::to_string(d));
    }
    for (std::size_t k = 0; k < d; ++k) acc[k] += e.values[k];
  }
  Embedding out;
  out.values.resize(d);
  const auto n = static_cast<double>(frame_embeddings.size());
  for (std::size_t k = 0; k < d; ++k) out.values[k] = static_cast<float>(acc[k] / n);
  return out;
}

Embedding l2_normalize(const Embedding& v) {
  double sq = 0.0;
  for (float x : v.values) sq += static_cast<double>(x) * x;
  if (!(sq > 0.0)) throw DataError("l2_normalize: zero vector has no direction");
  const double inv = 1.0 / std::sqrt(sq);
  Embedding out;
  out.values.reserve(v.dim());
  for (float x : v.values) out.values.push_back(static_cast<float>(x * inv));
  return out;
}

}  // namespace fdaclip::encode
