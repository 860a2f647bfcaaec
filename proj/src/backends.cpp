/**
 * @file backends.cpp
 * @brief Mock, planted, store-backed and external-process encoders.
 */
#include "fdaclip/backends.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <json.hpp>
#include <set>

#include "fdaclip/pnm.hpp"

namespace fdaclip::encode {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

void require_dim(std::size_t dim) {
  if (dim < 2) throw std::invalid_argument("embedding dimension must be at least 2");
}

std::span<const std::uint8_t> bytes_of(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::uint64_t frame_digest(std::uint64_t seed, char domain, const FrameInput& input) {
  KeyedHash h(seed, domain);
  h.update_u64(input.rgb.width()).update_u64(input.rgb.height()).update(input.rgb.data());
  h.update_u64(input.mask.width()).update_u64(input.mask.height()).update(input.mask.data());
  return h.digest();
}

std::uint64_t text_digest(std::uint64_t seed, char domain, std::string_view caption) {
  KeyedHash h(seed, domain);
  h.update_u64(caption.size()).update(bytes_of(caption));
  return h.digest();
}

Embedding to_embedding(const std::vector<double>& v) {
  Embedding e;
  e.values.reserve(v.size());
  for (double x : v) e.values.push_back(static_cast<float>(x));
  return e;
}

std::string safe_name(std::string_view id) {
  std::string out;
  for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

}  // namespace

KeyedHash::KeyedHash(std::uint64_t seed, char domain) : state_(kFnvOffset) {
  update_u64(seed);
  const std::uint8_t d = static_cast<std::uint8_t>(domain);
  update(std::span(&d, 1));
}

KeyedHash& KeyedHash::update(std::span<const std::uint8_t> bytes) {
  for (auto b : bytes) {
    state_ ^= b;
    state_ *= kFnvPrime;
  }
  return *this;
}

KeyedHash& KeyedHash::update_u64(std::uint64_t v) {
  std::uint8_t le[8];
  for (int i = 0; i < 8; ++i) le[i] = static_cast<std::uint8_t>(v >> (8 * i));
  return update(le);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::vector<double> unit_vector_from_digest(std::uint64_t digest, std::size_t dim) {
  std::vector<double> v(dim);
  double sq = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    auto z = splitmix64(digest + (k + 1) * kGolden);
    v[k] = static_cast<double>(z >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    sq += v[k] * v[k];
  }
  // All-zero output would need 2^53-aligned draws in every component.
  const double inv = 1.0 / std::sqrt(sq);
  for (auto& x : v) x *= inv;
  return v;
}

// ---------------------------------------------------------------- mock

MockBackend::MockBackend(std::uint64_t seed, std::size_t dim) : seed_(seed), dim_(dim) { require_dim(dim); }

Embedding MockBackend::encode_frame(const FrameInput& input) {
  return to_embedding(unit_vector_from_digest(frame_digest(seed_, 'F', input), dim_));
}

Embedding MockBackend::encode_text(const TextInput& input) {
  return to_embedding(unit_vector_from_digest(text_digest(seed_, 'T', input.caption), dim_));
}

// ------------------------------------------------------------- planted

PlantedBackend::PlantedBackend(std::map<std::string, std::string> caption_to_video, std::size_t dim, double noise,
                               std::uint64_t seed)
    : caption_to_video_(std::move(caption_to_video)), dim_(dim), noise_(noise), seed_(seed) {
  require_dim(dim);
  if (!(noise >= 0.0 && noise < 1.0)) throw std::invalid_argument("planted noise must lie in [0, 1)");

  std::set<std::string> videos;
  for (const auto& [caption, video] : caption_to_video_) videos.insert(video);
  if (videos.size() > dim) {
    throw std::invalid_argument("planted backend: " + std::to_string(videos.size()) +
                                " videos need more orthogonal anchors than dimension " + std::to_string(dim));
  }

  std::vector<std::vector<double>> basis;
  std::uint64_t attempt = 0;
  for (const auto& video : videos) {
    for (;;) {
      auto v = unit_vector_from_digest(splitmix64(seed_ ^ splitmix64(attempt++)), dim);
      for (const auto& b : basis) {
        double dot = 0.0;
        for (std::size_t k = 0; k < dim; ++k) dot += v[k] * b[k];
        for (std::size_t k = 0; k < dim; ++k) v[k] -= dot * b[k];
      }
      double sq = 0.0;
      for (double x : v) sq += x * x;
      if (sq < 1e-6) continue;  // nearly dependent draw, resample
      const double inv = 1.0 / std::sqrt(sq);
      for (auto& x : v) x *= inv;
      basis.push_back(v);
      anchors_.emplace(video, to_embedding(v).values);
      break;
    }
  }
}

const std::vector<float>& PlantedBackend::anchor(const std::string& video_id) const {
  auto it = anchors_.find(video_id);
  if (it == anchors_.end()) throw BackendError("planted backend: unknown video '" + video_id + "'");
  return it->second;
}

Embedding PlantedBackend::perturb(const std::vector<float>& anchor, std::uint64_t digest) const {
  if (noise_ == 0.0) return Embedding{anchor};
  auto u = unit_vector_from_digest(digest, dim_);
  std::vector<double> v(dim_);
  for (std::size_t k = 0; k < dim_; ++k) v[k] = anchor[k] + noise_ * u[k];
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double inv = 1.0 / std::sqrt(sq);
  for (auto& x : v) x *= inv;
  return to_embedding(v);
}

Embedding PlantedBackend::encode_frame(const FrameInput& input) {
  return perturb(anchor(std::string(input.video_id)), frame_digest(seed_, 'N', input));
}

Embedding PlantedBackend::encode_text(const TextInput& input) {
  auto it = caption_to_video_.find(std::string(input.caption));
  if (it == caption_to_video_.end()) {
    throw BackendError("planted backend: caption not in correspondence map: '" + std::string(input.caption) + "'");
  }
  return perturb(anchor(it->second), text_digest(seed_, 'N', input.caption));
}

// --------------------------------------------------------------- store

std::string frame_record_id(std::string_view video_id, std::size_t frame_index) {
  return "frame/" + std::string(video_id) + "/" + std::to_string(frame_index);
}

std::string text_record_id(std::string_view video_id, std::size_t caption_index) {
  return "text/" + std::string(video_id) + "/" + std::to_string(caption_index);
}

StoreBackend::StoreBackend(EmbeddingStore store) : store_(std::move(store)) {
  if (store_.dim() < 2) throw BackendError("embedding store dimension must be at least 2");
}

Embedding StoreBackend::lookup(const std::string& id) const {
  const auto* values = store_.find(id);
  if (!values) throw BackendError("embedding store has no record '" + id + "'");
  Embedding e{*values};
  require_finite(e);
  return e;
}

Embedding StoreBackend::encode_frame(const FrameInput& input) {
  return lookup(frame_record_id(input.video_id, input.frame_index));
}

Embedding StoreBackend::encode_text(const TextInput& input) {
  return lookup(text_record_id(input.video_id, input.caption_index));
}

// ------------------------------------------------------------ external

ExternalBackend::ExternalBackend(const std::string& command, std::size_t dim, std::filesystem::path scratch_dir)
    : dim_(dim), scratch_dir_(std::move(scratch_dir)) {
  require_dim(dim);
  std::filesystem::create_directories(scratch_dir_);
  // A dead child must surface as EPIPE, not terminate the host process.
  ::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) throw BackendError(std::string("pipe: ") + std::strerror(errno));
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw BackendError(std::string("pipe: ") + std::strerror(errno));
  }
  pid_ = ::fork();
  if (pid_ < 0) throw BackendError(std::string("fork: ") + std::strerror(errno));
  if (pid_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  ::fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  ::fcntl(from_child_, F_SETFD, FD_CLOEXEC);
}

ExternalBackend::~ExternalBackend() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
}

Embedding ExternalBackend::round_trip(const std::string& request_line) {
  std::string line = request_line + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    auto n = ::write(to_child_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendError(std::string("external encoder: write failed: ") + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }

  std::size_t newline;
  while ((newline = pending_.find('\n')) == std::string::npos) {
    char buf[4096];
    auto n = ::read(from_child_, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendError(std::string("external encoder: read failed: ") + std::strerror(errno));
    }
    if (n == 0) throw BackendError("external encoder closed its output");
    pending_.append(buf, static_cast<std::size_t>(n));
  }
  std::string reply = pending_.substr(0, newline);
  pending_.erase(0, newline + 1);

  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(reply);
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("external encoder: malformed reply: ") + e.what());
  }
  if (!parsed.is_array() || parsed.size() != dim_) {
    throw BackendError("external encoder: expected a JSON array of " + std::to_string(dim_) + " numbers");
  }
  Embedding e;
  e.values.reserve(dim_);
  for (const auto& v : parsed) {
    if (!v.is_number()) throw BackendError("external encoder: non-numeric embedding component");
    e.values.push_back(v.get<float>());
  }
  try {
    require_finite(e);
  } catch (const DataError& err) {
    throw BackendError(std::string("external encoder: ") + err.what());
  }
  return e;
}

Embedding ExternalBackend::encode_frame(const FrameInput& input) {
  const auto stem = safe_name(input.video_id) + "_" + std::to_string(input.frame_index);
  auto mask_path = scratch_dir_ / (stem + "_mask.pgm");
  pnm::write_mask(mask_path, input.mask);
  auto rgb_path = input.rgb_path;
  if (rgb_path.empty()) {
    rgb_path = scratch_dir_ / (stem + "_rgb.ppm");
    pnm::write_rgb(rgb_path, input.rgb);
  }
  nlohmann::json req = {{"type", "frame"}, {"rgb_path", rgb_path.string()}, {"mask_path", mask_path.string()}};
  return round_trip(req.dump());
}

Embedding ExternalBackend::encode_text(const TextInput& input) {
  nlohmann::json req = {{"type", "text"}, {"text", std::string(input.caption)}};
  return round_trip(req.dump());
}

}  // namespace fdaclip::encode
