#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace specbench {

struct GenerationParams {
  double temperature = 0.0;
  int max_output_tokens = 256;
};

struct ModelRequest {
  /// Opaque correlation id (the patch id). Mock backends key on it; it is
  /// not part of the cache digest and HTTP backends ignore it.
  std::string tag;
  std::string prompt_text;
  std::vector<std::vector<std::uint8_t>> images;  // PNG blobs, in prompt order
  GenerationParams params;
};

struct ModelResponse {
  std::string text;
  double latency_ms = 0.0;
  std::string backend_id;
  bool from_cache = false;
  int retries = 0;
};

/// One raw model call. Implementations throw TransientError (retryable),
/// AuthError (fatal) or ProtocolError.
class ModelBackend {
 public:
  virtual ~ModelBackend() = default;
  virtual std::string id() const = 0;
  virtual std::string invoke(const ModelRequest& request) = 0;
};

/// Content hash identifying a request: SHA-256 over backend id, prompt bytes,
/// each image's bytes in order (length-prefixed) and the canonical
/// serialization of the generation parameters.
std::string cache_digest(std::string_view backend_id, const ModelRequest& request);

/// Append-only directory of {digest -> response JSON} files. Writes go
/// through a temp file + atomic rename, so concurrent duplicate writes of
/// the same key are safe (last write wins with identical content).
class ResponseCache {
 public:
  ResponseCache() = default;  // disabled
  explicit ResponseCache(std::filesystem::path dir);

  bool enabled() const { return !dir_.empty(); }
  std::optional<ModelResponse> lookup(const std::string& digest) const;
  void store(const std::string& digest, const ModelRequest& request,
             const ModelResponse& response) const;

 private:
  std::filesystem::path dir_;
};

struct QueryClientConfig {
  int max_in_flight = 4;
  int retries = 3;
  int backoff_base_ms = 250;
  std::filesystem::path cache_dir;  // empty = no cache
};

/// Shareable front door to a backend: response cache, exponential-backoff
/// retries for transient failures, and a bound on concurrent in-flight calls.
class QueryClient {
 public:
  QueryClient(std::shared_ptr<ModelBackend> backend, QueryClientConfig config);

  ModelResponse query(const ModelRequest& request);

  long backend_calls() const { return backend_calls_.load(); }
  long cache_hits() const { return cache_hits_.load(); }
  const std::string& backend_id() const { return backend_id_; }

 private:
  void acquire_slot();
  void release_slot();

  std::shared_ptr<ModelBackend> backend_;
  QueryClientConfig config_;
  ResponseCache cache_;
  std::string backend_id_;
  std::atomic<long> backend_calls_{0};
  std::atomic<long> cache_hits_{0};
  std::mutex slots_mutex_;
  std::condition_variable slots_cv_;
  int in_flight_ = 0;
};

struct HttpBackendConfig {
  std::string endpoint_url;  // e.g. https://host:443/v1/chat
  std::string model_name;
  std::string api_key_env = "SPECBENCH_API_KEY";
  int timeout_s = 120;
};

/// Generic JSON-over-HTTP chat backend. Request body:
///   {model, messages: [{role, content: [{text} | {image: <base64 PNG>,
///   mime: "image/png"}]}], temperature, max_tokens}
/// Expected response body: {"text": "..."}.
class HttpBackend : public ModelBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  std::string id() const override;
  std::string invoke(const ModelRequest& request) override;

 private:
  HttpBackendConfig config_;
};

enum class MissPolicy {
  Error,  // unknown tag throws
  Empty,  // unknown tag answers ""
};

/// Deterministic backend answering from a tag -> text table.
class FixtureBackend : public ModelBackend {
 public:
  FixtureBackend(std::string id, std::map<std::string, std::string> answers,
                 MissPolicy miss_policy);

  std::string id() const override { return id_; }
  std::string invoke(const ModelRequest& request) override;

 private:
  std::string id_;
  std::map<std::string, std::string> answers_;
  MissPolicy miss_policy_;
};

/// Backend that echoes each patch's ground truth in the answer grammar;
/// closes the loop for end-to-end F1 = 1.0 checks.
std::shared_ptr<ModelBackend> make_truth_backend(
    const std::map<std::string, std::set<int>>& truth_by_patch, MissPolicy miss_policy);

/// Backend that always answers an empty string (models a refusal).
std::shared_ptr<ModelBackend> make_empty_backend();

}  // namespace specbench
