#include "specbench/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "specbench/answers.hpp"
#include "specbench/digest.hpp"
#include "specbench/error.hpp"

namespace specbench {

using nlohmann::ordered_json;

namespace {

std::string canonical_params(const GenerationParams& params) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "temperature=%.6f;max_output_tokens=%d",
                params.temperature, params.max_output_tokens);
  return buf;
}

std::string base64_encode(const std::vector<std::uint8_t>& data) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < data.size(); i += 3) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out += alphabet[(v >> 18) & 63];
    out += alphabet[(v >> 12) & 63];
    out += alphabet[(v >> 6) & 63];
    out += alphabet[v & 63];
  }
  if (i + 1 == data.size()) {
    const std::uint32_t v = data[i] << 16;
    out += alphabet[(v >> 18) & 63];
    out += alphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == data.size()) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
    out += alphabet[(v >> 18) & 63];
    out += alphabet[(v >> 12) & 63];
    out += alphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string cache_digest(std::string_view backend_id, const ModelRequest& request) {
  Sha256 h;
  h.update(backend_id);
  h.update(std::string_view("\0", 1));
  h.update(request.prompt_text);
  h.update(std::string_view("\0", 1));
  for (const auto& image : request.images) {
    std::uint8_t len[8];
    std::uint64_t n = image.size();
    for (int i = 0; i < 8; ++i) len[i] = static_cast<std::uint8_t>(n >> (8 * i));
    h.update(std::span<const std::uint8_t>(len, 8));
    h.update(image);
  }
  h.update(canonical_params(request.params));
  return h.hex();
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::optional<ModelResponse> ResponseCache::lookup(const std::string& digest) const {
  if (!enabled()) return std::nullopt;
  const auto path = dir_ / (digest + ".json");
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  ordered_json doc;
  try {
    doc = ordered_json::parse(f);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // torn write; treat as a miss
  }
  ModelResponse response;
  response.text = doc.at("text").get<std::string>();
  response.latency_ms = doc.at("latency_ms").get<double>();
  response.backend_id = doc.at("request_summary").at("backend_id").get<std::string>();
  response.from_cache = true;
  return response;
}

void ResponseCache::store(const std::string& digest, const ModelRequest& request,
                          const ModelResponse& response) const {
  if (!enabled()) return;
  ordered_json doc;
  doc["digest"] = digest;
  doc["request_summary"] = {
      {"backend_id", response.backend_id},
      {"tag", request.tag},
      {"prompt_sha256", sha256_hex(request.prompt_text)},
      {"n_images", request.images.size()},
      {"params", canonical_params(request.params)},
  };
  doc["text"] = response.text;
  doc["latency_ms"] = response.latency_ms;
  doc["timestamp"] = iso8601_now();

  const auto tmp = dir_ / (digest + ".tmp." +
                           std::to_string(std::hash<std::thread::id>{}(
                               std::this_thread::get_id())));
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw Error("cannot write cache entry " + tmp.string());
    f << doc.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, dir_ / (digest + ".json"));
}

QueryClient::QueryClient(std::shared_ptr<ModelBackend> backend, QueryClientConfig config)
    : backend_(std::move(backend)),
      config_(config),
      cache_(config.cache_dir),
      backend_id_(backend_->id()) {
  if (config_.max_in_flight < 1) throw Error("max_in_flight must be >= 1");
  if (config_.retries < 0) throw Error("retries must be >= 0");
}

void QueryClient::acquire_slot() {
  std::unique_lock lock(slots_mutex_);
  slots_cv_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
  ++in_flight_;
}

void QueryClient::release_slot() {
  {
    std::lock_guard lock(slots_mutex_);
    --in_flight_;
  }
  slots_cv_.notify_one();
}

ModelResponse QueryClient::query(const ModelRequest& request) {
  if (request.images.empty()) throw Error("model request carries no images");
  if (request.params.temperature < 0.0 || request.params.temperature > 2.0) {
    throw Error("temperature outside [0, 2]");
  }

  const std::string digest = cache_digest(backend_id_, request);
  if (auto cached = cache_.lookup(digest)) {
    ++cache_hits_;
    return *cached;
  }

  acquire_slot();
  struct SlotGuard {
    QueryClient* client;
    ~SlotGuard() { client->release_slot(); }
  } guard{this};

  const auto start = std::chrono::steady_clock::now();
  ModelResponse response;
  response.backend_id = backend_id_;
  int attempt = 0;
  while (true) {
    try {
      ++backend_calls_;
      response.text = backend_->invoke(request);
      break;
    } catch (const TransientError&) {
      if (attempt >= config_.retries) throw;
      const auto delay = std::chrono::milliseconds(
          static_cast<long long>(config_.backoff_base_ms) << attempt);
      std::this_thread::sleep_for(delay);
      ++attempt;
    }
  }
  response.retries = attempt;
  response.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  response.from_cache = false;
  cache_.store(digest, request, response);
  return response;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.endpoint_url.empty()) throw Error("http backend needs endpoint_url");
  if (config_.model_name.empty()) throw Error("http backend needs model_name");
}

std::string HttpBackend::id() const { return "http/" + config_.model_name; }

std::string HttpBackend::invoke(const ModelRequest& request) {
  // Split endpoint into base and path for httplib.
  const auto& url = config_.endpoint_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error("endpoint_url has no scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  ordered_json content = ordered_json::array();
  content.push_back({{"text", request.prompt_text}});
  for (const auto& image : request.images) {
    content.push_back({{"image", base64_encode(image)}, {"mime", "image/png"}});
  }
  ordered_json body;
  body["model"] = config_.model_name;
  body["messages"] = ordered_json::array({{{"role", "user"}, {"content", content}}});
  body["temperature"] = request.params.temperature;
  body["max_tokens"] = request.params.max_output_tokens;

  httplib::Client client(base);
  client.set_connection_timeout(config_.timeout_s);
  client.set_read_timeout(config_.timeout_s);

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const auto result = client.Post(path, headers, body.dump(), "application/json");
  if (!result) {
    throw TransientError("transport failure: " + httplib::to_string(result.error()));
  }
  const int status = result->status;
  if (status == 401 || status == 403) {
    throw AuthError("authentication failed with HTTP " + std::to_string(status));
  }
  if (status == 408 || status == 429 || status >= 500) {
    throw TransientError("backend returned HTTP " + std::to_string(status));
  }
  if (status != 200) {
    throw ProtocolError("backend returned HTTP " + std::to_string(status));
  }
  try {
    const auto doc = ordered_json::parse(result->body);
    return doc.at("text").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed backend payload: ") + e.what());
  }
}

FixtureBackend::FixtureBackend(std::string id, std::map<std::string, std::string> answers,
                               MissPolicy miss_policy)
    : id_(std::move(id)), answers_(std::move(answers)), miss_policy_(miss_policy) {}

std::string FixtureBackend::invoke(const ModelRequest& request) {
  auto it = answers_.find(request.tag);
  if (it != answers_.end()) return it->second;
  if (miss_policy_ == MissPolicy::Empty) return "";
  throw Error("no fixture answer for patch \"" + request.tag + "\"");
}

std::shared_ptr<ModelBackend> make_truth_backend(
    const std::map<std::string, std::set<int>>& truth_by_patch, MissPolicy miss_policy) {
  std::map<std::string, std::string> answers;
  for (const auto& [patch_id, truth] : truth_by_patch) {
    answers.emplace(patch_id, format_answer(truth));
  }
  return std::make_shared<FixtureBackend>("mock-truth", std::move(answers), miss_policy);
}

std::shared_ptr<ModelBackend> make_empty_backend() {
  return std::make_shared<FixtureBackend>("mock-empty",
                                          std::map<std::string, std::string>{},
                                          MissPolicy::Empty);
}

}  // namespace specbench
