#include "dx/label_mapping.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "httplib.h"
#include "json.hpp"

#include "dx/text.hpp"

namespace dx {

std::string_view to_string(MappingSource s) {
  return s == MappingSource::kFile ? "file" : "service";
}

HttpAnnotationClient::HttpAnnotationClient(ServiceConfig config) : config_(std::move(config)) {}
HttpAnnotationClient::~HttpAnnotationClient() = default;

std::vector<std::string> parse_annotation_response(std::string_view body,
                                                   const ServiceConfig& config) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ServiceError(std::string("malformed annotate response: ") + e.what());
  }
  std::vector<std::string> out;
  if (!doc.is_object() || !doc.contains(config.resources_key)) return out;
  const auto& resources = doc[config.resources_key];
  if (!resources.is_array()) throw ServiceError("annotate response: resources is not a list");
  for (const auto& r : resources) {
    if (r.is_string()) {
      out.push_back(r.get<std::string>());
    } else if (r.is_object() && r.contains(config.uri_key) && r[config.uri_key].is_string()) {
      out.push_back(r[config.uri_key].get<std::string>());
    } else {
      throw ServiceError("annotate response: resource without '" + config.uri_key + "'");
    }
  }
  return out;
}

std::vector<std::string> HttpAnnotationClient::annotate(std::string_view text) {
  if (calls_ > 0 && config_.delay.count() > 0) {
    const auto ready = last_call_ + config_.delay;
    std::this_thread::sleep_until(ready);
  }
  ++calls_;
  last_call_ = std::chrono::steady_clock::now();

  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  httplib::Params params{{"text", std::string(text)}};
  for (const auto& [k, v] : config_.extra_params) params.emplace(k, v);
  const httplib::Headers headers{{"Accept", "application/json"}};
  auto res = client.Get(config_.path, params, headers);
  if (!res) {
    throw ServiceError("annotation service unreachable at " + config_.base_url + ": " +
                       httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ServiceError("annotation service answered HTTP " + std::to_string(res->status));
  }
  return parse_annotation_response(res->body, config_);
}

namespace {

struct CacheEntry {
  std::string label;
  std::vector<std::string> concepts;
  MappingSource source;
};

void push_unique(std::vector<std::string>& v, std::string_view s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.emplace_back(s);
}

std::unordered_map<std::string, std::vector<std::string>> load_mapfile(const std::string& path) {
  std::unordered_map<std::string, std::vector<std::string>> out;
  if (path.empty()) return out;
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2 || trim(fields[0]).empty() || trim(fields[1]).empty()) {
      throw ParseError(path, reader.line_number(), "expected 'label<TAB>concept_iri'");
    }
    push_unique(out[normalize_key(fields[0])], trim(fields[1]));
  }
  return out;
}

}  // namespace

MappingResult map_labels(std::span<const std::string> labels, const std::string& mapfile,
                         AnnotationService* service, const std::string& cache_path) {
  MappingResult result;
  const auto file_map = load_mapfile(mapfile);

  // Cache keyed by normalized label; insertion order kept for rewriting.
  std::vector<CacheEntry> cache;
  std::unordered_map<std::string, std::size_t> cache_pos;
  if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
    LineReader reader(cache_path);
    std::string line;
    while (reader.next(line)) {
      if (trim(line).empty() || line.front() == '#') continue;
      const auto fields = split(line, '\t');
      if (fields.size() != 3 || (fields[2] != "file" && fields[2] != "service")) {
        throw ParseError(cache_path, reader.line_number(),
                         "expected 'label<TAB>concept_iri<TAB>file|service'");
      }
      const auto key = normalize_key(fields[0]);
      auto [it, inserted] = cache_pos.emplace(key, cache.size());
      if (inserted) {
        cache.push_back({std::string(trim(fields[0])), {},
                         fields[2] == "file" ? MappingSource::kFile : MappingSource::kService});
      }
      if (!trim(fields[1]).empty()) push_unique(cache[it->second].concepts, trim(fields[1]));
    }
  }
  const std::size_t cached_before = cache.size();
  bool cache_dirty = false;

  for (const auto& raw_label : labels) {
    const auto key = normalize_key(raw_label);
    if (key.empty()) continue;
    if (auto it = file_map.find(key); it != file_map.end()) {
      result.mapped.push_back({raw_label, it->second, MappingSource::kFile});
      if (cache_pos.emplace(key, cache.size()).second) {
        cache.push_back({std::string(trim(raw_label)), it->second, MappingSource::kFile});
      }
      continue;
    }
    if (auto it = cache_pos.find(key); it != cache_pos.end()) {
      const auto& entry = cache[it->second];
      if (entry.concepts.empty()) {
        result.unmapped.push_back(raw_label);
      } else {
        result.mapped.push_back({raw_label, entry.concepts, entry.source});
      }
      continue;
    }
    if (service == nullptr) {
      result.unmapped.push_back(raw_label);
      continue;
    }
    std::vector<std::string> concepts;
    try {
      ++result.service_calls;
      for (const auto& c : service->annotate(std::string(trim(raw_label)))) push_unique(concepts, c);
    } catch (const ServiceError& e) {
      // Not cached: a later run with the service reachable may succeed.
      result.warnings.push_back("label '" + raw_label + "': " + e.what());
      result.unmapped.push_back(raw_label);
      continue;
    }
    cache_pos.emplace(key, cache.size());
    cache.push_back({std::string(trim(raw_label)), concepts, MappingSource::kService});
    if (concepts.empty()) {
      result.unmapped.push_back(raw_label);
    } else {
      result.mapped.push_back({raw_label, std::move(concepts), MappingSource::kService});
    }
  }
  cache_dirty = cache.size() != cached_before;

  if (!cache_path.empty() && cache_dirty) {
    std::ostringstream out;
    for (const auto& entry : cache) {
      const auto source = to_string(entry.source);
      if (entry.concepts.empty()) {
        out << entry.label << "\t\t" << source << '\n';
      }
      for (const auto& c : entry.concepts) out << entry.label << '\t' << c << '\t' << source << '\n';
    }
    write_text_file(cache_path, out.str());
  }
  return result;
}

}  // namespace dx
