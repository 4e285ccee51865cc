#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dx/error.hpp"

namespace dx {

enum class MappingSource { kFile, kService };

std::string_view to_string(MappingSource s);

// Concept IRIs for one free-text label, in the order the source gave them.
struct LabelMapping {
  std::string label;
  std::vector<std::string> concepts;
  MappingSource source = MappingSource::kFile;
};

struct MappingResult {
  std::vector<LabelMapping> mapped;
  std::vector<std::string> unmapped;
  std::vector<std::string> warnings;
  std::size_t service_calls = 0;
};

class ServiceError : public Error {
 public:
  using Error::Error;
};

// Text annotation backend. annotate() throws ServiceError when the backend
// cannot be reached or answers with something unparseable.
class AnnotationService {
 public:
  virtual ~AnnotationService() = default;
  virtual std::vector<std::string> annotate(std::string_view text) = 0;
};

// Shape of an annotate endpoint in the style of DBpedia Spotlight:
//   GET {base_url}{path}?text=<label>  with  Accept: application/json
// answering {"Resources": [{"@URI": "..."}, ...]}. A missing resources key
// means "no entities".
struct ServiceConfig {
  std::string base_url;
  std::string path = "/rest/annotate";
  std::string resources_key = "Resources";
  std::string uri_key = "@URI";
  std::map<std::string, std::string> extra_params;
  std::chrono::milliseconds delay{0};
  std::chrono::seconds timeout{10};
};

// Sequential HTTP client; waits `delay` between consecutive requests.
class HttpAnnotationClient : public AnnotationService {
 public:
  explicit HttpAnnotationClient(ServiceConfig config);
  ~HttpAnnotationClient() override;

  std::vector<std::string> annotate(std::string_view text) override;
  std::size_t calls() const { return calls_; }

 private:
  ServiceConfig config_;
  std::size_t calls_ = 0;
  std::chrono::steady_clock::time_point last_call_{};
};

// Parses an annotate response body. Throws ServiceError on malformed JSON.
std::vector<std::string> parse_annotation_response(std::string_view body,
                                                   const ServiceConfig& config);

// Resolves each label from the mapfile (`label<TAB>concept_iri`, repeatable
// rows), then the cache sidecar (`label<TAB>concept_iri<TAB>source`), then the
// service when one is given. Labels match case-insensitively after trimming.
// Everything resolved, including service misses, is written back to the cache
// so a rerun needs no service calls. An empty cache_path disables caching.
MappingResult map_labels(std::span<const std::string> labels, const std::string& mapfile,
                         AnnotationService* service, const std::string& cache_path = {});

}  // namespace dx
