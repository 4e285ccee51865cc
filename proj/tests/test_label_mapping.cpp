#include "doctest.h"

#include <atomic>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "dx/error.hpp"
#include "dx/label_mapping.hpp"
#include "fixtures.hpp"

namespace {

// Local stand-in for an annotate endpoint.
class MockService {
 public:
  MockService() {
    server_.Get("/rest/annotate", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      const auto text = req.get_param_value("text");
      nlohmann::json body = nlohmann::json::object();
      if (text == "coffee maker") {
        body["Resources"] = {{{"@URI", "http://dbpedia.org/resource/Coffeemaker"}},
                             {{"@URI", "http://dbpedia.org/resource/Kitchen_appliance"}}};
      } else if (text == "broken") {
        res.set_content("{not json", "application/json");
        return;
      }
      res.set_content(body.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockService() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int hits() const { return hits_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
};

}  // namespace

TEST_CASE("mapfile hit") {
  dxt::TempDir dir;
  auto mf = dir.write("map.tsv", "microwave\thttp://x/Microwave_oven\nMicrowave\thttp://x/Kitchen\n");
  std::vector<std::string> labels = {" Microwave "};
  auto r = dx::map_labels(labels, mf, nullptr);
  REQUIRE(r.mapped.size() == 1);
  CHECK(r.mapped[0].source == dx::MappingSource::kFile);
  CHECK(r.mapped[0].concepts == std::vector<std::string>{"http://x/Microwave_oven", "http://x/Kitchen"});
  CHECK(r.unmapped.empty());
}

TEST_CASE("offline miss is reported, not fatal") {
  dxt::TempDir dir;
  auto mf = dir.write("map.tsv", "");
  std::vector<std::string> labels = {"toaster"};
  auto r = dx::map_labels(labels, mf, nullptr);
  CHECK(r.mapped.empty());
  CHECK(r.unmapped == std::vector<std::string>{"toaster"});
}

TEST_CASE("malformed mapfile") {
  dxt::TempDir dir;
  std::vector<std::string> labels = {"x"};
  CHECK_THROWS_AS(dx::map_labels(labels, dir.write("map.tsv", "only-one-field\n"), nullptr),
                  dx::ParseError);
}

TEST_CASE("mock service: order preserved, cache makes reruns offline") {
  MockService mock;
  dxt::TempDir dir;
  dx::ServiceConfig cfg;
  cfg.base_url = mock.url();
  dx::HttpAnnotationClient client(cfg);
  const auto cache = dir.file("cache.tsv");
  std::vector<std::string> labels = {"coffee maker", "nothing here"};

  auto first = dx::map_labels(labels, {}, &client, cache);
  REQUIRE(first.mapped.size() == 1);
  CHECK(first.mapped[0].source == dx::MappingSource::kService);
  CHECK(first.mapped[0].concepts == std::vector<std::string>{"http://dbpedia.org/resource/Coffeemaker",
                                                             "http://dbpedia.org/resource/Kitchen_appliance"});
  CHECK(first.unmapped == std::vector<std::string>{"nothing here"});
  CHECK(first.service_calls == 2);
  CHECK(mock.hits() == 2);

  auto second = dx::map_labels(labels, {}, &client, cache);
  CHECK(second.service_calls == 0);
  CHECK(mock.hits() == 2);
  CHECK(second.mapped.size() == 1);
  CHECK(second.mapped[0].concepts == first.mapped[0].concepts);
  CHECK(second.unmapped == first.unmapped);
}

TEST_CASE("service failures become warnings") {
  dxt::TempDir dir;
  {
    MockService mock;
    dx::ServiceConfig cfg;
    cfg.base_url = mock.url();
    dx::HttpAnnotationClient client(cfg);
    std::vector<std::string> labels = {"broken"};
    auto r = dx::map_labels(labels, {}, &client, dir.file("c.tsv"));
    CHECK(r.unmapped.size() == 1);
    CHECK(r.warnings.size() == 1);
  }
  dx::ServiceConfig cfg;
  cfg.base_url = "http://127.0.0.1:1";
  cfg.timeout = std::chrono::seconds(1);
  dx::HttpAnnotationClient client(cfg);
  std::vector<std::string> labels = {"coffee maker"};
  auto r = dx::map_labels(labels, {}, &client, dir.file("c2.tsv"));
  CHECK(r.unmapped.size() == 1);
  CHECK(r.warnings.size() == 1);
  CHECK_FALSE(std::filesystem::exists(dir.file("c2.tsv")));
}

TEST_CASE("annotate response parsing") {
  dx::ServiceConfig cfg;
  CHECK(dx::parse_annotation_response(R"({"@text":"x"})", cfg).empty());
  CHECK(dx::parse_annotation_response(R"({"Resources":[{"@URI":"a"},{"@URI":"b"}]})", cfg) ==
        std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(dx::parse_annotation_response("nope", cfg), dx::ServiceError);
}
