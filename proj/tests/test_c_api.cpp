#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "flatcircle/flatcircle.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  fc_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version") { CHECK(std::string(fc_version()) == "0.1.0"); }

TEST_CASE("explicit map") {
  fc_map* m = nullptr;
  REQUIRE(fc_map_create("0.2", "2", "0.3", 256, &m) == FC_OK);
  CHECK(std::string(fc_last_error()).empty());
  char* s = nullptr;
  REQUIRE(fc_map_forward(m, "0.1", &s) == FC_OK);
  CHECK(take(s).rfind("3.0000000", 0) == 0);
  REQUIRE(fc_map_forward(m, "0.6", &s) == FC_OK);
  CHECK(take(s).rfind("8.0000000", 0) == 0);
  REQUIRE(fc_map_omega(m, &s) == FC_OK);
  CHECK(take(s).rfind("3.0000000", 0) == 0);
  size_t count = 0;
  CHECK(fc_map_partial_quotients(m, nullptr, 0, &count) == FC_CONFIG_ERROR);
  fc_partition* p = nullptr;
  CHECK(fc_partition_build(m, 2, &p) == FC_CONFIG_ERROR);
  CHECK(fc_map_forward(m, "zero", &s) == FC_CONFIG_ERROR);
  CHECK_FALSE(std::string(fc_last_error()).empty());
  fc_map_destroy(m);
}

TEST_CASE("bad arguments") {
  fc_map* m = nullptr;
  CHECK(fc_map_create("0.2", "0.5", "0.3", 256, &m) == FC_CONFIG_ERROR);
  CHECK(m == nullptr);
  CHECK(fc_map_create("0.2", "2", "0.3", 16, &m) == FC_CONFIG_ERROR);
  CHECK(fc_map_create(nullptr, "2", "0.3", 256, &m) == FC_CONFIG_ERROR);
  CHECK(fc_map_tune("0.5", "2", "bronze", 256, &m) == FC_CONFIG_ERROR);
  CHECK(fc_run(nullptr, "{}", nullptr) == FC_CONFIG_ERROR);
  fc_map_destroy(nullptr);
  fc_partition_destroy(nullptr);
}

TEST_CASE("tuned map and partitions") {
  fc_map* m = nullptr;
  REQUIRE(fc_map_tune("0.5", "3", "golden", 512, &m) == FC_OK);
  size_t count = 0;
  REQUIRE(fc_map_partial_quotients(m, nullptr, 0, &count) == FC_OK);
  REQUIRE(count >= 12);
  std::vector<int64_t> a(count);
  REQUIRE(fc_map_partial_quotients(m, a.data(), a.size(), &count) == FC_OK);
  for (int64_t v : a) CHECK(v == 1);

  fc_partition* p = nullptr;
  REQUIRE(fc_partition_build(m, 3, &p) == FC_OK);
  size_t lng = 0, shrt = 0, pre = 0;
  REQUIRE(fc_partition_counts(p, &lng, &shrt, &pre) == FC_OK);
  CHECK(lng == 5);
  CHECK(shrt == 3);
  CHECK(pre == 8);
  char* csv = nullptr;
  REQUIRE(fc_partition_csv(p, &csv) == FC_OK);
  CHECK(take(csv).rfind("type,index,left,length\n", 0) == 0);
  fc_partition_destroy(p);

  CHECK(fc_partition_build(m, static_cast<int>(count), &p) == FC_PRECISION_EXHAUSTED);
  CHECK(std::string(fc_last_error()).find("partial quotients") != std::string::npos);
  fc_map_destroy(m);
}

TEST_CASE("run") {
  char* summary = nullptr;
  CHECK(fc_run("tune", R"({"l":"2","u":"0.05","precision_bits":256})", &summary) == FC_OK);
  CHECK(take(summary).find("PASS") != std::string::npos);
  CHECK(fc_run("cherry", R"({"l":"2"})", &summary) == FC_CONFIG_ERROR);
  CHECK(take(summary).find("ERROR") != std::string::npos);
  CHECK_FALSE(std::string(fc_last_error()).empty());
  CHECK(fc_run("tune", R"({"bogus":1})", nullptr) == FC_CONFIG_ERROR);
  CHECK(fc_run("verify", R"({"precision_bits":64,"n_max":12})", nullptr) == FC_PRECISION_EXHAUSTED);
}
