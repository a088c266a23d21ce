#include <doctest.h>

#include <algorithm>
#include <set>

#include "bwtune/configspace.hpp"

using namespace bwtune;

TEST_CASE("enumeration cardinality") {
  CHECK(enumerate(512).size() == 1900);
  CHECK(enumerate(256).size() == 1710);  // one local-size bucket dropped
  CHECK(enumerate(1024).size() == 1900);

  const auto tiny = enumerate(1);
  CHECK(tiny.size() == 190);
  CHECK(std::all_of(tiny.begin(), tiny.end(),
                    [](const KernelConfig& c) { return c.local_size == 1; }));

  CHECK_THROWS_AS(enumerate(0), std::invalid_argument);
}

TEST_CASE("enumeration is canonical, unique and deterministic") {
  const auto configs = enumerate(512);
  CHECK(std::is_sorted(configs.begin(), configs.end(), config_less));
  CHECK(configs == enumerate(512));
  CHECK(configs.front().increment == IncrementType::Global);

  std::set<std::string> keys;
  for (const KernelConfig& c : configs) {
    CHECK(is_admissible_config(c));
    CHECK(c.global_size() == uint64_t{c.local_size} * c.num_workgroups);
    keys.insert(config_id(c));
  }
  CHECK(keys.size() == configs.size());  // distinct configs, distinct keys
}

TEST_CASE("admissible workgroup counts") {
  const auto& counts = admissible_workgroup_counts();
  CHECK(counts.size() == 19);
  CHECK(counts.front() == 1);
  CHECK(counts.back() == 1024);
  CHECK(std::count(counts.begin(), counts.end(), 384) == 1);
  CHECK(std::count(counts.begin(), counts.end(), 768) == 0);
  CHECK(std::is_sorted(counts.begin(), counts.end()));
}

TEST_CASE("config id formatting and parsing") {
  CHECK(config_id({IncrementType::Global, 1, 128, 80}) == "g/v1/l128/w80");

  const KernelConfig parsed = parse_config_id("l/v16/l1/w512");
  CHECK(parsed.increment == IncrementType::Local);
  CHECK(parsed.vector_width == 16);
  CHECK(parsed.local_size == 1);
  CHECK(parsed.num_workgroups == 512);

  CHECK_THROWS_AS(parse_config_id("g/v3/l128/w80"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_id("g/v4/l3/w80"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_id("g/v4/l128/w77"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_id("x/v4/l128/w80"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_id("g/v4/l128"), std::invalid_argument);
}

TEST_CASE("config id round-trips for the full space") {
  for (const KernelConfig& c : enumerate(512)) {
    CHECK(parse_config_id(config_id(c)) == c);
  }
}

TEST_CASE("device spec line parsing") {
  const DeviceSpec spec = parse_device_line("Radeon Something | gpu | 256 | 128.0 | fp64");
  CHECK(spec.name == "Radeon Something");
  CHECK(spec.device_class == DeviceClass::GPU);
  CHECK(spec.max_local_size == 256);
  CHECK(spec.peak_bandwidth == doctest::Approx(128.0e9));
  CHECK(spec.supports_fp64);

  CHECK_THROWS(parse_device_line("name, with comma | gpu | 256 | 128 | fp64"));
  CHECK_THROWS(parse_device_line("dev | blimp | 256 | 128 | fp64"));
  CHECK_THROWS(parse_device_line("dev | gpu | 256 | -1 | fp64"));
  CHECK_THROWS(parse_device_line("dev | gpu | 256 | 128 | maybe"));
  CHECK_THROWS(parse_device_line("dev | gpu | 256 | 128"));
}
