#include "bwtune/configspace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace bwtune {

namespace {

uint32_t parse_u32(std::string_view text, std::string_view what) {
  uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("malformed " + std::string(what) + ": '" +
                                std::string(text) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

const std::vector<uint32_t>& admissible_workgroup_counts() {
  static const std::vector<uint32_t> counts = {
      1, 2, 4, 8, 16, 32, 48, 64, 80, 96, 112, 128, 160, 192, 224, 256, 384, 512, 1024};
  return counts;
}

const std::vector<uint32_t>& admissible_vector_widths() {
  static const std::vector<uint32_t> widths = {1, 2, 4, 8, 16};
  return widths;
}

const std::vector<uint32_t>& admissible_local_sizes() {
  static const std::vector<uint32_t> sizes = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512};
  return sizes;
}

namespace {

template <typename T>
bool contains(const std::vector<T>& values, T v) {
  return std::find(values.begin(), values.end(), v) != values.end();
}

}  // namespace

bool is_admissible_config(const KernelConfig& config) {
  return contains(admissible_vector_widths(), config.vector_width) &&
         contains(admissible_local_sizes(), config.local_size) &&
         contains(admissible_workgroup_counts(), config.num_workgroups);
}

bool config_less(const KernelConfig& a, const KernelConfig& b) {
  return std::make_tuple(static_cast<int>(a.increment), a.vector_width, a.local_size,
                         a.num_workgroups) <
         std::make_tuple(static_cast<int>(b.increment), b.vector_width, b.local_size,
                         b.num_workgroups);
}

std::vector<KernelConfig> enumerate(uint32_t max_local_size) {
  if (max_local_size < 1) throw std::invalid_argument("max_local_size must be >= 1");
  std::vector<KernelConfig> configs;
  for (IncrementType inc : {IncrementType::Global, IncrementType::Local}) {
    for (uint32_t width : admissible_vector_widths()) {
      for (uint32_t local : admissible_local_sizes()) {
        if (local > max_local_size) continue;
        for (uint32_t groups : admissible_workgroup_counts()) {
          configs.push_back({inc, width, local, groups});
        }
      }
    }
  }
  return configs;
}

std::string config_id(const KernelConfig& config) {
  std::string key;
  key += config.increment == IncrementType::Global ? 'g' : 'l';
  key += "/v" + std::to_string(config.vector_width);
  key += "/l" + std::to_string(config.local_size);
  key += "/w" + std::to_string(config.num_workgroups);
  return key;
}

KernelConfig parse_config_id(std::string_view key) {
  auto fail = [&](const std::string& why) -> void {
    throw std::invalid_argument("bad config id '" + std::string(key) + "': " + why);
  };

  std::vector<std::string_view> parts;
  size_t start = 0;
  for (size_t pos = 0; pos <= key.size(); ++pos) {
    if (pos == key.size() || key[pos] == '/') {
      parts.push_back(key.substr(start, pos - start));
      start = pos + 1;
    }
  }
  if (parts.size() != 4) fail("expected 4 '/'-separated fields");

  KernelConfig config;
  if (parts[0] == "g")
    config.increment = IncrementType::Global;
  else if (parts[0] == "l")
    config.increment = IncrementType::Local;
  else
    fail("increment must be 'g' or 'l'");

  auto field = [&](std::string_view part, char tag) -> uint32_t {
    if (part.size() < 2 || part[0] != tag)
      fail(std::string("expected '") + tag + "<count>' field");
    return parse_u32(part.substr(1), "count");
  };
  config.vector_width = field(parts[1], 'v');
  config.local_size = field(parts[2], 'l');
  config.num_workgroups = field(parts[3], 'w');

  if (!contains(admissible_vector_widths(), config.vector_width))
    fail("vector width " + std::to_string(config.vector_width) + " not admissible");
  if (!contains(admissible_local_sizes(), config.local_size))
    fail("local size " + std::to_string(config.local_size) + " not admissible");
  if (!contains(admissible_workgroup_counts(), config.num_workgroups))
    fail("workgroup count " + std::to_string(config.num_workgroups) + " not admissible");
  return config;
}

std::string to_string(IncrementType inc) {
  return inc == IncrementType::Global ? "global" : "local";
}

std::string to_string(DeviceClass cls) {
  switch (cls) {
    case DeviceClass::CPU: return "cpu";
    case DeviceClass::GPU: return "gpu";
    case DeviceClass::Accelerator: return "accelerator";
  }
  return "unknown";
}

DeviceClass parse_device_class(std::string_view text) {
  if (text == "cpu" || text == "CPU") return DeviceClass::CPU;
  if (text == "gpu" || text == "GPU") return DeviceClass::GPU;
  if (text == "accelerator" || text == "Accelerator") return DeviceClass::Accelerator;
  throw std::invalid_argument("unknown device class '" + std::string(text) + "'");
}

DeviceSpec parse_device_line(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  for (size_t pos = 0; pos <= line.size(); ++pos) {
    if (pos == line.size() || line[pos] == '|') {
      fields.push_back(trim(line.substr(start, pos - start)));
      start = pos + 1;
    }
  }
  if (fields.size() != 5) {
    throw std::invalid_argument(
        "device record needs 5 '|'-separated fields "
        "(name | class | max_local_size | peak GB/s | fp64): '" +
        std::string(line) + "'");
  }
  DeviceSpec spec;
  spec.name = std::string(fields[0]);
  if (spec.name.empty() || spec.name.find(',') != std::string::npos)
    throw std::invalid_argument("device name must be nonempty and comma-free");
  spec.device_class = parse_device_class(fields[1]);
  spec.max_local_size = parse_u32(fields[2], "max_local_size");
  if (spec.max_local_size < 1)
    throw std::invalid_argument("max_local_size must be >= 1");
  double gbs = std::stod(std::string(fields[3]));
  if (!(gbs > 0)) throw std::invalid_argument("peak bandwidth must be positive");
  spec.peak_bandwidth = gbs * 1e9;
  if (fields[4] == "fp64")
    spec.supports_fp64 = true;
  else if (fields[4] == "fp32")
    spec.supports_fp64 = false;
  else
    throw std::invalid_argument("fp64 flag must be 'fp64' or 'fp32'");
  return spec;
}

std::vector<DeviceSpec> load_device_specs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open device spec file '" + path + "'");
  std::vector<DeviceSpec> specs;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    specs.push_back(parse_device_line(view));
  }
  return specs;
}

}  // namespace bwtune
