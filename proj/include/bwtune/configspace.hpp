#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bwtune {

// How a work item's loop index advances through the element range:
// Global strides by the global work size (interleaved), Local strides by
// the local work size within a contiguous per-workgroup block.
enum class IncrementType { Global, Local };

enum class DeviceClass { CPU, GPU, Accelerator };

// One point of the tuning space: (increment, vector width, local work
// size, workgroup count). The global work size is always derived as
// local_size * num_workgroups and never stored.
struct KernelConfig {
  IncrementType increment = IncrementType::Global;
  uint32_t vector_width = 1;    // elements per memory access: 1,2,4,8,16
  uint32_t local_size = 1;      // work items per workgroup, power of two <= 512
  uint32_t num_workgroups = 1;  // one of the 19 admissible counts

  uint64_t global_size() const {
    return static_cast<uint64_t>(local_size) * num_workgroups;
  }

  bool operator==(const KernelConfig&) const = default;
};

// Strict-weak canonical order: increment (Global first), then vector
// width, local size and workgroup count, each ascending.
bool config_less(const KernelConfig& a, const KernelConfig& b);

struct DeviceSpec {
  std::string name;
  DeviceClass device_class = DeviceClass::GPU;
  uint32_t max_local_size = 512;
  double peak_bandwidth = 0.0;  // bytes/second, theoretical, user-supplied
  bool supports_fp64 = true;
};

// The 19 admissible workgroup counts: powers of two up to 1024 plus the
// multiples-of-16 supplements, sorted ascending.
const std::vector<uint32_t>& admissible_workgroup_counts();
const std::vector<uint32_t>& admissible_vector_widths();
const std::vector<uint32_t>& admissible_local_sizes();

bool is_admissible_config(const KernelConfig& config);

// Every admissible config with local_size <= max_local_size, in canonical
// order. Whole local-size buckets are dropped, never clamped.
std::vector<KernelConfig> enumerate(uint32_t max_local_size);

// Canonical key, e.g. "g/v4/l128/w80". Distinct configs map to distinct
// keys and round-trip through parse_config_id.
std::string config_id(const KernelConfig& config);
KernelConfig parse_config_id(std::string_view key);

std::string to_string(IncrementType inc);
std::string to_string(DeviceClass cls);
DeviceClass parse_device_class(std::string_view text);

// Loads device records from a text file: one '|'-separated record per
// line (name | class | max_local_size | peak GB/s | fp64), '#' comments.
std::vector<DeviceSpec> load_device_specs(const std::string& path);
DeviceSpec parse_device_line(std::string_view line);

}  // namespace bwtune
