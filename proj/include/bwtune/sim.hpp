#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bwtune/backend.hpp"

namespace bwtune {

// Multiplicative bandwidth model for a simulated device. The factor
// tables are artifact inventions shaped after common CPU/GPU behavior;
// they are not measurements of any real device.
struct SimDeviceModel {
  DeviceSpec base;
  std::map<uint32_t, double> width_efficiency;       // vector_width -> (0,1]
  std::map<IncrementType, double> increment_affinity;
  std::map<uint32_t, double> local_size_factor;      // occupancy, local part
  std::map<uint32_t, double> workgroup_factor;       // occupancy, workgroup part
  uint64_t noise_seed = 0;                           // 0 = noiseless
  double noise_amplitude = 0.0;                      // relative, [0, 0.05]
  uint64_t local_mem_bytes = 32 * 1024;

  double occupancy(uint32_t local_size, uint32_t num_workgroups) const;
};

void validate_sim_model(const SimDeviceModel& model);

// peak * width * increment * occupancy * noise, clamped to peak.
// Deterministic for a fixed (seed, config).
double predicted_bandwidth(const SimDeviceModel& model, const KernelConfig& config);

// Same text format as device spec files plus factor table lines; see
// data/profiles for the bundled examples.
SimDeviceModel parse_sim_model(const std::string& text, const std::string& origin);
SimDeviceModel load_sim_model(const std::string& path);

// Bundled "gpu-like" and "cpu-like" profiles (synthetic).
const std::vector<std::string>& builtin_sim_profile_names();
SimDeviceModel builtin_sim_profile(const std::string& name);

// Resolves "sim:gpu-like" style backend choices: builtin name first,
// then a profile file path.
SimDeviceModel resolve_sim_profile(const std::string& name_or_path);

// Per-wide-element access counts recorded by the interpreter.
struct TouchRecorder {
  std::vector<uint32_t> x_reads, y_reads, z_reads, a_reads;
  std::vector<uint32_t> x_writes, partial_writes;
};

// Executes the generated kernel's access pattern on the host, work item
// by work item, reproducing its arithmetic structure (per-lane
// accumulation, horizontal sum, local-memory tree reduction).
void interpret_kernel(const KernelSource& kernel, const LaunchPlan& plan,
                      OperandData& data, TouchRecorder* touches = nullptr);

class SimBackend : public Backend {
 public:
  explicit SimBackend(SimDeviceModel model);

  std::string device_name() const override { return model_.base.name; }
  const DeviceSpec& device() const override { return model_.base; }
  const SimDeviceModel& model() const { return model_; }

  std::unique_ptr<ProgramHandle> compile(const KernelSource& source) override;
  double execute(ProgramHandle& handle, const LaunchPlan& plan,
                 OperandData& data) override;
  double execute_timed(ProgramHandle& handle, const LaunchPlan& plan,
                       OperandData& data) override;

 private:
  double modeled_elapsed(const KernelSource& kernel) const;
  void validate_launch(const KernelSource& kernel, const LaunchPlan& plan) const;

  SimDeviceModel model_;
};

}  // namespace bwtune
