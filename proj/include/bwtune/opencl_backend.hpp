#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bwtune/backend.hpp"

namespace bwtune {

struct OpenCLDeviceInfo {
  std::string platform_name;
  std::string device_name;
  DeviceClass device_class = DeviceClass::GPU;
  uint32_t max_local_size = 0;
  uint64_t local_mem_bytes = 0;
  bool supports_fp64 = false;
};

// Devices visible through the installed ICD loaders.
std::vector<OpenCLDeviceInfo> list_opencl_devices();

// Real-runtime adapter: in-order queue, device profiling events for the
// timed region. The peak bandwidth in `spec` stays user-supplied; the
// runtime exposes no such figure.
class OpenCLBackend : public Backend {
 public:
  // Binds to the first device whose name contains spec.name (case
  // sensitive substring match).
  explicit OpenCLBackend(const DeviceSpec& spec);
  ~OpenCLBackend() override;

  OpenCLBackend(const OpenCLBackend&) = delete;
  OpenCLBackend& operator=(const OpenCLBackend&) = delete;

  std::string device_name() const override;
  const DeviceSpec& device() const override;

  std::unique_ptr<ProgramHandle> compile(const KernelSource& source) override;
  double execute(ProgramHandle& handle, const LaunchPlan& plan,
                 OperandData& data) override;
  double execute_timed(ProgramHandle& handle, const LaunchPlan& plan,
                       OperandData& data) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// False when the project was built without an OpenCL SDK.
bool opencl_available();

}  // namespace bwtune
