#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "bwtune/configspace.hpp"
#include "bwtune/kernelgen.hpp"

namespace bwtune {

struct CompileError : std::runtime_error {
  explicit CompileError(const std::string& diagnostics)
      : std::runtime_error("kernel compilation failed:\n" + diagnostics) {}
};

struct Fp64Unsupported : std::runtime_error {
  explicit Fp64Unsupported(const std::string& device)
      : std::runtime_error("device '" + device + "' does not support fp64") {}
};

struct LaunchError : std::runtime_error {
  explicit LaunchError(const std::string& why)
      : std::runtime_error("kernel launch rejected: " + why) {}
};

struct OutOfResources : std::runtime_error {
  explicit OutOfResources(const std::string& why)
      : std::runtime_error("out of device resources: " + why) {}
};

struct DeviceLost : std::runtime_error {
  explicit DeviceLost(const std::string& why)
      : std::runtime_error("device lost: " + why) {}
};

// Work sizes and argument bindings for one launch. Operand buffers live
// in an OperandData owned by the caller; scalar arguments and the scratch
// allocation come from the kernel metadata.
struct LaunchPlan {
  std::string entry_point;
  uint64_t global_size = 0;
  uint64_t local_size = 0;
  uint64_t scratch_bytes = 0;
  double alpha = 0.0;
  double beta = 0.0;
};

LaunchPlan make_launch_plan(const KernelSource& kernel, double alpha = 0.0,
                            double beta = 0.0);

class ProgramHandle {
 public:
  virtual ~ProgramHandle() = default;
};

// Uniform execution surface shared by the real OpenCL adapter and the
// deterministic simulated device.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string device_name() const = 0;
  virtual const DeviceSpec& device() const = 0;

  virtual std::unique_ptr<ProgramHandle> compile(const KernelSource& source) = 0;

  // Runs the kernel and fills the output operands; returns elapsed seconds.
  virtual double execute(ProgramHandle& handle, const LaunchPlan& plan,
                         OperandData& data) = 0;

  // Timing-only launch: outputs are not read back (real adapter) or not
  // recomputed (simulated adapter). Returns elapsed seconds.
  virtual double execute_timed(ProgramHandle& handle, const LaunchPlan& plan,
                               OperandData& data) = 0;
};

}  // namespace bwtune
