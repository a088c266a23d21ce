#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bwtune/backend.hpp"
#include "bwtune/configspace.hpp"
#include "bwtune/kernelgen.hpp"

namespace bwtune {

// One (device, operation, config) measurement.
struct BenchmarkRecord {
  std::string device_name;
  OpKind op_kind = OpKind::Copy;
  uint64_t n = 0;
  uint64_t m = 0;
  KernelConfig config;
  uint64_t bytes_moved = 0;
  double elapsed = 0.0;      // seconds, median over repetitions
  double bandwidth = 0.0;    // bytes/second
  double relative_bw = 0.0;  // bandwidth / device peak
  bool verified = false;
  uint32_t repetitions = 0;
  int64_t timestamp = 0;     // unix seconds, UTC
  std::string error_note;

  bool operator==(const BenchmarkRecord&) const = default;
};

struct ResultSet {
  std::vector<BenchmarkRecord> records;
  std::string provenance;
};

// Minimum-bytes accounting: Copy 2n, Axpby 3n, Dot 2n elements; Gemv
// m*n + n + m (matrix once, rhs once under perfect caching, result once).
// Scalars and dot partials are uncounted.
uint64_t bytes_moved(const Operation& op, Precision precision = Precision::fp64);

struct SweepPlan {
  DeviceSpec device;
  Operation op;
  Precision precision = Precision::fp64;
  std::vector<KernelConfig> configs;
  uint32_t repetitions = 5;  // odd, >= 3
  uint32_t warmup_runs = 2;  // >= 1
  uint64_t verify_seed = 0x5eed0f42u;
};

// Paper-default problem sizes: n = 2e6 vectors, 2048 x 2048 gemv.
Operation default_problem(OpKind kind);

// Generates, compiles, verifies against the oracle, times each config and
// converts to bandwidth. Per-config failures are recorded (verified =
// false, error note) and never abort the sweep; only DeviceLost escapes.
ResultSet run_sweep(const SweepPlan& plan, Backend& backend);

// Deterministic uniform [-1, 1] operand fill used for verification.
OperandData make_verification_inputs(const Operation& op, uint64_t seed);

// Comparison against the oracle with accumulation-order-aware tolerances:
// exact for Copy/Axpby; |delta| <= tol * max(|ref|, sum|terms|) for
// Dot/Gemv. Returns an empty string on success, else a description.
std::string compare_with_oracle(const Operation& op, const OperandData& outputs,
                                const OracleOutput& reference, double tolerance);

}  // namespace bwtune
