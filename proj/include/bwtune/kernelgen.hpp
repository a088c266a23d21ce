#pragma once

#include <span>
#include <string>
#include <vector>

#include "bwtune/configspace.hpp"

namespace bwtune {

enum class OpKind { Copy, Axpby, Dot, Gemv };

enum class Precision { fp64, fp32 };

// One benchmark operation instance. Operand roles are fixed per kind:
// Copy x<-y, Axpby x<-alpha*y+beta*z, Dot alpha<-<x,y>, Gemv x<-A*y.
struct Operation {
  OpKind kind = OpKind::Copy;
  uint64_t n = 1;       // vector length; Gemv column count
  uint64_t m = 1;       // Gemv row count, unused otherwise
  double alpha = 2.0;   // Axpby only, must be nonzero
  double beta = 3.0;    // Axpby only, must be nonzero
};

std::string to_string(OpKind kind);
OpKind parse_op_kind(std::string_view text);
std::string to_string(Precision prec);
Precision parse_precision(std::string_view text);

void validate_operation(const Operation& op);

// Generated OpenCL C translation unit plus the structural metadata the
// simulated backend and the sweep driver need.
struct KernelSource {
  std::string entry_point_name;
  std::string source_text;
  uint64_t scratch_bytes = 0;  // local memory per workgroup: 8*local (Dot/Gemv), else 0

  OpKind kind = OpKind::Copy;
  KernelConfig config;
  Precision precision = Precision::fp64;
  uint64_t n = 0;
  uint64_t m = 0;
};

std::string entry_point_name(OpKind kind, const KernelConfig& config);

// Emits the OpenCL C source for (op, config). Requires n divisible by the
// vector width; no scalar tail code is generated.
KernelSource generate(const Operation& op, const KernelConfig& config,
                      Precision precision = Precision::fp64);

// Deterministic ascending-index sum of the per-workgroup dot partials.
double host_finalize_dot(std::span<const double> partials);

// Host-side operand storage. All buffers are held as double; fp32 runs
// cast on load and store so values stay representable exactly.
struct OperandData {
  std::vector<double> x;         // output vector (input for Dot)
  std::vector<double> y;
  std::vector<double> z;         // Axpby only
  std::vector<double> a;         // Gemv matrix, row-major m x n
  std::vector<double> partials;  // Dot output, one per workgroup
};

// Reference result of the sequential host-side computation, with the
// absolute term sums used to scale accumulation-order error bounds.
struct OracleOutput {
  std::vector<double> x;             // Copy/Axpby/Gemv result
  double dot = 0.0;                  // Dot result
  double dot_abs_sum = 0.0;          // sum |x_i * y_i|
  std::vector<double> row_abs_sums;  // Gemv: per-row sum |A_rj * y_j|
};

// Sequential left-to-right reference computation in the given precision.
OracleOutput oracle(const Operation& op, Precision precision, const OperandData& data);

}  // namespace bwtune
