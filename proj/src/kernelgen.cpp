#include "bwtune/kernelgen.hpp"

#include <sstream>
#include <stdexcept>

namespace bwtune {

std::string to_string(OpKind kind) {
  switch (kind) {
    case OpKind::Copy: return "copy";
    case OpKind::Axpby: return "axpby";
    case OpKind::Dot: return "dot";
    case OpKind::Gemv: return "gemv";
  }
  return "unknown";
}

OpKind parse_op_kind(std::string_view text) {
  if (text == "copy") return OpKind::Copy;
  if (text == "axpby") return OpKind::Axpby;
  if (text == "dot") return OpKind::Dot;
  if (text == "gemv") return OpKind::Gemv;
  throw std::invalid_argument("unknown operation '" + std::string(text) + "'");
}

std::string to_string(Precision prec) {
  return prec == Precision::fp64 ? "fp64" : "fp32";
}

Precision parse_precision(std::string_view text) {
  if (text == "fp64") return Precision::fp64;
  if (text == "fp32") return Precision::fp32;
  throw std::invalid_argument("unknown precision '" + std::string(text) + "'");
}

void validate_operation(const Operation& op) {
  if (op.n < 1) throw std::invalid_argument("operation needs n >= 1");
  if (op.kind == OpKind::Gemv && op.m < 1)
    throw std::invalid_argument("gemv needs m >= 1");
  if (op.kind == OpKind::Axpby && (op.alpha == 0.0 || op.beta == 0.0))
    throw std::invalid_argument("axpby needs alpha != 0 and beta != 0");
}

std::string entry_point_name(OpKind kind, const KernelConfig& config) {
  std::string name = to_string(kind) + "_" + config_id(config);
  for (char& c : name)
    if (c == '/') c = '_';
  return name;
}

namespace {

std::string scalar_type(Precision prec) {
  return prec == Precision::fp64 ? "double" : "float";
}

std::string wide_type(Precision prec, uint32_t width) {
  std::string base = scalar_type(prec);
  return width == 1 ? base : base + std::to_string(width);
}

// Left-to-right horizontal sum of a wide accumulator, e.g.
// "acc.s0 + acc.s1 + acc.s2 + acc.s3".
std::string horizontal_sum(const std::string& var, uint32_t width) {
  if (width == 1) return var;
  static const char digits[] = "0123456789abcdef";
  std::string expr;
  for (uint32_t lane = 0; lane < width; ++lane) {
    if (lane) expr += " + ";
    expr += var + ".s" + digits[lane];
  }
  return expr;
}

// Loop header lines for the two increment variants over [0, n) wide
// elements. The local variant partitions the range into per-workgroup
// blocks aligned to the local work size; the last group absorbs the
// remainder.
void emit_range_loop(std::ostream& out, IncrementType inc, uint32_t local_size,
                     const std::string& body_indent, const std::string& body) {
  if (inc == IncrementType::Global) {
    out << body_indent << "for (uint i = (uint)get_global_id(0); i < n; "
        << "i += (uint)get_global_size(0))\n";
    out << body_indent << "  " << body << "\n";
  } else {
    out << body_indent << "const uint wg = (uint)get_num_groups(0);\n";
    out << body_indent << "const uint block = ((n + wg - 1u) / wg + " << local_size
        << "u - 1u) / " << local_size << "u * " << local_size << "u;\n";
    out << body_indent << "const uint begin = (uint)get_group_id(0) * block;\n";
    out << body_indent << "uint end = begin + block;\n";
    out << body_indent
        << "if (end > n || (uint)get_group_id(0) == wg - 1u) end = n;\n";
    out << body_indent << "for (uint i = begin + (uint)get_local_id(0); i < end; i += "
        << local_size << "u)\n";
    out << body_indent << "  " << body << "\n";
  }
}

void emit_tree_reduction(std::ostream& out, uint32_t local_size,
                         const std::string& scalar) {
  out << "  scratch[lid] = " << scalar << ";\n";
  out << "  barrier(CLK_LOCAL_MEM_FENCE);\n";
  if (local_size > 1) {
    out << "  for (uint s = " << local_size / 2 << "u; s > 0u; s >>= 1) {\n";
    out << "    if (lid < s) scratch[lid] += scratch[lid + s];\n";
    out << "    barrier(CLK_LOCAL_MEM_FENCE);\n";
    out << "  }\n";
  }
}

}  // namespace

KernelSource generate(const Operation& op, const KernelConfig& config,
                      Precision precision) {
  validate_operation(op);
  if (!is_admissible_config(config))
    throw std::invalid_argument("inadmissible kernel config " + config_id(config));
  if (op.n % config.vector_width != 0) {
    throw std::invalid_argument(
        "n = " + std::to_string(op.n) + " not divisible by vector width " +
        std::to_string(config.vector_width) + " (no tail code is generated)");
  }

  const std::string st = scalar_type(precision);
  const std::string wt = wide_type(precision, config.vector_width);
  const std::string name = entry_point_name(op.kind, config);
  const uint32_t local = config.local_size;

  std::ostringstream src;
  if (precision == Precision::fp64)
    src << "#pragma OPENCL EXTENSION cl_khr_fp64 : enable\n\n";

  switch (op.kind) {
    case OpKind::Copy: {
      src << "__kernel void " << name << "(\n"
          << "    __global const " << wt << "* restrict y,\n"
          << "    __global " << wt << "* restrict x,\n"
          << "    const uint n)\n{\n";
      emit_range_loop(src, config.increment, local, "  ", "x[i] = y[i];");
      src << "}\n";
      break;
    }
    case OpKind::Axpby: {
      src << "__kernel void " << name << "(\n"
          << "    __global const " << wt << "* restrict y,\n"
          << "    __global const " << wt << "* restrict z,\n"
          << "    __global " << wt << "* restrict x,\n"
          << "    const " << st << " alpha,\n"
          << "    const " << st << " beta,\n"
          << "    const uint n)\n{\n";
      emit_range_loop(src, config.increment, local, "  ",
                      "x[i] = alpha * y[i] + beta * z[i];");
      src << "}\n";
      break;
    }
    case OpKind::Dot: {
      src << "__kernel void " << name << "(\n"
          << "    __global const " << wt << "* restrict x,\n"
          << "    __global const " << wt << "* restrict y,\n"
          << "    __global " << st << "* restrict partials,\n"
          << "    const uint n)\n{\n";
      src << "  __local " << st << " scratch[" << local << "];\n";
      src << "  const uint lid = (uint)get_local_id(0);\n";
      src << "  " << wt << " acc = (" << wt << ")(0);\n";
      emit_range_loop(src, config.increment, local, "  ", "acc += x[i] * y[i];");
      emit_tree_reduction(src, local, horizontal_sum("acc", config.vector_width));
      src << "  if (lid == 0u) partials[get_group_id(0)] = scratch[0];\n";
      src << "}\n";
      break;
    }
    case OpKind::Gemv: {
      // Workgroups cycle over rows (row, row + num_groups, ...); within a
      // row the increment type picks interleaved or per-item contiguous
      // traversal of the row.
      src << "__kernel void " << name << "(\n"
          << "    __global const " << wt << "* restrict a,\n"
          << "    __global const " << wt << "* restrict y,\n"
          << "    __global " << st << "* restrict x,\n"
          << "    const uint m,\n"
          << "    const uint n)\n{\n";
      src << "  __local " << st << " scratch[" << local << "];\n";
      src << "  const uint lid = (uint)get_local_id(0);\n";
      src << "  for (uint row = (uint)get_group_id(0); row < m; "
          << "row += (uint)get_num_groups(0)) {\n";
      src << "    " << wt << " acc = (" << wt << ")(0);\n";
      if (config.increment == IncrementType::Global) {
        src << "    for (uint i = lid; i < n; i += " << local << "u)\n";
        src << "      acc += a[row * n + i] * y[i];\n";
      } else {
        src << "    const uint chunk = (n + " << local << "u - 1u) / " << local
            << "u;\n";
        src << "    const uint begin = lid * chunk;\n";
        src << "    const uint end = min(begin + chunk, n);\n";
        src << "    for (uint i = begin; i < end; ++i)\n";
        src << "      acc += a[row * n + i] * y[i];\n";
      }
      std::ostringstream red;
      emit_tree_reduction(red, local, horizontal_sum("acc", config.vector_width));
      // shift the reduction two spaces right, inside the row loop
      std::istringstream lines(red.str());
      for (std::string line; std::getline(lines, line);) src << "  " << line << "\n";
      src << "    if (lid == 0u) x[row] = scratch[0];\n";
      src << "    barrier(CLK_LOCAL_MEM_FENCE);\n";
      src << "  }\n";
      src << "}\n";
      break;
    }
  }

  KernelSource out;
  out.entry_point_name = name;
  out.source_text = src.str();
  const uint64_t elem = precision == Precision::fp64 ? 8 : 4;
  out.scratch_bytes =
      (op.kind == OpKind::Dot || op.kind == OpKind::Gemv) ? elem * local : 0;
  out.kind = op.kind;
  out.config = config;
  out.precision = precision;
  out.n = op.n;
  out.m = op.kind == OpKind::Gemv ? op.m : 0;
  return out;
}

double host_finalize_dot(std::span<const double> partials) {
  double sum = 0.0;
  for (double p : partials) sum += p;
  return sum;
}

namespace {

template <typename T>
OracleOutput oracle_impl(const Operation& op, const OperandData& data) {
  OracleOutput out;
  switch (op.kind) {
    case OpKind::Copy: {
      if (data.y.size() != op.n) throw std::invalid_argument("copy: |y| != n");
      out.x.resize(op.n);
      for (uint64_t i = 0; i < op.n; ++i) out.x[i] = static_cast<T>(data.y[i]);
      break;
    }
    case OpKind::Axpby: {
      if (data.y.size() != op.n || data.z.size() != op.n)
        throw std::invalid_argument("axpby: operand sizes != n");
      out.x.resize(op.n);
      const T alpha = static_cast<T>(op.alpha);
      const T beta = static_cast<T>(op.beta);
      for (uint64_t i = 0; i < op.n; ++i) {
        out.x[i] = alpha * static_cast<T>(data.y[i]) + beta * static_cast<T>(data.z[i]);
      }
      break;
    }
    case OpKind::Dot: {
      if (data.x.size() != op.n || data.y.size() != op.n)
        throw std::invalid_argument("dot: operand sizes != n");
      T acc = 0;
      T abs_acc = 0;
      for (uint64_t i = 0; i < op.n; ++i) {
        const T term = static_cast<T>(data.x[i]) * static_cast<T>(data.y[i]);
        acc += term;
        abs_acc += term < 0 ? -term : term;
      }
      out.dot = acc;
      out.dot_abs_sum = abs_acc;
      break;
    }
    case OpKind::Gemv: {
      if (data.a.size() != op.m * op.n || data.y.size() != op.n)
        throw std::invalid_argument("gemv: operand sizes mismatch m x n");
      out.x.resize(op.m);
      out.row_abs_sums.resize(op.m);
      for (uint64_t r = 0; r < op.m; ++r) {
        T acc = 0;
        T abs_acc = 0;
        for (uint64_t j = 0; j < op.n; ++j) {
          const T term =
              static_cast<T>(data.a[r * op.n + j]) * static_cast<T>(data.y[j]);
          acc += term;
          abs_acc += term < 0 ? -term : term;
        }
        out.x[r] = acc;
        out.row_abs_sums[r] = abs_acc;
      }
      break;
    }
  }
  return out;
}

}  // namespace

OracleOutput oracle(const Operation& op, Precision precision, const OperandData& data) {
  validate_operation(op);
  return precision == Precision::fp64 ? oracle_impl<double>(op, data)
                                      : oracle_impl<float>(op, data);
}

}  // namespace bwtune
