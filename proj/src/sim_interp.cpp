#include <array>
#include <stdexcept>
#include <vector>

#include "bwtune/sim.hpp"

namespace bwtune {

namespace {

struct WideRange {
  uint64_t begin = 0;
  uint64_t end = 0;    // exclusive
  uint64_t stride = 1;
};

// Per-(group, work item) index stream over [0, nw) wide elements,
// matching the generated loop headers.
WideRange item_range(const KernelConfig& config, uint64_t nw, uint64_t group,
                     uint64_t lid) {
  const uint64_t groups = config.num_workgroups;
  const uint64_t local = config.local_size;
  WideRange r;
  if (config.increment == IncrementType::Global) {
    r.begin = group * local + lid;
    r.end = nw;
    r.stride = groups * local;
  } else {
    const uint64_t block = ((nw + groups - 1) / groups + local - 1) / local * local;
    const uint64_t begin = group * block;
    uint64_t end = begin + block;
    if (end > nw || group == groups - 1) end = nw;
    r.begin = begin + lid;
    r.end = end;
    r.stride = local;
  }
  return r;
}

void bump(std::vector<uint32_t>* counts, uint64_t index) {
  if (counts) ++(*counts)[index];
}

template <typename T>
T cast(double v) {
  return static_cast<T>(v);
}

// Horizontal lane sum in the emitted "s0 + s1 + ..." order.
template <typename T>
T lane_sum(const std::array<T, 16>& lanes, uint32_t width) {
  T sum = lanes[0];
  for (uint32_t lane = 1; lane < width; ++lane) sum += lanes[lane];
  return sum;
}

// In-place power-of-two tree reduction over the scratch slots.
template <typename T>
void tree_reduce(std::vector<T>& scratch) {
  for (size_t step = scratch.size() / 2; step > 0; step >>= 1)
    for (size_t lid = 0; lid < step; ++lid) scratch[lid] += scratch[lid + step];
}

template <typename T>
void run_copy(const KernelSource& kernel, OperandData& data, TouchRecorder* touches) {
  const KernelConfig& config = kernel.config;
  const uint32_t vw = config.vector_width;
  const uint64_t nw = kernel.n / vw;

  data.x.assign(kernel.n, 0.0);
  if (touches) {
    touches->y_reads.assign(nw, 0);
    touches->x_writes.assign(nw, 0);
  }

  for (uint64_t group = 0; group < config.num_workgroups; ++group) {
    for (uint64_t lid = 0; lid < config.local_size; ++lid) {
      const WideRange r = item_range(config, nw, group, lid);
      for (uint64_t i = r.begin; i < r.end; i += r.stride) {
        bump(touches ? &touches->y_reads : nullptr, i);
        bump(touches ? &touches->x_writes : nullptr, i);
        for (uint32_t lane = 0; lane < vw; ++lane) {
          const uint64_t idx = i * vw + lane;
          data.x[idx] = cast<T>(data.y[idx]);
        }
      }
    }
  }
}

template <typename T>
void run_axpby(const KernelSource& kernel, const LaunchPlan& plan, OperandData& data,
               TouchRecorder* touches) {
  const KernelConfig& config = kernel.config;
  const uint32_t vw = config.vector_width;
  const uint64_t nw = kernel.n / vw;
  const T alpha = cast<T>(plan.alpha);
  const T beta = cast<T>(plan.beta);

  data.x.assign(kernel.n, 0.0);
  if (touches) {
    touches->y_reads.assign(nw, 0);
    touches->z_reads.assign(nw, 0);
    touches->x_writes.assign(nw, 0);
  }

  for (uint64_t group = 0; group < config.num_workgroups; ++group) {
    for (uint64_t lid = 0; lid < config.local_size; ++lid) {
      const WideRange r = item_range(config, nw, group, lid);
      for (uint64_t i = r.begin; i < r.end; i += r.stride) {
        bump(touches ? &touches->y_reads : nullptr, i);
        bump(touches ? &touches->z_reads : nullptr, i);
        bump(touches ? &touches->x_writes : nullptr, i);
        for (uint32_t lane = 0; lane < vw; ++lane) {
          const uint64_t idx = i * vw + lane;
          data.x[idx] = alpha * cast<T>(data.y[idx]) + beta * cast<T>(data.z[idx]);
        }
      }
    }
  }
}

template <typename T>
void run_dot(const KernelSource& kernel, OperandData& data, TouchRecorder* touches) {
  const KernelConfig& config = kernel.config;
  const uint32_t vw = config.vector_width;
  const uint64_t nw = kernel.n / vw;

  data.partials.assign(config.num_workgroups, 0.0);
  if (touches) {
    touches->x_reads.assign(nw, 0);
    touches->y_reads.assign(nw, 0);
    touches->partial_writes.assign(config.num_workgroups, 0);
  }

  std::vector<T> scratch(config.local_size);
  for (uint64_t group = 0; group < config.num_workgroups; ++group) {
    for (uint64_t lid = 0; lid < config.local_size; ++lid) {
      std::array<T, 16> acc{};
      const WideRange r = item_range(config, nw, group, lid);
      for (uint64_t i = r.begin; i < r.end; i += r.stride) {
        bump(touches ? &touches->x_reads : nullptr, i);
        bump(touches ? &touches->y_reads : nullptr, i);
        for (uint32_t lane = 0; lane < vw; ++lane) {
          const uint64_t idx = i * vw + lane;
          acc[lane] += cast<T>(data.x[idx]) * cast<T>(data.y[idx]);
        }
      }
      scratch[lid] = lane_sum(acc, vw);
    }
    tree_reduce(scratch);
    data.partials[group] = scratch[0];
    bump(touches ? &touches->partial_writes : nullptr, group);
  }
}

template <typename T>
void run_gemv(const KernelSource& kernel, OperandData& data, TouchRecorder* touches) {
  const KernelConfig& config = kernel.config;
  const uint32_t vw = config.vector_width;
  const uint64_t nw = kernel.n / vw;
  const uint64_t m = kernel.m;
  const uint64_t local = config.local_size;

  std::vector<double> result(m, 0.0);
  if (touches) {
    touches->a_reads.assign(m * nw, 0);
    touches->y_reads.assign(nw, 0);
    touches->x_writes.assign(m, 0);
  }

  std::vector<T> scratch(local);
  for (uint64_t group = 0; group < config.num_workgroups; ++group) {
    for (uint64_t row = group; row < m; row += config.num_workgroups) {
      for (uint64_t lid = 0; lid < local; ++lid) {
        std::array<T, 16> acc{};
        uint64_t begin, end, stride;
        if (config.increment == IncrementType::Global) {
          begin = lid;
          end = nw;
          stride = local;
        } else {
          const uint64_t chunk = (nw + local - 1) / local;
          begin = lid * chunk;
          end = std::min(begin + chunk, nw);
          stride = 1;
        }
        for (uint64_t i = begin; i < end; i += stride) {
          bump(touches ? &touches->a_reads : nullptr, row * nw + i);
          bump(touches ? &touches->y_reads : nullptr, i);
          for (uint32_t lane = 0; lane < vw; ++lane) {
            const uint64_t idx = i * vw + lane;
            acc[lane] += cast<T>(data.a[row * kernel.n + idx]) * cast<T>(data.y[idx]);
          }
        }
        scratch[lid] = lane_sum(acc, vw);
      }
      tree_reduce(scratch);
      result[row] = scratch[0];
      bump(touches ? &touches->x_writes : nullptr, row);
    }
  }
  data.x = std::move(result);
}

template <typename T>
void run_kernel(const KernelSource& kernel, const LaunchPlan& plan, OperandData& data,
                TouchRecorder* touches) {
  switch (kernel.kind) {
    case OpKind::Copy: run_copy<T>(kernel, data, touches); break;
    case OpKind::Axpby: run_axpby<T>(kernel, plan, data, touches); break;
    case OpKind::Dot: run_dot<T>(kernel, data, touches); break;
    case OpKind::Gemv: run_gemv<T>(kernel, data, touches); break;
  }
}

}  // namespace

void interpret_kernel(const KernelSource& kernel, const LaunchPlan& plan,
                      OperandData& data, TouchRecorder* touches) {
  const KernelConfig& config = kernel.config;
  if (kernel.n % config.vector_width != 0)
    throw std::invalid_argument("n not divisible by vector width");
  if (plan.global_size != config.global_size() ||
      plan.local_size != config.local_size)
    throw LaunchError("launch plan work sizes disagree with the kernel config");

  const uint64_t n = kernel.n;
  if (data.y.size() != n) throw std::invalid_argument("operand y has wrong size");
  if (kernel.kind == OpKind::Axpby && data.z.size() != n)
    throw std::invalid_argument("operand z has wrong size");
  if (kernel.kind == OpKind::Dot && data.x.size() != n)
    throw std::invalid_argument("operand x has wrong size");
  if (kernel.kind == OpKind::Gemv && data.a.size() != kernel.m * n)
    throw std::invalid_argument("operand a has wrong size");

  if (kernel.precision == Precision::fp64)
    run_kernel<double>(kernel, plan, data, touches);
  else
    run_kernel<float>(kernel, plan, data, touches);
}

}  // namespace bwtune
