#include "bwtune/bench.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <random>
#include <sstream>

namespace bwtune {

LaunchPlan make_launch_plan(const KernelSource& kernel, double alpha, double beta) {
  LaunchPlan plan;
  plan.entry_point = kernel.entry_point_name;
  plan.global_size = kernel.config.global_size();
  plan.local_size = kernel.config.local_size;
  plan.scratch_bytes = kernel.scratch_bytes;
  plan.alpha = alpha;
  plan.beta = beta;
  return plan;
}

uint64_t bytes_moved(const Operation& op, Precision precision) {
  const uint64_t elem = precision == Precision::fp64 ? 8 : 4;
  switch (op.kind) {
    case OpKind::Copy: return 2 * op.n * elem;
    case OpKind::Axpby: return 3 * op.n * elem;
    case OpKind::Dot: return 2 * op.n * elem;
    case OpKind::Gemv: return (op.m * op.n + op.n + op.m) * elem;
  }
  return 0;
}

Operation default_problem(OpKind kind) {
  Operation op;
  op.kind = kind;
  if (kind == OpKind::Gemv) {
    op.n = 2048;
    op.m = 2048;
  } else {
    op.n = 2'000'000;
  }
  op.alpha = 2.0;
  op.beta = 3.0;
  return op;
}

OperandData make_verification_inputs(const Operation& op, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  auto fill = [&](std::vector<double>& v, uint64_t count) {
    v.resize(count);
    for (double& value : v) value = uniform(rng);
  };

  OperandData data;
  switch (op.kind) {
    case OpKind::Copy: fill(data.y, op.n); break;
    case OpKind::Axpby:
      fill(data.y, op.n);
      fill(data.z, op.n);
      break;
    case OpKind::Dot:
      fill(data.x, op.n);
      fill(data.y, op.n);
      break;
    case OpKind::Gemv:
      fill(data.a, op.m * op.n);
      fill(data.y, op.n);
      break;
  }
  return data;
}

std::string compare_with_oracle(const Operation& op, const OperandData& outputs,
                                const OracleOutput& reference, double tolerance) {
  auto mismatch = [](const std::string& what, uint64_t index, double got,
                     double want) {
    std::ostringstream msg;
    msg << what << " mismatch at index " << index << ": got " << got << ", want "
        << want;
    return msg.str();
  };

  switch (op.kind) {
    case OpKind::Copy:
    case OpKind::Axpby: {
      if (outputs.x.size() != reference.x.size()) return std::string("x size mismatch");
      for (uint64_t i = 0; i < reference.x.size(); ++i) {
        if (outputs.x[i] != reference.x[i])
          return mismatch("x", i, outputs.x[i], reference.x[i]);
      }
      return {};
    }
    case OpKind::Dot: {
      const double got = host_finalize_dot(outputs.partials);
      const double scale = std::max(std::abs(reference.dot), reference.dot_abs_sum);
      if (std::abs(got - reference.dot) > tolerance * scale)
        return mismatch("dot", 0, got, reference.dot);
      return {};
    }
    case OpKind::Gemv: {
      if (outputs.x.size() != reference.x.size()) return std::string("x size mismatch");
      for (uint64_t r = 0; r < reference.x.size(); ++r) {
        const double scale =
            std::max(std::abs(reference.x[r]), reference.row_abs_sums[r]);
        if (std::abs(outputs.x[r] - reference.x[r]) > tolerance * scale)
          return mismatch("gemv row", r, outputs.x[r], reference.x[r]);
      }
      return {};
    }
  }
  return "unknown operation";
}

namespace {

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[values.size() / 2];
}

double verification_tolerance(Precision precision) {
  return precision == Precision::fp64 ? 1e-10 : 1e-4;
}

}  // namespace

ResultSet run_sweep(const SweepPlan& plan, Backend& backend) {
  validate_operation(plan.op);
  if (plan.repetitions < 3 || plan.repetitions % 2 == 0)
    throw std::invalid_argument("repetitions must be odd and >= 3");
  if (plan.warmup_runs < 1)
    throw std::invalid_argument("at least one warmup run is required");
  for (const KernelConfig& config : plan.configs) {
    if (!is_admissible_config(config))
      throw std::invalid_argument("inadmissible config " + config_id(config));
    if (config.local_size > plan.device.max_local_size) {
      throw std::invalid_argument("config " + config_id(config) +
                                  " exceeds device local size cap of " +
                                  std::to_string(plan.device.max_local_size));
    }
  }

  const OperandData inputs = make_verification_inputs(plan.op, plan.verify_seed);
  const OracleOutput reference = oracle(plan.op, plan.precision, inputs);
  const uint64_t bytes = bytes_moved(plan.op, plan.precision);
  const double tolerance = verification_tolerance(plan.precision);

  ResultSet results;
  results.provenance = "sweep:" + backend.device_name();
  results.records.reserve(plan.configs.size());

  for (const KernelConfig& config : plan.configs) {
    BenchmarkRecord record;
    record.device_name = plan.device.name;
    record.op_kind = plan.op.kind;
    record.n = plan.op.n;
    record.m = plan.op.kind == OpKind::Gemv ? plan.op.m : 0;
    record.config = config;
    record.bytes_moved = bytes;
    record.repetitions = plan.repetitions;
    record.timestamp = static_cast<int64_t>(std::time(nullptr));

    try {
      const KernelSource kernel = generate(plan.op, config, plan.precision);
      const LaunchPlan launch = make_launch_plan(kernel, plan.op.alpha, plan.op.beta);
      auto program = backend.compile(kernel);

      OperandData work = inputs;
      backend.execute(*program, launch, work);
      const std::string verify_error =
          compare_with_oracle(plan.op, work, reference, tolerance);
      record.verified = verify_error.empty();
      if (!record.verified) record.error_note = "verification: " + verify_error;

      for (uint32_t i = 0; i < plan.warmup_runs; ++i)
        backend.execute_timed(*program, launch, work);
      std::vector<double> timings(plan.repetitions);
      for (double& t : timings) t = backend.execute_timed(*program, launch, work);
      record.elapsed = median(std::move(timings));
      record.bandwidth = static_cast<double>(bytes) / record.elapsed;
      record.relative_bw = record.bandwidth / plan.device.peak_bandwidth;
    } catch (const DeviceLost&) {
      throw;
    } catch (const std::exception& err) {
      record.verified = false;
      record.error_note = err.what();
      record.elapsed = 0.0;
      record.bandwidth = 0.0;
      record.relative_bw = 0.0;
    }
    results.records.push_back(std::move(record));
  }
  return results;
}

}  // namespace bwtune
