#include <doctest.h>

#include <algorithm>

#include "bwtune/bench.hpp"
#include "bwtune/sim.hpp"

using namespace bwtune;

namespace {

// Every factor 1, noiseless: predicted bandwidth equals the peak.
SimDeviceModel flat_model(double peak_gbs = 100.0, uint32_t max_local = 512) {
  SimDeviceModel model;
  model.base.name = "flat";
  model.base.device_class = DeviceClass::GPU;
  model.base.max_local_size = max_local;
  model.base.peak_bandwidth = peak_gbs * 1e9;
  for (uint32_t w : admissible_vector_widths()) model.width_efficiency[w] = 1.0;
  for (uint32_t l : admissible_local_sizes()) model.local_size_factor[l] = 1.0;
  for (uint32_t g : admissible_workgroup_counts()) model.workgroup_factor[g] = 1.0;
  model.increment_affinity[IncrementType::Global] = 1.0;
  model.increment_affinity[IncrementType::Local] = 1.0;
  return model;
}

Operation make_op(OpKind kind, uint64_t n, uint64_t m = 1) {
  Operation op;
  op.kind = kind;
  op.n = n;
  op.m = m;
  return op;
}

}  // namespace

TEST_CASE("flat model predicts the peak exactly") {
  const SimDeviceModel model = flat_model();
  for (const KernelConfig& c : enumerate(512))
    CHECK(predicted_bandwidth(model, c) == model.base.peak_bandwidth);
}

TEST_CASE("noise is deterministic, bounded and clamped") {
  SimDeviceModel model = flat_model();
  model.width_efficiency[4] = 0.5;  // keep the noisy value below the clamp
  model.noise_seed = 42;
  model.noise_amplitude = 0.02;
  const KernelConfig config{IncrementType::Global, 4, 64, 96};

  const double base = model.base.peak_bandwidth * 0.5;
  const double bw = predicted_bandwidth(model, config);
  CHECK(bw == predicted_bandwidth(model, config));  // same seed, same value
  CHECK(bw >= base * 0.98);
  CHECK(bw <= base * 1.02);
  CHECK(bw != base);  // noise actually applied

  model.noise_seed = 43;
  CHECK(bw != predicted_bandwidth(model, config));

  // noiseless variants never exceed the peak
  model.noise_seed = 0;
  CHECK(predicted_bandwidth(model, config) == base);
  model.width_efficiency[4] = 1.0;
  model.noise_seed = 42;
  CHECK(predicted_bandwidth(model, config) <= model.base.peak_bandwidth);
}

TEST_CASE("bundled profiles validate and encode their device bias") {
  const std::vector<std::string> expected_names{"gpu-like", "cpu-like"};
  CHECK(builtin_sim_profile_names() == expected_names);
  const SimDeviceModel gpu = builtin_sim_profile("gpu-like");
  const SimDeviceModel cpu = builtin_sim_profile("cpu-like");
  CHECK(gpu.base.device_class == DeviceClass::GPU);
  CHECK(cpu.base.device_class == DeviceClass::CPU);

  // GPU profile prefers sizable workgroups
  const KernelConfig wide{IncrementType::Global, 1, 128, 256};
  const KernelConfig narrow{IncrementType::Global, 1, 1, 256};
  CHECK(predicted_bandwidth(gpu, wide) >= predicted_bandwidth(gpu, narrow));

  // CPU profile prefers contiguous per-item blocks
  const KernelConfig local{IncrementType::Local, 4, 1, 256};
  const KernelConfig global{IncrementType::Global, 4, 1, 256};
  CHECK(predicted_bandwidth(cpu, local) >= predicted_bandwidth(cpu, global));

  CHECK_THROWS(builtin_sim_profile("tpu-like"));
}

TEST_CASE("profile text parsing") {
  CHECK_THROWS(parse_sim_model("width 1 1.0\n", "test"));  // no device line
  SimDeviceModel model = flat_model();
  model.noise_amplitude = 0.5;  // above the 0.05 ceiling
  CHECK_THROWS_AS(validate_sim_model(model), std::invalid_argument);
}

TEST_CASE("sim compile checks") {
  SimBackend backend(flat_model());
  const KernelSource src =
      generate(make_op(OpKind::Copy, 1024), {IncrementType::Global, 1, 8, 2});
  CHECK(backend.compile(src) != nullptr);

  KernelSource renamed = src;
  renamed.entry_point_name = "something_else";
  CHECK_THROWS_AS((void)backend.compile(renamed), CompileError);

  SimDeviceModel fp32_only = flat_model();
  fp32_only.base.supports_fp64 = false;
  SimBackend narrow(fp32_only);
  CHECK_THROWS_AS((void)narrow.compile(src), Fp64Unsupported);
  CHECK(narrow.compile(generate(make_op(OpKind::Copy, 1024),
                                {IncrementType::Global, 1, 8, 2}, Precision::fp32)) !=
        nullptr);
}

TEST_CASE("modeled elapsed time: bytes over predicted bandwidth") {
  SimBackend backend(flat_model(100.0));
  const KernelSource src =
      generate(make_op(OpKind::Copy, 2'000'000), {IncrementType::Global, 1, 128, 80});
  auto program = backend.compile(src);
  OperandData data = make_verification_inputs(make_op(OpKind::Copy, 2'000'000), 1);
  const double elapsed = backend.execute(*program, make_launch_plan(src), data);
  CHECK(elapsed == 32'000'000.0 / 100e9);  // 3.2e-4 s
}

TEST_CASE("launch validation") {
  SimDeviceModel model = flat_model(100.0, 256);
  model.local_mem_bytes = 2048;
  SimBackend backend(model);

  const KernelSource big =
      generate(make_op(OpKind::Copy, 1024), {IncrementType::Global, 1, 512, 2});
  auto program = backend.compile(big);
  OperandData data = make_verification_inputs(make_op(OpKind::Copy, 1024), 1);
  CHECK_THROWS_AS((void)backend.execute(*program, make_launch_plan(big), data),
                  LaunchError);

  // 8 x 512 = 4096 scratch bytes > 2048 of local memory
  SimDeviceModel roomy = flat_model(100.0, 512);
  roomy.local_mem_bytes = 2048;
  SimBackend tight(roomy);
  const KernelSource dot =
      generate(make_op(OpKind::Dot, 1024), {IncrementType::Global, 1, 512, 2});
  auto dot_program = tight.compile(dot);
  OperandData dot_data = make_verification_inputs(make_op(OpKind::Dot, 1024), 1);
  CHECK(dot.scratch_bytes == 4096);
  CHECK_THROWS_AS((void)tight.execute(*dot_program, make_launch_plan(dot), dot_data),
                  OutOfResources);
}

TEST_CASE("interpreter matches the oracle across increment variants") {
  SimBackend backend(flat_model());
  const KernelConfig configs[] = {
      {IncrementType::Global, 1, 8, 2},
      {IncrementType::Global, 4, 16, 48},
      {IncrementType::Local, 2, 8, 16},
      {IncrementType::Local, 16, 32, 4},
      {IncrementType::Local, 1, 1, 1024},  // more groups than wide elements
  };
  for (OpKind kind : {OpKind::Copy, OpKind::Axpby, OpKind::Dot, OpKind::Gemv}) {
    const Operation op = kind == OpKind::Gemv ? make_op(kind, 256, 48)
                                              : make_op(kind, 4096);
    const OperandData inputs = make_verification_inputs(op, 7);
    const OracleOutput reference = oracle(op, Precision::fp64, inputs);
    for (const KernelConfig& config : configs) {
      CAPTURE(to_string(kind));
      CAPTURE(config_id(config));
      const KernelSource src = generate(op, config);
      auto program = backend.compile(src);
      OperandData work = inputs;
      backend.execute(*program, make_launch_plan(src, op.alpha, op.beta), work);
      CHECK(compare_with_oracle(op, work, reference, 1e-12).empty());
    }
  }
}

TEST_CASE("dot of all-ones vectors is exact") {
  const Operation op = make_op(OpKind::Dot, 1000);
  OperandData data;
  data.x.assign(1000, 1.0);
  data.y.assign(1000, 1.0);
  const KernelConfig config{IncrementType::Global, 4, 8, 4};
  const KernelSource src = generate(op, config);
  interpret_kernel(src, make_launch_plan(src), data);
  CHECK(data.partials.size() == 4);
  CHECK(host_finalize_dot(data.partials) == 1000.0);
}

TEST_CASE("every wide element is touched exactly once") {
  for (const KernelConfig& config :
       {KernelConfig{IncrementType::Global, 2, 8, 48},
        KernelConfig{IncrementType::Local, 4, 16, 8},
        KernelConfig{IncrementType::Local, 1, 2, 1024}}) {
    CAPTURE(config_id(config));
    const Operation op = make_op(OpKind::Axpby, 4096);
    OperandData data = make_verification_inputs(op, 3);
    const KernelSource src = generate(op, config);
    TouchRecorder touches;
    interpret_kernel(src, make_launch_plan(src, op.alpha, op.beta), data, &touches);
    auto once = [](const std::vector<uint32_t>& counts) {
      return std::all_of(counts.begin(), counts.end(),
                         [](uint32_t c) { return c == 1; });
    };
    CHECK(touches.y_reads.size() == 4096 / config.vector_width);
    CHECK(once(touches.y_reads));
    CHECK(once(touches.z_reads));
    CHECK(once(touches.x_writes));
  }
}

TEST_CASE("gemv touches the matrix once and the rhs once per row") {
  const Operation op = make_op(OpKind::Gemv, 64, 48);
  const KernelConfig config{IncrementType::Global, 2, 8, 16};
  OperandData data = make_verification_inputs(op, 3);
  const KernelSource src = generate(op, config);
  TouchRecorder touches;
  interpret_kernel(src, make_launch_plan(src), data, &touches);

  CHECK(std::all_of(touches.a_reads.begin(), touches.a_reads.end(),
                    [](uint32_t c) { return c == 1; }));
  CHECK(std::all_of(touches.y_reads.begin(), touches.y_reads.end(),
                    [&](uint32_t c) { return c == op.m; }));
  CHECK(std::all_of(touches.x_writes.begin(), touches.x_writes.end(),
                    [](uint32_t c) { return c == 1; }));
}
