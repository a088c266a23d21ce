#include "bwtune/sim.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "bwtune/bench.hpp"

namespace bwtune {

namespace {

double factor_at(const std::map<uint32_t, double>& table, uint32_t key,
                 const char* what) {
  auto it = table.find(key);
  if (it == table.end()) {
    throw std::out_of_range(std::string("sim model has no ") + what + " entry for " +
                            std::to_string(key));
  }
  return it->second;
}

uint64_t splitmix64(uint64_t v) {
  v += 0x9e3779b97f4a7c15ull;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ull;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebull;
  return v ^ (v >> 31);
}

uint64_t encode_config(const KernelConfig& c) {
  return (static_cast<uint64_t>(c.increment == IncrementType::Local) << 40) |
         (static_cast<uint64_t>(c.vector_width) << 32) |
         (static_cast<uint64_t>(c.local_size) << 16) | c.num_workgroups;
}

}  // namespace

double SimDeviceModel::occupancy(uint32_t local_size, uint32_t num_workgroups) const {
  return factor_at(local_size_factor, local_size, "local size factor") *
         factor_at(workgroup_factor, num_workgroups, "workgroup factor");
}

void validate_sim_model(const SimDeviceModel& model) {
  if (!(model.base.peak_bandwidth > 0))
    throw std::invalid_argument("sim model needs a positive peak bandwidth");
  if (model.noise_amplitude < 0.0 || model.noise_amplitude > 0.05)
    throw std::invalid_argument("noise amplitude must lie in [0, 0.05]");
  auto check_range = [](double f, const char* what) {
    if (!(f > 0.0) || f > 1.0)
      throw std::invalid_argument(std::string(what) + " factors must lie in (0, 1]");
  };
  for (uint32_t w : admissible_vector_widths())
    check_range(factor_at(model.width_efficiency, w, "width efficiency"), "width");
  for (uint32_t l : admissible_local_sizes()) {
    if (l > model.base.max_local_size) continue;
    check_range(factor_at(model.local_size_factor, l, "local size factor"),
                "local size");
  }
  for (uint32_t g : admissible_workgroup_counts())
    check_range(factor_at(model.workgroup_factor, g, "workgroup factor"), "workgroup");
  for (IncrementType inc : {IncrementType::Global, IncrementType::Local}) {
    auto it = model.increment_affinity.find(inc);
    if (it == model.increment_affinity.end())
      throw std::invalid_argument("sim model misses an increment affinity entry");
    check_range(it->second, "increment affinity");
  }
}

double predicted_bandwidth(const SimDeviceModel& model, const KernelConfig& config) {
  double factor = factor_at(model.width_efficiency, config.vector_width,
                            "width efficiency") *
                  model.increment_affinity.at(config.increment) *
                  model.occupancy(config.local_size, config.num_workgroups);
  double bandwidth = model.base.peak_bandwidth * factor;
  if (model.noise_seed != 0 && model.noise_amplitude > 0.0) {
    const uint64_t h = splitmix64(model.noise_seed ^ encode_config(config));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
    bandwidth *= 1.0 + model.noise_amplitude * (2.0 * u - 1.0);
  }
  return std::min(bandwidth, model.base.peak_bandwidth);
}

SimDeviceModel parse_sim_model(const std::string& text, const std::string& origin) {
  SimDeviceModel model;
  bool have_device = false;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line.substr(first));
    std::string tag;
    fields >> tag;
    auto fail = [&](const std::string& why) -> void {
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " + why);
    };
    try {
      if (tag == "device:") {
        std::string rest;
        std::getline(fields, rest);
        model.base = parse_device_line(rest);
        have_device = true;
      } else if (tag == "width" || tag == "local" || tag == "workgroups") {
        uint32_t key;
        double factor;
        if (!(fields >> key >> factor)) fail("expected '<key> <factor>'");
        if (tag == "width")
          model.width_efficiency[key] = factor;
        else if (tag == "local")
          model.local_size_factor[key] = factor;
        else
          model.workgroup_factor[key] = factor;
      } else if (tag == "increment") {
        std::string which;
        double factor;
        if (!(fields >> which >> factor)) fail("expected 'increment <kind> <factor>'");
        if (which == "global")
          model.increment_affinity[IncrementType::Global] = factor;
        else if (which == "local")
          model.increment_affinity[IncrementType::Local] = factor;
        else
          fail("increment kind must be 'global' or 'local'");
      } else if (tag == "noise_seed") {
        if (!(fields >> model.noise_seed)) fail("expected 'noise_seed <int>'");
      } else if (tag == "noise_amplitude") {
        if (!(fields >> model.noise_amplitude)) fail("expected 'noise_amplitude <x>'");
      } else if (tag == "local_mem_bytes") {
        if (!(fields >> model.local_mem_bytes)) fail("expected 'local_mem_bytes <n>'");
      } else {
        fail("unknown profile entry '" + tag + "'");
      }
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " +
                                  err.what());
    }
  }
  if (!have_device)
    throw std::invalid_argument(origin + ": profile misses a 'device:' line");
  validate_sim_model(model);
  return model;
}

SimDeviceModel load_sim_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sim profile '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_sim_model(text.str(), path);
}

namespace {

// Synthetic profiles shaped after the usual device behavior: GPUs favor
// interleaved access, mid-size workgroups and many groups; CPUs favor
// contiguous per-item blocks and tiny workgroups.
const char kGpuLikeProfile[] = R"(
device: gpu-like | gpu | 512 | 200.0 | fp64
width 1 1.0
width 2 0.98
width 4 0.90
width 8 0.72
width 16 0.55
increment global 1.0
increment local 0.93
local 1 0.10
local 2 0.16
local 4 0.26
local 8 0.40
local 16 0.55
local 32 0.72
local 64 0.88
local 128 1.0
local 256 0.99
local 512 0.92
workgroups 1 0.10
workgroups 2 0.17
workgroups 4 0.28
workgroups 8 0.42
workgroups 16 0.58
workgroups 32 0.72
workgroups 48 0.79
workgroups 64 0.84
workgroups 80 0.88
workgroups 96 0.90
workgroups 112 0.92
workgroups 128 0.94
workgroups 160 0.96
workgroups 192 0.97
workgroups 224 0.98
workgroups 256 0.99
workgroups 384 1.0
workgroups 512 1.0
workgroups 1024 1.0
)";

const char kCpuLikeProfile[] = R"(
device: cpu-like | cpu | 512 | 50.0 | fp64
width 1 0.88
width 2 0.94
width 4 1.0
width 8 0.96
width 16 0.90
increment global 0.62
increment local 1.0
local 1 1.0
local 2 0.98
local 4 0.90
local 8 0.80
local 16 0.70
local 32 0.62
local 64 0.55
local 128 0.50
local 256 0.46
local 512 0.42
workgroups 1 0.30
workgroups 2 0.45
workgroups 4 0.60
workgroups 8 0.72
workgroups 16 0.82
workgroups 32 0.90
workgroups 48 0.93
workgroups 64 0.95
workgroups 80 0.96
workgroups 96 0.97
workgroups 112 0.975
workgroups 128 0.98
workgroups 160 0.985
workgroups 192 0.99
workgroups 224 0.995
workgroups 256 1.0
workgroups 384 1.0
workgroups 512 1.0
workgroups 1024 1.0
)";

}  // namespace

const std::vector<std::string>& builtin_sim_profile_names() {
  static const std::vector<std::string> names = {"gpu-like", "cpu-like"};
  return names;
}

SimDeviceModel builtin_sim_profile(const std::string& name) {
  if (name == "gpu-like") return parse_sim_model(kGpuLikeProfile, "builtin:gpu-like");
  if (name == "cpu-like") return parse_sim_model(kCpuLikeProfile, "builtin:cpu-like");
  throw std::invalid_argument("unknown builtin sim profile '" + name + "'");
}

SimDeviceModel resolve_sim_profile(const std::string& name_or_path) {
  for (const std::string& name : builtin_sim_profile_names())
    if (name == name_or_path) return builtin_sim_profile(name);
  return load_sim_model(name_or_path);
}

namespace {

struct SimProgram : ProgramHandle {
  explicit SimProgram(KernelSource src) : kernel(std::move(src)) {}
  KernelSource kernel;
};

}  // namespace

SimBackend::SimBackend(SimDeviceModel model) : model_(std::move(model)) {
  validate_sim_model(model_);
}

std::unique_ptr<ProgramHandle> SimBackend::compile(const KernelSource& source) {
  if (source.precision == Precision::fp64 && !model_.base.supports_fp64)
    throw Fp64Unsupported(model_.base.name);
  const std::string decl = "__kernel void " + source.entry_point_name + "(";
  if (source.source_text.find(decl) == std::string::npos) {
    throw CompileError("entry point '" + source.entry_point_name +
                       "' not declared in source");
  }
  if (source.source_text.find("__kernel") !=
      source.source_text.rfind("__kernel")) {
    throw CompileError("source must declare exactly one kernel");
  }
  return std::make_unique<SimProgram>(source);
}

void SimBackend::validate_launch(const KernelSource& kernel,
                                 const LaunchPlan& plan) const {
  if (plan.local_size < 1 || plan.local_size > model_.base.max_local_size) {
    throw LaunchError("local size " + std::to_string(plan.local_size) +
                      " unsupported on '" + model_.base.name + "' (max " +
                      std::to_string(model_.base.max_local_size) + ")");
  }
  if (plan.global_size == 0 || plan.global_size % plan.local_size != 0)
    throw LaunchError("global size must be a positive multiple of local size");
  if (plan.scratch_bytes > model_.local_mem_bytes) {
    throw OutOfResources("scratch " + std::to_string(plan.scratch_bytes) +
                         " bytes exceeds local memory of " +
                         std::to_string(model_.local_mem_bytes) + " bytes");
  }
  (void)kernel;
}

double SimBackend::modeled_elapsed(const KernelSource& kernel) const {
  Operation op;
  op.kind = kernel.kind;
  op.n = kernel.n;
  op.m = kernel.m ? kernel.m : 1;
  const uint64_t bytes = bytes_moved(op, kernel.precision);
  return static_cast<double>(bytes) / predicted_bandwidth(model_, kernel.config);
}

double SimBackend::execute(ProgramHandle& handle, const LaunchPlan& plan,
                           OperandData& data) {
  auto& program = dynamic_cast<SimProgram&>(handle);
  validate_launch(program.kernel, plan);
  interpret_kernel(program.kernel, plan, data);
  return modeled_elapsed(program.kernel);
}

double SimBackend::execute_timed(ProgramHandle& handle, const LaunchPlan& plan,
                                 OperandData& data) {
  auto& program = dynamic_cast<SimProgram&>(handle);
  validate_launch(program.kernel, plan);
  (void)data;
  return modeled_elapsed(program.kernel);
}

}  // namespace bwtune
