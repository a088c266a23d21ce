#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include "bwtune/analysis.hpp"
#include "bwtune/bench.hpp"
#include "bwtune/fixtures.hpp"
#include "bwtune/opencl_backend.hpp"
#include "bwtune/report.hpp"
#include "bwtune/sim.hpp"
#include "bwtune/store.hpp"

namespace {

using namespace bwtune;

struct SweepOptions {
  std::string backend = "sim:gpu-like";
  std::string op = "copy";
  std::string device_spec_file;
  std::string device_name;
  std::string emit;
  std::string precision = "fp64";
  uint64_t n = 0;
  uint64_t m = 0;
  uint32_t reps = 5;
  uint32_t warmups = 2;
  uint32_t local_size_cap = 0;
  uint64_t seed = 0x5eed0f42u;
};

struct AnalyzeOptions {
  std::string kind;
  std::vector<std::string> stores;
  std::string fixture;
  std::string parameter = "local-size";
  double bin_width = 0.05;
  std::string device;
  std::string ref_device;
  std::string target_device;
  std::string target_op = "dot";
  std::string op;
  std::string emit;
};

struct TuneOptions {
  std::vector<std::string> stores;
  double threshold = 0.75;
  std::string device;
  std::string emit;
};

std::ostream& open_emit(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open output path '" + path + "'");
  return file;
}

DeviceSpec find_device(const std::string& spec_file, const std::string& name) {
  if (spec_file.empty())
    throw std::runtime_error("--device needs --device-spec <file>");
  for (const DeviceSpec& spec : load_device_specs(spec_file))
    if (spec.name == name) return spec;
  throw std::runtime_error("device '" + name + "' not defined in '" + spec_file +
                           "'");
}

ResultSet filter_records(const ResultSet& in, const std::string& device,
                         const std::string& op) {
  ResultSet out;
  out.provenance = in.provenance;
  const bool by_op = !op.empty();
  const OpKind kind = by_op ? parse_op_kind(op) : OpKind::Copy;
  for (const BenchmarkRecord& r : in.records) {
    if (!device.empty() && r.device_name != device) continue;
    if (by_op && r.op_kind != kind) continue;
    out.records.push_back(r);
  }
  return out;
}

std::vector<std::string> device_names_in_order(const ResultSet& records) {
  std::vector<std::string> names;
  for (const BenchmarkRecord& r : records.records)
    if (std::find(names.begin(), names.end(), r.device_name) == names.end())
      names.push_back(r.device_name);
  return names;
}

int run_sweep_command(const SweepOptions& opt) {
  const OpKind kind = parse_op_kind(opt.op);
  const Precision precision = parse_precision(opt.precision);

  std::unique_ptr<Backend> backend;
  DeviceSpec device;
  if (opt.backend.rfind("sim:", 0) == 0) {
    SimDeviceModel model = resolve_sim_profile(opt.backend.substr(4));
    device = model.base;
    backend = std::make_unique<SimBackend>(std::move(model));
  } else if (opt.backend == "opencl") {
    device = find_device(opt.device_spec_file, opt.device_name);
    backend = std::make_unique<OpenCLBackend>(device);
    device = backend->device();
  } else {
    throw std::runtime_error("backend must be 'opencl' or 'sim:<profile>'");
  }

  SweepPlan plan;
  plan.device = device;
  plan.op = default_problem(kind);
  if (opt.n) plan.op.n = opt.n;
  if (opt.m) plan.op.m = opt.m;
  plan.precision = precision;
  plan.repetitions = opt.reps;
  plan.warmup_runs = opt.warmups;
  plan.verify_seed = opt.seed;

  uint32_t cap = device.max_local_size;
  if (opt.local_size_cap) cap = std::min(cap, opt.local_size_cap);
  plan.configs = enumerate(cap);

  ResultSet results = run_sweep(plan, *backend);
  if (!opt.emit.empty())
    append_records(opt.emit, results);
  else
    write_records(std::cout, results);

  size_t verified = 0;
  const BenchmarkRecord* best = nullptr;
  for (const BenchmarkRecord& r : results.records) {
    if (!r.verified) continue;
    ++verified;
    if (!best || r.relative_bw > best->relative_bw) best = &r;
  }
  std::cerr << "swept " << results.records.size() << " configs on '" << device.name
            << "', " << verified << " verified";
  if (best)
    std::cerr << ", best rel_bw " << best->relative_bw << " at "
              << config_id(best->config);
  std::cerr << "\n";
  return 0;
}

int run_analyze_command(const AnalyzeOptions& opt) {
  std::ofstream file;
  std::ostream& out = open_emit(opt.emit, file);

  if (opt.kind == "histogram") {
    ResultSet records = filter_records(load_stores(opt.stores), opt.device, opt.op);
    emit_histogram_csv(out,
                       histogram_by_parameter(records, parse_parameter(opt.parameter),
                                              opt.bin_width));
    return 0;
  }

  if (opt.kind == "scatter") {
    const ResultSet all = load_stores(opt.stores);
    const std::string ref_dev = opt.ref_device.empty() ? opt.device : opt.ref_device;
    const std::string tgt_dev =
        opt.target_device.empty() ? opt.device : opt.target_device;
    ResultSet reference = filter_records(all, ref_dev, "copy");
    ResultSet target = filter_records(all, tgt_dev, opt.target_op);
    emit_scatter_csv(out, scatter_pairs(reference, target));
    return 0;
  }

  if (opt.kind == "penalty") {
    if (opt.fixture == "paper-table-1") {
      const Table1Fixture& fixture = table1_fixture();
      emit_penalty_table(out, penalty_matrix(fixture.copy_records_per_device),
                         "paper data replay: " + fixture.provenance);
      return 0;
    }
    if (!opt.fixture.empty())
      throw std::runtime_error("unknown fixture '" + opt.fixture + "'");
    const ResultSet all = filter_records(load_stores(opt.stores), "", "copy");
    std::vector<std::pair<std::string, ResultSet>> per_device;
    for (const std::string& name : device_names_in_order(all))
      per_device.emplace_back(name, filter_records(all, name, "copy"));
    emit_penalty_table(out, penalty_matrix(per_device));
    return 0;
  }

  if (opt.kind == "best-average") {
    auto analyze_device = [&](const std::string& device,
                              const std::map<OpKind, ResultSet>& per_op,
                              const std::string& note) {
      emit_best_average_table(out, device, select_best_average(per_op), note);
    };
    if (opt.fixture == "paper-table-2") {
      const Table2Fixture& fixture = table2_fixture();
      for (const auto& [device, per_op] : fixture.per_device)
        analyze_device(device, per_op, "paper data replay: " + fixture.provenance);
      return 0;
    }
    if (!opt.fixture.empty())
      throw std::runtime_error("unknown fixture '" + opt.fixture + "'");
    const ResultSet all = load_stores(opt.stores);
    for (const std::string& name :
         opt.device.empty() ? device_names_in_order(all)
                            : std::vector<std::string>{opt.device}) {
      std::map<OpKind, ResultSet> per_op;
      for (OpKind kind : {OpKind::Copy, OpKind::Axpby, OpKind::Dot, OpKind::Gemv})
        per_op[kind] = filter_records(all, name, to_string(kind));
      analyze_device(name, per_op, {});
    }
    return 0;
  }

  throw std::runtime_error("unknown analysis kind '" + opt.kind +
                           "' (histogram, scatter, penalty, best-average)");
}

int run_tune_command(const TuneOptions& opt) {
  const ResultSet all = load_stores(opt.stores);
  std::string device = opt.device;
  if (device.empty()) {
    const auto names = device_names_in_order(all);
    if (names.size() != 1)
      throw std::runtime_error("store spans several devices; pick one with --device");
    device = names.front();
  }

  std::map<OpKind, ResultSet> per_op;
  for (OpKind kind : {OpKind::Copy, OpKind::Axpby, OpKind::Dot, OpKind::Gemv}) {
    per_op[kind] = filter_records(all, device, to_string(kind));
    if (per_op[kind].records.empty()) throw MissingOp(to_string(kind));
  }

  const TransferTuneResult result = transfer_tune(per_op, opt.threshold);
  if (result.fallback)
    std::cerr << "warning: no config clears the copy threshold " << opt.threshold
              << "; falling back to unrestricted per-op bests\n";

  std::cout << "device: " << device << "\n";
  std::cout << "copy-threshold " << opt.threshold << " candidate set: "
            << result.pruned.size() << " configs\n";
  for (const auto& [kind, choice] : result.choices) {
    std::cout << "  " << to_string(kind) << ": " << config_id(choice.config)
              << " rel_bw " << choice.rel_bw << " (unrestricted best "
              << choice.unrestricted_rel_bw << " at "
              << config_id(choice.unrestricted_best) << ", penalty "
              << choice.penalty << ")\n";
  }

  if (!opt.emit.empty()) {
    std::ofstream file;
    emit_tune_csv(open_emit(opt.emit, file), result);
  }
  return 0;
}

int run_gen_command(const std::string& op, const std::string& key,
                    const std::string& precision) {
  Operation operation = default_problem(parse_op_kind(op));
  const KernelConfig config = parse_config_id(key);
  std::cout << generate(operation, config, parse_precision(precision)).source_text;
  return 0;
}

int run_devices_command(const std::string& spec_file) {
  std::cout << "builtin sim profiles:\n";
  for (const std::string& name : builtin_sim_profile_names()) {
    const SimDeviceModel model = builtin_sim_profile(name);
    std::cout << "  sim:" << name << "  (" << to_string(model.base.device_class)
              << ", max local " << model.base.max_local_size << ", peak "
              << model.base.peak_bandwidth / 1e9 << " GB/s)\n";
  }
  if (!spec_file.empty()) {
    std::cout << "devices in " << spec_file << ":\n";
    for (const DeviceSpec& spec : load_device_specs(spec_file)) {
      std::cout << "  " << spec.name << "  (" << to_string(spec.device_class)
                << ", max local " << spec.max_local_size << ", peak "
                << spec.peak_bandwidth / 1e9 << " GB/s, "
                << (spec.supports_fp64 ? "fp64" : "fp32") << ")\n";
    }
  }
  if (opencl_available()) {
    std::cout << "OpenCL devices:\n";
    for (const OpenCLDeviceInfo& info : list_opencl_devices()) {
      std::cout << "  " << info.device_name << "  (" << info.platform_name << ", "
                << to_string(info.device_class) << ", max local "
                << info.max_local_size << ", "
                << (info.supports_fp64 ? "fp64" : "fp32") << ")\n";
    }
  } else {
    std::cout << "OpenCL: not built in\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bandwidth-kernel autotuning and portability analysis"};
  app.require_subcommand(1);

  SweepOptions sweep_opt;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "run a full configuration sweep for one operation");
  sweep->add_option("--backend", sweep_opt.backend, "opencl or sim:<profile>");
  sweep->add_option("--op", sweep_opt.op, "copy, axpby, dot or gemv")->required();
  sweep->add_option("--device-spec", sweep_opt.device_spec_file,
                    "device definition file");
  sweep->add_option("--device", sweep_opt.device_name, "device name (opencl)");
  sweep->add_option("--n", sweep_opt.n, "vector length / gemv columns");
  sweep->add_option("--m", sweep_opt.m, "gemv rows");
  sweep->add_option("--reps", sweep_opt.reps, "timed repetitions (odd, >= 3)");
  sweep->add_option("--warmups", sweep_opt.warmups, "untimed warmup runs");
  sweep->add_option("--precision", sweep_opt.precision, "fp64 (default) or fp32");
  sweep->add_option("--local-size-cap", sweep_opt.local_size_cap,
                    "drop local sizes above this cap");
  sweep->add_option("--seed", sweep_opt.seed, "verification input seed");
  sweep->add_option("--emit", sweep_opt.emit, "store file to append to");

  AnalyzeOptions analyze_opt;
  CLI::App* analyze =
      app.add_subcommand("analyze", "emit plot/table data from stores or fixtures");
  analyze->add_option("kind", analyze_opt.kind,
                      "histogram, scatter, penalty or best-average")
      ->required();
  analyze->add_option("stores", analyze_opt.stores, "result store files");
  analyze->add_option("--fixture", analyze_opt.fixture,
                      "paper-table-1 or paper-table-2");
  analyze->add_option("--param", analyze_opt.parameter,
                      "histogram parameter: increment, vector-width, local-size, "
                      "workgroups");
  analyze->add_option("--bin-width", analyze_opt.bin_width,
                      "histogram bin width (relative bandwidth)");
  analyze->add_option("--device", analyze_opt.device, "restrict to one device");
  analyze->add_option("--ref-device", analyze_opt.ref_device,
                      "scatter reference device");
  analyze->add_option("--target-device", analyze_opt.target_device,
                      "scatter target device");
  analyze->add_option("--target-op", analyze_opt.target_op, "scatter target op");
  analyze->add_option("--op", analyze_opt.op, "restrict to one operation");
  analyze->add_option("--emit", analyze_opt.emit, "output path (default stdout)");

  TuneOptions tune_opt;
  CLI::App* tune = app.add_subcommand(
      "tune", "transfer-tune: prune by copy bandwidth, pick per-op bests");
  tune->add_option("stores", tune_opt.stores, "result store files")->required();
  tune->add_option("--threshold", tune_opt.threshold, "copy pruning threshold");
  tune->add_option("--device", tune_opt.device, "device to tune for");
  tune->add_option("--emit", tune_opt.emit, "machine-readable CSV output path");

  std::string gen_op, gen_key, gen_precision = "fp64";
  CLI::App* gen = app.add_subcommand("gen", "print generated kernel source");
  gen->add_option("op", gen_op, "copy, axpby, dot or gemv")->required();
  gen->add_option("config", gen_key, "config id, e.g. g/v4/l128/w80")->required();
  gen->add_option("--precision", gen_precision, "fp64 (default) or fp32");

  std::string devices_spec_file;
  CLI::App* devices = app.add_subcommand("devices", "list known devices");
  devices->add_option("--device-spec", devices_spec_file, "device definition file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return run_sweep_command(sweep_opt);
    if (analyze->parsed()) return run_analyze_command(analyze_opt);
    if (tune->parsed()) return run_tune_command(tune_opt);
    if (gen->parsed()) return run_gen_command(gen_op, gen_key, gen_precision);
    if (devices->parsed()) return run_devices_command(devices_spec_file);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
