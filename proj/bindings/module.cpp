#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bwtune/analysis.hpp"
#include "bwtune/bench.hpp"
#include "bwtune/sim.hpp"
#include "bwtune/store.hpp"

namespace py = pybind11;
using namespace bwtune;

namespace {

Operation build_operation(const std::string& op, uint64_t n, uint64_t m) {
  Operation operation = default_problem(parse_op_kind(op));
  if (n) operation.n = n;
  if (m) operation.m = m;
  return operation;
}

py::dict record_to_dict(const BenchmarkRecord& r) {
  py::dict d;
  d["device"] = r.device_name;
  d["op"] = to_string(r.op_kind);
  d["n"] = r.n;
  d["m"] = r.m;
  d["config_id"] = config_id(r.config);
  d["bytes_moved"] = r.bytes_moved;
  d["elapsed"] = r.elapsed;
  d["bandwidth"] = r.bandwidth;
  d["relative_bw"] = r.relative_bw;
  d["verified"] = r.verified;
  d["error_note"] = r.error_note;
  return d;
}

ResultSet records_from_dicts(const py::list& records) {
  ResultSet set;
  for (const auto& item : records) {
    const py::dict d = item.cast<py::dict>();
    BenchmarkRecord r;
    r.device_name = d["device"].cast<std::string>();
    r.op_kind = parse_op_kind(d["op"].cast<std::string>());
    r.config = parse_config_id(d["config_id"].cast<std::string>());
    r.relative_bw = d["relative_bw"].cast<double>();
    r.verified = d.contains("verified") ? d["verified"].cast<bool>() : true;
    set.records.push_back(std::move(r));
  }
  return set;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "bandwidth-kernel autotuning core";

  m.def("enumerate_configs",
        [](uint32_t max_local_size) {
          std::vector<std::string> keys;
          for (const KernelConfig& c : enumerate(max_local_size))
            keys.push_back(config_id(c));
          return keys;
        },
        py::arg("max_local_size") = 512,
        "Canonically ordered config ids admissible under the local-size cap.");

  m.def("kernel_source",
        [](const std::string& op, const std::string& config,
           uint64_t n, uint64_t m, const std::string& precision) {
          return generate(build_operation(op, n, m), parse_config_id(config),
                          parse_precision(precision))
              .source_text;
        },
        py::arg("op"), py::arg("config"), py::arg("n") = 0, py::arg("m") = 0,
        py::arg("precision") = "fp64",
        "Generated OpenCL C source for (op, config).");

  m.def("bytes_moved",
        [](const std::string& op, uint64_t n, uint64_t m,
           const std::string& precision) {
          return bytes_moved(build_operation(op, n, m), parse_precision(precision));
        },
        py::arg("op"), py::arg("n") = 0, py::arg("m") = 0,
        py::arg("precision") = "fp64",
        "Minimum bytes crossing the memory interface for one run.");

  m.def("builtin_profiles", [] { return builtin_sim_profile_names(); },
        "Names of the bundled simulated device profiles.");

  m.def("sweep_sim",
        [](const std::string& profile, const std::string& op, uint64_t n,
           uint64_t m, uint32_t local_size_cap) {
          SimBackend backend(resolve_sim_profile(profile));
          SweepPlan plan;
          plan.device = backend.device();
          plan.op = build_operation(op, n, m);
          uint32_t cap = plan.device.max_local_size;
          if (local_size_cap) cap = std::min(cap, local_size_cap);
          plan.configs = enumerate(cap);
          py::list out;
          for (const BenchmarkRecord& r : run_sweep(plan, backend).records)
            out.append(record_to_dict(r));
          return out;
        },
        py::arg("profile"), py::arg("op"), py::arg("n") = 0, py::arg("m") = 0,
        py::arg("local_size_cap") = 0,
        "Full configuration sweep on a simulated device; one dict per config.");

  m.def("prune_by_copy_threshold",
        [](const py::list& copy_records, double threshold) {
          std::vector<std::string> keys;
          for (const KernelConfig& c :
               prune_by_copy_threshold(records_from_dicts(copy_records), threshold))
            keys.push_back(config_id(c));
          return keys;
        },
        py::arg("copy_records"), py::arg("threshold"),
        "Config ids whose copy relative bandwidth exceeds the threshold.");

  m.def("load_store",
        [](const std::string& path) {
          py::list out;
          for (const BenchmarkRecord& r : load_store(path).records)
            out.append(record_to_dict(r));
          return out;
        },
        py::arg("path"), "Records of a result store file as dicts.");
}
