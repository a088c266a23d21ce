#include "bwtune/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace bwtune {

std::string to_string(TunableParameter parameter) {
  switch (parameter) {
    case TunableParameter::Increment: return "increment";
    case TunableParameter::VectorWidth: return "vector-width";
    case TunableParameter::LocalSize: return "local-size";
    case TunableParameter::Workgroups: return "workgroups";
  }
  return "unknown";
}

TunableParameter parse_parameter(std::string_view text) {
  if (text == "increment") return TunableParameter::Increment;
  if (text == "vector-width") return TunableParameter::VectorWidth;
  if (text == "local-size") return TunableParameter::LocalSize;
  if (text == "workgroups") return TunableParameter::Workgroups;
  throw std::invalid_argument("unknown parameter '" + std::string(text) +
                              "' (increment, vector-width, local-size, workgroups)");
}

uint32_t parameter_value(const KernelConfig& config, TunableParameter parameter) {
  switch (parameter) {
    case TunableParameter::Increment:
      return config.increment == IncrementType::Local ? 1 : 0;
    case TunableParameter::VectorWidth: return config.vector_width;
    case TunableParameter::LocalSize: return config.local_size;
    case TunableParameter::Workgroups: return config.num_workgroups;
  }
  return 0;
}

namespace {

// Config -> best verified relative bandwidth. Duplicate records for a
// config (e.g. concatenated stores) keep the maximum.
using RelMap = std::map<std::string, std::pair<KernelConfig, double>>;

RelMap verified_rel_map(const ResultSet& records) {
  RelMap map;
  for (const BenchmarkRecord& r : records.records) {
    if (!r.verified) continue;
    const std::string key = config_id(r.config);
    auto [it, inserted] = map.try_emplace(key, r.config, r.relative_bw);
    if (!inserted && r.relative_bw > it->second.second)
      it->second.second = r.relative_bw;
  }
  return map;
}

// Table 2's tie-break chain: smaller vector width, then smaller local
// size, then fewer workgroups, then Global before Local.
bool tie_break_less(const KernelConfig& a, const KernelConfig& b) {
  if (a.vector_width != b.vector_width) return a.vector_width < b.vector_width;
  if (a.local_size != b.local_size) return a.local_size < b.local_size;
  if (a.num_workgroups != b.num_workgroups) return a.num_workgroups < b.num_workgroups;
  return static_cast<int>(a.increment) < static_cast<int>(b.increment);
}

}  // namespace

Histogram histogram_by_parameter(const ResultSet& records, TunableParameter parameter,
                                 double bin_width) {
  if (!(bin_width > 0)) throw std::invalid_argument("bin width must be positive");
  std::vector<const BenchmarkRecord*> verified;
  for (const BenchmarkRecord& r : records.records)
    if (r.verified) verified.push_back(&r);
  if (verified.empty())
    throw std::invalid_argument("histogram needs at least one verified record");

  for (const BenchmarkRecord* r : verified) {
    if (r->device_name != verified.front()->device_name)
      throw MixedSweep("devices '" + verified.front()->device_name + "' and '" +
                       r->device_name + "'");
    if (r->op_kind != verified.front()->op_kind)
      throw MixedSweep("operations '" + to_string(verified.front()->op_kind) +
                       "' and '" + to_string(r->op_kind) + "'");
  }

  Histogram hist;
  hist.parameter = parameter;
  hist.bin_width = bin_width;
  hist.total_records = verified.size();

  size_t max_bin = 0;
  for (const BenchmarkRecord* r : verified) {
    const double rel = std::max(0.0, r->relative_bw);
    max_bin = std::max(max_bin, static_cast<size_t>(rel / bin_width));
  }
  hist.bin_count = max_bin + 1;

  for (const BenchmarkRecord* r : verified) {
    auto& bins = hist.buckets[parameter_value(r->config, parameter)];
    bins.resize(hist.bin_count, 0);
    const double rel = std::max(0.0, r->relative_bw);
    ++bins[static_cast<size_t>(rel / bin_width)];
  }
  for (auto& [value, bins] : hist.buckets) bins.resize(hist.bin_count, 0);
  return hist;
}

std::vector<PairedPoint> scatter_pairs(const ResultSet& reference,
                                       const ResultSet& target) {
  for (const BenchmarkRecord& r : reference.records) {
    if (r.op_kind != OpKind::Copy)
      throw std::invalid_argument("scatter reference must be a copy sweep");
  }
  const RelMap ref = verified_rel_map(reference);
  const RelMap tgt = verified_rel_map(target);

  std::vector<PairedPoint> points;
  for (const auto& [key, entry] : ref) {
    auto it = tgt.find(key);
    if (it == tgt.end()) continue;
    PairedPoint p;
    p.config = entry.first;
    p.x_rel_bw = entry.second;
    p.y_rel_bw = it->second.second;
    p.flagged_excess = p.x_rel_bw > 1.0 || p.y_rel_bw > 1.0;
    points.push_back(p);
  }
  if (points.empty()) throw EmptyJoin();
  return points;
}

std::vector<KernelConfig> prune_by_copy_threshold(const ResultSet& copy_records,
                                                  double threshold) {
  if (!(threshold > 0.0) || !(threshold < 1.0))
    throw std::invalid_argument("threshold must lie in (0, 1)");
  const RelMap map = verified_rel_map(copy_records);

  std::vector<std::pair<KernelConfig, double>> survivors;
  for (const auto& [key, entry] : map)
    if (entry.second > threshold) survivors.push_back(entry);
  std::sort(survivors.begin(), survivors.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return config_less(a.first, b.first);
  });

  std::vector<KernelConfig> configs;
  configs.reserve(survivors.size());
  for (const auto& [config, rel] : survivors) configs.push_back(config);
  return configs;
}

TransferTuneResult transfer_tune(const std::map<OpKind, ResultSet>& all_ops_records,
                                 double threshold) {
  auto copy_it = all_ops_records.find(OpKind::Copy);
  if (copy_it == all_ops_records.end()) throw MissingOp("copy");

  TransferTuneResult result;
  result.pruned = prune_by_copy_threshold(copy_it->second, threshold);
  result.fallback = result.pruned.empty();

  for (const auto& [kind, records] : all_ops_records) {
    if (kind == OpKind::Copy) continue;
    const RelMap map = verified_rel_map(records);
    if (map.empty()) throw MissingOp(to_string(kind));

    TransferChoice choice;
    bool have_best = false;
    for (const auto& [key, entry] : map) {
      if (!have_best || entry.second > choice.unrestricted_rel_bw ||
          (entry.second == choice.unrestricted_rel_bw &&
           config_less(entry.first, choice.unrestricted_best))) {
        choice.unrestricted_best = entry.first;
        choice.unrestricted_rel_bw = entry.second;
        have_best = true;
      }
    }

    bool have_choice = false;
    if (!result.fallback) {
      for (const KernelConfig& candidate : result.pruned) {
        auto it = map.find(config_id(candidate));
        if (it == map.end()) continue;
        if (!have_choice || it->second.second > choice.rel_bw) {
          choice.config = candidate;
          choice.rel_bw = it->second.second;
          have_choice = true;
        }
      }
    }
    if (!have_choice) {
      // empty pruned set (or no overlap): fall back to the unrestricted best
      choice.config = choice.unrestricted_best;
      choice.rel_bw = choice.unrestricted_rel_bw;
      result.fallback = true;
    }
    choice.penalty = choice.unrestricted_rel_bw - choice.rel_bw;
    result.choices[kind] = choice;
  }
  return result;
}

BestAverageResult select_best_average(
    const std::map<OpKind, ResultSet>& per_op_records) {
  static const OpKind kAllOps[] = {OpKind::Copy, OpKind::Axpby, OpKind::Dot,
                                   OpKind::Gemv};
  std::map<OpKind, RelMap> maps;
  for (OpKind kind : kAllOps) {
    auto it = per_op_records.find(kind);
    if (it == per_op_records.end()) throw MissingOp(to_string(kind));
    maps[kind] = verified_rel_map(it->second);
    if (maps[kind].empty()) throw MissingOp(to_string(kind));
  }

  BestAverageResult result;
  for (OpKind kind : kAllOps) {
    bool first = true;
    for (const auto& [key, entry] : maps[kind]) {
      if (first || entry.second > result.best[kind] ||
          (entry.second == result.best[kind] &&
           config_less(entry.first, result.best_config[kind]))) {
        result.best[kind] = entry.second;
        result.best_config[kind] = entry.first;
        first = false;
      }
    }
  }

  bool have_choice = false;
  for (const auto& [key, entry] : maps[OpKind::Copy]) {
    double sum = entry.second;
    bool everywhere = true;
    for (OpKind kind : {OpKind::Axpby, OpKind::Dot, OpKind::Gemv}) {
      auto it = maps[kind].find(key);
      if (it == maps[kind].end()) {
        everywhere = false;
        break;
      }
      sum += it->second.second;
    }
    if (!everywhere) continue;
    const double mean = sum / 4.0;
    if (!have_choice || mean > result.mean_rel_bw ||
        (mean == result.mean_rel_bw && tie_break_less(entry.first, result.config))) {
      result.config = entry.first;
      result.mean_rel_bw = mean;
      have_choice = true;
    }
  }
  if (!have_choice) throw EmptyIntersection();

  const std::string chosen = config_id(result.config);
  for (OpKind kind : kAllOps) {
    result.achieved[kind] = maps[kind].at(chosen).second;
    result.gap[kind] = result.best[kind] - result.achieved[kind];
  }
  return result;
}

PenaltyMatrix penalty_matrix(
    const std::vector<std::pair<std::string, ResultSet>>& copy_records_per_device) {
  if (copy_records_per_device.size() < 2)
    throw std::invalid_argument("penalty matrix needs at least two devices");

  std::vector<RelMap> maps;
  maps.reserve(copy_records_per_device.size());
  for (const auto& [device, records] : copy_records_per_device)
    maps.push_back(verified_rel_map(records));

  // shared config universe: intersection of verified configs
  std::vector<std::string> universe;
  for (const auto& [key, entry] : maps.front()) {
    bool everywhere = true;
    for (size_t d = 1; d < maps.size(); ++d) {
      if (!maps[d].count(key)) {
        everywhere = false;
        break;
      }
    }
    if (everywhere) universe.push_back(key);
  }
  if (universe.empty()) throw EmptyIntersection();

  PenaltyMatrix matrix;
  std::vector<std::string> best_keys;
  for (size_t d = 0; d < maps.size(); ++d) {
    matrix.devices.push_back(copy_records_per_device[d].first);
    std::string best_key;
    for (const std::string& key : universe) {
      if (best_key.empty() || maps[d].at(key).second > maps[d].at(best_key).second ||
          (maps[d].at(key).second == maps[d].at(best_key).second &&
           config_less(maps[d].at(key).first, maps[d].at(best_key).first)))
        best_key = key;
    }
    best_keys.push_back(best_key);
    matrix.best_config_per_device[matrix.devices.back()] =
        maps[d].at(best_key).first;
  }

  matrix.cells.assign(maps.size(), std::vector<double>(maps.size(), 0.0));
  for (size_t origin = 0; origin < maps.size(); ++origin)
    for (size_t target = 0; target < maps.size(); ++target)
      matrix.cells[origin][target] = maps[target].at(best_keys[origin]).second;
  return matrix;
}

}  // namespace bwtune
