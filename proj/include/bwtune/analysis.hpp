#pragma once

#include <map>
#include <string>
#include <vector>

#include "bwtune/bench.hpp"

namespace bwtune {

struct MixedSweep : std::runtime_error {
  explicit MixedSweep(const std::string& why)
      : std::runtime_error("records span more than one sweep: " + why) {}
};

struct EmptyJoin : std::runtime_error {
  EmptyJoin() : std::runtime_error("no common verified configs between the sets") {}
};

struct MissingOp : std::runtime_error {
  explicit MissingOp(const std::string& op)
      : std::runtime_error("analysis needs records for operation '" + op + "'") {}
};

struct EmptyIntersection : std::runtime_error {
  EmptyIntersection()
      : std::runtime_error("config universes have an empty intersection") {}
};

enum class TunableParameter { Increment, VectorWidth, LocalSize, Workgroups };

std::string to_string(TunableParameter parameter);
TunableParameter parse_parameter(std::string_view text);

// Value of the given parameter for bucketing; Increment maps to 0
// (global) / 1 (local).
uint32_t parameter_value(const KernelConfig& config, TunableParameter parameter);

// Frequency-plot data: per parameter value, counts of records falling
// into relative-bandwidth bins of the given width.
struct Histogram {
  TunableParameter parameter = TunableParameter::Increment;
  double bin_width = 0.05;
  size_t bin_count = 0;  // shared by all buckets
  std::map<uint32_t, std::vector<uint64_t>> buckets;
  size_t total_records = 0;
};

Histogram histogram_by_parameter(const ResultSet& records, TunableParameter parameter,
                                 double bin_width = 0.05);

struct PairedPoint {
  KernelConfig config;
  double x_rel_bw = 0.0;  // reference (copy) relative bandwidth
  double y_rel_bw = 0.0;  // target relative bandwidth
  bool flagged_excess = false;  // either coordinate above 1.0
};

// Inner join by config of verified records: copy performance on the
// abscissa, target performance on the ordinate.
std::vector<PairedPoint> scatter_pairs(const ResultSet& reference,
                                       const ResultSet& target);

// Verified configs whose copy relative bandwidth exceeds the threshold,
// sorted by descending bandwidth. An empty result is a valid return.
std::vector<KernelConfig> prune_by_copy_threshold(const ResultSet& copy_records,
                                                  double threshold);

struct TransferChoice {
  KernelConfig config;            // best within the pruned candidate set
  double rel_bw = 0.0;
  KernelConfig unrestricted_best;
  double unrestricted_rel_bw = 0.0;
  double penalty = 0.0;           // unrestricted_rel_bw - rel_bw
};

struct TransferTuneResult {
  std::vector<KernelConfig> pruned;  // copy-threshold survivors
  bool fallback = false;             // pruned set was empty, used full set
  std::map<OpKind, TransferChoice> choices;  // non-copy ops
};

// The transfer-tuning strategy: prune by copy bandwidth, then pick each
// other operation's best configuration from the survivors.
TransferTuneResult transfer_tune(const std::map<OpKind, ResultSet>& all_ops_records,
                                 double threshold);

struct BestAverageResult {
  KernelConfig config;  // maximizes the mean relative bandwidth over the 4 ops
  double mean_rel_bw = 0.0;
  std::map<OpKind, double> achieved;     // chosen config, per op
  std::map<OpKind, double> best;         // per-op unrestricted best
  std::map<OpKind, KernelConfig> best_config;
  std::map<OpKind, double> gap;          // best - achieved
};

// Single best-average configuration per device over configs verified in
// all four operations' sets. Ties break toward smaller vector width,
// local size and workgroup count, Global before Local.
BestAverageResult select_best_average(
    const std::map<OpKind, ResultSet>& per_op_records);

struct PenaltyMatrix {
  std::vector<std::string> devices;
  std::map<std::string, KernelConfig> best_config_per_device;
  // cells[i][j]: relative bandwidth on device j of device i's best copy
  // config; diagonal = own best, the maximum of its column.
  std::vector<std::vector<double>> cells;
};

PenaltyMatrix penalty_matrix(
    const std::vector<std::pair<std::string, ResultSet>>& copy_records_per_device);

}  // namespace bwtune
