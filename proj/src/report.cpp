#include "bwtune/report.hpp"

#include <iomanip>
#include <ostream>

namespace bwtune {

namespace {

std::string percent(double rel) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.1f", rel * 100.0);
  return buffer;
}

std::string parameter_label(TunableParameter parameter, uint32_t value) {
  if (parameter == TunableParameter::Increment) return value ? "local" : "global";
  return std::to_string(value);
}

}  // namespace

void emit_histogram_csv(std::ostream& out, const Histogram& histogram) {
  out << "parameter_value,bin_lower,count\n";
  for (const auto& [value, bins] : histogram.buckets) {
    for (size_t bin = 0; bin < bins.size(); ++bin) {
      out << parameter_label(histogram.parameter, value) << ','
          << bin * histogram.bin_width << ',' << bins[bin] << '\n';
    }
  }
}

void emit_scatter_csv(std::ostream& out, const std::vector<PairedPoint>& points) {
  out << "config_id,x_rel_bw,y_rel_bw,flagged\n";
  for (const PairedPoint& p : points) {
    out << config_id(p.config) << ',' << p.x_rel_bw << ',' << p.y_rel_bw << ','
        << (p.flagged_excess ? 1 : 0) << '\n';
  }
}

void emit_tune_csv(std::ostream& out, const TransferTuneResult& result) {
  out << "op,config_id,rel_bw,unrestricted_config_id,unrestricted_rel_bw,penalty\n";
  for (const auto& [kind, choice] : result.choices) {
    out << to_string(kind) << ',' << config_id(choice.config) << ',' << choice.rel_bw
        << ',' << config_id(choice.unrestricted_best) << ','
        << choice.unrestricted_rel_bw << ',' << choice.penalty << '\n';
  }
}

void emit_penalty_table(std::ostream& out, const PenaltyMatrix& matrix,
                        const std::string& header_note) {
  if (!header_note.empty()) out << "# " << header_note << '\n';
  out << "# rows: origin of the best copy config; columns: device it runs on\n";
  size_t name_width = 12;
  for (const std::string& device : matrix.devices)
    name_width = std::max(name_width, device.size());

  out << std::left << std::setw(static_cast<int>(name_width) + 2) << "best config of";
  for (const std::string& device : matrix.devices)
    out << std::right << std::setw(static_cast<int>(device.size()) + 3) << device;
  out << '\n';

  for (size_t origin = 0; origin < matrix.devices.size(); ++origin) {
    out << std::left << std::setw(static_cast<int>(name_width) + 2)
        << matrix.devices[origin];
    for (size_t target = 0; target < matrix.devices.size(); ++target) {
      out << std::right
          << std::setw(static_cast<int>(matrix.devices[target].size()) + 3)
          << percent(matrix.cells[origin][target]);
    }
    out << '\n';
  }
}

void emit_best_average_table(std::ostream& out, const std::string& device,
                             const BestAverageResult& result,
                             const std::string& header_note) {
  static const OpKind kOps[] = {OpKind::Copy, OpKind::Axpby, OpKind::Dot,
                                OpKind::Gemv};
  if (!header_note.empty()) out << "# " << header_note << '\n';
  out << device << '\n';
  out << "  best-average config: " << config_id(result.config) << "  (mean "
      << percent(result.mean_rel_bw) << " %)\n";
  out << std::left << std::setw(10) << "  op" << std::right << std::setw(12)
      << "achieved" << std::setw(12) << "best" << std::setw(12) << "gap" << '\n';
  for (OpKind kind : kOps) {
    out << std::left << std::setw(10) << ("  " + to_string(kind)) << std::right
        << std::setw(12) << percent(result.achieved.at(kind)) << std::setw(12)
        << ('(' + percent(result.best.at(kind)) + ')') << std::setw(12)
        << percent(result.gap.at(kind)) << '\n';
  }
}

}  // namespace bwtune
