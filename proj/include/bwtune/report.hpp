#pragma once

#include <iosfwd>

#include "bwtune/analysis.hpp"

namespace bwtune {

// Comma-separated plot data, one header line, UTF-8, LF endings.
void emit_histogram_csv(std::ostream& out, const Histogram& histogram);
void emit_scatter_csv(std::ostream& out, const std::vector<PairedPoint>& points);
void emit_tune_csv(std::ostream& out, const TransferTuneResult& result);

// Aligned text tables, percentages with one decimal.
void emit_penalty_table(std::ostream& out, const PenaltyMatrix& matrix,
                        const std::string& header_note = {});
void emit_best_average_table(std::ostream& out, const std::string& device,
                             const BestAverageResult& result,
                             const std::string& header_note = {});

}  // namespace bwtune
