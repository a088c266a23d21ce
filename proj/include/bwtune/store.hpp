#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bwtune/bench.hpp"

namespace bwtune {

// One record per line, comma-separated, append-only:
//   v1,<device>,<op>,<n>,<m>,<config_id>,<bytes>,<reps>,<elapsed>,
//   <bandwidth>,<relative_bw>,<verified>,<timestamp>,<error note...>
// The error note is the line remainder and may itself contain commas.
// Doubles use round-trip precision; timestamps are ISO-8601 UTC.
std::string serialize_record(const BenchmarkRecord& record);
BenchmarkRecord parse_record(std::string_view line);

std::string format_timestamp(int64_t unix_seconds);
int64_t parse_timestamp(std::string_view iso);

// Appends; parent records already in the file stay untouched.
void append_records(const std::string& path, const ResultSet& results);

// Every line must parse; '#' comment lines and blanks are skipped.
ResultSet load_store(const std::string& path);
ResultSet load_stores(const std::vector<std::string>& paths);

void write_records(std::ostream& out, const ResultSet& results);
ResultSet read_records(std::istream& in, const std::string& provenance);

}  // namespace bwtune
