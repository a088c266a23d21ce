#include "bwtune/store.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bwtune {

namespace {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

double parse_double(std::string_view text, const char* what) {
  try {
    size_t used = 0;
    const std::string copy(text);
    const double value = std::stod(copy, &used);
    if (used != copy.size()) throw std::invalid_argument("trailing junk");
    return value;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("malformed ") + what + ": '" +
                                std::string(text) + "'");
  }
}

uint64_t parse_u64(std::string_view text, const char* what) {
  uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument(std::string("malformed ") + what + ": '" +
                                std::string(text) + "'");
  }
  return value;
}

std::string sanitize_note(std::string note) {
  for (char& c : note)
    if (c == '\n' || c == '\r') c = ' ';
  return note;
}

}  // namespace

std::string format_timestamp(int64_t unix_seconds) {
  const time_t t = static_cast<time_t>(unix_seconds);
  struct tm tm_utc {};
  gmtime_r(&t, &tm_utc);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buffer;
}

int64_t parse_timestamp(std::string_view iso) {
  struct tm tm_utc {};
  if (std::sscanf(std::string(iso).c_str(), "%d-%d-%dT%d:%d:%dZ", &tm_utc.tm_year,
                  &tm_utc.tm_mon, &tm_utc.tm_mday, &tm_utc.tm_hour, &tm_utc.tm_min,
                  &tm_utc.tm_sec) != 6) {
    throw std::invalid_argument("malformed timestamp '" + std::string(iso) + "'");
  }
  tm_utc.tm_year -= 1900;
  tm_utc.tm_mon -= 1;
  return static_cast<int64_t>(timegm(&tm_utc));
}

std::string serialize_record(const BenchmarkRecord& record) {
  std::ostringstream line;
  line << "v1," << record.device_name << ',' << to_string(record.op_kind) << ','
       << record.n << ',' << record.m << ',' << config_id(record.config) << ','
       << record.bytes_moved << ',' << record.repetitions << ','
       << format_double(record.elapsed) << ',' << format_double(record.bandwidth)
       << ',' << format_double(record.relative_bw) << ','
       << (record.verified ? '1' : '0') << ',' << format_timestamp(record.timestamp)
       << ',' << sanitize_note(record.error_note);
  return line.str();
}

BenchmarkRecord parse_record(std::string_view line) {
  // first 13 fields are comma-free; the remainder is the error note
  std::vector<std::string_view> fields;
  size_t start = 0;
  for (size_t pos = 0; pos < line.size() && fields.size() < 13; ++pos) {
    if (line[pos] == ',') {
      fields.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
  }
  if (fields.size() != 13)
    throw std::invalid_argument("store line has too few fields: '" +
                                std::string(line) + "'");
  std::string_view note = line.substr(start);

  if (fields[0] != "v1")
    throw std::invalid_argument("unsupported store schema '" + std::string(fields[0]) +
                                "'");

  BenchmarkRecord record;
  record.device_name = std::string(fields[1]);
  record.op_kind = parse_op_kind(fields[2]);
  record.n = parse_u64(fields[3], "n");
  record.m = parse_u64(fields[4], "m");
  record.config = parse_config_id(fields[5]);
  record.bytes_moved = parse_u64(fields[6], "bytes");
  record.repetitions = static_cast<uint32_t>(parse_u64(fields[7], "repetitions"));
  record.elapsed = parse_double(fields[8], "elapsed");
  record.bandwidth = parse_double(fields[9], "bandwidth");
  record.relative_bw = parse_double(fields[10], "relative_bw");
  if (fields[11] == "1")
    record.verified = true;
  else if (fields[11] == "0")
    record.verified = false;
  else
    throw std::invalid_argument("verified flag must be 0 or 1");
  record.timestamp = parse_timestamp(fields[12]);
  record.error_note = std::string(note);
  return record;
}

void write_records(std::ostream& out, const ResultSet& results) {
  for (const BenchmarkRecord& record : results.records)
    out << serialize_record(record) << '\n';
}

ResultSet read_records(std::istream& in, const std::string& provenance) {
  ResultSet results;
  results.provenance = provenance;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    try {
      results.records.push_back(parse_record(line));
    } catch (const std::invalid_argument& err) {
      throw std::runtime_error(provenance + ":" + std::to_string(lineno) + ": " +
                               err.what());
    }
  }
  return results;
}

void append_records(const std::string& path, const ResultSet& results) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open store '" + path + "' for append");
  write_records(out, results);
  if (!out) throw std::runtime_error("write to store '" + path + "' failed");
}

ResultSet load_store(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open store '" + path + "'");
  return read_records(in, path);
}

ResultSet load_stores(const std::vector<std::string>& paths) {
  ResultSet all;
  for (const std::string& path : paths) {
    ResultSet one = load_store(path);
    all.records.insert(all.records.end(), one.records.begin(), one.records.end());
    all.provenance += all.provenance.empty() ? path : "+" + path;
  }
  return all;
}

}  // namespace bwtune
