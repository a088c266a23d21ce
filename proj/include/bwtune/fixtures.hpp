#pragma once

#include <map>
#include <string>
#include <vector>

#include "bwtune/bench.hpp"

namespace bwtune {

// Published cross-device copy results: per device, the relative copy
// bandwidth of every device's best copy configuration. Read-only replay
// data for the penalty-matrix analysis.
struct Table1Fixture {
  std::string provenance;  // "paper-table-1"
  std::vector<DeviceSpec> devices;
  std::vector<std::pair<std::string, ResultSet>> copy_records_per_device;
};

// Published per-device best-average configurations: the chosen config's
// relative bandwidth for all four operations plus each operation's
// unrestricted best. Read-only replay data for best-average selection.
struct Table2Fixture {
  std::string provenance;  // "paper-table-2"
  std::vector<DeviceSpec> devices;
  std::vector<std::pair<std::string, std::map<OpKind, ResultSet>>> per_device;
};

const Table1Fixture& table1_fixture();
const Table2Fixture& table2_fixture();

// FNV-1a over the canonical serialization; pinned by a unit test so the
// published numbers cannot drift silently.
uint64_t table1_checksum();
uint64_t table2_checksum();

}  // namespace bwtune
