#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace osgood {

using Json = nlohmann::ordered_json;

// One checked condition. `anchor` names the mathematical statement the row
// tests (or is the literal "plumbing"); `measured` keeps insertion order so
// serialized reports are byte-stable.
struct ReportRow {
  std::string module;
  std::string check_id;
  std::string anchor;
  std::vector<std::pair<std::string, double>> measured;
  std::optional<double> threshold;
  bool pass = false;
  std::string note;

  ReportRow& with(std::string name, double value) {
    measured.emplace_back(std::move(name), value);
    return *this;
  }
  std::optional<double> value(std::string_view name) const;
};

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};

struct ReportSummary {
  std::size_t total = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
};

class VerificationReport {
 public:
  VerificationReport() = default;
  explicit VerificationReport(std::string module) : module_(std::move(module)) {}

  const std::string& module() const { return module_; }

  // Appends a row tagged with this report's module and returns it for
  // chaining `.with(...)` measurements.
  ReportRow& add(std::string check_id, std::string anchor, bool pass,
                 std::optional<double> threshold = std::nullopt, std::string note = {});
  void append(ReportRow row) { rows_.push_back(std::move(row)); }

  const std::vector<ReportRow>& rows() const { return rows_; }
  const ReportRow* find(std::string_view check_id) const;

  ReportSummary summary() const;
  bool all_passed() const { return summary().failed == 0; }

  Provenance& provenance() { return provenance_; }
  const Provenance& provenance() const { return provenance_; }

  Json to_json() const;
  static VerificationReport from_json(const Json& j);

 private:
  std::string module_;
  std::vector<ReportRow> rows_;
  Provenance provenance_;
};

// Concatenates rows, orders them by (module, check_id) and suffixes duplicate
// ids with "#2", "#3", ... in encounter order.
VerificationReport report_merge(const std::vector<VerificationReport>& reports);

// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

// Non-finite doubles serialize as null.
Json json_number(double x);

}  // namespace osgood
