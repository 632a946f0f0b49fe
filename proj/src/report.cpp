#include "osgood/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace osgood {

std::optional<double> ReportRow::value(std::string_view name) const {
  for (const auto& [k, v] : measured) {
    if (k == name) return v;
  }
  return std::nullopt;
}

ReportRow& VerificationReport::add(std::string check_id, std::string anchor, bool pass,
                                   std::optional<double> threshold, std::string note) {
  ReportRow row;
  row.module = module_;
  row.check_id = std::move(check_id);
  row.anchor = anchor.empty() ? std::string("plumbing") : std::move(anchor);
  row.pass = pass;
  row.threshold = threshold;
  row.note = std::move(note);
  rows_.push_back(std::move(row));
  return rows_.back();
}

const ReportRow* VerificationReport::find(std::string_view check_id) const {
  for (const auto& r : rows_) {
    if (r.check_id == check_id) return &r;
  }
  return nullptr;
}

ReportSummary VerificationReport::summary() const {
  ReportSummary s;
  s.total = rows_.size();
  s.passed = static_cast<std::size_t>(
      std::count_if(rows_.begin(), rows_.end(), [](const ReportRow& r) { return r.pass; }));
  s.failed = s.total - s.passed;
  return s;
}

Json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

Json VerificationReport::to_json() const {
  Json j;
  j["module"] = module_;
  Json rows = Json::array();
  for (const auto& r : rows_) {
    Json jr;
    jr["module"] = r.module;
    jr["check_id"] = r.check_id;
    jr["anchor"] = r.anchor;
    Json m = Json::object();
    for (const auto& [k, v] : r.measured) m[k] = json_number(v);
    jr["measured"] = std::move(m);
    jr["threshold"] = r.threshold ? json_number(*r.threshold) : Json(nullptr);
    jr["pass"] = r.pass;
    if (!r.note.empty()) jr["note"] = r.note;
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  const auto s = summary();
  j["summary"] = {{"total", s.total}, {"passed", s.passed}, {"failed", s.failed}};
  j["provenance"] = {{"config_hash", provenance_.config_hash}, {"seed", provenance_.seed}};
  return j;
}

VerificationReport VerificationReport::from_json(const Json& j) {
  VerificationReport rep(j.value("module", std::string{}));
  for (const auto& jr : j.at("rows")) {
    ReportRow r;
    r.module = jr.value("module", rep.module_);
    r.check_id = jr.at("check_id").get<std::string>();
    r.anchor = jr.at("anchor").get<std::string>();
    for (const auto& [k, v] : jr.at("measured").items()) {
      r.measured.emplace_back(k, v.is_null() ? std::nan("") : v.get<double>());
    }
    if (!jr.at("threshold").is_null()) r.threshold = jr.at("threshold").get<double>();
    r.pass = jr.at("pass").get<bool>();
    r.note = jr.value("note", std::string{});
    rep.rows_.push_back(std::move(r));
  }
  if (j.contains("provenance")) {
    rep.provenance_.config_hash = j["provenance"].value("config_hash", std::string{});
    rep.provenance_.seed = j["provenance"].value("seed", std::uint64_t{0});
  }
  return rep;
}

VerificationReport report_merge(const std::vector<VerificationReport>& reports) {
  VerificationReport merged(reports.empty() ? std::string{} : reports.front().module());
  if (reports.empty()) return merged;

  std::vector<ReportRow> rows;
  std::string hashes;
  bool same_hash = true;
  for (const auto& rep : reports) {
    rows.insert(rows.end(), rep.rows().begin(), rep.rows().end());
    if (rep.provenance().config_hash != reports.front().provenance().config_hash) same_hash = false;
    hashes += rep.provenance().config_hash;
    hashes += ';';
  }

  std::map<std::pair<std::string, std::string>, int> seen;
  for (auto& r : rows) {
    int& count = seen[{r.module, r.check_id}];
    ++count;
    if (count > 1) r.check_id += "#" + std::to_string(count);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.module != b.module) return a.module < b.module;
    return a.check_id < b.check_id;
  });

  bool same_module = std::all_of(reports.begin(), reports.end(), [&](const VerificationReport& r) {
    return r.module() == reports.front().module();
  });
  merged = VerificationReport(same_module ? reports.front().module() : std::string("merged"));
  for (auto& r : rows) merged.append(std::move(r));
  merged.provenance().seed = reports.front().provenance().seed;
  merged.provenance().config_hash =
      same_hash ? reports.front().provenance().config_hash : fnv1a_hex(hashes);
  return merged;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace osgood
