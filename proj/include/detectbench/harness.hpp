//
// Copyright 2026 The detectbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Orchestration: corpus ingestion, vocabulary building, humanification
// sweeps over a hardness grid, detector scoring, per-scenario metrics, and
// report/manifest persistence.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "detectbench/detectors.hpp"
#include "detectbench/error.hpp"
#include "detectbench/http_provider.hpp"
#include "detectbench/humanify.hpp"
#include "detectbench/io.hpp"
#include "detectbench/metrics.hpp"
#include "detectbench/ranker.hpp"
#include "json.hpp"

namespace detectbench {

inline constexpr std::string_view kToolVersion = "0.3.0";
inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kManifestSchemaVersion = 1;
inline constexpr std::string_view kProviderEndpointEnv =
    "DETECTBENCH_PROVIDER_ENDPOINT";

// ---------------------------------------------------------------------------
// Corpus files

namespace internal {

inline const std::set<std::string>& CorpusFields() {
  static const std::set<std::string> kFields = {
      "id", "text", "label", "style", "generator", "attack", "hardness"};
  return kFields;
}

inline std::string FieldAsString(const nlohmann::ordered_json& j,
                                 const char* key, const std::string& where,
                                 bool required) {
  if (!j.contains(key) || j[key].is_null()) {
    if (required) {
      throw Error(ErrorCode::kSchemaViolation,
                  where + ": missing field '" + key + "'");
    }
    return "";
  }
  const auto& v = j[key];
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() && std::string_view(key) == "hardness") {
    return FormatDouble(v.get<double>());
  }
  throw Error(ErrorCode::kSchemaViolation,
              where + ": field '" + key + "' must be a string");
}

}  // namespace internal

// JSONL, one document per line: {"id","text","label","style","generator",
// "attack","hardness"}. id, text and label are required; label is "human"
// or "ai". Extra fields are preserved.
inline std::vector<Document> ParseCorpus(std::string_view content) {
  std::vector<Document> docs;
  std::set<std::string> ids;
  std::istringstream in{std::string(content)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno);
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kSchemaViolation, where + ": " + e.what());
    }
    if (!j.is_object()) {
      throw Error(ErrorCode::kSchemaViolation, where + ": not an object");
    }
    DocumentMeta meta;
    meta.id = internal::FieldAsString(j, "id", where, true);
    const std::string text = internal::FieldAsString(j, "text", where, true);
    meta.label = internal::FieldAsString(j, "label", where, true);
    if (meta.label != "human" && meta.label != "ai") {
      throw Error(ErrorCode::kUnknownLabel, where + ": '" + meta.label + "'");
    }
    meta.style = internal::FieldAsString(j, "style", where, false);
    meta.generator = internal::FieldAsString(j, "generator", where, false);
    meta.attack = internal::FieldAsString(j, "attack", where, false);
    meta.hardness = internal::FieldAsString(j, "hardness", where, false);
    for (const auto& [k, v] : j.items()) {
      if (!internal::CorpusFields().count(k)) meta.extra[k] = v;
    }
    if (!ids.insert(meta.id).second) {
      throw Error(ErrorCode::kDuplicateId, where + ": '" + meta.id + "'");
    }
    docs.push_back(Document::FromText(text, std::move(meta)));
  }
  return docs;
}

inline std::vector<Document> LoadCorpus(const std::filesystem::path& path) {
  try {
    return ParseCorpus(ReadFile(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path.string() + " " + e.detail());
  }
}

inline nlohmann::ordered_json DocumentToJson(const Segmentation& text,
                                             const DocumentMeta& meta) {
  nlohmann::ordered_json j;
  j["id"] = meta.id;
  j["text"] = Join(text);
  j["label"] = meta.label;
  j["style"] = meta.style;
  j["generator"] = meta.generator;
  j["attack"] = meta.attack;
  j["hardness"] = meta.hardness;
  for (const auto& [k, v] : meta.extra.items()) j[k] = v;
  return j;
}

inline nlohmann::ordered_json EditedDocumentToJson(const EditedDocument& doc) {
  nlohmann::ordered_json j = DocumentToJson(doc.text, doc.meta);
  j["rounds"] = doc.rounds;
  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  for (const auto& e : doc.trace) {
    trace.push_back({{"position", e.position},
                     {"original", e.original},
                     {"replacement", e.replacement},
                     {"reason", EditReasonName(e.reason)},
                     {"round", e.round}});
  }
  j["trace"] = std::move(trace);
  return j;
}

// Reads back "trace" and "rounds" from a humanified corpus record.
inline EditedDocument EditedDocumentFromDocument(Document doc) {
  EditedDocument out{std::move(doc.text), std::move(doc.meta), {}, 0};
  auto& extra = out.meta.extra;
  try {
    if (extra.contains("rounds")) {
      out.rounds = extra["rounds"].get<int>();
      extra.erase("rounds");
    }
    if (extra.contains("trace")) {
      for (const auto& e : extra["trace"]) {
        out.trace.push_back({e.at("position").get<std::size_t>(),
                             e.at("original").get<std::string>(),
                             e.at("replacement").get<std::string>(),
                             ParseEditReason(e.at("reason").get<std::string>()),
                             e.at("round").get<int>()});
      }
      extra.erase("trace");
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kSchemaViolation,
                "document '" + out.meta.id + "' trace: " + ex.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

enum class SweepStrategy { kParaphraseBaseline, kRmm, kAws, kRhl };

inline const char* SweepStrategyName(SweepStrategy s) {
  switch (s) {
    case SweepStrategy::kParaphraseBaseline: return "paraphrase-baseline";
    case SweepStrategy::kRmm: return "rmm";
    case SweepStrategy::kAws: return "aws";
    case SweepStrategy::kRhl: return "rhl";
  }
  return "?";
}

inline SweepStrategy ParseSweepStrategy(std::string_view name) {
  if (name == "paraphrase-baseline") return SweepStrategy::kParaphraseBaseline;
  if (name == "rmm") return SweepStrategy::kRmm;
  if (name == "aws") return SweepStrategy::kAws;
  if (name == "rhl") return SweepStrategy::kRhl;
  throw Error(ErrorCode::kSchemaViolation,
              "unknown strategy '" + std::string(name) + "'");
}

struct ProviderConfig {
  std::string kind = "stub";  // "stub" or "http"
  std::string endpoint;
};

struct RunConfig {
  std::filesystem::path human_corpus;
  std::filesystem::path ai_corpus;
  // Training text for the n-gram detector; the AI corpus when empty.
  std::filesystem::path reference_corpus;
  std::filesystem::path output_dir;
  std::filesystem::path stopwords;
  SweepStrategy strategy = SweepStrategy::kAws;
  std::vector<double> knobs;
  double p0 = 0.10;
  std::optional<std::uint64_t> seed;
  ProviderConfig provider;
  std::size_t top_k = kDefaultTopK;
  double k = kDefaultDecayK;
  double lambda = kDefaultLambda;
  std::vector<std::string> scenario_keys = {"generator", "style"};
  std::vector<DetectorMethod> detectors = {
      DetectorMethod::kLogLikelihood, DetectorMethod::kRank,
      DetectorMethod::kLogRank, DetectorMethod::kLrr};
  int ngram_order = 2;
  double vocab_alpha = 0.5;
  std::uint64_t vocab_min_count = 5;
  std::size_t parallelism = 4;

  // The knob values actually swept; the baseline has a single no-op knob.
  std::vector<double> EffectiveKnobs() const {
    if (strategy == SweepStrategy::kParaphraseBaseline) return {0.0};
    return knobs;
  }

  void Validate() const {
    if (strategy != SweepStrategy::kParaphraseBaseline && knobs.empty()) {
      throw Error(ErrorCode::kSchemaViolation, "knob grid is empty");
    }
    for (double v : knobs) {
      if (strategy == SweepStrategy::kRhl) {
        if (!(v >= 0.0) || v != std::floor(v)) {
          throw Error(ErrorCode::kSchemaViolation,
                      "rhl knobs must be non-negative integers");
        }
      } else if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::kSchemaViolation, "p knobs must be in [0, 1]");
      }
    }
    if (!(p0 >= 0.0 && p0 <= 1.0)) {
      throw Error(ErrorCode::kSchemaViolation, "p0 must be in [0, 1]");
    }
    if (strategy == SweepStrategy::kRmm && !seed) {
      throw Error(ErrorCode::kSchemaViolation, "rmm requires a seed");
    }
    if (!(k > 0.0) || !(lambda > 0.0)) {
      throw Error(ErrorCode::kSchemaViolation, "k and lambda must be positive");
    }
    if (scenario_keys.empty()) {
      throw Error(ErrorCode::kSchemaViolation, "scenario_keys is empty");
    }
    for (const auto& f : scenario_keys) Scenario{}.Field(f);
    if (detectors.empty()) {
      throw Error(ErrorCode::kSchemaViolation, "no detectors configured");
    }
    if (ngram_order < 1) {
      throw Error(ErrorCode::kSchemaViolation, "ngram_order must be >= 1");
    }
    if (provider.kind != "stub" && provider.kind != "http") {
      throw Error(ErrorCode::kSchemaViolation,
                  "provider.kind must be 'stub' or 'http'");
    }
    if (provider.kind == "http" && provider.endpoint.empty()) {
      throw Error(ErrorCode::kSchemaViolation, "http provider needs endpoint");
    }
    if (top_k < 1) throw Error(ErrorCode::kSchemaViolation, "top_k must be >= 1");
  }

  nlohmann::ordered_json ToJson() const {
    nlohmann::ordered_json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["human_corpus"] = human_corpus.string();
    j["ai_corpus"] = ai_corpus.string();
    j["reference_corpus"] = reference_corpus.string();
    j["output_dir"] = output_dir.string();
    j["stopwords"] = stopwords.string();
    j["strategy"] = SweepStrategyName(strategy);
    j["knobs"] = knobs;
    j["p0"] = p0;
    if (seed) {
      j["seed"] = *seed;
    } else {
      j["seed"] = nullptr;
    }
    j["provider"] = {{"kind", provider.kind}, {"endpoint", provider.endpoint}};
    j["top_k"] = top_k;
    j["metrics"] = {{"k", k}, {"lambda", lambda}};
    j["scenario_keys"] = scenario_keys;
    nlohmann::ordered_json dets = nlohmann::ordered_json::array();
    for (auto d : detectors) dets.push_back(DetectorMethodName(d));
    j["detectors"] = dets;
    j["ngram_order"] = ngram_order;
    j["vocab"] = {{"alpha", vocab_alpha}, {"min_count", vocab_min_count}};
    j["parallelism"] = parallelism;
    return j;
  }
};

// Relative paths resolve against `base_dir` (the config file's directory).
// The provider endpoint may be overridden through DETECTBENCH_PROVIDER_ENDPOINT.
inline RunConfig ParseRunConfig(const nlohmann::json& j,
                                const std::filesystem::path& base_dir = {}) {
  RunConfig c;
  auto path = [&](const char* key) -> std::filesystem::path {
    if (!j.contains(key) || j[key].is_null()) return {};
    std::filesystem::path p = j[key].get<std::string>();
    if (p.empty() || p.is_absolute() || base_dir.empty()) return p;
    return base_dir / p;
  };
  try {
    if (j.value("schema_version", -1) != kConfigSchemaVersion) {
      throw Error(ErrorCode::kSchemaViolation,
                  "config schema_version must be " +
                      std::to_string(kConfigSchemaVersion));
    }
    c.human_corpus = path("human_corpus");
    c.ai_corpus = path("ai_corpus");
    c.reference_corpus = path("reference_corpus");
    c.output_dir = path("output_dir");
    c.stopwords = path("stopwords");
    c.strategy = ParseSweepStrategy(j.value("strategy", std::string("aws")));
    if (j.contains("knobs")) c.knobs = j["knobs"].get<std::vector<double>>();
    c.p0 = j.value("p0", c.p0);
    if (j.contains("seed") && !j["seed"].is_null()) {
      c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("provider")) {
      const auto& p = j["provider"];
      c.provider.kind = p.value("kind", std::string("stub"));
      c.provider.endpoint = p.value("endpoint", std::string());
    }
    c.top_k = j.value("top_k", c.top_k);
    if (j.contains("metrics")) {
      c.k = j["metrics"].value("k", c.k);
      c.lambda = j["metrics"].value("lambda", c.lambda);
    }
    if (j.contains("scenario_keys")) {
      c.scenario_keys = j["scenario_keys"].get<std::vector<std::string>>();
    }
    if (j.contains("detectors")) {
      c.detectors.clear();
      for (const auto& d : j["detectors"]) {
        c.detectors.push_back(ParseDetectorMethod(d.get<std::string>()));
      }
    }
    c.ngram_order = j.value("ngram_order", c.ngram_order);
    if (j.contains("vocab")) {
      c.vocab_alpha = j["vocab"].value("alpha", c.vocab_alpha);
      c.vocab_min_count = j["vocab"].value("min_count", c.vocab_min_count);
    }
    c.parallelism = j.value("parallelism", c.parallelism);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("config: ") + e.what());
  }
  if (const char* env = std::getenv(kProviderEndpointEnv.data());
      env != nullptr && *env != '\0') {
    c.provider.kind = "http";
    c.provider.endpoint = env;
  }
  return c;
}

inline RunConfig LoadRunConfig(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation,
                path.string() + ": " + std::string(e.what()));
  }
  return ParseRunConfig(j, path.parent_path());
}

// ---------------------------------------------------------------------------
// Manifest

struct OutputFile {
  std::string path;  // relative to the output directory
  std::string sha256;
};

struct StageRecord {
  std::string name;  // "vocab", "humanify", "score"
  std::string detector;
  std::string knob;
  std::string status;  // "ok", "failed"
  std::string cache;   // "hit", "miss", or empty
  std::vector<OutputFile> outputs;
  std::string error;
};

struct ReportEntry {
  std::string detector;
  std::string attack;
  std::string knob;
  OutputFile file;
};

struct RunManifest {
  std::filesystem::path output_dir;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::map<std::string, std::string> fingerprints;
  std::string tool_version{kToolVersion};
  std::string started_at;
  std::string finished_at;
  std::string status;  // "complete" or "partial"
  std::vector<StageRecord> stages;
  std::vector<ReportEntry> reports;

  bool HasProviderFailure() const {
    return std::any_of(stages.begin(), stages.end(), [](const StageRecord& s) {
      return s.status == "failed";
    });
  }
};

namespace internal {

inline nlohmann::ordered_json OutputFileJson(const OutputFile& f) {
  return {{"path", f.path}, {"sha256", f.sha256}};
}

inline OutputFile OutputFileFromJson(const nlohmann::json& j) {
  return {j.at("path").get<std::string>(), j.at("sha256").get<std::string>()};
}

inline std::string UtcNow() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace internal

inline nlohmann::ordered_json ManifestToJson(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["schema_version"] = kManifestSchemaVersion;
  j["tool_version"] = m.tool_version;
  j["status"] = m.status;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["config"] = m.config;
  j["fingerprints"] = m.fingerprints;
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (const auto& s : m.stages) {
    nlohmann::ordered_json sj;
    sj["name"] = s.name;
    sj["detector"] = s.detector;
    sj["knob"] = s.knob;
    sj["status"] = s.status;
    sj["cache"] = s.cache;
    nlohmann::ordered_json outs = nlohmann::ordered_json::array();
    for (const auto& f : s.outputs) outs.push_back(internal::OutputFileJson(f));
    sj["outputs"] = outs;
    sj["error"] = s.error;
    stages.push_back(sj);
  }
  j["stages"] = stages;
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  for (const auto& r : m.reports) {
    reports.push_back({{"detector", r.detector},
                       {"attack", r.attack},
                       {"knob", r.knob},
                       {"file", internal::OutputFileJson(r.file)}});
  }
  j["reports"] = reports;
  return j;
}

inline RunManifest LoadManifest(const std::filesystem::path& path) {
  RunManifest m;
  m.output_dir = path.parent_path();
  try {
    const auto j = nlohmann::ordered_json::parse(ReadFile(path));
    m.tool_version = j.at("tool_version").get<std::string>();
    m.status = j.at("status").get<std::string>();
    m.started_at = j.value("started_at", std::string());
    m.finished_at = j.value("finished_at", std::string());
    m.config = j.at("config");
    m.fingerprints = j.at("fingerprints").get<std::map<std::string, std::string>>();
    for (const auto& sj : j.at("stages")) {
      StageRecord s;
      s.name = sj.at("name").get<std::string>();
      s.detector = sj.value("detector", std::string());
      s.knob = sj.value("knob", std::string());
      s.status = sj.at("status").get<std::string>();
      s.cache = sj.value("cache", std::string());
      for (const auto& f : sj.at("outputs")) {
        s.outputs.push_back(internal::OutputFileFromJson(f));
      }
      s.error = sj.value("error", std::string());
      m.stages.push_back(std::move(s));
    }
    for (const auto& rj : j.at("reports")) {
      m.reports.push_back({rj.at("detector").get<std::string>(),
                           rj.at("attack").get<std::string>(),
                           rj.at("knob").get<std::string>(),
                           internal::OutputFileFromJson(rj.at("file"))});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation,
                path.string() + ": " + std::string(e.what()));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Metric reports

inline nlohmann::ordered_json MetricReportToJson(const MetricReport& r,
                                                 const std::string& detector,
                                                 const std::string& attack,
                                                 const std::string& knob,
                                                 std::size_t n_samples,
                                                 std::size_t n_dropped) {
  nlohmann::ordered_json j;
  j["detector"] = detector;
  j["attack"] = attack;
  j["knob"] = knob;
  j["n_samples"] = n_samples;
  j["n_dropped"] = n_dropped;
  j["k"] = r.k;
  j["lambda"] = r.lambda;
  double auc = 0.0;
  double wa = 0.0;
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [key, m] : r.per_scenario) {
    auc += m.auroc;
    wa += m.w_auroc;
    per[key] = {{"auroc", m.auroc},
                {"w_auroc", m.w_auroc},
                {"threshold", m.operating_point.threshold},
                {"fpr_star", m.operating_point.fpr_star},
                {"tpr_star", m.operating_point.tpr_star},
                {"j_value", m.operating_point.j_value}};
  }
  const double n = r.per_scenario.empty()
                       ? 1.0
                       : static_cast<double>(r.per_scenario.size());
  j["mean_auroc"] = auc / n;
  j["mean_w_auroc"] = wa / n;
  j["sigma_fpr"] = r.sigma_fpr;
  j["sfd"] = r.sfd;
  j["urss"] = r.urss;
  j["per_scenario"] = per;
  return j;
}

inline MetricReport MetricReportFromJson(const nlohmann::json& j) {
  MetricReport r;
  try {
    r.k = j.at("k").get<double>();
    r.lambda = j.at("lambda").get<double>();
    r.sigma_fpr = j.at("sigma_fpr").get<double>();
    r.sfd = j.at("sfd").get<double>();
    r.urss = j.at("urss").get<double>();
    for (const auto& [key, m] : j.at("per_scenario").items()) {
      ScenarioMetrics s;
      s.auroc = m.at("auroc").get<double>();
      s.w_auroc = m.at("w_auroc").get<double>();
      s.operating_point = {m.at("threshold").get<double>(),
                           m.at("fpr_star").get<double>(),
                           m.at("tpr_star").get<double>(),
                           m.at("j_value").get<double>()};
      r.per_scenario.emplace(key, s);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation,
                std::string("metric report: ") + e.what());
  }
  return r;
}

// One row of the tabular report. Metric columns are percentages rounded to
// one decimal.
struct ReportRow {
  std::string detector;
  std::string attack;
  std::string knob;
  double auc = 0.0;
  double w_auroc = 0.0;
  double sfd = 0.0;
  double urss = 0.0;

  bool operator==(const ReportRow&) const = default;
};

inline double RoundPercent(double fraction) {
  return std::round(fraction * 1000.0) / 10.0;
}

inline std::string FormatPercent(double percent) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", percent);
  return buf;
}

inline ReportRow MakeReportRow(const std::string& detector,
                               const std::string& attack,
                               const std::string& knob,
                               const MetricReport& report) {
  if (report.per_scenario.empty()) {
    throw Error(ErrorCode::kIncompleteRun,
                "report for " + detector + " has no scenarios");
  }
  double auc = 0.0;
  double wa = 0.0;
  for (const auto& [key, m] : report.per_scenario) {
    auc += m.auroc;
    wa += m.w_auroc;
  }
  const double n = static_cast<double>(report.per_scenario.size());
  return {detector,
          attack,
          knob,
          RoundPercent(auc / n),
          RoundPercent(wa / n),
          RoundPercent(report.sfd),
          RoundPercent(report.urss)};
}

inline constexpr std::string_view kCsvHeader =
    "detector,attack,knob,auc,w_auroc,sfd,urss";

inline std::string FormatReportCsv(std::span<const ReportRow> rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.detector + ',' + r.attack + ',' + r.knob + ',' +
           FormatPercent(r.auc) + ',' + FormatPercent(r.w_auroc) + ',' +
           FormatPercent(r.sfd) + ',' + FormatPercent(r.urss) + '\n';
  }
  return out;
}

inline std::string FormatReportJson(std::span<const ReportRow> rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"detector", r.detector},
                   {"attack", r.attack},
                   {"knob", r.knob},
                   {"auc", r.auc},
                   {"w_auroc", r.w_auroc},
                   {"sfd", r.sfd},
                   {"urss", r.urss}});
  }
  return nlohmann::ordered_json{{"rows", arr}}.dump(2) + "\n";
}

inline std::vector<ReportRow> ParseReportCsv(std::string_view content) {
  std::vector<ReportRow> rows;
  std::istringstream in{std::string(content)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(ErrorCode::kSchemaViolation, "csv header mismatch");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) {
      throw Error(ErrorCode::kSchemaViolation, "csv row has wrong arity");
    }
    rows.push_back({cells[0], cells[1], cells[2], std::stod(cells[3]),
                    std::stod(cells[4]), std::stod(cells[5]),
                    std::stod(cells[6])});
  }
  return rows;
}

inline std::vector<ReportRow> ParseReportJson(std::string_view content) {
  std::vector<ReportRow> rows;
  try {
    const auto j = nlohmann::json::parse(content);
    for (const auto& r : j.at("rows")) {
      rows.push_back({r.at("detector").get<std::string>(),
                      r.at("attack").get<std::string>(),
                      r.at("knob").get<std::string>(), r.at("auc").get<double>(),
                      r.at("w_auroc").get<double>(), r.at("sfd").get<double>(),
                      r.at("urss").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("report: ") + e.what());
  }
  return rows;
}

enum class ReportFormat { kJson, kCsv };

// Tabular report over every (detector, knob) entry of a completed manifest.
inline std::vector<ReportRow> CollectReportRows(const RunManifest& manifest) {
  if (manifest.status != "complete") {
    throw Error(ErrorCode::kIncompleteRun,
                "manifest status is '" + manifest.status + "'");
  }
  if (manifest.reports.empty()) {
    throw Error(ErrorCode::kIncompleteRun, "manifest lists no reports");
  }
  std::vector<ReportRow> rows;
  for (const auto& entry : manifest.reports) {
    const auto path = manifest.output_dir / entry.file.path;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(ReadFile(path));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kSchemaViolation,
                  path.string() + ": " + std::string(e.what()));
    }
    rows.push_back(MakeReportRow(entry.detector, entry.attack, entry.knob,
                                 MetricReportFromJson(j)));
  }
  return rows;
}

inline std::string RenderReport(const RunManifest& manifest,
                                ReportFormat format) {
  const auto rows = CollectReportRows(manifest);
  return format == ReportFormat::kCsv ? FormatReportCsv(rows)
                                      : FormatReportJson(rows);
}

// ---------------------------------------------------------------------------
// Sweep

namespace internal {

// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
// thrown by any item is rethrown after all workers stop.
template <typename Fn>
void ParallelFor(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

inline std::string KnobString(SweepStrategy s, double knob) {
  if (s == SweepStrategy::kRhl) {
    return std::to_string(static_cast<long long>(knob));
  }
  return FormatDouble(knob);
}

inline std::vector<std::string> Texts(const std::vector<Document>& docs) {
  std::vector<std::string> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(Join(d.text));
  return out;
}

inline std::vector<std::string> Keys(const Segmentation& seg) {
  std::vector<std::string> out;
  out.reserve(seg.words.size());
  for (const auto& w : seg.words) out.push_back(w.key);
  return out;
}

inline OutputFile WriteOutput(const std::filesystem::path& out_dir,
                              const std::string& relative,
                              const std::string& content) {
  WriteFileAtomic(out_dir / relative, content);
  return {relative, Sha256Hex(content)};
}

}  // namespace internal

inline std::unique_ptr<MaskFillProvider> MakeProvider(
    const ProviderConfig& config, const RankedVocab& vocab) {
  if (config.kind == "http") {
    return std::make_unique<HttpMaskFillProvider>(config.endpoint);
  }
  std::vector<std::string> pool;
  for (const auto& [w, s] : vocab.ai_set) pool.push_back(w);
  for (const auto& [w, s] : vocab.human_set) pool.push_back(w);
  return std::make_unique<StubMaskFillProvider>(std::move(pool));
}

// Per-document RMM seed: independent of processing order.
inline std::uint64_t DocumentSeed(std::uint64_t seed, const std::string& id) {
  return Fnv1a64(id, Fnv1a64(std::to_string(seed)));
}

inline EditedDocument HumanifyDocument(const Document& doc,
                                       SweepStrategy strategy, double knob,
                                       const RunConfig& config,
                                       const MaskFillProvider& provider,
                                       const RankedVocab& vocab,
                                       const HumanifyOptions& options) {
  EditedDocument out;
  switch (strategy) {
    case SweepStrategy::kParaphraseBaseline:
      out = EditedDocument{doc.text, doc.meta, {}, 0};
      break;
    case SweepStrategy::kRmm:
      out = Rmm(doc, knob, provider, DocumentSeed(config.seed.value_or(0), doc.meta.id),
                options);
      break;
    case SweepStrategy::kAws:
      out = Aws(doc, knob, provider, vocab, options);
      break;
    case SweepStrategy::kRhl:
      out = Rhl(doc, static_cast<int>(knob), config.p0, provider, vocab, options);
      break;
  }
  out.meta.attack = SweepStrategyName(strategy);
  out.meta.hardness = internal::KnobString(strategy, knob);
  return out;
}

// Runs the whole grid. Humanified corpora are cached under the output
// directory keyed by everything that determines their content; reports are
// recomputed on each run and are byte-identical for identical inputs.
// Provider failures mark the affected stage failed and the sweep moves on;
// any other error aborts and removes a stale manifest.
inline RunManifest RunSweep(const RunConfig& config) {
  config.Validate();
  namespace fs = std::filesystem;
  const fs::path out_dir = config.output_dir;
  RunManifest manifest;
  manifest.output_dir = out_dir;
  manifest.config = config.ToJson();
  manifest.started_at = internal::UtcNow();
  std::error_code ec;
  fs::remove(out_dir / "manifest.json", ec);

  const auto human_docs = LoadCorpus(config.human_corpus);
  const auto ai_docs = LoadCorpus(config.ai_corpus);
  if (human_docs.empty() || ai_docs.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "human and ai corpora must be non-empty");
  }
  const fs::path reference_path = config.reference_corpus.empty()
                                      ? config.ai_corpus
                                      : config.reference_corpus;
  const auto reference_docs = LoadCorpus(reference_path);
  HumanifyOptions options;
  options.top_k = config.top_k;
  options.stopwords = StopWords::Load(config.stopwords);

  manifest.fingerprints["human_corpus"] = FileSha256(config.human_corpus);
  manifest.fingerprints["ai_corpus"] = FileSha256(config.ai_corpus);
  manifest.fingerprints["reference_corpus"] = FileSha256(reference_path);
  manifest.fingerprints["stopwords"] = options.stopwords.content_hash();

  // Vocabulary.
  const auto human_texts = internal::Texts(human_docs);
  const auto ai_texts = internal::Texts(ai_docs);
  RankedVocab vocab = Partition(BuildVocabStats(
      human_texts, ai_texts, config.vocab_alpha, config.vocab_min_count));
  vocab.human_fingerprint = manifest.fingerprints["human_corpus"];
  vocab.ai_fingerprint = manifest.fingerprints["ai_corpus"];
  SaveRankedVocab(out_dir / "vocab", vocab);
  manifest.fingerprints["vocab"] = VocabFingerprint(vocab);
  {
    StageRecord s{"vocab", "", "", "ok", "", {}, ""};
    for (const char* f : {"ai_set.tsv", "human_set.tsv", "vocab.json"}) {
      const std::string rel = std::string("vocab/") + f;
      s.outputs.push_back({rel, FileSha256(out_dir / rel)});
    }
    manifest.stages.push_back(std::move(s));
  }

  const auto provider = MakeProvider(config.provider, vocab);
  const bool needs_provider =
      config.strategy != SweepStrategy::kParaphraseBaseline;
  const std::string provider_fp =
      needs_provider ? provider->Fingerprint() : std::string("none");
  manifest.fingerprints["provider"] = provider_fp;

  std::vector<std::vector<std::string>> reference_keys;
  for (const auto& d : reference_docs) {
    reference_keys.push_back(internal::Keys(d.text));
  }
  const NGramModel ngram = NGramModel::Train(reference_keys, config.ngram_order);

  std::vector<std::vector<std::string>> human_keys;
  for (const auto& d : human_docs) human_keys.push_back(internal::Keys(d.text));

  const std::string strategy_name = SweepStrategyName(config.strategy);
  for (double knob : config.EffectiveKnobs()) {
    const std::string knob_str = internal::KnobString(config.strategy, knob);
    const std::string stem = strategy_name + "-" + knob_str;

    // Humanify.
    const std::string cache_key = Sha256Hex(
        strategy_name + "\n" + knob_str + "\n" +
        std::to_string(config.seed.value_or(0)) + "\n" + FormatDouble(config.p0) +
        "\n" + std::to_string(config.top_k) + "\n" + provider_fp + "\n" +
        manifest.fingerprints["vocab"] + "\n" + manifest.fingerprints["ai_corpus"] +
        "\n" + manifest.fingerprints["stopwords"] + "\n" + std::string(kToolVersion));
    const std::string corpus_rel = "humanified/" + stem + ".jsonl";
    const fs::path corpus_path = out_dir / corpus_rel;
    const fs::path key_path = out_dir / ("humanified/" + stem + ".key");

    StageRecord hstage{"humanify", "", knob_str, "ok", "miss", {}, ""};
    std::vector<EditedDocument> edited;
    bool cached = false;
    if (fs::exists(corpus_path) && fs::exists(key_path)) {
      const auto key_json = nlohmann::json::parse(ReadFile(key_path), nullptr, false);
      if (!key_json.is_discarded() && key_json.value("key", "") == cache_key &&
          key_json.value("sha256", "") == FileSha256(corpus_path)) {
        for (auto& d : LoadCorpus(corpus_path)) {
          edited.push_back(EditedDocumentFromDocument(std::move(d)));
        }
        cached = edited.size() == ai_docs.size();
      }
    }
    if (cached) {
      hstage.cache = "hit";
      hstage.outputs.push_back({corpus_rel, FileSha256(corpus_path)});
    } else {
      edited.assign(ai_docs.size(), EditedDocument{});
      try {
        internal::ParallelFor(ai_docs.size(), config.parallelism, [&](std::size_t i) {
          edited[i] = HumanifyDocument(ai_docs[i], config.strategy, knob, config,
                                       *provider, vocab, options);
        });
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kProviderFailure) throw;
        hstage.status = "failed";
        hstage.error = e.what();
        manifest.stages.push_back(std::move(hstage));
        continue;
      }
      std::string content;
      for (const auto& d : edited) content += EditedDocumentToJson(d).dump() + "\n";
      hstage.outputs.push_back(internal::WriteOutput(out_dir, corpus_rel, content));
      nlohmann::ordered_json key_json = {{"key", cache_key},
                                         {"sha256", Sha256Hex(content)}};
      WriteFileAtomic(key_path, key_json.dump(2) + "\n");
    }
    manifest.stages.push_back(std::move(hstage));

    std::vector<std::vector<std::string>> edited_keys;
    for (const auto& d : edited) edited_keys.push_back(internal::Keys(d.text));

    // Score and evaluate each detector.
    for (DetectorMethod method : config.detectors) {
      const std::string det = DetectorMethodName(method);
      StageRecord sstage{"score", det, knob_str, "ok", "", {}, ""};
      std::vector<ScoreRecord> records;
      std::size_t dropped = 0;
      auto add = [&](const DocumentMeta& meta, const std::vector<std::string>& keys,
                     Label label) {
        double score = 0.0;
        try {
          score = DetectorScore(method, keys, ngram);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kDegenerateRanks &&
              e.code() != ErrorCode::kEmptyInput) {
            throw;
          }
          ++dropped;
          return;
        }
        ScoreRecord r;
        r.id = meta.id;
        r.score = score;
        r.label = label;
        r.detector = det;
        r.scenario = {meta.style, meta.generator,
                      meta.attack.empty() ? "none" : meta.attack,
                      meta.hardness.empty() ? "0" : meta.hardness};
        records.push_back(std::move(r));
      };
      for (std::size_t i = 0; i < human_docs.size(); ++i) {
        add(human_docs[i].meta, human_keys[i], Label::kHuman);
      }
      for (std::size_t i = 0; i < edited.size(); ++i) {
        add(edited[i].meta, edited_keys[i], Label::kAi);
      }
      const std::string scores_rel = "scores/" + det + "/" + stem + ".jsonl";
      sstage.outputs.push_back(
          internal::WriteOutput(out_dir, scores_rel, SerializeScores(records)));

      const auto groups = GroupScores(records, config.scenario_keys);
      const MetricReport report = Evaluate(groups, config.k, config.lambda);
      const std::string report_rel = "reports/" + det + "/" + stem + ".json";
      const OutputFile rf = internal::WriteOutput(
          out_dir, report_rel,
          MetricReportToJson(report, det, strategy_name, knob_str, records.size(),
                             dropped)
                  .dump(2) +
              "\n");
      sstage.outputs.push_back(rf);
      manifest.stages.push_back(std::move(sstage));
      manifest.reports.push_back({det, strategy_name, knob_str, rf});
    }
  }

  manifest.status = manifest.HasProviderFailure() ? "partial" : "complete";
  manifest.finished_at = internal::UtcNow();
  WriteFileAtomic(out_dir / "manifest.json", ManifestToJson(manifest).dump(2) + "\n");
  return manifest;
}

}  // namespace detectbench
