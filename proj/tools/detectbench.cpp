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

// detectbench command-line interface.
//
//   detectbench vocab build --human H.jsonl --ai A.jsonl --out DIR
//   detectbench humanify --corpus A.jsonl --strategy aws --knob 0.5
//       --vocab DIR --out DIR
//   detectbench score --corpus H.jsonl --corpus A.jsonl --detector log_rank
//       --reference R.jsonl --out DIR
//   detectbench metrics --scores S.jsonl --out DIR
//   detectbench sweep --config sweep.json [--out DIR] [--seed N]
//   detectbench report --manifest DIR/manifest.json --format csv
//
// Exit codes: 0 ok, 1 other failure, 2 schema error, 3 provider failure,
// 4 incomplete run.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "detectbench/detectbench.hpp"

namespace fs = std::filesystem;
using namespace detectbench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitSchema = 2;
constexpr int kExitProvider = 3;
constexpr int kExitIncomplete = 4;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchemaViolation:
    case ErrorCode::kUnknownLabel:
    case ErrorCode::kDuplicateId:
    case ErrorCode::kInvalidKnob:
    case ErrorCode::kNonFiniteScore:
      return kExitSchema;
    case ErrorCode::kProviderFailure:
      return kExitProvider;
    case ErrorCode::kIncompleteRun:
      return kExitIncomplete;
    default:
      return kExitOther;
  }
}

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

fs::path DefaultStopwords() {
  return fs::path(DETECTBENCH_DATA_DIR) / "stopwords_en.txt";
}

// Config-file values act as defaults for the single-stage subcommands.
std::optional<RunConfig> OptionalConfig(const Globals& g) {
  if (g.config.empty()) return std::nullopt;
  return LoadRunConfig(g.config);
}

fs::path OutDir(const Globals& g) { return g.out.empty() ? fs::path(".") : fs::path(g.out); }

std::unique_ptr<MaskFillProvider> ProviderFromFlag(const std::string& flag,
                                                   const RankedVocab& vocab) {
  ProviderConfig pc;
  if (const char* env = std::getenv(kProviderEndpointEnv.data());
      env != nullptr && *env != '\0') {
    pc.kind = "http";
    pc.endpoint = env;
  }
  if (!flag.empty() && flag != "stub") {
    pc.kind = "http";
    pc.endpoint = flag;
  } else if (flag == "stub") {
    pc.kind = "stub";
  }
  return MakeProvider(pc, vocab);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detector evaluation and adversarial humanification toolkit"};
  app.require_subcommand(1);
  // Global options are also accepted after the subcommand.
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Run configuration (JSON)");
  app.add_option("--seed", g.seed, "Random seed (overrides config)");
  app.add_option("--out", g.out, "Output directory");

  // vocab build
  auto* vocab_cmd = app.add_subcommand("vocab", "Vocabulary operations");
  vocab_cmd->require_subcommand(1);
  vocab_cmd->fallthrough();
  auto* vocab_build = vocab_cmd->add_subcommand("build", "Rank the vocabulary by MI");
  std::string vb_human, vb_ai;
  std::optional<double> vb_alpha;
  std::optional<std::uint64_t> vb_min_count;
  vocab_build->add_option("--human", vb_human, "Human corpus JSONL");
  vocab_build->add_option("--ai", vb_ai, "AI corpus JSONL");
  vocab_build->add_option("--alpha", vb_alpha, "Smoothing alpha");
  vocab_build->add_option("--min-count", vb_min_count, "Minimum word count");

  // humanify
  auto* hum = app.add_subcommand("humanify", "Humanify an AI corpus");
  std::string h_corpus, h_strategy = "aws", h_vocab, h_provider, h_stopwords;
  double h_knob = 0.0;
  std::optional<double> h_p0;
  std::optional<std::size_t> h_top_k;
  hum->add_option("--corpus", h_corpus, "Corpus JSONL to rewrite")->required();
  hum->add_option("--strategy", h_strategy, "rmm | aws | rhl")
      ->check(CLI::IsMember({"rmm", "aws", "rhl"}));
  hum->add_option("--knob", h_knob, "p for rmm/aws, R for rhl");
  hum->add_option("--p0", h_p0, "Per-round proportion for rhl");
  hum->add_option("--vocab", h_vocab, "Directory written by `vocab build`");
  hum->add_option("--provider", h_provider, "'stub' or http://host:port");
  hum->add_option("--stopwords", h_stopwords, "Stop-word list");
  hum->add_option("--top-k", h_top_k, "Candidates per mask");

  // score
  auto* score = app.add_subcommand("score", "Score corpora with a baseline detector");
  std::vector<std::string> s_corpora;
  std::string s_detector = "log_likelihood", s_reference;
  std::optional<int> s_order;
  score->add_option("--corpus", s_corpora, "Corpus JSONL (repeatable)")->required();
  score->add_option("--detector", s_detector, "log_likelihood | rank | log_rank | lrr");
  score->add_option("--reference", s_reference, "Training text for the n-gram model")
      ->required();
  score->add_option("--order", s_order, "n-gram order");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Compute metrics from a score file");
  std::string m_scores;
  std::optional<double> m_k, m_lambda;
  std::vector<std::string> m_group;
  metrics->add_option("--scores", m_scores, "Score JSONL")->required();
  metrics->add_option("--k", m_k, "W-AUROC decay");
  metrics->add_option("--lambda", m_lambda, "SFD sensitivity");
  metrics->add_option("--group-by", m_group, "Scenario fields")->delimiter(',');

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a full hardness sweep");

  // report
  auto* report = app.add_subcommand("report", "Tabulate a completed sweep");
  std::string r_manifest, r_format = "csv";
  report->add_option("--manifest", r_manifest, "manifest.json")->required();
  report->add_option("--format", r_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitSchema;
  }

  try {
    const auto cfg = OptionalConfig(g);

    if (*vocab_build) {
      const std::string human = !vb_human.empty() ? vb_human
                                : cfg ? cfg->human_corpus.string() : "";
      const std::string ai = !vb_ai.empty() ? vb_ai : cfg ? cfg->ai_corpus.string() : "";
      if (human.empty() || ai.empty()) {
        throw Error(ErrorCode::kSchemaViolation, "--human and --ai are required");
      }
      std::vector<std::string> ht, at;
      for (const auto& d : LoadCorpus(human)) ht.push_back(Join(d.text));
      for (const auto& d : LoadCorpus(ai)) at.push_back(Join(d.text));
      const double alpha = vb_alpha.value_or(cfg ? cfg->vocab_alpha : 0.5);
      const auto min_count = vb_min_count.value_or(cfg ? cfg->vocab_min_count : 5);
      RankedVocab vocab = Partition(BuildVocabStats(ht, at, alpha, min_count));
      vocab.human_fingerprint = FileSha256(human);
      vocab.ai_fingerprint = FileSha256(ai);
      SaveRankedVocab(OutDir(g), vocab);
      std::cout << "ai_set " << vocab.ai_set.size() << " words, human_set "
                << vocab.human_set.size() << " words -> " << OutDir(g).string()
                << "\n";
      return kExitOk;
    }

    if (*hum) {
      const fs::path stop = !h_stopwords.empty() ? fs::path(h_stopwords)
                            : cfg && !cfg->stopwords.empty() ? cfg->stopwords
                                                            : DefaultStopwords();
      HumanifyOptions options;
      options.stopwords = StopWords::Load(stop);
      options.top_k = h_top_k.value_or(cfg ? cfg->top_k : kDefaultTopK);
      RankedVocab vocab;
      if (!h_vocab.empty()) vocab = LoadRankedVocab(h_vocab);
      if (h_strategy != "rmm" && vocab.empty()) {
        throw Error(ErrorCode::kEmptyVocab, "--vocab is required for " + h_strategy);
      }
      std::unique_ptr<MaskFillProvider> provider;
      if (h_provider.empty() && cfg) {
        provider = MakeProvider(cfg->provider, vocab);
      } else {
        provider = ProviderFromFlag(h_provider, vocab);
      }
      RunConfig rc = cfg.value_or(RunConfig{});
      if (g.seed) rc.seed = g.seed;
      if (h_p0) rc.p0 = *h_p0;
      const SweepStrategy strategy = ParseSweepStrategy(h_strategy);
      if (strategy == SweepStrategy::kRmm && !rc.seed) {
        throw Error(ErrorCode::kSchemaViolation, "rmm requires --seed");
      }
      const auto docs = LoadCorpus(h_corpus);
      std::string content;
      for (const auto& d : docs) {
        content += EditedDocumentToJson(
                       HumanifyDocument(d, strategy, h_knob, rc, *provider, vocab, options))
                       .dump() +
                   "\n";
      }
      const fs::path out = OutDir(g) / (h_strategy + "-" + FormatDouble(h_knob) + ".jsonl");
      WriteFileAtomic(out, content);
      std::cout << docs.size() << " documents -> " << out.string() << "\n";
      return kExitOk;
    }

    if (*score) {
      const DetectorMethod method = ParseDetectorMethod(s_detector);
      std::vector<std::vector<std::string>> ref;
      for (const auto& d : LoadCorpus(s_reference)) {
        std::vector<std::string> keys;
        for (const auto& w : d.text.words) keys.push_back(w.key);
        ref.push_back(std::move(keys));
      }
      const auto model =
          NGramModel::Train(ref, s_order.value_or(cfg ? cfg->ngram_order : 2));
      std::vector<ScoreRecord> records;
      std::size_t dropped = 0;
      for (const auto& path : s_corpora) {
        for (const auto& d : LoadCorpus(path)) {
          std::vector<std::string> keys;
          for (const auto& w : d.text.words) keys.push_back(w.key);
          ScoreRecord r;
          try {
            r.score = DetectorScore(method, keys, model);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kDegenerateRanks &&
                e.code() != ErrorCode::kEmptyInput) {
              throw;
            }
            ++dropped;
            continue;
          }
          r.id = d.meta.id;
          r.label = d.meta.label == "ai" ? Label::kAi : Label::kHuman;
          r.detector = s_detector;
          r.scenario = {d.meta.style, d.meta.generator,
                        d.meta.attack.empty() ? "none" : d.meta.attack,
                        d.meta.hardness.empty() ? "0" : d.meta.hardness};
          records.push_back(std::move(r));
        }
      }
      const fs::path out = OutDir(g) / ("scores-" + s_detector + ".jsonl");
      WriteFileAtomic(out, SerializeScores(records));
      std::cout << records.size() << " scores (" << dropped << " dropped) -> "
                << out.string() << "\n";
      return kExitOk;
    }

    if (*metrics) {
      const auto records = IngestScores(m_scores);
      std::vector<std::string> fields =
          !m_group.empty() ? m_group
          : cfg           ? cfg->scenario_keys
                          : std::vector<std::string>{"generator", "style"};
      const double k = m_k.value_or(cfg ? cfg->k : kDefaultDecayK);
      const double lambda = m_lambda.value_or(cfg ? cfg->lambda : kDefaultLambda);
      const MetricReport r = Evaluate(GroupScores(records, fields), k, lambda);
      const std::string detector = records.empty() ? "" : records.front().detector;
      const auto j = MetricReportToJson(r, detector, "", "", records.size(), 0);
      const fs::path out = OutDir(g) / "metrics.json";
      WriteFileAtomic(out, j.dump(2) + "\n");
      std::cout << "w_auroc " << j["mean_w_auroc"].get<double>() << " sfd " << r.sfd
                << " urss " << r.urss << " -> " << out.string() << "\n";
      return kExitOk;
    }

    if (*sweep) {
      if (!cfg) throw Error(ErrorCode::kSchemaViolation, "sweep requires --config");
      RunConfig rc = *cfg;
      if (!g.out.empty()) rc.output_dir = g.out;
      if (g.seed) rc.seed = g.seed;
      const RunManifest m = RunSweep(rc);
      std::cout << "manifest -> " << (rc.output_dir / "manifest.json").string() << "\n";
      if (m.HasProviderFailure()) {
        for (const auto& s : m.stages) {
          if (s.status == "failed") std::cerr << "stage failed: " << s.error << "\n";
        }
        return kExitProvider;
      }
      const std::string csv = RenderReport(m, ReportFormat::kCsv);
      WriteFileAtomic(rc.output_dir / "report.csv", csv);
      std::cout << csv;
      return kExitOk;
    }

    if (*report) {
      const RunManifest m = LoadManifest(r_manifest);
      const ReportFormat fmt = r_format == "json" ? ReportFormat::kJson : ReportFormat::kCsv;
      const std::string content = RenderReport(m, fmt);
      if (g.out.empty()) {
        std::cout << content;
      } else {
        const fs::path out = fs::path(g.out) / ("report." + r_format);
        WriteFileAtomic(out, content);
        std::cout << "report -> " << out.string() << "\n";
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOk;
}
