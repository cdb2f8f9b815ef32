#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopsearch/docs.hpp"
#include "hopsearch/llm.hpp"
#include "hopsearch/orchestrator.hpp"
#include "hopsearch/rewards.hpp"

namespace hopsearch::eval {

struct QuestionRow {
  std::string id;
  std::string answer;
  double f1 = 0.0;
  double cem = 0.0;
  double em = 0.0;
  std::size_t t = 0;
  std::string termination;

  friend bool operator==(const QuestionRow&, const QuestionRow&) = default;
};

struct EvalReport {
  std::string dataset;
  double mean_f1 = 0.0;  // fractions in [0,1]; rendered as percents
  double mean_cem = 0.0;
  double mean_em = 0.0;
  std::vector<QuestionRow> rows;
  nlohmann::ordered_json metadata;  // config snapshot, provider kinds, seed
  bool incomplete = false;
  std::vector<std::string> errors;

  void recompute_aggregates();
};

enum class ReportFormat { Table, Json, Csv };

std::optional<ReportFormat> report_format_from_string(const std::string& name);

struct LlmSpec {
  std::string kind = "http";  // "http" | "scripted"
  llm::EndpointConfig endpoint;
  std::filesystem::path script;  // scripted: JSON object id -> [chunks], "*" fallback
};

struct RunManifest {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> corpus;
  std::vector<std::filesystem::path> kg_triples;
  std::optional<std::filesystem::path> kg_entity_aliases;
  std::optional<std::filesystem::path> kg_relation_aliases;
  docs::ProviderConfig provider;
  LlmSpec llm;
  std::optional<LlmSpec> filter_llm;  // defaults to the policy endpoint when use_llm_filter
  bool use_llm_filter = false;
  bool filter_docs = false;
  agent::AgentConfig agent;
  rewards::RewardConfig rewards;
  std::filesystem::path output_dir;
  std::size_t parallelism = 4;
  std::uint64_t seed = 0;
};

// Parses the manifest JSON and validates that every referenced path exists.
// Relative paths resolve against the manifest's directory.
RunManifest load_manifest(const std::filesystem::path& path);

// JSONL gold records. Malformed lines are collected into `errors` and
// skipped; zero valid records throws LoadError.
std::vector<rewards::GoldRecord> load_dataset(const std::filesystem::path& path,
                                              std::vector<std::string>* errors = nullptr);

// Full evaluation: rollout + scoring per record, aggregate metrics, and
// report.json / trajectories.jsonl written under manifest.output_dir.
// Per-question failures are recorded and flag the report incomplete instead
// of aborting the run.
EvalReport evaluate(const RunManifest& manifest);

// Offline scoring of a trajectory dump against gold data: reward breakdowns
// and loss masks per trajectory, no model calls. Writes report.json and
// scores.jsonl under output_dir. Unmatched ids land in the error section;
// `no_work` is set when the dump held no trajectories at all.
EvalReport score_offline(const std::filesystem::path& trajectories_path,
                         const std::filesystem::path& gold_path,
                         const rewards::RewardConfig& config,
                         const std::filesystem::path& output_dir, bool* no_work = nullptr);

std::string render_report(const EvalReport& report, ReportFormat format);

EvalReport report_from_json(const std::string& json_text);
EvalReport report_from_csv(const std::string& csv_text);

}  // namespace hopsearch::eval
