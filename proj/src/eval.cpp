#include "hopsearch/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "hopsearch/errors.hpp"
#include "hopsearch/kg.hpp"
#include "hopsearch/log.hpp"

namespace hopsearch::eval {
namespace {

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
  return buf;
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

void require_exists(const std::filesystem::path& path, const std::string& what) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError(what + " does not exist: " + path.string());
  }
}

llm::EndpointConfig endpoint_from_json(const nlohmann::json& json) {
  llm::EndpointConfig config;
  config.endpoint = json.value("endpoint", "");
  config.model = json.value("model", "");
  if (json.contains("api_key")) config.api_key = json["api_key"].get<std::string>();
  config.timeout = std::chrono::milliseconds(json.value("timeout_ms", 60000));
  config.retry.max_retries = json.value("max_retries", std::size_t{2});
  return config;
}

LlmSpec llm_spec_from_json(const nlohmann::json& json, const std::filesystem::path& base) {
  LlmSpec spec;
  spec.kind = json.value("kind", "http");
  if (spec.kind == "scripted") {
    if (!json.contains("script")) throw ConfigError("scripted llm needs a \"script\" path");
    spec.script = resolve(base, json["script"].get<std::string>());
    require_exists(spec.script, "llm script");
  } else if (spec.kind == "http") {
    spec.endpoint = endpoint_from_json(json);
    if (spec.endpoint.endpoint.empty()) throw ConfigError("http llm needs an \"endpoint\"");
  } else {
    throw ConfigError("unknown llm kind: " + spec.kind);
  }
  return spec;
}

// Script file: {"<question id>": ["chunk", ...], "*": [...]}.
std::unordered_map<std::string, std::vector<std::string>> load_script(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open llm script: " + path.string());
  nlohmann::json json = nlohmann::json::parse(in, nullptr, false);
  if (json.is_discarded() || !json.is_object()) {
    throw ConfigError("llm script must be a JSON object: " + path.string());
  }
  std::unordered_map<std::string, std::vector<std::string>> script;
  for (const auto& [key, value] : json.items()) {
    if (!value.is_array()) throw ConfigError("llm script entries must be arrays of strings");
    std::vector<std::string> chunks;
    for (const nlohmann::json& chunk : value) chunks.push_back(chunk.get<std::string>());
    script[key] = std::move(chunks);
  }
  return script;
}

nlohmann::ordered_json agent_config_json(const agent::AgentConfig& config) {
  return {{"max_search_calls", config.max_search_calls},
          {"max_response_units", config.max_response_units},
          {"temperature", config.temperature},
          {"top_p", config.top_p},
          {"doc_top_k", config.doc_top_k},
          {"kg_filter_limit", config.kg_filter_limit}};
}

nlohmann::ordered_json reward_config_json(const rewards::RewardConfig& config) {
  return {{"n", config.n},
          {"alpha", config.alpha},
          {"gamma", config.gamma},
          {"beta", config.beta}};
}

struct MetricTriple {
  double f1 = 0.0;
  double cem = 0.0;
  double em = 0.0;
};

MetricTriple best_metrics(const std::string& answer, const std::vector<std::string>& golds) {
  MetricTriple best;
  for (const std::string& gold : golds) {
    best.f1 = std::max(best.f1, rewards::f1_score(answer, gold));
    best.cem = std::max(best.cem, static_cast<double>(rewards::cem(answer, gold)));
    best.em = std::max(best.em, static_cast<double>(rewards::em(answer, gold)));
  }
  return best;
}

}  // namespace

void EvalReport::recompute_aggregates() {
  mean_f1 = mean_cem = mean_em = 0.0;
  if (rows.empty()) return;
  for (const QuestionRow& row : rows) {
    mean_f1 += row.f1;
    mean_cem += row.cem;
    mean_em += row.em;
  }
  mean_f1 /= static_cast<double>(rows.size());
  mean_cem /= static_cast<double>(rows.size());
  mean_em /= static_cast<double>(rows.size());
}

std::optional<ReportFormat> report_format_from_string(const std::string& name) {
  if (name == "table") return ReportFormat::Table;
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  return std::nullopt;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest: " + path.string());
  nlohmann::json json = nlohmann::json::parse(in, nullptr, false);
  if (json.is_discarded() || !json.is_object()) {
    throw ConfigError("manifest must be a JSON object: " + path.string());
  }
  std::filesystem::path base = path.parent_path();

  RunManifest manifest;
  if (!json.contains("dataset")) throw ConfigError("manifest is missing \"dataset\"");
  manifest.dataset = resolve(base, json["dataset"].get<std::string>());
  require_exists(manifest.dataset, "dataset");

  if (json.contains("corpus")) {
    manifest.corpus = resolve(base, json["corpus"].get<std::string>());
    require_exists(*manifest.corpus, "corpus");
  }

  if (json.contains("kg")) {
    const nlohmann::json& kg = json["kg"];
    for (const nlohmann::json& item : kg.value("triples", nlohmann::json::array())) {
      std::filesystem::path p = resolve(base, item.get<std::string>());
      require_exists(p, "kg triple file");
      manifest.kg_triples.push_back(std::move(p));
    }
    if (kg.contains("entity_aliases")) {
      manifest.kg_entity_aliases = resolve(base, kg["entity_aliases"].get<std::string>());
      require_exists(*manifest.kg_entity_aliases, "kg entity alias file");
    }
    if (kg.contains("relation_aliases")) {
      manifest.kg_relation_aliases = resolve(base, kg["relation_aliases"].get<std::string>());
      require_exists(*manifest.kg_relation_aliases, "kg relation alias file");
    }
    if (!manifest.kg_triples.empty() &&
        (!manifest.kg_entity_aliases || !manifest.kg_relation_aliases)) {
      throw ConfigError("kg triples need entity_aliases and relation_aliases");
    }
  }

  if (json.contains("provider")) {
    const nlohmann::json& provider = json["provider"];
    std::string kind = provider.value("kind", "local-lexical");
    if (kind == "local-lexical") manifest.provider.kind = docs::ProviderKind::LocalLexical;
    else if (kind == "remote-dense") manifest.provider.kind = docs::ProviderKind::RemoteDense;
    else if (kind == "web") manifest.provider.kind = docs::ProviderKind::Web;
    else throw ConfigError("unknown provider kind: " + kind);
    if (provider.contains("endpoint")) {
      manifest.provider.endpoint = provider["endpoint"].get<std::string>();
    }
    if (provider.contains("api_key")) {
      manifest.provider.api_key = provider["api_key"].get<std::string>();
    }
    manifest.provider.top_k = provider.value("top_k", std::size_t{5});
    manifest.provider.timeout =
        std::chrono::milliseconds(provider.value("timeout_ms", 30000));
    manifest.provider.max_concurrent = provider.value("max_concurrent", std::size_t{8});
  }
  if (manifest.provider.kind == docs::ProviderKind::LocalLexical && !manifest.corpus) {
    throw ConfigError("local-lexical provider needs a \"corpus\" path");
  }
  if (manifest.provider.kind == docs::ProviderKind::RemoteDense && !manifest.provider.endpoint) {
    throw ConfigError("remote-dense provider needs an \"endpoint\"");
  }

  if (!json.contains("llm")) throw ConfigError("manifest is missing \"llm\"");
  manifest.llm = llm_spec_from_json(json["llm"], base);

  if (json.contains("filters")) {
    const nlohmann::json& filters = json["filters"];
    manifest.filter_docs = filters.value("docs", false);
    manifest.use_llm_filter = filters.value("use_llm", false);
    if (filters.contains("llm")) {
      manifest.filter_llm = llm_spec_from_json(filters["llm"], base);
    }
  }

  if (json.contains("agent")) {
    const nlohmann::json& agent = json["agent"];
    manifest.agent.max_search_calls =
        agent.value("max_search_calls", manifest.agent.max_search_calls);
    manifest.agent.max_response_units =
        agent.value("max_response_units", manifest.agent.max_response_units);
    manifest.agent.temperature = agent.value("temperature", manifest.agent.temperature);
    manifest.agent.top_p = agent.value("top_p", manifest.agent.top_p);
    manifest.agent.doc_top_k = agent.value("doc_top_k", manifest.agent.doc_top_k);
    manifest.agent.kg_filter_limit =
        agent.value("kg_filter_limit", manifest.agent.kg_filter_limit);
  }

  if (json.contains("rewards")) {
    const nlohmann::json& rewards_json = json["rewards"];
    manifest.rewards.n = rewards_json.value("n", manifest.rewards.n);
    manifest.rewards.alpha = rewards_json.value("alpha", manifest.rewards.alpha);
    manifest.rewards.gamma = rewards_json.value("gamma", manifest.rewards.gamma);
    manifest.rewards.beta = rewards_json.value("beta", manifest.rewards.beta);
  }

  if (!json.contains("output_dir")) throw ConfigError("manifest is missing \"output_dir\"");
  manifest.output_dir = resolve(base, json["output_dir"].get<std::string>());
  manifest.parallelism = json.value("parallelism", std::size_t{4});
  manifest.seed = json.value("seed", std::uint64_t{0});
  return manifest;
}

std::vector<rewards::GoldRecord> load_dataset(const std::filesystem::path& path,
                                              std::vector<std::string>* errors) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open dataset: " + path.string());
  std::vector<rewards::GoldRecord> records;
  std::string line;
  std::size_t line_no = 0;
  auto report = [&](const std::string& why) {
    if (errors != nullptr) {
      errors->push_back(path.string() + ":" + std::to_string(line_no) + ": " + why);
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json json = nlohmann::json::parse(line, nullptr, false);
    if (json.is_discarded() || !json.is_object()) {
      report("invalid JSON");
      continue;
    }
    rewards::GoldRecord record;
    record.id = json.value("id", "");
    record.question = json.value("question", "");
    if (record.id.empty() || record.question.empty()) {
      report("missing id or question");
      continue;
    }
    if (!json.contains("answers") || !json["answers"].is_array() || json["answers"].empty()) {
      report("missing non-empty \"answers\"");
      continue;
    }
    bool bad = false;
    for (const nlohmann::json& answer : json["answers"]) {
      if (!answer.is_string()) {
        bad = true;
        break;
      }
      record.answers.push_back(answer.get<std::string>());
    }
    if (bad) {
      report("\"answers\" must hold strings");
      continue;
    }
    if (json.contains("supporting_titles") && json["supporting_titles"].is_array()) {
      for (const nlohmann::json& title : json["supporting_titles"]) {
        if (title.is_string()) record.supporting_titles.push_back(title.get<std::string>());
      }
    }
    record.hops = json.value("hops", std::size_t{1});
    if (record.hops < 1) {
      report("\"hops\" must be >= 1");
      continue;
    }
    records.push_back(std::move(record));
  }
  if (records.empty()) throw LoadError("no valid records in dataset: " + path.string());
  return records;
}

namespace {

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json json;
  json["dataset"] = report.dataset;
  json["aggregates"] = {{"f1", report.mean_f1}, {"cem", report.mean_cem}, {"em", report.mean_em}};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const QuestionRow& row : report.rows) {
    rows.push_back({{"id", row.id},
                    {"answer", row.answer},
                    {"f1", row.f1},
                    {"cem", row.cem},
                    {"em", row.em},
                    {"t", row.t},
                    {"termination", row.termination}});
  }
  json["rows"] = std::move(rows);
  json["metadata"] = report.metadata.is_null() ? nlohmann::ordered_json::object()
                                               : report.metadata;
  json["incomplete"] = report.incomplete;
  json["errors"] = report.errors;
  return json;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json:
      return report_to_json(report).dump(2) + "\n";
    case ReportFormat::Csv: {
      std::string out = "id,answer,f1,cem,em,t,termination\n";
      for (const QuestionRow& row : report.rows) {
        out += csv_escape(row.id) + "," + csv_escape(row.answer) + "," + format_double(row.f1) +
               "," + format_double(row.cem) + "," + format_double(row.em) + "," +
               std::to_string(row.t) + "," + csv_escape(row.termination) + "\n";
      }
      return out;
    }
    case ReportFormat::Table: {
      std::ostringstream out;
      out << "Dataset";
      out << std::string(report.dataset.size() > 7 ? 2 : 9 - report.dataset.size(), ' ');
      out << "N      F1     CEM    EM\n";
      if (!report.rows.empty() || !report.dataset.empty()) {
        char line[256];
        std::snprintf(line, sizeof(line), "%-8s %-6zu %-6s %-6s %-6s\n",
                      report.dataset.empty() ? "-" : report.dataset.c_str(), report.rows.size(),
                      format_percent(report.mean_f1).c_str(),
                      format_percent(report.mean_cem).c_str(),
                      format_percent(report.mean_em).c_str());
        out << line;
      }
      if (report.incomplete) out << "(incomplete run: " << report.errors.size() << " errors)\n";
      return out.str();
    }
  }
  return {};
}

EvalReport report_from_json(const std::string& json_text) {
  nlohmann::json json = nlohmann::json::parse(json_text, nullptr, false);
  if (json.is_discarded() || !json.is_object()) throw LoadError("invalid report JSON");
  EvalReport report;
  report.dataset = json.value("dataset", "");
  for (const nlohmann::json& item : json.value("rows", nlohmann::json::array())) {
    QuestionRow row;
    row.id = item.value("id", "");
    row.answer = item.value("answer", "");
    row.f1 = item.value("f1", 0.0);
    row.cem = item.value("cem", 0.0);
    row.em = item.value("em", 0.0);
    row.t = item.value("t", std::size_t{0});
    row.termination = item.value("termination", "");
    report.rows.push_back(std::move(row));
  }
  if (json.contains("metadata")) report.metadata = json["metadata"];
  report.incomplete = json.value("incomplete", false);
  for (const nlohmann::json& e : json.value("errors", nlohmann::json::array())) {
    if (e.is_string()) report.errors.push_back(e.get<std::string>());
  }
  report.recompute_aggregates();
  return report;
}

EvalReport report_from_csv(const std::string& csv_text) {
  EvalReport report;
  std::istringstream in(csv_text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> fields = csv_split(line);
    if (fields.size() != 7) throw LoadError("csv row needs 7 fields, got " +
                                            std::to_string(fields.size()));
    QuestionRow row;
    row.id = fields[0];
    row.answer = fields[1];
    row.f1 = std::stod(fields[2]);
    row.cem = std::stod(fields[3]);
    row.em = std::stod(fields[4]);
    row.t = static_cast<std::size_t>(std::stoull(fields[5]));
    row.termination = fields[6];
    report.rows.push_back(std::move(row));
  }
  report.recompute_aggregates();
  return report;
}

EvalReport evaluate(const RunManifest& manifest) {
  std::vector<std::string> dataset_errors;
  std::vector<rewards::GoldRecord> records = load_dataset(manifest.dataset, &dataset_errors);

  std::optional<kg::KnowledgeStore> store;
  if (!manifest.kg_triples.empty()) {
    store = kg::KnowledgeStore::load(manifest.kg_triples, *manifest.kg_entity_aliases,
                                     *manifest.kg_relation_aliases);
  }

  std::unique_ptr<docs::DocProvider> provider;
  switch (manifest.provider.kind) {
    case docs::ProviderKind::LocalLexical:
      provider = std::make_unique<docs::LocalLexicalProvider>(
          docs::LexicalIndex::build(docs::load_corpus_jsonl(*manifest.corpus)));
      break;
    case docs::ProviderKind::RemoteDense:
      provider = docs::make_remote_dense_provider(manifest.provider);
      break;
    case docs::ProviderKind::Web:
      provider = docs::make_web_provider(manifest.provider);
      break;
  }

  std::unordered_map<std::string, std::vector<std::string>> script;
  if (manifest.llm.kind == "scripted") script = load_script(manifest.llm.script);

  auto make_client = [&](const std::string& id) -> std::unique_ptr<llm::Client> {
    if (manifest.llm.kind == "scripted") {
      auto it = script.find(id);
      if (it == script.end()) it = script.find("*");
      return std::make_unique<llm::ScriptedClient>(
          it != script.end() ? it->second : std::vector<std::string>{});
    }
    return llm::make_http_client(manifest.llm.endpoint);
  };

  std::unique_ptr<llm::Client> filter_client;
  if (manifest.use_llm_filter) {
    const LlmSpec& spec = manifest.filter_llm ? *manifest.filter_llm : manifest.llm;
    if (spec.kind == "http") {
      filter_client = llm::make_http_client(spec.endpoint);
    } else {
      log::warn("llm filter requested with a scripted policy model; using deterministic filters");
    }
  }

  agent::AgentConfig agent_config = manifest.agent;
  agent_config.doc_top_k = manifest.provider.top_k;
  agent::Filters filters;
  filters.client = filter_client.get();
  filters.docs_enabled = manifest.filter_docs;

  EvalReport report;
  report.dataset = manifest.dataset.stem().string();
  report.errors = dataset_errors;
  report.rows.resize(records.size());

  std::vector<std::string> trajectory_lines(records.size());
  std::vector<std::string> run_errors(records.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    while (true) {
      std::size_t index = next.fetch_add(1);
      if (index >= records.size()) break;
      const rewards::GoldRecord& gold = records[index];
      try {
        std::unique_ptr<llm::Client> client = make_client(gold.id);
        agent::RolloutResult rollout = agent::run_rollout(
            gold.question, *client, provider.get(), store ? &*store : nullptr, agent_config,
            filters);
        rewards::RewardBreakdown breakdown = rewards::score_trajectory(
            rollout.trajectory, gold, rollout.retrieval_log, manifest.rewards);

        MetricTriple metrics = best_metrics(breakdown.answer_text, gold.answers);
        QuestionRow row;
        row.id = gold.id;
        row.answer = breakdown.answer_text;
        row.f1 = metrics.f1;
        row.cem = metrics.cem;
        row.em = metrics.em;
        row.t = rollout.trajectory.retrieval_count();
        row.termination = to_string(rollout.termination);
        report.rows[index] = std::move(row);

        protocol::TrajectoryRecord record;
        record.id = gold.id;
        record.question = gold.question;
        record.trajectory = rollout.trajectory;
        if (rollout.trajectory.answer() != nullptr) record.answer = breakdown.answer_text;
        record.retrieval = rollout.retrieval_log;
        trajectory_lines[index] = protocol::to_jsonl_line(record);
      } catch (const std::exception& e) {
        run_errors[index] = gold.id + ": " + e.what();
        QuestionRow row;
        row.id = gold.id;
        row.termination = "error";
        report.rows[index] = std::move(row);
      }
    }
  };

  std::size_t workers = std::max<std::size_t>(1, std::min(manifest.parallelism, records.size()));
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  for (const std::string& e : run_errors) {
    if (!e.empty()) {
      report.errors.push_back(e);
      report.incomplete = true;
    }
  }
  if (!dataset_errors.empty()) report.incomplete = true;
  report.recompute_aggregates();

  report.metadata = nlohmann::ordered_json{
      {"dataset", manifest.dataset.string()},
      {"corpus", manifest.corpus ? manifest.corpus->string() : ""},
      {"kg_triples", manifest.kg_triples.size()},
      {"provider_kind", docs::to_string(manifest.provider.kind)},
      {"llm_kind", manifest.llm.kind},
      {"seed", manifest.seed},
      {"parallelism", manifest.parallelism},
      {"agent", agent_config_json(agent_config)},
      {"rewards", reward_config_json(manifest.rewards)}};

  std::filesystem::create_directories(manifest.output_dir);
  std::string dump;
  for (const std::string& line : trajectory_lines) {
    if (!line.empty()) dump += line + "\n";
  }
  write_file(manifest.output_dir / "trajectories.jsonl", dump);
  write_file(manifest.output_dir / "report.json", render_report(report, ReportFormat::Json));
  return report;
}

EvalReport score_offline(const std::filesystem::path& trajectories_path,
                         const std::filesystem::path& gold_path,
                         const rewards::RewardConfig& config,
                         const std::filesystem::path& output_dir, bool* no_work) {
  std::vector<std::string> dataset_errors;
  std::vector<rewards::GoldRecord> records = load_dataset(gold_path, &dataset_errors);
  std::unordered_map<std::string, const rewards::GoldRecord*> by_id;
  for (const rewards::GoldRecord& record : records) by_id[record.id] = &record;

  std::ifstream in(trajectories_path);
  if (!in) throw LoadError("cannot open trajectories: " + trajectories_path.string());

  EvalReport report;
  report.dataset = gold_path.stem().string();
  report.errors = dataset_errors;
  std::string scores;
  std::string line;
  std::size_t line_no = 0;
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ++seen;
    protocol::TrajectoryRecord record;
    try {
      record = protocol::from_jsonl_line(line);
    } catch (const Error& e) {
      report.errors.push_back(trajectories_path.string() + ":" + std::to_string(line_no) + ": " +
                              e.what());
      report.incomplete = true;
      continue;
    }
    auto it = by_id.find(record.id);
    if (it == by_id.end()) {
      report.errors.push_back("no gold record for trajectory id " + record.id);
      report.incomplete = true;
      continue;
    }
    const rewards::GoldRecord& gold = *it->second;
    rewards::RewardBreakdown breakdown =
        rewards::score_trajectory(record.trajectory, gold, record.retrieval, config);
    protocol::LossMask mask = protocol::compute_loss_mask(record.trajectory);

    MetricTriple metrics = best_metrics(breakdown.answer_text, gold.answers);
    QuestionRow row;
    row.id = record.id;
    row.answer = breakdown.answer_text;
    row.f1 = metrics.f1;
    row.cem = metrics.cem;
    row.em = metrics.em;
    row.t = record.trajectory.retrieval_count();
    row.termination = record.trajectory.answer() != nullptr ? "answered" : "unanswered";
    report.rows.push_back(std::move(row));

    nlohmann::ordered_json masked = nlohmann::ordered_json::array();
    for (const protocol::ByteSpan& span : mask.masked) {
      masked.push_back({span.begin, span.end});
    }
    nlohmann::ordered_json score{
        {"id", record.id},
        {"format_ok", breakdown.format_ok},
        {"r_ans", breakdown.r_ans},
        {"r_acc", breakdown.r_acc},
        {"r_recall", breakdown.r_recall},
        {"r_penalty", breakdown.r_penalty},
        {"r_gain", breakdown.r_gain},
        {"r_overall", breakdown.r_overall},
        {"loss_mask", {{"length", mask.length}, {"masked", std::move(masked)}}}};
    scores += score.dump() + "\n";
  }
  if (no_work != nullptr) *no_work = seen == 0;
  report.recompute_aggregates();
  report.metadata = nlohmann::ordered_json{{"trajectories", trajectories_path.string()},
                                           {"gold", gold_path.string()},
                                           {"rewards", reward_config_json(config)}};

  std::filesystem::create_directories(output_dir);
  write_file(output_dir / "scores.jsonl", scores);
  write_file(output_dir / "report.json", render_report(report, ReportFormat::Json));
  return report;
}

}  // namespace hopsearch::eval
