#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hopsearch/errors.hpp"
#include "hopsearch/eval.hpp"
#include "hopsearch/kg.hpp"
#include "hopsearch/kg_service.hpp"

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hopsearch::Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agentic search rollouts with document + knowledge-graph retrieval"};
  app.require_subcommand(1);

  // run
  std::string manifest_path;
  CLI::App* run = app.add_subcommand("run", "Run a full evaluation from a manifest");
  run->add_option("--manifest", manifest_path, "Run manifest (JSON)")->required();

  // score
  std::string trajectories_path;
  std::string gold_path;
  std::string score_output = "scores";
  hopsearch::rewards::RewardConfig reward_config;
  CLI::App* score = app.add_subcommand("score", "Score a trajectory dump offline");
  score->add_option("--trajectories", trajectories_path, "Trajectory dump (JSONL)")->required();
  score->add_option("--gold", gold_path, "Gold dataset (JSONL)")->required();
  score->add_option("--output", score_output, "Output directory");
  score->add_option("--n", reward_config.n, "Answer-length multiple");
  score->add_option("--alpha", reward_config.alpha, "Gain scale");
  score->add_option("--gamma", reward_config.gamma, "Penalty decay");
  score->add_option("--beta", reward_config.beta, "Penalty lower bound");

  // report
  std::string report_input;
  std::string report_format = "table";
  CLI::App* report = app.add_subcommand("report", "Re-render a report");
  report->add_option("--input", report_input, "Report file (JSON or CSV)")->required();
  report->add_option("--format", report_format, "table, json, or csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));

  // kg serve
  CLI::App* kg = app.add_subcommand("kg", "Knowledge graph utilities");
  kg->require_subcommand(1);
  std::vector<std::string> triple_paths;
  std::string entity_aliases;
  std::string relation_aliases;
  std::string host = "0.0.0.0";
  int port = 8080;
  CLI::App* serve = kg->add_subcommand("serve", "Serve POST /kg/search over HTTP");
  serve->add_option("--triples", triple_paths, "Triple files (TSV)")->required();
  serve->add_option("--entity-aliases", entity_aliases, "Entity alias file")->required();
  serve->add_option("--relation-aliases", relation_aliases, "Relation alias file")->required();
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      hopsearch::eval::RunManifest manifest = hopsearch::eval::load_manifest(manifest_path);
      hopsearch::eval::EvalReport result = hopsearch::eval::evaluate(manifest);
      std::cout << hopsearch::eval::render_report(result, hopsearch::eval::ReportFormat::Table);
      std::cout << "report: " << (manifest.output_dir / "report.json").string() << "\n"
                << "trajectories: " << (manifest.output_dir / "trajectories.jsonl").string()
                << "\n";
      return result.incomplete ? 1 : 0;
    }

    if (*score) {
      bool no_work = false;
      hopsearch::eval::EvalReport result = hopsearch::eval::score_offline(
          trajectories_path, gold_path, reward_config, score_output, &no_work);
      std::cout << hopsearch::eval::render_report(result, hopsearch::eval::ReportFormat::Table);
      if (no_work) {
        std::cerr << "no trajectories to score\n";
        return 2;
      }
      return result.incomplete ? 1 : 0;
    }

    if (*report) {
      std::string content = read_file(report_input);
      hopsearch::eval::EvalReport parsed =
          std::filesystem::path(report_input).extension() == ".csv"
              ? hopsearch::eval::report_from_csv(content)
              : hopsearch::eval::report_from_json(content);
      std::cout << hopsearch::eval::render_report(
          parsed, *hopsearch::eval::report_format_from_string(report_format));
      return 0;
    }

    if (*serve) {
      std::vector<std::filesystem::path> triples(triple_paths.begin(), triple_paths.end());
      hopsearch::kg::KnowledgeStore store =
          hopsearch::kg::KnowledgeStore::load(triples, entity_aliases, relation_aliases);
      std::cerr << "loaded " << store.triple_count() << " triples, " << store.entity_count()
                << " entities, " << store.relation_count() << " relations\n";
      return hopsearch::kg_service::serve(store, host, port) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
