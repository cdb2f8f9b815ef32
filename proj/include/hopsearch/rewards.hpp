#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hopsearch/protocol.hpp"

namespace hopsearch::rewards {

struct RewardConfig {
  std::size_t n = 3;    // answer-length multiple picking the F1 vs CEM branch
  double alpha = 0.5;   // gain scale
  double gamma = 0.9;   // penalty decay, in (0, 1]
  double beta = -0.2;   // penalty lower bound
};

struct GoldRecord {
  std::string id;
  std::string question;
  std::vector<std::string> answers;            // non-empty
  std::vector<std::string> supporting_titles;  // retrieval ground truth
  std::size_t hops = 1;                        // gold hop / sub-question count
};

// Per-search-step lists of retrieved document titles, one entry per Search
// segment of the scored trajectory.
using RetrievalLog = std::vector<std::vector<std::string>>;

// Optional similarity hook for recall matching; the default matcher is
// normalized-title equality.
struct RecallMatcher {
  std::function<double(const std::string& retrieved, const std::string& gold)> similarity;
  double threshold = 0.8;
};

struct RewardBreakdown {
  bool format_ok = false;
  double r_ans = 0.0;
  double r_acc = 0.0;
  double r_recall = 0.0;
  double r_penalty = 0.0;
  double r_gain = 0.0;
  double r_overall = 0.0;

  std::string answer_text;             // what was scored (boxed span or fallback)
  std::vector<double> per_step_recall; // diagnostics, cumulative per search step
};

std::vector<std::string> normalize_answer(const std::string& text);

// Word-level F1 over normalized token multisets. 1 when both sides normalize
// to empty, 0 when only one does.
double f1_score(const std::string& pred, const std::string& gold);

// 1 iff the normalized gold tokens occur contiguously inside the normalized
// prediction tokens.
int cem(const std::string& pred, const std::string& gold);

// 1 iff normalized token sequences are equal.
int em(const std::string& pred, const std::string& gold);

// Per gold answer: F1 when the prediction is at least n times the gold length
// (in normalized words), CEM otherwise; the result is the maximum over golds.
double answer_reward(const std::string& pred, const std::vector<std::string>& golds,
                     std::size_t n);

// max(0.1, r_ans) gated on format correctness.
double accuracy_reward(bool format_ok, double r_ans);

// TP / (TP + FN) where TP counts gold supporting titles matched by any
// retrieved title across all steps. An empty gold set scores 1.0 with a
// warning. `per_step` receives the cumulative recall after each step.
double recall_reward(const RetrievalLog& retrieved, const GoldRecord& gold,
                     const RecallMatcher* matcher = nullptr,
                     std::vector<double>* per_step = nullptr);

// max(beta, 1 - gamma^(t - i)).
double penalty_reward(std::size_t t, std::size_t i, double gamma, double beta);

// alpha * (r_recall - r_penalty).
double gain_reward(double r_recall, double r_penalty, double alpha);

// r_acc + r_gain.
double overall_reward(double r_acc, double r_gain);

// Full composition over a parsed trajectory: format validation, boxed-answer
// extraction (full answer text as fallback), then the reward stack with
// t = number of Search segments and i = gold.hops.
RewardBreakdown score_trajectory(const protocol::Trajectory& trajectory, const GoldRecord& gold,
                                 const RetrievalLog& log, const RewardConfig& config = {},
                                 const RecallMatcher* matcher = nullptr);

}  // namespace hopsearch::rewards
