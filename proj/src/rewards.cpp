#include "hopsearch/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "hopsearch/log.hpp"
#include "hopsearch/text.hpp"

namespace hopsearch::rewards {

std::vector<std::string> normalize_answer(const std::string& text) {
  return text::answer_tokens(text);
}

double f1_score(const std::string& pred, const std::string& gold) {
  std::vector<std::string> p = normalize_answer(pred);
  std::vector<std::string> g = normalize_answer(gold);
  if (p.empty() && g.empty()) return 1.0;
  if (p.empty() || g.empty()) return 0.0;

  std::unordered_map<std::string, std::size_t> gold_counts;
  for (const std::string& token : g) ++gold_counts[token];
  std::size_t overlap = 0;
  for (const std::string& token : p) {
    auto it = gold_counts.find(token);
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  double precision = static_cast<double>(overlap) / static_cast<double>(p.size());
  double recall = static_cast<double>(overlap) / static_cast<double>(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

int cem(const std::string& pred, const std::string& gold) {
  std::vector<std::string> p = normalize_answer(pred);
  std::vector<std::string> g = normalize_answer(gold);
  if (g.empty()) return 1;
  if (g.size() > p.size()) return 0;
  for (std::size_t start = 0; start + g.size() <= p.size(); ++start) {
    bool match = true;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (p[start + i] != g[i]) {
        match = false;
        break;
      }
    }
    if (match) return 1;
  }
  return 0;
}

int em(const std::string& pred, const std::string& gold) {
  return normalize_answer(pred) == normalize_answer(gold) ? 1 : 0;
}

double answer_reward(const std::string& pred, const std::vector<std::string>& golds,
                     std::size_t n) {
  std::size_t pred_len = normalize_answer(pred).size();
  double best = 0.0;
  for (const std::string& gold : golds) {
    std::size_t gold_len = normalize_answer(gold).size();
    double value = pred_len >= n * gold_len ? f1_score(pred, gold)
                                            : static_cast<double>(cem(pred, gold));
    best = std::max(best, value);
  }
  return best;
}

double accuracy_reward(bool format_ok, double r_ans) {
  return format_ok ? std::max(0.1, r_ans) : 0.0;
}

double recall_reward(const RetrievalLog& retrieved, const GoldRecord& gold,
                     const RecallMatcher* matcher, std::vector<double>* per_step) {
  if (per_step != nullptr) per_step->clear();
  if (gold.supporting_titles.empty()) {
    log::warn("recall: gold record " + gold.id + " has no supporting titles, scoring 1.0");
    if (per_step != nullptr) per_step->assign(retrieved.size(), 1.0);
    return 1.0;
  }

  auto matches = [&](const std::string& candidate, const std::string& target) {
    if (matcher != nullptr && matcher->similarity) {
      return matcher->similarity(candidate, target) >= matcher->threshold;
    }
    return text::normalize_surface(candidate) == text::normalize_surface(target);
  };

  std::vector<bool> found(gold.supporting_titles.size(), false);
  std::size_t tp = 0;
  const double total = static_cast<double>(gold.supporting_titles.size());
  for (const std::vector<std::string>& step : retrieved) {
    for (const std::string& title : step) {
      for (std::size_t g = 0; g < gold.supporting_titles.size(); ++g) {
        if (!found[g] && matches(title, gold.supporting_titles[g])) {
          found[g] = true;
          ++tp;
        }
      }
    }
    if (per_step != nullptr) per_step->push_back(static_cast<double>(tp) / total);
  }
  return static_cast<double>(tp) / total;
}

double penalty_reward(std::size_t t, std::size_t i, double gamma, double beta) {
  double exponent = static_cast<double>(t) - static_cast<double>(i);
  return std::max(beta, 1.0 - std::pow(gamma, exponent));
}

double gain_reward(double r_recall, double r_penalty, double alpha) {
  return alpha * (r_recall - r_penalty);
}

double overall_reward(double r_acc, double r_gain) { return r_acc + r_gain; }

RewardBreakdown score_trajectory(const protocol::Trajectory& trajectory, const GoldRecord& gold,
                                 const RetrievalLog& log, const RewardConfig& config,
                                 const RecallMatcher* matcher) {
  RewardBreakdown breakdown;
  breakdown.format_ok = protocol::validate_format(trajectory);

  if (const protocol::Segment* answer = trajectory.answer()) {
    try {
      breakdown.answer_text = protocol::extract_boxed_answer(answer->text);
    } catch (const ExtractionError&) {
      breakdown.answer_text = answer->text;  // fall back to the full answer block
    }
    breakdown.r_ans = answer_reward(breakdown.answer_text, gold.answers, config.n);
  }

  breakdown.r_acc = accuracy_reward(breakdown.format_ok, breakdown.r_ans);
  breakdown.r_recall = recall_reward(log, gold, matcher, &breakdown.per_step_recall);
  breakdown.r_penalty =
      penalty_reward(trajectory.retrieval_count(), gold.hops, config.gamma, config.beta);
  breakdown.r_gain = gain_reward(breakdown.r_recall, breakdown.r_penalty, config.alpha);
  breakdown.r_overall = overall_reward(breakdown.r_acc, breakdown.r_gain);
  return breakdown;
}

}  // namespace hopsearch::rewards
