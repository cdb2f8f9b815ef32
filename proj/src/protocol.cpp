#include "hopsearch/protocol.hpp"

#include <algorithm>
#include <array>

#include <json.hpp>

#include "hopsearch/errors.hpp"

namespace hopsearch::protocol {
namespace {

constexpr std::array<SegmentKind, 4> kKinds = {SegmentKind::Think, SegmentKind::Search,
                                               SegmentKind::Result, SegmentKind::Answer};

const std::array<std::string, 4> kOpen = {"<think>", "<search>", "<result>", "<answer>"};
const std::array<std::string, 4> kClose = {"</think>", "</search>", "</result>", "</answer>"};
const std::array<std::string, 4> kNames = {"think", "search", "result", "answer"};

std::size_t index_of(SegmentKind kind) { return static_cast<std::size_t>(kind); }

bool whitespace_only(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

struct TagHit {
  std::size_t pos = 0;
  SegmentKind kind = SegmentKind::Think;
  bool closing = false;
};

// Earliest delimiter token at or after `from`.
std::optional<TagHit> next_tag(const std::string& text, std::size_t from) {
  for (std::size_t pos = text.find('<', from); pos != std::string::npos;
       pos = text.find('<', pos + 1)) {
    for (SegmentKind kind : kKinds) {
      if (text.compare(pos, kOpen[index_of(kind)].size(), kOpen[index_of(kind)]) == 0) {
        return TagHit{pos, kind, false};
      }
      if (text.compare(pos, kClose[index_of(kind)].size(), kClose[index_of(kind)]) == 0) {
        return TagHit{pos, kind, true};
      }
    }
  }
  return std::nullopt;
}

}  // namespace

const std::string& open_tag(SegmentKind kind) { return kOpen[index_of(kind)]; }
const std::string& close_tag(SegmentKind kind) { return kClose[index_of(kind)]; }
std::string to_string(SegmentKind kind) { return kNames[index_of(kind)]; }

std::optional<SegmentKind> segment_kind_from_string(const std::string& name) {
  for (SegmentKind kind : kKinds) {
    if (kNames[index_of(kind)] == name) return kind;
  }
  return std::nullopt;
}

std::size_t Trajectory::retrieval_count() const {
  return static_cast<std::size_t>(
      std::count_if(segments.begin(), segments.end(),
                    [](const Segment& s) { return s.kind == SegmentKind::Search; }));
}

const Segment* Trajectory::answer() const {
  if (!segments.empty() && segments.back().kind == SegmentKind::Answer) return &segments.back();
  return nullptr;
}

Trajectory parse_trajectory(const std::string& trajectory_text) {
  Trajectory trajectory;
  trajectory.text_length = trajectory_text.size();

  auto flush_stray = [&](std::size_t begin, std::size_t end) {
    if (end <= begin) return;
    std::string text = trajectory_text.substr(begin, end - begin);
    bool ws = whitespace_only(text);
    trajectory.stray.push_back({std::move(text), {begin, end}, ws});
  };

  std::size_t pos = 0;
  bool saw_answer = false;
  while (pos < trajectory_text.size()) {
    std::optional<TagHit> tag = next_tag(trajectory_text, pos);
    if (!tag) {
      flush_stray(pos, trajectory_text.size());
      break;
    }
    if (tag->closing) {
      throw ParseError("closing " + kClose[index_of(tag->kind)] + " without matching opener",
                       tag->pos);
    }
    flush_stray(pos, tag->pos);

    const std::size_t seg_start = tag->pos;
    const SegmentKind kind = tag->kind;
    if (saw_answer) {
      throw ParseError("segment after the answer block", seg_start);
    }
    const std::size_t text_start = seg_start + kOpen[index_of(kind)].size();

    std::optional<TagHit> closer = next_tag(trajectory_text, text_start);
    if (!closer) {
      throw ParseError("unclosed " + kOpen[index_of(kind)] + " block", seg_start);
    }
    if (!closer->closing && closer->kind == kind) {
      throw ParseError("nested " + kOpen[index_of(kind)] + " block", closer->pos);
    }
    if (!closer->closing || closer->kind != kind) {
      throw ParseError("interleaved delimiter inside " + kOpen[index_of(kind)] + " block",
                       closer->pos);
    }

    Segment segment;
    segment.kind = kind;
    segment.text = trajectory_text.substr(text_start, closer->pos - text_start);
    segment.span = {seg_start, closer->pos + kClose[index_of(kind)].size()};
    trajectory.segments.push_back(std::move(segment));
    if (kind == SegmentKind::Answer) saw_answer = true;
    pos = trajectory.segments.back().span.end;
  }
  return trajectory;
}

std::string serialize_trajectory(const Trajectory& trajectory) {
  std::string out;
  for (const Segment& segment : trajectory.segments) {
    out += kOpen[index_of(segment.kind)];
    out += segment.text;
    out += kClose[index_of(segment.kind)];
  }
  return out;
}

SearchRequest parse_search_request(const std::string& payload,
                                   std::vector<std::string>* warnings) {
  nlohmann::json json = nlohmann::json::parse(payload, nullptr, false);
  if (json.is_discarded() || !json.is_object()) {
    throw RequestError("search payload is not a JSON object");
  }
  SearchRequest request;
  for (const auto& [key, value] : json.items()) {
    if (key == "query") {
      if (!value.is_string()) throw RequestError("\"query\" must be a string");
      request.query = value.get<std::string>();
    } else if (key == "entity" || key == "relation") {
      if (!value.is_array()) throw RequestError("\"" + key + "\" must be an array of strings");
      std::vector<std::string>& out =
          key == "entity" ? request.entities : request.relations;
      for (const nlohmann::json& item : value) {
        if (!item.is_string()) throw RequestError("\"" + key + "\" must be an array of strings");
        out.push_back(item.get<std::string>());
      }
    } else if (warnings != nullptr) {
      warnings->push_back("unknown key \"" + key + "\" ignored");
    }
  }
  if (request.query.empty()) throw RequestError("search payload is missing a non-empty \"query\"");
  return request;
}

std::string extract_boxed_answer(const std::string& answer_text) {
  static const std::string kMarker = "\\boxed{";
  std::optional<std::string> last;
  std::size_t pos = 0;
  while (true) {
    std::size_t start = answer_text.find(kMarker, pos);
    if (start == std::string::npos) break;
    std::size_t body = start + kMarker.size();
    int depth = 1;
    std::size_t i = body;
    for (; i < answer_text.size(); ++i) {
      if (answer_text[i] == '{') ++depth;
      if (answer_text[i] == '}' && --depth == 0) break;
    }
    if (depth == 0) {
      last = answer_text.substr(body, i - body);
      pos = i + 1;  // skip nested groups inside this one
    } else {
      pos = body;  // unbalanced; an inner group may still close
    }
  }
  if (!last) throw ExtractionError("no balanced \\boxed{...} group in answer");
  return trim(*last);
}

bool validate_format(const Trajectory& trajectory, std::vector<std::string>* diagnostics) {
  bool valid = true;
  auto reject = [&](const std::string& reason) {
    valid = false;
    if (diagnostics != nullptr) diagnostics->push_back(reason);
  };

  const std::vector<Segment>& segments = trajectory.segments;
  std::size_t i = 0;
  while (i + 2 < segments.size() && segments[i].kind == SegmentKind::Think &&
         segments[i + 1].kind == SegmentKind::Search &&
         segments[i + 2].kind == SegmentKind::Result) {
    i += 3;
  }
  if (!(i + 2 == segments.size() && segments[i].kind == SegmentKind::Think &&
        segments[i + 1].kind == SegmentKind::Answer)) {
    reject("segments do not match (think search result)* think answer");
  }

  for (const Segment& segment : segments) {
    if (segment.kind != SegmentKind::Search) continue;
    try {
      parse_search_request(segment.text);
    } catch (const RequestError& e) {
      reject(std::string("invalid search payload: ") + e.what());
    }
  }

  if (const Segment* answer = trajectory.answer()) {
    try {
      extract_boxed_answer(answer->text);
    } catch (const ExtractionError& e) {
      reject(e.what());
    }
  }

  for (const StrayText& stray : trajectory.stray) {
    if (!stray.whitespace_only) {
      reject("stray text outside delimiters at offset " + std::to_string(stray.span.begin));
      break;
    }
  }
  return valid;
}

LossMask compute_loss_mask(const Trajectory& trajectory) {
  LossMask mask;
  mask.length = trajectory.text_length;
  for (const Segment& segment : trajectory.segments) {
    if (segment.kind == SegmentKind::Result) mask.masked.push_back(segment.span);
  }
  return mask;
}

std::vector<std::uint8_t> LossMask::byte_flags() const {
  std::vector<std::uint8_t> flags(length, 1);
  for (const ByteSpan& span : masked) {
    for (std::size_t i = span.begin; i < span.end && i < length; ++i) flags[i] = 0;
  }
  return flags;
}

std::vector<std::uint8_t> LossMask::unit_flags(std::span<const std::size_t> ends) const {
  std::vector<std::uint8_t> flags(ends.size(), 1);
  std::size_t begin = 0;
  std::size_t span_idx = 0;
  for (std::size_t u = 0; u < ends.size(); ++u) {
    std::size_t end = ends[u];
    while (span_idx < masked.size() && masked[span_idx].end <= begin) ++span_idx;
    if (span_idx < masked.size() && masked[span_idx].begin < end &&
        masked[span_idx].end > begin) {
      flags[u] = 0;
    }
    begin = end;
  }
  return flags;
}

std::string to_jsonl_line(const TrajectoryRecord& record) {
  nlohmann::ordered_json json;
  json["id"] = record.id;
  json["question"] = record.question;
  nlohmann::ordered_json segments = nlohmann::ordered_json::array();
  for (const Segment& segment : record.trajectory.segments) {
    segments.push_back({{"kind", to_string(segment.kind)}, {"text", segment.text}});
  }
  json["segments"] = std::move(segments);
  json["t"] = record.trajectory.retrieval_count();
  if (record.answer) {
    json["answer"] = *record.answer;
  } else {
    json["answer"] = nullptr;
  }
  if (!record.retrieval.empty()) json["retrieval"] = record.retrieval;
  return json.dump();
}

TrajectoryRecord from_jsonl_line(const std::string& line) {
  nlohmann::json json = nlohmann::json::parse(line, nullptr, false);
  if (json.is_discarded() || !json.is_object()) {
    throw LoadError("invalid trajectory record JSON");
  }
  TrajectoryRecord record;
  record.id = json.value("id", "");
  record.question = json.value("question", "");
  if (record.id.empty()) throw LoadError("trajectory record is missing an id");

  Trajectory assembled;
  if (json.contains("segments")) {
    for (const nlohmann::json& item : json["segments"]) {
      std::optional<SegmentKind> kind = segment_kind_from_string(item.value("kind", ""));
      if (!kind) throw LoadError("trajectory record has an unknown segment kind");
      Segment segment;
      segment.kind = *kind;
      segment.text = item.value("text", "");
      assembled.segments.push_back(std::move(segment));
    }
  }
  // Re-parse the serialized form so spans and text_length are consistent.
  record.trajectory = parse_trajectory(serialize_trajectory(assembled));

  if (json.contains("answer") && json["answer"].is_string()) {
    record.answer = json["answer"].get<std::string>();
  }
  if (json.contains("retrieval") && json["retrieval"].is_array()) {
    for (const nlohmann::json& step : json["retrieval"]) {
      std::vector<std::string> titles;
      if (step.is_array()) {
        for (const nlohmann::json& title : step) {
          if (title.is_string()) titles.push_back(title.get<std::string>());
        }
      }
      record.retrieval.push_back(std::move(titles));
    }
  }
  return record;
}

}  // namespace hopsearch::protocol
