#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hopsearch::protocol {

enum class SegmentKind { Think, Search, Result, Answer };

const std::string& open_tag(SegmentKind kind);
const std::string& close_tag(SegmentKind kind);
std::string to_string(SegmentKind kind);
std::optional<SegmentKind> segment_kind_from_string(const std::string& name);

// Half-open byte range [begin, end) within the serialized trajectory.
struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

struct Segment {
  SegmentKind kind = SegmentKind::Think;
  std::string text;  // inner text, delimiters excluded
  ByteSpan span;     // full delimited region, delimiters included

  friend bool operator==(const Segment&, const Segment&) = default;
};

// Text found outside any delimiter pair. Whitespace-only runs are recorded
// too so callers can distinguish formatting noise from real stray content.
struct StrayText {
  std::string text;
  ByteSpan span;
  bool whitespace_only = false;

  friend bool operator==(const StrayText&, const StrayText&) = default;
};

struct Trajectory {
  std::vector<Segment> segments;
  std::vector<StrayText> stray;
  std::size_t text_length = 0;  // bytes of the serialized form this was parsed from

  std::size_t retrieval_count() const;  // number of Search segments
  const Segment* answer() const;        // last segment when it is an Answer
};

struct SearchRequest {
  std::string query;
  std::vector<std::string> entities;
  std::vector<std::string> relations;

  friend bool operator==(const SearchRequest&, const SearchRequest&) = default;
};

// Per-byte binary loss flags, stored as the set of masked spans. Flags are 0
// exactly over injected Result regions (delimiters included), 1 elsewhere.
struct LossMask {
  std::size_t length = 0;
  std::vector<ByteSpan> masked;  // sorted, disjoint

  std::vector<std::uint8_t> byte_flags() const;

  // Remaps to coarser units (e.g. tokenizer tokens): `ends` holds the
  // cumulative end offset of each unit; a unit is masked iff it overlaps a
  // masked byte.
  std::vector<std::uint8_t> unit_flags(std::span<const std::size_t> ends) const;
};

// Splits a trajectory string into delimited segments. The scanner runs a
// strict state machine: outside a segment only an opening tag may appear
// (anything else accumulates as stray text), and inside a segment the next
// delimiter must be the matching closing tag. A same-kind opening tag nests
// (ParseError), any other tag interleaves (ParseError), and input ending
// inside a segment leaves it unclosed (ParseError). Segments after an Answer
// and duplicate Answers violate the trajectory shape and also throw.
Trajectory parse_trajectory(const std::string& trajectory_text);

// Concatenates "<tag>text</tag>" per segment; stray text is not reproduced.
// parse_trajectory(serialize_trajectory(t)) reproduces t's segments exactly.
std::string serialize_trajectory(const Trajectory& trajectory);

// Payload of a <search> block. Missing entity/relation keys default to empty
// lists; unknown keys are ignored with a warning. Invalid JSON, a missing or
// empty query, or non-string-array entity/relation throws RequestError.
SearchRequest parse_search_request(const std::string& payload,
                                   std::vector<std::string>* warnings = nullptr);

// Contents of the last top-level balanced \boxed{...} group, trimmed.
// Throws ExtractionError when no balanced group exists.
std::string extract_boxed_answer(const std::string& answer_text);

// True iff the segments match (Think Search Result)* Think Answer, every
// Search payload parses, the Answer holds a boxed span, and no non-whitespace
// stray text exists. Reasons accumulate into `diagnostics` when provided.
bool validate_format(const Trajectory& trajectory,
                     std::vector<std::string>* diagnostics = nullptr);

// Mask covering exactly the Result segments (delimiters included).
LossMask compute_loss_mask(const Trajectory& trajectory);

// JSONL persistence: {"id", "question", "segments": [{"kind", "text"}],
// "t", "answer"} plus an optional "retrieval" field carrying per-step
// retrieved titles for offline reward computation.
struct TrajectoryRecord {
  std::string id;
  std::string question;
  Trajectory trajectory;
  std::optional<std::string> answer;  // extracted boxed answer, full text fallback
  std::vector<std::vector<std::string>> retrieval;  // may be empty
};

std::string to_jsonl_line(const TrajectoryRecord& record);
TrajectoryRecord from_jsonl_line(const std::string& line);

}  // namespace hopsearch::protocol
