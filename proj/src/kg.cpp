#include "hopsearch/kg.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

#include "hopsearch/errors.hpp"

namespace hopsearch::kg {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

std::string chomp(std::string line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
  return line;
}

void load_alias_file(const std::filesystem::path& path,
                     std::unordered_map<std::string, std::vector<std::string>>& table) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open alias file: " + path.string());
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = chomp(raw);
    if (line.empty()) continue;
    std::vector<std::string> fields = split_tabs(line);
    if (fields.size() < 2 || fields[0].empty()) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) +
                      ": expected `id\\talias...` with at least one alias");
    }
    std::vector<std::string>& aliases = table[fields[0]];
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (fields[i].empty()) continue;
      if (std::find(aliases.begin(), aliases.end(), fields[i]) == aliases.end()) {
        aliases.push_back(fields[i]);
      }
    }
    if (aliases.empty()) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": id has no aliases");
    }
  }
}

bool contains_contiguous(const std::vector<std::string>& haystack,
                         const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (std::size_t start = 0; start + needle.size() <= haystack.size(); ++start) {
    bool all = true;
    for (std::size_t i = 0; i < needle.size(); ++i) {
      if (haystack[start + i] != needle[i]) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

std::size_t default_token_count(std::string_view s) { return text::whitespace_token_count(s); }

}  // namespace

KnowledgeStore KnowledgeStore::load(const std::vector<std::filesystem::path>& triple_files,
                                    const std::filesystem::path& entity_alias_file,
                                    const std::filesystem::path& relation_alias_file,
                                    const LoadOptions& options) {
  KnowledgeStore store;
  load_alias_file(entity_alias_file, store.entity_aliases_);
  load_alias_file(relation_alias_file, store.relation_aliases_);

  std::set<Triple> dedup;
  for (const std::filesystem::path& path : triple_files) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open triple file: " + path.string());
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = chomp(raw);
      if (line.empty()) continue;
      std::vector<std::string> fields = split_tabs(line);
      if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
        throw LoadError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 3 tab-separated fields");
      }
      Triple triple{fields[0], fields[1], fields[2]};
      for (const EntityId* id : {&triple.head, &triple.tail}) {
        if (!store.entity_aliases_.count(*id)) {
          if (options.reject_unknown_ids) {
            throw LoadError(path.string() + ":" + std::to_string(line_no) +
                            ": unknown entity id " + *id);
          }
          store.entity_aliases_[*id] = {*id};
        }
      }
      if (!store.relation_aliases_.count(triple.relation)) {
        if (options.reject_unknown_ids) {
          throw LoadError(path.string() + ":" + std::to_string(line_no) +
                          ": unknown relation id " + triple.relation);
        }
        store.relation_aliases_[triple.relation] = {triple.relation};
      }
      dedup.insert(std::move(triple));
    }
  }
  store.triples_.assign(dedup.begin(), dedup.end());
  store.build_indexes();
  return store;
}

void KnowledgeStore::build_indexes() {
  for (const auto& [id, aliases] : entity_aliases_) {
    std::unordered_set<std::string> seen_tokens;
    for (const std::string& alias : aliases) {
      std::string norm = text::normalize_surface(alias);
      if (norm.empty()) continue;
      exact_alias_index_[norm].push_back(id);
      for (const std::string& token : text::surface_tokens(alias)) {
        if (seen_tokens.insert(token).second) token_index_[token].push_back(id);
      }
    }
  }
  for (auto& [key, ids] : exact_alias_index_) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  for (auto& [key, ids] : token_index_) std::sort(ids.begin(), ids.end());

  for (std::size_t i = 0; i < triples_.size(); ++i) {
    incident_[triples_[i].head].push_back(i);
    if (triples_[i].tail != triples_[i].head) incident_[triples_[i].tail].push_back(i);
  }
}

const std::string& KnowledgeStore::entity_name(const EntityId& id) const {
  auto it = entity_aliases_.find(id);
  return it != entity_aliases_.end() ? it->second.front() : id;
}

const std::string& KnowledgeStore::relation_name(const RelationId& id) const {
  auto it = relation_aliases_.find(id);
  return it != relation_aliases_.end() ? it->second.front() : id;
}

const std::vector<std::string>* KnowledgeStore::entity_aliases(const EntityId& id) const {
  auto it = entity_aliases_.find(id);
  return it != entity_aliases_.end() ? &it->second : nullptr;
}

const std::vector<std::string>* KnowledgeStore::relation_aliases(const RelationId& id) const {
  auto it = relation_aliases_.find(id);
  return it != relation_aliases_.end() ? &it->second : nullptr;
}

std::vector<EntityId> KnowledgeStore::match_entities(const std::string& name,
                                                     std::size_t limit) const {
  std::string norm = text::normalize_surface(name);
  if (norm.empty() || limit == 0) return {};

  // Tier 1: exact normalized alias.
  if (auto it = exact_alias_index_.find(norm); it != exact_alias_index_.end()) {
    std::vector<EntityId> ids = it->second;
    if (ids.size() > limit) ids.resize(limit);
    return ids;
  }

  std::vector<std::string> name_tokens = text::surface_tokens(name);
  std::vector<std::pair<EntityId, std::size_t>> candidates;  // id -> shared-token count
  {
    std::unordered_map<EntityId, std::size_t> shared;
    std::unordered_set<std::string> distinct(name_tokens.begin(), name_tokens.end());
    for (const std::string& token : distinct) {
      auto it = token_index_.find(token);
      if (it == token_index_.end()) continue;
      for (const EntityId& id : it->second) ++shared[id];
    }
    candidates.assign(shared.begin(), shared.end());
  }
  if (candidates.empty()) return {};

  // Tier 2: contiguous token-subsequence containment in either direction.
  std::vector<EntityId> contained;
  for (const auto& [id, count] : candidates) {
    const std::vector<std::string>& aliases = entity_aliases_.at(id);
    for (const std::string& alias : aliases) {
      std::vector<std::string> alias_tokens = text::surface_tokens(alias);
      if (contains_contiguous(alias_tokens, name_tokens) ||
          contains_contiguous(name_tokens, alias_tokens)) {
        contained.push_back(id);
        break;
      }
    }
  }
  if (!contained.empty()) {
    std::sort(contained.begin(), contained.end());
    if (contained.size() > limit) contained.resize(limit);
    return contained;
  }

  // Tier 3: shared-token overlap.
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<EntityId> ids;
  ids.reserve(std::min(limit, candidates.size()));
  for (const auto& [id, count] : candidates) {
    ids.push_back(id);
    if (ids.size() == limit) break;
  }
  return ids;
}

std::vector<Triple> KnowledgeStore::subgraph(const std::vector<EntityId>& entities) const {
  std::set<std::size_t> indexes;
  for (const EntityId& id : entities) {
    auto it = incident_.find(id);
    if (it == incident_.end()) continue;
    indexes.insert(it->second.begin(), it->second.end());
  }
  std::vector<Triple> out;
  out.reserve(indexes.size());
  for (std::size_t i : indexes) out.push_back(triples_[i]);  // triples_ sorted => out sorted
  return out;
}

std::string KnowledgeStore::render(const Triple& triple) const {
  return entity_name(triple.head) + " | " + relation_name(triple.relation) + " | " +
         entity_name(triple.tail);
}

std::vector<ScoredTriple> KnowledgeStore::rank_triples(
    const KgQuery& query, const std::vector<Triple>& candidates) const {
  std::unordered_set<std::string> query_tokens;
  for (const std::string& s : query.entities)
    for (std::string& t : text::surface_tokens(s)) query_tokens.insert(std::move(t));
  for (const std::string& s : query.relations)
    for (std::string& t : text::surface_tokens(s)) query_tokens.insert(std::move(t));

  std::vector<ScoredTriple> scored;
  scored.reserve(candidates.size());
  for (const Triple& triple : candidates) {
    ScoredTriple st;
    st.triple = triple;
    st.rendered = render(triple);
    std::unordered_set<std::string> seen;
    for (const std::string& token : text::surface_tokens(st.rendered)) {
      if (query_tokens.count(token) && seen.insert(token).second) ++st.score;
    }
    scored.push_back(std::move(st));
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredTriple& a, const ScoredTriple& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.triple < b.triple;
  });
  return scored;
}

std::vector<ScoredTriple> KnowledgeStore::search(const KgQuery& query, std::size_t max_triples,
                                                 std::size_t max_tokens,
                                                 const text::TokenCounter& counter) const {
  std::set<EntityId> matched;
  for (const std::string& name : query.entities) {
    for (EntityId& id : match_entities(name)) matched.insert(std::move(id));
  }
  if (matched.empty()) return {};

  std::vector<ScoredTriple> ranked =
      rank_triples(query, subgraph({matched.begin(), matched.end()}));
  if (ranked.size() > max_triples) ranked.resize(max_triples);

  const text::TokenCounter& count = counter ? counter : text::TokenCounter(default_token_count);
  std::size_t used = 0;
  std::size_t keep = 0;
  for (const ScoredTriple& st : ranked) {
    std::size_t cost = count(st.rendered);
    if (used + cost > max_tokens) break;
    used += cost;
    ++keep;
  }
  ranked.resize(keep);
  return ranked;
}

}  // namespace hopsearch::kg
