#include "kgbench/knowledge_graph.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "kgbench/errors.hpp"

namespace kgbench {

std::uint32_t Interner::intern(std::string_view name) {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> Interner::find(std::string_view name) const {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  return std::nullopt;
}

KnowledgeGraph::KnowledgeGraph(Interner entities, Interner relations, std::vector<Triple> triples)
    : entities_(std::move(entities)), relations_(std::move(relations)), triples_(std::move(triples)) {
  const std::size_t n_ent = entities_.size();
  const std::size_t n_rel = relations_.size();
  const unsigned __int128 key_space =
      static_cast<unsigned __int128>(n_ent) * n_ent * std::max<std::size_t>(n_rel, 1);
  if (key_space > std::numeric_limits<std::uint64_t>::max()) {
    throw std::length_error("knowledge graph too large for 64-bit triple keys");
  }
  for (const Triple& t : triples_) {
    if (index(t.head) >= n_ent || index(t.tail) >= n_ent || index(t.rel) >= n_rel) {
      throw std::invalid_argument("triple references an id outside the vocabulary");
    }
  }

  std::sort(triples_.begin(), triples_.end(), [](const Triple& a, const Triple& b) {
    if (a.rel != b.rel) return a.rel < b.rel;
    if (a.head != b.head) return a.head < b.head;
    return a.tail < b.tail;
  });
  triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());

  pairs_.reserve(triples_.size());
  membership_.reserve(triples_.size());
  offsets_.assign(n_rel + 1, 0);
  domain_.assign(n_rel, {});
  range_.assign(n_rel, {});
  for (const Triple& t : triples_) {
    pairs_.push_back({t.head, t.tail});
    membership_.insert(key(t));
    ++offsets_[index(t.rel) + 1];
    domain_[index(t.rel)].push_back(t.head);
    range_[index(t.rel)].push_back(t.tail);
  }
  for (std::size_t r = 0; r < n_rel; ++r) {
    offsets_[r + 1] += offsets_[r];
    for (auto* set : {&domain_[r], &range_[r]}) {
      std::sort(set->begin(), set->end());
      set->erase(std::unique(set->begin(), set->end()), set->end());
      set->shrink_to_fit();
    }
  }
}

KnowledgeGraph KnowledgeGraph::subgraph(std::span<const Triple> triples) const {
  return KnowledgeGraph(entities_, relations_, std::vector<Triple>(triples.begin(), triples.end()));
}

std::optional<EntityId> KnowledgeGraph::find_entity(std::string_view name) const {
  if (auto id = entities_.find(name)) return EntityId{*id};
  return std::nullopt;
}

std::optional<RelationId> KnowledgeGraph::find_relation(std::string_view name) const {
  if (auto id = relations_.find(name)) return RelationId{*id};
  return std::nullopt;
}

std::uint64_t KnowledgeGraph::key(const Triple& t) const noexcept {
  const std::uint64_t n_ent = entities_.size();
  const std::uint64_t n_rel = relations_.size();
  return (static_cast<std::uint64_t>(index(t.head)) * n_rel + index(t.rel)) * n_ent + index(t.tail);
}

bool KnowledgeGraph::contains(const Triple& t) const {
  if (index(t.head) >= entity_count() || index(t.tail) >= entity_count() ||
      index(t.rel) >= relation_count()) {
    return false;
  }
  return membership_.contains(key(t));
}

void KnowledgeGraph::check_relation(RelationId r) const {
  if (index(r) >= relation_count()) {
    throw std::invalid_argument("unknown relation id " + std::to_string(index(r)));
  }
}

bool KnowledgeGraph::is_indexed(RelationId r) const {
  check_relation(r);
  return offsets_[index(r) + 1] > offsets_[index(r)];
}

std::vector<RelationId> KnowledgeGraph::indexed_relations() const {
  std::vector<RelationId> out;
  for (std::uint32_t r = 0; r < relation_count(); ++r) {
    if (offsets_[r + 1] > offsets_[r]) out.push_back(RelationId{r});
  }
  return out;
}

std::span<const Triple> KnowledgeGraph::triples_of(RelationId r) const {
  check_relation(r);
  return std::span<const Triple>(triples_).subspan(offsets_[index(r)],
                                                   offsets_[index(r) + 1] - offsets_[index(r)]);
}

std::span<const EntityPair> KnowledgeGraph::pairs(RelationId r) const {
  check_relation(r);
  return std::span<const EntityPair>(pairs_).subspan(offsets_[index(r)],
                                                     offsets_[index(r) + 1] - offsets_[index(r)]);
}

std::span<const EntityId> KnowledgeGraph::domain_of(RelationId r) const {
  check_relation(r);
  return domain_[index(r)];
}

std::span<const EntityId> KnowledgeGraph::range_of(RelationId r) const {
  check_relation(r);
  return range_[index(r)];
}

KnowledgeGraph load_tsv(std::span<const std::filesystem::path> paths) {
  Interner entities;
  Interner relations;
  std::vector<Triple> triples;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto first = line.find('\t');
      const auto second = first == std::string::npos ? first : line.find('\t', first + 1);
      if (second == std::string::npos || line.find('\t', second + 1) != std::string::npos) {
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 3 tab-separated fields");
      }
      std::string_view view(line);
      const auto head = entities.intern(view.substr(0, first));
      const auto rel = relations.intern(view.substr(first + 1, second - first - 1));
      const auto tail = entities.intern(view.substr(second + 1));
      triples.push_back({EntityId{head}, RelationId{rel}, EntityId{tail}});
    }
    if (in.bad()) throw DataError("read error on " + path.string());
  }
  if (triples.empty()) throw DataError("empty triple corpus");
  return KnowledgeGraph(std::move(entities), std::move(relations), std::move(triples));
}

KnowledgeGraph load_graph(const std::filesystem::path& input) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_regular_file(input, ec)) {
    const fs::path one[] = {input};
    return load_tsv(one);
  }
  if (!fs::is_directory(input, ec)) throw DataError("input not found: " + input.string());
  std::vector<fs::path> files;
  for (const char* name : {"train.txt", "valid.txt", "test.txt"}) {
    if (fs::is_regular_file(input / name, ec)) files.push_back(input / name);
  }
  if (files.empty()) {
    throw DataError(input.string() + ": no train.txt/valid.txt/test.txt found");
  }
  return load_tsv(files);
}

void write_tsv(const KnowledgeGraph& kg, std::span<const Triple> triples, std::ostream& out) {
  for (const Triple& t : triples) {
    out << kg.entity_name(t.head) << '\t' << kg.relation_name(t.rel) << '\t'
        << kg.entity_name(t.tail) << '\n';
  }
}

void write_tsv(const KnowledgeGraph& kg, std::ostream& out) { write_tsv(kg, kg.triples(), out); }

}  // namespace kgbench
