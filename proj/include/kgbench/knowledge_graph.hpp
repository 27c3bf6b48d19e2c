#pragma once

// In-memory knowledge graph: interned entity/relation names, a duplicate-free
// triple set, and per-relation indices (pairs, domain, range).
//
// Triples are stored sorted by (relation, head, tail), so all triples of one
// relation form a contiguous block. The graph is immutable once built and can
// be shared read-only across threads.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kgbench/ids.hpp"

namespace kgbench {

class Interner {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> ids_;
};

class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // Deduplicates `triples`. Every id must be below the size of the
  // corresponding interner.
  KnowledgeGraph(Interner entities, Interner relations, std::vector<Triple> triples);

  // Same vocabulary, different triple set (e.g. a retained or test graph).
  KnowledgeGraph subgraph(std::span<const Triple> triples) const;

  std::size_t entity_count() const noexcept { return entities_.size(); }
  std::size_t relation_count() const noexcept { return relations_.size(); }
  std::size_t triple_count() const noexcept { return triples_.size(); }

  const std::string& entity_name(EntityId e) const { return entities_.name(index(e)); }
  const std::string& relation_name(RelationId r) const { return relations_.name(index(r)); }
  std::optional<EntityId> find_entity(std::string_view name) const;
  std::optional<RelationId> find_relation(std::string_view name) const;
  const Interner& entities() const noexcept { return entities_; }
  const Interner& relations() const noexcept { return relations_; }

  // Sorted by (relation, head, tail).
  std::span<const Triple> triples() const noexcept { return triples_; }

  bool contains(const Triple& t) const;

  // True when the relation has at least one triple.
  bool is_indexed(RelationId r) const;
  std::vector<RelationId> indexed_relations() const;

  // The following throw std::invalid_argument for an unknown relation id.
  std::span<const Triple> triples_of(RelationId r) const;
  // (head, tail) pairs of r, sorted.
  std::span<const EntityPair> pairs(RelationId r) const;
  // Sorted, duplicate-free entity sets.
  std::span<const EntityId> domain_of(RelationId r) const;
  std::span<const EntityId> range_of(RelationId r) const;

 private:
  void check_relation(RelationId r) const;
  std::uint64_t key(const Triple& t) const noexcept;

  Interner entities_;
  Interner relations_;
  std::vector<Triple> triples_;
  std::vector<EntityPair> pairs_;
  std::vector<std::size_t> offsets_;  // relation_count + 1 offsets into triples_
  std::vector<std::vector<EntityId>> domain_;
  std::vector<std::vector<EntityId>> range_;
  std::unordered_set<std::uint64_t> membership_;
};

// Reads one or more `head<TAB>relation<TAB>tail` files into a single graph.
// Duplicates across files collapse; names are interned in first-seen order.
// Throws DataError on malformed lines (with file and line number) or when the
// merged corpus is empty.
KnowledgeGraph load_tsv(std::span<const std::filesystem::path> paths);

// Accepts either a file or a directory. A directory is read as the ConvE
// layout: whichever of train.txt, valid.txt, test.txt exist are merged.
KnowledgeGraph load_graph(const std::filesystem::path& input);

void write_tsv(const KnowledgeGraph& kg, std::span<const Triple> triples, std::ostream& out);
void write_tsv(const KnowledgeGraph& kg, std::ostream& out);

}  // namespace kgbench
