#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace kgbench {

// Entities and relations live in separate, dense id spaces.
enum class EntityId : std::uint32_t {};
enum class RelationId : std::uint32_t {};

constexpr std::uint32_t index(EntityId e) noexcept { return static_cast<std::uint32_t>(e); }
constexpr std::uint32_t index(RelationId r) noexcept { return static_cast<std::uint32_t>(r); }

struct Triple {
  EntityId head;
  RelationId rel;
  EntityId tail;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct EntityPair {
  EntityId head;
  EntityId tail;

  friend auto operator<=>(const EntityPair&, const EntityPair&) = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t h = index(t.head);
    h = h * 0x9E3779B97F4A7C15ULL + index(t.rel);
    h = h * 0x9E3779B97F4A7C15ULL + index(t.tail);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

}  // namespace kgbench
