#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>

namespace kad {

using SessionId = std::string;

/// Opaque entity identifier. Zero is never assigned.
struct EntityId {
    std::uint64_t value = 0;

    explicit operator bool() const noexcept { return value != 0; }
    auto operator<=>(const EntityId &) const = default;
};

struct TypeName {
    std::string name;
    auto operator<=>(const TypeName &) const = default;
};

struct Literal {
    std::string text;
    auto operator<=>(const Literal &) const = default;
};

/// Object slot of a triple: another entity, a type (for is-a) or a free value.
using Node = std::variant<EntityId, TypeName, Literal>;

enum class Status { pending_confirmation, pending_verification, verified, inferred };

std::string to_string(Status s);
Status status_from_string(const std::string &s);

struct TripleKey {
    EntityId subject;
    std::string relation;
    Node object;

    auto operator<=>(const TripleKey &) const = default;
};

struct Triple {
    EntityId subject;
    std::string relation;
    Node object;
    Status status = Status::pending_verification;
    std::string provenance;

    TripleKey key() const { return {subject, relation, object}; }
    bool operator==(const Triple &) const = default;
};

} // namespace kad
