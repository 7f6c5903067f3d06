#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ctxlab/context.hpp"

namespace ctxlab {

enum class ValueType { Integer, Real, Text };

using Value = std::variant<std::int64_t, double, std::string>;

/// Named variable bindings parsed from (or serialized into) a context item.
using Bindings = std::map<std::string, Value>;

struct FieldSpec {
    std::string name;
    ValueType type = ValueType::Text;
    /// For integers, an optional closed set of admissible values.
    std::optional<std::vector<std::int64_t>> allowed;
};

struct ResultSchema {
    std::vector<FieldSpec> fields;
};

/// Parses `name: value` lines from the item's text into bindings for every
/// declared field. Throws ParseError naming the missing variable, or
/// describing the offending fragment on a type mismatch.
Bindings parse_result(const ContextItem& item, const ResultSchema& schema);

/// Inverse of parse_result: renders bindings as `name: value` lines, one per
/// binding, in map order.
ContextItem serialize_bindings(const Bindings& bindings,
                               Role role = Role::Agent);

std::string value_to_string(const Value& value);

}  // namespace ctxlab
