#pragma once

#include <stdexcept>
#include <string>

namespace corridor {

// Malformed input: JSON syntax, unknown fields, unparsable rationals, bad CLI values.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid input that violates a model precondition (start outside the
// feasible window, family that is not in sliding-window form, mixed directions where a
// single direction is required, ...).
struct model_error : std::runtime_error {
    explicit model_error(const std::string& what) : std::runtime_error(what) {}
};

// A solver refused to continue because a configured budget (enumeration product, memo
// entries, span count, node count, pool size) would be exceeded.
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace corridor
