#pragma once

#include "calculus.hpp"

#include <map>
#include <string>
#include <vector>

namespace tracelab::calc {

/// Parsed query: an operation name, positional space descriptors and key=value options.
struct Query {
    std::string op;
    std::vector<Space> spaces;
    std::map<std::string, std::string> opts;
};

/// Throws Error(Status::Parse) with a 1-based column on malformed input.
Query parse_query(const std::string& text);
Space parse_space(const std::string& text);

QueryResult evaluate(const Query& q);
/// {"outcome": {...}, "citations": [...]} as a compact JSON string.
std::string to_json(const QueryResult& r);
std::string run_query(const std::string& text);

}  // namespace tracelab::calc
