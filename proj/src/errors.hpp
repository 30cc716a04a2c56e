#pragma once

#include <stdexcept>
#include <string>

namespace tracelab {

enum class Status { Ok = 0, Arg, Domain, IO, Parse, Numeric, NotFound, Internal };

class Error : public std::runtime_error {
public:
    Error(Status s, const std::string& what) : std::runtime_error(what), status_(s) {}
    Status status() const { return status_; }

private:
    Status status_;
};

}  // namespace tracelab
