#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "infinitum/compactifier.hpp"
#include "infinitum/errors.hpp"

namespace infinitum::cli {

// Exit statuses.
constexpr int kOk = 0;
constexpr int kMalformed = 1;
constexpr int kPrecondition = 2;
constexpr int kDiverged = 3;

int exit_status(ErrorCode code);

// "power:S", "one" or "probe:auto" (empty result).
std::optional<Regularizer> parse_rho(const std::string& spec);

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace infinitum::cli
