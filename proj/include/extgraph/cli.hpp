#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace extgraph {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitPartial = 2;

// Flat key=value config; '#' starts a comment.
std::map<std::string, std::string> parse_config(const std::string& text);

// Runs the command line (without the program name). Errors are reported on
// err as a JSON object with at least a "kind" field.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace extgraph
