#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNetwork = 3;
inline constexpr int kExitApi = 4;

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Runs the `pl` operator tool. `args` excludes the program name. The node URL
/// and bearer token default to PL_NODE_URL and PL_AUTH_TOKEN.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env);

}  // namespace pl::cli
