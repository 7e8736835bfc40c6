#pragma once

#include <map>
#include <string>
#include <vector>

namespace subsurf {

// Entry point shared by the binary and the tests. args excludes argv[0].
int run_cli(const std::vector<std::string>& args);

// "key = value" lines, '#' comments; later keys override earlier ones.
std::map<std::string, std::string> parse_config_file(const std::string& path);

}  // namespace subsurf
