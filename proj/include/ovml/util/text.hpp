#pragma once

#include <string>
#include <vector>

namespace ovml::util {

// Fixed-format float rendering so repeated runs emit byte-identical CSVs.
std::string fmt_f(double v, int decimals = 6);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

std::vector<std::string> split(const std::string& s, char sep);

}  // namespace ovml::util
