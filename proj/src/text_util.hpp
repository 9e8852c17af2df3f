#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace greenlab::text {

std::string_view trim(std::string_view s);

// Splits on sep, keeping empty fields.
std::vector<std::string_view> split(std::string_view s, char sep);

// Splits on \n, tolerating \r\n. A trailing newline yields no extra line.
std::vector<std::string_view> split_lines(std::string_view s);

bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, int& out);

// Shortest representation that round-trips exactly.
std::string format_double(double v);

// "key = value" lines, # comments, duplicate keys rejected with line numbers.
std::map<std::string, std::string, std::less<>> parse_key_values(const std::string& text);

}  // namespace greenlab::text
