#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xxz {

inline constexpr const char* kVersionTag = "xxzdrop 0.1.0";

enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_usage = 2 };

// args exclude the program name
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

// 17 significant digits, locale independent
std::string format_double(double v);

// "3..9", "4,6,8", "all" (n only, expands to 0..L)
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace xxz
