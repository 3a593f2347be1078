/**
 * @file cli.hpp
 * @brief Command-line front-end: parse a problem file, run one variational
 *        operation or numeric check, print the report.
 *
 * Every subcommand builds a structured report first; plain and LaTeX output
 * render that report. Exit codes: 0 success, 1 usage or parse error,
 * 2 semantic error, 3 numeric check failed.
 */
#pragma once

#include "jetvar/textio.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace jetvar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitSemantic = 2;
inline constexpr int kExitNumeric = 3;

struct CommandRequest {
    std::string subcommand;
    std::filesystem::path input;
    Format format = Format::Plain;
    std::optional<std::size_t> nodes;
    std::optional<double> step;
    std::optional<double> tol;
    std::string lagrangian;
    std::string section;
    std::vector<std::string> fields;
    std::string source;
    std::string bilinear;
    std::string onshell;
    std::optional<std::filesystem::path> output;
};

/// Subcommand names in help order.
[[nodiscard]] const std::vector<std::string>& subcommands();

/// Runs one request. Reports go to `out` (or to req.output when set),
/// diagnostics to `err`.
int run(const CommandRequest& req, std::ostream& out, std::ostream& err);

/// Parses argv (argv[0] is the program name) and runs the request.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace jetvar::cli
