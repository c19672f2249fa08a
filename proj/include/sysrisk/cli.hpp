/*
 * cli.hpp
 *
 * Command-line front end. Subcommands: generate, simulate, analyze, sri,
 * report, config. Every run writes run_manifest.json into its output
 * directory.
 *
 * Exit codes: 0 success, 2 config error, 3 input-data error, 4 numerical
 * failure, 1 anything else.
 */
#pragma once

#include <exception>

namespace sysrisk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitNumerical = 4;

int exit_code_for(const std::exception& e);

int run(int argc, const char* const* argv);

}  // namespace sysrisk::cli
