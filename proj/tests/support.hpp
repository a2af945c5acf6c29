#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <sys/wait.h>

namespace testing {

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("powsec-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Runs the CLI with the given arguments (shell syntax) and returns its exit status.
inline int run_cli(const std::string& args, const std::filesystem::path& log) {
    const std::string cmd = std::string(POWSEC_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline std::string data_dir() { return POWSEC_DATA_DIR; }

}  // namespace testing
