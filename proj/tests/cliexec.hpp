#ifndef WSMED_TESTS_CLIEXEC_HPP
#define WSMED_TESTS_CLIEXEC_HPP

// Runs the CLI under test through the shell, capturing exit code and both
// streams via scratch files.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace cliexec {

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::filesystem::path scratch_dir() {
    static std::filesystem::path dir = [] {
        std::filesystem::path d =
            std::filesystem::temp_directory_path() / ("wsmed-tests-" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline CmdResult run_cmd(const std::string& command) {
    std::filesystem::path out = scratch_dir() / "cmd.out";
    std::filesystem::path err = scratch_dir() / "cmd.err";
    std::string full = command + " >'" + out.string() + "' 2>'" + err.string() + "'";
    int status = std::system(full.c_str());
    CmdResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

} // namespace cliexec

#endif
