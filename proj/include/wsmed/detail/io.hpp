#ifndef WSMED_DETAIL_IO_HPP
#define WSMED_DETAIL_IO_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "wsmed/errors.hpp"

namespace wsmed::detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(fmt::format("cannot read '{}'", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(fmt::format("cannot write '{}'", path.string()));
    out << content;
    if (!out) throw ParseError(fmt::format("failed writing '{}'", path.string()));
}

} // namespace wsmed::detail

#endif
