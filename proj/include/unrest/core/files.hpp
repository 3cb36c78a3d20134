#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "unrest/core/error.hpp"

namespace unrest {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile(path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

/// Writes `bytes` to a sibling temp file and returns its path. The caller
/// renames it into place with commit_file().
inline fs::path write_temp_file(const fs::path& path, std::string_view bytes) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw StoreWriteFailure("cannot create " + path.parent_path().string() + ": " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StoreWriteFailure("cannot open " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp, ec);
            throw StoreWriteFailure("short write to " + tmp.string());
        }
    }
    return tmp;
}

inline void commit_file(const fs::path& tmp, const fs::path& path) {
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw StoreWriteFailure("cannot rename " + tmp.string() + ": " + ec.message());
}

/// Temp file + rename; readers never observe a half-written file.
inline void write_file_atomic(const fs::path& path, std::string_view bytes) {
    commit_file(write_temp_file(path, bytes), path);
}

/// Writes several files so that either all of them or none become visible.
/// Rename itself is not transactional across files; every temp is written and
/// flushed before the first rename so only the rename step can interleave.
inline void write_files_atomic(const std::vector<std::pair<fs::path, std::string>>& files) {
    std::vector<fs::path> temps;
    temps.reserve(files.size());
    try {
        for (const auto& [path, bytes] : files) temps.push_back(write_temp_file(path, bytes));
    } catch (...) {
        std::error_code ec;
        for (const auto& t : temps) fs::remove(t, ec);
        throw;
    }
    for (std::size_t i = 0; i < files.size(); ++i) commit_file(temps[i], files[i].first);
}

} // namespace unrest
