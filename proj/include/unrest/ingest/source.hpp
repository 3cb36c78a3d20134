#pragma once

#include <string>

#include "unrest/core/files.hpp"
#include "unrest/ingest/payload_ref.hpp"

namespace unrest::ingest {

inline constexpr std::string_view kMasterIndexName = "masterfilelist.txt";

/// Where the master index and payload bytes come from. Implementations must
/// allow concurrent fetch() calls.
class PayloadSource {
public:
    virtual ~PayloadSource() = default;
    virtual std::string fetch_index() = 0;
    virtual std::string fetch(const PayloadRef& ref) = 0;
};

/// A directory mirroring the GDELT layout: masterfilelist.txt next to the
/// payload archives, which are looked up by the url's file name.
class LocalDirectorySource final : public PayloadSource {
public:
    explicit LocalDirectorySource(fs::path dir) : dir_(std::move(dir)) {}

    std::string fetch_index() override { return read_file(dir_ / kMasterIndexName); }

    std::string fetch(const PayloadRef& ref) override {
        auto path = dir_ / std::string(ref.file_name());
        if (!fs::exists(path)) throw FetchError("payload not found: " + path.string());
        return read_file(path);
    }

    const fs::path& dir() const noexcept { return dir_; }

private:
    fs::path dir_;
};

} // namespace unrest::ingest
