#pragma once

#include <httplib.h>

#include <string>

#include "unrest/core/error.hpp"
#include "unrest/ingest/source.hpp"

namespace unrest::ingest {

/// Fetches the index and payloads over plain HTTP.
class HttpSource final : public PayloadSource {
public:
    /// `index_url` is either the master list itself or a base url that
    /// masterfilelist.txt is appended to.
    explicit HttpSource(std::string index_url) : index_url_(std::move(index_url)) {
        if (!ends_with(index_url_, ".txt")) {
            if (index_url_.empty() || index_url_.back() != '/') index_url_ += '/';
            index_url_ += kMasterIndexName;
        }
    }

    std::string fetch_index() override { return get(index_url_); }
    std::string fetch(const PayloadRef& ref) override { return get(ref.url); }

    const std::string& index_url() const noexcept { return index_url_; }

private:
    static std::pair<std::string, std::string> split_url(const std::string& url) {
        constexpr std::string_view scheme = "http://";
        if (url.rfind(scheme, 0) != 0) throw FetchError("only http:// urls are supported: " + url);
        auto slash = url.find('/', scheme.size());
        if (slash == std::string::npos) return {url, "/"};
        return {url.substr(0, slash), url.substr(slash)};
    }

    static std::string get(const std::string& url) {
        auto [host, path] = split_url(url);
        httplib::Client client(host);
        client.set_connection_timeout(10);
        client.set_read_timeout(60);
        auto res = client.Get(path);
        if (!res) throw FetchError(url + ": " + httplib::to_string(res.error()));
        if (res->status != 200) throw FetchError(url + ": HTTP " + std::to_string(res->status));
        return std::move(res->body);
    }

    std::string index_url_;
};

} // namespace unrest::ingest
