#pragma once

#include <zlib.h>

#include <cstdint>
#include <string>
#include <string_view>

#include "unrest/core/date.hpp"
#include "unrest/core/error.hpp"

namespace unrest::ingest {

namespace zip_detail {

inline constexpr std::uint32_t kLocalSig = 0x04034b50;
inline constexpr std::uint32_t kCentralSig = 0x02014b50;
inline constexpr std::uint32_t kEndSig = 0x06054b50;
inline constexpr std::size_t kEndSize = 22;
inline constexpr std::size_t kCentralSize = 46;
inline constexpr std::size_t kLocalSize = 30;

inline std::uint16_t u16(std::string_view b, std::size_t at) {
    if (at + 2 > b.size()) throw CorruptArchive("truncated archive");
    return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                      static_cast<unsigned char>(b[at + 1]) << 8);
}

inline std::uint32_t u32(std::string_view b, std::size_t at) {
    return static_cast<std::uint32_t>(u16(b, at)) | static_cast<std::uint32_t>(u16(b, at + 2)) << 16;
}

inline void put16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8));
}

inline void put32(std::string& out, std::uint32_t v) {
    put16(out, static_cast<std::uint16_t>(v & 0xFFFF));
    put16(out, static_cast<std::uint16_t>(v >> 16));
}

inline std::uint32_t crc(std::string_view data) {
    uLong c = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks for very large members
    std::size_t off = 0;
    while (off < data.size()) {
        auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - off, 1u << 30));
        c = crc32(c, reinterpret_cast<const Bytef*>(data.data() + off), chunk);
        off += chunk;
    }
    return static_cast<std::uint32_t>(c);
}

inline std::string inflate_raw(std::string_view in, std::size_t expected) {
    std::string out(expected, '\0');
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw CorruptArchive("inflateInit2 failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    std::size_t produced = zs.total_out;
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || produced != expected) throw CorruptArchive("deflate stream is damaged");
    return out;
}

inline std::string deflate_raw(std::string_view in) {
    z_stream zs{};
    if (deflateInit2(&zs, 6, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK)
        throw Error("deflateInit2 failed");
    std::string out(deflateBound(&zs, static_cast<uLong>(in.size())), '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = deflate(&zs, Z_FINISH);
    out.resize(zs.total_out);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw Error("deflate failed");
    return out;
}

} // namespace zip_detail

struct ZipMember {
    std::string name;
    std::string data;
};

/// Unpacks an archive that must hold exactly one member (stored or
/// deflated). Throws CorruptArchive otherwise.
inline ZipMember read_single_member_zip(std::string_view bytes) {
    using namespace zip_detail;
    if (bytes.size() < kEndSize || u32(bytes, 0) != kLocalSig) throw CorruptArchive("not a ZIP archive");

    // End-of-central-directory record, possibly followed by a comment.
    std::size_t end_at = std::string_view::npos;
    std::size_t lowest = bytes.size() > kEndSize + 0xFFFF ? bytes.size() - kEndSize - 0xFFFF : 0;
    for (std::size_t at = bytes.size() - kEndSize + 1; at-- > lowest;) {
        if (u32(bytes, at) == kEndSig) {
            end_at = at;
            break;
        }
    }
    if (end_at == std::string_view::npos) throw CorruptArchive("missing end of central directory");

    std::uint16_t entries = u16(bytes, end_at + 10);
    std::uint32_t cd_offset = u32(bytes, end_at + 16);
    if (entries != 1) throw CorruptArchive("expected exactly one member, found " + std::to_string(entries));
    if (cd_offset + kCentralSize > bytes.size() || u32(bytes, cd_offset) != kCentralSig)
        throw CorruptArchive("bad central directory");

    std::uint16_t method = u16(bytes, cd_offset + 10);
    std::uint32_t want_crc = u32(bytes, cd_offset + 16);
    std::uint32_t comp_size = u32(bytes, cd_offset + 20);
    std::uint32_t raw_size = u32(bytes, cd_offset + 24);
    std::uint16_t name_len = u16(bytes, cd_offset + 28);
    std::uint32_t local_at = u32(bytes, cd_offset + 42);
    if (comp_size == 0xFFFFFFFFu || raw_size == 0xFFFFFFFFu) throw CorruptArchive("ZIP64 is not supported");
    if (cd_offset + kCentralSize + name_len > bytes.size()) throw CorruptArchive("bad central directory");

    ZipMember member;
    member.name = std::string(bytes.substr(cd_offset + kCentralSize, name_len));

    if (local_at + kLocalSize > bytes.size() || u32(bytes, local_at) != kLocalSig)
        throw CorruptArchive("bad local header");
    std::size_t data_at = local_at + kLocalSize + u16(bytes, local_at + 26) + u16(bytes, local_at + 28);
    if (data_at + comp_size > bytes.size()) throw CorruptArchive("member data truncated");
    std::string_view payload = bytes.substr(data_at, comp_size);

    if (method == 0) {
        if (comp_size != raw_size) throw CorruptArchive("stored member size mismatch");
        member.data = std::string(payload);
    } else if (method == 8) {
        member.data = inflate_raw(payload, raw_size);
    } else {
        throw CorruptArchive("unsupported compression method " + std::to_string(method));
    }
    if (crc(member.data) != want_crc) throw CorruptArchive("CRC mismatch");
    return member;
}

/// Builds a one-member deflated archive. The modification time comes from
/// `stamp` so output bytes depend only on the inputs.
inline std::string write_single_member_zip(std::string_view name, std::string_view data, const Timestamp& stamp) {
    using namespace zip_detail;
    const std::string packed = deflate_raw(data);
    const std::uint32_t sum = crc(data);
    const auto dos_time = static_cast<std::uint16_t>((stamp.hour() << 11) | (stamp.minute() << 5));
    const auto dos_date = static_cast<std::uint16_t>(((stamp.date.year() - 1980) << 9) |
                                                     (stamp.date.month() << 5) | stamp.date.day());

    std::string out;
    out.reserve(packed.size() + 2 * name.size() + 128);
    put32(out, kLocalSig);
    put16(out, 20);  // version needed
    put16(out, 0);   // flags
    put16(out, 8);   // deflate
    put16(out, dos_time);
    put16(out, dos_date);
    put32(out, sum);
    put32(out, static_cast<std::uint32_t>(packed.size()));
    put32(out, static_cast<std::uint32_t>(data.size()));
    put16(out, static_cast<std::uint16_t>(name.size()));
    put16(out, 0);
    out.append(name);
    out.append(packed);

    const auto cd_at = static_cast<std::uint32_t>(out.size());
    put32(out, kCentralSig);
    put16(out, 20);  // version made by
    put16(out, 20);
    put16(out, 0);
    put16(out, 8);
    put16(out, dos_time);
    put16(out, dos_date);
    put32(out, sum);
    put32(out, static_cast<std::uint32_t>(packed.size()));
    put32(out, static_cast<std::uint32_t>(data.size()));
    put16(out, static_cast<std::uint16_t>(name.size()));
    put16(out, 0);  // extra
    put16(out, 0);  // comment
    put16(out, 0);  // disk
    put16(out, 0);  // internal attrs
    put32(out, 0);  // external attrs
    put32(out, 0);  // local header offset
    out.append(name);
    const auto cd_size = static_cast<std::uint32_t>(out.size() - cd_at);

    put32(out, kEndSig);
    put16(out, 0);
    put16(out, 0);
    put16(out, 1);
    put16(out, 1);
    put32(out, cd_size);
    put32(out, cd_at);
    put16(out, 0);
    return out;
}

} // namespace unrest::ingest
