#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gocf {

struct ZipEntry {
  std::string name;
  std::string data;
};

namespace zip_detail {

inline std::uint32_t le32(std::string_view s, std::size_t off) {
  if (off + 4 > s.size()) throw std::runtime_error("zip: truncated");
  return static_cast<std::uint32_t>(static_cast<unsigned char>(s[off])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 3])) << 24;
}

inline std::uint16_t le16(std::string_view s, std::size_t off) {
  if (off + 2 > s.size()) throw std::runtime_error("zip: truncated");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[off]) |
                                    static_cast<unsigned char>(s[off + 1]) << 8);
}

inline std::string inflate_raw(std::string_view in, std::size_t expected) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw std::runtime_error("zip: inflateInit failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != expected) throw std::runtime_error("zip: corrupt deflate stream");
  return out;
}

}  // namespace zip_detail

// Reads every file entry of an in-memory zip archive (stored or deflated,
// no zip64, no encryption), verifying CRC-32.
inline std::vector<ZipEntry> read_zip(std::string_view archive) {
  using namespace zip_detail;
  if (archive.size() < 22) throw std::runtime_error("zip: too small");
  std::size_t eocd = std::string_view::npos;
  const std::size_t lowest = archive.size() > 22 + 65535 ? archive.size() - 22 - 65535 : 0;
  for (std::size_t i = archive.size() - 22 + 1; i-- > lowest;) {
    if (le32(archive, i) == 0x06054b50) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string_view::npos) throw std::runtime_error("zip: no end of central directory");
  const std::uint16_t count = le16(archive, eocd + 10);
  std::size_t cd = le32(archive, eocd + 16);

  std::vector<ZipEntry> entries;
  for (std::uint16_t e = 0; e < count; ++e) {
    if (le32(archive, cd) != 0x02014b50) throw std::runtime_error("zip: bad central directory entry");
    const std::uint16_t flags = le16(archive, cd + 8);
    const std::uint16_t method = le16(archive, cd + 10);
    const std::uint32_t crc = le32(archive, cd + 16);
    const std::uint32_t csize = le32(archive, cd + 20);
    const std::uint32_t usize = le32(archive, cd + 24);
    const std::uint16_t nlen = le16(archive, cd + 28);
    const std::uint16_t xlen = le16(archive, cd + 30);
    const std::uint16_t clen = le16(archive, cd + 32);
    const std::uint32_t local = le32(archive, cd + 42);
    if (cd + 46 + nlen > archive.size()) throw std::runtime_error("zip: truncated name");
    std::string name(archive.substr(cd + 46, nlen));
    cd += 46 + nlen + xlen + clen;

    if (!name.empty() && name.back() == '/') continue;
    if (flags & 1) throw std::runtime_error("zip: encrypted entry " + name);
    if (le32(archive, local) != 0x04034b50) throw std::runtime_error("zip: bad local header for " + name);
    const std::size_t data_off = local + 30 + le16(archive, local + 26) + le16(archive, local + 28);
    if (data_off + csize > archive.size()) throw std::runtime_error("zip: truncated data for " + name);
    std::string_view raw = archive.substr(data_off, csize);

    std::string data;
    if (method == 0) data.assign(raw);
    else if (method == 8) data = inflate_raw(raw, usize);
    else throw std::runtime_error("zip: unsupported method for " + name);

    if (::crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())) != crc)
      throw std::runtime_error("zip: crc mismatch for " + name);
    entries.push_back({std::move(name), std::move(data)});
  }
  return entries;
}

}  // namespace gocf
