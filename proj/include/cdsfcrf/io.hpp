#pragma once

// File formats.
//
//   CDKS  "CDKS" | u32 version=1 | u32 width | u32 height | width*height x (f64 re, f64 im)
//   CDIM  "CDIM" | u32 version=1 | u32 width | u32 height | width*height x f64
//   PBM   P4 bitmap, 1 = kept bin
//   PGM   P5 16-bit preview, linear rescale of [min, max] to [0, 65535]; the
//         range goes to a sidecar "<file>.range" text file ("min <v>\nmax <v>\n")
//
// All multi-byte values are little-endian and rows are stored top to bottom.
// CDKS data is DC-centered like KSpace.

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "grid.hpp"

namespace cdsfcrf::io {

inline constexpr std::uint32_t kFormatVersion = 1;

namespace detail {

inline void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline void put_f64(std::string& buf, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
}

class Reader {
public:
    Reader(std::string bytes, std::string path) : bytes_(std::move(bytes)), path_(std::move(path)) {}

    std::string_view take(std::size_t n) {
        if (pos_ + n > bytes_.size()) throw FormatError(path_ + ": truncated file");
        std::string_view out(bytes_.data() + pos_, n);
        pos_ += n;
        return out;
    }

    std::uint32_t u32() {
        auto s = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[i])) << (8 * i);
        return v;
    }

    double f64() {
        auto s = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[i])) << (8 * i);
        return std::bit_cast<double>(v);
    }

    bool at_end() const { return pos_ == bytes_.size(); }
    const std::string& path() const { return path_; }

private:
    std::string bytes_;
    std::string path_;
    std::size_t pos_ = 0;
};

inline std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Dims read_header(Reader& r, std::string_view magic) {
    if (r.take(4) != magic) throw FormatError(r.path() + ": bad magic, expected " + std::string(magic));
    const auto version = r.u32();
    if (version != kFormatVersion) throw FormatError(r.path() + ": unsupported version " + std::to_string(version));
    Dims d{r.u32(), 0};
    d.height = r.u32();
    if (d.empty()) throw FormatError(r.path() + ": zero-sized grid");
    return d;
}

inline std::string header(std::string_view magic, Dims d) {
    if (d.width > std::numeric_limits<std::uint32_t>::max() || d.height > std::numeric_limits<std::uint32_t>::max()) {
        throw DimensionError("grid too large for on-disk format");
    }
    std::string buf(magic);
    put_u32(buf, kFormatVersion);
    put_u32(buf, static_cast<std::uint32_t>(d.width));
    put_u32(buf, static_cast<std::uint32_t>(d.height));
    return buf;
}

// Netpbm header token, skipping whitespace and '#' comments.
inline std::string pnm_token(const std::string& bytes, std::size_t& pos) {
    for (;;) {
        while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        if (pos < bytes.size() && bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            continue;
        }
        break;
    }
    std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (start == pos) throw FormatError("truncated netpbm header");
    return bytes.substr(start, pos - start);
}

inline std::size_t pnm_number(const std::string& bytes, std::size_t& pos) {
    auto tok = pnm_token(bytes, pos);
    try {
        std::size_t used = 0;
        auto v = std::stoull(tok, &used);
        if (used != tok.size()) throw FormatError("bad netpbm number: " + tok);
        return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
        throw FormatError("bad netpbm number: " + tok);
    }
}

} // namespace detail

// Writes to a temporary sibling then renames, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write " + path.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw FormatError("write failed for " + path.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw FormatError("cannot rename onto " + path.string() + ": " + ec.message());
}

inline std::string encode_kspace(const KSpace& ks) {
    std::string buf = detail::header("CDKS", ks.dims());
    buf.reserve(buf.size() + 16 * ks.size());
    for (const auto& c : ks) {
        detail::put_f64(buf, c.real());
        detail::put_f64(buf, c.imag());
    }
    return buf;
}

inline KSpace decode_kspace(std::string bytes, const std::string& name = "<memory>") {
    detail::Reader r(std::move(bytes), name);
    const Dims d = detail::read_header(r, "CDKS");
    KSpace ks(d);
    for (auto& c : ks) {
        const double re = r.f64();
        c = Complex(re, r.f64());
    }
    if (!r.at_end()) throw FormatError(name + ": trailing bytes");
    return ks;
}

inline std::string encode_image(const Image& img) {
    std::string buf = detail::header("CDIM", img.dims());
    buf.reserve(buf.size() + 8 * img.size());
    for (double v : img) detail::put_f64(buf, v);
    return buf;
}

inline Image decode_image(std::string bytes, const std::string& name = "<memory>") {
    detail::Reader r(std::move(bytes), name);
    const Dims d = detail::read_header(r, "CDIM");
    Image img(d);
    for (auto& v : img) v = r.f64();
    if (!r.at_end()) throw FormatError(name + ": trailing bytes");
    return img;
}

inline std::string encode_pbm(const SamplingMask& m) {
    std::string buf = "P4\n" + std::to_string(m.width()) + " " + std::to_string(m.height()) + "\n";
    const std::size_t row_bytes = (m.width() + 7) / 8;
    for (std::size_t r = 0; r < m.height(); ++r) {
        std::string row(row_bytes, '\0');
        for (std::size_t c = 0; c < m.width(); ++c) {
            if (m.at(r, c)) row[c / 8] = static_cast<char>(static_cast<unsigned char>(row[c / 8]) | (0x80u >> (c % 8)));
        }
        buf += row;
    }
    return buf;
}

inline SamplingMask decode_pbm(const std::string& bytes, const std::string& name = "<memory>") {
    try {
        std::size_t pos = 0;
        if (detail::pnm_token(bytes, pos) != "P4") throw FormatError(name + ": not a P4 bitmap");
        const std::size_t w = detail::pnm_number(bytes, pos);
        const std::size_t h = detail::pnm_number(bytes, pos);
        if (w == 0 || h == 0) throw FormatError(name + ": zero-sized bitmap");
        ++pos; // single whitespace before raster
        const std::size_t row_bytes = (w + 7) / 8;
        if (bytes.size() != pos + row_bytes * h) throw FormatError(name + ": raster size mismatch");
        SamplingMask m(Dims{w, h}, 0);
        for (std::size_t r = 0; r < h; ++r) {
            for (std::size_t c = 0; c < w; ++c) {
                const auto byte = static_cast<unsigned char>(bytes[pos + r * row_bytes + c / 8]);
                m.at(r, c) = (byte >> (7 - c % 8)) & 1u;
            }
        }
        return m;
    } catch (const FormatError& e) {
        throw FormatError(name + ": " + e.what());
    }
}

struct PreviewRange {
    double min = 0.0;
    double max = 0.0;
};

// 16-bit big-endian P5 (netpbm mandates MSB first for maxval > 255).
inline std::string encode_pgm16(const Image& img, PreviewRange& range) {
    range = {img.empty() ? 0.0 : img[0], img.empty() ? 0.0 : img[0]};
    for (double v : img) {
        range.min = std::min(range.min, v);
        range.max = std::max(range.max, v);
    }
    const double span = range.max - range.min;
    std::string buf = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n65535\n";
    buf.reserve(buf.size() + 2 * img.size());
    for (double v : img) {
        const double t = span > 0.0 ? (v - range.min) / span : 0.0;
        const auto q = static_cast<std::uint16_t>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
        buf.push_back(static_cast<char>(q >> 8));
        buf.push_back(static_cast<char>(q & 0xFFu));
    }
    return buf;
}

inline std::string encode_range(const PreviewRange& r) {
    std::ostringstream os;
    os << std::setprecision(17) << "min " << r.min << "\nmax " << r.max << "\n";
    return os.str();
}

inline void write_kspace(const std::filesystem::path& p, const KSpace& ks) { write_file_atomic(p, encode_kspace(ks)); }
inline KSpace read_kspace(const std::filesystem::path& p) { return decode_kspace(detail::read_all(p), p.string()); }

inline void write_image(const std::filesystem::path& p, const Image& img) { write_file_atomic(p, encode_image(img)); }
inline Image read_image(const std::filesystem::path& p) { return decode_image(detail::read_all(p), p.string()); }

inline void write_mask(const std::filesystem::path& p, const SamplingMask& m) { write_file_atomic(p, encode_pbm(m)); }
inline SamplingMask read_mask(const std::filesystem::path& p) { return decode_pbm(detail::read_all(p), p.string()); }

// Writes `p` and its "<p>.range" sidecar.
inline void write_preview(const std::filesystem::path& p, const Image& img) {
    PreviewRange range;
    write_file_atomic(p, encode_pgm16(img, range));
    auto side = p;
    side += ".range";
    write_file_atomic(side, encode_range(range));
}

} // namespace cdsfcrf::io
