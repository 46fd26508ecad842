#include "qburst/photon_cube.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace qburst {

namespace {

template <class T>
void put_le(std::uint8_t* out, T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i) out[i] = static_cast<std::uint8_t>(bits >> (8 * i));
}

template <class T>
T get_le(const std::uint8_t* in) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(in[i]) << (8 * i);
    return std::bit_cast<T>(bits);
}

void check_header(const CubeHeader& h) {
    if (h.channels != 1 && h.channels != 3) {
        throw CubeError(CubeErrc::InconsistentHeader,
                        "channels must be 1 or 3, got " + std::to_string(h.channels));
    }
    if ((h.channels == 3) != h.pattern.has_value()) {
        throw CubeError(CubeErrc::InconsistentHeader,
                        "color cubes need a Bayer pattern and monochrome cubes must not have one");
    }
    if (h.frame_count > 0 && (h.width == 0 || h.height == 0)) {
        throw CubeError(CubeErrc::InconsistentHeader, "non-empty cube with zero-sized frames");
    }
}

std::size_t read_fully(std::istream& in, std::uint8_t* dst, std::size_t n) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in.gcount());
}

}  // namespace

PhotonCube::PhotonCube(CubeHeader header) : header_(header) {
    header_.frame_count = 0;
    check_header(header_);
}

PhotonCube::PhotonCube(CubeHeader header, std::vector<std::uint8_t> payload)
    : header_(header), payload_(std::move(payload)) {
    check_header(header_);
    if (payload_.size() != header_.payload_bytes()) {
        std::ostringstream msg;
        msg << "payload holds " << payload_.size() << " bytes, header implies "
            << header_.payload_bytes();
        throw CubeError(CubeErrc::InconsistentHeader, msg.str());
    }
}

void PhotonCube::append(const BinaryFrame& frame) {
    if (static_cast<std::uint32_t>(frame.width) != header_.width ||
        static_cast<std::uint32_t>(frame.height) != header_.height) {
        throw CubeError(CubeErrc::InconsistentHeader, "frame dims differ from cube header");
    }
    if (frame.pattern != header_.pattern) {
        throw CubeError(CubeErrc::InconsistentHeader, "frame pattern differs from cube header");
    }
    const auto offset = payload_.size();
    payload_.resize(offset + header_.frame_bytes());
    pack_frame(frame, payload_.data() + offset);
    ++header_.frame_count;
}

BinaryFrame PhotonCube::frame(std::uint64_t index) const {
    if (index >= header_.frame_count) {
        throw CubeError(CubeErrc::OutOfRange, "frame " + std::to_string(index) + " of " +
                                                  std::to_string(header_.frame_count));
    }
    return unpack_frame(payload_.data() + index * header_.frame_bytes(),
                        static_cast<int>(header_.width), static_cast<int>(header_.height),
                        header_.pattern);
}

void pack_frame(const BinaryFrame& frame, std::uint8_t* out) {
    const std::size_t row_bytes = (static_cast<std::size_t>(frame.width) + 7) / 8;
    std::memset(out, 0, row_bytes * frame.height);
    for (int y = 0; y < frame.height; ++y) {
        std::uint8_t* row = out + row_bytes * y;
        for (int x = 0; x < frame.width; ++x) {
            if (frame.at(x, y)) row[x >> 3] |= static_cast<std::uint8_t>(1u << (x & 7));
        }
    }
}

BinaryFrame unpack_frame(const std::uint8_t* in, int width, int height,
                         std::optional<BayerPattern> pattern) {
    BinaryFrame frame{width, height,
                      std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height), pattern};
    const std::size_t row_bytes = (static_cast<std::size_t>(width) + 7) / 8;
    for (int y = 0; y < height; ++y) {
        const std::uint8_t* row = in + row_bytes * y;
        for (int x = 0; x < width; ++x) {
            frame.bits[static_cast<std::size_t>(y) * width + x] = (row[x >> 3] >> (x & 7)) & 1u;
        }
    }
    return frame;
}

std::vector<std::uint8_t> encode_header(const CubeHeader& h) {
    std::vector<std::uint8_t> out(kCubeHeaderSize, 0);
    std::memcpy(out.data(), kCubeMagic, 4);
    put_le(out.data() + 4, h.version);
    put_le(out.data() + 8, h.width);
    put_le(out.data() + 12, h.height);
    put_le(out.data() + 16, h.frame_count);
    put_le(out.data() + 24, h.fps);
    put_le(out.data() + 32, h.channels);
    put_le(out.data() + 36, bayer_code(h.pattern));
    put_le(out.data() + 40, h.alpha);
    put_le(out.data() + 48, h.seed);
    return out;
}

CubeHeader decode_header(const std::uint8_t* bytes) {
    if (std::memcmp(bytes, kCubeMagic, 4) != 0) {
        throw CubeError(CubeErrc::BadMagic, "not a photon cube (bad magic)");
    }
    CubeHeader h;
    h.version = get_le<std::uint32_t>(bytes + 4);
    if (h.version != kCubeVersion) {
        throw CubeError(CubeErrc::VersionMismatch,
                        "unsupported cube version " + std::to_string(h.version) + ", expected " +
                            std::to_string(kCubeVersion));
    }
    h.width = get_le<std::uint32_t>(bytes + 8);
    h.height = get_le<std::uint32_t>(bytes + 12);
    h.frame_count = get_le<std::uint64_t>(bytes + 16);
    h.fps = get_le<double>(bytes + 24);
    h.channels = get_le<std::uint32_t>(bytes + 32);
    try {
        h.pattern = bayer_from_code(get_le<std::uint32_t>(bytes + 36));
    } catch (const InvalidArgument& e) {
        throw CubeError(CubeErrc::InconsistentHeader, e.what());
    }
    h.alpha = get_le<double>(bytes + 40);
    h.seed = get_le<std::uint64_t>(bytes + 48);
    check_header(h);
    return h;
}

std::size_t write_cube(const PhotonCube& cube, std::ostream& sink) {
    const auto& h = cube.header();
    check_header(h);
    if (cube.payload().size() != h.payload_bytes()) {
        throw CubeError(CubeErrc::InconsistentHeader, "payload size does not match header");
    }
    const auto header = encode_header(h);
    sink.write(reinterpret_cast<const char*>(header.data()),
               static_cast<std::streamsize>(header.size()));
    sink.write(reinterpret_cast<const char*>(cube.payload().data()),
               static_cast<std::streamsize>(cube.payload().size()));
    if (!sink) throw CubeError(CubeErrc::Io, "write failed");
    return header.size() + cube.payload().size();
}

PhotonCube read_cube(std::istream& source) {
    std::uint8_t raw[kCubeHeaderSize];
    const auto got = read_fully(source, raw, kCubeHeaderSize);
    if (got < 4 || std::memcmp(raw, kCubeMagic, 4) != 0) {
        throw CubeError(CubeErrc::BadMagic, "not a photon cube (bad magic)");
    }
    if (got < kCubeHeaderSize) {
        throw CubeError(CubeErrc::Truncated, "truncated header: expected " +
                                                 std::to_string(kCubeHeaderSize) + " bytes, got " +
                                                 std::to_string(got));
    }
    const CubeHeader header = decode_header(raw);
    const std::uint64_t frame_bytes = header.frame_bytes();
    if (frame_bytes != 0 && header.frame_count > SIZE_MAX / frame_bytes) {
        throw CubeError(CubeErrc::Truncated, "truncated payload: header implies " +
                                                 std::to_string(header.frame_count) +
                                                 " frames, more than addressable");
    }
    // Grow in chunks so a corrupt frame count cannot force a huge allocation.
    const std::size_t expected = header.payload_bytes();
    constexpr std::size_t kChunk = std::size_t{1} << 20;
    std::vector<std::uint8_t> payload;
    std::size_t n = 0;
    while (n < expected) {
        const std::size_t want = std::min(kChunk, expected - n);
        payload.resize(n + want);
        const auto got_now = read_fully(source, payload.data() + n, want);
        n += got_now;
        if (got_now < want) break;
    }
    if (n != expected) {
        throw CubeError(CubeErrc::Truncated, "truncated payload: expected " +
                                                 std::to_string(expected) + " bytes, got " +
                                                 std::to_string(n));
    }
    return PhotonCube(header, std::move(payload));
}

std::size_t write_cube_file(const PhotonCube& cube, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CubeError(CubeErrc::Io, "cannot open " + path.string() + " for writing");
    return write_cube(cube, out);
}

PhotonCube read_cube_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CubeError(CubeErrc::Io, "cannot open " + path.string());
    return read_cube(in);
}

CubeFrameReader::CubeFrameReader(std::istream& source) : source_(&source) {
    std::uint8_t raw[kCubeHeaderSize];
    const auto got = read_fully(source, raw, kCubeHeaderSize);
    if (got < 4 || std::memcmp(raw, kCubeMagic, 4) != 0) {
        throw CubeError(CubeErrc::BadMagic, "not a photon cube (bad magic)");
    }
    if (got < kCubeHeaderSize) throw CubeError(CubeErrc::Truncated, "truncated header");
    header_ = decode_header(raw);
    payload_offset_ = source.tellg();
    buffer_.resize(header_.frame_bytes());
}

BinaryFrame CubeFrameReader::read_frame(std::uint64_t index) {
    if (index >= header_.frame_count) {
        throw CubeError(CubeErrc::OutOfRange, "frame " + std::to_string(index) + " of " +
                                                  std::to_string(header_.frame_count));
    }
    source_->clear();
    source_->seekg(payload_offset_ +
                   static_cast<std::streamoff>(index * header_.frame_bytes()));
    const auto n = read_fully(*source_, buffer_.data(), buffer_.size());
    if (n != buffer_.size()) {
        throw CubeError(CubeErrc::Truncated, "truncated frame " + std::to_string(index) +
                                                 ": expected " + std::to_string(buffer_.size()) +
                                                 " bytes, got " + std::to_string(n));
    }
    return unpack_frame(buffer_.data(), static_cast<int>(header_.width),
                        static_cast<int>(header_.height), header_.pattern);
}

CubeFrameReader::Range CubeFrameReader::frames(std::uint64_t first, std::uint64_t last) {
    if (first > last || last > header_.frame_count) {
        throw CubeError(CubeErrc::OutOfRange, "frame range [" + std::to_string(first) + ", " +
                                                  std::to_string(last) + ") outside [0, " +
                                                  std::to_string(header_.frame_count) + ")");
    }
    return Range(this, first, last);
}

CubeFrameReader::Range::iterator::iterator(CubeFrameReader* reader, std::uint64_t index,
                                           std::uint64_t last)
    : reader_(reader), index_(index), last_(last) {
    if (reader_ && index_ < last_) current_ = reader_->read_frame(index_);
}

CubeFrameReader::Range::iterator& CubeFrameReader::Range::iterator::operator++() {
    ++index_;
    if (index_ < last_) current_ = reader_->read_frame(index_);
    return *this;
}

}  // namespace qburst
