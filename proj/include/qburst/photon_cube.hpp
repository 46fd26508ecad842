#pragma once

// On-disk photon cube (.pcube), version 1. All fields little-endian.
//
//   offset  size  field
//        0     4  magic "PCUB"
//        4     4  u32 version (= 1)
//        8     4  u32 width
//       12     4  u32 height
//       16     8  u64 frame_count
//       24     8  f64 fps
//       32     4  u32 channels (1 = monochrome, 3 = color behind a CFA)
//       36     4  u32 bayer pattern code (0 none, 1 RGGB, 2 GRBG, 3 BGGR, 4 GBRG)
//       40     8  f64 alpha
//       48     8  u64 seed
//       56        payload
//
// Payload: frame_count frames, each height rows of ceil(width/8) bytes.
// Pixel x of a row lives in byte x/8, bit x%8 (LSB first). Pad bits are zero.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <iterator>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qburst/bayer.hpp"
#include "qburst/quanta_sim.hpp"

namespace qburst {

inline constexpr char kCubeMagic[4] = {'P', 'C', 'U', 'B'};
inline constexpr std::uint32_t kCubeVersion = 1;
inline constexpr std::size_t kCubeHeaderSize = 56;

enum class CubeErrc {
    BadMagic = 1,
    VersionMismatch,
    Truncated,
    InconsistentHeader,
    OutOfRange,
    Io,
};

class CubeError : public std::runtime_error {
public:
    CubeError(CubeErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    CubeErrc code() const noexcept { return code_; }

private:
    CubeErrc code_;
};

struct CubeHeader {
    std::uint32_t version = kCubeVersion;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint64_t frame_count = 0;
    double fps = 0.0;
    std::uint32_t channels = 1;
    std::optional<BayerPattern> pattern;
    double alpha = 1.0;
    std::uint64_t seed = 0;

    std::size_t row_bytes() const noexcept { return (width + 7) / 8; }
    std::size_t frame_bytes() const noexcept { return row_bytes() * height; }
    std::size_t payload_bytes() const noexcept { return frame_bytes() * frame_count; }

    friend bool operator==(const CubeHeader&, const CubeHeader&) = default;
};

/// Bit-packed stack of binary frames held in memory.
class PhotonCube {
public:
    PhotonCube() = default;
    /// Header with frame_count = 0; frames are appended.
    explicit PhotonCube(CubeHeader header);
    /// Takes ownership of an already packed payload. The header must match its size.
    PhotonCube(CubeHeader header, std::vector<std::uint8_t> payload);

    const CubeHeader& header() const noexcept { return header_; }
    std::uint64_t frame_count() const noexcept { return header_.frame_count; }
    const std::vector<std::uint8_t>& payload() const noexcept { return payload_; }
    std::vector<std::uint8_t>& mutable_payload() noexcept { return payload_; }

    void append(const BinaryFrame& frame);
    BinaryFrame frame(std::uint64_t index) const;

    friend bool operator==(const PhotonCube&, const PhotonCube&) = default;

private:
    CubeHeader header_;
    std::vector<std::uint8_t> payload_;
};

void pack_frame(const BinaryFrame& frame, std::uint8_t* out);
BinaryFrame unpack_frame(const std::uint8_t* in, int width, int height,
                         std::optional<BayerPattern> pattern);

std::vector<std::uint8_t> encode_header(const CubeHeader& header);
CubeHeader decode_header(const std::uint8_t* bytes);

/// Serializes the cube; returns total bytes written.
std::size_t write_cube(const PhotonCube& cube, std::ostream& sink);
PhotonCube read_cube(std::istream& source);

std::size_t write_cube_file(const PhotonCube& cube, const std::filesystem::path& path);
PhotonCube read_cube_file(const std::filesystem::path& path);

/// Streams frames [first, last) from a seekable source without loading the payload.
class CubeFrameReader {
public:
    explicit CubeFrameReader(std::istream& source);

    const CubeHeader& header() const noexcept { return header_; }
    BinaryFrame read_frame(std::uint64_t index);

    class Range;
    /// Throws CubeError(OutOfRange) unless first <= last <= frame_count.
    Range frames(std::uint64_t first, std::uint64_t last);

private:
    std::istream* source_;
    std::streamoff payload_offset_ = 0;
    CubeHeader header_;
    std::vector<std::uint8_t> buffer_;
};

class CubeFrameReader::Range {
public:
    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = BinaryFrame;
        using difference_type = std::ptrdiff_t;
        using pointer = const BinaryFrame*;
        using reference = const BinaryFrame&;

        iterator() = default;
        reference operator*() const { return current_; }
        pointer operator->() const { return &current_; }
        iterator& operator++();
        void operator++(int) { ++*this; }
        bool operator==(const iterator& other) const noexcept { return index_ == other.index_; }

    private:
        friend class Range;
        iterator(CubeFrameReader* reader, std::uint64_t index, std::uint64_t last);

        CubeFrameReader* reader_ = nullptr;
        std::uint64_t index_ = 0;
        std::uint64_t last_ = 0;
        BinaryFrame current_;
    };

    iterator begin() { return iterator(reader_, first_, last_); }
    iterator end() { return iterator(nullptr, last_, last_); }

private:
    friend class CubeFrameReader;
    Range(CubeFrameReader* reader, std::uint64_t first, std::uint64_t last)
        : reader_(reader), first_(first), last_(last) {}

    CubeFrameReader* reader_;
    std::uint64_t first_;
    std::uint64_t last_;
};

}  // namespace qburst
