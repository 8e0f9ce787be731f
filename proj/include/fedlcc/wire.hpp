#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fedlcc/error.hpp"
#include "fedlcc/field.hpp"
#include "fedlcc/lcc.hpp"

namespace fedlcc {

// All on-wire integers are little-endian. The same share layout backs the
// in-process transport, transcript files and on-disk dumps.

struct WireHeader {
    std::uint64_t p = 0;
    std::uint32_t q = 0;
    std::uint32_t l = 0;
    std::uint32_t t = 0;
    std::uint32_t m = 0;
    std::uint64_t n = 0;
    std::uint64_t d = 0;
    std::uint32_t client = 0;

    friend bool operator==(const WireHeader&, const WireHeader&) = default;
};

class WireWriter {
public:
    void put_u8(std::uint8_t v) { buf_.push_back(static_cast<std::byte>(v)); }
    void put_u32(std::uint32_t v);
    void put_u64(std::uint64_t v);
    void put_magic(const char tag[8]);
    void put_header(const WireHeader& h);
    void put_bytes(const std::vector<std::byte>& b);

    std::vector<std::byte> take() { return std::move(buf_); }
    const std::vector<std::byte>& bytes() const { return buf_; }

private:
    std::vector<std::byte> buf_;
};

class WireReader {
public:
    explicit WireReader(const std::vector<std::byte>& buf) : buf_(buf) {}
    std::uint8_t get_u8();
    std::uint32_t get_u32();
    std::uint64_t get_u64();
    void expect_magic(const char tag[8]);
    WireHeader get_header();
    std::vector<std::byte> get_bytes(std::size_t count);
    bool done() const { return pos_ == buf_.size(); }
    std::size_t remaining() const { return buf_.size() - pos_; }

private:
    const std::vector<std::byte>& buf_;
    std::size_t pos_ = 0;
};

/// A batch of shares from one owner to one receiver.
struct ShareBatch {
    std::uint32_t owner = 0;
    std::uint32_t receiver = 0;
    std::vector<Share> shares;
};

WireHeader make_header(const CodingScheme& scheme, std::uint64_t n, std::uint64_t d,
                       std::uint32_t client);
void check_header(const WireHeader& h, const CodingScheme& scheme, std::uint64_t n,
                  std::uint64_t d);

std::vector<std::byte> serialize_share_batch(const ShareBatch& batch,
                                             const WireHeader& header);
ShareBatch deserialize_share_batch(const std::vector<std::byte>& bytes,
                                   WireHeader* header_out = nullptr);

/// One client's full n x n encoded-distance matrix.
struct DistanceReport {
    std::uint32_t client = 0;
    std::uint64_t n = 0;
    std::vector<FieldElement> values;  // n*n row-major
};

std::vector<std::byte> serialize_distance_report(const DistanceReport& report,
                                                 const WireHeader& header);
DistanceReport deserialize_distance_report(const std::vector<std::byte>& bytes,
                                           WireHeader* header_out = nullptr);

void write_file(const std::string& path, const std::vector<std::byte>& bytes);
std::vector<std::byte> read_file(const std::string& path);

}  // namespace fedlcc
