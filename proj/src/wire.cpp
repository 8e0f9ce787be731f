#include "fedlcc/wire.hpp"

#include <cstring>
#include <fstream>

namespace fedlcc {

namespace {
constexpr char kShareMagic[8] = {'F', 'L', 'C', 'S', 'H', 'R', '0', '1'};
constexpr char kDistMagic[8] = {'F', 'L', 'C', 'D', 'S', 'T', '0', '1'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void WireWriter::put_u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        buf_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

void WireWriter::put_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        buf_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

void WireWriter::put_magic(const char tag[8]) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::byte>(tag[i]));
}

void WireWriter::put_header(const WireHeader& h) {
    put_u32(kVersion);
    put_u64(h.p);
    put_u32(h.q);
    put_u32(h.l);
    put_u32(h.t);
    put_u32(h.m);
    put_u64(h.n);
    put_u64(h.d);
    put_u32(h.client);
}

void WireWriter::put_bytes(const std::vector<std::byte>& b) {
    buf_.insert(buf_.end(), b.begin(), b.end());
}

std::uint8_t WireReader::get_u8() {
    if (pos_ + 1 > buf_.size()) throw DataError("truncated wire data");
    return static_cast<std::uint8_t>(buf_[pos_++]);
}

std::uint32_t WireReader::get_u32() {
    if (pos_ + 4 > buf_.size()) throw DataError("truncated wire data");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(buf_[pos_++]) << (8 * i);
    return v;
}

std::uint64_t WireReader::get_u64() {
    if (pos_ + 8 > buf_.size()) throw DataError("truncated wire data");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(buf_[pos_++]) << (8 * i);
    return v;
}

void WireReader::expect_magic(const char tag[8]) {
    if (pos_ + 8 > buf_.size()) throw DataError("truncated wire data");
    for (int i = 0; i < 8; ++i)
        if (static_cast<char>(buf_[pos_ + i]) != tag[i])
            throw DataError("bad magic in wire data");
    pos_ += 8;
}

WireHeader WireReader::get_header() {
    const std::uint32_t version = get_u32();
    if (version != kVersion)
        throw DataError("unsupported wire version " + std::to_string(version));
    WireHeader h;
    h.p = get_u64();
    h.q = get_u32();
    h.l = get_u32();
    h.t = get_u32();
    h.m = get_u32();
    h.n = get_u64();
    h.d = get_u64();
    h.client = get_u32();
    return h;
}

std::vector<std::byte> WireReader::get_bytes(std::size_t count) {
    if (pos_ + count > buf_.size()) throw DataError("truncated wire data");
    std::vector<std::byte> out(buf_.begin() + pos_, buf_.begin() + pos_ + count);
    pos_ += count;
    return out;
}

WireHeader make_header(const CodingScheme& scheme, std::uint64_t n, std::uint64_t d,
                       std::uint32_t client) {
    WireHeader h;
    h.p = scheme.params().p();
    h.q = scheme.params().q();
    h.l = static_cast<std::uint32_t>(scheme.l());
    h.t = static_cast<std::uint32_t>(scheme.t());
    h.m = static_cast<std::uint32_t>(scheme.m());
    h.n = n;
    h.d = d;
    h.client = client;
    return h;
}

void check_header(const WireHeader& h, const CodingScheme& scheme, std::uint64_t n,
                  std::uint64_t d) {
    if (h.p != scheme.params().p() || h.q != scheme.params().q() ||
        h.l != scheme.l() || h.t != scheme.t() || h.m != scheme.m())
        throw DataError("wire header does not match the coding scheme");
    if (h.n != n || h.d != d)
        throw DataError("wire header does not match the dataset shape");
}

std::vector<std::byte> serialize_share_batch(const ShareBatch& batch,
                                             const WireHeader& header) {
    WireWriter w;
    w.put_magic(kShareMagic);
    w.put_header(header);
    w.put_u32(batch.owner);
    w.put_u32(batch.receiver);
    w.put_u64(batch.shares.size());
    const std::size_t seg_len =
        batch.shares.empty() ? 0 : batch.shares.front().payload.size();
    w.put_u64(seg_len);
    for (const auto& s : batch.shares) {
        if (s.payload.size() != seg_len)
            throw ConfigError("share batch with inconsistent payload lengths");
        w.put_u64(s.sample_index);
        for (const auto& fe : s.payload) w.put_u64(fe.v);
    }
    return w.take();
}

ShareBatch deserialize_share_batch(const std::vector<std::byte>& bytes,
                                   WireHeader* header_out) {
    WireReader r(bytes);
    r.expect_magic(kShareMagic);
    WireHeader h = r.get_header();
    if (header_out) *header_out = h;
    ShareBatch batch;
    batch.owner = r.get_u32();
    batch.receiver = r.get_u32();
    const std::uint64_t count = r.get_u64();
    const std::uint64_t seg_len = r.get_u64();
    batch.shares.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Share s;
        s.owner_client = batch.owner;
        s.sample_index = r.get_u64();
        s.payload.resize(seg_len);
        for (auto& fe : s.payload) fe.v = r.get_u64();
        batch.shares.push_back(std::move(s));
    }
    if (!r.done()) throw DataError("trailing bytes after share batch");
    return batch;
}

std::vector<std::byte> serialize_distance_report(const DistanceReport& report,
                                                 const WireHeader& header) {
    if (report.values.size() != report.n * report.n)
        throw ConfigError("distance report must hold n*n values");
    WireWriter w;
    w.put_magic(kDistMagic);
    w.put_header(header);
    w.put_u32(report.client);
    w.put_u64(report.n);
    for (const auto& fe : report.values) w.put_u64(fe.v);
    return w.take();
}

DistanceReport deserialize_distance_report(const std::vector<std::byte>& bytes,
                                           WireHeader* header_out) {
    WireReader r(bytes);
    r.expect_magic(kDistMagic);
    WireHeader h = r.get_header();
    if (header_out) *header_out = h;
    DistanceReport rep;
    rep.client = r.get_u32();
    rep.n = r.get_u64();
    rep.values.resize(rep.n * rep.n);
    for (auto& fe : rep.values) fe.v = r.get_u64();
    if (!r.done()) throw DataError("trailing bytes after distance report");
    return rep;
}

void write_file(const std::string& path, const std::vector<std::byte>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("short write to '" + path + "'");
}

std::vector<std::byte> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw DataError("cannot read file '" + path + "'");
    const std::streamsize size = in.tellg();
    in.seekg(0);
    std::vector<std::byte> bytes(static_cast<std::size_t>(size));
    in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw DataError("short read from '" + path + "'");
    return bytes;
}

}  // namespace fedlcc
