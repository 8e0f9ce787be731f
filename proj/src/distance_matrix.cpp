#include "fedlcc/distance_matrix.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "fedlcc/error.hpp"

namespace fedlcc {

GlobalDistanceMatrix assemble(std::size_t n,
                              std::span<const FieldElement> pair_distances,
                              const FieldParams& params,
                              DequantExponent exponent) {
    const std::size_t expected = n * (n - 1) / 2;
    if (pair_distances.size() != expected)
        throw DataError("assemble: expected " + std::to_string(expected) +
                        " pair distances for n=" + std::to_string(n) + ", got " +
                        std::to_string(pair_distances.size()));
    Matrix values(n, n, 0.0);
    std::size_t negatives = 0;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++idx) {
            const double v = field_distance_to_real(pair_distances[idx], params, exponent);
            if (v < 0) ++negatives;
            values.at(i, j) = v;
            values.at(j, i) = v;
        }
    }
    return GlobalDistanceMatrix(std::move(values), Provenance::Reconstructed,
                                negatives);
}

GlobalDistanceMatrix oracle_distance_matrix(const Matrix& features) {
    const std::size_t n = features.rows();
    Matrix values(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = squared_distance(features.row(i), features.row(j));
            values.at(i, j) = v;
            values.at(j, i) = v;
        }
    return GlobalDistanceMatrix(std::move(values), Provenance::Oracle);
}

double rmse(const GlobalDistanceMatrix& a, const GlobalDistanceMatrix& b) {
    if (a.n() != b.n())
        throw ConfigError("rmse: dimension mismatch " + std::to_string(a.n()) +
                          " vs " + std::to_string(b.n()));
    const auto& va = a.values().data();
    const auto& vb = b.values().data();
    double acc = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        const double d = va[i] - vb[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(va.size()));
}

namespace {

void append_shortest(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw Error("double formatting failed");
    out.append(buf, ptr);
}

constexpr char kMatrixMagic[8] = {'F', 'L', 'C', 'D', 'M', 'T', '0', '1'};

}  // namespace

void dump_matrix_csv(const GlobalDistanceMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    std::string line;
    for (std::size_t i = 0; i < m.n(); ++i) {
        line.clear();
        for (std::size_t j = 0; j < m.n(); ++j) {
            if (j) line.push_back(',');
            append_shortest(line, m.at(i, j));
        }
        line.push_back('\n');
        out << line;
    }
}

void dump_matrix_binary(const GlobalDistanceMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out.write(kMatrixMagic, 8);
    auto put_le = [&out](std::uint64_t v, int bytes) {
        char le[8];
        for (int i = 0; i < bytes; ++i) le[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out.write(le, bytes);
    };
    put_le(1, 4);  // version
    put_le(m.n(), 8);
    for (double v : m.values().data()) put_le(std::bit_cast<std::uint64_t>(v), 8);
    if (!out) throw DataError("short write to '" + path + "'");
}

GlobalDistanceMatrix load_matrix_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read '" + path + "'");
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMatrixMagic, 8) != 0)
        throw DataError("'" + path + "' is not a distance matrix dump");
    auto get_le = [&in, &path](int bytes) {
        char le[8];
        in.read(le, bytes);
        if (!in) throw DataError("truncated matrix dump '" + path + "'");
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(le[i])) << (8 * i);
        return v;
    };
    const std::uint64_t version = get_le(4);
    const std::uint64_t n = get_le(8);
    if (version != 1) throw DataError("unsupported matrix dump version");
    Matrix values(n, n);
    for (double& v : values.data()) {
        char le[8];
        in.read(le, 8);
        if (!in) throw DataError("truncated matrix dump '" + path + "'");
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(le[i]))
                    << (8 * i);
        v = std::bit_cast<double>(bits);
    }
    return GlobalDistanceMatrix(std::move(values), Provenance::Reconstructed);
}

}  // namespace fedlcc
