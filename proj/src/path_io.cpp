#include "bifbm/path_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "bifbm/error.hpp"

namespace bifbm {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::ostream& out, T value) {
    std::array<unsigned char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
        throw DomainError("binary path block is truncated");
    }
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw DomainError("path CSV: cannot parse number '" + s + "'");
    }
    return v;
}

}  // namespace

void write_path_csv(std::ostream& out, const SamplePath& path) {
    out << "t";
    for (int c = 0; c < path.d(); ++c) {
        out << ",component_" << (c + 1);
    }
    out << '\n';
    for (std::size_t i = 0; i < path.size(); ++i) {
        out << format_double(path.t(i));
        for (int c = 0; c < path.d(); ++c) {
            out << ',' << format_double(path.values(static_cast<Eigen::Index>(i), c));
        }
        out << '\n';
    }
}

PathRecord read_path_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("t", 0) != 0) {
        throw DomainError("path CSV: missing header");
    }
    const auto d = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ','));
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            row.push_back(parse_double(cell));
        }
        if (static_cast<Eigen::Index>(row.size()) != d + 1) {
            throw DomainError("path CSV: row has the wrong number of columns");
        }
        rows.push_back(std::move(row));
    }
    PathRecord rec;
    rec.values.resize(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rec.times.push_back(rows[i][0]);
        for (Eigen::Index c = 0; c < d; ++c) {
            rec.values(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c) + 1];
        }
    }
    return rec;
}

void write_path_binary(std::ostream& out, const SamplePath& path) {
    out.write("BFBM", 4);
    put_le<std::uint32_t>(out, kPathFormatVersion);
    put_le<std::uint64_t>(out, path.size());
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(path.d()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(path.method));
    put_le<std::uint64_t>(out, path.seed);
    for (std::size_t i = 0; i < path.size(); ++i) {
        put_le<double>(out, path.t(i));
        for (int c = 0; c < path.d(); ++c) {
            put_le<double>(out, path.values(static_cast<Eigen::Index>(i), c));
        }
    }
    if (!out) {
        throw Error("failed writing binary path block");
    }
}

PathRecord read_path_binary(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), 4) || std::string(magic.data(), 4) != "BFBM") {
        throw DomainError("binary path block: bad magic");
    }
    const auto version = get_le<std::uint32_t>(in);
    if (version != kPathFormatVersion) {
        throw DomainError("binary path block: unsupported version " + std::to_string(version));
    }
    const auto n = get_le<std::uint64_t>(in);
    const auto d = get_le<std::uint64_t>(in);
    const auto method = get_le<std::uint32_t>(in);
    if (method > 2) {
        throw DomainError("binary path block: unknown method code " + std::to_string(method));
    }
    PathRecord rec;
    rec.method = static_cast<Method>(method);
    rec.seed = get_le<std::uint64_t>(in);
    rec.times.resize(n);
    rec.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::uint64_t i = 0; i < n; ++i) {
        rec.times[i] = get_le<double>(in);
        for (std::uint64_t c = 0; c < d; ++c) {
            rec.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = get_le<double>(in);
        }
    }
    return rec;
}

}  // namespace bifbm
