#include "muskat/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "muskat/error.hpp"

namespace muskat {

namespace {

constexpr char kMagic[4] = {'M', 'S', 'K', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw InvalidArgument("snapshot: truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const ScalarField& f, double t, double alpha) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidArgument("snapshot: cannot open " + path.string());
    os.write(kMagic, 4);
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.nx));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.ny));
    put<double>(os, f.grid.lx);
    put<double>(os, f.grid.ly);
    put<double>(os, t);
    put<double>(os, alpha);
    for (double v : f.values) put<double>(os, v);
    if (!os) throw InvalidArgument("snapshot: write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidArgument("snapshot: cannot open " + path.string());
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw InvalidArgument("snapshot: bad magic");
    if (get<std::uint32_t>(is) != kVersion) throw InvalidArgument("snapshot: unsupported version");
    GridSpec g;
    g.nx = static_cast<int>(get<std::uint32_t>(is));
    g.ny = static_cast<int>(get<std::uint32_t>(is));
    g.lx = get<double>(is);
    g.ly = get<double>(is);
    g.validate();
    Snapshot s;
    s.t = get<double>(is);
    s.alpha = get<double>(is);
    s.field = ScalarField(g);
    for (double& v : s.field.values) v = get<double>(is);
    return s;
}

}  // namespace muskat
