#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "tlra/tensor.hpp"

namespace tlra {

namespace {
constexpr char kTextMagic[] = "TNSR";
constexpr char kBinaryMagic[] = "TNSR1";

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw IoError("tensor: truncated binary header");
    return v;
}
}  // namespace

Tensor read_tensor_text(std::istream& in) {
    std::string magic;
    in >> magic;
    if (magic != kTextMagic) throw IoError("tensor: bad text header, expected TNSR");
    int d = 0;
    if (!(in >> d) || d < 1) throw IoError("tensor: bad mode count");
    std::vector<int> shape(static_cast<std::size_t>(d));
    std::size_t n = 1;
    for (int& e : shape) {
        if (!(in >> e) || e < 1) throw IoError("tensor: bad extent");
        n *= static_cast<std::size_t>(e);
    }
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!(in >> data[i])) throw IoError("tensor: entry count below header");
    double extra;
    if (in >> extra) throw IoError("tensor: entry count above header");
    return Tensor(std::move(shape), std::move(data));
}

void write_tensor_text(std::ostream& out, const Tensor& t) {
    out << kTextMagic << ' ' << t.order();
    for (int e : t.shape()) out << ' ' << e;
    out << '\n';
    out.precision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < t.size(); ++i)
        out << t[i] << ((i + 1) % 8 == 0 ? '\n' : ' ');
    out << '\n';
}

Tensor read_tensor_binary(std::istream& in) {
    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, kBinaryMagic, 5) != 0)
        throw IoError("tensor: bad binary magic, expected TNSR1");
    const std::uint32_t d = read_u32(in);
    if (d < 1 || d > 64) throw IoError("tensor: bad mode count");
    std::vector<int> shape(d);
    std::size_t n = 1;
    for (auto& e : shape) {
        const std::uint32_t v = read_u32(in);
        if (v < 1) throw IoError("tensor: bad extent");
        e = static_cast<int>(v);
        n *= v;
    }
    std::vector<double> data(n);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw IoError("tensor: entry count below header");
    return Tensor(std::move(shape), std::move(data));
}

void write_tensor_binary(std::ostream& out, const Tensor& t) {
    out.write(kBinaryMagic, 5);
    write_u32(out, static_cast<std::uint32_t>(t.order()));
    for (int e : t.shape()) write_u32(out, static_cast<std::uint32_t>(e));
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
}

Tensor read_tensor_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("tensor: cannot open " + path);
    char probe[5] = {};
    in.read(probe, 5);
    in.seekg(0);
    if (std::memcmp(probe, kBinaryMagic, 5) == 0) {
        Tensor t = read_tensor_binary(in);
        char extra;
        if (in.read(&extra, 1)) throw IoError("tensor: trailing bytes after payload");
        return t;
    }
    return read_tensor_text(in);
}

void write_tensor_file(const std::string& path, const Tensor& t, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw IoError("tensor: cannot write " + path);
    if (binary)
        write_tensor_binary(out, t);
    else
        write_tensor_text(out, t);
}

}  // namespace tlra
