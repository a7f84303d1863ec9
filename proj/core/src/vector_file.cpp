#include "corpus_router/vector_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace corpus_router {

static_assert(std::endian::native == std::endian::little,
              "vector file IO assumes a little-endian host");
static_assert(sizeof(float) == 4);

namespace {

void write_raw(std::ostream& out, const void* p, size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out) throw std::runtime_error("vector file: write failed");
}

void read_raw(std::istream& in, void* p, size_t n, const char* what) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n)
        throw std::runtime_error(std::string("vector file: truncated ") + what);
}

}  // namespace

void write_vector_block(std::ostream& out, const VectorMatrix& m) {
    if (m.data.size() != static_cast<size_t>(m.dim) * m.count)
        throw std::invalid_argument("vector file: data size does not match dim*count");
    write_raw(out, kVectorFileMagic, sizeof(kVectorFileMagic));
    write_raw(out, &m.dim, sizeof(m.dim));
    write_raw(out, &m.count, sizeof(m.count));
    if (!m.data.empty()) write_raw(out, m.data.data(), m.data.size() * sizeof(float));
}

VectorMatrix read_vector_block(std::istream& in) {
    char magic[8];
    read_raw(in, magic, sizeof(magic), "header");
    if (std::memcmp(magic, kVectorFileMagic, sizeof(magic)) != 0)
        throw std::runtime_error("vector file: magic mismatch");
    VectorMatrix m;
    read_raw(in, &m.dim, sizeof(m.dim), "header");
    read_raw(in, &m.count, sizeof(m.count), "header");
    const uint64_t total = static_cast<uint64_t>(m.dim) * m.count;
    m.data.resize(total);
    if (total > 0) read_raw(in, m.data.data(), total * sizeof(float), "payload");
    return m;
}

void write_vector_file(const std::filesystem::path& path, const VectorMatrix& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    write_vector_block(out, m);
    out.flush();
    if (!out) throw std::runtime_error("vector file: write failed");
}

VectorMatrix read_vector_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for read: " + path.string());
    VectorMatrix m = read_vector_block(in);
    // a trailing byte means the file disagrees with its own header
    char extra;
    if (in.read(&extra, 1); in.gcount() != 0)
        throw std::runtime_error("vector file: trailing bytes after payload");
    return m;
}

}  // namespace corpus_router
