#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace corpus_router {

/// Dense f32 matrix file.
///
/// Layout: magic "URAGVEC1" (8 ASCII bytes), u32 little-endian dim,
/// u64 little-endian count, then count*dim IEEE-754 f32 little-endian
/// values, row-major.
inline constexpr char kVectorFileMagic[8] = {'U', 'R', 'A', 'G', 'V', 'E', 'C', '1'};

struct VectorMatrix {
    uint32_t dim = 0;
    uint64_t count = 0;
    std::vector<float> data;  // count * dim, row-major

    const float* row(uint64_t i) const { return data.data() + i * dim; }
};

void write_vector_file(const std::filesystem::path& path, const VectorMatrix& m);
VectorMatrix read_vector_file(const std::filesystem::path& path);

/// Stream variants used when the matrix is embedded inside another file
/// (router model files append one after their JSON header).
void write_vector_block(std::ostream& out, const VectorMatrix& m);
VectorMatrix read_vector_block(std::istream& in);

}  // namespace corpus_router
