#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace corpus_router {

/// Deterministic text embedder: signed feature hashing of character
/// 3-grams into a dim-sized vector, L2-normalized in double precision (the
/// norm lands within 1e-9 of 1). Identical (text, dim, seed) always produce
/// the identical vector.
///
/// Throws std::invalid_argument when dim < 8 or the text yields no 3-grams.
std::vector<double> hash_embed(std::string_view text, int dim, uint64_t seed);

/// Single-precision variant for corpus storage and query embedding; the
/// norm stays within 1e-6 of 1 after the f32 rounding.
std::vector<float> hash_embed_f32(std::string_view text, int dim, uint64_t seed);

/// L2 norm accumulated in double.
double l2_norm(const std::vector<float>& v);
double l2_norm(const std::vector<double>& v);

/// Scales v to unit L2 norm in place. Throws std::invalid_argument on a
/// zero vector.
void l2_normalize(std::vector<float>& v);
void l2_normalize(std::vector<double>& v);

}  // namespace corpus_router
