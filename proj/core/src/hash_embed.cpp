#include "corpus_router/hash_embed.hpp"

#include <cmath>
#include <stdexcept>

namespace corpus_router {

namespace {

// splitmix64 finalizer; full 64-bit avalanche, stable across platforms.
uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

uint64_t hash_gram(uint64_t seed, unsigned char a, unsigned char b, unsigned char c) {
    const uint64_t packed = (uint64_t(a) << 16) | (uint64_t(b) << 8) | uint64_t(c);
    return mix64(seed ^ mix64(packed));
}

}  // namespace

std::vector<double> hash_embed(std::string_view text, int dim, uint64_t seed) {
    if (dim < 8) throw std::invalid_argument("hash_embed: dim must be >= 8");
    if (text.size() < 3) throw std::invalid_argument("hash_embed: no features");

    std::vector<double> vec(static_cast<size_t>(dim), 0.0);
    for (size_t i = 0; i + 3 <= text.size(); ++i) {
        const uint64_t h = hash_gram(seed, static_cast<unsigned char>(text[i]),
                                     static_cast<unsigned char>(text[i + 1]),
                                     static_cast<unsigned char>(text[i + 2]));
        const size_t slot = static_cast<size_t>(h % static_cast<uint64_t>(dim));
        vec[slot] += (h >> 63) ? 1.0 : -1.0;
    }
    l2_normalize(vec);
    return vec;
}

std::vector<float> hash_embed_f32(std::string_view text, int dim, uint64_t seed) {
    const auto wide = hash_embed(text, dim, seed);
    std::vector<float> out(wide.size());
    for (size_t i = 0; i < wide.size(); ++i) out[i] = static_cast<float>(wide[i]);
    return out;
}

double l2_norm(const std::vector<float>& v) {
    double acc = 0.0;
    for (float x : v) acc += double(x) * double(x);
    return std::sqrt(acc);
}

double l2_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

void l2_normalize(std::vector<float>& v) {
    const double norm = l2_norm(v);
    if (norm == 0.0) throw std::invalid_argument("cannot normalize a zero vector");
    for (float& x : v) x = static_cast<float>(x / norm);
}

void l2_normalize(std::vector<double>& v) {
    const double norm = l2_norm(v);
    if (norm == 0.0) throw std::invalid_argument("cannot normalize a zero vector");
    for (double& x : v) x /= norm;
}

}  // namespace corpus_router
