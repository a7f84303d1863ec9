#include "corpus_router/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace corpus_router {

namespace {

double dot(std::span<const float> a, std::span<const float> b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += double(a[i]) * double(b[i]);
    return acc;
}

std::vector<float> unit(std::span<const float> v) {
    double norm = std::sqrt(dot(v, v));
    if (norm == 0.0) throw std::invalid_argument("zero query vector");
    std::vector<float> out(v.begin(), v.end());
    for (float& x : out) x = static_cast<float>(x / norm);
    return out;
}

// Candidate during a scan; ids are materialized only for the winners.
struct Candidate {
    double score;
    uint32_t corpus_index;
    uint64_t item_index;
};

// Total order: score descending, then (corpus_name, item_id) ascending.
bool better(const Candidate& a, const Candidate& b,
            const std::vector<const Corpus*>& corpora) {
    if (a.score != b.score) return a.score > b.score;
    if (a.corpus_index != b.corpus_index) {
        const auto& na = corpora[a.corpus_index]->name();
        const auto& nb = corpora[b.corpus_index]->name();
        if (na != nb) return na < nb;
    }
    return corpora[a.corpus_index]->id(a.item_index) <
           corpora[b.corpus_index]->id(b.item_index);
}

void scan_corpus(const Corpus& corpus, uint32_t corpus_index,
                 std::span<const float> q, std::span<const float> q_aux,
                 FusionWeights w, size_t k, std::vector<Candidate>& heap,
                 const std::vector<const Corpus*>& corpora) {
    if (corpus.dim() != q.size())
        throw std::invalid_argument("query dimension " + std::to_string(q.size()) +
                                    " does not match corpus dim " +
                                    std::to_string(corpus.dim()));
    const bool fuse = corpus.aux_dim().has_value() && !q_aux.empty();
    if (fuse && *corpus.aux_dim() != q_aux.size())
        throw std::invalid_argument("aux query dimension does not match corpus");
    corpus.note_scan();

    // min-heap under `better`: the root is the weakest of the current top-k
    auto worse = [&](const Candidate& a, const Candidate& b) {
        return better(a, b, corpora);
    };
    for (uint64_t i = 0; i < corpus.size(); ++i) {
        double s = dot(q, corpus.primary(i));
        if (fuse) s = fused_score(s, dot(q_aux, corpus.aux(i)), w);
        Candidate c{s, corpus_index, i};
        if (heap.size() < k) {
            heap.push_back(c);
            std::push_heap(heap.begin(), heap.end(), worse);
        } else if (better(c, heap.front(), corpora)) {
            std::pop_heap(heap.begin(), heap.end(), worse);
            heap.back() = c;
            std::push_heap(heap.begin(), heap.end(), worse);
        }
    }
}

RetrievalResult finalize(std::vector<Candidate> heap, int k,
                         const std::vector<const Corpus*>& corpora) {
    std::sort(heap.begin(), heap.end(),
              [&](const Candidate& a, const Candidate& b) { return better(a, b, corpora); });
    RetrievalResult result;
    result.k = k;
    result.entries.reserve(heap.size());
    for (const auto& c : heap) {
        const auto& corpus = *corpora[c.corpus_index];
        result.entries.push_back(
            {corpus.id(c.item_index), corpus.name(), corpus.pathway(), c.score});
    }
    return result;
}

}  // namespace

namespace {

template <typename Span>
double cosine_impl(Span a, Span b) {
    if (a.size() != b.size())
        throw std::invalid_argument("cosine_score: dimension mismatch");
    if (a.empty()) throw std::invalid_argument("cosine_score: empty vectors");
    double aa = 0.0, bb = 0.0, ab = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        aa += double(a[i]) * double(a[i]);
        bb += double(b[i]) * double(b[i]);
        ab += double(a[i]) * double(b[i]);
    }
    if (aa == 0.0 || bb == 0.0) throw std::invalid_argument("cosine_score: zero vector");
    return ab / (std::sqrt(aa) * std::sqrt(bb));
}

}  // namespace

double cosine_score(std::span<const float> a, std::span<const float> b) {
    return cosine_impl(a, b);
}

double cosine_score(std::span<const double> a, std::span<const double> b) {
    return cosine_impl(a, b);
}

double fused_score(double visual_sim, double text_sim, FusionWeights w) {
    constexpr double slack = 1e-9;
    if (visual_sim < -1.0 - slack || visual_sim > 1.0 + slack ||
        text_sim < -1.0 - slack || text_sim > 1.0 + slack)
        throw std::invalid_argument("fused_score: similarity outside [-1, 1]");
    if (w.visual_weight < 0.0 || w.visual_weight > 1.0)
        throw std::invalid_argument("fused_score: weight outside [0, 1]");
    return w.visual_weight * visual_sim + (1.0 - w.visual_weight) * text_sim;
}

RetrievalResult retrieve_topk(std::span<const float> query_vec, const Corpus& corpus,
                              int k, FusionWeights w,
                              std::span<const float> aux_query_vec) {
    if (k < 1) throw std::invalid_argument("retrieve_topk: k must be >= 1");
    const std::vector<const Corpus*> corpora{&corpus};
    const std::vector<float> q = unit(query_vec);
    std::vector<float> q_aux;
    if (!aux_query_vec.empty()) q_aux = unit(aux_query_vec);

    std::vector<Candidate> heap;
    heap.reserve(static_cast<size_t>(k) + 1);
    scan_corpus(corpus, 0, q, q_aux, w, static_cast<size_t>(k), heap, corpora);
    return finalize(std::move(heap), k, corpora);
}

RetrievalResult unified_retrieve(std::span<const float> query_vec,
                                 const std::vector<std::shared_ptr<Corpus>>& corpora,
                                 int k, FusionWeights w,
                                 std::span<const float> aux_query_vec) {
    if (k < 1) throw std::invalid_argument("unified_retrieve: k must be >= 1");
    if (corpora.empty()) throw std::invalid_argument("unified_retrieve: no corpora");
    for (const auto& c : corpora)
        if (c->dim() != corpora.front()->dim())
            throw std::invalid_argument("not embeddable in one space");

    std::vector<const Corpus*> raw;
    raw.reserve(corpora.size());
    for (const auto& c : corpora) raw.push_back(c.get());

    const std::vector<float> q = unit(query_vec);
    std::vector<float> q_aux;
    if (!aux_query_vec.empty()) q_aux = unit(aux_query_vec);

    std::vector<Candidate> heap;
    heap.reserve(static_cast<size_t>(k) + 1);
    for (uint32_t ci = 0; ci < raw.size(); ++ci)
        scan_corpus(*raw[ci], ci, q, q_aux, w, static_cast<size_t>(k), heap, raw);
    return finalize(std::move(heap), k, raw);
}

std::vector<RetrievalResult> retrieve_all(
    std::span<const float> query_vec,
    const std::vector<std::shared_ptr<Corpus>>& corpora, int k_per_corpus,
    FusionWeights w, std::span<const float> aux_query_vec) {
    if (k_per_corpus < 1) throw std::invalid_argument("retrieve_all: k must be >= 1");
    std::vector<std::shared_ptr<Corpus>> ordered = corpora;
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (a->pathway() != b->pathway()) return a->pathway() < b->pathway();
        return a->name() < b->name();
    });
    std::vector<RetrievalResult> results;
    results.reserve(ordered.size());
    for (const auto& corpus : ordered)
        results.push_back(retrieve_topk(query_vec, *corpus, k_per_corpus, w, aux_query_vec));
    return results;
}

}  // namespace corpus_router
