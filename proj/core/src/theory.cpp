#include "corpus_router/theory.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <new>
#include <random>
#include <stdexcept>
#include <thread>

#include "corpus_router/hash_embed.hpp"
#include "corpus_router/retrieval.hpp"

namespace corpus_router {

namespace {

double binomial_se(double p, uint64_t n) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace

double ScoreModelParams::sigma() const { return std::sqrt(sigma_sq()); }

double SimOutcome::se_unified() const { return binomial_se(p_unified_in_r, trials); }
double SimOutcome::se_routed() const { return binomial_se(p_routed_in_r, trials); }

SimOutcome simulate_unified_vs_routed(const ScoreModelParams& params,
                                      const CorpusSizes& sizes, double router_acc,
                                      uint64_t trials, uint64_t seed) {
    if (sizes.same == 0 || sizes.required == 0)
        throw std::invalid_argument("simulate: S and R must be nonempty");
    if (sizes.other == 0)
        throw std::invalid_argument("simulate: all parts must be nonempty");
    if (trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
    if (router_acc < 0.0 || router_acc > 1.0)
        throw std::invalid_argument("simulate: router accuracy outside [0, 1]");

    const double sigma = params.sigma();
    std::mt19937_64 rng(seed);
    // a zero-stddev distribution is never sampled; the guard below skips it
    std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1.0);
    std::bernoulli_distribution routed_hit(router_acc);

    uint64_t unified_wins = 0;
    uint64_t routed_wins = 0;
    for (uint64_t t = 0; t < trials; ++t) {
        double max_same = -std::numeric_limits<double>::infinity();
        for (uint64_t i = 0; i < sizes.same; ++i)
            max_same = std::max(max_same, params.alpha + (sigma > 0 ? noise(rng) : 0.0));
        double max_required = -std::numeric_limits<double>::infinity();
        for (uint64_t i = 0; i < sizes.required; ++i)
            max_required = std::max(max_required, sigma > 0 ? noise(rng) : 0.0);
        double max_other = -std::numeric_limits<double>::infinity();
        for (uint64_t i = 0; i < sizes.other; ++i)
            max_other = std::max(max_other, sigma > 0 ? noise(rng) : 0.0);

        if (max_required > std::max(max_same, max_other)) ++unified_wins;
        if (routed_hit(rng)) ++routed_wins;
    }

    SimOutcome out;
    out.p_unified_in_r = static_cast<double>(unified_wins) / static_cast<double>(trials);
    out.p_routed_in_r = static_cast<double>(routed_wins) / static_cast<double>(trials);
    out.chernoff = chernoff_bound(params, sizes);
    out.trials = trials;
    out.sizes = sizes;
    out.router_acc = router_acc;
    return out;
}

double chernoff_bound(const ScoreModelParams& params, const CorpusSizes& sizes) {
    if (sizes.same == 0 || sizes.required == 0)
        throw std::invalid_argument("chernoff_bound: S and R must be nonempty");
    const double rs =
        static_cast<double>(sizes.required) * static_cast<double>(sizes.same);
    if (params.alpha == 0.0) return rs;
    const double sigma_sq = params.sigma_sq();
    if (sigma_sq == 0.0) return 0.0;  // limit of exp(-alpha^2/4s^2) as s -> 0
    return rs * std::exp(-(params.alpha * params.alpha) / (4.0 * sigma_sq));
}

double alpha_threshold(const CorpusSizes& sizes, double router_acc, double sigma) {
    if (router_acc <= 0.0 || router_acc > 1.0)
        throw std::invalid_argument("alpha_threshold: router accuracy outside (0, 1]");
    if (sizes.same == 0 || sizes.required == 0)
        throw std::invalid_argument("alpha_threshold: S and R must be nonempty");
    const double rs =
        static_cast<double>(sizes.required) * static_cast<double>(sizes.same);
    return 2.0 * sigma * std::sqrt(std::log(rs) / router_acc);
}

GranularityComparison compare_granularity_policies(const QualityTable& table) {
    if (table.query_ids.empty() || table.granularities.empty())
        throw std::invalid_argument("quality table is empty");
    if (table.values.size() != table.query_ids.size())
        throw std::invalid_argument("incomplete quality table");
    for (const auto& row : table.values) {
        if (row.size() != table.granularities.size())
            throw std::invalid_argument("incomplete quality table");
        for (double v : row)
            if (std::isnan(v)) throw std::invalid_argument("incomplete quality table");
    }

    const size_t num_g = table.granularities.size();
    std::vector<double> fixed_sums(num_g, 0.0);
    double adaptive_sum = 0.0;
    for (const auto& row : table.values) {
        double best = row[0];
        for (size_t g = 0; g < num_g; ++g) {
            fixed_sums[g] += row[g];
            best = std::max(best, row[g]);
        }
        adaptive_sum += best;
    }

    const size_t best_g = static_cast<size_t>(
        std::max_element(fixed_sums.begin(), fixed_sums.end()) - fixed_sums.begin());

    GranularityComparison out;
    out.best_fixed_sum = fixed_sums[best_g];
    out.adaptive_sum = adaptive_sum;
    out.best_fixed_label = table.granularities[best_g];
    out.strict = adaptive_sum > out.best_fixed_sum;
    return out;
}

std::string_view latency_backend_name(LatencyBackend b) {
    return b == LatencyBackend::bucketed ? "bucketed" : "exact_scan";
}

LatencyBackend parse_latency_backend(std::string_view name) {
    if (name == "exact_scan") return LatencyBackend::exact_scan;
    if (name == "bucketed") return LatencyBackend::bucketed;
    throw std::invalid_argument("unknown latency backend: " + std::string(name));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::shared_ptr<Corpus> random_unit_corpus(uint64_t count, int dim, Pathway pathway,
                                           const std::string& name, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> coord(-1.0f, 1.0f);
    std::vector<float> flat(count * static_cast<size_t>(dim));
    for (float& x : flat) x = coord(rng);
    for (uint64_t i = 0; i < count; ++i) {
        float* row = flat.data() + i * static_cast<size_t>(dim);
        double norm = 0.0;
        for (int d = 0; d < dim; ++d) norm += double(row[d]) * double(row[d]);
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            row[0] = 1.0f;
            norm = 1.0;
        }
        for (int d = 0; d < dim; ++d) row[d] = static_cast<float>(row[d] / norm);
    }
    std::vector<std::string> ids(count);
    std::vector<std::string> lines(count);
    for (uint64_t i = 0; i < count; ++i) ids[i] = std::to_string(i);
    return std::make_shared<Corpus>(name, pathway, static_cast<uint32_t>(dim),
                                    std::nullopt, std::move(flat), std::vector<float>{},
                                    std::move(ids), std::move(lines));
}

std::vector<float> random_query(int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<float> coord(-1.0f, 1.0f);
    std::vector<float> q(static_cast<size_t>(dim));
    double norm = 0.0;
    do {
        for (float& x : q) x = coord(rng);
        norm = l2_norm(q);
    } while (norm == 0.0);
    for (float& x : q) x = static_cast<float>(x / norm);
    return q;
}

// Randomly bucketed index probed by nearest centroid; stands in for the
// sub-linear backend regime. Approximate by construction and excluded from
// exactness checks.
struct BucketedIndex {
    int dim = 0;
    std::vector<float> centroids;                              // buckets x dim
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> buckets;  // (corpus, item)
    std::vector<const Corpus*> corpora;

    static BucketedIndex build(const std::vector<std::shared_ptr<Corpus>>& corpora,
                               uint64_t seed) {
        BucketedIndex idx;
        idx.dim = static_cast<int>(corpora.front()->dim());
        uint64_t total = 0;
        for (const auto& c : corpora) {
            idx.corpora.push_back(c.get());
            total += c->size();
        }
        const size_t num_buckets =
            std::max<size_t>(1, static_cast<size_t>(std::ceil(std::sqrt(double(total)))));
        idx.buckets.resize(num_buckets);
        std::vector<double> centroid_acc(num_buckets * static_cast<size_t>(idx.dim), 0.0);

        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<size_t> pick(0, num_buckets - 1);
        for (uint32_t ci = 0; ci < idx.corpora.size(); ++ci) {
            const Corpus& c = *idx.corpora[ci];
            for (uint64_t ii = 0; ii < c.size(); ++ii) {
                const size_t b = pick(rng);
                idx.buckets[b].emplace_back(ci, static_cast<uint32_t>(ii));
                const auto v = c.primary(ii);
                double* acc = centroid_acc.data() + b * static_cast<size_t>(idx.dim);
                for (int d = 0; d < idx.dim; ++d) acc[d] += v[d];
            }
        }
        idx.centroids.assign(num_buckets * static_cast<size_t>(idx.dim), 0.0f);
        for (size_t b = 0; b < num_buckets; ++b) {
            const double* acc = centroid_acc.data() + b * static_cast<size_t>(idx.dim);
            double norm = 0.0;
            for (int d = 0; d < idx.dim; ++d) norm += acc[d] * acc[d];
            norm = std::sqrt(norm);
            float* out = idx.centroids.data() + b * static_cast<size_t>(idx.dim);
            for (int d = 0; d < idx.dim; ++d)
                out[d] = norm > 0 ? static_cast<float>(acc[d] / norm) : 0.0f;
        }
        return idx;
    }

    // Nearest-centroid probe, then an exact scan of that bucket.
    void search(const std::vector<float>& q, int k) const {
        size_t best_bucket = 0;
        double best_score = -2.0;
        const size_t num_buckets = buckets.size();
        for (size_t b = 0; b < num_buckets; ++b) {
            const float* c = centroids.data() + b * static_cast<size_t>(dim);
            double s = 0.0;
            for (int d = 0; d < dim; ++d) s += double(q[static_cast<size_t>(d)]) * c[d];
            if (s > best_score) {
                best_score = s;
                best_bucket = b;
            }
        }
        // top-k within the bucket; results discarded, this path is timed only
        std::vector<std::pair<double, uint64_t>> top;
        top.reserve(static_cast<size_t>(k) + 1);
        for (const auto& [ci, ii] : buckets[best_bucket]) {
            const auto v = corpora[ci]->primary(ii);
            double s = 0.0;
            for (int d = 0; d < dim; ++d) s += double(q[static_cast<size_t>(d)]) * v[d];
            top.emplace_back(s, (uint64_t(ci) << 32) | ii);
            std::push_heap(top.begin(), top.end(), std::greater<>{});
            if (top.size() > static_cast<size_t>(k)) {
                std::pop_heap(top.begin(), top.end(), std::greater<>{});
                top.pop_back();
            }
        }
    }
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

LatencyReport bench_latency(const LatencyConfig& config) {
    if (config.pathway_count < 2)
        throw std::invalid_argument("bench_latency: pathway count must be >= 2");
    if (config.repetitions < 3)
        throw std::invalid_argument("bench_latency: repetitions must be >= 3");
    for (uint64_t n : config.corpus_sizes)
        if (n < 1000)
            throw std::invalid_argument("bench_latency: every corpus size must be >= 1000");
    if (config.corpus_sizes.empty())
        throw std::invalid_argument("bench_latency: no corpus sizes given");

    LatencyReport report;
    report.backend = config.backend;
    const auto& scheme = GranularityScheme::default_scheme();
    const auto& universe = scheme.universe();

    for (uint64_t n : config.corpus_sizes) {
        std::vector<std::shared_ptr<Corpus>> corpora;
        try {
            for (int c = 0; c < config.pathway_count; ++c) {
                // reuse scheme pathways cyclically; the pathway is cosmetic here
                const Pathway p = universe[1 + (static_cast<size_t>(c) % (universe.size() - 1))];
                corpora.push_back(random_unit_corpus(
                    n, config.dim, p, "bench" + std::to_string(c),
                    config.seed ^ (n * 0x9e3779b9ULL) ^ static_cast<uint64_t>(c)));
            }
        } catch (const std::bad_alloc&) {
            report.error = "insufficient memory for corpus size " + std::to_string(n);
            return report;
        }

        std::mt19937_64 query_rng(config.seed ^ 0xabcdef);
        const auto route_delay =
            std::chrono::duration<double, std::milli>(config.route_cost_ms);

        std::vector<double> unified_times, routed_times;
        if (config.backend == LatencyBackend::exact_scan) {
            for (int rep = 0; rep < config.repetitions; ++rep) {
                const auto q = random_query(config.dim, query_rng);

                auto start = Clock::now();
                unified_retrieve(q, corpora, config.top_k);
                unified_times.push_back(seconds_since(start));

                const auto& routed = *corpora[rep % corpora.size()];
                start = Clock::now();
                std::this_thread::sleep_for(route_delay);
                retrieve_topk(q, routed, config.top_k);
                routed_times.push_back(seconds_since(start));
            }
        } else {
            BucketedIndex unified_index;
            std::vector<BucketedIndex> routed_indexes;
            try {
                unified_index = BucketedIndex::build(corpora, config.seed);
                for (const auto& c : corpora)
                    routed_indexes.push_back(BucketedIndex::build({c}, config.seed));
            } catch (const std::bad_alloc&) {
                report.error = "insufficient memory for corpus size " + std::to_string(n);
                return report;
            }
            for (int rep = 0; rep < config.repetitions; ++rep) {
                const auto q = random_query(config.dim, query_rng);

                auto start = Clock::now();
                unified_index.search(q, config.top_k);
                unified_times.push_back(seconds_since(start));

                const auto& routed = routed_indexes[rep % routed_indexes.size()];
                start = Clock::now();
                std::this_thread::sleep_for(route_delay);
                routed.search(q, config.top_k);
                routed_times.push_back(seconds_since(start));
            }
        }

        LatencyRow row;
        row.n = n;
        row.k = config.pathway_count;
        row.t_unified_s = median(unified_times);
        row.t_routed_s = median(routed_times);
        row.ratio = row.t_unified_s / row.t_routed_s;
        report.rows.push_back(row);
    }
    return report;
}

std::shared_ptr<Corpus> make_score_model_corpus(
    const std::vector<float>& query_vec, bool same_modality_as_query,
    const ScoreModelParams& params, uint64_t count, Pathway pathway,
    const std::string& name, uint64_t seed) {
    if (count == 0) throw std::invalid_argument("empty corpus");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> rel(0.0, params.sigma_r > 0 ? params.sigma_r : 1.0);
    std::normal_distribution<double> eps(0.0, params.sigma_eps > 0 ? params.sigma_eps : 1.0);

    std::vector<CorpusItem> items;
    items.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        double s = (same_modality_as_query ? params.alpha : 0.0);
        if (params.sigma_r > 0) s += params.beta * rel(rng);
        if (params.sigma_eps > 0) s += eps(rng);
        s = std::clamp(s, -0.999, 0.999);
        items.push_back({name + "-" + std::to_string(i),
                         vector_at_similarity(query_vec, s, rng()),
                         std::nullopt,
                         nlohmann::json::object()});
    }
    return make_corpus(items, pathway, name);
}

std::vector<float> vector_at_similarity(const std::vector<float>& query_vec, double s,
                                        uint64_t seed) {
    if (s <= -1.0 || s >= 1.0)
        throw std::invalid_argument("similarity must lie strictly inside (-1, 1)");
    std::vector<float> q = query_vec;
    l2_normalize(q);

    // draw a direction, remove its projection onto q, normalize the residue
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> coord(0.0, 1.0);
    std::vector<double> u(q.size());
    for (;;) {
        for (double& x : u) x = coord(rng);
        double proj = 0.0;
        for (size_t i = 0; i < q.size(); ++i) proj += u[i] * q[i];
        double norm = 0.0;
        for (size_t i = 0; i < q.size(); ++i) {
            u[i] -= proj * q[i];
            norm += u[i] * u[i];
        }
        norm = std::sqrt(norm);
        if (norm > 1e-12) {
            for (double& x : u) x /= norm;
            break;
        }
    }

    const double ortho = std::sqrt(1.0 - s * s);
    std::vector<float> out(q.size());
    for (size_t i = 0; i < q.size(); ++i)
        out[i] = static_cast<float>(s * q[i] + ortho * u[i]);
    return out;
}

}  // namespace corpus_router
