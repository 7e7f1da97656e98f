// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include "skillopt/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <random>

#include <httplib.h>
#include <json.hpp>

#include "skillopt/errors.hpp"
#include "skillopt/util.hpp"

namespace skillopt {

using nlohmann::json;

// ---------------- sparse vectors ----------------

double SparseVec::norm() const {
    double sq = 0.0;
    for (const auto& [idx, v] : entries) sq += v * v;
    return std::sqrt(sq);
}

double SparseVec::dot(const SparseVec& other) const {
    double sum = 0.0;
    size_t i = 0, j = 0;
    while (i < entries.size() && j < other.entries.size()) {
        if (entries[i].first == other.entries[j].first) {
            sum += entries[i].second * other.entries[j].second;
            ++i;
            ++j;
        } else if (entries[i].first < other.entries[j].first) {
            ++i;
        } else {
            ++j;
        }
    }
    return sum;
}

void SparseVec::l2_normalize() {
    const double n = norm();
    if (n <= 0.0) return;
    for (auto& [idx, v] : entries) v /= n;
}

// ---------------- tf-idf ----------------

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

namespace {

std::vector<std::string> terms_of(const std::string& doc) {
    auto tokens = tokenize(doc);
    std::vector<std::string> terms = tokens;
    for (size_t i = 0; i + 1 < tokens.size(); ++i) terms.push_back(tokens[i] + " " + tokens[i + 1]);
    return terms;
}

}  // namespace

TfIdfModel TfIdfModel::fit(std::span<const std::string> docs) {
    if (docs.size() < 2)
        throw InsufficientData("tf-idf needs at least 2 documents, got " +
                               std::to_string(docs.size()));
    TfIdfModel model;
    model.doc_count_ = static_cast<int>(docs.size());

    std::map<std::string, int> df;
    for (const auto& doc : docs) {
        auto terms = terms_of(doc);
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
        for (const auto& t : terms) ++df[t];
    }

    int index = 0;
    model.idf_.reserve(df.size());
    for (const auto& [term, count] : df) {  // std::map iteration = sorted terms
        model.vocabulary_.emplace(term, index++);
        model.idf_.push_back(std::log((1.0 + model.doc_count_) / (1.0 + count)) + 1.0);
    }
    return model;
}

SparseVec TfIdfModel::transform(const std::string& doc) const {
    std::map<int, double> weights;
    for (const auto& term : terms_of(doc)) {
        auto it = vocabulary_.find(term);
        if (it != vocabulary_.end()) weights[it->second] += idf_[it->second];
    }
    SparseVec vec;
    vec.entries.assign(weights.begin(), weights.end());
    vec.l2_normalize();
    return vec;
}

// ---------------- embedders ----------------

namespace {

class FileEmbedder final : public Embedder {
public:
    explicit FileEmbedder(const std::filesystem::path& path) : path_(path) {
        for (const auto& line : util::split_lines(util::read_file(path))) {
            if (util::trim(line).empty()) continue;
            json rec;
            try {
                rec = json::parse(line);
                auto values = rec.at("values").get<std::vector<double>>();
                const auto dim = rec.at("dim").get<size_t>();
                if (values.size() != dim)
                    throw EmbedError("embedding file " + path.string() +
                                     ": dim mismatch for hash " +
                                     rec.at("hash").get<std::string>());
                vectors_[rec.at("hash").get<std::string>()] = std::move(values);
            } catch (const json::exception& e) {
                throw EmbedError("embedding file " + path.string() + ": " + e.what());
            }
        }
    }

    std::vector<std::vector<double>> embed(std::span<const std::string> texts) override {
        std::vector<std::vector<double>> out;
        out.reserve(texts.size());
        for (const auto& text : texts) {
            auto it = vectors_.find(util::fnv1a64_hex(text));
            if (it == vectors_.end())
                throw EmbedError("no precomputed embedding for text: " +
                                 text.substr(0, std::min<size_t>(text.size(), 80)));
            out.push_back(it->second);
        }
        return out;
    }

private:
    std::filesystem::path path_;
    std::map<std::string, std::vector<double>> vectors_;
};

class HttpEmbedder final : public Embedder {
public:
    HttpEmbedder(std::string endpoint, std::string model, std::string auth_env)
        : endpoint_(std::move(endpoint)), model_(std::move(model)), auth_env_(std::move(auth_env)) {}

    std::vector<std::vector<double>> embed(std::span<const std::string> texts) override {
        auto scheme_end = endpoint_.find("://");
        size_t path_start =
            endpoint_.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
        std::string host =
            path_start == std::string::npos ? endpoint_ : endpoint_.substr(0, path_start);
        std::string base = path_start == std::string::npos ? "" : endpoint_.substr(path_start);
        while (!base.empty() && base.back() == '/') base.pop_back();

        json body = {{"model", model_}, {"input", json::array()}};
        for (const auto& t : texts) body["input"].push_back(t);
        httplib::Headers headers;
        if (const char* token = std::getenv(auth_env_.c_str()); token && *token)
            headers.emplace("Authorization", std::string("Bearer ") + token);

        httplib::Client client(host);
        client.set_read_timeout(120, 0);
        auto res = client.Post(base + "/embeddings", headers, body.dump(), "application/json");
        if (!res || res->status != 200)
            throw EmbedError("embedding endpoint failure" +
                             (res ? " (status " + std::to_string(res->status) + ")" : ""));
        try {
            json doc = json::parse(res->body);
            std::vector<std::vector<double>> out;
            for (const auto& item : doc.at("data"))
                out.push_back(item.at("embedding").get<std::vector<double>>());
            if (out.size() != texts.size()) throw EmbedError("embedding count mismatch");
            return out;
        } catch (const json::exception& e) {
            throw EmbedError(std::string("embedding response: ") + e.what());
        }
    }

private:
    std::string endpoint_;
    std::string model_;
    std::string auth_env_;
};

void l2_normalize(std::vector<double>& v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq <= 0.0) return;
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
}

}  // namespace

std::unique_ptr<Embedder> make_file_embedder(const std::filesystem::path& path) {
    return std::make_unique<FileEmbedder>(path);
}

std::unique_ptr<Embedder> make_http_embedder(std::string endpoint, std::string model,
                                             std::string auth_env) {
    return std::make_unique<HttpEmbedder>(std::move(endpoint), std::move(model),
                                          std::move(auth_env));
}

std::vector<std::vector<double>> embed(std::span<const std::string> texts, Embedder& embedder) {
    auto vectors = embedder.embed(texts);
    if (vectors.size() != texts.size()) throw EmbedError("embedder returned wrong batch size");
    size_t dim = vectors.empty() ? 0 : vectors.front().size();
    for (auto& v : vectors) {
        if (v.size() != dim) throw EmbedError("inconsistent embedding dimensions in batch");
        l2_normalize(v);
    }
    return vectors;
}

// ---------------- hybrid space ----------------

double HybridVector::squared_norm() const {
    double sq = 0.0;
    for (const auto& [idx, v] : lexical.entries) sq += v * v;
    for (double v : dense) sq += v * v;
    return sq;
}

double HybridVector::dot(const HybridVector& other) const {
    double sum = lexical.dot(other.lexical);
    const size_t d = std::min(dense.size(), other.dense.size());
    for (size_t i = 0; i < d; ++i) sum += dense[i] * other.dense[i];
    return sum;
}

double HybridVector::dot_dense(std::span<const double> centroid) const {
    double sum = 0.0;
    for (const auto& [idx, v] : lexical.entries) sum += v * centroid[idx];
    for (size_t i = 0; i < dense.size(); ++i) sum += dense[i] * centroid[lexical_dim + i];
    return sum;
}

std::vector<double> HybridVector::to_dense() const {
    std::vector<double> out(dim(), 0.0);
    for (const auto& [idx, v] : lexical.entries) out[idx] = v;
    for (size_t i = 0; i < dense.size(); ++i) out[lexical_dim + i] = dense[i];
    return out;
}

std::vector<HybridVector> build_hybrid(const std::vector<SparseVec>& lexical, int lexical_dim,
                                       const std::vector<std::vector<double>>& dense) {
    if (lexical.size() != dense.size())
        throw ShapeError("lexical rows (" + std::to_string(lexical.size()) +
                         ") != dense rows (" + std::to_string(dense.size()) + ")");
    std::vector<HybridVector> out;
    out.reserve(lexical.size());
    for (size_t i = 0; i < lexical.size(); ++i) {
        HybridVector h;
        h.lexical = lexical[i];
        h.dense = dense[i];
        h.lexical_dim = lexical_dim;
        out.push_back(std::move(h));
    }
    return out;
}

// ---------------- silhouette ----------------

double silhouette_cosine(const std::vector<HybridVector>& vectors,
                         const std::vector<int>& labels) {
    const size_t n = vectors.size();
    if (labels.size() != n) throw ShapeError("labels/vectors size mismatch");
    int k = 0;
    for (int label : labels) k = std::max(k, label + 1);
    std::vector<size_t> cluster_size(k, 0);
    for (int label : labels) {
        if (label < 0) throw InvalidClustering("negative cluster label");
        ++cluster_size[label];
    }
    int distinct = 0;
    for (size_t s : cluster_size) distinct += s > 0 ? 1 : 0;
    if (distinct < 2) throw InvalidClustering("silhouette needs at least 2 non-empty clusters");

    // Normalized copies: cosine(x, y) == n_x . n_y, with the zero-vector
    // convention cosine = 0.
    std::vector<std::vector<double>> normalized(n);
    std::vector<bool> is_zero(n, false);
    for (size_t i = 0; i < n; ++i) {
        normalized[i] = vectors[i].to_dense();
        double sq = 0.0;
        for (double v : normalized[i]) sq += v * v;
        if (sq <= 0.0) {
            is_zero[i] = true;
            continue;
        }
        const double inv = 1.0 / std::sqrt(sq);
        for (double& v : normalized[i]) v *= inv;
    }
    const size_t dim = normalized.empty() ? 0 : normalized.front().size();

    std::vector<std::vector<double>> cluster_sum(k, std::vector<double>(dim, 0.0));
    for (size_t i = 0; i < n; ++i)
        for (size_t d = 0; d < dim; ++d) cluster_sum[labels[i]][d] += normalized[i][d];

    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const int own = labels[i];
        if (cluster_size[own] <= 1) continue;  // singleton convention: s = 0

        auto dot_with_sum = [&](int cluster) {
            double sum = 0.0;
            for (size_t d = 0; d < dim; ++d) sum += normalized[i][d] * cluster_sum[cluster][d];
            return sum;
        };
        const double self_sim = is_zero[i] ? 0.0 : 1.0;
        const double a =
            1.0 - (dot_with_sum(own) - self_sim) / static_cast<double>(cluster_size[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == own || cluster_size[c] == 0) continue;
            b = std::min(b, 1.0 - dot_with_sum(c) / static_cast<double>(cluster_size[c]));
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

// ---------------- k-means ----------------

namespace {

// Deterministic uniform double in [0, 1); avoids std::uniform_real_distribution,
// whose output is implementation-defined.
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sq_dist(const HybridVector& x, double x_sq, std::span<const double> centroid,
               double c_sq) {
    return std::max(0.0, x_sq + c_sq - 2.0 * x.dot_dense(centroid));
}

double sq(double v) { return v * v; }

std::vector<double> centroid_sq_norms(const std::vector<std::vector<double>>& centroids) {
    std::vector<double> out(centroids.size(), 0.0);
    for (size_t c = 0; c < centroids.size(); ++c)
        for (double v : centroids[c]) out[c] += sq(v);
    return out;
}

// Greedy k-means++: each new center is chosen among several D^2-sampled
// candidates, keeping the one that lowers the total potential the most.
std::vector<std::vector<double>> kmeanspp_init(const std::vector<HybridVector>& vectors,
                                               const std::vector<double>& point_sq, int k,
                                               std::mt19937_64& rng) {
    const size_t n = vectors.size();
    const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));

    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);
    const size_t first = static_cast<size_t>(next_uniform(rng) * static_cast<double>(n));
    centroids.push_back(vectors[std::min(first, n - 1)].to_dense());

    std::vector<double> best_dist(n);
    double c_sq = 0.0;
    for (double v : centroids[0]) c_sq += sq(v);
    double potential = 0.0;
    for (size_t i = 0; i < n; ++i) {
        best_dist[i] = sq_dist(vectors[i], point_sq[i], centroids[0], c_sq);
        potential += best_dist[i];
    }

    for (int c = 1; c < k; ++c) {
        size_t best_candidate = 0;
        double best_potential = std::numeric_limits<double>::infinity();
        std::vector<double> best_candidate_dist;
        for (int t = 0; t < trials; ++t) {
            size_t candidate = 0;
            if (potential > 0.0) {
                const double target = next_uniform(rng) * potential;
                double acc = 0.0;
                candidate = n - 1;
                for (size_t i = 0; i < n; ++i) {
                    acc += best_dist[i];
                    if (acc >= target) {
                        candidate = i;
                        break;
                    }
                }
            } else {
                candidate = static_cast<size_t>(next_uniform(rng) * static_cast<double>(n));
                candidate = std::min(candidate, n - 1);
            }
            auto cand_centroid = vectors[candidate].to_dense();
            double cand_sq = 0.0;
            for (double v : cand_centroid) cand_sq += sq(v);
            std::vector<double> dist(n);
            double cand_potential = 0.0;
            for (size_t i = 0; i < n; ++i) {
                dist[i] = std::min(best_dist[i],
                                   sq_dist(vectors[i], point_sq[i], cand_centroid, cand_sq));
                cand_potential += dist[i];
            }
            if (cand_potential < best_potential) {
                best_potential = cand_potential;
                best_candidate = candidate;
                best_candidate_dist = std::move(dist);
            }
        }
        centroids.push_back(vectors[best_candidate].to_dense());
        best_dist = std::move(best_candidate_dist);
        potential = best_potential;
    }
    return centroids;
}

}  // namespace

std::vector<int> candidate_ks(int n) {
    const double root = std::sqrt(static_cast<double>(n));
    auto even_up = [](int v) { return v % 2 == 0 ? v : v + 1; };
    const int lo = std::max(2, even_up(static_cast<int>(std::ceil(root / 2.0))));
    const int hi = std::min(n - 1, 2 * static_cast<int>(std::ceil(root)));
    std::vector<int> ks;
    for (int k = lo; k <= hi; k += 2) ks.push_back(k);
    return ks;
}

ClusterAssignment kmeans(const std::vector<HybridVector>& vectors, int k, std::uint64_t seed) {
    const size_t n = vectors.size();
    if (k < 1 || static_cast<size_t>(k) > n)
        throw InvalidK("k=" + std::to_string(k) + " out of range for n=" + std::to_string(n));

    std::vector<double> point_sq(n);
    for (size_t i = 0; i < n; ++i) point_sq[i] = vectors[i].squared_norm();

    std::mt19937_64 rng(seed);
    auto centroids = kmeanspp_init(vectors, point_sq, k, rng);

    constexpr double kShiftTol = 1e-6;
    constexpr int kMaxIter = 300;

    std::vector<int> labels(n, 0);
    std::vector<double> dist_to_own(n, 0.0);
    ClusterAssignment result;

    for (int iter = 0; iter < kMaxIter; ++iter) {
        // Assignment step; ties go to the lowest centroid index.
        auto c_sq = centroid_sq_norms(centroids);
        for (size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = sq_dist(vectors[i], point_sq[i], centroids[c], c_sq[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            labels[i] = best;
            dist_to_own[i] = best_d;
        }

        // Repair empty clusters with the point farthest from its centroid.
        std::vector<size_t> counts(k, 0);
        for (int label : labels) ++counts[label];
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            size_t farthest = 0;
            double far_d = -1.0;
            for (size_t i = 0; i < n; ++i) {
                if (counts[labels[i]] <= 1) continue;  // don't empty another cluster
                if (dist_to_own[i] > far_d) {
                    far_d = dist_to_own[i];
                    farthest = i;
                }
            }
            --counts[labels[farthest]];
            labels[farthest] = c;
            counts[c] = 1;
            dist_to_own[farthest] = 0.0;
        }

        double inertia = 0.0;
        for (size_t i = 0; i < n; ++i) inertia += dist_to_own[i];
        result.inertia_history.push_back(inertia);

        // Update step.
        std::vector<std::vector<double>> next(k,
                                              std::vector<double>(vectors[0].dim(), 0.0));
        for (size_t i = 0; i < n; ++i) {
            const auto dense = vectors[i].to_dense();
            auto& acc = next[labels[i]];
            for (size_t d = 0; d < dense.size(); ++d) acc[d] += dense[d];
        }
        double max_shift_sq = 0.0;
        for (int c = 0; c < k; ++c) {
            const double inv = 1.0 / static_cast<double>(counts[c]);
            double shift_sq = 0.0;
            for (size_t d = 0; d < next[c].size(); ++d) {
                next[c][d] *= inv;
                shift_sq += sq(next[c][d] - centroids[c][d]);
            }
            max_shift_sq = std::max(max_shift_sq, shift_sq);
        }
        centroids = std::move(next);
        if (std::sqrt(max_shift_sq) < kShiftTol) break;
    }

    // Labels come from the last assignment+repair pass, so every cluster in
    // [0, k) is non-empty; a post-convergence re-assignment could break that.
    result.k = k;
    result.labels = labels;
    result.centroids = std::move(centroids);
    result.inertia = result.inertia_history.empty() ? 0.0 : result.inertia_history.back();
    result.seed = seed;
    result.silhouette = k >= 2 && n >= 2 ? silhouette_cosine(vectors, result.labels) : 0.0;
    return result;
}

namespace {

// Total order on hybrid vectors by coordinate values; used to canonicalize
// input order inside select_k.
bool vector_less(const HybridVector& a, const HybridVector& b) {
    const auto da = a.to_dense();
    const auto db = b.to_dense();
    return std::lexicographical_compare(da.begin(), da.end(), db.begin(), db.end());
}

}  // namespace

int select_k(const std::vector<HybridVector>& vectors, std::uint64_t seed) {
    const int n = static_cast<int>(vectors.size());
    if (n < 4) throw InsufficientData("select_k needs at least 4 points, got " + std::to_string(n));

    std::vector<HybridVector> canonical = vectors;
    std::sort(canonical.begin(), canonical.end(), vector_less);

    int best_k = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int k : candidate_ks(n)) {
        const auto fit = kmeans(canonical, k, seed);
        const double score = silhouette_cosine(canonical, fit.labels);
        if (score > best_score) {  // strict: ties break toward the smaller k
            best_score = score;
            best_k = k;
        }
    }
    return best_k;
}

}  // namespace skillopt
