// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace skillopt {

/// Sparse vector with strictly increasing indices.
struct SparseVec {
    std::vector<std::pair<int, double>> entries;

    double norm() const;
    double dot(const SparseVec& other) const;
    void l2_normalize();  // zero vector stays zero
};

/// TF-IDF over unigrams and bigrams: raw term frequency, smoothed idf
/// ln((1+N)/(1+df)) + 1, L2 document normalization. Tokenization lowercases
/// and splits on non-alphanumerics; bigrams join adjacent tokens.
class TfIdfModel {
public:
    static TfIdfModel fit(std::span<const std::string> docs);  // InsufficientData if < 2 docs

    SparseVec transform(const std::string& doc) const;

    const std::map<std::string, int>& vocabulary() const { return vocabulary_; }
    const std::vector<double>& idf() const { return idf_; }
    int doc_count() const { return doc_count_; }

private:
    std::map<std::string, int> vocabulary_;  // term -> contiguous column index
    std::vector<double> idf_;
    int doc_count_ = 0;
};

std::vector<std::string> tokenize(const std::string& text);  // lowercased unigrams

// ---------------- embeddings ----------------

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<std::vector<double>> embed(std::span<const std::string> texts) = 0;
};

/// Looks up vectors from a JSONL file of {hash, dim, values} records, keyed by
/// the fnv1a64 hash of the exact text. Unknown text -> EmbedError.
std::unique_ptr<Embedder> make_file_embedder(const std::filesystem::path& path);

/// POSTs {"model", "input": [texts]} to `endpoint`/embeddings and reads
/// data[i].embedding, OpenAI-compatible.
std::unique_ptr<Embedder> make_http_embedder(std::string endpoint, std::string model,
                                             std::string auth_env = "SKILLOPT_API_KEY");

/// One L2-normalized vector per text, constant dimension across the batch.
std::vector<std::vector<double>> embed(std::span<const std::string> texts, Embedder& embedder);

// ---------------- hybrid space ----------------

/// Concatenation of two independently normalized views: sparse TF-IDF
/// ([0, lexical_dim)) and a dense sentence embedding tail.
struct HybridVector {
    SparseVec lexical;
    std::vector<double> dense;
    int lexical_dim = 0;

    int dim() const { return lexical_dim + static_cast<int>(dense.size()); }
    double squared_norm() const;
    double dot(const HybridVector& other) const;
    double dot_dense(std::span<const double> centroid) const;  // centroid.size() == dim()
    std::vector<double> to_dense() const;
};

std::vector<HybridVector> build_hybrid(const std::vector<SparseVec>& lexical, int lexical_dim,
                                       const std::vector<std::vector<double>>& dense);

// ---------------- clustering ----------------

struct ClusterAssignment {
    int k = 0;
    std::vector<int> labels;                   // per-point cluster index in [0, k)
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;
    double silhouette = 0.0;                   // cosine silhouette of the final labels
    std::uint64_t seed = 0;
    std::vector<double> inertia_history;       // one entry per Lloyd iteration, non-increasing
};

/// Mean per-point silhouette with cosine distance (1 - cosine similarity).
/// Points in singleton clusters score 0. Throws InvalidClustering when fewer
/// than two distinct labels are present.
double silhouette_cosine(const std::vector<HybridVector>& vectors, const std::vector<int>& labels);

/// Lloyd k-means with greedy k-means++ seeding; runs until the max centroid
/// shift drops below 1e-6 or 300 iterations. Empty clusters are repaired by
/// stealing the point farthest from its assigned centroid. Fully deterministic
/// for a given (vectors, k, seed).
ClusterAssignment kmeans(const std::vector<HybridVector>& vectors, int k, std::uint64_t seed);

/// Candidate cluster counts probed by select_k: even k with
/// max(2, ceil(sqrt(n)/2) rounded up to even) <= k <= min(n-1, 2*ceil(sqrt(n))).
std::vector<int> candidate_ks(int n);

/// Picks the candidate k maximizing the cosine silhouette of a seeded k-means
/// fit, ties toward smaller k. Candidate fits run on a canonical ordering of
/// the input so the choice is invariant to input permutation.
int select_k(const std::vector<HybridVector>& vectors, std::uint64_t seed);

}  // namespace skillopt
