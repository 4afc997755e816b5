#pragma once

#include <array>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tfsi/corpus.hpp"

namespace tfsi::keywords {

/// Word vectors loaded from the "<vocab> <dim>" text format. Phrases are stored
/// with '_' joining their words; lookups are case-insensitive.
class EmbeddingTable {
public:
    explicit EmbeddingTable(int dimension = 0) : dimension_(dimension) {}

    int dimension() const { return dimension_; }
    std::size_t size() const { return words_.size(); }
    const std::vector<std::string>& words() const { return words_; }

    void add(std::string word, std::vector<double> vec);
    /// Accepts "Federal Reserve", "federal_reserve", ...
    const std::vector<double>* find(std::string_view keyword) const;

private:
    int dimension_;
    std::vector<std::string> words_;
    std::vector<std::vector<double>> vectors_;
    std::unordered_map<std::string, std::size_t> index_;
};

EmbeddingTable parse_embeddings(std::string_view text);
EmbeddingTable load_embeddings(const std::string& path);
std::string write_embeddings(const EmbeddingTable& table);

/// dot(u, v) / (|u| |v|). Throws kNumeric on a zero-norm vector and
/// kInvalidArgument on a dimension mismatch.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

struct SimilarityMatrix {
    std::vector<std::string> words;
    Eigen::MatrixXd values;
    /// Mean of off-diagonal entries.
    double mean = 0.0;
    /// Keywords with no vector in the source table.
    std::vector<std::string> missing;
};

SimilarityMatrix make_similarity(std::vector<std::string> words, Eigen::MatrixXd values);
SimilarityMatrix build_similarity(const EmbeddingTable& table, const std::vector<std::string>& keywords);
std::string similarity_csv(const SimilarityMatrix& m);

using WordPair = std::pair<std::string, std::string>;  // lexicographically ordered

/// Unordered pairs whose similarity strictly exceeds the off-diagonal mean.
std::set<WordPair> above_mean_edges(const SimilarityMatrix& m);

struct ClusterSet {
    std::array<std::vector<std::string>, 3> groups;

    bool operator==(const ClusterSet&) const = default;
};

struct ClusterOptions {
    /// When the consensus graph cannot be merged down to three groups, throw
    /// (strict) or finish with average linkage alone.
    bool strict = true;
};

/// Consensus edges (above the mean in at least two matrices, or in the single
/// matrix when only one is given) drive agglomerative merging: the pair of
/// clusters with the most consensus edges merges first, ties go to the larger
/// average similarity and then to the lexicographically smallest members.
ClusterSet cluster_three(const std::vector<SimilarityMatrix>& matrices, const ClusterOptions& opts = {});

/// Keyword groups as printed in the source dictionary; within-group repeats are
/// dropped keeping the first listing.
const ClusterSet& builtin_clusters();
/// Log lines describing the repeats dropped from the built-in list.
const std::vector<std::string>& builtin_cluster_conflicts();

ClusterSet parse_clusters(std::string_view text);
ClusterSet load_clusters(const std::string& path);
std::string write_clusters(const ClusterSet& c);

std::vector<std::string> all_keywords(const ClusterSet& c);

// ---------------------------------------------------------------------------
// Query

enum class MatchMode { kWholeWord, kRootPrefix };

struct Query {
    ClusterSet groups;
    corpus::ExclusionRules exclusions;
    MatchMode mode = MatchMode::kWholeWord;
};

/// Lower-cased alphanumeric tokens; bytes >= 0x80 count as word characters.
std::vector<std::string> tokenize(std::string_view text);

/// Inflected forms accepted for a single keyword in whole-word mode:
/// the word plus -s, -es, -ing, -ed (and e-drop / y->ies variants).
std::vector<std::string> surface_forms(std::string_view word);

/// Precompiled form of a Query; matching is pure and thread-safe.
class QueryMatcher {
public:
    explicit QueryMatcher(Query q);

    bool matches(std::string_view text_clean) const;
    /// Which groups have at least one hit, ignoring exclusions.
    std::array<bool, 3> group_hits(std::string_view text_clean) const;
    const Query& query() const { return query_; }

private:
    struct Phrase {
        std::vector<std::string> tokens;
    };
    bool group_hit(std::size_t g, const std::vector<std::string>& tokens) const;

    Query query_;
    std::array<std::unordered_set<std::string>, 3> single_forms_;
    std::array<std::vector<std::string>, 3> single_roots_;
    std::array<std::vector<Phrase>, 3> phrases_;
};

bool query_match(const Query& q, std::string_view text_clean);

}  // namespace tfsi::keywords
