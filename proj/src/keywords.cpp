#include "tfsi/keywords.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "tfsi/csv.hpp"
#include "tfsi/error.hpp"

namespace tfsi::keywords {

namespace {

// "Federal Reserve" / "federal_reserve" / "FEDERAL reserve" -> "federal_reserve"
std::string lookup_key(std::string_view word) {
    std::string out;
    out.reserve(word.size());
    for (char c : word) {
        if (c == ' ') c = '_';
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        out.push_back(c);
    }
    return out;
}

}  // namespace

void EmbeddingTable::add(std::string word, std::vector<double> vec) {
    if (dimension_ == 0) dimension_ = static_cast<int>(vec.size());
    if (static_cast<int>(vec.size()) != dimension_) {
        throw Error(ErrorKind::kParse, "vector for '" + word + "' has dimension " + std::to_string(vec.size()) +
                                           ", table dimension is " + std::to_string(dimension_));
    }
    const std::string key = lookup_key(word);
    if (index_.count(key)) throw Error(ErrorKind::kParse, "duplicate embedding word '" + word + "'");
    index_.emplace(key, words_.size());
    words_.push_back(std::move(word));
    vectors_.push_back(std::move(vec));
}

const std::vector<double>* EmbeddingTable::find(std::string_view keyword) const {
    const auto it = index_.find(lookup_key(keyword));
    return it == index_.end() ? nullptr : &vectors_[it->second];
}

EmbeddingTable parse_embeddings(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::kParse, "empty embedding file");
    std::istringstream header(line);
    long long vocab = -1;
    int dim = -1;
    if (!(header >> vocab >> dim) || vocab < 0 || dim <= 0) {
        throw Error(ErrorKind::kParse, "embedding header must be '<vocab_size> <dimension>'");
    }
    EmbeddingTable table(dim);
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::istringstream fields(line);
        std::string word;
        fields >> word;
        std::vector<double> vec;
        vec.reserve(static_cast<size_t>(dim));
        std::string tok;
        while (fields >> tok) vec.push_back(parse_double(tok));
        if (static_cast<int>(vec.size()) != dim) {
            throw Error(ErrorKind::kParse, "line " + std::to_string(lineno) + ": expected " + std::to_string(dim) +
                                               " components, got " + std::to_string(vec.size()));
        }
        table.add(std::move(word), std::move(vec));
    }
    if (static_cast<long long>(table.size()) != vocab) {
        throw Error(ErrorKind::kParse, "header declares " + std::to_string(vocab) + " words, file has " +
                                           std::to_string(table.size()));
    }
    return table;
}

EmbeddingTable load_embeddings(const std::string& path) { return parse_embeddings(read_text_file(path)); }

std::string write_embeddings(const EmbeddingTable& table) {
    std::string out = std::to_string(table.size()) + " " + std::to_string(table.dimension()) + "\n";
    for (const auto& w : table.words()) {
        out += w;
        for (double v : *table.find(w)) {
            out.push_back(' ');
            out += format_double(v);
        }
        out.push_back('\n');
    }
    return out;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw Error(ErrorKind::kInvalidArgument, "cosine_similarity: dimension mismatch " + std::to_string(u.size()) +
                                                     " vs " + std::to_string(v.size()));
    }
    double dot = 0.0;
    double nu = 0.0;
    double nv = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) throw Error(ErrorKind::kNumeric, "cosine_similarity: zero-norm vector");
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

SimilarityMatrix make_similarity(std::vector<std::string> words, Eigen::MatrixXd values) {
    const auto n = static_cast<Eigen::Index>(words.size());
    if (values.rows() != n || values.cols() != n) {
        throw Error(ErrorKind::kInvalidArgument, "similarity matrix shape does not match word list");
    }
    SimilarityMatrix m;
    m.words = std::move(words);
    m.values = std::move(values);
    if (n >= 2) {
        // Running mean: exact when every entry is equal, so a flat matrix has no
        // entry strictly above its mean.
        double mean = 0.0, k = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i != j) mean += (m.values(i, j) - mean) / ++k;
            }
        }
        m.mean = mean;
    }
    return m;
}

SimilarityMatrix build_similarity(const EmbeddingTable& table, const std::vector<std::string>& keywords) {
    std::vector<std::string> present;
    std::vector<const std::vector<double>*> vecs;
    std::vector<std::string> missing;
    for (const auto& k : keywords) {
        if (const auto* v = table.find(k)) {
            present.push_back(k);
            vecs.push_back(v);
        } else {
            missing.push_back(k);
        }
    }
    const auto n = static_cast<Eigen::Index>(present.size());
    Eigen::MatrixXd values(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        values(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double s = cosine_similarity(*vecs[static_cast<size_t>(i)], *vecs[static_cast<size_t>(j)]);
            values(i, j) = s;
            values(j, i) = s;
        }
    }
    SimilarityMatrix m = make_similarity(std::move(present), std::move(values));
    m.missing = std::move(missing);
    return m;
}

std::string similarity_csv(const SimilarityMatrix& m) {
    std::string out = "word";
    for (const auto& w : m.words) out += "," + csv_escape(w);
    out += "\n";
    for (size_t i = 0; i < m.words.size(); ++i) {
        out += csv_escape(m.words[i]);
        for (size_t j = 0; j < m.words.size(); ++j) {
            out += "," + format_fixed(m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 6);
        }
        out += "\n";
    }
    return out;
}

std::set<WordPair> above_mean_edges(const SimilarityMatrix& m) {
    std::set<WordPair> edges;
    const size_t n = m.words.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > m.mean) {
                edges.insert(std::minmax(m.words[i], m.words[j]));
            }
        }
    }
    return edges;
}

// ---------------------------------------------------------------------------

ClusterSet cluster_three(const std::vector<SimilarityMatrix>& matrices, const ClusterOptions& opts) {
    if (matrices.empty()) throw Error(ErrorKind::kInvalidArgument, "cluster_three: no similarity matrices");
    std::vector<std::string> words = matrices.front().words;
    std::sort(words.begin(), words.end());
    if (std::adjacent_find(words.begin(), words.end()) != words.end()) {
        throw Error(ErrorKind::kInvalidArgument, "cluster_three: repeated keyword");
    }
    const size_t n = words.size();
    if (n < 3) throw Error(ErrorKind::kInvalidArgument, "cluster_three: need at least 3 keywords");

    // Consensus counts and mean similarity in canonical (sorted) word order.
    Eigen::MatrixXi votes = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::MatrixXd sim = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& m : matrices) {
        std::map<std::string, Eigen::Index> pos;
        for (size_t i = 0; i < m.words.size(); ++i) pos[m.words[i]] = static_cast<Eigen::Index>(i);
        if (pos.size() != n) throw Error(ErrorKind::kInvalidArgument, "cluster_three: matrices disagree on words");
        std::vector<Eigen::Index> p(n);
        for (size_t i = 0; i < n; ++i) {
            const auto it = pos.find(words[i]);
            if (it == pos.end()) {
                throw Error(ErrorKind::kInvalidArgument, "cluster_three: '" + words[i] + "' missing from a matrix");
            }
            p[i] = it->second;
        }
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double v = m.values(p[i], p[j]);
                sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += v / static_cast<double>(matrices.size());
                if (v > m.mean) ++votes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
    }
    const int needed = matrices.size() >= 2 ? 2 : 1;
    const auto consensus = [&](size_t i, size_t j) {
        return votes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) >= needed;
    };

    // Clusters hold indices into the sorted word list, so clusters[c].front()
    // is always the lexicographically smallest member.
    std::vector<std::vector<size_t>> clusters;
    for (size_t i = 0; i < n; ++i) clusters.push_back({i});

    while (clusters.size() > 3) {
        struct Candidate {
            int edges = -1;
            double linkage = -std::numeric_limits<double>::infinity();
            size_t a = 0;
            size_t b = 0;
        };
        Candidate best;
        bool found = false;
        for (size_t a = 0; a < clusters.size(); ++a) {
            for (size_t b = a + 1; b < clusters.size(); ++b) {
                int edges = 0;
                double total = 0.0;
                for (size_t i : clusters[a]) {
                    for (size_t j : clusters[b]) {
                        if (consensus(i, j)) ++edges;
                        total += sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                    }
                }
                if (edges == 0 && opts.strict) continue;
                const double linkage = total / static_cast<double>(clusters[a].size() * clusters[b].size());
                // Clusters are kept ordered by smallest member, so scanning order
                // already realises the lexicographic tie-break.
                if (!found || edges > best.edges || (edges == best.edges && linkage > best.linkage)) {
                    best = {edges, linkage, a, b};
                    found = true;
                }
            }
        }
        if (!found) {
            std::vector<std::string> isolated;
            for (size_t i = 0; i < n; ++i) {
                bool any = false;
                for (size_t j = 0; j < n && !any; ++j) any = i != j && consensus(i, j);
                if (!any) isolated.push_back(words[i]);
            }
            std::string msg = "cluster_three: consensus graph leaves " + std::to_string(clusters.size()) +
                              " disconnected groups; cannot form 3 connected groups";
            if (!isolated.empty()) {
                msg += "; isolated words:";
                for (const auto& w : isolated) msg += " '" + w + "'";
            }
            throw Error(ErrorKind::kInvalidArgument, msg);
        }
        auto& into = clusters[best.a];
        into.insert(into.end(), clusters[best.b].begin(), clusters[best.b].end());
        std::sort(into.begin(), into.end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best.b));
        std::sort(clusters.begin(), clusters.end(),
                  [](const auto& x, const auto& y) { return x.front() < y.front(); });
    }

    ClusterSet out;
    for (size_t g = 0; g < 3; ++g) {
        for (size_t i : clusters[g]) out.groups[g].push_back(words[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Builtin {
    ClusterSet clusters;
    std::vector<std::string> conflicts;
};

const Builtin& builtin() {
    static const Builtin b = [] {
        const std::array<std::vector<std::string>, 3> listed = {{
            {"Bond", "Debt", "Security", "Credit", "Loan", "Mortgage", "Portfolio", "Pension", "Federal Funds",
             "Leverage", "Financing", "Rent", "Portfolio", "Asset", "Pension", "Facility", "CPFF", "PDCF", "MMMFLF",
             "PMCCF", "MLF", "MSCP", "Fund", "Currency", "Debenture", "Leverage", "Cash", "Finance"},
            {"Corporate", "Company", "Subsidiary", "Market", "Municipal", "Sovereign", "Program", "Market",
             "Federal Reserve", "Collateral", "Credit Agency", "Sovereign", "Credit Agency", "Program", "Federal",
             "Federal Reserve", "Money Markets", "Collateral", "Junk", "High Yield", "Investment Grade", "HY", "IG"},
            {"Coupon", "Interest", "Rate", "IPO", "Term", "Liquidity", "Yield", "Downgrade", "Outstanding",
             "Repayment", "Default", "Initial Public Offering", "Lending", "Return on", "Upgrade"},
        }};
        Builtin out;
        std::map<std::string, size_t> owner;
        for (size_t g = 0; g < 3; ++g) {
            for (const auto& w : listed[g]) {
                const std::string key = to_lower(w);
                if (const auto it = owner.find(key); it != owner.end()) {
                    out.conflicts.push_back("keyword '" + w + "' listed again in group " + std::to_string(g + 1) +
                                            "; kept in group " + std::to_string(it->second + 1));
                    continue;
                }
                owner.emplace(key, g);
                out.clusters.groups[g].push_back(w);
            }
        }
        return out;
    }();
    return b;
}

}  // namespace

const ClusterSet& builtin_clusters() { return builtin().clusters; }
const std::vector<std::string>& builtin_cluster_conflicts() { return builtin().conflicts; }

ClusterSet parse_clusters(std::string_view text) {
    ClusterSet out;
    int current = -1;
    std::array<bool, 3> seen{};
    size_t lineno = 0;
    for (const auto& raw : split(text, '\n')) {
        ++lineno;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line == "[group1]" || line == "[group2]" || line == "[group3]") {
            current = line[6] - '1';
            if (seen[static_cast<size_t>(current)]) {
                throw Error(ErrorKind::kParse, "cluster file repeats section " + line);
            }
            seen[static_cast<size_t>(current)] = true;
            continue;
        }
        if (current < 0) throw Error(ErrorKind::kParse, "line " + std::to_string(lineno) + ": keyword before section");
        out.groups[static_cast<size_t>(current)].push_back(line);
    }
    std::set<std::string> all;
    for (size_t g = 0; g < 3; ++g) {
        if (out.groups[g].empty()) {
            throw Error(ErrorKind::kParse, "cluster group " + std::to_string(g + 1) + " is empty");
        }
        for (const auto& w : out.groups[g]) {
            if (!all.insert(to_lower(w)).second) {
                throw Error(ErrorKind::kParse, "keyword '" + w + "' appears in more than one place");
            }
        }
    }
    return out;
}

ClusterSet load_clusters(const std::string& path) { return parse_clusters(read_text_file(path)); }

std::string write_clusters(const ClusterSet& c) {
    std::string out;
    for (size_t g = 0; g < 3; ++g) {
        out += "[group" + std::to_string(g + 1) + "]\n";
        for (const auto& w : c.groups[g]) out += w + "\n";
    }
    return out;
}

std::vector<std::string> all_keywords(const ClusterSet& c) {
    std::vector<std::string> out;
    for (const auto& g : c.groups) out.insert(out.end(), g.begin(), g.end());
    return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        const auto uc = static_cast<unsigned char>(c);
        const bool word = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || uc >= 0x80;
        if (c >= 'A' && c <= 'Z') {
            cur.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if (word) {
            cur.push_back(c);
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<std::string> surface_forms(std::string_view word) {
    const std::string w = to_lower(word);
    std::vector<std::string> forms{w, w + "s", w + "es", w + "ing", w + "ed"};
    if (w.size() > 1 && w.back() == 'e') {
        forms.push_back(w + "d");
        forms.push_back(w.substr(0, w.size() - 1) + "ing");
    }
    if (w.size() > 1 && w.back() == 'y') {
        forms.push_back(w.substr(0, w.size() - 1) + "ies");
    }
    std::sort(forms.begin(), forms.end());
    forms.erase(std::unique(forms.begin(), forms.end()), forms.end());
    return forms;
}

QueryMatcher::QueryMatcher(Query q) : query_(std::move(q)) {
    for (size_t g = 0; g < 3; ++g) {
        for (const auto& kw : query_.groups.groups[g]) {
            auto toks = tokenize(kw);
            if (toks.empty()) continue;
            if (toks.size() == 1) {
                if (query_.mode == MatchMode::kWholeWord) {
                    for (auto& f : surface_forms(toks[0])) single_forms_[g].insert(std::move(f));
                } else {
                    single_roots_[g].push_back(toks[0]);
                }
            } else {
                phrases_[g].push_back(Phrase{std::move(toks)});
            }
        }
    }
}

bool QueryMatcher::group_hit(size_t g, const std::vector<std::string>& tokens) const {
    for (size_t i = 0; i < tokens.size(); ++i) {
        const std::string& tok = tokens[i];
        if (single_forms_[g].count(tok)) return true;
        for (const auto& root : single_roots_[g]) {
            if (tok.compare(0, root.size(), root) == 0) return true;
        }
        for (const auto& ph : phrases_[g]) {
            const size_t len = ph.tokens.size();
            if (i + len > tokens.size()) continue;
            bool ok = true;
            for (size_t k = 0; k < len && ok; ++k) {
                const bool last = k + 1 == len;
                if (last && query_.mode == MatchMode::kRootPrefix) {
                    ok = tokens[i + k].compare(0, ph.tokens[k].size(), ph.tokens[k]) == 0;
                } else {
                    ok = tokens[i + k] == ph.tokens[k];
                }
            }
            if (ok) return true;
        }
    }
    return false;
}

std::array<bool, 3> QueryMatcher::group_hits(std::string_view text_clean) const {
    const auto tokens = tokenize(text_clean);
    return {group_hit(0, tokens), group_hit(1, tokens), group_hit(2, tokens)};
}

bool QueryMatcher::matches(std::string_view text_clean) const {
    const auto tokens = tokenize(text_clean);
    for (size_t g = 0; g < 3; ++g) {
        if (!group_hit(g, tokens)) return false;
    }
    if (text_clean.empty()) return false;
    return !corpus::exclusion_filter(text_clean, query_.exclusions).has_value();
}

bool query_match(const Query& q, std::string_view text_clean) { return QueryMatcher(q).matches(text_clean); }

}  // namespace tfsi::keywords
