#include "tfsi/sentiment.hpp"

#include <algorithm>
#include <cmath>

#include "tfsi/csv.hpp"
#include "tfsi/error.hpp"

namespace tfsi::sentiment {

const char* to_string(Label l) {
    switch (l) {
        case Label::kPositive: return "positive";
        case Label::kNegative: return "negative";
        case Label::kNeutral: return "neutral";
    }
    return "neutral";
}

const char* to_string(Source s) { return s == Source::kRule ? "rule" : "external"; }

std::optional<Label> parse_label(std::string_view s) {
    if (s == "positive") return Label::kPositive;
    if (s == "negative") return Label::kNegative;
    if (s == "neutral") return Label::kNeutral;
    return std::nullopt;
}

const char* to_string(NeutralMode m) { return m == NeutralMode::kZero ? "zero" : "drop"; }

NeutralMode parse_neutral_mode(std::string_view s) {
    if (s == "zero") return NeutralMode::kZero;
    if (s == "drop") return NeutralMode::kDrop;
    throw Error(ErrorKind::kConfig, "neutral mode must be 'zero' or 'drop', got '" + std::string(s) + "'");
}

const double* Lexicon::find(std::string_view token_lower) const {
    const std::string key(token_lower);
    if (const auto it = valences.find(key); it != valences.end()) return &it->second;
    if (const auto it = emoticons.find(key); it != emoticons.end()) return &it->second;
    return nullptr;
}

Lexicon parse_lexicon(std::string_view text) {
    enum class Section { kLexicon, kBoosters, kNegations, kSpecial, kEmoticons };
    Lexicon lex;
    Section section = Section::kLexicon;
    size_t lineno = 0;
    for (const auto& raw : split(text, '\n')) {
        ++lineno;
        std::string line = raw;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line[0] == '#') continue;
        if (line == "[lexicon]") { section = Section::kLexicon; continue; }
        if (line == "[boosters]") { section = Section::kBoosters; continue; }
        if (line == "[negations]") { section = Section::kNegations; continue; }
        if (line == "[special]") { section = Section::kSpecial; continue; }
        if (line == "[emoticons]") { section = Section::kEmoticons; continue; }
        if (section == Section::kNegations) {
            lex.negations.insert(to_lower(trim(line)));
            continue;
        }
        const auto fields = split(line, '\t');
        if (fields.size() < 2) {
            throw Error(ErrorKind::kParse, "lexicon line " + std::to_string(lineno) + ": expected token<TAB>value");
        }
        const std::string token = to_lower(trim(fields[0]));
        double value = 0.0;
        try {
            value = parse_double(fields[1]);
        } catch (const Error&) {
            throw Error(ErrorKind::kParse, "lexicon line " + std::to_string(lineno) + ": bad value '" + fields[1] + "'");
        }
        switch (section) {
            case Section::kLexicon: lex.valences[token] = value; break;
            case Section::kBoosters: lex.boosters[token] = value; break;
            case Section::kSpecial: lex.special_cases[token] = value; break;
            case Section::kEmoticons: lex.emoticons[token] = value; break;
            case Section::kNegations: break;
        }
    }
    return lex;
}

Lexicon load_lexicon(const std::string& path) { return parse_lexicon(read_text_file(path)); }

const Lexicon& default_lexicon() {
    static const Lexicon lex = load_lexicon(std::string(TFSI_DATA_DIR) + "/lexicon.tsv");
    return lex;
}

double compound_from_probs(double pos, double neg) {
    const auto valid = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
    if (!valid(pos) || !valid(neg)) {
        throw Error(ErrorKind::kInvalidArgument, "probabilities must lie in [0, 1]");
    }
    if (pos + neg > 1.0 + 1e-9) throw Error(ErrorKind::kInvalidArgument, "pos + neg exceeds 1");
    return pos - neg;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kAsciiPunctuation = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

size_t code_points(std::string_view s) {
    size_t n = 0;
    for (char c : s) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    }
    return n;
}

// Leading/trailing punctuation is removed unless that leaves two characters or
// fewer, which keeps emoticons such as ":)" intact.
std::string strip_punct_if_word(std::string_view token) {
    const size_t b = token.find_first_not_of(kAsciiPunctuation);
    if (b == std::string_view::npos) return std::string(token);
    const size_t e = token.find_last_not_of(kAsciiPunctuation);
    const std::string_view stripped = token.substr(b, e - b + 1);
    if (code_points(stripped) <= 2) return std::string(token);
    return std::string(stripped);
}

// str.isupper(): at least one cased character and no lower-case ones.
bool is_upper(std::string_view s) {
    bool upper = false;
    for (char c : s) {
        if (c >= 'a' && c <= 'z') return false;
        if (c >= 'A' && c <= 'Z') upper = true;
    }
    return upper;
}

std::vector<std::string> split_whitespace(std::string_view text) {
    std::vector<std::string> out;
    size_t i = 0;
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    while (i < text.size()) {
        while (i < text.size() && ws(text[i])) ++i;
        size_t j = i;
        while (j < text.size() && !ws(text[j])) ++j;
        if (j > i) out.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

struct Tokens {
    std::vector<std::string> words;
    std::vector<std::string> lower;
    bool cap_differential = false;
};

Tokens prepare(std::string_view text) {
    Tokens t;
    for (const auto& w : split_whitespace(text)) {
        t.words.push_back(strip_punct_if_word(w));
        t.lower.push_back(to_lower(t.words.back()));
    }
    size_t caps = 0;
    for (const auto& w : t.words) caps += is_upper(w) ? 1 : 0;
    const size_t diff = t.words.size() - caps;
    t.cap_differential = diff > 0 && diff < t.words.size();
    return t;
}

}  // namespace

RuleScorer::RuleScorer(const Lexicon& lex, RuleConstants constants, double neutral_band)
    : lex_(lex), c_(constants), band_(neutral_band) {}

SentimentScore RuleScorer::score(std::string_view text) const {
    const Tokens tk = prepare(text);
    const auto& w = tk.words;
    const auto& lw = tk.lower;
    const size_t n = w.size();

    const auto in_lexicon = [&](const std::string& lower) { return lex_.find(lower) != nullptr; };
    const auto is_negation = [&](const std::string& lower) {
        return lex_.negations.count(lower) > 0 || lower.find("n't") != std::string::npos;
    };
    const auto booster_of = [&](const std::string& lower) -> const double* {
        const auto it = lex_.boosters.find(lower);
        return it == lex_.boosters.end() ? nullptr : &it->second;
    };
    const auto scalar_inc_dec = [&](size_t idx, double valence) {
        double scalar = 0.0;
        if (const double* b = booster_of(lw[idx])) {
            scalar = *b;
            if (valence < 0) scalar *= -1;
            if (is_upper(w[idx]) && tk.cap_differential) {
                scalar += valence > 0 ? c_.caps_increment : -c_.caps_increment;
            }
        }
        return scalar;
    };
    const auto negation_check = [&](double valence, size_t start_i, size_t i) {
        if (start_i == 0) {
            if (is_negation(lw[i - 1])) valence *= c_.negation_scalar;
        } else if (start_i == 1) {
            if (lw[i - 2] == "never" && (lw[i - 1] == "so" || lw[i - 1] == "this")) {
                valence *= 1.25;
            } else if (lw[i - 2] == "without" && lw[i - 1] == "doubt") {
            } else if (is_negation(lw[i - 2])) {
                valence *= c_.negation_scalar;
            }
        } else {
            if ((lw[i - 3] == "never" && (lw[i - 2] == "so" || lw[i - 2] == "this")) ||
                (lw[i - 1] == "so" || lw[i - 1] == "this")) {
                valence *= 1.25;
            } else if (lw[i - 3] == "without" && (lw[i - 2] == "doubt" || lw[i - 1] == "doubt")) {
            } else if (is_negation(lw[i - 3])) {
                valence *= c_.negation_scalar;
            }
        }
        return valence;
    };
    const auto special_idioms = [&](double valence, size_t i) {
        const std::string onezero = lw[i - 1] + " " + lw[i];
        const std::string twoonezero = lw[i - 2] + " " + lw[i - 1] + " " + lw[i];
        const std::string twoone = lw[i - 2] + " " + lw[i - 1];
        const std::string threetwoone = lw[i - 3] + " " + lw[i - 2] + " " + lw[i - 1];
        const std::string threetwo = lw[i - 3] + " " + lw[i - 2];
        for (const std::string* seq : {&onezero, &twoonezero, &twoone, &threetwoone, &threetwo}) {
            if (const auto it = lex_.special_cases.find(*seq); it != lex_.special_cases.end()) {
                valence = it->second;
                break;
            }
        }
        if (n - 1 > i) {
            if (const auto it = lex_.special_cases.find(lw[i] + " " + lw[i + 1]); it != lex_.special_cases.end()) {
                valence = it->second;
            }
        }
        if (n - 1 > i + 1) {
            const std::string zeroonetwo = lw[i] + " " + lw[i + 1] + " " + lw[i + 2];
            if (const auto it = lex_.special_cases.find(zeroonetwo); it != lex_.special_cases.end()) {
                valence = it->second;
            }
        }
        for (const std::string* gram : {&threetwoone, &threetwo, &twoone}) {
            if (const double* b = booster_of(*gram)) valence += *b;
        }
        return valence;
    };
    const auto least_check = [&](double valence, size_t i) {
        if (i > 1 && !in_lexicon(lw[i - 1]) && lw[i - 1] == "least") {
            if (lw[i - 2] != "at" && lw[i - 2] != "very") valence *= c_.negation_scalar;
        } else if (i > 0 && !in_lexicon(lw[i - 1]) && lw[i - 1] == "least") {
            valence *= c_.negation_scalar;
        }
        return valence;
    };

    std::vector<double> sentiments;
    sentiments.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        if (booster_of(lw[i]) || (i + 1 < n && lw[i] == "kind" && lw[i + 1] == "of")) {
            sentiments.push_back(0.0);
            continue;
        }
        const double* base = lex_.find(lw[i]);
        if (!base || lex_.neutralized.count(lw[i])) {
            sentiments.push_back(0.0);
            continue;
        }
        double valence = *base;
        if (lw[i] == "no" && i + 1 < n && in_lexicon(lw[i + 1])) valence = 0.0;
        if ((i > 0 && lw[i - 1] == "no") || (i > 1 && lw[i - 2] == "no") ||
            (i > 2 && lw[i - 3] == "no" && (lw[i - 1] == "or" || lw[i - 1] == "nor"))) {
            valence = *base * c_.negation_scalar;
        }
        if (is_upper(w[i]) && tk.cap_differential) {
            valence += valence > 0 ? c_.caps_increment : -c_.caps_increment;
        }
        for (size_t start_i = 0; start_i < 3; ++start_i) {
            if (i > start_i && !in_lexicon(lw[i - (start_i + 1)])) {
                double s = scalar_inc_dec(i - (start_i + 1), valence);
                if (start_i == 1 && s != 0) s *= 0.95;
                if (start_i == 2 && s != 0) s *= 0.9;
                valence += s;
                valence = negation_check(valence, start_i, i);
                if (start_i == 2) valence = special_idioms(valence, i);
            }
        }
        valence = least_check(valence, i);
        sentiments.push_back(valence);
    }

    // Contrastive "but": damp what precedes, amplify what follows. Values are
    // located by first equal entry, reproducing the reference engine exactly.
    if (const auto bit = std::find(lw.begin(), lw.end(), "but"); bit != lw.end()) {
        const auto bi = static_cast<size_t>(bit - lw.begin());
        for (size_t k = 0; k < sentiments.size(); ++k) {
            const double v = sentiments[k];
            const auto si = static_cast<size_t>(std::find(sentiments.begin(), sentiments.end(), v) - sentiments.begin());
            if (si < bi) {
                sentiments[si] = v * c_.but_before;
            } else if (si > bi) {
                sentiments[si] = v * c_.but_after;
            }
        }
    }

    SentimentScore out;
    out.source = Source::kRule;
    if (sentiments.empty()) return out;

    double sum = 0.0;
    for (double s : sentiments) sum += s;
    const auto bangs = static_cast<int>(std::count(text.begin(), text.end(), '!'));
    const auto questions = static_cast<int>(std::count(text.begin(), text.end(), '?'));
    double emphasis = std::min(bangs, c_.max_exclamations) * c_.exclamation_increment;
    if (questions > 1) emphasis += questions <= 3 ? questions * c_.question_increment : c_.question_cap;
    if (sum > 0) {
        sum += emphasis;
    } else if (sum < 0) {
        sum -= emphasis;
    }
    out.compound = std::clamp(sum / std::sqrt(sum * sum + c_.alpha), -1.0, 1.0);

    double pos_sum = 0.0;
    double neg_sum = 0.0;
    double neu_count = 0.0;
    for (double s : sentiments) {
        if (s > 0) pos_sum += s + 1;
        if (s < 0) neg_sum += s - 1;
        if (s == 0) neu_count += 1;
    }
    if (pos_sum > std::fabs(neg_sum)) {
        pos_sum += emphasis;
    } else if (pos_sum < std::fabs(neg_sum)) {
        neg_sum -= emphasis;
    }
    const double total = pos_sum + std::fabs(neg_sum) + neu_count;
    out.pos = std::fabs(pos_sum / total);
    out.neg = std::fabs(neg_sum / total);
    out.neu = std::fabs(neu_count / total);

    if (std::fabs(out.compound) < band_) {
        out.label = Label::kNeutral;
    } else {
        out.label = out.compound > 0 ? Label::kPositive : Label::kNegative;
    }
    return out;
}

SentimentScore score_rule_based(std::string_view text_clean, const Lexicon& lex) {
    return RuleScorer(lex).score(text_clean);
}

const std::vector<std::string>& extra_neutral_terms() {
    static const std::vector<std::string> terms{"asset", "credit", "cut",      "debt",  "interest",
                                                "low",   "pay",    "security", "share", "treasury"};
    return terms;
}

Lexicon neutralize_query_terms(const Lexicon& lex, const keywords::Query& q) {
    Lexicon out = lex;
    const auto neutralize = [&](const std::string& token) {
        for (const auto& form : keywords::surface_forms(token)) {
            if (auto it = out.valences.find(form); it != out.valences.end()) {
                it->second = 0.0;
                out.neutralized.insert(form);
            }
        }
    };
    for (const auto& kw : keywords::all_keywords(q.groups)) {
        for (const auto& tok : keywords::tokenize(kw)) neutralize(tok);
    }
    for (const auto& term : extra_neutral_terms()) neutralize(term);
    return out;
}

std::optional<SentimentScore> apply_neutral_policy(const SentimentScore& s, double band, NeutralMode mode) {
    const bool neutral = std::fabs(s.compound) < band ||
                         (s.source == Source::kExternal && s.label == Label::kNeutral);
    if (!neutral) return s;
    if (mode == NeutralMode::kDrop) return std::nullopt;
    SentimentScore z = s;
    z.compound = 0.0;
    z.label = Label::kNeutral;
    return z;
}

std::string desentencize(std::string_view text) {
    std::string out(text);
    const auto digit = [](char c) { return c >= '0' && c <= '9'; };
    for (size_t i = 0; i < out.size(); ++i) {
        if (out[i] != '.') continue;
        const bool numeric = i > 0 && i + 1 < out.size() && digit(out[i - 1]) && digit(out[i + 1]);
        if (!numeric) out[i] = ';';
    }
    return out;
}

// ---------------------------------------------------------------------------

ExternalScores parse_external_scores(std::string_view csv_text) {
    const CsvTable t = parse_csv(csv_text);
    const size_t c_id = t.column("id");
    const size_t c_pos = t.column("pos");
    const size_t c_neg = t.column("neg");
    const size_t c_neu = t.column("neu");
    ExternalScores out;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string where = "external scores line " + std::to_string(t.line_numbers[r]);
        if (row.size() < t.header.size()) throw Error(ErrorKind::kParse, where + ": too few fields");
        SentimentScore s;
        s.source = Source::kExternal;
        try {
            s.pos = parse_double(row[c_pos]);
            s.neg = parse_double(row[c_neg]);
            s.neu = parse_double(row[c_neu]);
        } catch (const Error& e) {
            throw Error(ErrorKind::kParse, where + ": " + e.what());
        }
        for (double p : {s.pos, s.neg, s.neu}) {
            if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::kParse, where + ": probability outside [0, 1]");
        }
        if (std::fabs(s.pos + s.neg + s.neu - 1.0) > 1e-3) {
            throw Error(ErrorKind::kParse, where + ": probabilities do not sum to 1");
        }
        s.compound = s.pos - s.neg;
        if (s.pos >= s.neg && s.pos >= s.neu) {
            s.label = Label::kPositive;
        } else if (s.neg >= s.neu) {
            s.label = Label::kNegative;
        } else {
            s.label = Label::kNeutral;
        }
        const std::string id = trim(row[c_id]);
        if (id.empty()) throw Error(ErrorKind::kParse, where + ": empty id");
        if (!out.by_id.emplace(id, s).second) throw Error(ErrorKind::kParse, where + ": duplicate id '" + id + "'");
        out.order.push_back(id);
    }
    return out;
}

ExternalScores load_external_scores(const std::string& path) { return parse_external_scores(read_text_file(path)); }

JoinReport join_report(const ExternalScores& scores, const std::vector<std::string>& corpus_ids) {
    JoinReport r;
    std::unordered_set<std::string> corpus(corpus_ids.begin(), corpus_ids.end());
    for (const auto& id : scores.order) {
        if (!corpus.count(id)) r.unknown_ids.push_back(id);
    }
    for (const auto& id : corpus_ids) {
        if (!scores.by_id.count(id)) r.missing_ids.push_back(id);
    }
    return r;
}

}  // namespace tfsi::sentiment
