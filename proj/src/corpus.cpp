#include "tfsi/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <httplib.h>
#include <json.hpp>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "tfsi/csv.hpp"
#include "tfsi/error.hpp"

namespace tfsi::corpus {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(ExcludedReason r) {
    switch (r) {
        case ExcludedReason::kCrypto: return "crypto";
        case ExcludedReason::kAdPhrase: return "ad_phrase";
        case ExcludedReason::kEmptyAfterClean: return "empty_after_clean";
    }
    return "unknown";
}

std::optional<ExcludedReason> parse_excluded_reason(std::string_view s) {
    if (s == "crypto") return ExcludedReason::kCrypto;
    if (s == "ad_phrase") return ExcludedReason::kAdPhrase;
    if (s == "empty_after_clean") return ExcludedReason::kEmptyAfterClean;
    return std::nullopt;
}

namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorKind::kParse, what); }

const json& require(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(std::string("missing field '") + key + "'");
    return *it;
}

std::string require_string(const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_string()) schema_error(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::int64_t require_count(const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_number_integer()) schema_error(std::string("field '") + key + "' must be an integer");
    const auto n = v.get<std::int64_t>();
    if (n < 0) schema_error(std::string("field '") + key + "' must be non-negative");
    return n;
}

RawTweet raw_from_json(const json& obj) {
    if (!obj.is_object()) schema_error("record is not a JSON object");
    RawTweet t;
    t.id = require_string(obj, "id");
    if (t.id.empty()) schema_error("empty id");
    t.text = require_string(obj, "text");
    if (t.text.empty()) schema_error("empty text");
    t.created_at = parse_rfc3339(require_string(obj, "created_at"));
    t.author_id = require_string(obj, "author_id");
    const json& rt = require(obj, "is_retweet");
    if (!rt.is_boolean()) schema_error("field 'is_retweet' must be a boolean");
    t.is_retweet = rt.get<bool>();
    t.retweet_count = require_count(obj, "retweet_count");
    t.reply_count = require_count(obj, "reply_count");
    t.like_count = require_count(obj, "like_count");
    if (const auto it = obj.find("possibly_sensitive"); it != obj.end() && !it->is_null()) {
        if (!it->is_boolean()) schema_error("field 'possibly_sensitive' must be a boolean");
        t.possibly_sensitive = it->get<bool>();
    }
    return t;
}

ordered_json raw_to_json(const RawTweet& t) {
    ordered_json j;
    j["id"] = t.id;
    j["text"] = t.text;
    j["created_at"] = format_rfc3339_utc(t.created_at);
    j["author_id"] = t.author_id;
    j["is_retweet"] = t.is_retweet;
    j["retweet_count"] = t.retweet_count;
    j["reply_count"] = t.reply_count;
    j["like_count"] = t.like_count;
    if (t.possibly_sensitive) j["possibly_sensitive"] = *t.possibly_sensitive;
    return j;
}

// Accumulates records and enforces id uniqueness and the malformed budget.
class RecordSink {
public:
    explicit RecordSink(const LoadOptions& opts) : opts_(opts) {}

    void accept_line(std::string_view line) {
        ++result_.total_records;
        try {
            accept_raw(raw_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            malformed(std::string("invalid JSON: ") + e.what());
        } catch (const Error& e) {
            malformed(e.what());
        }
    }

    void accept_object(const json& obj) {
        ++result_.total_records;
        try {
            accept_raw(raw_from_json(obj));
        } catch (const json::exception& e) {
            malformed(std::string("invalid record: ") + e.what());
        } catch (const Error& e) {
            malformed(e.what());
        }
    }

    void accept_record(RawTweet t) {
        ++result_.total_records;
        try {
            if (t.id.empty()) schema_error("empty id");
            if (t.text.empty()) schema_error("empty text");
            accept_raw(std::move(t));
        } catch (const Error& e) {
            malformed(e.what());
        }
    }

    LoadResult finish() {
        const auto allowed = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(opts_.malformed_budget * static_cast<double>(result_.total_records))));
        if (result_.malformed > allowed) {
            std::string msg = "malformed records (" + std::to_string(result_.malformed) + " of " +
                              std::to_string(result_.total_records) + ") exceed budget";
            if (!result_.malformed_examples.empty()) msg += "; first: " + result_.malformed_examples.front();
            throw Error(ErrorKind::kParse, msg);
        }
        return std::move(result_);
    }

private:
    void accept_raw(RawTweet t) {
        if (!ids_.insert(t.id).second) schema_error("duplicate id '" + t.id + "'");
        if (t.is_retweet && opts_.drop_retweets) {
            ++result_.retweets;
            return;
        }
        result_.tweets.push_back(std::move(t));
    }

    void malformed(std::string why) {
        ++result_.malformed;
        if (result_.malformed_examples.size() < 5) {
            result_.malformed_examples.push_back("record " + std::to_string(result_.total_records) + ": " +
                                                 std::move(why));
        }
    }

    const LoadOptions& opts_;
    LoadResult result_;
    std::unordered_set<std::string> ids_;
};

bool blank(std::string_view line) {
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

LoadResult load_http(const std::string& url, const LoadOptions& opts) {
    constexpr std::string_view kScheme = "http://";
    if (url.rfind(kScheme, 0) != 0) throw Error(ErrorKind::kIo, "only plain http sources are supported: " + url);
    const size_t path_pos = url.find('/', kScheme.size());
    const std::string host = url.substr(0, path_pos);
    const std::string path = path_pos == std::string::npos ? "/" : url.substr(path_pos);

    httplib::Client client(host);
    client.set_connection_timeout(5);
    client.set_read_timeout(30);

    RecordSink sink(opts);
    std::optional<std::string> cursor;
    std::unordered_set<std::string> seen_cursors;
    for (int page = 1;; ++page) {
        httplib::Params params{{"page", std::to_string(page)}, {"page_size", std::to_string(opts.page_size)}};
        if (cursor) params.emplace("cursor", *cursor);
        const auto res = client.Get(path, params, httplib::Headers{});
        if (!res) {
            throw Error(ErrorKind::kIo, "source unreachable: " + url + " (" + httplib::to_string(res.error()) + ")");
        }
        if (res->status != 200) {
            throw Error(ErrorKind::kIo, "source returned HTTP " + std::to_string(res->status) + " for page " +
                                            std::to_string(page));
        }
        json body;
        try {
            body = json::parse(res->body);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::kParse, std::string("page is not JSON: ") + e.what());
        }
        const auto data = body.find("data");
        if (data == body.end() || !data->is_array()) throw Error(ErrorKind::kParse, "page lacks a 'data' array");
        for (const auto& rec : *data) sink.accept_object(rec);

        const auto next = body.find("next");
        if (next == body.end() || next->is_null()) break;
        std::string next_cursor = next->is_string() ? next->get<std::string>() : next->dump();
        if (!seen_cursors.insert(next_cursor).second) {
            throw Error(ErrorKind::kParse, "pagination cursor repeated: " + next_cursor);
        }
        cursor = std::move(next_cursor);
    }
    return sink.finish();
}

}  // namespace

RawTweet parse_raw_tweet(std::string_view json_line) {
    try {
        return raw_from_json(json::parse(json_line));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::kParse, std::string("invalid JSON: ") + e.what());
    }
}

std::string serialize_raw_tweet(const RawTweet& t) { return raw_to_json(t).dump(); }

LoadResult load_jsonl_text(std::string_view text, const LoadOptions& opts) {
    RecordSink sink(opts);
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(start, end - start);
        if (!blank(line)) sink.accept_line(line);
        start = end + 1;
    }
    return sink.finish();
}

LoadResult load_records(std::vector<RawTweet> records, const LoadOptions& opts) {
    RecordSink sink(opts);
    for (auto& t : records) sink.accept_record(std::move(t));
    return sink.finish();
}

LoadResult load_source(const std::string& source, const LoadOptions& opts) {
    if (source.rfind("http://", 0) == 0 || source.rfind("https://", 0) == 0) return load_http(source, opts);
    std::ifstream in(source, std::ios::binary);
    if (!in) throw Error(ErrorKind::kIo, "source unreachable: cannot open '" + source + "'");
    RecordSink sink(opts);
    std::string line;
    while (std::getline(in, line)) {
        if (!blank(line)) sink.accept_line(line);
    }
    return sink.finish();
}

// ---------------------------------------------------------------------------

namespace {

bool is_space_at(std::string_view s, size_t i, size_t* width) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        *width = 1;
        return true;
    }
    // U+00A0 NO-BREAK SPACE
    if (c == 0xC2 && i + 1 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0xA0) {
        *width = 2;
        return true;
    }
    return false;
}

std::string decode_entities_once(std::string_view s) {
    static constexpr std::pair<std::string_view, char> kEntities[] = {
        {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&#39;", '\''},
    };
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size();) {
        bool replaced = false;
        if (s[i] == '&') {
            for (const auto& [entity, ch] : kEntities) {
                if (s.substr(i, entity.size()) == entity) {
                    out.push_back(ch);
                    i += entity.size();
                    replaced = true;
                    break;
                }
            }
        }
        if (!replaced) out.push_back(s[i++]);
    }
    return out;
}

bool alnum(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool starts_with_ci(std::string_view s, size_t pos, std::string_view prefix) {
    if (pos + prefix.size() > s.size()) return false;
    for (size_t k = 0; k < prefix.size(); ++k) {
        char c = s[pos + k];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c != prefix[k]) return false;
    }
    return true;
}

// Offset at which a URL begins inside a whitespace-delimited token, if any.
size_t url_start(std::string_view token) {
    for (size_t i = 0; i < token.size(); ++i) {
        if (starts_with_ci(token, i, "http")) return i;
        if (i == 0 && starts_with_ci(token, i, "www.")) return i;
        if (starts_with_ci(token, i, "t.co/") && (i == 0 || !alnum(token[i - 1]))) return i;
    }
    return std::string_view::npos;
}

}  // namespace

std::string normalize_text(std::string_view text) {
    std::string decoded(text);
    while (true) {
        std::string next = decode_entities_once(decoded);
        if (next == decoded) break;
        decoded = std::move(next);
    }

    std::string out;
    out.reserve(decoded.size());
    const std::string_view s = decoded;
    size_t i = 0;
    while (i < s.size()) {
        size_t w = 0;
        if (is_space_at(s, i, &w)) {
            i += w;
            continue;
        }
        size_t j = i;
        while (j < s.size() && !is_space_at(s, j, &w)) ++j;
        std::string_view token = s.substr(i, j - i);
        i = j;
        if (token.front() == '@') continue;
        if (const size_t u = url_start(token); u != std::string_view::npos) token = token.substr(0, u);
        if (token.empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out.append(token);
    }
    return out;
}

std::optional<ExcludedReason> exclusion_filter(std::string_view text_clean, const ExclusionRules& rules) {
    if (text_clean.empty()) return ExcludedReason::kEmptyAfterClean;
    const std::string lower = to_lower(text_clean);
    for (const auto& phrase : rules.ad_phrases) {
        if (lower.find(to_lower(phrase)) != std::string::npos) return ExcludedReason::kAdPhrase;
    }
    for (const auto& term : rules.crypto_terms) {
        if (lower.find(to_lower(term)) != std::string::npos) return ExcludedReason::kCrypto;
    }
    return std::nullopt;
}

std::string dedup_key(std::string_view text_clean, DedupMode mode) {
    if (mode == DedupMode::kExact) return std::string(text_clean);
    std::string out;
    out.reserve(text_clean.size());
    bool pending_space = false;
    for (char c : text_clean) {
        const auto uc = static_cast<unsigned char>(c);
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            pending_space = !out.empty();
            continue;
        }
        if (uc < 0x80 && std::ispunct(uc)) continue;
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    }
    return out;
}

void deduplicate(std::vector<CleanTweet>& tweets, DedupMode mode) {
    std::stable_sort(tweets.begin(), tweets.end(), [](const CleanTweet& a, const CleanTweet& b) {
        if (a.raw.created_at != b.raw.created_at) return a.raw.created_at < b.raw.created_at;
        return a.raw.id < b.raw.id;
    });
    std::unordered_map<std::string, std::string> first_by_key;
    for (auto& t : tweets) {
        if (t.excluded_reason) continue;
        t.duplicate_of.reset();
        auto [it, inserted] = first_by_key.try_emplace(dedup_key(t.text_clean, mode), t.raw.id);
        if (!inserted) t.duplicate_of = it->second;
    }
}

IngestResult ingest(const LoadResult& loaded, const IngestOptions& opts) {
    IngestResult out;
    out.stats.total_records = loaded.total_records;
    out.stats.malformed = loaded.malformed;
    out.stats.retweets = loaded.retweets;
    out.tweets.reserve(loaded.tweets.size());
    for (const auto& raw : loaded.tweets) {
        CleanTweet t;
        t.raw = raw;
        t.text_clean = normalize_text(raw.text);
        t.eastern = to_eastern(raw.created_at, opts.tz);
        t.excluded_reason = exclusion_filter(t.text_clean, opts.rules);
        out.tweets.push_back(std::move(t));
    }
    deduplicate(out.tweets, opts.dedup);
    for (const auto& t : out.tweets) {
        if (t.excluded_reason) {
            switch (*t.excluded_reason) {
                case ExcludedReason::kCrypto: ++out.stats.excluded_crypto; break;
                case ExcludedReason::kAdPhrase: ++out.stats.excluded_ad; break;
                case ExcludedReason::kEmptyAfterClean: ++out.stats.excluded_empty; break;
            }
        } else if (t.duplicate_of) {
            ++out.stats.duplicates;
        } else {
            ++out.stats.kept;
        }
    }
    return out;
}

std::string serialize_clean_tweet(const CleanTweet& t) {
    ordered_json j = raw_to_json(t.raw);
    j["text_clean"] = t.text_clean;
    j["created_at_eastern"] = format_eastern(t.eastern);
    j["duplicate_of"] = t.duplicate_of ? ordered_json(*t.duplicate_of) : ordered_json(nullptr);
    j["excluded_reason"] = t.excluded_reason ? ordered_json(to_string(*t.excluded_reason)) : ordered_json(nullptr);
    return j.dump();
}

std::string write_clean_jsonl(const std::vector<CleanTweet>& tweets) {
    std::string out;
    for (const auto& t : tweets) {
        out += serialize_clean_tweet(t);
        out.push_back('\n');
    }
    return out;
}

std::vector<CleanTweet> read_clean_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
    std::vector<CleanTweet> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        try {
            const json j = json::parse(line);
            CleanTweet t;
            t.raw = raw_from_json(j);
            t.text_clean = require_string(j, "text_clean");
            const std::string eastern = require_string(j, "created_at_eastern");
            // Offset is carried in the string; recompute the wall clock from it.
            if (eastern.size() < 25) schema_error("bad created_at_eastern");
            const int sign = eastern[19] == '-' ? -1 : 1;
            t.eastern.utc = t.raw.created_at;
            t.eastern.offset_minutes =
                sign * (static_cast<int>(parse_int(eastern.substr(20, 2))) * 60 +
                        static_cast<int>(parse_int(eastern.substr(23, 2))));
            t.eastern.local = LocalSeconds{t.raw.created_at.time_since_epoch() +
                                           std::chrono::minutes{t.eastern.offset_minutes}};
            if (const auto& d = j.at("duplicate_of"); !d.is_null()) t.duplicate_of = d.get<std::string>();
            if (const auto& e = j.at("excluded_reason"); !e.is_null()) {
                t.excluded_reason = parse_excluded_reason(e.get<std::string>());
                if (!t.excluded_reason) schema_error("unknown excluded_reason");
            }
            out.push_back(std::move(t));
        } catch (const json::exception& e) {
            throw Error(ErrorKind::kParse, path + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorKind::kParse, path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::string stats_json(const IngestStats& s) {
    ordered_json j;
    j["total_records"] = s.total_records;
    j["malformed"] = s.malformed;
    j["retweets"] = s.retweets;
    j["excluded_crypto"] = s.excluded_crypto;
    j["excluded_ad_phrase"] = s.excluded_ad;
    j["excluded_empty_after_clean"] = s.excluded_empty;
    j["duplicates"] = s.duplicates;
    j["kept"] = s.kept;
    j["conserved"] = s.conserved();
    return j.dump(2) + "\n";
}

}  // namespace tfsi::corpus
