#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <httplib.h>
#include <json.hpp>
#include <random>
#include <thread>

#include "tfsi/corpus.hpp"
#include "tfsi/csv.hpp"
#include "tfsi/error.hpp"

using namespace tfsi;
using namespace tfsi::corpus;

namespace {

std::string line(const std::string& id, const std::string& text, const std::string& ts = "2022-07-01T18:00:00Z",
                 bool rt = false) {
    nlohmann::json j{{"id", id},          {"text", text},     {"created_at", ts}, {"author_id", "a"},
                     {"is_retweet", rt},  {"retweet_count", 0}, {"reply_count", 0}, {"like_count", 1}};
    return j.dump();
}

RawTweet raw(const std::string& id, const std::string& text, SysSeconds t) {
    RawTweet r;
    r.id = id;
    r.text = text;
    r.created_at = t;
    r.author_id = "a";
    return r;
}

SysSeconds at(const char* s) { return parse_rfc3339(s); }

}  // namespace

TEST(Load, WellFormedLineRoundTrips) {
    const auto r = load_jsonl_text(line("42", "bonds rally"));
    ASSERT_EQ(r.tweets.size(), 1u);
    EXPECT_EQ(r.tweets[0].id, "42");
    EXPECT_EQ(parse_raw_tweet(serialize_raw_tweet(r.tweets[0])).text, "bonds rally");
}

TEST(Load, MalformedMiddleLineIsSkippedAndCounted) {
    const auto r = load_jsonl_text(line("1", "a") + "\n{\"id\": \"2\", broken\n" + line("3", "c") + "\n");
    EXPECT_EQ(r.tweets.size(), 2u);
    EXPECT_EQ(r.malformed, 1u);
    EXPECT_EQ(r.total_records, 3u);
}

TEST(Load, MalformedBudgetAborts) {
    std::string text;
    for (int i = 0; i < 50; ++i) text += line(std::to_string(i), "x") + "\n";
    text += "nope\nnope again\n";
    EXPECT_THROW(load_jsonl_text(text), Error);
    LoadOptions lenient;
    lenient.malformed_budget = 0.1;
    EXPECT_EQ(load_jsonl_text(text, lenient).malformed, 2u);
}

TEST(Load, SchemaViolationsAreMalformed) {
    EXPECT_THROW(parse_raw_tweet(R"({"id": "", "text": "x", "created_at": "2022-01-01T00:00:00Z", "author_id": "a", "is_retweet": false, "retweet_count": 0, "reply_count": 0, "like_count": 0})"),
                 Error);
    EXPECT_THROW(parse_raw_tweet(R"({"id": "1", "text": "x", "created_at": "yesterday", "author_id": "a", "is_retweet": false, "retweet_count": 0, "reply_count": 0, "like_count": 0})"),
                 Error);
    EXPECT_THROW(parse_raw_tweet(R"({"id": "1", "text": "x", "created_at": "2022-01-01T00:00:00Z", "author_id": "a", "is_retweet": false, "retweet_count": -1, "reply_count": 0, "like_count": 0})"),
                 Error);
}

TEST(Load, RetweetsAreDropped) {
    const auto r = load_jsonl_text(line("1", "a") + "\n" + line("2", "RT a", "2022-07-01T18:00:00Z", true) + "\n");
    EXPECT_EQ(r.tweets.size(), 1u);
    EXPECT_EQ(r.retweets, 1u);
}

TEST(Load, MissingFileIsIoError) {
    try {
        load_source("/nonexistent/tweets.jsonl");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kIo);
    }
}

TEST(Load, PaginatedEndpointStreamsPagesInOrder) {
    httplib::Server server;
    server.Get("/tweets", [](const httplib::Request& req, httplib::Response& res) {
        const int page = req.has_param("page") ? std::stoi(req.get_param_value("page")) : 1;
        nlohmann::json body;
        body["data"] = nlohmann::json::array();
        for (int i = 0; i < 5; ++i) body["data"].push_back(nlohmann::json::parse(line(std::to_string(page * 10 + i), "t")));
        body["next"] = page == 1 ? nlohmann::json("c2") : nlohmann::json(nullptr);
        res.set_content(body.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    const auto r = load_source("http://127.0.0.1:" + std::to_string(port) + "/tweets");
    server.stop();
    th.join();
    ASSERT_EQ(r.tweets.size(), 10u);
    EXPECT_EQ(r.tweets.front().id, "10");
    EXPECT_EQ(r.tweets[5].id, "20");
    EXPECT_EQ(r.tweets.back().id, "24");
}

TEST(Load, UnreachableEndpointIsIoError) {
    try {
        load_source("http://127.0.0.1:1/tweets");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kIo);
    }
}

TEST(Normalize, Examples) {
    EXPECT_EQ(normalize_text("AT&amp;T  bonds https://t.co/x @user rally"), "AT&T bonds rally");
    EXPECT_EQ(normalize_text(""), "");
}

TEST(Normalize, GoldenFile) {
    std::ifstream in(std::string(TFSI_TEST_DATA) + "/normalization_golden.jsonl");
    ASSERT_TRUE(in);
    std::string l;
    int n = 0;
    while (std::getline(in, l)) {
        const auto j = nlohmann::json::parse(l);
        EXPECT_EQ(normalize_text(j["input"].get<std::string>()), j["expected"].get<std::string>()) << l;
        ++n;
    }
    EXPECT_EQ(n, 50);
}

TEST(Normalize, IdempotentAndCleanOnRandomInput) {
    const std::vector<std::string> parts{"bond", "&amp;", "&amp;amp;", "@who", "https://t.co/q", "  ", "\t", "www.x.y",
                                         "&lt;", "&quot;", "rates", "t.co/", "http", "&#39;", "yield!", "\xC2\xA0"};
    std::mt19937 rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string s;
        const int k = static_cast<int>(rng() % 8);
        for (int i = 0; i < k; ++i) s += parts[rng() % parts.size()] + (rng() % 2 ? " " : "");
        const std::string once = normalize_text(s);
        EXPECT_EQ(normalize_text(once), once) << s;
        EXPECT_EQ(once.find("  "), std::string::npos);
        EXPECT_EQ(to_lower(once).find("http"), std::string::npos);
        EXPECT_FALSE(!once.empty() && once.front() == '@');
        EXPECT_EQ(once.find(" @"), std::string::npos);
    }
}

TEST(Exclusion, Examples) {
    const ExclusionRules rules;
    EXPECT_EQ(exclusion_filter("my credit card limit rose", rules), ExcludedReason::kAdPhrase);
    EXPECT_EQ(exclusion_filter("shiba token to the moon", rules), ExcludedReason::kCrypto);
    EXPECT_EQ(exclusion_filter("corporate bond yields rise", rules), std::nullopt);
    EXPECT_EQ(exclusion_filter("Social Security and crypto", rules), ExcludedReason::kAdPhrase);
    EXPECT_EQ(exclusion_filter("", rules), ExcludedReason::kEmptyAfterClean);
}

TEST(Dedup, KeepsFirstIncidence) {
    LoadResult lr;
    lr.tweets = {raw("b", "bond yields up", at("2022-01-03T15:00:00Z")), raw("a", "bond yields up", at("2022-01-03T14:00:00Z")),
                 raw("c", "bond yields up!", at("2022-01-03T16:00:00Z"))};
    lr.total_records = 3;
    const auto r = ingest(lr);
    ASSERT_EQ(r.tweets.size(), 3u);
    EXPECT_EQ(r.tweets[0].id(), "a");
    EXPECT_FALSE(r.tweets[0].duplicate_of);
    EXPECT_EQ(r.tweets[1].duplicate_of, "a");
    EXPECT_FALSE(r.tweets[2].duplicate_of);
    EXPECT_EQ(r.stats.kept, 2u);
}

TEST(Dedup, NearModeFoldsCaseAndPunctuation) {
    LoadResult lr;
    lr.tweets = {raw("1", "Bond yields UP!", at("2022-01-03T14:00:00Z")), raw("2", "bond yields up", at("2022-01-03T15:00:00Z"))};
    lr.total_records = 2;
    IngestOptions near;
    near.dedup = DedupMode::kNear;
    const auto r = ingest(lr, near);
    EXPECT_EQ(r.tweets[1].duplicate_of, "1");
    EXPECT_EQ(ingest(lr).stats.duplicates, 0u);
    EXPECT_EQ(dedup_key("Bond  yields, UP!", DedupMode::kNear), dedup_key("bond yields up", DedupMode::kNear));
}

TEST(Dedup, OrderStableUnderPermutationOfSameTimestampCopies) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        LoadResult lr;
        for (int i = 0; i < 12; ++i) {
            lr.tweets.push_back(raw(std::to_string(i), "text " + std::to_string(rng() % 4),
                                    at("2022-01-03T14:00:00Z") + std::chrono::seconds(rng() % 3)));
        }
        lr.total_records = lr.tweets.size();
        const size_t kept = ingest(lr).stats.kept;
        std::shuffle(lr.tweets.begin(), lr.tweets.end(), rng);
        const auto r = ingest(lr);
        EXPECT_EQ(r.stats.kept, kept);
        for (const auto& t : r.tweets) {
            if (!t.duplicate_of) continue;
            const auto orig = std::find_if(r.tweets.begin(), r.tweets.end(), [&](const CleanTweet& x) { return x.id() == *t.duplicate_of; });
            ASSERT_NE(orig, r.tweets.end());
            EXPECT_LE(orig->raw.created_at, t.raw.created_at);
        }
    }
}

TEST(Eastern, Conversions) {
    EXPECT_EQ(format_local(to_eastern(at("2022-07-01T18:00:00Z")).local), "2022-07-01 14:00:00");
    EXPECT_TRUE(to_eastern(at("2022-07-01T18:00:00Z")).is_dst());
    EXPECT_EQ(format_local(to_eastern(at("2022-01-15T18:00:00Z")).local), "2022-01-15 13:00:00");
    EXPECT_EQ(format_local(to_eastern(at("2022-03-13T06:30:00Z")).local), "2022-03-13 01:30:00");
    EXPECT_EQ(format_local(to_eastern(at("2022-03-13T07:30:00Z")).local), "2022-03-13 03:30:00");
    EXPECT_EQ(format_local(to_eastern(at("2022-11-06T05:30:00Z")).local), "2022-11-06 01:30:00");
    EXPECT_EQ(format_local(to_eastern(at("2022-11-06T06:30:00Z")).local), "2022-11-06 01:30:00");
    EXPECT_EQ(format_local(to_eastern(at("2022-07-01T18:00:00Z"), TzRule::kFixedEst).local), "2022-07-01 13:00:00");
}

TEST(Eastern, RoundTripsThroughLocalTime) {
    std::mt19937_64 rng(11);
    const auto base = at("2006-01-01T00:00:00Z");
    for (int i = 0; i < 5000; ++i) {
        const auto t = base + std::chrono::seconds(static_cast<long long>(rng() % (94ULL * 365 * 86400)));
        const auto e = to_eastern(t);
        EXPECT_EQ(e.utc, t);
        EXPECT_EQ(e.local.time_since_epoch() - t.time_since_epoch(), std::chrono::minutes(e.offset_minutes));
        if (from_eastern(e.local) != t) {
            // Only the repeated fall-back hour is ambiguous.
            EXPECT_EQ(from_eastern(e.local) + std::chrono::hours(1), t);
        }
    }
}

TEST(Ingest, ConservationAndCleanTextOnRandomCorpora) {
    const std::vector<std::string> texts{"bond rally @x",     "credit card promo",  "crypto bond",    "https://t.co/a",
                                         "yields &amp; rates", "yields & rates",    "bond rally",     "@only @mentions",
                                         "loan  default  risk"};
    std::mt19937 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::string jsonl;
        const int n = 1 + static_cast<int>(rng() % 60);
        for (int i = 0; i < n; ++i) {
            const int sec = static_cast<int>(rng() % 50);
            const std::string ts = "2022-02-01T10:00:" + std::string(sec < 10 ? "0" : "") + std::to_string(sec) + "Z";
            if (rng() % 40 == 0) jsonl += "{bad json\n";
            else jsonl += line(std::to_string(i), texts[rng() % texts.size()], ts, rng() % 10 == 0) + "\n";
        }
        LoadOptions lo;
        lo.malformed_budget = 1.0;
        const auto r = ingest(load_jsonl_text(jsonl, lo));
        EXPECT_TRUE(r.stats.conserved());
        for (const auto& t : r.tweets) {
            if (!t.kept()) continue;
            EXPECT_EQ(t.text_clean.find("http"), std::string::npos);
            EXPECT_EQ(t.text_clean.find("  "), std::string::npos);
            EXPECT_NE(t.text_clean.front(), '@');
        }
    }
}

TEST(Ingest, CleanJsonlRoundTrips) {
    LoadResult lr;
    lr.tweets = {raw("1", "bond &amp; loan @x", at("2022-01-03T14:00:00Z")), raw("2", "crypto", at("2022-01-03T15:00:00Z")),
                 raw("3", "bond & loan", at("2022-01-03T16:00:00Z"))};
    lr.total_records = 3;
    const auto r = ingest(lr);
    const std::string path = ::testing::TempDir() + "clean_roundtrip.jsonl";
    write_text_file(path, write_clean_jsonl(r.tweets));
    const auto back = read_clean_jsonl(path);
    ASSERT_EQ(back.size(), 3u);
    for (size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(back[i].id(), r.tweets[i].id());
        EXPECT_EQ(back[i].text_clean, r.tweets[i].text_clean);
        EXPECT_EQ(back[i].duplicate_of, r.tweets[i].duplicate_of);
        EXPECT_EQ(back[i].excluded_reason, r.tweets[i].excluded_reason);
        EXPECT_EQ(back[i].eastern.local, r.tweets[i].eastern.local);
    }
    EXPECT_EQ(write_clean_jsonl(back), write_clean_jsonl(r.tweets));
}
