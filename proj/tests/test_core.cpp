#include <doctest.h>

#include <random>

#include "fragsel/core.hpp"
#include "fragsel/json_io.hpp"

using namespace fragsel;

TEST_CASE("count_tokens counts maximal non-whitespace runs") {
    CHECK(count_tokens("") == 0);
    CHECK(count_tokens("a  b\tc") == 3);
    CHECK(count_tokens("Nobel Peace Prize 2019") == 4);
    CHECK(count_tokens("   ") == 0);
    CHECK(count_tokens(" x ") == 1);
}

TEST_CASE("count_tokens is additive across a space join") {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> len(1, 12);
    std::uniform_int_distribution<int> ch(0, 3);
    auto random_text = [&] {
        std::string s;
        int n = len(rng);
        for (int i = 0; i < n; ++i) {
            int c = ch(rng);
            s.push_back(c == 0 ? ' ' : c == 1 ? '\t' : static_cast<char>('a' + c));
        }
        return s;
    };
    for (int i = 0; i < 500; ++i) {
        std::string s1 = random_text();
        std::string s2 = random_text();
        CHECK(count_tokens(s1 + " " + s2) == count_tokens(s1) + count_tokens(s2));
    }
}

TEST_CASE("normalize_whitespace collapses runs and trims") {
    CHECK(normalize_whitespace("  a  b \t c ") == "a b c");
    CHECK(normalize_whitespace("\n\n") == "");
}

TEST_CASE("query validation rejects whitespace-only text") {
    Query blank{"q", "  \t ", std::nullopt};
    CHECK_THROWS_AS(blank.validate(), Error);
    Query ok{"q", "ok", std::nullopt};
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("documents cache their token count") {
    Document d = Document::make_text("d", "one two  three");
    CHECK(d.token_count == 3);
    Document img = Document::make_image("i", "ref.jpg");
    CHECK(img.token_count == 0);
    CHECK(img.is_image());
}

TEST_CASE("token logprobs invariants") {
    TokenLogProbs ok{{"a", "b"}, {-0.1, -0.2}};
    CHECK_NOTHROW(ok.validate());
    TokenLogProbs positive{{"a"}, {0.5}};
    CHECK_THROWS_AS(positive.validate(), Error);
    TokenLogProbs uneven{{"a", "b"}, {-0.1}};
    CHECK_THROWS_AS(uneven.validate(), Error);
    TokenLogProbs empty{{}, {}};
    CHECK_THROWS_AS(empty.validate(), Error);
}

TEST_CASE("config invariants") {
    Config cfg;
    CHECK_NOTHROW(cfg.validate());
    SUBCASE("n_seg must not exceed n_ret") {
        cfg.n_seg = cfg.n_ret + 1;
        CHECK_THROWS_AS(cfg.validate(), Error);
    }
    SUBCASE("alpha range") {
        cfg.alpha = 1.2;
        CHECK_THROWS_AS(cfg.validate(), Error);
    }
    SUBCASE("temperature positive") {
        cfg.temperature = 0.0;
        CHECK_THROWS_AS(cfg.validate(), Error);
    }
}

TEST_CASE("evidence item token costs") {
    Config cfg;
    EvidenceItem text = EvidenceItem::coarse_doc(Document::make_text("d", "a b c"));
    CHECK(text.token_cost(cfg.image_token_cost) == 3);
    CHECK_FALSE(text.is_image_kind());

    EvidenceItem image = EvidenceItem::coarse_doc(Document::make_image("i", "r.jpg"));
    CHECK(image.is_image_kind());
    CHECK(image.token_cost(cfg.image_token_cost) == cfg.image_token_cost);

    VisualFragment vf{"i", {0, 0, 10, 10}, 0.5, 0.5};
    CHECK(EvidenceItem::visual_frag(vf).is_image_kind());
}

namespace {

EvidenceItem random_item(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> kind(0, 3);
    std::uniform_real_distribution<double> real(0.0, 1.0);
    std::uniform_real_distribution<double> coord(0.0, 500.0);
    switch (kind(rng)) {
        case 0:
            return EvidenceItem::coarse_doc(Document::make_text(
                "d" + std::to_string(rng() % 100), "alpha beta " + std::to_string(rng() % 1000)));
        case 1: {
            TextFragment tf{"d" + std::to_string(rng() % 100), {1, 3},
                            "some span text " + std::to_string(rng() % 1000),
                            real(rng) * 1e-3 + 0.1};
            auto item = EvidenceItem::text_frag(tf);
            if (rng() % 2 == 0) item.selector_score = real(rng) * 7 - 3;
            return item;
        }
        case 2: {
            double x0 = coord(rng), y0 = coord(rng);
            VisualFragment vf{"i" + std::to_string(rng() % 100),
                              {x0, y0, x0 + 1 + coord(rng), y0 + 1 + coord(rng)},
                              real(rng), real(rng)};
            return EvidenceItem::visual_frag(vf);
        }
        default:
            return EvidenceItem::original_image(
                Document::make_image("i" + std::to_string(rng() % 100),
                                     "ref" + std::to_string(rng() % 1000) + ".jpg"));
    }
}

}  // namespace

TEST_CASE("evidence items round-trip losslessly through JSON") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 300; ++i) {
        EvidenceItem item = random_item(rng);
        std::string once = to_json(item).dump();
        EvidenceItem back = evidence_item_from_json(Json::parse(once));
        std::string twice = to_json(back).dump();
        REQUIRE(once == twice);
        CHECK(item.kind == back.kind);
        CHECK(item.selector_score == back.selector_score);
        if (const VisualFragment* vf = item.visual_fragment()) {
            CHECK(vf->objectness == back.visual_fragment()->objectness);
            CHECK(vf->box.x_max == back.visual_fragment()->box.x_max);
        }
    }
}

TEST_CASE("evidence JSON rejects malformed input") {
    CHECK_THROWS_AS(evidence_item_from_json(Json{{"kind", "mystery"}, {"payload", Json::object()}}),
                    Error);
    CHECK_THROWS_AS(document_from_json(Json{{"id", "d"}, {"modality", "audio"}, {"body", "x"}}),
                    Error);
    CHECK_THROWS_AS(box_from_json(Json::array({0, 0, 0, 5})), Error);
}
