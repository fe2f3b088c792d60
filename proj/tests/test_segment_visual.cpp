#include <doctest.h>

#include <random>

#include "fragsel/mock_backends.hpp"
#include "fragsel/segment_visual.hpp"
#include "test_helpers.hpp"

using namespace fragsel;
using fragsel::test::make_query;

TEST_CASE("box_area") {
    CHECK(box_area({0, 0, 10, 10}) == 100.0);
    CHECK(box_area({5, 5, 55, 105}) == 5000.0);
    CHECK(box_area({0, 0, 50, 50}) == 2500.0);
}

TEST_CASE("filter_boxes applies all three constraints strictly") {
    VisualFilterThresholds t{0.40, 0.35, 2500.0};

    SUBCASE("candidate above all thresholds is kept") {
        DetectionCandidate c{{0, 0, 60, 50}, 0.50, 0.40};  // area 3000
        auto kept = filter_boxes({c}, t);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].objectness == 0.50);
    }
    SUBCASE("objectness exactly at the threshold is rejected") {
        DetectionCandidate c{{0, 0, 100, 100}, 0.40, 0.90};
        CHECK(filter_boxes({c}, t).empty());
        CHECK(failed_constraints(c, t) == std::vector<std::string>{"objectness"});
    }
    SUBCASE("area exactly at the threshold is rejected") {
        DetectionCandidate c{{0, 0, 50, 50}, 0.9, 0.9};  // area 2500
        CHECK(filter_boxes({c}, t).empty());
        CHECK(failed_constraints(c, t) == std::vector<std::string>{"size"});
    }
    SUBCASE("empty input") {
        CHECK(filter_boxes({}, t).empty());
    }
    SUBCASE("input order is preserved") {
        DetectionCandidate a{{0, 0, 100, 100}, 0.9, 0.9};
        DetectionCandidate b{{1, 1, 101, 101}, 0.8, 0.8};
        auto kept = filter_boxes({a, b}, t);
        REQUIRE(kept.size() == 2);
        CHECK(kept[0].objectness == 0.9);
        CHECK(kept[1].objectness == 0.8);
    }
}

namespace {

std::vector<DetectionCandidate> random_candidates(std::mt19937_64& rng, int max_n) {
    std::uniform_int_distribution<int> nd(0, max_n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> coord(0.0, 80.0);
    std::vector<DetectionCandidate> out;
    int n = nd(rng);
    for (int i = 0; i < n; ++i) {
        double x0 = coord(rng), y0 = coord(rng);
        out.push_back({{x0, y0, x0 + 1 + coord(rng), y0 + 1 + coord(rng)}, unit(rng), unit(rng)});
    }
    return out;
}

bool same_candidates(const std::vector<DetectionCandidate>& a,
                     const std::vector<DetectionCandidate>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].objectness != b[i].objectness || a[i].semantic_score != b[i].semantic_score ||
            a[i].box.x_min != b[i].box.x_min || a[i].box.y_max != b[i].box.y_max) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("filter_boxes subset, idempotence and threshold monotonicity") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int it = 0; it < 500; ++it) {
        auto candidates = random_candidates(rng, 8);
        VisualFilterThresholds t{unit(rng), unit(rng), 1.0 + unit(rng) * 4000.0};

        auto kept = filter_boxes(candidates, t);
        CHECK(kept.size() <= candidates.size());
        for (const auto& c : kept) {
            CHECK(c.objectness > t.tau_obj);
            CHECK(c.semantic_score > t.tau_sem);
            CHECK(box_area(c.box) > t.tau_size);
        }
        CHECK(same_candidates(filter_boxes(kept, t), kept));

        VisualFilterThresholds higher{t.tau_obj + unit(rng) * 0.2, t.tau_sem + unit(rng) * 0.2,
                                      t.tau_size + unit(rng) * 500.0};
        CHECK(filter_boxes(candidates, higher).size() <= kept.size());
    }
}

TEST_CASE("extract_visual_fragments wraps surviving candidates") {
    Json fixture{{"v", 1},
                 {"detections",
                  Json::array({Json{{"query_id", "q"},
                                    {"image_ref", "img.jpg"},
                                    {"candidates",
                                     Json::array({
                                         Json{{"box", {0.0, 0.0, 60.0, 60.0}},
                                              {"objectness", 0.8},
                                              {"semantic", 0.7}},
                                         Json{{"box", {0.0, 0.0, 10.0, 10.0}},
                                              {"objectness", 0.9},
                                              {"semantic", 0.9}},
                                         Json{{"box", {0.0, 0.0, 70.0, 70.0}},
                                              {"objectness", 0.2},
                                              {"semantic", 0.9}},
                                     })}}})}};
    MockDetector detector(fixture, "fixture:test");
    Query q = make_query("q", "find it");
    VisualFilterThresholds t{0.40, 0.35, 2500.0};

    auto frags = extract_visual_fragments(q, Document::make_image("i", "img.jpg"), detector, t);
    REQUIRE(frags.size() == 1);
    CHECK(frags[0].parent_doc_id == "i");
    CHECK(frags[0].objectness == 0.8);
    CHECK(frags[0].box.x_max == 60.0);
    CHECK(detector.calls().size() == 1);

    SUBCASE("zero candidates give zero fragments") {
        Json none{{"v", 1},
                  {"detections", Json::array({Json{{"query_id", "q"},
                                                   {"image_ref", "empty.jpg"},
                                                   {"candidates", Json::array()}}})}};
        MockDetector empty(none, "fixture:none");
        CHECK(extract_visual_fragments(q, Document::make_image("i2", "empty.jpg"), empty, t)
                  .empty());
    }
    SUBCASE("text document input is NotAnImage") {
        CHECK_THROWS_WITH_AS(
            extract_visual_fragments(q, Document::make_text("d", "body"), detector, t),
            doctest::Contains("not an image"), Error);
    }
}

TEST_CASE("out-of-range detector scores raise DetectorFailure") {
    Json fixture{{"v", 1},
                 {"detections",
                  Json::array({Json{{"query_id", "q"},
                                    {"image_ref", "bad.jpg"},
                                    {"candidates",
                                     Json::array({Json{{"box", {0.0, 0.0, 60.0, 60.0}},
                                                       {"objectness", 1.4},
                                                       {"semantic", 0.7}}})}}})}};
    MockDetector detector(fixture, "fixture:bad");
    Query q = make_query("q", "x");
    VisualFilterThresholds t;
    try {
        extract_visual_fragments(q, Document::make_image("i", "bad.jpg"), detector, t);
        FAIL("expected DetectorFailure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DetectorFailure);
    }
}
